//! Dense multilinear maps `B^r -> B` for `B = C^d`.
//!
//! Entries are stored output-index first and then row-major over the
//! argument indices, so `T[i; k_1..k_r]` lives at
//! `i·d^r + k_1·d^{r-1} + … + k_r`.

use num_traits::{One, Zero};

use crate::algebra::{AlgElem, Scalar};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tensor {
    dim: usize,
    arity: usize,
    data: Vec<Scalar>,
}

impl Tensor {
    pub fn zero(dim: usize, arity: usize) -> Self {
        Self {
            dim,
            arity,
            data: vec![Scalar::zero(); dim.pow(arity as u32 + 1)],
        }
    }

    /// Constant arity-zero tensor holding `b`.
    pub fn constant(b: &AlgElem) -> Self {
        Self {
            dim: b.dim(),
            arity: 0,
            data: b.coords().to_vec(),
        }
    }

    pub fn from_data(dim: usize, arity: usize, data: Vec<Scalar>) -> Result<Self> {
        let expected = dim.pow(arity as u32 + 1);
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(Self { dim, arity, data })
    }

    pub fn from_fn(dim: usize, arity: usize, mut f: impl FnMut(usize, &[usize]) -> Scalar) -> Self {
        let mut t = Self::zero(dim, arity);
        let mut ks = vec![0usize; arity];
        for out in 0..dim {
            ks.iter_mut().for_each(|k| *k = 0);
            loop {
                let idx = t.index(out, &ks);
                t.data[idx] = f(out, &ks);
                if !odometer(&mut ks, dim) {
                    break;
                }
            }
        }
        t
    }

    /// The tensor of `(b_1..b_r) ↦ f(b_1..b_r)`, sampled on basis tuples.
    pub fn from_multilinear(
        dim: usize,
        arity: usize,
        mut f: impl FnMut(&[AlgElem]) -> Result<AlgElem>,
    ) -> Result<Self> {
        let mut t = Self::zero(dim, arity);
        let mut ks = vec![0usize; arity];
        loop {
            let args: Vec<AlgElem> = ks.iter().map(|&k| AlgElem::basis(dim, k)).collect();
            let v = f(&args)?;
            for out in 0..dim {
                let idx = t.index(out, &ks);
                t.data[idx] = v.coord(out).clone();
            }
            if !odometer(&mut ks, dim) {
                break;
            }
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn index(&self, out: usize, ks: &[usize]) -> usize {
        debug_assert_eq!(ks.len(), self.arity);
        ks.iter().fold(out, |acc, &k| acc * self.dim + k)
    }

    pub fn entry(&self, out: usize, ks: &[usize]) -> &Scalar {
        &self.data[self.index(out, ks)]
    }

    pub fn set(&mut self, out: usize, ks: &[usize], v: Scalar) {
        let idx = self.index(out, ks);
        self.data[idx] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Value on the basis tuple `(e_{k_1}, …, e_{k_r})`.
    pub fn apply_basis(&self, ks: &[usize]) -> AlgElem {
        AlgElem::new((0..self.dim).map(|o| self.entry(o, ks).clone()).collect())
    }

    pub fn apply(&self, args: &[AlgElem]) -> Result<AlgElem> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: args.len(),
            });
        }
        for a in args {
            crate::error::ensure_dim(self.dim, a.dim())?;
        }
        Ok(self.apply_unchecked(args))
    }

    pub(crate) fn apply_unchecked(&self, args: &[AlgElem]) -> AlgElem {
        let d = self.dim;
        // Supports of the arguments; zero coordinates never contribute.
        let supports: Vec<Vec<usize>> = args
            .iter()
            .map(|a| (0..d).filter(|&k| !a.coord(k).is_zero()).collect())
            .collect();
        let mut out = vec![Scalar::zero(); d];
        if supports.iter().any(Vec::is_empty) {
            return AlgElem::new(out);
        }
        let r = self.arity;
        let mut pos = vec![0usize; r];
        let mut ks = vec![0usize; r];
        loop {
            for i in 0..r {
                ks[i] = supports[i][pos[i]];
            }
            let mut w = Scalar::one();
            for (a, &k) in args.iter().zip(&ks) {
                w *= a.coord(k);
            }
            let base = ks.iter().fold(0usize, |acc, &k| acc * d + k);
            let stride = d.pow(r as u32);
            for (o, acc) in out.iter_mut().enumerate() {
                let e = &self.data[o * stride + base];
                if !e.is_zero() {
                    *acc += e * &w;
                }
            }
            // Advance the mixed-radix counter over the supports.
            let mut i = r;
            loop {
                if i == 0 {
                    return AlgElem::new(out);
                }
                i -= 1;
                pos[i] += 1;
                if pos[i] < supports[i].len() {
                    break;
                }
                pos[i] = 0;
            }
        }
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.same_shape(other)?;
        Ok(Tensor {
            dim: self.dim,
            arity: self.arity,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.same_shape(other)?;
        Ok(Tensor {
            dim: self.dim,
            arity: self.arity,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> Tensor {
        Tensor {
            dim: self.dim,
            arity: self.arity,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    fn same_shape(&self, other: &Tensor) -> Result<()> {
        crate::error::ensure_dim(self.dim, other.dim)?;
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }
}

/// Increments `ks` as a base-`d` counter, last digit fastest. Returns
/// `false` after wrapping past the final tuple.
pub fn odometer(ks: &mut [usize], d: usize) -> bool {
    for k in ks.iter_mut().rev() {
        *k += 1;
        if *k < d {
            return true;
        }
        *k = 0;
    }
    false
}

/// All basis tuples of length `r` over `0..d` in lexicographic order.
pub fn basis_tuples(d: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(d.pow(r as u32));
    let mut ks = vec![0usize; r];
    loop {
        out.push(ks.clone());
        if !odometer(&mut ks, d) {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{sq, LinearMap};

    #[test]
    fn index_layout_is_output_first() {
        let t = Tensor::from_fn(2, 2, |o, ks| sq((o * 100 + ks[0] * 10 + ks[1]) as i64, 1));
        assert_eq!(t.data()[0b101], sq(101, 1));
        assert_eq!(t.entry(1, &[1, 0]), &sq(110, 1));
    }

    #[test]
    fn apply_matches_linear_map() {
        let m = LinearMap::from_rationals(&[&[(1, 2), (0, 1)], &[(1, 2), (1, 1)]]).unwrap();
        let t = m.to_tensor();
        let b = AlgElem::from_rationals(&[(3, 1), (-1, 5)]);
        assert_eq!(t.apply(std::slice::from_ref(&b)).unwrap(), m.apply(&b));
        assert_eq!(LinearMap::from_tensor(&t).unwrap(), m);
    }

    #[test]
    fn apply_is_multilinear_on_general_arguments() {
        let t = Tensor::from_fn(2, 2, |o, ks| sq((o + 2 * ks[0] + 3 * ks[1] + 1) as i64, 1));
        let b = AlgElem::from_rationals(&[(1, 1), (2, 1)]);
        let c = AlgElem::from_rationals(&[(-1, 3), (1, 2)]);
        let direct = t.apply(&[b.clone(), c.clone()]).unwrap();
        let mut expected = AlgElem::zero(2);
        for k0 in 0..2 {
            for k1 in 0..2 {
                let w = b.coord(k0) * c.coord(k1);
                expected = &expected + &t.apply_basis(&[k0, k1]).scale(&w);
            }
        }
        assert_eq!(direct, expected);
    }

    #[test]
    fn basis_tuple_enumeration() {
        assert_eq!(basis_tuples(2, 0), vec![Vec::<usize>::new()]);
        assert_eq!(basis_tuples(3, 2).len(), 9);
        assert_eq!(basis_tuples(2, 2)[2], vec![1, 0]);
    }

    #[test]
    fn shape_errors() {
        let t = Tensor::zero(2, 1);
        assert!(t.apply(&[]).is_err());
        assert!(t.add(&Tensor::zero(2, 2)).is_err());
        assert!(Tensor::from_data(2, 1, vec![Scalar::zero(); 3]).is_err());
    }
}
