//! Truncated multilinear function series `X = (χ_n)` over `B = C^d`, where
//! `χ_0 ∈ B` and `χ_n: B^n → B` is `n`-linear, with the ring product and
//! the multivariate composition.

use num_traits::Zero;
use rayon::prelude::*;

use crate::algebra::AlgElem;
use crate::circular::{alternating_moment, CircularModel, Start};
use crate::cumulants::{FamilyKind, MapFamily};
use crate::error::{ensure_dim, Error, Result};
use crate::rdiag::{alternating_word, RDiagModel};
use crate::tensor::Tensor;

/// Default truncation; composition cost grows like `d^N 2^N`.
pub const DEFAULT_MULTI_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiSeries {
    dim: usize,
    terms: Vec<Tensor>,
}

impl MultiSeries {
    /// `terms[n]` must have arity `n`.
    pub fn new(dim: usize, terms: Vec<Tensor>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Degenerate("empty multilinear series".into()));
        }
        for (n, t) in terms.iter().enumerate() {
            ensure_dim(dim, t.dim())?;
            if t.arity() != n {
                return Err(Error::ArityMismatch {
                    expected: n,
                    found: t.arity(),
                });
            }
        }
        Ok(Self { dim, terms })
    }

    pub fn zero(dim: usize, order: usize) -> Self {
        Self {
            dim,
            terms: (0..=order).map(|n| Tensor::zero(dim, n)).collect(),
        }
    }

    /// The constant series `b`.
    pub fn constant(b: &AlgElem, order: usize) -> Self {
        let mut s = Self::zero(b.dim(), order);
        s.terms[0] = Tensor::constant(b);
        s
    }

    pub fn one(dim: usize, order: usize) -> Self {
        Self::constant(&AlgElem::unit(dim), order)
    }

    /// The compositional identity `I`: only `χ_1 = id`.
    pub fn identity(dim: usize, order: usize) -> Self {
        let mut s = Self::zero(dim, order);
        if order >= 1 {
            s.terms[1] = Tensor::from_fn(dim, 1, |o, ks| crate::algebra::si(i64::from(o == ks[0])));
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn term(&self, n: usize) -> &Tensor {
        &self.terms[n]
    }

    pub fn set_term(&mut self, n: usize, t: Tensor) -> Result<()> {
        ensure_dim(self.dim, t.dim())?;
        if t.arity() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                found: t.arity(),
            });
        }
        self.terms[n] = t;
        Ok(())
    }

    pub fn add(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.same_shape(other)?;
        let terms = self.terms.iter().zip(&other.terms).map(|(x, y)| x.add(y)).collect::<Result<_>>()?;
        Ok(MultiSeries { dim: self.dim, terms })
    }

    /// `(XΨ)_n(b_1..b_n) = Σ_k χ_k(b_1..b_k) ψ_{n-k}(b_{k+1}..b_n)`.
    pub fn mul(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.same_shape(other)?;
        let d = self.dim;
        let terms = (0..=self.order())
            .into_par_iter()
            .map(|n| {
                Tensor::from_multilinear(d, n, |args| {
                    let ks = basis_indices(args);
                    let mut acc = AlgElem::zero(d);
                    for k in 0..=n {
                        let x = self.terms[k].apply_basis(&ks[..k]);
                        if x.is_zero() {
                            continue;
                        }
                        acc = &acc + &(&x * &other.terms[n - k].apply_basis(&ks[k..]));
                    }
                    Ok(acc)
                })
            })
            .collect::<Result<_>>()?;
        Ok(MultiSeries { dim: d, terms })
    }

    /// `X(v) = (χ_0, χ_1(v(1,1)), χ_2(v(2,1), v(2,2)), …)`; `v` is 1-based.
    pub fn evaluate(&self, v: impl Fn(usize, usize) -> AlgElem) -> Result<Vec<AlgElem>> {
        (0..=self.order())
            .map(|n| {
                let args: Vec<AlgElem> = (1..=n).map(|j| v(n, j)).collect();
                self.terms[n].apply(&args)
            })
            .collect()
    }

    fn same_shape(&self, other: &MultiSeries) -> Result<()> {
        ensure_dim(self.dim, other.dim)?;
        if self.order() != other.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                found: other.order(),
            });
        }
        Ok(())
    }
}

// Arguments built by `Tensor::from_multilinear` are basis vectors.
fn basis_indices(args: &[AlgElem]) -> Vec<usize> {
    args.iter()
        .map(|a| (0..a.dim()).find(|&k| !a.coord(k).is_zero()).expect("basis vector"))
        .collect()
}

/// `X ∘_f (Ψ^{(i)})`: replaces the `j`-th argument of `χ_p` by
/// `Ψ^{(f(p, j))}`. `f` is 1-based in `(p, j)` and returns an index into
/// `psis`. Every `Ψ^{(i)}` must have zero constant term.
pub fn multi_compose(x: &MultiSeries, f: impl Fn(usize, usize) -> usize + Sync, psis: &[MultiSeries]) -> Result<MultiSeries> {
    let d = x.dim;
    for (i, p) in psis.iter().enumerate() {
        x.same_shape(p)?;
        if !p.terms[0].is_zero() {
            return Err(Error::NonzeroConstantTerm(i));
        }
    }
    let order = x.order();
    for p in 1..=order {
        for j in 1..=p {
            let i = f(p, j);
            if i >= psis.len() {
                return Err(Error::OutOfRange {
                    what: "composition index",
                    value: i,
                    min: 0,
                    max: psis.len().saturating_sub(1),
                });
            }
        }
    }
    let mut terms = vec![x.terms[0].clone()];
    let rest: Vec<Tensor> = (1..=order)
        .into_par_iter()
        .map(|n| {
            Tensor::from_multilinear(d, n, |args| {
                let ks = basis_indices(args);
                let mut acc = AlgElem::zero(d);
                let mut parts = Vec::with_capacity(n);
                compositions(n, &mut parts, &mut |parts| {
                    let p = parts.len();
                    let mut start = 0;
                    let mut inner = Vec::with_capacity(p);
                    for (j, &k) in parts.iter().enumerate() {
                        let v = psis[f(p, j + 1)].terms[k].apply_basis(&ks[start..start + k]);
                        if v.is_zero() {
                            return;
                        }
                        inner.push(v);
                        start += k;
                    }
                    acc = &acc + &x.terms[p].apply_unchecked(&inner);
                });
                Ok(acc)
            })
        })
        .collect::<Result<_>>()?;
    terms.extend(rest);
    Ok(MultiSeries { dim: d, terms })
}

// Compositions of `n` into positive parts, in lexicographic order.
fn compositions(n: usize, parts: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if n == 0 {
        f(parts);
        return;
    }
    for k in 1..=n {
        parts.push(k);
        compositions(n - k, parts, f);
        parts.pop();
    }
}

/// `M^{(i)}`: constant term 1 and term `2n` equal to
/// `m_n^{(i)}(b_1..b_{2n}) = E(a b_1 a* b_2 ⋯ a* b_{2n})` (starting with `a*`
/// for `i = 2`), read off a moment family over `a, a*`.
pub fn m_series_from_moments(moments: &MapFamily, i: usize, order: usize) -> Result<MultiSeries> {
    if moments.kind() != FamilyKind::Moments {
        return Err(Error::KindMismatch {
            expected: FamilyKind::Moments.name(),
            found: moments.kind().name(),
        });
    }
    let d = moments.dim();
    let mut s = MultiSeries::one(d, order);
    for n in 1..=order / 2 {
        let psi = moments.tensor(&alternating_word(i - 1, n))?;
        s.terms[2 * n] = Tensor::from_fn(d, 2 * n, |o, ks| {
            // ψ(b_1..b_{2n-1}) b_{2n} on basis vectors.
            if ks[2 * n - 1] == o {
                psi.entry(o, &ks[..2 * n - 1]).clone()
            } else {
                Zero::zero()
            }
        });
    }
    Ok(s)
}

/// `M^{(i)}` for a circular model, via the pair recursion.
pub fn m_series_circular(model: &CircularModel, i: usize, order: usize) -> Result<MultiSeries> {
    let d = model.dim();
    let start = if i == 1 { Start::A } else { Start::AStar };
    let mut s = MultiSeries::one(d, order);
    for n in 1..=order / 2 {
        s.terms[2 * n] = Tensor::from_multilinear(d, 2 * n, |args| alternating_moment(model, start, args))?;
    }
    Ok(s)
}

/// `A^{(i)}`: term `2ℓ - 1` is `β_ℓ^{(i)}`, all others zero.
pub fn a_series(model: &RDiagModel, i: usize, order: usize) -> MultiSeries {
    let mut s = MultiSeries::zero(model.dim(), order);
    for ell in 1..=order.div_ceil(2) {
        if let Some(t) = model.beta(i, ell) {
            s.terms[2 * ell - 1] = t.clone();
        }
    }
    s
}

/// Right-hand sides `1 + (A^{(1)} ∘_f (IM^{(1)}, IM^{(2)})) IM^{(1)}` and
/// `1 + (A^{(2)} ∘_g (IM^{(1)}, IM^{(2)})) IM^{(2)}`, with `f(n,j) = 2` and
/// `g(n,j) = 1` for odd `j`.
///
/// The trailing factor is `IM^{(i)}`: the composite has only odd terms, so a
/// trailing `M^{(i)}` (even terms only) would produce odd terms alone.
pub fn m_recursion_rhs(model: &RDiagModel, m1: &MultiSeries, m2: &MultiSeries) -> Result<[MultiSeries; 2]> {
    let d = model.dim();
    let order = m1.order();
    let id = MultiSeries::identity(d, order);
    let im = [id.mul(m1)?, id.mul(m2)?];
    let one = MultiSeries::one(d, order);
    let f = |_: usize, j: usize| if j % 2 == 1 { 1 } else { 0 };
    let g = |_: usize, j: usize| if j % 2 == 1 { 0 } else { 1 };
    let r1 = one.add(&multi_compose(&a_series(model, 1, order), f, &im)?.mul(&im[0])?)?;
    let r2 = one.add(&multi_compose(&a_series(model, 2, order), g, &im)?.mul(&im[1])?)?;
    Ok([r1, r2])
}

/// Whether `M^{(i)}` equals its recursion right-hand side, for `i = 1, 2`.
pub fn check_m_recursion(model: &RDiagModel, m1: &MultiSeries, m2: &MultiSeries) -> Result<[bool; 2]> {
    let [r1, r2] = m_recursion_rhs(model, m1, m2)?;
    Ok([&r1 == m1, &r2 == m2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::basis_tuples;
    use crate::algebra::{sq, LinearMap};
    use crate::circular::{induced_cumulant_family, make_dt_discretized, make_nofreepolar};
    use crate::cumulants::moment_family;
    use crate::series::solve_fg;

    fn sample(d: usize, order: usize, seed: i64) -> MultiSeries {
        let terms = (0..=order)
            .map(|n| Tensor::from_fn(d, n, |o, ks| sq(((o as i64 + 3 * seed + ks.iter().sum::<usize>() as i64) % 5) - 2, 1 + n as i64)))
            .collect();
        MultiSeries::new(d, terms).unwrap()
    }

    #[test]
    fn identity_and_linear_composition() {
        let x = sample(2, 4, 1);
        let id = MultiSeries::identity(2, 4);
        assert_eq!(multi_compose(&x, |_, _| 0, std::slice::from_ref(&id)).unwrap(), x);

        let m = LinearMap::from_rationals(&[&[(1, 2), (1, 1)], &[(0, 1), (-3, 1)]]).unwrap();
        let mut lin = MultiSeries::zero(2, 4);
        lin.set_term(1, m.to_tensor()).unwrap();
        let mut psi = sample(2, 4, 2);
        psi.set_term(0, Tensor::zero(2, 0)).unwrap();
        let c = multi_compose(&lin, |_, _| 0, &[psi.clone()]).unwrap();
        for n in 1..=4 {
            for ks in basis_tuples(2, n) {
                assert_eq!(c.term(n).apply_basis(&ks), m.apply(&psi.term(n).apply_basis(&ks)));
            }
        }
        assert_eq!(multi_compose(&x, |_, _| 0, std::slice::from_ref(&x)).unwrap_err(), Error::NonzeroConstantTerm(0));
    }

    #[test]
    fn product_ring_laws() {
        let (a, b, c) = (sample(2, 4, 1), sample(2, 4, 2), sample(2, 4, 3));
        assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        assert_eq!(a.mul(&MultiSeries::one(2, 4)).unwrap(), a);
    }

    #[test]
    fn m_recursion_holds_for_circular_models() {
        for model in [make_nofreepolar(), make_dt_discretized(2).unwrap()] {
            let m1 = m_series_circular(&model, 1, 6).unwrap();
            let m2 = m_series_circular(&model, 2, 6).unwrap();
            let rd = RDiagModel::from_circular(&model, 3);
            assert_eq!(check_m_recursion(&rd, &m1, &m2).unwrap(), [true, true]);
            // Mismatched models break it.
            assert_eq!(check_m_recursion(&rd, &m2, &m1).unwrap(), [false, false]);
        }
    }

    #[test]
    fn moments_and_pair_recursion_agree() {
        let model = make_nofreepolar();
        let mom = moment_family(&induced_cumulant_family(&model, 6).unwrap(), 6).unwrap();
        for i in 1..=2 {
            assert_eq!(m_series_from_moments(&mom, i, 6).unwrap(), m_series_circular(&model, i, 6).unwrap());
        }
    }

    #[test]
    fn evaluation_reproduces_f() {
        let model = make_nofreepolar();
        let m1 = m_series_circular(&model, 1, 6).unwrap();
        let b1 = AlgElem::from_rationals(&[(1, 1), (2, 1)]);
        let b2 = AlgElem::from_rationals(&[(-1, 2), (1, 3)]);
        let vals = m1.evaluate(|_, j| if j % 2 == 1 { b1.clone() } else { b2.clone() }).unwrap();
        let (f, _) = solve_fg(&model, &b1, &b2, 3).unwrap();
        for n in 0..=3 {
            assert_eq!(&vals[2 * n], f.coeff(n));
            if n > 0 {
                assert!(vals[2 * n - 1].is_zero());
            }
        }
    }
}
