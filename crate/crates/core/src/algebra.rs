//! The commutative *-algebra `B = C^d`.
//!
//! Elements are `d`-tuples of exact complex rationals and every operation is
//! coordinatewise. Linear maps act by `(Mb)_i = Σ_j M_ij b_j`, traces are
//! weighted coordinate sums and *-automorphisms are coordinate permutations.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{ensure_dim, Error, Result};
use crate::tensor::Tensor;

/// Exact complex rational number.
pub type Scalar = Complex<BigRational>;

/// Rational `num/den` as a [`BigRational`]. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Real scalar `num/den`.
pub fn sq(num: i64, den: i64) -> Scalar {
    Complex::new(rat(num, den), BigRational::zero())
}

/// Real scalar from an integer.
pub fn si(n: i64) -> Scalar {
    sq(n, 1)
}

/// The imaginary unit.
pub fn s_i() -> Scalar {
    Complex::new(BigRational::zero(), BigRational::one())
}

pub fn real(q: BigRational) -> Scalar {
    Complex::new(q, BigRational::zero())
}

pub fn is_real(s: &Scalar) -> bool {
    s.im.is_zero()
}

/// Lossy conversion used only at the exact/numeric boundary.
pub fn scalar_to_f64(s: &Scalar) -> num_complex::Complex64 {
    num_complex::Complex64::new(rat_to_f64(&s.re), rat_to_f64(&s.im))
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Pretty form `a`, `a/b`, `(a + bi)` used by reports.
pub fn fmt_scalar(s: &Scalar) -> String {
    match (s.re.is_zero(), s.im.is_zero()) {
        (_, true) => s.re.to_string(),
        (true, false) => format!("{}i", s.im),
        (false, false) => {
            let sign = if s.im.is_negative() { "-" } else { "+" };
            format!("({} {} {}i)", s.re, sign, s.im.abs())
        }
    }
}

/// The algebra `C^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Algebra {
    dim: usize,
}

impl Algebra {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::OutOfRange {
                what: "algebra dimension",
                value: 0,
                min: 1,
                max: usize::MAX,
            });
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn unit(&self) -> AlgElem {
        AlgElem::unit(self.dim)
    }

    pub fn zero(&self) -> AlgElem {
        AlgElem::zero(self.dim)
    }

    pub fn basis(&self, k: usize) -> AlgElem {
        AlgElem::basis(self.dim, k)
    }
}

/// An element of `C^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgElem {
    coords: Vec<Scalar>,
}

impl AlgElem {
    pub fn new(coords: Vec<Scalar>) -> Self {
        assert!(!coords.is_empty(), "AlgElem needs at least one coordinate");
        Self { coords }
    }

    pub fn from_rationals(values: &[(i64, i64)]) -> Self {
        Self::new(values.iter().map(|&(n, d)| sq(n, d)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![Scalar::zero(); dim])
    }

    pub fn unit(dim: usize) -> Self {
        Self::new(vec![Scalar::one(); dim])
    }

    pub fn scalar_unit(dim: usize, c: Scalar) -> Self {
        Self::new(vec![c; dim])
    }

    /// Minimal projection `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut coords = vec![Scalar::zero(); dim];
        coords[k] = Scalar::one();
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Scalar {
        &self.coords[i]
    }

    pub fn into_coords(self) -> Vec<Scalar> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// `Some(c)` when the element equals `c·1`.
    pub fn as_scalar_multiple_of_unit(&self) -> Option<Scalar> {
        let first = &self.coords[0];
        self.coords.iter().all(|c| c == first).then(|| first.clone())
    }

    pub fn star(&self) -> Self {
        Self::new(self.coords.iter().map(Complex::conj).collect())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::new(self.coords.iter().map(|x| x * c).collect())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        ensure_dim(self.dim(), other.dim())?;
        Ok(self * other)
    }

    pub fn to_f64(&self) -> Vec<num_complex::Complex64> {
        self.coords.iter().map(scalar_to_f64).collect()
    }
}

impl fmt::Display for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(fmt_scalar).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Add for &AlgElem {
    type Output = AlgElem;
    fn add(self, rhs: &AlgElem) -> AlgElem {
        debug_assert_eq!(self.dim(), rhs.dim());
        AlgElem::new(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Sub for &AlgElem {
    type Output = AlgElem;
    fn sub(self, rhs: &AlgElem) -> AlgElem {
        debug_assert_eq!(self.dim(), rhs.dim());
        AlgElem::new(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }
}

impl Mul for &AlgElem {
    type Output = AlgElem;
    fn mul(self, rhs: &AlgElem) -> AlgElem {
        debug_assert_eq!(self.dim(), rhs.dim());
        AlgElem::new(
            self.coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a * b)
                .collect(),
        )
    }
}

impl Neg for &AlgElem {
    type Output = AlgElem;
    fn neg(self) -> AlgElem {
        AlgElem::new(self.coords.iter().map(|a| -a.clone()).collect())
    }
}

/// Coordinatewise operations exposed through one entry point.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgOp {
    Add,
    Mul,
    Star,
    Scale(Scalar),
}

/// Applies `op` to the operands. `Add`/`Mul` fold over all operands;
/// `Star`/`Scale` take exactly one.
pub fn alg_arith(op: &AlgOp, operands: &[&AlgElem]) -> Result<AlgElem> {
    let first = operands.first().ok_or(Error::ArityMismatch {
        expected: 1,
        found: 0,
    })?;
    for x in operands {
        ensure_dim(first.dim(), x.dim())?;
    }
    match op {
        AlgOp::Add => Ok(operands[1..].iter().fold((*first).clone(), |acc, x| &acc + *x)),
        AlgOp::Mul => Ok(operands[1..].iter().fold((*first).clone(), |acc, x| &acc * *x)),
        AlgOp::Star | AlgOp::Scale(_) if operands.len() != 1 => Err(Error::ArityMismatch {
            expected: 1,
            found: operands.len(),
        }),
        AlgOp::Star => Ok(first.star()),
        AlgOp::Scale(c) => Ok(first.scale(c)),
    }
}

/// A linear map `B -> B` given by its matrix in the standard basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearMap {
    rows: Vec<Vec<Scalar>>,
}

impl LinearMap {
    pub fn new(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::InvalidModel("empty matrix".into()));
        }
        for r in &rows {
            ensure_dim(d, r.len())?;
        }
        Ok(Self { rows })
    }

    /// Convenience constructor from real rationals `(num, den)`.
    pub fn from_rationals(rows: &[&[(i64, i64)]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| sq(n, d)).collect())
                .collect(),
        )
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { Scalar::one() } else { Scalar::zero() })
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| Scalar::zero())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        Self {
            rows: (0..dim)
                .map(|i| (0..dim).map(|j| f(i, j)).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn apply(&self, b: &AlgElem) -> AlgElem {
        debug_assert_eq!(self.dim(), b.dim());
        AlgElem::new(
            self.rows
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(b.coords())
                        .filter(|(m, x)| !m.is_zero() && !x.is_zero())
                        .fold(Scalar::zero(), |acc, (m, x)| acc + m * x)
                })
                .collect(),
        )
    }

    pub fn checked_apply(&self, b: &AlgElem) -> Result<AlgElem> {
        ensure_dim(self.dim(), b.dim())?;
        Ok(self.apply(b))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        let d = self.dim();
        LinearMap::from_fn(d, |i, j| {
            (0..d).fold(Scalar::zero(), |acc, k| acc + &self.rows[i][k] * &other.rows[k][j])
        })
    }

    pub fn add(&self, other: &LinearMap) -> LinearMap {
        LinearMap::from_fn(self.dim(), |i, j| &self.rows[i][j] + &other.rows[i][j])
    }

    pub fn sub(&self, other: &LinearMap) -> LinearMap {
        LinearMap::from_fn(self.dim(), |i, j| &self.rows[i][j] - &other.rows[i][j])
    }

    pub fn scale(&self, c: &Scalar) -> LinearMap {
        LinearMap::from_fn(self.dim(), |i, j| &self.rows[i][j] * c)
    }

    /// `θ ∘ self ∘ θ` for a coordinate permutation.
    pub fn conjugate_by(&self, theta: &Automorphism) -> LinearMap {
        // (θ M θ)(b)_i = Σ_k M_{p(i), p^{-1}(k)} b_k.
        let p = theta.perm();
        let q = theta.inverse();
        LinearMap::from_fn(self.dim(), |i, k| self.rows[p[i]][q.perm()[k]].clone())
    }

    /// Arity-one tensor with the same action.
    pub fn to_tensor(&self) -> Tensor {
        let d = self.dim();
        Tensor::from_fn(d, 1, |out, ks| self.rows[out][ks[0]].clone())
    }

    pub fn from_tensor(t: &Tensor) -> Result<Self> {
        if t.arity() != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                found: t.arity(),
            });
        }
        Ok(LinearMap::from_fn(t.dim(), |i, j| t.entry(i, &[j]).clone()))
    }
}

/// Positivity of a map on commutative `C^d`. Positivity and complete
/// positivity coincide there and both reduce to entrywise nonnegativity of
/// the matrix in the standard basis.
pub fn check_positive_map(m: &LinearMap) -> bool {
    m.rows
        .iter()
        .flatten()
        .all(|x| x.im.is_zero() && !x.re.is_negative())
}

/// `τ(b) = Σ_i w_i b_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TraceFunctional {
    weights: Vec<BigRational>,
}

impl TraceFunctional {
    pub fn new(weights: Vec<BigRational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidModel("trace needs at least one weight".into()));
        }
        Ok(Self { weights })
    }

    pub fn from_rationals(weights: &[(i64, i64)]) -> Result<Self> {
        Self::new(weights.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    /// Normalized uniform trace `(1/d, …, 1/d)`.
    pub fn uniform(dim: usize) -> Self {
        Self {
            weights: vec![rat(1, dim as i64); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    /// Nonnegative weights summing to one.
    pub fn is_state(&self) -> bool {
        self.weights.iter().all(|w| !w.is_negative())
            && self.weights.iter().fold(BigRational::zero(), |a, w| a + w) == BigRational::one()
    }

    pub fn apply(&self, b: &AlgElem) -> Scalar {
        debug_assert_eq!(self.dim(), b.dim());
        self.weights
            .iter()
            .zip(b.coords())
            .fold(Scalar::zero(), |acc, (w, x)| acc + x * w)
    }
}

pub fn apply_trace(tau: &TraceFunctional, b: &AlgElem) -> Result<Scalar> {
    ensure_dim(tau.dim(), b.dim())?;
    Ok(tau.apply(b))
}

/// A *-automorphism of `C^d`, i.e. a coordinate permutation:
/// `θ(b)_i = b_{perm(i)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Automorphism {
    perm: Vec<usize>,
}

impl Automorphism {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let d = perm.len();
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || seen[p] {
                return Err(Error::InvalidModel(format!(
                    "{perm:?} is not a permutation of 0..{d}"
                )));
            }
            seen[p] = true;
        }
        if d == 0 {
            return Err(Error::InvalidModel("empty permutation".into()));
        }
        Ok(Self { perm })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            perm: (0..dim).collect(),
        }
    }

    /// `i ↦ d-1-i`, the discrete analogue of `t ↦ 1-t`.
    pub fn flip(dim: usize) -> Self {
        Self {
            perm: (0..dim).rev().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn apply(&self, b: &AlgElem) -> AlgElem {
        AlgElem::new(self.perm.iter().map(|&p| b.coord(p).clone()).collect())
    }

    /// Index `j` with `θ(e_k) = e_j`.
    pub fn image_of_basis(&self, k: usize) -> usize {
        self.perm.iter().position(|&p| p == k).expect("bijection")
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        Self { perm: inv }
    }
}
