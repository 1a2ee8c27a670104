//! Exact polynomials over `Q` in one and two variables, resultants, and a
//! floating-point simultaneous root finder.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::rat_to_f64;
use crate::error::{Error, Result};

/// `Σ c_k x^k`, coefficients ascending, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UnivarRatPoly {
    coeffs: Vec<BigRational>,
}

impl UnivarRatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `c·x^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|a| -a).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(k.into()))
                .collect(),
        )
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or_else(|| Error::Degenerate("division by the zero polynomial".into()))?;
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() / &lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] -= &c * dc;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Ok((Self::new(q), Self::new(r)))
    }

    /// Exact quotient; fails if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::Degenerate("inexact polynomial division".into()))
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + rat_to_f64(c))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    /// All complex roots, polished in floating point.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let c: Vec<Complex64> = self.to_f64().into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        poly_roots(&c, None)
    }

    /// Scales to integer coefficients with gcd 1 and positive leading term.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let scale = primitive_scale(self.coeffs.iter());
        let p = self.scale(&scale);
        if p.leading().is_negative() {
            p.neg()
        } else {
            p
        }
    }

    pub fn display_with(&self, var: &str) -> String {
        let terms: Vec<(BigRational, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (c.clone(), power(var, k)))
            .collect();
        join_terms(&terms)
    }
}

impl fmt::Display for UnivarRatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x"))
    }
}

// Multiplier turning rationals into coprime integers.
fn primitive_scale<'a>(cs: impl Iterator<Item = &'a BigRational> + Clone) -> BigRational {
    use num_integer::Integer;
    let lcm = cs
        .clone()
        .filter(|c| !c.is_zero())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let gcd = cs
        .filter(|c| !c.is_zero())
        .map(|c| (c.numer() * (&lcm / c.denom())).abs())
        .fold(BigInt::zero(), |acc, n| acc.gcd(&n));
    BigRational::new(lcm, gcd)
}

fn power(var: &str, k: usize) -> String {
    match k {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{k}"),
    }
}

fn join_terms(terms: &[(BigRational, String)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (c, m)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if m.is_empty() {
            s.push_str(&a.to_string());
        } else if a.is_one() {
            s.push_str(m);
        } else {
            s.push_str(&format!("{a}*{m}"));
        }
    }
    s
}

/// Sparse `Σ c_{ij} x^i y^j` keyed by `(deg in x, deg in y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl BivarPoly {
    pub fn new(terms: impl IntoIterator<Item = ((u32, u32), BigRational)>) -> Self {
        let mut p = Self::default();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn from_i64(terms: &[((u32, u32), i64)]) -> Self {
        Self::new(terms.iter().map(|&(k, c)| (k, BigRational::from_integer(c.into()))))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn x() -> Self {
        Self::from_i64(&[((1, 0), 1)])
    }

    pub fn y() -> Self {
        Self::from_i64(&[((0, 1), 1)])
    }

    fn add_term(&mut self, k: (u32, u32), c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), BigRational> {
        &self.terms
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0 + k.1).max()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (k, c) in &other.terms {
            p.add_term(*k, c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                p.add_term((a.0 + b.0, a.1 + b.1), ca * cb);
            }
        }
        p
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::from_i64(&[((0, 0), 1)]), |acc, _| acc.mul(self))
    }

    /// Multiplies by `x^a y^b`.
    pub fn shift(&self, a: u32, b: u32) -> Self {
        Self::new(self.terms.iter().map(|(k, v)| ((k.0 + a, k.1 + b), v.clone())))
    }

    pub fn d_dx(&self) -> Self {
        Self::new(
            self.terms
                .iter()
                .filter(|(k, _)| k.0 > 0)
                .map(|(k, v)| ((k.0 - 1, k.1), v * BigRational::from_integer(k.0.into()))),
        )
    }

    /// Coefficients of `x^0, x^1, …` as polynomials in `y`.
    pub fn coeffs_in_x(&self) -> Vec<UnivarRatPoly> {
        let Some(dx) = self.degree_x() else { return Vec::new() };
        (0..=dx)
            .map(|i| {
                let dy = self.terms.keys().filter(|k| k.0 == i).map(|k| k.1).max().unwrap_or(0);
                UnivarRatPoly::new((0..=dy).map(|j| self.coeff(i, j)).collect())
            })
            .collect()
    }

    pub fn from_coeffs_in_x(cs: &[UnivarRatPoly]) -> Self {
        Self::new(
            cs.iter()
                .enumerate()
                .flat_map(|(i, p)| p.coeffs().iter().enumerate().map(move |(j, c)| ((i as u32, j as u32), c.clone()))),
        )
    }

    /// Swaps the roles of `x` and `y`.
    pub fn swap(&self) -> Self {
        Self::new(self.terms.iter().map(|(k, v)| ((k.1, k.0), v.clone())))
    }

    pub fn eval_c64(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, c)| x.powu(k.0) * y.powu(k.1) * rat_to_f64(c))
            .sum()
    }

    /// `x`-coefficients evaluated at `y`, ascending.
    pub fn coeffs_in_x_at(&self, y: Complex64) -> Vec<Complex64> {
        self.coeffs_in_x().iter().map(|p| p.eval_c64(y)).collect()
    }

    /// Resultant with respect to `x`, a polynomial in `y`.
    pub fn resultant_x(&self, other: &Self) -> Result<UnivarRatPoly> {
        let (p, q) = (self.coeffs_in_x(), other.coeffs_in_x());
        if p.is_empty() || q.is_empty() {
            return Ok(UnivarRatPoly::zero());
        }
        let (m, n) = (p.len() - 1, q.len() - 1);
        if m + n == 0 {
            return Ok(UnivarRatPoly::constant(BigRational::one()));
        }
        let size = m + n;
        let mut mat = vec![vec![UnivarRatPoly::zero(); size]; size];
        for r in 0..n {
            for (i, c) in p.iter().rev().enumerate() {
                mat[r][r + i] = c.clone();
            }
        }
        for r in 0..m {
            for (i, c) in q.iter().rev().enumerate() {
                mat[n + r][r + i] = c.clone();
            }
        }
        bareiss_det(mat)
    }

    /// `disc_x = (-1)^{m(m-1)/2} Res_x(P, ∂P/∂x) / lc_x(P)`.
    pub fn discriminant_x(&self) -> Result<UnivarRatPoly> {
        let cs = self.coeffs_in_x();
        let m = cs.len().checked_sub(1).filter(|&m| m >= 1).ok_or_else(|| Error::Degenerate("constant in x".into()))?;
        let res = self.resultant_x(&self.d_dx())?;
        let q = res.div_exact(&cs[m])?;
        Ok(if (m * (m - 1) / 2) % 2 == 1 { q.neg() } else { q })
    }

    /// `self / d` when `d` divides `self` exactly in `Q[x, y]`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dc = d.coeffs_in_x();
        let dm = dc.len().checked_sub(1)?;
        let lead = &dc[dm];
        let mut r = self.coeffs_in_x();
        if r.len() < dc.len() {
            return self.is_zero().then(Self::zero);
        }
        let mut q = vec![UnivarRatPoly::zero(); r.len() - dm];
        for k in (0..q.len()).rev() {
            let (c, rem) = r[k + dm].div_rem(lead).ok()?;
            if !rem.is_zero() {
                return None;
            }
            for (i, di) in dc.iter().enumerate() {
                r[k + i] = r[k + i].sub(&c.mul(di));
            }
            q[k] = c;
        }
        r.iter().all(UnivarRatPoly::is_zero).then(|| Self::from_coeffs_in_x(&q))
    }

    /// Integer coefficients with gcd 1, sign fixed by the largest key.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let p = self.scale(&primitive_scale(self.terms.values()));
        if p.terms.values().next_back().unwrap().is_negative() {
            p.scale(&-BigRational::one())
        } else {
            p
        }
    }

    pub fn display_with(&self, x: &str, y: &str) -> String {
        let terms: Vec<(BigRational, String)> = self
            .terms
            .iter()
            .rev()
            .map(|(k, c)| {
                let m = [power(x, k.0 as usize), power(y, k.1 as usize)]
                    .into_iter()
                    .filter(|s| !s.is_empty())
                    .collect::<Vec<_>>()
                    .join("*");
                (c.clone(), m)
            })
            .collect();
        join_terms(&terms)
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("x", "y"))
    }
}

/// Fraction-free determinant over `Q[y]`.
fn bareiss_det(mut m: Vec<Vec<UnivarRatPoly>>) -> Result<UnivarRatPoly> {
    let n = m.len();
    let mut sign = false;
    let mut prev = UnivarRatPoly::constant(BigRational::one());
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = !sign;
                }
                None => return Ok(UnivarRatPoly::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.div_exact(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if sign { d.neg() } else { d })
}

/// Roots of `Σ c_k x^k` (ascending, nonzero leading) by Aberth iteration
/// with a final Newton polish. `init` warm-starts the iteration.
pub fn poly_roots(coeffs: &[Complex64], init: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|z| *z == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    let n = c.len().checked_sub(1).ok_or_else(|| Error::Degenerate("zero polynomial".into()))?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|z| z / lead).collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in monic.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    };
    let mut z: Vec<Complex64> = match init {
        Some(s) if s.len() == n => s.to_vec(),
        _ => {
            // Cauchy bound radius with an irrational angular offset.
            let r = 1.0 + monic[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
            let r = r.clamp(1e-12, 1e12);
            (0..n)
                .map(|k| Complex64::from_polar(r * 0.5, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
                .collect()
        }
    };
    for _ in 0..200 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d == Complex64::new(0.0, 0.0) {
                        Complex64::new(1e300, 0.0).inv()
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 4e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() || step.norm() > 1e-3 * (1.0 + zi.norm()) {
                break;
            }
            *zi -= step;
        }
    }
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("root iteration diverged".into()));
    }
    Ok(z)
}
