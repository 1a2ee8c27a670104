//! Truncated `B`-valued power series in one formal variable `z` and the
//! fixed-point systems for `F(b_1,b_2) = Σ E((a b_1 a* b_2)^n) z^n` and
//! `G(b_1,b_2) = Σ E((a* b_1 a b_2)^n) z^n`.
//!
//! One power of `z` is attached to every `a … a*` pair, so the coefficient of
//! `z^n` is a moment of order `2n`.

use std::fmt;

use crate::algebra::{AlgElem, Scalar, TraceFunctional};
use crate::circular::CircularModel;
use crate::error::{ensure_dim, Error, Result};
use crate::rdiag::RDiagModel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSeries {
    dim: usize,
    coeffs: Vec<AlgElem>,
}

impl BSeries {
    /// Coefficients `c_0..c_N`; at least one is required.
    pub fn new(coeffs: Vec<AlgElem>) -> Result<Self> {
        let dim = coeffs.first().ok_or_else(|| Error::Degenerate("empty series".into()))?.dim();
        for c in &coeffs {
            ensure_dim(dim, c.dim())?;
        }
        Ok(Self { dim, coeffs })
    }

    pub fn zero(dim: usize, n: usize) -> Self {
        Self {
            dim,
            coeffs: vec![AlgElem::zero(dim); n + 1],
        }
    }

    pub fn one(dim: usize, n: usize) -> Self {
        Self::embed(&AlgElem::unit(dim), n)
    }

    /// The constant series `b`.
    pub fn embed(b: &AlgElem, n: usize) -> Self {
        let mut s = Self::zero(b.dim(), n);
        s.coeffs[0] = b.clone();
        s
    }

    /// `b·z^degree`.
    pub fn monomial(b: &AlgElem, degree: usize, n: usize) -> Self {
        let mut s = Self::zero(b.dim(), n);
        if degree <= n {
            s.coeffs[degree] = b.clone();
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[AlgElem] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &AlgElem {
        &self.coeffs[n]
    }

    pub fn add(&self, other: &BSeries) -> Result<BSeries> {
        self.same_shape(other)?;
        Ok(BSeries {
            dim: self.dim,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + y).collect(),
        })
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &BSeries) -> Result<BSeries> {
        self.same_shape(other)?;
        let n = self.order();
        let coeffs = (0..=n)
            .map(|k| {
                (0..=k).fold(AlgElem::zero(self.dim), |acc, i| &acc + &(&self.coeffs[i] * &other.coeffs[k - i]))
            })
            .collect();
        Ok(BSeries { dim: self.dim, coeffs })
    }

    pub fn scale(&self, c: &Scalar) -> BSeries {
        BSeries {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
        }
    }

    pub fn trace(&self, tau: &TraceFunctional) -> Result<Vec<Scalar>> {
        ensure_dim(self.dim, tau.dim())?;
        Ok(self.coeffs.iter().map(|c| tau.apply(c)).collect())
    }

    fn same_shape(&self, other: &BSeries) -> Result<()> {
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

impl fmt::Display for BSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·z")?,
                _ => write!(f, "{c}·z^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
}

/// Left fold of `op` over the operands.
pub fn series_arith(op: SeriesOp, operands: &[&BSeries]) -> Result<BSeries> {
    let (first, rest) = operands.split_first().ok_or_else(|| Error::Degenerate("no operands".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, s| match op {
        SeriesOp::Add => acc.add(s),
        SeriesOp::Mul => acc.mul(s),
    })
}

/// `F(b_1,b_2)`, `G(b_1,b_2)` and their argument-swapped companions
/// `F(b_2,b_1)`, `G(b_2,b_1)`, grown one degree at a time.
struct FourSeries {
    f: Vec<AlgElem>,
    g: Vec<AlgElem>,
    fs: Vec<AlgElem>,
    gs: Vec<AlgElem>,
}

impl FourSeries {
    fn new(d: usize) -> Self {
        let one = || vec![AlgElem::unit(d)];
        Self {
            f: one(),
            g: one(),
            fs: one(),
            gs: one(),
        }
    }

    fn finish(self) -> Result<(BSeries, BSeries)> {
        Ok((BSeries::new(self.f)?, BSeries::new(self.g)?))
    }
}

/// Solves `F = 1 + η1(b_1 G(b_2,b_1)) b_2 F` and
/// `G = 1 + η2(b_1 F(b_2,b_1)) b_2 G` through `z^N`.
pub fn solve_fg(model: &CircularModel, b1: &AlgElem, b2: &AlgElem, n: usize) -> Result<(BSeries, BSeries)> {
    let d = model.dim();
    ensure_dim(d, b1.dim())?;
    ensure_dim(d, b2.dim())?;
    let (eta1, eta2) = (model.eta1(), model.eta2());
    let mut s = FourSeries::new(d);
    for deg in 1..=n {
        let mut next = [AlgElem::zero(d), AlgElem::zero(d), AlgElem::zero(d), AlgElem::zero(d)];
        for i in 0..deg {
            let j = deg - 1 - i;
            next[0] = &next[0] + &(&(&eta1.apply(&(b1 * &s.gs[i])) * b2) * &s.f[j]);
            next[1] = &next[1] + &(&(&eta2.apply(&(b1 * &s.fs[i])) * b2) * &s.g[j]);
            next[2] = &next[2] + &(&(&eta1.apply(&(b2 * &s.g[i])) * b1) * &s.fs[j]);
            next[3] = &next[3] + &(&(&eta2.apply(&(b2 * &s.f[i])) * b1) * &s.gs[j]);
        }
        let [f, g, fs, gs] = next;
        s.f.push(f);
        s.g.push(g);
        s.fs.push(fs);
        s.gs.push(gs);
    }
    s.finish()
}

/// General R-diagonal version:
/// `F = 1 + Σ_ℓ β_ℓ^{(1)}(b_1 G~, b_2 F, …, b_1 G~) b_2 F` where `G~ = G(b_2,b_1)`,
/// and symmetrically for `G`. `β_ℓ` carries degree `ℓ`; cumulants beyond
/// the model's `K` are taken to vanish.
pub fn solve_alternating_series(model: &RDiagModel, b1: &AlgElem, b2: &AlgElem, n: usize) -> Result<(BSeries, BSeries)> {
    let d = model.dim();
    ensure_dim(d, b1.dim())?;
    ensure_dim(d, b2.dim())?;
    let mut s = FourSeries::new(d);
    for deg in 1..=n {
        let f = alternating_term(model, 1, deg, b1, b2, &s.gs, &s.f)?;
        let g = alternating_term(model, 2, deg, b1, b2, &s.fs, &s.g)?;
        let fs = alternating_term(model, 1, deg, b2, b1, &s.g, &s.fs)?;
        let gs = alternating_term(model, 2, deg, b2, b1, &s.f, &s.gs)?;
        s.f.push(f);
        s.g.push(g);
        s.fs.push(fs);
        s.gs.push(gs);
    }
    s.finish()
}

// Degree-`deg` part of Σ_ℓ β_ℓ^{(i)}(x·odd, y·even, …, x·odd) y·even.
fn alternating_term(
    model: &RDiagModel,
    i: usize,
    deg: usize,
    x: &AlgElem,
    y: &AlgElem,
    odd: &[AlgElem],
    even: &[AlgElem],
) -> Result<AlgElem> {
    let d = model.dim();
    let mut acc = AlgElem::zero(d);
    for ell in 1..=deg.min(model.max_k()) {
        let Some(beta) = model.beta(i, ell) else { continue };
        let odd_args: Vec<AlgElem> = odd.iter().map(|c| x * c).collect();
        let even_args: Vec<AlgElem> = even.iter().map(|c| y * c).collect();
        let mut parts = vec![0usize; 2 * ell];
        for_each_composition(deg - ell, &mut parts, 0, &mut |ks| {
            let args: Vec<AlgElem> = ks[..2 * ell - 1]
                .iter()
                .enumerate()
                .map(|(p, &k)| if p % 2 == 0 { odd_args[k].clone() } else { even_args[k].clone() })
                .collect();
            if args.iter().any(AlgElem::is_zero) {
                return Ok(());
            }
            let v = beta.apply(&args)?;
            acc = &acc + &(&v * &even_args[ks[2 * ell - 1]]);
            Ok(())
        })?;
    }
    Ok(acc)
}

/// Calls `f` on every weak composition of `total` into `parts.len()` parts.
fn for_each_composition(
    total: usize,
    parts: &mut [usize],
    pos: usize,
    f: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if pos + 1 == parts.len() {
        parts[pos] = total;
        return f(parts);
    }
    for k in 0..=total {
        parts[pos] = k;
        for_each_composition(total - k, parts, pos + 1, f)?;
    }
    Ok(())
}
