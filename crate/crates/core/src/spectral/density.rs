//! Density of `μ_{a*a}` by Stieltjes inversion, its integrals, and the
//! discriminant facts (support edge and operator norm).

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;

use super::appendix::g_discriminant;
use super::poly::UnivarRatPoly;
use super::stieltjes::{real_roots, track_heights, TrackOptions};
use crate::error::{Error, Result};

pub const DEFAULT_EPS: f64 = 1e-7;
pub const DEFAULT_POINTS: usize = 2000;
pub const GRID_T_MAX: f64 = 4.8;
/// Below this `t` the two-term asymptote replaces the samples in integrals.
pub const SPLICE_DELTA: f64 = 1e-4;

/// `ρ(t) ≈ c₁ t^{−2/3} + c₂ t^{−1/3}` near 0, from the `G_2` expansion.
pub const ASYMPTOTE_C1: f64 = 0.137_832_223_855_448_4; // √3/(4π)
pub const ASYMPTOTE_C2: f64 = 0.183_776_298_473_931_2; // √3/(3π)

#[derive(Debug, Clone, PartialEq)]
pub struct DensitySamples {
    pub t: Vec<f64>,
    pub rho: Vec<f64>,
    pub eps: f64,
    pub richardson: bool,
    pub t_min: f64,
    pub t_max: f64,
}

/// `t_k = 4.8·sin³(πk/(2n))` for `k = 1..=n`: dense near both ends.
pub fn default_grid(points: usize) -> Vec<f64> {
    (1..=points)
        .map(|k| GRID_T_MAX * (PI * k as f64 / (2.0 * points as f64)).sin().powi(3))
        .collect()
}

/// `−Im G(t + iε)/π`. With Richardson extrapolation the samples at `4ε`,
/// `2ε`, `ε` of one vertical path are combined as `(8ρ_ε − 6ρ_{2ε} + ρ_{4ε})/3`,
/// which cancels the `ε` and `ε²` terms; near `t = 0` the error is a series
/// in `ε/t`, so the quadratic term matters.
pub fn density_at(t: f64, eps: f64, richardson: bool) -> Result<f64> {
    let opts = TrackOptions::default();
    let v = if richardson {
        let g = track_heights(t, &[4.0 * eps, 2.0 * eps, eps], &opts)?;
        -(8.0 * g[2].im - 6.0 * g[1].im + g[0].im) / (3.0 * PI)
    } else {
        -track_heights(t, &[eps], &opts)?[0].im / PI
    };
    Ok(v.max(0.0))
}

pub fn density(grid: &[f64], eps: f64, richardson: bool) -> Result<DensitySamples> {
    if !(eps > 0.0 && eps <= 1e-3) {
        return Err(Error::Degenerate(format!("ε = {eps} outside (0, 1e-3]")));
    }
    if grid.is_empty() || grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Degenerate("grid must be positive and strictly increasing".into()));
    }
    let rho = grid
        .par_iter()
        .map(|&t| density_at(t, eps, richardson))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensitySamples {
        t: grid.to_vec(),
        rho,
        eps,
        richardson,
        t_min: grid[0],
        t_max: *grid.last().unwrap(),
    })
}

pub fn asymptote(t: f64) -> f64 {
    ASYMPTOTE_C1 * t.powf(-2.0 / 3.0) + ASYMPTOTE_C2 * t.powf(-1.0 / 3.0)
}

/// `∫ t^n ρ(t) dt` for `n = 0..=max_n`. The asymptote is integrated exactly
/// on `(0, δ]`; beyond it the trapezoid rule runs in `x = t^{1/3}`, where the
/// integrand `3x² t^n ρ` stays bounded.
pub fn moments(s: &DensitySamples, max_n: u32) -> Vec<f64> {
    let d = SPLICE_DELTA;
    let mut nodes: Vec<(f64, f64)> = vec![(d, asymptote(d))];
    nodes.extend(s.t.iter().zip(&s.rho).filter(|(t, _)| **t > d).map(|(t, r)| (*t, *r)));
    (0..=max_n)
        .map(|n| {
            let nf = f64::from(n);
            let head = ASYMPTOTE_C1 * d.powf(nf + 1.0 / 3.0) / (nf + 1.0 / 3.0)
                + ASYMPTOTE_C2 * d.powf(nf + 2.0 / 3.0) / (nf + 2.0 / 3.0);
            let f = |(t, r): (f64, f64)| 3.0 * t.powf(2.0 / 3.0) * t.powi(n as i32) * r;
            let body: f64 = nodes
                .windows(2)
                .map(|w| 0.5 * (w[1].0.cbrt() - w[0].0.cbrt()) * (f(w[0]) + f(w[1])))
                .sum();
            head + body
        })
        .collect()
}

/// Largest sample at `t > t0`.
pub fn max_beyond(s: &DensitySamples, t0: f64) -> f64 {
    s.t.iter().zip(&s.rho).filter(|(t, _)| **t > t0).map(|(_, r)| *r).fold(0.0, f64::max)
}

/// Samples of `μ_{|a|}`: `s = √t`, density `2s·ρ(s²)`.
pub fn abs_density(s: &DensitySamples) -> Vec<(f64, f64)> {
    s.t.iter().zip(&s.rho).map(|(t, r)| (t.sqrt(), 2.0 * t.sqrt() * r)).collect()
}

/// Quarter-circular density `(1/π)√(4 − s²)` on `[0, 2]`.
pub fn quarter_circle(s: f64) -> f64 {
    if (0.0..=2.0).contains(&s) {
        (4.0 - s * s).sqrt() / PI
    } else {
        0.0
    }
}

/// `−64w⁴ (16w⁴ − 160w³ + 540w² − 680w + 27)`.
pub fn reference_discriminant() -> UnivarRatPoly {
    UnivarRatPoly::from_i64(&[27, -680, 540, -160, 16]).mul(&UnivarRatPoly::from_i64(&[0, 0, 0, 0, -64]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminantReport {
    /// Exact `disc_G` of the curve.
    pub discriminant: UnivarRatPoly,
    /// `disc_G / reference`, if the two are proportional.
    pub ratio: Option<BigRational>,
    /// Discriminant with the `w`-power stripped, made primitive.
    pub quartic: UnivarRatPoly,
    pub real_roots: Vec<f64>,
    pub complex_roots: Vec<Complex64>,
}

pub fn discriminant_roots() -> Result<DiscriminantReport> {
    let discriminant = g_discriminant()?;
    let reference = reference_discriminant();
    let ratio = Some(discriminant.leading() / reference.leading())
        .filter(|r| reference.scale(r) == discriminant);
    let low = discriminant.coeffs().iter().take_while(|c| num_traits::Zero::is_zero(*c)).count();
    let quartic = UnivarRatPoly::new(discriminant.coeffs()[low..].to_vec()).primitive();
    let complex_roots = quartic.roots()?;
    let real_roots = real_roots(&quartic)?;
    Ok(DiscriminantReport {
        discriminant,
        ratio,
        quartic,
        real_roots,
        complex_roots,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub norm: f64,
    pub norm_squared: f64,
    /// `|16x⁸ − 160x⁶ + 540x⁴ − 680x² + 27|` at `x = ‖a‖`.
    pub residual: f64,
}

/// `‖a‖ = √(largest real discriminant root)`.
pub fn operator_norm() -> Result<NormReport> {
    let r = discriminant_roots()?;
    let norm_squared = *r.real_roots.last().ok_or_else(|| Error::Degenerate("no real root".into()))?;
    let octic = UnivarRatPoly::from_i64(&[27, 0, -680, 0, 540, 0, -160, 0, 16]);
    let mut x = norm_squared.sqrt();
    let d = octic.derivative();
    for _ in 0..3 {
        let f = octic.eval_c64(Complex64::new(x, 0.0)).re;
        let fp = d.eval_c64(Complex64::new(x, 0.0)).re;
        x -= f / fp;
    }
    Ok(NormReport {
        norm: x,
        norm_squared: x * x,
        residual: octic.eval_c64(Complex64::new(x, 0.0)).re.abs(),
    })
}
