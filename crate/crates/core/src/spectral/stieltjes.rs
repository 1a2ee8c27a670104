//! Floating-point roots of the `G`-curve and continuation of the Stieltjes
//! branch `G(w) = 1/w + O(w^{-2})` from large imaginary `w`.

use num_complex::Complex64;

use super::poly::{poly_roots, UnivarRatPoly};
use crate::error::{Error, Result};

/// `G`-coefficients (ascending) of the curve at `w`.
fn curve_coeffs(w: Complex64) -> [Complex64; 5] {
    let w2 = w * w;
    [
        4.0 * w,
        -4.0 * w2 - 12.0 * w + 1.0,
        8.0 * w * (2.0 * w + 1.0),
        -20.0 * w2,
        8.0 * w2,
    ]
}

/// `|P(G, w)|` and the matching scale `Σ |c_k| |G|^k`.
pub fn curve_residual(g: Complex64, w: Complex64) -> (f64, f64) {
    let c = curve_coeffs(w);
    let p: Complex64 = c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * g + a);
    let scale: f64 = c.iter().enumerate().map(|(k, a)| a.norm() * g.norm().powi(k as i32)).sum();
    (p.norm(), scale)
}

/// The four roots in `G` at fixed `w ≠ 0`.
pub fn quartic_roots(w: Complex64) -> Result<[Complex64; 4]> {
    quartic_roots_seeded(w, None)
}

fn quartic_roots_seeded(w: Complex64, seed: Option<&[Complex64]>) -> Result<[Complex64; 4]> {
    if w.norm() == 0.0 || !w.is_finite() {
        return Err(Error::Degenerate("leading coefficient 8w² vanishes".into()));
    }
    let r = poly_roots(&curve_coeffs(w), seed)?;
    Ok([r[0], r[1], r[2], r[3]])
}

/// Continuation controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOptions {
    /// Imaginary part of the starting point.
    pub seed_height: f64,
    /// Relative distance below which two roots count as colliding.
    pub collision_tol: f64,
    /// Smallest allowed step in `log Im w`.
    pub min_step: f64,
    /// Initial and maximal step in `log Im w`.
    pub max_step: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            seed_height: 1e6,
            collision_tol: 1e-8,
            min_step: 1e-10,
            max_step: 0.7,
        }
    }
}

/// Tracked value and path diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tracked {
    pub g: Complex64,
    pub steps: usize,
    /// Largest relative change of `G` between accepted steps.
    pub max_jump: f64,
}

/// Largest real root of the discriminant quartic, i.e. `‖a‖²`.
pub const SUPPORT_MAX: f64 = 4.793_56;

/// Stieltjes transform with default options.
pub fn stieltjes_g(w: Complex64) -> Result<Complex64> {
    Ok(track(w, &TrackOptions::default())?.g)
}

/// Follows the root nearest `1/w` at `Re w + i·seed_height` down the
/// vertical line to `w`, with adaptive steps in `log Im w`. Real `w` must
/// lie off `[0, ‖a‖²]`.
pub fn track(w: Complex64, opts: &TrackOptions) -> Result<Tracked> {
    if w.im < 0.0 || !w.is_finite() {
        return Err(branch_error(w, "outside the closed upper half-plane"));
    }
    if w.im == 0.0 && (0.0..=SUPPORT_MAX + 1e-5).contains(&w.re) {
        return Err(branch_error(w, "real point on the spectrum"));
    }
    let floor = if w.im > 0.0 { w.im } else { (1e-9 * w.re.abs()).max(1e-300) };
    let mut path = Path::start(w.re, opts.seed_height.max(2.0 * w.im), opts)?;
    path.descend(floor)?;
    if w.im == 0.0 {
        path.step_to(0.0)?;
    }
    Ok(Tracked {
        g: path.g,
        steps: path.steps,
        max_jump: path.max_jump,
    })
}

/// `G(x + i·h)` for each of the strictly decreasing positive `heights`,
/// along one vertical path.
pub fn track_heights(x: f64, heights: &[f64], opts: &TrackOptions) -> Result<Vec<Complex64>> {
    if heights.is_empty() || heights.iter().any(|h| h.is_nan() || *h <= 0.0) || heights.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::Degenerate("heights must be positive and strictly decreasing".into()));
    }
    let mut path = Path::start(x, opts.seed_height.max(2.0 * heights[0]), opts)?;
    heights
        .iter()
        .map(|&h| {
            path.descend(h)?;
            Ok(path.g)
        })
        .collect()
}

fn branch_error(w: Complex64, reason: &str) -> Error {
    Error::BranchTracking {
        re: w.re,
        im: w.im,
        reason: reason.into(),
    }
}

struct Path<'a> {
    x: f64,
    opts: &'a TrackOptions,
    roots: [Complex64; 4],
    g: Complex64,
    /// Current `log Im w`.
    s: f64,
    step: f64,
    steps: usize,
    max_jump: f64,
}

impl<'a> Path<'a> {
    fn start(x: f64, top: f64, opts: &'a TrackOptions) -> Result<Self> {
        let w = Complex64::new(x, top);
        let roots = quartic_roots(w)?;
        let g = roots[nearest(&roots, w.inv()).0];
        Ok(Self {
            x,
            opts,
            roots,
            g,
            s: top.ln(),
            step: opts.max_step,
            steps: 0,
            max_jump: 0.0,
        })
    }

    /// Moves to height `im`; the chosen root must stay well separated and be
    /// unambiguously the continuation of the current one.
    fn try_step(&mut self, im: f64) -> Result<bool> {
        let new = quartic_roots_seeded(Complex64::new(self.x, im), Some(&self.roots[..]))?;
        let (i, d1, d2) = nearest(&new, self.g);
        let sep = new
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, r)| (r - new[i]).norm())
            .fold(f64::INFINITY, f64::min);
        if d1 > 0.25 * d2 || sep < self.opts.collision_tol * (1.0 + new[i].norm()) {
            return Ok(false);
        }
        self.max_jump = self.max_jump.max(d1 / (self.g.norm() + 1e-300));
        self.roots = new;
        self.g = new[i];
        self.steps += 1;
        Ok(true)
    }

    fn descend(&mut self, floor: f64) -> Result<()> {
        let s_end = floor.ln();
        while self.s > s_end {
            let next = (self.s - self.step).max(s_end);
            if self.try_step(next.exp())? {
                self.s = next;
                self.step = (self.step * 1.5).min(self.opts.max_step);
            } else {
                self.step *= 0.5;
                if self.step < self.opts.min_step {
                    return Err(branch_error(Complex64::new(self.x, next.exp()), "branch collision"));
                }
            }
        }
        Ok(())
    }

    fn step_to(&mut self, im: f64) -> Result<()> {
        if self.try_step(im)? {
            Ok(())
        } else {
            Err(branch_error(Complex64::new(self.x, im), "ambiguous final step onto the real axis"))
        }
    }
}

/// Index of the root nearest `p`, its distance, and the runner-up distance.
fn nearest(roots: &[Complex64; 4], p: Complex64) -> (usize, f64, f64) {
    let mut d: Vec<(f64, usize)> = roots.iter().enumerate().map(|(k, r)| ((r - p).norm(), k)).collect();
    d.sort_by(|a, b| a.0.total_cmp(&b.0));
    (d[0].1, d[0].0, d[1].0)
}

/// `G_1(w) = −4w − 48w²`.
pub fn g1_expansion(w: f64) -> f64 {
    -4.0 * w - 48.0 * w * w
}

/// `G_2(w) = −½w^{−2/3} + ⅔w^{−1/3} + ⅚` with the real cube root.
pub fn g2_expansion(w: f64) -> f64 {
    let c = w.cbrt();
    -0.5 / (c * c) + 2.0 / (3.0 * c) + 5.0 / 6.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct PuiseuxRow {
    pub w: f64,
    pub g: f64,
    pub g2: f64,
    pub g1: f64,
    /// `|G − G_2| / |w|^{1/3}`.
    pub g2_ratio: f64,
    /// `|G − G_1| / |G_1|`.
    pub g1_factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PuiseuxReport {
    pub rows: Vec<PuiseuxRow>,
    /// Least-squares slope of `log |G − G_2|` against `log |w|`.
    pub fit_exponent: f64,
    pub max_g2_ratio: f64,
}

/// Compares the tracked branch on negative reals with both expansions.
pub fn check_puiseux(grid: &[f64]) -> Result<PuiseuxReport> {
    let mut rows = Vec::with_capacity(grid.len());
    for &w in grid {
        if !(-0.1..0.0).contains(&w) {
            return Err(Error::Degenerate(format!("Puiseux grid point {w} outside (-0.1, 0)")));
        }
        let g = stieltjes_g(Complex64::new(w, 0.0))?;
        let (g2, g1) = (g2_expansion(w), g1_expansion(w));
        rows.push(PuiseuxRow {
            w,
            g: g.re,
            g2,
            g1,
            g2_ratio: (g.re - g2).abs() / w.abs().cbrt(),
            g1_factor: (g.re - g1).abs() / g1.abs(),
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.g != r.g2)
        .map(|r| (r.w.abs().ln(), (r.g - r.g2).abs().ln()))
        .collect();
    let fit_exponent = slope(&pts);
    let max_g2_ratio = rows.iter().map(|r| r.g2_ratio).fold(0.0, f64::max);
    Ok(PuiseuxReport {
        rows,
        fit_exponent,
        max_g2_ratio,
    })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    num / den
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomReport {
    pub t0: f64,
    /// `(ε, ε·|G(t0 + iε)|)` in the order given.
    pub samples: Vec<(f64, f64)>,
    /// Aitken extrapolation of the last three samples, clamped at 0.
    pub extrapolated: f64,
}

/// `lim ε|G(t0 + iε)|`, the mass of a possible atom at `t0`.
pub fn atom_mass(t0: f64, eps: &[f64]) -> Result<AtomReport> {
    let samples: Vec<(f64, f64)> = eps
        .iter()
        .map(|&e| Ok((e, e * stieltjes_g(Complex64::new(t0, e))?.norm())))
        .collect::<Result<_>>()?;
    let extrapolated = match samples.as_slice() {
        [.., a, b, c] => {
            let (d1, d2) = (b.1 - a.1, c.1 - b.1);
            let denom = d2 - d1;
            if denom.abs() > 1e-300 {
                (c.1 - d2 * d2 / denom).max(0.0)
            } else {
                c.1
            }
        }
        [.., last] => last.1,
        [] => f64::NAN,
    };
    Ok(AtomReport { t0, samples, extrapolated })
}

/// Real roots of an exact polynomial, polished by real Newton steps.
pub fn real_roots(p: &UnivarRatPoly) -> Result<Vec<f64>> {
    let dp = p.derivative();
    let mut out: Vec<f64> = p
        .roots()?
        .into_iter()
        .filter(|z| z.im.abs() < 1e-7 * (1.0 + z.re.abs()))
        .map(|z| {
            let mut x = z.re;
            for _ in 0..5 {
                let f = p.eval_c64(Complex64::new(x, 0.0)).re;
                let d = dp.eval_c64(Complex64::new(x, 0.0)).re;
                if d == 0.0 {
                    break;
                }
                x -= f / d;
            }
            x
        })
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vieta_and_residuals() {
        let w = Complex64::new(0.7, 0.3);
        let r = quartic_roots(w).unwrap();
        let sum: Complex64 = r.iter().sum();
        let prod: Complex64 = r.iter().product();
        assert!((sum - 2.5).norm() < 1e-10);
        assert!((prod - (2.0 * w).inv()).norm() < 1e-10);
        for g in r {
            let (res, scale) = curve_residual(g, w);
            assert!(res <= 1e-9 * scale);
        }
        assert!(quartic_roots(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn large_w_branch() {
        let g = stieltjes_g(Complex64::new(100.0, 0.0)).unwrap();
        assert!((g.re - 0.01 - 1e-4).abs() < 1e-5);
        let g = stieltjes_g(Complex64::new(10.0, 0.0)).unwrap();
        assert!((g.re - 0.1).abs() < 0.03);
    }

    #[test]
    fn negative_axis_and_herglotz() {
        let g = stieltjes_g(Complex64::new(-0.01, 0.0)).unwrap();
        assert!(g.im.abs() < 1e-12 && g.re < 0.0);
        let g = stieltjes_g(Complex64::new(-0.001, 0.0)).unwrap();
        assert!((g.re - g2_expansion(-0.001)).abs() < 1.0);
        assert!((g2_expansion(-0.001) + 50.0 - 2.0 / 3.0 * -10.0 - 5.0 / 6.0).abs() < 1e-9);
        for &(x, y) in &[(0.5, 1e-3), (2.0, 1e-5), (4.0, 1e-2), (2.58, 1.38), (-1.0, 0.1)] {
            assert!(stieltjes_g(Complex64::new(x, y)).unwrap().im <= 1e-12);
        }
    }

    #[test]
    fn tracking_rejects_spectrum() {
        assert!(stieltjes_g(Complex64::new(1.0, 0.0)).is_err());
        assert!(stieltjes_g(Complex64::new(1.0, -1.0)).is_err());
    }
}
