//! Exact scalar series for the trace generating function `h(z)` of the
//! nofreepolar model, and the algebraic curves it satisfies.
//!
//! With `f = F(1,1) = f_1 ⊕ f_2` and `g = G(1,1) = g_1 ⊕ g_2`:
//!
//! ```text
//! f_1 = 1 + z (g_1/2) f_1          g_1 = 1 + z ((f_1+f_2)/2) g_1
//! f_2 = 1 + z (g_1/2 + g_2) f_2    g_2 = 1 + z f_2 g_2
//! ```
//!
//! and `h = (f_1 + f_2)/2`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{BivarPoly, UnivarRatPoly};
use crate::error::{Error, Result};

/// Truncated coefficient vectors `c_0..c_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSeries {
    pub f1: Vec<BigRational>,
    pub f2: Vec<BigRational>,
    pub g1: Vec<BigRational>,
    pub g2: Vec<BigRational>,
    pub h: Vec<BigRational>,
}

fn cauchy(a: &[BigRational], b: &[BigRational], n: usize) -> BigRational {
    (0..=n).fold(BigRational::zero(), |acc, i| acc + &a[i] * &b[n - i])
}

pub fn appendix_component_series(n: usize) -> ComponentSeries {
    let half = BigRational::new(1.into(), 2.into());
    let one = BigRational::one();
    let (mut f1, mut f2, mut g1, mut g2) = (vec![one.clone()], vec![one.clone()], vec![one.clone()], vec![one.clone()]);
    for k in 1..=n {
        // Coefficient k of z·X·Y is coefficient k-1 of X·Y.
        let m = k - 1;
        let g1h: Vec<BigRational> = g1.iter().map(|c| c * &half).collect();
        let f_avg: Vec<BigRational> = f1.iter().zip(&f2).map(|(a, b)| (a + b) * &half).collect();
        let g_mix: Vec<BigRational> = g1h.iter().zip(&g2).map(|(a, b)| a + b).collect();
        let nf1 = cauchy(&g1h, &f1, m);
        let nf2 = cauchy(&g_mix, &f2, m);
        let ng1 = cauchy(&f_avg, &g1, m);
        let ng2 = cauchy(&f2, &g2, m);
        f1.push(nf1);
        f2.push(nf2);
        g1.push(ng1);
        g2.push(ng2);
    }
    let h = f1.iter().zip(&f2).map(|(a, b)| (a + b) * &half).collect();
    ComponentSeries { f1, f2, g1, g2, h }
}

/// `8z³h⁴ − 20z²h³ + 8z(z+2)h² + (z² − 12z − 4)h + 4` in `(h, z)`.
pub fn hpoly() -> BivarPoly {
    BivarPoly::from_i64(&[
        ((4, 3), 8),
        ((3, 2), -20),
        ((2, 2), 8),
        ((2, 1), 16),
        ((1, 2), 1),
        ((1, 1), -12),
        ((1, 0), -4),
        ((0, 0), 4),
    ])
}

/// `8G⁴w² − 20G³w² + 8G²w(2w+1) + G(−4w² − 12w + 1) + 4w` in `(G, w)`.
pub fn gpoly() -> BivarPoly {
    BivarPoly::from_i64(&[
        ((4, 2), 8),
        ((3, 2), -20),
        ((2, 2), 16),
        ((2, 1), 8),
        ((1, 2), -4),
        ((1, 1), -12),
        ((1, 0), 1),
        ((0, 1), 4),
    ])
}

/// Coefficients `0..=n` of `P(s(z), z)` for `P` in `(x, z)`.
pub fn series_residual(p: &BivarPoly, s: &[BigRational], n: usize) -> Vec<BigRational> {
    let dx = p.degree_x().unwrap_or(0) as usize;
    let mut pows: Vec<Vec<BigRational>> = vec![unit_series(n)];
    for _ in 0..dx {
        let last = pows.last().unwrap();
        pows.push((0..=n).map(|k| cauchy_trunc(last, s, k)).collect());
    }
    let mut out = vec![BigRational::zero(); n + 1];
    for ((i, j), c) in p.terms() {
        let (i, j) = (*i as usize, *j as usize);
        for k in j..=n {
            out[k] += c * &pows[i][k - j];
        }
    }
    out
}

fn unit_series(n: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); n + 1];
    v[0] = BigRational::one();
    v
}

fn cauchy_trunc(a: &[BigRational], b: &[BigRational], k: usize) -> BigRational {
    (0..=k)
        .filter(|&i| i < a.len() && k - i < b.len())
        .fold(BigRational::zero(), |acc, i| acc + &a[i] * &b[k - i])
}

/// The quartic identity for `h` holds through `z^N`.
pub fn verify_h_quartic(n: usize) -> bool {
    verify_quartic_for(&appendix_component_series(n).h, n)
}

/// Same check for arbitrary coefficients `h_0..h_N`.
pub fn verify_quartic_for(h: &[BigRational], n: usize) -> bool {
    first_nonzero(&series_residual(&hpoly(), h, n)).is_none()
}

/// Index of the first nonzero coefficient.
pub fn first_nonzero(v: &[BigRational]) -> Option<usize> {
    v.iter().position(|c| !c.is_zero())
}

/// Substitutes `h = wG`, `z = 1/w` into the `h`-quartic and clears the
/// denominator: a polynomial in `(G, w)`.
pub fn h_to_g_curve() -> BivarPoly {
    let p = hpoly();
    // h^i z^j ↦ w^{i-j} G^i; shift every exponent by the most negative one.
    let lift = p.terms().keys().map(|&(i, j)| j as i64 - i as i64).max().unwrap_or(0).max(0);
    let terms = p
        .terms()
        .iter()
        .map(|(&(i, j), c)| ((i, (i as i64 - j as i64 + lift) as u32), c.clone()));
    BivarPoly::new(terms).primitive()
}

/// Outcome of eliminating `f_1, f_2, g_1, g_2` from the component system.
#[derive(Debug, Clone, PartialEq)]
pub struct Elimination {
    /// Final resultant in `(h, z)`.
    pub resultant: BivarPoly,
    /// Annihilator of the `h` series found independently by linear algebra.
    pub annihilator: BivarPoly,
    /// How often the annihilator divides the resultant.
    pub multiplicity: usize,
    /// Resultant with the annihilator divided out.
    pub cofactor: BivarPoly,
    /// First order at which the cofactor fails to vanish on `h`.
    pub cofactor_residual_order: Option<usize>,
}

/// Successive resultants remove `g_2`, `f_1`, `g_1`, `f_2`. The result is
/// split using the minimal-degree annihilator of the exact `h` series, and
/// the remaining factor is discarded by its series residual.
pub fn eliminate_h() -> Result<Elimination> {
    use Var::*;
    let two = || MPoly::constant(2);
    let e1 = MPoly::var(F1).mul(&two().sub(&MPoly::var(Z).mul(&MPoly::var(G1)))).sub(&two());
    let e2 = MPoly::var(F2)
        .mul(&two().sub(&MPoly::var(Z).mul(&MPoly::var(G1))).sub(&MPoly::var(Z).mul(&MPoly::var(G2)).scale(2)))
        .sub(&two());
    let e3 = MPoly::var(G1)
        .mul(&two().sub(&MPoly::var(Z).mul(&MPoly::var(F1).add(&MPoly::var(F2)))))
        .sub(&two());
    let e4 = MPoly::var(G2).mul(&MPoly::constant(1).sub(&MPoly::var(Z).mul(&MPoly::var(F2)))).sub(&MPoly::constant(1));
    let e5 = MPoly::var(H).scale(2).sub(&MPoly::var(F1)).sub(&MPoly::var(F2));

    let r_g2 = e2.resultant(&e4, G2)?;
    let e1h = e1.resultant(&e5, F1)?;
    let e3h = e3.resultant(&e5, F1)?;
    let s1 = e1h.resultant(&e3h, G1)?;
    let s2 = r_g2.resultant(&e3h, G1)?;
    let r = s1.resultant(&s2, F2)?;
    let resultant = r.to_bivar(H, Z)?.primitive();
    if resultant.is_zero() {
        return Err(Error::Degenerate("elimination produced the zero polynomial".into()));
    }

    let n = 30;
    let h = appendix_component_series(n).h;
    let annihilator = annihilator(&h, 4, 3, n)?;
    let mut cofactor = resultant.clone();
    let mut multiplicity = 0;
    while let Some(q) = cofactor.div_exact(&annihilator) {
        cofactor = q;
        multiplicity += 1;
    }
    let cofactor_residual_order = first_nonzero(&series_residual(&cofactor, &h, n));
    Ok(Elimination {
        resultant,
        annihilator,
        multiplicity,
        cofactor,
        cofactor_residual_order,
    })
}

/// The unique (up to scale) `P(x, z)` with `deg_x ≤ dx`, `deg_z ≤ dz` and
/// `P(s(z), z) = O(z^{n+1})`, normalized to coprime integer coefficients.
pub fn annihilator(s: &[BigRational], dx: u32, dz: u32, n: usize) -> Result<BivarPoly> {
    let unknowns: Vec<(u32, u32)> = (0..=dx).flat_map(|i| (0..=dz).map(move |j| (i, j))).collect();
    // Column for x^i z^j holds the coefficients of s^i z^j.
    let cols: Vec<Vec<BigRational>> = unknowns
        .iter()
        .map(|&k| series_residual(&BivarPoly::new([(k, BigRational::one())]), s, n))
        .collect();
    let rows: Vec<Vec<BigRational>> = (0..=n).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    let kernel = nullspace(rows, unknowns.len());
    match kernel.as_slice() {
        [v] => Ok(BivarPoly::new(unknowns.iter().copied().zip(v.iter().cloned())).primitive()),
        [] => Err(Error::Degenerate("no annihilator within the degree box".into())),
        _ => Err(Error::Degenerate("annihilator not unique within the degree box".into())),
    }
}

fn nullspace(mut m: Vec<Vec<BigRational>>, ncols: usize) -> Vec<Vec<BigRational>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = BigRational::one() / &m[row][col];
        for x in &mut m[row][col..ncols] {
            *x *= &inv;
        }
        let pivot_row = m[row].clone();
        for (r, line) in m.iter_mut().enumerate() {
            if r != row && !line[col].is_zero() {
                let f = line[col].clone();
                for (x, p) in line[col..ncols].iter_mut().zip(&pivot_row[col..ncols]) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); ncols];
            v[free] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][free].clone();
            }
            v
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    F1 = 0,
    F2 = 1,
    G1 = 2,
    G2 = 3,
    H = 4,
    Z = 5,
}

/// Sparse polynomial in the six elimination variables.
#[derive(Debug, Clone, PartialEq, Default)]
struct MPoly {
    terms: BTreeMap<[u16; 6], BigRational>,
}

impl MPoly {
    fn constant(c: i64) -> Self {
        let mut p = Self::default();
        p.add_term([0; 6], BigRational::from_integer(c.into()));
        p
    }

    fn var(v: Var) -> Self {
        let mut e = [0; 6];
        e[v as usize] = 1;
        let mut p = Self::default();
        p.add_term(e, BigRational::one());
        p
    }

    fn add_term(&mut self, e: [u16; 6], c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(*e, c.clone());
        }
        p
    }

    fn scale(&self, c: i64) -> Self {
        let c = BigRational::from_integer(c.into());
        let mut p = Self::default();
        for (e, v) in &self.terms {
            p.add_term(*e, v * &c);
        }
        p
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1))
    }

    fn mul(&self, o: &Self) -> Self {
        let mut p = Self::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let mut e = *a;
                for k in 0..6 {
                    e[k] += b[k];
                }
                p.add_term(e, ca * cb);
            }
        }
        p
    }

    /// Coefficients of `v^0, v^1, …`.
    fn coeffs_in(&self, v: Var) -> Vec<MPoly> {
        let deg = self.terms.keys().map(|e| e[v as usize]).max().unwrap_or(0) as usize;
        let mut out = vec![MPoly::default(); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = *e;
            e2[v as usize] = 0;
            out[e[v as usize] as usize].add_term(e2, c.clone());
        }
        out
    }

    /// Sylvester resultant in `v`, expanded by cofactors.
    fn resultant(&self, o: &Self, v: Var) -> Result<MPoly> {
        let (p, q) = (self.coeffs_in(v), o.coeffs_in(v));
        let (m, n) = (p.len() - 1, q.len() - 1);
        let size = m + n;
        if size > 6 {
            return Err(Error::Degenerate("Sylvester matrix too large for cofactor expansion".into()));
        }
        let mut mat = vec![vec![MPoly::default(); size]; size];
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
        Ok(laplace_det(&mat))
    }

    fn to_bivar(&self, x: Var, y: Var) -> Result<BivarPoly> {
        let mut out = Vec::new();
        for (e, c) in &self.terms {
            if (0..6).any(|k| k != x as usize && k != y as usize && e[k] != 0) {
                return Err(Error::Degenerate("variable left after elimination".into()));
            }
            out.push(((u32::from(e[x as usize]), u32::from(e[y as usize])), c.clone()));
        }
        Ok(BivarPoly::new(out))
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

fn laplace_det(m: &[Vec<MPoly>]) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::constant(1);
    }
    let mut acc = MPoly::default();
    for (j, a) in m[0].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<MPoly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = a.mul(&laplace_det(&minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Exact discriminant of the `G`-curve in `G` and its quartic factor.
pub fn g_discriminant() -> Result<UnivarRatPoly> {
    h_to_g_curve().discriminant_x()
}
