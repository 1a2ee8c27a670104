//! Executable R-diagonality certificates and the cumulant criteria for
//! polar decompositions.
//!
//! Label 0 is `a` and label 1 is `a*` throughout. All universally quantified
//! identities are checked on basis coefficients, which suffices by
//! multilinearity and bimodularity of the expectation.

use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{AlgElem, Automorphism, Scalar};
use crate::circular::CircularModel;
use crate::cumulants::{all_words, FamilyKind, MapFamily, Word};
use crate::error::{ensure_dim, Error, Result};
use crate::ncpart::{max_alt_interval_partition, Letter, StarWord};
use crate::tensor::{basis_tuples, Tensor};

const A: usize = 0;
const AS: usize = 1;

/// Alternating cumulants `β_k^{(1)} = α_(1,2,…,1,2)` and
/// `β_k^{(2)} = α_(2,1,…,2,1)` for `k = 1..=K`. `None` is the zero map.
#[derive(Debug, Clone, PartialEq)]
pub struct RDiagModel {
    dim: usize,
    beta1: Vec<Option<Tensor>>,
    beta2: Vec<Option<Tensor>>,
}

/// `(1,2,…,1,2)` or `(2,1,…,2,1)` of length `2k`, as label indices.
pub fn alternating_word(first: usize, k: usize) -> Word {
    (0..2 * k).map(|i| if i % 2 == 0 { first } else { 1 - first }).collect()
}

impl RDiagModel {
    /// `beta1[k-1]`, `beta2[k-1]` must have arity `2k - 1`.
    pub fn new(dim: usize, beta1: Vec<Option<Tensor>>, beta2: Vec<Option<Tensor>>) -> Result<Self> {
        if beta1.len() != beta2.len() {
            return Err(Error::InvalidModel("β^(1) and β^(2) have different lengths".into()));
        }
        for (i, t) in beta1.iter().chain(&beta2).enumerate() {
            if let Some(t) = t {
                ensure_dim(dim, t.dim())?;
                let k = i % beta1.len() + 1;
                if t.arity() != 2 * k - 1 {
                    return Err(Error::ArityMismatch {
                        expected: 2 * k - 1,
                        found: t.arity(),
                    });
                }
            }
        }
        Ok(Self { dim, beta1, beta2 })
    }

    pub fn from_circular(model: &CircularModel, max_k: usize) -> Self {
        let mut beta1 = vec![None; max_k];
        let mut beta2 = vec![None; max_k];
        if max_k >= 1 {
            beta1[0] = Some(model.eta1().to_tensor());
            beta2[0] = Some(model.eta2().to_tensor());
        }
        Self {
            dim: model.dim(),
            beta1,
            beta2,
        }
    }

    /// Reads the alternating cumulants of a family over `a, a*`; all other
    /// words are ignored.
    pub fn from_family(family: &MapFamily, max_k: usize) -> Result<Self> {
        expect_kind(family, FamilyKind::Cumulants)?;
        let mut beta1 = Vec::with_capacity(max_k);
        let mut beta2 = Vec::with_capacity(max_k);
        for k in 1..=max_k {
            beta1.push(nonzero(family.get(&alternating_word(A, k))?.cloned()));
            beta2.push(nonzero(family.get(&alternating_word(AS, k))?.cloned()));
        }
        Ok(Self {
            dim: family.dim(),
            beta1,
            beta2,
        })
    }

    /// Sparse cumulant family holding only the alternating words.
    pub fn to_family(&self, max_order: usize) -> Result<MapFamily> {
        let mut f = MapFamily::star_pair(self.dim, FamilyKind::Cumulants, max_order, true)?;
        for k in 1..=self.max_k().min(max_order / 2) {
            if let Some(t) = &self.beta1[k - 1] {
                f.insert(alternating_word(A, k), t.clone())?;
            }
            if let Some(t) = &self.beta2[k - 1] {
                f.insert(alternating_word(AS, k), t.clone())?;
            }
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_k(&self) -> usize {
        self.beta1.len()
    }

    /// `β_k^{(i)}` for `i ∈ {1, 2}`; `None` when zero or beyond `K`.
    pub fn beta(&self, i: usize, k: usize) -> Option<&Tensor> {
        let v = if i == 1 { &self.beta1 } else { &self.beta2 };
        v.get(k.checked_sub(1)?).and_then(Option::as_ref)
    }
}

fn nonzero(t: Option<Tensor>) -> Option<Tensor> {
    t.filter(|t| !t.is_zero())
}

fn expect_kind(family: &MapFamily, kind: FamilyKind) -> Result<()> {
    if family.kind() != kind {
        return Err(Error::KindMismatch {
            expected: kind.name(),
            found: family.kind().name(),
        });
    }
    if family.num_labels() != 2 {
        return Err(Error::InvalidModel("expected the two labels a, a*".into()));
    }
    Ok(())
}

fn is_even_alternating(word: &[usize]) -> bool {
    word.len().is_multiple_of(2) && word.windows(2).all(|w| w[0] != w[1])
}

/// Verdict of a word-level checker.
#[derive(Debug, Clone, PartialEq)]
pub struct RdiagReport {
    pub holds: bool,
    pub checked: usize,
    pub witness: Option<Witness>,
}

/// Reproduction data for a violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Human-readable description of the offending word or product.
    pub description: String,
    pub value: AlgElem,
}

/// Every cumulant outside `(1,2,…,1,2)`, `(2,1,…,2,1)` vanishes, for word
/// lengths `≤ 2K`.
pub fn check_rdiag_cumulants(family: &MapFamily, max_k: usize) -> Result<RdiagReport> {
    expect_kind(family, FamilyKind::Cumulants)?;
    let max_len = (2 * max_k).min(family.max_order());
    let mut checked = 0;
    for n in 1..=max_len {
        for word in all_words(2, n) {
            if is_even_alternating(&word) {
                continue;
            }
            checked += 1;
            if let Some(t) = family.get(&word)? {
                if let Some(ks) = basis_tuples(family.dim(), n - 1)
                    .into_iter()
                    .find(|ks| !t.apply_basis(ks).is_zero())
                {
                    return Ok(RdiagReport {
                        holds: false,
                        checked,
                        witness: Some(Witness {
                            description: format!("cumulant {} on basis tuple {:?}", family.word_name(&word), ks),
                            value: t.apply_basis(&ks),
                        }),
                    });
                }
            }
        }
    }
    Ok(RdiagReport {
        holds: true,
        checked,
        witness: None,
    })
}

/// `c_0 a^{l_1} c_1 a^{l_2} … a^{l_m} c_m`, optionally centered.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub lead: AlgElem,
    pub letters: Vec<usize>,
    /// Coefficient after each letter.
    pub after: Vec<AlgElem>,
    pub centered: bool,
}

impl Segment {
    fn expectation(&self, moments: &MapFamily) -> Result<AlgElem> {
        word_expectation(moments, &self.lead, &self.letters, &self.after)
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = coeff_name(&self.lead);
        for (l, c) in self.letters.iter().zip(&self.after) {
            s.push_str(if *l == A { " a " } else { " a* " });
            s.push_str(&coeff_name(c));
        }
        if self.centered {
            write!(f, "[{s} - E(·)]")
        } else {
            write!(f, "[{s}]")
        }
    }
}

fn coeff_name(c: &AlgElem) -> String {
    if c.as_scalar_multiple_of_unit() == Some(Scalar::one()) {
        return "1".into();
    }
    let nz: Vec<usize> = (0..c.dim()).filter(|&k| !c.coord(k).is_zero()).collect();
    if nz.len() == 1 && c.coord(nz[0]).is_one() {
        format!("e{}", nz[0])
    } else {
        c.to_string()
    }
}

// E(lead a^{l_1} after_1 … a^{l_m} after_m) = lead ψ_l(after_1..after_{m-1}) after_m.
fn word_expectation(moments: &MapFamily, lead: &AlgElem, letters: &[usize], after: &[AlgElem]) -> Result<AlgElem> {
    match letters.len() {
        0 => Ok(lead.clone()),
        m => {
            let psi = moments.apply(letters, &after[..m - 1])?;
            Ok(&(lead * &psi) * &after[m - 1])
        }
    }
}

/// `E(x_1 x_2 ⋯ x_m)` where centered segments stand for `w − E(w)`; expanded
/// into `2^{#centered}` plain moments.
pub fn expect_segments(moments: &MapFamily, segments: &[Segment]) -> Result<AlgElem> {
    let d = moments.dim();
    let centered: Vec<usize> = (0..segments.len()).filter(|&i| segments[i].centered).collect();
    let means: Vec<Option<AlgElem>> = segments
        .iter()
        .map(|s| s.centered.then(|| s.expectation(moments)).transpose())
        .collect::<Result<_>>()?;
    let mut total = AlgElem::zero(d);
    for mask in 0u64..1 << centered.len() {
        let mut lead = AlgElem::unit(d);
        let mut letters = Vec::new();
        let mut after: Vec<AlgElem> = Vec::new();
        let mut negate = false;
        for (i, seg) in segments.iter().enumerate() {
            let replaced = centered
                .iter()
                .position(|&c| c == i)
                .is_some_and(|bit| mask >> bit & 1 == 1);
            let factor = if replaced {
                negate = !negate;
                means[i].as_ref().expect("centered")
            } else {
                &seg.lead
            };
            match after.last_mut() {
                Some(last) => *last = &*last * factor,
                None => lead = &lead * factor,
            }
            if !replaced {
                letters.extend_from_slice(&seg.letters);
                after.extend(seg.after.iter().cloned());
            }
        }
        if lead.is_zero() || after.iter().any(AlgElem::is_zero) {
            continue;
        }
        let v = word_expectation(moments, &lead, &letters, &after)?;
        total = if negate { &total - &v } else { &total + &v };
    }
    Ok(total)
}

/// `E(Π_{B∈σ(ε)} (w_B − E(w_B)))` with `w_B = Π_{j∈B} a^{ε(j)} b_j`.
pub fn centered_alternating_expectation(moments: &MapFamily, eps: &StarWord, coeffs: &[AlgElem]) -> Result<AlgElem> {
    expect_kind(moments, FamilyKind::Moments)?;
    if coeffs.len() != eps.len() {
        return Err(Error::ArityMismatch {
            expected: eps.len(),
            found: coeffs.len(),
        });
    }
    let d = moments.dim();
    let letters: Vec<usize> = eps
        .letters()
        .iter()
        .map(|l| if *l == Letter::A { A } else { AS })
        .collect();
    let segments: Vec<Segment> = max_alt_interval_partition(eps)
        .blocks()
        .into_iter()
        .map(|b| Segment {
            lead: AlgElem::unit(d),
            letters: b.iter().map(|&j| letters[j - 1]).collect(),
            after: b.iter().map(|&j| coeffs[j - 1].clone()).collect(),
            centered: true,
        })
        .collect();
    expect_segments(moments, &segments)
}

// Word shape of an element of P_{ij}: first/last letter and parity.
fn p_words(i: usize, j: usize, max_len: usize) -> Vec<Vec<usize>> {
    let first = i;
    let same_end = i == j;
    (1..=max_len)
        .filter(|&len| (len % 2 == 1) == same_end)
        .map(|len| (0..len).map(|p| if p % 2 == 0 { first } else { 1 - first }).collect())
        .collect()
}

/// Chains `x_1 ⋯ x_m` with `x_j ∈ P_{i_{j-1} i_j}` and at most `max_len`
/// letters in total: `E(x_1 ⋯ x_m) = 0` for all of them. `P_11`, `P_22`
/// words are used raw and `P_12`, `P_21` words centered.
pub fn check_rdiag_words(moments: &MapFamily, max_len: usize) -> Result<RdiagReport> {
    expect_kind(moments, FamilyKind::Moments)?;
    let d = moments.dim();
    let mut state = ChainSearch {
        moments,
        max_len,
        checked: 0,
        witness: None,
        d,
    };
    for i0 in [A, AS] {
        state.extend(&mut Vec::new(), i0, 0)?;
        if state.witness.is_some() {
            break;
        }
    }
    Ok(RdiagReport {
        holds: state.witness.is_none(),
        checked: state.checked,
        witness: state.witness,
    })
}

struct ChainSearch<'a> {
    moments: &'a MapFamily,
    max_len: usize,
    checked: usize,
    witness: Option<Witness>,
    d: usize,
}

impl ChainSearch<'_> {
    fn extend(&mut self, chain: &mut Vec<(Vec<usize>, bool)>, i: usize, used: usize) -> Result<()> {
        for j in [A, AS] {
            for w in p_words(i, j, self.max_len - used) {
                chain.push((w.clone(), i != j));
                self.evaluate(chain)?;
                if self.witness.is_some() {
                    return Ok(());
                }
                self.extend(chain, j, used + w.len())?;
                chain.pop();
                if self.witness.is_some() {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    // Tries every basis assignment of the junction and interior coefficients.
    fn evaluate(&mut self, chain: &[(Vec<usize>, bool)]) -> Result<()> {
        let d = self.d;
        let slots: usize = chain.iter().enumerate().map(|(j, (w, _))| w.len() - 1 + usize::from(j > 0)).sum();
        for ks in basis_tuples(d, slots) {
            let mut it = ks.iter();
            let segments: Vec<Segment> = chain
                .iter()
                .enumerate()
                .map(|(j, (w, centered))| {
                    let lead = if j == 0 {
                        AlgElem::unit(d)
                    } else {
                        AlgElem::basis(d, *it.next().unwrap())
                    };
                    let mut after: Vec<AlgElem> =
                        (0..w.len() - 1).map(|_| AlgElem::basis(d, *it.next().unwrap())).collect();
                    after.push(AlgElem::unit(d));
                    Segment {
                        lead,
                        letters: w.clone(),
                        after,
                        centered: *centered,
                    }
                })
                .collect();
            self.checked += 1;
            let v = expect_segments(self.moments, &segments)?;
            if !v.is_zero() {
                let parts: Vec<String> = segments.iter().map(ToString::to_string).collect();
                self.witness = Some(Witness {
                    description: format!("E({})", parts.join(" ")),
                    value: v,
                });
                return Ok(());
            }
        }
        Ok(())
    }
}

/// Default cap on the number of products visited by [`m2_freeness_check`].
pub const DEFAULT_M2_BUDGET: usize = 5_000_000;

/// A single-entry 2×2 matrix `E_{row,col} ⊗ (product of segments)`.
#[derive(Clone)]
struct Entry {
    row: usize,
    col: usize,
    segments: Vec<Segment>,
    text: Vec<String>,
}

/// Freeness of `z = [[0, a], [a*, 0]]` from `M_2(B)` over the diagonal
/// `B^{(2)}`: `E^{(2)}` kills the four alternating product shapes built from
/// up to `max_factors` centered monomials `r` of degree `≤ max_degree` and
/// off-diagonal matrix units `b`. Monomials carry basis diagonal
/// coefficients, so every product stays a single-entry matrix.
pub fn m2_freeness_check(moments: &MapFamily, max_factors: usize, max_degree: usize, budget: usize) -> Result<RdiagReport> {
    expect_kind(moments, FamilyKind::Moments)?;
    let d = moments.dim();
    let rs = centered_monomials(d, max_degree);
    let mut search = M2Search {
        moments,
        rs: &rs,
        max_factors,
        budget,
        checked: 0,
        witness: None,
    };
    // Leading `b^{(0)}` or not; trailing `b^{(n)}` is decided per product.
    let starts: Vec<Option<Entry>> = std::iter::once(None)
        .chain((0..2).map(|row| {
            Some(Entry {
                row,
                col: 1 - row,
                segments: Vec::new(),
                text: vec![unit_name(row, 1 - row)],
            })
        }))
        .collect();
    for start in starts {
        search.grow(start, 0)?;
        if search.witness.is_some() {
            break;
        }
    }
    Ok(RdiagReport {
        holds: search.witness.is_none(),
        checked: search.checked,
        witness: search.witness,
    })
}

fn unit_name(r: usize, c: usize) -> String {
    format!("E{}{}", r + 1, c + 1)
}

// All `D_0 z D_1 ⋯ z D_m` with `1 ≤ m ≤ max_degree`, `D_i = E_{s_i s_i} ⊗ e_k`,
// centered under `E^{(2)}`.
fn centered_monomials(d: usize, max_degree: usize) -> Vec<Entry> {
    let mut out = Vec::new();
    for m in 1..=max_degree {
        for s0 in 0..2 {
            let letters: Vec<usize> = (0..m).map(|p| if (s0 + p) % 2 == 0 { A } else { AS }).collect();
            let s_end = (s0 + m) % 2;
            for ks in basis_tuples(d, m + 1) {
                let seg = Segment {
                    lead: AlgElem::basis(d, ks[0]),
                    letters: letters.clone(),
                    after: ks[1..].iter().map(|&k| AlgElem::basis(d, k)).collect(),
                    centered: s0 == s_end,
                };
                let text = format!("{}{}", unit_name(s0, s_end), seg);
                out.push(Entry {
                    row: s0,
                    col: s_end,
                    segments: vec![seg],
                    text: vec![text],
                });
            }
        }
    }
    out
}

struct M2Search<'a> {
    moments: &'a MapFamily,
    rs: &'a [Entry],
    max_factors: usize,
    budget: usize,
    checked: usize,
    witness: Option<Witness>,
}

impl M2Search<'_> {
    // `acc` ends with a matrix unit (or is empty); appends `r` then
    // optionally the closing unit, recursing while factors remain.
    fn grow(&mut self, acc: Option<Entry>, used: usize) -> Result<()> {
        if used == self.max_factors {
            return Ok(());
        }
        for r in self.rs {
            let Some(with_r) = multiply(acc.as_ref(), r) else {
                continue;
            };
            // Product ending in `r`.
            self.test(&with_r)?;
            // Product ending in a matrix unit `b`; continuing requires one.
            let b = Entry {
                row: with_r.col,
                col: 1 - with_r.col,
                segments: Vec::new(),
                text: vec![unit_name(with_r.col, 1 - with_r.col)],
            };
            let with_b = multiply(Some(&with_r), &b).expect("matching index");
            self.test(&with_b)?;
            if self.witness.is_some() {
                return Ok(());
            }
            self.grow(Some(with_b), used + 1)?;
            if self.witness.is_some() {
                return Ok(());
            }
        }
        Ok(())
    }

    fn test(&mut self, e: &Entry) -> Result<()> {
        if self.witness.is_some() {
            return Ok(());
        }
        self.checked += 1;
        if self.checked > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        if e.row != e.col {
            return Ok(());
        }
        let v = expect_segments(self.moments, &e.segments)?;
        if !v.is_zero() {
            self.witness = Some(Witness {
                description: format!("E2 diagonal entry {} of {}", e.row + 1, e.text.join(" · ")),
                value: v,
            });
        }
        Ok(())
    }
}

fn multiply(acc: Option<&Entry>, next: &Entry) -> Option<Entry> {
    match acc {
        None => Some(next.clone()),
        Some(a) if a.col == next.row => {
            let mut segments = a.segments.clone();
            segments.extend(next.segments.iter().cloned());
            let mut text = a.text.clone();
            text.extend(next.text.iter().cloned());
            Some(Entry {
                row: a.row,
                col: next.col,
                segments,
                text,
            })
        }
        Some(_) => None,
    }
}

/// `β_k^{(1)} = β_k^{(2)}` for all `k ≤ K`.
pub fn check_beta_symmetry(model: &RDiagModel) -> bool {
    (1..=model.max_k()).all(|k| same_map(model.beta(1, k), model.beta(2, k)))
}

fn same_map(x: Option<&Tensor>, y: Option<&Tensor>) -> bool {
    match (x, y) {
        (None, None) => true,
        (Some(t), None) | (None, Some(t)) => t.is_zero(),
        (Some(s), Some(t)) => s == t,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwistReport {
    pub holds: bool,
    pub checked: usize,
    /// First `(k, basis tuple, lhs, rhs)` in lexicographic order.
    pub counterexample: Option<(usize, Vec<usize>, AlgElem, AlgElem)>,
}

/// `β_k^{(2)}(b_1, θb_2, b_3, …, b_{2k-1}) = θ(β_k^{(1)}(θb_1, b_2, θb_3, …, θb_{2k-1}))`
/// on basis tuples for `k ≤ K`.
pub fn check_theta_twist(model: &RDiagModel, theta: &Automorphism) -> Result<TwistReport> {
    ensure_dim(model.dim, theta.dim())?;
    let d = model.dim;
    let zero = AlgElem::zero(d);
    let mut checked = 0;
    for k in 1..=model.max_k() {
        let (b1, b2) = (model.beta(1, k), model.beta(2, k));
        if b1.is_none() && b2.is_none() {
            continue;
        }
        for ks in basis_tuples(d, 2 * k - 1) {
            checked += 1;
            let twisted = |odd: bool| -> Vec<usize> {
                ks.iter()
                    .enumerate()
                    .map(|(p, &kk)| if (p % 2 == 0) == odd { theta.image_of_basis(kk) } else { kk })
                    .collect()
            };
            let lhs = b2.map_or_else(|| zero.clone(), |t| t.apply_basis(&twisted(false)));
            let rhs = b1.map_or_else(|| zero.clone(), |t| theta.apply(&t.apply_basis(&twisted(true))));
            if lhs != rhs {
                return Ok(TwistReport {
                    holds: false,
                    checked,
                    counterexample: Some((k, ks, lhs, rhs)),
                });
            }
        }
    }
    Ok(TwistReport {
        holds: true,
        checked,
        counterexample: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarVerdict {
    /// No realization `a = up` with `{u, u*}` free from self-adjoint `p`.
    Obstructed,
    Unobstructed,
    /// `E(a*a)` is not a multiple of the unit, so the test does not apply.
    Inconclusive,
}

impl PolarVerdict {
    pub fn name(self) -> &'static str {
        match self {
            PolarVerdict::Obstructed => "obstructed",
            PolarVerdict::Unobstructed => "unobstructed",
            PolarVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolarReport {
    pub verdict: PolarVerdict,
    /// `E(a*a) = ψ_(2,1)(1)`.
    pub e_astar_a: AlgElem,
    /// `E(aa*) = ψ_(1,2)(1)`.
    pub e_a_astar: AlgElem,
}

/// If `a = up` with `u` unitary free from `p = p*`, then `E(a*a) = E(p²)`
/// and, when that is a scalar, `E(aa*) = E(u E(p²) u*) = E(a*a)`.
pub fn check_polar_obstruction(moments: &MapFamily) -> Result<PolarReport> {
    expect_kind(moments, FamilyKind::Moments)?;
    let unit = AlgElem::unit(moments.dim());
    let e_astar_a = moments.apply(&[AS, A], std::slice::from_ref(&unit))?;
    let e_a_astar = moments.apply(&[A, AS], std::slice::from_ref(&unit))?;
    let verdict = match e_astar_a.as_scalar_multiple_of_unit() {
        None => PolarVerdict::Inconclusive,
        Some(_) if e_a_astar != e_astar_a => PolarVerdict::Obstructed,
        Some(_) => PolarVerdict::Unobstructed,
    };
    Ok(PolarReport {
        verdict,
        e_astar_a,
        e_a_astar,
    })
}

/// Swaps the roles of `a` and `a*` in a family over two labels.
pub fn swap_labels(family: &MapFamily) -> Result<MapFamily> {
    let mut out = MapFamily::new(
        family.dim(),
        family.labels().iter().rev().cloned().collect(),
        family.kind(),
        family.max_order(),
        family.is_sparse(),
    )?;
    for (w, t) in family.stored() {
        out.insert(w.iter().map(|&l| 1 - l).collect(), t.clone())?;
    }
    Ok(out)
}

/// `c·E` for scalars, used to build perturbed models in tests and the CLI.
pub fn scaled_identity_tensor(d: usize, arity: usize, c: &Scalar) -> Tensor {
    Tensor::from_fn(d, arity, |o, ks| {
        if ks.iter().all(|&k| k == o) {
            c.clone()
        } else {
            Scalar::zero()
        }
    })
}
