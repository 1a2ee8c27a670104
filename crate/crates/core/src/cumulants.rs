//! Families of B-valued moment maps `ψ_j` and cumulant maps `α_j`, the nested
//! evaluation `α̂_j(π)`, conversions between the two, and the traciality and
//! self-adjointness criteria.
//!
//! Words are sequences of label indices `0..labels.len()`. The tensor stored
//! for a word of length `n` has arity `n - 1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{AlgElem, Scalar, TraceFunctional};
use crate::error::{ensure_dim, Error, Result};
use crate::ncpart::{for_each_nc, interval_blocks, Partition};
use crate::tensor::{basis_tuples, Tensor};

pub type Word = Vec<usize>;

/// Default maximal word length.
pub const DEFAULT_MAX_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Moments,
    Cumulants,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Moments => "moments",
            FamilyKind::Cumulants => "cumulants",
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Lookup `word ↦ tensor` for all words of length `1..=max_order`.
///
/// A sparse family treats absent words as zero maps; a dense family reports
/// them as [`Error::MissingWord`].
#[derive(Debug, Clone, PartialEq)]
pub struct MapFamily {
    dim: usize,
    labels: Vec<String>,
    kind: FamilyKind,
    max_order: usize,
    sparse: bool,
    maps: BTreeMap<Word, Tensor>,
}

impl MapFamily {
    pub fn new(dim: usize, labels: Vec<String>, kind: FamilyKind, max_order: usize, sparse: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModel("algebra dimension must be positive".into()));
        }
        if labels.is_empty() {
            return Err(Error::InvalidModel("a family needs at least one label".into()));
        }
        if max_order == 0 {
            return Err(Error::InvalidModel("maximal order must be positive".into()));
        }
        Ok(Self {
            dim,
            labels,
            kind,
            max_order,
            sparse,
            maps: BTreeMap::new(),
        })
    }

    /// Two labels `a`, `a*` (indices 0 and 1).
    pub fn star_pair(dim: usize, kind: FamilyKind, max_order: usize, sparse: bool) -> Result<Self> {
        Self::new(dim, vec!["a".into(), "a*".into()], kind, max_order, sparse)
    }

    pub fn insert(&mut self, word: Word, tensor: Tensor) -> Result<()> {
        self.check_word(&word)?;
        ensure_dim(self.dim, tensor.dim())?;
        if tensor.arity() + 1 != word.len() {
            return Err(Error::ArityMismatch {
                expected: word.len() - 1,
                found: tensor.arity(),
            });
        }
        self.maps.insert(word, tensor);
        Ok(())
    }

    fn check_word(&self, word: &[usize]) -> Result<()> {
        if word.is_empty() {
            return Err(Error::InvalidModel("empty word".into()));
        }
        if word.len() > self.max_order {
            return Err(Error::OrderExceeded {
                len: word.len(),
                max: self.max_order,
            });
        }
        if let Some(&l) = word.iter().find(|&&l| l >= self.labels.len()) {
            return Err(Error::InvalidModel(format!("label index {l} out of range")));
        }
        Ok(())
    }

    /// `Ok(None)` stands for the zero map of a sparse family.
    pub fn get(&self, word: &[usize]) -> Result<Option<&Tensor>> {
        self.check_word(word)?;
        match self.maps.get(word) {
            Some(t) => Ok(Some(t)),
            None if self.sparse => Ok(None),
            None => Err(Error::MissingWord(word.to_vec())),
        }
    }

    /// The tensor for `word`, materializing zero for absent sparse words.
    pub fn tensor(&self, word: &[usize]) -> Result<Tensor> {
        Ok(self
            .get(word)?
            .cloned()
            .unwrap_or_else(|| Tensor::zero(self.dim, word.len() - 1)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn is_sparse(&self) -> bool {
        self.sparse
    }

    /// Stored words in lexicographic order.
    pub fn stored(&self) -> impl Iterator<Item = (&Word, &Tensor)> {
        self.maps.iter()
    }

    pub fn remove(&mut self, word: &[usize]) -> Option<Tensor> {
        self.maps.remove(word)
    }

    pub fn set_max_order(&mut self, max_order: usize) {
        self.max_order = max_order;
    }

    pub fn word_name(&self, word: &[usize]) -> String {
        let parts: Vec<&str> = word.iter().map(|&l| self.labels[l].as_str()).collect();
        format!("({})", parts.join(","))
    }

    /// Evaluates the map of `word` on `args`; zero for absent sparse words.
    pub fn apply(&self, word: &[usize], args: &[AlgElem]) -> Result<AlgElem> {
        match self.get(word)? {
            Some(t) => t.apply(args),
            None => {
                if args.len() + 1 != word.len() {
                    return Err(Error::ArityMismatch {
                        expected: word.len() - 1,
                        found: args.len(),
                    });
                }
                Ok(AlgElem::zero(self.dim))
            }
        }
    }
}

/// All words of length `n` over `labels` letters in lexicographic order.
pub fn all_words(labels: usize, n: usize) -> Vec<Word> {
    basis_tuples(labels, n)
}

/// Cyclic left shift `c(j) = (j_2, …, j_n, j_1)`.
pub fn cyclic_shift(word: &[usize]) -> Word {
    let mut out = word[1..].to_vec();
    out.push(word[0]);
    out
}

/// `s̃(j) = (s(j_n), …, s(j_1))` for an involution `s` on labels.
pub fn star_word(word: &[usize], s: &[usize]) -> Word {
    word.iter().rev().map(|&l| s[l]).collect()
}

/// `α̂_j(π)[b_1..b_{n-1}]`, removing the first interval block at each step.
pub fn eval_nested(family: &MapFamily, word: &[usize], pi: &Partition, args: &[AlgElem]) -> Result<AlgElem> {
    eval_nested_with(family, word, pi, args, &mut |_, _| 0)
}

/// As [`eval_nested`], with `choose(π, interval_blocks)` picking the block
/// removed at each level.
pub fn eval_nested_with(
    family: &MapFamily,
    word: &[usize],
    pi: &Partition,
    args: &[AlgElem],
    choose: &mut dyn FnMut(&Partition, &[Vec<usize>]) -> usize,
) -> Result<AlgElem> {
    if family.kind != FamilyKind::Cumulants {
        return Err(Error::KindMismatch {
            expected: "cumulants",
            found: family.kind.name(),
        });
    }
    if word.len() != pi.n() {
        return Err(Error::ArityMismatch {
            expected: pi.n(),
            found: word.len(),
        });
    }
    if args.len() + 1 != word.len() {
        return Err(Error::ArityMismatch {
            expected: word.len() - 1,
            found: args.len(),
        });
    }
    for a in args {
        ensure_dim(family.dim, a.dim())?;
    }
    Ok(nested(family, word, pi, args, choose)?.unwrap_or_else(|| AlgElem::zero(family.dim)))
}

// `None` is an exact zero detected without arithmetic.
fn nested(
    family: &MapFamily,
    word: &[usize],
    pi: &Partition,
    args: &[AlgElem],
    choose: &mut dyn FnMut(&Partition, &[Vec<usize>]) -> usize,
) -> Result<Option<AlgElem>> {
    let n = word.len();
    if pi.is_one() {
        return cumulant(family, word, args);
    }
    let blocks = interval_blocks(pi);
    let pick = choose(pi, &blocks);
    let block = &blocks[pick.min(blocks.len() - 1)];
    let (p, q) = (block[0], block.len());
    let inner_word = &word[p - 1..p + q - 1];
    let outer_word: Word = word[..p - 1].iter().chain(&word[p + q - 1..]).copied().collect();
    let rest = pi
        .remove_block(pi.block_of(p))
        .expect("a partition other than 1_n has at least two blocks");
    if p >= 2 && p + q - 1 < n {
        let Some(inner) = cumulant(family, inner_word, &args[p - 1..p + q - 2])? else {
            return Ok(None);
        };
        let merged = &(&args[p - 2] * &inner) * &args[p + q - 2];
        let new_args: Vec<AlgElem> = args[..p - 2]
            .iter()
            .cloned()
            .chain(std::iter::once(merged))
            .chain(args[p + q - 1..].iter().cloned())
            .collect();
        nested(family, &outer_word, &rest, &new_args, choose)
    } else if p >= 2 {
        let Some(inner) = cumulant(family, inner_word, &args[p - 1..])? else {
            return Ok(None);
        };
        let Some(outer) = nested(family, &outer_word, &rest, &args[..p - 2], choose)? else {
            return Ok(None);
        };
        Ok(Some(&(&outer * &args[p - 2]) * &inner))
    } else {
        let Some(inner) = cumulant(family, inner_word, &args[..q - 1])? else {
            return Ok(None);
        };
        let Some(outer) = nested(family, &outer_word, &rest, &args[q..], choose)? else {
            return Ok(None);
        };
        Ok(Some(&(&inner * &args[q - 1]) * &outer))
    }
}

fn cumulant(family: &MapFamily, word: &[usize], args: &[AlgElem]) -> Result<Option<AlgElem>> {
    Ok(family.get(word)?.map(|t| t.apply_unchecked(args)))
}

/// `ψ_j(b) = Σ_{π ∈ NC(n)} α̂_j(π)[b]`, summed literally over `NC(n)`.
pub fn moments_from_cumulants(family: &MapFamily, word: &[usize], args: &[AlgElem]) -> Result<AlgElem> {
    let mut acc = AlgElem::zero(family.dim);
    let mut err = None;
    for_each_nc(word.len(), |pi| {
        if err.is_some() {
            return;
        }
        match eval_nested(family, word, pi, args) {
            Ok(v) => acc = &acc + &v,
            Err(e) => err = Some(e),
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

/// The moment family of a cumulant family for all words up to `max_order`.
///
/// Uses the first-block recursion: the block containing 1 is summed
/// explicitly and every gap contributes a lower-order moment.
pub fn moment_family(cumulants: &MapFamily, max_order: usize) -> Result<MapFamily> {
    if cumulants.kind != FamilyKind::Cumulants {
        return Err(Error::KindMismatch {
            expected: "cumulants",
            found: cumulants.kind.name(),
        });
    }
    convert(cumulants, max_order, FamilyKind::Moments)
}

/// Solves `α_j = ψ_j − Σ_{π ≠ 1_n} α̂_j(π)` for all words up to `max_order`.
pub fn cumulants_from_moments(moments: &MapFamily, max_order: usize) -> Result<MapFamily> {
    if moments.kind != FamilyKind::Moments {
        return Err(Error::KindMismatch {
            expected: "moments",
            found: moments.kind.name(),
        });
    }
    convert(moments, max_order, FamilyKind::Cumulants)
}

fn convert(src: &MapFamily, max_order: usize, target: FamilyKind) -> Result<MapFamily> {
    if max_order > src.max_order {
        return Err(Error::OrderExceeded {
            len: max_order,
            max: src.max_order,
        });
    }
    let d = src.dim;
    let mut psi: HashMap<Word, Tensor> = HashMap::new();
    let mut alpha: HashMap<Word, Option<Tensor>> = HashMap::new();
    for n in 1..=max_order {
        let words = all_words(src.num_labels(), n);
        let level: Vec<(Word, Option<Tensor>, Tensor)> = words
            .into_par_iter()
            .map(|w| -> Result<_> {
                match target {
                    FamilyKind::Moments => {
                        let a = src.get(&w)?.cloned();
                        let p = first_block_tensor(d, &w, &psi, &alpha, a.as_ref(), Mode::Moment);
                        Ok((w, a, p))
                    }
                    FamilyKind::Cumulants => {
                        let p = src.tensor(&w)?;
                        let a = first_block_tensor(d, &w, &psi, &alpha, Some(&p), Mode::Cumulant);
                        Ok((w, Some(a), p))
                    }
                }
            })
            .collect::<Result<_>>()?;
        for (w, a, p) in level {
            alpha.insert(w.clone(), a);
            psi.insert(w, p);
        }
    }
    let mut out = MapFamily::new(d, src.labels.clone(), target, max_order, false)?;
    match target {
        FamilyKind::Moments => {
            for (w, t) in psi {
                out.maps.insert(w, t);
            }
        }
        FamilyKind::Cumulants => {
            for (w, t) in alpha {
                out.maps.insert(w, t.expect("computed"));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    /// `own` is `α_j`; returns `ψ_j`.
    Moment,
    /// `own` is `ψ_j`; returns `α_j`.
    Cumulant,
}

fn first_block_tensor(
    d: usize,
    word: &[usize],
    psi: &HashMap<Word, Tensor>,
    alpha: &HashMap<Word, Option<Tensor>>,
    own: Option<&Tensor>,
    mode: Mode,
) -> Tensor {
    let n = word.len();
    let mut out = match (mode, own) {
        (_, Some(t)) => t.clone(),
        (_, None) => Tensor::zero(d, n - 1),
    };
    let full_mask = (1u32 << (n - 1)) - 1;
    for ks in basis_tuples(d, n - 1) {
        let mut acc = vec![Scalar::zero(); d];
        let mut v: Vec<usize> = Vec::with_capacity(n);
        for mask in 0..full_mask {
            v.clear();
            v.push(1);
            v.extend((0..n - 1).filter(|b| mask >> b & 1 == 1).map(|b| b + 2));
            add_block_term(d, word, &ks, &v, psi, alpha, &mut acc);
        }
        for (o, a) in acc.into_iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let idx = out.index(o, &ks);
            let cur = out.data()[idx].clone();
            let val = match mode {
                Mode::Moment => cur + a,
                Mode::Cumulant => cur - a,
            };
            out.set(o, &ks, val);
        }
    }
    out
}

// Adds the contribution of all partitions whose block containing 1 is `v`
// (1-based, sorted) on the basis tuple `ks`.
fn add_block_term(
    d: usize,
    word: &[usize],
    ks: &[usize],
    v: &[usize],
    psi: &HashMap<Word, Tensor>,
    alpha: &HashMap<Word, Option<Tensor>>,
    acc: &mut [Scalar],
) {
    let n = word.len();
    let k = |i: usize| ks[i - 1];
    let mut weight = Scalar::one();
    let mut slots = Vec::with_capacity(v.len());
    for r in 0..v.len() - 1 {
        let (a, b) = (v[r], v[r + 1]);
        if b == a + 1 {
            slots.push(k(a));
            continue;
        }
        let kappa = k(a);
        if kappa != k(b - 1) {
            return;
        }
        let gap = &psi[&word[a..b - 1]];
        let w = gap.entry(kappa, &ks[a..b - 2]);
        if w.is_zero() {
            return;
        }
        weight *= w;
        slots.push(kappa);
    }
    let sub: Word = v.iter().map(|&i| word[i - 1]).collect();
    let Some(Some(al)) = alpha.get(&sub) else {
        return;
    };
    let last = *v.last().unwrap();
    if last < n {
        let kappa = k(last);
        let tail = &psi[&word[last..]];
        let w2 = tail.entry(kappa, &ks[last..]);
        let a = al.entry(kappa, &slots);
        if !w2.is_zero() && !a.is_zero() {
            acc[kappa] += &weight * w2 * a;
        }
    } else {
        for (o, slot) in acc.iter_mut().enumerate().take(d) {
            let a = al.entry(o, &slots);
            if !a.is_zero() {
                *slot += &weight * a;
            }
        }
    }
}

/// First violation found by a checker, in lexicographic order of
/// `(word length, word, basis tuple)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub word: Word,
    pub tuple: Vec<usize>,
    pub lhs: AlgElem,
    pub rhs: AlgElem,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub holds: bool,
    pub checked: usize,
    pub counterexample: Option<Violation>,
}

impl CheckReport {
    fn from_first(checked: usize, v: Option<Violation>) -> Self {
        Self {
            holds: v.is_none(),
            checked,
            counterexample: v,
        }
    }
}

/// `τ(T_j(b_1..b_{n-1}) b_n) = τ(b_1 T_{c(j)}(b_2..b_n))` for all words of
/// length `≤ max_len` and all basis tuples. Applied to a cumulant family
/// this is the cumulant criterion for traciality; applied to a moment
/// family it is the moment criterion.
pub fn check_trace_condition(family: &MapFamily, tau: &TraceFunctional, max_len: usize) -> Result<CheckReport> {
    ensure_dim(family.dim, tau.dim())?;
    let d = family.dim;
    let max_len = max_len.min(family.max_order);
    let mut checked = 0;
    for n in 1..=max_len {
        for word in all_words(family.num_labels(), n) {
            let t = family.tensor(&word)?;
            let tc = family.tensor(&cyclic_shift(&word))?;
            for ks in basis_tuples(d, n) {
                checked += 1;
                let w = tau.weights();
                let lhs = t.entry(ks[n - 1], &ks[..n - 1]) * &w[ks[n - 1]];
                let rhs = tc.entry(ks[0], &ks[1..]) * &w[ks[0]];
                if lhs != rhs {
                    return Ok(CheckReport::from_first(
                        checked,
                        Some(Violation {
                            word,
                            tuple: ks,
                            lhs: AlgElem::new(vec![lhs]),
                            rhs: AlgElem::new(vec![rhs]),
                        }),
                    ));
                }
            }
        }
    }
    Ok(CheckReport::from_first(checked, None))
}

/// `T_j(b_1..b_{n-1})* = T_{s̃(j)}(b*_{n-1}..b*_1)` on basis tuples.
pub fn check_selfadjoint(family: &MapFamily, s: &[usize], max_len: usize) -> Result<CheckReport> {
    if s.len() != family.num_labels() || s.iter().enumerate().any(|(i, &x)| x >= s.len() || s[x] != i) {
        return Err(Error::InvalidModel(format!("{s:?} is not an involution of the labels")));
    }
    let d = family.dim;
    let max_len = max_len.min(family.max_order);
    let mut checked = 0;
    for n in 1..=max_len {
        for word in all_words(family.num_labels(), n) {
            let t = family.tensor(&word)?;
            let ts = family.tensor(&star_word(&word, s))?;
            for ks in basis_tuples(d, n - 1) {
                checked += 1;
                let rev: Vec<usize> = ks.iter().rev().copied().collect();
                let lhs = t.apply_basis(&ks).star();
                let rhs = ts.apply_basis(&rev);
                if lhs != rhs {
                    return Ok(CheckReport::from_first(
                        checked,
                        Some(Violation {
                            word,
                            tuple: ks,
                            lhs,
                            rhs,
                        }),
                    ));
                }
            }
        }
    }
    Ok(CheckReport::from_first(checked, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{s_i, si, sq, LinearMap};
    use crate::ncpart::enumerate_nc;

    fn nofreepolar_family(max_order: usize) -> MapFamily {
        let mut f = MapFamily::star_pair(2, FamilyKind::Cumulants, max_order, true).unwrap();
        let eta1 = LinearMap::from_rationals(&[&[(1, 2), (0, 1)], &[(1, 2), (1, 1)]]).unwrap();
        let eta2 = LinearMap::from_rationals(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]]).unwrap();
        f.insert(vec![0, 1], eta1.to_tensor()).unwrap();
        f.insert(vec![1, 0], eta2.to_tensor()).unwrap();
        f
    }

    #[test]
    fn full_block_is_plain_cumulant() {
        let f = nofreepolar_family(4);
        let b = AlgElem::from_rationals(&[(2, 1), (-1, 3)]);
        let v = eval_nested(&f, &[0, 1], &Partition::one(2), std::slice::from_ref(&b)).unwrap();
        assert_eq!(v, f.apply(&[0, 1], &[b]).unwrap());
    }

    #[test]
    fn two_singletons_factorize() {
        let mut f = MapFamily::new(2, vec!["x".into(), "y".into()], FamilyKind::Cumulants, 3, true).unwrap();
        let c0 = AlgElem::from_rationals(&[(1, 2), (3, 1)]);
        let c1 = AlgElem::from_rationals(&[(5, 1), (-2, 7)]);
        f.insert(vec![0], Tensor::constant(&c0)).unwrap();
        f.insert(vec![1], Tensor::constant(&c1)).unwrap();
        let b = AlgElem::from_rationals(&[(7, 1), (1, 9)]);
        let v = eval_nested(&f, &[0, 1], &Partition::zero(2), std::slice::from_ref(&b)).unwrap();
        assert_eq!(v, &(&c0 * &b) * &c1);
    }

    #[test]
    fn fourth_moment_of_nofreepolar() {
        let f = nofreepolar_family(4);
        let unit = AlgElem::unit(2);
        let m = moments_from_cumulants(&f, &[0, 1, 0, 1], &[unit.clone(), unit.clone(), unit]).unwrap();
        assert_eq!(m, AlgElem::from_rationals(&[(3, 4), (15, 4)]));
    }

    #[test]
    fn odd_moments_of_circular_vanish() {
        let f = nofreepolar_family(5);
        for word in all_words(2, 3) {
            let args = vec![AlgElem::unit(2); 2];
            assert!(moments_from_cumulants(&f, &word, &args).unwrap().is_zero());
        }
    }

    #[test]
    fn fast_moments_agree_with_literal_sum() {
        let f = nofreepolar_family(6);
        let m = moment_family(&f, 6).unwrap();
        for n in 1..=6 {
            for word in all_words(2, n) {
                for ks in basis_tuples(2, n - 1) {
                    let args: Vec<AlgElem> = ks.iter().map(|&k| AlgElem::basis(2, k)).collect();
                    let lit = moments_from_cumulants(&f, &word, &args).unwrap();
                    assert_eq!(m.get(&word).unwrap().unwrap().apply_basis(&ks), lit);
                }
            }
        }
    }

    #[test]
    fn second_order_cumulant_subtracts_product_of_means() {
        let mut m = MapFamily::new(2, vec!["x".into()], FamilyKind::Moments, 2, false).unwrap();
        let mean = AlgElem::from_rationals(&[(1, 2), (2, 1)]);
        m.insert(vec![0], Tensor::constant(&mean)).unwrap();
        let psi2 = LinearMap::from_rationals(&[&[(1, 1), (2, 1)], &[(3, 1), (4, 1)]]).unwrap();
        m.insert(vec![0, 0], psi2.to_tensor()).unwrap();
        let c = cumulants_from_moments(&m, 2).unwrap();
        for k in 0..2 {
            let b = AlgElem::basis(2, k);
            let expected = &psi2.apply(&b) - &(&(&mean * &b) * &mean);
            assert_eq!(c.apply(&[0, 0], &[b]).unwrap(), expected);
        }
    }

    #[test]
    fn centered_family_keeps_second_order() {
        let mut m = MapFamily::new(1, vec!["x".into()], FamilyKind::Moments, 2, false).unwrap();
        m.insert(vec![0], Tensor::constant(&AlgElem::zero(1))).unwrap();
        m.insert(vec![0, 0], Tensor::from_fn(1, 1, |_, _| sq(5, 3))).unwrap();
        let c = cumulants_from_moments(&m, 2).unwrap();
        assert_eq!(c.tensor(&[0, 0]).unwrap(), m.tensor(&[0, 0]).unwrap());
    }

    #[test]
    fn incomplete_moment_data_is_an_error() {
        let m = MapFamily::new(1, vec!["x".into()], FamilyKind::Moments, 2, false).unwrap();
        assert_eq!(cumulants_from_moments(&m, 2).unwrap_err(), Error::MissingWord(vec![0]));
    }

    #[test]
    fn trace_condition_on_nofreepolar() {
        let f = nofreepolar_family(6);
        let half = TraceFunctional::from_rationals(&[(1, 2), (1, 2)]).unwrap();
        assert!(check_trace_condition(&f, &half, 6).unwrap().holds);
        let skew = TraceFunctional::from_rationals(&[(1, 1), (0, 1)]).unwrap();
        let r = check_trace_condition(&f, &skew, 6).unwrap();
        assert!(!r.holds);
        let v = r.counterexample.unwrap();
        assert_eq!(v.word, vec![0, 1]);
        assert_eq!(v.tuple, vec![0, 1]);
    }

    #[test]
    fn selfadjoint_checks() {
        let f = nofreepolar_family(4);
        assert!(check_selfadjoint(&f, &[1, 0], 4).unwrap().holds);
        let mut g = f.clone();
        // Order-2 maps are their own partners under s̃, so only a non-real
        // entry can break the identity.
        let bad = LinearMap::new(vec![vec![sq(1, 2), s_i()], vec![si(0), si(1)]]).unwrap();
        g.insert(vec![1, 0], bad.to_tensor()).unwrap();
        let r = check_selfadjoint(&g, &[1, 0], 4).unwrap();
        assert!(!r.holds);
        let zero = MapFamily::star_pair(2, FamilyKind::Cumulants, 4, true).unwrap();
        assert!(check_selfadjoint(&zero, &[1, 0], 4).unwrap().holds);
        assert!(check_selfadjoint(&zero, &[1, 1], 4).is_err());
    }

    #[test]
    fn kind_and_order_errors() {
        let f = nofreepolar_family(4);
        let args = vec![AlgElem::unit(2); 4];
        assert!(matches!(
            eval_nested(&f, &[0, 1, 0, 1, 0], &Partition::one(5), &args),
            Err(Error::OrderExceeded { .. })
        ));
        assert!(eval_nested(&f, &[0, 1], &Partition::one(3), &args[..1]).is_err());
        let m = moment_family(&f, 4).unwrap();
        assert!(matches!(moment_family(&m, 2), Err(Error::KindMismatch { .. })));
        assert!(enumerate_nc(4).is_ok());
    }
}
