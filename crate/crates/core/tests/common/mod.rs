#![allow(dead_code)]

use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use opval_core::algebra::{rat, AlgElem, Scalar};
use opval_core::cumulants::{all_words, star_word, FamilyKind, MapFamily};
use opval_core::rdiag::RDiagModel;
use opval_core::tensor::{basis_tuples, Tensor};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small rational with numerator in `-3..=3` and denominator in `1..=4`.
pub fn small_rat(r: &mut ChaCha8Rng) -> num_rational::BigRational {
    rat(r.gen_range(-3..=3), r.gen_range(1..=4))
}

/// Real part always, imaginary part with probability 1/3.
pub fn small_scalar(r: &mut ChaCha8Rng) -> Scalar {
    let im = if r.gen_ratio(1, 3) { small_rat(r) } else { rat(0, 1) };
    Complex::new(small_rat(r), im)
}

pub fn random_elem(r: &mut ChaCha8Rng, d: usize) -> AlgElem {
    AlgElem::new((0..d).map(|_| small_scalar(r)).collect())
}

pub fn random_tensor(r: &mut ChaCha8Rng, d: usize, arity: usize) -> Tensor {
    Tensor::from_fn(d, arity, |_, _| small_scalar(r))
}

/// Dense family over `{a, a*}` with every word up to `max_order` filled.
pub fn random_family(r: &mut ChaCha8Rng, d: usize, max_order: usize, kind: FamilyKind) -> MapFamily {
    let mut f = MapFamily::star_pair(d, kind, max_order, false).unwrap();
    for n in 1..=max_order {
        for w in all_words(2, n) {
            f.insert(w, random_tensor(r, d, n - 1)).unwrap();
        }
    }
    f
}

/// `T^†(ks) = conj(T(reversed ks))`, so that basis arguments, being
/// self-adjoint, satisfy `T(b)* = T^†(b* reversed)`.
fn dagger(t: &Tensor) -> Tensor {
    Tensor::from_fn(t.dim(), t.arity(), |out, ks| {
        let rev: Vec<usize> = ks.iter().rev().copied().collect();
        t.entry(out, &rev).conj()
    })
}

/// Random family with `T_j(b)* = T_{s̃(j)}(b* reversed)` for the swap `s`.
pub fn random_selfadjoint_family(r: &mut ChaCha8Rng, d: usize, max_order: usize) -> MapFamily {
    let mut f = MapFamily::star_pair(d, FamilyKind::Cumulants, max_order, false).unwrap();
    for n in 1..=max_order {
        for w in all_words(2, n) {
            let sw = star_word(&w, &[1, 0]);
            if sw < w {
                continue;
            }
            let t = random_tensor(r, d, n - 1);
            if sw == w {
                let half = Complex::new(rat(1, 2), rat(0, 1));
                f.insert(w, t.add(&dagger(&t)).unwrap().scale(&half)).unwrap();
            } else {
                f.insert(sw, dagger(&t)).unwrap();
                f.insert(w, t).unwrap();
            }
        }
    }
    f
}

/// Alternating cumulants of every arity `1, 3, …, 2K-1`, all nonzero.
pub fn random_rdiag_model(r: &mut ChaCha8Rng, d: usize, max_k: usize) -> RDiagModel {
    let side = |r: &mut ChaCha8Rng| (1..=max_k).map(|k| Some(random_tensor(r, d, 2 * k - 1))).collect();
    let b1 = side(r);
    let b2 = side(r);
    RDiagModel::new(d, b1, b2).unwrap()
}

pub fn basis_args(d: usize, ks: &[usize]) -> Vec<AlgElem> {
    ks.iter().map(|&k| AlgElem::basis(d, k)).collect()
}

pub fn all_basis_args(d: usize, n: usize) -> Vec<Vec<AlgElem>> {
    basis_tuples(d, n).iter().map(|ks| basis_args(d, ks)).collect()
}
