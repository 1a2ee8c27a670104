mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use opval_core::algebra::{AlgElem, TraceFunctional};
use opval_core::circular::{induced_cumulant_family, make_dt_discretized, make_nofreepolar};
use opval_core::cumulants::{
    check_selfadjoint, cumulants_from_moments, cyclic_shift, eval_nested, eval_nested_with, moment_family, star_word,
    FamilyKind,
};
use opval_core::ncpart::{catalan, enumerate_nc, reflect_partition, rotate_partition};
use opval_core::series::BSeries;
use opval_core::spectral::stieltjes::{curve_residual, stieltjes_g};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn moment_cumulant_roundtrip(seed in any::<u64>(), d in 1usize..=2, order in 1usize..=4) {
        let mut r = rng(seed);
        let c = random_family(&mut r, d, order, FamilyKind::Cumulants);
        let m = moment_family(&c, order).unwrap();
        let back = cumulants_from_moments(&m, order).unwrap();
        for (w, t) in c.stored() {
            prop_assert_eq!(&back.tensor(w).unwrap(), t);
        }
    }

    #[test]
    fn nested_evaluation_ignores_block_order(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let f = random_family(&mut r, 2, n, FamilyKind::Cumulants);
        let parts = enumerate_nc(n).unwrap();
        let pi = &parts[r.gen_range(0..parts.len())];
        let word: Vec<usize> = (0..n).map(|_| r.gen_range(0..2)).collect();
        let args: Vec<AlgElem> = (1..n).map(|_| random_elem(&mut r, 2)).collect();
        let first = eval_nested(&f, &word, pi, &args).unwrap();
        let mut pick = rng(seed ^ 0x5eed);
        let other = eval_nested_with(&f, &word, pi, &args, &mut |_, blocks| pick.gen_range(0..blocks.len())).unwrap();
        prop_assert_eq!(first, other);
    }

    #[test]
    fn reflection_of_nested_cumulants(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let f = random_selfadjoint_family(&mut r, 2, n);
        prop_assert!(check_selfadjoint(&f, &[1, 0], n).unwrap().holds);
        let parts = enumerate_nc(n).unwrap();
        let pi = &parts[r.gen_range(0..parts.len())];
        let word: Vec<usize> = (0..n).map(|_| r.gen_range(0..2)).collect();
        let args: Vec<AlgElem> = (1..n).map(|_| random_elem(&mut r, 2)).collect();
        let lhs = eval_nested(&f, &word, pi, &args).unwrap().star();
        let rev: Vec<AlgElem> = args.iter().rev().map(AlgElem::star).collect();
        let rhs = eval_nested(&f, &star_word(&word, &[1, 0]), &reflect_partition(pi), &rev).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn trace_lemma_for_tracial_circular_models(seed in any::<u64>(), n in 2usize..=6, dt in any::<bool>()) {
        let mut r = rng(seed);
        let (model, tau) = if dt {
            (make_dt_discretized(3).unwrap(), TraceFunctional::uniform(3))
        } else {
            (make_nofreepolar(), TraceFunctional::from_rationals(&[(1, 2), (1, 2)]).unwrap())
        };
        let d = model.dim();
        let f = induced_cumulant_family(&model, n).unwrap();
        let parts = enumerate_nc(n).unwrap();
        let pi = &parts[r.gen_range(0..parts.len())];
        let word: Vec<usize> = (0..n).map(|_| r.gen_range(0..2)).collect();
        let b: Vec<AlgElem> = (0..n).map(|_| random_elem(&mut r, d)).collect();
        let lhs = tau.apply(&(&eval_nested(&f, &word, pi, &b[..n - 1]).unwrap() * &b[n - 1]));
        let rhs = tau.apply(&(&b[0] * &eval_nested(&f, &cyclic_shift(&word), &rotate_partition(pi), &b[1..]).unwrap()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn series_ring_laws(seed in any::<u64>(), n in 0usize..=6) {
        let mut r = rng(seed);
        let mut s = || BSeries::new((0..=n).map(|_| random_elem(&mut r, 2)).collect()).unwrap();
        let (a, b, c) = (s(), s(), s());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.mul(&BSeries::one(2, n)).unwrap(), a.clone());
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn stieltjes_is_herglotz(x in -2.0f64..7.0, y in -6.0f64..2.0) {
        let w = Complex64::new(x, 10f64.powf(y));
        let g = stieltjes_g(w).unwrap();
        prop_assert!(g.im < 0.0, "{w} -> {g}");
        let (res, _) = curve_residual(g, w);
        prop_assert!(res < 1e-8 * (1.0 + g.norm()).powi(4), "{w}: residual {res}");
    }

    #[test]
    fn stieltjes_decays_like_inverse(x in -3.0f64..8.0, y in 2.0f64..5.0) {
        let w = Complex64::new(x, 10f64.powf(y));
        let g = stieltjes_g(w).unwrap();
        prop_assert!((w * g - 1.0).norm() < 10.0 / w.norm());
    }
}

#[test]
fn noncrossing_enumeration_structure() {
    for n in 1..=9 {
        let parts = enumerate_nc(n).unwrap();
        assert_eq!(parts.len() as u64, catalan(n).unwrap());
        for p in &parts {
            assert!(p.is_noncrossing());
            assert!(rotate_partition(p).is_noncrossing());
            assert_eq!(reflect_partition(&reflect_partition(p)), *p);
            let mut q = p.clone();
            for _ in 0..n {
                q = rotate_partition(&q);
            }
            assert_eq!(q, *p);
        }
    }
}

#[test]
fn circular_odd_moments_vanish() {
    let f = moment_family(&induced_cumulant_family(&make_nofreepolar(), 5).unwrap(), 5).unwrap();
    for n in [1, 3, 5] {
        for w in opval_core::cumulants::all_words(2, n) {
            assert!(f.tensor(&w).unwrap().is_zero(), "{w:?}");
        }
    }
}
