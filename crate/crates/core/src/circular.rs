//! B-valued circular elements: the two covariance maps `η1 = α_(1,2)` and
//! `η2 = α_(2,1)`, their alternating moments, the real/imaginary-part
//! covariance, and the two worked models.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::algebra::{
    check_positive_map, s_i, sq, AlgElem, Automorphism, LinearMap, Scalar, TraceFunctional,
};
use crate::cumulants::{CheckReport, FamilyKind, MapFamily, Violation};
use crate::error::{ensure_dim, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircularModel {
    eta1: LinearMap,
    eta2: LinearMap,
}

/// Which letter an alternating word starts with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Start {
    /// `a b_1 a* b_2 a …`
    A,
    /// `a* b_1 a b_2 a* …`
    AStar,
}

impl Start {
    fn other(self) -> Self {
        match self {
            Start::A => Start::AStar,
            Start::AStar => Start::A,
        }
    }
}

impl CircularModel {
    pub fn new(eta1: LinearMap, eta2: LinearMap) -> Result<Self> {
        ensure_dim(eta1.dim(), eta2.dim())?;
        Ok(Self { eta1, eta2 })
    }

    pub fn dim(&self) -> usize {
        self.eta1.dim()
    }

    /// `α_(1,2)`, so `E(a b a*) = η1(b)`.
    pub fn eta1(&self) -> &LinearMap {
        &self.eta1
    }

    /// `α_(2,1)`, so `E(a* b a) = η2(b)`.
    pub fn eta2(&self) -> &LinearMap {
        &self.eta2
    }

    pub fn eta(&self, start: Start) -> &LinearMap {
        match start {
            Start::A => &self.eta1,
            Start::AStar => &self.eta2,
        }
    }

    /// Both covariance maps are completely positive.
    pub fn is_positive(&self) -> bool {
        check_positive_map(&self.eta1) && check_positive_map(&self.eta2)
    }
}

/// The two-dimensional model with `η1(λ1, λ2) = (λ1/2, λ1/2 + λ2)` and
/// `η2(λ1, λ2) = ((λ1+λ2)/2, λ2)`.
pub fn make_nofreepolar() -> CircularModel {
    let eta1 = LinearMap::from_rationals(&[&[(1, 2), (0, 1)], &[(1, 2), (1, 1)]]).expect("square");
    let eta2 = LinearMap::from_rationals(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]]).expect("square");
    CircularModel { eta1, eta2 }
}

/// Midpoint discretization of `η1(f)(x) = ∫_x^1 f`, `η2(f)(x) = ∫_0^x f` on
/// `d` cells. `η2` is the flip-conjugate of `η1`, so the twist identity holds
/// exactly.
pub fn make_dt_discretized(d: usize) -> Result<CircularModel> {
    if d == 0 {
        return Err(Error::OutOfRange {
            what: "discretization size d",
            value: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    let n = d as i64;
    let eta1 = LinearMap::from_fn(d, |i, j| match j.cmp(&i) {
        std::cmp::Ordering::Greater => sq(1, n),
        std::cmp::Ordering::Equal => sq(1, 2 * n),
        std::cmp::Ordering::Less => Scalar::zero(),
    });
    let eta2 = eta1.conjugate_by(&Automorphism::flip(d));
    Ok(CircularModel { eta1, eta2 })
}

/// Scalar circular element with `E(aa*) = E(a*a) = c`.
pub fn make_scalar_circular(c: Scalar) -> CircularModel {
    let m = LinearMap::new(vec![vec![c]]).expect("1x1");
    CircularModel {
        eta1: m.clone(),
        eta2: m,
    }
}

/// Alternating moment `m_n(b_1..b_{2n})`: `E(a b_1 a* b_2 … a b_{2n-1} a* b_{2n})`
/// for [`Start::A`], with roles of `a`, `a*` swapped for [`Start::AStar`].
///
/// Only pair blocks survive, so
/// `m_n^{(1)}(b) = Σ_{k1+k2=n-1} η1(b_1 m^{(2)}_{k1}(b_2..b_{2k1+1})) b_{2k1+2} m^{(1)}_{k2}(…)`.
pub fn alternating_moment(model: &CircularModel, start: Start, args: &[AlgElem]) -> Result<AlgElem> {
    if args.len() % 2 == 1 {
        return Err(Error::ArityMismatch {
            expected: args.len() + 1,
            found: args.len(),
        });
    }
    for a in args {
        ensure_dim(model.dim(), a.dim())?;
    }
    let mut memo = HashMap::new();
    Ok(moment_rec(model, start, args, 0, args.len(), &mut memo))
}

fn moment_rec(
    model: &CircularModel,
    start: Start,
    args: &[AlgElem],
    lo: usize,
    hi: usize,
    memo: &mut HashMap<(Start, usize, usize), AlgElem>,
) -> AlgElem {
    if lo == hi {
        return AlgElem::unit(model.dim());
    }
    if let Some(v) = memo.get(&(start, lo, hi)) {
        return v.clone();
    }
    let n = (hi - lo) / 2;
    let mut acc = AlgElem::zero(model.dim());
    for k1 in 0..n {
        let inner = moment_rec(model, start.other(), args, lo + 1, lo + 1 + 2 * k1, memo);
        let paired = model.eta(start).apply(&(&args[lo] * &inner));
        if paired.is_zero() {
            continue;
        }
        let mid = lo + 2 * k1 + 1;
        let rest = moment_rec(model, start, args, mid + 1, hi, memo);
        acc = &acc + &(&(&paired * &args[mid]) * &rest);
    }
    memo.insert((start, lo, hi), acc.clone());
    acc
}

/// Cumulants of `(x1, x2) = (Re a, Im a)` and the positivity verdict for the
/// covariance `η : B → M_2(B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemicircularCovariance {
    /// `γ_(p,q)` for `p, q ∈ {1, 2}`, indexed `[p-1][q-1]`.
    pub gamma: [[LinearMap; 2]; 2],
    pub completely_positive: bool,
    /// First `(output l, input k)` whose 2×2 block is not positive semidefinite.
    pub first_failure: Option<(usize, usize)>,
}

pub fn semicircular_covariance(model: &CircularModel) -> SemicircularCovariance {
    let quarter = sq(1, 4);
    let sum = model.eta1.add(&model.eta2).scale(&quarter);
    let diff = model.eta1.sub(&model.eta2).scale(&(&quarter * &s_i()));
    let neg_diff = diff.scale(&-Scalar::one());
    let gamma = [[sum.clone(), diff], [neg_diff, sum]];
    let d = model.dim();
    let mut first_failure = None;
    'outer: for l in 0..d {
        for k in 0..d {
            let h = [
                [gamma[0][0].entry(l, k), gamma[0][1].entry(l, k)],
                [gamma[1][0].entry(l, k), gamma[1][1].entry(l, k)],
            ];
            if !is_psd_2x2(&h) {
                first_failure = Some((l, k));
                break 'outer;
            }
        }
    }
    SemicircularCovariance {
        gamma,
        completely_positive: first_failure.is_none(),
        first_failure,
    }
}

fn is_psd_2x2(h: &[[&Scalar; 2]; 2]) -> bool {
    let hermitian = h[0][0].im.is_zero() && h[1][1].im.is_zero() && *h[0][1] == h[1][0].conj();
    if !hermitian {
        return false;
    }
    let det = (h[0][0] * h[1][1] - h[0][1] * h[1][0]).re;
    !h[0][0].re.is_negative() && !h[1][1].re.is_negative() && !det.is_negative()
}

/// Recovers the `a, a*` covariances from the `x1, x2` ones through
/// `a = x1 + i x2`, `a* = x1 − i x2`; indexed `[p-1][p'-1]`.
pub fn star_cumulants_from_covariance(gamma: &[[LinearMap; 2]; 2]) -> [[LinearMap; 2]; 2] {
    let d = gamma[0][0].dim();
    let c = [[Scalar::one(), s_i()], [Scalar::one(), -s_i()]];
    let entry = |p: usize, pp: usize| {
        let mut acc = LinearMap::zero(d);
        for (q, cq) in c[p].iter().enumerate() {
            for (qq, cqq) in c[pp].iter().enumerate() {
                acc = acc.add(&gamma[q][qq].scale(&(cq * cqq)));
            }
        }
        acc
    };
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

/// `τ(η1(b_1) b_2) = τ(b_1 η2(b_2))` on all basis pairs.
pub fn check_circular_trace(model: &CircularModel, tau: &TraceFunctional) -> Result<CheckReport> {
    ensure_dim(model.dim(), tau.dim())?;
    let d = model.dim();
    let w = tau.weights();
    let mut checked = 0;
    for k1 in 0..d {
        for k2 in 0..d {
            checked += 1;
            let lhs = model.eta1.entry(k2, k1) * &w[k2];
            let rhs = model.eta2.entry(k1, k2) * &w[k1];
            if lhs != rhs {
                return Ok(CheckReport {
                    holds: false,
                    checked,
                    counterexample: Some(Violation {
                        word: vec![0, 1],
                        tuple: vec![k1, k2],
                        lhs: AlgElem::new(vec![lhs]),
                        rhs: AlgElem::new(vec![rhs]),
                    }),
                });
            }
        }
    }
    Ok(CheckReport {
        holds: true,
        checked,
        counterexample: None,
    })
}

/// Sparse cumulant family over `a, a*` with only `α_(1,2)`, `α_(2,1)` set.
pub fn induced_cumulant_family(model: &CircularModel, max_order: usize) -> Result<MapFamily> {
    if max_order < 2 {
        return Err(Error::OutOfRange {
            what: "maximal order",
            value: max_order,
            min: 2,
            max: usize::MAX,
        });
    }
    let mut f = MapFamily::star_pair(model.dim(), FamilyKind::Cumulants, max_order, true)?;
    f.insert(vec![0, 1], model.eta1.to_tensor())?;
    f.insert(vec![1, 0], model.eta2.to_tensor())?;
    Ok(f)
}

/// `τ(E((aa*)^n))` for the uniform trace.
pub fn traced_power_moment(model: &CircularModel, n: usize) -> Scalar {
    let d = model.dim();
    let args = vec![AlgElem::unit(d); 2 * n];
    let m = alternating_moment(model, Start::A, &args).expect("even argument count");
    TraceFunctional::uniform(d).apply(&m)
}
