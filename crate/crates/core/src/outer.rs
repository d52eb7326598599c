//! Cut-set outer bounds on the two-way rate region.
//!
//! Two cuts per direction (`{a}` and `{a, r}` for `Ra`, `{b}` and `{b, r}` for
//! `Rb`), time-averaged over the six network states, give four linear
//! constraints on `(Ra, Rb)` with the state fractions as variables:
//!
//! ```text
//! Ra <= l1 C(g1+g3) + l3 C(g1) + l5 C(g3)
//! Ra <= l1 C(g3)    + l4 C(g2) + l5 C((sqrt g2 + sqrt g3)^2)
//! Rb <= l2 C(g2+g3) + l3 C(g2) + l6 C(g3)
//! Rb <= l2 C(g3)    + l4 C(g1) + l6 C((sqrt g1 + sqrt g3)^2)
//! sum(l) <= 1
//! ```
//!
//! The region is swept either ray by ray (maximize `Rb` with `Ra = k Rb`) or
//! by weighted sums (maximize `wa Ra + wb Rb`); both describe the same set.
//! Closed-form bounds come from explicit feasible points of the LP dual.

use serde::Serialize;

use crate::channel::{c, Capacities, ChannelGains, Rate};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpSolution, LpStatus, Relation};
use crate::ray::Ray;

/// Time fractions below this are not counted as active states.
pub const ACTIVE_THRESHOLD: f64 = 1e-7;

/// Fractions `l1..l6` of channel uses spent in each network state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TimeShares([f64; 6]);

impl TimeShares {
    pub fn new(lambda: [f64; 6]) -> Result<Self> {
        if lambda.iter().any(|l| !l.is_finite() || *l < -1e-12 || *l > 1.0 + 1e-9) {
            return Err(Error::Validation(format!("time shares out of [0, 1]: {lambda:?}")));
        }
        let total: f64 = lambda.iter().sum();
        if total > 1.0 + 1e-9 {
            return Err(Error::Validation(format!("time shares sum to {total} > 1")));
        }
        Ok(TimeShares(lambda.map(|l| l.max(0.0))))
    }

    /// Build from LP output, clamping round-off below zero.
    pub(crate) fn from_lp(values: &[f64]) -> Self {
        let mut l = [0.0; 6];
        for (dst, v) in l.iter_mut().zip(values) {
            *dst = v.clamp(0.0, 1.0);
        }
        TimeShares(l)
    }

    pub fn lambda(&self) -> &[f64; 6] {
        &self.0
    }

    /// Fraction for state `state` (1-based).
    pub fn get(&self, state: usize) -> f64 {
        self.0[state - 1]
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// 1-based states with a fraction above [`ACTIVE_THRESHOLD`].
    pub fn active_states(&self) -> Vec<u8> {
        (1..=6u8).filter(|&i| self.0[i as usize - 1] > ACTIVE_THRESHOLD).collect()
    }

    /// Relabel states for a swap of nodes a and b (1<->2, 5<->6).
    pub fn mirrored(&self) -> Self {
        let l = self.0;
        TimeShares([l[1], l[0], l[2], l[3], l[5], l[4]])
    }
}

/// A dual vector `(y1, .., y5)` for the ratio LP.
///
/// `y1..y4` weight the four cut constraints, `y5` the time-share budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualPoint {
    pub y: [f64; 5],
}

impl DualPoint {
    /// Slacks of the seven dual constraints at ray ratio `k`: one per state,
    /// then the normalization row `k y1 + k y2 + y3 + y4 >= 1`.
    pub fn slacks(&self, k: f64, gains: &ChannelGains) -> [f64; 7] {
        let cp = gains.capacities();
        let [y1, y2, y3, y4, y5] = self.y;
        let per_state = state_dual_terms(&self.y, &cp);
        [
            y5 - per_state[0],
            y5 - per_state[1],
            y5 - per_state[2],
            y5 - per_state[3],
            y5 - per_state[4],
            y5 - per_state[5],
            k * y1 + k * y2 + y3 + y4 - 1.0,
        ]
    }

    /// The dual objective, an upper bound on `Rb` whenever the point is feasible.
    pub fn value(&self) -> f64 {
        self.y[4]
    }
}

/// Right-hand sides of the six state rows of the dual: the cut capacity each
/// state earns under multipliers `y1..y4`.
fn state_dual_terms(y: &[f64; 5], cp: &Capacities) -> [f64; 6] {
    let [y1, y2, y3, y4, _] = *y;
    [
        y1 * cp.c13 + y2 * cp.c3,
        y3 * cp.c23 + y4 * cp.c3,
        y1 * cp.c1 + y3 * cp.c2,
        y2 * cp.c2 + y4 * cp.c1,
        y1 * cp.c3 + y2 * cp.coh2,
        y3 * cp.c3 + y4 * cp.coh1,
    ]
}

/// Optimum of the outer-bound LP along one ray.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OuterPoint {
    pub ray: Ray,
    pub ra: Rate,
    pub rb: Rate,
    pub shares: TimeShares,
    pub active_states: Vec<u8>,
    /// Optimal LP multipliers; by strong duality `certificate.value()` equals the ray scale.
    pub certificate: DualPoint,
}

impl OuterPoint {
    pub fn k(&self) -> f64 {
        self.ray.k()
    }
}

/// Column layout of the ray LP: `[t, l1..l6]`.
const T: usize = 0;
const L: usize = 1;

/// The ratio LP: maximize the ray scale `t` with `(Ra, Rb) = t * ray.direction()`.
///
/// For a finite ratio `k` the scale is `Rb` and the program is exactly the
/// four-cut LP with `Ra = k Rb`.
pub fn ratio_lp(ray: Ray, gains: &ChannelGains) -> LinearProgram {
    let cp = gains.capacities();
    let (da, db) = ray.direction();
    let mut lp = LinearProgram::maximize(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let l = |i: usize| L + i - 1;
    lp.add_sparse(&[(T, da), (l(1), -cp.c13), (l(3), -cp.c1), (l(5), -cp.c3)], Relation::Le, 0.0)
        .add_sparse(&[(T, da), (l(1), -cp.c3), (l(4), -cp.c2), (l(5), -cp.coh2)], Relation::Le, 0.0)
        .add_sparse(&[(T, db), (l(2), -cp.c23), (l(3), -cp.c2), (l(6), -cp.c3)], Relation::Le, 0.0)
        .add_sparse(&[(T, db), (l(2), -cp.c3), (l(4), -cp.c1), (l(6), -cp.coh1)], Relation::Le, 0.0)
        .add_sparse(&(1..=6).map(|i| (l(i), 1.0)).collect::<Vec<_>>(), Relation::Le, 1.0);
    lp
}

pub(crate) fn solve_expect_optimal(lp: &LinearProgram, context: impl Fn() -> String) -> Result<LpSolution> {
    let sol = solve_lp(lp).map_err(|e| Error::solver(context(), e))?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::UnexpectedStatus { context: context(), status: sol.status.to_string() });
    }
    Ok(sol)
}

/// Largest `Rb` compatible with the cut-set bound on the ray `Ra = k Rb`.
///
/// Accepts a plain `f64` ratio or a [`Ray`]; on [`Ray::RaAxis`] the bound on
/// `Ra` with `Rb = 0` is returned instead.
pub fn outer_ratio_bound(ray: impl Into<Ray>, gains: &ChannelGains) -> Result<OuterPoint> {
    let ray = ray.into();
    if let Ray::Ratio(k) = ray {
        Ray::ratio(k)?;
    }
    let lp = ratio_lp(ray, gains);
    let sol = solve_expect_optimal(&lp, || format!("outer bound at k = {}", ray.k()))?;
    let t = sol.x[T].max(0.0);
    let (da, db) = ray.direction();
    let shares = TimeShares::from_lp(&sol.x[L..]);
    let y = &sol.duals;
    Ok(OuterPoint {
        ray,
        ra: da * t,
        rb: db * t,
        active_states: shares.active_states(),
        shares,
        certificate: DualPoint { y: [y[0], y[1], y[2], y[3], y[4]] },
    })
}

/// Optimum of the weighted-sum LP.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedPoint {
    pub value: Rate,
    pub ra: Rate,
    pub rb: Rate,
    pub shares: TimeShares,
}

/// The weighted-sum LP over `[Ra, Rb, l1..l6]`: maximize `wa Ra + wb Rb`.
pub fn weighted_lp(wa: f64, wb: f64, gains: &ChannelGains) -> LinearProgram {
    let cp = gains.capacities();
    let mut lp = LinearProgram::maximize(vec![wa, wb, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let l = |i: usize| 1 + i;
    lp.add_sparse(&[(0, 1.0), (l(1), -cp.c13), (l(3), -cp.c1), (l(5), -cp.c3)], Relation::Le, 0.0)
        .add_sparse(&[(0, 1.0), (l(1), -cp.c3), (l(4), -cp.c2), (l(5), -cp.coh2)], Relation::Le, 0.0)
        .add_sparse(&[(1, 1.0), (l(2), -cp.c23), (l(3), -cp.c2), (l(6), -cp.c3)], Relation::Le, 0.0)
        .add_sparse(&[(1, 1.0), (l(2), -cp.c3), (l(4), -cp.c1), (l(6), -cp.coh1)], Relation::Le, 0.0)
        .add_sparse(&(1..=6).map(|i| (l(i), 1.0)).collect::<Vec<_>>(), Relation::Le, 1.0);
    lp
}

/// Largest `wa Ra + wb Rb` over the cut-set region.
///
/// `(1, k)` gives the `Ra + k Rb` formulation, `(k, 1)` the `k Ra + Rb` one.
pub fn outer_weighted_bound(wa: f64, wb: f64, gains: &ChannelGains) -> Result<WeightedPoint> {
    if !(wa.is_finite() && wb.is_finite()) || wa < 0.0 || wb < 0.0 {
        return Err(Error::Parameter(format!("weights must be finite and >= 0, got ({wa}, {wb})")));
    }
    if wa == 0.0 && wb == 0.0 {
        return Err(Error::Parameter("weights (0, 0) define no objective".into()));
    }
    let lp = weighted_lp(wa, wb, gains);
    let sol = solve_expect_optimal(&lp, || format!("weighted outer bound at ({wa}, {wb})"))?;
    Ok(WeightedPoint {
        value: sol.objective,
        ra: sol.x[0].max(0.0),
        rb: sol.x[1].max(0.0),
        shares: TimeShares::from_lp(&sol.x[2..]),
    })
}

/// The four terms `T1..T4` of the closed-form `Rb` bound for ray ratio `k >= 1`.
///
/// Each term is one state row of the dual evaluated at the explicit dual point
/// of [`rb_dual_point`]; the fifth state row (`y3 C(g2+g3) + y4 C(g3)`) never
/// exceeds `T4` for ordered gains and is omitted, matching the published bound.
pub fn rb_bound_terms(k: f64, gains: &ChannelGains) -> [f64; 4] {
    let cp = gains.capacities();
    let s = cp.c1 + cp.c2;
    if s <= 0.0 {
        return [0.0; 4];
    }
    let a = (2.0 * k - 1.0) / (2.0 * k * k);
    let b = 1.0 / (2.0 * k);
    [
        (3.0 * k - 1.0) / (2.0 * k * k) * cp.c1 * cp.c2 / s,
        a * (cp.c2 * cp.c13 + cp.c1 * cp.c3) / s,
        a * (cp.c2 * cp.c3 + cp.c1 * cp.coh2) / s,
        b * (cp.c1 * cp.c3 + cp.c2 * cp.coh1) / s,
    ]
}

/// The explicit dual-feasible point behind [`analytic_rb_bound`], for `k >= 1`.
///
/// `y5` is the maximum over all six state rows, so the point is feasible by
/// construction whenever `y1..y4 >= 0` and the normalization row holds.
pub fn rb_dual_point(k: f64, gains: &ChannelGains) -> DualPoint {
    let cp = gains.capacities();
    let s = cp.c1 + cp.c2;
    let (f1, f2) = if s > 0.0 { (cp.c1 / s, cp.c2 / s) } else { (0.5, 0.5) };
    let a = (2.0 * k - 1.0) / (2.0 * k * k);
    let b = 1.0 / (2.0 * k);
    let mut y = [a * f2, a * f1, b * f1, b * f2, 0.0];
    y[4] = state_dual_terms(&y, &cp).into_iter().fold(f64::NEG_INFINITY, f64::max);
    DualPoint { y }
}

/// Closed-form upper bound on `Rb` along the ray `Ra = k Rb`, `k > 0`.
///
/// For `k >= 1` this is `max(T1..T4)`; for `k < 1` the roles of a and b are
/// exchanged and the bound is evaluated at `1/k` on the mirrored channel.
pub fn analytic_rb_bound(k: f64, gains: &ChannelGains) -> Result<Rate> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::Parameter(format!("analytic bound needs a finite k > 0, got {k}")));
    }
    if k >= 1.0 {
        let t = rb_bound_terms(k, gains);
        if k == 1.0 {
            debug_assert!(t[1] <= t[3] + 1e-12, "T2 > T4 at k = 1: {t:?}");
        }
        Ok(t.into_iter().fold(0.0, f64::max))
    } else {
        let kp = 1.0 / k;
        let t = rb_bound_terms(kp, &gains.mirrored());
        Ok(kp * t.into_iter().fold(0.0, f64::max))
    }
}

/// Substitute the explicit dual point for ratio `k >= 1` into all seven dual
/// constraints. Returns whether all hold (within 1e-12) and the smallest slack.
pub fn dual_point_feasible(k: f64, gains: &ChannelGains) -> Result<(bool, f64)> {
    if !k.is_finite() || k < 1.0 {
        return Err(Error::Parameter(format!("dual point is defined for k >= 1, got {k}")));
    }
    let point = rb_dual_point(k, gains);
    let min_slack = point.slacks(k, gains).into_iter().fold(f64::INFINITY, f64::min);
    let nonneg = point.y[..4].iter().all(|v| *v >= 0.0);
    Ok((nonneg && min_slack >= -1e-12, min_slack))
}

/// Upper bound on `Rb` for one-way relaying from b to a (`Ra = 0`).
///
/// Equals the optimum of the ratio LP at `k = 0`; with no direct link it
/// reduces to the two-hop capacity `C1 C2 / (C1 + C2)`.
pub fn one_way_bound(gains: &ChannelGains) -> Rate {
    let cp = gains.capacities();
    one_way_formula(cp.c23, cp.coh1, cp.c3)
}

/// Upper bound on `Ra` for one-way relaying from a to b (`Rb = 0`).
pub fn one_way_bound_ra(gains: &ChannelGains) -> Rate {
    let cp = gains.capacities();
    one_way_formula(cp.c13, cp.coh2, cp.c3)
}

fn one_way_formula(broadcast: f64, coherent: f64, direct: f64) -> f64 {
    let den = broadcast + coherent - 2.0 * direct;
    if den <= 0.0 {
        return 0.0;
    }
    (broadcast * coherent - direct * direct) / den
}

/// The explicit dual point behind [`analytic_weighted_bound`]: multipliers
/// for the weighted LP `max k Ra + Rb`, with `y1 + y2 = k` and `y3 + y4 = 1`.
pub fn weighted_dual_point(k: f64, gains: &ChannelGains) -> DualPoint {
    let cp = gains.capacities();
    let d1 = cp.c13 + cp.coh2 - 2.0 * cp.c3;
    let d2 = cp.c23 + cp.coh1 - 2.0 * cp.c3;
    let (y1, y2) = if d1 > 0.0 { (k * (cp.coh2 - cp.c3) / d1, k * (cp.c13 - cp.c3) / d1) } else { (k * 0.5, k * 0.5) };
    let (y3, y4) = if d2 > 0.0 { ((cp.coh1 - cp.c3) / d2, (cp.c23 - cp.c3) / d2) } else { (0.5, 0.5) };
    let mut y = [y1, y2, y3, y4, 0.0];
    y[4] = state_dual_terms(&y, &cp).into_iter().fold(f64::NEG_INFINITY, f64::max);
    DualPoint { y }
}

/// The four terms of the closed-form weighted-sum bound on `k Ra + Rb`.
///
/// `T1`/`T2` are `k` times the one-way `Ra` bound and the one-way `Rb` bound.
/// `T3` and `T4` are the dual objective's state-3 and state-4 rows at
/// [`weighted_dual_point`]; each is a sum of an `Ra`-side and an `Rb`-side
/// fraction whose numerators carry the factor `C(g1)` or `C(g2)` on both terms.
pub fn weighted_bound_terms(k: f64, gains: &ChannelGains) -> [f64; 4] {
    let cp = gains.capacities();
    let d1 = cp.c13 + cp.coh2 - 2.0 * cp.c3;
    let d2 = cp.c23 + cp.coh1 - 2.0 * cp.c3;
    let frac = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    [
        k * frac(cp.c13 * cp.coh2 - cp.c3 * cp.c3, d1),
        frac(cp.c23 * cp.coh1 - cp.c3 * cp.c3, d2),
        k * frac(cp.c1 * (cp.coh2 - cp.c3), d1) + frac(cp.c2 * (cp.coh1 - cp.c3), d2),
        k * frac(cp.c2 * (cp.c13 - cp.c3), d1) + frac(cp.c1 * (cp.c23 - cp.c3), d2),
    ]
}

/// Closed-form upper bound on `k Ra + Rb`, `k >= 0`.
pub fn analytic_weighted_bound(k: f64, gains: &ChannelGains) -> Result<Rate> {
    if !k.is_finite() || k < 0.0 {
        return Err(Error::Parameter(format!("weight must be finite and >= 0, got {k}")));
    }
    Ok(weighted_bound_terms(k, gains).into_iter().fold(0.0, f64::max))
}

/// Direct-link thresholds below which the symmetric-rate outer bound does not
/// depend on the direct link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    /// Root of `f(x) = 2 C(g)` when `g1 = g2 = g`.
    pub gamma30: Option<f64>,
    /// Root of `f1(x) = 2 C(g1) C(g2)`.
    pub gamma31: Option<f64>,
    /// Root of `f2(x) = 2 C(g1) C(g2)`.
    pub gamma32: Option<f64>,
}

impl Thresholds {
    /// `gamma30` in the symmetric case, otherwise `min(gamma31, gamma32)`.
    pub fn operative(&self) -> Option<f64> {
        self.gamma30.or(match (self.gamma31, self.gamma32) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        })
    }
}

/// `f(x) = C(x) + C((sqrt g + sqrt x)^2)`.
pub fn symmetric_threshold_fn(gamma: f64, x: f64) -> f64 {
    c(x) + c((gamma.sqrt() + x.sqrt()).powi(2))
}

/// `f1(x) = C(g2) C(x) + C(g1) C((sqrt g2 + sqrt x)^2)`.
pub fn threshold_f1(g1: f64, g2: f64, x: f64) -> f64 {
    c(g2) * c(x) + c(g1) * c((g2.sqrt() + x.sqrt()).powi(2))
}

/// `f2(x) = C(g1) C(x) + C(g2) C((sqrt g1 + sqrt x)^2)`.
pub fn threshold_f2(g1: f64, g2: f64, x: f64) -> f64 {
    c(g1) * c(x) + c(g2) * c((g1.sqrt() + x.sqrt()).powi(2))
}

/// Relative bracket width at which the threshold bisection stops.
pub const THRESHOLD_REL_TOL: f64 = 1e-12;

/// Solve `f(x) = target` for increasing `f` on `x >= 0`.
///
/// The bracket starts at `[0, hi]` and doubles until it contains the root.
/// A target at or below `f(0)` yields 0.
fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, hi: f64) -> Option<f64> {
    if f(0.0) >= target {
        return Some(0.0);
    }
    let mut lo = 0.0;
    let mut hi = hi.max(1e-12);
    let mut doublings = 0;
    while f(hi) < target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 2000 || !hi.is_finite() {
            return None;
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= THRESHOLD_REL_TOL * hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Direct-link SNR thresholds for the gains' relay links; `gamma3` is ignored.
pub fn capacity_thresholds(gains: &ChannelGains) -> Result<Thresholds> {
    let (g1, g2) = (gains.gamma1(), gains.gamma2());
    if g1 <= 0.0 || g2 <= 0.0 {
        return Err(Error::Parameter(format!(
            "thresholds need positive relay links, got gamma1 = {g1}, gamma2 = {g2}"
        )));
    }
    let hi = g1.max(g2);
    let target = 2.0 * c(g1) * c(g2);
    let gamma31 = bisect_increasing(|x| threshold_f1(g1, g2, x), target, hi);
    let gamma32 = bisect_increasing(|x| threshold_f2(g1, g2, x), target, hi);
    let gamma30 = if g1 == g2 { bisect_increasing(|x| symmetric_threshold_fn(g1, x), 2.0 * c(g1), hi) } else { None };
    Ok(Thresholds { gamma30, gamma31, gamma32 })
}
