//! Achievable rate regions of decode-and-forward style protocols.
//!
//! Each protocol is a linear program over the state fractions (and, for the
//! 6-state DF protocol, per-state flow rates) evaluated along a ray of the
//! rate plane. `min{}` terms become pairs of `<=` rows.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::channel::{c, ChannelGains, Rate};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation};
use crate::outer::{solve_expect_optimal, OuterPoint, TimeShares};
use crate::ray::Ray;

/// Default number of grid points per power-split axis.
pub const DEFAULT_ALPHA_GRID: usize = 33;

/// Points per axis of the local grid searched around the best coarse split.
pub const ALPHA_REFINE_POINTS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    A,
    B,
    R,
}

fn mirror_state(state: u8) -> u8 {
    match state {
        1 => 2,
        2 => 1,
        5 => 6,
        6 => 5,
        s => s,
    }
}

impl Node {
    pub fn mirrored(self) -> Node {
        match self {
            Node::A => Node::B,
            Node::B => Node::A,
            Node::R => Node::R,
        }
    }

    fn letter(self) -> char {
        match self {
            Node::A => 'a',
            Node::B => 'b',
            Node::R => 'r',
        }
    }
}

/// Identifies one flow variable: information sent from `src` to `dst` in `state` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlowKey {
    pub src: Node,
    pub dst: Node,
    pub state: u8,
}

impl fmt::Display for FlowKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{}{}^{}", self.src.letter(), self.dst.letter(), self.state)
    }
}

/// Per-state flow rates of an optimal operating point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlowVars(BTreeMap<FlowKey, Rate>);

impl FlowVars {
    /// Relabel for a swap of nodes a and b (states 1<->2, 5<->6).
    pub fn mirrored(&self) -> Self {
        FlowVars(
            self.0
                .iter()
                .map(|(k, &v)| {
                    let key = FlowKey { src: k.src.mirrored(), dst: k.dst.mirrored(), state: mirror_state(k.state) };
                    (key, v)
                })
                .collect(),
        )
    }

    pub fn get(&self, src: Node, dst: Node, state: u8) -> Option<Rate> {
        self.0.get(&FlowKey { src, dst, state }).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FlowKey, &Rate)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Power fractions spent on the relay-bound message in states 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl PowerSplit {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        for a in [alpha1, alpha2] {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Parameter(format!("power split {a} outside [0, 1]")));
            }
        }
        Ok(PowerSplit { alpha1, alpha2 })
    }
}

/// An optimal rate pair of a protocol along one ray.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPoint {
    pub ray: Ray,
    pub ra: Rate,
    pub rb: Rate,
    pub shares: TimeShares,
    pub flows: Option<FlowVars>,
    pub split: Option<PowerSplit>,
}

impl BoundaryPoint {
    pub fn active_states(&self) -> Vec<u8> {
        self.shares.active_states()
    }

    /// The same operating point with the roles of a and b exchanged.
    pub fn mirrored(&self) -> Self {
        BoundaryPoint {
            ray: self.ray.mirrored(),
            ra: self.rb,
            rb: self.ra,
            shares: self.shares.mirrored(),
            flows: self.flows.as_ref().map(FlowVars::mirrored),
            split: self.split.map(|s| PowerSplit { alpha1: s.alpha2, alpha2: s.alpha1 }),
        }
    }
}

impl From<OuterPoint> for BoundaryPoint {
    fn from(p: OuterPoint) -> Self {
        BoundaryPoint { ray: p.ray, ra: p.ra, rb: p.rb, shares: p.shares, flows: None, split: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Protocol {
    Mabc,
    Tdbc,
    Hbc,
    SixStateDf,
    SixState,
    CoMabc,
}

impl Protocol {
    pub const ALL: [Protocol; 6] =
        [Protocol::Mabc, Protocol::Tdbc, Protocol::Hbc, Protocol::SixStateDf, Protocol::SixState, Protocol::CoMabc];

    pub fn id(self) -> &'static str {
        match self {
            Protocol::Mabc => "mabc",
            Protocol::Tdbc => "tdbc",
            Protocol::Hbc => "hbc",
            Protocol::SixStateDf => "six-state-df",
            Protocol::SixState => "six-state",
            Protocol::CoMabc => "comabc",
        }
    }

    /// Boundary point on `ray`. `alpha_grid` is only used by the 6-state DF protocol.
    pub fn boundary(self, ray: impl Into<Ray>, gains: &ChannelGains, alpha_grid: usize) -> Result<BoundaryPoint> {
        match self {
            Protocol::Mabc => mabc_boundary(ray, gains),
            Protocol::Tdbc => hbc_boundary(ray, gains, true),
            Protocol::Hbc => hbc_boundary(ray, gains, false),
            Protocol::SixStateDf => six_state_df_boundary(ray, gains, alpha_grid),
            Protocol::SixState => six_state_boundary(ray, gains),
            Protocol::CoMabc => comabc_boundary(ray, gains),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.id() == s)
            .ok_or_else(|| Error::Validation(format!("unknown protocol {s:?}")))
    }
}

/// LP over `[t, extra..]` where `(Ra, Rb) = t * direction`.
struct RayLp {
    lp: LinearProgram,
    da: f64,
    db: f64,
}

impl RayLp {
    fn new(ray: Ray, extra: usize) -> Self {
        let mut obj = vec![0.0; 1 + extra];
        obj[0] = 1.0;
        let (da, db) = ray.direction();
        RayLp { lp: LinearProgram::maximize(obj), da, db }
    }

    /// `wa Ra + wb Rb + sum(terms) rel rhs`.
    fn rate_row(&mut self, wa: f64, wb: f64, terms: &[(usize, f64)], rel: Relation, rhs: f64) {
        let mut row = Vec::with_capacity(terms.len() + 1);
        row.push((0, wa * self.da + wb * self.db));
        row.extend_from_slice(terms);
        self.lp.add_sparse(&row, rel, rhs);
    }

    fn row(&mut self, terms: &[(usize, f64)], rel: Relation, rhs: f64) {
        self.lp.add_sparse(terms, rel, rhs);
    }

    fn solve(&self, context: impl Fn() -> String) -> Result<(f64, f64, Vec<f64>)> {
        let sol = solve_expect_optimal(&self.lp, context)?;
        let t = sol.x[0].max(0.0);
        Ok((self.da * t, self.db * t, sol.x))
    }
}

fn checked_ray(ray: impl Into<Ray>) -> Result<Ray> {
    let ray = ray.into();
    if let Ray::Ratio(k) = ray {
        Ray::ratio(k)?;
    }
    Ok(ray)
}

fn shares_from(pairs: &[(usize, f64)]) -> TimeShares {
    let mut l = [0.0; 6];
    for &(state, v) in pairs {
        l[state - 1] = v;
    }
    TimeShares::from_lp(&l)
}

/// MABC: multiple access to the relay (state 3), then broadcast (state 4).
pub fn mabc_boundary(ray: impl Into<Ray>, gains: &ChannelGains) -> Result<BoundaryPoint> {
    let ray = checked_ray(ray)?;
    let cp = gains.capacities();
    let (l3, l4) = (1, 2);
    let mut p = RayLp::new(ray, 2);
    p.rate_row(1.0, 0.0, &[(l3, -cp.c1)], Relation::Le, 0.0);
    p.rate_row(1.0, 0.0, &[(l4, -cp.c2)], Relation::Le, 0.0);
    p.rate_row(0.0, 1.0, &[(l3, -cp.c2)], Relation::Le, 0.0);
    p.rate_row(0.0, 1.0, &[(l4, -cp.c1)], Relation::Le, 0.0);
    p.rate_row(1.0, 1.0, &[(l3, -cp.c12)], Relation::Le, 0.0);
    p.row(&[(l3, 1.0), (l4, 1.0)], Relation::Le, 1.0);
    let (ra, rb, x) = p.solve(|| format!("MABC at k = {}", ray.k()))?;
    Ok(BoundaryPoint { ray, ra, rb, shares: shares_from(&[(3, x[l3]), (4, x[l4])]), flows: None, split: None })
}

/// HBC over states 1 to 4; with `tdbc_only` the MAC state 3 is disabled (TDBC).
pub fn hbc_boundary(ray: impl Into<Ray>, gains: &ChannelGains, tdbc_only: bool) -> Result<BoundaryPoint> {
    let ray = checked_ray(ray)?;
    let cp = gains.capacities();
    let [l1, l2, l3, l4] = [1, 2, 3, 4];
    let mut p = RayLp::new(ray, 4);
    p.rate_row(1.0, 0.0, &[(l1, -cp.c1), (l3, -cp.c1)], Relation::Le, 0.0);
    p.rate_row(1.0, 0.0, &[(l1, -cp.c3), (l4, -cp.c2)], Relation::Le, 0.0);
    p.rate_row(0.0, 1.0, &[(l2, -cp.c2), (l3, -cp.c2)], Relation::Le, 0.0);
    p.rate_row(0.0, 1.0, &[(l2, -cp.c3), (l4, -cp.c1)], Relation::Le, 0.0);
    p.rate_row(1.0, 1.0, &[(l1, -cp.c1), (l2, -cp.c2), (l3, -cp.c12)], Relation::Le, 0.0);
    p.row(&[(l1, 1.0), (l2, 1.0), (l3, 1.0), (l4, 1.0)], Relation::Eq, 1.0);
    if tdbc_only {
        p.lp.set_bounds(l3, Some(0.0), Some(0.0));
    }
    let name = if tdbc_only { "TDBC" } else { "HBC" };
    let (ra, rb, x) = p.solve(|| format!("{name} at k = {}", ray.k()))?;
    Ok(BoundaryPoint {
        ray,
        ra,
        rb,
        shares: shares_from(&[(1, x[l1]), (2, x[l2]), (3, x[l3]), (4, x[l4])]),
        flows: None,
        split: None,
    })
}

/// 6-state protocol with side information: HBC plus the MAC states 5 and 6,
/// where the relay forwards while the far source talks over the direct link.
pub fn six_state_boundary(ray: impl Into<Ray>, gains: &ChannelGains) -> Result<BoundaryPoint> {
    let ray = checked_ray(ray)?;
    let cp = gains.capacities();
    let [l1, l2, l3, l4, l5, l6] = [1, 2, 3, 4, 5, 6];
    let mut p = RayLp::new(ray, 6);
    p.rate_row(1.0, 0.0, &[(l5, -cp.c3), (l1, -cp.c1), (l3, -cp.c1)], Relation::Le, 0.0);
    p.rate_row(1.0, 0.0, &[(l1, -cp.c3), (l4, -cp.c2), (l5, -cp.c23)], Relation::Le, 0.0);
    p.rate_row(0.0, 1.0, &[(l6, -cp.c3), (l2, -cp.c2), (l3, -cp.c2)], Relation::Le, 0.0);
    p.rate_row(0.0, 1.0, &[(l2, -cp.c3), (l4, -cp.c1), (l6, -cp.c13)], Relation::Le, 0.0);
    p.rate_row(1.0, 1.0, &[(l1, -cp.c1), (l2, -cp.c2), (l5, -cp.c3), (l6, -cp.c3), (l3, -cp.c12)], Relation::Le, 0.0);
    p.row(&(1..=6).map(|i| (i, 1.0)).collect::<Vec<_>>(), Relation::Eq, 1.0);
    let (ra, rb, x) = p.solve(|| format!("6-state protocol at k = {}", ray.k()))?;
    Ok(BoundaryPoint { ray, ra, rb, shares: TimeShares::from_lp(&x[1..7]), flows: None, split: None })
}

/// Compute-and-forward rates for the MAC phase: `([log2(g1/(g1+g2) + g1)]+, [log2(g2/(g1+g2) + g2)]+)`.
pub fn comabc_relay_rates(gains: &ChannelGains) -> (Rate, Rate) {
    let (g1, g2) = (gains.gamma1(), gains.gamma2());
    let s = g1 + g2;
    if s <= 0.0 {
        return (0.0, 0.0);
    }
    let r = |g: f64| (g / s + g).log2().max(0.0);
    (r(g1), r(g2))
}

/// CoMABC: MAC phase with function decoding at the relay (state 3), broadcast
/// (state 4) and a cooperative phase in which b and r both send to a (state 6).
pub fn comabc_boundary(ray: impl Into<Ray>, gains: &ChannelGains) -> Result<BoundaryPoint> {
    let ray = checked_ray(ray)?;
    if !gains.is_ordered() {
        return Err(Error::Validation(format!(
            "CoMABC needs gamma3 <= gamma1 <= gamma2, got ({}, {}, {})",
            gains.gamma1(),
            gains.gamma2(),
            gains.gamma3()
        )));
    }
    let cp = gains.capacities();
    let (r_ar, r_br) = comabc_relay_rates(gains);
    let (l3, l4, l6) = (1, 2, 3);
    let mut p = RayLp::new(ray, 3);
    p.rate_row(1.0, 0.0, &[(l3, -r_ar)], Relation::Le, 0.0);
    p.rate_row(1.0, 0.0, &[(l4, -cp.c2)], Relation::Le, 0.0);
    p.rate_row(0.0, 1.0, &[(l3, -r_br), (l6, -cp.c3)], Relation::Le, 0.0);
    p.rate_row(0.0, 1.0, &[(l4, -cp.c1), (l6, -cp.c13)], Relation::Le, 0.0);
    p.row(&[(l3, 1.0), (l4, 1.0), (l6, 1.0)], Relation::Le, 1.0);
    let (ra, rb, x) = p.solve(|| format!("CoMABC at k = {}", ray.k()))?;
    Ok(BoundaryPoint {
        ray,
        ra,
        rb,
        shares: shares_from(&[(3, x[l3]), (4, x[l4]), (6, x[l6])]),
        flows: None,
        split: None,
    })
}

/// Flow variables of the 6-state DF LP, in column order after `[t, l1..l6]`.
const DF_FLOWS: [(Node, Node, u8); 12] = [
    (Node::A, Node::R, 1),
    (Node::A, Node::B, 1),
    (Node::B, Node::R, 2),
    (Node::B, Node::A, 2),
    (Node::A, Node::R, 3),
    (Node::B, Node::R, 3),
    (Node::R, Node::A, 4),
    (Node::R, Node::B, 4),
    (Node::R, Node::B, 5),
    (Node::A, Node::B, 5),
    (Node::R, Node::A, 6),
    (Node::B, Node::A, 6),
];

fn df_col(src: Node, dst: Node, state: u8) -> usize {
    7 + DF_FLOWS.iter().position(|&f| f == (src, dst, state)).expect("flow variable not in the 6-state DF layout")
}

/// The 6-state DF LP for a fixed power split.
///
/// Columns: `t`, `l1..l6`, then the twelve flows of [`DF_FLOWS`].
pub fn six_state_df_lp(ray: Ray, gains: &ChannelGains, split: PowerSplit) -> LinearProgram {
    let caps = BroadcastCaps::over(gains, (split.alpha1, split.alpha1), (split.alpha2, split.alpha2));
    df_lp_with_caps(ray, gains, &caps)
}

/// Rate caps of one broadcast state over a range of power splits.
///
/// As the split moves power from the direct message to the relay message,
/// the (relay, direct) rate pair traces a concave curve. Over a range of
/// splits every achievable pair lies below the largest relay rate, the
/// largest direct rate, and the curve's tangents at the ends and midpoint.
#[derive(Debug, Clone)]
struct StateCaps {
    relay: f64,
    direct: f64,
    /// `(s, r)` for cuts `direct + s * relay <= r`.
    tangents: Vec<(f64, f64)>,
}

impl StateCaps {
    fn over(g_relay: f64, g3: f64, lo: f64, hi: f64) -> Self {
        let direct = |a: f64| c((1.0 - a) * g3 / (1.0 + a * g3));
        let mut tangents = Vec::new();
        if lo < hi && g_relay > 0.0 {
            for a in [lo, 0.5 * (lo + hi), hi] {
                let s = g3 * (1.0 + a * g_relay) / (g_relay * (1.0 + a * g3));
                tangents.push((s, direct(a) + s * c(a * g_relay)));
            }
        }
        StateCaps { relay: c(hi * g_relay), direct: direct(lo), tangents }
    }
}

#[derive(Debug, Clone)]
struct BroadcastCaps {
    state1: StateCaps,
    state2: StateCaps,
}

impl BroadcastCaps {
    /// Caps for `alpha1` in `a1` and `alpha2` in `a2`; exact for single points.
    fn over(gains: &ChannelGains, a1: (f64, f64), a2: (f64, f64)) -> Self {
        let g3 = gains.gamma3();
        BroadcastCaps {
            state1: StateCaps::over(gains.gamma1(), g3, a1.0, a1.1),
            state2: StateCaps::over(gains.gamma2(), g3, a2.0, a2.1),
        }
    }
}

fn df_lp_with_caps(ray: Ray, gains: &ChannelGains, caps: &BroadcastCaps) -> LinearProgram {
    use Node::{A, B, R};
    use Relation::{Eq, Le};
    let cp = gains.capacities();
    let z = df_col;
    let mut p = RayLp::new(ray, 6 + DF_FLOWS.len());

    p.rate_row(1.0, 0.0, &[(z(A, R, 1), -1.0), (z(A, B, 1), -1.0), (z(A, B, 5), -1.0), (z(A, R, 3), -1.0)], Eq, 0.0);
    p.rate_row(0.0, 1.0, &[(z(B, R, 2), -1.0), (z(B, A, 2), -1.0), (z(B, A, 6), -1.0), (z(B, R, 3), -1.0)], Eq, 0.0);

    // broadcast from a (state 1) and b (state 2): relay part plus direct part
    for (state, sc, relay, direct) in
        [(1, &caps.state1, z(A, R, 1), z(A, B, 1)), (2, &caps.state2, z(B, R, 2), z(B, A, 2))]
    {
        p.row(&[(relay, 1.0), (state, -sc.relay)], Le, 0.0);
        p.row(&[(direct, 1.0), (state, -sc.direct)], Le, 0.0);
        for &(slope, r) in &sc.tangents {
            p.row(&[(direct, 1.0), (relay, slope), (state, -r)], Le, 0.0);
        }
    }

    p.row(&[(z(A, R, 3), 1.0), (3, -cp.c1)], Le, 0.0);
    p.row(&[(z(B, R, 3), 1.0), (3, -cp.c2)], Le, 0.0);
    p.row(&[(z(A, R, 3), 1.0), (z(B, R, 3), 1.0), (3, -cp.c12)], Le, 0.0);

    p.row(&[(z(R, A, 4), 1.0), (4, -cp.c1)], Le, 0.0);
    p.row(&[(z(R, B, 4), 1.0), (4, -cp.c2)], Le, 0.0);

    p.row(&[(z(R, B, 5), 1.0), (5, -cp.c2)], Le, 0.0);
    p.row(&[(z(A, B, 5), 1.0), (5, -cp.c3)], Le, 0.0);
    p.row(&[(z(R, B, 5), 1.0), (z(A, B, 5), 1.0), (5, -cp.c23)], Le, 0.0);

    p.row(&[(z(R, A, 6), 1.0), (6, -cp.c1)], Le, 0.0);
    p.row(&[(z(B, A, 6), 1.0), (6, -cp.c3)], Le, 0.0);
    p.row(&[(z(R, A, 6), 1.0), (z(B, A, 6), 1.0), (6, -cp.c13)], Le, 0.0);

    // what the relay hears from one source it forwards to the other
    p.row(&[(z(A, R, 1), 1.0), (z(A, R, 3), 1.0), (z(R, B, 5), -1.0), (z(R, B, 4), -1.0)], Eq, 0.0);
    p.row(&[(z(B, R, 2), 1.0), (z(B, R, 3), 1.0), (z(R, A, 6), -1.0), (z(R, A, 4), -1.0)], Eq, 0.0);

    p.row(&(1..=6).map(|i| (i, 1.0)).collect::<Vec<_>>(), Eq, 1.0);
    p.lp
}

/// 6-state DF at a fixed power split.
pub fn six_state_df_at(ray: impl Into<Ray>, gains: &ChannelGains, split: PowerSplit) -> Result<BoundaryPoint> {
    let ray = checked_ray(ray)?;
    let p = RayLp { lp: six_state_df_lp(ray, gains, split), da: ray.direction().0, db: ray.direction().1 };
    let (ra, rb, x) =
        p.solve(|| format!("6-state DF at k = {}, alpha = ({}, {})", ray.k(), split.alpha1, split.alpha2))?;
    let flows = DF_FLOWS
        .iter()
        .enumerate()
        .map(|(i, &(src, dst, state))| (FlowKey { src, dst, state }, x[7 + i].max(0.0)))
        .collect();
    Ok(BoundaryPoint {
        ray,
        ra,
        rb,
        shares: TimeShares::from_lp(&x[1..7]),
        flows: Some(FlowVars(flows)),
        split: Some(split),
    })
}

/// Ray scale of a boundary point, used to rank power splits.
fn scale(p: &BoundaryPoint) -> f64 {
    match p.ray {
        Ray::RaAxis => p.ra,
        Ray::Ratio(_) => p.rb,
    }
}

/// 6-state DF without side information, maximized over the power splits.
///
/// Finds the best point of a uniform `alpha_grid x alpha_grid` grid over
/// `[0, 1]^2`, then of a 9x9 grid of radius one coarse step around it.
/// Each grid is searched by branch and bound: a block of splits is skipped
/// when the LP with its most favourable broadcast caps cannot beat the
/// incumbent, so the result equals an exhaustive scan of the grid.
pub fn six_state_df_boundary(ray: impl Into<Ray>, gains: &ChannelGains, alpha_grid: usize) -> Result<BoundaryPoint> {
    let ray = checked_ray(ray)?;
    if alpha_grid < 2 {
        return Err(Error::Parameter(format!("alpha grid needs at least 2 points, got {alpha_grid}")));
    }
    let step = 1.0 / (alpha_grid - 1) as f64;
    let coarse: Vec<f64> = (0..alpha_grid).map(|i| (i as f64 * step).min(1.0)).collect();
    let best = search_splits(ray, gains, &coarse, &coarse, None)?;
    let center = best.split.expect("DF point carries its split");
    let local = |a: f64| -> Vec<f64> {
        let half = (ALPHA_REFINE_POINTS / 2) as isize;
        let h = step / half as f64;
        (-half..=half).map(|i| a + i as f64 * h).filter(|v| (0.0..=1.0).contains(v)).collect()
    };
    search_splits(ray, gains, &local(center.alpha1), &local(center.alpha2), Some(best))
}

/// Ray scale of a relaxed LP, or of an exact one when both ranges are single points.
fn df_scale(ray: Ray, gains: &ChannelGains, caps: &BroadcastCaps) -> Result<f64> {
    let lp = df_lp_with_caps(ray, gains, caps);
    let sol = solve_expect_optimal(&lp, || format!("6-state DF bound at k = {}", ray.k()))?;
    Ok(sol.objective)
}

/// Improvement needed for a split to replace the incumbent.
const SPLIT_GAIN_TOL: f64 = 1e-9;

/// Best split on the product grid `alpha1 x alpha2` (both ascending).
fn search_splits(
    ray: Ray,
    gains: &ChannelGains,
    alpha1: &[f64],
    alpha2: &[f64],
    incumbent: Option<BoundaryPoint>,
) -> Result<BoundaryPoint> {
    type Block = (usize, usize, usize, usize);
    let bound = |b: Block| {
        let caps = BroadcastCaps::over(gains, (alpha1[b.0], alpha1[b.1]), (alpha2[b.2], alpha2[b.3]));
        df_scale(ray, gains, &caps)
    };
    let mut best = incumbent;
    let mut best_scale = best.as_ref().map_or(f64::NEG_INFINITY, scale);
    let root = (0, alpha1.len() - 1, 0, alpha2.len() - 1);
    let mut stack = vec![(bound(root)?, root)];
    while let Some((ub, b)) = stack.pop() {
        if ub <= best_scale + SPLIT_GAIN_TOL {
            continue;
        }
        let (i0, i1, j0, j1) = b;
        if i0 == i1 && j0 == j1 {
            let p = six_state_df_at(ray, gains, PowerSplit { alpha1: alpha1[i0], alpha2: alpha2[j0] })?;
            if scale(&p) > best_scale + SPLIT_GAIN_TOL {
                best_scale = scale(&p);
                best = Some(p);
            }
            continue;
        }
        let (lo, hi) = if i1 - i0 >= j1 - j0 {
            let m = (i0 + i1) / 2;
            ((i0, m, j0, j1), (m + 1, i1, j0, j1))
        } else {
            let m = (j0 + j1) / 2;
            ((i0, i1, j0, m), (i0, i1, m + 1, j1))
        };
        let (ub_lo, ub_hi) = (bound(lo)?, bound(hi)?);
        // visit the more promising half first; equal bounds favour smaller alpha
        if ub_hi > ub_lo {
            stack.push((ub_lo, lo));
            stack.push((ub_hi, hi));
        } else {
            stack.push((ub_hi, hi));
            stack.push((ub_lo, lo));
        }
    }
    match best {
        Some(p) => Ok(p),
        // every split is at or below a zero incumbent scale; report the first one
        None => six_state_df_at(ray, gains, PowerSplit { alpha1: alpha1[0], alpha2: alpha2[0] }),
    }
}
