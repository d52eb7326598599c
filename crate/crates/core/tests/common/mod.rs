//! Shared fixtures and independent reference solvers for the integration tests.
//!
//! Every oracle here is written from the printed constraint sets with its own
//! arithmetic; none of them calls into the library's LP engine.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twrc::{validate_gains, ChannelGains};

pub fn c(x: f64) -> f64 {
    (1.0 + x).log2()
}

pub fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

pub fn gains_db(g1: f64, g2: f64, g3: f64) -> ChannelGains {
    validate_gains(db(g1), db(g2), db(g3), false).unwrap()
}

pub fn case_a() -> ChannelGains {
    gains_db(10.0, 15.0, 3.0)
}

pub fn case_b() -> ChannelGains {
    gains_db(20.0, 20.0, 8.0)
}

pub fn case_c() -> ChannelGains {
    gains_db(30.0, 35.0, 13.0)
}

pub fn low_snr() -> ChannelGains {
    gains_db(0.0, 5.0, -7.0)
}

pub fn reference_cases() -> Vec<(&'static str, ChannelGains)> {
    vec![("case A", case_a()), ("case B", case_b()), ("case C", case_c())]
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ordered gains with gamma2 in [-10, 40] dB, gamma1 below it and gamma3 below
/// gamma1; one draw in eight has no direct link and one in eight equal gains.
pub fn random_gains(rng: &mut ChaCha8Rng) -> ChannelGains {
    let g2 = rng.gen_range(-10.0..40.0);
    let g1 = if rng.gen_ratio(1, 8) { g2 } else { rng.gen_range(-10.0..=g2) };
    let g1_lin = db(g1);
    let g3_lin = if rng.gen_ratio(1, 8) { 0.0 } else { g1_lin * rng.gen_range(0.0..=1.0f64).powi(2) };
    validate_gains(g1_lin, db(g2), g3_lin, false).unwrap()
}

pub fn random_gain_set(seed: u64, n: usize) -> Vec<ChannelGains> {
    let mut r = rng(seed);
    (0..n).map(|_| random_gains(&mut r)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rel {
    Le,
    Eq,
}

/// A row `a . x (<= | =) b`.
pub type Row = (Vec<f64>, Rel, f64);

fn solve_square(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-11 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                if f != 0.0 {
                    let pivot_row = m[col].clone();
                    for (x, p) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= f * p;
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

/// `max objective . x` over `rows` and `x >= 0` by enumerating every basic
/// point. Returns `None` when no vertex is feasible. The caller guarantees a
/// bounded problem.
pub fn vertex_max(objective: &[f64], rows: &[Row]) -> Option<(f64, Vec<f64>)> {
    let n = objective.len();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut forced = Vec::new();
    for (a, rel, b) in rows {
        if *rel == Rel::Eq {
            forced.push(planes.len());
        }
        planes.push((a.clone(), *b));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e, 0.0));
    }
    let free: Vec<usize> = (0..planes.len()).filter(|i| !forced.contains(i)).collect();
    if forced.len() > n {
        return None;
    }
    let scale =
        rows.iter().flat_map(|(a, _, b)| a.iter().chain(std::iter::once(b))).fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * scale;
    let mut best: Option<(f64, Vec<f64>)> = None;
    combinations(free.len(), n - forced.len(), &mut |pick| {
        let active: Vec<usize> = forced.iter().copied().chain(pick.iter().map(|&i| free[i])).collect();
        let m = active.iter().map(|&i| planes[i].0.clone()).collect();
        let rhs = active.iter().map(|&i| planes[i].1).collect();
        let Some(x) = solve_square(m, rhs) else { return };
        if x.iter().any(|&v| v < -tol) {
            return;
        }
        for (a, rel, b) in rows {
            let lhs: f64 = a.iter().zip(&x).map(|(p, q)| p * q).sum();
            let ok = match rel {
                Rel::Le => lhs <= b + tol,
                Rel::Eq => (lhs - b).abs() <= tol,
            };
            if !ok {
                return;
            }
        }
        let v: f64 = objective.iter().zip(&x).map(|(p, q)| p * q).sum();
        if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
            best = Some((v, x));
        }
    });
    best
}

/// Direction `(da, db)` of a ray: `(k, 1)`, or `(1, 0)` on the Ra axis.
pub fn direction(k: Option<f64>) -> (f64, f64) {
    match k {
        Some(k) => (k, 1.0),
        None => (1.0, 0.0),
    }
}

fn row(t: f64, terms: &[(usize, f64)], nvars: usize) -> Vec<f64> {
    let mut r = vec![0.0; nvars];
    r[0] = t;
    for &(j, v) in terms {
        r[j] -= v;
    }
    r
}

/// Outer bound along a ray: largest scale `s` with `(Ra, Rb) = s * direction`
/// inside the cut-set region. `k = None` is the Ra axis. Variables are
/// `[s, l1..l6]`.
pub fn outer_oracle(k: Option<f64>, g: &ChannelGains) -> (f64, Vec<f64>) {
    let (g1, g2, g3) = (g.gamma1(), g.gamma2(), g.gamma3());
    let (da, db) = direction(k);
    let coh1 = c((g1.sqrt() + g3.sqrt()).powi(2));
    let coh2 = c((g2.sqrt() + g3.sqrt()).powi(2));
    let rows = vec![
        (row(da, &[(1, c(g1 + g3)), (3, c(g1)), (5, c(g3))], 7), Rel::Le, 0.0),
        (row(da, &[(1, c(g3)), (4, c(g2)), (5, coh2)], 7), Rel::Le, 0.0),
        (row(db, &[(2, c(g2 + g3)), (3, c(g2)), (6, c(g3))], 7), Rel::Le, 0.0),
        (row(db, &[(2, c(g3)), (4, c(g1)), (6, coh1)], 7), Rel::Le, 0.0),
        (vec![0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], Rel::Le, 1.0),
    ];
    let mut obj = vec![0.0; 7];
    obj[0] = 1.0;
    let (v, x) = vertex_max(&obj, &rows).expect("origin is feasible");
    (v, x)
}

/// Largest weighted sum `wa Ra + wb Rb` over the cut-set region.
/// Variables `[ra, rb, l1..l6]`.
pub fn outer_weighted_oracle(wa: f64, wb: f64, g: &ChannelGains) -> f64 {
    let (g1, g2, g3) = (g.gamma1(), g.gamma2(), g.gamma3());
    let coh1 = c((g1.sqrt() + g3.sqrt()).powi(2));
    let coh2 = c((g2.sqrt() + g3.sqrt()).powi(2));
    let mk = |rate: usize, terms: &[(usize, f64)]| {
        let mut r = vec![0.0; 8];
        r[rate] = 1.0;
        for &(j, v) in terms {
            r[j + 1] -= v;
        }
        (r, Rel::Le, 0.0)
    };
    let rows = vec![
        mk(0, &[(1, c(g1 + g3)), (3, c(g1)), (5, c(g3))]),
        mk(0, &[(1, c(g3)), (4, c(g2)), (5, coh2)]),
        mk(1, &[(2, c(g2 + g3)), (3, c(g2)), (6, c(g3))]),
        mk(1, &[(2, c(g3)), (4, c(g1)), (6, coh1)]),
        (vec![0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], Rel::Le, 1.0),
    ];
    let mut obj = vec![0.0; 8];
    obj[0] = wa;
    obj[1] = wb;
    vertex_max(&obj, &rows).expect("origin is feasible").0
}

fn ray_lp(
    k: Option<f64>,
    rate_rows: &[(bool, Vec<(usize, f64)>)],
    nl: usize,
    total_eq: bool,
    sum_row: Option<Vec<(usize, f64)>>,
) -> f64 {
    // variables [s, l1..l_nl]; each rate row bounds Ra (true) or Rb (false)
    let (da, db) = direction(k);
    let n = nl + 1;
    let mut rows: Vec<Row> =
        rate_rows.iter().map(|(is_a, terms)| (row(if *is_a { da } else { db }, terms, n), Rel::Le, 0.0)).collect();
    if let Some(terms) = sum_row {
        rows.push((row(da + db, &terms, n), Rel::Le, 0.0));
    }
    let mut total = vec![1.0; n];
    total[0] = 0.0;
    rows.push((total, if total_eq { Rel::Eq } else { Rel::Le }, 1.0));
    let mut obj = vec![0.0; n];
    obj[0] = 1.0;
    vertex_max(&obj, &rows).expect("feasible").0
}

/// MABC along a ray. Variables `[s, l3, l4]` mapped to indices 1, 2.
pub fn mabc_oracle(k: Option<f64>, g: &ChannelGains) -> f64 {
    let (g1, g2) = (g.gamma1(), g.gamma2());
    ray_lp(
        k,
        &[(true, vec![(1, c(g1))]), (true, vec![(2, c(g2))]), (false, vec![(1, c(g2))]), (false, vec![(2, c(g1))])],
        2,
        false,
        Some(vec![(1, c(g1 + g2))]),
    )
}

/// HBC along a ray; `tdbc` forces state 3 off. Indices 1..4 are l1..l4.
pub fn hbc_oracle(k: Option<f64>, g: &ChannelGains, tdbc: bool) -> f64 {
    let (g1, g2, g3) = (g.gamma1(), g.gamma2(), g.gamma3());
    let c3 = if tdbc { 0.0 } else { 1.0 };
    ray_lp(
        k,
        &[
            (true, vec![(1, c(g1)), (3, c3 * c(g1))]),
            (true, vec![(1, c(g3)), (4, c(g2))]),
            (false, vec![(2, c(g2)), (3, c3 * c(g2))]),
            (false, vec![(2, c(g3)), (4, c(g1))]),
        ],
        4,
        true,
        Some(vec![(1, c(g1)), (2, c(g2)), (3, c3 * c(g1 + g2))]),
    )
}

/// 6-state protocol with side information, after the optimal choice of the
/// state-5 and state-6 flows (direct parts at C(g3), relay parts filling the
/// MAC sum). Indices 1..6 are l1..l6.
pub fn six_state_oracle(k: Option<f64>, g: &ChannelGains) -> f64 {
    let (g1, g2, g3) = (g.gamma1(), g.gamma2(), g.gamma3());
    let (c1, c2, c3) = (c(g1), c(g2), c(g3));
    ray_lp(
        k,
        &[
            // Ra <= Z_ab5 + (l1 + l3) C1
            (true, vec![(5, c3), (1, c1), (3, c1)]),
            // Ra <= Z_ab5 + Z_rb5 + l1 C3 + l4 C2, with Z_ab5 + Z_rb5 = l5 C(g2 + g3)
            (true, vec![(5, c(g2 + g3)), (1, c3), (4, c2)]),
            (false, vec![(6, c3), (2, c2), (3, c2)]),
            (false, vec![(6, c(g1 + g3)), (2, c3), (4, c1)]),
        ],
        6,
        true,
        Some(vec![(1, c1), (2, c2), (5, c3), (6, c3), (3, c(g1 + g2))]),
    )
}

pub fn comabc_relay_rates(g: &ChannelGains) -> (f64, f64) {
    let (g1, g2) = (g.gamma1(), g.gamma2());
    let ar = (g1 / (g1 + g2) + g1).log2().max(0.0);
    let br = (g2 / (g1 + g2) + g2).log2().max(0.0);
    (ar, br)
}

/// CoMABC with states 3, 4 and 6 at indices 1, 2, 3.
pub fn comabc_oracle(k: Option<f64>, g: &ChannelGains) -> f64 {
    let (g1, g2, g3) = (g.gamma1(), g.gamma2(), g.gamma3());
    let (ar, br) = comabc_relay_rates(g);
    ray_lp(
        k,
        &[
            (true, vec![(1, ar)]),
            (true, vec![(2, c(g2))]),
            (false, vec![(1, br), (3, c(g3))]),
            (false, vec![(2, c(g1)), (3, c(g1 + g3))]),
        ],
        3,
        false,
        None,
    )
}

/// Exact 6-state DF rate along a ray for fixed time shares and power split,
/// solved by hand: for a given state-3 split the best state-5 and state-6
/// flows have closed forms, and the ray value is monotone in that split.
pub fn df_fixed_oracle(k: Option<f64>, g: &ChannelGains, lambda: &[f64; 6], a1: f64, a2: f64) -> f64 {
    let (g1, g2, g3) = (g.gamma1(), g.gamma2(), g.gamma3());
    let [l1, l2, l3, l4, l5, l6] = *lambda;
    let direct = |a: f64| c((1.0 - a) * g3 / (1.0 + a * g3));
    // flow towards one destination given the relay's incoming rate
    let towards =
        |relay_in: f64, own_direct: f64, l_state4: f64, c_dst: f64, l_mac: f64, c_mac_relay: f64, c_mac_sum: f64| {
            let c_dir = c(g3);
            let cap4 = l_state4 * c_dst;
            let v_max = l_mac * c_mac_relay;
            let value = |v: f64| {
                let u = (l_mac * c_dir).min(l_mac * c_mac_sum - v).max(0.0);
                u + relay_in.min(v + cap4)
            };
            let mut best = 0.0f64;
            for v in [0.0, v_max, l_mac * (c_mac_sum - c_dir), relay_in - cap4] {
                let v = v.clamp(0.0, v_max);
                best = best.max(value(v));
            }
            own_direct + best
        };
    let ra_of = |x: f64| towards(l1 * c(a1 * g1) + x, l1 * direct(a1), l4, c(g2), l5, c(g2), c(g2 + g3));
    let rb_of = |y: f64| towards(l2 * c(a2 * g2) + y, l2 * direct(a2), l4, c(g1), l6, c(g1), c(g1 + g3));
    // state-3 split on the MAC dominant face, parametrized by x in [0, x_max]
    let x_max = l3 * c(g1);
    let y_of = |x: f64| (l3 * c(g2)).min(l3 * c(g1 + g2) - x).max(0.0);
    let (da, db) = direction(k);
    let scale = |x: f64| {
        let ra = ra_of(x);
        let rb = rb_of(y_of(x));
        let sa = if da > 0.0 { ra / da } else { f64::INFINITY };
        let sb = if db > 0.0 { rb / db } else { f64::INFINITY };
        (sa, sb)
    };
    // sa increases and sb decreases in x; bisect on the crossing
    let (mut lo, mut hi) = (0.0, x_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let (sa, sb) = scale(mid);
        if sa < sb {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    [0.0, lo, hi, x_max]
        .iter()
        .map(|&x| {
            let (sa, sb) = scale(x);
            sa.min(sb)
        })
        .fold(0.0, f64::max)
}

/// Random point of the probability simplex.
pub fn random_simplex<const N: usize>(rng: &mut ChaCha8Rng) -> [f64; N] {
    let mut x = [0.0; N];
    for v in x.iter_mut() {
        *v = -rng.gen_range(1e-12..1.0f64).ln();
        if rng.gen_ratio(1, 3) {
            *v = 0.0;
        }
    }
    let s: f64 = x.iter().sum();
    if s == 0.0 {
        x[0] = 1.0;
        return x;
    }
    x.map(|v| v / s)
}
