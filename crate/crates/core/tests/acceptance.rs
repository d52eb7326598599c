//! End-to-end acceptance checks. Runs with a plain `main` so every criterion
//! reports one PASS/FAIL line even when an earlier one fails.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use twrc::cli::threshold_table;
use twrc::outer::{
    analytic_rb_bound, analytic_weighted_bound, capacity_thresholds, dual_point_feasible, outer_ratio_bound,
    outer_weighted_bound, symmetric_threshold_fn,
};
use twrc::region::{hausdorff, max_radial_gap, outer_region, protocol_region, theta_grid, weighted_outer_region};
use twrc::{cap, dual_of, solve_lp, validate_gains, ChannelGains, LinearProgram, LpStatus, Protocol, Relation};

const KS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];
const ALPHA_GRID: usize = 33;

type Outcome = Result<String, String>;
/// Outer `rb` and each protocol's `rb`, in `Protocol::ALL` order.
type Cell = Result<(f64, [f64; 6]), String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

/// Cases A/B/C, the low-SNR gains and 500 random ordered triples.
fn input_set() -> Vec<(String, ChannelGains)> {
    let mut set: Vec<(String, ChannelGains)> =
        common::reference_cases().into_iter().map(|(n, g)| (n.to_string(), g)).collect();
    set.push(("low snr".into(), common::low_snr()));
    for (i, g) in common::random_gain_set(2024, 500).into_iter().enumerate() {
        set.push((format!("random #{i}"), g));
    }
    set
}

fn describe(g: &ChannelGains) -> String {
    format!("({:.4}, {:.4}, {:.4})", g.gamma1(), g.gamma2(), g.gamma3())
}

fn check(failures: &[String], total: usize, ok_detail: String) -> Outcome {
    if failures.is_empty() {
        Ok(ok_detail)
    } else {
        Err(format!("{} of {total} checks failed; first: {}", failures.len(), failures[0]))
    }
}

fn symmetric_anchor() -> Outcome {
    let g = common::case_b();
    let want = cap(100.0).unwrap() / 2.0;
    let analytic = analytic_rb_bound(1.0, &g).map_err(|e| e.to_string())?;
    let lp = outer_ratio_bound(1.0, &g).map_err(|e| e.to_string())?.rb;
    let oracle = 101f64.log2() / 2.0;
    if (want - oracle).abs() > 1e-15 || (analytic - want).abs() > 1e-12 || (lp - want).abs() > 1e-3 {
        return Err(format!("analytic {analytic}, lp {lp}, C(100)/2 {want}"));
    }
    Ok(format!("analytic {analytic:.6}, lp {lp:.6}"))
}

fn four_active_states() -> Outcome {
    let rays = theta_grid(181).unwrap();
    let mut failures = Vec::new();
    let mut worst = 0;
    for (name, g) in common::reference_cases() {
        for &ray in &rays {
            match outer_ratio_bound(ray, &g) {
                Ok(p) => {
                    let active = p.shares.lambda().iter().filter(|&&l| l > 1e-7).count();
                    worst = worst.max(active);
                    if active > 4 {
                        failures.push(format!("{name} at {:.2} deg: {active} active", ray.theta_deg()));
                    }
                }
                Err(e) => failures.push(format!("{name} at {:.2} deg: {e}", ray.theta_deg())),
            }
        }
    }
    check(&failures, 3 * rays.len(), format!("{} rays, at most {worst} active", 3 * rays.len()))
}

/// Every protocol's `rb` on every (gains, k) pair of the input set.
struct Sweep {
    inputs: Vec<(String, ChannelGains)>,
    /// Indexed by gains, then by k.
    table: Vec<Vec<Cell>>,
}

fn run_sweep() -> Sweep {
    let inputs = input_set();
    let table = inputs
        .par_iter()
        .map(|(_, g)| {
            KS.iter()
                .map(|&k| {
                    let outer = outer_ratio_bound(k, g).map_err(|e| e.to_string())?.rb;
                    let mut rbs = [0.0; 6];
                    for (slot, p) in rbs.iter_mut().zip(Protocol::ALL) {
                        *slot = p.boundary(k, g, ALPHA_GRID).map_err(|e| format!("{p}: {e}"))?.rb;
                    }
                    Ok((outer, rbs))
                })
                .collect()
        })
        .collect();
    Sweep { inputs, table }
}

impl Sweep {
    fn each(&self, mut f: impl FnMut(&str, &ChannelGains, f64, f64, &[f64; 6], &mut Vec<String>)) -> Vec<String> {
        let mut failures = Vec::new();
        for ((name, g), row) in self.inputs.iter().zip(&self.table) {
            for (&k, cell) in KS.iter().zip(row) {
                match cell {
                    Ok((outer, rbs)) => f(name, g, k, *outer, rbs, &mut failures),
                    Err(e) => failures.push(format!("{name} {} k={k}: {e}", describe(g))),
                }
            }
        }
        failures
    }

    fn len(&self) -> usize {
        self.inputs.len() * KS.len()
    }
}

fn safety(sweep: &Sweep) -> Outcome {
    let failures = sweep.each(|name, g, k, outer, rbs, out| {
        for (p, &rb) in Protocol::ALL.iter().zip(rbs) {
            if rb > outer + 1e-6 {
                out.push(format!("{name} {} k={k}: {p} {rb} > outer {outer}", describe(g)));
            }
        }
    });
    check(&failures, sweep.len() * 6, format!("{} (gains, k) pairs x 6 protocols", sweep.len()))
}

fn nesting(sweep: &Sweep) -> Outcome {
    // indices into Protocol::ALL
    let (mabc, tdbc, hbc, six) = (0, 1, 2, 4);
    let links = [("mabc <= tdbc", mabc, tdbc), ("tdbc <= hbc", tdbc, hbc), ("hbc <= six-state", hbc, six)];
    let mut per_link: BTreeMap<&str, usize> = BTreeMap::new();
    let failures = sweep.each(|name, g, k, _, rbs, out| {
        for &(label, lo, hi) in &links {
            if rbs[lo] > rbs[hi] + 1e-9 {
                *per_link.entry(label).or_default() += 1;
                out.push(format!("{name} {} k={k}: {label} fails ({} > {})", describe(g), rbs[lo], rbs[hi]));
            }
        }
    });
    let counts: Vec<String> = links.iter().map(|(l, _, _)| format!("{l}: {}", per_link.get(l).unwrap_or(&0))).collect();
    check(&failures, sweep.len() * links.len(), String::new())
        .map(|_| format!("{} pairs, every link holds", sweep.len()))
        .map_err(|e| format!("{e}; violations per link [{}]", counts.join(", ")))
}

fn weak_duality() -> Outcome {
    let inputs = input_set();
    let failures: Vec<String> = inputs
        .par_iter()
        .flat_map_iter(|(name, g)| {
            let mut out = Vec::new();
            for k in KS {
                let lp = outer_ratio_bound(k, g).map(|p| p.rb);
                let an = analytic_rb_bound(k, g);
                let wlp = outer_weighted_bound(k, 1.0, g).map(|w| w.value);
                let wan = analytic_weighted_bound(k, g);
                match (lp, an, wlp, wan) {
                    (Ok(lp), Ok(an), Ok(wlp), Ok(wan)) => {
                        if an < lp - 1e-9 {
                            out.push(format!("{name} k={k}: analytic {an} < lp {lp}"));
                        }
                        if wan < wlp - 1e-9 {
                            out.push(format!("{name} k={k}: weighted analytic {wan} < lp {wlp}"));
                        }
                    }
                    _ => out.push(format!("{name} k={k}: evaluation error")),
                }
                if k >= 1.0 {
                    match dual_point_feasible(k, g) {
                        Ok((_, slack)) if slack >= -1e-9 => {}
                        Ok((_, slack)) => out.push(format!("{name} k={k}: dual slack {slack}")),
                        Err(e) => out.push(format!("{name} k={k}: {e}")),
                    }
                }
            }
            out
        })
        .collect();
    check(&failures, inputs.len() * 8, format!("{} gain triples", inputs.len()))
}

fn two_hop() -> Outcome {
    let mut rng = common::rng(77);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let g2 = common::db(rng.gen_range(-10.0..40.0));
        let g1 = g2 * rng.gen_range(0.001..=1.0);
        let g = validate_gains(g1, g2, 0.0, false).unwrap();
        let (c1, c2) = (common::c(g1), common::c(g2));
        let want = c1 * c2 / (c1 + c2);
        match outer_ratio_bound(0.0, &g) {
            Ok(p) => {
                worst = worst.max((p.rb - want).abs());
                if (p.rb - want).abs() > 1e-6 {
                    failures.push(format!("{}: {} vs {want}", describe(&g), p.rb));
                }
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    check(&failures, 100, format!("100 gain pairs, max error {worst:.2e}"))
}

fn formulations_agree() -> Outcome {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, g) in common::reference_cases() {
        let rays = outer_region(&g, 181)
            .and_then(|r| r.refine_rays(|ray| outer_ratio_bound(ray, &g).map(Into::into)))
            .map_err(|e| e.to_string())?;
        let lines = weighted_outer_region(&g, 181).map_err(|e| e.to_string())?;
        let d = hausdorff(&rays, &lines).map_err(|e| e.to_string())?;
        worst = worst.max(d);
        if d >= 1e-6 {
            failures.push(format!("{name}: Hausdorff {d}"));
        }
    }
    check(&failures, 3, format!("max Hausdorff distance {worst:.2e}"))
}

fn thresholds() -> Outcome {
    let target = 2.0 * 101f64.log2();
    let f = |x: f64| (1.0 + x).log2() + (1.0 + (10.0 + x.sqrt()).powi(2)).log2();
    let (mut lo, mut hi) = (0.0, 100.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let oracle = 0.5 * (lo + hi);

    let g = validate_gains(100.0, 100.0, 0.0, false).unwrap();
    let got = capacity_thresholds(&g).map_err(|e| e.to_string())?.gamma30.ok_or("no threshold for equal gains")?;
    let mut failures = Vec::new();
    if ((got - oracle) / oracle).abs() > 1e-6 {
        failures.push(format!("threshold {got} vs oracle {oracle}"));
    }
    let residual = symmetric_threshold_fn(100.0, got) - target;
    if residual.abs() > 1e-8 {
        failures.push(format!("residual {residual}"));
    }
    let rows = threshold_table((0.0, 40.0, 1.0), &[1.0, 0.5, 0.1]).map_err(|e| e.to_string())?;
    for c in [1.0, 0.5, 0.1] {
        let curve: Vec<f64> = rows.iter().filter(|r| r.c == c).map(|r| r.threshold_db).collect();
        if curve.len() != 41 || curve.iter().any(|v| !v.is_finite()) {
            failures.push(format!("c={c}: {} finite points", curve.iter().filter(|v| v.is_finite()).count()));
        } else if let Some(w) = curve.windows(2).position(|w| w[1] < w[0]) {
            failures.push(format!("c={c}: decreases after {w} dB"));
        }
    }
    check(&failures, 5, format!("threshold {got:.9} ({:.3} dB), residual {residual:.1e}", 10.0 * got.log10()))
}

fn qualitative() -> Outcome {
    let n = 181;
    let mut failures = Vec::new();

    let g = common::case_c();
    let outer_sym = outer_ratio_bound(1.0, &g).map_err(|e| e.to_string())?.rb;
    let comabc = protocol_region(Protocol::CoMabc, &g, n, ALPHA_GRID).map_err(|e| e.to_string())?;
    let six = protocol_region(Protocol::SixState, &g, n, ALPHA_GRID).map_err(|e| e.to_string())?;
    let ratio = comabc.symmetric_rate() / outer_sym;
    if ratio < 0.98 {
        failures.push(format!("case C: CoMABC at {:.2}% of the outer symmetric rate", 100.0 * ratio));
    }
    let (six4, co4) = (
        Protocol::SixState.boundary(4.0, &g, ALPHA_GRID).map_err(|e| e.to_string())?.rb,
        Protocol::CoMabc.boundary(4.0, &g, ALPHA_GRID).map_err(|e| e.to_string())?.rb,
    );
    if six4 <= co4 {
        failures.push(format!("case C k=4: six-state {six4} <= CoMABC {co4}"));
    }
    if (six.symmetric_rate() - Protocol::SixState.boundary(1.0, &g, ALPHA_GRID).unwrap().rb).abs() > 1e-12 {
        failures.push("case C: region symmetric rate disagrees with the unit ray".into());
    }

    let low = common::low_snr();
    let six_low = protocol_region(Protocol::SixState, &low, n, ALPHA_GRID).map_err(|e| e.to_string())?;
    let co_low = protocol_region(Protocol::CoMabc, &low, n, ALPHA_GRID).map_err(|e| e.to_string())?;
    if six_low.symmetric_rate() <= co_low.symmetric_rate() {
        failures.push(format!("low snr: six-state {} <= CoMABC {}", six_low.symmetric_rate(), co_low.symmetric_rate()));
    }

    let normalized_gap = |g: &ChannelGains| -> Result<f64, String> {
        let outer = outer_region(g, n).map_err(|e| e.to_string())?;
        let six = protocol_region(Protocol::SixState, g, n, ALPHA_GRID).map_err(|e| e.to_string())?;
        let (gap, _) = max_radial_gap(&outer, &six).map_err(|e| e.to_string())?;
        Ok(gap / outer.symmetric_rate())
    };
    let (gap_a, gap_low) = (normalized_gap(&common::case_a())?, normalized_gap(&low)?);
    if gap_a >= gap_low {
        failures.push(format!("normalized gap case A {gap_a} >= low snr {gap_low}"));
    }
    check(
        &failures,
        5,
        format!(
            "case C CoMABC/outer {:.4}, k=4 {six4:.4} > {co4:.4}; low snr {:.4} > {:.4}; gaps {gap_a:.4} < {gap_low:.4}",
            ratio,
            six_low.symmetric_rate(),
            co_low.symmetric_rate()
        ),
    )
}

fn random_lp(rng: &mut impl Rng) -> LinearProgram {
    let n = rng.gen_range(1..=8);
    let m = rng.gen_range(1..=6);
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
    let mut lp = LinearProgram::maximize((0..n).map(|_| rng.gen_range(-5.0..5.0)).collect());
    for i in 0..m {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let ax: f64 = a.iter().zip(&x0).map(|(p, q)| p * q).sum();
        match i % 3 {
            0 => lp.add_constraint(a, Relation::Le, ax + rng.gen_range(0.0..1.0)),
            1 => lp.add_constraint(a, Relation::Ge, ax - rng.gen_range(0.0..1.0)),
            _ => lp.add_constraint(a, Relation::Eq, ax),
        };
    }
    let row: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..5.0)).collect();
    let rx: f64 = row.iter().zip(&x0).map(|(p, q)| p * q).sum();
    lp.add_constraint(row, Relation::Le, rx + 1.0);
    lp
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).into_iter().flatten().flatten() {
        files.insert(entry.file_name().to_string_lossy().into_owned(), fs::read(entry.path()).unwrap_or_default());
    }
    files
}

fn lp_engine() -> Outcome {
    let mut rng = common::rng(99);
    let mut failures = Vec::new();
    for trial in 0..100 {
        let lp = random_lp(&mut rng);
        match (solve_lp(&lp), solve_lp(&dual_of(&lp))) {
            (Ok(p), Ok(d)) if p.status == LpStatus::Optimal && d.status == LpStatus::Optimal => {
                let gap = (p.objective + d.objective).abs();
                if gap > 1e-8 * p.objective.abs().max(1.0) {
                    failures.push(format!("trial {trial}: primal {} dual {}", p.objective, -d.objective));
                }
            }
            (p, d) => failures.push(format!("trial {trial}: {:?} / {:?}", p.map(|s| s.status), d.map(|s| s.status))),
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().to_str().unwrap();
    let run = |sub: &str| -> Result<BTreeMap<String, Vec<u8>>, String> {
        let mut outputs = BTreeMap::new();
        let mut args = vec![sub, "--preset", "case-b", "--theta-points", "61", "--alpha-grid", "17", "--out", out];
        if sub == "thresholds" {
            args = vec![sub, "--out", out];
        }
        let status = Command::new(env!("CARGO_BIN_EXE_twrc")).args(&args).output().map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("twrc {sub} failed: {}", String::from_utf8_lossy(&status.stderr)));
        }
        outputs.insert("stdout".to_string(), status.stdout);
        outputs.extend(snapshot(dir.path()));
        Ok(outputs)
    };
    for sub in ["compare", "thresholds"] {
        let first = run(sub)?;
        let second = run(sub)?;
        if first != second {
            let differing: Vec<&String> = first.keys().filter(|k| first.get(*k) != second.get(*k)).collect();
            failures.push(format!("twrc {sub} output differs between runs: {differing:?}"));
        }
    }
    check(&failures, 102, "100 LPs agree with their duals; CLI output byte-identical".into())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let sweep = run_sweep();
    let criteria: Vec<Criterion> = vec![
        ("symmetric-capacity anchor", Box::new(symmetric_anchor)),
        ("at most four active states", Box::new(four_active_states)),
        ("protocols inside the outer bound", Box::new(|| safety(&sweep))),
        ("protocol nesting", Box::new(|| nesting(&sweep))),
        ("weak duality of the closed forms", Box::new(weak_duality)),
        ("two-hop reduction", Box::new(two_hop)),
        ("ray and weighted outer regions agree", Box::new(formulations_agree)),
        ("direct-link threshold solver", Box::new(thresholds)),
        ("qualitative comparisons", Box::new(qualitative)),
        ("LP engine and CLI determinism", Box::new(lp_engine)),
    ];

    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome =
            std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("acceptance: {} passed, {failed} failed, {total:.1}s", criteria.len() - failed);
    if total >= 60.0 {
        println!("acceptance: run exceeded 60 s");
        failed += 1;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
