//! Scenario files, presets and file emission behind the `twrc` binary.
//!
//! A scenario is a small TOML file:
//!
//! ```toml
//! name = "case-a"
//! gamma1_db = 10.0
//! gamma2_db = 15.0
//! gamma3_db = 3.0
//! theta_points = 181         # optional
//! alpha_grid = 33            # optional
//! protocols = ["all"]        # optional; the outer bound is always included
//! outputs = "out/case-a"     # optional
//! ```

mod format;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use format::{fmt_g12, round_g12, write_region_csv, REGION_HEADER};

use crate::achievable::{Protocol, DEFAULT_ALPHA_GRID};
use crate::channel::{db_to_linear, linear_to_db, validate_gains, ChannelGains};
use crate::error::{Error, Result};
use crate::outer::capacity_thresholds;
use crate::region::{
    max_radial_gap, outer_analytic_region, outer_region, protocol_region, Region, DEFAULT_THETA_POINTS,
};

/// Version of the `summary.json` layout.
pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

/// A region that can be swept: one of the outer bounds or a protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Curve {
    Outer,
    OuterAnalytic,
    Protocol(Protocol),
}

impl Curve {
    pub fn id(self) -> &'static str {
        match self {
            Curve::Outer => "outer",
            Curve::OuterAnalytic => "outer-analytic",
            Curve::Protocol(p) => p.id(),
        }
    }

    /// Whether rows carry LP time shares (closed-form bounds have none).
    pub fn has_shares(self) -> bool {
        self != Curve::OuterAnalytic
    }

    /// Sweep this curve on `gains` (which must satisfy the ordering rules).
    pub fn sweep(self, gains: &ChannelGains, theta_points: usize, alpha_grid: usize) -> Result<Region> {
        match self {
            Curve::Outer => outer_region(gains, theta_points),
            Curve::OuterAnalytic => outer_analytic_region(gains, theta_points),
            Curve::Protocol(p) => protocol_region(p, gains, theta_points, alpha_grid),
        }
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Curve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "outer" => Ok(Curve::Outer),
            "outer-analytic" => Ok(Curve::OuterAnalytic),
            other => other.parse().map(Curve::Protocol).map_err(|_| {
                Error::Validation(format!(
                    "unknown protocol {other:?}; expected outer, outer-analytic, {} or all",
                    Protocol::ALL.map(|p| p.id()).join(", ")
                ))
            }),
        }
    }
}

/// Expand protocol identifiers (`"all"` means every protocol) into the curves
/// to compute. The outer bound always comes first; duplicates are dropped.
pub fn resolve_curves<S: AsRef<str>>(ids: &[S]) -> Result<Vec<Curve>> {
    let mut curves = vec![Curve::Outer];
    for id in ids {
        let id = id.as_ref();
        let add: Vec<Curve> =
            if id == "all" { Protocol::ALL.iter().map(|p| Curve::Protocol(*p)).collect() } else { vec![id.parse()?] };
        for c in add {
            if !curves.contains(&c) {
                curves.push(c);
            }
        }
    }
    Ok(curves)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    gamma1_db: f64,
    gamma2_db: f64,
    gamma3_db: f64,
    theta_points: Option<usize>,
    alpha_grid: Option<usize>,
    protocols: Option<Vec<String>>,
    outputs: Option<PathBuf>,
}

/// A validated run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub gamma1_db: f64,
    pub gamma2_db: f64,
    pub gamma3_db: f64,
    pub theta_points: usize,
    pub alpha_grid: usize,
    #[serde(rename = "protocols", serialize_with = "serialize_curves")]
    pub curves: Vec<Curve>,
    pub outputs: PathBuf,
    pub auto_swap: bool,
}

fn serialize_curves<S: serde::Serializer>(curves: &[Curve], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(curves.iter().map(|c| c.id()))
}

impl Scenario {
    /// Build and validate a scenario. Empty `protocols` means the outer bound only.
    pub fn new<S: AsRef<str>>(
        name: impl Into<String>,
        gains_db: (f64, f64, f64),
        protocols: &[S],
        outputs: impl Into<PathBuf>,
    ) -> Result<Self> {
        let s = Scenario {
            name: name.into(),
            gamma1_db: gains_db.0,
            gamma2_db: gains_db.1,
            gamma3_db: gains_db.2,
            theta_points: DEFAULT_THETA_POINTS,
            alpha_grid: DEFAULT_ALPHA_GRID,
            curves: resolve_curves(protocols)?,
            outputs: outputs.into(),
            auto_swap: true,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [("gamma1_db", self.gamma1_db), ("gamma2_db", self.gamma2_db), ("gamma3_db", self.gamma3_db)] {
            if !v.is_finite() {
                return Err(Error::Validation(format!("{key} must be finite, got {v}")));
            }
        }
        if self.theta_points < 3 {
            return Err(Error::Validation(format!("theta_points must be >= 3, got {}", self.theta_points)));
        }
        if self.alpha_grid < 2 {
            return Err(Error::Validation(format!("alpha_grid must be >= 2, got {}", self.alpha_grid)));
        }
        self.gains().map(|_| ())
    }

    /// Linear gains, relabelled if `auto_swap` is on and `gamma1 > gamma2`.
    pub fn gains(&self) -> Result<ChannelGains> {
        ChannelGains::from_db(self.gamma1_db, self.gamma2_db, self.gamma3_db, self.auto_swap)
    }
}

/// Read and validate a scenario file. CLI defaults apply (auto-swap on).
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse { path: path.to_path_buf(), message },
        other => other,
    })
}

/// Parse scenario text. Parse errors carry the line and column.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse {
        path: PathBuf::from("<scenario>"),
        message: e.to_string().trim_end().to_string(),
    })?;
    let protocols = raw.protocols.unwrap_or_default();
    let outputs = raw.outputs.unwrap_or_else(|| PathBuf::from("twrc-out").join(&raw.name));
    let mut s = Scenario::new(raw.name, (raw.gamma1_db, raw.gamma2_db, raw.gamma3_db), &protocols, outputs)?;
    if let Some(n) = raw.theta_points {
        s.theta_points = n;
    }
    if let Some(n) = raw.alpha_grid {
        s.alpha_grid = n;
    }
    s.validate()?;
    Ok(s)
}

/// Preset names accepted by [`preset`].
pub const PRESETS: [&str; 4] = ["case-a", "case-b", "case-c", "low-snr"];

/// Built-in channel presets, all protocols, outputs under `twrc-out/<name>`.
pub fn preset(name: &str) -> Result<Scenario> {
    let gains = match name {
        "case-a" => (10.0, 15.0, 3.0),
        "case-b" => (20.0, 20.0, 8.0),
        "case-c" => (30.0, 35.0, 13.0),
        "low-snr" => (0.0, 5.0, -7.0),
        other => {
            return Err(Error::Validation(format!("unknown preset {other:?}; expected one of {}", PRESETS.join(", "))))
        }
    };
    Scenario::new(name, gains, &["all"], PathBuf::from("twrc-out").join(name))
}

/// Regions of a scenario in the caller's labelling of nodes a and b.
pub fn compute_regions(scenario: &Scenario) -> Result<Vec<(Curve, Region)>> {
    scenario.curves.iter().map(|&curve| Ok((curve, sweep_curve(scenario, curve)?))).collect()
}

/// One curve of a scenario, mirrored back if the gains were relabelled.
pub fn sweep_curve(scenario: &Scenario, curve: Curve) -> Result<Region> {
    let gains = scenario.gains()?;
    let region = curve.sweep(&gains, scenario.theta_points, scenario.alpha_grid)?;
    Ok(if gains.swapped() { region.mirrored() } else { region })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSummary {
    pub symmetric_rate: f64,
    pub sum_rate_max: f64,
    pub max_gap_vs_outer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub protocols: BTreeMap<String, CurveSummary>,
}

/// Summary statistics of computed regions; the first region must be the outer bound.
pub fn summarize(scenario: &Scenario, regions: &[(Curve, Region)]) -> Result<Summary> {
    let outer = regions
        .iter()
        .find(|(c, _)| *c == Curve::Outer)
        .map(|(_, r)| r)
        .ok_or_else(|| Error::Validation("summary needs the outer bound".into()))?;
    let mut protocols = BTreeMap::new();
    for (curve, region) in regions {
        let gap = max_radial_gap(outer, region)?.0;
        protocols.insert(
            curve.id().to_string(),
            CurveSummary {
                symmetric_rate: round_g12(region.symmetric_rate()),
                sum_rate_max: round_g12(region.sum_rate_max()),
                max_gap_vs_outer: round_g12(gap),
            },
        );
    }
    Ok(Summary { schema_version: SUMMARY_SCHEMA_VERSION, scenario: scenario.clone(), protocols })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Render a region as CSV text.
pub fn region_csv(curve: Curve, region: &Region) -> String {
    let mut buf = Vec::new();
    write_region_csv(&mut buf, region, curve.has_shares()).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is UTF-8")
}

/// Files written by [`run_compare`].
#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub files: Vec<PathBuf>,
    pub summary: Summary,
}

/// Sweep every curve of the scenario and write `<curve>.csv` files plus
/// `summary.json` into the scenario's output directory.
pub fn run_compare(scenario: &Scenario) -> Result<CompareOutput> {
    scenario.validate()?;
    let regions = compute_regions(scenario)?;
    let summary = summarize(scenario, &regions)?;
    let dir = &scenario.outputs;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for (curve, region) in &regions {
        let path = dir.join(format!("{}.csv", curve.id()));
        write_file(&path, region_csv(*curve, region).as_bytes())?;
        files.push(path);
    }
    let path = dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    write_file(&path, json.as_bytes())?;
    files.push(path);
    Ok(CompareOutput { files, summary })
}

/// Parse `lo:hi:step`.
pub fn parse_range(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Parameter(format!("range {s:?} is not lo:hi:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    Ok((v[0], v[1], v[2]))
}

/// One row of the threshold table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRow {
    pub c: f64,
    pub gamma2_db: f64,
    pub threshold_db: f64,
}

/// Direct-link thresholds for `gamma1 = c * gamma2` over a range of `gamma2` in dB.
pub fn threshold_table(range: (f64, f64, f64), c_values: &[f64]) -> Result<Vec<ThresholdRow>> {
    let (lo, hi, step) = range;
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || lo > hi || step <= 0.0 {
        return Err(Error::Parameter(format!("need finite lo <= hi and step > 0, got {lo}:{hi}:{step}")));
    }
    if c_values.is_empty() {
        return Err(Error::Parameter("no c values given".into()));
    }
    let steps = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut rows = Vec::new();
    for &c in c_values {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::Parameter(format!("c must lie in (0, 1], got {c}")));
        }
        for i in 0..=steps {
            let g2_db = lo + i as f64 * step;
            let g2 = db_to_linear(g2_db)?;
            let gains = validate_gains(c * g2, g2, 0.0, false)?;
            let th = capacity_thresholds(&gains)?
                .operative()
                .ok_or_else(|| Error::Parameter(format!("no threshold found at gamma2 = {g2_db} dB")))?;
            rows.push(ThresholdRow { c, gamma2_db: g2_db, threshold_db: linear_to_db(th)? });
        }
    }
    Ok(rows)
}

pub fn thresholds_csv(rows: &[ThresholdRow]) -> String {
    let mut out = String::from("c,gamma2_db,threshold_db\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", fmt_g12(r.c), fmt_g12(r.gamma2_db), fmt_g12(r.threshold_db)));
    }
    out
}

/// Compute the threshold table and write `thresholds.csv` into `dir`.
pub fn run_thresholds(range: (f64, f64, f64), c_values: &[f64], dir: &Path) -> Result<PathBuf> {
    let rows = threshold_table(range, c_values)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("thresholds.csv");
    write_file(&path, thresholds_csv(&rows).as_bytes())?;
    Ok(path)
}
