use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use twrc::cli::{self, Curve, Scenario};
use twrc::Error;

#[derive(Parser)]
#[command(name = "twrc", version, about = "Rate regions of the half-duplex Gaussian two-way relay channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Outer bound and every requested protocol, as CSV files plus summary.json.
    Compare(RunArgs),
    /// Numerical and closed-form outer bounds only.
    Outer(RunArgs),
    /// A single protocol region as CSV (stdout unless --out is given).
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Protocol or bound to sweep.
        #[arg(long, default_value = "six-state")]
        protocol: String,
    },
    /// Direct-link thresholds with gamma1 = c * gamma2.
    Thresholds {
        /// gamma2 range in dB as lo:hi:step.
        #[arg(long, default_value = "0:40:1")]
        gamma2_db: String,
        /// Ratios c = gamma1 / gamma2 in (0, 1].
        #[arg(long = "c", value_delimiter = ',', default_value = "1,0.5,0.1")]
        c_values: Vec<f64>,
        /// Output directory for thresholds.csv; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with_all = ["preset", "gains_db"])]
    scenario: Option<PathBuf>,
    /// Built-in scenario: case-a, case-b, case-c or low-snr.
    #[arg(long, conflicts_with = "gains_db")]
    preset: Option<String>,
    /// Gains in dB as g1,g2,g3.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    gains_db: Option<Vec<f64>>,
    /// Number of rays from the Rb axis to the Ra axis (default 181).
    #[arg(long)]
    theta_points: Option<usize>,
    /// Power-split grid size for the 6-state DF search (default 33).
    #[arg(long)]
    alpha_grid: Option<usize>,
    /// Relabel nodes a and b when gamma1 > gamma2.
    #[arg(long, num_args = 0..=1, default_value = "true", default_missing_value = "true")]
    auto_swap: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn scenario(&self) -> Result<Scenario, Error> {
        let mut s = match (&self.scenario, &self.preset, &self.gains_db) {
            (Some(path), _, _) => cli::load_scenario(path)?,
            (_, Some(name), _) => cli::preset(name)?,
            (_, _, Some(g)) if g.len() == 3 => {
                Scenario::new("custom", (g[0], g[1], g[2]), &["all"], "twrc-out/custom")?
            }
            (_, _, Some(g)) => return Err(Error::Validation(format!("--gains-db needs 3 values, got {}", g.len()))),
            _ => return Err(Error::Validation("one of --scenario, --preset or --gains-db is required".into())),
        };
        if let Some(n) = self.theta_points {
            s.theta_points = n;
        }
        if let Some(n) = self.alpha_grid {
            s.alpha_grid = n;
        }
        if let Some(dir) = &self.out {
            s.outputs = dir.clone();
        }
        s.auto_swap = self.auto_swap;
        s.validate()?;
        Ok(s)
    }
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("{}", f.display());
    }
}

fn stdout_write(text: &str) -> Result<(), Error> {
    std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io { path: "<stdout>".into(), source: e })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Compare(args) => {
            let out = cli::run_compare(&args.scenario()?)?;
            print_files(&out.files);
        }
        Command::Outer(args) => {
            let mut s = args.scenario()?;
            s.curves = vec![Curve::Outer, Curve::OuterAnalytic];
            let out = cli::run_compare(&s)?;
            print_files(&out.files);
        }
        Command::Sweep { run, protocol } => {
            let curve: Curve = protocol.parse()?;
            let s = run.scenario()?;
            let region = cli::sweep_curve(&s, curve)?;
            let text = cli::region_csv(curve, &region);
            match &run.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
                    let path = dir.join(format!("{}.csv", curve.id()));
                    std::fs::write(&path, text).map_err(|e| Error::Io { path: path.clone(), source: e })?;
                    print_files(&[path]);
                }
                None => stdout_write(&text)?,
            }
        }
        Command::Thresholds { gamma2_db, c_values, out } => {
            let range = cli::parse_range(&gamma2_db)?;
            match out {
                Some(dir) => print_files(&[cli::run_thresholds(range, &c_values, &dir)?]),
                None => stdout_write(&cli::thresholds_csv(&cli::threshold_table(range, &c_values)?))?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("twrc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
