use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use minkpoly::connection::{coordinate_field, loglog_slope, nijenhuis_norm};
use minkpoly::harness::plot::{loglog_svg, Series};
use minkpoly::harness::{parse_tolerance, run_suite, SuiteConfig};
use minkpoly::io::{read_ambient, read_polygon, read_tangent, write_ambient, write_tangent};
use minkpoly::kaehler::{project_normal, project_tangent, AmbientVector};
use minkpoly::mink3::MinkVector;
use minkpoly::polygon::{sample, serialize, Polygon, SampleOptions};
use minkpoly::tangent::{build_L, calibrate, slice_dimension};
use minkpoly::Error;

const SEED_ENV: &str = "MINKPOLY_SEED";

#[derive(Parser)]
#[command(name = "minkpoly", version, about = "Closed polygons with time-like edges in Minkowski 3-space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a closed polygon with prescribed masses.
    Sample {
        #[arg(long)]
        n: usize,
        /// Edge masses; a single value is broadcast.
        #[arg(long, default_values_t = [1.0])]
        mass: Vec<f64>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification suite. Tolerances can be overridden with --tol.<check>=<value>.
    Verify {
        /// Polygon document; polygons are sampled when absent.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Comma-separated groups or check ids, or "all".
        #[arg(long, default_value = "all", value_delimiter = ',')]
        suite: Vec<String>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        /// Finite-difference steps in units of the mean mass.
        #[arg(long, value_delimiter = ',')]
        h: Vec<f64>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Print masses, constraint residuals, collinearity and slice dimension.
    Inspect {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Step sweep of the Nijenhuis tensor over random coordinate fields.
    Nijenhuis {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-2, 1e-3, 1e-4])]
        h: Vec<f64>,
        /// Number of random field pairs.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        seed: SeedArg,
        /// Write an SVG convergence plot.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Gauge-fix a tangent document.
    Calibrate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split an ambient-vector document into tangent and normal parts.
    Project {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit the normal part instead of the calibrated tangent part.
        #[arg(long)]
        normal: bool,
    },
}

#[derive(Args)]
struct SeedArg {
    /// Overridden by MINKPOLY_SEED when set.
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl SeedArg {
    fn resolve(&self, default: u64) -> Result<u64, Failure> {
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("{SEED_ENV} is not an unsigned integer: {v}"))),
            Err(_) => Ok(self.seed.unwrap_or(default)),
        }
    }
}

/// Pulls `--tol.<name>=<v>` and `--tol.<name> <v>` out of the argument list.
fn split_tolerances(args: Vec<String>) -> Result<(Vec<String>, BTreeMap<String, f64>), Failure> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tols = BTreeMap::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if !a.starts_with("--tol.") {
            rest.push(a);
            continue;
        }
        let (name, value) = match a.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| Failure::Usage(format!("{a} needs a value")))?;
                (a, v)
            }
        };
        let (k, v) = parse_tolerance(&name, &value)?;
        tols.insert(k, v);
    }
    Ok((rest, tols))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, format!("{}\n", text.trim_end()))
            .map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            // A closed pipe (e.g. `| head`) is not an error.
            let _ = writeln!(std::io::stdout().lock(), "{}", text.trim_end());
            Ok(())
        }
    }
}

fn read_text(p: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
}

fn load_polygon(p: &Path) -> Result<Polygon, Failure> {
    read_polygon(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
}

fn masses_for(n: usize, mass: &[f64]) -> Result<Vec<f64>, Failure> {
    match mass.len() {
        1 => Ok(vec![mass[0]; n]),
        k if k == n => Ok(mass.to_vec()),
        k => Err(Failure::Usage(format!("--mass given {k} times for n = {n}; give one value or n values"))),
    }
}

fn run(cli: Cli, tolerances: BTreeMap<String, f64>) -> Result<(), Failure> {
    if !tolerances.is_empty() && !matches!(cli.command, Command::Verify { .. }) {
        return Err(Failure::Usage("--tol.<name> only applies to verify".into()));
    }
    match cli.command {
        Command::Sample { n, mass, seed, out } => {
            let masses = masses_for(n, &mass)?;
            let p = sample(n, &masses, seed.resolve(0)?, &SampleOptions::default())?;
            emit(out.as_deref(), &serialize(&p))
        }
        Command::Verify { input, suite, report, trials, n, h, seed } => {
            let mut cfg = SuiteConfig { tolerances, checks: suite, seed: seed.resolve(1)?, ..SuiteConfig::default() };
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if !n.is_empty() {
                cfg.n_range = n;
            }
            if !h.is_empty() {
                cfg.h_values = h;
            }
            if let Some(path) = input {
                let p = load_polygon(&path)?;
                cfg.n_range = vec![p.n()];
                cfg.input = Some(path.display().to_string());
                cfg.polygon = Some(Arc::new(p));
            }
            let r = run_suite(&cfg)?;
            for c in &r.checks {
                let mark = if c.pass { "PASS" } else if c.gating { "FAIL" } else { "info" };
                println!("{mark} {:<36} {:>11.3e}  tol {:.1e}", c.id, c.max_residual, c.tolerance);
                for e in c.errors.iter().take(3) {
                    println!("     {e}");
                }
            }
            println!("verdict: {}", if r.passed() { "pass" } else { "fail" });
            if let Some(path) = report {
                emit(Some(&path), &r.to_json())?;
            }
            if r.passed() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Inspect { input } => {
            let p = Arc::new(load_polygon(&input)?);
            let deg = p.degeneracy();
            let mass_res = p.iter().map(|(e, m)| (e.norm_sq() - m * m).abs()).fold(0.0, f64::max);
            println!("n: {}", p.n());
            if let Some(label) = p.label() {
                println!("label: {label}");
            }
            println!("masses: {:?}", p.masses());
            println!("closure residual: {:.3e}", p.closure_defect().norm_inf());
            println!("mass-shell residual: {mass_res:.3e}");
            println!("min pair bracket norm: {:.3e}", deg.min_bracket_norm);
            println!("collinear: {}", deg.collinear);
            println!("L conditioning: {:.3e}", build_L(&p).conditioning());
            match slice_dimension(&p) {
                Ok(d) => println!("calibrated slice dimension: {d} (2n-6 = {})", 2 * p.n() - 6),
                Err(e) => println!("calibrated slice dimension: unavailable ({e})"),
            }
            Ok(())
        }
        Command::Nijenhuis { input, h, trials, seed, plot } => {
            if h.is_empty() || h.iter().any(|x| !(*x > 0.0)) {
                return Err(Failure::Usage("--h values must be positive".into()));
            }
            let p = Arc::new(load_polygon(&input)?);
            let mut rng = ChaCha8Rng::seed_from_u64(seed.resolve(1)?);
            let mut random = || {
                AmbientVector::new(
                    (0..p.n())
                        .map(|_| {
                            MinkVector::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                        })
                        .collect(),
                )
            };
            let pairs: Vec<_> = (0..trials.max(1)).map(|_| (coordinate_field(random()), coordinate_field(random()))).collect();
            let steps: Vec<f64> = h.iter().map(|x| x * p.mean_mass()).collect();
            println!("{:>10}  {:>12}  {:>12}", "h", "max |N_I|_g", "median");
            let mut maxes = Vec::new();
            let mut medians = Vec::new();
            for &step in &steps {
                let mut norms = pairs
                    .iter()
                    .map(|(x, y)| nijenhuis_norm(x, y, &p, step))
                    .collect::<Result<Vec<f64>, _>>()?;
                norms.sort_by(f64::total_cmp);
                let max = *norms.last().unwrap_or(&0.0);
                let median = norms[norms.len() / 2];
                println!("{step:>10.1e}  {max:>12.3e}  {median:>12.3e}");
                maxes.push(max);
                medians.push(median);
            }
            match loglog_slope(&steps, &maxes) {
                Some(s) => println!("fitted order: {s:.2}"),
                None => println!("fitted order: n/a (at rounding floor)"),
            }
            if let Some(path) = plot {
                let series = [
                    Series { label: "max |N_I|_g".into(), points: steps.iter().copied().zip(maxes).collect() },
                    Series { label: "median |N_I|_g".into(), points: steps.iter().copied().zip(medians).collect() },
                ];
                emit(Some(&path), &loglog_svg(&format!("Nijenhuis tensor, n = {}", p.n()), &series))?;
            }
            Ok(())
        }
        Command::Calibrate { input, out } => {
            let q = read_tangent(&read_text(&input)?, input.parent())?;
            emit(out.as_deref(), &write_tangent(&calibrate(&q)?))
        }
        Command::Project { input, out, normal } => {
            let (base, x) = read_ambient(&read_text(&input)?, input.parent())?;
            if normal {
                emit(out.as_deref(), &write_ambient(&base, &project_normal(&x, &base)?))
            } else {
                emit(out.as_deref(), &write_tangent(&project_tangent(&x, &base)?))
            }
        }
    }
}

fn main() -> ExitCode {
    let outcome = split_tolerances(std::env::args().collect()).and_then(|(args, tols)| {
        let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
        run(cli, tols)
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
