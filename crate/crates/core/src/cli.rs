use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use geoverify::geodesics::{foliation_geodesic, integrate_geodesic, write_trajectory_csv, GeodesicState};
use geoverify::report::{aggregate, SuiteReport};
use geoverify::suites::{run_suite, RationalSlope, Suite, SuiteOptions, DEFAULT_SEED};
use geoverify::{AmbientPoint, ChartPoint, GeoError, ModelConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "geoverify", version, about = "Numerical certification of a convex 4-ball metric without closed geodesics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// ModelConfig JSON file; defaults are used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the slope α.
    #[arg(long)]
    alpha: Option<f64>,
    /// Rational slope `p/q` for the control metric.
    #[arg(long = "alpha-rational")]
    alpha_rational: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite and report every check.
    Verify {
        /// metric, convexity, geodesics, varifold or all.
        suite_name: Option<String>,
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Number of closed-geodesic search seeds.
        #[arg(long, default_value_t = 10_000)]
        seeds: usize,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Integrate one geodesic and write the trajectory CSV.
    Trace {
        #[command(flatten)]
        model: ModelArgs,
        /// Start on the Clifford torus along the unit leaf field.
        #[arg(long, conflicts_with_all = ["chart", "ambient", "vel"])]
        foliation: bool,
        /// Leaf start angles `φ0,θ0` for `--foliation`.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        angles: String,
        /// Chart start `ρ,ψ,φ,θ`.
        #[arg(long, conflicts_with = "ambient", allow_hyphen_values = true)]
        chart: Option<String>,
        /// Cartesian start `x1,x2,x3,x4`.
        #[arg(long, allow_hyphen_values = true)]
        ambient: Option<String>,
        /// Initial velocity, in the basis of the start form.
        #[arg(long, allow_hyphen_values = true)]
        vel: Option<String>,
        /// Integration time.
        #[arg(long = "t", default_value_t = 10.0)]
        duration: f64,
        /// Step size; defaults to the configured step.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Merge SuiteReport JSON files into a markdown summary.
    Report {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn usage(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn load_model(m: &ModelArgs) -> Result<(ModelConfig, Option<RationalSlope>), GeoError> {
    let mut cfg = match &m.config {
        Some(p) => ModelConfig::load(p)?,
        None => ModelConfig::default(),
    };
    if let Some(a) = m.alpha {
        cfg.alpha = a;
    }
    let slope = m.alpha_rational.as_deref().map(str::parse::<RationalSlope>).transpose()?;
    cfg.check()?;
    Ok((cfg, slope))
}

fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(p) => fs::write(p, text),
        None => io::stdout().write_all(text.as_bytes()),
    }
}

fn parse_vec4(s: &str, what: &str) -> Result<[f64; 4], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("{what} `{s}` is not a comma-separated list of numbers"))?;
    let v: [f64; 4] = parts.try_into().map_err(|_| format!("{what} `{s}` needs exactly four components"))?;
    if v.iter().all(|c| c.is_finite()) {
        Ok(v)
    } else {
        Err(format!("{what} `{s}` has non-finite components"))
    }
}

fn threads_from_env() -> Result<(), String> {
    let Ok(v) = std::env::var("GEOVERIFY_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("GEOVERIFY_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    if let Err(e) = threads_from_env() {
        return usage(e);
    }
    match cli.command {
        Command::Verify {
            suite_name,
            suite,
            model,
            seed,
            seeds,
            out,
            format,
        } => verify(suite_name.or(suite), &model, seed, seeds, out.as_deref(), format),
        Command::Trace {
            model,
            foliation,
            angles,
            chart,
            ambient,
            vel,
            duration,
            step,
            out,
            format,
        } => {
            if format != Format::Csv {
                return usage("trace writes CSV only");
            }
            trace(&model, foliation, &angles, chart, ambient, vel, duration, step, out.as_deref())
        }
        Command::Report { inputs, out } => report(&inputs, out.as_deref()),
    }
}

fn verify(suite: Option<String>, model: &ModelArgs, seed: u64, seeds: usize, out: Option<&Path>, format: Format) -> i32 {
    let suite: Suite = match suite.as_deref().unwrap_or("all").parse() {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let (cfg, slope) = match load_model(model) {
        Ok(x) => x,
        Err(e) => return usage(e),
    };
    if seeds == 0 {
        return usage("--seeds must be at least 1");
    }
    let mut opts = SuiteOptions {
        seed,
        search_seeds: seeds,
        ..SuiteOptions::default()
    };
    if let Some(s) = slope {
        opts.control = s;
    }
    let report = match run_suite(suite, &cfg, &opts) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    if let Some(p) = out {
        if let Err(e) = fs::write(p, report.to_json() + "\n") {
            return usage(format!("cannot write {}: {e}", p.display()));
        }
    }
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Table => report.to_table(),
        Format::Csv => report.to_csv(),
    };
    let _ = emit(None, &text);
    if report.pass { EXIT_PASS } else { EXIT_FAIL }
}

#[allow(clippy::too_many_arguments)]
fn trace(
    model: &ModelArgs,
    foliation: bool,
    angles: &str,
    chart: Option<String>,
    ambient: Option<String>,
    vel: Option<String>,
    duration: f64,
    step: Option<f64>,
    out: Option<&Path>,
) -> i32 {
    let (mut cfg, slope) = match load_model(model) {
        Ok(x) => x,
        Err(e) => return usage(e),
    };
    if let Some(s) = slope {
        cfg.alpha = s.value();
        cfg.alpha_rational = true;
    }
    if let Some(h) = step {
        if !(h > 0.0 && h.is_finite()) {
            return usage("--step must be positive");
        }
        cfg.integrator.step = h;
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return usage("--t must be positive");
    }
    let start = if foliation {
        let a: Vec<f64> = match angles.split(',').map(|x| x.trim().parse()).collect() {
            Ok(a) => a,
            Err(_) => return usage(format!("--angles `{angles}` must be `φ0,θ0`")),
        };
        if a.len() != 2 {
            return usage(format!("--angles `{angles}` must be `φ0,θ0`"));
        }
        foliation_geodesic(0.0, a[0], a[1], &cfg)
    } else {
        let v = match vel.as_deref().map(|v| parse_vec4(v, "--vel")) {
            Some(Ok(v)) => v,
            Some(Err(e)) => return usage(e),
            None => return usage("--vel is required with --chart or --ambient"),
        };
        match (chart, ambient) {
            (Some(c), None) => match parse_vec4(&c, "--chart") {
                Ok([rho, psi, phi, theta]) => {
                    let p = ChartPoint::new(rho, psi, phi, theta);
                    if !p.within_margins() {
                        return usage(format!("chart start {c} lies outside the chart domain"));
                    }
                    GeodesicState::Chart { position: p, velocity: v }
                }
                Err(e) => return usage(e),
            },
            (None, Some(a)) => match parse_vec4(&a, "--ambient") {
                Ok(x) => {
                    let x = AmbientPoint { x };
                    if x.norm() > 2.0 {
                        return usage(format!("ambient start {a} lies outside the ball of radius 2"));
                    }
                    GeodesicState::Ambient { position: x, velocity: v }
                }
                Err(e) => return usage(e),
            },
            _ => return usage("give exactly one of --foliation, --chart or --ambient"),
        }
    };
    let tr = match integrate_geodesic(start, duration, &cfg) {
        Ok(t) => t,
        Err(e @ GeoError::StepTooLarge { .. }) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
        Err(e) => return usage(e),
    };
    let mut buf = Vec::new();
    if let Err(e) = write_trajectory_csv(&tr, &mut buf) {
        return usage(e);
    }
    match emit(out, &String::from_utf8_lossy(&buf)) {
        Ok(()) => EXIT_PASS,
        Err(e) => usage(e),
    }
}

fn report(inputs: &[PathBuf], out: Option<&Path>) -> i32 {
    if inputs.is_empty() {
        return usage("report needs at least one SuiteReport JSON file");
    }
    let mut reports = Vec::new();
    for p in inputs {
        let text = match fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => return usage(format!("{}: {e}", p.display())),
        };
        match serde_json::from_str::<SuiteReport>(&text) {
            Ok(r) if r.is_consistent() => reports.push(r),
            Ok(_) => return usage(format!("{}: overall pass disagrees with its checks", p.display())),
            Err(e) => return usage(format!("{}: not a SuiteReport: {e}", p.display())),
        }
    }
    let agg = aggregate(&reports);
    if agg.duplicates > 0 {
        eprintln!("warning: ignored {} duplicate report(s)", agg.duplicates);
    }
    if let Err(e) = emit(out, &agg.markdown) {
        return usage(e);
    }
    if agg.pass { EXIT_PASS } else { EXIT_FAIL }
}
