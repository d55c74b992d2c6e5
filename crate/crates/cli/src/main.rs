use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qdiv::divergences::{
    d_alpha, f_divergence, relative_entropy, ConvexFunctionSpec, DivergenceResult, FMethod, QMethod, RelEntMethod,
    RenyiOrder,
};
use qdiv::duality::duality_optimum;
use qdiv::error::ErrorClass;
use qdiv::exponents::bounds_grid;
use qdiv::io::{parse_state_file, write_exponents_csv, write_rs_csv, write_sweep_csv};
use qdiv::linalg::StatePair;
use qdiv::rs_dist::{f_div_rs, relative_entropy_rs, rs_table};
use qdiv::suite::{all_criteria, module_checks, SuiteParams};
use qdiv::trace_reps::q_alpha_trace;
use qdiv::{Config, Error, LogBase};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_PROPERTY: u8 = 4;

#[derive(Parser)]
#[command(name = "qdiv", version, about = "Quantum divergences via hockey-stick integral representations")]
struct Cli {
    /// Report logarithmic divergences in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,
    /// Seed for the verify ensembles.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    quad_abs_tol: Option<f64>,
    #[arg(long, global = true)]
    quad_rel_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one divergence and print it as JSON.
    Compute(ComputeArgs),
    /// Tabulate D_alpha over a range of orders for several methods.
    Sweep(SweepArgs),
    /// Tabulate the Riemann-Stieltjes distributions P and Q.
    RsDist(RsDistArgs),
    /// Tabulate the threshold-test error bounds.
    Exponents(ExponentsArgs),
    /// Run the property suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    rho: PathBuf,
    #[arg(long)]
    sigma: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Divergence {
    Renyi,
    F,
    Relent,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, value_enum)]
    divergence: Divergence,
    #[arg(long)]
    alpha: Option<f64>,
    /// kl, chi2, tv, hinge or hellinger (with --alpha).
    #[arg(long = "f")]
    f_name: Option<String>,
    #[arg(long, default_value = "layercake")]
    method: String,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// `lo:hi:step`; the order 1 is skipped.
    #[arg(long)]
    alpha_range: String,
    #[arg(long, value_delimiter = ',', default_value = "layercake,hs_integral,onesided")]
    methods: Vec<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RsDistArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExponentsArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long = "n", value_delimiter = ',', default_value = "1,2,3")]
    ns: Vec<usize>,
    #[arg(long = "a", value_delimiter = ',', allow_hyphen_values = true, default_value = "-0.2,0,0.2")]
    thresholds: Vec<f64>,
    #[arg(long = "alphas", value_delimiter = ',', default_value = "0.5,2")]
    alphas: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    dims: Vec<usize>,
}

fn config(cli: &Cli) -> Result<Config, Error> {
    let mut cfg = Config { seed: cli.seed, ..Config::default() };
    if cli.bits {
        cfg.log_base = LogBase::Two;
    }
    for (v, slot, name) in [
        (cli.quad_abs_tol, &mut cfg.quad_abs_tol, "quad-abs-tol"),
        (cli.quad_rel_tol, &mut cfg.quad_rel_tol, "quad-rel-tol"),
    ] {
        if let Some(v) = v {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidArgument(format!("{name} must be positive")));
            }
            *slot = v;
        }
    }
    Ok(cfg)
}

fn load_pair(args: &PairArgs, cfg: &Config) -> Result<StatePair, Error> {
    let rho = parse_state_file(&args.rho, cfg)?;
    let sigma = parse_state_file(&args.sigma, cfg)?;
    StatePair::new(rho, sigma, cfg)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse<T: FromStr<Err = Error>>(s: &str) -> Result<T, Error> {
    s.parse()
}

fn renyi(pair: &StatePair, alpha: f64, method: &str) -> Result<DivergenceResult, Error> {
    if alpha == 1.0 {
        return match method {
            "renyi_limit" => relative_entropy(pair, RelEntMethod::RenyiLimit),
            _ => Err(Error::Alpha1RequiresLimit),
        };
    }
    let order = RenyiOrder::new(alpha)?;
    if method == "trace" {
        let mut r = q_alpha_trace(pair, order)?;
        r.err_estimate /= r.value * (alpha - 1.0).abs();
        r.value = r.value.ln() / (alpha - 1.0);
        return Ok(r);
    }
    d_alpha(pair, order, parse::<QMethod>(method)?)
}

fn f_div(pair: &StatePair, f: &ConvexFunctionSpec, method: &str) -> Result<DivergenceResult, Error> {
    match method {
        "rs" => f_div_rs(pair, f),
        "duality" => duality_optimum(pair, f),
        m => f_divergence(pair, f, parse::<FMethod>(m)?),
    }
}

fn compute(args: &ComputeArgs, cfg: &Config) -> Result<(), Error> {
    let pair = load_pair(&args.pair, cfg)?;
    let (r, logarithmic) = match args.divergence {
        Divergence::Renyi => {
            let alpha = args.alpha.ok_or_else(|| Error::InvalidArgument("renyi requires --alpha".into()))?;
            (renyi(&pair, alpha, &args.method)?, true)
        }
        Divergence::Relent => {
            let r = match args.method.as_str() {
                "rs" => relative_entropy_rs(&pair)?,
                m => relative_entropy(&pair, parse(m)?)?,
            };
            (r, true)
        }
        Divergence::F => {
            let name = args.f_name.as_deref().ok_or_else(|| Error::InvalidArgument("f requires --f".into()))?;
            let f = ConvexFunctionSpec::by_name(name, args.alpha)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown convex function '{name}'")))?;
            (f_div(&pair, &f, &args.method)?, name == "kl" || name == "xlogx")
        }
    };
    let scale = if logarithmic { cfg.log_base.from_nats() } else { 1.0 };
    let doc = json!({ "value": r.value * scale, "method": r.method, "err_estimate": r.err_estimate * scale });
    println!("{doc}");
    Ok(())
}

fn alpha_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::InvalidArgument(format!("alpha range '{spec}': expected lo:hi:step"));
    let parts: Vec<f64> =
        spec.split(':').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<_, _>>()?;
    let [lo, hi, step] = parts[..] else { return Err(bad()) };
    if !(lo > 0.0 && hi >= lo && step > 0.0) {
        return Err(bad());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    // rounded to the step's precision so printed orders stay exact
    let digits = 12;
    let round = |x: f64| (x * 10f64.powi(digits)).round() / 10f64.powi(digits);
    Ok((0..=n).map(|k| round(lo + k as f64 * step)).filter(|&a| a != 1.0).collect())
}

fn sweep(args: &SweepArgs, cfg: &Config) -> Result<(), Error> {
    let pair = load_pair(&args.pair, cfg)?;
    let alphas = alpha_grid(&args.alpha_range)?;
    for m in &args.methods {
        if m != "trace" {
            parse::<QMethod>(m)?;
        }
    }
    let scale = cfg.log_base.from_nats();
    let rows = alphas
        .iter()
        .map(|&a| {
            let vals =
                args.methods.iter().map(|m| renyi(&pair, a, m).map(|r| r.value * scale)).collect::<Result<_, _>>()?;
            Ok((a, vals))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    write_sweep_csv(output(args.out.as_deref())?, &args.methods, &rows)
}

fn rs_dist(args: &RsDistArgs, cfg: &Config) -> Result<(), Error> {
    let pair = load_pair(&args.pair, cfg)?;
    write_rs_csv(output(args.out.as_deref())?, &rs_table(&pair, args.points)?)
}

fn exponents(args: &ExponentsArgs, cfg: &Config) -> Result<(), Error> {
    let pair = load_pair(&args.pair, cfg)?;
    let rows = bounds_grid(&pair, &args.ns, &args.thresholds, &args.alphas)?;
    write_exponents_csv(output(args.out.as_deref())?, &rows)
}

fn verify(args: &VerifyArgs, cli: &Cli, cfg: &Config) -> Result<bool, Error> {
    let params = SuiteParams::new(args.trials, args.dims.clone(), cli.seed)?;
    let start = Instant::now();
    let mut all_ok = true;
    let mut out = io::stdout().lock();
    let w = |e: io::Error| Error::Io(e.to_string());
    for c in all_criteria(&params, cfg) {
        all_ok &= c.passed();
        writeln!(out, "{}", c.summary()).map_err(w)?;
        for check in &c.checks {
            writeln!(out, "    {check}").map_err(w)?;
        }
    }
    let checks = module_checks(&params, cfg);
    let failing = checks.iter().filter(|c| !c.passed).count();
    all_ok &= failing == 0;
    writeln!(out, "module invariants: {}", if failing == 0 { "PASS" } else { "FAIL" }).map_err(w)?;
    for check in &checks {
        writeln!(out, "    {check}").map_err(w)?;
    }
    writeln!(out, "verify: {} in {:.1}s", if all_ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64())
        .map_err(w)?;
    Ok(all_ok)
}

fn init_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("QDIV_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("QDIV_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool, Error> {
    init_threads()?;
    let cfg = config(cli)?;
    match &cli.command {
        Command::Compute(a) => compute(a, &cfg).map(|_| true),
        Command::Sweep(a) => sweep(a, &cfg).map(|_| true),
        Command::RsDist(a) => rs_dist(a, &cfg).map(|_| true),
        Command::Exponents(a) => exponents(a, &cfg).map(|_| true),
        Command::Verify(a) => verify(a, cli, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_PROPERTY),
        Err(e) => {
            let doc = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{doc}");
            ExitCode::from(match e.class() {
                ErrorClass::Validation => EXIT_VALIDATION,
                ErrorClass::Numerical => EXIT_NUMERICAL,
            })
        }
    }
}
