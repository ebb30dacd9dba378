use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use l1lab::certify::{check_weak_robustness, compute_kappa, critical_c, RobustnessCertificate};
use l1lab::lab::experiments::linspace;
use l1lab::lab::io::{
    read_matrix_csv, read_signal, read_vector_csv, write_campaign_csv, write_curve_csv, write_json, write_matrix_csv,
    write_signal, write_sweep_csv, write_trials_csv, write_vector_csv,
};
use l1lab::lab::{
    estimate_delta_c, estimate_rho_f, run_certificate_campaign, sweep_figure1, CampaignConfig, DeltaCConfig, RhoConfig,
    RunOptions, SweepConfig, TrialRecord, SCHEMA_VERSION,
};
use l1lab::recover::{
    recover_l1, recover_weighted, relative_l2_error, reweight_candes, reweight_modified, Algorithm, RecoveryResult,
    WeightVector, DEFAULT_EPS_PRIME, DEFAULT_WEIGHT,
};
use l1lab::sampling::sample_gaussian_matrix;
use l1lab::signals::generate_model_signal;
use l1lab::{DenseMatrix, Error, Result, Seed};

#[derive(Parser)]
#[command(name = "l1lab", version, about = "Sparse recovery experiments: ℓ1, reweighted ℓ1 and null-space certificates")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Master seed; every random draw derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Signal length.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Number of measurements (overrides --delta).
    #[arg(long, global = true)]
    m: Option<usize>,
    /// Undersampling ratio m/n.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Trials per grid point (instances for certify-campaign).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Write runtime_ms as 0 in trial logs.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an m×n matrix with i.i.d. standard normal entries.
    GenMatrix,
    /// Draw a strong-set-plus-tail signal; CSV output also writes a metadata sidecar.
    GenSignal(GenSignalArgs),
    /// Recover x from y = A x.
    Solve(SolveArgs),
    /// Balance constant of a matrix for an index set.
    Kappa(KappaArgs),
    /// Weak-robustness check for a fixed C, or the largest C that works.
    Robustness(RobustnessArgs),
    /// Plain-ℓ1 success against ρ = k/m.
    PhaseRho(PhaseRhoArgs),
    /// Weighted-ℓ1 success against δ for two-class signals.
    PhaseDeltaC(PhaseDeltaCArgs),
    /// Recoverable sparsity factor of the two-stage algorithm against P₁.
    SweepFig1(SweepArgs),
    /// Certificates and bound checks on random instances.
    CertifyCampaign(CampaignArgs),
}

#[derive(Args)]
struct GenSignalArgs {
    #[arg(long)]
    k_strong: usize,
    /// Total nonzeros; defaults to k_strong.
    #[arg(long)]
    k_total: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    a1: f64,
    /// ℓ1 mass of the tail entries.
    #[arg(long, default_value_t = 0.0)]
    tail: f64,
}

#[derive(Args)]
struct MatrixSource {
    /// Matrix CSV; a Gaussian matrix from --seed, --n and --m/--delta otherwise.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: MatrixSource,
    /// Measurement vector, one value per line.
    #[arg(long, conflicts_with = "signal")]
    y: Option<PathBuf>,
    /// Signal CSV (with sidecar) to measure and compare against.
    #[arg(long)]
    signal: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AlgoArg::L1)]
    algo: AlgoArg,
    /// Positive weights, one per line; plain ℓ1 then solves the weighted problem.
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_EPS_PRIME)]
    eps_prime: f64,
    #[arg(long, default_value_t = 4)]
    t_max: usize,
    /// Weight outside the selected set for the two-stage algorithm.
    #[arg(long = "W", default_value_t = DEFAULT_WEIGHT)]
    w: f64,
    /// Size of the selected set; defaults to the signal's strong-set size.
    #[arg(long)]
    k_strong: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    L1,
    Candes,
    Modified,
}

#[derive(Args)]
struct KappaArgs {
    #[command(flatten)]
    source: MatrixSource,
    /// Comma-separated 0-based indices.
    #[arg(long, value_delimiter = ',')]
    set: Vec<usize>,
}

#[derive(Args)]
struct RobustnessArgs {
    #[command(flatten)]
    source: MatrixSource,
    #[arg(long, value_delimiter = ',')]
    set: Vec<usize>,
    /// Values of x on the set, in the same order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x_k: Vec<f64>,
    #[arg(long = "C", conflicts_with = "find_c", required_unless_present = "find_c")]
    c: Option<f64>,
    #[arg(long = "find-C")]
    find_c: bool,
}

/// Grid of axis values.
#[derive(Clone)]
struct Grid(Vec<f64>);

/// Grid as `lo:hi:count` or a comma-separated list.
fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid start '{}'", parts[0]))?;
        let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid end '{}'", parts[1]))?;
        let k: usize = parts[2].parse().map_err(|_| format!("bad grid count '{}'", parts[2]))?;
        return Ok(Grid(linspace(lo, hi, k)));
    }
    s.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad grid value '{v}'"))).collect::<std::result::Result<_, _>>().map(Grid)
}

#[derive(Args)]
struct CurveOutput {
    /// Also write the per-trial log as CSV.
    #[arg(long)]
    trials_out: Option<PathBuf>,
}

#[derive(Args)]
struct PhaseRhoArgs {
    /// ρ values, `lo:hi:count` or a comma list.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Grid>,
    #[command(flatten)]
    output: CurveOutput,
}

#[derive(Args)]
struct PhaseDeltaCArgs {
    #[arg(long)]
    gamma1: f64,
    #[arg(long)]
    p1: f64,
    #[arg(long)]
    p2: f64,
    #[arg(long, default_value_t = 1.0)]
    weight_ratio: f64,
    /// δ values, `lo:hi:count` or a comma list.
    #[arg(long, value_parser = parse_grid, default_value = "0.1:0.9:11")]
    grid: Grid,
    #[command(flatten)]
    output: CurveOutput,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
    #[arg(long = "W", default_value_t = DEFAULT_WEIGHT)]
    w: f64,
    #[arg(long, value_parser = parse_grid, default_value = "0.9:1:3")]
    p1_grid: Grid,
    /// Plain-ℓ1 threshold ρ_F(δ); estimated from fresh trials when omitted.
    #[arg(long)]
    rho_f: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    a1: f64,
    #[arg(long, default_value_t = 0.01)]
    tail: f64,
    #[command(flatten)]
    output: CurveOutput,
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long, default_value_t = 6)]
    k_strong: usize,
    #[arg(long, default_value_t = 12)]
    k_total: usize,
    #[arg(long, default_value_t = 1.0)]
    a1: f64,
    #[arg(long, default_value_t = 0.05)]
    tail: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let opts = RunOptions { workers: g.workers, record_timing: !g.no_timing };
    match &cli.command {
        Command::GenMatrix => {
            let a = gaussian_matrix(g)?;
            match g.format.unwrap_or(Format::Csv) {
                Format::Csv => write_matrix_csv(output(g)?, &a),
                Format::Json => write_json(output(g)?, &MatrixJson::new(&a)),
            }
        }
        Command::GenSignal(args) => gen_signal(g, args),
        Command::Solve(args) => solve(g, args),
        Command::Kappa(args) => {
            let a = load_matrix(g, &args.source)?;
            let kappa = compute_kappa(&a, &args.set)?;
            write_json(output(g)?, &serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "m": a.rows(),
                "n": a.cols(),
                "K": args.set,
                "kappa": finite_or_null(kappa),
                "method": "exact-enumeration",
            }))
        }
        Command::Robustness(args) => robustness(g, args),
        Command::PhaseRho(args) => {
            let cfg = RhoConfig {
                delta: undersampling(g, 0.555)?,
                n: g.n.unwrap_or(200),
                trials_per_point: g.trials.unwrap_or(100),
                rho_grid: args.grid.clone().map_or_else(RhoConfig::default_grid, |g| g.0),
                seed: Seed(g.seed),
            };
            let curve = estimate_rho_f(&cfg, opts)?;
            write_trials(&args.output, &curve.trials)?;
            match g.format.unwrap_or(Format::Csv) {
                Format::Csv => write_curve_csv(output(g)?, &curve),
                Format::Json => write_json(output(g)?, &curve),
            }
        }
        Command::PhaseDeltaC(args) => {
            let cfg = DeltaCConfig {
                gamma1: args.gamma1,
                p1: args.p1,
                p2: args.p2,
                weight_ratio: args.weight_ratio,
                n: g.n.unwrap_or(200),
                trials_per_point: g.trials.unwrap_or(100),
                delta_grid: args.grid.0.clone(),
                seed: Seed(g.seed),
            };
            let curve = estimate_delta_c(&cfg, opts)?;
            write_trials(&args.output, &curve.trials)?;
            match g.format.unwrap_or(Format::Csv) {
                Format::Csv => write_curve_csv(output(g)?, &curve),
                Format::Json => write_json(output(g)?, &curve),
            }
        }
        Command::SweepFig1(args) => {
            let mut cfg = SweepConfig::new(
                undersampling(g, 0.555)?,
                args.eps,
                args.w,
                args.p1_grid.0.clone(),
                g.n.unwrap_or(200),
                g.trials.unwrap_or(100),
                Seed(g.seed),
            );
            cfg.rho_f = args.rho_f;
            cfg.a1 = args.a1;
            cfg.tail_mass = args.tail;
            let sweep = sweep_figure1(&cfg, opts)?;
            write_trials(&args.output, &sweep.trials)?;
            match g.format.unwrap_or(Format::Csv) {
                Format::Csv => write_sweep_csv(output(g)?, &sweep),
                Format::Json => write_json(output(g)?, &sweep),
            }
        }
        Command::CertifyCampaign(args) => {
            let n = g.n.unwrap_or(40);
            let m = match (g.m, g.delta) {
                (Some(m), _) => m,
                (None, Some(d)) => (d * n as f64 + 1e-9).floor() as usize,
                (None, None) => 24,
            };
            let cfg = CampaignConfig {
                n,
                m,
                instances: g.trials.unwrap_or(200),
                k_strong: args.k_strong,
                k_total: args.k_total,
                a1: args.a1,
                delta: args.tail,
                seed: Seed(g.seed),
            };
            let report = run_certificate_campaign(&cfg, opts)?;
            eprintln!(
                "{} instances, {} certified, {} violations",
                report.instances.len(),
                report.certified,
                report.violations
            );
            match g.format.unwrap_or(Format::Json) {
                Format::Csv => write_campaign_csv(output(g)?, &report),
                Format::Json => write_json(output(g)?, &report),
            }
        }
    }
}

fn output(g: &Global) -> Result<Box<dyn Write>> {
    Ok(match &g.out {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_trials(out: &CurveOutput, trials: &[TrialRecord]) -> Result<()> {
    match &out.trials_out {
        Some(p) => write_trials_csv(File::create(p)?, trials),
        None => Ok(()),
    }
}

fn finite_or_null(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn required_n(g: &Global) -> Result<usize> {
    g.n.ok_or_else(|| Error::InvalidParameter("--n is required".into()))
}

fn undersampling(g: &Global, default: f64) -> Result<f64> {
    match (g.m, g.n, g.delta) {
        (Some(m), Some(n), _) => Ok(m as f64 / n as f64),
        (Some(_), None, _) => Err(Error::InvalidParameter("--m needs --n".into())),
        (None, _, d) => Ok(d.unwrap_or(default)),
    }
}

fn gaussian_matrix(g: &Global) -> Result<DenseMatrix> {
    let n = required_n(g)?;
    let m = match (g.m, g.delta) {
        (Some(m), _) => m,
        (None, Some(d)) => (d * n as f64 + 1e-9).floor() as usize,
        (None, None) => return Err(Error::InvalidParameter("--m or --delta is required".into())),
    };
    sample_gaussian_matrix(m, n, Seed(g.seed))
}

fn load_matrix(g: &Global, src: &MatrixSource) -> Result<DenseMatrix> {
    match &src.matrix {
        Some(p) => read_matrix_csv(File::open(p)?),
        None => gaussian_matrix(g),
    }
}

#[derive(Serialize)]
struct MatrixJson {
    schema_version: u32,
    rows: usize,
    cols: usize,
    data: Vec<Vec<f64>>,
}

impl MatrixJson {
    fn new(a: &DenseMatrix) -> Self {
        Self { schema_version: SCHEMA_VERSION, rows: a.rows(), cols: a.cols(), data: a.to_rows() }
    }
}

fn gen_signal(g: &Global, args: &GenSignalArgs) -> Result<()> {
    let n = required_n(g)?;
    let sig = generate_model_signal(
        n,
        args.k_strong,
        args.a1,
        args.tail,
        args.k_total.unwrap_or(args.k_strong),
        Seed(g.seed),
    )?;
    match (g.format.unwrap_or(Format::Csv), &g.out) {
        (Format::Csv, Some(path)) => write_signal(path, &sig),
        (Format::Csv, None) => write_vector_csv(io::stdout().lock(), &sig.x),
        (Format::Json, _) => write_json(output(g)?, &serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "x": sig.x,
            "metadata": sig.metadata(),
        })),
    }
}

fn solve(g: &Global, args: &SolveArgs) -> Result<()> {
    let a = load_matrix(g, &args.source)?;
    let (y, truth, strong) = match (&args.y, &args.signal) {
        (Some(p), _) => (read_vector_csv(File::open(p)?)?, None, None),
        (None, Some(p)) => {
            let (x, meta) = read_signal(p)?;
            if x.len() != a.cols() {
                return Err(Error::InvalidDimensions(format!("signal length {} vs {} columns", x.len(), a.cols())));
            }
            (a.mul_vec(&x), Some(x), Some(meta.k.len()))
        }
        (None, None) => return Err(Error::InvalidParameter("--y or --signal is required".into())),
    };
    let result: RecoveryResult = match args.algo {
        AlgoArg::L1 => match &args.weights {
            Some(p) => recover_weighted(&a, &y, &WeightVector::new(read_vector_csv(File::open(p)?)?)?)?,
            None => recover_l1(&a, &y)?,
        },
        AlgoArg::Candes => reweight_candes(&a, &y, args.eps_prime, args.t_max)?,
        AlgoArg::Modified => {
            let k = args.k_strong.or(strong).ok_or_else(|| {
                Error::InvalidParameter("--k-strong is required without --signal".into())
            })?;
            reweight_modified(&a, &y, k, args.w)?
        }
    };
    let algo = match args.algo {
        AlgoArg::L1 => Algorithm::L1,
        AlgoArg::Candes => Algorithm::Candes,
        AlgoArg::Modified => Algorithm::Modified,
    };
    match g.format.unwrap_or(Format::Json) {
        Format::Csv => write_vector_csv(output(g)?, &result.estimate),
        Format::Json => {
            let rel = truth.as_ref().map(|x| relative_l2_error(&result.estimate, x));
            write_json(output(g)?, &serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "algo": algo.name(),
                "result": result,
                "rel_l2_error": rel,
                "success": rel.map(|r| r <= l1lab::recover::SUCCESS_TOL),
            }))
        }
    }
}

fn robustness(g: &Global, args: &RobustnessArgs) -> Result<()> {
    let a = load_matrix(g, &args.source)?;
    let value = if args.find_c {
        let cert = RobustnessCertificate::compute(&a, &args.set, &args.x_k)?;
        let direct = critical_c(&a, &args.set, &args.x_k)?;
        serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "seed": g.seed,
            "m": a.rows(),
            "n": a.cols(),
            "certificate": cert,
            "critical_C": direct.map(finite_or_null),
        })
    } else {
        let c = args.c.expect("clap requires --C without --find-C");
        let check = check_weak_robustness(&a, &args.set, &args.x_k, c)?;
        serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "seed": g.seed,
            "m": a.rows(),
            "n": a.cols(),
            "K": args.set,
            "C": c,
            "check": check,
        })
    };
    write_json(output(g)?, &value)
}
