//! `addcomb`: command-line driver for the experiments and the verification
//! suite.
//!
//! Every command writes one artifact (JSON by default, CSV with
//! `--format csv`) whose header records the schema version, the seed and a
//! SHA-256 hash of the effective configuration. Exit codes: 0 on success,
//! 1 when a verification fails, 2 on usage or parameter errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use addcomb::ap::{ap_scan, write_ap_csv};
use addcomb::cayley::{
    alpha_exact_capped, alpha_heuristic, alpha_scaling_experiment, fitted_exponent, sample_cayley,
    union_bound_estimate, write_scaling_csv, GraphKind, LevelDivisor, LoopConvention, MethodChoice,
    UnionBoundConstants, DEFAULT_EXACT_CAP,
};
use addcomb::cover::{
    build_large_with, build_small_with, complexity_bound, level_set, select_regime, verify_cover_element, CoverConfig,
    Regime, Verification, DEFAULT_C,
};
use addcomb::fourier::{dft_indicator, idft_real, sparse_approx_with_retry, Mode, DEFAULT_MAX_RETRIES};
use addcomb::group::{make_group, random_subset, Group};
use addcomb::nonsumset::{
    f_cyclic, is_sumset_exhaustive, probabilistic_nonsumset, sumset_atlas_capped, NonsumsetConfig, NonsumsetOutcome,
    SumsetVerdict, DEFAULT_ATLAS_CAP, DEFAULT_CANDIDATE_CAP, DEFAULT_SEARCH_BUDGET,
};
use addcomb::report::{fmt12, round12, SCHEMA_VERSION};
use addcomb::verify::{run_all, VerifyOptions, DEFAULT_SEED};
use addcomb::{Error, RngStream};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser, Debug)]
#[command(name = "addcomb", version, about = "Experiments in additive combinatorics on finite abelian groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Root seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Spectrum of a random indicator, optionally with a sparse approximation.
    Fourier(FourierArgs),
    #[command(subcommand)]
    Cover(CoverCommand),
    #[command(subcommand)]
    Cayley(CayleyCommand),
    #[command(subcommand)]
    Nonsumset(NonsumsetCommand),
    #[command(subcommand)]
    Ap(ApCommand),
    /// Run the acceptance suite and report pass/fail per criterion.
    VerifyAll(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Difference,
    Sum,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Difference => Mode::Difference,
            ModeArg::Sum => Mode::Sum,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    Difference,
    Sum,
}

impl From<KindArg> for GraphKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Difference => GraphKind::Difference,
            KindArg::Sum => GraphKind::Sum,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum LoopsArg {
    Ignore,
    Block,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    Auto,
    Exact,
    Heuristic,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum RegimeArg {
    Auto,
    Small,
    Large,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DivisorArg {
    MaxEllSquared,
    LogSquared,
}

#[derive(Args, Debug, Serialize)]
struct GroupArgs {
    /// Cyclic factors of the group, e.g. `512` or `2,2,2,2`.
    #[arg(long, value_delimiter = ',', required = true)]
    factors: Vec<usize>,
}

#[derive(Args, Debug, Serialize)]
struct FourierArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 0.25)]
    density: f64,
    /// Also draw a sparse approximation at this accuracy.
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Difference)]
    mode: ModeArg,
    /// Number of largest nontrivial coefficients to list.
    #[arg(long, default_value_t = 8)]
    top: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CoverCommand {
    /// Build and sandwich-verify a cover element for a random set.
    Build(CoverBuildArgs),
    /// Log-complexity bounds of both regimes for given parameters.
    Bound(CoverBoundArgs),
}

#[derive(Args, Debug, Serialize)]
struct CoverBuildArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long, default_value_t = 0.25)]
    density: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Difference)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = RegimeArg::Auto)]
    regime: RegimeArg,
    #[arg(long, default_value_t = DEFAULT_C)]
    c: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_RETRIES)]
    max_retries: usize,
}

#[derive(Args, Debug, Serialize)]
struct CoverBoundArgs {
    #[arg(long)]
    ell: u32,
    /// Group order.
    #[arg(long)]
    n: f64,
    /// Set size.
    #[arg(long)]
    s: f64,
    #[arg(long = "big-c", default_value_t = 1.0)]
    big_c: f64,
    #[arg(long, default_value_t = DEFAULT_C)]
    c: f64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CayleyCommand {
    /// Sample a random Cayley or Cayley-sum graph.
    Sample(CayleyArgs),
    /// Independence number of a sampled graph.
    Alpha(CayleyAlphaArgs),
    /// Independence number quartiles over cyclic groups and probabilities.
    Scan(CayleyScanArgs),
    /// Union-bound failure estimate at a given independence scale.
    Bound(CayleyBoundArgs),
}

#[derive(Args, Debug, Serialize)]
struct CayleyArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    p: f64,
    #[arg(long, value_enum, default_value_t = KindArg::Difference)]
    kind: KindArg,
    /// Loop convention; defaults to ignore for difference graphs and block
    /// for sum graphs.
    #[arg(long, value_enum)]
    loops: Option<LoopsArg>,
}

#[derive(Args, Debug, Serialize)]
struct CayleyAlphaArgs {
    #[command(flatten)]
    graph: CayleyArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(long, default_value_t = 200)]
    effort: usize,
}

#[derive(Args, Debug, Serialize)]
struct CayleyScanArgs {
    /// Orders of the cyclic groups to scan.
    #[arg(long, value_delimiter = ',', required = true)]
    orders: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    ps: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = KindArg::Difference)]
    kind: KindArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(long, default_value_t = 200)]
    effort: usize,
}

#[derive(Args, Debug, Serialize)]
struct CayleyBoundArgs {
    /// Group order.
    #[arg(long)]
    n: f64,
    #[arg(long)]
    p: f64,
    /// Independence scale `s`.
    #[arg(long)]
    s: f64,
    #[arg(long = "big-c", default_value_t = 1.0)]
    big_c: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, value_enum, default_value_t = DivisorArg::MaxEllSquared)]
    divisor: DivisorArg,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum NonsumsetCommand {
    /// `f` from the exhaustive sumset atlas.
    F(NonsumsetFArgs),
    /// Randomized search for a large non-sumset.
    Search(NonsumsetSearchArgs),
}

#[derive(Args, Debug, Serialize)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["n", "max_n", "factors"])))]
struct NonsumsetFArgs {
    /// `f(n)` for the cyclic group `Z_n`.
    #[arg(long)]
    n: Option<usize>,
    /// Report `f(n)` for every cyclic `Z_n` with `n` up to this bound.
    #[arg(long)]
    max_n: Option<usize>,
    /// A single, possibly non-cyclic, group.
    #[arg(long, value_delimiter = ',')]
    factors: Option<Vec<usize>>,
}

#[derive(Args, Debug, Serialize)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["n", "factors"])))]
struct NonsumsetSearchArgs {
    /// Search in the cyclic group `Z_n`.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    factors: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0.25)]
    p: f64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ApCommand {
    /// Longest progression in `A+A` for random `A ⊆ Z_p`.
    Scan(ApScanArgs),
}

#[derive(Args, Debug, Serialize)]
struct ApScanArgs {
    /// Prime modulus.
    #[arg(long)]
    p: usize,
    /// Sampling probability; defaults to `p^{-1/2}`.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Restrict `A` to `[0, n)` and search progressions of integers.
    #[arg(long)]
    interval_n: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Reduced sizes.
    #[arg(long)]
    quick: bool,
    /// Extended sizes where available.
    #[arg(long, conflicts_with = "quick")]
    slow: bool,
    /// Also fail on criteria documented as unattainable.
    #[arg(long)]
    strict: bool,
}

/// Budget caps, overridable through the environment.
#[derive(Debug, Serialize)]
struct Budgets {
    exact_cap: usize,
    atlas_cap: usize,
    search_budget: usize,
    candidate_cap: usize,
}

impl Budgets {
    fn from_env() -> Result<Self, Failure> {
        fn read(var: &str, default: usize) -> Result<usize, Failure> {
            match std::env::var(var) {
                Ok(v) => v
                    .parse()
                    .map_err(|_| Failure::Usage(format!("{var}={v:?} is not a nonnegative integer"))),
                Err(_) => Ok(default),
            }
        }
        Ok(Self {
            exact_cap: read("ADDCOMB_EXACT_CAP", DEFAULT_EXACT_CAP)?,
            atlas_cap: read("ADDCOMB_ATLAS_CAP", DEFAULT_ATLAS_CAP)?,
            search_budget: read("ADDCOMB_SEARCH_BUDGET", DEFAULT_SEARCH_BUDGET)?,
            candidate_cap: read("ADDCOMB_CANDIDATE_CAP", DEFAULT_CANDIDATE_CAP)?,
        })
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// A command's result: the JSON body, its CSV rendering, and an optional
/// verification failure to report after the artifact is written.
struct Artifact {
    json: Value,
    csv: String,
    failure: Option<String>,
}

impl Artifact {
    fn new(json: Value, csv: String) -> Self {
        Self { json, csv, failure: None }
    }
}

#[derive(Serialize)]
struct Header<'a> {
    schema_version: u32,
    command: &'a str,
    seed: u64,
    config_hash: String,
}

/// Rounds every non-integral number to 12 significant digits.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => {
            if let Some(x) = n.as_f64() {
                *v = json!(round12(x));
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Fourier(_) => "fourier",
        Command::Cover(CoverCommand::Build(_)) => "cover build",
        Command::Cover(CoverCommand::Bound(_)) => "cover bound",
        Command::Cayley(CayleyCommand::Sample(_)) => "cayley sample",
        Command::Cayley(CayleyCommand::Alpha(_)) => "cayley alpha",
        Command::Cayley(CayleyCommand::Scan(_)) => "cayley scan",
        Command::Cayley(CayleyCommand::Bound(_)) => "cayley bound",
        Command::Nonsumset(NonsumsetCommand::F(_)) => "nonsumset f",
        Command::Nonsumset(NonsumsetCommand::Search(_)) => "nonsumset search",
        Command::Ap(ApCommand::Scan(_)) => "ap scan",
        Command::VerifyAll(_) => "verify-all",
    }
}

fn config_hash(cli: &Cli, budgets: &Budgets) -> String {
    let config = json!({
        "command": cli.command,
        "seed": cli.seed,
        "format": cli.format,
        "budgets": budgets,
    });
    hex::encode(Sha256::digest(config.to_string().as_bytes()))
}

fn group_of(args: &GroupArgs) -> Result<Group, Failure> {
    Ok(make_group(&args.factors)?)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn fourier(args: &FourierArgs, rng: &mut RngStream) -> Result<Artifact, Failure> {
    let g = group_of(&args.group)?;
    let a = random_subset(&g, args.density, rng);
    let spec = dft_indicator(&a);
    let back = idft_real(&spec);
    let inversion = back
        .iter()
        .enumerate()
        .map(|(x, v)| (v - if a.contains(x) { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let mut order: Vec<usize> = (1..g.order()).collect();
    order.sort_by(|&x, &y| spec.coeff(y).norm().total_cmp(&spec.coeff(x).norm()).then(x.cmp(&y)));
    let top: Vec<Value> = order
        .iter()
        .take(args.top)
        .map(|&t| json!({"character": t, "modulus": spec.coeff(t).norm()}))
        .collect();
    let mut json = json!({
        "order": g.order(),
        "set_size": a.len(),
        "density": a.density(),
        "energy": spec.energy(),
        "parseval_error": (spec.energy() - a.density()).abs(),
        "inversion_error": inversion,
        "top_coefficients": top,
        "set": to_value(&a),
    });
    if let Some(eta) = args.eta {
        let out = sparse_approx_with_retry(&a, eta, args.mode.into(), rng, DEFAULT_MAX_RETRIES)?;
        json["sparse"] = json!({
            "eta": eta,
            "mode": out.approx.mode,
            "characters": out.approx.m,
            "sup_error": out.sup_error,
            "target": eta * a.density(),
            "attempts": out.attempts,
        });
    }
    let mut csv = Vec::new();
    spec.write_csv(&mut csv)?;
    Ok(Artifact::new(json, String::from_utf8(csv).expect("ascii")))
}

fn cover_build(args: &CoverBuildArgs, rng: &mut RngStream) -> Result<Artifact, Failure> {
    let g = group_of(&args.group)?;
    let a = random_subset(&g, args.density, rng);
    let mode: Mode = args.mode.into();
    let cfg = CoverConfig {
        c: args.c,
        max_retries: args.max_retries,
    };
    let regime = match args.regime {
        RegimeArg::Auto => select_regime(&a, mode, cfg.c)?,
        RegimeArg::Small => Regime::Small,
        RegimeArg::Large => Regime::Large,
    };
    let built = match regime {
        Regime::Small => build_small_with(&a, mode, rng, &cfg)?,
        Regime::Large => build_large_with(&a, mode, rng, &cfg)?,
    };
    let elem = verify_cover_element(&a, &built)?;
    let level = level_set(&a, elem.ell, mode)?.members;
    let target = match mode {
        Mode::Difference => addcomb::group::difference_set(&a),
        Mode::Sum => addcomb::group::sumset(&a, &a)?,
    };
    let mut csv = String::from("x,in_level,in_cover,in_target\n");
    for x in 0..g.order() {
        let bit = |b: bool| u8::from(b);
        writeln!(
            csv,
            "{x},{},{},{}",
            bit(level.contains(x)),
            bit(elem.set.contains(x)),
            bit(target.contains(x))
        )
        .expect("string write");
    }
    let failure = match &elem.verification {
        Verification::SandwichVerified => None,
        other => Some(format!("cover element not verified: {other:?}")),
    };
    let json = json!({
        "input": to_value(&a),
        "level_size": level.len(),
        "cover_size": elem.set.len(),
        "target_size": target.len(),
        "element": to_value(&elem),
    });
    Ok(Artifact { json, csv, failure })
}

fn cover_bound(args: &CoverBoundArgs) -> Result<Artifact, Failure> {
    let b = complexity_bound(args.ell, args.n, args.s, args.big_c, args.c)?;
    let csv = format!(
        "ell,n,s,small_regime_log,large_regime_log,min_regime_log,min_size_lower\n{},{},{},{},{},{},{}\n",
        b.ell,
        fmt12(b.n),
        fmt12(b.s),
        fmt12(b.small_regime_log),
        fmt12(b.large_regime_log),
        fmt12(b.min_regime_log),
        fmt12(b.min_size_lower)
    );
    Ok(Artifact::new(to_value(&b), csv))
}

fn sample_graph(args: &CayleyArgs, rng: &mut RngStream) -> Result<addcomb::cayley::CayleyInstance, Failure> {
    let g = group_of(&args.group)?;
    let inst = sample_cayley(&g, args.p, args.kind.into(), rng)?;
    Ok(match args.loops {
        Some(LoopsArg::Ignore) => inst.with_loops(LoopConvention::Ignore),
        Some(LoopsArg::Block) => inst.with_loops(LoopConvention::Block),
        None => inst,
    })
}

fn cayley_sample(args: &CayleyArgs, rng: &mut RngStream) -> Result<Artifact, Failure> {
    let inst = sample_graph(args, rng)?;
    let gens = inst.generators.to_vec();
    let mut csv = String::from("generator\n");
    for x in &gens {
        writeln!(csv, "{x}").expect("string write");
    }
    let json = json!({
        "instance": to_value(&inst),
        "generator_count": gens.len(),
        "generators": gens,
    });
    Ok(Artifact::new(json, csv))
}

fn cayley_alpha(args: &CayleyAlphaArgs, budgets: &Budgets, rng: &mut RngStream) -> Result<Artifact, Failure> {
    let inst = sample_graph(&args.graph, rng)?;
    let exact = match args.method {
        MethodArg::Exact => true,
        MethodArg::Heuristic => false,
        MethodArg::Auto => inst.order() <= budgets.exact_cap.min(DEFAULT_EXACT_CAP),
    };
    let report = if exact {
        alpha_exact_capped(&inst, budgets.exact_cap)?
    } else {
        alpha_heuristic(&inst, args.effort)
    };
    let method = to_value(&report.method);
    let csv = format!(
        "n,p,alpha,method,nodes\n{},{},{},{},{}\n",
        inst.order(),
        fmt12(inst.p),
        report.alpha,
        method.as_str().unwrap_or_default(),
        report.nodes.map(|n| n.to_string()).unwrap_or_default()
    );
    let json = json!({
        "order": inst.order(),
        "p": inst.p,
        "kind": inst.kind,
        "loops": inst.loops,
        "generator_count": inst.generators.len(),
        "report": to_value(&report),
    });
    Ok(Artifact::new(json, csv))
}

fn cayley_scan(args: &CayleyScanArgs, rng: &RngStream) -> Result<Artifact, Failure> {
    let groups = args
        .orders
        .iter()
        .map(|&n| make_group(&[n]))
        .collect::<addcomb::Result<Vec<_>>>()?;
    let method = match args.method {
        MethodArg::Auto => MethodChoice::Auto,
        MethodArg::Exact => MethodChoice::Exact,
        MethodArg::Heuristic => MethodChoice::Heuristic,
    };
    let rows = alpha_scaling_experiment(&groups, &args.ps, args.trials, args.kind.into(), method, args.effort, rng)?;
    let fits: Vec<Value> = args
        .orders
        .iter()
        .map(|&n| json!({"n": n, "exponent": fitted_exponent(&rows, n)}))
        .collect();
    let mut csv = Vec::new();
    write_scaling_csv(&rows, &mut csv)?;
    let json = json!({"rows": to_value(&rows), "fitted_exponents": fits});
    Ok(Artifact::new(json, String::from_utf8(csv).expect("ascii")))
}

fn cayley_bound(args: &CayleyBoundArgs) -> Result<Artifact, Failure> {
    let k = UnionBoundConstants {
        big_c: args.big_c,
        c: args.c,
        divisor: match args.divisor {
            DivisorArg::MaxEllSquared => LevelDivisor::MaxEllSquared,
            DivisorArg::LogSquared => LevelDivisor::LogSquared,
        },
    };
    let report = union_bound_estimate(args.p, args.n, args.s, k)?;
    let mut csv = String::from("regime,ell,log_term\n");
    for t in &report.terms {
        let regime = to_value(&t.regime);
        writeln!(csv, "{},{},{}", regime.as_str().unwrap_or_default(), t.ell, fmt12(t.log_term))
            .expect("string write");
    }
    Ok(Artifact::new(to_value(&report), csv))
}

fn nonsumset_f(args: &NonsumsetFArgs, budgets: &Budgets) -> Result<Artifact, Failure> {
    let mut rows = Vec::new();
    let atlas_row = |g: &Group| -> Result<Value, Failure> {
        let atlas = sumset_atlas_capped(g, budgets.atlas_cap)?;
        Ok(json!({
            "factors": g.factors(),
            "order": g.order(),
            "f": atlas.f_value,
            "max_nonsumset_size": atlas.max_nonrep_size,
            "distinct_sumsets": atlas.distinct_sumsets,
        }))
    };
    let cyclic = args.n.map(|n| n..=n).or(args.max_n.map(|m| 1..=m));
    match (&args.factors, cyclic) {
        (Some(f), _) => rows.push(atlas_row(&make_group(f)?)?),
        (None, Some(range)) => {
            for n in range {
                if n == 1 {
                    rows.push(json!({"factors": [1], "order": 1, "f": f_cyclic(1)?}));
                } else {
                    rows.push(atlas_row(&make_group(&[n])?)?);
                }
            }
        }
        (None, None) => return Err(Failure::Usage("one of --n, --max-n or --factors is required".into())),
    }
    let mut csv = String::from("order,f\n");
    for r in &rows {
        writeln!(csv, "{},{}", r["order"], r["f"]).expect("string write");
    }
    Ok(Artifact::new(json!({"values": rows}), csv))
}

fn nonsumset_search(args: &NonsumsetSearchArgs, budgets: &Budgets, rng: &mut RngStream) -> Result<Artifact, Failure> {
    let g = match (&args.factors, args.n) {
        (Some(f), _) => make_group(f)?,
        (None, Some(n)) => make_group(&[n])?,
        (None, None) => return Err(Failure::Usage("one of --n or --factors is required".into())),
    };
    let cfg = NonsumsetConfig {
        budget: budgets.search_budget,
        candidate_cap: budgets.candidate_cap,
    };
    let outcome = probabilistic_nonsumset(&g, args.p, rng, cfg)?;
    let (csv, confirmed) = match &outcome {
        NonsumsetOutcome::Witness {
            s1, s2, witness, draws, ..
        } => {
            let confirmed = (g.order() <= budgets.atlas_cap)
                .then(|| is_sumset_exhaustive(witness, budgets.atlas_cap).map(|v| v == SumsetVerdict::NotSumset))
                .transpose()?;
            let csv = format!(
                "outcome,s1_size,s2_size,witness_size,draws\nwitness,{},{},{},{draws}\n",
                s1.len(),
                s2.len(),
                witness.len()
            );
            (csv, confirmed)
        }
        NonsumsetOutcome::Degenerate { s1 } => (
            format!("outcome,s1_size,s2_size,witness_size,draws\ndegenerate,{},,,\n", s1.len()),
            None,
        ),
    };
    let failure = (confirmed == Some(false)).then(|| "witness is a sumset".to_string());
    let json = json!({"outcome": to_value(&outcome), "confirmed_by_atlas": confirmed});
    Ok(Artifact { json, csv, failure })
}

fn ap(args: &ApScanArgs, rng: &RngStream) -> Result<Artifact, Failure> {
    let q = args.q.unwrap_or(1.0 / (args.p as f64).sqrt());
    let scan = ap_scan(args.p, q, args.trials, rng, args.interval_n)?;
    let mut csv = Vec::new();
    write_ap_csv(&scan, &mut csv)?;
    Ok(Artifact::new(to_value(&scan), String::from_utf8(csv).expect("ascii")))
}

fn verify_all(args: &VerifyArgs, seed: u64) -> Artifact {
    let opts = VerifyOptions {
        quick: args.quick,
        slow: args.slow,
        seed,
    };
    let report = run_all(&opts);
    let mut csv = String::from("id,name,passed\n");
    for o in &report.outcomes {
        writeln!(csv, "{},{},{}", o.id, o.name, o.passed).expect("string write");
    }
    let failing = if args.strict {
        report.first_failure()
    } else {
        report.first_unexpected_failure()
    };
    let failure = failing.map(|o| format!("criterion {:02} {} failed", o.id, o.name));
    for o in &report.outcomes {
        eprintln!("{}", o.line());
    }
    Artifact {
        json: to_value(&report),
        csv,
        failure,
    }
}

fn dispatch(cli: &Cli, budgets: &Budgets) -> Result<Artifact, Failure> {
    let root = RngStream::new(cli.seed);
    let mut rng = root.clone();
    match &cli.command {
        Command::Fourier(a) => fourier(a, &mut rng),
        Command::Cover(CoverCommand::Build(a)) => cover_build(a, &mut rng),
        Command::Cover(CoverCommand::Bound(a)) => cover_bound(a),
        Command::Cayley(CayleyCommand::Sample(a)) => cayley_sample(a, &mut rng),
        Command::Cayley(CayleyCommand::Alpha(a)) => cayley_alpha(a, budgets, &mut rng),
        Command::Cayley(CayleyCommand::Scan(a)) => cayley_scan(a, &root),
        Command::Cayley(CayleyCommand::Bound(a)) => cayley_bound(a),
        Command::Nonsumset(NonsumsetCommand::F(a)) => nonsumset_f(a, budgets),
        Command::Nonsumset(NonsumsetCommand::Search(a)) => nonsumset_search(a, budgets, &mut rng),
        Command::Ap(ApCommand::Scan(a)) => ap(a, &root),
        Command::VerifyAll(a) => Ok(verify_all(a, cli.seed)),
    }
}

fn render(cli: &Cli, budgets: &Budgets, artifact: Artifact) -> (String, Option<String>) {
    let header = Header {
        schema_version: SCHEMA_VERSION,
        command: command_name(&cli.command),
        seed: cli.seed,
        config_hash: config_hash(cli, budgets),
    };
    let text = match cli.format {
        Format::Json => {
            let mut body = artifact.json;
            round_floats(&mut body);
            let doc = json!({"header": header, "result": body});
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        Format::Csv => format!(
            "# schema_version={} command={} seed={} config_hash={}\n{}",
            header.schema_version, header.command, header.seed, header.config_hash, artifact.csv
        ),
    };
    (text, artifact.failure)
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let budgets = Budgets::from_env()?;
    let artifact = dispatch(&cli, &budgets)?;
    let (text, failure) = render(&cli, &budgets, artifact);
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    match failure {
        Some(msg) => Err(Failure::Verification(msg)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("addcomb: verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("addcomb: error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("addcomb: i/o error: {e}");
            ExitCode::from(1)
        }
    }
}
