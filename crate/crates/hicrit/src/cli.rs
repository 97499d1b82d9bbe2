//! Command-line front end.
//!
//! Every subcommand prints a `key=value` summary on stdout, optionally writes
//! machine-readable CSV (`--out`) and per-index traces (`--trace`), and emits
//! a [`RunManifest`] so the run can be replayed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hicrit_core::arw::{self, ArwParams, CriticalChoice, DetectionConfig, MixtureSpec};
use hicrit_core::calibrate::{self, Decision};
use hicrit_core::covtest::{self, CliqueMode, Tail};
use hicrit_core::hc::{self, PValueSeries};
use hicrit_core::hct::{self, LabeledMatrix};
use hicrit_core::pairhc::{self, Corner, RankedPairs, PRESET_SETTINGS};
use hicrit_core::phase;
use hicrit_core::rng::tags;
use hicrit_core::{HcVariant, RngSeed};

use crate::cache::{self, CachePolicy, CriticalCache, CriticalRequest, ProfileCache};
use crate::format::{sig, DEFAULT_PRECISION};
use crate::ingest;
use crate::manifest::RunManifest;
use crate::model::ModelFile;
use crate::Error;

#[derive(Debug, Parser, Serialize)]
#[command(name = "hicrit", version, about = "Higher Criticism statistics for large-scale inference")]
pub struct Cli {
    /// Worker threads for Monte Carlo work (default: all cores). Results do
    /// not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Significant digits in printed numbers.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    pub precision: usize,

    /// Where to write the run manifest (default: `<out>.manifest.json`
    /// when `--out` is given, otherwise stderr).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantArg {
    Star,
    Plus,
    Feature,
    Bj,
    Alr,
}

impl From<VariantArg> for HcVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Star => HcVariant::Star,
            VariantArg::Plus => HcVariant::Plus,
            VariantArg::Feature => HcVariant::Feature,
            VariantArg::Bj => HcVariant::BerkJones,
            VariantArg::Alr => HcVariant::Alr,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CalibratedVariant {
    Star,
    Plus,
}

impl From<CalibratedVariant> for HcVariant {
    fn from(v: CalibratedVariant) -> Self {
        match v {
            CalibratedVariant::Star => HcVariant::Star,
            CalibratedVariant::Plus => HcVariant::Plus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Pairwise,
    Rowmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailArg {
    Upper,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CornerArg {
    UpperRight,
    UpperLeft,
    LowerRight,
    LowerLeft,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectMethod {
    Hct,
    Fdr,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Score a list of P-values with an HC variant.
    Score(ScoreArgs),
    /// Simulate critical values h(N, alpha) and store them in the cache.
    Calibrate(CalibrateArgs),
    /// Null-versus-mixture detection experiment.
    DetectSim(DetectArgs),
    /// Shuffle-based P-value for the HC score of a labelled matrix.
    Permtest(PermArgs),
    /// Feature selection by HC threshold or FDR.
    Select(SelectArgs),
    /// Train an HCT classifier and optionally predict new samples.
    Classify(ClassifyArgs),
    /// Error rate of an HCT classifier on labelled test data.
    Evaluate(EvaluateArgs),
    /// Clique test from pairwise or row-maximum correlations.
    CovClique(CliqueArgs),
    /// eigenHC test for low-rank covariance spikes.
    CovEigen(EigenArgs),
    /// Rank-based test for sparse correlated pairs.
    Pairs(PairsArgs),
    /// Phase-diagram boundaries and ideal FDR levels.
    Phase(PhaseArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Score(_) => "score",
            Command::Calibrate(_) => "calibrate",
            Command::DetectSim(_) => "detect-sim",
            Command::Permtest(_) => "permtest",
            Command::Select(_) => "select",
            Command::Classify(_) => "classify",
            Command::Evaluate(_) => "evaluate",
            Command::CovClique(_) => "cov-clique",
            Command::CovEigen(_) => "cov-eigen",
            Command::Pairs(_) => "pairs",
            Command::Phase(_) => "phase",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    /// P-values: one per line, or a CSV file with `--column`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long, value_enum, default_value_t = VariantArg::Plus)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0.5)]
    pub alpha0: f64,
    /// Also test at this level (star and plus only).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = CachePolicy::GumbelFallback)]
    pub policy: CachePolicy,
    /// Critical-value cache (default: `$HICRIT_CACHE/critical_values.csv`).
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Replicates required of a cache hit, and used when simulating.
    #[arg(long, default_value_t = 10_000)]
    pub reps: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Per-index trace CSV: `i,p,component`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CalibrateArgs {
    #[arg(long)]
    pub n: usize,
    /// One or more levels, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alpha: Vec<f64>,
    #[arg(long, value_enum, default_value_t = CalibratedVariant::Plus)]
    pub variant: CalibratedVariant,
    #[arg(long, default_value_t = 0.5)]
    pub alpha0: f64,
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DetectArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, conflicts_with_all = ["vartheta", "r"], requires = "tau")]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Sparsity exponent: epsilon = N^-vartheta.
    #[arg(long, requires = "r")]
    pub vartheta: Option<f64>,
    /// Strength exponent: tau = sqrt(2 r log N).
    #[arg(long, requires = "vartheta")]
    pub r: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub reps: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::Plus)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0.5)]
    pub alpha0: f64,
    /// Fixed critical value; default is the (1 - alpha) quantile of the null scores.
    #[arg(long)]
    pub critical: Option<f64>,
    #[arg(long)]
    pub seed: u64,
    /// Scores CSV: `hypothesis,replicate,score`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PermArgs {
    /// Labelled CSV: label column first, then features.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub shuffles: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = VariantArg::Plus)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0.5)]
    pub alpha0: f64,
    /// Shuffle scores CSV: `shuffle,score`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SelectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = SelectMethod::Hct)]
    pub method: SelectMethod,
    #[arg(long, default_value_t = hct::DEFAULT_ALPHA0)]
    pub alpha0: f64,
    /// FDR level for `--method fdr`.
    #[arg(long, default_value_t = 0.1)]
    pub q: f64,
    /// Selected features CSV: `index,name,z,pvalue`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Feature-HC trace CSV: `i,p,hc`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    /// Labelled training data.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long, default_value_t = hct::DEFAULT_ALPHA0)]
    pub alpha0: f64,
    /// Write the trained model as JSON.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Unlabelled samples (header row, same feature columns) to predict.
    #[arg(long, requires = "out")]
    pub input: Option<PathBuf>,
    /// Predictions CSV: `row,score,label`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["model", "train"])))]
pub struct EvaluateArgs {
    /// Trained model JSON.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Train on this labelled file instead of loading a model.
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long, default_value_t = hct::DEFAULT_ALPHA0)]
    pub alpha0: f64,
    /// Labelled test data.
    #[arg(long)]
    pub test: PathBuf,
    /// Per-sample CSV: `row,label,score,normalized_score,prediction`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CliqueArgs {
    /// Numeric n x p matrix with a header row.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Pairwise)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = TailArg::TwoSided)]
    pub tail: TailArg,
    /// Sorted P-value trace CSV: `i,p,component`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EigenArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 500)]
    pub null_reps: u64,
    #[arg(long)]
    pub seed: u64,
    /// Profile cache (default: `$HICRIT_CACHE/eigen_profiles.csv`).
    #[arg(long)]
    pub profile_cache: Option<PathBuf>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha0: f64,
    /// Component trace CSV: `i,eigenvalue,null_mean,null_sd,component`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PairsArgs {
    /// Two numeric columns `x,y` with a header row.
    #[arg(long, conflicts_with = "simulate", required_unless_present = "simulate")]
    pub input: Option<PathBuf>,
    /// Simulate null and mixture data instead of reading a file.
    #[arg(long)]
    pub simulate: bool,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.25)]
    pub rho: f64,
    /// Use one of the five reference settings (0-4) instead of epsilon/tau/rho.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..5))]
    pub preset: Option<u8>,
    #[arg(long, default_value_t = 100)]
    pub reps: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha0: f64,
    #[arg(long, value_enum, default_value_t = CornerArg::UpperRight)]
    pub corner: CornerArg,
    /// Component trace CSV: `k,S_k,component`.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Simulated scores CSV: `hypothesis,replicate,score`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PhaseArgs {
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Signal strength at which the ideal FDR columns are evaluated.
    #[arg(long, default_value_t = 0.25)]
    pub r: f64,
    /// CSV destination (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<hicrit_core::Error> for Failure {
    fn from(e: hicrit_core::Error) -> Self {
        Failure::Run(e.into())
    }
}

type Outcome = std::result::Result<(), Failure>;

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    digits: usize,
    manifest: RunManifest,
}

impl Ctx<'_> {
    fn num(&self, x: f64) -> String {
        sig(x, self.digits)
    }

    fn line(&mut self, text: impl AsRef<str>) -> Outcome {
        writeln!(self.out, "{}", text.as_ref()).map_err(|e| Failure::Run(Error::io("<stdout>", e)))
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> Outcome {
        self.line(format!("{key}={value}"))
    }

    fn warn(&mut self, text: &str) {
        let _ = writeln!(self.err, "warning: {text}");
    }

    fn input(&mut self, path: &Path) -> Outcome {
        self.manifest.add_input(path)?;
        Ok(())
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> crate::Result<()> {
    let csv_err = |e: csv::Error| Error::validation(path.display().to_string(), e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn opt_num(ctx: &Ctx, v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| ctx.num(x))
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code: 0 success, 2 usage error, 3 invalid input, 4 cache
/// miss under `cache_only`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let started = Instant::now();
    let parameters = serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null);
    let argv_text = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let manifest = RunManifest::new(cli.command.name(), parameters, argv_text, seed_of(&cli.command));
    let mut ctx = Ctx { out, err, digits: cli.precision.max(1), manifest };

    let result = match &cli.command {
        Command::Score(a) => score(&mut ctx, a),
        Command::Calibrate(a) => calibrate(&mut ctx, a),
        Command::DetectSim(a) => detect(&mut ctx, a),
        Command::Permtest(a) => permtest(&mut ctx, a),
        Command::Select(a) => select(&mut ctx, a),
        Command::Classify(a) => classify(&mut ctx, a),
        Command::Evaluate(a) => evaluate(&mut ctx, a),
        Command::CovClique(a) => clique(&mut ctx, a),
        Command::CovEigen(a) => eigen(&mut ctx, a),
        Command::Pairs(a) => pairs(&mut ctx, a),
        Command::Phase(a) => phase_table(&mut ctx, a),
    };
    match result {
        Ok(()) => {
            ctx.manifest.finish(started.elapsed());
            let target = cli.manifest.clone().or_else(|| out_path(&cli.command).map(|p| manifest_beside(&p)));
            match target {
                Some(path) => {
                    if let Err(e) = ctx.manifest.save(&path) {
                        let _ = writeln!(ctx.err, "error: {e}");
                        return e.exit_code();
                    }
                }
                None => {
                    let json = serde_json::to_string(&ctx.manifest).unwrap_or_default();
                    let _ = writeln!(ctx.err, "manifest: {json}");
                }
            }
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            2
        }
        Err(Failure::Run(e)) => {
            let _ = writeln!(ctx.err, "error: {e}");
            e.exit_code()
        }
    }
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::Score(a) => a.seed,
        Command::Calibrate(a) => Some(a.seed),
        Command::DetectSim(a) => Some(a.seed),
        Command::Permtest(a) => Some(a.seed),
        Command::CovEigen(a) => Some(a.seed),
        Command::Pairs(a) => a.seed,
        _ => None,
    }
}

fn out_path(cmd: &Command) -> Option<PathBuf> {
    match cmd {
        Command::DetectSim(a) => a.out.clone(),
        Command::Permtest(a) => a.out.clone(),
        Command::Select(a) => a.out.clone(),
        Command::Classify(a) => a.out.clone().or_else(|| a.model.clone()),
        Command::Evaluate(a) => a.out.clone(),
        Command::Pairs(a) => a.out.clone(),
        Command::Phase(a) => a.out.clone(),
        _ => None,
    }
}

fn manifest_beside(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn score(ctx: &mut Ctx, a: &ScoreArgs) -> Outcome {
    ctx.input(&a.input)?;
    let values = ingest::read_pvalues(&a.input, a.column.as_deref())?;
    let series = PValueSeries::new(values)?;
    let variant: HcVariant = a.variant.into();
    let result = hc::score(&series, variant, a.alpha0)?;
    ctx.kv("n", series.len())?;
    ctx.kv("variant", variant)?;
    ctx.kv("alpha0", ctx.num(a.alpha0))?;
    ctx.kv("score", ctx.num(result.score))?;
    ctx.kv("argmax", result.argmax_index.map_or_else(|| "NA".to_string(), |i| i.to_string()))?;
    ctx.kv("excluded", result.excluded)?;
    if let Some(alpha) = a.alpha {
        if !matches!(variant, HcVariant::Star | HcVariant::Plus) {
            return Err(Failure::Usage("--alpha is only available for --variant star or plus".into()));
        }
        if a.policy == CachePolicy::SimulateIfMissing && a.seed.is_none() {
            return Err(Failure::Usage("--policy simulate-if-missing needs --seed".into()));
        }
        let mut cache = CriticalCache::open(a.cache.clone().unwrap_or_else(cache::default_critical_path))?;
        let req = CriticalRequest {
            n: series.len(),
            alpha,
            variant,
            alpha0: a.alpha0,
            replicates: a.reps,
            seed: a.seed.unwrap_or(0),
        };
        let resolved = cache::critical_value(&mut cache, &req, a.policy)?;
        let decision = Decision::from_score(result.score, resolved.value);
        ctx.kv("alpha", ctx.num(alpha))?;
        ctx.kv("critical", ctx.num(resolved.value))?;
        ctx.kv("critical_source", resolved.source.as_str())?;
        ctx.kv("decision", if decision == Decision::Reject { "reject" } else { "retain" })?;
    }
    if let Some(path) = &a.trace {
        let comps = hc::hc_components(&series);
        let rows = series
            .values()
            .iter()
            .zip(comps)
            .enumerate()
            .map(|(k, (&p, c))| vec![(k + 1).to_string(), ctx.num(p), opt_num(ctx, c)])
            .collect::<Vec<_>>();
        write_csv(path, &["i", "p", "component"], rows)?;
    }
    Ok(())
}

fn calibrate(ctx: &mut Ctx, a: &CalibrateArgs) -> Outcome {
    let path = a.cache.clone().unwrap_or_else(cache::default_critical_path);
    let mut cache = CriticalCache::open(&path)?;
    let variant: HcVariant = a.variant.into();
    let missing: Vec<f64> =
        a.alpha.iter().copied().filter(|&al| cache.lookup(a.n, al, variant, a.alpha0, a.reps).is_none()).collect();
    if !missing.is_empty() {
        for entry in calibrate::simulate_critical_levels(a.n, &missing, variant, a.alpha0, a.reps, a.seed)? {
            cache.insert(entry);
        }
        cache.save()?;
    }
    ctx.kv("cache", path.display())?;
    for &alpha in &a.alpha {
        let hit = cache.lookup(a.n, alpha, variant, a.alpha0, a.reps).expect("entry just stored").clone();
        let gumbel = calibrate::gumbel_critical(a.n, alpha).ok();
        let source = if missing.contains(&alpha) { "simulated" } else { "cache" };
        ctx.line(format!(
            "N={} alpha={} variant={} alpha0={} replicates={} quantile={} gumbel={} source={}",
            a.n,
            ctx.num(alpha),
            variant,
            ctx.num(a.alpha0),
            hit.replicates,
            ctx.num(hit.quantile),
            gumbel.map_or_else(|| "NA".into(), |g| ctx.num(g)),
            source
        ))?;
    }
    Ok(())
}

fn detect(ctx: &mut Ctx, a: &DetectArgs) -> Outcome {
    let spec = match (a.epsilon, a.tau, a.vartheta, a.r) {
        (_, _, Some(v), Some(r)) => ArwParams::new(a.n, v, r)?.mixture(),
        (Some(e), Some(t), None, None) => MixtureSpec::new(a.n, e, t)?,
        _ => return Err(Failure::Usage("give either --epsilon and --tau, or --vartheta and --r".into())),
    };
    let cfg = DetectionConfig {
        spec,
        reps: a.reps,
        alpha: a.alpha,
        variant: a.variant.into(),
        alpha0: a.alpha0,
        critical: a.critical.map_or(CriticalChoice::FromNullScores, CriticalChoice::Fixed),
        seed: a.seed,
    };
    let s = arw::detection_experiment(&cfg)?;
    let max_null = s.null_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_alt = s.alt_scores.iter().copied().fold(f64::INFINITY, f64::min);
    ctx.kv("n", a.n)?;
    ctx.kv("epsilon", ctx.num(spec.epsilon))?;
    ctx.kv("tau", ctx.num(spec.tau))?;
    ctx.kv("reps", a.reps)?;
    ctx.kv("critical", ctx.num(s.critical))?;
    ctx.kv("power", ctx.num(s.power))?;
    ctx.kv("size", ctx.num(s.size))?;
    ctx.kv("max_null", ctx.num(max_null))?;
    ctx.kv("min_alt", ctx.num(min_alt))?;
    ctx.kv("separated", s.separated())?;
    if let Some(path) = &a.out {
        let rows = labelled_scores(ctx, &s.null_scores, &s.alt_scores);
        write_csv(path, &["hypothesis", "replicate", "score"], rows)?;
    }
    Ok(())
}

fn labelled_scores(ctx: &Ctx, null: &[f64], alt: &[f64]) -> Vec<Vec<String>> {
    let tag = |name: &'static str, v: &[f64]| {
        v.iter().enumerate().map(move |(r, &s)| vec![name.to_string(), r.to_string(), ctx.num(s)]).collect::<Vec<_>>()
    };
    let mut rows = tag("null", null);
    rows.extend(tag("alternative", alt));
    rows
}

fn read_labeled(ctx: &mut Ctx, path: &Path) -> std::result::Result<LabeledMatrix, Failure> {
    ctx.input(path)?;
    let (m, report) = ingest::read_labeled(path)?;
    for w in &report.warnings {
        ctx.warn(w);
    }
    Ok(m)
}

fn report_shape(ctx: &mut Ctx, m: &LabeledMatrix) -> Outcome {
    let (pos, neg) = m.class_counts();
    ctx.kv("n", m.n_samples())?;
    ctx.kv("p", m.n_features())?;
    ctx.kv("class_counts", format!("+1:{pos},-1:{neg}"))
}

fn permtest(ctx: &mut Ctx, a: &PermArgs) -> Outcome {
    let m = read_labeled(ctx, &a.input)?;
    report_shape(ctx, &m)?;
    let res = arw::permutation_pvalue(&m, a.shuffles, a.seed, a.variant.into(), a.alpha0)?;
    ctx.kv("observed", ctx.num(res.observed))?;
    ctx.kv("shuffles", a.shuffles)?;
    ctx.kv("pvalue", ctx.num(res.pvalue))?;
    if let Some(path) = &a.out {
        let rows =
            res.shuffle_scores.iter().enumerate().map(|(b, &s)| vec![b.to_string(), ctx.num(s)]).collect::<Vec<_>>();
        write_csv(path, &["shuffle", "score"], rows)?;
    }
    Ok(())
}

fn select(ctx: &mut Ctx, a: &SelectArgs) -> Outcome {
    let m = read_labeled(ctx, &a.input)?;
    report_shape(ctx, &m)?;
    let z = hct::feature_zscores(&m)?;
    let pvals = z.two_sided_pvalues();
    let selected: Vec<usize> = match a.method {
        SelectMethod::Hct => {
            let t = hct::hct_threshold(&z, a.alpha0)?;
            ctx.kv("threshold", ctx.num(t.threshold))?;
            ctx.kv("hct_index", t.hct_index)?;
            ctx.kv("hc_score", t.hc_score.map_or_else(|| "NA".into(), |s| ctx.num(s)))?;
            (0..z.standardized.len()).filter(|&j| z.standardized[j].abs() >= t.threshold).collect()
        }
        SelectMethod::Fdr => hct::fdr_feature_select(&z, a.q)?,
    };
    ctx.kv("selected", selected.len())?;
    if let Some(path) = &a.out {
        let names = m.feature_names();
        let rows = selected
            .iter()
            .map(|&j| vec![(j + 1).to_string(), names[j].clone(), ctx.num(z.standardized[j]), ctx.num(pvals[j])])
            .collect::<Vec<_>>();
        write_csv(path, &["index", "name", "z", "pvalue"], rows)?;
    }
    if let Some(path) = &a.trace {
        let series = PValueSeries::new(pvals)?;
        let scores = hc::hc_feature_scores(&series)?;
        let rows = scores
            .iter()
            .enumerate()
            .map(|(k, &s)| vec![(k + 1).to_string(), ctx.num(series.values()[k]), ctx.num(s)])
            .collect::<Vec<_>>();
        write_csv(path, &["i", "p", "hc"], rows)?;
    }
    Ok(())
}

fn classify(ctx: &mut Ctx, a: &ClassifyArgs) -> Outcome {
    let m = read_labeled(ctx, &a.train)?;
    report_shape(ctx, &m)?;
    let model = hct::train(&m, a.alpha0)?;
    ctx.kv("threshold", ctx.num(model.threshold))?;
    ctx.kv("hct_index", model.hct_index)?;
    ctx.kv("selected", model.n_selected())?;
    if model.has_threshold_ties() {
        ctx.warn("ties at the threshold selected more features than the HCT index");
    }
    if let Some(path) = &a.model {
        ModelFile::from_model(&model, m.feature_names()).save(path)?;
        ctx.kv("model", path.display())?;
    }
    if let (Some(input), Some(out)) = (&a.input, &a.out) {
        ctx.input(input)?;
        let (data, _, _) = ingest::read_plain(input)?;
        if data.ncols() != model.n_features() {
            return Err(Error::validation(
                input.display().to_string(),
                format!("{} columns but the model has {} features", data.ncols(), model.n_features()),
            )
            .into());
        }
        let mut rows = Vec::with_capacity(data.nrows());
        for i in 0..data.nrows() {
            let sample: Vec<f64> = data.row(i).iter().copied().collect();
            let s = model.score(&sample)?;
            let label = model.predict(&sample)?;
            rows.push(vec![(i + 1).to_string(), ctx.num(s), label.to_string()]);
        }
        ctx.kv("predicted", rows.len())?;
        write_csv(out, &["row", "score", "label"], rows)?;
    }
    Ok(())
}

fn evaluate(ctx: &mut Ctx, a: &EvaluateArgs) -> Outcome {
    let model = match (&a.model, &a.train) {
        (Some(path), _) => {
            ctx.input(path)?;
            ModelFile::load(path)?.to_model()?
        }
        (None, Some(path)) => {
            let m = read_labeled(ctx, path)?;
            hct::train(&m, a.alpha0)?
        }
        (None, None) => return Err(Failure::Usage("give --model or --train".into())),
    };
    let test = read_labeled(ctx, &a.test)?;
    let ev = hct::evaluate(&model, &test)?;
    ctx.kv("threshold", ctx.num(model.threshold))?;
    ctx.kv("hct_index", model.hct_index)?;
    ctx.kv("n_test", test.n_samples())?;
    ctx.kv("errors", ev.errors)?;
    ctx.kv("error_rate", ctx.num(ev.error_rate))?;
    let mis: Vec<String> = ev.misclassified.iter().map(usize::to_string).collect();
    ctx.kv("misclassified", if mis.is_empty() { "none".to_string() } else { mis.join(",") })?;
    if ev.ties > 0 {
        ctx.warn(&format!("{} samples scored exactly 0 and were assigned +1", ev.ties));
    }
    if let Some(path) = &a.out {
        let mut rows = Vec::with_capacity(test.n_samples());
        for (i, &truth) in test.labels().iter().enumerate() {
            let sample: Vec<f64> = test.data().row(i).iter().copied().collect();
            let s = model.score(&sample)?;
            rows.push(vec![
                (i + 1).to_string(),
                truth.to_string(),
                ctx.num(s),
                ctx.num(s * ev.normalization),
                ev.predictions[i].to_string(),
            ]);
        }
        write_csv(path, &["row", "label", "score", "normalized_score", "prediction"], rows)?;
    }
    Ok(())
}

fn clique(ctx: &mut Ctx, a: &CliqueArgs) -> Outcome {
    ctx.input(&a.input)?;
    let (x, _, report) = ingest::read_plain(&a.input)?;
    let mode = match a.mode {
        ModeArg::Pairwise => CliqueMode::Pairwise,
        ModeArg::Rowmax => CliqueMode::RowMax,
    };
    let tail = match a.tail {
        TailArg::Upper => Tail::Upper,
        TailArg::TwoSided => Tail::TwoSided,
    };
    let series = PValueSeries::new(covtest::clique_pvalues(&x, mode, tail)?)?;
    let res = hc::hc_orthodox_plus(&series);
    ctx.kv("n", report.n)?;
    ctx.kv("p", report.p)?;
    ctx.kv("pvalues", series.len())?;
    ctx.kv("score", ctx.num(res.score))?;
    ctx.kv("argmax", res.argmax_index.map_or_else(|| "NA".to_string(), |i| i.to_string()))?;
    if let Some(path) = &a.trace {
        let comps = hc::hc_components(&series);
        let rows = series
            .values()
            .iter()
            .zip(comps)
            .enumerate()
            .map(|(k, (&p, c))| vec![(k + 1).to_string(), ctx.num(p), opt_num(ctx, c)])
            .collect::<Vec<_>>();
        write_csv(path, &["i", "p", "component"], rows)?;
    }
    Ok(())
}

fn eigen(ctx: &mut Ctx, a: &EigenArgs) -> Outcome {
    ctx.input(&a.input)?;
    let (x, _, report) = ingest::read_plain(&a.input)?;
    let mut cache = ProfileCache::open(a.profile_cache.clone().unwrap_or_else(cache::default_profile_path))?;
    let (profile, hit) = cache.get_or_simulate(report.n, report.p, a.null_reps, a.seed)?;
    let eig = covtest::sample_eigenvalues(&x);
    let res = covtest::eigen_hc_from_eigenvalues(&eig, &profile, a.alpha0)?;
    ctx.kv("n", report.n)?;
    ctx.kv("p", report.p)?;
    ctx.kv("profile", if hit { "cache" } else { "simulated" })?;
    ctx.kv("score", ctx.num(res.score))?;
    ctx.kv("argmax", res.argmax_index)?;
    if let Some(path) = &a.trace {
        let rows = (0..eig.len())
            .map(|k| {
                vec![
                    (k + 1).to_string(),
                    ctx.num(eig[k]),
                    ctx.num(profile.means[k]),
                    ctx.num(profile.sds[k]),
                    ctx.num(res.components[k]),
                ]
            })
            .collect::<Vec<_>>();
        write_csv(path, &["i", "eigenvalue", "null_mean", "null_sd", "component"], rows)?;
    }
    Ok(())
}

fn corners(c: CornerArg) -> Vec<Corner> {
    match c {
        CornerArg::UpperRight => vec![Corner::UpperRight],
        CornerArg::UpperLeft => vec![Corner::UpperLeft],
        CornerArg::LowerRight => vec![Corner::LowerRight],
        CornerArg::LowerLeft => vec![Corner::LowerLeft],
        CornerArg::All => Corner::ALL.to_vec(),
    }
}

fn corner_name(c: Corner) -> &'static str {
    match c {
        Corner::UpperRight => "upper-right",
        Corner::UpperLeft => "upper-left",
        Corner::LowerRight => "lower-right",
        Corner::LowerLeft => "lower-left",
    }
}

/// Maximum pairHC* over the requested corners.
fn pair_score(x: &[f64], y: &[f64], which: &[Corner], alpha0: f64) -> hicrit_core::Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for &c in which {
        best = best.max(pairhc::pair_hc_star(&pairhc::ranked_corner(x, y, c)?, alpha0)?.score);
    }
    Ok(best)
}

fn pairs(ctx: &mut Ctx, a: &PairsArgs) -> Outcome {
    let which = corners(a.corner);
    if let Some(input) = &a.input {
        ctx.input(input)?;
        let (x, y) = ingest::read_pairs(input)?;
        ctx.kv("n", x.len())?;
        for &c in &which {
            let res = pairhc::pair_hc_star(&pairhc::ranked_corner(&x, &y, c)?, a.alpha0)?;
            ctx.kv(&format!("score[{}]", corner_name(c)), ctx.num(res.score))?;
            ctx.kv(
                &format!("argmax[{}]", corner_name(c)),
                res.argmax_index.map_or_else(|| "NA".into(), |k| k.to_string()),
            )?;
        }
        ctx.kv("score", ctx.num(pair_score(&x, &y, &which, a.alpha0)?))?;
        if let Some(path) = &a.trace {
            let ranked: RankedPairs = pairhc::ranked_corner(&x, &y, which[0])?;
            let counts = pairhc::corner_counts(&ranked);
            let comps = pairhc::pair_hc_components(&ranked)?;
            let rows = counts
                .iter()
                .zip(comps)
                .enumerate()
                .map(|(k, (&s, c))| vec![(k + 1).to_string(), s.to_string(), opt_num(ctx, c)])
                .collect::<Vec<_>>();
            write_csv(path, &["k", "S_k", "component"], rows)?;
        }
        return Ok(());
    }
    let Some(seed) = a.seed else {
        return Err(Failure::Usage("pairs --simulate needs --seed".into()));
    };
    let (epsilon, tau, rho) = match a.preset {
        Some(k) => {
            let s = PRESET_SETTINGS[k as usize];
            (s.epsilon, s.tau, s.rho)
        }
        None => (a.epsilon, a.tau, a.rho),
    };
    let base = RngSeed::new(seed);
    let simulate = |eps: f64, tag: u16| -> hicrit_core::Result<Vec<f64>> {
        (0..a.reps)
            .map(|r| {
                let mut rng = base.substream(tag, r).rng();
                let (x, y) = pairhc::sample_bivariate_mixture(a.n, eps, tau, rho, &mut rng)?;
                pair_score(&x, &y, &which, a.alpha0)
            })
            .collect()
    };
    let null = simulate(0.0, tags::NULL)?;
    let alt = simulate(epsilon, tags::ALTERNATIVE)?;
    let mut sorted_null = null.clone();
    sorted_null.sort_by(f64::total_cmp);
    let mut sorted_alt = alt.clone();
    sorted_alt.sort_by(f64::total_cmp);
    let q95 = calibrate::empirical_quantile(&sorted_null, 0.05)?;
    let median_alt = sorted_alt[(sorted_alt.len() - 1) / 2];
    ctx.kv("n", a.n)?;
    ctx.kv("epsilon", ctx.num(epsilon))?;
    ctx.kv("tau", ctx.num(tau))?;
    ctx.kv("rho", ctx.num(rho))?;
    ctx.kv("reps", a.reps)?;
    ctx.kv("null_q95", ctx.num(q95))?;
    ctx.kv("alt_median", ctx.num(median_alt))?;
    ctx.kv("power", ctx.num(alt.iter().filter(|&&s| s > q95).count() as f64 / alt.len() as f64))?;
    if let Some(path) = &a.out {
        write_csv(path, &["hypothesis", "replicate", "score"], labelled_scores(ctx, &null, &alt))?;
    }
    Ok(())
}

fn phase_table(ctx: &mut Ctx, a: &PhaseArgs) -> Outcome {
    let rows = phase::boundary_table(a.theta, a.grid, a.r)?;
    let header = ["vartheta", "rho", "rho_theta", "qideal_phase", "qideal_value"];
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let (ph, val) = match row.qideal {
                Some(q) => (q.phase.to_string(), ctx.num(q.value)),
                None => ("NA".to_string(), "NA".to_string()),
            };
            vec![ctx.num(row.vartheta), ctx.num(row.rho), ctx.num(row.rho_theta), ph, val]
        })
        .collect();
    match &a.out {
        Some(path) => {
            write_csv(path, &header, cells)?;
            ctx.kv("rows", rows.len())?;
            ctx.kv("out", path.display())?;
        }
        None => {
            ctx.line(header.join(","))?;
            for row in cells {
                ctx.line(row.join(","))?;
            }
        }
    }
    Ok(())
}
