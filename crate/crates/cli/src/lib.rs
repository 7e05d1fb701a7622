//! `seqsing` command-line front end.
//!
//! Exit status: 0 when everything checked holds, 2 when a property is
//! violated, 1 for usage, configuration and I/O errors.

pub mod config;
pub mod norms;
pub mod plot;
pub mod suite;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use seqsing_core::dominate::{counterexample_report, domination_constant, Verdict};
use seqsing_core::pairgen::{validate_pair, BuildOptions, TailRule};
use seqsing_core::schreier::{
    apply_spread, combine_member, double, enumerate_maximal, enumerate_members, find_l, threshold,
    DEFAULT_MAX_UNIVERSE,
};
use seqsing_core::seqspace::{lorentz_norm, lp_norm, pair_norm, summing_lorentz_norm};
use seqsing_core::{
    build_pair, CoeffVector, FamilyIndex, FiniteSet, Precision, Schreier, SummingVector,
};

pub use config::{RunConfig, WORKERS_ENV};
pub use plot::emit_plotdata;
pub use suite::{run_suite, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Ordinal(#[from] seqsing_core::OrdinalError),
    #[error(transparent)]
    Schreier(#[from] seqsing_core::SchreierError),
    #[error(transparent)]
    Seq(#[from] seqsing_core::SeqError),
    #[error(transparent)]
    Pair(#[from] seqsing_core::PairError),
    #[error(transparent)]
    Dominate(#[from] seqsing_core::DominateError),
}

/// What a successful command found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Holds,
    Violated,
}

impl Outcome {
    fn from_pass(ok: bool) -> Self {
        if ok {
            Outcome::Holds
        } else {
            Outcome::Violated
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "seqsing",
    version,
    about = "Schreier families, Lorentz weight pairs and domination estimates"
)]
pub struct Cli {
    /// TOML run configuration; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (also SEQSING_WORKERS).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// double or extended
    #[arg(long, global = true)]
    pub precision: Option<Precision>,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Print the JSON report on stdout instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schreier family membership and combinatorics.
    #[command(subcommand)]
    Schreier(SchreierCmd),
    /// Norms and weights.
    #[command(subcommand)]
    Seq(SeqCmd),
    /// Build and check alternating weight pairs.
    #[command(subcommand)]
    Pair(PairCmd),
    /// Domination constants and the counterexample.
    #[command(subcommand)]
    Dominate(DominateCmd),
    /// Run every property check.
    Suite(SuiteArgs),
}

#[derive(Debug, Subcommand)]
pub enum SchreierCmd {
    Member {
        #[arg(long)]
        xi: FamilyIndex,
        /// Comma-separated, e.g. 5,6,7
        #[arg(long, value_parser = parse_set)]
        set: FiniteSet,
    },
    /// Maximal members of S_xi inside {1..max}, or all members with --all.
    Enum {
        #[arg(long)]
        xi: FamilyIndex,
        #[arg(long)]
        max: u32,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_UNIVERSE)]
        limit: u32,
    },
    /// Least d with every S_xi set above d inside S_zeta.
    Threshold {
        #[arg(long)]
        xi: FamilyIndex,
        #[arg(long)]
        zeta: FamilyIndex,
        #[arg(long)]
        max: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_UNIVERSE)]
        limit: u32,
    },
    /// Longest verified L with S_xi[S_zeta](L) inside S_(zeta+xi).
    FindL {
        #[arg(long)]
        xi: FamilyIndex,
        #[arg(long)]
        zeta: FamilyIndex,
        #[arg(long)]
        max: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_UNIVERSE)]
        limit: u32,
    },
    /// {2n, 2n+2 : n in A}, optionally tested against S_xi.
    Double {
        #[arg(long, value_parser = parse_set)]
        set: FiniteSet,
        #[arg(long)]
        xi: Option<FamilyIndex>,
    },
    /// Image of a set under an increasing sequence.
    Spread {
        #[arg(long, value_parser = parse_set)]
        set: FiniteSet,
        #[arg(long, value_parser = parse_set)]
        m: FiniteSet,
    },
    /// Blocks separated by ';', e.g. "2,3;5,6".
    Combine {
        #[arg(long)]
        blocks: String,
        #[arg(long)]
        xi: FamilyIndex,
        #[arg(long)]
        zeta: FamilyIndex,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Space {
    Lp,
    C0,
    Lorentz,
    Pair,
}

#[derive(Debug, Subcommand)]
pub enum SeqCmd {
    Norm {
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long)]
        p: Option<f64>,
        /// Overrides the weight file's q for lorentz.
        #[arg(long)]
        q: Option<f64>,
        /// Pair file (optionally #w or #wt), weight file, or power:s
        #[arg(long)]
        weights: Option<String>,
        /// Sparse entries, e.g. 1:1,2:-0.5
        #[arg(long = "vec")]
        vector: CoeffVector,
    },
    /// Weight prefixes of a pair as CSV.
    Weights {
        pair: PathBuf,
        #[arg(long, default_value_t = 1000)]
        rows: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norm of the summing vector s_n.
    Summing {
        #[arg(long)]
        weights: String,
        #[arg(long)]
        n: u128,
    },
}

#[derive(Debug, Subcommand)]
pub enum PairCmd {
    Build {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        stages: u32,
        #[arg(long, default_value = "flat")]
        tail: TailRule,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Validate {
        pair: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DominateCmd {
    /// Lower bound for sup |a|_Y / |a|_X over supports in S_xi.
    Const {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value = "w1")]
        xi: FamilyIndex,
        #[arg(long)]
        max: u32,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Counterexample {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        stages: u32,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value = "flat")]
        tail: TailRule,
        /// Directory for witnesses.csv and weights.csv.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        plot_rows: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Also check this pair file.
    #[arg(long)]
    pub pair: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_set(text: &str) -> Result<FiniteSet, String> {
    let items: Result<Vec<u32>, _> = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect();
    FiniteSet::from_unsorted(items.map_err(|e| format!("{text:?}: {e}"))?)
        .map_err(|e| e.to_string())
}

fn parse_blocks(text: &str) -> Result<Vec<FiniteSet>, CliError> {
    text.split(';')
        .map(|b| parse_set(b).map_err(CliError::Usage))
        .collect()
}

/// Where reports go.
struct Sink<'a> {
    out: &'a mut (dyn Write + Send),
    json: bool,
}

impl Sink<'_> {
    fn emit<T: Serialize>(
        &mut self,
        report: &T,
        file: Option<&Path>,
        summary: &str,
    ) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(report).expect("reports serialize");
        if let Some(path) = file {
            std::fs::write(path, format!("{text}\n")).map_err(|source| CliError::Io {
                path: path.into(),
                source,
            })?;
        }
        let line = if self.json { text } else { summary.to_string() };
        writeln!(self.out, "{line}").map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(p) = cli.precision {
        cfg.precision = p;
    }
    if let Some(t) = cli.tolerance {
        cfg.tolerance = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn build_options(cfg: &RunConfig, tail: TailRule) -> BuildOptions {
    BuildOptions {
        precision: cfg.precision,
        tail,
        tolerance: cfg.tolerance,
        max_stages: cfg.max_stages,
    }
}

fn run_schreier(cmd: &SchreierCmd, sink: &mut Sink) -> Result<Outcome, CliError> {
    match cmd {
        SchreierCmd::Member { xi, set } => {
            let member = Schreier::global().is_member(set, xi);
            let report = serde_json::json!({ "set": set, "xi": xi, "member": member });
            sink.emit(&report, None, &format!("{set} in S_{xi}: {member}"))?;
        }
        SchreierCmd::Enum {
            xi,
            max,
            all,
            limit,
        } => {
            let sets = if *all {
                enumerate_members(xi, *max, *limit)?
            } else {
                enumerate_maximal(xi, *max, *limit)?
            };
            let summary = sets
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("\n");
            let report =
                serde_json::json!({ "xi": xi, "max": max, "maximal_only": !all, "sets": sets });
            sink.emit(&report, None, &summary)?;
        }
        SchreierCmd::Threshold {
            xi,
            zeta,
            max,
            limit,
        } => {
            let t = threshold(xi, zeta, *max, *limit)?;
            let report = serde_json::json!({ "xi": xi, "zeta": zeta, "max": max, "threshold": t });
            sink.emit(&report, None, &format!("{t:?}"))?;
        }
        SchreierCmd::FindL {
            xi,
            zeta,
            max,
            limit,
        } => {
            let found = find_l(xi, zeta, *max, *limit)?;
            sink.emit(
                &found,
                None,
                &format!("L = {:?} into S_{}", found.prefix, found.target),
            )?;
        }
        SchreierCmd::Double { set, xi } => {
            let d = double(set);
            let members = xi.as_ref().map(|xi| {
                (
                    Schreier::global().is_member(set, xi),
                    Schreier::global().is_member(&d, xi),
                )
            });
            let report = serde_json::json!({
                "set": set, "doubled": d, "xi": xi,
                "set_member": members.map(|m| m.0), "doubled_member": members.map(|m| m.1),
            });
            sink.emit(&report, None, &d.to_string())?;
            // doubling preserves membership; a member whose double is not is a violation
            if let Some((true, false)) = members {
                return Ok(Outcome::Violated);
            }
        }
        SchreierCmd::Spread { set, m } => {
            let image = apply_spread(set, m.as_slice())?;
            sink.emit(
                &serde_json::json!({ "set": set, "m": m, "image": image }),
                None,
                &image.to_string(),
            )?;
        }
        SchreierCmd::Combine { blocks, xi, zeta } => {
            let blocks = parse_blocks(blocks)?;
            let ok = combine_member(&blocks, xi, zeta)?;
            let report =
                serde_json::json!({ "blocks": blocks, "xi": xi, "zeta": zeta, "member": ok });
            sink.emit(&report, None, &ok.to_string())?;
        }
    }
    Ok(Outcome::Holds)
}

fn run_seq(cmd: &SeqCmd, sink: &mut Sink) -> Result<Outcome, CliError> {
    match cmd {
        SeqCmd::Norm {
            space,
            p,
            q,
            weights,
            vector,
        } => {
            let need_weights = || {
                weights
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("--weights is required".into()))
            };
            let value = match space {
                Space::Lp => lp_norm(
                    vector,
                    p.ok_or_else(|| CliError::Usage("--p is required".into()))?,
                )?,
                Space::C0 => lp_norm(vector, f64::INFINITY)?,
                Space::Lorentz => {
                    let mut w = norms::load_weights(need_weights()?)?;
                    if let Some(q) = q {
                        w.q = *q;
                        w.validate()?;
                    }
                    lorentz_norm(vector, &w)?
                }
                Space::Pair => {
                    let pair = norms::load_pair(Path::new(need_weights()?))?;
                    pair_norm(vector, &pair.w(), &pair.wt())?
                }
            };
            let report = serde_json::json!({ "space": format!("{space:?}").to_lowercase(), "vec": vector, "norm": value });
            sink.emit(&report, None, &value.to_string())?;
        }
        SeqCmd::Weights { pair, rows, out } => {
            let pair = norms::load_pair(pair)?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(|source| CliError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    plot::write_weights(file, &pair, *rows, path)?;
                }
                None => plot::write_weights(&mut *sink.out, &pair, *rows, Path::new("<stdout>"))?,
            }
        }
        SeqCmd::Summing { weights, n } => {
            let w = norms::load_weights(weights)?;
            let value = summing_lorentz_norm(SummingVector::new(*n)?, &w)?;
            sink.emit(
                &serde_json::json!({ "n": n, "norm": value }),
                None,
                &value.to_string(),
            )?;
        }
    }
    Ok(Outcome::Holds)
}

fn run_pair(cmd: &PairCmd, cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome, CliError> {
    match cmd {
        PairCmd::Build {
            p,
            q,
            stages,
            tail,
            out,
        } => {
            let pair = build_pair(*p, *q, *stages, &build_options(cfg, *tail))?;
            let summary = pair
                .stages
                .iter()
                .map(|s| format!("({}, {})", s.m, s.n))
                .collect::<Vec<_>>()
                .join(" ");
            sink.emit(&pair, out.as_deref(), &summary)?;
            Ok(Outcome::Holds)
        }
        PairCmd::Validate { pair, samples, out } => {
            let pair = norms::load_pair(pair)?;
            let report = validate_pair(&pair, samples.unwrap_or(cfg.samples), cfg.seed);
            let summary = report
                .checks
                .iter()
                .map(|c| format!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name))
                .collect::<Vec<_>>()
                .join("\n");
            sink.emit(&report, out.as_deref(), &summary)?;
            Ok(Outcome::from_pass(report.passed))
        }
    }
}

fn run_dominate(cmd: &DominateCmd, cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome, CliError> {
    match cmd {
        DominateCmd::Const {
            x,
            y,
            xi,
            max,
            budget,
            out,
        } => {
            if *max > cfg.max_n {
                return Err(CliError::Config(format!(
                    "--max {max} exceeds max_n = {}",
                    cfg.max_n
                )));
            }
            let (x, y) = (norms::parse_norm(x)?, norms::parse_norm(y)?);
            let report =
                domination_constant(&x, &y, xi, *max, budget.unwrap_or(cfg.budget), cfg.seed)?;
            let summary = format!(
                "{} (lower bound, {:?})",
                report.constant_estimate, report.method
            );
            sink.emit(&report, out.as_deref(), &summary)?;
        }
        DominateCmd::Counterexample {
            p,
            q,
            stages,
            samples,
            tail,
            plot_dir,
            plot_rows,
            out,
        } => {
            let opts = build_options(cfg, *tail);
            let report = counterexample_report(
                *p,
                *q,
                *stages,
                samples.unwrap_or(cfg.samples),
                cfg.seed,
                &opts,
            )?;
            if let Some(dir) = plot_dir.as_ref().or(cfg.outputs.plot_dir.as_ref()) {
                emit_plotdata(&report, dir, *plot_rows)?;
            }
            sink.emit(
                &report,
                out.as_deref(),
                &format!("{:?}", report.verdict).to_uppercase(),
            )?;
            return Ok(Outcome::from_pass(report.verdict == Verdict::Pass));
        }
    }
    Ok(Outcome::Holds)
}

fn run_suite_cmd(args: &SuiteArgs, cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome, CliError> {
    let input = args.pair.as_deref().map(norms::load_pair).transpose()?;
    let report = run_suite(cfg, input.as_ref())?;
    let summary = report
        .checks
        .iter()
        .map(|c| format!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name))
        .chain([format!(
            "{} passed, {} failed",
            report.passed, report.failed
        )])
        .collect::<Vec<_>>()
        .join("\n");
    let file = args.out.as_ref().or(cfg.outputs.json.as_ref());
    sink.emit(&report, file.map(PathBuf::as_path), &summary)?;
    Ok(Outcome::from_pass(report.failed == 0))
}

/// Runs a parsed command line. `env_workers` is the value of
/// [`WORKERS_ENV`], passed in so callers control the environment.
pub fn run(
    cli: &Cli,
    env_workers: Option<&str>,
    out: &mut (dyn Write + Send),
) -> Result<Outcome, CliError> {
    let cfg = effective_config(cli)?;
    let workers = cfg.resolve_workers(cli.workers, env_workers)?;
    let mut sink = Sink {
        out,
        json: cli.json,
    };
    let body = |sink: &mut Sink| match &cli.command {
        Command::Schreier(cmd) => run_schreier(cmd, sink),
        Command::Seq(cmd) => run_seq(cmd, sink),
        Command::Pair(cmd) => run_pair(cmd, &cfg, sink),
        Command::Dominate(cmd) => run_dominate(cmd, &cfg, sink),
        Command::Suite(args) => run_suite_cmd(args, &cfg, sink),
    };
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(e.to_string()))?
            .install(|| body(&mut sink)),
        None => body(&mut sink),
    }
}

/// Parses `args`, runs, reports errors on `err`, and returns the exit status.
pub fn main_with<I, T>(
    args: I,
    env_workers: Option<&str>,
    out: &mut (dyn Write + Send),
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match run(&cli, env_workers, out) {
        Ok(Outcome::Holds) => EXIT_OK,
        Ok(Outcome::Violated) => EXIT_VIOLATION,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
