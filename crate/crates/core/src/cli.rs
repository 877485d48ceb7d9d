//! The `rankdcg` command line: `evaluate`, `curves`, `synth` and
//! `oracle-check`.
//!
//! Exit codes: 0 success, 2 input or option error, 3 hypothesis/reference
//! mismatch, 4 oracle violation.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datagen::{
    degradation_sweep, generate, perturb, Distribution, GenSpec, Perturbation, SweepFamily,
    DEFAULT_POWER_LAW_LEVELS,
};
use crate::error::Error;
use crate::eval::{evaluate_all, EvalOptions, Metric};
use crate::io::{
    read_hypothesis, read_reference, write_curves_csv, write_hypothesis, write_reference, write_report,
    write_sweep_csv, DataFormat, HypothesisMode, ReportFormat,
};
use crate::oracle::{replay_table1, sweep, verify_instance, Property};
use crate::rankdcg::CostVariant;
use crate::ranking::{RankedList, TiePolicy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_ORACLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "rankdcg",
    version,
    about = "Rank-ordering evaluation with rankDCG and baseline measures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score hypothesis files against a reference file.
    Evaluate(EvaluateArgs),
    /// Emit per-position cost curves as `position,variant,cost` CSV.
    Curves(CurvesArgs),
    /// Generate reference lists, degraded hypotheses or degradation sweeps.
    Synth(SynthArgs),
    /// Run exhaustive checks of the rankDCG bounds and the constructed table.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    Pessimistic,
    Optimistic,
    Expected,
}

impl From<PolicyArg> for TiePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Pessimistic => TiePolicy::Pessimistic,
            PolicyArg::Optimistic => TiePolicy::Optimistic,
            PolicyArg::Expected => TiePolicy::Expected,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Table,
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Table => ReportFormat::Table,
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Auto,
    Order,
    Scores,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DataFormatArg {
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Reference file (`id,rank` CSV or JSON Lines).
    #[arg(long, short = 'r')]
    pub reference: PathBuf,
    /// Hypothesis file; repeat for several. Rows follow this order.
    #[arg(long = "hypothesis", short = 'H', required = true)]
    pub hypotheses: Vec<PathBuf>,
    /// Comma-separated: rankdcg, ndcg, ndcg-raw, tau-b, ap, map, f1.
    #[arg(long, default_value = "rankdcg")]
    pub metrics: String,
    #[arg(long, value_enum, default_value = "pessimistic")]
    pub tie_policy: PolicyArg,
    /// Items ranked above this are relevant for ap, map and f1 (default: lowest rank).
    #[arg(long)]
    pub ap_threshold: Option<u64>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: FormatArg,
    #[arg(long, value_enum, default_value = "auto")]
    pub hyp_mode: ModeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    #[arg(long, short = 'r', conflicts_with = "ranks")]
    pub reference: Option<PathBuf>,
    /// Comma-separated ranks, e.g. `9,4,4,2,2,2,1,1,1,1`.
    #[arg(long)]
    pub ranks: Option<String>,
    /// `all` or one of dcg-log, burges-exp, rel-prime-linear, rankdcg.
    #[arg(long, default_value = "all")]
    pub variant: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Explicit ranks, e.g. `9,4,4,2,2,2,1,1,1,1`.
    #[arg(long, group = "dist")]
    pub constructed: Option<String>,
    /// Power-law exponent; ranks 1..=levels with frequency rank^-alpha.
    #[arg(long, group = "dist")]
    pub power_law: Option<f64>,
    /// Number of equally likely rank levels.
    #[arg(long, group = "dist")]
    pub uniform: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_POWER_LAW_LEVELS)]
    pub levels: u32,
    /// Item count (random distributions).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// reverse, majority-class, subgroup-shuffle, adjacent-swaps:K or top-displacement:POS.
    #[arg(long)]
    pub perturb: Option<String>,
    /// Degradation sweep family: adjacent-swaps, top-displacement or reverse-prefix.
    #[arg(long, conflicts_with = "perturb")]
    pub sweep: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Adjacent swaps added per sweep step.
    #[arg(long, default_value_t = 1)]
    pub per_step: usize,
    /// Metrics for sweeps.
    #[arg(long, default_value = "rankdcg,ndcg,tau-b,ap")]
    pub metrics: String,
    #[arg(long, value_enum, default_value = "pessimistic")]
    pub tie_policy: PolicyArg,
    #[arg(long)]
    pub ap_threshold: Option<u64>,
    /// File format when writing to stdout (files use their extension).
    #[arg(long, value_enum, default_value = "csv")]
    pub data_format: DataFormatArg,
    /// Reference output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Hypothesis output path.
    #[arg(long)]
    pub hyp_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Replay the six-row constructed comparison.
    #[arg(long)]
    pub table1: bool,
    /// Verify one rank multiset, e.g. `3,2,1`.
    #[arg(long)]
    pub ranks: Option<String>,
    /// Verify every multiset over 1..=levels with up to max-n items.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, default_value_t = 4)]
    pub levels: u64,
    #[arg(long, default_value_t = 8)]
    pub max_n: usize,
    #[arg(long, value_enum, default_value = "table")]
    pub format: FormatArg,
}

/// A failed command: exit code plus diagnostic.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::HypothesisMismatch(_) => EXIT_MISMATCH,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

type CmdResult = Result<String, Failure>;

fn parse_rank_list(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| input_error(format!("`{t}` is not a non-negative integer rank")))
        })
        .collect()
}

fn emit(out: Option<&Path>, text: String, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| input_error(format!("cannot write output: {e}"))),
    }
}

fn cmd_evaluate(args: &EvaluateArgs) -> CmdResult {
    let metrics = Metric::parse_list(&args.metrics)?;
    let list = read_reference(&args.reference)?;
    let mode = match args.hyp_mode {
        ModeArg::Auto => None,
        ModeArg::Order => Some(HypothesisMode::Order),
        ModeArg::Scores => Some(HypothesisMode::Scores),
    };
    let hyps = args
        .hypotheses
        .iter()
        .map(|p| {
            let name = p
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string());
            Ok((name, read_hypothesis(p, mode)?))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let opts = EvalOptions {
        tie_policy: args.tie_policy.into(),
        ap_threshold: args.ap_threshold,
    };
    let rows = evaluate_all(&list, &hyps, &metrics, opts)?;
    Ok(write_report(&rows, args.format.into()))
}

fn cmd_curves(args: &CurvesArgs) -> CmdResult {
    let list = match (&args.reference, &args.ranks) {
        (Some(path), None) => read_reference(path)?,
        (None, Some(ranks)) => RankedList::from_ranks(&parse_rank_list(ranks)?)?,
        _ => return Err(input_error("give exactly one of --reference or --ranks")),
    };
    let variants = if args.variant == "all" {
        CostVariant::ALL.to_vec()
    } else {
        vec![args.variant.parse::<CostVariant>()?]
    };
    Ok(write_curves_csv(&list, &variants))
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| input_error(format!("{what} is randomized and needs an explicit --seed")))
}

fn parse_perturbation(spec: &str, seed: Option<u64>) -> Result<Perturbation, Failure> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let number = |a: Option<&str>| -> Result<usize, Failure> {
        a.and_then(|a| a.parse().ok())
            .ok_or_else(|| input_error(format!("`{spec}` needs a numeric argument, e.g. `{name}:3`")))
    };
    match name {
        "reverse" => Ok(Perturbation::Reverse),
        "majority-class" => Ok(Perturbation::MajorityClass),
        "subgroup-shuffle" => Ok(Perturbation::SubgroupShuffle {
            seed: require_seed(seed, "subgroup-shuffle")?,
        }),
        "adjacent-swaps" => Ok(Perturbation::AdjacentSwaps {
            swaps: number(arg)?,
            seed: require_seed(seed, "adjacent-swaps")?,
        }),
        "top-displacement" => Ok(Perturbation::TopDisplacement { target: number(arg)? }),
        other => Err(input_error(format!("unknown perturbation `{other}`"))),
    }
}

fn gen_spec(args: &SynthArgs) -> Result<GenSpec, Failure> {
    if let Some(ranks) = &args.constructed {
        let ranks = parse_rank_list(ranks)?;
        return Ok(GenSpec {
            n: ranks.len(),
            distribution: Distribution::Constructed(ranks),
            seed: args.seed.unwrap_or(0),
        });
    }
    let distribution = match (args.power_law, args.uniform) {
        (Some(alpha), None) => Distribution::PowerLaw {
            alpha,
            levels: args.levels,
        },
        (None, Some(levels)) => Distribution::Uniform { levels },
        _ => return Err(input_error("give one of --constructed, --power-law or --uniform")),
    };
    let n = args
        .n
        .ok_or_else(|| input_error("random distributions need --n"))?;
    Ok(GenSpec {
        n,
        distribution,
        seed: require_seed(args.seed, "random generation")?,
    })
}

fn data_format(path: Option<&Path>, fallback: DataFormatArg) -> DataFormat {
    match (path, fallback) {
        (Some(p), _) => DataFormat::from_path(p),
        (None, DataFormatArg::Csv) => DataFormat::Csv,
        (None, DataFormatArg::Jsonl) => DataFormat::JsonLines,
    }
}

/// Writes side files itself and returns what belongs on standard output.
fn cmd_synth(args: &SynthArgs) -> CmdResult {
    let spec = gen_spec(args)?;
    if let Some(family) = &args.sweep {
        let family = match family.as_str() {
            "adjacent-swaps" => SweepFamily::AdjacentSwaps {
                per_step: args.per_step,
                seed: require_seed(args.seed, "an adjacent-swaps sweep")?,
            },
            "top-displacement" => SweepFamily::TopDisplacement,
            "reverse-prefix" => SweepFamily::ReversePrefix,
            other => return Err(input_error(format!("unknown sweep family `{other}`"))),
        };
        let metrics = Metric::parse_list(&args.metrics)?;
        let opts = EvalOptions {
            tie_policy: args.tie_policy.into(),
            ap_threshold: args.ap_threshold,
        };
        let table = degradation_sweep(&spec, family, args.steps, &metrics, opts)?;
        let csv = write_sweep_csv(&table);
        return match &args.out {
            Some(path) => emit(Some(path), csv, &mut std::io::sink()).map(|_| String::new()),
            None => Ok(csv),
        };
    }

    let perturbation = args
        .perturb
        .as_deref()
        .map(|p| parse_perturbation(p, args.seed))
        .transpose()?;
    let list = generate(&spec)?;
    let mut stdout_text = String::new();

    let reference = write_reference(&list, data_format(args.out.as_deref(), args.data_format))?;
    match (&args.out, perturbation) {
        (Some(path), _) => emit(Some(path), reference, &mut std::io::sink())?,
        (None, None) => stdout_text.push_str(&reference),
        // the hypothesis takes stdout; the reference is only written on request
        (None, Some(_)) if args.hyp_out.is_none() => {}
        (None, Some(_)) => stdout_text.push_str(&reference),
    }
    if let Some(op) = perturbation {
        let hyp = perturb(&list, op)?;
        let text = write_hypothesis(&hyp, data_format(args.hyp_out.as_deref(), args.data_format))?;
        match &args.hyp_out {
            Some(path) => emit(Some(path), text, &mut std::io::sink())?,
            None => stdout_text.push_str(&text),
        }
    }
    Ok(stdout_text)
}

fn cmd_oracle_check(args: &OracleArgs) -> CmdResult {
    let json = matches!(args.format, FormatArg::Json);
    let run_table1 = args.table1 || (args.ranks.is_none() && !args.sweep);
    let mut lines: Vec<String> = Vec::new();
    let mut records: Vec<serde_json::Value> = Vec::new();
    let mut clean = true;

    if run_table1 {
        let replay = replay_table1()?;
        for row in &replay.rows {
            clean &= row.passed();
            lines.push(row.to_string());
            records.push(serde_json::json!({
                "check": "table1",
                "row": row.row,
                "rankdcg": row.rankdcg,
                "tau_b": row.tau_b.value(),
                "ndcg": row.ndcg,
                "pass": row.passed(),
            }));
        }
        let dis = replay.disambiguation_ok();
        clean &= dis;
        lines.push(format!(
            "{} formula reading: row 3 adopted {:.3}, rejected {:.3}",
            if dis { "PASS" } else { "FAIL" },
            replay.rows[2].rankdcg,
            replay.rows[2].rejected_reading
        ));
        records.push(serde_json::json!({
            "check": "disambiguation",
            "adopted": replay.rows[2].rankdcg,
            "rejected": replay.rows[2].rejected_reading,
            "pass": dis,
        }));
    }
    if let Some(ranks) = &args.ranks {
        let report = verify_instance(&parse_rank_list(ranks)?)?;
        clean &= report.all_checks_pass();
        lines.push(report.to_string());
        records.push(report.to_json());
    }
    if args.sweep {
        let report = sweep(args.levels, args.max_n)?;
        clean &= report.all_checks_pass();
        let bounds_ok = report.is_clean();
        lines.push(format!(
            "{} bounds: {} violations",
            if bounds_ok { "PASS" } else { "FAIL" },
            report.violation_count()
        ));
        let mut properties = serde_json::Map::new();
        for p in Property::ALL {
            let failures = report.property_failures(p);
            let mut line = format!(
                "{} {}: {} failing orderings",
                if failures == 0 { "PASS" } else { "FAIL" },
                p.name(),
                failures
            );
            if let Some((instance, example)) = report.first_counterexample(p) {
                line.push_str(&format!(" (first in {instance}: {example})"));
            }
            lines.push(line);
            properties.insert(p.name().to_string(), serde_json::json!(failures));
        }
        let failed = report.failures().count();
        lines.push(format!(
            "{} sweep levels=1..{} n<={}: {} instances, {} permutations, {} failing",
            if report.all_checks_pass() { "PASS" } else { "FAIL" },
            args.levels,
            args.max_n,
            report.instances.len(),
            report.permutations(),
            failed
        ));
        records.push(serde_json::json!({
            "check": "sweep",
            "instances": report.instances.len(),
            "permutations": report.permutations(),
            "violations": report.violation_count(),
            "property_failures": properties,
            "failing": failed,
            "pass": report.all_checks_pass(),
        }));
    }

    let text = if json {
        let mut s = serde_json::to_string_pretty(&serde_json::json!({ "checks": records }))
            .expect("oracle records serialize");
        s.push('\n');
        s
    } else {
        let mut s = lines.join("\n");
        s.push('\n');
        s
    };
    if clean {
        Ok(text)
    } else {
        Err(Failure {
            code: EXIT_ORACLE,
            message: text,
        })
    }
}

/// Runs a parsed command, writing results to `stdout` and diagnostics to
/// `stderr`. Returns the process exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let (result, out) = match &cli.command {
        Command::Evaluate(a) => (cmd_evaluate(a), a.out.as_deref()),
        Command::Curves(a) => (cmd_curves(a), a.out.as_deref()),
        Command::Synth(a) => (cmd_synth(a), None),
        Command::OracleCheck(a) => (cmd_oracle_check(a), None),
    };
    let result = result.and_then(|text| emit(out, text, stdout));
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            if f.code == EXIT_ORACLE {
                let _ = stdout.write_all(f.message.as_bytes());
                let _ = writeln!(stderr, "oracle check failed");
            } else {
                let _ = writeln!(stderr, "error: {}", f.message);
            }
            f.code
        }
    }
}

/// Parses `args` (including the program name) and runs them. Option errors
/// exit with 2.
pub fn run_from<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            code
        }
    }
}
