use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use quadbct_core::family::classify;
use quadbct_core::machinery::{verify_theorem, BetaMode};
use quadbct_core::sbox::{self, build_table, BctMethod, MAX_FULL_TABLE_N};
use quadbct_core::search::{
    self, converse_experiment, run_campaign_collect, write_histograms_csv, BaselineFamily,
    BetaPolicy, SearchConfig,
};
use quadbct_core::suites::{run_suite, Suite, SuiteOptions};
use quadbct_core::{Coeffs, Error, Field};

const DEFAULT_SEED: u64 = 0;

#[derive(Parser)]
#[command(name = "quadbct", version, about = "Quadrinomial S-box analysis over GF(2^2m)")]
struct Cli {
    /// Worker thread cap (default: QUADBCT_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct FieldArgs {
    #[arg(long)]
    m: u32,
    #[arg(long)]
    k: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Print n, the modulus, a generator and the multiplication strategy.
    FieldInfo(FieldArgs),
    /// Classify a tuple as Gamma0, Gamma1 or NotGamma.
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        /// Tuple as hex "c0:c1:c2:c3".
        #[arg(long)]
        c: Coeffs,
    },
    /// Build the S-box of a tuple and check its verdict against the measured
    /// permutation property, DDT and BCT.
    Analyze {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        c: Coeffs,
        /// Include the full DDT and BCT tables (n <= 12).
        #[arg(long)]
        full_tables: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a self-check suite.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Sampled items (default depends on the suite).
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Exhaustive or sampled campaign over coefficient tuples.
    Search(SearchArgs),
    /// Gold or inverse baseline permutation.
    Baseline {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        t: Option<u32>,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, conflicts_with_all = ["samples", "gamma_samples"])]
    exhaustive: bool,
    /// Uniform tuples over GF(2^n)^4.
    #[arg(long, conflicts_with = "gamma_samples")]
    samples: Option<u64>,
    /// Tuples uniform over Gamma.
    #[arg(long)]
    gamma_samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = PolicyArg::FirstN)]
    beta_policy: PolicyArg,
    #[arg(long, default_value_t = search::DEFAULT_FIRST_N)]
    first_n: usize,
    /// JSONL records.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Class-conditional histograms as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Add per-record wall time to records.
    #[arg(long)]
    timing: bool,
    /// Only search for permutations outside Gamma (exhaustive mode).
    #[arg(long, requires = "exhaustive")]
    converse: bool,
}

#[derive(ValueEnum, Clone, Copy)]
enum SuiteArg {
    Field,
    LemmaCore,
    Identities,
    Vi,
    Theorem,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Field => Suite::Field,
            SuiteArg::LemmaCore => Suite::LemmaCore,
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Vi => Suite::Vi,
            SuiteArg::Theorem => Suite::Theorem,
        }
    }
}

#[derive(ValueEnum, Clone, Copy)]
enum PolicyArg {
    All,
    FirstN,
    Skip,
}

#[derive(ValueEnum, Clone, Copy)]
enum FamilyArg {
    Gold,
    Inverse,
}

/// Outcome of a command: `Ok(true)` consistent, `Ok(false)` anomaly.
type CmdResult = Result<bool, Error>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let threads = cli.threads.or_else(|| {
        std::env::var("QUADBCT_THREADS").ok().and_then(|s| s.parse().ok())
    });
    if let Some(t) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Error::Consistency(msg)) => {
            eprintln!("error: internal consistency check failed: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn line_buffered() -> bool {
    std::env::var("QUADBCT_LINE_BUFFERED").is_ok_and(|v| !v.is_empty() && v != "0")
}

fn emit_json(value: &impl Serialize, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            serde_json::to_writer(&mut w, value)?;
            writeln!(w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            serde_json::to_writer(&mut w, value)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::FieldInfo(f) => {
            let field = Field::new(f.m, f.k)?;
            let info = field.info();
            emit_json(&info, None)?;
            eprintln!(
                "GF(2^{}) modulus 0x{} generator {} ({})",
                info.n,
                info.modulus_hex,
                info.generator,
                if info.tables { "log/antilog tables" } else { "carry-less multiply" }
            );
            Ok(true)
        }
        Command::Classify { field: f, c } => {
            let field = Field::new(f.m, f.k)?;
            check_tuple(&field, &c)?;
            let class = classify(&field, &c);
            emit_json(&class, None)?;
            eprintln!("{c}: {}", class.verdict);
            Ok(true)
        }
        Command::Analyze {
            field: f,
            c,
            full_tables,
            out,
        } => {
            let field = Field::new(f.m, f.k)?;
            check_tuple(&field, &c)?;
            let v = verify_theorem(&field, &c, BetaMode::Full);
            if full_tables {
                if field.n() > MAX_FULL_TABLE_N {
                    return Err(Error::Params(format!(
                        "full tables need n <= {MAX_FULL_TABLE_N}"
                    )));
                }
                let table = build_table(&field, &c);
                let ddt = sbox::ddt(&table, true)?;
                let bct = if table.is_permutation() {
                    Some(sbox::bct(&table, BctMethod::Lqsl, true)?)
                } else {
                    None
                };
                #[derive(Serialize)]
                struct Full<'a> {
                    #[serde(flatten)]
                    verdict: &'a quadbct_core::machinery::TheoremVerdict,
                    ddt_table: Option<Vec<Vec<u32>>>,
                    bct_table: Option<Vec<Vec<u32>>>,
                }
                let full = Full {
                    verdict: &v,
                    ddt_table: ddt.full_table,
                    bct_table: bct.and_then(|b| b.full_table),
                };
                emit_json(&full, out.as_ref())?;
            } else {
                emit_json(&v, out.as_ref())?;
            }
            eprintln!(
                "{c}: {} permutation={} delta={} beta={} consistent={}",
                v.verdict,
                v.permutation,
                v.delta,
                v.beta.map_or("-".to_string(), |b| b.to_string()),
                v.consistent
            );
            Ok(v.consistent)
        }
        Command::Verify {
            suite,
            field: f,
            seed,
            samples,
        } => {
            let field = Field::new(f.m, f.k)?;
            let suite = Suite::from(suite);
            let opts = SuiteOptions {
                seed,
                samples: samples.unwrap_or(suite.default_samples()),
            };
            let report = run_suite(suite, &field, &opts)?;
            emit_json(&report, None)?;
            eprintln!("{} (seed {seed})", report.summary_line());
            if let Some(cx) = &report.first_counterexample {
                eprintln!("first counterexample: {cx}");
            }
            Ok(report.pass())
        }
        Command::Search(args) => cmd_search(args),
        Command::Baseline { family, m, t } => {
            let family = match family {
                FamilyArg::Gold => BaselineFamily::Gold,
                FamilyArg::Inverse => BaselineFamily::Inverse,
            };
            let r = search::baseline(family, m, t)?;
            emit_json(&r, None)?;
            eprintln!(
                "x^{} over GF(2^{}): permutation={} delta={} beta={}",
                r.exponent,
                r.n,
                r.permutation,
                r.delta,
                r.beta.map_or("-".to_string(), |b| b.to_string())
            );
            Ok(r.consistent)
        }
    }
}

fn check_tuple(field: &Field, c: &Coeffs) -> Result<(), Error> {
    if c.in_field(field) {
        Ok(())
    } else {
        Err(Error::Parse(format!("tuple {c} has elements outside GF(2^{})", field.n())))
    }
}

fn cmd_search(args: SearchArgs) -> CmdResult {
    let FieldArgs { m, k } = args.field;
    let seed = args.seed.unwrap_or_else(|| {
        eprintln!("no --seed given, using {DEFAULT_SEED}");
        DEFAULT_SEED
    });
    let mut cfg = match (args.exhaustive, args.samples, args.gamma_samples) {
        (true, _, _) => SearchConfig::exhaustive(m, k),
        (false, Some(n), _) => SearchConfig::sample(m, k, n, seed),
        (false, None, Some(n)) => SearchConfig::gamma_sample(m, k, n, seed),
        _ => {
            return Err(Error::Params(
                "one of --exhaustive, --samples or --gamma-samples is required".into(),
            ))
        }
    };
    cfg.seed = seed;
    cfg.beta_policy = match args.beta_policy {
        PolicyArg::All => BetaPolicy::All,
        PolicyArg::FirstN => BetaPolicy::FirstN,
        PolicyArg::Skip => BetaPolicy::Skip,
    };
    cfg.first_n = args.first_n;
    cfg.timing = args.timing;

    if args.converse {
        let summary = converse_experiment(&cfg)?;
        emit_json(&summary, None)?;
        eprintln!(
            "k={}: {} permutations outside Gamma among {} tuples{}",
            summary.k,
            summary.non_gamma_permutations,
            summary.tuples_checked,
            if summary.expectation_applies { "" } else { " (exploratory)" }
        );
        return Ok(summary.pass().unwrap_or(true));
    }

    let outcome = run_campaign_collect(&cfg)?;
    if let Some(path) = &args.out {
        let mut w = BufWriter::new(File::create(path)?);
        if line_buffered() {
            for r in &outcome.records {
                serde_json::to_writer(&mut w, r)?;
                writeln!(w)?;
                w.flush()?;
            }
        } else {
            search::write_records(&outcome.records, &mut w)?;
        }
        w.flush()?;
    }
    if let Some(path) = &args.csv {
        let mut w = BufWriter::new(File::create(path)?);
        write_histograms_csv(&outcome.summary, &mut w)?;
        w.flush()?;
    }
    let s = &outcome.summary;
    emit_json(s, None)?;
    let count = |v| s.class_counts.get(&v).copied().unwrap_or(0);
    use quadbct_core::Verdict::*;
    eprintln!(
        "{} tuples: Gamma0 {} Gamma1 {} NotGamma {}; {} records, {} anomalies",
        s.visited,
        count(Gamma0),
        count(Gamma1),
        count(NotGamma),
        s.records,
        s.anomaly_count
    );
    let converse_ok = s.converse.as_ref().and_then(|c| c.pass()).unwrap_or(true);
    Ok(s.anomaly_count == 0 && converse_ok)
}
