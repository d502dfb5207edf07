//! Command-line front end: seeded experiments, family audits, trace dumps
//! and audits, and the diagonal table. Exit code 0 on pass, 1 on a bound
//! violation, 2 on configuration errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dnc_builder::{
    audit_trace_self, run_bounded_dnc, run_unbounded_dnc, FamilyMode, GrowthFamily, RunTrace,
};
use harness::seed::trial_seed;
use harness::{
    run_experiment, DncBoundedConfig, DncUnboundedConfig, ExperimentKind, ExperimentSpec,
    FamilyAuditConfig, StatsReport, TrapConfig, WalkConfig,
};
use toy_computation::{load_corpus, ToyEnumeration};

#[derive(Parser)]
#[command(name = "bushy-sim")]
#[command(about = "Seeded simulations of tree-avoidance algorithms, checked against exact bounds")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct BatchArgs {
    /// Number of independent seeded trials.
    #[arg(long)]
    trials: Option<u64>,

    /// Base seed; trial i runs on splitmix64(seed ⊕ i·φ64).
    #[arg(long)]
    seed: Option<u64>,

    /// Confidence multiplier on the normal-approximation sigma.
    #[arg(long)]
    sigmas: Option<f64>,

    /// Load a full experiment spec (JSON) instead of the built-in default.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Write the report here.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report format for --out.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Random walks against the densest planted closed small set.
    Walk {
        #[command(flatten)]
        batch: BatchArgs,
    },
    /// The trap-family forcing experiment with cap-flip replays.
    Fireworks {
        #[command(flatten)]
        batch: BatchArgs,
    },
    /// The bounded builder against its adversarial roster.
    Dnc {
        #[command(flatten)]
        batch: BatchArgs,
        /// Also write the first trial's full trace (JSON lines).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// The unbounded builder on the staged three-branch adversary.
    DncUnbounded {
        #[command(flatten)]
        batch: BatchArgs,
        /// Also write the first trial's full trace (JSON lines).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Build a growth family, audit its inequalities, print the table.
    Family {
        #[arg(long, default_value_t = 3)]
        m: u64,
        /// Exact recurrence values (towers beyond k ≈ 2).
        #[arg(long, conflicts_with = "scaled")]
        exact: bool,
        /// Scaled recurrence with the given exponent cap.
        #[arg(long)]
        scaled: Option<u64>,
        #[arg(long, default_value_t = 2)]
        kmax: u64,
        #[arg(long)]
        imax: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// The randomized four-lemma property suite.
    Lemmas {
        #[command(flatten)]
        batch: BatchArgs,
    },
    /// Recompute ground truth for a stored trace.
    Audit {
        /// Trace file (JSON lines) as written by `dnc --trace`.
        #[arg(long)]
        trace: PathBuf,
        /// Codeword budget of the enumeration to audit against.
        #[arg(long, default_value_t = toy_computation::DEFAULT_ENUM_CODE_BITS)]
        enum_bits: u64,
        /// Evaluation budget for the diagonal and the margins.
        #[arg(long, default_value_t = 4_000)]
        k_budget: u64,
    },
    /// Dump the diagonal table of the enumerated programs.
    Diag {
        /// Step budget per program.
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        /// Enumerate all programs with codewords up to this many bits.
        #[arg(long, default_value_t = toy_computation::DEFAULT_ENUM_CODE_BITS)]
        max_code_bits: u64,
        /// Use programs from this corpus file instead (one per line).
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Write the enumeration manifest (index → mnemonics) here.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Walk { batch } => {
            let spec = build_spec(
                &batch,
                ExperimentKind::WalkBound(WalkConfig::default()),
                100_000,
            )?;
            run_and_emit(&spec, &batch)
        }
        Command::Fireworks { batch } => {
            let spec = build_spec(
                &batch,
                ExperimentKind::FireworksTrap(TrapConfig::default()),
                10_000,
            )?;
            run_and_emit(&spec, &batch)
        }
        Command::Dnc { batch, trace } => {
            let spec = build_spec(&batch, ExperimentKind::DncBounded(Box::default()), 10_000)?;
            if let Some(path) = &trace {
                let ExperimentKind::DncBounded(config) = &spec.kind else {
                    return Err("config kind mismatch for dnc".into());
                };
                write_bounded_trace(&spec, config, path)?;
            }
            run_and_emit(&spec, &batch)
        }
        Command::DncUnbounded { batch, trace } => {
            let spec = build_spec(&batch, ExperimentKind::DncUnbounded(Box::default()), 1)?;
            if let Some(path) = &trace {
                let ExperimentKind::DncUnbounded(config) = &spec.kind else {
                    return Err("config kind mismatch for dnc-unbounded".into());
                };
                write_unbounded_trace(&spec, config, path)?;
            }
            run_and_emit(&spec, &batch)
        }
        Command::Family { m, exact, scaled, kmax, imax, out, format } => {
            let mode = match (exact, scaled) {
                (_, Some(cap)) => FamilyMode::Scaled { exponent_cap: cap },
                _ => FamilyMode::Exact,
            };
            let config = FamilyAuditConfig {
                m,
                mode,
                k_max: kmax,
                i_max: imax.unwrap_or(kmax + 2),
                h0: None,
            };
            let spec = ExperimentSpec::new(ExperimentKind::FamilyAudit(config), 1, 0);
            let report = run_experiment(&spec).map_err(|e| e.to_string())?;
            emit(&report, &out, format)?;
            if let Some(rows) = report.details["table"].as_array() {
                for row in rows {
                    println!(
                        "k={} h={} ({} bits) g_k = {}",
                        row["k"],
                        row["h"].as_str().unwrap_or("?"),
                        row["h_bits"],
                        row["g_row"]
                            .as_array()
                            .map(|r| r
                                .iter()
                                .map(|v| v.as_str().unwrap_or("?").to_string())
                                .collect::<Vec<_>>()
                                .join(", "))
                            .unwrap_or_default()
                    );
                }
            }
            print_summary(&report);
            Ok(report.passed())
        }
        Command::Lemmas { batch } => {
            let spec = build_spec(
                &batch,
                ExperimentKind::LemmaSuite(harness::lemmas::LemmaConfig::default()),
                1_000,
            )?;
            run_and_emit(&spec, &batch)
        }
        Command::Audit { trace, enum_bits, k_budget } => {
            let text = fs::read_to_string(&trace)
                .map_err(|e| format!("cannot read {}: {e}", trace.display()))?;
            let parsed = RunTrace::from_jsonl(&text).map_err(|e| format!("bad trace: {e}"))?;
            let enumeration = ToyEnumeration::standard(enum_bits);
            let report = audit_trace_self(&parsed, &enumeration, k_budget);
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            Ok(report.structurally_valid())
        }
        Command::Diag { budget, max_code_bits, corpus, manifest, out, format } => {
            let enumeration = match corpus {
                Some(path) => {
                    let file = fs::File::open(&path)
                        .map_err(|e| format!("cannot open {}: {e}", path.display()))?;
                    let programs =
                        load_corpus(std::io::BufReader::new(file)).map_err(|e| e.to_string())?;
                    ToyEnumeration::from_programs(programs, None)
                }
                None => ToyEnumeration::standard(max_code_bits),
            };
            if let Some(path) = manifest {
                let entries: serde_json::Map<String, serde_json::Value> = (0..enumeration.len())
                    .map(|e| {
                        (
                            e.to_string(),
                            enumeration.program(e).expect("in range").to_string().into(),
                        )
                    })
                    .collect();
                fs::write(&path, serde_json::to_string_pretty(&entries).expect("serializable"))
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            let diag = enumeration.diagonal(budget);
            let rows: Vec<serde_json::Value> = diag
                .iter()
                .enumerate()
                .map(|(e, entry)| match entry {
                    Some((step, v)) => serde_json::json!({
                        "e": e, "value": v.to_string(), "halt_step": step,
                    }),
                    None => serde_json::json!({ "e": e, "value": null }),
                })
                .collect();
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&rows).expect("serializable"),
                Format::Csv => {
                    let mut s = String::from("e,value,halt_step\n");
                    for r in &rows {
                        s.push_str(&format!(
                            "{},{},{}\n",
                            r["e"],
                            r["value"].as_str().unwrap_or(""),
                            r["halt_step"].as_u64().map(|v| v.to_string()).unwrap_or_default()
                        ));
                    }
                    s
                }
            };
            match out {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => println!("{text}"),
            }
            let halted = diag.iter().filter(|d| d.is_some()).count();
            eprintln!("{} programs, {} converge on the diagonal", enumeration.len(), halted);
            Ok(true)
        }
    }
}

/// Default spec for the subcommand, overridden by --config, then by
/// explicit flags.
fn build_spec(
    batch: &BatchArgs,
    default_kind: ExperimentKind,
    default_trials: u64,
) -> Result<ExperimentSpec, String> {
    let mut spec = match &batch.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str::<ExperimentSpec>(&text)
                .map_err(|e| format!("bad config {}: {e}", path.display()))?
        }
        None => ExperimentSpec::new(default_kind, default_trials, 0),
    };
    if let Some(t) = batch.trials {
        spec.trials = t;
    }
    if let Some(s) = batch.seed {
        spec.seed = s;
    }
    if let Some(s) = batch.sigmas {
        if !(s.is_finite() && s >= 0.0) {
            return Err("sigmas must be a finite non-negative number".into());
        }
        spec.sigmas = s;
    }
    Ok(spec)
}

fn run_and_emit(spec: &ExperimentSpec, batch: &BatchArgs) -> Result<bool, String> {
    let report = run_experiment(spec).map_err(|e| e.to_string())?;
    emit(&report, &batch.out, batch.format)?;
    print_summary(&report);
    Ok(report.passed())
}

fn emit(report: &StatsReport, out: &Option<PathBuf>, format: Format) -> Result<(), String> {
    if let Some(path) = out {
        let text = match format {
            Format::Json => report.to_json_pretty(),
            Format::Csv => report.to_csv(),
        };
        fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn print_summary(report: &StatsReport) {
    for c in &report.checks {
        let rel = match c.direction {
            harness::BoundDirection::AtLeast => "≥",
            harness::BoundDirection::AtMost => "≤",
        };
        println!(
            "{} / {}: {:.4} {} {} (margin {:.4}) → {:?}",
            report.kind, c.name, c.frequency, rel, c.bound, c.margin, c.verdict
        );
    }
    println!(
        "{}: {:?} in {} ms",
        report.kind, report.verdict, report.wall_clock_ms
    );
}

fn write_bounded_trace(
    spec: &ExperimentSpec,
    config: &DncBoundedConfig,
    path: &PathBuf,
) -> Result<(), String> {
    let family = GrowthFamily::build(
        config.m,
        config.mode,
        config.run.depth + 2,
        config.run.depth + 2 + config.run.depth_margin,
        None,
    )
    .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec.seed, 0));
    let trace = run_bounded_dnc(&family, &config.roster, &config.run, &mut rng)
        .map_err(|e| e.to_string())?;
    fs::write(path, trace.to_jsonl())
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn write_unbounded_trace(
    spec: &ExperimentSpec,
    config: &DncUnboundedConfig,
    path: &PathBuf,
) -> Result<(), String> {
    let enumeration = ToyEnumeration::standard(config.enum_code_bits);
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(spec.seed, 0));
    let trace = run_unbounded_dnc(&config.roster, &enumeration, config.m, &config.run, &mut rng)
        .map_err(|e| e.to_string())?;
    fs::write(path, trace.to_jsonl())
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}
