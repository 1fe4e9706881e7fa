use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sealbus::bench::{self, BenchConfig, BenchError};
use sealbus::cipher::{CipherKind, Radix};
use sealbus::soc::{self, ScriptOutcome, SimConfig, WorldPartition};

/// Step counts, throughput and conformance checks for the Trivium and
/// Grain-128a bus ciphers.
///
/// Exit status: 0 on success, 1 when a check fails, 2 on usage or input
/// errors.
#[derive(Parser, Debug)]
#[command(name = "bench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CipherArg {
    Trivium,
    Grain128a,
    #[value(name = "grain128a-auth")]
    Grain128aAuth,
    Both,
}

impl CipherArg {
    fn kinds(self) -> Vec<CipherKind> {
        match self {
            CipherArg::Trivium => vec![CipherKind::Trivium],
            CipherArg::Grain128a => vec![CipherKind::Grain128a],
            CipherArg::Grain128aAuth => vec![CipherKind::Grain128aAuth],
            CipherArg::Both => vec![CipherKind::Trivium, CipherKind::Grain128a],
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Encrypt random payloads per (cipher, radix) and write a CSV
    Run {
        #[arg(long, value_enum, default_value_t = CipherArg::Both)]
        cipher: CipherArg,
        /// Output rates in bits per step
        #[arg(long, value_delimiter = ',', default_value = "1,8,16,32")]
        radix: Vec<Radix>,
        /// Payload size in bytes
        #[arg(long, default_value_t = bench::DEFAULT_PAYLOAD)]
        size: usize,
        /// Repetitions per cell (median is reported)
        #[arg(long, default_value_t = bench::DEFAULT_REPETITIONS)]
        reps: usize,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run cells concurrently
        #[arg(long)]
        parallel: bool,
    },
    /// Check keystreams against a known-answer vector file
    Kat {
        #[arg(long)]
        file: PathBuf,
    },
    /// Compare Trivium and Grain-128a throughput from a results CSV
    Compare {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run a bus stimulus script and write the per-beat trace as CSV
    Sim {
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Failure {
    Check(String),
    Usage(String),
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn expected_init_steps(cipher: CipherKind, radix: Radix) -> u64 {
    cipher.init_clocks() / u64::from(radix.bits())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::Run {
            cipher,
            radix,
            size,
            reps,
            out,
            seed,
            parallel,
        } => {
            let config = BenchConfig {
                ciphers: cipher.kinds(),
                radices: radix,
                payload_bytes: size,
                repetitions: reps,
                seed,
                parallel,
            };
            let results = bench::run_bench(&config)?;
            println!("cipher          radix  init_steps  steps/byte   median_ms        B/s");
            for r in &results {
                println!(
                    "{:<14}  {:>5}  {:>10}  {:>10.4}  {:>10.3}  {:>10.0}",
                    r.cipher.name(),
                    r.radix.bits(),
                    r.init_steps,
                    r.steps_per_byte,
                    r.median_ns as f64 / 1e6,
                    r.bytes_per_second
                );
            }
            bench::write_results_file(&results, &out)?;
            println!("wrote {}", out.display());
            if let Some(r) = results.iter().find(|r| r.init_steps != expected_init_steps(r.cipher, r.radix)) {
                return Err(Failure::Check(format!(
                    "{} r={} took {} init steps",
                    r.cipher, r.radix, r.init_steps
                )));
            }
            Ok(())
        }
        Cmd::Kat { file } => {
            let summary = bench::kat_check(&file)?;
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            for (v, outcome) in &summary.results {
                println!(
                    "{} line {}: {} r={} offset={}",
                    if outcome.passed { "PASS" } else { "FAIL" },
                    v.line,
                    v.cipher,
                    v.radix,
                    v.offset
                );
                if !outcome.passed {
                    println!("  expected {}", hex(&v.keystream));
                    println!("  actual   {}", hex(&outcome.actual));
                }
            }
            let failed = summary.failures().count();
            println!("{} vectors, {failed} failed", summary.results.len());
            if failed > 0 {
                return Err(Failure::Check(format!("{failed} vectors failed")));
            }
            Ok(())
        }
        Cmd::Compare { input } => {
            let results = bench::read_results_file(&input)?;
            let report = bench::compare_report(&results)?;
            println!("{report}");
            if !report.monotonic() {
                eprintln!("warning: throughput drops with radix beyond the noise tolerance");
            }
            if !report.trivium_at_least_grain() {
                return Err(Failure::Check("grain128a outran trivium at some radix".into()));
            }
            Ok(())
        }
        Cmd::Sim { script, trace, seed } => {
            let text = std::fs::read_to_string(&script).map_err(|e| Failure::Usage(format!("{}: {e}", script.display())))?;
            let config = SimConfig { seed, ..SimConfig::default() };
            let mut sim = soc::build_soc(WorldPartition::default(), config).map_err(|e| Failure::Usage(e.to_string()))?;
            let outcomes = sim.run_script(&text).map_err(|e| Failure::Usage(e.to_string()))?;
            let mut failed = 0;
            for outcome in &outcomes {
                match outcome {
                    ScriptOutcome::Sent(r) => {
                        println!(
                            "send: {:?}, {} words, {} transfer cycles, {} init steps",
                            r.status, r.frame_words, r.transfer_cycles, r.init_steps
                        );
                        failed += usize::from(!r.delivered());
                    }
                    ScriptOutcome::Read(Ok(r)) => {
                        println!("read: {} ({} init steps)", hex(&r.data), r.init_steps);
                    }
                    ScriptOutcome::Read(Err(e)) => {
                        println!("read: error: {e}");
                        failed += 1;
                    }
                    ScriptOutcome::Attached(id) => println!("attached tap {}", id.index()),
                    ScriptOutcome::Configured => {}
                }
            }
            for tap in sim.taps() {
                println!("tap {} on {}: {} beats logged", tap.kind, tap.link, tap.log.len());
            }
            println!("{} cycles, {} rejected beats", sim.cycle(), sim.violations().len());
            if let Some(path) = trace {
                let file = std::fs::File::create(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                sim.write_trace_csv(file).map_err(|e| Failure::Usage(e.to_string()))?;
                println!("wrote {}", path.display());
            }
            if failed > 0 {
                return Err(Failure::Check(format!("{failed} operations failed")));
            }
            Ok(())
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
