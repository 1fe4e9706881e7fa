//! Step counts and host throughput per (cipher, radix), CSV I/O, the
//! Trivium-vs-Grain comparison and KAT file checking.

use std::fs::File;
use std::io;
use std::path::Path;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cipher::kat::{self, KatOutcome, KatParseError, KatVector};
use crate::cipher::{CipherError, CipherKind, CipherState, Radix, TagLen};

mod compare;

pub use compare::{compare_report, ComparisonReport, MonotonicityCheck, RadixComparison, Verdict};

pub const DEFAULT_PAYLOAD: usize = 1 << 20;
pub const DEFAULT_REPETITIONS: usize = 5;
/// Relative slack allowed when checking throughput against radix.
pub const NOISE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("results do not cover both ciphers: {0}")]
    Coverage(String),
    #[error("malformed results: {0}")]
    Malformed(String),
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    KatParse(#[from] KatParseError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub ciphers: Vec<CipherKind>,
    pub radices: Vec<Radix>,
    pub payload_bytes: usize,
    pub repetitions: usize,
    /// Seeds key, IV and payload generation.
    pub seed: u64,
    /// Run (cipher, radix) cells on the rayon pool instead of one by one.
    pub parallel: bool,
}

impl BenchConfig {
    pub fn new(ciphers: Vec<CipherKind>, radices: Vec<Radix>) -> Self {
        BenchConfig {
            ciphers,
            radices,
            payload_bytes: DEFAULT_PAYLOAD,
            repetitions: DEFAULT_REPETITIONS,
            seed: 0,
            parallel: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 3 {
            return Err(BenchError::InvalidConfig(format!(
                "repetitions must be at least 3, got {}",
                self.repetitions
            )));
        }
        if self.payload_bytes == 0 {
            return Err(BenchError::InvalidConfig("payload size must be at least 1 byte".into()));
        }
        if self.ciphers.is_empty() || self.radices.is_empty() {
            return Err(BenchError::InvalidConfig("need at least one cipher and one radix".into()));
        }
        Ok(())
    }
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig::new(vec![CipherKind::Trivium, CipherKind::Grain128a], Radix::ALL.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub cipher: CipherKind,
    pub radix: Radix,
    pub payload_bytes: usize,
    pub repetitions: usize,
    /// Counted, not timed.
    pub init_steps: u64,
    /// Keystream steps plus any MAC preload steps for one payload.
    pub stream_steps: u64,
    pub median_ns: u64,
    pub bytes_per_second: f64,
    /// (init_steps + stream_steps) / payload_bytes.
    pub steps_per_byte: f64,
}

fn cell(config: &BenchConfig, cipher: CipherKind, radix: Radix) -> Result<BenchResult> {
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let params = cipher.params();
    let mut key = vec![0u8; params.key_bytes()];
    let mut iv = vec![0u8; params.iv_bytes()];
    let mut payload = vec![0u8; config.payload_bytes];
    rng.fill_bytes(&mut key);
    rng.fill_bytes(&mut iv);
    rng.fill_bytes(&mut payload);
    let tag_len = cipher.is_authenticated().then_some(TagLen::MAX);

    let mut times = Vec::with_capacity(config.repetitions);
    let mut counts = None;
    for _ in 0..config.repetitions {
        let mut buf = payload.clone();
        let start = Instant::now();
        let mut state = CipherState::load(cipher, &key, &iv, tag_len)?;
        let init = state.init(radix);
        state.encrypt(radix, &mut buf)?;
        if tag_len.is_some() {
            std::hint::black_box(state.clone().finalize_tag()?);
        }
        std::hint::black_box(&buf);
        times.push(start.elapsed().as_nanos() as u64);
        counts = Some((init.steps, init.preload_steps + state.stream_steps()));
    }
    let (init_steps, stream_steps) = counts.expect("at least one repetition");
    times.sort_unstable();
    let median_ns = times[times.len() / 2].max(1);
    Ok(BenchResult {
        cipher,
        radix,
        payload_bytes: config.payload_bytes,
        repetitions: config.repetitions,
        init_steps,
        stream_steps,
        median_ns,
        bytes_per_second: config.payload_bytes as f64 * 1e9 / median_ns as f64,
        steps_per_byte: (init_steps + stream_steps) as f64 / config.payload_bytes as f64,
    })
}

/// Encrypts `payload_bytes` random bytes `repetitions` times per
/// (cipher, radix) and keeps the median wall time. Results come back in
/// cipher-major, radix-minor order whether or not cells ran in parallel.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchResult>> {
    config.validate()?;
    let cells: Vec<(CipherKind, Radix)> = config
        .ciphers
        .iter()
        .flat_map(|&c| config.radices.iter().map(move |&r| (c, r)))
        .collect();
    if config.parallel {
        cells.par_iter().map(|&(c, r)| cell(config, c, r)).collect()
    } else {
        cells
            .iter()
            .map(|&(c, r)| {
                let res = cell(config, c, r)?;
                log::info!("{c} r={r}: {} ns median, {:.0} B/s", res.median_ns, res.bytes_per_second);
                Ok(res)
            })
            .collect()
    }
}

/// One CSV row; the column set is fixed.
#[derive(Debug, Serialize, Deserialize)]
struct Row {
    cipher: String,
    radix: u32,
    payload_bytes: usize,
    repetitions: usize,
    init_steps: u64,
    stream_steps: u64,
    median_ns: u64,
    bytes_per_second: f64,
    steps_per_byte: f64,
}

pub const CSV_COLUMNS: [&str; 9] = [
    "cipher",
    "radix",
    "payload_bytes",
    "repetitions",
    "init_steps",
    "stream_steps",
    "median_ns",
    "bytes_per_second",
    "steps_per_byte",
];

pub fn write_results<W: io::Write>(results: &[BenchResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        w.serialize(Row {
            cipher: r.cipher.name().to_string(),
            radix: r.radix.bits(),
            payload_bytes: r.payload_bytes,
            repetitions: r.repetitions,
            init_steps: r.init_steps,
            stream_steps: r.stream_steps,
            median_ns: r.median_ns,
            bytes_per_second: r.bytes_per_second,
            steps_per_byte: r.steps_per_byte,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results_file(results: &[BenchResult], path: &Path) -> Result<()> {
    write_results(results, File::create(path)?)
}

pub fn read_results<R: io::Read>(input: R) -> Result<Vec<BenchResult>> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(BenchError::Malformed(format!(
            "expected columns {}, found {}",
            CSV_COLUMNS.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    reader
        .deserialize::<Row>()
        .map(|row| {
            let row = row?;
            Ok(BenchResult {
                cipher: row.cipher.parse()?,
                radix: Radix::new(row.radix)?,
                payload_bytes: row.payload_bytes,
                repetitions: row.repetitions,
                init_steps: row.init_steps,
                stream_steps: row.stream_steps,
                median_ns: row.median_ns,
                bytes_per_second: row.bytes_per_second,
                steps_per_byte: row.steps_per_byte,
            })
        })
        .collect()
}

pub fn read_results_file(path: &Path) -> Result<Vec<BenchResult>> {
    read_results(File::open(path)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatSummary {
    pub results: Vec<(KatVector, KatOutcome)>,
    pub warnings: Vec<String>,
}

impl KatSummary {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|(_, o)| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &(KatVector, KatOutcome)> {
        self.results.iter().filter(|(_, o)| !o.passed)
    }
}

/// Evaluates every vector in `text`. An empty set passes with a warning.
pub fn kat_check_str(text: &str) -> Result<KatSummary> {
    let vectors = kat::parse(text)?;
    let mut warnings = Vec::new();
    if vectors.is_empty() {
        log::warn!("no test vectors found");
        warnings.push("no test vectors found".to_string());
    }
    let results = vectors
        .into_iter()
        .map(|v| {
            let outcome = v.evaluate()?;
            Ok((v, outcome))
        })
        .collect::<Result<_>>()?;
    Ok(KatSummary { results, warnings })
}

pub fn kat_check(path: &Path) -> Result<KatSummary> {
    kat_check_str(&std::fs::read_to_string(path)?)
}
