use std::collections::BTreeMap;
use std::fmt;

use super::{BenchError, BenchResult, Result, NOISE_TOLERANCE};
use crate::cipher::{CipherKind, Radix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    TriviumFaster,
    Tie,
    GrainFaster,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::TriviumFaster => "trivium",
            Verdict::Tie => "tie",
            Verdict::GrainFaster => "grain128a",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadixComparison {
    pub radix: Radix,
    pub trivium_bytes_per_second: f64,
    pub grain_bytes_per_second: f64,
    /// Trivium throughput over Grain-128a throughput.
    pub ratio: f64,
    pub verdict: Verdict,
}

/// Whether one cipher's throughput never drops by more than the noise
/// tolerance as the radix grows.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityCheck {
    pub cipher: CipherKind,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<RadixComparison>,
    pub monotonicity: Vec<MonotonicityCheck>,
}

impl ComparisonReport {
    /// Trivium at least as fast as Grain-128a at every radix.
    pub fn trivium_at_least_grain(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::GrainFaster)
    }

    pub fn monotonic(&self) -> bool {
        self.monotonicity.iter().all(|m| m.holds)
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "radix  trivium B/s      grain128a B/s    ratio   faster")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>5}  {:>15.0}  {:>15.0}  {:>6.3}  {}",
                r.radix.bits(),
                r.trivium_bytes_per_second,
                r.grain_bytes_per_second,
                r.ratio,
                r.verdict
            )?;
        }
        for m in &self.monotonicity {
            writeln!(
                f,
                "{}: throughput non-decreasing in radix: {}",
                m.cipher,
                if m.holds { "yes" } else { "no" }
            )?;
        }
        write!(
            f,
            "trivium >= grain128a at every radix: {}",
            if self.trivium_at_least_grain() { "yes" } else { "no" }
        )
    }
}

/// Compares Trivium with unauthenticated Grain-128a radix by radix. Every
/// radix present must have a result for both.
pub fn compare_report(results: &[BenchResult]) -> Result<ComparisonReport> {
    let mut table: BTreeMap<(CipherKind, Radix), f64> = BTreeMap::new();
    for r in results {
        if r.cipher == CipherKind::Grain128aAuth {
            continue;
        }
        if table.insert((r.cipher, r.radix), r.bytes_per_second).is_some() {
            return Err(BenchError::Malformed(format!("duplicate row for {} r={}", r.cipher, r.radix)));
        }
    }
    let mut radices: Vec<Radix> = table.keys().map(|&(_, r)| r).collect();
    radices.sort();
    radices.dedup();
    if radices.is_empty() {
        return Err(BenchError::Coverage("no Trivium or Grain-128a results".into()));
    }

    let mut rows = Vec::new();
    for &radix in &radices {
        let t = table.get(&(CipherKind::Trivium, radix));
        let g = table.get(&(CipherKind::Grain128a, radix));
        let (&t, &g) = match (t, g) {
            (Some(t), Some(g)) => (t, g),
            (None, _) => return Err(BenchError::Coverage(format!("no trivium result at radix {radix}"))),
            (_, None) => return Err(BenchError::Coverage(format!("no grain128a result at radix {radix}"))),
        };
        let ratio = t / g;
        let verdict = if t == g {
            Verdict::Tie
        } else if t > g {
            Verdict::TriviumFaster
        } else {
            Verdict::GrainFaster
        };
        rows.push(RadixComparison {
            radix,
            trivium_bytes_per_second: t,
            grain_bytes_per_second: g,
            ratio,
            verdict,
        });
    }

    let monotonicity = [CipherKind::Trivium, CipherKind::Grain128a]
        .into_iter()
        .map(|cipher| {
            let speeds: Vec<f64> = radices.iter().map(|&r| table[&(cipher, r)]).collect();
            MonotonicityCheck {
                cipher,
                holds: speeds.windows(2).all(|w| w[1] >= w[0] * (1.0 - NOISE_TOLERANCE)),
            }
        })
        .collect();
    Ok(ComparisonReport { rows, monotonicity })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(cipher: CipherKind, radix: Radix, bps: f64) -> BenchResult {
        BenchResult {
            cipher,
            radix,
            payload_bytes: 1,
            repetitions: 3,
            init_steps: 0,
            stream_steps: 0,
            median_ns: 1,
            bytes_per_second: bps,
            steps_per_byte: 0.0,
        }
    }

    #[test]
    fn equal_results_tie() {
        let rs: Vec<_> = Radix::ALL
            .iter()
            .flat_map(|&r| [result(CipherKind::Trivium, r, 100.0), result(CipherKind::Grain128a, r, 100.0)])
            .collect();
        let report = compare_report(&rs).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.rows.iter().all(|r| r.ratio == 1.0 && r.verdict == Verdict::Tie));
        assert!(report.trivium_at_least_grain());
        assert!(report.monotonic());
    }

    #[test]
    fn single_cipher_is_coverage_error() {
        let rs = vec![result(CipherKind::Trivium, Radix::R8, 1.0)];
        assert!(matches!(compare_report(&rs), Err(BenchError::Coverage(_))));
        assert!(matches!(compare_report(&[]), Err(BenchError::Coverage(_))));
    }

    #[test]
    fn grain_faster_is_flagged() {
        let rs = vec![
            result(CipherKind::Trivium, Radix::R8, 2.0),
            result(CipherKind::Grain128a, Radix::R8, 1.0),
            result(CipherKind::Trivium, Radix::R32, 1.0),
            result(CipherKind::Grain128a, Radix::R32, 3.0),
        ];
        let report = compare_report(&rs).unwrap();
        assert_eq!(report.rows[0].verdict, Verdict::TriviumFaster);
        assert_eq!(report.rows[1].verdict, Verdict::GrainFaster);
        assert!(!report.trivium_at_least_grain());
        assert!(!report.monotonic());
        assert!(report.to_string().contains("no"));
    }

    #[test]
    fn small_dips_within_noise_are_monotonic() {
        let rs = vec![
            result(CipherKind::Trivium, Radix::R16, 100.0),
            result(CipherKind::Trivium, Radix::R32, 96.0),
            result(CipherKind::Grain128a, Radix::R16, 50.0),
            result(CipherKind::Grain128a, Radix::R32, 60.0),
        ];
        assert!(compare_report(&rs).unwrap().monotonic());
    }
}
