use std::fmt;
use std::str::FromStr;

use super::sim::{CMD_DELIVER, REG_CMD, REG_DATA_IN, REG_DATA_OUT, REG_STATUS};
use super::{BusTransaction, Link, Result, SocError, TxnKind};
use crate::channel::FRAME_HEADER_LEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TapKind {
    /// Passive FIFO copying every beat that crosses the link.
    EavesdropFifo,
    /// Toggles the NS attribute of beats addressed to secure ranges.
    NsBitFlip,
}

impl TapKind {
    pub fn name(self) -> &'static str {
        match self {
            TapKind::EavesdropFifo => "eavesdrop_fifo",
            TapKind::NsBitFlip => "ns_bit_flip",
        }
    }
}

impl fmt::Display for TapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TapKind {
    type Err = SocError;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "eavesdrop_fifo" | "eavesdrop" => Ok(TapKind::EavesdropFifo),
            "ns_bit_flip" | "ns_flip" => Ok(TapKind::NsBitFlip),
            _ => Err(SocError::UnknownTapKind(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TapId(pub(crate) usize);

impl TapId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Append-only record of (cycle, beat) in delivery order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TapLog {
    entries: Vec<(u64, BusTransaction)>,
}

impl TapLog {
    pub(crate) fn push(&mut self, cycle: u64, txn: BusTransaction) {
        debug_assert!(self.entries.last().is_none_or(|(c, _)| *c <= cycle));
        self.entries.push((cycle, txn));
    }

    pub fn entries(&self) -> &[(u64, BusTransaction)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A Trojan sitting on one interconnect link.
///
/// An eavesdrop FIFO logs every completed beat. An NS-bit flipper logs the
/// beats it tampered with, after tampering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrojanTap {
    pub kind: TapKind,
    pub link: Link,
    pub attached_at: u64,
    pub log: TapLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeakageReport {
    /// Payload bytes reconstructed from the tap.
    pub observed: Vec<u8>,
    pub exact_match: bool,
    /// Fraction of known-plaintext positions where the observed byte agrees.
    pub matching_byte_fraction: f64,
    /// |fraction of one bits in `observed` - 1/2|.
    pub monobit_statistic: f64,
}

impl LeakageReport {
    pub fn new(observed: Vec<u8>, known: &[u8]) -> Self {
        let matching = known.iter().zip(&observed).filter(|(a, b)| a == b).count();
        let matching_byte_fraction = if known.is_empty() {
            if observed.is_empty() {
                1.0
            } else {
                0.0
            }
        } else {
            matching as f64 / known.len() as f64
        };
        LeakageReport {
            exact_match: observed == known,
            matching_byte_fraction,
            monobit_statistic: monobit(&observed),
            observed,
        }
    }

    /// Whether any `window`-byte substring of `known` occurs in the observed
    /// stream.
    pub fn contains_substring_of(&self, known: &[u8], window: usize) -> bool {
        if window == 0 || known.len() < window || self.observed.len() < window {
            return false;
        }
        let seen: std::collections::HashSet<&[u8]> = self.observed.windows(window).collect();
        known.windows(window).any(|w| seen.contains(w))
    }
}

/// |ones / bits - 1/2|; zero for an empty stream.
pub fn monobit(bytes: &[u8]) -> f64 {
    if bytes.is_empty() {
        return 0.0;
    }
    let ones: u64 = bytes.iter().map(|b| u64::from(b.count_ones())).sum();
    (ones as f64 / (bytes.len() as f64 * 8.0) - 0.5).abs()
}

/// Rebuilds the payload byte stream a tap saw.
///
/// On the TA link the tap knows the frame format: inbound frames end at the
/// deliver command, outbound ones are sized by the status read. Elsewhere
/// the raw data words are concatenated.
pub(crate) fn observed_payload(link: Link, log: &TapLog) -> Vec<u8> {
    if link != Link::TaIp {
        return log
            .entries()
            .iter()
            .flat_map(|(_, t)| t.data.to_be_bytes())
            .collect();
    }
    let mut out = Vec::new();
    let mut inbound = Vec::new();
    let mut outbound = Vec::new();
    let mut expected_out = 0usize;
    for (_, t) in log.entries() {
        match (t.kind, t.address) {
            (TxnKind::Write, REG_DATA_IN) => inbound.push(t.data),
            (TxnKind::Write, REG_CMD) if t.data == CMD_DELIVER => {
                out.extend(frame_payload(&inbound));
                inbound.clear();
            }
            (TxnKind::Read, REG_STATUS) => {
                expected_out = t.data as usize;
                outbound.clear();
            }
            (TxnKind::Read, REG_DATA_OUT) => {
                outbound.push(t.data);
                if outbound.len() == expected_out {
                    out.extend(frame_payload(&outbound));
                    outbound.clear();
                }
            }
            _ => {}
        }
    }
    out
}

fn frame_payload(words: &[u32]) -> Vec<u8> {
    let bytes = crate::channel::words_to_bytes(words);
    if bytes.len() < FRAME_HEADER_LEN {
        return Vec::new();
    }
    let len = u32::from_be_bytes(bytes[11..15].try_into().expect("4 bytes")) as usize;
    let end = bytes.len().min(FRAME_HEADER_LEN.saturating_add(len));
    bytes[FRAME_HEADER_LEN..end].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_parse() {
        assert_eq!("eavesdrop_fifo".parse::<TapKind>().unwrap(), TapKind::EavesdropFifo);
        assert_eq!("ns-bit-flip".parse::<TapKind>().unwrap(), TapKind::NsBitFlip);
        assert!("laser".parse::<TapKind>().is_err());
    }

    #[test]
    fn monobit_extremes() {
        assert_eq!(monobit(&[]), 0.0);
        assert_eq!(monobit(&[0; 8]), 0.5);
        assert_eq!(monobit(&[0xff; 8]), 0.5);
        assert_eq!(monobit(&[0x0f; 8]), 0.0);
    }

    #[test]
    fn leakage_fields() {
        let r = LeakageReport::new(b"abcdefgh".to_vec(), b"abcdXfgh");
        assert!(!r.exact_match);
        assert_eq!(r.matching_byte_fraction, 7.0 / 8.0);
        assert!(r.contains_substring_of(b"zzabcdzz", 4));
        assert!(!r.contains_substring_of(b"zzabcdzz", 5));
        assert!(LeakageReport::new(vec![], &[]).exact_match);
    }
}
