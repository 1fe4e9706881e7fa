//! Known-answer test vectors.
//!
//! One vector per line:
//!
//! ```text
//! cipher=<name> radix=<r> key=<hex> iv=<hex> offset=<bit index> keystream=<hex>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. `keystream` holds the
//! keystream bits starting at `offset`, packed into bytes with the cipher's
//! own bit order (LSB-first for Trivium, MSB-first for Grain-128a). Key and
//! IV bytes are given exactly as the cipher loads them.

use std::fmt;

use thiserror::Error;

use super::{CipherError, CipherKind, CipherState, Radix, TagLen};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct KatParseError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatVector {
    pub cipher: CipherKind,
    pub radix: Radix,
    pub key: Vec<u8>,
    pub iv: Vec<u8>,
    pub offset: u64,
    pub keystream: Vec<u8>,
    /// 1-based source line, 0 when built in code.
    pub line: usize,
}

impl fmt::Display for KatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cipher={} radix={} key={} iv={} offset={} keystream={}",
            self.cipher,
            self.radix,
            hex::encode(&self.key),
            hex::encode(&self.iv),
            self.offset,
            hex::encode(&self.keystream)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KatOutcome {
    pub passed: bool,
    pub actual: Vec<u8>,
}

impl KatVector {
    /// Regenerates the keystream segment and compares it to the vector.
    pub fn evaluate(&self) -> Result<KatOutcome, CipherError> {
        let actual = generate(self.cipher, self.radix, &self.key, &self.iv, self.offset, self.keystream.len())?;
        Ok(KatOutcome {
            passed: actual == self.keystream,
            actual,
        })
    }
}

/// `len` bytes of keystream starting at bit `offset`.
pub fn generate(
    cipher: CipherKind,
    radix: Radix,
    key: &[u8],
    iv: &[u8],
    offset: u64,
    len: usize,
) -> Result<Vec<u8>, CipherError> {
    let tag_len = cipher.is_authenticated().then_some(TagLen::MAX);
    let mut state = CipherState::load(cipher, key, iv, tag_len)?;
    state.init(radix);
    let start = offset as usize;
    let stream = state.keystream(radix, start + len * 8)?;
    Ok(cipher.bit_order().pack(&stream.bits[start..]))
}

fn field<'a>(line: usize, fields: &[(&'a str, &'a str)], name: &str) -> Result<&'a str, KatParseError> {
    fields
        .iter()
        .find(|(k, _)| *k == name)
        .map(|(_, v)| *v)
        .ok_or_else(|| KatParseError {
            line,
            message: format!("missing field `{name}`"),
        })
}

fn hex_field(line: usize, fields: &[(&str, &str)], name: &str) -> Result<Vec<u8>, KatParseError> {
    hex::decode(field(line, fields, name)?).map_err(|e| KatParseError {
        line,
        message: format!("bad hex in `{name}`: {e}"),
    })
}

pub fn parse_line(line_no: usize, line: &str) -> Result<Option<KatVector>, KatParseError> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let err = |message: String| KatParseError {
        line: line_no,
        message,
    };
    let mut fields = Vec::new();
    for token in line.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, got `{token}`")))?;
        if fields.iter().any(|(seen, _)| *seen == k) {
            return Err(err(format!("duplicate field `{k}`")));
        }
        fields.push((k, v));
    }
    const KNOWN: [&str; 6] = ["cipher", "radix", "key", "iv", "offset", "keystream"];
    if let Some((k, _)) = fields.iter().find(|(k, _)| !KNOWN.contains(k)) {
        return Err(err(format!("unknown field `{k}`")));
    }
    let cipher = field(line_no, &fields, "cipher")?
        .parse::<CipherKind>()
        .map_err(|e| err(e.to_string()))?;
    let radix = field(line_no, &fields, "radix")?
        .parse::<Radix>()
        .map_err(|e| err(e.to_string()))?;
    let offset = field(line_no, &fields, "offset")?
        .parse::<u64>()
        .map_err(|e| err(format!("bad offset: {e}")))?;
    let key = hex_field(line_no, &fields, "key")?;
    let iv = hex_field(line_no, &fields, "iv")?;
    let keystream = hex_field(line_no, &fields, "keystream")?;
    let params = cipher.params();
    if key.len() != params.key_bytes() || iv.len() != params.iv_bytes() {
        return Err(err(format!(
            "{cipher} needs a {}-bit key and {}-bit iv",
            params.key_bits, params.iv_bits
        )));
    }
    Ok(Some(KatVector {
        cipher,
        radix,
        key,
        iv,
        offset,
        keystream,
        line: line_no,
    }))
}

pub fn parse(text: &str) -> Result<Vec<KatVector>, KatParseError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(v) = parse_line(i + 1, line)? {
            out.push(v);
        }
    }
    Ok(out)
}
