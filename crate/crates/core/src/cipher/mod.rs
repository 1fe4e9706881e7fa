//! Trivium and Grain-128a keystream generators.
//!
//! Both ciphers update their registers `r` bits at a time, where `r` is the
//! [`Radix`] (1, 8, 16 or 32). A radix-`r` step computes all `r` feedback and
//! output bits from a single snapshot of the state, the way an unrolled
//! hardware datapath does. The keystream content never depends on the radix;
//! only the number of steps needed to produce it does.
//!
//! Bit conventions follow the eSTREAM reference code so published vectors
//! match byte for byte:
//!
//! * Trivium reads key and IV bytes LSB-first and emits keystream LSB-first
//!   (first keystream bit is bit 0 of the first byte).
//! * Grain-128a reads key and IV bytes MSB-first and emits keystream
//!   MSB-first.
//!
//! Inside a [`Chunk`] bits are always in time order, bit 0 first.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

mod grain;
pub mod kat;
mod trivium;

pub use grain::{Grain128aState, GRAIN_INIT_CLOCKS, MAC_PRELOAD_BITS};
pub use trivium::{TriviumState, TRIVIUM_INIT_CLOCKS};

/// Maximum number of keystream bits drawn from one (key, IV) pair.
pub const KEYSTREAM_CAP_BITS: u64 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CipherError {
    #[error("{what} must be {expected} bits, got {actual}")]
    ParameterSize {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("keystream requested after {clocks_done} of {required} initialization clocks")]
    NotInitialized { clocks_done: u64, required: u64 },
    #[error("keystream limit of 2^32 bits for this key/IV is exhausted")]
    KeystreamExhausted,
    #[error("{0} requires Grain-128a authenticated mode")]
    NotAuthenticated(&'static str),
    #[error("invalid radix {0}, expected one of 1, 8, 16, 32")]
    InvalidRadix(u32),
    #[error("invalid tag length {0}, expected 0 < w <= 32")]
    InvalidTagLength(u32),
    #[error("length mismatch: keystream has {keystream} bytes, data has {data}")]
    LengthMismatch { keystream: usize, data: usize },
    #[error("unknown cipher {0:?}")]
    UnknownCipher(String),
}

pub type Result<T> = std::result::Result<T, CipherError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CipherKind {
    Trivium,
    Grain128a,
    /// Grain-128a with its Encrypt & MAC authentication enabled.
    Grain128aAuth,
}

impl CipherKind {
    pub const ALL: [CipherKind; 3] = [
        CipherKind::Trivium,
        CipherKind::Grain128a,
        CipherKind::Grain128aAuth,
    ];

    pub fn params(self) -> CipherParams {
        match self {
            CipherKind::Trivium => CipherParams {
                key_bits: 80,
                iv_bits: 80,
                state_bits: 288,
            },
            CipherKind::Grain128a | CipherKind::Grain128aAuth => CipherParams {
                key_bits: 128,
                iv_bits: 96,
                state_bits: 256,
            },
        }
    }

    /// Single-bit clocks spent in initialization before any output.
    pub fn init_clocks(self) -> u64 {
        match self {
            CipherKind::Trivium => TRIVIUM_INIT_CLOCKS,
            CipherKind::Grain128a | CipherKind::Grain128aAuth => GRAIN_INIT_CLOCKS,
        }
    }

    /// Initialization steps at the given radix (1152/r or 256/r).
    pub fn init_steps(self, radix: Radix) -> u64 {
        self.init_clocks() / u64::from(radix.bits())
    }

    pub fn is_authenticated(self) -> bool {
        self == CipherKind::Grain128aAuth
    }

    pub fn bit_order(self) -> BitOrder {
        match self {
            CipherKind::Trivium => BitOrder::LsbFirst,
            CipherKind::Grain128a | CipherKind::Grain128aAuth => BitOrder::MsbFirst,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CipherKind::Trivium => "trivium",
            CipherKind::Grain128a => "grain128a",
            CipherKind::Grain128aAuth => "grain128a-auth",
        }
    }
}

impl fmt::Display for CipherKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CipherKind {
    type Err = CipherError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trivium" => Ok(CipherKind::Trivium),
            "grain128a" | "grain-128a" => Ok(CipherKind::Grain128a),
            "grain128a-auth" | "grain128aauth" | "grain-128a-auth" => Ok(CipherKind::Grain128aAuth),
            _ => Err(CipherError::UnknownCipher(s.to_string())),
        }
    }
}

/// Key, IV and internal state sizes in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CipherParams {
    pub key_bits: usize,
    pub iv_bits: usize,
    pub state_bits: usize,
}

impl CipherParams {
    pub fn key_bytes(&self) -> usize {
        self.key_bits / 8
    }

    pub fn iv_bytes(&self) -> usize {
        self.iv_bits / 8
    }
}

/// Keystream bits produced per cipher step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radix(u8);

impl Radix {
    pub const R1: Radix = Radix(1);
    pub const R8: Radix = Radix(8);
    pub const R16: Radix = Radix(16);
    pub const R32: Radix = Radix(32);
    pub const ALL: [Radix; 4] = [Radix::R1, Radix::R8, Radix::R16, Radix::R32];

    pub fn new(bits: u32) -> Result<Self> {
        match bits {
            1 | 8 | 16 | 32 => Ok(Radix(bits as u8)),
            other => Err(CipherError::InvalidRadix(other)),
        }
    }

    pub fn bits(self) -> u32 {
        u32::from(self.0)
    }
}

impl Default for Radix {
    fn default() -> Self {
        Radix::R32
    }
}

impl fmt::Display for Radix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Radix {
    type Err = CipherError;

    fn from_str(s: &str) -> Result<Self> {
        let bits: u32 = s
            .trim()
            .parse()
            .map_err(|_| CipherError::InvalidRadix(u32::MAX))?;
        Radix::new(bits)
    }
}

/// MAC tag length `w`, 0 < w <= 32.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TagLen(u8);

impl TagLen {
    pub const MAX: TagLen = TagLen(32);

    pub fn new(bits: u32) -> Result<Self> {
        if (1..=32).contains(&bits) {
            Ok(TagLen(bits as u8))
        } else {
            Err(CipherError::InvalidTagLength(bits))
        }
    }

    pub fn bits(self) -> u32 {
        u32::from(self.0)
    }

    /// Bytes on the wire.
    pub fn bytes(self) -> usize {
        (self.bits() as usize).div_ceil(8)
    }
}

/// How keystream bits are packed into bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitOrder {
    LsbFirst,
    MsbFirst,
}

impl BitOrder {
    /// Packs 8 time-ordered bits (bit 0 first) into a byte.
    #[inline]
    pub fn pack_byte(self, time_ordered: u8) -> u8 {
        match self {
            BitOrder::LsbFirst => time_ordered,
            BitOrder::MsbFirst => time_ordered.reverse_bits(),
        }
    }

    /// Inverse of [`BitOrder::pack_byte`].
    #[inline]
    pub fn unpack_byte(self, byte: u8) -> u8 {
        self.pack_byte(byte)
    }

    pub fn pack(self, bits: &[bool]) -> Vec<u8> {
        bits.chunks(8)
            .map(|c| {
                let t = c
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << i));
                self.pack_byte(t)
            })
            .collect()
    }

    pub fn unpack(self, bytes: &[u8]) -> Vec<bool> {
        bytes
            .iter()
            .flat_map(|&b| {
                let t = self.unpack_byte(b);
                (0..8).map(move |i| (t >> i) & 1 == 1)
            })
            .collect()
    }
}

/// One step's worth of keystream: `len` bits, bit 0 earliest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Chunk {
    bits: u32,
    len: u8,
}

impl Chunk {
    pub(crate) fn new(bits: u32, radix: Radix) -> Self {
        Chunk {
            bits,
            len: radix.0,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        usize::from(self.len)
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len());
        (self.bits >> i) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.bit(i))
    }
}

/// An ordered run of keystream bits together with how it was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keystream {
    pub bits: Vec<bool>,
    pub producer: CipherKind,
    pub radix: Radix,
}

impl Keystream {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.producer.bit_order().pack(&self.bits)
    }
}

/// Reported by `init`: steps spent at the chosen radix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InitReport {
    /// Warm-up steps with output discarded (1152/r or 256/r).
    pub steps: u64,
    /// Steps spent preloading the MAC registers (authenticated mode only).
    pub preload_steps: u64,
}

/// Load/initialize/stream lifecycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Loaded,
    Initializing,
    Streaming,
}

/// Final `w` accumulator bits. Bit `j` of `bits` is tag bit `t_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tag {
    bits: u32,
    len: TagLen,
}

impl Tag {
    pub(crate) fn new(bits: u32, len: TagLen) -> Self {
        Tag { bits, len }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> TagLen {
        self.len
    }

    /// Tag bits packed MSB-first, `t_0` in the top bit of the first byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let bits: Vec<bool> = (0..self.len.bits())
            .map(|j| (self.bits >> j) & 1 == 1)
            .collect();
        BitOrder::MsbFirst.pack(&bits)
    }

    pub fn from_bytes(bytes: &[u8], len: TagLen) -> Result<Self> {
        if bytes.len() != len.bytes() {
            return Err(CipherError::ParameterSize {
                what: "tag",
                expected: len.bytes() * 8,
                actual: bytes.len() * 8,
            });
        }
        let bits = BitOrder::MsbFirst.unpack(bytes);
        let value = bits
            .iter()
            .take(len.bits() as usize)
            .enumerate()
            .fold(0u32, |acc, (j, &b)| acc | (u32::from(b) << j));
        Ok(Tag { bits: value, len })
    }
}

/// XORs a keystream chunk into data of the same length.
pub fn keystream_xor(keystream: &[u8], data: &[u8]) -> Result<Vec<u8>> {
    if keystream.len() != data.len() {
        return Err(CipherError::LengthMismatch {
            keystream: keystream.len(),
            data: data.len(),
        });
    }
    Ok(keystream.iter().zip(data).map(|(k, d)| k ^ d).collect())
}

/// Keystream bits produced but not yet consumed by a byte-oriented call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Spare {
    pub keystream: u64,
    pub mac: u64,
    pub len: u32,
}

/// Either cipher, selected at runtime.
#[derive(Clone, PartialEq, Eq)]
pub enum CipherState {
    Trivium(TriviumState),
    Grain(Grain128aState),
}

impl fmt::Debug for CipherState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CipherState::Trivium(s) => s.fmt(f),
            CipherState::Grain(s) => s.fmt(f),
        }
    }
}

impl CipherState {
    /// Loads key and IV. `tag_len` is required for `Grain128aAuth` and
    /// rejected otherwise.
    pub fn load(kind: CipherKind, key: &[u8], iv: &[u8], tag_len: Option<TagLen>) -> Result<Self> {
        match (kind, tag_len) {
            (CipherKind::Trivium, None) => Ok(CipherState::Trivium(TriviumState::load(key, iv)?)),
            (CipherKind::Grain128a, None) => Ok(CipherState::Grain(Grain128aState::load(key, iv)?)),
            (CipherKind::Grain128aAuth, Some(w)) => Ok(CipherState::Grain(
                Grain128aState::load_authenticated(key, iv, w)?,
            )),
            (CipherKind::Grain128aAuth, None) => Err(CipherError::InvalidTagLength(0)),
            (_, Some(_)) => Err(CipherError::NotAuthenticated("a tag length")),
        }
    }

    pub fn kind(&self) -> CipherKind {
        match self {
            CipherState::Trivium(_) => CipherKind::Trivium,
            CipherState::Grain(g) if g.is_authenticated() => CipherKind::Grain128aAuth,
            CipherState::Grain(_) => CipherKind::Grain128a,
        }
    }

    pub fn phase(&self) -> Phase {
        match self {
            CipherState::Trivium(s) => s.phase(),
            CipherState::Grain(s) => s.phase(),
        }
    }

    pub fn clocks_done(&self) -> u64 {
        match self {
            CipherState::Trivium(s) => s.clocks_done(),
            CipherState::Grain(s) => s.clocks_done(),
        }
    }

    pub fn init(&mut self, radix: Radix) -> InitReport {
        match self {
            CipherState::Trivium(s) => s.init(radix),
            CipherState::Grain(s) => s.init(radix),
        }
    }

    pub fn step(&mut self, radix: Radix) -> Result<Chunk> {
        match self {
            CipherState::Trivium(s) => s.step(radix),
            CipherState::Grain(s) => s.step(radix),
        }
    }

    /// Keystream steps taken since initialization finished.
    pub fn stream_steps(&self) -> u64 {
        match self {
            CipherState::Trivium(s) => s.stream_steps(),
            CipherState::Grain(s) => s.stream_steps(),
        }
    }

    /// Encrypts in place. In authenticated mode the plaintext is absorbed
    /// into the MAC before it is overwritten.
    pub fn encrypt(&mut self, radix: Radix, data: &mut [u8]) -> Result<()> {
        match self {
            CipherState::Trivium(s) => s.apply_keystream(radix, data),
            CipherState::Grain(s) => s.encrypt(radix, data),
        }
    }

    /// Decrypts in place. In authenticated mode the recovered plaintext is
    /// absorbed into the MAC.
    pub fn decrypt(&mut self, radix: Radix, data: &mut [u8]) -> Result<()> {
        match self {
            CipherState::Trivium(s) => s.apply_keystream(radix, data),
            CipherState::Grain(s) => s.decrypt(radix, data),
        }
    }

    pub fn finalize_tag(self) -> Result<Tag> {
        match self {
            CipherState::Trivium(_) => Err(CipherError::NotAuthenticated("tag finalization")),
            CipherState::Grain(s) => s.finalize_tag(),
        }
    }

    /// Collects `nbits` keystream bits at `radix`. `nbits` is rounded up to
    /// a whole number of steps.
    pub fn keystream(&mut self, radix: Radix, nbits: usize) -> Result<Keystream> {
        let kind = self.kind();
        let mut bits = Vec::with_capacity(nbits + 32);
        while bits.len() < nbits {
            let chunk = self.step(radix)?;
            bits.extend(chunk.iter());
        }
        bits.truncate(nbits);
        Ok(Keystream {
            bits,
            producer: kind,
            radix,
        })
    }
}

pub(crate) fn check_len(what: &'static str, bytes: &[u8], expected_bits: usize) -> Result<()> {
    if bytes.len() * 8 != expected_bits {
        return Err(CipherError::ParameterSize {
            what,
            expected: expected_bits,
            actual: bytes.len() * 8,
        });
    }
    Ok(())
}
