//! Secure channel between the crypto TA and the crypto IP.
//!
//! Both endpoints hold the same pre-shared key. Every message gets a fresh
//! cipher instance keyed with an IV derived from the sender's message
//! counter and direction, so no (key, IV) pair is ever reused. The counter
//! travels in the frame header and the receiver accepts only counters at or
//! above the next expected one: gaps are tolerated, reuse and reordering are
//! not.

use thiserror::Error;

use crate::cipher::CipherError;

mod frame;
mod iv;
mod session;

pub use frame::{Frame, FrameFlags, FRAME_HEADER_LEN};
pub(crate) use frame::words_to_bytes;
pub use iv::{derive_iv, MAX_COUNTER};
pub use session::{ChannelSession, CipherCost, Role, SecretKey, SessionConfig, MAX_PAYLOAD};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChannelError {
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error("key must be {expected} bits for this cipher, got {actual}")]
    KeySize { expected: usize, actual: usize },
    #[error("message counter space exhausted, session must be re-keyed")]
    SessionExhausted,
    #[error("payload of {len} bytes exceeds the {max}-byte limit")]
    PayloadTooLarge { len: usize, max: usize },
    #[error("frame counter {counter} replayed or reordered (next expected {expected})")]
    Replay { counter: u64, expected: u64 },
    #[error("authentication tag mismatch")]
    AuthenticationFailed,
    #[error("frame for session {got} routed to session {expected}")]
    Routing { expected: u16, got: u16 },
    #[error("frame direction {got:?} does not match receiver (expected {expected:?})")]
    WrongDirection { expected: Direction, got: Direction },
    #[error("malformed frame: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// Which way a frame travels. Folded into the IV so the two directions
/// never share a keystream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    TaToIp,
    IpToTa,
}

impl Direction {
    pub fn bit(self) -> u64 {
        match self {
            Direction::TaToIp => 0,
            Direction::IpToTa => 1,
        }
    }

    pub fn reverse(self) -> Direction {
        match self {
            Direction::TaToIp => Direction::IpToTa,
            Direction::IpToTa => Direction::TaToIp,
        }
    }
}
