use super::{ChannelError, Direction, Result};
use crate::cipher::CipherKind;

/// Counters must stay below 2^63: the top bit of the IV word is the direction.
pub const MAX_COUNTER: u64 = (1 << 63) - 1;

/// IV layout: the first 8 bytes are the big-endian `u64`
/// `direction << 63 | counter`, the remaining bytes (2 for Trivium, 4 for
/// Grain-128a) are zero. The bytes are handed to the cipher as-is.
pub fn derive_iv(cipher: CipherKind, counter: u64, direction: Direction) -> Result<Vec<u8>> {
    if counter > MAX_COUNTER {
        return Err(ChannelError::SessionExhausted);
    }
    let mut iv = vec![0u8; cipher.params().iv_bytes()];
    let word = (direction.bit() << 63) | counter;
    iv[..8].copy_from_slice(&word.to_be_bytes());
    Ok(iv)
}
