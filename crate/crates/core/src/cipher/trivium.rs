use std::fmt;

use super::{check_len, Chunk, CipherError, InitReport, Phase, Radix, Result, Spare, KEYSTREAM_CAP_BITS};

pub const TRIVIUM_INIT_CLOCKS: u64 = 1152;

const A_LEN: u32 = 93;
const B_LEN: u32 = 84;
const C_LEN: u32 = 111;

/// Trivium's 288-bit state as three shift registers of 93, 84 and 111 bits.
///
/// Each register is held in a `u128` with position `p` (1-based, as in the
/// cipher definition: `s1..s93`, `s94..s177`, `s178..s288`) at bit
/// `len - p`. Shifting towards higher positions is then a right shift, and
/// the bits a tap sees over the next `r` clocks are the `r` bits starting
/// at that tap's bit index, in time order.
#[derive(Clone, PartialEq, Eq)]
pub struct TriviumState {
    a: u128,
    b: u128,
    c: u128,
    clocks_done: u64,
    emitted: u64,
    stream_steps: u64,
    spare: Spare,
}

impl fmt::Debug for TriviumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TriviumState")
            .field("phase", &self.phase())
            .field("clocks_done", &self.clocks_done)
            .finish_non_exhaustive()
    }
}

#[inline(always)]
fn tap(reg: u128, len: u32, pos: u32, mask: u128) -> u128 {
    (reg >> (len - pos)) & mask
}

impl TriviumState {
    /// Key goes to `s1..s80`, IV to `s94..s173`, and `s286..s288` are set.
    /// Key bit `K_i` is bit `(i-1) % 8` of byte `(i-1) / 8` and is placed at
    /// `s(81-i)`, likewise for the IV.
    pub fn load(key: &[u8], iv: &[u8]) -> Result<Self> {
        check_len("key", key, 80)?;
        check_len("iv", iv, 80)?;
        let mut k = [0u8; 16];
        k[..10].copy_from_slice(key);
        let mut v = [0u8; 16];
        v[..10].copy_from_slice(iv);
        Ok(TriviumState {
            a: u128::from_le_bytes(k) << (A_LEN - 80),
            b: u128::from_le_bytes(v) << (B_LEN - 80),
            c: 0b111,
            clocks_done: 0,
            emitted: 0,
            stream_steps: 0,
            spare: Spare::default(),
        })
    }

    pub fn clocks_done(&self) -> u64 {
        self.clocks_done
    }

    pub fn stream_steps(&self) -> u64 {
        self.stream_steps
    }

    pub fn phase(&self) -> Phase {
        match self.clocks_done {
            0 => Phase::Loaded,
            c if c < TRIVIUM_INIT_CLOCKS => Phase::Initializing,
            _ => Phase::Streaming,
        }
    }

    /// Number of set bits across the three registers.
    pub fn count_ones(&self) -> u32 {
        self.a.count_ones() + self.b.count_ones() + self.c.count_ones()
    }

    /// Advances `width` clocks at once and returns the `width` output bits.
    #[inline(always)]
    fn clock(&mut self, width: u32) -> u128 {
        let m = (1u128 << width) - 1;
        let (a, b, c) = (self.a, self.b, self.c);

        let t1 = tap(a, A_LEN, 66, m) ^ tap(a, A_LEN, 93, m);
        let t2 = tap(b, B_LEN, 69, m) ^ tap(b, B_LEN, 84, m);
        let t3 = tap(c, C_LEN, 66, m) ^ tap(c, C_LEN, 111, m);
        let z = t1 ^ t2 ^ t3;

        let n1 = t1 ^ (tap(a, A_LEN, 91, m) & tap(a, A_LEN, 92, m)) ^ tap(b, B_LEN, 78, m);
        let n2 = t2 ^ (tap(b, B_LEN, 82, m) & tap(b, B_LEN, 83, m)) ^ tap(c, C_LEN, 87, m);
        let n3 = t3 ^ (tap(c, C_LEN, 109, m) & tap(c, C_LEN, 110, m)) ^ tap(a, A_LEN, 69, m);

        self.a = (a >> width) | (n3 << (A_LEN - width));
        self.b = (b >> width) | (n1 << (B_LEN - width));
        self.c = (c >> width) | (n2 << (C_LEN - width));
        self.clocks_done = self.clocks_done.saturating_add(u64::from(width));
        z
    }

    /// Runs one warm-up step, output discarded. The last step is narrowed if
    /// fewer than `r` warm-up clocks remain.
    pub fn init_step(&mut self, radix: Radix) -> bool {
        let remaining = TRIVIUM_INIT_CLOCKS.saturating_sub(self.clocks_done);
        if remaining == 0 {
            return false;
        }
        let width = (radix.bits() as u64).min(remaining) as u32;
        self.clock(width);
        true
    }

    /// Completes the 1152-clock warm-up. Returns 1152/r for a fresh state.
    pub fn init(&mut self, radix: Radix) -> InitReport {
        let mut steps = 0;
        while self.init_step(radix) {
            steps += 1;
        }
        InitReport {
            steps,
            preload_steps: 0,
        }
    }

    pub fn step(&mut self, radix: Radix) -> Result<Chunk> {
        if self.clocks_done < TRIVIUM_INIT_CLOCKS {
            return Err(CipherError::NotInitialized {
                clocks_done: self.clocks_done,
                required: TRIVIUM_INIT_CLOCKS,
            });
        }
        let r = u64::from(radix.bits());
        if self.emitted + r > KEYSTREAM_CAP_BITS {
            return Err(CipherError::KeystreamExhausted);
        }
        self.emitted += r;
        self.stream_steps += 1;
        Ok(Chunk::new(self.clock(radix.bits()) as u32, radix))
    }

    /// XORs keystream into `data`, first keystream bit into bit 0 of the
    /// first byte. Bits left over from a partial step carry to the next call.
    pub fn apply_keystream(&mut self, radix: Radix, data: &mut [u8]) -> Result<()> {
        let needed = (data.len() as u64 * 8).saturating_sub(u64::from(self.spare.len));
        if self.emitted + needed > KEYSTREAM_CAP_BITS {
            return Err(CipherError::KeystreamExhausted);
        }
        if self.clocks_done < TRIVIUM_INIT_CLOCKS && !data.is_empty() {
            return Err(CipherError::NotInitialized {
                clocks_done: self.clocks_done,
                required: TRIVIUM_INIT_CLOCKS,
            });
        }
        let mut spare = self.spare;
        for byte in data.iter_mut() {
            while spare.len < 8 {
                let chunk = self.step(radix)?;
                spare.keystream |= u64::from(chunk.bits()) << spare.len;
                spare.len += radix.bits();
            }
            *byte ^= spare.keystream as u8;
            spare.keystream >>= 8;
            spare.len -= 8;
        }
        self.spare = spare;
        Ok(())
    }
}
