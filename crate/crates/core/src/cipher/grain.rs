use std::fmt;

use super::{
    check_len, Chunk, CipherError, InitReport, Phase, Radix, Result, Spare, Tag, TagLen,
    KEYSTREAM_CAP_BITS,
};

pub const GRAIN_INIT_CLOCKS: u64 = 256;

/// Pre-output bits used to fill the accumulator and shift register before
/// authenticated encryption starts.
pub const MAC_PRELOAD_BITS: u64 = 64;

#[derive(Clone, PartialEq, Eq)]
struct MacState {
    accumulator: u32,
    register: u32,
    tag_len: TagLen,
    preloaded: bool,
}

/// Grain-128a: a 128-bit NLFSR `b` and a 128-bit LFSR `s`.
///
/// Bit `i` of each `u128` is `b_i` / `s_i`. Registers shift towards index
/// 0 and feedback enters at index 127, so the bits a tap at `p` sees over the
/// next `r` clocks are simply `(reg >> p) & mask`.
#[derive(Clone, PartialEq, Eq)]
pub struct Grain128aState {
    nlfsr: u128,
    lfsr: u128,
    clocks_done: u64,
    emitted: u64,
    stream_steps: u64,
    auth: Option<MacState>,
    spare: Spare,
}

impl fmt::Debug for Grain128aState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grain128aState")
            .field("phase", &self.phase())
            .field("clocks_done", &self.clocks_done)
            .field("authenticated", &self.auth.is_some())
            .finish_non_exhaustive()
    }
}

fn msb_first_u128(bytes: &[u8]) -> u128 {
    // b_i is bit (7 - i % 8) of byte i / 8
    bytes
        .iter()
        .enumerate()
        .fold(0u128, |acc, (i, &byte)| acc | (u128::from(byte.reverse_bits()) << (8 * i)))
}

impl Grain128aState {
    /// `b` takes the key; `s_0..s_95` take the IV, `s_96..s_126` are set and
    /// `s_127` is cleared.
    pub fn load(key: &[u8], iv: &[u8]) -> Result<Self> {
        check_len("key", key, 128)?;
        check_len("iv", iv, 96)?;
        let padding = ((1u128 << 31) - 1) << 96;
        Ok(Grain128aState {
            nlfsr: msb_first_u128(key),
            lfsr: msb_first_u128(iv) | padding,
            clocks_done: 0,
            emitted: 0,
            stream_steps: 0,
            auth: None,
            spare: Spare::default(),
        })
    }

    pub fn load_authenticated(key: &[u8], iv: &[u8], tag_len: TagLen) -> Result<Self> {
        let mut state = Self::load(key, iv)?;
        state.auth = Some(MacState {
            accumulator: 0,
            register: 0,
            tag_len,
            preloaded: false,
        });
        Ok(state)
    }

    pub fn is_authenticated(&self) -> bool {
        self.auth.is_some()
    }

    pub fn tag_len(&self) -> Option<TagLen> {
        self.auth.as_ref().map(|a| a.tag_len)
    }

    pub fn clocks_done(&self) -> u64 {
        self.clocks_done
    }

    pub fn stream_steps(&self) -> u64 {
        self.stream_steps
    }

    pub fn phase(&self) -> Phase {
        let preloaded = self.auth.as_ref().is_none_or(|a| a.preloaded);
        match self.clocks_done {
            0 => Phase::Loaded,
            c if c < GRAIN_INIT_CLOCKS || !preloaded => Phase::Initializing,
            _ => Phase::Streaming,
        }
    }

    pub fn nlfsr(&self) -> u128 {
        self.nlfsr
    }

    pub fn lfsr(&self) -> u128 {
        self.lfsr
    }

    /// `width` pre-output bits `y`, without clocking.
    #[inline(always)]
    fn pre_output(&self, width: u32) -> u128 {
        let m = (1u128 << width) - 1;
        let b = |p: u32| (self.nlfsr >> p) & m;
        let s = |p: u32| (self.lfsr >> p) & m;
        let h = (b(12) & s(8))
            ^ (s(13) & s(20))
            ^ (b(95) & s(42))
            ^ (s(60) & s(79))
            ^ (b(12) & b(95) & s(94));
        h ^ s(93) ^ b(2) ^ b(15) ^ b(36) ^ b(45) ^ b(64) ^ b(73) ^ b(89)
    }

    /// Advances `width` clocks; `feedback` is XORed into both new-bit lanes.
    #[inline(always)]
    fn shift(&mut self, width: u32, feedback: u128) {
        let m = (1u128 << width) - 1;
        let b = |p: u32| (self.nlfsr >> p) & m;
        let s = |p: u32| (self.lfsr >> p) & m;
        let f = s(0) ^ s(7) ^ s(38) ^ s(70) ^ s(81) ^ s(96);
        let g = s(0)
            ^ b(0)
            ^ b(26)
            ^ b(56)
            ^ b(91)
            ^ b(96)
            ^ (b(3) & b(67))
            ^ (b(11) & b(13))
            ^ (b(17) & b(18))
            ^ (b(27) & b(59))
            ^ (b(40) & b(48))
            ^ (b(61) & b(65))
            ^ (b(68) & b(84))
            ^ (b(88) & b(92) & b(93) & b(95))
            ^ (b(22) & b(24) & b(25))
            ^ (b(70) & b(78) & b(82));
        let at = 128 - width;
        self.lfsr = (self.lfsr >> width) | ((f ^ feedback) << at);
        self.nlfsr = (self.nlfsr >> width) | ((g ^ feedback) << at);
        self.clocks_done = self.clocks_done.saturating_add(u64::from(width));
    }

    #[inline(always)]
    fn clock(&mut self, width: u32) -> u128 {
        let y = self.pre_output(width);
        self.shift(width, 0);
        y
    }

    /// One warm-up step with the pre-output fed back into both registers.
    pub fn init_step(&mut self, radix: Radix) -> bool {
        let remaining = GRAIN_INIT_CLOCKS.saturating_sub(self.clocks_done);
        if remaining == 0 {
            return false;
        }
        let width = (radix.bits() as u64).min(remaining) as u32;
        let y = self.pre_output(width);
        self.shift(width, y);
        true
    }

    /// Completes the 256-clock warm-up and, in authenticated mode, fills the
    /// accumulator and shift register from the next 64 pre-output bits.
    pub fn init(&mut self, radix: Radix) -> InitReport {
        let mut report = InitReport::default();
        while self.init_step(radix) {
            report.steps += 1;
        }
        if self.auth.as_ref().is_some_and(|a| !a.preloaded) {
            let width = radix.bits();
            let mut preload = 0u64;
            let mut filled = 0;
            while u64::from(filled) < MAC_PRELOAD_BITS {
                preload |= (self.clock(width) as u64) << filled;
                filled += width;
                report.preload_steps += 1;
            }
            let auth = self.auth.as_mut().expect("checked above");
            auth.accumulator = preload as u32;
            auth.register = (preload >> 32) as u32;
            auth.preloaded = true;
        }
        report
    }

    fn check_ready(&self, bits: u64) -> Result<()> {
        if self.phase() != Phase::Streaming {
            return Err(CipherError::NotInitialized {
                clocks_done: self.clocks_done,
                required: GRAIN_INIT_CLOCKS,
            });
        }
        if self.emitted + bits > KEYSTREAM_CAP_BITS {
            return Err(CipherError::KeystreamExhausted);
        }
        Ok(())
    }

    /// Keystream and MAC bits for one step. Unauthenticated: every
    /// pre-output bit is keystream. Authenticated: `2r` pre-output bits are
    /// drawn, even ones are keystream and odd ones feed the shift register.
    #[inline]
    fn step_pair(&mut self, radix: Radix) -> Result<(u32, u32)> {
        let r = radix.bits();
        self.check_ready(u64::from(r))?;
        self.emitted += u64::from(r);
        if self.auth.is_none() {
            self.stream_steps += 1;
            return Ok((self.clock(r) as u32, 0));
        }
        self.stream_steps += 2;
        let lo = self.clock(r) as u64;
        let hi = self.clock(r) as u64;
        let y = lo | (hi << r);
        let (mut ks, mut mac) = (0u32, 0u32);
        for k in 0..r {
            ks |= (((y >> (2 * k)) & 1) as u32) << k;
            mac |= (((y >> (2 * k + 1)) & 1) as u32) << k;
        }
        Ok((ks, mac))
    }

    pub fn step(&mut self, radix: Radix) -> Result<Chunk> {
        let (ks, mac) = self.step_pair(radix)?;
        if let Some(auth) = self.auth.as_mut() {
            // Keystream taken without a message: the MAC register still has
            // to track the odd bits.
            for k in 0..radix.bits() {
                auth.register = (auth.register >> 1) | (((mac >> k) & 1) << 31);
            }
        }
        Ok(Chunk::new(ks, radix))
    }

    /// Next 8 keystream bits and 8 MAC bits, time-ordered.
    #[inline]
    fn next_byte(&mut self, radix: Radix) -> Result<(u8, u8)> {
        let mut spare = self.spare;
        while spare.len < 8 {
            let (ks, mac) = self.step_pair(radix)?;
            spare.keystream |= u64::from(ks) << spare.len;
            spare.mac |= u64::from(mac) << spare.len;
            spare.len += radix.bits();
        }
        let out = (spare.keystream as u8, spare.mac as u8);
        spare.keystream >>= 8;
        spare.mac >>= 8;
        spare.len -= 8;
        self.spare = spare;
        Ok(out)
    }

    fn absorb(&mut self, plaintext: u8, mac_bits: u8) {
        let auth = self.auth.as_mut().expect("authenticated mode");
        let (mut acc, mut reg) = (auth.accumulator, auth.register);
        for t in 0..8 {
            if (plaintext >> (7 - t)) & 1 == 1 {
                acc ^= reg;
            }
            reg = (reg >> 1) | (u32::from((mac_bits >> t) & 1) << 31);
        }
        auth.accumulator = acc;
        auth.register = reg;
    }

    fn precheck(&self, len: usize) -> Result<()> {
        let needed = (len as u64 * 8).saturating_sub(u64::from(self.spare.len));
        if len > 0 {
            self.check_ready(needed)?;
        }
        Ok(())
    }

    /// Encrypts in place, absorbing the plaintext into the MAC when
    /// authenticated. Message bits are taken MSB-first from each byte.
    pub fn encrypt(&mut self, radix: Radix, data: &mut [u8]) -> Result<()> {
        self.precheck(data.len())?;
        let authenticated = self.auth.is_some();
        for byte in data.iter_mut() {
            let (ks, mac) = self.next_byte(radix)?;
            if authenticated {
                self.absorb(*byte, mac);
            }
            *byte ^= ks.reverse_bits();
        }
        Ok(())
    }

    pub fn decrypt(&mut self, radix: Radix, data: &mut [u8]) -> Result<()> {
        self.precheck(data.len())?;
        let authenticated = self.auth.is_some();
        for byte in data.iter_mut() {
            let (ks, mac) = self.next_byte(radix)?;
            *byte ^= ks.reverse_bits();
            if authenticated {
                self.absorb(*byte, mac);
            }
        }
        Ok(())
    }

    /// Absorbs the padding bit and returns the last `w` accumulator bits.
    pub fn finalize_tag(self) -> Result<Tag> {
        let auth = self
            .auth
            .ok_or(CipherError::NotAuthenticated("tag finalization"))?;
        if !auth.preloaded {
            return Err(CipherError::NotInitialized {
                clocks_done: self.clocks_done,
                required: GRAIN_INIT_CLOCKS,
            });
        }
        let acc = auth.accumulator ^ auth.register;
        let w = auth.tag_len.bits();
        let bits = if w == 32 { acc } else { acc >> (32 - w) };
        Ok(Tag::new(bits, auth.tag_len))
    }
}
