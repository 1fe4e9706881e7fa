//! Bit-serial reference ciphers used as test oracles.
//!
//! Written straight from the cipher definitions with one `u8` per state bit
//! and one clock per loop iteration. Nothing here touches the word-parallel
//! code under test.

#![allow(dead_code)]

/// `K_i` for i = 1..=8n: bit (i-1) % 8 of byte (i-1) / 8.
fn lsb_bits(bytes: &[u8]) -> Vec<u8> {
    bytes
        .iter()
        .flat_map(|b| (0..8).map(move |j| (b >> j) & 1))
        .collect()
}

fn msb_bits(bytes: &[u8]) -> Vec<u8> {
    bytes
        .iter()
        .flat_map(|b| (0..8).map(move |j| (b >> (7 - j)) & 1))
        .collect()
}

pub fn pack_lsb(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0, |a, (j, &b)| a | (b << j)))
        .collect()
}

pub fn pack_msb(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().enumerate().fold(0, |a, (j, &b)| a | (b << (7 - j))))
        .collect()
}

/// Trivium keystream bits z_1..z_n.
pub fn trivium(key: &[u8], iv: &[u8], n: usize) -> Vec<u8> {
    assert_eq!(key.len(), 10);
    assert_eq!(iv.len(), 10);
    let k = lsb_bits(key);
    let v = lsb_bits(iv);
    // s[0] unused so indices match s1..s288
    let mut s = [0u8; 289];
    for i in 1..=80 {
        s[i] = k[80 - i];
        s[93 + i] = v[80 - i];
    }
    s[286] = 1;
    s[287] = 1;
    s[288] = 1;
    let mut out = Vec::with_capacity(n);
    for clock in 0..1152 + n {
        let mut t1 = s[66] ^ s[93];
        let mut t2 = s[162] ^ s[177];
        let mut t3 = s[243] ^ s[288];
        let z = t1 ^ t2 ^ t3;
        t1 ^= (s[91] & s[92]) ^ s[171];
        t2 ^= (s[175] & s[176]) ^ s[264];
        t3 ^= (s[286] & s[287]) ^ s[69];
        for i in (2..=288).rev() {
            s[i] = s[i - 1];
        }
        s[1] = t3;
        s[94] = t1;
        s[178] = t2;
        if clock >= 1152 {
            out.push(z);
        }
    }
    out
}

struct Grain {
    b: Vec<u8>,
    s: Vec<u8>,
}

impl Grain {
    fn new(key: &[u8], iv: &[u8]) -> Self {
        assert_eq!(key.len(), 16);
        assert_eq!(iv.len(), 12);
        let b = msb_bits(key);
        let mut s = msb_bits(iv);
        s.extend(std::iter::repeat_n(1, 31));
        s.push(0);
        let mut g = Grain { b, s };
        for _ in 0..256 {
            let y = g.y();
            g.clock(y);
        }
        g
    }

    fn y(&self) -> u8 {
        let (b, s) = (&self.b, &self.s);
        let h = (b[12] & s[8])
            ^ (s[13] & s[20])
            ^ (b[95] & s[42])
            ^ (s[60] & s[79])
            ^ (b[12] & b[95] & s[94]);
        [2, 15, 36, 45, 64, 73, 89]
            .iter()
            .fold(h ^ s[93], |acc, &j| acc ^ b[j])
    }

    fn clock(&mut self, fb: u8) {
        let (b, s) = (&self.b, &self.s);
        let f = s[0] ^ s[7] ^ s[38] ^ s[70] ^ s[81] ^ s[96];
        let g = s[0]
            ^ b[0]
            ^ b[26]
            ^ b[56]
            ^ b[91]
            ^ b[96]
            ^ (b[3] & b[67])
            ^ (b[11] & b[13])
            ^ (b[17] & b[18])
            ^ (b[27] & b[59])
            ^ (b[40] & b[48])
            ^ (b[61] & b[65])
            ^ (b[68] & b[84])
            ^ (b[88] & b[92] & b[93] & b[95])
            ^ (b[22] & b[24] & b[25])
            ^ (b[70] & b[78] & b[82]);
        self.s.remove(0);
        self.b.remove(0);
        self.s.push(f ^ fb);
        self.b.push(g ^ fb);
    }

    fn next(&mut self) -> u8 {
        let y = self.y();
        self.clock(0);
        y
    }
}

/// Grain-128a pre-output bits y_0..y_{n-1} after initialization.
pub fn grain_preoutput(key: &[u8], iv: &[u8], n: usize) -> Vec<u8> {
    let mut g = Grain::new(key, iv);
    (0..n).map(|_| g.next()).collect()
}

/// Grain-128a authenticated encryption of `msg` (bits MSB-first).
/// Returns (ciphertext, tag) with tag bit j = t_j.
pub fn grain_auth(key: &[u8], iv: &[u8], w: u32, msg: &[u8]) -> (Vec<u8>, u32) {
    let mut g = Grain::new(key, iv);
    let mut a = [0u8; 32];
    let mut r = [0u8; 32];
    for j in 0..32 {
        a[j] = g.next();
    }
    for j in 0..32 {
        r[j] = g.next();
    }
    let m = msb_bits(msg);
    let mut c = Vec::with_capacity(m.len());
    for &mi in &m {
        let z = g.next();
        let auth_bit = g.next();
        c.push(mi ^ z);
        if mi == 1 {
            for j in 0..32 {
                a[j] ^= r[j];
            }
        }
        r.rotate_left(1);
        r[31] = auth_bit;
    }
    // padding bit m_L = 1
    for j in 0..32 {
        a[j] ^= r[j];
    }
    let w = w as usize;
    let tag = (0..w).fold(0u32, |acc, j| acc | (u32::from(a[32 - w + j]) << j));
    (pack_msb(&c), tag)
}

/// Keystream z_i of authenticated mode (even pre-output bits after 64).
pub fn grain_auth_keystream(key: &[u8], iv: &[u8], n: usize) -> Vec<u8> {
    let y = grain_preoutput(key, iv, 64 + 2 * n);
    (0..n).map(|i| y[64 + 2 * i]).collect()
}
