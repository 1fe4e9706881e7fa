use std::collections::{HashMap, VecDeque};
use std::io;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::partition::{AddrRange, WorldPartition};
use super::tap::{observed_payload, LeakageReport, TapId, TapKind, TrojanTap};
use super::{BusTransaction, EndpointId, Link, Result, SocError, TxnKind, World};
use crate::channel::{
    words_to_bytes, ChannelError, ChannelSession, CipherCost, Direction, Frame, FrameFlags,
    SessionConfig, FRAME_HEADER_LEN, MAX_PAYLOAD,
};
use crate::cipher::{CipherError, CipherKind, Radix, TagLen};

pub const CRYPTO_IP_BASE: u32 = 0x8000_0000;
pub const CRYPTO_IP_SIZE: u32 = 0x1000;
pub const TARGET_BASE: u32 = 0xa000_0000;
pub const TARGET_SIZE: u32 = 0x0400_0000;
pub const NS_IP_BASE: u32 = 0x1000_0000;
pub const NS_IP_SIZE: u32 = 0x0010_0000;

// crypto IP slave interface registers
pub(crate) const REG_DATA_IN: u32 = CRYPTO_IP_BASE;
pub(crate) const REG_DATA_OUT: u32 = CRYPTO_IP_BASE + 0x04;
pub(crate) const REG_ADDR: u32 = CRYPTO_IP_BASE + 0x08;
pub(crate) const REG_LEN: u32 = CRYPTO_IP_BASE + 0x0c;
pub(crate) const REG_CMD: u32 = CRYPTO_IP_BASE + 0x10;
pub(crate) const REG_STATUS: u32 = CRYPTO_IP_BASE + 0x14;
pub(crate) const CMD_DELIVER: u32 = 1;
pub(crate) const CMD_READ: u32 = 2;
const STATUS_ERROR: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Seeds the pre-shared key generator.
    pub seed: u64,
    pub session: SessionConfig,
    /// When off, frames travel with the PLAINTEXT flag and no cipher runs.
    pub encryption: bool,
    /// Secure slaves apply the TrustZone predicate.
    pub trustzone_checks: bool,
    /// Keep a full per-beat trace.
    pub record_trace: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 0,
            session: SessionConfig::new(1, CipherKind::Trivium, Radix::R32),
            encryption: true,
            trustzone_checks: true,
            record_trace: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRecord {
    pub cycle: u64,
    pub link: Link,
    pub txn: BusTransaction,
    pub accepted: bool,
}

/// A beat a secure slave refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub cycle: u64,
    pub link: Link,
    pub txn: BusTransaction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeliveryStatus {
    Delivered,
    Rejected(SocError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryReport {
    pub frame_words: usize,
    /// Bus beats, one cycle each, on every link.
    pub transfer_cycles: u64,
    /// Crypto IP cipher initialization steps for this frame.
    pub init_steps: u64,
    /// All crypto IP cipher steps (init, MAC preload, keystream).
    pub cipher_cycles: u64,
    pub ta_cost: CipherCost,
    pub ip_cost: CipherCost,
    pub start_cycle: u64,
    pub end_cycle: u64,
    pub status: DeliveryStatus,
}

impl DeliveryReport {
    pub fn delivered(&self) -> bool {
        self.status == DeliveryStatus::Delivered
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadReport {
    pub data: Vec<u8>,
    pub frame_words: usize,
    pub transfer_cycles: u64,
    pub init_steps: u64,
    pub cipher_cycles: u64,
    pub ta_cost: CipherCost,
    pub ip_cost: CipherCost,
}

#[derive(Debug, Clone, Copy)]
struct Fault {
    link: Link,
    remaining: usize,
    mask: u32,
}

struct Ta {
    session: ChannelSession,
    plain_counter: u64,
}

/// Slave interface FIFOs and registers plus the controller's session.
struct CryptoIp {
    session: ChannelSession,
    plain_counter: u64,
    rx: Vec<u32>,
    tx: VecDeque<u32>,
    addr: u32,
    len: u32,
    status: u32,
    pending: Option<u32>,
    last_result: Option<Result<()>>,
    last_cost: CipherCost,
}

impl CryptoIp {
    fn access(&mut self, txn: &mut BusTransaction) {
        match (txn.kind, txn.address) {
            (TxnKind::Write, REG_DATA_IN) => self.rx.push(txn.data),
            (TxnKind::Write, REG_ADDR) => self.addr = txn.data,
            (TxnKind::Write, REG_LEN) => self.len = txn.data,
            (TxnKind::Write, REG_CMD) => self.pending = Some(txn.data),
            (TxnKind::Read, REG_DATA_OUT) => txn.data = self.tx.pop_front().unwrap_or(0),
            (TxnKind::Read, REG_STATUS) => txn.data = self.status,
            (TxnKind::Read, _) => txn.data = 0,
            (TxnKind::Write, _) => {}
        }
    }
}

#[derive(Default)]
struct Memory(HashMap<u32, u32>);

impl Memory {
    fn access(&mut self, txn: &mut BusTransaction) {
        let word = txn.address & !3;
        match txn.kind {
            TxnKind::Read => txn.data = self.0.get(&word).copied().unwrap_or(0),
            TxnKind::Write => {
                self.0.insert(word, txn.data);
            }
        }
    }

    fn peek(&self, address: u32, len: usize) -> Vec<u8> {
        (0..len)
            .map(|i| {
                let a = address.wrapping_add(i as u32);
                let w = self.0.get(&(a & !3)).copied().unwrap_or(0);
                w.to_be_bytes()[(a & 3) as usize]
            })
            .collect()
    }
}

/// The simulated SoC. Single-threaded and fully deterministic for a given
/// seed and sequence of calls.
pub struct Simulator {
    config: SimConfig,
    partition: WorldPartition,
    rng: ChaCha20Rng,
    cycle: u64,
    beats: u64,
    ta: Ta,
    ip: CryptoIp,
    target: Memory,
    ns_ip: Memory,
    taps: Vec<TrojanTap>,
    trace: Vec<TraceRecord>,
    violations: Vec<Violation>,
    faults: Vec<Fault>,
}

fn windows() -> [(EndpointId, AddrRange); 3] {
    [
        (
            EndpointId::CryptoIp,
            AddrRange::sized(CRYPTO_IP_BASE, CRYPTO_IP_SIZE).expect("valid"),
        ),
        (
            EndpointId::TargetIp,
            AddrRange::sized(TARGET_BASE, TARGET_SIZE).expect("valid"),
        ),
        (
            EndpointId::NsIp,
            AddrRange::sized(NS_IP_BASE, NS_IP_SIZE).expect("valid"),
        ),
    ]
}

fn slave_at(address: u32) -> Option<EndpointId> {
    windows()
        .into_iter()
        .find(|(_, w)| w.contains(address))
        .map(|(e, _)| e)
}

fn session_pair(rng: &mut ChaCha20Rng, config: SessionConfig) -> Result<(ChannelSession, ChannelSession)> {
    let mut key = vec![0u8; config.cipher.params().key_bytes()];
    rng.fill_bytes(&mut key);
    let pair = ChannelSession::pair(config, &key);
    key.fill(0);
    Ok(pair?)
}

/// Builds the SoC: TA, crypto IP, target IP, non-secure IP and interconnect,
/// at cycle 0. Every slave window must sit inside a range of its endpoint's
/// world.
pub fn build_soc(partition: WorldPartition, config: SimConfig) -> Result<Simulator> {
    for (endpoint, window) in windows() {
        let world = partition.world_of(endpoint);
        if !partition.span_in(world, window.start(), (window.last() - window.start()) as usize + 1) {
            return Err(SocError::Config(format!(
                "{endpoint} window {:#010x}..={:#010x} is not inside a {world:?} range",
                window.start(),
                window.last()
            )));
        }
    }
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let (ta, ip) = session_pair(&mut rng, config.session)?;
    Ok(Simulator {
        config,
        partition,
        rng,
        cycle: 0,
        beats: 0,
        ta: Ta {
            session: ta,
            plain_counter: 0,
        },
        ip: CryptoIp {
            session: ip,
            plain_counter: 0,
            rx: Vec::new(),
            tx: VecDeque::new(),
            addr: TARGET_BASE,
            len: 0,
            status: 0,
            pending: None,
            last_result: None,
            last_cost: CipherCost::default(),
        },
        target: Memory::default(),
        ns_ip: Memory::default(),
        taps: Vec::new(),
        trace: Vec::new(),
        violations: Vec::new(),
        faults: Vec::new(),
    })
}

#[derive(Serialize)]
struct TraceRow<'a> {
    cycle: u64,
    link: &'a str,
    address: String,
    data: String,
    ns_attr: u8,
    originator: &'a str,
}

impl Simulator {
    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn partition(&self) -> &WorldPartition {
        &self.partition
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn session_config(&self) -> SessionConfig {
        *self.ta.session.config()
    }

    /// Backdoor view of target IP memory; no bus traffic.
    pub fn peek_target(&self, address: u32, len: usize) -> Vec<u8> {
        self.target.peek(address, len)
    }

    pub fn set_encryption(&mut self, on: bool) {
        self.config.encryption = on;
    }

    pub fn set_trustzone_checks(&mut self, on: bool) {
        self.config.trustzone_checks = on;
    }

    /// Re-keys both endpoints with a fresh key under a new session id.
    pub fn set_cipher(&mut self, cipher: CipherKind, radix: Radix, tag_len: Option<TagLen>) -> Result<()> {
        let id = self.ta.session.id().wrapping_add(1);
        let mut session = SessionConfig::new(id, cipher, radix);
        if let Some(w) = tag_len {
            if !cipher.is_authenticated() {
                return Err(ChannelError::from(CipherError::NotAuthenticated("a tag length")).into());
            }
            session = session.with_tag_len(w);
        }
        let (ta, ip) = session_pair(&mut self.rng, session)?;
        self.ta.session = ta;
        self.ip.session = ip;
        self.config.session = session;
        Ok(())
    }

    pub fn attach_tap(&mut self, kind: TapKind, link: Link) -> TapId {
        self.taps.push(TrojanTap {
            kind,
            link,
            attached_at: self.cycle,
            log: Default::default(),
        });
        TapId(self.taps.len() - 1)
    }

    /// Like [`Simulator::attach_tap`] with names as used in stimulus scripts.
    pub fn attach_tap_named(&mut self, kind: &str, link: &str) -> Result<TapId> {
        Ok(self.attach_tap(kind.parse()?, link.parse()?))
    }

    pub fn tap(&self, id: TapId) -> Result<&TrojanTap> {
        self.taps.get(id.0).ok_or(SocError::UnknownTap(id.0))
    }

    pub fn taps(&self) -> &[TrojanTap] {
        &self.taps
    }

    /// Corrupts the data of the `nth` next write crossing `link` by XOR with
    /// `mask`. A test hook for in-flight corruption.
    pub fn inject_fault(&mut self, link: Link, nth: usize, mask: u32) {
        self.faults.push(Fault {
            link,
            remaining: nth,
            mask,
        });
    }

    pub fn leakage_report(&self, id: TapId, known: &[u8]) -> Result<LeakageReport> {
        let tap = self.tap(id)?;
        if tap.kind != TapKind::EavesdropFifo {
            return Err(SocError::NotEavesdrop);
        }
        if tap.log.is_empty() {
            return Err(SocError::EmptyTapLog);
        }
        Ok(LeakageReport::new(observed_payload(tap.link, &tap.log), known))
    }

    pub fn write_trace_csv<W: io::Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.trace {
            w.serialize(TraceRow {
                cycle: r.cycle,
                link: r.link.name(),
                address: format!("{:08x}", r.txn.address),
                data: format!("{:08x}", r.txn.data),
                ns_attr: u8::from(r.txn.ns_attr),
                originator: r.txn.originator.name(),
            })?;
        }
        w.flush()
    }

    /// TrustZone predicate of a secure slave: the beat must be marked secure
    /// and its originator must belong to the secure world.
    fn permits(&self, txn: &BusTransaction) -> bool {
        if !self.config.trustzone_checks || !self.partition.is_secure(txn.address) {
            return true;
        }
        !txn.ns_attr && self.partition.world_of(txn.originator) == World::Secure
    }

    /// One bus beat: faults, tampering taps, slave predicate, slave access,
    /// trace, eavesdrop taps. Then the crypto IP controller is polled.
    fn transact(&mut self, originator: EndpointId, kind: TxnKind, address: u32, data: u32) -> Result<u32> {
        let link = Link::of_originator(originator);
        let cycle = self.cycle;
        self.cycle += 1;
        self.beats += 1;
        let mut txn = BusTransaction {
            address,
            data: if kind == TxnKind::Write { data } else { 0 },
            kind,
            ns_attr: self.partition.world_of(originator) == World::NonSecure,
            originator,
        };

        if kind == TxnKind::Write {
            for f in self.faults.iter_mut().filter(|f| f.link == link) {
                if f.remaining == 0 {
                    txn.data ^= f.mask;
                    f.mask = 0;
                } else {
                    f.remaining -= 1;
                }
            }
            self.faults.retain(|f| f.mask != 0);
        }

        let secure_target = self.partition.is_secure(address);
        for tap in self.taps.iter_mut() {
            if tap.link == link && tap.kind == TapKind::NsBitFlip && secure_target {
                txn.ns_attr = !txn.ns_attr;
                tap.log.push(cycle, txn);
            }
        }

        let result = match slave_at(address) {
            None => Err(SocError::Unmapped(address)),
            Some(_) if !self.permits(&txn) => {
                self.violations.push(Violation { cycle, link, txn });
                Err(SocError::AccessDenied { address, originator })
            }
            Some(slave) => {
                match slave {
                    EndpointId::CryptoIp => self.ip.access(&mut txn),
                    EndpointId::TargetIp => self.target.access(&mut txn),
                    EndpointId::NsIp => self.ns_ip.access(&mut txn),
                    EndpointId::Ta => unreachable!("the TA is not a slave"),
                }
                Ok(txn.data)
            }
        };

        if self.config.record_trace {
            self.trace.push(TraceRecord {
                cycle,
                link,
                txn,
                accepted: result.is_ok(),
            });
        }
        for tap in self.taps.iter_mut() {
            if tap.link == link && tap.kind == TapKind::EavesdropFifo {
                tap.log.push(cycle, txn);
            }
        }
        self.poll_ip();
        result
    }

    fn poll_ip(&mut self) {
        let Some(cmd) = self.ip.pending.take() else {
            return;
        };
        self.ip.last_cost = CipherCost::default();
        let result = match cmd {
            CMD_DELIVER => self.ip_deliver().map(|()| 0),
            CMD_READ => self.ip_prepare_read(),
            other => Err(SocError::Channel(ChannelError::Malformed(format!(
                "unknown command {other:#x}"
            )))),
        };
        self.ip.status = match &result {
            Ok(words) => *words as u32,
            Err(_) => STATUS_ERROR,
        };
        if let Err(e) = &result {
            log::debug!("crypto IP command {cmd} failed: {e}");
        }
        self.ip.last_result = Some(result.map(|_| ()));
    }

    /// Plaintext may only leave the crypto IP toward the secure target.
    fn check_target_span(&self, address: u32, len: usize) -> Result<()> {
        if !address.is_multiple_of(4) {
            return Err(SocError::Misaligned(address));
        }
        let window = AddrRange::sized(TARGET_BASE, TARGET_SIZE).expect("valid");
        if !window.contains_span(address, len) || !self.partition.span_in(World::Secure, address, len) {
            return Err(SocError::PartitionViolation { address, len });
        }
        Ok(())
    }

    fn charge(&mut self, cost: CipherCost) {
        self.ip.last_cost = cost;
        self.cycle += cost.total();
    }

    /// Controller: reassemble the buffered frame, check it, decrypt and
    /// verify, then write the plaintext out through the master interface.
    fn ip_deliver(&mut self) -> Result<()> {
        let words = std::mem::take(&mut self.ip.rx);
        let bytes = words_to_bytes(&words);
        let (_, _, flags, payload_len) = Frame::decode_header(&bytes)?;
        let tag_bytes = if flags.auth() {
            self.ip.session.config().tag_bytes()
        } else {
            0
        };
        let expected_words = Frame::word_count(payload_len as usize, tag_bytes);
        if expected_words != words.len() {
            return Err(ChannelError::Malformed(format!(
                "header implies {expected_words} words, {} received",
                words.len()
            ))
            .into());
        }
        let wire_len = FRAME_HEADER_LEN + payload_len as usize + tag_bytes;
        if bytes[wire_len..].iter().any(|&b| b != 0) {
            return Err(ChannelError::Malformed("nonzero padding".into()).into());
        }
        let frame = Frame::decode(&bytes[..wire_len])?;
        let address = self.ip.addr;
        self.check_target_span(address, frame.payload.len())?;
        let plaintext = if self.config.encryption {
            let (pt, cost) = self.ip.session.open_counted(&frame)?;
            self.charge(cost);
            pt
        } else {
            if !frame.flags.plaintext() {
                return Err(ChannelError::Malformed("encrypted frame with encryption off".into()).into());
            }
            frame.payload
        };
        self.master_write(address, &plaintext)
    }

    /// Whole words are written directly; a trailing partial word is merged
    /// with the target's current contents.
    fn master_write(&mut self, address: u32, data: &[u8]) -> Result<()> {
        for (i, chunk) in data.chunks(4).enumerate() {
            let a = address + 4 * i as u32;
            let word = if chunk.len() == 4 {
                u32::from_be_bytes(chunk.try_into().expect("4 bytes"))
            } else {
                let mut current = self
                    .transact(EndpointId::CryptoIp, TxnKind::Read, a, 0)?
                    .to_be_bytes();
                current[..chunk.len()].copy_from_slice(chunk);
                u32::from_be_bytes(current)
            };
            self.transact(EndpointId::CryptoIp, TxnKind::Write, a, word)?;
        }
        Ok(())
    }

    /// Controller: read plaintext from the target, seal it and queue the
    /// frame on the slave interface. Returns the frame's word count.
    fn ip_prepare_read(&mut self) -> Result<usize> {
        let address = self.ip.addr;
        let len = self.ip.len as usize;
        if len > MAX_PAYLOAD {
            return Err(ChannelError::PayloadTooLarge { len, max: MAX_PAYLOAD }.into());
        }
        self.check_target_span(address, len)?;
        let mut data = Vec::with_capacity(len + 3);
        for i in (0..len).step_by(4) {
            let w = self.transact(EndpointId::CryptoIp, TxnKind::Read, address + i as u32, 0)?;
            data.extend_from_slice(&w.to_be_bytes());
        }
        data.truncate(len);
        let frame = if self.config.encryption {
            let (frame, cost) = self.ip.session.seal_counted(&data)?;
            self.charge(cost);
            frame
        } else {
            let counter = self.ip.plain_counter;
            self.ip.plain_counter += 1;
            plain_frame(self.ip.session.id(), counter, Direction::IpToTa, data)
        };
        self.ip.tx = frame.to_words().into();
        Ok(self.ip.tx.len())
    }

    fn ta_write(&mut self, address: u32, data: u32) -> Result<u32> {
        self.transact(EndpointId::Ta, TxnKind::Write, address, data)
    }

    /// Sends `payload` to the start of the target IP.
    pub fn ta_send(&mut self, payload: &[u8]) -> Result<DeliveryReport> {
        self.ta_send_to(TARGET_BASE, payload)
    }

    /// Seals `payload`, streams the frame into the crypto IP and has it
    /// written to `address` in the target IP. Errors on the TA side are
    /// returned; anything that goes wrong in flight or inside the crypto IP
    /// is reported in the status.
    pub fn ta_send_to(&mut self, address: u32, payload: &[u8]) -> Result<DeliveryReport> {
        let start_cycle = self.cycle;
        let start_beats = self.beats;
        let (frame, ta_cost) = if self.config.encryption {
            self.ta.session.seal_counted(payload)?
        } else {
            if payload.len() > MAX_PAYLOAD {
                return Err(ChannelError::PayloadTooLarge {
                    len: payload.len(),
                    max: MAX_PAYLOAD,
                }
                .into());
            }
            let counter = self.ta.plain_counter;
            self.ta.plain_counter += 1;
            let frame = plain_frame(self.ta.session.id(), counter, Direction::TaToIp, payload.to_vec());
            (frame, CipherCost::default())
        };
        let words = frame.to_words();
        self.ip.last_result = None;
        self.ip.last_cost = CipherCost::default();

        let mut bus_error = None;
        let beats = [(REG_ADDR, address), (REG_LEN, payload.len() as u32)]
            .into_iter()
            .chain(words.iter().map(|&w| (REG_DATA_IN, w)))
            .chain([(REG_CMD, CMD_DELIVER)]);
        for (reg, value) in beats {
            if let Err(e) = self.ta_write(reg, value) {
                bus_error.get_or_insert(e);
            }
        }
        let ip_result = self.ip.last_result.take();
        let status = match (bus_error, ip_result) {
            (Some(e), _) => DeliveryStatus::Rejected(e),
            (None, Some(Err(e))) => DeliveryStatus::Rejected(e),
            (None, Some(Ok(()))) => DeliveryStatus::Delivered,
            (None, None) => DeliveryStatus::Rejected(SocError::Config("crypto IP did not run".into())),
        };
        let ip_cost = self.ip.last_cost;
        Ok(DeliveryReport {
            frame_words: words.len(),
            transfer_cycles: self.beats - start_beats,
            init_steps: ip_cost.init_steps,
            cipher_cycles: ip_cost.total(),
            ta_cost,
            ip_cost,
            start_cycle,
            end_cycle: self.cycle,
            status,
        })
    }

    /// Reads `len` bytes of the target IP at `address` through the crypto IP.
    /// The address and length travel in clear command registers; the data
    /// comes back as a sealed frame.
    pub fn ta_read(&mut self, address: u32, len: usize) -> Result<ReadReport> {
        let start_beats = self.beats;
        self.ip.last_result = None;
        self.ip.last_cost = CipherCost::default();
        let len32 = u32::try_from(len).map_err(|_| ChannelError::PayloadTooLarge { len, max: MAX_PAYLOAD })?;
        self.ta_write(REG_ADDR, address)?;
        self.ta_write(REG_LEN, len32)?;
        self.ta_write(REG_CMD, CMD_READ)?;
        match self.ip.last_result.take() {
            Some(Ok(())) => {}
            Some(Err(e)) => return Err(e),
            None => return Err(SocError::Config("crypto IP did not run".into())),
        }
        let n = self.transact(EndpointId::Ta, TxnKind::Read, REG_STATUS, 0)?;
        let mut words = Vec::with_capacity(n as usize);
        for _ in 0..n {
            words.push(self.transact(EndpointId::Ta, TxnKind::Read, REG_DATA_OUT, 0)?);
        }
        let bytes = words_to_bytes(&words);
        let tag_bytes = if self.config.encryption {
            self.ta.session.config().tag_bytes()
        } else {
            0
        };
        let wire_len = FRAME_HEADER_LEN + len + tag_bytes;
        if bytes.len() < wire_len {
            return Err(ChannelError::Malformed(format!(
                "response of {} bytes, expected {wire_len}",
                bytes.len()
            ))
            .into());
        }
        let frame = Frame::decode(&bytes[..wire_len])?;
        let (data, ta_cost) = if self.config.encryption {
            self.ta.session.open_counted(&frame)?
        } else {
            if !frame.flags.plaintext() {
                return Err(ChannelError::Malformed("encrypted frame with encryption off".into()).into());
            }
            (frame.payload, CipherCost::default())
        };
        let ip_cost = self.ip.last_cost;
        Ok(ReadReport {
            data,
            frame_words: words.len(),
            transfer_cycles: self.beats - start_beats,
            init_steps: ip_cost.init_steps,
            cipher_cycles: ip_cost.total(),
            ta_cost,
            ip_cost,
        })
    }

    /// A read by the non-secure IP.
    pub fn ns_read(&mut self, address: u32) -> Result<u32> {
        self.transact(EndpointId::NsIp, TxnKind::Read, address, 0)
    }

    /// A write by the non-secure IP.
    pub fn ns_write(&mut self, address: u32, data: u32) -> Result<()> {
        self.transact(EndpointId::NsIp, TxnKind::Write, address, data).map(|_| ())
    }
}

fn plain_frame(session_id: u16, counter: u64, direction: Direction, payload: Vec<u8>) -> Frame {
    Frame {
        session_id,
        msg_counter: counter,
        flags: FrameFlags::new(direction, false, true),
        payload,
        tag: None,
    }
}
