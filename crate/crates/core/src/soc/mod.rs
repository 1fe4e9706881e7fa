//! Word-level model of the SoC interconnect between the secure-world TA, the
//! crypto IP, the secure target IP and a non-secure IP.
//!
//! Every bus beat is a single 32-bit [`BusTransaction`] and costs one cycle.
//! Secure slaves apply a TrustZone predicate to each beat; Trojan taps can be
//! attached to any of the three links to copy or tamper with traffic.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::channel::ChannelError;

mod partition;
mod script;
mod sim;
mod tap;

pub use partition::{AddrRange, WorldPartition};
pub use script::{parse_script, Command, ScriptOutcome};
pub use tap::monobit;
pub use sim::{
    build_soc, DeliveryReport, DeliveryStatus, ReadReport, SimConfig, Simulator, TraceRecord,
    Violation, CRYPTO_IP_BASE, CRYPTO_IP_SIZE, NS_IP_BASE, NS_IP_SIZE, TARGET_BASE, TARGET_SIZE,
};
pub use tap::{LeakageReport, TapId, TapKind, TapLog, TrojanTap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SocError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("partition violation: {len} bytes at {address:#010x} are not in the secure target range")]
    PartitionViolation { address: u32, len: usize },
    #[error("{originator} access to {address:#010x} rejected by the secure slave")]
    AccessDenied { address: u32, originator: EndpointId },
    #[error("no slave mapped at {0:#010x}")]
    Unmapped(u32),
    #[error("address {0:#010x} is not word aligned")]
    Misaligned(u32),
    #[error("unknown attach point {0:?}")]
    UnknownAttachPoint(String),
    #[error("unknown tap kind {0:?}")]
    UnknownTapKind(String),
    #[error("no tap with id {0}")]
    UnknownTap(usize),
    #[error("leakage analysis needs an eavesdrop tap")]
    NotEavesdrop,
    #[error("tap log is empty")]
    EmptyTapLog,
    #[error("script line {line}: {message}")]
    Script { line: usize, message: String },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

pub type Result<T> = std::result::Result<T, SocError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EndpointId {
    Ta,
    CryptoIp,
    TargetIp,
    NsIp,
}

impl EndpointId {
    pub const ALL: [EndpointId; 4] = [
        EndpointId::Ta,
        EndpointId::CryptoIp,
        EndpointId::TargetIp,
        EndpointId::NsIp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EndpointId::Ta => "ta",
            EndpointId::CryptoIp => "crypto-ip",
            EndpointId::TargetIp => "target-ip",
            EndpointId::NsIp => "ns-ip",
        }
    }
}

impl fmt::Display for EndpointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum World {
    Secure,
    NonSecure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TxnKind {
    Read,
    Write,
}

/// One bus beat. For reads, `data` holds the value returned by the slave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BusTransaction {
    pub address: u32,
    pub data: u32,
    pub kind: TxnKind,
    /// Non-secure when true.
    pub ns_attr: bool,
    pub originator: EndpointId,
}

/// Interconnect links a tap can sit on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Link {
    /// TA <-> crypto IP slave interface.
    TaIp,
    /// Crypto IP master interface <-> target IP.
    IpTarget,
    /// Non-secure IP port into the interconnect.
    NsPort,
}

impl Link {
    pub const ALL: [Link; 3] = [Link::TaIp, Link::IpTarget, Link::NsPort];

    pub fn name(self) -> &'static str {
        match self {
            Link::TaIp => "ta-ip",
            Link::IpTarget => "ip-target",
            Link::NsPort => "ns-port",
        }
    }

    /// The link a master's transactions enter the interconnect through.
    pub fn of_originator(originator: EndpointId) -> Link {
        match originator {
            EndpointId::Ta => Link::TaIp,
            EndpointId::CryptoIp | EndpointId::TargetIp => Link::IpTarget,
            EndpointId::NsIp => Link::NsPort,
        }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Link {
    type Err = SocError;

    fn from_str(s: &str) -> Result<Self> {
        Link::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| SocError::UnknownAttachPoint(s.to_string()))
    }
}
