//! Encrypted TA-to-hardware channel for a TrustZone-partitioned SoC.
//!
//! * [`cipher`]: bit-exact Trivium and Grain-128a with 1/8/16/32-bit output
//!   rates and Grain-128a's optional MAC.
//! * [`channel`]: sessions, counter-derived IVs and frame sealing/opening.
//! * [`soc`]: deterministic word-level bus simulator with TrustZone checks
//!   and Trojan taps.
//! * [`bench`]: step-count and throughput measurements, KAT checking.

pub mod cipher;
pub mod channel;
pub mod soc;
pub mod bench;
