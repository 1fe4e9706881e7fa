use std::collections::BTreeMap;

use super::{EndpointId, Result, SocError, World};

/// Inclusive address range `[start, last]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AddrRange {
    start: u32,
    last: u32,
}

impl AddrRange {
    pub fn new(start: u32, last: u32) -> Result<Self> {
        if last < start {
            return Err(SocError::Config(format!(
                "range end {last:#010x} precedes start {start:#010x}"
            )));
        }
        Ok(AddrRange { start, last })
    }

    /// `size` bytes starting at `start`; `size` must be non-zero and fit.
    pub fn sized(start: u32, size: u32) -> Result<Self> {
        let last = size
            .checked_sub(1)
            .and_then(|s| start.checked_add(s))
            .ok_or_else(|| SocError::Config(format!("bad range {start:#010x}+{size:#x}")))?;
        AddrRange::new(start, last)
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn last(&self) -> u32 {
        self.last
    }

    pub fn contains(&self, address: u32) -> bool {
        (self.start..=self.last).contains(&address)
    }

    /// Whether all of `len` bytes from `address` fall inside. An empty span
    /// is inside iff its address is.
    pub fn contains_span(&self, address: u32, len: usize) -> bool {
        if !self.contains(address) {
            return false;
        }
        len == 0 || (u64::from(address) + len as u64 - 1) <= u64::from(self.last)
    }

    pub fn overlaps(&self, other: &AddrRange) -> bool {
        self.start <= other.last && other.start <= self.last
    }
}

/// Secure and non-secure address ranges plus the world each endpoint lives in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldPartition {
    secure: Vec<AddrRange>,
    non_secure: Vec<AddrRange>,
    worlds: BTreeMap<EndpointId, World>,
}

impl WorldPartition {
    /// Validates that no two ranges overlap and every endpoint has a world.
    pub fn new(
        secure: Vec<AddrRange>,
        non_secure: Vec<AddrRange>,
        worlds: BTreeMap<EndpointId, World>,
    ) -> Result<Self> {
        let all: Vec<&AddrRange> = secure.iter().chain(&non_secure).collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                if a.overlaps(b) {
                    return Err(SocError::Config(format!(
                        "ranges {:#010x}..={:#010x} and {:#010x}..={:#010x} overlap",
                        a.start, a.last, b.start, b.last
                    )));
                }
            }
        }
        if let Some(missing) = EndpointId::ALL.iter().find(|e| !worlds.contains_key(e)) {
            return Err(SocError::Config(format!("endpoint {missing} has no world")));
        }
        Ok(WorldPartition {
            secure,
            non_secure,
            worlds,
        })
    }

    pub fn secure_ranges(&self) -> &[AddrRange] {
        &self.secure
    }

    pub fn non_secure_ranges(&self) -> &[AddrRange] {
        &self.non_secure
    }

    pub fn world_of_address(&self, address: u32) -> Option<World> {
        if self.secure.iter().any(|r| r.contains(address)) {
            Some(World::Secure)
        } else if self.non_secure.iter().any(|r| r.contains(address)) {
            Some(World::NonSecure)
        } else {
            None
        }
    }

    pub fn world_of(&self, endpoint: EndpointId) -> World {
        self.worlds[&endpoint]
    }

    pub fn is_secure(&self, address: u32) -> bool {
        self.world_of_address(address) == Some(World::Secure)
    }

    /// Whether a span lies entirely inside one range of `world`.
    pub fn span_in(&self, world: World, address: u32, len: usize) -> bool {
        let ranges = match world {
            World::Secure => &self.secure,
            World::NonSecure => &self.non_secure,
        };
        ranges.iter().any(|r| r.contains_span(address, len))
    }
}

impl Default for WorldPartition {
    /// Secure world in the upper half of the address space, non-secure in the
    /// lower half. Only the non-secure IP is a non-secure endpoint.
    fn default() -> Self {
        let worlds = EndpointId::ALL
            .into_iter()
            .map(|e| {
                let w = if e == EndpointId::NsIp {
                    World::NonSecure
                } else {
                    World::Secure
                };
                (e, w)
            })
            .collect();
        WorldPartition::new(
            vec![AddrRange::new(0x8000_0000, 0xffff_ffff).expect("valid")],
            vec![AddrRange::new(0x0000_0000, 0x7fff_ffff).expect("valid")],
            worlds,
        )
        .expect("default partition is well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        let p = WorldPartition::default();
        assert!(p.is_secure(0xa000_0000));
        assert_eq!(p.world_of_address(0x1000_0000), Some(World::NonSecure));
        assert_eq!(p.world_of(EndpointId::NsIp), World::NonSecure);
        assert_eq!(p.world_of(EndpointId::CryptoIp), World::Secure);
    }

    #[test]
    fn overlap_rejected() {
        let worlds = WorldPartition::default().worlds;
        let err = WorldPartition::new(
            vec![AddrRange::new(0x8000_0000, 0xffff_ffff).unwrap()],
            vec![AddrRange::new(0x0000_0000, 0x8000_0000).unwrap()],
            worlds,
        );
        assert!(matches!(err, Err(SocError::Config(_))));
    }

    #[test]
    fn overlap_within_one_world_rejected() {
        let worlds = WorldPartition::default().worlds;
        let err = WorldPartition::new(
            vec![
                AddrRange::sized(0x8000_0000, 0x100).unwrap(),
                AddrRange::sized(0x8000_00f0, 0x100).unwrap(),
            ],
            vec![],
            worlds,
        );
        assert!(err.is_err());
    }

    #[test]
    fn missing_world_rejected() {
        let mut worlds = WorldPartition::default().worlds;
        worlds.remove(&EndpointId::TargetIp);
        assert!(WorldPartition::new(vec![], vec![], worlds).is_err());
    }

    #[test]
    fn spans() {
        let r = AddrRange::sized(0x100, 0x10).unwrap();
        assert_eq!(r.last(), 0x10f);
        assert!(r.contains_span(0x100, 16));
        assert!(!r.contains_span(0x100, 17));
        assert!(r.contains_span(0x10f, 0));
        assert!(!r.contains_span(0x110, 0));
        assert!(AddrRange::sized(0xffff_fff0, 0x20).is_err());
        assert!(AddrRange::sized(0, 0).is_err());
    }
}
