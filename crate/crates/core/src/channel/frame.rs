use super::{ChannelError, Direction, Result};

/// session_id (2) + msg_counter (8) + flags (1) + payload_len (4).
pub const FRAME_HEADER_LEN: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameFlags(u8);

impl FrameFlags {
    pub const AUTH: u8 = 0x01;
    pub const IP_TO_TA: u8 = 0x02;
    /// Baseline frames carrying unencrypted payload.
    pub const PLAINTEXT: u8 = 0x04;
    const KNOWN: u8 = Self::AUTH | Self::IP_TO_TA | Self::PLAINTEXT;

    pub fn new(direction: Direction, auth: bool, plaintext: bool) -> Self {
        let mut v = 0;
        if auth {
            v |= Self::AUTH;
        }
        if direction == Direction::IpToTa {
            v |= Self::IP_TO_TA;
        }
        if plaintext {
            v |= Self::PLAINTEXT;
        }
        FrameFlags(v)
    }

    pub fn from_bits(bits: u8) -> Result<Self> {
        if bits & !Self::KNOWN != 0 {
            return Err(ChannelError::Malformed(format!("unknown flag bits {bits:#04x}")));
        }
        Ok(FrameFlags(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn auth(self) -> bool {
        self.0 & Self::AUTH != 0
    }

    pub fn plaintext(self) -> bool {
        self.0 & Self::PLAINTEXT != 0
    }

    pub fn direction(self) -> Direction {
        if self.0 & Self::IP_TO_TA != 0 {
            Direction::IpToTa
        } else {
            Direction::TaToIp
        }
    }
}

/// Wire layout, all integers big-endian:
///
/// ```text
/// session_id: u16 | msg_counter: u64 | flags: u8 | payload_len: u32 | payload | tag
/// ```
///
/// The tag is present iff the `AUTH` flag is set and runs to the end of the
/// frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub session_id: u16,
    pub msg_counter: u64,
    pub flags: FrameFlags,
    pub payload: Vec<u8>,
    pub tag: Option<Vec<u8>>,
}

impl Frame {
    pub fn payload_len(&self) -> u32 {
        self.payload.len() as u32
    }

    pub fn direction(&self) -> Direction {
        self.flags.direction()
    }

    pub fn wire_len(&self) -> usize {
        FRAME_HEADER_LEN + self.payload.len() + self.tag.as_ref().map_or(0, Vec::len)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.wire_len());
        out.extend_from_slice(&self.session_id.to_be_bytes());
        out.extend_from_slice(&self.msg_counter.to_be_bytes());
        out.push(self.flags.bits());
        out.extend_from_slice(&self.payload_len().to_be_bytes());
        out.extend_from_slice(&self.payload);
        if let Some(tag) = &self.tag {
            out.extend_from_slice(tag);
        }
        out
    }

    /// Parses just the header: (session_id, msg_counter, flags, payload_len).
    pub fn decode_header(bytes: &[u8]) -> Result<(u16, u64, FrameFlags, u32)> {
        if bytes.len() < FRAME_HEADER_LEN {
            return Err(ChannelError::Malformed(format!(
                "{} bytes is shorter than the {FRAME_HEADER_LEN}-byte header",
                bytes.len()
            )));
        }
        let session_id = u16::from_be_bytes([bytes[0], bytes[1]]);
        let msg_counter = u64::from_be_bytes(bytes[2..10].try_into().expect("8 bytes"));
        let flags = FrameFlags::from_bits(bytes[10])?;
        let payload_len = u32::from_be_bytes(bytes[11..15].try_into().expect("4 bytes"));
        Ok((session_id, msg_counter, flags, payload_len))
    }

    pub fn decode(bytes: &[u8]) -> Result<Frame> {
        let (session_id, msg_counter, flags, payload_len) = Self::decode_header(bytes)?;
        let body = &bytes[FRAME_HEADER_LEN..];
        let len = payload_len as usize;
        if body.len() < len {
            return Err(ChannelError::Malformed(format!(
                "payload_len {len} but only {} bytes follow the header",
                body.len()
            )));
        }
        let (payload, rest) = body.split_at(len);
        let tag = match (flags.auth(), rest.is_empty()) {
            (true, true) => return Err(ChannelError::Malformed("AUTH flag set but no tag".into())),
            (true, false) => Some(rest.to_vec()),
            (false, true) => None,
            (false, false) => {
                return Err(ChannelError::Malformed(format!("{} trailing bytes", rest.len())))
            }
        };
        Ok(Frame {
            session_id,
            msg_counter,
            flags,
            payload: payload.to_vec(),
            tag,
        })
    }

    /// Big-endian 32-bit words, last word zero-padded.
    pub fn to_words(&self) -> Vec<u32> {
        self.encode()
            .chunks(4)
            .map(|c| {
                let mut w = [0u8; 4];
                w[..c.len()].copy_from_slice(c);
                u32::from_be_bytes(w)
            })
            .collect()
    }

    /// Bus words a frame occupies, given its payload and tag sizes.
    pub fn word_count(payload_len: usize, tag_bytes: usize) -> usize {
        (FRAME_HEADER_LEN + payload_len + tag_bytes).div_ceil(4)
    }
}

pub(crate) fn words_to_bytes(words: &[u32]) -> Vec<u8> {
    words.iter().flat_map(|w| w.to_be_bytes()).collect()
}
