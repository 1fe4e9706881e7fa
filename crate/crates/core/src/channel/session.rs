use std::fmt;

use super::frame::{Frame, FrameFlags};
use super::iv::{derive_iv, MAX_COUNTER};
use super::{ChannelError, Direction, Result};
use crate::cipher::{CipherKind, CipherState, Radix, Tag, TagLen};

/// Largest payload per frame: 2^28 bytes keeps every frame under the 2^32-bit
/// keystream cap even in authenticated mode.
pub const MAX_PAYLOAD: usize = 1 << 28;

/// Pre-shared key, zeroed when dropped or replaced.
#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey(Vec<u8>);

impl SecretKey {
    pub fn new(bytes: &[u8]) -> Self {
        SecretKey(bytes.to_vec())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn bits(&self) -> usize {
        self.0.len() * 8
    }

    fn wipe(&mut self) {
        self.0.fill(0);
        std::sync::atomic::compiler_fence(std::sync::atomic::Ordering::SeqCst);
    }
}

impl Drop for SecretKey {
    fn drop(&mut self) {
        self.wipe();
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SecretKey({} bits)", self.bits())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Trusted application in the secure-world OS.
    Ta,
    /// Crypto IP controller in the secure hardware partition.
    CryptoIp,
}

impl Role {
    pub fn send_direction(self) -> Direction {
        match self {
            Role::Ta => Direction::TaToIp,
            Role::CryptoIp => Direction::IpToTa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionConfig {
    pub session_id: u16,
    pub cipher: CipherKind,
    pub radix: Radix,
    pub tag_len: Option<TagLen>,
}

impl SessionConfig {
    pub fn new(session_id: u16, cipher: CipherKind, radix: Radix) -> Self {
        let tag_len = cipher.is_authenticated().then_some(TagLen::MAX);
        SessionConfig {
            session_id,
            cipher,
            radix,
            tag_len,
        }
    }

    pub fn with_tag_len(mut self, tag_len: TagLen) -> Self {
        self.tag_len = Some(tag_len);
        self
    }

    pub fn tag_bytes(&self) -> usize {
        self.tag_len.map_or(0, TagLen::bytes)
    }
}

/// Cipher work done for one frame, in steps at the session radix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CipherCost {
    pub init_steps: u64,
    pub preload_steps: u64,
    pub stream_steps: u64,
}

impl CipherCost {
    pub fn total(&self) -> u64 {
        self.init_steps + self.preload_steps + self.stream_steps
    }
}

/// One endpoint's view of a TA <-> crypto IP session.
#[derive(Debug, Clone)]
pub struct ChannelSession {
    config: SessionConfig,
    role: Role,
    key: SecretKey,
    send_counter: u64,
    recv_counter: u64,
}

impl ChannelSession {
    pub fn open(config: SessionConfig, key: &[u8], role: Role) -> Result<Self> {
        check_key(config.cipher, key)?;
        match (config.cipher.is_authenticated(), config.tag_len) {
            (true, None) => return Err(crate::cipher::CipherError::InvalidTagLength(0).into()),
            (false, Some(_)) => {
                return Err(crate::cipher::CipherError::NotAuthenticated("a tag length").into())
            }
            _ => {}
        }
        Ok(ChannelSession {
            config,
            role,
            key: SecretKey::new(key),
            send_counter: 0,
            recv_counter: 0,
        })
    }

    /// Both endpoints of a session sharing `key`.
    pub fn pair(config: SessionConfig, key: &[u8]) -> Result<(ChannelSession, ChannelSession)> {
        Ok((
            ChannelSession::open(config, key, Role::Ta)?,
            ChannelSession::open(config, key, Role::CryptoIp)?,
        ))
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn id(&self) -> u16 {
        self.config.session_id
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn send_counter(&self) -> u64 {
        self.send_counter
    }

    pub fn recv_counter(&self) -> u64 {
        self.recv_counter
    }

    pub fn key(&self) -> &SecretKey {
        &self.key
    }

    /// IV this session's key uses for (`counter`, `direction`).
    pub fn iv_for(&self, counter: u64, direction: Direction) -> Result<Vec<u8>> {
        derive_iv(self.config.cipher, counter, direction)
    }

    fn cipher_for(&self, counter: u64, direction: Direction) -> Result<(CipherState, CipherCost)> {
        let iv = self.iv_for(counter, direction)?;
        let mut state = CipherState::load(self.config.cipher, self.key.as_bytes(), &iv, self.config.tag_len)?;
        let init = state.init(self.config.radix);
        Ok((
            state,
            CipherCost {
                init_steps: init.steps,
                preload_steps: init.preload_steps,
                stream_steps: 0,
            },
        ))
    }

    pub fn seal(&mut self, plaintext: &[u8]) -> Result<Frame> {
        self.seal_counted(plaintext).map(|(frame, _)| frame)
    }

    /// Seals under a fresh (key, IV) and consumes one counter value.
    pub fn seal_counted(&mut self, plaintext: &[u8]) -> Result<(Frame, CipherCost)> {
        if self.send_counter > MAX_COUNTER {
            return Err(ChannelError::SessionExhausted);
        }
        if plaintext.len() > MAX_PAYLOAD {
            return Err(ChannelError::PayloadTooLarge {
                len: plaintext.len(),
                max: MAX_PAYLOAD,
            });
        }
        let direction = self.role.send_direction();
        let counter = self.send_counter;
        let (mut state, mut cost) = self.cipher_for(counter, direction)?;
        let mut payload = plaintext.to_vec();
        state.encrypt(self.config.radix, &mut payload)?;
        cost.stream_steps = state.stream_steps();
        let tag = match self.config.tag_len {
            Some(_) => Some(state.finalize_tag()?.to_bytes()),
            None => None,
        };
        self.send_counter += 1;
        Ok((
            Frame {
                session_id: self.config.session_id,
                msg_counter: counter,
                flags: FrameFlags::new(direction, tag.is_some(), false),
                payload,
                tag,
            },
            cost,
        ))
    }

    pub fn open_frame(&mut self, frame: &Frame) -> Result<Vec<u8>> {
        self.open_counted(frame).map(|(pt, _)| pt)
    }

    /// Checks routing and freshness, decrypts, and verifies the tag before
    /// returning anything. The receive counter only moves on success.
    pub fn open_counted(&mut self, frame: &Frame) -> Result<(Vec<u8>, CipherCost)> {
        if frame.session_id != self.config.session_id {
            return Err(ChannelError::Routing {
                expected: self.config.session_id,
                got: frame.session_id,
            });
        }
        let expected_dir = self.role.send_direction().reverse();
        if frame.direction() != expected_dir {
            return Err(ChannelError::WrongDirection {
                expected: expected_dir,
                got: frame.direction(),
            });
        }
        if frame.flags.plaintext() {
            return Err(ChannelError::Malformed("plaintext frame on an encrypted session".into()));
        }
        if frame.flags.auth() != self.config.tag_len.is_some() {
            return Err(ChannelError::Malformed("AUTH flag does not match session mode".into()));
        }
        if frame.msg_counter < self.recv_counter {
            return Err(ChannelError::Replay {
                counter: frame.msg_counter,
                expected: self.recv_counter,
            });
        }
        if frame.payload.len() > MAX_PAYLOAD {
            return Err(ChannelError::PayloadTooLarge {
                len: frame.payload.len(),
                max: MAX_PAYLOAD,
            });
        }
        let expected_tag = match (self.config.tag_len, &frame.tag) {
            (Some(w), Some(bytes)) => Some(
                Tag::from_bytes(bytes, w).map_err(|_| ChannelError::AuthenticationFailed)?,
            ),
            (None, None) => None,
            _ => return Err(ChannelError::Malformed("tag presence does not match session mode".into())),
        };

        let (mut state, mut cost) = self.cipher_for(frame.msg_counter, expected_dir)?;
        let mut plaintext = frame.payload.clone();
        state.decrypt(self.config.radix, &mut plaintext)?;
        cost.stream_steps = state.stream_steps();
        if let Some(expected) = expected_tag {
            let actual = state.finalize_tag()?;
            // compare every bit regardless of where the first difference is
            if (actual.bits() ^ expected.bits()) != 0 {
                plaintext.iter_mut().for_each(|b| *b = 0);
                return Err(ChannelError::AuthenticationFailed);
            }
        }
        self.recv_counter = frame.msg_counter + 1;
        Ok((plaintext, cost))
    }

    /// Replaces the key and restarts both counters at 0.
    pub fn rekey(&mut self, new_key: &[u8]) -> Result<()> {
        check_key(self.config.cipher, new_key)?;
        self.key = SecretKey::new(new_key);
        self.send_counter = 0;
        self.recv_counter = 0;
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn set_send_counter(&mut self, value: u64) {
        self.send_counter = value;
    }
}

fn check_key(cipher: CipherKind, key: &[u8]) -> Result<()> {
    let expected = cipher.params().key_bits;
    if key.len() * 8 != expected {
        return Err(ChannelError::KeySize {
            expected,
            actual: key.len() * 8,
        });
    }
    Ok(())
}
