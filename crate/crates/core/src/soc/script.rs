//! Line-oriented stimulus scripts.
//!
//! ```text
//! # comment
//! set cipher grain128a radix 8 auth 16
//! set encryption on
//! attach eavesdrop_fifo ta-ip
//! send 48656c6c6f
//! read 0xa0000000 5
//! ```

use super::sim::{DeliveryReport, ReadReport, Simulator};
use super::tap::{TapId, TapKind};
use super::{Link, Result, SocError};
use crate::cipher::{CipherKind, Radix, TagLen};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Send(Vec<u8>),
    Read { address: u32, len: usize },
    Attach { kind: TapKind, link: Link },
    SetCipher {
        cipher: CipherKind,
        radix: Radix,
        tag_len: Option<TagLen>,
    },
    SetEncryption(bool),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptOutcome {
    Sent(DeliveryReport),
    Read(std::result::Result<ReadReport, SocError>),
    Attached(TapId),
    Configured,
}

fn number(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("bad number {s:?}: {e}"))
}

fn parse_line(words: &[&str]) -> std::result::Result<Command, String> {
    match words {
        ["send"] => Ok(Command::Send(Vec::new())),
        ["send", payload] => hex::decode(payload)
            .map(Command::Send)
            .map_err(|e| format!("bad hex payload: {e}")),
        ["read", address, len] => {
            let address = u32::try_from(number(address)?).map_err(|_| "address exceeds 32 bits")?;
            let len = usize::try_from(number(len)?).map_err(|_| "length too large")?;
            Ok(Command::Read { address, len })
        }
        ["attach", kind, link] => Ok(Command::Attach {
            kind: kind.parse().map_err(|e: SocError| e.to_string())?,
            link: link.parse().map_err(|e: SocError| e.to_string())?,
        }),
        ["set", "encryption", "on"] => Ok(Command::SetEncryption(true)),
        ["set", "encryption", "off"] => Ok(Command::SetEncryption(false)),
        ["set", "cipher", name, "radix", r, rest @ ..] => {
            let mut cipher: CipherKind = name.parse().map_err(|e: crate::cipher::CipherError| e.to_string())?;
            let radix: Radix = r.parse().map_err(|e: crate::cipher::CipherError| e.to_string())?;
            let tag_len = match rest {
                [] => None,
                ["auth", w] => {
                    let w = u32::try_from(number(w)?).map_err(|_| "tag length too large")?;
                    let w = TagLen::new(w).map_err(|e| e.to_string())?;
                    cipher = match cipher {
                        CipherKind::Grain128a | CipherKind::Grain128aAuth => CipherKind::Grain128aAuth,
                        CipherKind::Trivium => return Err("trivium has no authentication mode".into()),
                    };
                    Some(w)
                }
                _ => return Err("expected `auth <w>` after the radix".into()),
            };
            let tag_len = tag_len.or(cipher.is_authenticated().then_some(TagLen::MAX));
            Ok(Command::SetCipher { cipher, radix, tag_len })
        }
        [cmd, ..] => Err(format!("unrecognized command {cmd:?}")),
        [] => unreachable!("blank lines are skipped"),
    }
}

/// Parses a script into (line number, command) pairs. Blank lines and `#`
/// comments are skipped.
pub fn parse_script(text: &str) -> Result<Vec<(usize, Command)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let cmd = parse_line(&words).map_err(|message| SocError::Script { line: i + 1, message })?;
        out.push((i + 1, cmd));
    }
    Ok(out)
}

impl Simulator {
    /// Runs a parsed script. Failed reads are recorded as outcomes; TA-side
    /// and configuration errors stop the script.
    pub fn run_commands(&mut self, commands: &[(usize, Command)]) -> Result<Vec<ScriptOutcome>> {
        let mut out = Vec::with_capacity(commands.len());
        for (line, cmd) in commands {
            let wrap = |e: SocError| SocError::Script {
                line: *line,
                message: e.to_string(),
            };
            let outcome = match cmd {
                Command::Send(payload) => ScriptOutcome::Sent(self.ta_send(payload).map_err(wrap)?),
                Command::Read { address, len } => ScriptOutcome::Read(self.ta_read(*address, *len)),
                Command::Attach { kind, link } => ScriptOutcome::Attached(self.attach_tap(*kind, *link)),
                Command::SetCipher { cipher, radix, tag_len } => {
                    self.set_cipher(*cipher, *radix, *tag_len).map_err(wrap)?;
                    ScriptOutcome::Configured
                }
                Command::SetEncryption(on) => {
                    self.set_encryption(*on);
                    ScriptOutcome::Configured
                }
            };
            out.push(outcome);
        }
        Ok(out)
    }

    pub fn run_script(&mut self, text: &str) -> Result<Vec<ScriptOutcome>> {
        let commands = parse_script(text)?;
        self.run_commands(&commands)
    }
}
