//! Byte-counting simulated network.

use crate::codec::Encoded;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Party {
    Client,
    EvidenceService,
    Shareholder(u8),
    TimestampService,
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Client => write!(f, "client"),
            Party::EvidenceService => write!(f, "es"),
            Party::Shareholder(x) => write!(f, "sh{x}"),
            Party::TimestampService => write!(f, "ts"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Channel {
    Authenticated,
    Private,
}

impl Channel {
    pub fn between(a: Party, b: Party) -> Channel {
        use Party::*;
        match (a, b) {
            (Shareholder(_), _) | (_, Shareholder(_)) => Channel::Private,
            _ => Channel::Authenticated,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MsgKind {
    EsRead,
    EsReadReply,
    EsWrite,
    StampRequest,
    StampReply,
    ShRead,
    ShReadReply,
    ShWrite,
    ReshareDeal,
}

impl fmt::Display for MsgKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counter {
    pub messages: u64,
    pub bytes: u64,
}

impl Counter {
    fn add(&mut self, bytes: usize) {
        self.messages += 1;
        self.bytes += bytes as u64;
    }
}

/// A captured message, kept only while capture is on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Captured {
    pub from: Party,
    pub to: Party,
    pub kind: MsgKind,
    pub payload: Encoded,
}

#[derive(Clone, Debug, Default)]
pub struct NetLedger {
    pairs: BTreeMap<(Party, Party, MsgKind), Counter>,
    capture: Option<Vec<Captured>>,
}

impl NetLedger {
    pub fn send(&mut self, from: Party, to: Party, kind: MsgKind, payload: &Encoded) {
        self.pairs.entry((from, to, kind)).or_default().add(payload.len());
        if let Some(buf) = self.capture.as_mut() {
            buf.push(Captured { from, to, kind, payload: payload.clone() });
        }
    }

    /// Counts a message of `len` encoded bytes without materializing it.
    /// Only valid while capture is off.
    pub(crate) fn count(&mut self, from: Party, to: Party, kind: MsgKind, len: usize) {
        debug_assert!(self.capture.is_none());
        self.pairs.entry((from, to, kind)).or_default().add(len);
    }

    pub fn start_capture(&mut self) {
        self.capture = Some(Vec::new());
    }

    /// Stops capturing and returns what was recorded.
    pub fn take_capture(&mut self) -> Vec<Captured> {
        self.capture.take().unwrap_or_default()
    }

    pub fn is_capturing(&self) -> bool {
        self.capture.is_some()
    }

    /// Totals over all messages matching the predicate.
    pub fn total(&self, pred: impl Fn(Party, Party, MsgKind) -> bool) -> Counter {
        let mut c = Counter::default();
        for (&(f, t, k), v) in &self.pairs {
            if pred(f, t, k) {
                c.messages += v.messages;
                c.bytes += v.bytes;
            }
        }
        c
    }

    /// Bytes sent or received by `p`.
    pub fn party_bytes(&self, p: Party) -> u64 {
        self.total(|f, t, _| f == p || t == p).bytes
    }

    pub fn kind_totals(&self) -> BTreeMap<MsgKind, Counter> {
        let mut out: BTreeMap<MsgKind, Counter> = BTreeMap::new();
        for (&(_, _, k), v) in &self.pairs {
            let e = out.entry(k).or_default();
            e.messages += v.messages;
            e.bytes += v.bytes;
        }
        out
    }

    pub fn rows(&self) -> impl Iterator<Item = (&(Party, Party, MsgKind), &Counter)> {
        self.pairs.iter()
    }

    /// One row per (from, to, kind): `from,to,channel,kind,messages,bytes`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("from,to,channel,kind,messages,bytes\n");
        for (&(f, t, k), v) in &self.pairs {
            let ch = match Channel::between(f, t) {
                Channel::Authenticated => "authenticated",
                Channel::Private => "private",
            };
            s.push_str(&format!("{f},{t},{ch},{k},{},{}\n", v.messages, v.bytes));
        }
        s
    }

    /// Rebuilds counters from [`NetLedger::to_csv`] output.
    pub fn from_csv(s: &str) -> Option<NetLedger> {
        let mut led = NetLedger::default();
        for line in s.lines().skip(1).filter(|l| !l.is_empty()) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return None;
            }
            let key = (parse_party(cols[0])?, parse_party(cols[1])?, parse_kind(cols[3])?);
            let c = Counter { messages: cols[4].parse().ok()?, bytes: cols[5].parse().ok()? };
            led.pairs.insert(key, c);
        }
        Some(led)
    }
}

fn parse_party(s: &str) -> Option<Party> {
    Some(match s {
        "client" => Party::Client,
        "es" => Party::EvidenceService,
        "ts" => Party::TimestampService,
        _ => Party::Shareholder(s.strip_prefix("sh")?.parse().ok()?),
    })
}

fn parse_kind(s: &str) -> Option<MsgKind> {
    use MsgKind::*;
    [EsRead, EsReadReply, EsWrite, StampRequest, StampReply, ShRead, ShReadReply, ShWrite, ReshareDeal]
        .into_iter()
        .find(|k| k.to_string() == s)
}
