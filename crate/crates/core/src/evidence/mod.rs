//! Evidence chains: entries, the evidence-service block, merge and refresh.

mod verify;

pub use crate::crypto::TrustAnchor;
pub use verify::{verify_int, verify_int_report, Check, VerifyReport};

use crate::codec::{
    encode_bytes, encode_list, put_count, put_optional, CodecError, Decode, Encode, Encoded, Reader,
};
use crate::crypto::{commit, CryptoError, SchemeInstance};
use crate::crypto::{Commitment, Decommitment, Timestamp};
use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvidenceError {
    #[error("evidence block is empty")]
    Empty,
    #[error("evidence-service commitment does not match the pending entry")]
    CommitmentMismatch,
    #[error("last entry already carries a timestamp")]
    NotPending,
    #[error("entry {0} lacks a commitment or timestamp")]
    Incomplete(usize),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Write = 0,
    Read = 1,
    ReCom = 2,
    ReTs = 3,
}

impl Op {
    pub fn from_byte(b: u8) -> Result<Op, CodecError> {
        match b {
            0 => Ok(Op::Write),
            1 => Ok(Op::Read),
            2 => Ok(Op::ReCom),
            3 => Ok(Op::ReTs),
            x => Err(CodecError::UnknownOp(x)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvidenceEntry {
    pub op: Op,
    pub c: Option<Commitment>,
    pub d: Option<Decommitment>,
    pub ts: Option<Timestamp>,
}

impl EvidenceEntry {
    pub fn new(op: Op, c: Commitment, d: Decommitment, ts: Option<Timestamp>) -> Self {
        EvidenceEntry { op, c: Some(c), d: Some(d), ts }
    }
}

impl Encode for EvidenceEntry {
    fn encode_to(&self, out: &mut Vec<u8>) {
        out.push(self.op as u8);
        put_optional(out, self.c.as_ref());
        put_optional(out, self.d.as_ref());
        put_optional(out, self.ts.as_ref());
    }
}

impl Decode for EvidenceEntry {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        let op = Op::from_byte(r.u8()?)?;
        Ok(EvidenceEntry { op, c: r.optional()?, d: r.optional()?, ts: r.optional()? })
    }
}

/// Evidence held by the shareholders for one block.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvidenceBlock {
    pub entries: Vec<EvidenceEntry>,
}

impl EvidenceBlock {
    pub fn new(entries: Vec<EvidenceEntry>) -> Self {
        EvidenceBlock { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn last(&self) -> Option<&EvidenceEntry> {
        self.entries.last()
    }

    /// The last entry still waits for its timestamp.
    pub fn is_pending(&self) -> bool {
        self.last().is_some_and(|e| e.ts.is_none())
    }

    pub fn count(&self, op: Op) -> usize {
        self.entries.iter().filter(|e| e.op == op).count()
    }

    /// Timestamps present so far never go back in time.
    pub fn is_time_ordered(&self) -> bool {
        let times: Vec<_> = self.entries.iter().filter_map(|e| e.ts.as_ref().map(|t| t.t)).collect();
        times.windows(2).all(|w| w[0] <= w[1])
    }
}

impl Encode for EvidenceBlock {
    fn encode_to(&self, out: &mut Vec<u8>) {
        put_count(out, self.entries.len());
        for e in &self.entries {
            e.encode_to(out);
        }
    }
}

impl Decode for EvidenceBlock {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        let n = r.list_len()?;
        let mut entries = Vec::with_capacity(n);
        for _ in 0..n {
            entries.push(EvidenceEntry::decode_from(r)?);
        }
        Ok(EvidenceBlock { entries })
    }
}

/// Evidence held by the evidence service for one slot: the stamped head
/// commitment `(⊥, c, ⊥, ts)` followed by its timestamp renewals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EsBlock {
    pub c: Commitment,
    pub ts: Timestamp,
    pub renewals: Vec<EvidenceEntry>,
}

impl EsBlock {
    pub fn new(c: Commitment, ts: Timestamp) -> Self {
        EsBlock { c, ts, renewals: Vec::new() }
    }

    /// Entries counting the head.
    pub fn len(&self) -> usize {
        1 + self.renewals.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Commitment and timestamp of the newest entry.
    pub fn tip(&self) -> (&Commitment, &Timestamp) {
        match self.renewals.last() {
            Some(EvidenceEntry { c: Some(c), ts: Some(ts), .. }) => (c, ts),
            _ => (&self.c, &self.ts),
        }
    }
}

impl Encode for EsBlock {
    fn encode_to(&self, out: &mut Vec<u8>) {
        put_count(out, self.len());
        self.c.encode_to(out);
        self.ts.encode_to(out);
        for e in &self.renewals {
            e.encode_to(out);
        }
    }
}

impl Decode for EsBlock {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        let n = r.list_len()?;
        if n == 0 {
            return Err(CodecError::Malformed("empty evidence-service block"));
        }
        let c = Commitment::decode_from(r)?;
        let ts = Timestamp::decode_from(r)?;
        let mut renewals = Vec::with_capacity(n - 1);
        for _ in 1..n {
            renewals.push(EvidenceEntry::decode_from(r)?);
        }
        Ok(EsBlock { c, ts, renewals })
    }
}

/// Message committed to by a Write entry.
pub fn data_message(dat: &[u8]) -> Encoded {
    encode_bytes(dat)
}

/// Message `[c, ts]` committed to by Read and ReTs entries.
pub fn chain_message(c: &Commitment, ts: &Timestamp) -> Encoded {
    encode_list(&[c.encode(), ts.encode()])
}

/// Message `[dat, E]` committed to by ReCom entries.
pub fn recom_message(dat: &[u8], e: &EvidenceBlock) -> Encoded {
    encode_list(&[encode_bytes(dat), e.encode()])
}

/// Fills the pending timestamp from the evidence service and appends its renewals.
pub fn merge_es_evidence(e: &mut EvidenceBlock, es: &EsBlock) -> Result<(), EvidenceError> {
    let last = e.entries.last_mut().ok_or(EvidenceError::Empty)?;
    if last.ts.is_some() {
        return Err(EvidenceError::NotPending);
    }
    if last.c.as_ref() != Some(&es.c) {
        return Err(EvidenceError::CommitmentMismatch);
    }
    last.ts = Some(es.ts.clone());
    e.entries.extend(es.renewals.iter().cloned());
    Ok(())
}

/// Commits to `[E[-1].c, E[-1].ts]` after dropping a trailing Read, and
/// appends the new pending Read entry.
pub fn refresh_commit(e: &mut EvidenceBlock, csi: &SchemeInstance, rng: &mut impl RngCore) -> Result<(), EvidenceError> {
    if e.is_empty() {
        return Err(EvidenceError::Empty);
    }
    if e.last().map(|x| x.op) == Some(Op::Read) {
        e.entries.pop();
    }
    let n = e.len();
    let last = e.last().ok_or(EvidenceError::Empty)?;
    let (Some(c), Some(ts)) = (&last.c, &last.ts) else {
        return Err(EvidenceError::Incomplete(n));
    };
    let (c2, d2) = commit(csi, &chain_message(c, ts), rng)?;
    e.entries.push(EvidenceEntry::new(Op::Read, c2, d2, None));
    Ok(())
}

/// Appends a ReTs entry committing to the tip `[c, ts]`, to be stamped by the caller.
pub fn renew_ts_entry(
    c: &Commitment,
    ts: &Timestamp,
    csi: &SchemeInstance,
    rng: &mut impl RngCore,
) -> Result<(Commitment, Decommitment), EvidenceError> {
    Ok(commit(csi, &chain_message(c, ts), rng)?)
}

/// Appends a pending ReCom entry committing to `[dat, E]`.
pub fn append_recom(
    dat: &[u8],
    e: &mut EvidenceBlock,
    csi: &SchemeInstance,
    rng: &mut impl RngCore,
) -> Result<(), EvidenceError> {
    if e.entries.iter().any(|x| x.ts.is_none() || x.c.is_none()) {
        let i = e.entries.iter().position(|x| x.ts.is_none() || x.c.is_none()).unwrap_or(0);
        return Err(EvidenceError::Incomplete(i + 1));
    }
    let (c, d) = commit(csi, &recom_message(dat, e), rng)?;
    e.entries.push(EvidenceEntry::new(Op::ReCom, c, d, None));
    Ok(())
}

#[cfg(test)]
pub(crate) mod testkit {
    //! A small self-contained signer and commitment instance for unit tests.
    use crate::crypto::{make_rng, stamp, ts_setup, HashBits, SchemeInstance, SchemeParams, SimRng, TimestampKey, TrustAnchor};
    use crate::time::{Day, Window};

    pub struct Kit {
        pub ta: TrustAnchor,
        pub csi: SchemeInstance,
        pub key: TimestampKey,
        pub rng: SimRng,
    }

    impl Kit {
        pub fn new(seed: u64) -> Kit {
            let mut rng = make_rng(Some(seed));
            let w = Window::new(Day(0), Day(100_000));
            let key = ts_setup("SIG", 80, w, w, &mut rng).unwrap();
            let csi = SchemeInstance {
                instance_id: "HM-224-test".into(),
                params: SchemeParams::Commitment { name: "HM-224".into(), hash: HashBits::H224 },
                usage: w,
                validity: w,
            };
            let mut ta = TrustAnchor::default();
            ta.insert_signature(key.instance.clone(), key.verifying_key());
            ta.insert_commitment(csi.clone());
            Kit { ta, csi, key, rng }
        }

        pub fn stamp(&self, c: &crate::crypto::Commitment, t: Day) -> crate::crypto::Timestamp {
            use crate::codec::Encode;
            stamp(&self.key, &c.encode(), t).unwrap()
        }
    }
}
