//! Client-side records and the shared payload format.
//!
//! A shareholder slot stores a share of
//!
//! ```text
//! bytes( list[ bytes(dat), E ] ) ‖ 0x00 … 0x00
//! ```
//!
//! zero-padded to a public capacity, so every slot has the same length.

use crate::codec::{encode_bytes, encode_list, CodecError, Decode, Encode, Reader};
use crate::evidence::EvidenceBlock;
use crate::oram::{BlockId, OramState};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A block's data together with its shareholder evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub dat: Vec<u8>,
    pub e: EvidenceBlock,
}

impl Encode for Record {
    fn encode_to(&self, out: &mut Vec<u8>) {
        encode_list(&[encode_bytes(&self.dat), self.e.encode()]).encode_to(out);
    }
}

impl Decode for Record {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        if r.list_len()? != 2 {
            return Err(CodecError::Malformed("record"));
        }
        let dat = r.bytes()?.to_vec();
        Ok(Record { dat, e: EvidenceBlock::decode_from(r)? })
    }
}

/// Serializes a record and pads it to `capacity` bytes when given.
pub fn encode_payload(rec: &Record, capacity: Option<usize>) -> Result<Vec<u8>, usize> {
    let inner = rec.encode();
    let mut out = encode_bytes(inner.as_bytes()).into_bytes();
    if let Some(cap) = capacity {
        if out.len() > cap {
            return Err(out.len());
        }
        out.resize(cap, 0);
    }
    Ok(out)
}

pub fn decode_payload(bytes: &[u8]) -> Result<Record, CodecError> {
    let mut r = Reader::new(bytes);
    let inner = r.bytes()?;
    if bytes[bytes.len() - r.remaining()..].iter().any(|&b| b != 0) {
        return Err(CodecError::Malformed("nonzero padding"));
    }
    Record::decode(inner)
}

/// What the client remembers about a slot it wrote.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotMeta {
    pub evidence_entries: u64,
    pub evidence_bytes: u64,
    pub payload_bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Client {
    pub oram: OramState,
    pub stash: BTreeMap<BlockId, Record>,
    pub meta: Vec<SlotMeta>,
}
