//! Server-side storage: evidence service, shareholders, timestamp service.

use super::SystemError;
use crate::codec::Encoded;
use crate::crypto::{stamp, CryptoError, Timestamp, TimestampKey};
use crate::crypto::Commitment;
use crate::evidence::{EsBlock, EvidenceEntry};
use crate::time::Day;
use std::collections::BTreeMap;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvidenceService {
    pub(crate) slots: Vec<Option<EsBlock>>,
}

impl EvidenceService {
    pub fn new(m: usize) -> Self {
        EvidenceService { slots: vec![None; m] }
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn read(&self, i: usize) -> Result<&EsBlock, SystemError> {
        match self.slots.get(i) {
            None => Err(SystemError::SlotOutOfRange(i)),
            Some(None) => Err(SystemError::StorageFault { slot: i, reason: "evidence slot never written".into() }),
            Some(Some(b)) => Ok(b),
        }
    }

    /// Resets slot `i` to the single stamped commitment.
    pub fn write(&mut self, i: usize, c: Commitment, ts: Timestamp) -> Result<(), SystemError> {
        let s = self.slots.get_mut(i).ok_or(SystemError::SlotOutOfRange(i))?;
        *s = Some(EsBlock::new(c, ts));
        Ok(())
    }

    pub fn append(&mut self, i: usize, e: EvidenceEntry) -> Result<(), SystemError> {
        match self.slots.get_mut(i) {
            Some(Some(b)) => {
                b.renewals.push(e);
                Ok(())
            }
            Some(None) => Err(SystemError::StorageFault { slot: i, reason: "evidence slot never written".into() }),
            None => Err(SystemError::SlotOutOfRange(i)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shareholder {
    pub x: u8,
    pub(crate) slots: Vec<Vec<u8>>,
}

impl Shareholder {
    pub fn new(x: u8, m: usize) -> Self {
        Shareholder { x, slots: vec![Vec::new(); m] }
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn read(&self, i: usize) -> Result<&[u8], SystemError> {
        self.slots.get(i).map(Vec::as_slice).ok_or(SystemError::SlotOutOfRange(i))
    }

    pub fn write(&mut self, i: usize, y: Vec<u8>) -> Result<(), SystemError> {
        *self.slots.get_mut(i).ok_or(SystemError::SlotOutOfRange(i))? = y;
        Ok(())
    }

    pub(crate) fn slot_mut(&mut self, i: usize) -> Result<&mut Vec<u8>, SystemError> {
        self.slots.get_mut(i).ok_or(SystemError::SlotOutOfRange(i))
    }

    /// Bytes held across all slots.
    pub fn stored_bytes(&self) -> u64 {
        self.slots.iter().map(|s| s.len() as u64).sum()
    }
}

#[derive(Clone, Debug, Default)]
pub struct TimestampService {
    pub(crate) keys: BTreeMap<String, TimestampKey>,
}

impl TimestampService {
    pub fn insert(&mut self, key: TimestampKey) {
        self.keys.insert(key.instance.instance_id.clone(), key);
    }

    pub fn stamp(&self, instance_id: &str, m: &Encoded, now: Day) -> Result<Timestamp, SystemError> {
        let key = self
            .keys
            .get(instance_id)
            .ok_or_else(|| SystemError::Crypto(CryptoError::BadKey(format!("no signing key for {instance_id}"))))?;
        Ok(stamp(key, m, now)?)
    }
}
