//! Trust anchor: the verifier's table of instances, keys and validity windows.

use super::{CryptoError, SchemeInstance, SchemeKind};
use crate::time::Day;
use ed25519_dalek::VerifyingKey;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorEntry {
    pub instance: SchemeInstance,
    pub verifying_key: Option<VerifyingKey>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrustAnchor {
    entries: BTreeMap<String, AnchorEntry>,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    #[serde(flatten)]
    instance: SchemeInstance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    verifying_key: Option<String>,
}

impl TrustAnchor {
    pub fn get(&self, id: &str) -> Option<&AnchorEntry> {
        self.entries.get(id)
    }

    pub fn insert_signature(&mut self, instance: SchemeInstance, vk: VerifyingKey) {
        debug_assert_eq!(instance.kind(), SchemeKind::Signature);
        let id = instance.instance_id.clone();
        self.entries.insert(id, AnchorEntry { instance, verifying_key: Some(vk) });
    }

    pub fn insert_commitment(&mut self, instance: SchemeInstance) {
        debug_assert_eq!(instance.kind(), SchemeKind::Commitment);
        let id = instance.instance_id.clone();
        self.entries.insert(id, AnchorEntry { instance, verifying_key: None });
    }

    pub fn instances(&self) -> impl Iterator<Item = &SchemeInstance> {
        self.entries.values().map(|e| &e.instance)
    }

    /// Last day on which every instance is still valid.
    pub fn earliest_expiry(&self) -> Option<Day> {
        self.instances().map(|i| i.validity.end).min()
    }

    pub fn is_well_formed(&self) -> bool {
        self.entries.iter().all(|(id, e)| {
            *id == e.instance.instance_id
                && e.instance.validity.is_well_formed()
                && (e.instance.kind() == SchemeKind::Signature) == e.verifying_key.is_some()
        })
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<EntryJson> = self
            .entries
            .values()
            .map(|e| EntryJson {
                instance: e.instance.clone(),
                verifying_key: e.verifying_key.map(|k| hex::encode(k.to_bytes())),
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("anchor serializes")
    }

    pub fn from_json(s: &str) -> Result<TrustAnchor, CryptoError> {
        let rows: Vec<EntryJson> = serde_json::from_str(s).map_err(|e| CryptoError::BadKey(e.to_string()))?;
        let mut ta = TrustAnchor::default();
        for row in rows {
            let vk = match row.verifying_key {
                None => None,
                Some(h) => {
                    let bytes: [u8; 32] = hex::decode(&h)
                        .map_err(|e| CryptoError::BadKey(e.to_string()))?
                        .try_into()
                        .map_err(|_| CryptoError::BadKey("verifying key length".into()))?;
                    Some(VerifyingKey::from_bytes(&bytes).map_err(|e| CryptoError::BadKey(e.to_string()))?)
                }
            };
            let id = row.instance.instance_id.clone();
            if ta.entries.insert(id.clone(), AnchorEntry { instance: row.instance, verifying_key: vk }).is_some() {
                return Err(CryptoError::BadKey(format!("duplicate instance id {id}")));
            }
        }
        if !ta.is_well_formed() {
            return Err(CryptoError::BadKey("malformed trust anchor".into()));
        }
        Ok(ta)
    }
}
