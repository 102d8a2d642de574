//! Timestamps, commitments, hashes and the randomness source.

pub mod anchor;
pub mod commitment;
pub mod gf2n;
pub mod timestamp;

pub use anchor::{AnchorEntry, TrustAnchor};
pub use commitment::{commit, ver_com, Commitment, Decommitment};
pub use timestamp::{stamp, ts_setup, ver_ts, PaddedEd25519, SignatureScheme, Timestamp, TimestampKey};

use crate::codec::CodecError;
use crate::time::Window;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha224, Sha256, Sha384};
use thiserror::Error;

/// The simulator's random number generator.
pub type SimRng = ChaCha20Rng;

/// Seeded by default; `None` draws the key from OS entropy.
pub fn make_rng(seed: Option<u64>) -> SimRng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CryptoError {
    #[error("instance {id} is not valid at {t}")]
    OutsideValidity { id: String, t: crate::time::Day },
    #[error("instance {0} has the wrong kind for this operation")]
    WrongKind(String),
    #[error("signature length {0} is shorter than the 64-byte core")]
    SignatureTooShort(usize),
    #[error("invalid key material: {0}")]
    BadKey(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Output length of the hash used by a commitment instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HashBits {
    #[serde(rename = "224")]
    H224,
    #[serde(rename = "256")]
    H256,
    #[serde(rename = "384")]
    H384,
}

impl HashBits {
    pub fn from_bits(bits: u32) -> Option<HashBits> {
        match bits {
            224 => Some(HashBits::H224),
            256 => Some(HashBits::H256),
            384 => Some(HashBits::H384),
            _ => None,
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            HashBits::H224 => 224,
            HashBits::H256 => 256,
            HashBits::H384 => 384,
        }
    }

    pub fn bytes(self) -> usize {
        self.bits() as usize / 8
    }

    pub fn digest(self, m: &[u8]) -> Vec<u8> {
        match self {
            HashBits::H224 => Sha224::digest(m).to_vec(),
            HashBits::H256 => Sha256::digest(m).to_vec(),
            HashBits::H384 => Sha384::digest(m).to_vec(),
        }
    }

    pub fn field(self) -> &'static gf2n::BinaryField {
        match self {
            HashBits::H224 => &gf2n::GF2_896,
            HashBits::H256 => &gf2n::GF2_1024,
            HashBits::H384 => &gf2n::GF2_1536,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Signature,
    Commitment,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeParams {
    Signature { name: String, sig_bytes: usize },
    Commitment { name: String, hash: HashBits },
}

impl SchemeParams {
    pub fn kind(&self) -> SchemeKind {
        match self {
            SchemeParams::Signature { .. } => SchemeKind::Signature,
            SchemeParams::Commitment { .. } => SchemeKind::Commitment,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            SchemeParams::Signature { name, .. } | SchemeParams::Commitment { name, .. } => name,
        }
    }
}

/// A configured signature or commitment instance.
///
/// `usage` is the period in which the instance issues new stamps or
/// commitments; `validity` extends it by a renewal grace so that the last
/// object produced can still be renewed by the successor instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeInstance {
    pub instance_id: String,
    pub params: SchemeParams,
    pub usage: Window,
    pub validity: Window,
}

impl SchemeInstance {
    pub fn kind(&self) -> SchemeKind {
        self.params.kind()
    }

    pub fn hash(&self) -> Option<HashBits> {
        match self.params {
            SchemeParams::Commitment { hash, .. } => Some(hash),
            _ => None,
        }
    }

    pub fn sig_bytes(&self) -> Option<usize> {
        match self.params {
            SchemeParams::Signature { sig_bytes, .. } => Some(sig_bytes),
            _ => None,
        }
    }
}

/// Name plus a random suffix, so repeated setups never share an id.
pub(crate) fn fresh_instance_id(name: &str, rng: &mut impl rand::RngCore) -> String {
    let mut tag = [0u8; 4];
    rng.fill_bytes(&mut tag);
    format!("{name}-{}", hex::encode(tag))
}
