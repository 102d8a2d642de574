//! Signature-based timestamps.
//!
//! Signature schemes sit behind [`SignatureScheme`]. The shipped scheme is
//! Ed25519 padded to a configured length, which lets cost accounting use
//! the sizes of RSA-2048 or XMSS without their implementations.

use super::{fresh_instance_id, CryptoError, SchemeInstance, SchemeParams, TrustAnchor};
use crate::codec::{encode_list, encode_u64, put_bytes, put_count, put_u64, CodecError, Decode, Encode, Encoded, Reader};
use crate::time::{Day, Window};
use ed25519_dalek::{Signer, SigningKey, Verifier, VerifyingKey};
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};

pub trait SignatureScheme {
    type SigningKey;
    type VerifyingKey;

    fn sig_len(&self) -> usize;
    fn keygen(&self, rng: &mut (impl RngCore + CryptoRng)) -> (Self::SigningKey, Self::VerifyingKey);
    fn sign(&self, sk: &Self::SigningKey, msg: &[u8]) -> Vec<u8>;
    fn verify(&self, vk: &Self::VerifyingKey, msg: &[u8], sig: &[u8]) -> bool;
}

/// Ed25519 followed by a filler derived from the signature, `sig_bytes` long in total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PaddedEd25519 {
    pub sig_bytes: usize,
}

const CORE: usize = ed25519_dalek::SIGNATURE_LENGTH;

impl PaddedEd25519 {
    pub fn new(sig_bytes: usize) -> Result<Self, CryptoError> {
        if sig_bytes < CORE {
            return Err(CryptoError::SignatureTooShort(sig_bytes));
        }
        Ok(PaddedEd25519 { sig_bytes })
    }

    fn filler(&self, core: &[u8]) -> Vec<u8> {
        let want = self.sig_bytes - CORE;
        let mut out = Vec::with_capacity(want + 32);
        let mut ctr = 0u64;
        while out.len() < want {
            let mut h = Sha256::new();
            h.update(ctr.to_be_bytes());
            h.update(core);
            out.extend_from_slice(&h.finalize());
            ctr += 1;
        }
        out.truncate(want);
        out
    }
}

impl SignatureScheme for PaddedEd25519 {
    type SigningKey = SigningKey;
    type VerifyingKey = VerifyingKey;

    fn sig_len(&self) -> usize {
        self.sig_bytes
    }

    fn keygen(&self, rng: &mut (impl RngCore + CryptoRng)) -> (SigningKey, VerifyingKey) {
        let sk = SigningKey::generate(rng);
        let vk = sk.verifying_key();
        (sk, vk)
    }

    fn sign(&self, sk: &SigningKey, msg: &[u8]) -> Vec<u8> {
        let core = sk.sign(msg).to_bytes();
        let mut sig = core.to_vec();
        sig.extend(self.filler(&core));
        sig
    }

    fn verify(&self, vk: &VerifyingKey, msg: &[u8], sig: &[u8]) -> bool {
        if sig.len() != self.sig_bytes {
            return false;
        }
        let (core, rest) = sig.split_at(CORE);
        let Ok(s) = ed25519_dalek::Signature::from_slice(core) else {
            return false;
        };
        vk.verify(msg, &s).is_ok() && rest == self.filler(core).as_slice()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Timestamp {
    pub t: Day,
    pub instance_id: String,
    pub sig: Vec<u8>,
}

impl Encode for Timestamp {
    fn encode_to(&self, out: &mut Vec<u8>) {
        put_count(out, 3);
        put_u64(out, self.t.0);
        put_bytes(out, self.instance_id.as_bytes());
        put_bytes(out, &self.sig);
    }
}

impl Decode for Timestamp {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        if r.list_len()? != 3 {
            return Err(CodecError::Malformed("timestamp"));
        }
        let t = Day(r.u64()?);
        let id = String::from_utf8(r.bytes()?.to_vec()).map_err(|_| CodecError::Malformed("instance id"))?;
        Ok(Timestamp { t, instance_id: id, sig: r.bytes()?.to_vec() })
    }
}

/// Signing side of a timestamp instance, held by the timestamp service.
#[derive(Clone, Debug)]
pub struct TimestampKey {
    pub instance: SchemeInstance,
    pub scheme: PaddedEd25519,
    pub signing_key: SigningKey,
}

impl TimestampKey {
    pub fn verifying_key(&self) -> VerifyingKey {
        self.signing_key.verifying_key()
    }
}

/// The byte string a timestamp signs.
pub fn signed_message(m: &Encoded, t: Day) -> Encoded {
    encode_list(&[m.clone(), encode_u64(t.0)])
}

/// Generates a fresh signature instance.
pub fn ts_setup(
    name: &str,
    sig_bytes: usize,
    usage: Window,
    validity: Window,
    rng: &mut (impl RngCore + CryptoRng),
) -> Result<TimestampKey, CryptoError> {
    let scheme = PaddedEd25519::new(sig_bytes)?;
    let (signing_key, _) = scheme.keygen(rng);
    let instance = SchemeInstance {
        instance_id: fresh_instance_id(name, rng),
        params: SchemeParams::Signature { name: name.to_string(), sig_bytes },
        usage,
        validity,
    };
    Ok(TimestampKey { instance, scheme, signing_key })
}

pub fn stamp(key: &TimestampKey, m: &Encoded, now: Day) -> Result<Timestamp, CryptoError> {
    if !key.instance.validity.contains(now) {
        return Err(CryptoError::OutsideValidity { id: key.instance.instance_id.clone(), t: now });
    }
    let sig = key.scheme.sign(&key.signing_key, signed_message(m, now).as_bytes());
    Ok(Timestamp { t: now, instance_id: key.instance.instance_id.clone(), sig })
}

pub fn ver_ts(ta: &TrustAnchor, m: &Encoded, ts: &Timestamp, t_ref: Day) -> bool {
    let Some(entry) = ta.get(&ts.instance_id) else {
        return false;
    };
    let (Some(sig_bytes), Some(vk)) = (entry.instance.sig_bytes(), entry.verifying_key.as_ref()) else {
        return false;
    };
    let validity = entry.instance.validity;
    if !validity.contains(ts.t) || t_ref > validity.end {
        return false;
    }
    PaddedEd25519 { sig_bytes }.verify(vk, signed_message(m, ts.t).as_bytes(), &ts.sig)
}
