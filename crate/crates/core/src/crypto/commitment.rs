//! Halevi–Micali commitments over GF(2^{4ℓ}).
//!
//! For hash length ℓ, the committer draws r (4ℓ bits) and a ≠ 0, computes
//! b = (H(m) ‖ ρ) ⊕ a·r for random ρ of 3ℓ bits, and publishes (y = H(r), a, b).
//! The opening is r. The map r ↦ a·r is a universal hash from 4ℓ to ℓ bits,
//! which makes the commitment statistically hiding.

use super::{CryptoError, SchemeInstance, TrustAnchor};
use crate::codec::{put_bytes, put_count, CodecError, Decode, Encode, Encoded, Reader};
use crate::time::Day;
use rand::RngCore;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Commitment {
    pub instance_id: String,
    pub y: Vec<u8>,
    pub a: Vec<u8>,
    pub b: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decommitment {
    pub r: Vec<u8>,
}

impl Commitment {
    /// y ‖ a ‖ b, the part that depends on the randomness and the message.
    pub fn body(&self) -> Vec<u8> {
        let mut v = Vec::with_capacity(self.y.len() + self.a.len() + self.b.len());
        v.extend_from_slice(&self.y);
        v.extend_from_slice(&self.a);
        v.extend_from_slice(&self.b);
        v
    }
}

impl Encode for Commitment {
    fn encode_to(&self, out: &mut Vec<u8>) {
        put_count(out, 4);
        put_bytes(out, self.instance_id.as_bytes());
        put_bytes(out, &self.y);
        put_bytes(out, &self.a);
        put_bytes(out, &self.b);
    }
}

impl Decode for Commitment {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        if r.list_len()? != 4 {
            return Err(CodecError::Malformed("commitment"));
        }
        let id = String::from_utf8(r.bytes()?.to_vec()).map_err(|_| CodecError::Malformed("instance id"))?;
        Ok(Commitment { instance_id: id, y: r.bytes()?.to_vec(), a: r.bytes()?.to_vec(), b: r.bytes()?.to_vec() })
    }
}

impl Encode for Decommitment {
    fn encode_to(&self, out: &mut Vec<u8>) {
        put_bytes(out, &self.r);
    }
}

impl Decode for Decommitment {
    fn decode_from(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        Ok(Decommitment { r: r.bytes()?.to_vec() })
    }
}

/// Commits to `m` under instance `csi`.
pub fn commit(
    csi: &SchemeInstance,
    m: &Encoded,
    rng: &mut impl RngCore,
) -> Result<(Commitment, Decommitment), CryptoError> {
    let hash = csi.hash().ok_or_else(|| CryptoError::WrongKind(csi.instance_id.clone()))?;
    let field = hash.field();
    let n = field.byte_len();

    let mut r = vec![0u8; n];
    rng.fill_bytes(&mut r);
    let mut a = vec![0u8; n];
    loop {
        rng.fill_bytes(&mut a);
        if a.iter().any(|&x| x != 0) {
            break;
        }
    }
    let mut b = hash.digest(m.as_bytes());
    b.resize(n, 0);
    rng.fill_bytes(&mut b[hash.bytes()..]);
    for (bi, pi) in b.iter_mut().zip(field.mul(&a, &r)) {
        *bi ^= pi;
    }
    let c = Commitment { instance_id: csi.instance_id.clone(), y: hash.digest(&r), a, b };
    Ok((c, Decommitment { r }))
}

/// Checks that `d` opens `c` to `m` and that the instance has not expired at `t_ref`.
pub fn ver_com(ta: &TrustAnchor, m: &Encoded, c: &Commitment, d: &Decommitment, t_ref: Day) -> bool {
    let Some(entry) = ta.get(&c.instance_id) else {
        return false;
    };
    let Some(hash) = entry.instance.hash() else {
        return false;
    };
    if t_ref > entry.instance.validity.end {
        return false;
    }
    let field = hash.field();
    let n = field.byte_len();
    if d.r.len() != n || c.a.len() != n || c.b.len() != n || c.y.len() != hash.bytes() {
        return false;
    }
    if c.a.iter().all(|&x| x == 0) || hash.digest(&d.r) != c.y {
        return false;
    }
    let ar = field.mul(&c.a, &d.r);
    let x = hash.digest(m.as_bytes());
    ar.iter().zip(&c.b).take(hash.bytes()).map(|(p, q)| p ^ q).eq(x.iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::encode_bytes;
    use crate::crypto::{make_rng, HashBits, SchemeParams};
    use crate::time::Window;
    use proptest::prelude::*;
    use rand::RngCore;

    fn setup(hash: HashBits) -> (SchemeInstance, TrustAnchor) {
        let inst = SchemeInstance {
            instance_id: format!("HM-{}", hash.bits()),
            params: SchemeParams::Commitment { name: format!("HM-{}", hash.bits()), hash },
            usage: Window::new(Day(0), Day(1000)),
            validity: Window::new(Day(0), Day(2000)),
        };
        let mut ta = TrustAnchor::default();
        ta.insert_commitment(inst.clone());
        (inst, ta)
    }

    #[test]
    fn honest_open_accepts() {
        let mut rng = make_rng(Some(1));
        for h in [HashBits::H224, HashBits::H256, HashBits::H384] {
            let (csi, ta) = setup(h);
            let m = encode_bytes(b"archive");
            let (c, d) = commit(&csi, &m, &mut rng).unwrap();
            assert!(ver_com(&ta, &m, &c, &d, Day(5)));
            assert!(!ver_com(&ta, &encode_bytes(b"archivf"), &c, &d, Day(5)));
            assert!(ver_com(&ta, &m, &c, &d, Day(2000)));
            assert!(!ver_com(&ta, &m, &c, &d, Day(2001)));
        }
    }

    #[test]
    fn encoded_sizes() {
        let mut rng = make_rng(Some(2));
        for (h, body, opening) in [(HashBits::H224, 252, 112), (HashBits::H256, 288, 128), (HashBits::H384, 432, 192)] {
            let (csi, _) = setup(h);
            let (c, d) = commit(&csi, &encode_bytes(b""), &mut rng).unwrap();
            assert_eq!(c.body().len(), body);
            assert_eq!(d.r.len(), opening);
            assert_eq!(Commitment::decode(c.encode().as_bytes()).unwrap(), c);
            assert_eq!(Decommitment::decode(d.encode().as_bytes()).unwrap(), d);
        }
    }

    #[test]
    fn recommitting_draws_fresh_randomness() {
        let mut rng = make_rng(Some(3));
        let (csi, _) = setup(HashBits::H224);
        let m = encode_bytes(b"same");
        let (c1, _) = commit(&csi, &m, &mut rng).unwrap();
        let (c2, _) = commit(&csi, &m, &mut rng).unwrap();
        assert_ne!(c1, c2);
    }

    #[test]
    fn unknown_instance_rejects() {
        let mut rng = make_rng(Some(4));
        let (csi, _) = setup(HashBits::H224);
        let m = encode_bytes(b"x");
        let (c, d) = commit(&csi, &m, &mut rng).unwrap();
        assert!(!ver_com(&TrustAnchor::default(), &m, &c, &d, Day(0)));
    }

    #[test]
    fn zero_multiplier_rejected() {
        let mut rng = make_rng(Some(5));
        let (csi, ta) = setup(HashBits::H224);
        let m = encode_bytes(b"x");
        let (mut c, d) = commit(&csi, &m, &mut rng).unwrap();
        // with a = 0 the opening check degenerates to comparing b directly
        c.a = vec![0; c.a.len()];
        c.b[..28].copy_from_slice(&HashBits::H224.digest(m.as_bytes()));
        assert!(!ver_com(&ta, &m, &c, &d, Day(0)));
    }

    #[test]
    fn hiding_per_byte_chi_square() {
        // Homogeneity test per byte position: commitments to two messages.
        use crate::harness::stats::chi_square_homogeneity;
        let mut rng = make_rng(Some(2018));
        let (csi, _) = setup(HashBits::H224);
        let m1 = encode_bytes(&[0u8; 32]);
        let m2 = encode_bytes(&[0xffu8; 32]);
        let samples = 10_000;
        let width = 252;
        let mut h1 = vec![[0u64; 256]; width];
        let mut h2 = vec![[0u64; 256]; width];
        for _ in 0..samples {
            let b1 = commit(&csi, &m1, &mut rng).unwrap().0.body();
            let b2 = commit(&csi, &m2, &mut rng).unwrap().0.body();
            for p in 0..width {
                h1[p][b1[p] as usize] += 1;
                h2[p][b2[p] as usize] += 1;
            }
        }
        let worst = (0..width)
            .map(|p| chi_square_homogeneity(&h1[p], &h2[p]))
            .fold(1.0f64, f64::min);
        assert!(worst > 0.001, "min p-value {worst}");
    }

    #[test]
    fn binding_search_finds_nothing() {
        // Random openings never verify against a fixed commitment.
        let mut rng = make_rng(Some(6));
        let (csi, ta) = setup(HashBits::H224);
        let m = encode_bytes(b"bound");
        let (c, d) = commit(&csi, &m, &mut rng).unwrap();
        let trials = 1_000_000u32;
        let mut accepted = 0;
        let mut cand = Decommitment { r: d.r.clone() };
        for i in 0..trials {
            if i % 2 == 0 {
                rng.fill_bytes(&mut cand.r);
                accepted += ver_com(&ta, &m, &c, &cand, Day(0)) as u32;
            } else {
                let other = encode_bytes(&i.to_be_bytes());
                accepted += ver_com(&ta, &other, &c, &d, Day(0)) as u32;
            }
        }
        assert_eq!(accepted, 0);
    }

    proptest! {
        #[test]
        fn any_message_roundtrips(m in proptest::collection::vec(any::<u8>(), 0..200), seed in any::<u64>()) {
            let mut rng = make_rng(Some(seed));
            let (csi, ta) = setup(HashBits::H256);
            let m = encode_bytes(&m);
            let (c, d) = commit(&csi, &m, &mut rng).unwrap();
            prop_assert!(ver_com(&ta, &m, &c, &d, Day(0)));
        }
    }
}
