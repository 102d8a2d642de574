//! Byte-wise Shamir sharing over GF(256) with proactive resharing.
//!
//! Shareholder i holds x-coordinate i (1-based). Each secret byte gets its
//! own random polynomial of degree k−1.

pub mod gf256;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SharingError {
    #[error("invalid parameters n = {n}, k = {k}: need 1 <= k <= n <= 255")]
    Params { n: usize, k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Share {
    pub x: u8,
    pub y: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareSet {
    pub n: usize,
    pub k: usize,
    pub shares: Vec<Share>,
}

fn check(n: usize, k: usize) -> Result<(), SharingError> {
    if k == 0 || k > n || n > 255 {
        return Err(SharingError::Params { n, k });
    }
    Ok(())
}

/// Evaluates the polynomial with coefficient vectors `coeffs` (constant
/// term first) at `x`, byte-wise.
fn eval(coeffs: &[&[u8]], x: u8) -> Vec<u8> {
    let t = gf256::mul_table(x);
    let (last, rest) = coeffs.split_last().expect("at least the constant term");
    let mut y = last.to_vec();
    for c in rest.iter().rev() {
        for (yi, ci) in y.iter_mut().zip(c.iter()) {
            *yi = t[*yi as usize] ^ ci;
        }
    }
    y
}

/// Shares `secret` with explicit higher-order coefficients.
pub fn share_with_coefficients(secret: &[u8], n: usize, higher: &[Vec<u8>]) -> Vec<Share> {
    let mut coeffs: Vec<&[u8]> = vec![secret];
    coeffs.extend(higher.iter().map(Vec::as_slice));
    (1..=n as u8).map(|x| Share { x, y: eval(&coeffs, x) }).collect()
}

fn random_coefficients(len: usize, k: usize, rng: &mut impl RngCore) -> Vec<Vec<u8>> {
    (1..k)
        .map(|_| {
            let mut v = vec![0u8; len];
            rng.fill_bytes(&mut v);
            v
        })
        .collect()
}

pub fn share(secret: &[u8], n: usize, k: usize, rng: &mut impl RngCore) -> Result<ShareSet, SharingError> {
    check(n, k)?;
    let higher = random_coefficients(secret.len(), k, rng);
    Ok(ShareSet { n, k, shares: share_with_coefficients(secret, n, &higher) })
}

/// Lagrange interpolation at 0 from the first `k` shares.
///
/// Returns `None` when fewer than `k` shares are given, any x repeats or is
/// zero, or the share lengths differ.
pub fn reconstruct(shares: &[Share], k: usize) -> Option<Vec<u8>> {
    if k == 0 || shares.len() < k {
        return None;
    }
    let mut seen = [false; 256];
    for s in shares {
        if s.x == 0 || seen[s.x as usize] {
            return None;
        }
        seen[s.x as usize] = true;
    }
    let used = &shares[..k];
    let len = used[0].y.len();
    if shares.iter().any(|s| s.y.len() != len) {
        return None;
    }
    let mut out = vec![0u8; len];
    for (i, si) in used.iter().enumerate() {
        let mut lambda = 1u8;
        for (j, sj) in used.iter().enumerate() {
            if i != j {
                lambda = gf256::mul(lambda, gf256::div(sj.x, sj.x ^ si.x));
            }
        }
        let t = gf256::mul_table(lambda);
        for (o, y) in out.iter_mut().zip(&si.y) {
            *o ^= t[*y as usize];
        }
    }
    Some(out)
}

/// A degree-(k−1) sharing of the all-zero string, one vector per x in 1..=n.
pub fn zero_sharing(len: usize, n: usize, k: usize, rng: &mut impl RngCore) -> Vec<Vec<u8>> {
    let higher = random_coefficients(len, k, rng);
    share_with_coefficients(&vec![0u8; len], n, &higher).into_iter().map(|s| s.y).collect()
}

/// Adds a set of zero-sharings into `shares`: dealer j's vector i goes to shareholder i.
pub fn apply_zero_sharings(shares: &mut [Share], dealt: &[Vec<Vec<u8>>]) {
    for dealer in dealt {
        for (s, z) in shares.iter_mut().zip(dealer) {
            for (a, b) in s.y.iter_mut().zip(z) {
                *a ^= b;
            }
        }
    }
}

/// Every shareholder deals a zero-sharing and adds what it receives.
pub fn reshare(old: &ShareSet, rng: &mut impl RngCore) -> ShareSet {
    let len = old.shares.first().map_or(0, |s| s.y.len());
    let dealt: Vec<Vec<Vec<u8>>> = (0..old.n).map(|_| zero_sharing(len, old.n, old.k, rng)).collect();
    let mut next = old.clone();
    apply_zero_sharings(&mut next.shares, &dealt);
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::make_rng;
    use crate::harness::stats::chi_square_uniform;
    use proptest::prelude::*;
    use rand::Rng;

    // Independent oracle: Lagrange at 0 with the slow shift-and-add product.
    fn oracle_mul(mut a: u8, mut b: u8) -> u8 {
        let mut p = 0;
        while b != 0 {
            if b & 1 == 1 {
                p ^= a;
            }
            a = (a << 1) ^ if a & 0x80 != 0 { 0x1b } else { 0 };
            b >>= 1;
        }
        p
    }

    #[test]
    fn hand_worked_example() {
        // f(x) = 0x2A + 0x07 x
        let shares = share_with_coefficients(&[0x2a], 3, &[vec![0x07]]);
        let ys: Vec<u8> = shares.iter().map(|s| s.y[0]).collect();
        assert_eq!(ys, vec![0x2d, 0x24, 0x23]);
        for (x, y) in [(1u8, 0x2du8), (2, 0x24), (3, 0x23)] {
            assert_eq!(0x2a ^ oracle_mul(0x07, x), y);
        }
        let pair = [shares[0].clone(), shares[2].clone()];
        assert_eq!(reconstruct(&pair, 2), Some(vec![0x2a]));
        assert_eq!(reconstruct(&pair[..1], 2), None);
    }

    #[test]
    fn threshold_one_copies_secret() {
        let mut rng = make_rng(Some(1));
        let s = share(b"plain", 4, 1, &mut rng).unwrap();
        assert!(s.shares.iter().all(|sh| sh.y == b"plain"));
    }

    #[test]
    fn bad_parameters() {
        let mut rng = make_rng(Some(1));
        assert!(share(b"x", 2, 3, &mut rng).is_err());
        assert!(share(b"x", 256, 2, &mut rng).is_err());
        assert!(share(b"x", 3, 0, &mut rng).is_err());
    }

    #[test]
    fn duplicate_x_fails() {
        let mut rng = make_rng(Some(2));
        let s = share(b"dup", 3, 2, &mut rng).unwrap();
        let dup = [s.shares[0].clone(), s.shares[0].clone()];
        assert_eq!(reconstruct(&dup, 2), None);
    }

    #[test]
    fn roundtrip_random_secrets() {
        let mut rng = make_rng(Some(3));
        for _ in 0..1000 {
            let len = rng.gen_range(0..64);
            let secret: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let n = rng.gen_range(1..=7);
            let k = rng.gen_range(1..=n);
            let s = share(&secret, n, k, &mut rng).unwrap();
            assert_eq!(reconstruct(&s.shares, k).unwrap(), secret);
        }
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }

    #[test]
    fn every_k_subset_reconstructs() {
        let mut rng = make_rng(Some(4));
        for n in 1..=5 {
            for k in 1..=n {
                let secret: Vec<u8> = (0..16).map(|_| rng.gen()).collect();
                let s = share(&secret, n, k, &mut rng).unwrap();
                for idx in subsets(n, k) {
                    let pick: Vec<Share> = idx.iter().map(|&i| s.shares[i].clone()).collect();
                    assert_eq!(reconstruct(&pick, k).unwrap(), secret, "n={n} k={k} {idx:?}");
                }
            }
        }
    }

    #[test]
    fn reshare_preserves_secret() {
        let mut rng = make_rng(Some(5));
        let secret = b"long-lived".to_vec();
        let mut s = share(&secret, 3, 2, &mut rng).unwrap();
        for _ in 0..1000 {
            s = reshare(&s, &mut rng);
            assert_eq!(reconstruct(&s.shares[1..], 2).unwrap(), secret);
        }
        let one = share(&secret, 1, 1, &mut rng).unwrap();
        assert_eq!(reshare(&one, &mut rng), one);
    }

    #[test]
    fn reshared_byte_is_uniform_and_uncorrelated() {
        let mut rng = make_rng(Some(6));
        let base = share(&[0x5a], 3, 2, &mut rng).unwrap();
        let mut counts = [0u64; 256];
        let mut equal = 0u32;
        let rounds = 10_000;
        for _ in 0..rounds {
            let next = reshare(&base, &mut rng);
            let y = next.shares[0].y[0];
            counts[y as usize] += 1;
            equal += (y == base.shares[0].y[0]) as u32;
        }
        assert!(chi_square_uniform(&counts) > 0.001);
        let rate = equal as f64 / rounds as f64;
        // 1/256 with a 4-sigma binomial band
        let sd = (1.0 / 256.0 * (255.0 / 256.0) / rounds as f64).sqrt();
        assert!((rate - 1.0 / 256.0).abs() < 4.0 * sd, "equality rate {rate}");
    }

    #[test]
    fn below_threshold_shares_hide_secret() {
        // k−1 = 1 observed share: distribution for secret 0x00 vs 0xFF.
        use crate::harness::stats::chi_square_homogeneity;
        let mut rng = make_rng(Some(7));
        let (mut h1, mut h2) = ([0u64; 256], [0u64; 256]);
        for _ in 0..10_000 {
            h1[share(&[0x00], 3, 2, &mut rng).unwrap().shares[1].y[0] as usize] += 1;
            h2[share(&[0xff], 3, 2, &mut rng).unwrap().shares[1].y[0] as usize] += 1;
        }
        assert!(chi_square_homogeneity(&h1, &h2) > 0.001);
    }

    proptest! {
        #[test]
        fn reconstruct_inverts_share(secret in proptest::collection::vec(any::<u8>(), 0..100), n in 1usize..8, seed in any::<u64>()) {
            let mut rng = make_rng(Some(seed));
            let k = 1 + (seed as usize % n);
            let s = share(&secret, n, k, &mut rng).unwrap();
            prop_assert_eq!(reconstruct(&s.shares[n - k..], k), Some(secret.clone()));
            prop_assert_eq!(reconstruct(&s.shares[..k - 1], k), None);
        }
    }
}
