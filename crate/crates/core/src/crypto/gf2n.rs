//! Arithmetic in GF(2^n) for n = 896, 1024, 1536.
//!
//! Elements are big-endian byte strings of n/8 bytes: the first byte holds the
//! coefficients of x^(n-1)..x^(n-8). Each field is defined by a pentanomial
//! x^n + x^a + x^b + x^c + 1:
//!
//! | n    | a  | b | c |
//! |------|----|---|---|
//! | 896  | 7  | 5 | 3 |
//! | 1024 | 19 | 6 | 1 |
//! | 1536 | 21 | 6 | 2 |
//!
//! For each degree this is the first irreducible pentanomial when ordered by
//! (a, b, c) ascending. No irreducible trinomial exists for these degrees
//! because each is a multiple of 8.

#[derive(Debug, PartialEq, Eq)]
pub struct BinaryField {
    limbs: usize,
    taps: [u32; 3],
}

pub const GF2_896: BinaryField = BinaryField { limbs: 14, taps: [7, 5, 3] };
pub const GF2_1024: BinaryField = BinaryField { limbs: 16, taps: [19, 6, 1] };
pub const GF2_1536: BinaryField = BinaryField { limbs: 24, taps: [21, 6, 2] };

impl BinaryField {
    pub fn degree(&self) -> usize {
        self.limbs * 64
    }

    pub fn byte_len(&self) -> usize {
        self.limbs * 8
    }

    /// Exponents of the low terms of the reduction polynomial, x^0 included.
    pub fn low_terms(&self) -> [u32; 4] {
        [self.taps[0], self.taps[1], self.taps[2], 0]
    }

    pub fn to_limbs(&self, bytes: &[u8]) -> Vec<u64> {
        assert_eq!(bytes.len(), self.byte_len(), "field element length");
        let mut out = vec![0u64; self.limbs];
        for (j, limb) in out.iter_mut().enumerate() {
            let off = (self.limbs - 1 - j) * 8;
            *limb = u64::from_be_bytes(bytes[off..off + 8].try_into().expect("8 bytes"));
        }
        out
    }

    pub fn from_limbs(&self, limbs: &[u64]) -> Vec<u8> {
        let mut out = vec![0u8; self.byte_len()];
        for (j, limb) in limbs.iter().enumerate().take(self.limbs) {
            let off = (self.limbs - 1 - j) * 8;
            out[off..off + 8].copy_from_slice(&limb.to_be_bytes());
        }
        out
    }

    /// Product of two big-endian encoded elements.
    pub fn mul(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        let a = self.to_limbs(a);
        let b = self.to_limbs(b);
        self.from_limbs(&self.mul_limbs(&a, &b))
    }

    pub fn mul_limbs(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut wide = vec![0u64; 2 * self.limbs];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let table = window_table(ai);
            for (j, &bj) in b.iter().enumerate() {
                let p = clmul_with_table(&table, bj);
                wide[i + j] ^= p as u64;
                wide[i + j + 1] ^= (p >> 64) as u64;
            }
        }
        self.reduce(&mut wide);
        wide.truncate(self.limbs);
        wide
    }

    fn reduce(&self, p: &mut [u64]) {
        let l = self.limbs;
        for i in (l..2 * l).rev() {
            let w = p[i];
            if w == 0 {
                continue;
            }
            p[i] = 0;
            let base = i - l;
            for s in self.low_terms() {
                p[base] ^= w << s;
                if s > 0 {
                    p[base + 1] ^= w >> (64 - s);
                }
            }
        }
    }
}

fn window_table(a: u64) -> [u128; 16] {
    let a = a as u128;
    let mut t = [0u128; 16];
    for i in 1..16 {
        t[i] = (t[i >> 1] << 1) ^ if i & 1 == 1 { a } else { 0 };
    }
    t
}

fn clmul_with_table(t: &[u128; 16], b: u64) -> u128 {
    let mut r = 0u128;
    for k in (0..16).rev() {
        r = (r << 4) ^ t[((b >> (4 * k)) & 15) as usize];
    }
    r
}

/// Carry-less 64x64 product, bit by bit. Reference for tests.
#[cfg(test)]
fn clmul_naive(a: u64, b: u64) -> u128 {
    let mut r = 0u128;
    for i in 0..64 {
        if (b >> i) & 1 == 1 {
            r ^= (a as u128) << i;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fields() -> [&'static BinaryField; 3] {
        [&GF2_896, &GF2_1024, &GF2_1536]
    }

    // Polynomials over GF(2) as little-endian bit vectors in u64 words.
    fn degree(p: &[u64]) -> Option<usize> {
        p.iter()
            .enumerate()
            .rev()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
    }

    fn xor_shifted(dst: &mut Vec<u64>, src: &[u64], shift: usize) {
        let words = shift / 64;
        let bits = shift % 64;
        let need = src.len() + words + 1;
        if dst.len() < need {
            dst.resize(need, 0);
        }
        for (i, &w) in src.iter().enumerate() {
            dst[i + words] ^= w << bits;
            if bits > 0 {
                dst[i + words + 1] ^= w >> (64 - bits);
            }
        }
    }

    fn poly_mod(mut a: Vec<u64>, m: &[u64]) -> Vec<u64> {
        let dm = degree(m).expect("nonzero modulus");
        while let Some(da) = degree(&a) {
            if da < dm {
                break;
            }
            xor_shifted(&mut a, m, da - dm);
        }
        a
    }

    fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>) -> Vec<u64> {
        while degree(&b).is_some() {
            let r = poly_mod(a, &b);
            a = b;
            b = r;
        }
        a
    }

    fn modulus(f: &BinaryField) -> Vec<u64> {
        let mut m = vec![0u64; f.limbs + 1];
        m[f.limbs] = 1;
        for s in f.low_terms() {
            m[0] ^= 1 << s;
        }
        m
    }

    fn x_pow_2k(f: &BinaryField, k: usize) -> Vec<u64> {
        let mut x = vec![0u64; f.limbs];
        x[0] = 2;
        for _ in 0..k {
            x = f.mul_limbs(&x, &x);
        }
        x
    }

    #[test]
    fn reduction_polynomials_are_irreducible() {
        // Rabin: f of degree n is irreducible iff x^(2^n) = x mod f and
        // gcd(x^(2^(n/p)) - x, f) = 1 for every prime p dividing n.
        for f in fields() {
            let n = f.degree();
            let mut x = vec![0u64; f.limbs];
            x[0] = 2;
            assert_eq!(x_pow_2k(f, n), x, "x^(2^n) != x for n = {n}");
            let primes: &[usize] = match n {
                896 => &[2, 7],
                1024 => &[2],
                1536 => &[2, 3],
                _ => unreachable!(),
            };
            for &p in primes {
                let mut h = x_pow_2k(f, n / p);
                h[0] ^= 2;
                let g = poly_gcd(modulus(f), h);
                assert_eq!(degree(&g), Some(0), "gcd not 1 for n = {n}, p = {p}");
            }
        }
    }

    #[test]
    fn windowed_clmul_matches_naive() {
        let cases = [
            (0u64, 0u64),
            (1, u64::MAX),
            (u64::MAX, u64::MAX),
            (0x8000_0000_0000_0001, 0x8000_0000_0000_0001),
            (0x0123_4567_89ab_cdef, 0xfedc_ba98_7654_3210),
        ];
        for (a, b) in cases {
            assert_eq!(clmul_with_table(&window_table(a), b), clmul_naive(a, b));
        }
    }

    #[test]
    fn one_is_identity() {
        for f in fields() {
            let mut one = vec![0u8; f.byte_len()];
            *one.last_mut().unwrap() = 1;
            let v: Vec<u8> = (0..f.byte_len()).map(|i| (i * 37 + 11) as u8).collect();
            assert_eq!(f.mul(&one, &v), v);
        }
    }

    #[test]
    fn top_bit_times_x_reduces() {
        // x^(n-1) * x = x^a + x^b + x^c + 1
        for f in fields() {
            let mut hi = vec![0u64; f.limbs];
            hi[f.limbs - 1] = 1 << 63;
            let mut x = vec![0u64; f.limbs];
            x[0] = 2;
            let mut want = vec![0u64; f.limbs];
            for s in f.low_terms() {
                want[0] |= 1 << s;
            }
            assert_eq!(f.mul_limbs(&hi, &x), want);
        }
    }

    proptest! {
        #[test]
        fn clmul_agrees(a in any::<u64>(), b in any::<u64>()) {
            prop_assert_eq!(clmul_with_table(&window_table(a), b), clmul_naive(a, b));
        }

        #[test]
        fn field_laws(seed in any::<u64>()) {
            use rand::{RngCore, SeedableRng};
            let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
            for f in fields() {
                let mut gen = || { let mut v = vec![0u8; f.byte_len()]; rng.fill_bytes(&mut v); v };
                let (a, b, c) = (gen(), gen(), gen());
                prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
                prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                let bc: Vec<u8> = b.iter().zip(&c).map(|(x, y)| x ^ y).collect();
                let lhs = f.mul(&a, &bc);
                let rhs: Vec<u8> = f.mul(&a, &b).iter().zip(f.mul(&a, &c)).map(|(x, y)| x ^ y).collect();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
