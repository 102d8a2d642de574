//! Chi-square tests and binomial bands.

use statrs::distribution::{ChiSquared, ContinuousCDF};

fn upper_tail(stat: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).expect("positive df").sf(stat)
}

/// Goodness of fit against the uniform distribution over the bins.
pub fn chi_square_uniform(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 || counts.len() < 2 {
        return 1.0;
    }
    let e = total as f64 / counts.len() as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
    upper_tail(stat, counts.len() - 1)
}

/// Two-sample homogeneity test on a 2 × B contingency table.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let total = na + nb;
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        bins += 1;
        let (ea, eb) = (col * na / total, col * nb / total);
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    upper_tail(stat, bins.saturating_sub(1))
}

/// Half-width of the `sigmas`-sigma binomial band around `p` for `n` trials.
pub fn binomial_half_width(p: f64, n: usize, sigmas: f64) -> f64 {
    sigmas * (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfectly_uniform_counts() {
        assert!((chi_square_uniform(&[100; 16]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn skewed_counts_reject() {
        let mut c = [100u64; 16];
        c[0] = 400;
        assert!(chi_square_uniform(&c) < 1e-6);
    }

    #[test]
    fn known_quantile() {
        // chi-square with 1 df: P[X > 3.841] is about 0.05
        let p = upper_tail(3.841_458_820_694_124, 1);
        assert!((p - 0.05).abs() < 1e-9);
    }

    #[test]
    fn homogeneity_detects_shift() {
        assert!(chi_square_homogeneity(&[50, 50], &[50, 50]) > 0.99);
        assert!(chi_square_homogeneity(&[90, 10], &[10, 90]) < 1e-6);
    }

    #[test]
    fn band_width() {
        // 3 sigma at p = 0.5, n = 1000 is about 0.047
        assert!((binomial_half_width(0.5, 1000, 3.0) - 0.047_434).abs() < 1e-5);
    }
}
