use serde::{Deserialize, Serialize};

/// Median of a sample (mean of the two middle values for even sizes).
/// `NaN` for an empty sample.
pub fn median(v: &[f64]) -> f64 {
    quantile(v, 0.5)
}

/// Linear-interpolation quantile (the "type 7" rule).
pub fn quantile(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let h = (s.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
    /// One-sided p-value against "positive differences are no more likely
    /// than negative ones".
    pub p_greater: f64,
    pub p_two_sided: f64,
}

/// `P(X >= k)` for `X ~ Binomial(n, 1/2)`.
fn binom_upper_half(n: usize, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    // accumulate C(n, i) / 2^n in log space
    let ln2n = n as f64 * std::f64::consts::LN_2;
    let mut ln_c = 0.0; // ln C(n, 0)
    let mut total = 0.0;
    for i in 0..=n {
        if i > 0 {
            ln_c += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        if i >= k {
            total += (ln_c - ln2n).exp();
        }
    }
    total.min(1.0)
}

/// Sign test on paired differences; zero differences are dropped.
pub fn sign_test(diffs: &[f64]) -> SignTest {
    let n_pos = diffs.iter().filter(|&&d| d > 0.0).count();
    let n_neg = diffs.iter().filter(|&&d| d < 0.0).count();
    let n = n_pos + n_neg;
    let p_greater = binom_upper_half(n, n_pos);
    let p_two_sided = (2.0 * binom_upper_half(n, n_pos.max(n_neg))).min(1.0);
    SignTest {
        n_pos,
        n_neg,
        n_zero: diffs.len() - n,
        p_greater,
        p_two_sided,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.25), 2.0);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn sign_test_exact_values() {
        // 15 of 20 positive: P(X >= 15) = 21700 / 2^20
        let d: Vec<f64> = (0..20).map(|i| if i < 15 { 1.0 } else { -1.0 }).collect();
        let t = sign_test(&d);
        assert!((t.p_greater - 21_700.0 / 1_048_576.0).abs() < 1e-14);
        assert!((t.p_two_sided - 2.0 * 21_700.0 / 1_048_576.0).abs() < 1e-14);
        let t = sign_test(&[0.0, 1.0, -1.0]);
        assert_eq!((t.n_pos, t.n_neg, t.n_zero), (1, 1, 1));
        assert_eq!(t.p_two_sided, 1.0);
        assert_eq!(sign_test(&[]).p_greater, 1.0);
    }
}
