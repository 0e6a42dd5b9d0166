//! Sample means and normal-approximation confidence intervals.

/// z-score of a two-sided 95% interval.
pub const Z95: f64 = 1.96;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (`n - 1` denominator); zero for fewer than two samples.
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

/// Half-width `1.96 * sd / sqrt(n)`.
pub fn ci95(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    Z95 * sample_sd(xs) / (xs.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_interval() {
        // mean 5, squared deviations 9+1+1+9 = 20, sd = sqrt(20/3).
        let xs = [2.0, 4.0, 6.0, 8.0];
        assert_eq!(mean(&xs), 5.0);
        let want = 1.96 * (20.0f64 / 3.0).sqrt() / 2.0;
        assert!((ci95(&xs) - want).abs() < 1e-15);
        assert!((ci95(&xs) - 2.5303).abs() < 1e-4);
    }

    #[test]
    fn degenerate_samples() {
        assert_eq!(ci95(&[3.0]), 0.0);
        assert_eq!(ci95(&[]), 0.0);
        assert!(mean(&[]).is_nan());
        assert_eq!(ci95(&[1.0, 1.0, 1.0]), 0.0);
    }
}
