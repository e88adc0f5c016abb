use serde::Serialize;

/// z-quantile of the two-sided 95% normal interval.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation; `None` below two samples.
    pub std: Option<f64>,
    /// Half-width of the 95% confidence interval; `None` below two samples.
    pub ci_half: Option<f64>,
}

impl Stats {
    /// `None` for an empty sample.
    pub fn from_samples(xs: &[f64]) -> Option<Stats> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let (std, ci_half) = if xs.len() < 2 {
            (None, None)
        } else {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let std = var.sqrt();
            (Some(std), Some(Z95 * std / n.sqrt()))
        };
        Some(Stats {
            count: xs.len(),
            mean,
            std,
            ci_half,
        })
    }

    pub fn ci(&self) -> Option<(f64, f64)> {
        self.ci_half.map(|h| (self.mean - h, self.mean + h))
    }
}

/// Median of a sample; `None` when empty.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

/// Least-squares slope of `ys` against `xs`.
pub fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_two_three() {
        let s = Stats::from_samples(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std, Some(1.0));
        assert!((s.ci_half.unwrap() - 1.132).abs() < 5e-4);
    }

    #[test]
    fn equal_samples_have_zero_width() {
        let s = Stats::from_samples(&[4.5; 7]).unwrap();
        assert_eq!(s.ci_half, Some(0.0));
    }

    #[test]
    fn singleton_has_no_interval() {
        let s = Stats::from_samples(&[3.0]).unwrap();
        assert_eq!((s.std, s.ci_half), (None, None));
        assert!(Stats::from_samples(&[]).is_none());
    }

    #[test]
    fn median_and_slope() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert!((slope(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]) - 2.0).abs() < 1e-12);
    }
}
