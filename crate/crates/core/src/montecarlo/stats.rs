//! Drop-level aggregation.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Sample mean over drops with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_drops: usize,
    /// False when a single drop leaves the spread unidentified; `std_error`
    /// is then 0.
    pub std_error_available: bool,
}

impl MonteCarloEstimate {
    /// Whether `target` lies within `k` standard errors of the mean.
    pub fn within_sigmas(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.std_error
    }

    pub fn relative_error(&self, target: f64) -> f64 {
        ((self.mean - target) / target).abs()
    }
}

pub fn mean_estimate(xs: &[f64]) -> MonteCarloEstimate {
    let n = xs.len();
    assert!(n >= 1, "at least one drop");
    let mean = compensated_sum(xs.iter().copied()) / n as f64;
    if n == 1 {
        return MonteCarloEstimate {
            mean,
            std_error: 0.0,
            n_drops: 1,
            std_error_available: false,
        };
    }
    let ss = compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    let var = ss / (n - 1) as f64;
    MonteCarloEstimate {
        mean,
        std_error: (var / n as f64).sqrt(),
        n_drops: n,
        std_error_available: true,
    }
}

/// `Σnum / Σden` with a delta-method standard error.
pub fn ratio_estimate(num: &[f64], den: &[f64]) -> MonteCarloEstimate {
    assert_eq!(num.len(), den.len());
    let n = num.len();
    assert!(n >= 1, "at least one drop");
    let mn = compensated_sum(num.iter().copied()) / n as f64;
    let md = compensated_sum(den.iter().copied()) / n as f64;
    let ratio = mn / md;
    if n == 1 {
        return MonteCarloEstimate {
            mean: ratio,
            std_error: 0.0,
            n_drops: 1,
            std_error_available: false,
        };
    }
    let ss = compensated_sum(num.iter().zip(den).map(|(a, b)| {
        let r = a - ratio * b;
        r * r
    }));
    let var = ss / (n - 1) as f64;
    MonteCarloEstimate {
        mean: ratio,
        std_error: (var / n as f64).sqrt() / md.abs(),
        n_drops: n,
        std_error_available: true,
    }
}
