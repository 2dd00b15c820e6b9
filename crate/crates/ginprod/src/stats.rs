//! Aggregation of simulation output and comparison against the limiting
//! density.

use crate::ginibre::RealSpectrum;
use crate::theory::{density_limit, TheoryError};

/// Count statistics over a batch of samples. Variance is the unbiased
/// estimator (divisor L−1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error_mean: f64,
    pub var_over_mean: f64,
}

/// λ histogram with uniform bins. `density` integrates to one over the
/// retained mass; out-of-range values are counted in `dropped`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub dropped: u64,
}

impl Histogram {
    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.total_count() == 0
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum StatsError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid histogram range [{lo}, {hi}) with {bins} bins")]
    InvalidRange { lo: f64, hi: f64, bins: usize },
    #[error(transparent)]
    Theory(#[from] TheoryError),
}

/// Mean / variance / standard error of the per-sample real-eigenvalue counts.
pub fn summarize_counts(spectra: &[RealSpectrum]) -> Result<SummaryStats, StatsError> {
    if spectra.len() < 2 {
        return Err(StatsError::TooFewSamples(spectra.len()));
    }
    let n = spectra.len() as f64;
    let mean = spectra.iter().map(|s| s.count() as f64).sum::<f64>() / n;
    let ss = spectra
        .iter()
        .map(|s| {
            let d = s.count() as f64 - mean;
            d * d
        })
        .sum::<f64>();
    let variance = ss / (n - 1.0);
    Ok(SummaryStats {
        samples: spectra.len(),
        mean,
        variance,
        std_error_mean: (variance / n).sqrt(),
        var_over_mean: if mean == 0.0 { 0.0 } else { variance / mean },
    })
}

/// Histogram of all rescaled eigenvalues over [lo, hi). Bins are left-closed
/// right-open except the last, which also takes λ = hi. Values outside are
/// dropped (and counted).
pub fn histogram_lambda(
    spectra: &[RealSpectrum],
    bins: usize,
    lo: f64,
    hi: f64,
) -> Result<Histogram, StatsError> {
    if bins < 1 || lo >= hi || !lo.is_finite() || !hi.is_finite() {
        return Err(StatsError::InvalidRange { lo, hi, bins });
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut dropped = 0u64;
    for s in spectra {
        for &lam in &s.lambdas {
            if lam == hi {
                counts[bins - 1] += 1;
            } else if lam >= lo && lam < hi {
                let idx = (((lam - lo) / width) as usize).min(bins - 1);
                counts[idx] += 1;
            } else {
                dropped += 1;
            }
        }
    }
    let total: u64 = counts.iter().sum();
    let density = if total == 0 {
        vec![0.0; bins]
    } else {
        counts
            .iter()
            .map(|&c| c as f64 / (total as f64 * width))
            .collect()
    };
    let edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
    Ok(Histogram {
        edges,
        counts,
        density,
        dropped,
    })
}

/// Histogram-to-theory distances: sup over bins of |density − ρ̃_α(center)|,
/// and the Pearson χ² against expected bin masses (bins with zero expected
/// mass are skipped).
pub fn compare_to_density(h: &Histogram, alpha: f64) -> Result<(f64, f64), StatsError> {
    if alpha <= 0.0 {
        return Err(StatsError::Theory(TheoryError::NonPositiveAlpha(alpha)));
    }
    let mut sup = 0.0f64;
    for (center, &d) in h.centers().iter().zip(&h.density) {
        sup = sup.max((d - density_limit(*center, alpha)).abs());
    }
    // expected bin masses by fine trapezoid of the limiting density
    let total = h.total_count() as f64;
    let mut chi2 = 0.0;
    for (i, &count) in h.counts.iter().enumerate() {
        let (a, b) = (h.edges[i], h.edges[i + 1]);
        const STEPS: usize = 64;
        let step = (b - a) / STEPS as f64;
        let mut mass = 0.0;
        for k in 0..STEPS {
            let x0 = a + k as f64 * step;
            let x1 = x0 + step;
            mass += 0.5 * step * (density_limit(x0, alpha) + density_limit(x1, alpha));
        }
        let expected = total * mass;
        if expected > 0.0 {
            let d = count as f64 - expected;
            chi2 += d * d / expected;
        }
    }
    Ok((sup, chi2))
}
