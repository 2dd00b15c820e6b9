//! Monte Carlo engine: sample products of real Gaussian matrices and report
//! their real eigenvalues in the Lyapunov-rescaled variable
//! λ = sign(x)·|x|^(1/m).
//!
//! Per-sample spectra are computed from the *factored* product through a
//! cyclic Schur reduction; the product matrix itself is never formed there,
//! because forming it in double precision erases every eigenvalue with |λ|
//! below roughly ε^(1/m). The formed-product path ([`product_scaled`] plus
//! [`real_schur`]) is still part of the public surface and is exact at
//! small depth.

mod matrix;
mod schur;

pub use matrix::SquareMatrix;
pub use schur::real_schur;

use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// A matrix product kept at working scale: the represented product is
/// exp(log_scale) · matrix.
#[derive(Debug, Clone)]
pub struct ScaledProduct {
    pub matrix: SquareMatrix,
    pub log_scale: f64,
}

/// Real-eigenvalue report for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpectrum {
    pub sample_index: usize,
    /// Rescaled real eigenvalues λ = sign(x)·|x|^(1/m), in diagonal order.
    pub lambdas: Vec<f64>,
    /// Number of complex-conjugate eigenvalue pairs (discriminant-negative
    /// 2×2 blocks); count() + 2·complex_pairs equals the dimension.
    pub complex_pairs: usize,
}

impl RealSpectrum {
    /// Number of real eigenvalues; even whenever the dimension is even.
    pub fn count(&self) -> usize {
        self.lambdas.len()
    }
}

/// Simulation parameters. `m` may be given directly or derived from α as
/// round(αN), clamped to at least one factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub n: usize,
    pub m: u32,
    pub samples: usize,
    pub seed: u64,
    /// Renormalization cadence of the formed-product path.
    pub rescale_period: usize,
    /// Relative deflation threshold of the Schur iterations.
    pub schur_tol: f64,
    /// Iteration budget per eigenvalue window.
    pub schur_max_sweeps: u32,
    /// Worker threads for the sample loop; 0 uses the global pool.
    pub threads: usize,
}

impl SimulationConfig {
    pub fn new(n: usize, m: u32, samples: usize, seed: u64) -> Self {
        Self {
            n,
            m,
            samples,
            seed,
            rescale_period: 10,
            schur_tol: 1e-12,
            schur_max_sweeps: 300,
            threads: 0,
        }
    }

    /// Critical-regime constructor: m = round(αN), at least 1.
    pub fn with_alpha(n: usize, alpha: f64, samples: usize, seed: u64) -> Self {
        let m = (alpha * n as f64).round().max(1.0) as u32;
        Self::new(n, m, samples, seed)
    }

    pub fn validate(&self) -> Result<(), GinibreError> {
        if self.n < 2 || !self.n.is_multiple_of(2) {
            return Err(GinibreError::BadDimension(self.n));
        }
        if self.m < 1 {
            return Err(GinibreError::InvalidConfig("m must be >= 1".into()));
        }
        if self.samples == 0 {
            return Err(GinibreError::InvalidConfig("samples must be >= 1".into()));
        }
        if self.rescale_period == 0 {
            return Err(GinibreError::InvalidConfig(
                "rescale_period must be >= 1".into(),
            ));
        }
        if !(self.schur_tol > 0.0 && self.schur_tol <= 1e-6) {
            return Err(GinibreError::InvalidConfig(
                "schur_tol must lie in (0, 1e-6]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum GinibreError {
    #[error("matrix dimension must be even and >= 2, got {0}")]
    BadDimension(usize),
    #[error("matrix contains non-finite entries")]
    NonFiniteMatrix,
    #[error("Schur iteration exceeded {max_sweeps} sweeps on a window of size {window}")]
    SchurNonConvergence { max_sweeps: u32, window: usize },
    #[error("zero matrix encountered during renormalization")]
    ZeroMatrix,
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

/// A per-sample Schur failure: which sample, under which master seed.
#[derive(Debug, Clone)]
pub struct SampleFailure {
    pub sample_index: usize,
    pub seed: u64,
    pub error: GinibreError,
}

/// Simulation output: per-sample spectra in sample order, plus any excluded
/// samples (empty in healthy runs).
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub spectra: Vec<RealSpectrum>,
    pub failures: Vec<SampleFailure>,
}

/// The deterministic RNG stream of one sample: ChaCha with the sample index
/// as the stream number, so parallel scheduling cannot alter results.
pub fn sample_stream(seed: u64, sample_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index as u64);
    rng
}

/// One real Ginibre matrix: i.i.d. Normal(0, 1/N) entries.
pub fn sample_ginibre(n: usize, rng: &mut ChaCha8Rng) -> SquareMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    let normal = StandardNormal;
    SquareMatrix::from_rows(
        n,
        (0..n * n)
            .map(|_| {
                let g: f64 = normal.sample(rng);
                g * scale
            })
            .collect(),
    )
}

/// Product of `m` factors drawn from `factory`, renormalized by its max-abs
/// entry after every `period`-th factor; the extracted scale accumulates in
/// log_scale.
pub fn product_scaled_with(
    m: u32,
    period: usize,
    mut factory: impl FnMut(u32) -> SquareMatrix,
) -> Result<ScaledProduct, GinibreError> {
    let mut matrix = factory(0);
    let mut log_scale = 0.0;
    for i in 1..=m {
        if i > 1 {
            matrix = matrix.mul(&factory(i - 1));
        }
        if (i as usize).is_multiple_of(period) {
            let norm = matrix.max_abs();
            if norm == 0.0 {
                return Err(GinibreError::ZeroMatrix);
            }
            matrix.scale(1.0 / norm);
            log_scale += norm.ln();
        }
    }
    if !matrix.is_finite() {
        return Err(GinibreError::NonFiniteMatrix);
    }
    Ok(ScaledProduct { matrix, log_scale })
}

/// Product of `m` Gaussian factors from the given stream, renormalized every
/// `period` factors.
pub fn product_scaled(
    n: usize,
    m: u32,
    rng: &mut ChaCha8Rng,
    period: usize,
) -> Result<ScaledProduct, GinibreError> {
    product_scaled_with(m, period, |_| sample_ginibre(n, rng))
}

/// λ = sign·exp((ln|x| + log_scale)/m); exact zeros stay zero.
fn rescale_lambda(sign: f64, ln_abs: f64, log_scale: f64, m: u32) -> f64 {
    if ln_abs == f64::NEG_INFINITY {
        0.0
    } else {
        sign * ((ln_abs + log_scale) / m as f64).exp()
    }
}

/// Classify the diagonal blocks of a quasi-triangular matrix and rescale the
/// real eigenvalues of exp(log_scale)·T by the Lyapunov map.
///
/// 1×1 blocks contribute one real eigenvalue; 2×2 blocks contribute two when
/// their discriminant is nonnegative and none otherwise.
pub fn extract_real_spectrum(t: &SquareMatrix, log_scale: f64, m: u32) -> RealSpectrum {
    let n = t.dim();
    let mut lambdas = Vec::new();
    let mut complex_pairs = 0usize;
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let tr = t[(i, i)] + t[(i + 1, i + 1)];
            let det = t[(i, i)] * t[(i + 1, i + 1)] - t[(i, i + 1)] * t[(i + 1, i)];
            let disc = tr * tr - 4.0 * det;
            if disc < 0.0 {
                complex_pairs += 1;
            } else {
                for x in schur::real_pair(tr, det, disc) {
                    let ln_abs = if x == 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        x.abs().ln()
                    };
                    lambdas.push(rescale_lambda(
                        if x < 0.0 { -1.0 } else { 1.0 },
                        ln_abs,
                        log_scale,
                        m,
                    ));
                }
            }
            i += 2;
        } else {
            let x = t[(i, i)];
            let ln_abs = if x == 0.0 {
                f64::NEG_INFINITY
            } else {
                x.abs().ln()
            };
            lambdas.push(rescale_lambda(
                if x < 0.0 { -1.0 } else { 1.0 },
                ln_abs,
                log_scale,
                m,
            ));
            i += 1;
        }
    }
    RealSpectrum {
        sample_index: 0,
        lambdas,
        complex_pairs,
    }
}

/// One sample through the factored pipeline.
fn run_one(config: &SimulationConfig, sample_index: usize) -> Result<RealSpectrum, GinibreError> {
    let mut rng = sample_stream(config.seed, sample_index);
    let mut factors: Vec<SquareMatrix> = (0..config.m)
        .map(|_| sample_ginibre(config.n, &mut rng))
        .collect();
    schur::cyclic_hessenberg(&mut factors, None);
    schur::cyclic_francis(&mut factors, None, config.schur_tol, config.schur_max_sweeps)?;
    let (eigs, complex_pairs) = schur::cyclic_real_eigenvalues(&factors);
    let lambdas = eigs
        .iter()
        .map(|e| rescale_lambda(e.sign, e.ln_abs, 0.0, config.m))
        .collect();
    Ok(RealSpectrum {
        sample_index,
        lambdas,
        complex_pairs,
    })
}

/// Run the full simulation. Samples are independent; sample i draws from the
/// ChaCha stream (seed, i), so results are identical no matter how the work
/// is scheduled. Output is ordered by sample index. Samples whose Schur
/// iteration fails are excluded and reported in `failures`.
pub fn run_simulation(config: &SimulationConfig) -> Result<SimulationRun, GinibreError> {
    config.validate()?;
    let work = || -> Vec<Result<RealSpectrum, GinibreError>> {
        (0..config.samples)
            .into_par_iter()
            .map(|i| run_one(config, i))
            .collect()
    };
    let results = if config.threads == 0 {
        work()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.threads)
            .build()
            .map_err(|e| GinibreError::InvalidConfig(e.to_string()))?;
        pool.install(work)
    };
    let mut spectra = Vec::with_capacity(config.samples);
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => spectra.push(s),
            Err(error) => failures.push(SampleFailure {
                sample_index: i,
                seed: config.seed,
                error,
            }),
        }
    }
    Ok(SimulationRun { spectra, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_entry_statistics() {
        let n = 10;
        let mut rng = sample_stream(42, 0);
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let entries = 100_000;
        let mats = entries / (n * n);
        for _ in 0..mats {
            let m = sample_ginibre(n, &mut rng);
            for &v in m.values() {
                sum += v;
                sum2 += v * v;
            }
        }
        let count = (mats * n * n) as f64;
        let mean = sum / count;
        let var = sum2 / count - mean * mean;
        // mean within 4 sigma of 0; sigma of the mean is 1/sqrt(N*count)
        assert!(mean.abs() < 4.0 / (count * n as f64).sqrt(), "mean={mean}");
        assert!((var - 1.0 / n as f64).abs() < 0.05 / n as f64, "var={var}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_ginibre(6, &mut sample_stream(7, 3));
        let b = sample_ginibre(6, &mut sample_stream(7, 3));
        assert_eq!(a, b);
        let c = sample_ginibre(6, &mut sample_stream(7, 4));
        assert_ne!(a, c);
    }

    #[test]
    fn identity_factors_hook() {
        let p = product_scaled_with(5, 10, |_| SquareMatrix::identity(4)).unwrap();
        assert_eq!(p.matrix, SquareMatrix::identity(4));
        assert_eq!(p.log_scale, 0.0);
    }

    #[test]
    fn single_factor_is_plain_sample() {
        let direct = sample_ginibre(6, &mut sample_stream(11, 0));
        let p = product_scaled(6, 1, &mut sample_stream(11, 0), 10).unwrap();
        assert_eq!(p.matrix, direct);
        assert_eq!(p.log_scale, 0.0);
    }

    #[test]
    fn zero_matrix_detected() {
        let r = product_scaled_with(2, 1, |_| SquareMatrix::zeros(3));
        assert!(matches!(r, Err(GinibreError::ZeroMatrix)));
    }

    #[test]
    fn renormalization_bounds_entries() {
        let mut rng = sample_stream(5, 0);
        let p = product_scaled(10, 40, &mut rng, 5).unwrap();
        // the last renormalization lands on factor 40, so the final matrix
        // has unit max-abs
        assert!((p.matrix.max_abs() - 1.0).abs() < 1e-12);
        assert!(p.log_scale.is_finite());
    }

    #[test]
    fn rescale_period_neutral_for_eigenvalues() {
        // depth shallow enough that the formed product is numerically exact
        let n = 10;
        let m = 6;
        let spectra: Vec<RealSpectrum> = [1usize, 5, 50]
            .iter()
            .map(|&period| {
                let mut rng = sample_stream(123, 0);
                let p = product_scaled(n, m, &mut rng, period).unwrap();
                let (_, t) = real_schur(&p.matrix, 1e-12, 60).unwrap();
                extract_real_spectrum(&t, p.log_scale, m)
            })
            .collect();
        for s in &spectra[1..] {
            assert_eq!(s.count(), spectra[0].count());
            for (a, b) in s.lambdas.iter().zip(&spectra[0].lambdas) {
                assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn extract_simple_diagonals() {
        // diag(0.25), m = 2: lambda = 0.5
        let t = SquareMatrix::diagonal(&[0.25]);
        let s = extract_real_spectrum(&t, 0.0, 2);
        assert_eq!(s.lambdas, vec![0.5]);
        // diag(-8), m = 3: lambda = -2 (sign convention)
        let t = SquareMatrix::diagonal(&[-8.0]);
        let s = extract_real_spectrum(&t, 0.0, 3);
        assert!((s.lambdas[0] + 2.0).abs() < 1e-15);
        // rotation block: complex pair, no real eigenvalues
        let t = SquareMatrix::from_rows(2, vec![0.0, -1.0, 1.0, 0.0]);
        let s = extract_real_spectrum(&t, 0.0, 1);
        assert_eq!(s.count(), 0);
        assert_eq!(s.complex_pairs, 1);
        // zero diagonal maps to lambda = 0
        let t = SquareMatrix::diagonal(&[0.0, 3.0]);
        let s = extract_real_spectrum(&t, 0.5, 4);
        assert_eq!(s.lambdas[0], 0.0);
    }

    #[test]
    fn log_scale_shifts_magnitudes() {
        let t = SquareMatrix::diagonal(&[1.0]);
        let s = extract_real_spectrum(&t, 2.0_f64.ln() * 4.0, 4);
        assert!((s.lambdas[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn simulation_counts_are_even_and_paired() {
        for &(n, m) in &[(2usize, 1u32), (4, 2), (10, 7), (50, 10)] {
            let mut config = SimulationConfig::new(n, m, 8, 2024);
            config.threads = 1;
            let run = run_simulation(&config).unwrap();
            assert!(run.failures.is_empty());
            assert_eq!(run.spectra.len(), 8);
            for (i, s) in run.spectra.iter().enumerate() {
                assert_eq!(s.sample_index, i);
                assert_eq!(s.count() % 2, 0, "odd count at n={n} m={m}");
                assert_eq!(s.count() + 2 * s.complex_pairs, n);
                assert!(s.lambdas.iter().all(|l| l.is_finite()));
            }
        }
    }

    #[test]
    fn simulation_deterministic_across_thread_counts() {
        let mut config = SimulationConfig::new(10, 5, 12, 99);
        config.threads = 1;
        let a = run_simulation(&config).unwrap();
        config.threads = 4;
        let b = run_simulation(&config).unwrap();
        assert_eq!(a.spectra.len(), b.spectra.len());
        for (x, y) in a.spectra.iter().zip(&b.spectra) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn alpha_rounding() {
        assert_eq!(SimulationConfig::with_alpha(50, 1.0, 1, 0).m, 50);
        assert_eq!(SimulationConfig::with_alpha(50, 0.01, 1, 0).m, 1);
        assert_eq!(SimulationConfig::with_alpha(10, 0.26, 1, 0).m, 3);
    }

    #[test]
    fn config_validation() {
        assert!(SimulationConfig::new(3, 1, 1, 0).validate().is_err());
        assert!(SimulationConfig::new(4, 0, 1, 0).validate().is_err());
        assert!(SimulationConfig::new(4, 1, 0, 0).validate().is_err());
        let mut c = SimulationConfig::new(4, 1, 1, 0);
        c.schur_tol = 1e-3;
        assert!(c.validate().is_err());
        assert!(SimulationConfig::new(4, 1, 1, 0).validate().is_ok());
    }
}
