//! Exact finite-size quantities at any even N and factor count m: the
//! coefficients b_{j,k}, the expected number of real eigenvalues, its
//! variance, and spectral moments.
//!
//! Everything reduces to sums of b_{j,k} values, each evaluated as a contour
//! integral of a gamma-ratio integrand along a vertical line:
//!
//! ```text
//! b_{j,k} = -(1/2πi) ∫ exp(m·[lnΓ(j−½+s) + lnΓ(k−s) − lnΓ(j−½) − lnΓ(k)]) / s ds
//! ```
//!
//! with Re s fixed inside the strip (½−j, 0). The gamma ratios are raised to
//! the power m entirely in log space; the quadrature uses composite
//! Gauss-Legendre panels that shrink geometrically toward the real axis,
//! where both the integrand peak and the 1/s pole live.

use crate::specfn::gamma::{ln_gamma_real, ln_gamma_unchecked};
use crate::specfn::{erf, SpecFnError};
use num_complex::Complex64;
use std::collections::HashMap;

/// Toleration for the contour-edge magnitude criterion, relative to the peak.
const EDGE_DECAY: f64 = 1e-18;

/// One b_{j,k} evaluation request. Indices are real: the rescaled moments
/// need second indices of the form j + k/m + 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BjkRequest {
    pub j: f64,
    pub k: f64,
    pub m: u32,
}

impl BjkRequest {
    pub fn new(j: f64, k: f64, m: u32) -> Result<Self, ExactError> {
        if j.is_nan() || j < 1.0 {
            return Err(ExactError::IndexOutOfRange {
                name: "j",
                value: j,
            });
        }
        if k.is_nan() || k <= 0.0 {
            return Err(ExactError::IndexOutOfRange {
                name: "k",
                value: k,
            });
        }
        if m < 1 {
            return Err(ExactError::InvalidFactorCount(m));
        }
        Ok(Self { j, k, m })
    }
}

/// Vertical-line quadrature controls for one b_{j,k} evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    /// Abscissa of the vertical contour, inside (½−j, 0).
    pub offset: f64,
    /// Truncation of |Im s|.
    pub half_height: f64,
    /// Geometric panels per half-line.
    pub panels: usize,
    /// Gauss-Legendre nodes per panel.
    pub nodes_per_panel: usize,
}

/// Exact statistics report for one (N, m) pair.
#[derive(Debug, Clone)]
pub struct ExactReport {
    pub n: usize,
    pub m: u32,
    pub expected_count: f64,
    pub variance: f64,
    /// (order, value) pairs; odd orders are identically zero.
    pub moments: Vec<(u32, f64)>,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum ExactError {
    #[error("index {name} out of range: {value}")]
    IndexOutOfRange { name: &'static str, value: f64 },
    #[error("factor count m must be >= 1, got {0}")]
    InvalidFactorCount(u32),
    #[error("contour offset {offset} outside the legal strip ({strip_lo}, 0)")]
    IllegalContour { offset: f64, strip_lo: f64 },
    #[error(
        "contour edge magnitude not below {EDGE_DECAY:e} of peak at half-height {half_height}"
    )]
    TruncationBound { half_height: f64 },
    #[error("contour quadrature produced a non-finite value for (j={j}, k={k}, m={m})")]
    NonFinite { j: f64, k: f64, m: u32 },
    #[error(
        "imaginary residual {imag:e} of the contour integral exceeds its tolerance \
         (real part {real:e})"
    )]
    ImaginaryResidual { real: f64, imag: f64 },
    #[error("matrix dimension must be even and >= 2, got {0}")]
    BadDimension(usize),
    #[error(transparent)]
    SpecFn(#[from] SpecFnError),
}

/// log-magnitude of the integrand at s = offset + iy, up to the constant
/// normalization; used for peak/edge comparisons without overflow.
fn ln_integrand_mag(req: &BjkRequest, norm: f64, offset: f64, y: f64) -> f64 {
    let s = Complex64::new(offset, y);
    let d = ln_gamma_unchecked(Complex64::new(req.j - 0.5, 0.0) + s)
        + ln_gamma_unchecked(Complex64::new(req.k, 0.0) - s);
    req.m as f64 * (d.re - norm) - s.norm().ln()
}

impl ContourSpec {
    /// Contour tailored to one request: offset at the integrand's interior
    /// saddle when it lies left of the axis, otherwise pushed toward 0 so
    /// that m·ln|ratio(offset)| stays O(1); half-height grown until the edge
    /// magnitude is below 1e-18 of the peak.
    pub fn for_request(req: &BjkRequest) -> Result<Self, ExactError> {
        let (j, k, m) = (req.j, req.k, req.m as f64);
        let saddle = (k - j + 0.5) / 2.0;
        let offset = if saddle <= -0.05 {
            saddle
        } else {
            // slope of the log-ratio at 0 is psi(j-1/2) - psi(k); an upper
            // estimate keeps m * slope * |offset| ~ 2
            let slope = ((j - 0.5) / k).ln().abs() + 0.5 / (j - 0.5) + 0.5 / k + 0.5;
            -(0.25 * 1.0f64.min(j - 0.5)).min(2.0 / (m * slope))
        };

        let norm = ln_gamma_real(j - 0.5) + ln_gamma_real(k);
        let peak = ln_integrand_mag(req, norm, offset, 0.0);
        let mut half_height = (2.0 / m).max(4.0 * offset.abs());
        let mut grown = 0;
        while ln_integrand_mag(req, norm, offset, half_height) - peak > EDGE_DECAY.ln() {
            half_height *= 2.0;
            grown += 1;
            if grown > 60 {
                return Err(ExactError::TruncationBound { half_height });
            }
        }

        let w0 = offset.abs().min(half_height / 8.0);
        let panels = 1 + (half_height / w0).log2().ceil().max(0.0) as usize;
        Ok(Self {
            offset,
            half_height,
            panels: panels.clamp(4, 64),
            nodes_per_panel: 32,
        })
    }

    /// Panel edges on [0, half_height]: 0, w0, 2·w0, 4·w0, ... with the
    /// finest width w0 = half_height / 2^(panels−1), so panels shrink
    /// geometrically toward the real axis.
    fn panel_edges(&self) -> Vec<f64> {
        let mut edges = Vec::with_capacity(self.panels + 1);
        edges.push(0.0);
        let mut e = self.half_height / 2f64.powi(self.panels as i32 - 1);
        while e < self.half_height {
            edges.push(e);
            e *= 2.0;
        }
        edges.push(self.half_height);
        edges
    }
}

/// One b_{j,k} coefficient by contour quadrature.
pub fn b_coeff(req: &BjkRequest, contour: &ContourSpec) -> Result<f64, ExactError> {
    b_coeff_complex(req, contour).map(|v| v.re)
}

/// Full complex quadrature value; the imaginary part is a conjugate-symmetry
/// residual that must stay at rounding level.
fn b_coeff_complex(req: &BjkRequest, contour: &ContourSpec) -> Result<Complex64, ExactError> {
    BjkRequest::new(req.j, req.k, req.m)?;
    let strip_lo = 0.5 - req.j;
    if !(contour.offset > strip_lo && contour.offset < 0.0) {
        return Err(ExactError::IllegalContour {
            offset: contour.offset,
            strip_lo,
        });
    }
    let norm = ln_gamma_real(req.j - 0.5) + ln_gamma_real(req.k);
    let peak = ln_integrand_mag(req, norm, contour.offset, 0.0);
    let edge = ln_integrand_mag(req, norm, contour.offset, contour.half_height);
    if edge - peak > EDGE_DECAY.ln() {
        return Err(ExactError::TruncationBound {
            half_height: contour.half_height,
        });
    }

    let m = req.m as f64;
    let jj = Complex64::new(req.j - 0.5, 0.0);
    let kk = Complex64::new(req.k, 0.0);
    let g = |y: f64| -> Complex64 {
        let s = Complex64::new(contour.offset, y);
        let d = ln_gamma_unchecked(jj + s) + ln_gamma_unchecked(kk - s) - norm;
        (m * d).exp() / s
    };

    let (xs, ws) = crate::specfn::gauss_legendre(contour.nodes_per_panel, -1.0, 1.0)
        .map(|r| (r.nodes, r.weights))?;
    let edges = contour.panel_edges();
    let mut total = Complex64::new(0.0, 0.0);
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for (&x, &w) in xs.iter().zip(&ws) {
            let y = mid + half * x;
            // both half-lines explicitly; conjugate symmetry is checked, not
            // assumed
            total += (half * w) * (g(y) + g(-y));
        }
    }
    // ds = i dy, so -(1/2pi i) * integral collapses to -(1/2pi) * sum
    let value = -total / (2.0 * std::f64::consts::PI);
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(ExactError::NonFinite {
            j: req.j,
            k: req.k,
            m: req.m,
        });
    }
    if value.im.abs() > 1e-6 * value.re.abs() + 1e-9 {
        return Err(ExactError::ImaginaryResidual {
            real: value.re,
            imag: value.im,
        });
    }
    Ok(value)
}

/// b_{j,k} with the automatically constructed contour.
pub fn b_coeff_auto(j: f64, k: f64, m: u32) -> Result<f64, ExactError> {
    let req = BjkRequest::new(j, k, m)?;
    let contour = ContourSpec::for_request(&req)?;
    b_coeff(&req, &contour)
}

/// Large-N limit of b_{j,k} at j = tN/2, k = j + l, m = αN:
/// ½·[1 + erf((2l+1)·√(α/8t))].
pub fn b_asymptotic(t: f64, l: i32, alpha: f64) -> f64 {
    assert!(t > 0.0 && t < 1.0, "t must lie in (0, 1)");
    assert!(alpha > 0.0, "alpha must be positive");
    0.5 * (1.0 + erf((2 * l + 1) as f64 * (alpha / (8.0 * t)).sqrt()))
}

/// Memoized b_{j,k} evaluations at fixed m, keyed by the index bits.
struct BTable {
    m: u32,
    map: HashMap<(u64, u64), f64>,
}

impl BTable {
    fn new(m: u32) -> Self {
        Self {
            m,
            map: HashMap::new(),
        }
    }

    fn get(&mut self, j: f64, k: f64) -> Result<f64, ExactError> {
        if let Some(&v) = self.map.get(&(j.to_bits(), k.to_bits())) {
            return Ok(v);
        }
        let v = b_coeff_auto(j, k, self.m)?;
        self.map.insert((j.to_bits(), k.to_bits()), v);
        Ok(v)
    }
}

fn check_dimension(n: usize) -> Result<(), ExactError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(ExactError::BadDimension(n));
    }
    Ok(())
}

/// Expected number of real eigenvalues:
/// E_N(m) = 2·Σ_{j=0}^{N/2−1} b_{j+1,j+1} − 2·Σ_{j=0}^{N/2−2} b_{j+2,j+1}.
pub fn expected_real_count(n: usize, m: u32) -> Result<f64, ExactError> {
    check_dimension(n)?;
    let mut table = BTable::new(m);
    expected_with(&mut table, n)
}

fn expected_with(table: &mut BTable, n: usize) -> Result<f64, ExactError> {
    let half = n / 2;
    let mut total = 0.0;
    for j in 0..half {
        total += 2.0 * table.get(j as f64 + 1.0, j as f64 + 1.0)?;
    }
    for j in 0..half.saturating_sub(1) {
        total -= 2.0 * table.get(j as f64 + 2.0, j as f64 + 1.0)?;
    }
    Ok(total)
}

/// Variance of the number of real eigenvalues, assembled as
/// V = 2E − 2·[2·Σ b_{p+1,q+1}b_{q+1,p+1} + 2·Σ b_{q+2,p+1}b_{p+2,q+1}
///            − 4·Σ b_{q+1,p+1}b_{p+2,q+1}].
pub fn variance_real_count(n: usize, m: u32) -> Result<f64, ExactError> {
    check_dimension(n)?;
    let mut table = BTable::new(m);
    let expected = expected_with(&mut table, n)?;
    let half = n / 2;

    let mut sum1 = 0.0;
    for p in 0..half {
        for q in 0..half {
            sum1 += table.get(p as f64 + 1.0, q as f64 + 1.0)?
                * table.get(q as f64 + 1.0, p as f64 + 1.0)?;
        }
    }
    let mut sum2 = 0.0;
    for p in 0..half.saturating_sub(1) {
        for q in 0..half.saturating_sub(1) {
            sum2 += table.get(q as f64 + 2.0, p as f64 + 1.0)?
                * table.get(p as f64 + 2.0, q as f64 + 1.0)?;
        }
    }
    let mut sum3 = 0.0;
    for p in 0..half.saturating_sub(1) {
        for q in 0..half {
            sum3 += table.get(q as f64 + 1.0, p as f64 + 1.0)?
                * table.get(p as f64 + 2.0, q as f64 + 1.0)?;
        }
    }
    Ok(2.0 * expected - 2.0 * (2.0 * sum1 + 2.0 * sum2 - 4.0 * sum3))
}

/// Spectral moment M_{order,N}(m) of the real-eigenvalue one-point function.
/// Odd orders vanish identically; order 0 is the expected count.
pub fn moment(n: usize, m: u32, order: u32) -> Result<f64, ExactError> {
    check_dimension(n)?;
    if !order.is_multiple_of(2) {
        return Ok(0.0);
    }
    let mut table = BTable::new(m);
    if order == 0 {
        return expected_with(&mut table, n);
    }
    let k = (order / 2) as f64;
    let mf = m as f64;
    let half = n / 2;
    let ln_scale = k * (2.0 / n as f64).ln();

    // each a-ratio term is a gamma-ratio power times a b coefficient,
    // assembled in log space
    let mut total = 0.0;
    for jj in 0..half {
        let j = jj as f64;
        let p1 = (mf * (ln_scale + ln_gamma_real(j + k + 1.0) - ln_gamma_real(j + 1.0))).exp()
            * table.get(j + 1.0, j + k + 1.0)?;
        let p2 = (mf * (ln_scale + ln_gamma_real(j + k + 0.5) - ln_gamma_real(j + 0.5))).exp()
            * table.get(j + k + 1.0, j + 1.0)?;
        total += p1 + p2;
    }
    for jj in 0..half.saturating_sub(1) {
        let j = jj as f64;
        let p3 = (mf * (ln_scale + ln_gamma_real(j + k + 1.0) - ln_gamma_real(j + 1.0))).exp()
            * table.get(j + 2.0, j + k + 1.0)?;
        let p4 = (mf * (ln_scale + ln_gamma_real(j + k + 1.5) - ln_gamma_real(j + 1.5))).exp()
            * table.get(j + k + 2.0, j + 1.0)?;
        total -= p3 + p4;
    }
    Ok(total)
}

/// Moment of the Lyapunov-rescaled spectrum, M̃_{order,N}(m); needs b at
/// non-integer second indices j + k/m + 1. Odd orders vanish; order 0
/// reproduces the expected count.
pub fn rescaled_moment(n: usize, m: u32, order: u32) -> Result<f64, ExactError> {
    check_dimension(n)?;
    if !order.is_multiple_of(2) {
        return Ok(0.0);
    }
    let mut table = BTable::new(m);
    if order == 0 {
        return expected_with(&mut table, n);
    }
    let k = (order / 2) as f64;
    let mf = m as f64;
    let km = k / mf;
    let half = n / 2;
    let ln_scale = k * (2.0 / n as f64).ln();

    let mut total = 0.0;
    for jj in 0..half {
        let j = jj as f64;
        let p1 = (ln_scale + mf * (ln_gamma_real(j + km + 1.0) - ln_gamma_real(j + 1.0))).exp()
            * table.get(j + 1.0, j + km + 1.0)?;
        let p2 = (ln_scale + mf * (ln_gamma_real(j + km + 0.5) - ln_gamma_real(j + 0.5))).exp()
            * table.get(j + km + 1.0, j + 1.0)?;
        total += p1 + p2;
    }
    for jj in 0..half.saturating_sub(1) {
        let j = jj as f64;
        let p3 = (ln_scale + mf * (ln_gamma_real(j + km + 1.0) - ln_gamma_real(j + 1.0))).exp()
            * table.get(j + 2.0, j + km + 1.0)?;
        let p4 = (ln_scale + mf * (ln_gamma_real(j + km + 1.5) - ln_gamma_real(j + 1.5))).exp()
            * table.get(j + km + 2.0, j + 1.0)?;
        total -= p3 + p4;
    }
    Ok(total)
}

/// Full report: expected count, variance, and even moments up to
/// `max_moment`.
pub fn exact_report(n: usize, m: u32, max_moment: u32) -> Result<ExactReport, ExactError> {
    let expected_count = expected_real_count(n, m)?;
    let variance = variance_real_count(n, m)?;
    let mut moments = Vec::new();
    for order in 0..=max_moment {
        moments.push((order, moment(n, m, order)?));
    }
    Ok(ExactReport {
        n,
        m,
        expected_count,
        variance,
        moments,
    })
}
