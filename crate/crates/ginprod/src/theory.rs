//! Limiting statistics in the critical regime m = αN.
//!
//! Three scalar functions of α and one density:
//!
//! * `c(α)`: limiting fraction of real eigenvalues, available both as a
//!   closed form and as the defining integral ∫₀¹ erf(√(α/8t)) dt.
//! * `s(α)`: the variance-reduction integral, as the squared Gaussian
//!   cell-probability sum and as an equivalent erf-product sum.
//! * `r(α) = 2 − 2 s(α)/c(α)`: limiting variance over mean.
//! * the rescaled eigenvalue density on (−1, 1), interpolating between the
//!   constant 1/2 and the triangular law |λ|.
//!
//! The dual representations are kept deliberately; tests hold them against
//! each other.

use crate::specfn::{erf, erfc, integrate_unit, SpecFnError};

/// Limiting quantities at one value of α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryPoint {
    pub alpha: f64,
    pub c: f64,
    pub s: f64,
    pub r: f64,
}

/// Tabulated rescaled density on a symmetric uniform grid over [−1, 1].
#[derive(Debug, Clone)]
pub struct DensityCurve {
    pub lambdas: Vec<f64>,
    pub values: Vec<f64>,
    pub alpha: f64,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum TheoryError {
    #[error("alpha must be finite and nonnegative, got {0}")]
    NegativeAlpha(f64),
    #[error("alpha must be strictly positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("alpha = {0} is below the asymptotic regime (requires alpha >= 20)")]
    BelowExpansionRegime(f64),
    #[error("grid must have an odd number of points >= 3, got {0}")]
    InvalidGrid(usize),
    #[error(transparent)]
    Quadrature(#[from] SpecFnError),
}

/// Closed form of the limiting real-eigenvalue fraction:
/// c(α) = (1 + α/4)·erf(√(α/8)) − α/4 + √(α/(2π))·e^(−α/8).
pub fn c_closed(alpha: f64) -> Result<f64, TheoryError> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(TheoryError::NegativeAlpha(alpha));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    let q = alpha / 4.0;
    Ok((1.0 + q) * erf((alpha / 8.0).sqrt()) - q
        + (alpha / (2.0 * std::f64::consts::PI)).sqrt() * (-alpha / 8.0).exp())
}

/// Integral form of c(α): ∫₀¹ erf(√(α/8t)) dt, to absolute tolerance 1e-11.
pub fn c_integral(alpha: f64) -> Result<f64, TheoryError> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(TheoryError::NonPositiveAlpha(alpha));
    }
    Ok(integrate_unit(|t| erf((alpha / (8.0 * t)).sqrt()), 1e-11)?)
}

/// Leading-order tail 1 − c(α) ≈ 16·√(2/π)·e^(−α/8)·α^(−3/2), valid for
/// α ≥ 20. The omitted correction is relative order 24/α.
pub fn c_tail_residual(alpha: f64) -> Result<f64, TheoryError> {
    if alpha.is_nan() || alpha < 20.0 {
        return Err(TheoryError::BelowExpansionRegime(alpha));
    }
    Ok(16.0 * (2.0 / std::f64::consts::PI).sqrt() * (-alpha / 8.0).exp() / alpha.powf(1.5))
}

/// erf(b) − erf(a) without cancellation when both arguments sit deep in the
/// same tail.
fn erf_diff(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        erfc(a) - erfc(b)
    } else if a < 0.0 && b < 0.0 {
        erfc(-b) - erfc(-a)
    } else {
        erf(b) - erf(a)
    }
}

/// Integrand of s(α): Σ_k Pr(2k−1 ≤ X ≤ 2k+1)² with X ~ Normal(0, 4t/α),
/// truncated where the Gaussian tail is below 1e-16.
fn s_cell_sum(u: f64) -> f64 {
    // Pr(2k−1 ≤ X ≤ 2k+1) = ½·[erf((2k+1)u) − erf((2k−1)u)], u = √(α/8t)
    let p0 = erf(u);
    let mut total = p0 * p0;
    let mut k = 1u64;
    loop {
        let lo = (2 * k - 1) as f64 * u;
        let hi = (2 * k + 1) as f64 * u;
        let p = 0.5 * erf_diff(lo, hi);
        total += 2.0 * p * p;
        if erfc(lo) < 1e-16 {
            break;
        }
        k += 1;
    }
    total
}

/// s(α) from its defining representation, ∫₀¹ Σ_k Pr(...)² dt.
pub fn s_direct(alpha: f64) -> Result<f64, TheoryError> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(TheoryError::NonPositiveAlpha(alpha));
    }
    Ok(integrate_unit(
        |t| s_cell_sum((alpha / (8.0 * t)).sqrt()),
        1e-11,
    )?)
}

/// Integrand of the equivalent erf-product form of s(α):
/// ½·Σ_k erf((2k−1)u)·[erf((2k−1)u) − erf((2k+1)u)].
fn s_alt_sum(u: f64) -> f64 {
    let kmax = {
        let mut k = 1i64;
        while erfc((2 * k - 1) as f64 * u) >= 1e-16 {
            k += 1;
        }
        k
    };
    let mut total = 0.0;
    for k in -kmax..=kmax {
        let a = (2 * k - 1) as f64 * u;
        let b = (2 * k + 1) as f64 * u;
        total += erf(a) * -erf_diff(a, b);
    }
    0.5 * total
}

/// s(α) from the equivalent representation; must agree with [`s_direct`].
pub fn s_alt(alpha: f64) -> Result<f64, TheoryError> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(TheoryError::NonPositiveAlpha(alpha));
    }
    Ok(integrate_unit(
        |t| s_alt_sum((alpha / (8.0 * t)).sqrt()),
        1e-11,
    )?)
}

/// Limiting variance-to-mean ratio r(α) = 2 − 2·s(α)/c(α).
pub fn r_ratio(alpha: f64) -> Result<f64, TheoryError> {
    let c = c_closed(alpha)?;
    if c == 0.0 {
        return Err(TheoryError::NonPositiveAlpha(alpha));
    }
    Ok(2.0 - 2.0 * s_direct(alpha)? / c)
}

/// All three limiting quantities at one α.
pub fn theory_point(alpha: f64) -> Result<TheoryPoint, TheoryError> {
    let c = c_closed(alpha)?;
    if c == 0.0 {
        return Err(TheoryError::NonPositiveAlpha(alpha));
    }
    let s = s_direct(alpha)?;
    Ok(TheoryPoint {
        alpha,
        c,
        s,
        r: 2.0 - 2.0 * s / c,
    })
}

/// Limiting rescaled density: |λ|·erf(√(α/8)/|λ|)/c(α) on (−1, 1), zero
/// outside and at the origin.
pub fn density_limit(lambda: f64, alpha: f64) -> f64 {
    assert!(alpha > 0.0, "density_limit requires alpha > 0");
    let a = lambda.abs();
    if a >= 1.0 || a == 0.0 {
        return 0.0;
    }
    let c = c_closed(alpha).expect("alpha validated above");
    a * erf((alpha / 8.0).sqrt() / a) / c
}

/// Tabulate the rescaled density on a uniform odd-size grid over [−1, 1].
///
/// The edge nodes λ = ±1 carry the inside limit of the density rather than
/// the indicator value 0, so the trapezoid mass of the table reproduces the
/// unit normalization (within 1e-6 for grids of 2001+ points).
pub fn density_curve(alpha: f64, grid_points: usize) -> Result<DensityCurve, TheoryError> {
    if grid_points < 3 || grid_points.is_multiple_of(2) {
        return Err(TheoryError::InvalidGrid(grid_points));
    }
    let c = c_closed(alpha)?;
    if c == 0.0 {
        return Err(TheoryError::NonPositiveAlpha(alpha));
    }
    let n = grid_points;
    let mut lambdas = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let half = (n - 1) / 2;
    for i in 0..n {
        let lam = (i as f64 - half as f64) / half as f64;
        let a = lam.abs();
        let v = if a == 0.0 {
            0.0
        } else {
            a * erf((alpha / 8.0).sqrt() / a) / c
        };
        lambdas.push(lam);
        values.push(v);
    }
    Ok(DensityCurve {
        lambdas,
        values,
        alpha,
    })
}

impl DensityCurve {
    /// Trapezoid integral over the tabulated grid.
    pub fn trapezoid_mass(&self) -> f64 {
        let mut acc = 0.0;
        for w in self.lambdas.windows(2).zip(self.values.windows(2)) {
            let (l, v) = w;
            acc += 0.5 * (l[1] - l[0]) * (v[0] + v[1]);
        }
        acc
    }
}
