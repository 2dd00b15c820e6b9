//! Real Schur reduction, for a single matrix and for a cyclic sequence of
//! factors.
//!
//! The cyclic form keeps a product X₀·X₁⋯X_{m−1} factored: orthogonal bases
//! Z_i turn factor 0 into an upper Hessenberg matrix and every other factor
//! into an upper triangular one, so the product itself is similar to a
//! Hessenberg matrix that is never formed. A Francis-style implicit
//! double-shift iteration then drives factor 0 to quasi-triangular form by
//! routing every rotation around the cycle. Eigenvalues of the product come
//! out as products of per-factor diagonal entries, accumulated in log
//! space. That is the whole point: the product of many factors has
//! eigenvalues far below the floating-point noise floor of any explicitly
//! formed product.
//!
//! With a single factor the same code is the ordinary Hessenberg reduction
//! followed by Francis double-shift QR.

use super::matrix::SquareMatrix;
use super::GinibreError;

/// (c, s) with c·a − s·b = r and s·a + c·b = 0.
#[inline]
fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        return (1.0, 0.0);
    }
    let r = a.hypot(b);
    (a / r, -b / r)
}

/// Apply a left rotation (rows i, i+1) to factor 0 as a basis change of Z₀,
/// then chase it around the cycle until it returns as a right rotation on
/// factor 0. Triangular factors are re-triangularized on the way with one
/// compensating rotation each. `q`, when present, accumulates Z₀.
fn cycle_rotation(
    factors: &mut [SquareMatrix],
    q: Option<&mut SquareMatrix>,
    c: f64,
    s: f64,
    i: usize,
    col_from: usize,
) {
    let n = factors[0].dim();
    factors[0].rot_left(c, s, i, col_from);
    if let Some(q) = q {
        q.rot_right(c, s, i, n);
    }
    let (mut cc, mut ss) = (c, s);
    for idx in (1..factors.len()).rev() {
        let r = &mut factors[idx];
        r.rot_right(cc, ss, i, i + 2);
        let (c2, s2) = givens(r[(i, i)], r[(i + 1, i)]);
        r.rot_left(c2, s2, i, i);
        r[(i + 1, i)] = 0.0;
        cc = c2;
        ss = s2;
    }
    factors[0].rot_right(cc, ss, i, n);
}

/// Householder QR of `factors[idx]` in place (result upper triangular),
/// applying the orthogonal factor to `factors[idx−1]` from the right.
fn triangularize_factor(factors: &mut [SquareMatrix], idx: usize) {
    let n = factors[0].dim();
    let mut v = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let (left, right) = factors.split_at_mut(idx);
        let a = &mut right[0];
        let mut norm2 = 0.0;
        for r in k..n {
            norm2 += a[(r, k)] * a[(r, k)];
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[(k, k)] >= 0.0 { -norm } else { norm };
        v[k] = a[(k, k)] - alpha;
        for r in k + 1..n {
            v[r] = a[(r, k)];
        }
        let vnorm2 = v[k..n].iter().map(|x| x * x).sum::<f64>();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        // a <- (I - tau v v^T) a
        for col in k..n {
            let mut dot = 0.0;
            for r in k..n {
                dot += v[r] * a[(r, col)];
            }
            let dot = tau * dot;
            for r in k..n {
                a[(r, col)] -= dot * v[r];
            }
        }
        for r in k + 1..n {
            a[(r, k)] = 0.0;
        }
        // neighbor <- neighbor (I - tau v v^T)
        let b = &mut left[idx - 1];
        for row in 0..n {
            let mut dot = 0.0;
            for r in k..n {
                dot += b[(row, r)] * v[r];
            }
            let dot = tau * dot;
            for r in k..n {
                b[(row, r)] -= dot * v[r];
            }
        }
    }
}

/// Reduce factors to cyclic Hessenberg-triangular form: factor 0 upper
/// Hessenberg, factors 1.. upper triangular.
pub(crate) fn cyclic_hessenberg(factors: &mut [SquareMatrix], mut q: Option<&mut SquareMatrix>) {
    let n = factors[0].dim();
    for idx in (1..factors.len()).rev() {
        triangularize_factor(factors, idx);
    }
    for col in 0..n.saturating_sub(2) {
        for row in ((col + 2)..n).rev() {
            if factors[0][(row, col)] == 0.0 {
                continue;
            }
            let (c, s) = givens(factors[0][(row - 1, col)], factors[0][(row, col)]);
            cycle_rotation(factors, q.as_deref_mut(), c, s, row - 1, col);
            factors[0][(row, col)] = 0.0;
        }
    }
}

/// Product of the (lo..hi) diagonal blocks of all factors, rescaled to unit
/// max-abs with the natural log of the scale returned separately. Block size
/// is at most 3.
fn scaled_block_product(factors: &[SquareMatrix], lo: usize, hi: usize) -> ([[f64; 3]; 3], f64) {
    let sz = hi - lo;
    debug_assert!((1..=3).contains(&sz));
    let mut b = [[0.0f64; 3]; 3];
    for r in 0..sz {
        for c in 0..sz {
            b[r][c] = factors[0][(lo + r, lo + c)];
        }
    }
    let mut ln_scale = 0.0;
    let mut renorm = |b: &mut [[f64; 3]; 3]| -> bool {
        let mut nrm = 0.0f64;
        for row in b.iter().take(sz) {
            for &x in row.iter().take(sz) {
                nrm = nrm.max(x.abs());
            }
        }
        if nrm == 0.0 {
            return false;
        }
        for row in b.iter_mut().take(sz) {
            for x in row.iter_mut().take(sz) {
                *x /= nrm;
            }
        }
        ln_scale += nrm.ln();
        true
    };
    if !renorm(&mut b) {
        return (b, f64::NEG_INFINITY);
    }
    for f in &factors[1..] {
        let mut out = [[0.0f64; 3]; 3];
        for r in 0..sz {
            for c in 0..sz {
                let mut acc = 0.0;
                for k in 0..sz {
                    acc += b[r][k] * f[(lo + k, lo + c)];
                }
                out[r][c] = acc;
            }
        }
        b = out;
        if !renorm(&mut b) {
            return (b, f64::NEG_INFINITY);
        }
    }
    (b, ln_scale)
}

/// One implicit double-shift sweep on the window [lo, p) of the cyclic form.
fn francis_sweep(
    factors: &mut [SquareMatrix],
    mut q: Option<&mut SquareMatrix>,
    lo: usize,
    p: usize,
    exceptional: bool,
) {
    debug_assert!(p - lo >= 3);
    let (a3, ea) = scaled_block_product(factors, lo, lo + 3);
    let (b3, eb) = scaled_block_product(factors, p - 3, p);
    let (t00, t01, t10, t11) = (b3[1][1], b3[1][2], b3[2][1], b3[2][2]);
    let (shift_tr, shift_det) = if exceptional {
        // ad-hoc stall breaker built from the subdiagonal magnitudes
        let w = b3[2][1].abs() + b3[1][0].abs();
        let d = 0.75 * w + b3[2][2];
        (2.0 * d, d * d + 0.4375 * w * w)
    } else {
        (t00 + t11, t00 * t11 - t01 * t10)
    };

    // first column of (P − λ₁)(P − λ₂)e₁ on the window, with the leading
    // block and the shifts carrying different log scales
    let emax = ea.max(eb);
    let fa = if ea == f64::NEG_INFINITY {
        0.0
    } else {
        (ea - emax).exp()
    };
    let fb = if eb == f64::NEG_INFINITY {
        0.0
    } else {
        (eb - emax).exp()
    };
    let (a00, a01, a10, a11, a21) = (a3[0][0], a3[0][1], a3[1][0], a3[1][1], a3[2][1]);
    let v0 = fa * fa * (a00 * a00 + a01 * a10) - fb * fa * shift_tr * a00 + fb * fb * shift_det;
    let v1 = fa * fa * (a10 * (a00 + a11)) - fb * fa * shift_tr * a10;
    let v2 = fa * fa * (a10 * a21);

    let (mut x, mut y, mut z) = (v0, v1, v2);
    for k in lo..p - 2 {
        if k > lo {
            x = factors[0][(k, k - 1)];
            y = factors[0][(k + 1, k - 1)];
            z = if k + 2 < p {
                factors[0][(k + 2, k - 1)]
            } else {
                0.0
            };
        }
        // rotate (x, y, z) to (r, 0, 0): rows (k+1, k+2) first, then (k, k+1)
        let (c1, s1) = givens(y, z);
        let y_rot = c1 * y - s1 * z;
        let (c0, s0) = givens(x, y_rot);
        let col_from = if k > lo { k - 1 } else { k };
        cycle_rotation(factors, q.as_deref_mut(), c1, s1, k + 1, col_from);
        cycle_rotation(factors, q.as_deref_mut(), c0, s0, k, col_from);
        if k > lo {
            factors[0][(k + 1, k - 1)] = 0.0;
            if k + 2 < p {
                factors[0][(k + 2, k - 1)] = 0.0;
            }
        }
    }
    // remove the last bulge entry below the subdiagonal
    let (c, s) = givens(factors[0][(p - 2, p - 3)], factors[0][(p - 1, p - 3)]);
    cycle_rotation(factors, q, c, s, p - 2, p - 3);
    factors[0][(p - 1, p - 3)] = 0.0;
}

/// Drive the cyclic Hessenberg-triangular form to quasi-triangular factor 0.
///
/// `tol` is the relative deflation threshold on the Hessenberg subdiagonal;
/// `max_sweeps` bounds the iterations spent on any one eigenvalue window.
pub(crate) fn cyclic_francis(
    factors: &mut [SquareMatrix],
    mut q: Option<&mut SquareMatrix>,
    tol: f64,
    max_sweeps: u32,
) -> Result<(), GinibreError> {
    let n = factors[0].dim();
    let mut p = n;
    let mut iters = 0u32;
    while p > 0 {
        if p == 1 {
            p = 0;
            continue;
        }
        let small = |h: &SquareMatrix, i: usize| {
            h[(i, i - 1)].abs() <= tol * (h[(i - 1, i - 1)].abs() + h[(i, i)].abs())
        };
        if small(&factors[0], p - 1) {
            factors[0][(p - 1, p - 2)] = 0.0;
            p -= 1;
            iters = 0;
            continue;
        }
        if p >= 3 && small(&factors[0], p - 2) {
            factors[0][(p - 2, p - 3)] = 0.0;
            p -= 2;
            iters = 0;
            continue;
        }
        if p == 2 {
            p = 0;
            continue;
        }
        let mut lo = p - 2;
        while lo > 0 && !small(&factors[0], lo) {
            lo -= 1;
        }
        if lo > 0 {
            factors[0][(lo, lo - 1)] = 0.0;
        }
        if p - lo == 2 {
            p -= 2;
            iters = 0;
            continue;
        }
        iters += 1;
        if iters > max_sweeps {
            return Err(GinibreError::SchurNonConvergence {
                max_sweeps,
                window: p - lo,
            });
        }
        francis_sweep(factors, q.as_deref_mut(), lo, p, iters.is_multiple_of(10));
    }
    Ok(())
}

/// Real Schur factorization A = Q·T·Qᵀ with Q orthogonal and T
/// quasi-upper-triangular (1×1 and 2×2 diagonal blocks).
///
/// The matrix is pre-scaled by a power of two (scalar scaling commutes with
/// the factorization, unlike diagonal balancing, which would break the
/// orthogonality of Q).
pub fn real_schur(
    a: &SquareMatrix,
    tol: f64,
    max_sweeps: u32,
) -> Result<(SquareMatrix, SquareMatrix), GinibreError> {
    let n = a.dim();
    if !a.is_finite() {
        return Err(GinibreError::NonFiniteMatrix);
    }
    let mut q = SquareMatrix::identity(n);
    if n <= 1 {
        return Ok((q, a.clone()));
    }
    let max_entry = a.max_abs();
    let scale = if max_entry > 0.0 {
        2.0f64.powi(-max_entry.log2().round() as i32)
    } else {
        1.0
    };
    let mut t = a.clone();
    t.scale(scale);
    let mut factors = [t];
    cyclic_hessenberg(&mut factors, Some(&mut q));
    cyclic_francis(&mut factors, Some(&mut q), tol, max_sweeps)?;
    let [mut t] = factors;
    t.scale(1.0 / scale);
    Ok((q, t))
}

/// A real eigenvalue of the factored product in sign/log-magnitude form.
pub(crate) struct LogEigenvalue {
    pub sign: f64,
    pub ln_abs: f64,
}

/// Real eigenvalues of the converged cyclic form, each as sign and
/// log-magnitude (log of the product of diagonal entries). Also counts the
/// complex-conjugate 2×2 blocks.
pub(crate) fn cyclic_real_eigenvalues(
    factors: &[SquareMatrix],
) -> (Vec<LogEigenvalue>, usize) {
    let n = factors[0].dim();
    let mut out = Vec::new();
    let mut complex_pairs = 0usize;
    let mut i = 0;
    while i < n {
        if i + 1 < n && factors[0][(i + 1, i)] != 0.0 {
            let (b, ln_scale) = scaled_block_product(factors, i, i + 2);
            let tr = b[0][0] + b[1][1];
            let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
            let disc = tr * tr - 4.0 * det;
            if disc < 0.0 {
                complex_pairs += 1;
            } else {
                for x in real_pair(tr, det, disc) {
                    out.push(LogEigenvalue {
                        sign: sign_of(x),
                        ln_abs: if x == 0.0 {
                            f64::NEG_INFINITY
                        } else {
                            ln_scale + x.abs().ln()
                        },
                    });
                }
            }
            i += 2;
        } else {
            let mut sign = 1.0;
            let mut ln_abs = 0.0;
            for f in factors {
                let d = f[(i, i)];
                if d == 0.0 {
                    ln_abs = f64::NEG_INFINITY;
                    break;
                }
                sign *= sign_of(d);
                ln_abs += d.abs().ln();
            }
            out.push(LogEigenvalue { sign, ln_abs });
            i += 1;
        }
    }
    (out, complex_pairs)
}

#[inline]
fn sign_of(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Both roots of a 2×2 block with trace `tr`, determinant `det` and
/// nonnegative discriminant, ordered stably (no cancellation in the small
/// root).
pub(crate) fn real_pair(tr: f64, det: f64, disc: f64) -> [f64; 2] {
    debug_assert!(disc >= 0.0);
    let sq = disc.sqrt();
    if tr == 0.0 {
        return [0.5 * sq, -0.5 * sq];
    }
    let x1 = 0.5 * (tr + sign_of(tr) * sq);
    let x2 = if x1 == 0.0 { 0.0 } else { det / x1 };
    [x1, x2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_matrix(n: usize, seed: u64) -> SquareMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        SquareMatrix::from_rows(n, (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    fn assert_schur_contract(a: &SquareMatrix, q: &SquareMatrix, t: &SquareMatrix) {
        let n = a.dim();
        // Q orthogonal
        let qtq = q.transpose().mul(q);
        assert!(
            qtq.max_abs_diff(&SquareMatrix::identity(n)) <= 1e-10 * n as f64,
            "Q not orthogonal"
        );
        // reconstruction
        let rec = q.mul(t).mul(&q.transpose());
        assert!(
            rec.max_abs_diff(a) <= 1e-9 * a.max_abs().max(1e-300) * n as f64,
            "reconstruction error {}",
            rec.max_abs_diff(a)
        );
        // quasi-triangular: nothing below the first subdiagonal, no adjacent
        // nonzero subdiagonals
        for i in 0..n {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(t[(i, j)], 0.0, "entry ({i},{j}) below subdiagonal");
            }
        }
        for i in 2..n {
            assert!(
                t[(i, i - 1)] == 0.0 || t[(i - 1, i - 2)] == 0.0,
                "adjacent subdiagonals both nonzero at {i}"
            );
        }
    }

    #[test]
    fn diagonal_input() {
        let a = SquareMatrix::diagonal(&[3.0, 1.0, 2.0]);
        let (q, t) = real_schur(&a, 1e-12, 60).unwrap();
        assert_schur_contract(&a, &q, &t);
        let mut diag: Vec<f64> = (0..3).map(|i| t[(i, i)]).collect();
        diag.sort_by(f64::total_cmp);
        assert_eq!(diag, vec![1.0, 2.0, 3.0]);
        // Q is a signed permutation
        for i in 0..3 {
            for j in 0..3 {
                let v = q[(i, j)].abs();
                assert!(v < 1e-12 || (v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotation_matrix_gives_complex_pair() {
        // rotation by 90 degrees: eigenvalues ±i
        let a = SquareMatrix::from_rows(2, vec![0.0, -1.0, 1.0, 0.0]);
        let (q, t) = real_schur(&a, 1e-12, 60).unwrap();
        assert_schur_contract(&a, &q, &t);
        assert!(t[(1, 0)] != 0.0, "2x2 block expected");
        let tr = t[(0, 0)] + t[(1, 1)];
        let det = t[(0, 0)] * t[(1, 1)] - t[(0, 1)] * t[(1, 0)];
        assert!(tr.abs() < 1e-12);
        assert!((det - 1.0).abs() < 1e-12);
        assert!(tr * tr - 4.0 * det < 0.0);
    }

    #[test]
    fn companion_matrix_spectrum() {
        // companion of (x-1)(x-2)(x^2+1) = x^4 - 3x^3 + 3x^2 - 3x + 2
        let a = SquareMatrix::from_rows(
            4,
            vec![
                3.0, -3.0, 3.0, -2.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        );
        let (q, t) = real_schur(&a, 1e-12, 60).unwrap();
        assert_schur_contract(&a, &q, &t);
        // polynomial-root oracle: real roots {1, 2}, one complex pair ±i
        let mut reals = Vec::new();
        let mut pairs = 0;
        let mut i = 0;
        while i < 4 {
            if i + 1 < 4 && t[(i + 1, i)] != 0.0 {
                let tr = t[(i, i)] + t[(i + 1, i + 1)];
                let det = t[(i, i)] * t[(i + 1, i + 1)] - t[(i, i + 1)] * t[(i + 1, i)];
                let disc = tr * tr - 4.0 * det;
                if disc < 0.0 {
                    pairs += 1;
                    assert!(tr.abs() < 1e-9 && (det - 1.0).abs() < 1e-9);
                } else {
                    reals.extend(real_pair(tr, det, disc));
                }
                i += 2;
            } else {
                reals.push(t[(i, i)]);
                i += 1;
            }
        }
        assert_eq!(pairs, 1);
        reals.sort_by(f64::total_cmp);
        assert_eq!(reals.len(), 2);
        assert!((reals[0] - 1.0).abs() < 1e-9 && (reals[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn random_matrices_satisfy_contract() {
        for seed in 0..8u64 {
            for &n in &[2usize, 3, 5, 10, 17] {
                let a = random_matrix(n, seed * 31 + n as u64);
                let (q, t) = real_schur(&a, 1e-12, 60).unwrap();
                assert_schur_contract(&a, &q, &t);
            }
        }
    }

    #[test]
    fn count_invariant_under_scalar_scaling() {
        let a = random_matrix(12, 99);
        let count_of = |mat: &SquareMatrix| {
            let (_, t) = real_schur(mat, 1e-12, 60).unwrap();
            let factors = [t];
            let (eigs, pairs) = cyclic_real_eigenvalues(&factors);
            assert_eq!(eigs.len() + 2 * pairs, 12);
            eigs.len()
        };
        let base = count_of(&a);
        for &scale in &[1e-6, 1e6] {
            let mut b = a.clone();
            b.scale(scale);
            assert_eq!(count_of(&b), base, "count changed at scale {scale}");
        }
    }

    #[test]
    fn cyclic_form_matches_formed_product_eigenvalues() {
        // sizes where forming the product is numerically harmless
        for seed in 0..5u64 {
            let n = 8;
            let m = 3;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let fs: Vec<SquareMatrix> = (0..m)
                .map(|_| {
                    SquareMatrix::from_rows(
                        n,
                        (0..n * n)
                            .map(|_| rng.gen_range(-1.0..1.0) / (n as f64).sqrt())
                            .collect(),
                    )
                })
                .collect();
            let product = fs[1..].iter().fold(fs[0].clone(), |acc, f| acc.mul(f));

            let mut factors = fs.clone();
            cyclic_hessenberg(&mut factors, None);
            cyclic_francis(&mut factors, None, 1e-12, 60).unwrap();
            let (eigs, pairs) = cyclic_real_eigenvalues(&factors);
            let mut mine: Vec<f64> = eigs
                .iter()
                .map(|e| e.sign * e.ln_abs.exp())
                .collect();
            mine.sort_by(f64::total_cmp);

            let (_, t) = real_schur(&product, 1e-12, 60).unwrap();
            let single = [t];
            let (eigs2, pairs2) = cyclic_real_eigenvalues(&single);
            let mut reference: Vec<f64> = eigs2
                .iter()
                .map(|e| e.sign * e.ln_abs.exp())
                .collect();
            reference.sort_by(f64::total_cmp);

            assert_eq!(pairs, pairs2, "seed {seed}");
            assert_eq!(mine.len(), reference.len(), "seed {seed}");
            for (a, b) in mine.iter().zip(&reference) {
                assert!(
                    (a - b).abs() <= 1e-8 * (1.0 + a.abs()),
                    "seed {seed}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn nonconvergence_reports_error() {
        let a = random_matrix(10, 3);
        // one sweep cannot finish a 10x10 spectrum
        match real_schur(&a, 1e-12, 0) {
            Err(GinibreError::SchurNonConvergence { .. }) => {}
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
