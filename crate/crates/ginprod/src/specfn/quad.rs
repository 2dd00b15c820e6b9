//! Gauss-Legendre rules and an adaptive integrator for the unit interval.

use super::SpecFnError;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// A fixed quadrature rule on an interval: strictly increasing nodes with
/// positive weights summing to the interval length.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureRule {
    /// Apply the rule to `f`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Nodes and weights of the `order`-point Gauss-Legendre rule on [-1, 1],
/// by Newton iteration on the Legendre recurrence.
fn legendre_reference(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess for the i-th root (descending)
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' at x
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // store ascending: the cos guess walks from +1 down
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule of the given order on [a, b]; exact for polynomials of
/// degree <= 2*order - 1.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Result<QuadratureRule, SpecFnError> {
    if order < 1 {
        return Err(SpecFnError::InvalidOrder(order));
    }
    if a >= b || !a.is_finite() || !b.is_finite() {
        return Err(SpecFnError::InvalidInterval { a, b });
    }
    let (xs, ws) = legendre_reference(order);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    Ok(QuadratureRule {
        nodes: xs.iter().map(|&x| mid + half * x).collect(),
        weights: ws.iter().map(|&w| half * w).collect(),
        order,
    })
}

const PANEL_BUDGET: usize = 10_000;
const COARSE: usize = 15;
const FINE: usize = 30;

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    est: f64,
}

impl Panel {
    fn key(&self) -> f64 {
        if self.est.is_nan() {
            f64::INFINITY
        } else {
            self.est
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().total_cmp(&other.key())
    }
}

/// Adaptive integration of `f` over (0, 1) to absolute tolerance `tol`.
///
/// Open Gauss pairs (15/30 points) per panel, bisecting the worst panel until
/// the summed error estimate clears `tol`. The endpoint t = 0 is never
/// evaluated, so integrands only defined on the open interval are fine.
pub fn integrate_unit(
    mut f: impl FnMut(f64) -> f64,
    tol: f64,
) -> Result<f64, SpecFnError> {
    let (cx, cw) = legendre_reference(COARSE);
    let (fx, fw) = legendre_reference(FINE);
    let eval = |a: f64, b: f64, f: &mut dyn FnMut(f64) -> f64| -> Panel {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let coarse: f64 = cx
            .iter()
            .zip(&cw)
            .map(|(&x, &w)| half * w * f(mid + half * x))
            .sum();
        let fine: f64 = fx
            .iter()
            .zip(&fw)
            .map(|(&x, &w)| half * w * f(mid + half * x))
            .sum();
        Panel {
            a,
            b,
            value: fine,
            est: (fine - coarse).abs(),
        }
    };

    let mut heap = BinaryHeap::new();
    heap.push(eval(0.0, 1.0, &mut f));
    loop {
        let total_est: f64 = heap.iter().map(|p| p.key()).sum();
        if total_est <= tol {
            return Ok(heap.iter().map(|p| p.value).sum());
        }
        if heap.len() >= PANEL_BUDGET {
            return Err(SpecFnError::NonConvergence {
                panels: heap.len(),
                estimate: total_est,
                tol,
            });
        }
        let worst = heap.pop().expect("heap nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at f64 resolution; keep its estimate
            let est = worst.est;
            heap.push(worst);
            return Err(SpecFnError::NonConvergence {
                panels: heap.len(),
                estimate: est,
                tol,
            });
        }
        heap.push(eval(worst.a, mid, &mut f));
        heap.push(eval(mid, worst.b, &mut f));
    }
}
