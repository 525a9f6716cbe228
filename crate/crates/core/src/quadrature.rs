//! One-dimensional quadrature used by every functional in the crate.
//!
//! Two methods are offered. `Adaptive` is a globally adaptive Gauss-Kronrod
//! (7/15) scheme that always bisects the interval with the largest error
//! estimate. `CompositeSimpson` doubles the panel count on every initial
//! interval until two successive sums agree to the tolerance.
//!
//! Both accept a list of breakpoints so that piecewise-smooth integrands
//! (piecewise-linear profiles) never straddle a kink inside a panel.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMethod {
    CompositeSimpson,
    Adaptive,
}

/// Quadrature settings shared by every integral evaluated in the crate.
///
/// `max_refinement` bounds the bisection depth of any single subinterval for
/// the adaptive method, and the number of panel doublings for Simpson.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    pub abs_tol: f64,
    pub max_refinement: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: QuadratureMethod::Adaptive,
            abs_tol: 1e-10,
            max_refinement: 40,
        }
    }
}

impl QuadratureSpec {
    pub fn adaptive(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn simpson(abs_tol: f64) -> Self {
        Self {
            method: QuadratureMethod::CompositeSimpson,
            abs_tol,
            max_refinement: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::Precondition(format!(
                "quadrature abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        Ok(())
    }
}

/// Result of a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_err: f64,
    /// False when the refinement budget ran out before the tolerance was met.
    pub converged: bool,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for the odd-indexed Kronrod abscissae (xgk[1], xgk[3], xgk[5], xgk[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod estimate with the embedded 7-point Gauss rule as error probe.
pub(crate) fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += wk * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
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
        self.err.total_cmp(&other.err)
    }
}

// Hard cap on the number of live panels, independent of `max_refinement`.
const MAX_PANELS: usize = 1 << 20;

fn adaptive<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], spec: &QuadratureSpec) -> Integral {
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 2);
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (value, err) = gauss_kronrod_15(f, a, b);
        total_err += err;
        heap.push(Panel {
            a,
            b,
            value,
            err,
            depth: 0,
        });
    }
    let mut finished: Vec<Panel> = Vec::new();
    let mut converged = true;
    while total_err > spec.abs_tol {
        let Some(worst) = heap.pop() else { break };
        if worst.depth >= spec.max_refinement || heap.len() + finished.len() >= MAX_PANELS {
            converged = false;
            total_err -= worst.err;
            finished.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            converged = false;
            total_err -= worst.err;
            finished.push(worst);
            continue;
        }
        let (lv, le) = gauss_kronrod_15(f, worst.a, mid);
        let (rv, re) = gauss_kronrod_15(f, mid, worst.b);
        total_err += le + re - worst.err;
        let depth = worst.depth + 1;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            err: le,
            depth,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            err: re,
            depth,
        });
    }
    // Sum small contributions first.
    let mut parts: Vec<(f64, f64)> = heap
        .into_iter()
        .chain(finished)
        .map(|p| (p.value, p.err))
        .collect();
    parts.sort_by(|x, y| x.0.abs().total_cmp(&y.0.abs()));
    let value = parts.iter().map(|p| p.0).sum();
    let abs_err = parts.iter().map(|p| p.1).sum();
    Integral {
        value,
        abs_err,
        converged,
    }
}

fn simpson_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    acc * h / 3.0
}

fn composite_simpson<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], spec: &QuadratureSpec) -> Integral {
    let total_len = breaks.last().copied().unwrap_or(0.0) - breaks.first().copied().unwrap_or(0.0);
    let mut value = 0.0;
    let mut abs_err = 0.0;
    let mut converged = true;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let local_tol = spec.abs_tol * (b - a) / total_len.max(f64::MIN_POSITIVE);
        let mut n = 2;
        let mut prev = simpson_panels(f, a, b, n);
        let mut done = false;
        for _ in 0..spec.max_refinement {
            n *= 2;
            let next = simpson_panels(f, a, b, n);
            // Richardson estimate of the error of `next`.
            let err = (next - prev).abs() / 15.0;
            prev = next;
            if err <= local_tol {
                abs_err += err;
                done = true;
                break;
            }
        }
        if !done {
            converged = false;
        }
        value += prev;
    }
    Integral {
        value,
        abs_err,
        converged,
    }
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, treating every interior
/// breakpoint as a possible kink.
pub fn integrate_with_breaks<F>(f: F, breaks: &[f64], spec: &QuadratureSpec) -> Integral
where
    F: Fn(f64) -> f64,
{
    if breaks.len() < 2 {
        return Integral {
            value: 0.0,
            abs_err: 0.0,
            converged: true,
        };
    }
    match spec.method {
        QuadratureMethod::Adaptive => adaptive(&f, breaks, spec),
        QuadratureMethod::CompositeSimpson => composite_simpson(&f, breaks, spec),
    }
}

pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Integral
where
    F: Fn(f64) -> f64,
{
    if b < a {
        let mut r = integrate_with_breaks(f, &[b, a], spec);
        r.value = -r.value;
        return r;
    }
    integrate_with_breaks(f, &[a, b], spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_rule_is_exact_for_degree_22() {
        // 15-point Kronrod integrates polynomials up to degree 22 exactly.
        for k in 0..=22 {
            let (v, _) = gauss_kronrod_15(&|x: f64| x.powi(k), 0.0, 1.0);
            assert_relative_eq!(v, 1.0 / (k as f64 + 1.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn embedded_gauss_rule_is_exact_for_degree_13() {
        let f = |x: f64| x.powi(13) + 3.0 * x.powi(6);
        let (v, err) = gauss_kronrod_15(&f, -1.0, 2.0);
        let exact = (2f64.powi(14) - 1.0) / 14.0 + 3.0 * (2f64.powi(7) + 1.0) / 7.0;
        assert_relative_eq!(v, exact, max_relative = 1e-13);
        assert!(err < 1e-9);
    }

    #[test]
    fn adaptive_handles_sqrt_singularity() {
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &QuadratureSpec::adaptive(1e-11));
        assert!(r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn simpson_matches_exponential() {
        let r = integrate(f64::exp, 0.0, 2.0, &QuadratureSpec::simpson(1e-10));
        assert!(r.converged);
        assert!((r.value - (2f64.exp() - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn breakpoints_resolve_kinks() {
        let f = |x: f64| (x - 0.3).abs();
        let exact = 0.3 * 0.3 / 2.0 + 0.7 * 0.7 / 2.0;
        for spec in [QuadratureSpec::adaptive(1e-12), QuadratureSpec::simpson(1e-12)] {
            let r = integrate_with_breaks(f, &[0.0, 0.3, 1.0], &spec);
            assert!((r.value - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let r = integrate(|x| x, 1.0, 0.0, &QuadratureSpec::default());
        assert!((r.value + 0.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        let spec = QuadratureSpec {
            abs_tol: 0.0,
            ..QuadratureSpec::default()
        };
        assert!(spec.validate().is_err());
    }
}
