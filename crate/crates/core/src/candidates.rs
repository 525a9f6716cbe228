//! The explicit Carleson-Chang test profile, the closed-form pieces of its
//! half-line integral, and the Moser family of concentrating profiles.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{HalfLineProfile, WeightExponent};
use crate::quadrature::{integrate, QuadratureSpec};

/// Node count used for the `√(t-1)` piece.
pub const CANDIDATE_MIDDLE_NODES: usize = 4096;

/// Below this `α` the closed forms switch to their `α → 0` limits.
pub const SMALL_ALPHA: f64 = 1e-6;

/// End of the square-root piece, `1 + e²`.
pub fn candidate_knee() -> f64 {
    1.0 + E * E
}

/// `w(t) = t/2` on `[0,2]`, `√(t-1)` on `[2, 1+e²]`, `e` beyond.
pub fn carleson_chang_value(t: f64) -> f64 {
    if t <= 2.0 {
        0.5 * t.max(0.0)
    } else if t <= candidate_knee() {
        (t - 1.0).sqrt()
    } else {
        E
    }
}

pub fn carleson_chang_candidate() -> HalfLineProfile {
    carleson_chang_candidate_with_nodes(CANDIDATE_MIDDLE_NODES)
}

/// Piecewise-linear Carleson-Chang profile with `middle_nodes` segments on
/// the square-root piece. Nodes there are uniform in `s = √(t-1)`, which
/// bounds the interpolation error by `(e-1)²/(8 n²)`.
pub fn carleson_chang_candidate_with_nodes(middle_nodes: usize) -> HalfLineProfile {
    let n = middle_nodes.max(1);
    let mut grid = Vec::with_capacity(n + 2);
    let mut values = Vec::with_capacity(n + 2);
    grid.push(0.0);
    values.push(0.0);
    for k in 0..=n {
        let s = 1.0 + (E - 1.0) * k as f64 / n as f64;
        grid.push(1.0 + s * s);
        values.push(s);
    }
    grid[1] = 2.0;
    values[1] = 1.0;
    grid[n + 1] = candidate_knee();
    values[n + 1] = E;
    HalfLineProfile::new(grid, values).expect("candidate grid is increasing")
}

/// `A_α = (1/e)[-(2/α) e^{-(α/(α+2))e²} + ((α+2)/α) e^{-α/(α+2)}]`,
/// the contribution of `t ≥ 2` to the candidate's half-line integral.
pub fn a_alpha(weight: &WeightExponent) -> f64 {
    let alpha = weight.alpha();
    if alpha < SMALL_ALPHA {
        return E;
    }
    let a = alpha / (alpha + 2.0);
    // (1/e) e^{-a} [1 - (2/α) expm1(-a(e²-1))], algebraically equal to the bracket above.
    (-a).exp() / E * (1.0 - 2.0 / alpha * (-a * (E * E - 1.0)).exp_m1())
}

/// `B_α = (α+2) e^{-(α+2)/2} (α/4) {e - (α/(α+2)) e^{(α/(α+2))²}}`.
pub fn b_alpha(weight: &WeightExponent) -> f64 {
    let alpha = weight.alpha();
    if alpha < SMALL_ALPHA {
        return 0.5 * alpha;
    }
    let a = alpha / (alpha + 2.0);
    (alpha + 2.0) * (-(alpha + 2.0) / 2.0).exp() * (alpha / 4.0) * (E - a * (a * a).exp())
}

/// Closed-form bookkeeping of `∫_0^∞ e^{εw²-t} dt` for the candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidatePieces {
    /// `∫_0^2 e^{ε t²/4 - t} dt`, by quadrature.
    pub head: f64,
    /// `e^{-ε} ∫_2^{1+e²} e^{-(1-ε)t} dt`, closed form.
    pub middle: f64,
    /// `e^{εe²} ∫_{1+e²}^∞ e^{-t} dt`, closed form.
    pub tail: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormValue {
    /// `∫_0^∞ e^{εw²-t} dt = head + middle + tail`.
    pub value: f64,
    pub pieces: CandidatePieces,
    /// `A_α` from its closed form; equals `middle + tail`.
    pub a_alpha: f64,
    pub alpha: WeightExponent,
    /// `∫_B (e^{4πω²}-1)|x|^α dx = π ε (value - 1)`.
    pub functional: f64,
}

fn middle_piece(eps: f64) -> f64 {
    let span = E * E - 1.0;
    let k = 1.0 - eps;
    if k < SMALL_ALPHA / 2.0 {
        // ε → 1: e^{-1} (e² - 1)
        return span / E;
    }
    (eps - 2.0).exp() * (-(-k * span).exp_m1()) / k
}

pub fn candidate_value(weight: &WeightExponent, q: &QuadratureSpec) -> Result<ClosedFormValue> {
    q.validate()?;
    let eps = weight.epsilon();
    let head = integrate(|t| (eps * t * t / 4.0 - t).exp(), 0.0, 2.0, q).value;
    let middle = middle_piece(eps);
    let tail = (-1.0 - (1.0 - eps) * E * E).exp();
    let value = head + middle + tail;
    Ok(ClosedFormValue {
        value,
        pieces: CandidatePieces { head, middle, tail },
        a_alpha: a_alpha(weight),
        alpha: *weight,
        functional: PI * eps * (value - 1.0),
    })
}

/// `2 ∫_0^1 e^{s²} ds`.
pub fn gauss_integral(q: &QuadratureSpec) -> Result<f64> {
    q.validate()?;
    Ok(2.0 * integrate(|s| (s * s).exp(), 0.0, 1.0, q).value)
}

/// Moser profile `w_n(t) = t/√n` on `[0, n]`, `√n` beyond; unit energy,
/// concentrating at the origin as `n` grows.
pub fn concentrating_sequence(n: u32) -> Result<HalfLineProfile> {
    if n == 0 {
        return Err(Error::Precondition("concentrating sequence index must be ≥ 1".into()));
    }
    let nf = f64::from(n);
    HalfLineProfile::new(vec![0.0, nf], vec![0.0, nf.sqrt()])
}
