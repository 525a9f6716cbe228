//! Closed-form bounds, the radial scaling identity, the radial inequality
//! behind the derivative estimate, and the threshold below which the
//! explicit candidate beats the concentration level.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::candidates::candidate_value;
use crate::error::{Error, Result};
use crate::optimizer::{maximize_radial, OptimizerConfig};
use crate::profiles::{weighted_exp_functional, RadialProfile, WeightExponent, CRITICAL_GAMMA};
use crate::quadrature::QuadratureSpec;
use crate::transforms::{ssw_transform, IdentityReport};

/// Search interval for [`alpha_star_estimate`].
pub const ALPHA_STAR_BRACKET: (f64, f64) = (0.0, 100.0);
pub const ALPHA_STAR_MAX_ITERS: usize = 80;

/// Limit of the functional along concentrating sequences at `γ = 4π`: `2πe/(α+2)`.
pub fn concentration_upper_bound(weight: &WeightExponent) -> f64 {
    2.0 * PI * E / (weight.alpha() + 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialIdentityReport {
    pub alpha: f64,
    /// `S^rad(α, 4π)`.
    pub weighted: f64,
    /// `S(0, 4πε)`.
    pub unweighted: f64,
    pub epsilon: f64,
    /// `|weighted - ε·unweighted| / weighted`.
    pub rel_gap: f64,
    pub weighted_converged: bool,
    pub unweighted_converged: bool,
}

/// Runs both sides of `S^rad(α, 4π) = ε S(0, 4πε)` with the same configuration.
pub fn radial_identity_check(
    weight: &WeightExponent,
    cfg: &OptimizerConfig,
) -> Result<RadialIdentityReport> {
    let eps = weight.epsilon();
    let (lhs, rhs) = rayon::join(
        || maximize_radial(weight, CRITICAL_GAMMA, cfg),
        || maximize_radial(&WeightExponent::unweighted(), eps * CRITICAL_GAMMA, cfg),
    );
    let (lhs, rhs) = (lhs?, rhs?);
    let rel_gap = (lhs.value - eps * rhs.value).abs() / lhs.value.abs();
    Ok(RadialIdentityReport {
        alpha: weight.alpha(),
        weighted: lhs.value,
        unweighted: rhs.value,
        epsilon: eps,
        rel_gap,
        weighted_converged: lhs.converged,
        unweighted_converged: rhs.converged,
    })
}

/// `∫_0^∞ e^{εw²-t} dt - (e + 1)` for the candidate: positive exactly when its
/// functional exceeds [`concentration_upper_bound`].
pub fn candidate_margin(alpha: f64, q: &QuadratureSpec) -> Result<f64> {
    Ok(candidate_value(&WeightExponent::new(alpha)?, q)?.value - (E + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaStarEstimate {
    /// Largest `α` with positive margin, to within `tol`. A lower estimate
    /// of the true threshold, specific to the explicit candidate.
    pub alpha_star: f64,
    pub tol: f64,
    pub margin_at_zero: f64,
    /// The margin never changed sign on the search interval; `alpha_star`
    /// is then the interval end.
    pub no_sign_change: bool,
    pub iterations: usize,
}

pub fn alpha_star_estimate(tol: f64, q: &QuadratureSpec) -> Result<AlphaStarEstimate> {
    alpha_star_in(ALPHA_STAR_BRACKET, tol, q)
}

pub fn alpha_star_in(bracket: (f64, f64), tol: f64, q: &QuadratureSpec) -> Result<AlphaStarEstimate> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Precondition(format!("tol must be positive, got {tol}")));
    }
    let (lo0, hi0) = bracket;
    if !(lo0 >= 0.0 && hi0 > lo0) {
        return Err(Error::Precondition(format!("invalid bracket [{lo0}, {hi0}]")));
    }
    let margin = |a: f64| candidate_margin(a, q);
    let margin_at_zero = margin(lo0)?;
    if !(margin_at_zero > 0.0) {
        return Err(Error::Precondition(format!(
            "margin is not positive at the bracket start α = {lo0}"
        )));
    }
    // Scan for the first sign change before bisecting.
    let steps = 200;
    let mut lo = lo0;
    let mut hi = None;
    for k in 1..=steps {
        let a = lo0 + (hi0 - lo0) * k as f64 / steps as f64;
        if margin(a)? > 0.0 {
            lo = a;
        } else {
            hi = Some(a);
            break;
        }
    }
    let Some(mut hi) = hi else {
        return Ok(AlphaStarEstimate {
            alpha_star: hi0,
            tol,
            margin_at_zero,
            no_sign_change: true,
            iterations: 0,
        });
    };
    let mut iterations = 0;
    while hi - lo > tol && iterations < ALPHA_STAR_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if margin(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(AlphaStarEstimate {
        alpha_star: lo,
        tol,
        margin_at_zero,
        no_sign_change: false,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Remark2Report {
    /// `2π ∫_0^1 (e^{4πv²} - 1) r dr` for `v` the power-map image of `u`.
    pub lhs: f64,
    /// `ε^{-2} ∫_B (e^{4πu²} - 1)|x|^α dx`.
    pub rhs: f64,
    pub margin: f64,
    pub alpha: f64,
    /// `u ≡ 0`: both sides vanish and the inequality degenerates to equality.
    pub degenerate: bool,
}

impl Remark2Report {
    pub fn strict(&self) -> bool {
        !self.degenerate && self.margin > 0.0
    }
}

pub fn remark2_check(
    u: &RadialProfile,
    weight: &WeightExponent,
    q: &QuadratureSpec,
) -> Result<Remark2Report> {
    if !(weight.alpha() > 0.0) {
        return Err(Error::Precondition("the comparison needs α > 0".into()));
    }
    if u.is_zero() {
        return Ok(Remark2Report {
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            alpha: weight.alpha(),
            degenerate: true,
        });
    }
    let eps = weight.epsilon();
    let v = ssw_transform(u, weight)?;
    let lhs = weighted_exp_functional(&v, &WeightExponent::unweighted(), CRITICAL_GAMMA, q)?;
    let rhs = weighted_exp_functional(u, weight, CRITICAL_GAMMA, q)? / (eps * eps);
    Ok(Remark2Report {
        lhs,
        rhs,
        margin: lhs - rhs,
        alpha: weight.alpha(),
        degenerate: false,
    })
}

/// Bound `∫_B (e^{4πu²}-1)|x|^α ≤ ε S(0, 4π)` for a unit-norm radial `u`,
/// given an estimate of `S(0, 4π)`.
pub fn unweighted_domination(
    u: &RadialProfile,
    weight: &WeightExponent,
    s0: f64,
    q: &QuadratureSpec,
) -> Result<IdentityReport> {
    let value = weighted_exp_functional(u, weight, CRITICAL_GAMMA, q)?;
    Ok(IdentityReport::new(value, weight.epsilon() * s0))
}
