//! Radial and half-line profiles, and the two functionals evaluated on them:
//! Dirichlet energy and the weighted exponential integral
//! `∫_B (e^{γu²} - 1) |x|^α dx`.

mod halfline;
pub mod io;
mod radial;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_with_breaks, QuadratureSpec};

pub use halfline::{dirichlet_norm_halfline, HalfLineInterp, HalfLineProfile};
pub use radial::{dirichlet_norm_radial, RadialInterp, RadialProfile};

/// Critical exponent `4π`.
pub const CRITICAL_GAMMA: f64 = 4.0 * PI;

/// Exponents `γu²` (or `κw² - t`) above this are reported as overflow.
pub const OVERFLOW_EXPONENT: f64 = 700.0;

/// The Hénon weight exponent `α ≥ 0` together with `ε = 2/(α+2)` and the
/// radius `√ε` of the disk whose area equals `μ_α(B)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightExponent {
    alpha: f64,
    epsilon: f64,
    star_radius: f64,
}

impl WeightExponent {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::Precondition(format!(
                "weight exponent must be finite and nonnegative, got {alpha}"
            )));
        }
        let epsilon = 2.0 / (alpha + 2.0);
        Ok(Self {
            alpha,
            epsilon,
            star_radius: epsilon.sqrt(),
        })
    }

    pub fn unweighted() -> Self {
        Self {
            alpha: 0.0,
            epsilon: 1.0,
            star_radius: 1.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn star_radius(&self) -> f64 {
        self.star_radius
    }

    /// `μ_α(B) = 2π/(α+2)`.
    pub fn total_mass(&self) -> f64 {
        2.0 * PI / (self.alpha + 2.0)
    }

    /// `μ_α` mass of the annular sector `a < r < b`, `|θ-θ₀| < dθ/2`.
    pub fn sector_mass(&self, a: f64, b: f64, dtheta: f64) -> f64 {
        let k = self.alpha + 2.0;
        dtheta * (b.powf(k) - a.powf(k)) / k
    }
}

/// Dirichlet energy and weighted exponential integral of one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub dirichlet: f64,
    pub exp_integral: f64,
    pub alpha: WeightExponent,
    pub gamma: f64,
    /// Set when `γu²` exceeded the overflow threshold; `exp_integral` is then `+∞`.
    pub overflow: bool,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Precondition(format!("gamma must be positive, got {gamma}")));
    }
    Ok(())
}

/// `2π ∫_0^R (e^{γu(r)²} - 1) r^{α+1} dr`.
///
/// Returns `+∞` when `γu²` exceeds [`OVERFLOW_EXPONENT`] somewhere on the grid.
pub fn weighted_exp_functional(
    u: &RadialProfile,
    weight: &WeightExponent,
    gamma: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    check_gamma(gamma)?;
    q.validate()?;
    let sup = u.sup_abs();
    if gamma * sup * sup > OVERFLOW_EXPONENT {
        return Ok(f64::INFINITY);
    }
    if u.is_zero() {
        return Ok(0.0);
    }
    let power = weight.alpha() + 1.0;
    let integrand = |r: f64| {
        let v = u.eval(r);
        (gamma * v * v).exp_m1() * r.powf(power)
    };
    // Absolute tolerance applies to the final value, which carries the 2π factor.
    let spec = QuadratureSpec {
        abs_tol: q.abs_tol / (2.0 * PI),
        ..*q
    };
    let res = integrate_with_breaks(integrand, u.grid(), &spec);
    Ok(2.0 * PI * res.value)
}

pub fn functional_report(
    u: &RadialProfile,
    weight: &WeightExponent,
    gamma: f64,
    q: &QuadratureSpec,
) -> Result<FunctionalReport> {
    let exp_integral = weighted_exp_functional(u, weight, gamma, q)?;
    Ok(FunctionalReport {
        dirichlet: dirichlet_norm_radial(u),
        exp_integral,
        alpha: *weight,
        gamma,
        overflow: exp_integral.is_infinite(),
    })
}

fn halfline_overflows(w: &HalfLineProfile, kappa: f64) -> bool {
    let g = w.grid();
    let v = w.values();
    let seg = (0..g.len() - 1).any(|i| {
        let m = v[i].abs().max(v[i + 1].abs());
        kappa * m * m - g[i] > OVERFLOW_EXPONENT
    });
    let m = w.last_value().abs().max(w.tail_value().abs());
    seg || kappa * m * m - w.t_max() > OVERFLOW_EXPONENT
}

/// `∫_0^∞ (e^{κ w(t)²} - 1) e^{-t} dt`, quadrature on `[0, T]` plus the tail
/// beyond `T`.
///
/// For a constant tail the contribution beyond `T` is `(e^{κ w_T²} - 1) e^{-T}`
/// in closed form. Returns `+∞` on exponent overflow.
pub fn halfline_excess(w: &HalfLineProfile, kappa: f64, q: &QuadratureSpec) -> Result<f64> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::Precondition(format!(
            "exponent factor must be nonnegative, got {kappa}"
        )));
    }
    q.validate()?;
    if halfline_overflows(w, kappa) {
        return Ok(f64::INFINITY);
    }
    if w.is_zero() {
        return Ok(0.0);
    }
    let big_t = w.t_max();
    // Split the tolerance between the bulk and the tail.
    let bulk_spec = QuadratureSpec {
        abs_tol: 0.5 * q.abs_tol,
        ..*q
    };
    let bulk = integrate_with_breaks(
        |t| {
            let v = w.eval(t);
            (kappa * v * v).exp_m1() * (-t).exp()
        },
        w.grid(),
        &bulk_spec,
    )
    .value;

    let w_t = w.last_value();
    let tail_value = w.tail_value();
    let tail = match w.interp() {
        HalfLineInterp::Exp(c) if tail_value != w_t => {
            // s = e^{-c(t-T)} ∈ (0, 1]:  ∫_T^∞ g(t) e^{-t} dt = (e^{-T}/c) ∫_0^1 g(t(s)) s^{1/c - 1} ds
            let scale = (-big_t).exp() / c;
            let inner_tol = (0.5 * q.abs_tol / scale).min(1e-9);
            let spec = QuadratureSpec {
                abs_tol: inner_tol,
                ..*q
            };
            let inner = integrate(
                |s: f64| {
                    let v = tail_value + s * (w_t - tail_value);
                    (kappa * v * v).exp_m1() * s.powf(1.0 / c - 1.0)
                },
                0.0,
                1.0,
                &spec,
            );
            scale * inner.value
        }
        _ => (kappa * w_t * w_t).exp_m1() * (-big_t).exp(),
    };
    Ok(bulk + tail)
}

/// `∫_0^∞ e^{κ w(t)² - t} dt = 1 + ` [`halfline_excess`].
pub fn halfline_integral(w: &HalfLineProfile, kappa: f64, q: &QuadratureSpec) -> Result<f64> {
    Ok(1.0 + halfline_excess(w, kappa, q)?)
}

/// `∫_0^∞ e^{ε w² - t} dt` with `ε = 2/(α+2)`, the critical-case half-line form.
pub fn halfline_functional(
    w: &HalfLineProfile,
    weight: &WeightExponent,
    q: &QuadratureSpec,
) -> Result<f64> {
    halfline_integral(w, weight.epsilon(), q)
}

/// Exponent factor `κ = ε γ / 4π` of the half-line form of `S(α, γ)`.
pub fn halfline_exponent(weight: &WeightExponent, gamma: f64) -> f64 {
    weight.epsilon() * gamma / CRITICAL_GAMMA
}

/// Disk value `π ε (J - 1)` from a half-line integral `J`.
pub fn disk_value_from_halfline(integral: f64, weight: &WeightExponent) -> f64 {
    PI * weight.epsilon() * (integral - 1.0)
}

/// `∫_B (e^{γu²} - 1) |x|^α dx` evaluated through the half-line form of the
/// radial profile `u` behind `w`: `π ε ∫ (e^{κw²} - 1) e^{-t} dt`, `κ = εγ/4π`.
pub fn disk_value_via_halfline(
    w: &HalfLineProfile,
    weight: &WeightExponent,
    gamma: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    check_gamma(gamma)?;
    let excess = halfline_excess(w, halfline_exponent(weight, gamma), q)?;
    Ok(PI * weight.epsilon() * excess)
}

/// Default truncation `T` of the half-line for exponent factor `κ`.
///
/// For `κ < 1` the bound `w(t) ≤ √t ‖w'‖` keeps the integrand of a unit-norm
/// profile below `e^{(κ-1)t}`, which is under `1e-12` past
/// `ln(1e12)/(1-κ)`. The value is capped at 50, the critical-case default.
pub fn default_t_max(kappa: f64) -> f64 {
    const CAP: f64 = 50.0;
    if kappa >= 1.0 {
        return CAP;
    }
    (1e12f64.ln() / (1.0 - kappa)).min(CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn weight_exponent_invariants() {
        for alpha in [0.0, 0.3, 1.0, 2.0, 17.0] {
            let w = WeightExponent::new(alpha).unwrap();
            assert!(w.epsilon() > 0.0 && w.epsilon() <= 1.0);
            assert_eq!(w.epsilon() == 1.0, alpha == 0.0);
            assert_relative_eq!(w.star_radius().powi(2) * PI, w.total_mass(), max_relative = 1e-14);
            assert_relative_eq!(w.sector_mass(0.0, 1.0, 2.0 * PI), w.total_mass(), max_relative = 1e-14);
        }
        assert!(WeightExponent::new(-0.1).is_err());
        assert!(WeightExponent::new(f64::NAN).is_err());
    }

    #[test]
    fn zero_profile_gives_zero_functional() {
        let u = RadialProfile::zero(1.0);
        for alpha in [0.0, 1.0, 5.0] {
            let w = WeightExponent::new(alpha).unwrap();
            assert_eq!(weighted_exp_functional(&u, &w, CRITICAL_GAMMA, &q()).unwrap(), 0.0);
        }
    }

    #[test]
    fn plateau_approaches_closed_form() {
        // u = c on [0, 1-δ], linear to 0 on [1-δ, 1]
        let c = 0.4;
        let gamma = CRITICAL_GAMMA;
        for alpha in [0.0, 1.5] {
            let w = WeightExponent::new(alpha).unwrap();
            let limit = (gamma * c * c).exp_m1() * 2.0 * PI / (alpha + 2.0);
            let mut prev_gap = f64::INFINITY;
            for delta in [1e-1, 1e-2, 1e-3] {
                let u = RadialProfile::new(vec![0.0, 1.0 - delta, 1.0], vec![c, c, 0.0]).unwrap();
                let v = weighted_exp_functional(&u, &w, gamma, &q()).unwrap();
                let gap = (v - limit).abs();
                assert!(v < limit && gap < prev_gap);
                prev_gap = gap;
            }
            assert!(prev_gap / limit < 5e-3);
        }
    }

    #[test]
    fn overflow_is_flagged() {
        let u = RadialProfile::new(vec![0.0, 1.0], vec![10.0, 0.0]).unwrap();
        let w = WeightExponent::new(1.0).unwrap();
        let v = weighted_exp_functional(&u, &w, CRITICAL_GAMMA, &q()).unwrap();
        assert!(v.is_infinite() && v > 0.0);
        let r = functional_report(&u, &w, CRITICAL_GAMMA, &q()).unwrap();
        assert!(r.overflow);
    }

    #[test]
    fn rejects_nonpositive_gamma() {
        let u = RadialProfile::zero(1.0);
        let w = WeightExponent::unweighted();
        assert!(weighted_exp_functional(&u, &w, 0.0, &q()).is_err());
        assert!(weighted_exp_functional(&u, &w, -1.0, &q()).is_err());
    }

    #[test]
    fn zero_halfline_integral_is_one() {
        for alpha in [0.0, 0.5, 4.0] {
            let w = WeightExponent::new(alpha).unwrap();
            let z = HalfLineProfile::zero(50.0);
            assert_relative_eq!(halfline_functional(&z, &w, &q()).unwrap(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn moser_profile_halfline_integral_closed_form_at_kappa_zero_limit() {
        // κ = 0: ∫ e^{-t} = 1 regardless of the profile.
        let w = HalfLineProfile::new(vec![0.0, 3.0], vec![0.0, 3f64.sqrt()]).unwrap();
        assert_relative_eq!(halfline_integral(&w, 0.0, &q()).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn exp_tail_matches_long_truncation() {
        let w = HalfLineProfile::with_exp_knots(vec![0.0, 1.0, 2.0], vec![0.0, 0.6, 0.9], 0.3, 1.4)
            .unwrap();
        let kappa = 0.8;
        let fast = halfline_integral(&w, kappa, &q()).unwrap();
        // Independent route: integrate w.eval directly on a long interval.
        let slow = crate::quadrature::integrate(
            |t| {
                let v = w.eval(t);
                (kappa * v * v - t).exp()
            },
            0.0,
            80.0,
            &QuadratureSpec::simpson(1e-12),
        )
        .value;
        assert_relative_eq!(fast, slow, max_relative = 1e-9);
    }

    #[test]
    fn default_truncation_rule() {
        assert_eq!(default_t_max(1.0), 50.0);
        assert_relative_eq!(default_t_max(0.0), 1e12f64.ln());
        assert_eq!(default_t_max(0.99), 50.0);
        let k = 0.3;
        let t = default_t_max(k);
        assert!(((k - 1.0) * t).exp() <= 1e-12 * (1.0 + 1e-9));
    }
}
