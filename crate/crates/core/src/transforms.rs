//! Changes of variables that reduce the weighted radial problem to an
//! unweighted one and then to the half-line.
//!
//! * power map: `v(ρ) = u(ρ^ε)/√ε`, which keeps the Dirichlet energy and
//!   turns `∫_B (e^{4πu²}-1)|x|^α` into `2πε ∫_0^1 (e^{4πεv²}-1) ρ dρ`;
//! * Moser map: `ρ = e^{-t/2}`, `w(t) = √(4π) v(ρ)`, which turns
//!   `2π∫|v'|²ρdρ` into `∫|w'|²dt`.
//!
//! Both maps move node coordinates and carry the interpolation coordinate
//! with them, so the transformed profile is the same function and energies
//! agree to rounding.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{
    dirichlet_norm_radial, disk_value_via_halfline, weighted_exp_functional, HalfLineInterp,
    HalfLineProfile, RadialInterp, RadialProfile, WeightExponent, CRITICAL_GAMMA,
};
use crate::quadrature::QuadratureSpec;

/// Two independently computed sides of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_gap: f64,
    pub rel_gap: f64,
}

impl IdentityReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let abs_gap = if lhs == rhs { 0.0 } else { (lhs - rhs).abs() };
        let scale = lhs.abs().max(rhs.abs());
        let rel_gap = if abs_gap == 0.0 { 0.0 } else { abs_gap / scale };
        Self {
            lhs,
            rhs,
            abs_gap,
            rel_gap,
        }
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        self.rel_gap <= rel_tol
    }
}

fn require_unit_radius(u: &RadialProfile, what: &str) -> Result<()> {
    if (u.radius() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "{what} must be defined on [0, 1], got radius {}",
            u.radius()
        )));
    }
    Ok(())
}

fn strictly_increasing(grid: &[f64]) -> bool {
    grid.windows(2).all(|w| w[1] > w[0])
}

fn reparametrize(
    u: &RadialProfile,
    map: impl Fn(f64) -> f64,
    scale: f64,
    interp: RadialInterp,
) -> Result<RadialProfile> {
    let mut grid: Vec<f64> = u.grid().iter().map(|&r| map(r)).collect();
    grid[0] = 0.0;
    let last = grid.len() - 1;
    // Keep the unit radius exact.
    if (u.radius() - 1.0).abs() <= 1e-12 {
        grid[last] = 1.0;
    }
    if !strictly_increasing(&grid) {
        return Err(Error::InvalidProfile(
            "node coordinates collapse under the change of variables (grid too close to 0)".into(),
        ));
    }
    let values = u.values().iter().map(|v| v * scale).collect();
    RadialProfile::with_interp(grid, values, interp)
}

/// `v(ρ) = u(ρ^ε)/√ε`, with nodes `ρ_j = r_j^{1/ε}`.
pub fn ssw_transform(u: &RadialProfile, weight: &WeightExponent) -> Result<RadialProfile> {
    require_unit_radius(u, "power-map input")?;
    let eps = weight.epsilon();
    if eps == 1.0 {
        return Ok(u.clone());
    }
    let interp = match u.interp() {
        RadialInterp::Power(p) => RadialInterp::Power(p * eps),
        RadialInterp::Log => RadialInterp::Log,
    };
    reparametrize(u, |r| r.powf(1.0 / eps), 1.0 / eps.sqrt(), interp)
}

/// Inverse of [`ssw_transform`]: `u(r) = √ε v(r^{1/ε})`.
pub fn ssw_inverse(v: &RadialProfile, weight: &WeightExponent) -> Result<RadialProfile> {
    require_unit_radius(v, "power-map inverse input")?;
    let eps = weight.epsilon();
    if eps == 1.0 {
        return Ok(v.clone());
    }
    let interp = match v.interp() {
        RadialInterp::Power(p) => RadialInterp::Power(p / eps),
        RadialInterp::Log => RadialInterp::Log,
    };
    reparametrize(v, |rho| rho.powf(eps), eps.sqrt(), interp)
}

/// Dilation `v(ρ) = u*(√ε ρ)` of a profile living on `[0, √ε]` to the unit disk.
///
/// Composed with the radial `μ_α`-rearrangement this gives `v(ρ) = u(ρ^ε)`,
/// the power map without the `1/√ε` factor.
pub fn dilate_to_unit(u_star: &RadialProfile) -> Result<RadialProfile> {
    let radius = u_star.radius();
    let mut grid: Vec<f64> = u_star.grid().iter().map(|r| r / radius).collect();
    let last = grid.len() - 1;
    grid[last] = 1.0;
    let interp = u_star.interp();
    RadialProfile::with_interp(grid, u_star.values().to_vec(), interp)
}

/// `w(t) = √(4π) v(e^{-t/2})` with nodes `t_i = -2 ln ρ_i`.
///
/// The `ρ = 0` node becomes the behavior at `t = ∞`: for power knots the
/// profile keeps interpolating towards `√(4π) v(0)`, for log knots the tail
/// is constant.
pub fn moser_transform(v: &RadialProfile) -> Result<HalfLineProfile> {
    require_unit_radius(v, "Moser-map input")?;
    if v.boundary_value() != 0.0 {
        return Err(Error::Precondition(format!(
            "Moser map needs v(1) = 0, got {}",
            v.boundary_value()
        )));
    }
    let root = (4.0 * PI).sqrt();
    let n = v.grid().len();
    let mut grid = Vec::with_capacity(n - 1);
    let mut values = Vec::with_capacity(n - 1);
    for i in (1..n).rev() {
        grid.push(-2.0 * v.grid()[i].ln());
        values.push(root * v.values()[i]);
    }
    grid[0] = 0.0;
    values[0] = 0.0;
    if grid.len() < 2 {
        // Single segment on [0, 1]: split it at ρ = 1/2 so the bulk is non-empty.
        grid.push(2.0 * 2f64.ln());
        values.push(root * v.eval(0.5));
    }
    match v.interp() {
        RadialInterp::Power(p) => {
            HalfLineProfile::with_exp_knots(grid, values, 0.5 * p, root * v.values()[0])
        }
        RadialInterp::Log => HalfLineProfile::new(grid, values),
    }
}

/// Inverse of [`moser_transform`]: `v(ρ) = w(-2 ln ρ)/√(4π)`.
pub fn moser_inverse(w: &HalfLineProfile) -> Result<RadialProfile> {
    let root = (4.0 * PI).sqrt();
    let n = w.grid().len();
    let mut grid = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    grid.push(0.0);
    values.push(w.tail_value() / root);
    for i in (0..n).rev() {
        grid.push((-0.5 * w.grid()[i]).exp());
        values.push(w.values()[i] / root);
    }
    let last = grid.len() - 1;
    grid[last] = 1.0;
    if !strictly_increasing(&grid) {
        return Err(Error::InvalidProfile(
            "half-line grid extends too far to pull back to the disk".into(),
        ));
    }
    let interp = match w.interp() {
        HalfLineInterp::Linear => RadialInterp::Log,
        HalfLineInterp::Exp(c) => RadialInterp::Power(2.0 * c),
    };
    RadialProfile::with_interp(grid, values, interp)
}

/// `u ↦ w`: power map followed by the Moser map.
pub fn to_halfline(u: &RadialProfile, weight: &WeightExponent) -> Result<HalfLineProfile> {
    moser_transform(&ssw_transform(u, weight)?)
}

/// `w ↦ u`: inverse of [`to_halfline`].
pub fn from_halfline(w: &HalfLineProfile, weight: &WeightExponent) -> Result<RadialProfile> {
    ssw_inverse(&moser_inverse(w)?, weight)
}

/// `∫_B (e^{γu²}-1)|x|^α dx` against `2πε ∫_0^1 (e^{γεv²}-1) ρ dρ`.
pub fn ssw_functional_identity_with_gamma(
    u: &RadialProfile,
    weight: &WeightExponent,
    gamma: f64,
    q: &QuadratureSpec,
) -> Result<IdentityReport> {
    let v = ssw_transform(u, weight)?;
    let eps = weight.epsilon();
    let lhs = weighted_exp_functional(u, weight, gamma, q)?;
    let rhs = eps * weighted_exp_functional(&v, &WeightExponent::unweighted(), gamma * eps, q)?;
    Ok(IdentityReport::new(lhs, rhs))
}

pub fn ssw_functional_identity(
    u: &RadialProfile,
    weight: &WeightExponent,
    q: &QuadratureSpec,
) -> Result<IdentityReport> {
    ssw_functional_identity_with_gamma(u, weight, CRITICAL_GAMMA, q)
}

/// Both identities of the rescaled power map `v(ρ) = u(ρ^ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledIdentityReport {
    /// `∫|∇u|²` against `(2π/ε) ∫ |v'|² ρ dρ`.
    pub energy: IdentityReport,
    /// `∫(e^{4πu²}-1)|x|^α` against `2πε ∫ (e^{4πv²}-1) ρ dρ`.
    pub functional: IdentityReport,
}

/// `v(ρ) = u(ρ^ε)`: the power map without the `1/√ε` factor.
pub fn scaled_power_map(u: &RadialProfile, weight: &WeightExponent) -> Result<RadialProfile> {
    Ok(ssw_transform(u, weight)?.scaled(weight.epsilon().sqrt()))
}

pub fn scaled_power_map_identities(
    u: &RadialProfile,
    weight: &WeightExponent,
    q: &QuadratureSpec,
) -> Result<ScaledIdentityReport> {
    let v = scaled_power_map(u, weight)?;
    scaled_identities_for(u, &v, weight, q)
}

/// Checks the rescaled identities for a given unit-disk profile `v`, e.g. one
/// obtained by rearranging `u` and dilating the result.
pub fn scaled_identities_for(
    u: &RadialProfile,
    v: &RadialProfile,
    weight: &WeightExponent,
    q: &QuadratureSpec,
) -> Result<ScaledIdentityReport> {
    let eps = weight.epsilon();
    let energy = IdentityReport::new(dirichlet_norm_radial(u), dirichlet_norm_radial(v) / eps);
    let functional = IdentityReport::new(
        weighted_exp_functional(u, weight, CRITICAL_GAMMA, q)?,
        eps * weighted_exp_functional(v, &WeightExponent::unweighted(), CRITICAL_GAMMA, q)?,
    );
    Ok(ScaledIdentityReport { energy, functional })
}

/// Disk functional of `u` against its half-line form through both maps, at
/// exponent `γ`.
pub fn full_pipeline_identity_with_gamma(
    u: &RadialProfile,
    weight: &WeightExponent,
    gamma: f64,
    q: &QuadratureSpec,
) -> Result<IdentityReport> {
    if u.boundary_value() != 0.0 {
        return Err(Error::Precondition(format!(
            "pipeline identity needs u(1) = 0, got {}",
            u.boundary_value()
        )));
    }
    let w = to_halfline(u, weight)?;
    let lhs = weighted_exp_functional(u, weight, gamma, q)?;
    let rhs = disk_value_via_halfline(&w, weight, gamma, q)?;
    Ok(IdentityReport::new(lhs, rhs))
}

/// `∫_B (e^{4πu²}-1)|x|^α dx = π ε (∫_0^∞ e^{εw²-t} dt - 1)`.
pub fn full_pipeline_identity(
    u: &RadialProfile,
    weight: &WeightExponent,
    q: &QuadratureSpec,
) -> Result<IdentityReport> {
    full_pipeline_identity_with_gamma(u, weight, CRITICAL_GAMMA, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::dirichlet_norm_halfline;
    use approx::assert_relative_eq;

    fn tent() -> RadialProfile {
        RadialProfile::from_fn(1.0, 41, |r| 1.0 - r).unwrap()
    }

    #[test]
    fn power_map_is_identity_at_alpha_zero() {
        let u = tent();
        assert_eq!(ssw_transform(&u, &WeightExponent::unweighted()).unwrap(), u);
    }

    #[test]
    fn power_map_of_tent_at_alpha_two() {
        // v(ρ) = √2 (1 - √ρ)
        let w = WeightExponent::new(2.0).unwrap();
        let v = ssw_transform(&tent(), &w).unwrap();
        for rho in [0.0, 0.01, 0.2, 0.37, 0.81, 1.0] {
            let expected = 2f64.sqrt() * (1.0 - f64::sqrt(rho));
            assert!((v.eval(rho) - expected).abs() < 1e-13, "rho = {rho}");
        }
    }

    #[test]
    fn power_map_keeps_energy() {
        let u = RadialProfile::from_fn(1.0, 30, |r| (1.0 - r * r) * (1.0 + r).sin()).unwrap();
        for alpha in [0.5, 2.0, 9.0] {
            let w = WeightExponent::new(alpha).unwrap();
            let v = ssw_transform(&u, &w).unwrap();
            assert_relative_eq!(
                dirichlet_norm_radial(&v),
                dirichlet_norm_radial(&u),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn moser_map_of_log_profile_is_linear() {
        // v(ρ) = c ln(1/ρ) on [e^{-T/2}, 1], flat below.
        let c = 0.3;
        let big_t: f64 = 6.0;
        let rho_min = (-0.5 * big_t).exp();
        let mut grid = vec![0.0];
        let mut values = vec![c * big_t / 2.0];
        for k in 0..=12 {
            let rho = rho_min + (1.0 - rho_min) * k as f64 / 12.0;
            grid.push(rho);
            values.push(-c * rho.ln());
        }
        *values.last_mut().unwrap() = 0.0;
        *grid.last_mut().unwrap() = 1.0;
        let v = RadialProfile::with_interp(grid, values, RadialInterp::Log).unwrap();
        let w = moser_transform(&v).unwrap();
        assert_eq!(w.interp(), HalfLineInterp::Linear);
        let root = (4.0 * PI).sqrt();
        for t in [0.0f64, 0.5, 2.0, 5.5, 6.0, 9.0] {
            let expected = root * c * t.min(big_t) / 2.0;
            assert!((w.eval(t) - expected).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn moser_map_keeps_energy_and_rejects_nonzero_trace() {
        let v = tent();
        let w = moser_transform(&v).unwrap();
        assert_relative_eq!(
            dirichlet_norm_halfline(&w),
            dirichlet_norm_radial(&v),
            max_relative = 1e-12
        );
        assert_eq!(w.values()[0], 0.0);
        let bad = RadialProfile::new(vec![0.0, 1.0], vec![1.0, 0.5]).unwrap();
        assert!(matches!(moser_transform(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn two_node_profile_survives_moser_map() {
        let v = RadialProfile::new(vec![0.0, 1.0], vec![0.7, 0.0]).unwrap();
        let w = moser_transform(&v).unwrap();
        assert_relative_eq!(
            dirichlet_norm_halfline(&w),
            dirichlet_norm_radial(&v),
            max_relative = 1e-12
        );
        let back = moser_inverse(&w).unwrap();
        assert!((back.eval(0.3) - v.eval(0.3)).abs() < 1e-14);
    }

    #[test]
    fn zero_profile_identities() {
        let u = RadialProfile::zero(1.0);
        let w = WeightExponent::new(1.0).unwrap();
        let q = QuadratureSpec::default();
        let a = ssw_functional_identity(&u, &w, &q).unwrap();
        let b = full_pipeline_identity(&u, &w, &q).unwrap();
        assert_eq!((a.lhs, a.rhs, b.lhs, b.rhs), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn scaled_map_identities_hold() {
        let u = RadialProfile::from_fn(1.0, 50, |r| 0.4 * (1.0 - r) * (2.0 - r)).unwrap();
        let w = WeightExponent::new(2.0).unwrap();
        let rep = scaled_power_map_identities(&u, &w, &QuadratureSpec::default()).unwrap();
        assert!(rep.energy.rel_gap < 1e-12);
        assert!(rep.functional.rel_gap < 1e-8);
    }

    #[test]
    fn round_trips_at_shared_nodes() {
        let u = RadialProfile::from_fn(1.0, 20, |r| 1.0 - r.powi(3)).unwrap();
        let w = WeightExponent::new(3.0).unwrap();
        let back = from_halfline(&to_halfline(&u, &w).unwrap(), &w).unwrap();
        match back.interp() {
            RadialInterp::Power(p) => assert!((p - 1.0).abs() < 1e-14),
            RadialInterp::Log => panic!("interpolation kind changed"),
        }
        for ((a, b), (x, y)) in back
            .grid()
            .iter()
            .zip(u.grid())
            .zip(back.values().iter().zip(u.values()))
        {
            assert!((a - b).abs() <= 4.0 * f64::EPSILON);
            assert!((x - y).abs() <= 4.0 * f64::EPSILON);
        }
    }
}
