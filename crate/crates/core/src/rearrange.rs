//! Distribution functions and symmetric decreasing rearrangement on the unit
//! disk with respect to `dμ_α = |x|^α dx`.
//!
//! A [`PolarSample`] is read as the bilinear interpolant (in `r` and `θ`) of
//! its node values, sampled at the centres of a fine partition into annular
//! sectors and held constant on each. Its distribution function is then an
//! exact step function with one jump per distinct subcell value, and the
//! rearrangement `u*(x) = inf{t : φ(t) ≤ π|x|²}` lives on the disk of area
//! `μ_α(B)`, of radius `√ε`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{dirichlet_norm_radial, RadialInterp, RadialProfile, WeightExponent};
use crate::quadrature::{integrate_with_breaks, QuadratureSpec};
use crate::transforms::IdentityReport;

/// Subdivisions per grid cell edge used to resolve level sets.
pub const SUBCELLS: usize = 4;

/// Nonnegative samples `u(r_i, θ_j)` on a polar grid, stored row-major by radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarSample {
    radii: Vec<f64>,
    ntheta: usize,
    values: Vec<f64>,
}

impl PolarSample {
    pub fn new(radii: Vec<f64>, ntheta: usize, values: Vec<f64>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidSample(m));
        let nr = radii.len();
        if nr < 2 || ntheta == 0 {
            return bad(format!("need at least 2 radii and 1 angle, got {nr}×{ntheta}"));
        }
        if radii[0] != 0.0 || radii[nr - 1] != 1.0 {
            return bad("radii must run from 0 to 1".into());
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("radii must be strictly increasing".into());
        }
        if values.len() != nr * ntheta {
            return bad(format!(
                "expected {} values for a {nr}×{ntheta} grid, got {}",
                nr * ntheta,
                values.len()
            ));
        }
        if let Some(k) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad(format!(
                "value at ring {}, angle {} is negative or not finite",
                k / ntheta,
                k % ntheta
            ));
        }
        if values[(nr - 1) * ntheta..].iter().any(|&v| v != 0.0) {
            return bad("values on the boundary ring r = 1 must be 0".into());
        }
        Ok(Self {
            radii,
            ntheta,
            values,
        })
    }

    /// Uniform radii `i/(nr-1)` and angles `2πj/ntheta`; the boundary ring is
    /// set to 0 whatever `f` returns there.
    pub fn from_fn(nr: usize, ntheta: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let radii = uniform_radii(nr)?;
        let mut values = Vec::with_capacity(nr * ntheta);
        for (i, &r) in radii.iter().enumerate() {
            for j in 0..ntheta {
                let th = 2.0 * PI * j as f64 / ntheta as f64;
                values.push(if i + 1 == nr { 0.0 } else { f(r * th.cos(), r * th.sin()) });
            }
        }
        Self::new(radii, ntheta, values)
    }

    pub fn from_radial(u: &RadialProfile, nr: usize, ntheta: usize) -> Result<Self> {
        if (u.radius() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSample("radial profile must live on [0, 1]".into()));
        }
        Self::from_fn(nr, ntheta, |x, y| u.eval(x.hypot(y)))
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn nr(&self) -> usize {
        self.radii.len()
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ntheta + j]
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.ntheta as f64
    }

    /// Radial extent `[a, b]` of the cells on ring `i`.
    pub fn ring_bounds(&self, i: usize) -> (f64, f64) {
        let r = &self.radii;
        let a = if i == 0 { 0.0 } else { 0.5 * (r[i - 1] + r[i]) };
        let b = if i + 1 == r.len() { 1.0 } else { 0.5 * (r[i] + r[i + 1]) };
        (a, b)
    }

    /// `(value, μ_α mass)` for every subcell.
    ///
    /// Each grid cell `[r_i, r_{i+1}] × [θ_j, θ_{j+1}]` is split into
    /// [`SUBCELLS`]² annular sectors carrying the bilinear interpolant of the
    /// four corner values at their centres.
    pub fn cells<'a>(&'a self, weight: &'a WeightExponent) -> impl Iterator<Item = (f64, f64)> + 'a {
        let nt = self.ntheta;
        let k = SUBCELLS;
        let dth = self.dtheta() / k as f64;
        (0..self.nr() - 1).flat_map(move |i| {
            let (r0, r1) = (self.radii[i], self.radii[i + 1]);
            (0..k).flat_map(move |a| {
                let lo = r0 + (r1 - r0) * a as f64 / k as f64;
                let hi = if a + 1 == k { r1 } else { r0 + (r1 - r0) * (a + 1) as f64 / k as f64 };
                let m = weight.sector_mass(lo, hi, dth);
                let lam = (a as f64 + 0.5) / k as f64;
                (0..nt).flat_map(move |j| {
                    let jn = (j + 1) % nt;
                    let inner = (1.0 - lam) * self.value(i, j) + lam * self.value(i + 1, j);
                    let outer = (1.0 - lam) * self.value(i, jn) + lam * self.value(i + 1, jn);
                    (0..k).map(move |b| {
                        let mu = (b as f64 + 0.5) / k as f64;
                        ((1.0 - mu) * inner + mu * outer, m)
                    })
                })
            })
        })
    }

    /// `∫_B Φ(u) dμ_α` for the cell function.
    pub fn integrate_weighted(&self, weight: &WeightExponent, phi: impl Fn(f64) -> f64) -> f64 {
        self.cells(weight).map(|(v, m)| phi(v) * m).sum()
    }

    /// Finite-difference Dirichlet energy `∫|∇u|² dx` on the polar grid.
    ///
    /// Radial differences are taken between neighbouring rings along each
    /// ray, which is exact for data that is piecewise linear in `r`. Angular
    /// differences are scaled by `1/r` and weighted by the ring cell area;
    /// the ring at `r = 0` has no angular term.
    pub fn dirichlet_fd(&self) -> f64 {
        let nt = self.ntheta;
        let dth = self.dtheta();
        let r = &self.radii;
        let mut radial = 0.0;
        for i in 0..r.len() - 1 {
            let dr = r[i + 1] - r[i];
            let w = 0.5 * (r[i] + r[i + 1]) / dr * dth;
            for j in 0..nt {
                let d = self.value(i + 1, j) - self.value(i, j);
                radial += w * d * d;
            }
        }
        let mut angular = 0.0;
        if nt > 1 {
            for (i, &ri) in r.iter().enumerate().skip(1) {
                let (a, b) = self.ring_bounds(i);
                let area = 0.5 * dth * (b * b - a * a);
                let scale = area / (ri * dth).powi(2);
                for j in 0..nt {
                    let d = self.value(i, (j + 1) % nt) - self.value(i, j);
                    angular += scale * d * d;
                }
            }
        }
        radial + angular
    }
}

fn uniform_radii(nr: usize) -> Result<Vec<f64>> {
    if nr < 2 {
        return Err(Error::InvalidSample(format!("need at least 2 radii, got {nr}")));
    }
    let mut radii: Vec<f64> = (0..nr).map(|i| i as f64 / (nr - 1) as f64).collect();
    radii[nr - 1] = 1.0;
    Ok(radii)
}

fn parse_row(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("{s:?}: {e}"),
            })
        })
        .collect()
}

/// Reads the sample text format: an optional `nr,ntheta` header line, a line
/// with the two dimensions, then `nr` rows of `ntheta` comma-separated
/// values. Radii are uniform on `[0, 1]`. Blank lines and `#` comments are
/// skipped.
pub fn parse_sample(text: &str) -> Result<PolarSample> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();
    if let Some((_, l)) = lines.peek() {
        if l.replace(' ', "").eq_ignore_ascii_case("nr,ntheta") {
            lines.next();
        }
    }
    let (dline, dims) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing `nr,ntheta` dimensions".into(),
    })?;
    let dims: Vec<usize> = dims
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: dline,
            msg: format!("dimensions: {e}"),
        })?;
    let [nr, ntheta] = dims[..] else {
        return Err(Error::Parse {
            line: dline,
            msg: "dimensions line must hold exactly `nr,ntheta`".into(),
        });
    };
    let mut values = Vec::with_capacity(nr * ntheta);
    let mut rows = 0;
    for (n, l) in lines {
        let row = parse_row(l, n)?;
        if row.len() != ntheta {
            return Err(Error::Parse {
                line: n,
                msg: format!("expected {ntheta} values, got {}", row.len()),
            });
        }
        values.extend(row);
        rows += 1;
    }
    if rows != nr {
        return Err(Error::Parse {
            line: dline,
            msg: format!("header announces {nr} rows, file has {rows}"),
        });
    }
    PolarSample::new(uniform_radii(nr)?, ntheta, values)
}

pub fn read_sample(path: impl AsRef<Path>) -> Result<PolarSample> {
    parse_sample(&std::fs::read_to_string(path)?)
}

/// Writes the sample format read by [`parse_sample`]. Radii are not stored,
/// so the sample must be on the uniform grid.
pub fn format_sample(s: &PolarSample) -> Result<String> {
    let uniform = uniform_radii(s.nr())?;
    if s.radii().iter().zip(&uniform).any(|(a, b)| (a - b).abs() > 1e-15) {
        return Err(Error::InvalidSample("only uniform radii can be written".into()));
    }
    let mut out = format!("nr,ntheta\n{},{}\n", s.nr(), s.ntheta());
    for row in s.values().chunks(s.ntheta()) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum MeasureTag {
    Lebesgue,
    MuAlpha(f64),
}

impl MeasureTag {
    pub fn of(weight: &WeightExponent) -> Self {
        if weight.alpha() == 0.0 {
            MeasureTag::Lebesgue
        } else {
            MeasureTag::MuAlpha(weight.alpha())
        }
    }
}

/// `φ(t) = μ({u > t})` for a cell function.
///
/// `thresholds` are the distinct sample values in decreasing order and
/// `masses[k] = φ(thresholds[k])`; between jumps `φ` is constant, and it is
/// right-continuous at each jump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFunction {
    pub thresholds: Vec<f64>,
    pub masses: Vec<f64>,
    /// Mass of the level set `{u = thresholds[k]}`.
    pub level_masses: Vec<f64>,
    pub total_mass: f64,
    pub measure: MeasureTag,
}

impl DistributionFunction {
    pub fn eval(&self, t: f64) -> f64 {
        // First index with threshold ≤ t; every level before it lies above t.
        let k = self.thresholds.partition_point(|&v| v > t);
        if k == 0 {
            0.0
        } else {
            self.masses[k - 1] + self.level_masses[k - 1]
        }
    }

    /// `u*(r) = inf{t ≥ 0 : φ(t) ≤ πr²}`.
    pub fn rearranged_value(&self, r: f64) -> f64 {
        let s = PI * r * r;
        if self.thresholds.is_empty() || s >= self.total_mass {
            // Every superlevel set fits, so the infimum is over all t ≥ 0.
            return 0.0;
        }
        // masses[0] = 0 and masses is non-decreasing: take the last level
        // whose strict superlevel set still fits in the disk.
        let j = self.masses.partition_point(|&m| m <= s) - 1;
        self.thresholds[j]
    }
}

impl DistributionFunction {
    /// `∫_0^m u*` in the area coordinate `m = π|x|²`.
    fn primitive(&self, m: f64) -> f64 {
        let m = m.clamp(0.0, self.total_mass);
        let j = self.masses.partition_point(|&x| x <= m);
        if j == 0 {
            return 0.0;
        }
        let below: f64 = self.thresholds[..j - 1]
            .iter()
            .zip(&self.level_masses[..j - 1])
            .map(|(v, w)| v * w)
            .sum();
        below + self.thresholds[j - 1] * (m - self.masses[j - 1])
    }

    /// Mean of `u*` over the ring `lo < π|x|² < hi`.
    pub fn mean_rearranged(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return self.rearranged_value((lo / PI).max(0.0).sqrt());
        }
        ((self.primitive(hi) - self.primitive(lo)) / (hi - lo)).max(0.0)
    }
}

pub fn distribution_function(s: &PolarSample, weight: &WeightExponent) -> DistributionFunction {
    let mut cells: Vec<(f64, f64)> = s.cells(weight).collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut thresholds = Vec::new();
    let mut level_masses: Vec<f64> = Vec::new();
    for (v, m) in cells {
        if thresholds.last() == Some(&v) {
            *level_masses.last_mut().unwrap() += m;
        } else {
            thresholds.push(v);
            level_masses.push(m);
        }
    }
    let mut masses = Vec::with_capacity(thresholds.len());
    let mut acc = 0.0;
    for m in &level_masses {
        masses.push(acc);
        acc += m;
    }
    DistributionFunction {
        thresholds,
        masses,
        level_masses,
        total_mass: acc,
        measure: MeasureTag::of(weight),
    }
}

/// Rearrangement of a radial non-increasing profile on `[0, 1]`:
/// `u*(R) = u(R^ε ε^{-ε/2})` on `[0, √ε]`.
///
/// Node `r_i` moves to `√ε r_i^{1/ε}`; the interpolation coordinate moves with
/// it, so the output is the same function of the pulled-back variable.
pub fn mu_rearrange_radial(u: &RadialProfile, weight: &WeightExponent) -> Result<RadialProfile> {
    if (u.radius() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition("radial rearrangement needs a profile on [0, 1]".into()));
    }
    if u.values().iter().any(|&v| v < 0.0) {
        return Err(Error::Precondition("radial rearrangement needs u ≥ 0".into()));
    }
    if !u.is_nonincreasing() {
        return Err(Error::Precondition(
            "radial rearrangement formula only applies to non-increasing profiles".into(),
        ));
    }
    let eps = weight.epsilon();
    if eps == 1.0 {
        return Ok(u.clone());
    }
    let root = weight.star_radius();
    let mut grid: Vec<f64> = u.grid().iter().map(|&r| root * r.powf(1.0 / eps)).collect();
    let last = grid.len() - 1;
    grid[last] = root;
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidProfile(
            "node coordinates collapse under the change of variables (grid too close to 0)".into(),
        ));
    }
    let interp = match u.interp() {
        RadialInterp::Power(p) => RadialInterp::Power(p * eps),
        RadialInterp::Log => RadialInterp::Log,
    };
    RadialProfile::with_interp(grid, u.values().to_vec(), interp)
}

/// `u*` of a polar sample as a radial profile on `[0, √ε]`.
///
/// Ring `[a, b]` of the sample has the same mass as the disk ring
/// `[√ε a^{1/ε}, √ε b^{1/ε}]`; the node at `√ε r_i^{1/ε}` carries the mean of
/// the exact step rearrangement over that image ring. For radial input this
/// reproduces the sample values exactly.
pub fn mu_rearrange_general(s: &PolarSample, weight: &WeightExponent) -> RadialProfile {
    let phi = distribution_function(s, weight);
    let eps = weight.epsilon();
    let root = weight.star_radius();
    let image = |r: f64| root * r.powf(1.0 / eps);
    let n = s.nr();
    let mut grid: Vec<f64> = s.radii().iter().map(|&r| image(r)).collect();
    grid[n - 1] = root;
    let mut values: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = s.ring_bounds(i);
            phi.mean_rearranged(PI * image(a).powi(2), PI * image(b).powi(2))
        })
        .collect();
    // Means of a non-increasing function are non-increasing; remove rounding noise.
    for i in 1..n {
        values[i] = values[i].min(values[i - 1]);
    }
    RadialProfile::new(grid, values).expect("image of an increasing grid")
}

/// `∫_B Φ(u) dμ_α` against `∫ Φ(u*) dx`, where `u*` is evaluated pointwise
/// from the inversion formula and integrated over `r` with breakpoints at
/// the radii where it jumps.
pub fn equimeasurability(
    s: &PolarSample,
    weight: &WeightExponent,
    phi: impl Fn(f64) -> f64,
    q: &QuadratureSpec,
) -> IdentityReport {
    let lhs = s.integrate_weighted(weight, &phi);
    let dist = distribution_function(s, weight);
    let mut breaks: Vec<f64> = dist.masses.iter().map(|m| (m / PI).sqrt()).collect();
    breaks.push((dist.total_mass / PI).sqrt());
    breaks.push(weight.star_radius());
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let rhs = 2.0 * PI * integrate_with_breaks(|r| phi(dist.rearranged_value(r)) * r, &breaks, q).value;
    IdentityReport::new(lhs, rhs)
}

/// Same comparison for the sampled profile returned by [`mu_rearrange_general`].
pub fn equimeasurability_sampled(
    s: &PolarSample,
    weight: &WeightExponent,
    phi: impl Fn(f64) -> f64,
    q: &QuadratureSpec,
) -> IdentityReport {
    let lhs = s.integrate_weighted(weight, &phi);
    let star = mu_rearrange_general(s, weight);
    let rhs = 2.0 * PI * integrate_with_breaks(|r| phi(star.eval(r)) * r, star.grid(), q).value;
    IdentityReport::new(lhs, rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyaSzegoReport {
    /// Finite-difference `∫|∇u|²` of the sample.
    pub dirichlet: f64,
    /// `∫|∇u*|²` of the sampled rearrangement.
    pub dirichlet_rearranged: f64,
    /// `dirichlet_rearranged / dirichlet`; 0 for the zero sample.
    pub ratio: f64,
    pub alpha: f64,
}

impl PolyaSzegoReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.ratio <= 1.0 + tolerance
    }
}

pub fn polya_szego_check(s: &PolarSample, weight: &WeightExponent) -> PolyaSzegoReport {
    let dirichlet = s.dirichlet_fd();
    let star = mu_rearrange_general(s, weight);
    let dirichlet_rearranged = dirichlet_norm_radial(&star);
    let ratio = if dirichlet > 0.0 {
        dirichlet_rearranged / dirichlet
    } else {
        0.0
    };
    PolyaSzegoReport {
        dirichlet,
        dirichlet_rearranged,
        ratio,
        alpha: weight.alpha(),
    }
}
