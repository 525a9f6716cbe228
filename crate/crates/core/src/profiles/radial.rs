use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate in which a radial profile is linear between nodes.
///
/// Plain piecewise-linear data uses `Power(1.0)`. The other variants appear
/// when a piecewise-linear profile is pushed through a change of variables:
/// reparametrizing node coordinates keeps the same function only if the
/// interpolation coordinate is carried along.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "lowercase")]
pub enum RadialInterp {
    /// Linear in `r^p`, `p > 0`.
    Power(f64),
    /// Linear in `ln r`; the segment touching the origin must be flat.
    Log,
}

impl RadialInterp {
    pub const LINEAR: RadialInterp = RadialInterp::Power(1.0);

    fn coord(self, r: f64) -> f64 {
        match self {
            RadialInterp::Power(p) => r.powf(p),
            RadialInterp::Log => r.ln(),
        }
    }
}

/// A radial function `u(r)` on `[0, R]` given by node values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
    interp: RadialInterp,
}

pub(crate) fn check_grid(grid: &[f64], values: &[f64], what: &str) -> Result<()> {
    if grid.len() != values.len() {
        return Err(Error::InvalidProfile(format!(
            "{what}: {} grid points but {} values",
            grid.len(),
            values.len()
        )));
    }
    if grid.len() < 2 {
        return Err(Error::InvalidProfile(format!("{what}: need at least two nodes")));
    }
    if grid[0] != 0.0 {
        return Err(Error::InvalidProfile(format!(
            "{what}: first grid point must be 0, got {}",
            grid[0]
        )));
    }
    for (i, w) in grid.windows(2).enumerate() {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::InvalidProfile(format!(
                "{what}: grid not strictly increasing at node {}",
                i + 1
            )));
        }
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidProfile(format!("{what}: non-finite value at node {i}")));
    }
    Ok(())
}

impl RadialProfile {
    /// Piecewise-linear profile in `r`.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::with_interp(grid, values, RadialInterp::LINEAR)
    }

    pub fn with_interp(grid: Vec<f64>, values: Vec<f64>, interp: RadialInterp) -> Result<Self> {
        check_grid(&grid, &values, "radial profile")?;
        match interp {
            RadialInterp::Power(p) if !(p > 0.0 && p.is_finite()) => {
                return Err(Error::InvalidProfile(format!(
                    "power interpolation exponent must be positive, got {p}"
                )))
            }
            RadialInterp::Log if values[0] != values[1] => {
                return Err(Error::InvalidProfile(
                    "log interpolation needs a flat first segment".into(),
                ))
            }
            _ => {}
        }
        Ok(Self {
            grid,
            values,
            interp,
        })
    }

    /// Samples `f` on a uniform grid of `nodes` points over `[0, radius]`.
    pub fn from_fn<F: Fn(f64) -> f64>(radius: f64, nodes: usize, f: F) -> Result<Self> {
        let n = nodes.max(2);
        let grid: Vec<f64> = (0..n)
            .map(|i| radius * i as f64 / (n - 1) as f64)
            .collect();
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn zero(radius: f64) -> Self {
        Self {
            grid: vec![0.0, radius],
            values: vec![0.0, 0.0],
            interp: RadialInterp::LINEAR,
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interp(&self) -> RadialInterp {
        self.interp
    }

    pub fn radius(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn boundary_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
            interp: self.interp,
        }
    }

    /// Value at `r`; constant extension outside the grid.
    pub fn eval(&self, r: f64) -> f64 {
        let n = self.grid.len();
        if r <= 0.0 {
            return self.values[0];
        }
        if r >= self.grid[n - 1] {
            return self.values[n - 1];
        }
        let i = self.grid.partition_point(|&g| g <= r) - 1;
        self.eval_in_segment(i, r)
    }

    pub(crate) fn eval_in_segment(&self, i: usize, r: f64) -> f64 {
        let (a, b) = (self.grid[i], self.grid[i + 1]);
        let (ua, ub) = (self.values[i], self.values[i + 1]);
        if ua == ub {
            return ua;
        }
        let lambda = match self.interp {
            RadialInterp::Power(1.0) => (r - a) / (b - a),
            RadialInterp::Power(p) => (r.powf(p) - a.powf(p)) / (b.powf(p) - a.powf(p)),
            // a > 0 here: the first log segment is flat.
            RadialInterp::Log => (r / a).ln() / (b / a).ln(),
        };
        ua + lambda * (ub - ua)
    }

    /// Exact `2π ∫ |u'|² r dr` over the part of segment `i` inside `[lo, hi]`.
    fn segment_energy_between(&self, i: usize, lo: f64, hi: f64) -> f64 {
        let (a, b) = (self.grid[i], self.grid[i + 1]);
        let du = self.values[i + 1] - self.values[i];
        let lo = lo.max(a);
        let hi = hi.min(b);
        if du == 0.0 || hi <= lo {
            return 0.0;
        }
        match self.interp {
            RadialInterp::Power(p) => {
                let dphi = self.interp.coord(b) - self.interp.coord(a);
                let slope = du / dphi;
                PI * p * slope * slope * (hi.powf(2.0 * p) - lo.powf(2.0 * p))
            }
            RadialInterp::Log => {
                let dphi = (b / a).ln();
                let slope = du / dphi;
                2.0 * PI * slope * slope * (hi / lo).ln()
            }
        }
    }

    /// Dirichlet energy of segment `i`, in a cancellation-free form.
    pub(crate) fn segment_energy(&self, i: usize) -> f64 {
        let (a, b) = (self.grid[i], self.grid[i + 1]);
        let du = self.values[i + 1] - self.values[i];
        if du == 0.0 {
            return 0.0;
        }
        match self.interp {
            RadialInterp::Power(p) if a == 0.0 => PI * p * du * du,
            RadialInterp::Power(p) => {
                let x = 0.5 * p * (b / a).ln();
                PI * p * du * du / x.tanh()
            }
            RadialInterp::Log => 2.0 * PI * du * du / (b / a).ln(),
        }
    }

    /// Dirichlet energy restricted to the annulus `lo < r < hi`.
    pub fn energy_between(&self, lo: f64, hi: f64) -> f64 {
        (0..self.grid.len() - 1)
            .map(|i| {
                let (a, b) = (self.grid[i], self.grid[i + 1]);
                if lo <= a && b <= hi {
                    self.segment_energy(i)
                } else {
                    self.segment_energy_between(i, lo, hi)
                }
            })
            .sum()
    }
}

/// `∫_B |∇u|² dx = 2π ∫ |u'|² r dr`, exact for the stored interpolation.
pub fn dirichlet_norm_radial(u: &RadialProfile) -> f64 {
    (0..u.grid.len() - 1).map(|i| u.segment_energy(i)).sum()
}
