use serde::{Deserialize, Serialize};

use super::radial::check_grid;
use crate::error::{Error, Result};

/// Coordinate in which a half-line profile is linear between nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rate", rename_all = "lowercase")]
pub enum HalfLineInterp {
    /// Linear in `t`; the profile is constant beyond the last node.
    Linear,
    /// Linear in `e^{-c t}`, `c > 0`. Beyond the last node the profile keeps
    /// interpolating in `e^{-c t}` towards `tail_value`, reached at `t = ∞`.
    Exp(f64),
}

/// A function `w(t)` on `[0, ∞)` in Moser coordinates, with `w(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfLineProfile {
    grid: Vec<f64>,
    values: Vec<f64>,
    interp: HalfLineInterp,
    tail_value: f64,
}

impl HalfLineProfile {
    /// Piecewise linear in `t`, constant (equal to the last value) beyond the last node.
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_grid(&grid, &values, "half-line profile")?;
        if values[0] != 0.0 {
            return Err(Error::InvalidProfile(format!(
                "half-line profile must vanish at t = 0, got {}",
                values[0]
            )));
        }
        let tail_value = *values.last().unwrap();
        Ok(Self {
            grid,
            values,
            interp: HalfLineInterp::Linear,
            tail_value,
        })
    }

    pub fn with_exp_knots(
        grid: Vec<f64>,
        values: Vec<f64>,
        rate: f64,
        tail_value: f64,
    ) -> Result<Self> {
        check_grid(&grid, &values, "half-line profile")?;
        if values[0] != 0.0 {
            return Err(Error::InvalidProfile(format!(
                "half-line profile must vanish at t = 0, got {}",
                values[0]
            )));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidProfile(format!(
                "exponential knot rate must be positive, got {rate}"
            )));
        }
        if !tail_value.is_finite() {
            return Err(Error::InvalidProfile("non-finite tail value".into()));
        }
        Ok(Self {
            grid,
            values,
            interp: HalfLineInterp::Exp(rate),
            tail_value,
        })
    }

    /// Samples `f` on a uniform grid over `[0, t_max]`; `f(0)` is forced to 0.
    pub fn from_fn<F: Fn(f64) -> f64>(t_max: f64, nodes: usize, f: F) -> Result<Self> {
        let n = nodes.max(2);
        let grid: Vec<f64> = (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect();
        let mut values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
        values[0] = 0.0;
        Self::new(grid, values)
    }

    pub fn zero(t_max: f64) -> Self {
        Self {
            grid: vec![0.0, t_max],
            values: vec![0.0, 0.0],
            interp: HalfLineInterp::Linear,
            tail_value: 0.0,
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interp(&self) -> HalfLineInterp {
        self.interp
    }

    pub fn tail_value(&self) -> f64 {
        self.tail_value
    }

    /// Last grid point `T`.
    pub fn t_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn last_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn sup_abs(&self) -> f64 {
        self.values
            .iter()
            .fold(self.tail_value.abs(), |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.tail_value == 0.0 && self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
            interp: self.interp,
            tail_value: self.tail_value * factor,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.grid.len();
        if t <= 0.0 {
            return self.values[0];
        }
        if t >= self.grid[n - 1] {
            return self.eval_tail(t);
        }
        let i = self.grid.partition_point(|&g| g <= t) - 1;
        self.eval_in_segment(i, t)
    }

    pub(crate) fn eval_in_segment(&self, i: usize, t: f64) -> f64 {
        let (a, b) = (self.grid[i], self.grid[i + 1]);
        let (wa, wb) = (self.values[i], self.values[i + 1]);
        if wa == wb {
            return wa;
        }
        let lambda = match self.interp {
            HalfLineInterp::Linear => (t - a) / (b - a),
            HalfLineInterp::Exp(c) => (-c * (t - a)).exp_m1() / (-c * (b - a)).exp_m1(),
        };
        wa + lambda * (wb - wa)
    }

    pub(crate) fn eval_tail(&self, t: f64) -> f64 {
        match self.interp {
            HalfLineInterp::Linear => self.tail_value,
            HalfLineInterp::Exp(c) => {
                let big_t = self.t_max();
                let frac = (-c * (t - big_t)).exp();
                self.tail_value + frac * (self.last_value() - self.tail_value)
            }
        }
    }

    pub(crate) fn segment_energy(&self, i: usize) -> f64 {
        let h = self.grid[i + 1] - self.grid[i];
        let dw = self.values[i + 1] - self.values[i];
        if dw == 0.0 {
            return 0.0;
        }
        match self.interp {
            HalfLineInterp::Linear => dw * dw / h,
            HalfLineInterp::Exp(c) => dw * dw * 0.5 * c / (0.5 * c * h).tanh(),
        }
    }

    pub(crate) fn tail_energy(&self) -> f64 {
        match self.interp {
            HalfLineInterp::Linear => 0.0,
            HalfLineInterp::Exp(c) => {
                let dw = self.last_value() - self.tail_value;
                0.5 * c * dw * dw
            }
        }
    }

    /// `∫ |w'|² dt` restricted to `[0, t_hi]`.
    pub fn energy_up_to(&self, t_hi: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.grid.len() - 1 {
            let (a, b) = (self.grid[i], self.grid[i + 1]);
            if b <= t_hi {
                acc += self.segment_energy(i);
            } else if a < t_hi {
                acc += self.partial_energy(i, a, t_hi);
            }
        }
        let big_t = self.t_max();
        if t_hi > big_t {
            if let HalfLineInterp::Exp(c) = self.interp {
                let dw = self.last_value() - self.tail_value;
                // ∫_T^{t_hi} c² dw² e^{-2c(t-T)} dt
                acc += 0.5 * c * dw * dw * (-(-2.0 * c * (t_hi - big_t)).exp_m1());
            }
        }
        acc
    }

    fn partial_energy(&self, i: usize, lo: f64, hi: f64) -> f64 {
        let (a, b) = (self.grid[i], self.grid[i + 1]);
        let dw = self.values[i + 1] - self.values[i];
        match self.interp {
            HalfLineInterp::Linear => {
                let s = dw / (b - a);
                s * s * (hi - lo)
            }
            HalfLineInterp::Exp(c) => {
                // w = wa + dw (e^{-c(t-a)} - 1) / (e^{-c(b-a)} - 1)
                let denom = (-c * (b - a)).exp_m1();
                let k = dw * c / denom;
                let e2 = |x: f64| (-2.0 * c * (x - a)).exp();
                k * k * (e2(lo) - e2(hi)) / (2.0 * c)
            }
        }
    }
}

/// `∫_0^∞ |w'(t)|² dt`, exact for the stored interpolation.
pub fn dirichlet_norm_halfline(w: &HalfLineProfile) -> f64 {
    (0..w.grid.len() - 1)
        .map(|i| w.segment_energy(i))
        .sum::<f64>()
        + w.tail_energy()
}
