//! Numerical toolkit for the weighted critical Trudinger-Moser functional
//!
//! ```text
//! S(α, γ) = sup { ∫_B (e^{γu²} - 1) |x|^α dx : u ∈ H¹₀(B), ‖∇u‖₂ = 1 }
//! ```
//!
//! on the unit disk `B ⊂ ℝ²`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod candidates;
pub mod error;
pub mod optimizer;
pub mod profiles;
pub mod quadrature;
pub mod rearrange;
pub mod transforms;

pub use error::{Error, Result};
