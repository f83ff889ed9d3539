//! Essential least common denominator (LCD) of real and complex unit vectors,
//! the constants of the incompressible lower bound, and level-set nets.
//!
//! For `v ∈ ℂⁿ` and parameters `α > 0`, `γ ∈ (0, 1)`,
//!
//! ```text
//! LCD(v) = inf { ‖θ‖₂ : θ ∈ ℝ², dist([v]ᵀθ, ℤ²ⁿ) < min(γ‖θ‖₂, α) }.
//! ```
//!
//! The real `lcd` is the same with `θ ∈ (0, ∞)` and `θv ∈ ℝⁿ`.

mod constants;
mod lattice;
mod net;
mod search;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use constants::{derive_lcd_constants, LcdConstants};
pub use lattice::{enumerate_lattice_points, lattice_points_in_ball, LatticePoints, ENUMERATION_LIMIT};
pub use net::{annulus_net, level_set_net, LevelSetNet};
pub use search::{
    complex_lcd, complex_lcd_with, lcd_feasibility, real_lcd, real_lcd_with, Feasibility,
    SearchOptions,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcdParams {
    pub alpha: f64,
    pub gamma: f64,
}

impl LcdParams {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        let p = Self { alpha, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!("alpha = {} must be positive", self.alpha)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidParameter(format!("gamma = {} must lie in (0, 1)", self.gamma)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LcdValue {
    /// The infimum, approached from inside the feasible set.
    Finite(f64),
    /// No feasible `θ` with `‖θ‖₂` below this bound.
    AtLeast(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcdResult {
    pub value: LcdValue,
    /// A feasible `θ` (length 2 for complex vectors, 1 for real ones).
    pub witness_theta: Option<Vec<f64>>,
    pub witness_p: Option<Vec<i64>>,
    /// `dist([v]ᵀθ, ℤ²ⁿ)` at the witness.
    pub residual: Option<f64>,
    /// `‖witness‖ − value` and any unresolved gap below `value`.
    pub certified_resolution: f64,
    pub cells_explored: u64,
}

impl LcdResult {
    /// A certified lower bound on the LCD.
    pub fn lower_bound(&self) -> f64 {
        match self.value {
            LcdValue::Finite(x) => (x - self.certified_resolution).max(0.0),
            LcdValue::AtLeast(b) => b,
        }
    }

    pub fn finite_value(&self) -> Option<f64> {
        match self.value {
            LcdValue::Finite(x) => Some(x),
            LcdValue::AtLeast(_) => None,
        }
    }

    /// Whether the LCD is certified to be at least `bound`.
    pub fn certifies_at_least(&self, bound: f64) -> bool {
        self.lower_bound() >= bound
    }
}
