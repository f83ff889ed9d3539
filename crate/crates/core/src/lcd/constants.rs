//! Constants `(k, c′, γ, λ)` of the incompressible LCD lower bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector_geometry::SpreadParams;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LcdConstants {
    pub k: u64,
    pub c_prime: f64,
    pub gamma: f64,
    pub lambda: f64,
}

const GOLDEN_ITERATIONS: usize = 200;

impl LcdConstants {
    /// `ν₂√ν₁/(2√2)`.
    pub fn base(spread: &SpreadParams) -> f64 {
        spread.nu2 * spread.nu1.sqrt() / (2.0 * std::f64::consts::SQRT_2)
    }

    /// `min{c′A, √(1−c′²)A − c′k}`.
    pub fn objective(spread: &SpreadParams, k: u64, c: f64) -> f64 {
        let a = Self::base(spread);
        (c * a).min((1.0 - c * c).sqrt() * a - c * k as f64)
    }

    /// Checks every defining inequality by direct substitution.
    pub fn satisfies_invariants(&self, spread: &SpreadParams) -> bool {
        let k = self.k as f64;
        let a = Self::base(spread);
        let second = (1.0 - self.c_prime * self.c_prime).sqrt() * a - self.c_prime * k;
        1.0 / (k * k) < spread.nu1 / 4.0
            && self.c_prime > 0.0
            && self.c_prime < 1.0
            && second > 0.0
            && self.gamma > 0.0
            && self.gamma < (self.c_prime * a).min(second)
            && (spread.nu3 + k + std::f64::consts::SQRT_2 * self.gamma / spread.nu1.sqrt()) * self.lambda < 1.0
    }
}

fn smallest_k(nu1: f64) -> u64 {
    let mut k = ((2.0 / nu1.sqrt()).floor() as u64).max(2) - 1;
    while 1.0 / ((k * k) as f64) >= nu1 / 4.0 {
        k += 1;
    }
    k
}

/// `k` is the least integer with `1/k² < ν₁/4`; `c′` maximizes the objective
/// by golden-section search on `(0, 1)`; `γ` is 0.99 times the maximum and
/// `λ = 0.99/(ν₃ + k + √2γ/√ν₁)`.
pub fn derive_lcd_constants(spread: &SpreadParams) -> Result<LcdConstants> {
    spread.validate()?;
    let k = smallest_k(spread.nu1);
    let f = |c: f64| LcdConstants::objective(spread, k, c);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
        if hi - lo <= f64::EPSILON * hi.max(1e-300) {
            break;
        }
    }
    let c_prime = (lo + hi) / 2.0;
    let best = f(c_prime);
    if best.is_nan() || best <= 0.0 {
        return Err(Error::Infeasible(format!(
            "no c′ in (0, 1) gives a positive objective (best {best})"
        )));
    }
    let gamma = 0.99 * best;
    let lambda = 0.99 / (spread.nu3 + k as f64 + std::f64::consts::SQRT_2 * gamma / spread.nu1.sqrt());
    Ok(LcdConstants {
        k,
        c_prime,
        gamma,
        lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_threshold() {
        assert_eq!(smallest_k(1.0), 3);
        assert_eq!(smallest_k(2.0), 2);
        assert_eq!(smallest_k(0.00225), 43);
        for nu1 in [0.001, 0.01, 0.3, 0.99, 1.5] {
            let k = smallest_k(nu1) as f64;
            assert!(1.0 / (k * k) < nu1 / 4.0);
            assert!(k == 1.0 || 1.0 / ((k - 1.0) * (k - 1.0)) >= nu1 / 4.0);
        }
    }

    #[test]
    fn matches_closed_form_optimum() {
        // Maximum of min(cA, √(1−c²)A − ck) is where the two branches meet:
        // c = A/√((A+k)² + A²).
        for spread in [SpreadParams::default(), SpreadParams::new(1.0, 1.0, 2.0).unwrap()] {
            let c = derive_lcd_constants(&spread).unwrap();
            let a = LcdConstants::base(&spread);
            let k = c.k as f64;
            let exact = a / ((a + k).powi(2) + a * a).sqrt();
            assert!((c.c_prime - exact).abs() < 1e-7 * exact, "{} vs {exact}", c.c_prime);
            assert!((c.gamma - 0.99 * exact * a).abs() < 1e-9 * c.gamma);
            assert!(c.satisfies_invariants(&spread));
        }
    }

    #[test]
    fn rejects_invalid_spread() {
        let bad = SpreadParams { nu1: 0.1, nu2: 2.0, nu3: 1.0 };
        assert!(derive_lcd_constants(&bad).is_err());
    }
}
