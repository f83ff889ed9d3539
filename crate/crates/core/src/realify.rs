//! Real embedding of complex vectors.
//!
//! For `v ∈ ℂⁿ`, `v̂ = (Re v, Im v) ∈ ℝ²ⁿ` and `[v]` is the 2×2n matrix with
//! rows `(Re vᵀ, −Im vᵀ)` and `(Im vᵀ, Re vᵀ)`, so that `[v]â` encodes the
//! bilinear product `vᵀa` and `‖[v]â‖₂ = |vᵀa|`. `[v]` is never stored.

use crate::error::{Error, Result};
use crate::Complex64;

/// `v̂ ∈ ℝ²ⁿ`: real parts first, then imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct RealifiedVector {
    data: Vec<f64>,
}

impl RealifiedVector {
    pub fn from_real(data: Vec<f64>) -> Result<Self> {
        if !data.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "realified vector has odd length {}",
                data.len()
            )));
        }
        Ok(Self { data })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Half the length, i.e. the complex dimension.
    pub fn complex_dim(&self) -> usize {
        self.data.len() / 2
    }

    pub fn complexify(&self) -> Vec<Complex64> {
        let n = self.complex_dim();
        (0..n)
            .map(|k| Complex64::new(self.data[k], self.data[n + k]))
            .collect()
    }
}

pub fn hat(v: &[Complex64]) -> RealifiedVector {
    let mut data: Vec<f64> = v.iter().map(|z| z.re).collect();
    data.extend(v.iter().map(|z| z.im));
    RealifiedVector { data }
}

/// `[v]â = (Re(vᵀa), Im(vᵀa))`, no conjugation.
pub fn bracket_apply(v: &[Complex64], a: &[Complex64]) -> Result<[f64; 2]> {
    if v.len() != a.len() {
        return Err(Error::DimensionMismatch(format!(
            "bracket of length {} applied to vector of length {}",
            v.len(),
            a.len()
        )));
    }
    let s: Complex64 = v.iter().zip(a).map(|(x, y)| x * y).sum();
    Ok([s.re, s.im])
}

/// `[v]ᵀθ ∈ ℝ²ⁿ`.
pub fn bracket_transpose_apply(v: &[Complex64], theta: [f64; 2]) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0; 2 * n];
    bracket_transpose_into(v, theta, &mut out);
    out
}

pub(crate) fn bracket_transpose_into(v: &[Complex64], theta: [f64; 2], out: &mut [f64]) {
    let n = v.len();
    let [t1, t2] = theta;
    for (k, z) in v.iter().enumerate() {
        out[k] = t1 * z.re + t2 * z.im;
        out[n + k] = -t1 * z.im + t2 * z.re;
    }
}

/// Rotates `θ` by 90° and `p` blockwise to match; the residual
/// `‖[v]ᵀθ − p‖₂` and `‖θ‖₂` are unchanged.
pub fn symmetry_swap(theta: [f64; 2], p: &[i64]) -> Result<([f64; 2], Vec<i64>)> {
    if !p.len().is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "lattice point has odd length {}",
            p.len()
        )));
    }
    let n = p.len() / 2;
    let mut q = vec![0i64; p.len()];
    for k in 0..n {
        q[k] = -p[n + k];
        q[n + k] = p[k];
    }
    Ok(([-theta[1], theta[0]], q))
}
