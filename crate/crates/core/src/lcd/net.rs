//! Nets for the annulus `A_D = {D ≤ ‖θ‖₂ ≤ 2D}` and for the LCD level sets
//! `S_D = {v : D ≤ LCD(v) ≤ 2D}`.

use std::f64::consts::TAU;

use super::lattice::{enumerate_lattice_points, ENUMERATION_LIMIT};
use super::LcdParams;
use crate::error::{Error, Result};
use crate::Complex64;

/// An `r`-net of `A_D`: `m + 1` concentric rings at radii `D + iD/m`
/// (`m = ⌈D/r⌉`), each carrying `⌈2πρ_i/r⌉` equally spaced points. A point
/// of the annulus is within `r/2` of a ring radially and within `r/2` of a
/// ring point along it.
pub fn annulus_net(d: f64, r: f64) -> Result<Vec<[f64; 2]>> {
    if !(r > 0.0 && d.is_finite() && r < d) {
        return Err(Error::InvalidParameter(format!("annulus net needs 0 < r < D, got r = {r}, D = {d}")));
    }
    let m = (d / r).ceil() as usize;
    let mut points = Vec::new();
    for i in 0..=m {
        let rho = if i == m { 2.0 * d } else { d + i as f64 * d / m as f64 };
        let count = (TAU * rho / r).ceil() as usize;
        for j in 0..count {
            let phi = TAU * j as f64 / count as f64;
            points.push([rho * phi.cos(), rho * phi.sin()]);
        }
    }
    Ok(points)
}

/// The net `𝒩` of `S_D`: every solution `v′` of `[v′]ᵀθ′ = p` for `θ′` in
/// an `r`-net of `A_D` with `r = Dα/(α + 2D)` and `p ∈ ℤ²ⁿ ∩ B(0, α + 2D)`.
#[derive(Clone, Debug)]
pub struct LevelSetNet {
    pub n: usize,
    pub d: f64,
    pub r: f64,
    pub alpha: f64,
    pub annulus_points: Vec<[f64; 2]>,
    pub lattice_points: usize,
    vectors: Vec<Complex64>,
}

impl LevelSetNet {
    /// `2α/D`.
    pub fn mesh(&self) -> f64 {
        2.0 * self.alpha / self.d
    }

    pub fn len(&self) -> usize {
        self.vectors.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Net vector `i`; it solves `[v′]ᵀθ′ = p` for annulus point
    /// `i / lattice_points` and lattice point `i % lattice_points`.
    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.vectors[i * self.n..(i + 1) * self.n]
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[Complex64]> {
        self.vectors.chunks_exact(self.n)
    }

    /// Index of and Euclidean distance to the closest net vector.
    pub fn nearest(&self, v: &[Complex64]) -> Option<(usize, f64)> {
        if v.len() != self.n {
            return None;
        }
        self.vectors()
            .enumerate()
            .map(|(i, w)| {
                let d2: f64 = w.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum();
                (i, d2)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .map(|(i, d2)| (i, d2.sqrt()))
    }
}

/// Solves `(θ₁ θ₂; θ₂ −θ₁)(Re v_k, Im v_k)ᵀ = (p_k, p_{n+k})ᵀ` for every `k`.
pub(crate) fn solve_bracket(theta: [f64; 2], p: &[i64], out: &mut [Complex64]) {
    let n = out.len();
    let [t1, t2] = theta;
    let t2sum = t1 * t1 + t2 * t2;
    for k in 0..n {
        let (a, b) = (p[k] as f64, p[n + k] as f64);
        out[k] = Complex64::new((t1 * a + t2 * b) / t2sum, (t2 * a - t1 * b) / t2sum);
    }
}

pub fn level_set_net(n: usize, d: f64, params: &LcdParams) -> Result<LevelSetNet> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidParameter(format!("level D = {d} must be positive")));
    }
    let alpha = params.alpha;
    let r = d * alpha / (alpha + 2.0 * d);
    let annulus_points = annulus_net(d, r)?;
    let lattice = enumerate_lattice_points(2 * n, alpha + 2.0 * d, ENUMERATION_LIMIT)?;
    let total = annulus_points.len() as u128 * lattice.len() as u128 * n as u128;
    if total > 50 * ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge {
            size: total,
            limit: 50 * ENUMERATION_LIMIT,
        });
    }
    let mut vectors = vec![Complex64::new(0.0, 0.0); total as usize];
    let mut idx = 0;
    for theta in &annulus_points {
        for p in lattice.iter() {
            solve_bracket(*theta, p, &mut vectors[idx..idx + n]);
            idx += n;
        }
    }
    Ok(LevelSetNet {
        n,
        d,
        r,
        alpha,
        lattice_points: lattice.len(),
        annulus_points,
        vectors,
    })
}
