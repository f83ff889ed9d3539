//! Integer points in Euclidean balls.

use crate::error::{Error, Result};

/// Largest enumeration [`enumerate_lattice_points`] will materialize.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Squared radii up to this bound are handled by the counting recursion.
const MAX_SQUARED_RADIUS: u64 = 100_000_000;

/// Points of `ℤ^dim ∩ B(0, radius)` (closed ball), stored row by row.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePoints {
    pub dim: usize,
    pub coords: Vec<i64>,
}

impl LatticePoints {
    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.coords.chunks_exact(self.dim.max(1))
    }
}

/// `⌊radius²⌋` with a relative slack of 1e-12 so that points exactly on the
/// sphere are kept.
fn squared_bound(radius: f64) -> Result<u64> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius {radius} must be finite and nonnegative")));
    }
    let r2 = (radius * radius * (1.0 + 1e-12)).floor();
    if r2 > MAX_SQUARED_RADIUS as f64 {
        return Err(Error::InvalidParameter(format!("radius {radius} too large to count")));
    }
    Ok(r2 as u64)
}

/// Exact `|ℤ^dim ∩ B(0, radius)|`.
pub fn lattice_points_in_ball(dim: usize, radius: f64) -> Result<u128> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    let m = squared_bound(radius)? as usize;
    // counts[s] = number of vectors in the dimensions processed so far with
    // squared norm s.
    let mut counts = vec![0u128; m + 1];
    counts[0] = 1;
    let xmax = (m as f64).sqrt().floor() as usize;
    for _ in 0..dim {
        let mut next = vec![0u128; m + 1];
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for x in 0..=xmax {
                let t = s + x * x;
                if t > m {
                    break;
                }
                let mult = if x == 0 { 1 } else { 2 };
                next[t] = next[t].saturating_add(c.saturating_mul(mult));
            }
        }
        counts = next;
    }
    Ok(counts.iter().fold(0u128, |a, &c| a.saturating_add(c)))
}

/// All points of `ℤ^dim ∩ B(0, radius)` in lexicographic order. Fails with
/// [`Error::EnumerationTooLarge`] above `limit` points.
pub fn enumerate_lattice_points(dim: usize, radius: f64, limit: u128) -> Result<LatticePoints> {
    let count = lattice_points_in_ball(dim, radius)?;
    if count > limit {
        return Err(Error::EnumerationTooLarge { size: count, limit });
    }
    let m = squared_bound(radius)? as i64;
    let mut coords = Vec::with_capacity(count as usize * dim);
    let mut point = vec![0i64; dim];
    fn recurse(j: usize, budget: i64, point: &mut [i64], out: &mut Vec<i64>) {
        if j == point.len() {
            out.extend_from_slice(point);
            return;
        }
        let xmax = (budget as f64).sqrt().floor() as i64;
        let xmax = if (xmax + 1) * (xmax + 1) <= budget { xmax + 1 } else { xmax };
        for x in -xmax..=xmax {
            if x * x <= budget {
                point[j] = x;
                recurse(j + 1, budget - x * x, point, out);
            }
        }
    }
    recurse(0, m, &mut point, &mut coords);
    debug_assert_eq!(coords.len() as u128, count * dim as u128);
    Ok(LatticePoints { dim, coords })
}
