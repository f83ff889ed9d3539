//! Sparse / compressible / incompressible classification of complex unit
//! vectors and their spread sets. Everything is measured on `v̂ ∈ ℝ²ⁿ`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_unit, Error, Result};
use crate::realify::hat;
use crate::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompParams {
    pub delta: f64,
    pub rho: f64,
}

impl Default for DecompParams {
    fn default() -> Self {
        Self { delta: 0.1, rho: 0.3 }
    }
}

impl DecompParams {
    pub fn new(delta: f64, rho: f64) -> Result<Self> {
        let p = Self { delta, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("delta", self.delta), ("rho", self.rho)] {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} = {x} must lie in (0, 1)")));
            }
        }
        Ok(())
    }

    /// `⌊2δn⌋`, the sparsity budget on `v̂`.
    pub fn sparse_budget(&self, n: usize) -> usize {
        sparse_budget(self.delta, n)
    }
}

fn sparse_budget(delta: f64, n: usize) -> usize {
    (2.0 * delta * n as f64 + 1e-9).floor() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpreadParams {
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
}

impl Default for SpreadParams {
    fn default() -> Self {
        Self::from_decomp(&DecompParams::default())
    }
}

impl SpreadParams {
    pub fn new(nu1: f64, nu2: f64, nu3: f64) -> Result<Self> {
        let p = Self { nu1, nu2, nu3 };
        p.validate()?;
        Ok(p)
    }

    /// `ν₁ = δρ²/4`, `ν₂ = ρ/2`, `ν₃ = 2/√(2δ)`.
    pub fn from_decomp(d: &DecompParams) -> Self {
        Self {
            nu1: d.delta * d.rho * d.rho / 4.0,
            nu2: d.rho / 2.0,
            nu3: 2.0 / (2.0 * d.delta).sqrt(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { nu1, nu2, nu3 } = *self;
        if !(nu1 > 0.0 && nu2 > 0.0 && nu3 > 0.0) || !nu3.is_finite() {
            return Err(Error::InvalidParameter("spread parameters must be positive".into()));
        }
        if nu2 >= nu3 {
            return Err(Error::InvalidParameter(format!("need nu2 < nu3, got {nu2} ≥ {nu3}")));
        }
        if nu1 > 2.0 {
            return Err(Error::InvalidParameter(format!("nu1 = {nu1} exceeds 2")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VectorKind {
    Sparse,
    Compressible,
    Incompressible,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorClass {
    pub kind: VectorKind,
    pub dist_to_sparse: f64,
}

impl VectorClass {
    /// Sparse vectors are compressible too.
    pub fn is_compressible(&self) -> bool {
        self.kind != VectorKind::Incompressible
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpreadSet {
    /// Zero-based indices into `v̂`.
    pub indices: Vec<usize>,
    /// `|σ| ≥ ν₁n`.
    pub large_enough: bool,
}

impl SpreadSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Number of entries of `v̂` with magnitude above `zero_tol`.
pub fn support_size(v: &[Complex64], zero_tol: f64) -> usize {
    hat(v).as_slice().iter().filter(|x| x.abs() > zero_tol).count()
}

/// `1e-12·‖v̂‖_∞`.
pub fn default_zero_tol(v: &[Complex64]) -> f64 {
    1e-12 * hat(v).as_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Distance from `v̂` to the `⌊2δn⌋`-sparse vectors: the norm of all but the
/// largest `⌊2δn⌋` entries.
pub fn dist_to_sparse(v: &[Complex64], delta: f64) -> Result<f64> {
    ensure_unit(norm(v))?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1)")));
    }
    let mut mags: Vec<f64> = hat(v).as_slice().iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let keep = sparse_budget(delta, v.len()).min(mags.len());
    Ok(mags[keep..].iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Ties at `dist = ρ` count as compressible.
pub fn classify(v: &[Complex64], params: &DecompParams) -> Result<VectorClass> {
    params.validate()?;
    let dist = dist_to_sparse(v, params.delta)?;
    let sparse = support_size(v, default_zero_tol(v)) <= params.sparse_budget(v.len());
    let kind = if sparse {
        VectorKind::Sparse
    } else if dist <= params.rho {
        VectorKind::Compressible
    } else {
        VectorKind::Incompressible
    };
    let dist_to_sparse = if sparse { 0.0 } else { dist };
    Ok(VectorClass { kind, dist_to_sparse })
}

/// `σ = {k : ν₂/√n ≤ |ẑ_k| ≤ ν₃/√n}`.
pub fn spread_set(z: &[Complex64], params: &SpreadParams) -> Result<SpreadSet> {
    ensure_unit(norm(z))?;
    params.validate()?;
    let n = z.len() as f64;
    let lo = params.nu2 / n.sqrt();
    let hi = params.nu3 / n.sqrt();
    let indices: Vec<usize> = hat(z)
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, x)| (lo..=hi).contains(&x.abs()))
        .map(|(k, _)| k)
        .collect();
    let large_enough = indices.len() as f64 >= params.nu1 * n;
    Ok(SpreadSet { indices, large_enough })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::ScalarDistribution;
    use crate::rng::RandomStream;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e(n: usize, k: usize) -> Vec<Complex64> {
        let mut v = vec![c(0.0, 0.0); n];
        v[k] = c(1.0, 0.0);
        v
    }

    fn flat(n: usize) -> Vec<Complex64> {
        let s = 1.0 / (2.0 * n as f64).sqrt();
        vec![c(s, s); n]
    }

    fn normalize(mut v: Vec<Complex64>) -> Vec<Complex64> {
        let r = norm(&v);
        v.iter_mut().for_each(|z| *z /= r);
        v
    }

    #[test]
    fn support_examples() {
        assert_eq!(support_size(&e(3, 0), 0.0), 1);
        assert_eq!(support_size(&[c(1.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)], 0.0), 2);
        assert_eq!(support_size(&[c(0.0, 0.0); 4], 0.0), 0);
    }

    #[test]
    fn flat_distance() {
        let d = dist_to_sparse(&flat(4), 0.25).unwrap();
        assert!((d - (6.0f64 / 8.0).sqrt()).abs() < 1e-12);
        assert_eq!(dist_to_sparse(&e(5, 2), 0.1).unwrap(), 0.0);
        assert!(matches!(
            dist_to_sparse(&[c(2.0, 0.0)], 0.5),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn classification_examples() {
        let p = DecompParams::default();
        assert_eq!(classify(&e(10, 0), &p).unwrap().kind, VectorKind::Sparse);
        let q = DecompParams::new(0.25, 0.3).unwrap();
        let class = classify(&flat(4), &q).unwrap();
        assert_eq!(class.kind, VectorKind::Incompressible);
        assert!((class.dist_to_sparse - 0.8660254037844386).abs() < 1e-12);

        let n = 20;
        let mut v: Vec<Complex64> = vec![c(0.01, 0.01); n];
        v[0] = c(0.999, 0.0);
        let v = normalize(v);
        let class = classify(&v, &p).unwrap();
        assert_eq!(class.kind, VectorKind::Compressible);
        assert!(class.dist_to_sparse > 0.0 && class.dist_to_sparse <= 0.3);
        assert!(classify(&[c(0.5, 0.0)], &p).is_err());
    }

    #[test]
    fn tie_at_rho_is_compressible() {
        // n = 5, δ = 0.1: budget 1, so the 0.6 entry is the whole tail.
        let mut v = vec![c(0.0, 0.0); 5];
        v[0] = c(0.8, 0.6);
        let p = DecompParams::new(0.1, 0.6).unwrap();
        let class = classify(&v, &p).unwrap();
        assert_eq!(class.dist_to_sparse, 0.6);
        assert_eq!(class.kind, VectorKind::Compressible);
    }

    #[test]
    fn spread_examples() {
        let p = SpreadParams::new(0.5, 0.5, 2.0).unwrap();
        let s = spread_set(&flat(9), &p).unwrap();
        assert_eq!(s.len(), 18);
        assert!(s.large_enough);
        for n in 5..12 {
            assert!(spread_set(&e(n, 0), &p).unwrap().is_empty());
        }
        assert!(SpreadParams::new(0.5, 2.0, 1.0).is_err());
        assert!(SpreadParams::new(3.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn default_spread_params() {
        let s = SpreadParams::default();
        assert!((s.nu1 - 0.00225).abs() < 1e-15);
        assert!((s.nu2 - 0.15).abs() < 1e-15);
        assert!((s.nu3 - 2.0 / 0.2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn incompressible_samples_have_large_spread() {
        let d = DecompParams::default();
        let sp = SpreadParams::default();
        let g = ScalarDistribution::standard_gaussian();
        let mut rng = RandomStream::new(3, "spread", 0);
        let n = 16;
        let mut seen = 0;
        while seen < 1000 {
            let v = normalize((0..n).map(|_| c(g.sample(&mut rng), g.sample(&mut rng))).collect());
            if classify(&v, &d).unwrap().kind == VectorKind::Incompressible {
                assert!(spread_set(&v, &sp).unwrap().large_enough);
                seen += 1;
            }
        }
    }

    /// Smallest distance from `x` to vectors supported on a `budget`-subset,
    /// by trying every subset.
    fn brute_force_dist(x: &[f64], budget: usize) -> f64 {
        let m = x.len();
        let total: f64 = x.iter().map(|t| t * t).sum();
        let mut best = f64::INFINITY;
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != budget.min(m) {
                continue;
            }
            let kept: f64 = (0..m).filter(|k| mask >> k & 1 == 1).map(|k| x[k] * x[k]).sum();
            best = best.min((total - kept).max(0.0).sqrt());
        }
        best
    }

    proptest! {
        #[test]
        fn distance_matches_brute_force(
            raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=6),
            delta in 0.05f64..0.95,
        ) {
            prop_assume!(raw.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3));
            let v = normalize(raw.into_iter().map(|(a, b)| c(a, b)).collect());
            let fast = dist_to_sparse(&v, delta).unwrap();
            let slow = brute_force_dist(hat(&v).as_slice(), sparse_budget(delta, v.len()));
            prop_assert!((fast - slow).abs() < 1e-12);
        }

        #[test]
        fn spread_is_monotone(
            raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4..=12),
            nu2 in 0.05f64..0.5,
            nu3 in 1.0f64..3.0,
            widen in 0.0f64..0.5,
        ) {
            prop_assume!(raw.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3));
            let v = normalize(raw.into_iter().map(|(a, b)| c(a, b)).collect());
            let narrow = spread_set(&v, &SpreadParams::new(0.1, nu2, nu3).unwrap()).unwrap();
            let wide = spread_set(&v, &SpreadParams::new(0.1, nu2 * (1.0 - widen), nu3 + widen).unwrap()).unwrap();
            prop_assert!(narrow.indices.iter().all(|k| wide.indices.contains(k)));
        }
    }
}
