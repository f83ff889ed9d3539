//! Dense spectral computations: eigenvalues, real-eigenvalue counts,
//! singular values, condition numbers and distances to column spans.
//!
//! Eigenvalues use a Householder Hessenberg reduction followed by shifted
//! QR (complex single shift, or real Francis double shift). Singular values
//! come from nalgebra's bidiagonal SVD.

mod complex_qr;
mod hessenberg;
mod real_qr;

use nalgebra::{DMatrix, SVD};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::{Complex64, ComplexMatrix, RealMatrix};

/// Backward-error constant: `‖AZ − ZT‖_F ≤ C·n·ε·‖A‖_F`.
pub const BACKWARD_ERROR_CONSTANT: f64 = 100.0;

const SVD_MAX_ITER: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub backward_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularValues {
    /// Nonincreasing.
    pub values: Vec<f64>,
}

impl SingularValues {
    pub fn largest(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealEigReport {
    pub count_real: usize,
    /// `min |Im λ|`; zero whenever `count_real > 0`.
    pub min_imag_distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    pub distance: f64,
    /// Set when the spanning columns were numerically dependent.
    pub rank_deficient: bool,
}

fn check_square<T>(a: &DMatrix<T>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}×{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(())
}

fn check_finite_complex(a: &ComplexMatrix) -> Result<()> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    Ok(())
}

fn sort_eigenvalues(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// All eigenvalues of a square complex matrix with the backward error of the
/// computed Schur form.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Spectrum> {
    check_square(a)?;
    check_finite_complex(a)?;
    let n = a.nrows();
    let mut h = a.clone();
    let mut z = ComplexMatrix::zeros(n, n);
    hessenberg::reduce(&mut h, Some(&mut z));
    complex_qr::schur(&mut h, &mut z)?;
    let backward_error = (a * &z - &z * &h).norm();
    let mut eigenvalues: Vec<Complex64> = (0..n).map(|i| h[(i, i)]).collect();
    sort_eigenvalues(&mut eigenvalues);
    Ok(Spectrum {
        eigenvalues,
        backward_error,
    })
}

/// Eigenvalues of a real matrix via the real double-shift path. Imaginary
/// parts of real eigenvalues are exactly zero.
pub fn eigenvalues_real(a: &RealMatrix) -> Result<Vec<Complex64>> {
    check_square(a)?;
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    let mut h = a.clone();
    hessenberg::reduce(&mut h, None);
    let (wr, wi) = real_qr::eigenvalues(&mut h)?;
    let mut out: Vec<Complex64> = wr.into_iter().zip(wi).map(|(r, i)| Complex64::new(r, i)).collect();
    sort_eigenvalues(&mut out);
    Ok(out)
}

/// Number of real eigenvalues of a real matrix (1×1 blocks of its real Schur
/// form after splitting 2×2 blocks with real eigenvalues).
pub fn real_eigenvalue_count(a: &RealMatrix) -> Result<RealEigReport> {
    let eig = eigenvalues_real(a)?;
    let count_real = eig.iter().filter(|z| z.im == 0.0).count();
    let min_imag_distance = eig.iter().map(|z| z.im.abs()).fold(f64::INFINITY, f64::min);
    Ok(RealEigReport {
        count_real,
        min_imag_distance: if eig.is_empty() { f64::INFINITY } else { min_imag_distance },
    })
}

/// `min_j |Im λ_j|`.
pub fn real_axis_distance(a: &ComplexMatrix) -> Result<f64> {
    let s = eigenvalues(a)?;
    Ok(s.eigenvalues.iter().map(|z| z.im.abs()).fold(f64::INFINITY, f64::min))
}

pub fn singular_values(a: &ComplexMatrix) -> Result<SingularValues> {
    check_finite_complex(a)?;
    if a.is_empty() {
        return Ok(SingularValues { values: Vec::new() });
    }
    let svd = SVD::try_new(a.clone(), false, false, f64::EPSILON, SVD_MAX_ITER).ok_or(
        Error::NonConvergence {
            algorithm: "SVD",
            iterations: SVD_MAX_ITER,
        },
    )?;
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(SingularValues { values })
}

pub fn singular_values_real(a: &RealMatrix) -> Result<SingularValues> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }
    if a.is_empty() {
        return Ok(SingularValues { values: Vec::new() });
    }
    let svd = SVD::try_new(a.clone(), false, false, f64::EPSILON, SVD_MAX_ITER).ok_or(
        Error::NonConvergence {
            algorithm: "SVD",
            iterations: SVD_MAX_ITER,
        },
    )?;
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(SingularValues { values })
}

pub fn least_singular_value(a: &ComplexMatrix) -> Result<f64> {
    check_square(a)?;
    Ok(singular_values(a)?.smallest())
}

pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(singular_values(a)?.largest())
}

/// `s₁/s_n`, infinite when `s_n ≤ s₁·n·ε`.
pub fn condition_number(a: &ComplexMatrix) -> Result<f64> {
    check_square(a)?;
    let s = singular_values(a)?;
    let (s1, sn) = (s.largest(), s.smallest());
    let n = a.nrows() as f64;
    if sn <= s1 * n * f64::EPSILON {
        return Ok(f64::INFINITY);
    }
    Ok(s1 / sn)
}

fn hdot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn vnorm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Removes from `x` its components along the orthonormal `basis`, twice.
fn project_out(basis: &[Vec<Complex64>], x: &mut [Complex64]) {
    for _ in 0..2 {
        for q in basis {
            let c = hdot(q, x);
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi -= c * qi;
            }
        }
    }
}

/// Orthonormal basis of the span of `vectors`, and whether any was dropped
/// as numerically dependent.
fn orthonormalize(vectors: Vec<Vec<Complex64>>) -> (Vec<Vec<Complex64>>, bool) {
    let scale = vectors.iter().map(|v| vnorm(v)).fold(0.0, f64::max);
    let tol = 1e-12 * scale * (vectors.len().max(1) as f64);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    let mut dropped = false;
    for mut v in vectors {
        project_out(&basis, &mut v);
        let r = vnorm(&v);
        if r <= tol || r == 0.0 {
            dropped = true;
            continue;
        }
        v.iter_mut().for_each(|z| *z /= r);
        basis.push(v);
    }
    (basis, dropped)
}

/// Euclidean distance from `x` to the column span of `h` (Hermitian inner
/// product).
pub fn dist_to_column_span(x: &[Complex64], h: &ComplexMatrix) -> Result<DistanceReport> {
    if h.nrows() != x.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against columns of length {}",
            x.len(),
            h.nrows()
        )));
    }
    let cols: Vec<Vec<Complex64>> = h.column_iter().map(|c| c.iter().copied().collect()).collect();
    let (basis, rank_deficient) = orthonormalize(cols);
    let mut r = x.to_vec();
    project_out(&basis, &mut r);
    Ok(DistanceReport {
        distance: vnorm(&r),
        rank_deficient,
    })
}

/// Unit `v` with `Z_jᵀv = 0` (bilinear pairing, no conjugation) for every
/// `Z_j`, where the `Z_j` are the rows of an `(n−1)×n` matrix or the columns
/// of an `n×(n−1)` matrix. The phase is fixed so that the largest-modulus
/// entry is real and positive.
pub fn unit_normal(h: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let (n, vectors): (usize, Vec<Vec<Complex64>>) = if h.nrows() + 1 == h.ncols() {
        (h.ncols(), h.row_iter().map(|r| r.iter().map(|z| z.conj()).collect()).collect())
    } else if h.ncols() + 1 == h.nrows() {
        (h.nrows(), h.column_iter().map(|c| c.iter().map(|z| z.conj()).collect()).collect())
    } else {
        return Err(Error::DimensionMismatch(format!(
            "normal needs an (n−1)×n or n×(n−1) matrix, got {}×{}",
            h.nrows(),
            h.ncols()
        )));
    };
    let (basis, dropped) = orthonormalize(vectors);
    if dropped {
        return Err(Error::RankDeficient { expected: n - 1 });
    }
    // e_i with the largest component outside the span.
    let best = (0..n)
        .map(|i| (i, 1.0 - basis.iter().map(|q| q[i].norm_sqr()).sum::<f64>()))
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    v[best] = Complex64::new(1.0, 0.0);
    project_out(&basis, &mut v);
    let r = vnorm(&v);
    if r == 0.0 {
        return Err(Error::RankDeficient { expected: n - 1 });
    }
    let lead = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()).then(b.0.cmp(&a.0)))
        .map(|(_, z)| *z)
        .unwrap();
    let phase = lead.conj() / (lead.norm() * r);
    v.iter_mut().for_each(|z| *z *= phase);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::ScalarDistribution;
    use crate::rng::RandomStream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn gaussian(n: usize, m: usize, seed: u64) -> ComplexMatrix {
        let g = ScalarDistribution::standard_gaussian();
        let mut rng = RandomStream::new(seed, "spectra-test", 0);
        ComplexMatrix::from_fn(n, m, |_, _| c(g.sample(&mut rng), g.sample(&mut rng)))
    }

    fn contract(a: &ComplexMatrix, s: &Spectrum) -> bool {
        let n = a.nrows() as f64;
        s.backward_error <= BACKWARD_ERROR_CONSTANT * n * f64::EPSILON * a.norm()
    }

    #[test]
    fn diagonal_eigenvalues_are_exact() {
        let a = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 2.0)]));
        let s = eigenvalues(&a).unwrap();
        assert_eq!(s.eigenvalues, vec![c(0.0, 2.0), c(1.0, 0.0)]);
    }

    #[test]
    fn companion_of_z2_plus_1() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let s = eigenvalues(&a).unwrap();
        assert!((s.eigenvalues[0] - c(0.0, -1.0)).norm() < 1e-12);
        assert!((s.eigenvalues[1] - c(0.0, 1.0)).norm() < 1e-12);
        assert!(contract(&a, &s));
    }

    #[test]
    fn trace_identity_on_random_matrix() {
        for seed in 0..5 {
            let a = gaussian(50, 50, seed);
            let s = eigenvalues(&a).unwrap();
            let sum: Complex64 = s.eigenvalues.iter().sum();
            assert!((sum - a.trace()).norm() <= 1e-9 * a.trace().norm().max(1.0));
            assert!(contract(&a, &s), "backward error {}", s.backward_error);
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(eigenvalues(&ComplexMatrix::zeros(0, 0)).unwrap().eigenvalues.is_empty());
        let z = eigenvalues(&ComplexMatrix::zeros(5, 5)).unwrap();
        assert!(z.eigenvalues.iter().all(|x| x.norm() == 0.0));
        // Jordan block: all eigenvalues 2 up to the n-th root of roundoff.
        let mut j = ComplexMatrix::identity(6, 6) * c(2.0, 0.0);
        for i in 0..5 {
            j[(i, i + 1)] = c(1.0, 0.0);
        }
        let s = eigenvalues(&j).unwrap();
        assert!(s.eigenvalues.iter().all(|x| (x - c(2.0, 0.0)).norm() < 1e-2));
        assert!(eigenvalues(&ComplexMatrix::zeros(2, 3)).is_err());
        let mut bad = ComplexMatrix::identity(2, 2);
        bad[(0, 1)] = c(f64::NAN, 0.0);
        assert!(eigenvalues(&bad).is_err());
    }

    #[test]
    fn permutation_matrix_converges() {
        // Cyclic shift: plain QR stalls without the exceptional shift.
        let n = 8;
        let p = ComplexMatrix::from_fn(n, n, |i, j| if (i + 1) % n == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let s = eigenvalues(&p).unwrap();
        for z in &s.eigenvalues {
            assert!((z.norm() - 1.0).abs() < 1e-10);
        }
        let rp = p.map(|z| z.re);
        let r = real_eigenvalue_count(&rp).unwrap();
        assert_eq!(r.count_real, 2);
    }

    #[test]
    fn real_counts() {
        let rot = RealMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert_eq!(real_eigenvalue_count(&rot).unwrap().count_real, 0);
        let d = RealMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]));
        assert_eq!(real_eigenvalue_count(&d).unwrap().count_real, 3);
        let sym = RealMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let eig = eigenvalues_real(&sym).unwrap();
        assert_eq!(real_eigenvalue_count(&sym).unwrap().count_real, 2);
        assert!((eig[0].re - 1.0).abs() < 1e-14 && (eig[1].re - 3.0).abs() < 1e-14);
    }

    #[test]
    fn real_parity_and_trace() {
        let g = ScalarDistribution::standard_gaussian();
        let mut rng = RandomStream::new(5, "real-parity", 0);
        for n in [1usize, 2, 3, 7, 20, 60] {
            let a = RealMatrix::from_fn(n, n, |_, _| g.sample(&mut rng));
            let eig = eigenvalues_real(&a).unwrap();
            let r = real_eigenvalue_count(&a).unwrap();
            assert_eq!((n - r.count_real) % 2, 0);
            let sum: f64 = eig.iter().map(|z| z.re).sum();
            assert!((sum - a.trace()).abs() < 1e-9 * (n as f64));
            let im: f64 = eig.iter().map(|z| z.im).sum();
            assert!(im.abs() < 1e-12 * (n as f64));
        }
    }

    #[test]
    fn real_axis_distance_examples() {
        let a = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 1.0), c(2.0, 0.0)]));
        assert_eq!(real_axis_distance(&a).unwrap(), 0.0);
        let b = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0, 1.0), c(0.0, 2.0)]));
        assert_eq!(real_axis_distance(&b).unwrap(), 1.0);
    }

    #[test]
    fn singular_value_examples() {
        let q = ComplexMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0)]);
        for s in singular_values(&q).unwrap().values {
            assert!((s - 1.0).abs() < 1e-12);
        }
        let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(0.0, 0.0)]));
        assert_eq!(singular_values(&d).unwrap().values, vec![3.0, 0.0]);
        assert_eq!(condition_number(&d).unwrap(), f64::INFINITY);
        assert!((condition_number(&ComplexMatrix::identity(4, 4)).unwrap() - 1.0).abs() < 1e-14);
        let d2 = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(2.0, 0.0), c(1.0, 0.0)]));
        assert!((condition_number(&d2).unwrap() - 2.0).abs() < 1e-14);
        let eq = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 1.0), c(-1.0, 1.0), c(1.0, 1.0), c(-1.0, 1.0)]);
        assert_eq!(condition_number(&eq).unwrap(), f64::INFINITY);
        let rect = gaussian(3, 5, 1);
        let s = singular_values(&rect).unwrap();
        assert_eq!(s.values.len(), 3);
        assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_matches_hermitian_eigenvalues() {
        let a = gaussian(12, 12, 9);
        let s = singular_values(&a).unwrap();
        let mut eig: Vec<f64> = eigenvalues(&(a.adjoint() * &a)).unwrap().eigenvalues.iter().map(|z| z.re).collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        for (sv, ev) in s.values.iter().zip(&eig) {
            assert!((sv * sv - ev).abs() <= 1e-9 * ev.abs().max(1.0));
        }
    }

    #[test]
    fn distance_examples() {
        let h = ComplexMatrix::from_row_slice(3, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let x = [c(0.0, 0.0), c(0.0, 0.0), c(3.0, 4.0)];
        let d = dist_to_column_span(&x, &h).unwrap();
        assert!((d.distance - 5.0).abs() < 1e-14 && !d.rank_deficient);
        let inside = [c(2.0, 1.0), c(-1.0, 0.5), c(0.0, 0.0)];
        assert!(dist_to_column_span(&inside, &h).unwrap().distance < 1e-10);
        let dup = ComplexMatrix::from_row_slice(3, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(dist_to_column_span(&x, &dup).unwrap().rank_deficient);
    }

    #[test]
    fn normal_examples() {
        let n = 5;
        let rows = ComplexMatrix::from_fn(n - 1, n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let v = unit_normal(&rows).unwrap();
        assert!((v[n - 1] - c(1.0, 0.0)).norm() < 1e-15);
        for seed in 0..20 {
            let m = gaussian(15, 16, seed);
            let v = unit_normal(&m).unwrap();
            let vv = nalgebra::DVector::from_vec(v.clone());
            assert!((&m * &vv).norm() <= 1e-10 * m.norm());
            assert!((vnorm(&v) - 1.0).abs() < 1e-12);
            let w = unit_normal(&m.transpose()).unwrap();
            assert_eq!(v, w);
        }
        let mut sing = gaussian(3, 4, 1);
        let r0 = sing.row(0).into_owned();
        sing.set_row(1, &r0);
        assert!(matches!(unit_normal(&sing), Err(Error::RankDeficient { .. })));
        assert!(unit_normal(&gaussian(3, 3, 1)).is_err());
    }

    #[test]
    fn negative_second_moment_identity() {
        let n = 30;
        let a = gaussian(n, n, 4);
        let s = singular_values(&a).unwrap();
        let rhs: f64 = s.values.iter().map(|x| x.powi(-2)).sum();
        let mut lhs = 0.0;
        for k in 0..n {
            let x: Vec<Complex64> = a.column(k).iter().copied().collect();
            let h = a.clone().remove_column(k);
            lhs += dist_to_column_span(&x, &h).unwrap().distance.powi(-2);
        }
        assert!((lhs - rhs).abs() <= 1e-8 * rhs);
    }
}
