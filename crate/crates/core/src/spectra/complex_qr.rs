//! Single-shift complex QR iteration on an upper Hessenberg matrix.

use crate::error::{Error, Result};
use crate::{Complex64, ComplexMatrix};

fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Unitary `G = [[c, s], [−s̄, c]]` with `G(x, y)ᵀ = (r, 0)ᵀ`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn rotate_rows(h: &mut ComplexMatrix, k: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
    for j in cols {
        let a = h[(k, j)];
        let b = h[(k + 1, j)];
        h[(k, j)] = a * c + s * b;
        h[(k + 1, j)] = -s.conj() * a + b * c;
    }
}

fn rotate_cols(h: &mut ComplexMatrix, k: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
    for i in rows {
        let a = h[(i, k)];
        let b = h[(i, k + 1)];
        h[(i, k)] = a * c + b * s.conj();
        h[(i, k + 1)] = -a * s + b * c;
    }
}

/// Eigenvalue of the trailing 2×2 block closer to its last diagonal entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Reduces Hessenberg `h` to upper triangular `T` in place, accumulating the
/// rotations into `z` (so `A = Z T Zᴴ` if `z` held the Hessenberg basis).
///
/// The iteration cap is `30·n` QR sweeps in total, with an exceptional shift
/// after every 10 sweeps without deflation.
pub(crate) fn schur(h: &mut ComplexMatrix, z: &mut ComplexMatrix) -> Result<()> {
    let n = h.nrows();
    if n < 2 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let hnorm = h.iter().map(|x| cabs1(*x)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let cap = 30 * n;
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = cabs1(h[(l - 1, l - 1)]) + cabs1(h[(l, l)]);
            if s == 0.0 {
                s = hnorm;
            }
            if cabs1(h[(l, l - 1)]) <= eps * s {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        if total == cap {
            return Err(Error::NonConvergence {
                algorithm: "complex QR",
                iterations: total,
            });
        }
        total += 1;
        its += 1;

        let mu = if its.is_multiple_of(10) {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].re.abs(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        let mut x = h[(l, l)] - mu;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            let (c, s) = givens(x, y);
            let first = if k == l { l } else { k - 1 };
            rotate_rows(h, k, c, s, first..n);
            if k > l {
                h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
            rotate_cols(h, k, c, s, 0..(k + 3).min(hi + 1));
            rotate_cols(z, k, c, s, 0..n);
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn givens_zeroes_second_component() {
        let cases = [
            (Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5)),
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)),
            (Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)),
        ];
        for (x, y) in cases {
            let (c, s) = givens(x, y);
            let second = -s.conj() * x + y * c;
            assert!(second.norm() < 1e-15);
            assert!((c * c + s.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }
}
