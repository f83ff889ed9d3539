//! Householder reduction to upper Hessenberg form.

use nalgebra::{ComplexField, DMatrix};

fn phase<T: ComplexField<RealField = f64>>(x: &T) -> T {
    let m = x.clone().modulus();
    if m == 0.0 {
        T::one()
    } else {
        x.clone().unscale(m)
    }
}

/// Overwrites `a` with `H = QᴴAQ`. When `q` is given it is overwritten by
/// `Q` itself (it is reset to the identity first).
pub(crate) fn reduce<T: ComplexField<RealField = f64>>(
    a: &mut DMatrix<T>,
    mut q: Option<&mut DMatrix<T>>,
) {
    let n = a.nrows();
    if let Some(q) = q.as_deref_mut() {
        q.fill_with_identity();
    }
    if n < 3 {
        return;
    }
    let mut v = vec![T::zero(); n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let xnorm = (k + 1..n)
            .map(|i| a[(i, k)].clone().modulus_squared())
            .sum::<f64>()
            .sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)].clone();
        let alpha = -phase(&x0).scale(xnorm);
        for (idx, i) in (k + 1..n).enumerate() {
            v[idx] = a[(i, k)].clone();
        }
        v[0] -= alpha.clone();
        let vv: f64 = v[..len].iter().map(|t| t.clone().modulus_squared()).sum();
        if vv == 0.0 {
            continue;
        }
        let beta = 2.0 / vv;

        // A ← (I − βvvᴴ)A on rows k+1.., columns k..
        for j in k..n {
            let mut s = T::zero();
            for idx in 0..len {
                s += v[idx].clone().conjugate() * a[(k + 1 + idx, j)].clone();
            }
            let s = s.scale(beta);
            for idx in 0..len {
                a[(k + 1 + idx, j)] -= v[idx].clone() * s.clone();
            }
        }
        // A ← A(I − βvvᴴ) on columns k+1..
        for i in 0..n {
            let mut s = T::zero();
            for idx in 0..len {
                s += a[(i, k + 1 + idx)].clone() * v[idx].clone();
            }
            let s = s.scale(beta);
            for idx in 0..len {
                a[(i, k + 1 + idx)] -= s.clone() * v[idx].clone().conjugate();
            }
        }
        if let Some(q) = q.as_deref_mut() {
            for i in 0..n {
                let mut s = T::zero();
                for idx in 0..len {
                    s += q[(i, k + 1 + idx)].clone() * v[idx].clone();
                }
                let s = s.scale(beta);
                for idx in 0..len {
                    q[(i, k + 1 + idx)] -= s.clone() * v[idx].clone().conjugate();
                }
            }
        }
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = T::zero();
        }
    }
}
