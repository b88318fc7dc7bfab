#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use resolvent_workbench::resolvent::{DiscreteOperator, WeightDiag};

/// `P - i eps` rebuilt from the five-point stencil, independent of the
/// library's own entry function.
pub fn dense_shifted(op: &DiscreteOperator, eps: f64) -> DMatrix<Complex64> {
    let m = op.disc.n - 2;
    let a = op.disc.spacing();
    let t = op.h * op.h / (a * a);
    let n = m * m;
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..m {
        for i in 0..m {
            let k = j * m + i;
            mat[(k, k)] = Complex64::new(4.0 * t + op.potential[k] - op.energy, -eps);
            if i > 0 {
                mat[(k, k - 1)] = Complex64::new(-t, 0.0);
            }
            if i + 1 < m {
                mat[(k, k + 1)] = Complex64::new(-t, 0.0);
            }
            if j > 0 {
                mat[(k, k - m)] = Complex64::new(-t, 0.0);
            }
            if j + 1 < m {
                mat[(k, k + m)] = Complex64::new(-t, 0.0);
            }
        }
    }
    mat
}

/// Largest singular value of `W_L (P - i eps)^{-1} W_R` from a dense SVD.
pub fn dense_weighted_norm(op: &DiscreteOperator, eps: f64, wl: &WeightDiag, wr: &WeightDiag) -> f64 {
    let inv = dense_shifted(op, eps).try_inverse().expect("invertible");
    let n = inv.nrows();
    let a = DMatrix::from_fn(n, n, |i, j| inv[(i, j)] * wl.values[i] * wr.values[j]);
    a.singular_values().max()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
