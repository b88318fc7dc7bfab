use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::grid::BoxDiscretization;
use super::operator::DiscreteOperator;
use super::solver::ShiftedSolver;
use super::ResolventError;

/// Diagonal weight `(1+|x|)^{-s}` on the interior nodes, optionally times
/// the indicator of `|x| >= R`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDiag {
    pub values: Vec<f64>,
    pub s: f64,
    pub r_cut: Option<f64>,
}

impl WeightDiag {
    pub fn interior(disc: &BoxDiscretization, s: f64) -> Self {
        let values = (0..disc.dim())
            .map(|k| {
                let [x, y] = disc.interior_point(k);
                (1.0 + x.hypot(y)).powf(-s)
            })
            .collect();
        Self { values, s, r_cut: None }
    }

    pub fn exterior(disc: &BoxDiscretization, s: f64, r_cut: f64) -> Self {
        let values = (0..disc.dim())
            .map(|k| {
                let [x, y] = disc.interior_point(k);
                let r = x.hypot(y);
                if r >= r_cut {
                    (1.0 + r).powf(-s)
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            values,
            s,
            r_cut: Some(r_cut),
        }
    }

    pub fn ones(disc: &BoxDiscretization) -> Self {
        Self {
            values: vec![1.0; disc.dim()],
            s: 0.0,
            r_cut: None,
        }
    }

    fn scale(&self, v: &mut [Complex64]) {
        for (x, w) in v.iter_mut().zip(&self.values) {
            *x *= *w;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    /// Relative change of the Rayleigh quotient that stops the iteration.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Iterate on `A A*` instead of `A* A`.
    pub adjoint_first: bool,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 5000,
            seed: 0,
            adjoint_first: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub norm: f64,
    pub iterations: usize,
    /// Worst relative residual over all shifted solves.
    pub solve_residual: f64,
    /// `||B x - lambda x|| / lambda` at the last iterate, `B = A* A`.
    pub eigen_residual: f64,
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Largest singular value of `W_L (P - i eps)^{-1} W_R` by power iteration.
pub fn weighted_resolvent_norm(
    op: &DiscreteOperator,
    eps: f64,
    w_left: &WeightDiag,
    w_right: &WeightDiag,
    opts: &NormOptions,
) -> Result<NormEstimate, ResolventError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(ResolventError::EpsNonpositive(eps));
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(ResolventError::Grid(format!(
            "power iteration needs tol > 0 and max_iter > 0 (got {}, {})",
            opts.tol, opts.max_iter
        )));
    }
    let n = op.dim();
    if w_left.values.len() != n || w_right.values.len() != n {
        return Err(ResolventError::SizeMismatch("weight length differs from operator dimension".into()));
    }
    let solver = ShiftedSolver::new(op, eps)?;
    let solve_residual = std::cell::Cell::new(0.0_f64);

    // A x = W_L S W_R x,  A* y = W_R S* W_L y
    let apply_a = |x: &[Complex64], adjoint: bool| -> Result<Vec<Complex64>, ResolventError> {
        let (first, second) = if adjoint { (w_left, w_right) } else { (w_right, w_left) };
        let mut v = x.to_vec();
        first.scale(&mut v);
        let s = if adjoint { solver.solve_adjoint(&v)? } else { solver.solve(&v)? };
        solve_residual.set(solve_residual.get().max(s.residual));
        let mut out = s.z;
        second.scale(&mut out);
        Ok(out)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let nx = norm2(&x).sqrt();
    x.iter_mut().for_each(|v| *v /= nx);

    let mut lambda_prev = f64::NAN;
    for it in 1..=opts.max_iter {
        let y = apply_a(&x, opts.adjoint_first)?;
        let lambda = norm2(&y);
        if lambda == 0.0 {
            return Ok(NormEstimate {
                norm: 0.0,
                iterations: it,
                solve_residual: solve_residual.get(),
                eigen_residual: 0.0,
            });
        }
        let z = apply_a(&y, !opts.adjoint_first)?;
        let eigen_residual = z
            .iter()
            .zip(&x)
            .map(|(zi, xi)| (zi - xi * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / lambda;
        let converged = (lambda - lambda_prev).abs() <= opts.tol * lambda;
        if converged {
            return Ok(NormEstimate {
                norm: lambda.sqrt(),
                iterations: it,
                solve_residual: solve_residual.get(),
                eigen_residual,
            });
        }
        lambda_prev = lambda;
        let nz = norm2(&z).sqrt();
        x = z.into_iter().map(|v| v / nz).collect();
    }
    Err(ResolventError::MaxIterExceeded {
        iterations: opts.max_iter,
        estimate: lambda_prev.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::CatalogPotential;
    use crate::resolvent::assemble;
    use crate::verify::PotentialSample;

    fn op(n: usize, h: f64) -> DiscreteOperator {
        let disc = BoxDiscretization::new(2.0, n).unwrap();
        let v = PotentialSample::field(&CatalogPotential::Zero, n, 2.0, 1.0, 0.4);
        assemble(&v, 1.0, h, &disc).unwrap()
    }

    #[test]
    fn unweighted_norm_respects_spectral_bound() {
        let p = op(21, 0.9);
        let w = WeightDiag::ones(&p.disc);
        let eps = 0.05;
        let est = weighted_resolvent_norm(&p, eps, &w, &w, &NormOptions::default()).unwrap();
        assert!(est.norm <= (1.0 + 1e-10) / eps, "{}", est.norm);
        assert!(est.norm > 0.0);
    }

    #[test]
    fn exterior_weight_beyond_box_gives_zero() {
        let p = op(21, 0.9);
        let w = WeightDiag::exterior(&p.disc, 0.6, 10.0);
        let est = weighted_resolvent_norm(&p, 0.1, &w, &w, &NormOptions::default()).unwrap();
        assert_eq!(est.norm, 0.0);
    }

    #[test]
    fn weights_lie_in_unit_interval() {
        let disc = BoxDiscretization::new(3.0, 31).unwrap();
        let w = WeightDiag::exterior(&disc, 0.6, 1.0);
        assert!(w.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        for k in 0..disc.dim() {
            let [x, y] = disc.interior_point(k);
            assert_eq!(w.values[k] == 0.0, x.hypot(y) < 1.0);
        }
    }

    #[test]
    fn rejects_bad_eps() {
        let p = op(21, 0.9);
        let w = WeightDiag::ones(&p.disc);
        assert!(matches!(
            weighted_resolvent_norm(&p, -1.0, &w, &w, &NormOptions::default()),
            Err(ResolventError::EpsNonpositive(_))
        ));
    }
}
