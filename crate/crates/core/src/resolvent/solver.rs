use num_complex::Complex64;

use super::banded::BandedLu;
use super::operator::DiscreteOperator;
use super::ResolventError;

/// Relative residual every solve must reach.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

/// Factorization of `P - i eps`, reused for every right-hand side. Solves
/// with `P + i eps` go through conjugation, since `P` is real.
#[derive(Debug, Clone)]
pub struct ShiftedSolver<'a> {
    op: &'a DiscreteOperator,
    eps: f64,
    lu: BandedLu,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solve {
    pub z: Vec<Complex64>,
    /// `||(P - i eps) z - b|| / ||b||`
    pub residual: f64,
    pub refined: bool,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl<'a> ShiftedSolver<'a> {
    pub fn new(op: &'a DiscreteOperator, eps: f64) -> Result<Self, ResolventError> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(ResolventError::EpsNonpositive(eps));
        }
        let bw = op.bandwidth();
        let shift = Complex64::new(0.0, -eps);
        let lu = BandedLu::factor(op.dim(), bw, bw, |i, j| {
            let v = Complex64::new(op.entry(i, j), 0.0);
            if i == j {
                v + shift
            } else {
                v
            }
        })?;
        Ok(Self { op, eps, lu })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn operator(&self) -> &DiscreteOperator {
        self.op
    }

    fn residual_of(&self, z: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        self.op
            .apply_shifted(z, self.eps)
            .into_iter()
            .zip(b)
            .map(|(az, bi)| bi - az)
            .collect()
    }

    /// `z = (P - i eps)^{-1} b` with one step of iterative refinement if the
    /// first residual misses [`SOLVE_TOLERANCE`].
    pub fn solve(&self, b: &[Complex64]) -> Result<Solve, ResolventError> {
        if b.len() != self.op.dim() {
            return Err(ResolventError::SizeMismatch(format!(
                "rhs has length {}, operator dimension {}",
                b.len(),
                self.op.dim()
            )));
        }
        let nb = norm(b);
        if nb == 0.0 {
            return Ok(Solve {
                z: vec![Complex64::new(0.0, 0.0); b.len()],
                residual: 0.0,
                refined: false,
            });
        }
        let mut z = b.to_vec();
        self.lu.solve_in_place(&mut z);
        let r = self.residual_of(&z, b);
        let mut residual = norm(&r) / nb;
        let mut refined = false;
        if !(residual <= SOLVE_TOLERANCE) {
            let mut dz = r;
            self.lu.solve_in_place(&mut dz);
            for (zi, d) in z.iter_mut().zip(&dz) {
                *zi += d;
            }
            residual = norm(&self.residual_of(&z, b)) / nb;
            refined = true;
            if !(residual <= SOLVE_TOLERANCE) {
                return Err(ResolventError::ResidualAboveTolerance {
                    residual,
                    tolerance: SOLVE_TOLERANCE,
                });
            }
        }
        Ok(Solve { z, residual, refined })
    }

    /// `(P + i eps)^{-1} b = conj((P - i eps)^{-1} conj(b))`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Result<Solve, ResolventError> {
        let cb: Vec<Complex64> = b.iter().map(|x| x.conj()).collect();
        let mut s = self.solve(&cb)?;
        for x in &mut s.z {
            *x = x.conj();
        }
        Ok(s)
    }
}

/// One-shot `(P - i eps)^{-1} rhs`.
pub fn solve_shifted(op: &DiscreteOperator, eps: f64, rhs: &[Complex64]) -> Result<Solve, ResolventError> {
    ShiftedSolver::new(op, eps)?.solve(rhs)
}
