use num_complex::Complex64;

use super::grid::BoxDiscretization;
use super::ResolventError;
use crate::verify::{PotentialSample, SampleMode};

/// `-h^2 Delta + V - E` with the five-point Laplacian and Dirichlet data.
/// Only the potential diagonal is stored; the shift `-i eps` is applied by
/// the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    pub disc: BoxDiscretization,
    pub h: f64,
    pub energy: f64,
    /// `V` at the interior nodes.
    pub potential: Vec<f64>,
}

/// Relative slack on the `a <= h/4` check.
const RESOLUTION_SLACK: f64 = 1e-12;

fn check_resolution(disc: &BoxDiscretization, h_ref: f64) -> Result<(), ResolventError> {
    let a = disc.spacing();
    if a > 0.25 * h_ref * (1.0 + RESOLUTION_SLACK) {
        return Err(ResolventError::ResolutionTooCoarse { a, h: h_ref });
    }
    Ok(())
}

/// Assembles with the resolution check `a <= h/4` at this `h`.
pub fn assemble(v: &PotentialSample, energy: f64, h: f64, disc: &BoxDiscretization) -> Result<DiscreteOperator, ResolventError> {
    assemble_resolved_at(v, energy, h, disc, h)
}

/// Same, but the resolution is checked against `h_ref` (a sweep checks
/// against its largest `h`).
pub fn assemble_resolved_at(
    v: &PotentialSample,
    energy: f64,
    h: f64,
    disc: &BoxDiscretization,
    h_ref: f64,
) -> Result<DiscreteOperator, ResolventError> {
    if v.mode != SampleMode::Field || v.shape != Some((disc.n, disc.half_width)) {
        return Err(ResolventError::SizeMismatch(format!(
            "potential sample shape {:?} does not match the box (n = {}, L = {})",
            v.shape, disc.n, disc.half_width
        )));
    }
    let potential = (0..disc.dim())
        .map(|k| {
            let (i, j) = disc.node(k);
            v.values[disc.full_index(i, j)]
        })
        .collect();
    build(disc, energy, h, h_ref, potential)
}

/// Assembly from a closure `V(x, y)`, for boxes too large to sample a full
/// [`PotentialSample`].
pub fn assemble_fn<F: Fn(f64, f64) -> f64>(
    f: F,
    energy: f64,
    h: f64,
    disc: &BoxDiscretization,
    h_ref: f64,
) -> Result<DiscreteOperator, ResolventError> {
    let potential = (0..disc.dim())
        .map(|k| {
            let [x, y] = disc.interior_point(k);
            f(x, y)
        })
        .collect();
    build(disc, energy, h, h_ref, potential)
}

fn build(
    disc: &BoxDiscretization,
    energy: f64,
    h: f64,
    h_ref: f64,
    potential: Vec<f64>,
) -> Result<DiscreteOperator, ResolventError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(ResolventError::Grid(format!("h must be positive (got {h})")));
    }
    check_resolution(disc, h_ref)?;
    Ok(DiscreteOperator {
        disc: *disc,
        h,
        energy,
        potential,
    })
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.disc.dim()
    }

    /// `-h^2/a^2`, the coupling to each of the four neighbours.
    pub fn off_diagonal(&self) -> f64 {
        let a = self.disc.spacing();
        -(self.h * self.h) / (a * a)
    }

    pub fn diagonal(&self, k: usize) -> f64 {
        -4.0 * self.off_diagonal() + self.potential[k] - self.energy
    }

    /// Half bandwidth in the lexicographic ordering.
    pub fn bandwidth(&self) -> usize {
        self.disc.m()
    }

    /// Entry `(row, col)` of the real part; zero off the stencil.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        if row == col {
            return self.diagonal(row);
        }
        let m = self.disc.m();
        let (d, lo) = if row > col { (row - col, col) } else { (col - row, row) };
        if d == m || (d == 1 && (lo + 1) % m != 0) {
            self.off_diagonal()
        } else {
            0.0
        }
    }

    /// Nonzero `(row, col, value)` entries.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let m = self.disc.m();
        let off = self.off_diagonal();
        let mut t = Vec::with_capacity(5 * self.dim());
        for k in 0..self.dim() {
            let (i, j) = (k % m, k / m);
            if j > 0 {
                t.push((k, k - m, off));
            }
            if i > 0 {
                t.push((k, k - 1, off));
            }
            t.push((k, k, self.diagonal(k)));
            if i + 1 < m {
                t.push((k, k + 1, off));
            }
            if j + 1 < m {
                t.push((k, k + m, off));
            }
        }
        t
    }

    fn apply_generic<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        assert_eq!(v.len(), self.dim());
        let m = self.disc.m();
        let off = self.off_diagonal();
        (0..self.dim())
            .map(|k| {
                let (i, j) = (k % m, k / m);
                let mut acc = v[k] * self.diagonal(k);
                if i > 0 {
                    acc = acc + v[k - 1] * off;
                }
                if i + 1 < m {
                    acc = acc + v[k + 1] * off;
                }
                if j > 0 {
                    acc = acc + v[k - m] * off;
                }
                if j + 1 < m {
                    acc = acc + v[k + m] * off;
                }
                acc
            })
            .collect()
    }

    pub fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        self.apply_generic(v)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.apply_generic(v)
    }

    /// `(P - i eps) v`.
    pub fn apply_shifted(&self, v: &[Complex64], eps: f64) -> Vec<Complex64> {
        let shift = Complex64::new(0.0, -eps);
        self.apply(v).into_iter().zip(v).map(|(pv, x)| pv + shift * x).collect()
    }

    /// `P v` at interior node `(i, j)` for a function given on a rectangle of
    /// nodes; `get(i, j)` returns zero outside its support.
    pub fn apply_at<G: Fn(usize, usize) -> f64>(&self, i: usize, j: usize, get: &G) -> f64 {
        let k = self.disc.index(i, j);
        let n = self.disc.n;
        let nb = |ii: usize, jj: usize| if ii == 0 || jj == 0 || ii == n - 1 || jj == n - 1 { 0.0 } else { get(ii, jj) };
        self.diagonal(k) * get(i, j) + self.off_diagonal() * (nb(i - 1, j) + nb(i + 1, j) + nb(i, j - 1) + nb(i, j + 1))
    }
}
