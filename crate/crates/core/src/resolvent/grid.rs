use serde::{Deserialize, Serialize};

use super::ResolventError;

/// `n x n` nodes on `[-L, L]^2`, symmetric about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneGrid {
    pub half_width: f64,
    pub n: usize,
}

impl PlaneGrid {
    pub fn new(half_width: f64, n: usize) -> Result<Self, ResolventError> {
        if !(half_width > 0.0 && half_width.is_finite()) || n < 2 {
            return Err(ResolventError::Grid(format!(
                "plane grid needs L > 0 and n >= 2 (got L = {half_width}, n = {n})"
            )));
        }
        Ok(Self { half_width, n })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.spacing() * (i as f64 - 0.5 * (self.n - 1) as f64)
    }

    /// Row-major, `x` fastest.
    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        let n = self.n;
        (0..n * n).map(move |k| [self.coord(k % n), self.coord(k / n)])
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Dirichlet box `[-L, L]^2` with `n` nodes per axis (odd, so the origin
/// is a node). Unknowns are the `(n-2)^2` interior nodes, ordered with `x`
/// fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxDiscretization {
    pub half_width: f64,
    pub n: usize,
}

impl BoxDiscretization {
    pub fn new(half_width: f64, n: usize) -> Result<Self, ResolventError> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(ResolventError::Grid(format!("half width must be positive (got {half_width})")));
        }
        if n < 5 || n % 2 == 0 {
            return Err(ResolventError::Grid(format!("n must be odd and >= 5 (got {n})")));
        }
        Ok(Self { half_width, n })
    }

    /// A `k x k` cell grid, i.e. `k + 1` nodes per axis.
    pub fn with_cells(half_width: f64, cells: usize) -> Result<Self, ResolventError> {
        Self::new(half_width, cells + 1)
    }

    /// Smallest odd node count with spacing `<= a_max`.
    pub fn with_max_spacing(half_width: f64, a_max: f64) -> Result<Self, ResolventError> {
        let mut cells = (2.0 * half_width / a_max).ceil() as usize;
        cells += cells % 2;
        Self::with_cells(half_width, cells.max(4))
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n - 1) as f64
    }

    pub fn plane(&self) -> PlaneGrid {
        PlaneGrid {
            half_width: self.half_width,
            n: self.n,
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.plane().coord(i)
    }

    /// Interior nodes per axis.
    pub fn m(&self) -> usize {
        self.n - 2
    }

    pub fn dim(&self) -> usize {
        self.m() * self.m()
    }

    /// Unknown index of node `(i, j)`, `1 <= i, j <= n - 2`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        (j - 1) * self.m() + (i - 1)
    }

    /// Node of unknown `k`.
    pub fn node(&self, k: usize) -> (usize, usize) {
        (k % self.m() + 1, k / self.m() + 1)
    }

    pub fn interior_point(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.node(k);
        [self.coord(i), self.coord(j)]
    }

    pub fn interior_points(&self) -> Vec<[f64; 2]> {
        (0..self.dim()).map(|k| self.interior_point(k)).collect()
    }

    /// Index among all `n x n` nodes of node `(i, j)`.
    pub fn full_index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }
}
