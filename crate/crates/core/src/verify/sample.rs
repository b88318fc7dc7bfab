use serde::{Deserialize, Serialize};

use crate::potential::CatalogPotential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// Samples on a radial grid, exact derivative.
    Radial,
    /// Samples on an `n x n` box, gradient by finite differences.
    Field,
}

/// Potential samples with envelope flags. The flags are always recomputed
/// from `values` and `gradient_norm`; nothing is taken on trust.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSample {
    pub mode: SampleMode,
    /// `|x|` of each sample.
    pub radii: Vec<f64>,
    /// Field mode only, row-major with `x` fastest.
    pub points: Vec<[f64; 2]>,
    pub values: Vec<f64>,
    pub radial_derivative: Vec<f64>,
    pub gradient_norm: Vec<f64>,
    pub c: f64,
    pub delta0: f64,
    /// `V <= c (1+r)^{-delta0}`
    pub value_ok: Vec<bool>,
    /// `|grad V| <= c (1+r)^{-1-delta0}`
    pub gradient_ok: Vec<bool>,
    /// Field mode: `(n, half_width)`.
    pub shape: Option<(usize, f64)>,
}

impl PotentialSample {
    pub fn radial(pot: &CatalogPotential, radii: &[f64], c: f64, delta0: f64) -> Self {
        let values: Vec<f64> = radii.iter().map(|&r| pot.value(r)).collect();
        let radial_derivative: Vec<f64> = radii.iter().map(|&r| pot.radial_derivative(r)).collect();
        // radial potentials: |grad V| = |d_r V|
        let gradient_norm = radial_derivative.iter().map(|d| d.abs()).collect();
        let mut s = Self {
            mode: SampleMode::Radial,
            radii: radii.to_vec(),
            points: Vec::new(),
            values,
            radial_derivative,
            gradient_norm,
            c,
            delta0,
            value_ok: Vec::new(),
            gradient_ok: Vec::new(),
            shape: None,
        };
        s.recompute_flags();
        s
    }

    /// Samples `pot` on the `n x n` nodes of `[-L, L]^2`.
    pub fn field(pot: &CatalogPotential, n: usize, half_width: f64, c: f64, delta0: f64) -> Self {
        let a = 2.0 * half_width / (n - 1) as f64;
        let mid = 0.5 * (n - 1) as f64;
        let mut values = Vec::with_capacity(n * n);
        for j in 0..n {
            let y = a * (j as f64 - mid);
            for i in 0..n {
                let x = a * (i as f64 - mid);
                values.push(pot.value_at(x, y));
            }
        }
        Self::field_from_values(values, n, half_width, c, delta0)
    }

    /// Field-mode sample from raw node values. `d_r V = V_x cos t + V_y sin t`
    /// from second-order differences (one-sided at the edges), zero at the origin.
    pub fn field_from_values(values: Vec<f64>, n: usize, half_width: f64, c: f64, delta0: f64) -> Self {
        assert!(n >= 3 && values.len() == n * n, "field needs n >= 3 and n*n values");
        let a = 2.0 * half_width / (n - 1) as f64;
        let at = |i: usize, j: usize| values[j * n + i];
        let diff = |f0: f64, f1: f64, f2: f64, k: usize| -> f64 {
            // derivative along one axis at position k of three consecutive samples
            match k {
                0 => (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * a),
                1 => (f2 - f0) / (2.0 * a),
                _ => (f0 - 4.0 * f1 + 3.0 * f2) / (2.0 * a),
            }
        };
        let stencil = |i: usize| -> (usize, usize) {
            if i == 0 {
                (0, 0)
            } else if i == n - 1 {
                (n - 3, 2)
            } else {
                (i - 1, 1)
            }
        };
        let mid = 0.5 * (n - 1) as f64;
        let mut points = Vec::with_capacity(n * n);
        let mut radii = Vec::with_capacity(n * n);
        let mut radial_derivative = Vec::with_capacity(n * n);
        let mut gradient_norm = Vec::with_capacity(n * n);
        for j in 0..n {
            let y = a * (j as f64 - mid);
            for i in 0..n {
                let x = a * (i as f64 - mid);
                let (si, ki) = stencil(i);
                let (sj, kj) = stencil(j);
                let vx = diff(at(si, j), at(si + 1, j), at(si + 2, j), ki);
                let vy = diff(at(i, sj), at(i, sj + 1), at(i, sj + 2), kj);
                let r = x.hypot(y);
                let vr = if r > 0.0 { (vx * x + vy * y) / r } else { 0.0 };
                points.push([x, y]);
                radii.push(r);
                radial_derivative.push(vr);
                gradient_norm.push(vx.hypot(vy));
            }
        }
        let mut s = Self {
            mode: SampleMode::Field,
            radii,
            points,
            values,
            radial_derivative,
            gradient_norm,
            c,
            delta0,
            value_ok: Vec::new(),
            gradient_ok: Vec::new(),
            shape: Some((n, half_width)),
        };
        s.recompute_flags();
        s
    }

    /// `V (1+r)^{delta0}` and `|grad V| (1+r)^{1+delta0}` at node `k`.
    pub fn envelope_ratios(&self, k: usize) -> (f64, f64) {
        let x = 1.0 + self.radii[k];
        let p = x.powf(self.delta0);
        (self.values[k] * p, self.gradient_norm[k] * p * x)
    }

    pub fn recompute_flags(&mut self) {
        let (vo, go): (Vec<bool>, Vec<bool>) = (0..self.values.len())
            .map(|k| {
                let (rv, rg) = self.envelope_ratios(k);
                (rv <= self.c, rg <= self.c)
            })
            .unzip();
        self.value_ok = vo;
        self.gradient_ok = go;
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self.recompute_flags();
        self
    }

    /// Smallest `c` for which both envelope bounds hold at every sample.
    pub fn smallest_envelope_constant(&self) -> f64 {
        (0..self.values.len()).fold(0.0_f64, |m, k| {
            let (a, b) = self.envelope_ratios(k);
            m.max(a).max(b)
        })
    }

    pub fn envelope_ok(&self) -> bool {
        self.value_ok.iter().all(|&b| b) && self.gradient_ok.iter().all(|&b| b)
    }

    /// Node with the largest envelope ratio, with that ratio.
    pub fn worst_node(&self) -> Option<(usize, f64)> {
        (0..self.values.len())
            .map(|k| {
                let (a, b) = self.envelope_ratios(k);
                (k, a.max(b))
            })
            .max_by(|x, y| x.1.total_cmp(&y.1))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
