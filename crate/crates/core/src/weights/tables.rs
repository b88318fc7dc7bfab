use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::barrier::{compute_g_and_h1, eval_m, Barrier, GTable};
use super::grid::RadialGrid;
use super::psi::PsiSpec;
use super::riccati::{solve_phi_riccati, RiccatiOptions};
use super::WeightsError;

/// Column order of the text format.
pub const TABLE_COLUMNS: [&str; 7] = ["r", "psi", "u", "phi", "w", "wprime", "m"];

/// Everything the verifier needs for one value of `h`.
#[derive(Debug, Clone)]
pub struct WeightTables {
    pub spec: PsiSpec,
    pub barrier: Barrier,
    pub h: f64,
    pub r: Vec<f64>,
    pub psi: Vec<f64>,
    /// `phi'`
    pub u: Vec<f64>,
    /// `phi''`, from the equation
    pub uprime: Vec<f64>,
    pub phi: Vec<f64>,
    pub w: Vec<f64>,
    pub wprime: Vec<f64>,
    pub m: Vec<f64>,
    pub g: GTable,
    pub riccati_residual: f64,
    pub substeps: usize,
}

/// `w`, `w'` samples and `c0`.
pub fn build_w(spec: &PsiSpec, grid: &RadialGrid) -> (Vec<f64>, Vec<f64>, f64) {
    let b = Barrier::new(spec);
    let w = grid.nodes().iter().map(|&r| b.w(r)).collect();
    let wp = grid.nodes().iter().map(|&r| b.wprime(r)).collect();
    (w, wp, b.c0)
}

impl WeightTables {
    pub fn build(spec: &PsiSpec, h: f64, grid: &RadialGrid) -> Result<Self, WeightsError> {
        Self::build_with(spec, h, grid, &RiccatiOptions::default())
    }

    pub fn build_with(
        spec: &PsiSpec,
        h: f64,
        grid: &RadialGrid,
        opts: &RiccatiOptions,
    ) -> Result<Self, WeightsError> {
        grid.check_for_spec(spec)?;
        let sol = solve_phi_riccati(spec, h, grid, opts)?;
        let barrier = Barrier::new(spec);
        let (w, wprime, _) = build_w(spec, grid);
        let g = compute_g_and_h1(spec, spec.energy, grid)?;
        let nodes = grid.nodes();
        Ok(Self {
            spec: *spec,
            barrier,
            h,
            r: nodes.to_vec(),
            psi: nodes.iter().map(|&r| spec.psi(r)).collect(),
            u: sol.u,
            uprime: sol.uprime,
            phi: sol.phi,
            w,
            wprime,
            m: nodes.iter().map(|&r| eval_m(spec.delta, r)).collect(),
            g,
            riccati_residual: sol.residual,
            substeps: sol.substeps,
        })
    }

    pub fn c0(&self) -> f64 {
        self.barrier.c0
    }

    pub fn h1(&self) -> f64 {
        self.g.h1
    }

    pub fn max_phi(&self) -> f64 {
        self.phi.iter().cloned().fold(0.0, f64::max)
    }

    /// `C0 = 2 max phi`.
    pub fn big_c0(&self) -> f64 {
        2.0 * self.max_phi()
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `phi` at an arbitrary radius by cubic Hermite interpolation (the
    /// table carries `phi' = u` at every node). Constant past the grid.
    pub fn phi_at(&self, r: f64) -> f64 {
        let n = self.r.len();
        if r >= self.r[n - 1] {
            return self.phi[n - 1];
        }
        if r <= self.r[0] {
            // u is smooth on [0, r_min]; match phi(0) = 0 and the first node
            let t = r / self.r[0];
            return self.phi[0] * t;
        }
        let i = match self.r.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => return self.phi[i],
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.r[i], self.r[i + 1]);
        let dx = x1 - x0;
        let t = (r - x0) / dx;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.phi[i] + h10 * dx * self.u[i] + h01 * self.phi[i + 1] + h11 * dx * self.u[i + 1]
    }

    /// Whitespace separated columns `r psi u phi w wprime m`, 17 significant digits.
    pub fn to_columnar(&self) -> String {
        let mut out = String::with_capacity(self.r.len() * 7 * 25);
        out.push_str(&TABLE_COLUMNS.join(" "));
        out.push('\n');
        for i in 0..self.r.len() {
            let row = [
                self.r[i],
                self.psi[i],
                self.u[i],
                self.phi[i],
                self.w[i],
                self.wprime[i],
                self.m[i],
            ];
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{v:.16e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn constants_report(&self) -> ConstantsReport {
        let (res0, res1) = self.spec.continuity_residuals();
        ConstantsReport {
            h: self.h,
            b: self.spec.b,
            r0: self.spec.r0,
            r1: self.spec.r1,
            delta: self.spec.delta,
            delta0: self.spec.delta0,
            energy: self.spec.energy,
            c0: self.c0(),
            h1: self.h1(),
            big_c0: self.big_c0(),
            g_sup: self.g.g_sup,
            g_tail_bound: self.g.tail_bound,
            continuity_residual_r0: res0,
            continuity_residual_r1: res1,
            riccati_residual: self.riccati_residual,
            w_jump: self.barrier.w_jump(),
            wprime_jump: self.barrier.wprime_jump(),
            grid_nodes: self.r.len(),
        }
    }
}

/// Parsed columnar table.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnarTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ColumnarTable {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty table")?;
        let columns: Vec<String> = header.split_whitespace().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
            let row = row.map_err(|e| format!("line {}: {e}", k + 2))?;
            if row.len() != columns.len() {
                return Err(format!("line {}: expected {} fields", k + 2, columns.len()));
            }
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Structured summary of one weight construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub h: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    pub delta: f64,
    pub delta0: f64,
    pub energy: f64,
    pub c0: f64,
    pub h1: f64,
    #[serde(rename = "C0")]
    pub big_c0: f64,
    pub g_sup: f64,
    pub g_tail_bound: f64,
    pub continuity_residual_r0: f64,
    pub continuity_residual_r1: f64,
    pub riccati_residual: f64,
    pub w_jump: f64,
    pub wprime_jump: f64,
    pub grid_nodes: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ProblemParams;

    fn tables(h_frac: f64) -> WeightTables {
        let spec = PsiSpec::from_outer_radius(&ProblemParams::new(1.0, 0.4, 0.6), 2.0).unwrap();
        let grid = RadialGrid::refined(&spec, 1200, 2.0 * spec.r1).unwrap();
        let h1 = compute_g_and_h1(&spec, 1.0, &grid).unwrap().h1;
        WeightTables::build(&spec, h_frac * h1, &grid).unwrap()
    }

    #[test]
    fn table_invariants() {
        let t = tables(0.5);
        assert!(t.u.iter().all(|&u| u >= 0.0));
        assert!(t.wprime.iter().all(|&x| x > 0.0));
        assert!((t.big_c0() - 2.0 * t.phi.last().unwrap()).abs() == 0.0);
        assert!(t.riccati_residual <= 1e-6);
        assert!(t.barrier.w_jump() <= 1e-12);
    }

    #[test]
    fn hermite_phi_reproduces_nodes_and_is_monotone() {
        let t = tables(1.0);
        for i in (0..t.len()).step_by(37) {
            assert_eq!(t.phi_at(t.r[i]), t.phi[i]);
        }
        let mut prev = 0.0;
        for k in 0..=4000 {
            let r = 4.5 * k as f64 / 4000.0;
            let p = t.phi_at(r);
            assert!(p >= prev - 1e-12, "r={r}");
            prev = p;
        }
        assert_eq!(t.phi_at(100.0), t.max_phi());
    }

    #[test]
    fn columnar_format_round_trips() {
        let t = tables(0.5);
        let text = t.to_columnar();
        let parsed = ColumnarTable::parse(&text).unwrap();
        assert_eq!(parsed.columns, TABLE_COLUMNS);
        assert_eq!(parsed.rows.len(), t.len());
        assert_eq!(parsed.column("u").unwrap(), t.u);
        assert_eq!(parsed.column("phi").unwrap(), t.phi);
        assert!(ColumnarTable::parse("r u\n1 2 3\n").is_err());
    }
}
