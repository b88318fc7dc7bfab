use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::grid::BoxDiscretization;
use super::norm::{weighted_resolvent_norm, NormOptions, WeightDiag};
use super::operator::assemble_resolved_at;
use super::ResolventError;
use crate::verify::PotentialSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Interior,
    Exterior,
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::Interior => "interior",
            SweepMode::Exterior => "exterior",
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "interior" => Ok(SweepMode::Interior),
            "exterior" => Ok(SweepMode::Exterior),
            _ => Err(format!("unknown mode `{s}` (expected interior or exterior)")),
        }
    }
}

/// How `eps` is chosen for each `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsRule {
    Constant { eps: f64 },
    /// `eps = coef * h^power`
    Power { coef: f64, power: f64 },
}

impl Default for EpsRule {
    fn default() -> Self {
        EpsRule::Constant { eps: 1e-6 }
    }
}

impl EpsRule {
    pub fn eps(&self, h: f64) -> f64 {
        match *self {
            EpsRule::Constant { eps } => eps,
            EpsRule::Power { coef, power } => coef * h.powf(power),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub energy: f64,
    pub s: f64,
    pub hs: Vec<f64>,
    pub eps_rule: EpsRule,
    pub mode: SweepMode,
    /// Cut radius of the exterior indicator; ignored in interior mode.
    pub r_cut: f64,
    pub norm: NormOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub h: f64,
    pub eps: f64,
    pub mode: SweepMode,
    pub s: f64,
    /// `R` of the exterior indicator, NaN in interior mode.
    pub r_cut: f64,
    pub norm: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub model: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn linear_fit(model: &str, xs: &[f64], ys: &[f64]) -> Fit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Fit {
        model: model.to_string(),
        slope,
        intercept,
        r_squared,
        points: xs.len(),
    }
}

pub const CSV_HEADER: &str = "h,eps,mode,s,R,norm,iterations,residual";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows sorted by `h` descending.
    pub fn new(mut rows: Vec<SweepRow>) -> Self {
        rows.sort_by(|a, b| b.h.total_cmp(&a.h));
        Self { rows }
    }

    /// `ln norm` against `1/h`; the slope estimates `C` in `e^{C/h}`.
    pub fn exponential_fit(&self) -> Fit {
        let xs: Vec<f64> = self.rows.iter().map(|r| 1.0 / r.h).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.norm.ln()).collect();
        linear_fit("exponential", &xs, &ys)
    }

    /// `ln norm` against `ln(1/h)`; slope 1 is `C/h` growth.
    pub fn polynomial_fit(&self) -> Fit {
        let xs: Vec<f64> = self.rows.iter().map(|r| (1.0 / r.h).ln()).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| r.norm.ln()).collect();
        linear_fit("polynomial", &xs, &ys)
    }

    pub fn fits(&self) -> Vec<Fit> {
        vec![self.exponential_fit(), self.polynomial_fit()]
    }

    /// `max h*norm / min h*norm`.
    pub fn h_norm_ratio(&self) -> f64 {
        let v: Vec<f64> = self.rows.iter().map(|r| r.h * r.norm).collect();
        let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e},{},{:.17e}",
                r.h, r.eps, r.mode, r.s, r.r_cut, r.norm, r.iterations, r.residual
            );
        }
        out
    }

    /// Whitespace separated `(1/h, ln norm)` pairs with a header line.
    pub fn plot_data(&self) -> String {
        let mut out = String::from("inv_h ln_norm\n");
        for r in &self.rows {
            let _ = writeln!(out, "{:.17e} {:.17e}", 1.0 / r.h, r.norm.ln());
        }
        out
    }
}

/// One weighted norm per `h`, rows in parallel. The grid resolution is
/// checked against the largest `h`. A failing row aborts the sweep; the
/// rows that did finish come back inside the error.
pub fn sweep_h(v: &PotentialSample, disc: &BoxDiscretization, spec: &SweepSpec) -> Result<SweepResult, ResolventError> {
    if spec.hs.is_empty() {
        return Err(ResolventError::NoSweepPoints);
    }
    if let Some(&bad) = spec.hs.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return Err(ResolventError::Grid(format!("sweep h must be positive (got {bad})")));
    }
    let mut hs = spec.hs.clone();
    hs.sort_by(|a, b| b.total_cmp(a));
    let h_ref = hs[0];
    let weight = match spec.mode {
        SweepMode::Interior => WeightDiag::interior(disc, spec.s),
        SweepMode::Exterior => WeightDiag::exterior(disc, spec.s, spec.r_cut),
    };
    let r_cut = match spec.mode {
        SweepMode::Interior => f64::NAN,
        SweepMode::Exterior => spec.r_cut,
    };
    let outcomes: Vec<Result<SweepRow, (f64, ResolventError)>> = hs
        .par_iter()
        .enumerate()
        .map(|(k, &h)| {
            let eps = spec.eps_rule.eps(h);
            let op = assemble_resolved_at(v, spec.energy, h, disc, h_ref).map_err(|e| (h, e))?;
            let opts = NormOptions {
                seed: spec.norm.seed.wrapping_add(k as u64),
                ..spec.norm
            };
            let est = weighted_resolvent_norm(&op, eps, &weight, &weight, &opts).map_err(|e| (h, e))?;
            Ok(SweepRow {
                h,
                eps,
                mode: spec.mode,
                s: spec.s,
                r_cut,
                norm: est.norm,
                iterations: est.iterations,
                residual: est.solve_residual,
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut failure = None;
    for o in outcomes {
        match o {
            Ok(r) => rows.push(r),
            Err(e) if failure.is_none() => failure = Some(e),
            Err(_) => {}
        }
    }
    match failure {
        None => Ok(SweepResult::new(rows)),
        Some((h, e)) => Err(ResolventError::SweepAborted {
            h,
            reason: Box::new(e),
            completed: SweepResult::new(rows).rows,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::CatalogPotential;

    #[test]
    fn fit_recovers_a_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 - 2.0 * x).collect();
        let f = linear_fit("t", &xs, &ys);
        assert!((f.slope + 2.0).abs() < 1e-14 && (f.intercept - 0.5).abs() < 1e-13);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rows_are_sorted_descending_and_csv_has_header() {
        let disc = BoxDiscretization::new(2.0, 21).unwrap();
        let v = PotentialSample::field(&CatalogPotential::Zero, 21, 2.0, 1.0, 0.4);
        let spec = SweepSpec {
            energy: 1.0,
            s: 0.6,
            hs: vec![0.8, 1.0, 0.9],
            eps_rule: EpsRule::Constant { eps: 0.05 },
            mode: SweepMode::Interior,
            r_cut: 0.0,
            norm: NormOptions::default(),
        };
        let res = sweep_h(&v, &disc, &spec).unwrap();
        let hs: Vec<f64> = res.rows.iter().map(|r| r.h).collect();
        assert_eq!(hs, vec![1.0, 0.9, 0.8]);
        let csv = res.to_csv();
        assert!(csv.starts_with("h,eps,mode,s,R,norm,iterations,residual\n"));
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(res.plot_data().lines().count(), 4);
    }

    #[test]
    fn empty_sweep_is_an_error() {
        let disc = BoxDiscretization::new(2.0, 21).unwrap();
        let v = PotentialSample::field(&CatalogPotential::Zero, 21, 2.0, 1.0, 0.4);
        let spec = SweepSpec {
            energy: 1.0,
            s: 0.6,
            hs: vec![],
            eps_rule: EpsRule::default(),
            mode: SweepMode::Interior,
            r_cut: 0.0,
            norm: NormOptions::default(),
        };
        assert!(matches!(sweep_h(&v, &disc, &spec), Err(ResolventError::NoSweepPoints)));
    }
}
