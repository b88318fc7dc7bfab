use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use super::config::{CertGrid, Certify, RunConfig};
use super::{CliError, EXIT_CONFIG, EXIT_CONSTRUCTION, EXIT_SOLVER, EXIT_VERIFICATION};
use crate::potential::{CatalogPotential, PotentialId, PotentialModel};
use crate::resolvent::{
    catalog_potential, sweep_h, BoxDiscretization, Fit, NormOptions, PlaneGrid, ResolventError, SweepMode,
    SweepResult, SweepSpec,
};
use crate::verify::{
    gluing_constants, log_spaced_hs, verify_barrier_facts, verify_e4_inequality, verify_psi_inequality,
    verify_shift_envelope, GluingConstants, MarginReport,
};
use crate::weights::{
    compute_g_and_h1, find_psi_constants, ConstantsReport, PsiSearch, PsiSpec, RadialGrid, WeightTables,
};

/// Continuity of `psi` at `R0` and `R1`.
const CONTINUITY_TOL: f64 = 1e-10;
const RICCATI_TOL: f64 = 1e-6;

/// Files written by one command, in write order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Artifacts {
    pub written: Vec<PathBuf>,
}

impl Artifacts {
    fn write(&mut self, path: PathBuf, contents: &str) -> Result<(), CliError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::new(EXIT_CONFIG, format!("cannot create {}: {e}", dir.display())))?;
        }
        std::fs::write(&path, contents)
            .map_err(|e| CliError::new(EXIT_CONFIG, format!("cannot write {}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, path: PathBuf, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.write(path, &text)
    }
}

fn construction(e: impl std::fmt::Display) -> CliError {
    CliError::new(EXIT_CONSTRUCTION, format!("construction: {e}"))
}

fn model_of(cfg: &RunConfig) -> Result<PotentialModel, CliError> {
    Ok(match cfg.certify()? {
        Certify::Envelope => PotentialModel::Envelope,
        Certify::Instance(id) => PotentialModel::Instance(CatalogPotential::from_id(id, &cfg.potential)),
    })
}

struct Construction {
    spec: PsiSpec,
    grid: RadialGrid,
    h1: f64,
}

fn construct(cfg: &RunConfig) -> Result<Construction, CliError> {
    let w = &cfg.weights;
    let search = PsiSearch {
        r1_min: w.r1_min,
        r1_max: w.r1_max,
        steps: w.r1_steps,
        margin_nodes: w.margin_nodes,
        tolerance: cfg.verify.tolerance,
        model: model_of(cfg)?,
    };
    let spec = find_psi_constants(&cfg.params(), &search).map_err(construction)?;
    let (res0, res1) = spec.continuity_residuals();
    for (name, res) in [("continuity_residual_r0", res0), ("continuity_residual_r1", res1)] {
        if !(res <= CONTINUITY_TOL) {
            return Err(construction(format!("{name} = {res:.3e} > {CONTINUITY_TOL:.0e}")));
        }
    }
    let grid = RadialGrid::refined(&spec, w.table_nodes, w.r_max_factor * spec.r1).map_err(construction)?;
    let h1 = compute_g_and_h1(&spec, spec.energy, &grid).map_err(construction)?.h1;
    Ok(Construction { spec, grid, h1 })
}

fn tables_at(c: &Construction, h: f64) -> Result<WeightTables, CliError> {
    let wt = WeightTables::build(&c.spec, h, &c.grid).map_err(construction)?;
    if !(wt.riccati_residual <= RICCATI_TOL) {
        return Err(construction(format!(
            "riccati_residual = {:.3e} > {RICCATI_TOL:.0e} at h = {h}",
            wt.riccati_residual
        )));
    }
    Ok(wt)
}

fn out(cfg: &RunConfig, parts: &[&str]) -> PathBuf {
    let mut p = cfg.output.dir.clone();
    p.extend(parts);
    p
}

/// `weights/constants.json` and one `weights/table_<k>.txt` per entry of
/// `weights.h_fractions`.
pub fn cmd_weights(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let c = construct(cfg)?;
    let tables = cfg
        .weights
        .h_fractions
        .iter()
        .map(|f| tables_at(&c, f * c.h1))
        .collect::<Result<Vec<_>, _>>()?;
    let reports: Vec<ConstantsReport> = tables.iter().map(|t| t.constants_report()).collect();
    let mut art = Artifacts::default();
    for (k, t) in tables.iter().enumerate() {
        art.write(out(cfg, &["weights", &format!("table_{k}.txt")]), &t.to_columnar())?;
    }
    art.write_json(out(cfg, &["weights", "constants.json"]), &reports)?;
    Ok(art)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub pass: bool,
    pub failing: Vec<String>,
    pub reports: Vec<MarginReport>,
    pub gluing: Option<GluingConstants>,
    pub errors: Vec<String>,
}

/// `verify/margins.json`. Exit 3 when any report fails or a verification
/// precondition (such as the shift radius) does not hold.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let c = construct(cfg)?;
    let wt = tables_at(&c, c.h1)?;
    let v = &cfg.verify;
    let tol = v.tolerance;
    let cert_grid = match v.grid {
        CertGrid::Refined => c.grid.clone(),
        CertGrid::Uniform => {
            let r_max = cfg.weights.r_max_factor * c.spec.r1;
            RadialGrid::uniform(r_max / v.grid_nodes as f64, r_max, v.grid_nodes, &[]).map_err(construction)?
        }
    };
    let mut models = vec![model_of(cfg)?];
    if v.include_envelope && models[0] != PotentialModel::Envelope {
        models.push(PotentialModel::Envelope);
    }
    let hs = log_spaced_hs(c.h1, v.e4_ratio, v.e4_hs);
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for m in &models {
        reports.push(verify_psi_inequality(&c.spec, &cert_grid, m));
        match verify_e4_inequality(m, &wt, &hs) {
            Ok(r) => reports.push(r),
            Err(e) => {
                reports.push(MarginReport::failed(format!("e4_inequality[{}]", m.label()), tol));
                errors.push(format!("e4_inequality[{}]: {e}", m.label()));
            }
        }
    }
    reports.extend(verify_barrier_facts(&c.spec, &cert_grid));
    let plane = PlaneGrid::new(v.plane_half_width, v.plane_n).map_err(|e| CliError::new(EXIT_CONFIG, e.to_string()))?;
    match verify_shift_envelope(v.x0, &cfg.params(), &plane) {
        Ok(r) => reports.push(r),
        Err(e) => {
            reports.push(MarginReport::failed("shift_envelope", tol));
            errors.push(format!("shift_envelope: {e}"));
        }
    }
    let gluing = match gluing_constants(&wt, v.x0, &plane) {
        Ok(g) => Some(g),
        Err(e) => {
            reports.push(MarginReport::failed("gluing_constant", tol));
            errors.push(format!("gluing_constant: {e}"));
            None
        }
    };
    for r in &mut reports {
        if r.name != "barrier_wprime_positive" {
            r.tolerance = tol;
            r.refresh_pass();
        }
    }
    let failing: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| r.name.clone()).collect();
    let result = VerifyOutput {
        pass: failing.is_empty(),
        failing: failing.clone(),
        reports,
        gluing,
        errors: errors.clone(),
    };
    let mut art = Artifacts::default();
    art.write_json(out(cfg, &["verify", "margins.json"]), &result)?;
    if result.pass {
        Ok(art)
    } else {
        let mut msg = format!("verification failed: {}", failing.join(", "));
        for e in &errors {
            msg.push_str("\n  ");
            msg.push_str(e);
        }
        Err(CliError::new(EXIT_VERIFICATION, msg))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub mode: SweepMode,
    pub potential: String,
    pub fits: Vec<Fit>,
    pub h_norm_ratio: f64,
}

/// Target for `--assert-fits`; `None` when it holds.
fn fit_target(potential: PotentialId, s: &FitSummary) -> Option<String> {
    let (exp, poly) = (&s.fits[0], &s.fits[1]);
    match (s.mode, potential) {
        (SweepMode::Exterior, _) => (s.h_norm_ratio > 10.0)
            .then(|| format!("exterior h*norm ratio {:.4} > 10", s.h_norm_ratio)),
        (SweepMode::Interior, PotentialId::TrappingRing) => (!(exp.slope > 0.0 && exp.r_squared >= 0.9)).then(|| {
            format!("interior exponential fit slope {:.4}, R^2 {:.4} (needs > 0, >= 0.9)", exp.slope, exp.r_squared)
        }),
        (SweepMode::Interior, _) => {
            (!((0.7..=1.3).contains(&poly.slope) && exp.r_squared < poly.r_squared)).then(|| {
                format!(
                    "interior polynomial slope {:.4} (needs [0.7, 1.3]), R^2 exp {:.4} vs poly {:.4}",
                    poly.slope, exp.r_squared, poly.r_squared
                )
            })
        }
    }
}

/// Per mode: `sweep/<mode>.csv`, `sweep/<mode>_fits.json` and
/// `sweep/<mode>_plot.dat`. A solver failure writes the completed rows to
/// `sweep/<mode>_partial.csv` and exits 4.
pub fn cmd_sweep(cfg: &RunConfig, assert_fits: bool) -> Result<Artifacts, CliError> {
    let r = &cfg.resolvent;
    let id = cfg.sweep_potential()?;
    let disc = BoxDiscretization::with_cells(r.half_width, r.cells).map_err(construction)?;
    let sample = catalog_potential(id, &cfg.potential, cfg.problem.energy, &disc).map_err(construction)?;
    let mut art = Artifacts::default();
    let mut misses = Vec::new();
    for &mode in &r.modes {
        let spec = SweepSpec {
            energy: cfg.problem.energy,
            s: cfg.problem.s,
            hs: r.hs.clone(),
            eps_rule: r.eps,
            mode,
            r_cut: cfg.r_cut(),
            norm: NormOptions {
                tol: r.power_tol,
                max_iter: r.max_iter,
                seed: cfg.seed,
                adjoint_first: false,
            },
        };
        let res = match sweep_h(&sample, &disc, &spec) {
            Ok(res) => res,
            Err(ResolventError::SweepAborted { h, reason, completed }) => {
                let partial = SweepResult::new(completed);
                art.write(out(cfg, &["sweep", &format!("{mode}_partial.csv")]), &partial.to_csv())?;
                return Err(CliError::new(
                    EXIT_SOLVER,
                    format!("solver failed in {mode} sweep at row h = {h}: {reason}"),
                ));
            }
            Err(e) => return Err(CliError::new(EXIT_SOLVER, format!("solver failed in {mode} sweep: {e}"))),
        };
        let summary = FitSummary {
            mode,
            potential: id.name().to_string(),
            fits: res.fits(),
            h_norm_ratio: res.h_norm_ratio(),
        };
        art.write(out(cfg, &["sweep", &format!("{mode}.csv")]), &res.to_csv())?;
        art.write_json(out(cfg, &["sweep", &format!("{mode}_fits.json")]), &summary)?;
        if cfg.output.plot_data {
            art.write(out(cfg, &["sweep", &format!("{mode}_plot.dat")]), &res.plot_data())?;
        }
        if let Some(m) = fit_target(id, &summary) {
            misses.push(m);
        }
    }
    if assert_fits && !misses.is_empty() {
        return Err(CliError::new(EXIT_VERIFICATION, format!("fit targets missed: {}", misses.join("; "))));
    }
    Ok(art)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub constants: Option<Vec<ConstantsReport>>,
    pub verify: Option<VerifyOutput>,
    pub sweeps: Vec<FitSummary>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Option<T>, CliError> {
    match std::fs::read_to_string(path) {
        Ok(text) => serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| CliError::new(EXIT_CONFIG, format!("cannot parse {}: {e}", path.display()))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(CliError::new(EXIT_CONFIG, format!("cannot read {}: {e}", path.display()))),
    }
}

/// `report.json` from whatever `weights`, `verify` and `sweep` left in the
/// output directory.
pub fn cmd_report(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let constants = read_json(&out(cfg, &["weights", "constants.json"]))?;
    let verify: Option<VerifyOutput> = read_json(&out(cfg, &["verify", "margins.json"]))?;
    let mut sweeps = Vec::new();
    for mode in [SweepMode::Interior, SweepMode::Exterior] {
        if let Some(s) = read_json(&out(cfg, &["sweep", &format!("{mode}_fits.json")]))? {
            sweeps.push(s);
        }
    }
    if constants.is_none() && verify.is_none() && sweeps.is_empty() {
        return Err(CliError::new(
            EXIT_CONFIG,
            format!("no prior outputs in {}", cfg.output.dir.display()),
        ));
    }
    let summary = Summary {
        constants,
        verify,
        sweeps,
    };
    if let Some(c) = summary.constants.as_ref().and_then(|c| c.first()) {
        println!("R0 = {:.6}  R1 = {:.6}  h1 = {:.6e}  C0 = {:.6e}", c.r0, c.r1, c.h1, c.big_c0);
    }
    if let Some(v) = &summary.verify {
        println!("verify: {} reports, failing: [{}]", v.reports.len(), v.failing.join(", "));
    }
    for s in &summary.sweeps {
        for f in &s.fits {
            println!("{} {}: slope {:.4}  R^2 {:.4}", s.mode, f.model, f.slope, f.r_squared);
        }
    }
    let mut art = Artifacts::default();
    art.write_json(out(cfg, &["report.json"]), &summary)?;
    Ok(art)
}
