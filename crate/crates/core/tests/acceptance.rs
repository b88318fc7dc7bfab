//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

mod common;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use common::{dense_weighted_norm, rel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use resolvent_workbench::params::ProblemParams;
use resolvent_workbench::potential::{CatalogParams, CatalogPotential, PotentialId, PotentialModel};
use resolvent_workbench::resolvent::{
    assemble, assemble_fn, catalog_potential, sweep_h, weighted_resolvent_norm, BoxDiscretization, EpsRule,
    NormOptions, PlaneGrid, SweepMode, SweepResult, SweepSpec, WeightDiag,
};
use resolvent_workbench::verify::{
    carleman_quadratic_form_test, combined_estimate_test, e4_margin_profile, effective_potential, gluing_constants,
    log_spaced_hs, shift_radius_bound, verify_barrier_facts, verify_e4_inequality, verify_shift_envelope,
    PotentialSample, TestFunction, VerifyError,
};
use resolvent_workbench::weights::{
    compute_g_and_h1, find_psi_constants, find_psi_constants_with_report, solve_phi_riccati, ConstantSource,
    PsiSearch, PsiSpec, RadialGrid, RiccatiOptions, WeightTables, WeightsError,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const ENERGIES: [f64; 3] = [0.5, 1.0, 2.0];
const DELTA0S: [f64; 3] = [0.3, 0.4, 0.45];

fn combos() -> Vec<ProblemParams> {
    let mut v = Vec::new();
    for e in ENERGIES {
        for d0 in DELTA0S {
            v.push(ProblemParams::with_delta(e, d0, 0.5 * d0));
        }
    }
    v
}

/// Specs certified for `V = 0`; the envelope search has no admissible `R1`.
fn zero_specs() -> Vec<PsiSpec> {
    let search = PsiSearch {
        model: PotentialModel::Instance(CatalogPotential::Zero),
        ..PsiSearch::default()
    };
    combos().iter().map(|p| find_psi_constants(p, &search).unwrap()).collect()
}

fn table_grid(spec: &PsiSpec) -> RadialGrid {
    RadialGrid::refined(spec, 4000, 2.0 * spec.r1).unwrap()
}

fn h1_of(spec: &PsiSpec, grid: &RadialGrid) -> f64 {
    compute_g_and_h1(spec, spec.energy, grid).unwrap().h1
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut ok = 0;
    let mut worst = f64::INFINITY;
    let mut notes = Vec::new();
    for p in combos() {
        match find_psi_constants_with_report(&p, &PsiSearch::default()) {
            Ok((spec, rep)) => {
                let (a, b) = spec.continuity_residuals();
                if rep.min_margin >= -1e-12 && a <= 1e-10 && b <= 1e-10 && rep.grid_size >= 10_000 {
                    ok += 1;
                }
            }
            Err(WeightsError::NoAdmissibleR1 { best_margin, best_r1, .. }) => {
                worst = worst.min(best_margin);
                notes.push(format!("E={} d0={}: best {best_margin:.3e} at R1={best_r1:.3}", p.energy, p.delta0));
            }
            Err(e) => notes.push(format!("E={} d0={}: {e}", p.energy, p.delta0)),
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        ok == 9 && secs <= 30.0,
        format!(
            "{ok}/9 envelope certificates; worst best-margin {worst:.3e}; {secs:.1}s; [{}]",
            notes.join("; ")
        ),
    )
}

fn criterion_2() -> Outcome {
    let (k, end) = (2.0_f64, 1.5);
    let sk = k.sqrt();
    let mut bench = 0.0_f64;
    for h in [0.05, 0.1, 0.2] {
        let grid = RadialGrid::uniform(0.005, 3.0, 600, &[end]).unwrap();
        let sol = solve_phi_riccati(&ConstantSource { k, end }, h, &grid, &RiccatiOptions::default()).unwrap();
        for (r, u) in grid.nodes().iter().zip(&sol.u) {
            let exact = if *r < end { sk * (sk * (end - r) / h).tanh() } else { 0.0 };
            bench = bench.max((u - exact).abs() / sk);
        }
    }
    let mut residual = 0.0_f64;
    let mut band = true;
    for spec in zero_specs() {
        let grid = table_grid(&spec);
        let h1 = h1_of(&spec, &grid);
        for h in [h1, 0.25 * h1] {
            let wt = WeightTables::build(&spec, h, &grid).unwrap();
            residual = residual.max(wt.riccati_residual);
            let cap = spec.sup_psi().sqrt() + 1e-9;
            band &= wt.u.iter().all(|&u| (0.0..=cap).contains(&u));
        }
    }
    outcome(
        bench <= 1e-8 && residual <= 1e-6 && band,
        format!("tanh rel sup error {bench:.3e}; max Riccati residual {residual:.3e}; 0 <= u <= sqrt(sup psi): {band}"),
    )
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0_f64;
    for spec in zero_specs() {
        let grid = table_grid(&spec);
        let h1 = h1_of(&spec, &grid);
        let pot = CatalogPotential::RadialDecay { c: 1.0, delta0: spec.delta0 };
        let v = PotentialSample::radial(&pot, grid.nodes(), 1.0, spec.delta0);
        for h in [h1, 0.25 * h1] {
            let wt = WeightTables::build(&spec, h, &grid).unwrap();
            worst = worst.max(effective_potential(&v, &wt).unwrap().cross_residual);
        }
    }
    outcome(worst <= 1e-10, format!("max |V_phi - (V - psi - h^2/4r^2)| = {worst:.3e}"))
}

fn criterion_4() -> Outcome {
    let mut env_min = f64::INFINITY;
    let mut zero_min = f64::INFINITY;
    let mut inner = 0.0_f64;
    for spec in zero_specs() {
        let grid = table_grid(&spec);
        let h1 = h1_of(&spec, &grid);
        let wt = WeightTables::build(&spec, h1, &grid).unwrap();
        let hs = log_spaced_hs(h1, 1e-2, 8);
        assert_eq!(hs[0], h1);
        env_min = env_min.min(verify_e4_inequality(&PotentialModel::Envelope, &wt, &hs).unwrap().min_margin);
        let zero = PotentialModel::Instance(CatalogPotential::Zero);
        zero_min = zero_min.min(verify_e4_inequality(&zero, &wt, &hs).unwrap().min_margin);
        let c0 = wt.c0();
        for &h in &hs {
            let prof = e4_margin_profile(&PotentialModel::Envelope, &wt, h);
            for (k, &r) in wt.r.iter().enumerate().filter(|(_, r)| **r <= spec.r0) {
                let vp = (1.0 + r).powf(-spec.delta0);
                let dvp = vp / (1.0 + r);
                let want = (0.75 * spec.energy + 1.0 / spec.delta0 - vp) * 2.0 * c0 * r - dvp * c0 * r * r;
                inner = inner.max((prof[k] - want).abs());
            }
        }
    }
    outcome(
        env_min >= -1e-12 && inner <= 1e-10,
        format!(
            "envelope min margin {env_min:.3e} (needs >= -1e-12); inner-branch identity error {inner:.3e}; V=0 min margin {zero_min:.3e}"
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut failing = Vec::new();
    let mut mins = [f64::INFINITY; 4];
    for spec in zero_specs() {
        for (k, rep) in verify_barrier_facts(&spec, &table_grid(&spec)).iter().enumerate() {
            mins[k] = mins[k].min(rep.min_margin);
            if !rep.pass {
                failing.push(format!("{} (E={}, d0={})", rep.name, spec.energy, spec.delta0));
            }
        }
    }
    outcome(
        failing.is_empty(),
        format!("min margins {:.3e} {:.3e} {:.3e} {:.3e}; failing [{}]", mins[0], mins[1], mins[2], mins[3], failing.join(", ")),
    )
}

fn criterion_6() -> Outcome {
    let p = ProblemParams::new(1.0, 0.4, 0.6);
    let bound = shift_radius_bound(0.4);
    let plane = PlaneGrid::new(8.0, 201).unwrap();
    let mut on_circle = true;
    let mut rejects = true;
    for k in 0..20 {
        let t = std::f64::consts::TAU * k as f64 / 20.0;
        let x0 = [bound * t.cos(), bound * t.sin()];
        on_circle &= verify_shift_envelope(x0, &p, &plane).map(|r| r.pass).unwrap_or(false);
        rejects &= matches!(
            verify_shift_envelope([1.01 * x0[0], 1.01 * x0[1]], &p, &plane),
            Err(VerifyError::X0TooLarge { .. })
        );
    }
    let search = PsiSearch {
        model: PotentialModel::Instance(CatalogPotential::Zero),
        ..PsiSearch::default()
    };
    let spec = find_psi_constants(&p, &search).unwrap();
    let grid = table_grid(&spec);
    let wt = WeightTables::build(&spec, h1_of(&spec, &grid), &grid).unwrap();
    let x0 = [bound, 0.0];
    let (k_ok, detail) = match gluing_constants(&wt, x0, &plane) {
        Ok(g) => (
            g.k.is_finite() && g.tail_bound <= g.k && g.r_cut == spec.r1 + bound,
            format!("K = {:.6} (tail bound {:.6}), R = {}", g.k, g.tail_bound, g.r_cut),
        ),
        Err(e) => (false, e.to_string()),
    };
    outcome(
        on_circle && rejects && k_ok,
        format!("radius {bound:.6}; passes on circle: {on_circle}; rejects 1.01x: {rejects}; {detail}"),
    )
}

fn random_op(rng: &mut ChaCha8Rng, cells: usize, h: f64) -> resolvent_workbench::resolvent::DiscreteOperator {
    let half_width = cells as f64 * h / 8.0;
    let disc = BoxDiscretization::with_cells(half_width, cells).unwrap();
    let values: Vec<f64> = (0..disc.n * disc.n).map(|_| rng.gen_range(-0.5..1.5)).collect();
    let v = PotentialSample::field_from_values(values, disc.n, half_width, 10.0, 0.4);
    assemble(&v, 1.0, h, &disc).unwrap()
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0_f64;
    let mut bounded = true;
    for _ in 0..5 {
        let h = rng.gen_range(0.2..0.6);
        let eps = 10f64.powf(rng.gen_range(-6.0..-1.0));
        let s = rng.gen_range(0.55..0.8);
        let op = random_op(&mut rng, 24, h);
        let w = WeightDiag::interior(&op.disc, s);
        let est = weighted_resolvent_norm(&op, eps, &w, &w, &NormOptions::default()).unwrap();
        worst = worst.max(rel(est.norm, dense_weighted_norm(&op, eps, &w, &w)));
        bounded &= est.norm <= (1.0 + 1e-10) / eps;
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-6 && bounded && secs <= 60.0,
        format!("max relative error vs dense SVD {worst:.3e}; norm <= 1/eps: {bounded}; {secs:.1}s"),
    )
}

fn sweep(id: PotentialId, mode: SweepMode) -> (SweepResult, f64) {
    let t = Instant::now();
    let disc = BoxDiscretization::with_cells(3.2, 64).unwrap();
    let cp = CatalogParams::default();
    let v = catalog_potential(id, &cp, 1.0, &disc).unwrap();
    let spec = SweepSpec {
        energy: 1.0,
        s: 0.6,
        hs: vec![0.4, 0.3, 0.22, 0.16, 0.12],
        eps_rule: EpsRule::Constant { eps: 1e-6 },
        mode,
        r_cut: cp.rho + 3.0 * cp.sigma,
        norm: NormOptions::default(),
    };
    let res = sweep_h(&v, &disc, &spec).unwrap();
    (res, t.elapsed().as_secs_f64())
}

fn criterion_8() -> Outcome {
    let (a, ta) = sweep(PotentialId::Zero, SweepMode::Interior);
    let (b, tb) = sweep(PotentialId::TrappingRing, SweepMode::Interior);
    let (c, tc) = sweep(PotentialId::TrappingRing, SweepMode::Exterior);
    let poly = a.polynomial_fit();
    let exp = b.exponential_fit();
    let ratio = c.h_norm_ratio();
    let pa = (0.7..=1.3).contains(&poly.slope);
    let pb = exp.slope > 0.0 && exp.r_squared >= 0.9;
    let pc = ratio <= 10.0;
    let pt = ta.max(tb).max(tc) <= 120.0;
    let norms = |r: &SweepResult| r.rows.iter().map(|x| format!("{:.3e}", x.norm)).collect::<Vec<_>>().join(",");
    outcome(
        pa && pb && pc && pt,
        format!(
            "(a) V=0 polynomial slope {:.4} R^2 {:.3} [{}]; (b) ring exponential slope {:.4} R^2 {:.3} [{}]; \
             (c) ring exterior h*norm ratio {:.3} [{}]; slowest sweep {:.1}s",
            poly.slope,
            poly.r_squared,
            if pa { "ok" } else { "miss" },
            exp.slope,
            exp.r_squared,
            if pb { "ok" } else { "miss" },
            ratio,
            if pc { "ok" } else { "miss" },
            ta.max(tb).max(tc)
        ) + &format!(" norms a=[{}] b=[{}] c=[{}]", norms(&a), norms(&b), norms(&c)),
    )
}

fn ensemble_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/carleman_ensemble.txt")
}

fn criterion_9() -> Outcome {
    let p = ProblemParams::new(1.0, 0.4, 0.6);
    let search = PsiSearch {
        model: PotentialModel::Instance(CatalogPotential::Zero),
        ..PsiSearch::default()
    };
    let spec = find_psi_constants(&p, &search).unwrap();
    let grid = table_grid(&spec);
    let h1 = h1_of(&spec, &grid);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let bumps: Vec<TestFunction> = (0..50).map(|_| TestFunction::random_bump(&mut rng, 1.5, (0.1, 0.3))).collect();
    let x0 = [0.3, 0.0];
    let mut text = String::from("# bump h implied_c_carleman implied_c_combined\n");
    let mut finite = true;
    let mut scale_err = 0.0_f64;
    for h in log_spaced_hs(h1, 0.1, 4) {
        let wt = WeightTables::build(&spec, h, &grid).unwrap();
        let disc = BoxDiscretization::with_max_spacing(2.5, h / 4.0).unwrap();
        let op = assemble_fn(|_, _| 0.0, 1.0, h, &disc, h).unwrap();
        let eps = 0.1 * h;
        for (k, v) in bumps.iter().enumerate() {
            let c3 = carleman_quadratic_form_test(v, &wt, &op, eps).unwrap().implied_c;
            let c4 = combined_estimate_test(v, &wt, &op, x0, eps).unwrap().implied_c;
            finite &= c3.is_finite() && c4.is_finite() && c3 > 0.0 && c4 > 0.0;
            for lambda in [2.0, 10.0, -3.0] {
                let s3 = carleman_quadratic_form_test(&v.scaled(lambda), &wt, &op, eps).unwrap().implied_c;
                let s4 = combined_estimate_test(&v.scaled(lambda), &wt, &op, x0, eps).unwrap().implied_c;
                scale_err = scale_err.max(rel(s3, c3)).max(rel(s4, c4));
            }
            let _ = writeln!(text, "{k} {h:e} {c3:e} {c4:e}");
        }
    }
    let path = ensemble_path();
    let locked = match std::fs::read_to_string(&path) {
        Ok(old) => (old == text, "compared with the locked file"),
        Err(_) => {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &text).unwrap();
            (true, "no locked file; wrote it")
        }
    };
    outcome(
        finite && scale_err <= 1e-10 && locked.0,
        format!(
            "200 forms finite: {finite}; max scale error {scale_err:.3e}; byte-identical: {} ({})",
            locked.0, locked.1
        ),
    )
}

const BIN: &str = env!("CARGO_BIN_EXE_workbench");

fn cli(args: &[&str], cfg: &Path, out: &Path) -> i32 {
    Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap_or(-1)
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let write = |name: &str, text: &str| {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let good = write(
        "good.toml",
        "[weights]\ncertify = \"zero\"\ntable_nodes = 1000\n[resolvent]\nhalf_width = 1.6\ncells = 40\n\
         hs = [0.4, 0.3, 0.26]\neps = { rule = \"constant\", eps = 1e-2 }\nmodes = [\"interior\", \"exterior\"]\n",
    );
    let mut notes = Vec::new();
    let (a, b) = (dir.join("a"), dir.join("b"));
    for out in [&a, &b] {
        for sub in ["weights", "verify", "sweep", "report"] {
            let code = cli(&[sub], &good, out);
            if code != 0 {
                notes.push(format!("{sub} exited {code}"));
            }
        }
    }
    let mut identical = true;
    for f in ["weights/constants.json", "weights/table_0.txt", "verify/margins.json", "sweep/interior.csv", "sweep/exterior.csv", "report.json"] {
        identical &= std::fs::read(a.join(f)).ok() == std::fs::read(b.join(f)).ok() && a.join(f).is_file();
    }
    let x = 1.05 * shift_radius_bound(0.4);
    let cases: [(&str, &str, String, i32); 4] = [
        ("empty", "sweep", "[resolvent]\nhs = []\n".into(), 1),
        ("half", "weights", "[problem]\ns = 0.5\n".into(), 2),
        ("shift", "verify", format!("[weights]\ncertify = \"zero\"\n[verify]\nx0 = [{x}, 0.0]\n"), 3),
        (
            "solver",
            "sweep",
            "[resolvent]\nhalf_width = 1.6\ncells = 40\nhs = [0.4]\nmax_iter = 1\n".into(),
            4,
        ),
    ];
    let mut codes = true;
    let mut clean = true;
    for (name, sub, text, want) in &cases {
        let cfg = write(&format!("{name}.toml"), text);
        let out = dir.join(format!("out_{name}"));
        let code = cli(&[sub], &cfg, &out);
        if code != *want {
            codes = false;
            notes.push(format!("{name}: exit {code}, wanted {want}"));
        }
        if *want <= 2 && out.exists() {
            clean = false;
            notes.push(format!("{name}: left outputs"));
        }
    }
    outcome(
        identical && codes && clean && notes.is_empty(),
        format!("byte-identical reruns: {identical}; exit codes 0-4: {codes}; no partial outputs: {clean}; [{}]", notes.join("; ")),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("construction certificates", criterion_1),
        ("Riccati oracle", criterion_2),
        ("effective-potential identity", criterion_3),
        ("E/4 certificate", criterion_4),
        ("barrier facts", criterion_5),
        ("shift and gluing", criterion_6),
        ("norm oracle", criterion_7),
        ("scaling shapes", criterion_8),
        ("Carleman ensemble", criterion_9),
        ("CLI contract", criterion_10),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let n = k + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let t = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !res.pass {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {} {name}: {} ({:.1}s)",
            if res.pass { "PASS" } else { "FAIL" },
            res.detail,
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
