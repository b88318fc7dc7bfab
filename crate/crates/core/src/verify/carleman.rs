//! Quadratic-form checks of the Carleman estimate on sampled test functions.
//!
//! Exponential weights are evaluated as `e^{2(phi - max phi)/h}`. The common
//! factor `e^{-C0/h}` cancels in `implied_C` and keeps every term finite
//! for small `h`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gluing::shift_radius_bound;
use super::VerifyError;
use crate::resolvent::DiscreteOperator;
use crate::weights::{eval_m, WeightTables};

/// Nonzero samples closer than this many cells to the edge are rejected.
pub const BOUNDARY_CELLS: usize = 3;

/// Smooth compactly supported test functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    /// `A exp(1 - 1/(1 - |x-c|^2/rad^2))` inside the disc, peak value `A`.
    Bump { center: [f64; 2], radius: f64, amplitude: f64 },
    /// `A exp(-|x-c|^2/width^2)`, cut off at `6 width` (below `3e-16 A`).
    Gaussian { center: [f64; 2], width: f64, amplitude: f64 },
}

impl TestFunction {
    pub fn center(&self) -> [f64; 2] {
        match *self {
            TestFunction::Bump { center, .. } | TestFunction::Gaussian { center, .. } => center,
        }
    }

    pub fn support_radius(&self) -> f64 {
        match *self {
            TestFunction::Bump { radius, .. } => radius,
            TestFunction::Gaussian { width, .. } => 6.0 * width,
        }
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        let c = self.center();
        let d2 = (x - c[0]).powi(2) + (y - c[1]).powi(2);
        match *self {
            TestFunction::Bump { radius, amplitude, .. } => {
                let t = d2 / (radius * radius);
                if t < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - t)).exp()
                } else {
                    0.0
                }
            }
            TestFunction::Gaussian { width, amplitude, .. } => {
                if d2 < 36.0 * width * width {
                    amplitude * (-d2 / (width * width)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// `v -> lambda v`.
    pub fn scaled(&self, lambda: f64) -> Self {
        match *self {
            TestFunction::Bump { center, radius, amplitude } => TestFunction::Bump {
                center,
                radius,
                amplitude: amplitude * lambda,
            },
            TestFunction::Gaussian { center, width, amplitude } => TestFunction::Gaussian {
                center,
                width,
                amplitude: amplitude * lambda,
            },
        }
    }

    /// Bump with center in the disc of radius `center_radius`, radius in
    /// `radii` and amplitude in `[0.5, 2)`.
    pub fn random_bump<R: Rng>(rng: &mut R, center_radius: f64, radii: (f64, f64)) -> Self {
        let rho = center_radius * rng.gen::<f64>().sqrt();
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        TestFunction::Bump {
            center: [rho * theta.cos(), rho * theta.sin()],
            radius: rng.gen_range(radii.0..radii.1),
            amplitude: rng.gen_range(0.5..2.0),
        }
    }
}

/// Node rectangle `[i0, i1] x [j0, j1]` enclosing the support plus one ring,
/// with the samples of `v`.
struct Patch {
    i0: usize,
    j0: usize,
    ni: usize,
    nj: usize,
    vals: Vec<f64>,
}

impl Patch {
    fn get(&self, i: usize, j: usize) -> f64 {
        if i < self.i0 || j < self.j0 || i >= self.i0 + self.ni || j >= self.j0 + self.nj {
            0.0
        } else {
            self.vals[(j - self.j0) * self.ni + (i - self.i0)]
        }
    }
}

fn sample_patch(v: &TestFunction, op: &DiscreteOperator) -> Result<Patch, VerifyError> {
    let disc = &op.disc;
    let n = disc.n;
    let a = disc.spacing();
    let mid = 0.5 * (n - 1) as f64;
    let c = v.center();
    let rad = v.support_radius();
    let to_idx = |t: f64| t / a + mid;
    let lo_i = (to_idx(c[0] - rad).floor() - 1.0).max(0.0) as usize;
    let hi_i = ((to_idx(c[0] + rad).ceil() + 1.0).max(0.0) as usize).min(n - 1);
    let lo_j = (to_idx(c[1] - rad).floor() - 1.0).max(0.0) as usize;
    let hi_j = ((to_idx(c[1] + rad).ceil() + 1.0).max(0.0) as usize).min(n - 1);
    if lo_i > hi_i || lo_j > hi_j {
        return Err(VerifyError::SizeMismatch("test function lies outside the box".into()));
    }
    let (ni, nj) = (hi_i - lo_i + 1, hi_j - lo_j + 1);
    let mut vals = vec![0.0; ni * nj];
    let mut closest = usize::MAX;
    for j in lo_j..=hi_j {
        for i in lo_i..=hi_i {
            let val = v.value(disc.coord(i), disc.coord(j));
            if val != 0.0 {
                let edge = i.min(j).min(n - 1 - i).min(n - 1 - j);
                closest = closest.min(edge);
            }
            vals[(j - lo_j) * ni + (i - lo_i)] = val;
        }
    }
    if closest <= BOUNDARY_CELLS {
        return Err(VerifyError::SupportTouchesBoundary { cells: closest });
    }
    Ok(Patch {
        i0: lo_i,
        j0: lo_j,
        ni,
        nj,
        vals,
    })
}

/// Calls `f(x, y, v, |(P - i eps) v|^2)` over every node where either is nonzero.
fn for_each_node<F: FnMut(f64, f64, f64, f64)>(p: &Patch, op: &DiscreteOperator, eps: f64, mut f: F) {
    let n = op.disc.n;
    let get = |i: usize, j: usize| p.get(i, j);
    let i_lo = p.i0.saturating_sub(1).max(1);
    let j_lo = p.j0.saturating_sub(1).max(1);
    let i_hi = (p.i0 + p.ni).min(n - 2);
    let j_hi = (p.j0 + p.nj).min(n - 2);
    for j in j_lo..=j_hi {
        let y = op.disc.coord(j);
        for i in i_lo..=i_hi {
            let v = p.get(i, j);
            let pv = op.apply_at(i, j, &get);
            if v == 0.0 && pv == 0.0 {
                continue;
            }
            f(op.disc.coord(i), y, v, pv * pv + eps * eps * v * v);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlemanForm {
    /// `sum w' E |v|^2 a^2`
    pub lhs: f64,
    /// `sum m^2 E |(P - i eps) v|^2 a^2`
    pub rhs1: f64,
    /// `sum E |v|^2 a^2`
    pub rhs2: f64,
    /// `lhs / (rhs1/h^2 + eps rhs2/h)`, zero when both sides vanish.
    pub implied_c: f64,
    pub h: f64,
    pub eps: f64,
}

fn check_common(wt: &WeightTables, op: &DiscreteOperator, eps: f64) -> Result<(), VerifyError> {
    if op.h != wt.h {
        return Err(VerifyError::GridMismatch(format!(
            "operator assembled at h = {}, tables at h = {}",
            op.h, wt.h
        )));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(VerifyError::EpsOutOfRange { eps, h: wt.h });
    }
    Ok(())
}

/// Carleman quadratic form with the weights centred at `center`.
pub fn shifted_quadratic_form_test(
    v: &TestFunction,
    wt: &WeightTables,
    op: &DiscreteOperator,
    eps: f64,
    center: [f64; 2],
) -> Result<CarlemanForm, VerifyError> {
    check_common(wt, op, eps)?;
    let patch = sample_patch(v, op)?;
    let h = wt.h;
    let phi_max = wt.max_phi();
    let a2 = op.disc.spacing().powi(2);
    let (mut lhs, mut rhs1, mut rhs2) = (0.0, 0.0, 0.0);
    for_each_node(&patch, op, eps, |x, y, val, pv2| {
        let r = (x - center[0]).hypot(y - center[1]);
        let e = (2.0 * (wt.phi_at(r) - phi_max) / h).exp();
        let m = eval_m(wt.spec.delta, r);
        let v2 = val * val;
        lhs += wt.barrier.wprime(r) * e * v2;
        rhs1 += m * m * e * pv2;
        rhs2 += e * v2;
    });
    let (lhs, rhs1, rhs2) = (lhs * a2, rhs1 * a2, rhs2 * a2);
    let denom = rhs1 / (h * h) + eps * rhs2 / h;
    let implied_c = if denom > 0.0 { lhs / denom } else { 0.0 };
    Ok(CarlemanForm {
        lhs,
        rhs1,
        rhs2,
        implied_c,
        h,
        eps,
    })
}

pub fn carleman_quadratic_form_test(
    v: &TestFunction,
    wt: &WeightTables,
    op: &DiscreteOperator,
    eps: f64,
) -> Result<CarlemanForm, VerifyError> {
    shifted_quadratic_form_test(v, wt, op, eps, [0.0, 0.0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinedEstimate {
    /// `e^{-C0/h} ||m^{-1} 1_{<R} v||^2`
    pub lhs_interior: f64,
    /// `||m^{-1} 1_{>=R} v||^2`
    pub lhs_exterior: f64,
    /// `||m (P - i eps) v||^2 / h^2 + eps ||v||^2 / h`
    pub rhs: f64,
    pub implied_c: f64,
    pub r_cut: f64,
    pub big_c0: f64,
}

/// Both sides of the glued estimate, with `R = R1 + |x0|` and `C0 = 2 max phi`.
pub fn combined_estimate_test(
    v: &TestFunction,
    wt: &WeightTables,
    op: &DiscreteOperator,
    x0: [f64; 2],
    eps: f64,
) -> Result<CombinedEstimate, VerifyError> {
    check_common(wt, op, eps)?;
    let h = wt.h;
    if eps > h {
        return Err(VerifyError::EpsOutOfRange { eps, h });
    }
    let shift = x0[0].hypot(x0[1]);
    let bound = shift_radius_bound(wt.spec.delta0);
    if shift > bound * (1.0 + 1e-12) {
        return Err(VerifyError::X0TooLarge { norm: shift, bound });
    }
    let r_cut = wt.spec.r1 + shift;
    let big_c0 = wt.big_c0();
    let patch = sample_patch(v, op)?;
    let a2 = op.disc.spacing().powi(2);
    let (mut inner, mut outer, mut pv_term, mut v_term) = (0.0, 0.0, 0.0, 0.0);
    for_each_node(&patch, op, eps, |x, y, val, pv2| {
        let r = x.hypot(y);
        let m2 = eval_m(wt.spec.delta, r).powi(2);
        let v2 = val * val;
        if r < r_cut {
            inner += v2 / m2;
        } else {
            outer += v2 / m2;
        }
        pv_term += m2 * pv2;
        v_term += v2;
    });
    let lhs_interior = (-big_c0 / h).exp() * inner * a2;
    let lhs_exterior = outer * a2;
    let rhs = pv_term * a2 / (h * h) + eps * v_term * a2 / h;
    let implied_c = if rhs > 0.0 {
        (lhs_interior + lhs_exterior) / rhs
    } else {
        0.0
    };
    Ok(CombinedEstimate {
        lhs_interior,
        lhs_exterior,
        rhs,
        implied_c,
        r_cut,
        big_c0,
    })
}
