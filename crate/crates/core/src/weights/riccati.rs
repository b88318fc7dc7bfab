//! Backward integration of `u' = (u^2 - psi)/h` from `u(R1) = 0`.
//!
//! Integrated in the direction of decreasing `r` the flow relaxes onto the
//! branch `u ~ sqrt(psi)` at rate `2 sqrt(psi)/h`, so classical RK4 is
//! stable once substeps resolve the `O(h)` layer. Each grid interval is
//! refined by step doubling until the endpoint change is below `step_tol`
//! and the cubic-Hermite defect of every substep is below `residual_tol`.

use super::grid::RadialGrid;
use super::psi::PsiSpec;
use super::WeightsError;

/// Source term of the Riccati equation.
pub trait RiccatiSource {
    fn psi(&self, r: f64) -> f64;
    /// Right end of the support; the solution vanishes beyond it.
    fn support_end(&self) -> f64;
    fn sup_psi(&self) -> f64;
}

impl RiccatiSource for PsiSpec {
    fn psi(&self, r: f64) -> f64 {
        PsiSpec::psi(self, r)
    }
    fn support_end(&self) -> f64 {
        self.r1
    }
    fn sup_psi(&self) -> f64 {
        PsiSpec::sup_psi(self)
    }
}

/// `psi = k` on `[0, end]`, zero beyond.
#[derive(Debug, Clone, Copy)]
pub struct ConstantSource {
    pub k: f64,
    pub end: f64,
}

impl RiccatiSource for ConstantSource {
    fn psi(&self, r: f64) -> f64 {
        if r <= self.end {
            self.k
        } else {
            0.0
        }
    }
    fn support_end(&self) -> f64 {
        self.end
    }
    fn sup_psi(&self) -> f64 {
        self.k.max(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RiccatiOptions {
    pub step_tol: f64,
    pub residual_tol: f64,
    /// Cap on substeps per grid interval.
    pub max_substeps: usize,
}

impl Default for RiccatiOptions {
    fn default() -> Self {
        Self {
            step_tol: 1e-13,
            residual_tol: 1e-7,
            max_substeps: 1 << 20,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    /// `phi'` at the grid nodes.
    pub u: Vec<f64>,
    /// `phi''` from the equation, `(u^2 - psi)/h`.
    pub uprime: Vec<f64>,
    /// `phi` with `phi(0) = 0`.
    pub phi: Vec<f64>,
    /// `sup |u^2 - h u' - psi|` over substep midpoints, `u'` taken from the
    /// Hermite interpolant of the integrator's own steps.
    pub residual: f64,
    pub substeps: usize,
}

impl RiccatiSolution {
    pub fn max_phi(&self) -> f64 {
        *self.phi.last().unwrap_or(&0.0)
    }
}

struct Segment {
    u_end: f64,
    integral: f64,
    defect: f64,
}

/// RK4 from `r_hi` down to `r_lo` in `m` equal substeps. Accumulates the
/// trapezoid integral of `u` and the worst Hermite-midpoint defect.
fn integrate_down<S: RiccatiSource>(src: &S, h: f64, r_hi: f64, r_lo: f64, u_hi: f64, m: usize) -> Segment {
    let f = |r: f64, u: f64| (u * u - src.psi(r)) / h;
    let ds = (r_lo - r_hi) / m as f64;
    let mut r = r_hi;
    let mut u = u_hi;
    let mut fu = f(r, u);
    let mut integral = 0.0;
    let mut defect: f64 = 0.0;
    for i in 0..m {
        let r_next = if i + 1 == m { r_lo } else { r_hi + ds * (i + 1) as f64 };
        let step = r_next - r;
        let half = 0.5 * step;
        let k1 = fu;
        let k2 = f(r + half, u + half * k1);
        let k3 = f(r + half, u + half * k2);
        let k4 = f(r_next, u + step * k3);
        let u_next = u + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let f_next = f(r_next, u_next);
        // cubic Hermite through (r,u,fu), (r_next,u_next,f_next) at the midpoint
        let um = 0.5 * (u + u_next) + step * (fu - f_next) / 8.0;
        let dum = 1.5 * (u_next - u) / step - 0.25 * (fu + f_next);
        let rm = r + half;
        defect = defect.max((um * um - h * dum - src.psi(rm)).abs());
        integral += 0.5 * (u + u_next) * (-step);
        r = r_next;
        u = u_next;
        fu = f_next;
    }
    Segment {
        u_end: u,
        integral,
        defect,
    }
}

/// Solves the Riccati equation on `grid`, integrating backward from the
/// support end (which must be a grid node) down to `r = 0`.
pub fn solve_phi_riccati<S: RiccatiSource>(
    src: &S,
    h: f64,
    grid: &RadialGrid,
    opts: &RiccatiOptions,
) -> Result<RiccatiSolution, WeightsError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(WeightsError::NonPositiveH(h));
    }
    let end = src.support_end();
    let nodes = grid.nodes();
    let n = nodes.len();
    let i_end = grid.node_index(end).ok_or_else(|| {
        WeightsError::Grid(format!("support end {end} is not a grid node"))
    })?;

    let mut u = vec![0.0; n];
    // backward cumulative integral from `end`
    let mut tail = vec![0.0; n];
    let mut residual: f64 = 0.0;
    let mut substeps = 0usize;
    let mut m_prev = 1usize;

    let refine = |r_hi: f64, r_lo: f64, u_hi: f64, m_prev: usize| -> Result<(Segment, usize), WeightsError> {
        let len = r_hi - r_lo;
        let mut m = ((len / (0.1 * h)).ceil() as usize).max(m_prev / 2).max(1);
        let mut coarse = integrate_down(src, h, r_hi, r_lo, u_hi, m);
        loop {
            let fine = integrate_down(src, h, r_hi, r_lo, u_hi, 2 * m);
            m *= 2;
            let change = (fine.u_end - coarse.u_end).abs();
            if change <= opts.step_tol * (1.0 + fine.u_end.abs()) && fine.defect <= opts.residual_tol {
                return Ok((fine, m));
            }
            if 2 * m > opts.max_substeps {
                return Err(WeightsError::ResidualAboveTolerance {
                    residual: fine.defect.max(change),
                    tolerance: opts.residual_tol,
                    r: r_lo,
                });
            }
            coarse = fine;
        }
    };

    for i in (0..i_end).rev() {
        let (seg, m) = refine(nodes[i + 1], nodes[i], u[i + 1], m_prev)?;
        m_prev = m;
        substeps += m;
        residual = residual.max(seg.defect);
        u[i] = seg.u_end;
        tail[i] = tail[i + 1] + seg.integral;
    }
    // [0, r_min] closes phi(0) = 0
    let (seg0, m0) = refine(nodes[0], 0.0, u[0], m_prev)?;
    substeps += m0;
    residual = residual.max(seg0.defect);
    let total = tail[0] + seg0.integral;

    if let Some(i) = u.iter().position(|&x| x < -1e-12) {
        return Err(WeightsError::NonnegativityViolated { r: nodes[i], u: u[i] });
    }

    let phi: Vec<f64> = (0..n)
        .map(|i| if i >= i_end { total } else { total - tail[i] })
        .collect();
    let uprime: Vec<f64> = (0..n)
        .map(|i| {
            if i >= i_end {
                0.0
            } else {
                (u[i] * u[i] - src.psi(nodes[i])) / h
            }
        })
        .collect();
    Ok(RiccatiSolution {
        u,
        uprime,
        phi,
        residual,
        substeps,
    })
}
