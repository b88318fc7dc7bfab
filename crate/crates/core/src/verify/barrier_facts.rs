use super::report::{Location, MarginReport};
use super::DEFAULT_TOLERANCE;
use crate::weights::{eval_m, Barrier, PsiSpec, RadialGrid};

/// Four pointwise facts about `w` used in the Carleman argument:
/// `w' > 0`, `2w/r - w' >= 0`, `w^2/w' + w^2 <= (1+delta) w/w'` and
/// `w/w' <= max(2/delta, R0/2) m^2`.
pub fn verify_barrier_facts(spec: &PsiSpec, grid: &RadialGrid) -> Vec<MarginReport> {
    let b = Barrier::new(spec);
    let d = spec.delta;
    let cap = (2.0 / d).max(0.5 * spec.r0);
    let nodes = grid.nodes();
    let report = |name: &str, tol: f64, f: &dyn Fn(f64) -> f64| {
        MarginReport::from_margins(name, tol, nodes.iter().map(|&r| (Location::Radius { r }, f(r))))
    };
    let mut wprime_positive = report("barrier_wprime_positive", 0.0, &|r| b.wprime(r));
    // strict positivity: a zero margin is a failure here
    wprime_positive.pass = wprime_positive.grid_size > 0 && wprime_positive.min_margin > 0.0;
    vec![
        wprime_positive,
        // as (2w - r w')/r, which is exactly zero on the quadratic branch
        report("barrier_two_w_over_r", DEFAULT_TOLERANCE, &|r| (2.0 * b.w(r) - r * b.wprime(r)) / r),
        report("barrier_quadratic_ratio", DEFAULT_TOLERANCE, &|r| {
            let w = b.w(r);
            let q = b.w_over_wprime(r);
            (1.0 + d) * q - (w * q + w * w)
        }),
        report("barrier_ratio_vs_m2", DEFAULT_TOLERANCE, &|r| {
            let m = eval_m(d, r);
            cap * m * m - b.w_over_wprime(r)
        }),
    ]
}
