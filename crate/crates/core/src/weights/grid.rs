use super::psi::PsiSpec;
use super::WeightsError;

/// Strictly increasing radial nodes on `[r_min, r_max]`, `r_min > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

/// Two nodes closer than this (relative) are merged when kinks are inserted.
const MERGE_RTOL: f64 = 1e-12;

impl RadialGrid {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, WeightsError> {
        if nodes.len() < 2 {
            return Err(WeightsError::Grid("need at least two nodes".into()));
        }
        if nodes.iter().any(|r| !r.is_finite()) {
            return Err(WeightsError::Grid("non-finite node".into()));
        }
        if nodes[0] <= 0.0 {
            return Err(WeightsError::Grid(format!(
                "first node must be positive (got {})",
                nodes[0]
            )));
        }
        if let Some(i) = nodes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(WeightsError::Grid(format!(
                "nodes not strictly increasing at index {i}"
            )));
        }
        Ok(Self { nodes })
    }

    /// `n` uniform nodes on `[r_min, r_max]` with every kink inside the range
    /// inserted as an exact node.
    pub fn uniform(r_min: f64, r_max: f64, n: usize, kinks: &[f64]) -> Result<Self, WeightsError> {
        if n < 2 || r_max <= r_min {
            return Err(WeightsError::Grid(format!(
                "bad uniform grid [{r_min}, {r_max}] with {n} nodes"
            )));
        }
        let step = (r_max - r_min) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| r_min + step * i as f64).collect();
        nodes[n - 1] = r_max;
        Self::from_nodes(insert_kinks(nodes, kinks))
    }

    /// Grid adapted to a solved [`PsiSpec`]: geometric refinement towards
    /// `r = 0`, clustering on both sides of `R0` and `R1`, and a stretched
    /// tail out to `r_max`. `R0` and `R1` are exact nodes.
    pub fn refined(spec: &PsiSpec, n: usize, r_max: f64) -> Result<Self, WeightsError> {
        let (r0, r1) = (spec.r0, spec.r1);
        if r_max < 2.0 * r1 {
            return Err(WeightsError::Grid(format!(
                "r_max = {r_max} is below 2 R1 = {}",
                2.0 * r1
            )));
        }
        if n < 16 {
            return Err(WeightsError::Grid(format!("refined grid needs >= 16 nodes (got {n})")));
        }
        let r_min = r0 * 1e-3;
        let na = n / 4;
        let nb = n / 2;
        let nc = n - na - nb;

        let mut nodes = Vec::with_capacity(n + 2);
        // [r_min, R0): log-spaced
        let ratio = r0 / r_min;
        for i in 0..na {
            nodes.push(r_min * ratio.powf(i as f64 / na as f64));
        }
        // [R0, R1): tanh clustering at both ends
        let beta = 3.0_f64;
        for i in 0..nb {
            let t = i as f64 / nb as f64;
            let s = 0.5 * (1.0 + (beta * (2.0 * t - 1.0)).tanh() / beta.tanh());
            nodes.push(r0 + (r1 - r0) * s);
        }
        // [R1, r_max]: exponential stretching away from R1
        let gamma = 4.0_f64;
        for i in 0..nc {
            let t = i as f64 / (nc - 1) as f64;
            nodes.push(r1 + (r_max - r1) * (gamma * t).exp_m1() / gamma.exp_m1());
        }
        nodes[na] = r0;
        nodes[na + nb] = r1;
        *nodes.last_mut().unwrap() = r_max;
        Self::from_nodes(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Index of the node exactly equal to `r`.
    pub fn node_index(&self, r: f64) -> Option<usize> {
        self.nodes.binary_search_by(|x| x.total_cmp(&r)).ok()
    }

    /// Index `i` with `nodes[i] <= r < nodes[i+1]`, clamped to the grid.
    pub fn interval(&self, r: f64) -> usize {
        let n = self.nodes.len();
        match self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Checks the invariants a weight table needs: `R0`, `R1` exact nodes and
    /// `r_max >= 2 R1`.
    pub fn check_for_spec(&self, spec: &PsiSpec) -> Result<(), WeightsError> {
        if self.r_max() < 2.0 * spec.r1 {
            return Err(WeightsError::Grid(format!(
                "r_max = {} is below 2 R1 = {}",
                self.r_max(),
                2.0 * spec.r1
            )));
        }
        for (name, r) in [("R0", spec.r0), ("R1", spec.r1)] {
            if self.node_index(r).is_none() {
                return Err(WeightsError::Grid(format!("{name} = {r} is not a grid node")));
            }
        }
        Ok(())
    }
}

fn insert_kinks(mut nodes: Vec<f64>, kinks: &[f64]) -> Vec<f64> {
    let (lo, hi) = (nodes[0], nodes[nodes.len() - 1]);
    for &k in kinks {
        if !(k > lo && k < hi) {
            continue;
        }
        let i = nodes.partition_point(|&x| x < k);
        let near = |x: f64| (x - k).abs() <= MERGE_RTOL * k.abs().max(1.0);
        if near(nodes[i]) {
            nodes[i] = k;
        } else if i > 0 && near(nodes[i - 1]) {
            nodes[i - 1] = k;
        } else {
            nodes.insert(i, k);
        }
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ProblemParams;

    #[test]
    fn uniform_grid_inserts_kinks_exactly() {
        let g = RadialGrid::uniform(0.1, 2.0, 20, &[0.123, 1.5, 5.0]).unwrap();
        assert!(g.node_index(0.123).is_some());
        assert!(g.node_index(1.5).is_some());
        assert_eq!(g.r_max(), 2.0);
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(RadialGrid::from_nodes(vec![0.0, 1.0]).is_err());
        assert!(RadialGrid::from_nodes(vec![0.5, 0.5, 1.0]).is_err());
        assert!(RadialGrid::from_nodes(vec![1.0]).is_err());
    }

    #[test]
    fn refined_grid_satisfies_spec_invariants() {
        let p = ProblemParams::new(1.0, 0.4, 0.6);
        let spec = PsiSpec::from_outer_radius(&p, 3.0).unwrap();
        let g = RadialGrid::refined(&spec, 400, 2.0 * spec.r1).unwrap();
        g.check_for_spec(&spec).unwrap();
        assert!(g.r_min() > 0.0);
        assert!(RadialGrid::refined(&spec, 400, spec.r1).is_err());
    }

    #[test]
    fn interval_lookup_is_clamped() {
        let g = RadialGrid::uniform(1.0, 2.0, 3, &[]).unwrap();
        assert_eq!(g.interval(0.5), 0);
        assert_eq!(g.interval(1.0), 0);
        assert_eq!(g.interval(1.6), 1);
        assert_eq!(g.interval(2.0), 1);
        assert_eq!(g.interval(9.0), 1);
    }
}
