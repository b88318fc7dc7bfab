use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use super::{CliError, EXIT_CONFIG, EXIT_CONSTRUCTION};
use crate::params::ProblemParams;
use crate::potential::{CatalogParams, PotentialId};
use crate::resolvent::{EpsRule, SweepMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub problem: ProblemSection,
    pub potential: CatalogParams,
    pub weights: WeightsSection,
    pub verify: VerifySection,
    pub resolvent: ResolventSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemSection {
    pub energy: f64,
    pub delta0: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsSection {
    /// `envelope` or a catalog potential id.
    pub certify: String,
    pub r1_min: f64,
    pub r1_max: f64,
    pub r1_steps: usize,
    pub margin_nodes: usize,
    /// Nodes of the table grid on `(0, r_max_factor * R1]`.
    pub table_nodes: usize,
    pub r_max_factor: f64,
    /// Tables are written at these multiples of `h1`.
    pub h_fractions: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertGrid {
    /// The table grid, with `R0` and `R1` as nodes.
    Refined,
    /// Uniform nodes with no kink inserted.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub tolerance: f64,
    /// Also certify the envelope model when `weights.certify` names a potential.
    pub include_envelope: bool,
    pub grid: CertGrid,
    pub grid_nodes: usize,
    pub e4_hs: usize,
    /// Smallest `h` of the E/4 scan as a fraction of `h1`.
    pub e4_ratio: f64,
    pub x0: [f64; 2],
    /// Plane grid for the shift envelope and the gluing constant.
    pub plane_half_width: f64,
    pub plane_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResolventSection {
    pub potential: String,
    pub half_width: f64,
    pub cells: usize,
    pub hs: Vec<f64>,
    pub eps: EpsRule,
    pub modes: Vec<SweepMode>,
    /// Exterior cut radius; `rho + 3 sigma` when absent.
    pub r_cut: Option<f64>,
    pub power_tol: f64,
    pub max_iter: usize,
    /// Budget: nodes per axis.
    pub max_n: usize,
    /// Budget: number of `h` values.
    pub max_hs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub plot_data: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            problem: ProblemSection::default(),
            potential: CatalogParams::default(),
            weights: WeightsSection::default(),
            verify: VerifySection::default(),
            resolvent: ResolventSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl Default for ProblemSection {
    fn default() -> Self {
        Self {
            energy: 1.0,
            delta0: 0.4,
            s: 0.6,
        }
    }
}

impl Default for WeightsSection {
    fn default() -> Self {
        Self {
            certify: "envelope".into(),
            r1_min: 1.0,
            r1_max: 1.0e4,
            r1_steps: 200,
            margin_nodes: 10_000,
            table_nodes: 4000,
            r_max_factor: 2.0,
            h_fractions: vec![1.0, 0.25],
        }
    }
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            include_envelope: false,
            grid: CertGrid::Refined,
            grid_nodes: 10_000,
            e4_hs: 8,
            e4_ratio: 1e-2,
            x0: [0.3, 0.0],
            plane_half_width: 8.0,
            plane_n: 201,
        }
    }
}

impl Default for ResolventSection {
    fn default() -> Self {
        Self {
            potential: "zero".into(),
            half_width: 3.2,
            cells: 64,
            hs: vec![0.4, 0.3, 0.22, 0.16, 0.12],
            eps: EpsRule::default(),
            modes: vec![SweepMode::Interior],
            r_cut: None,
            power_tol: 1e-10,
            max_iter: 5000,
            max_n: 401,
            max_hs: 32,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            plot_data: true,
        }
    }
}

/// What `weights.certify` asks for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Certify {
    Envelope,
    Instance(PotentialId),
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::new(EXIT_CONFIG, format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(EXIT_CONFIG, format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn params(&self) -> ProblemParams {
        ProblemParams::new(self.problem.energy, self.problem.delta0, self.problem.s)
    }

    pub fn certify(&self) -> Result<Certify, CliError> {
        match self.weights.certify.as_str() {
            "envelope" => Ok(Certify::Envelope),
            other => other
                .parse()
                .map(Certify::Instance)
                .map_err(|e: String| CliError::new(EXIT_CONFIG, format!("weights.certify: {e}"))),
        }
    }

    pub fn sweep_potential(&self) -> Result<PotentialId, CliError> {
        self.resolvent
            .potential
            .parse()
            .map_err(|e: String| CliError::new(EXIT_CONFIG, format!("resolvent.potential: {e}")))
    }

    pub fn r_cut(&self) -> f64 {
        self.resolvent
            .r_cut
            .unwrap_or(self.potential.rho + 3.0 * self.potential.sigma)
    }

    /// Every check that needs no computation. Problem parameters failing
    /// their conditions are construction errors; everything else is a
    /// config error.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::new(EXIT_CONFIG, msg));
        self.certify()?;
        self.sweep_potential()?;
        let w = &self.weights;
        if !(w.r1_min > 0.0 && w.r1_max >= w.r1_min && w.r1_steps >= 1) {
            return bad(format!("weights: bad R1 range [{}, {}] with {} steps", w.r1_min, w.r1_max, w.r1_steps));
        }
        if w.margin_nodes < 2 || w.table_nodes < 16 {
            return bad("weights: margin_nodes >= 2 and table_nodes >= 16 required".into());
        }
        if !(w.r_max_factor >= 2.0 && w.r_max_factor.is_finite()) {
            return bad(format!("weights.r_max_factor must be at least 2 (got {})", w.r_max_factor));
        }
        if w.h_fractions.is_empty() || w.h_fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
            return bad("weights.h_fractions must be nonempty with entries in (0, 1]".into());
        }
        let v = &self.verify;
        if !(v.tolerance >= 0.0 && v.tolerance.is_finite()) {
            return bad(format!("verify.tolerance must be >= 0 (got {})", v.tolerance));
        }
        if v.grid_nodes < 2 || v.e4_hs == 0 || !(v.e4_ratio > 0.0 && v.e4_ratio <= 1.0) {
            return bad("verify: grid_nodes >= 2, e4_hs >= 1 and e4_ratio in (0, 1] required".into());
        }
        if !(v.plane_half_width > 0.0) || v.plane_n < 2 || !v.x0.iter().all(|x| x.is_finite()) {
            return bad("verify: plane_half_width > 0, plane_n >= 2 and finite x0 required".into());
        }
        let r = &self.resolvent;
        if r.hs.is_empty() {
            return bad("no sweep points".into());
        }
        if r.hs.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return bad("resolvent.hs entries must be positive".into());
        }
        if r.hs.len() > r.max_hs {
            return bad(format!("resolvent: {} h values exceed max_hs = {}", r.hs.len(), r.max_hs));
        }
        if r.cells + 1 > r.max_n {
            return bad(format!("resolvent: {} nodes per axis exceed max_n = {}", r.cells + 1, r.max_n));
        }
        if r.cells < 4 || r.cells % 2 != 0 || !(r.half_width > 0.0) {
            return bad("resolvent: cells must be even and >= 4 with half_width > 0".into());
        }
        let a = 2.0 * r.half_width / r.cells as f64;
        let h_max = r.hs.iter().cloned().fold(0.0, f64::max);
        if a > 0.25 * h_max {
            return bad(format!("resolvent: spacing {a} exceeds h/4 = {} at the largest h", 0.25 * h_max));
        }
        if r.modes.is_empty() {
            return bad("resolvent.modes must not be empty".into());
        }
        if !(r.power_tol > 0.0) || r.max_iter == 0 {
            return bad("resolvent: power_tol > 0 and max_iter >= 1 required".into());
        }
        if r.hs.iter().any(|&h| !(r.eps.eps(h) > 0.0)) {
            return bad("resolvent.eps must be positive for every h".into());
        }
        self.params()
            .validate()
            .map_err(|e| CliError::new(EXIT_CONSTRUCTION, format!("construction: {e}")))?;
        Ok(())
    }
}

pub const CONFIG_SCHEMA: &str = r#"# RunConfig (TOML). Every key is optional; the values below are the defaults.
# Unknown keys are rejected.

seed = 0                      # base seed for power-iteration start vectors

[problem]
energy = 1.0                  # E > 0
delta0 = 0.4                  # 0 < delta0 < 1/2
s = 0.6                       # weight exponent; needs 0 < 2s-1 < delta0

[potential]                   # catalog parameters
c = 1.0                       # radial_decay envelope constant
delta0 = 0.4                  # radial_decay exponent
amplitude = 2.0               # trapping_ring height, must exceed E
rho = 1.0                     # trapping_ring radius
sigma = 0.25                  # trapping_ring width

[weights]
certify = "envelope"          # "envelope" or zero | radial_decay | trapping_ring
r1_min = 1.0                  # R1 search range (geometric scan)
r1_max = 10000.0
r1_steps = 200
margin_nodes = 10000          # uniform nodes on (0, 2 R1] for the search
table_nodes = 4000            # table grid on (0, r_max_factor R1]
r_max_factor = 2.0
h_fractions = [1.0, 0.25]     # tables at these multiples of h1

[verify]
tolerance = 1e-12             # report passes iff min_margin >= -tolerance
include_envelope = false      # add envelope reports when certify names a potential
grid = "refined"              # "refined" (table grid) or "uniform" (no kink nodes)
grid_nodes = 10000            # nodes of the uniform certification grid
e4_hs = 8                     # log-spaced h in [e4_ratio h1, h1]
e4_ratio = 0.01
x0 = [0.3, 0.0]               # shifted origin for the gluing step
plane_half_width = 8.0        # plane grid for shift envelope and gluing K
plane_n = 201

[resolvent]
potential = "zero"            # zero | radial_decay | trapping_ring
half_width = 3.2              # box [-L, L]^2
cells = 64                    # cells per axis (even); nodes = cells + 1
hs = [0.4, 0.3, 0.22, 0.16, 0.12]
eps = { rule = "constant", eps = 1e-6 }   # or { rule = "power", coef = 0.1, power = 2.0 }
modes = ["interior"]          # interior | exterior
# r_cut = 1.75                # exterior cut radius, default rho + 3 sigma
power_tol = 1e-10
max_iter = 5000
max_n = 401                   # budget: nodes per axis
max_hs = 32                   # budget: number of h values

[output]
dir = "out"
plot_data = true
"#;
