use serde::{Deserialize, Serialize};

/// Where a margin attains its minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    Radius { r: f64 },
    Point { x: f64, y: f64 },
    RadiusH { r: f64, h: f64 },
    /// Empty grid.
    None,
}

impl Location {
    pub fn radius(&self) -> f64 {
        match *self {
            Location::Radius { r } | Location::RadiusH { r, .. } => r,
            Location::Point { x, y } => x.hypot(y),
            Location::None => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub name: String,
    pub min_margin: f64,
    pub argmin: Location,
    pub grid_size: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl MarginReport {
    /// Minimum over `(location, margin)` pairs. A NaN margin counts as a failure.
    pub fn from_margins<I>(name: impl Into<String>, tolerance: f64, margins: I) -> Self
    where
        I: IntoIterator<Item = (Location, f64)>,
    {
        let mut min_margin = f64::INFINITY;
        let mut argmin = Location::None;
        let mut grid_size = 0;
        for (loc, m) in margins {
            grid_size += 1;
            let m = if m.is_nan() { f64::NEG_INFINITY } else { m };
            if m < min_margin || matches!(argmin, Location::None) {
                min_margin = m;
                argmin = loc;
            }
        }
        let mut rep = Self {
            name: name.into(),
            min_margin,
            argmin,
            grid_size,
            tolerance,
            pass: false,
        };
        rep.refresh_pass();
        rep
    }

    /// A report that failed before any margin could be evaluated.
    pub fn failed(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            min_margin: f64::NEG_INFINITY,
            argmin: Location::None,
            grid_size: 0,
            tolerance,
            pass: false,
        }
    }

    pub fn refresh_pass(&mut self) {
        self.pass = self.grid_size > 0 && self.min_margin >= -self.tolerance;
    }

    /// Smaller minimum wins; names and tolerances of `self` are kept.
    pub fn merge(mut self, other: &MarginReport) -> Self {
        if other.min_margin < self.min_margin {
            self.min_margin = other.min_margin;
            self.argmin = other.argmin;
        }
        self.grid_size += other.grid_size;
        self.refresh_pass();
        self
    }
}
