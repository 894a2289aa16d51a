use std::path::Path;

use cfsgauge_core::dirac_box::SpacetimePoint;
use cfsgauge_core::{BoxError, DiracBoxConfig, Tolerances};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("config error in `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Charts,
    Gauge,
    Spectral,
    Perturb,
    DimCount,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Charts => "charts",
            Task::Gauge => "gauge",
            Task::Spectral => "spectral",
            Task::Perturb => "perturb",
            Task::DimCount => "dim-count",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    #[serde(rename = "L")]
    pub l: f64,
    pub eps: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub nt: usize,
    pub nx: usize,
    pub t_range: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Points {
    /// `[t, x1, x2, x3]` per point.
    Explicit(Vec<[f64; 4]>),
    Grid(GridSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "box")]
    pub dirac_box: BoxSpec,
    pub points: Points,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub tasks: Vec<Task>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("path", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ConfigError::new("json", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let b = &self.dirac_box;
        if let Err(e) = DiracBoxConfig::new(b.l, b.eps, b.m) {
            let field = match e {
                BoxError::InvalidConfig { field, .. } => field,
                _ => "",
            };
            return Err(ConfigError::new(format!("box.{field}"), e.to_string()));
        }
        match &self.points {
            Points::Explicit(list) => {
                if list.is_empty() {
                    return Err(ConfigError::new("points.explicit", "no points given"));
                }
                if list.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(ConfigError::new("points.explicit", "non-finite coordinate"));
                }
            }
            Points::Grid(g) => {
                if g.nt == 0 || g.nx == 0 {
                    return Err(ConfigError::new("points.grid", "nt and nx must be positive"));
                }
                if !g.t_range.iter().all(|t| t.is_finite()) || g.t_range[0] > g.t_range[1] {
                    return Err(ConfigError::new("points.grid.t_range", "expected finite [t0, t1] with t0 <= t1"));
                }
            }
        }
        if let Some(field) = self.tolerances.first_invalid() {
            return Err(ConfigError::new(format!("tolerances.{field}"), "must be positive and finite"));
        }
        if self.tasks.is_empty() {
            return Err(ConfigError::new("tasks", "no tasks requested"));
        }
        Ok(())
    }

    pub fn box_config(&self) -> DiracBoxConfig {
        let b = &self.dirac_box;
        DiracBoxConfig::new(b.l, b.eps, b.m).expect("validated")
    }

    /// Sample points, reduced into the box. The grid places `nx` equally
    /// spaced values per axis in `[−L, L)` and `nt` times across `t_range`.
    pub fn sample_points(&self) -> Vec<SpacetimePoint> {
        let l = self.dirac_box.l;
        match &self.points {
            Points::Explicit(list) => list.iter().map(|p| SpacetimePoint::new(p[0], [p[1], p[2], p[3]], l)).collect(),
            Points::Grid(g) => {
                let times: Vec<f64> = if g.nt == 1 {
                    vec![g.t_range[0]]
                } else {
                    (0..g.nt).map(|i| g.t_range[0] + (g.t_range[1] - g.t_range[0]) * i as f64 / (g.nt - 1) as f64).collect()
                };
                let axis: Vec<f64> = (0..g.nx).map(|i| -l + 2.0 * l * i as f64 / g.nx as f64).collect();
                let mut out = Vec::with_capacity(g.nt * g.nx.pow(3));
                for &t in &times {
                    for &a in &axis {
                        for &b in &axis {
                            for &c in &axis {
                                out.push(SpacetimePoint::new(t, [a, b, c], l));
                            }
                        }
                    }
                }
                out
            }
        }
    }
}
