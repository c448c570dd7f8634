//! Run configuration and named presets.

use std::path::PathBuf;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::ConstraintForm;
use crate::geometry::{SolutionKind, SurfaceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Lagrange multiplier, directional convection.
    LmmDir,
    /// Lagrange multiplier, covariant convection.
    LmmCov,
    /// Normal penalty with the improved normal.
    Pm,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::LmmDir => "lmm_dir",
            Scheme::LmmCov => "lmm_cov",
            Scheme::Pm => "pm",
        }
    }

    pub fn has_multiplier(self) -> bool {
        self != Scheme::Pm
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    /// Modified Ritz–Stokes projection of the initial velocity.
    #[default]
    RitzStokes,
    /// Standard Ritz–Stokes projection, using the initial pressure and multiplier.
    RitzB,
    /// Nodal interpolant.
    Interpolant,
}

/// Penalty parameter `tau = scale * h^(-power)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauLaw {
    pub scale: f64,
    pub power: f64,
}

impl Default for TauLaw {
    fn default() -> Self {
        Self { scale: 0.5, power: 2.0 }
    }
}

impl TauLaw {
    pub fn eval(&self, h: f64) -> f64 {
        self.scale * h.powf(-self.power)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    /// Relative residual accepted after iterative refinement.
    pub residual_tol: f64,
    pub refinement_steps: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { residual_tol: 1e-10, refinement_steps: 3 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    pub dir: Option<PathBuf>,
    /// Write a VTU snapshot every this many steps (0 disables).
    #[serde(default)]
    pub vtu_every: usize,
}

fn default_rho() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub benchmark: SurfaceKind,
    #[serde(default)]
    pub solution: SolutionKind,
    pub scheme: Scheme,
    pub k_u: usize,
    pub k_pr: usize,
    pub k_lambda: usize,
    pub k_g: usize,
    pub level: usize,
    pub dt0: f64,
    /// Explicit step size overriding `dt0 * 4^-level`.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Final time; defaults to the benchmark's.
    #[serde(default, rename = "T")]
    pub t_end: Option<f64>,
    pub mu: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default)]
    pub tau: TauLaw,
    #[serde(default)]
    pub constraint_form: ConstraintForm,
    #[serde(default)]
    pub initial_condition: InitialCondition,
    /// Quadrature degree; defaults to `2 k_u + k_g`.
    #[serde(default)]
    pub quadrature_degree: Option<usize>,
    /// Report multiplier errors when an exact multiplier is available.
    #[serde(default = "default_true")]
    pub multiplier_errors: bool,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub output: OutputSettings,
    #[serde(default)]
    pub threads: Option<usize>,
}

fn default_true() -> bool {
    true
}

pub const PRESETS: [&str; 5] = ["paper-case1", "paper-case2", "paper-case1-affine", "paper-osc", "paper-osc-pm"];

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self> {
        let base = RunConfig {
            benchmark: SurfaceKind::MovingSphere,
            solution: SolutionKind::Benchmark,
            scheme: Scheme::LmmDir,
            k_u: 2,
            k_pr: 1,
            k_lambda: 2,
            k_g: 2,
            level: 1,
            dt0: 0.5,
            dt: None,
            t_end: None,
            mu: 0.5,
            rho: 1.0,
            tau: TauLaw::default(),
            constraint_form: ConstraintForm::Strong,
            initial_condition: InitialCondition::RitzStokes,
            quadrature_degree: None,
            multiplier_errors: true,
            solver: SolverSettings::default(),
            output: OutputSettings::default(),
            threads: None,
        };
        let cfg = match name {
            "paper-case1" => base,
            "paper-case1-affine" => RunConfig { k_g: 1, ..base },
            "paper-case2" => RunConfig { scheme: Scheme::LmmCov, k_lambda: 1, k_g: 3, ..base },
            "paper-osc" => RunConfig {
                benchmark: SurfaceKind::OscillatingSphere,
                scheme: Scheme::LmmCov,
                k_lambda: 1,
                k_g: 3,
                mu: 2e-2,
                ..base
            },
            "paper-osc-pm" => RunConfig {
                benchmark: SurfaceKind::OscillatingSphere,
                scheme: Scheme::Pm,
                k_lambda: 1,
                k_g: 2,
                mu: 2e-2,
                ..base
            },
            _ => return Err(Error::Config(format!("unknown preset '{name}', expected one of {}", PRESETS.join(", ")))),
        };
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses by extension: `.json` as JSON, anything else as TOML.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            _ => Self::from_toml(&text),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_u < 2 {
            return Err(Error::Config(format!("k_u = {} must be at least 2", self.k_u)));
        }
        if self.k_pr + 1 != self.k_u {
            return Err(Error::Config(format!("k_pr = {} must equal k_u - 1 = {}", self.k_pr, self.k_u - 1)));
        }
        if self.k_lambda != self.k_u && self.k_lambda + 1 != self.k_u {
            return Err(Error::Config(format!("k_lambda = {} must be k_u or k_u - 1", self.k_lambda)));
        }
        if !(1..=3).contains(&self.k_g) {
            return Err(Error::Config(format!("k_g = {} must be 1, 2 or 3", self.k_g)));
        }
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} = {v} must be positive")))
            }
        };
        positive("dt0", self.dt0)?;
        positive("mu", self.mu)?;
        positive("rho", self.rho)?;
        if let Some(dt) = self.dt {
            positive("dt", dt)?;
        }
        if let Some(t) = self.t_end {
            positive("T", t)?;
            if t > self.final_time_limit() + 1e-12 {
                return Err(Error::Config(format!("T = {t} exceeds the benchmark horizon {}", self.final_time_limit())));
            }
        }
        if !(self.tau.scale >= 0.0 && self.tau.scale.is_finite()) {
            return Err(Error::Config("tau.scale must be non-negative".into()));
        }
        Ok(())
    }

    fn final_time_limit(&self) -> f64 {
        crate::geometry::AnalyticSurface::new(self.benchmark).final_time()
    }

    /// Pairing advice for the scheme and multiplier degree.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.scheme == Scheme::LmmDir && self.k_lambda + 1 == self.k_u {
            w.push("lmm_dir with k_lambda = k_u - 1 has no velocity error theory".into());
        }
        if self.scheme == Scheme::LmmCov && self.k_lambda + 1 == self.k_u && self.k_g <= self.k_u {
            w.push("lmm_cov with k_lambda = k_u - 1 is analysed for super-parametric k_g = k_u + 1".into());
        }
        if self.scheme == Scheme::Pm && self.constraint_form == ConstraintForm::Ibp {
            w.push("constraint_form = ibp only changes the pressure block of pm".into());
        }
        if self.initial_condition == InitialCondition::Interpolant {
            w.push("interpolated initial data is not discretely divergence free; stability needs an inverse CFL condition".into());
        }
        w
    }

    pub fn log_warnings(&self) {
        for m in self.warnings() {
            warn!("{m}");
        }
    }

    pub fn final_time(&self) -> f64 {
        self.t_end.unwrap_or_else(|| self.final_time_limit())
    }

    pub fn time_step(&self) -> f64 {
        self.dt.unwrap_or(self.dt0 * 0.25f64.powi(self.level as i32))
    }

    /// Number of steps, rounding `T / dt` to the nearest integer.
    pub fn n_steps(&self) -> usize {
        let n = (self.final_time() / self.time_step()).round();
        n.max(1.0) as usize
    }

    pub fn quad_degree(&self) -> usize {
        self.quadrature_degree.unwrap_or(2 * self.k_u + self.k_g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for p in PRESETS {
            RunConfig::preset(p).unwrap().validate().unwrap();
        }
        let c = RunConfig::preset("paper-case2").unwrap();
        assert_eq!((c.k_lambda, c.k_g, c.scheme), (1, 3, Scheme::LmmCov));
        assert!(RunConfig::preset("nope").unwrap_err().is_config());
    }

    #[test]
    fn time_step_law() {
        let c = RunConfig { level: 3, ..RunConfig::preset("paper-case1").unwrap() };
        assert_eq!(c.time_step(), 0.5 / 64.0);
        assert_eq!(c.n_steps(), 256);
        assert_eq!(c.final_time(), 2.0);
        assert_eq!(TauLaw::default().eval(0.5), 2.0);
    }

    #[test]
    fn toml_roundtrip_and_unknown_keys() {
        let c = RunConfig::preset("paper-osc").unwrap();
        let s = toml::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_toml(&s).unwrap(), c);
        let j = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(&j).unwrap(), c);
        let bad = format!("{s}\nbogus = 1\n");
        assert!(RunConfig::from_toml(&bad).unwrap_err().is_config());
        let bad = s.replace("k_pr = 1", "k_pr = 2");
        assert!(RunConfig::from_toml(&bad).unwrap_err().is_config());
    }

    #[test]
    fn minimal_toml_uses_defaults() {
        let c = RunConfig::from_toml(
            "benchmark = \"moving_sphere\"\nscheme = \"lmm_dir\"\nk_u = 2\nk_pr = 1\nk_lambda = 2\nk_g = 2\nlevel = 0\ndt0 = 0.5\nmu = 0.5\nT = 0.5\n",
        )
        .unwrap();
        assert_eq!(c.rho, 1.0);
        assert_eq!(c.n_steps(), 1);
        assert_eq!(c.quad_degree(), 6);
    }
}
