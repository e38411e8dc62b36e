//! Run configuration: one TOML document with blocks for the nonlinearity,
//! grid, time integration, initial data, certifier constants and output.
//!
//! Every module precondition that can be checked statically is checked at
//! load time (CFL bound, support inside the grid, light-cone safety, …) and
//! violations name the offending key path.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::certifier::{CertifierConstants, CertifierMargins};
use crate::error::Error;
use crate::field::{InitialData, Profile, RadialGrid};
use crate::nonlinearity::NonlinearitySpec;
use crate::solver::{SolveConfig, DEFAULT_OVERFLOW_THRESHOLD};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridBlock {
    pub r_max: f64,
    pub n: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        GridBlock { r_max: 8.0, n: 512 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveBlock {
    pub t_final: f64,
    pub cfl: f64,
    pub record_stride: usize,
    pub overflow_threshold: f64,
}

impl Default for SolveBlock {
    fn default() -> Self {
        SolveBlock {
            t_final: 4.0,
            cfl: 0.5,
            record_stride: 4,
            overflow_threshold: DEFAULT_OVERFLOW_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertifierBlock {
    pub eps0: f64,
    pub c0: f64,
    pub kappa: f64,
    pub kappa_b: f64,
    pub cbound_margin: f64,
    pub kappa_a: f64,
}

impl Default for CertifierBlock {
    fn default() -> Self {
        let k = CertifierConstants::default();
        let m = CertifierMargins::default();
        CertifierBlock {
            eps0: k.eps0,
            c0: k.c0,
            kappa: k.kappa,
            kappa_b: m.kappa_b,
            cbound_margin: m.cbound_margin,
            kappa_a: m.kappa_a,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputBlock {
    pub directory: PathBuf,
    /// Artifact encodings to emit; only "csv" is currently defined.
    pub formats: Vec<String>,
    /// Worker threads for parameter sweeps (0 = one per value).
    pub sweep_workers: usize,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            directory: PathBuf::from("out"),
            formats: vec!["csv".to_string()],
            sweep_workers: 0,
        }
    }
}

fn default_profile() -> Profile {
    Profile::GaussianBump {
        amplitude: 0.5,
        width: 1.2,
        center: 0.0,
        support_radius: 3.0,
        velocity_amplitude: 0.0,
    }
}

/// The whole run configuration. All blocks have defaults, so an empty
/// document is a valid (small defocusing bump) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub nonlinearity: NonlinearitySpec,
    pub grid: GridBlock,
    pub solve: SolveBlock,
    pub data: Profile,
    pub certifier: CertifierBlock,
    pub output: OutputBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            nonlinearity: NonlinearitySpec::defocusing_quintic_log(),
            grid: GridBlock::default(),
            solve: SolveBlock::default(),
            data: default_profile(),
            certifier: CertifierBlock::default(),
            output: OutputBlock::default(),
        }
    }
}

impl RunConfig {
    /// Parse without validating — callers that apply overrides afterwards
    /// (the CLI) validate the final result instead.
    pub fn parse_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            path: "<toml>".into(),
            msg: e.to_string(),
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config = Self::parse_toml(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Check every load-time precondition, naming the key path on failure.
    pub fn validate(&self) -> Result<()> {
        self.nonlinearity.validate()?;
        let grid = self.radial_grid()?;
        self.solve_config().validate()?;
        self.certifier_constants().validate()?;
        if !(self.certifier.kappa_b > 0.0) {
            return Err(Error::config("certifier.kappa_b", "must be positive"));
        }
        if !(self.certifier.cbound_margin > 0.0) {
            return Err(Error::config("certifier.cbound_margin", "must be positive"));
        }
        if !(self.certifier.kappa_a > 0.0) {
            return Err(Error::config("certifier.kappa_a", "must be positive"));
        }
        for format in &self.output.formats {
            if format != "csv" {
                return Err(Error::config(
                    "output.formats",
                    format!("unknown format {format:?} (only \"csv\" is defined)"),
                ));
            }
        }
        let data = self.initial_data()?;
        if !data.dirichlet_exact {
            if data.support_radius >= grid.r_max() {
                return Err(Error::config(
                    "data.support_radius",
                    format!("must be below grid.r_max = {}", grid.r_max()),
                ));
            }
            if data.support_radius + self.solve.t_final > grid.r_max() + 1e-12 {
                return Err(Error::ConeViolation(format!(
                    "solve.t_final: support {} + t_final {} exceeds r_max {}",
                    data.support_radius,
                    self.solve.t_final,
                    grid.r_max()
                )));
            }
        }
        Ok(())
    }

    pub fn radial_grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.grid.r_max, self.grid.n)
    }

    pub fn initial_data(&self) -> Result<InitialData> {
        self.data.instantiate(self.grid.r_max)
    }

    pub fn solve_config(&self) -> SolveConfig {
        let dirichlet_exact = matches!(self.data, Profile::StandingWave { .. });
        SolveConfig {
            t_final: self.solve.t_final,
            cfl: self.solve.cfl,
            record_stride: self.solve.record_stride,
            overflow_threshold: self.solve.overflow_threshold,
            enforce_cone: !dirichlet_exact,
        }
    }

    pub fn certifier_constants(&self) -> CertifierConstants {
        CertifierConstants {
            eps0: self.certifier.eps0,
            c0: self.certifier.c0,
            kappa: self.certifier.kappa,
        }
    }

    pub fn certifier_margins(&self) -> CertifierMargins {
        CertifierMargins {
            kappa_b: self.certifier.kappa_b,
            cbound_margin: self.certifier.cbound_margin,
            kappa_a: self.certifier.kappa_a,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default_run() {
        let config = RunConfig::from_toml_str("").unwrap();
        assert_eq!(config, RunConfig::default());
        assert!(config.validate().is_ok());
    }

    #[test]
    fn full_document_round_trips() {
        let text = r#"
[nonlinearity]
p = 5
c = 1
sigma = 1
enabled = true

[grid]
r_max = 10.0
n = 1024

[solve]
t_final = 5.0
cfl = 0.25
record_stride = 8
overflow_threshold = 1e28

[data]
profile = "gaussian-bump"
amplitude = 0.8
width = 1.5
support_radius = 4.0

[certifier]
eps0 = 0.02
c0 = 1.5
kappa = 80.0
kappa_b = 5.0
cbound_margin = 6.0
kappa_a = 1.5

[output]
directory = "runs/demo"
formats = ["csv"]
"#;
        let config = RunConfig::from_toml_str(text).unwrap();
        assert_eq!(config.grid.n, 1024);
        assert_eq!(config.solve.cfl, 0.25);
        assert_eq!(config.certifier_constants().eps0, 0.02);
        match &config.data {
            Profile::GaussianBump { amplitude, .. } => assert_eq!(*amplitude, 0.8),
            other => panic!("wrong profile {other:?}"),
        }
        // Serialize → parse → identical.
        let text2 = toml::to_string(&config).unwrap();
        let config2 = RunConfig::from_toml_str(&text2).unwrap();
        assert_eq!(config, config2);
    }

    #[test]
    fn violations_name_the_key_path() {
        let bad_cfl = RunConfig {
            solve: SolveBlock {
                cfl: 1.5,
                ..Default::default()
            },
            ..Default::default()
        };
        match bad_cfl.validate() {
            Err(Error::Config { path, .. }) => assert_eq!(path, "solve.cfl"),
            other => panic!("expected config error, got {other:?}"),
        }

        let bad_cone = RunConfig {
            solve: SolveBlock {
                t_final: 7.0,
                ..Default::default()
            },
            ..Default::default()
        };
        match bad_cone.validate() {
            Err(Error::ConeViolation(msg)) => assert!(msg.contains("solve.t_final")),
            other => panic!("expected cone violation, got {other:?}"),
        }

        let bad_p = RunConfig {
            nonlinearity: NonlinearitySpec {
                p: 4,
                c: 1,
                sigma: 1,
                enabled: true,
            },
            ..Default::default()
        };
        match bad_p.validate() {
            Err(Error::Config { path, .. }) => assert_eq!(path, "nonlinearity.p"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn standing_wave_is_cone_exempt() {
        let config = RunConfig {
            data: Profile::StandingWave {
                amplitude: 1.0,
                mode: 1,
            },
            solve: SolveBlock {
                t_final: 50.0,
                ..Default::default()
            },
            nonlinearity: NonlinearitySpec::linear(),
            ..Default::default()
        };
        assert!(config.validate().is_ok());
        assert!(!config.solve_config().enforce_cone);
    }
}
