//! Scenario configuration files.
//!
//! TOML with the sections below; every key outside this list is rejected.
//!
//! ```toml
//! [grid]
//! T = 1.0
//! x_min = -3.0
//! x_max = 3.0
//! nt = 256
//! nx = 256
//!
//! [scenario]
//! kind = "hamiltonian_first"   # zero_field | constant_field | hamiltonian_first | oscillatory_n
//! amplitude = 0.5              # hamiltonian_first: amplitude, wavenumber, speed
//!                              # constant_field: velocity;  oscillatory_n: n
//!
//! [tolerances]                 # all optional
//! continuity = 1e-2
//!
//! [datum]                      # optional; used by solve / verify
//! kind = "gaussian_bump"       # constant | gaussian_bump | step | inv_sqrt_singularity | initial_density
//! center = 0.0
//! width = 0.25
//!
//! [probe]                      # optional; uniqueness probe
//! eps = [0.2, 0.1, 0.05]
//! tau = 0.7
//!
//! [compactness]                # optional; compactness pipeline
//! n_list = [1, 2, 4, 8, 16, 32, 64]
//! delta = 0.1
//!
//! [run]
//! seed = 7
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_kit::{InitialDatum, ScenarioKind, SpaceTimeGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid: GridConfig,
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datum: Option<DatumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compactness: Option<CompactnessConfig>,
    #[serde(default)]
    pub run: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "T")]
    pub t_final: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub nt: usize,
    pub nx: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<SpaceTimeGrid> {
        SpaceTimeGrid::new(self.t_final, self.x_min, self.x_max, self.nt, self.nx)
    }
}

/// Tolerances shared by the checking operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Gate on the scaled continuity residual of a pair.
    pub continuity: f64,
    /// Slack on the x- and t-slopes of the Hamiltonian.
    pub slope: f64,
    /// `|H(t, X(t,x)) - H(0,x)|`.
    pub inversion: f64,
    /// Slack on measured Lipschitz constants and difference quotients.
    pub lipschitz: f64,
    /// Residuals that are exact up to quadrature round-off.
    pub quadrature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { continuity: 1e-2, slope: 1e-6, inversion: 1e-10, lipschitz: 1e-3, quadrature: 1e-9 }
    }
}

/// Initial data as written in a config file. `initial_density` resolves to
/// `rho(0, .)` of the configured scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatumConfig {
    Constant {
        value: f64,
    },
    GaussianBump {
        center: f64,
        width: f64,
        #[serde(default = "unit")]
        height: f64,
    },
    Step {
        location: f64,
        #[serde(default)]
        left: f64,
        #[serde(default = "unit")]
        right: f64,
    },
    InvSqrtSingularity {
        center: f64,
        clip: f64,
    },
    InitialDensity,
}

fn unit() -> f64 {
    1.0
}

impl DatumConfig {
    pub fn resolve(&self, scenario: &ScenarioKind) -> Result<InitialDatum> {
        Ok(match *self {
            DatumConfig::Constant { value } => InitialDatum::Constant { value },
            DatumConfig::GaussianBump { center, width, height } => {
                if !(width > 0.0) {
                    return Err(Error::Config(format!("gaussian width must be positive, got {width}")));
                }
                InitialDatum::GaussianBump { center, width, height }
            }
            DatumConfig::Step { location, left, right } => InitialDatum::Step { location, left, right },
            DatumConfig::InvSqrtSingularity { center, clip } => {
                if !(clip > 0.0 && clip.is_finite()) {
                    return Err(Error::Config(format!("clip must be positive and finite, got {clip}")));
                }
                InitialDatum::InvSqrtSingularity { center, clip }
            }
            DatumConfig::InitialDensity => InitialDatum::Density { generator: scenario.generator() },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub eps: Vec<f64>,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactnessConfig {
    pub n_list: Vec<u32>,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: default_seed() }
    }
}

fn default_seed() -> u64 {
    0x5eed
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(kind) = table
            .get("scenario")
            .and_then(|s| s.get("kind"))
            .and_then(|k| k.as_str())
        {
            if !ScenarioKind::NAMES.contains(&kind) {
                return Err(Error::UnknownScenario(kind.to_string()));
            }
        }
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.grid.build()?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<SpaceTimeGrid> {
        self.grid.build()
    }

    pub fn datum(&self) -> Result<Option<InitialDatum>> {
        self.datum.as_ref().map(|d| d.resolve(&self.scenario)).transpose()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[grid]
T = 1.0
x_min = -2.0
x_max = 2.0
nt = 8
nx = 8

[scenario]
kind = "constant_field"
velocity = 1.0
"#;

    #[test]
    fn parses_minimal_config() {
        let c = ScenarioConfig::from_toml_str(BASIC).unwrap();
        assert_eq!(c.scenario, ScenarioKind::ConstantField { velocity: 1.0 });
        assert_eq!(c.tolerances, Tolerances::default());
        assert_eq!(c.grid.nx, 8);
        assert!(c.datum().unwrap().is_none());
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = BASIC.replace("nx = 8", "nx = 8\nny = 3");
        assert!(matches!(ScenarioConfig::from_toml_str(&bad), Err(Error::Config(_))));
        let bad = format!("{BASIC}\n[tolerances]\nfoo = 1.0\n");
        assert!(ScenarioConfig::from_toml_str(&bad).is_err());
        let bad = BASIC.replace("velocity = 1.0", "velocity = 1.0\nwavenumber = 2.0");
        assert!(ScenarioConfig::from_toml_str(&bad).is_err());
        let bad = format!("{BASIC}\n[extra]\nx = 1\n");
        assert!(ScenarioConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn rejects_unknown_kind() {
        let bad = BASIC.replace("constant_field", "vortex");
        assert_eq!(
            ScenarioConfig::from_toml_str(&bad),
            Err(Error::UnknownScenario("vortex".into()))
        );
    }

    #[test]
    fn rejects_bad_grid() {
        let bad = BASIC.replace("nt = 8", "nt = 1");
        assert!(matches!(ScenarioConfig::from_toml_str(&bad), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn datum_sections() {
        let text = format!("{BASIC}\n[datum]\nkind = \"initial_density\"\n");
        let c = ScenarioConfig::from_toml_str(&text).unwrap();
        assert!(matches!(c.datum().unwrap(), Some(InitialDatum::Density { .. })));
        let text = format!("{BASIC}\n[datum]\nkind = \"step\"\nlocation = 0.0\n");
        let c = ScenarioConfig::from_toml_str(&text).unwrap();
        assert_eq!(
            c.datum().unwrap(),
            Some(InitialDatum::Step { location: 0.0, left: 0.0, right: 1.0 })
        );
    }

    #[test]
    fn round_trips_through_toml() {
        let text = format!(
            "{BASIC}\n[compactness]\nn_list = [1, 2]\n[probe]\neps = [0.2, 0.1]\ntau = 0.6\n"
        );
        let c = ScenarioConfig::from_toml_str(&text).unwrap();
        let again = ScenarioConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(c, again);
    }
}
