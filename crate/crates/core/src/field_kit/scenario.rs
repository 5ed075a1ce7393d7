use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field_kit::{from_hamiltonian, Generator, NearIncompressiblePair, SpaceTimeGrid};

/// The built-in scenario families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioKind {
    /// `b = 0`, `rho = 1`.
    ZeroField,
    /// `b = velocity`, `rho = 1`.
    ConstantField {
        #[serde(default = "one")]
        velocity: f64,
    },
    /// Pair synthesized from `H = x + (a/k) sin(k (x - c t))`.
    HamiltonianFirst {
        #[serde(default = "half")]
        amplitude: f64,
        #[serde(default = "one")]
        wavenumber: f64,
        #[serde(default = "one")]
        speed: f64,
    },
    /// Member `n` of the oscillatory family `H_n = x + sin(n (x - t)) / (2n)`.
    OscillatoryN { n: u32 },
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}

impl ScenarioKind {
    pub const NAMES: [&'static str; 4] =
        ["zero_field", "constant_field", "hamiltonian_first", "oscillatory_n"];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::ZeroField => "zero_field",
            ScenarioKind::ConstantField { .. } => "constant_field",
            ScenarioKind::HamiltonianFirst { .. } => "hamiltonian_first",
            ScenarioKind::OscillatoryN { .. } => "oscillatory_n",
        }
    }

    pub fn generator(&self) -> Generator {
        match *self {
            ScenarioKind::ZeroField => Generator::identity(),
            ScenarioKind::ConstantField { velocity } => Generator::Affine { velocity },
            ScenarioKind::HamiltonianFirst { amplitude, wavenumber, speed } => {
                Generator::TravellingWave { amplitude, wavenumber, speed }
            }
            ScenarioKind::OscillatoryN { n } => Generator::oscillatory(n),
        }
    }

    pub fn hamiltonian_first() -> Self {
        ScenarioKind::HamiltonianFirst { amplitude: 0.5, wavenumber: 1.0, speed: 1.0 }
    }
}

/// Builds the pair for a scenario on a grid.
pub fn build_scenario(kind: &ScenarioKind, grid: SpaceTimeGrid) -> Result<NearIncompressiblePair> {
    if let ScenarioKind::HamiltonianFirst { amplitude, .. } = kind {
        if amplitude.abs() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "amplitude {amplitude} gives C1 = {} <= 0",
                1.0 - amplitude.abs()
            )));
        }
    }
    from_hamiltonian(&kind.generator(), grid)
}
