//! Grids, sampled fields, scenario synthesis and validation of the
//! near-incompressibility hypothesis.

mod config;
mod datum;
mod generator;
mod grid;
mod pair;
mod sampled;
mod scenario;

pub use config::{
    CompactnessConfig, DatumConfig, GridConfig, ProbeConfig, RunConfig, ScenarioConfig, Tolerances,
};
pub use datum::{InitialDatum, WeightedDatum, GAUSSIAN_CUTOFF};
pub use generator::{AnalyticHamiltonian, Generator};
pub use grid::SpaceTimeGrid;
pub use pair::{from_hamiltonian, validate_pair, NearIncompressiblePair, ValidationReport};
pub use sampled::SampledField;
pub use scenario::{build_scenario, ScenarioKind};
