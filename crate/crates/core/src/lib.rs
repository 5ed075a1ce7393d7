//! Well-posedness toolkit for the one-dimensional continuity equation
//! `∂t u + ∂x (u b) = 0` with a bounded, nearly incompressible velocity `b`.
//!
//! The pipeline is: sample a pair `(b, rho)` ([`field_kit`]), integrate its
//! Hamiltonian `H` with `∂x H = rho`, `∂t H = -rho b` ([`hamiltonian`]),
//! invert `H` along each time slice to get level-set trajectories and the
//! Lagrangian flow ([`flow`]), and push the initial datum forward along the
//! flow ([`transport`]). [`reference_oracles`] holds independent solvers for
//! cross-checks and [`compactness_lab`] studies families of flows under
//! uniform density bounds.

pub mod compactness_lab;
pub mod error;
pub mod export;
pub mod field_kit;
pub mod flow;
pub mod hamiltonian;
pub mod pipeline;
pub mod profile;
pub mod quadrature;
pub mod reference_oracles;
pub mod report;
pub mod transport;

pub use error::{Error, Result};
pub use field_kit::{
    build_scenario, from_hamiltonian, validate_pair, AnalyticHamiltonian, Generator, InitialDatum,
    NearIncompressiblePair, SampledField, ScenarioConfig, ScenarioKind, SpaceTimeGrid, Tolerances,
};
pub use flow::{build_flow, invert_in_x, FlowMap};
pub use hamiltonian::{build_hamiltonian, mollify, HamiltonianField, MollifiedHamiltonian};
pub use transport::{solve_cauchy, TransportSolution};
