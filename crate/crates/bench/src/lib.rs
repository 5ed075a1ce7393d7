//! Fixtures shared by the criterion benchmarks.

use levelflow_core::{build_scenario, NearIncompressiblePair, ScenarioKind, SpaceTimeGrid};

/// The reference travelling-wave pair on `[0,1] x [-3,3]` at `n x n` cells.
pub fn wave_pair(n: usize) -> NearIncompressiblePair {
    let grid = SpaceTimeGrid::new(1.0, -3.0, 3.0, n, n).expect("valid grid");
    build_scenario(&ScenarioKind::hamiltonian_first(), grid).expect("valid scenario")
}
