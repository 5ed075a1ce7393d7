use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::hamiltonian::HamiltonianField;

/// Deterministic pair sampling for [`cone_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSample {
    pub pairs: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for ConeSample {
    fn default() -> Self {
        Self { pairs: 10_000, seed: 0x5eed, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeReport {
    pub pairs_checked: usize,
    /// `min |H(t',x') - H(t,x)| - C1 (|x'-x| - b_max |t'-t|)` over the sample.
    pub worst_margin: f64,
    /// Node indices `((i, j), (i', j'))` attaining the worst margin.
    pub worst_pair: ((usize, usize), (usize, usize)),
    pub pass: bool,
}

/// Checks `|H(t',x') - H(t,x)| >= C1 (|x'-x| - b_max |t'-t|)` on random
/// node pairs outside the cone `|x'-x| <= b_max |t'-t|`.
pub fn cone_bound_check(h: &HamiltonianField, sample: &ConeSample) -> ConeReport {
    let g = *h.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
    let (c1, b_max) = (h.c1(), h.b_max());
    let mut worst = (f64::INFINITY, ((0, 0), (0, 0)));
    let mut checked = 0;
    let mut attempts = 0;
    while checked < sample.pairs && attempts < 50 * sample.pairs.max(1) {
        attempts += 1;
        let (i, j) = (rng.random_range(0..=g.nt()), rng.random_range(0..=g.nx()));
        let (k, l) = (rng.random_range(0..=g.nt()), rng.random_range(0..=g.nx()));
        let ax = (g.x(l) - g.x(j)).abs();
        let at = (g.t(k) - g.t(i)).abs();
        if !(ax > b_max * at) {
            continue;
        }
        checked += 1;
        let margin = (h.at(k, l) - h.at(i, j)).abs() - c1 * (ax - b_max * at);
        if margin < worst.0 {
            worst = (margin, ((i, j), (k, l)));
        }
    }
    ConeReport {
        pairs_checked: checked,
        worst_margin: worst.0,
        worst_pair: worst.1,
        pass: checked > 0 && worst.0 >= -sample.tol,
    }
}
