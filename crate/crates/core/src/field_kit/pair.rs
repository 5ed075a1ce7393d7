use serde::Serialize;

use crate::error::{Error, Result};
use crate::field_kit::{AnalyticHamiltonian, Generator, SampledField, SpaceTimeGrid};

/// Relative slack used when comparing node values against declared bounds.
const BOUND_SLACK: f64 = 1e-12;

/// A sampled velocity `b` together with a density `rho` bounded away from
/// zero and infinity.
#[derive(Debug, Clone)]
pub struct NearIncompressiblePair {
    b: SampledField,
    rho: SampledField,
    c1: f64,
    c2: f64,
    b_max: f64,
    continuity_residual: f64,
    generator: Option<Generator>,
}

/// Outcome of [`validate_pair`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub rho_min: f64,
    pub rho_max: f64,
    pub b_sup: f64,
    pub continuity_residual: f64,
    pub bounds_hold: bool,
    pub pass: bool,
}

impl NearIncompressiblePair {
    /// Wraps sampled fields, taking `C1`, `C2` and `b_max` from a node scan.
    pub fn from_samples(b: SampledField, rho: SampledField) -> Result<Self> {
        if b.grid() != rho.grid() {
            return Err(Error::InvalidField("b and rho must share one grid".into()));
        }
        let c1 = rho.min();
        if !(c1 > 0.0) {
            return Err(Error::InvalidParameter(format!("density must be positive, min is {c1}")));
        }
        let (c2, b_max) = (rho.max(), b.sup_abs());
        Self::with_bounds(b, rho, c1, c2, b_max)
    }

    /// Wraps sampled fields with declared bounds; the bounds are checked
    /// against every node.
    pub fn with_bounds(b: SampledField, rho: SampledField, c1: f64, c2: f64, b_max: f64) -> Result<Self> {
        if b.grid() != rho.grid() {
            return Err(Error::InvalidField("b and rho must share one grid".into()));
        }
        if !(c1 > 0.0 && c2 >= c1 && b_max >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < C1 <= C2 and b_max >= 0, got C1={c1}, C2={c2}, b_max={b_max}"
            )));
        }
        let mut pair = Self { b, rho, c1, c2, b_max, continuity_residual: 0.0, generator: None };
        if !pair.bounds_hold() {
            return Err(Error::InvalidParameter(format!(
                "node values violate declared bounds: rho in [{}, {}], |b| <= {}",
                pair.rho.min(),
                pair.rho.max(),
                pair.b.sup_abs()
            )));
        }
        pair.continuity_residual = continuity_residual(&pair.b, &pair.rho);
        Ok(pair)
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        self.b.grid()
    }
    pub fn velocity(&self) -> &SampledField {
        &self.b
    }
    pub fn density(&self) -> &SampledField {
        &self.rho
    }
    pub fn c1(&self) -> f64 {
        self.c1
    }
    pub fn c2(&self) -> f64 {
        self.c2
    }
    pub fn b_max(&self) -> f64 {
        self.b_max
    }
    pub fn continuity_residual(&self) -> f64 {
        self.continuity_residual
    }
    /// The analytic generator, when the pair was synthesized from one.
    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    /// Spatial interval at distance `b_max * T` from the window boundary.
    pub fn padded_window(&self) -> Option<(f64, f64)> {
        let g = self.grid();
        g.padded_interval(self.b_max * g.t_final())
    }

    /// Same scenario on another grid, when an analytic generator is known.
    pub fn resample(&self, grid: SpaceTimeGrid) -> Result<Self> {
        match self.generator {
            Some(gen) => from_hamiltonian(&gen, grid),
            None => Err(Error::InvalidParameter("only generator-backed pairs can be resampled".into())),
        }
    }

    fn bounds_hold(&self) -> bool {
        let lo = self.c1 * (1.0 - BOUND_SLACK);
        let hi = self.c2 * (1.0 + BOUND_SLACK);
        let bb = self.b_max * (1.0 + BOUND_SLACK) + f64::MIN_POSITIVE;
        self.rho.min() >= lo && self.rho.max() <= hi && self.b.sup_abs() <= bb
    }
}

/// Samples `rho = dH/dx` and `b = -(dH/dt)/(dH/dx)` of a generator at the
/// grid nodes.
pub fn from_hamiltonian(gen: &Generator, grid: SpaceTimeGrid) -> Result<NearIncompressiblePair> {
    gen.check().map_err(Error::InvalidParameter)?;
    let (c1, c2, b_max) = gen.bounds();
    // Node scan for the worst density; analytic bounds may be optimistic for
    // user-supplied parameters.
    let mut worst = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=grid.nt() {
        for j in 0..=grid.nx() {
            let (t, x) = (grid.t(i), grid.x(j));
            let d = gen.dx(t, x);
            if d < worst.0 {
                worst = (d, t, x);
            }
        }
    }
    if !(c1 > 0.0) || !(worst.0 > 0.0) {
        return Err(Error::NotADensity { min_density: worst.0.min(c1), t: worst.1, x: worst.2 });
    }
    let rho = SampledField::from_fn(grid, |t, x| gen.density(t, x))?;
    let b = SampledField::from_fn(grid, |t, x| gen.velocity(t, x))?;
    let mut pair = NearIncompressiblePair::with_bounds(b, rho, c1, c2, b_max)?;
    pair.generator = Some(*gen);
    Ok(pair)
}

/// `Δt * max |D_t rho + D_x (rho b)|` over interior nodes, centered
/// differences in both directions.
fn continuity_residual(b: &SampledField, rho: &SampledField) -> f64 {
    let g = b.grid();
    let (dt, dx) = (g.dt(), g.dx());
    let flux = rho.product(b).expect("same grid");
    let mut worst = 0.0_f64;
    for i in 1..g.nt() {
        for j in 1..g.nx() {
            let drho = (rho.at(i + 1, j) - rho.at(i - 1, j)) / (2.0 * dt);
            let dflux = (flux.at(i, j + 1) - flux.at(i, j - 1)) / (2.0 * dx);
            worst = worst.max((drho + dflux).abs());
        }
    }
    worst * dt
}

/// Checks the density bounds and the discrete continuity equation.
pub fn validate_pair(pair: &NearIncompressiblePair, tol: f64) -> ValidationReport {
    let residual = pair.continuity_residual;
    let bounds_hold = pair.bounds_hold();
    ValidationReport {
        rho_min: pair.rho.min(),
        rho_max: pair.rho.max(),
        b_sup: pair.b.sup_abs(),
        continuity_residual: residual,
        bounds_hold,
        pass: bounds_hold && residual <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> SpaceTimeGrid {
        SpaceTimeGrid::new(1.0, -3.0, 3.0, n, n).unwrap()
    }

    #[test]
    fn identity_generator() {
        let p = from_hamiltonian(&Generator::identity(), grid(8)).unwrap();
        assert_eq!(p.density().min(), 1.0);
        assert_eq!(p.density().max(), 1.0);
        assert_eq!(p.velocity().sup_abs(), 0.0);
    }

    #[test]
    fn linear_generator_is_constant_advection() {
        let p = from_hamiltonian(&Generator::Affine { velocity: 1.0 }, grid(8)).unwrap();
        assert_eq!(p.velocity().min(), 1.0);
        assert_eq!(p.velocity().max(), 1.0);
        assert_eq!(p.b_max(), 1.0);
    }

    #[test]
    fn rejects_non_density_generator() {
        let g = Generator::TravellingWave { amplitude: 1.5, wavenumber: 1.0, speed: 1.0 };
        assert!(matches!(from_hamiltonian(&g, grid(16)), Err(Error::NotADensity { .. })));
    }

    #[test]
    fn from_samples_measures_bounds() {
        let g = grid(8);
        let b = SampledField::from_fn(g, |_, x| 0.1 * x).unwrap();
        let rho = SampledField::constant(g, 2.0).unwrap();
        let p = NearIncompressiblePair::from_samples(b, rho).unwrap();
        assert_eq!((p.c1(), p.c2()), (2.0, 2.0));
        assert!((p.b_max() - 0.3).abs() < 1e-15);
        // d_x(rho b) = 0.2 does not vanish.
        let r = validate_pair(&p, 1e-12);
        assert!(!r.pass && r.bounds_hold);
        assert!((r.continuity_residual - 0.2 * g.dt()).abs() < 1e-12);
    }

    #[test]
    fn with_bounds_rejects_violations() {
        let g = grid(4);
        let b = SampledField::constant(g, 2.0).unwrap();
        let rho = SampledField::constant(g, 1.0).unwrap();
        assert!(NearIncompressiblePair::with_bounds(b.clone(), rho.clone(), 1.0, 1.0, 1.0).is_err());
        assert!(NearIncompressiblePair::with_bounds(b, rho, 0.0, 1.0, 2.0).is_err());
    }
}
