//! Closed-form Hamiltonians used to synthesize exact `(b, rho)` pairs.
//!
//! A generator `H(t, x)` with `dH/dx > 0` produces the density
//! `rho = dH/dx` and the velocity `b = -(dH/dt) / (dH/dx)`; the pair then
//! satisfies the continuity equation identically.

use serde::{Deserialize, Serialize};

/// A smooth Hamiltonian with closed-form first and mixed second derivatives.
pub trait AnalyticHamiltonian {
    fn value(&self, t: f64, x: f64) -> f64;
    fn dx(&self, t: f64, x: f64) -> f64;
    fn dt(&self, t: f64, x: f64) -> f64;
    fn dxx(&self, t: f64, x: f64) -> f64;
    fn dxt(&self, t: f64, x: f64) -> f64;

    fn density(&self, t: f64, x: f64) -> f64 {
        self.dx(t, x)
    }

    fn velocity(&self, t: f64, x: f64) -> f64 {
        -self.dt(t, x) / self.dx(t, x)
    }

    /// `d b / d x`, from the quotient rule.
    fn velocity_dx(&self, t: f64, x: f64) -> f64 {
        let hx = self.dx(t, x);
        let ht = self.dt(t, x);
        -(self.dxt(t, x) * hx - ht * self.dxx(t, x)) / (hx * hx)
    }
}

/// The generator families used by the built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Generator {
    /// `H = x - v t`: uniform translation with speed `v`.
    Affine { velocity: f64 },
    /// `H = x + (a / k) sin(k (x - c t))`.
    TravellingWave { amplitude: f64, wavenumber: f64, speed: f64 },
}

impl Generator {
    pub fn identity() -> Self {
        Generator::Affine { velocity: 0.0 }
    }

    /// `x + 1/2 sin(x - t)`.
    pub fn reference_wave() -> Self {
        Generator::TravellingWave { amplitude: 0.5, wavenumber: 1.0, speed: 1.0 }
    }

    /// `x + sin(n (x - t)) / (2n)`; `n = 0` maps to the identity.
    pub fn oscillatory(n: u32) -> Self {
        if n == 0 {
            Self::identity()
        } else {
            Generator::TravellingWave { amplitude: 0.5, wavenumber: f64::from(n), speed: 1.0 }
        }
    }

    /// Analytic `(C1, C2, sup|b|)` over all of space-time.
    pub fn bounds(&self) -> (f64, f64, f64) {
        match *self {
            Generator::Affine { velocity } => (1.0, 1.0, velocity.abs()),
            Generator::TravellingWave { amplitude, speed, .. } => {
                let a = amplitude.abs();
                (1.0 - a, 1.0 + a, a * speed.abs() / (1.0 - a))
            }
        }
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        match *self {
            Generator::Affine { velocity } if !velocity.is_finite() => {
                Err(format!("velocity must be finite, got {velocity}"))
            }
            Generator::TravellingWave { amplitude, wavenumber, speed } => {
                if !(amplitude.is_finite() && wavenumber.is_finite() && speed.is_finite()) {
                    Err("travelling wave parameters must be finite".into())
                } else if wavenumber <= 0.0 {
                    Err(format!("wavenumber must be positive, got {wavenumber}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    fn phase(k: f64, c: f64, t: f64, x: f64) -> f64 {
        k * (x - c * t)
    }
}

impl AnalyticHamiltonian for Generator {
    fn value(&self, t: f64, x: f64) -> f64 {
        match *self {
            Generator::Affine { velocity } => x - velocity * t,
            Generator::TravellingWave { amplitude, wavenumber, speed } => {
                x + amplitude / wavenumber * Self::phase(wavenumber, speed, t, x).sin()
            }
        }
    }

    fn dx(&self, t: f64, x: f64) -> f64 {
        match *self {
            Generator::Affine { .. } => 1.0,
            Generator::TravellingWave { amplitude, wavenumber, speed } => {
                1.0 + amplitude * Self::phase(wavenumber, speed, t, x).cos()
            }
        }
    }

    fn dt(&self, t: f64, x: f64) -> f64 {
        match *self {
            Generator::Affine { velocity } => -velocity,
            Generator::TravellingWave { amplitude, wavenumber, speed } => {
                -amplitude * speed * Self::phase(wavenumber, speed, t, x).cos()
            }
        }
    }

    fn dxx(&self, t: f64, x: f64) -> f64 {
        match *self {
            Generator::Affine { .. } => 0.0,
            Generator::TravellingWave { amplitude, wavenumber, speed } => {
                -amplitude * wavenumber * Self::phase(wavenumber, speed, t, x).sin()
            }
        }
    }

    fn dxt(&self, t: f64, x: f64) -> f64 {
        match *self {
            Generator::Affine { .. } => 0.0,
            Generator::TravellingWave { amplitude, wavenumber, speed } => {
                amplitude * wavenumber * speed * Self::phase(wavenumber, speed, t, x).sin()
            }
        }
    }

    fn velocity(&self, t: f64, x: f64) -> f64 {
        match *self {
            Generator::Affine { velocity } => velocity,
            Generator::TravellingWave { amplitude, wavenumber, speed } => {
                let c = Self::phase(wavenumber, speed, t, x).cos();
                amplitude * speed * c / (1.0 + amplitude * c)
            }
        }
    }
}
