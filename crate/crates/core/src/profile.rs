//! Compactly supported profiles used as probes, level functions `f` and
//! test functions `φ(t, x) = θ(t) ψ(x)`.

use serde::{Deserialize, Serialize};

use crate::hamiltonian::standard_bump;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// Hat function `max(0, 1 - |s|)`.
    Triangle { center: f64, half_width: f64 },
    /// `(1 - s²)³` for `|s| < 1`: `C²` with closed-form derivative.
    PolyBump { center: f64, half_width: f64 },
    /// `exp(1 - 1/(1 - s²))` for `|s| < 1` (unit peak, `C∞`).
    SmoothBump { center: f64, half_width: f64 },
    /// `exp(-s²/2)` with `s = (x - center)/width`, cut off at 8 widths.
    Gaussian { center: f64, width: f64 },
}

impl Profile {
    fn scaled(&self, x: f64) -> (f64, f64) {
        match *self {
            Profile::Triangle { center, half_width }
            | Profile::PolyBump { center, half_width }
            | Profile::SmoothBump { center, half_width } => ((x - center) / half_width, half_width),
            Profile::Gaussian { center, width } => ((x - center) / width, width),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        let (s, _) = self.scaled(x);
        match self {
            Profile::Triangle { .. } => (1.0 - s.abs()).max(0.0),
            Profile::PolyBump { .. } => {
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    (1.0 - s * s).powi(3)
                }
            }
            Profile::SmoothBump { .. } => std::f64::consts::E * standard_bump(s),
            Profile::Gaussian { .. } => {
                if s.abs() > 8.0 {
                    0.0
                } else {
                    (-0.5 * s * s).exp()
                }
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (s, w) = self.scaled(x);
        let ds = match self {
            Profile::Triangle { .. } => {
                if s.abs() >= 1.0 || s == 0.0 {
                    0.0
                } else {
                    -s.signum()
                }
            }
            Profile::PolyBump { .. } => {
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    -6.0 * s * (1.0 - s * s).powi(2)
                }
            }
            Profile::SmoothBump { .. } => {
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    let q = 1.0 - s * s;
                    -2.0 * s / (q * q) * std::f64::consts::E * standard_bump(s)
                }
            }
            Profile::Gaussian { .. } => {
                if s.abs() > 8.0 {
                    0.0
                } else {
                    -s * (-0.5 * s * s).exp()
                }
            }
        };
        ds / w
    }

    /// Closed interval containing the support.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Profile::Triangle { center, half_width }
            | Profile::PolyBump { center, half_width }
            | Profile::SmoothBump { center, half_width } => (center - half_width, center + half_width),
            Profile::Gaussian { center, width } => (center - 8.0 * width, center + 8.0 * width),
        }
    }

    pub(crate) fn support_within(&self, lo: f64, hi: f64) -> bool {
        let (a, b) = self.support();
        a >= lo && b <= hi
    }
}

/// Time factor of a tensor test function; vanishes for `t >= t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    /// `1 - t / t_end`.
    LinearDecay { t_end: f64 },
    /// `(1 - (t / t_end)²)³`.
    PolyBump { t_end: f64 },
}

impl TimeProfile {
    pub fn t_end(&self) -> f64 {
        match *self {
            TimeProfile::LinearDecay { t_end } | TimeProfile::PolyBump { t_end } => t_end,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        let s = t / self.t_end();
        if s > 1.0 {
            return 0.0;
        }
        match self {
            TimeProfile::LinearDecay { .. } => 1.0 - s,
            TimeProfile::PolyBump { .. } => (1.0 - s * s).powi(3),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let te = self.t_end();
        let s = t / te;
        if s > 1.0 {
            return 0.0;
        }
        match self {
            TimeProfile::LinearDecay { .. } => -1.0 / te,
            TimeProfile::PolyBump { .. } => -6.0 * s * (1.0 - s * s).powi(2) / te,
        }
    }
}

/// `φ(t, x) = θ(t) ψ(x)` with analytic derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensorTest {
    pub space: Profile,
    pub time: TimeProfile,
}

impl TensorTest {
    pub fn value(&self, t: f64, x: f64) -> f64 {
        self.time.value(t) * self.space.value(x)
    }
    pub fn dt(&self, t: f64, x: f64) -> f64 {
        self.time.derivative(t) * self.space.value(x)
    }
    pub fn dx(&self, t: f64, x: f64) -> f64 {
        self.time.value(t) * self.space.derivative(x)
    }

    /// `count` polynomial bumps evenly spread over `[lo, hi]`, each with
    /// the given half-width, all with the same time factor.
    pub fn bump_family(count: usize, lo: f64, hi: f64, half_width: f64, time: TimeProfile) -> Vec<TensorTest> {
        let inner = (lo + half_width, hi - half_width);
        (0..count)
            .map(|k| {
                let center = if count == 1 {
                    0.5 * (inner.0 + inner.1)
                } else {
                    inner.0 + (inner.1 - inner.0) * k as f64 / (count - 1) as f64
                };
                TensorTest { space: Profile::PolyBump { center, half_width }, time }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let profiles = [
            Profile::PolyBump { center: 0.2, half_width: 0.7 },
            Profile::SmoothBump { center: -0.1, half_width: 0.5 },
            Profile::Gaussian { center: 0.0, width: 0.3 },
            Profile::Triangle { center: 0.0, half_width: 1.0 },
        ];
        let h = 1e-6;
        for p in profiles {
            for &x in &[-0.33, 0.05, 0.41] {
                let fd = (p.value(x + h) - p.value(x - h)) / (2.0 * h);
                assert!((p.derivative(x) - fd).abs() < 1e-6, "{p:?} at {x}");
            }
        }
        for tp in [TimeProfile::LinearDecay { t_end: 0.8 }, TimeProfile::PolyBump { t_end: 0.8 }] {
            for &t in &[0.1, 0.5, 0.79] {
                let fd = (tp.value(t + h) - tp.value(t - h)) / (2.0 * h);
                assert!((tp.derivative(t) - fd).abs() < 1e-6);
            }
            assert_eq!(tp.value(0.8), 0.0);
            assert_eq!(tp.value(0.0), 1.0);
        }
    }

    #[test]
    fn bump_family_stays_inside() {
        let fam = TensorTest::bump_family(5, -2.0, 2.0, 0.4, TimeProfile::PolyBump { t_end: 0.9 });
        assert_eq!(fam.len(), 5);
        for f in &fam {
            assert!(f.space.support_within(-2.0, 2.0));
        }
    }
}
