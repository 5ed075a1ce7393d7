use serde::{Deserialize, Serialize};

use crate::field_kit::{AnalyticHamiltonian, Generator};
use crate::quadrature::adaptive_simpson;

/// Gaussian bumps are cut off this many widths from the centre.
pub const GAUSSIAN_CUTOFF: f64 = 8.0;

/// Initial condition `u(0, .)` of the Cauchy problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialDatum {
    Constant {
        value: f64,
    },
    /// `height * exp(-(x - center)^2 / (2 width^2))`, zero beyond
    /// [`GAUSSIAN_CUTOFF`] widths.
    GaussianBump {
        center: f64,
        width: f64,
        height: f64,
    },
    /// `left` for `x < location`, `right` for `x > location`.
    Step {
        location: f64,
        left: f64,
        right: f64,
    },
    /// `min(clip, |x - center|^(-1/2))`. The unclipped profile is the
    /// locally integrable datum being modelled.
    InvSqrtSingularity {
        center: f64,
        clip: f64,
    },
    /// `d/dx H(0, x)` of a generator: the density at time zero.
    Density {
        generator: Generator,
    },
    Composite {
        parts: Vec<WeightedDatum>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedDatum {
    pub weight: f64,
    pub datum: InitialDatum,
}

impl InitialDatum {
    pub fn gaussian(center: f64, width: f64) -> Self {
        InitialDatum::GaussianBump { center, width, height: 1.0 }
    }

    pub fn zero() -> Self {
        InitialDatum::Constant { value: 0.0 }
    }

    /// `alpha * first + beta * second`.
    pub fn combine(alpha: f64, first: InitialDatum, beta: f64, second: InitialDatum) -> Self {
        InitialDatum::Composite {
            parts: vec![
                WeightedDatum { weight: alpha, datum: first },
                WeightedDatum { weight: beta, datum: second },
            ],
        }
    }

    /// Pointwise value; `None` on the finite exceptional set (jump locations,
    /// the singular point).
    pub fn value(&self, x: f64) -> Option<f64> {
        match self {
            InitialDatum::Constant { value } => Some(*value),
            InitialDatum::GaussianBump { center, width, height } => {
                let s = (x - center) / width;
                Some(if s.abs() > GAUSSIAN_CUTOFF { 0.0 } else { height * (-0.5 * s * s).exp() })
            }
            InitialDatum::Step { location, left, right } => {
                if x < *location {
                    Some(*left)
                } else if x > *location {
                    Some(*right)
                } else {
                    None
                }
            }
            InitialDatum::InvSqrtSingularity { center, clip } => {
                let d = (x - center).abs();
                (d > 0.0).then(|| clip.min(d.powf(-0.5)))
            }
            InitialDatum::Density { generator } => Some(generator.density(0.0, x)),
            InitialDatum::Composite { parts } => parts
                .iter()
                .try_fold(0.0, |acc, p| p.datum.value(x).map(|v| acc + p.weight * v)),
        }
    }

    /// Finite value everywhere: the exceptional set is filled with the
    /// jump midpoint or the clip level.
    pub fn clipped(&self, x: f64) -> f64 {
        match self {
            InitialDatum::Step { location, left, right } if x == *location => 0.5 * (left + right),
            InitialDatum::InvSqrtSingularity { center, clip } if x == *center => *clip,
            InitialDatum::Composite { parts } => {
                parts.iter().map(|p| p.weight * p.datum.clipped(x)).sum()
            }
            _ => self.value(x).expect("regular point"),
        }
    }

    /// Closed interval outside of which the datum vanishes; `None` if the
    /// support is unbounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            InitialDatum::Constant { value } if *value == 0.0 => Some((0.0, 0.0)),
            InitialDatum::GaussianBump { center, width, height } => {
                if *height == 0.0 {
                    Some((*center, *center))
                } else {
                    let r = GAUSSIAN_CUTOFF * width.abs();
                    Some((center - r, center + r))
                }
            }
            InitialDatum::Step { location, left, right } if *left == 0.0 && *right == 0.0 => {
                Some((*location, *location))
            }
            InitialDatum::Composite { parts } => {
                let mut hull: Option<(f64, f64)> = None;
                for p in parts.iter().filter(|p| p.weight != 0.0) {
                    let (lo, hi) = p.datum.support()?;
                    if lo == hi && p.datum.is_identically_zero() {
                        continue;
                    }
                    hull = Some(match hull {
                        None => (lo, hi),
                        Some((a, b)) => (a.min(lo), b.max(hi)),
                    });
                }
                Some(hull.unwrap_or((0.0, 0.0)))
            }
            _ => None,
        }
    }

    fn is_identically_zero(&self) -> bool {
        match self {
            InitialDatum::Constant { value } => *value == 0.0,
            InitialDatum::GaussianBump { height, .. } => *height == 0.0,
            InitialDatum::Step { left, right, .. } => *left == 0.0 && *right == 0.0,
            InitialDatum::Composite { parts } => {
                parts.iter().all(|p| p.weight == 0.0 || p.datum.is_identically_zero())
            }
            _ => false,
        }
    }

    /// Whether the modelled datum (before clipping) is essentially bounded.
    pub fn is_bounded(&self) -> bool {
        match self {
            InitialDatum::InvSqrtSingularity { .. } => false,
            InitialDatum::Composite { parts } => {
                parts.iter().all(|p| p.weight == 0.0 || p.datum.is_bounded())
            }
            _ => true,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            InitialDatum::Constant { value } => *value >= 0.0,
            InitialDatum::GaussianBump { height, .. } => *height >= 0.0,
            InitialDatum::Step { left, right, .. } => *left >= 0.0 && *right >= 0.0,
            InitialDatum::InvSqrtSingularity { clip, .. } => *clip >= 0.0,
            InitialDatum::Density { .. } => true,
            InitialDatum::Composite { parts } => {
                parts.iter().all(|p| p.weight >= 0.0 && p.datum.is_nonnegative())
            }
        }
    }

    /// `∫_a^b` of the unclipped datum. Singular points and jumps are split
    /// out; near a singularity the substitution `x = c ± s²` removes the
    /// `|x - c|^(-1/2)` blow-up before adaptive Simpson is applied.
    pub fn unclipped_integral(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return -self.unclipped_integral(b, a);
        }
        const TOL: f64 = 1e-11;
        match self {
            InitialDatum::InvSqrtSingularity { center, .. } => {
                let c = *center;
                // ∫ |x-c|^(-1/2) dx over a side of length L is 2 sqrt(L).
                let side = |lo: f64, hi: f64| 2.0 * ((hi - c).abs().sqrt() - (lo - c).abs().sqrt()).abs();
                if b <= c || a >= c {
                    side(a, b)
                } else {
                    side(a, c) + side(c, b)
                }
            }
            InitialDatum::Step { location, left, right } => {
                let l = *location;
                let lo_part = (b.min(l) - a).max(0.0) * left;
                let hi_part = (b - a.max(l)).max(0.0) * right;
                lo_part + hi_part
            }
            InitialDatum::Composite { parts } => {
                parts.iter().map(|p| p.weight * p.datum.unclipped_integral(a, b)).sum()
            }
            InitialDatum::GaussianBump { center, width, .. } => {
                let r = GAUSSIAN_CUTOFF * width.abs();
                let (lo, hi) = (a.max(center - r), b.min(center + r));
                if hi <= lo {
                    0.0
                } else {
                    adaptive_simpson(&|x| self.clipped(x), lo, hi, TOL)
                }
            }
            _ => adaptive_simpson(&|x| self.clipped(x), a, b, TOL),
        }
    }

    /// Integral of the clipped profile, with the kinks at the clip level
    /// located exactly.
    pub fn clipped_integral(&self, a: f64, b: f64) -> f64 {
        match self {
            InitialDatum::InvSqrtSingularity { center, clip } => {
                // |x-c|^(-1/2) >= clip  <=>  |x-c| <= clip^-2
                let (c, k) = (*center, *clip);
                let r = k.powi(-2);
                let (lo, hi) = (a.max(c - r), b.min(c + r));
                let total = self.unclipped_integral(a, b);
                if hi <= lo {
                    total
                } else {
                    total - self.unclipped_integral(lo, hi) + k * (hi - lo)
                }
            }
            InitialDatum::Composite { parts } => {
                parts.iter().map(|p| p.weight * p.datum.clipped_integral(a, b)).sum()
            }
            _ => self.unclipped_integral(a, b),
        }
    }
}
