use std::borrow::Cow;


/// `x -> H(t, x)` for one time, as a piecewise cubic Hermite interpolant of
/// the node values with the nodal densities as slopes.
///
/// Cells whose Hermite cubic would not be monotone fall back to linear
/// interpolation, so every slice is strictly increasing. Beyond the window
/// the slice continues linearly with the boundary density.
#[derive(Debug, Clone)]
pub struct Slice<'a> {
    values: Cow<'a, [f64]>,
    slopes: Cow<'a, [f64]>,
    x_min: f64,
    dx: f64,
}

impl<'a> Slice<'a> {
    pub(crate) fn new(values: Cow<'a, [f64]>, slopes: Cow<'a, [f64]>, x_min: f64, dx: f64) -> Self {
        debug_assert_eq!(values.len(), slopes.len());
        Self { values, slopes, x_min, dx }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn cells(&self) -> usize {
        self.values.len() - 1
    }

    fn node(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx
    }

    /// Realized range `[H(x_min), H(x_max)]`.
    pub fn range(&self) -> (f64, f64) {
        (self.values[0], self.values[self.cells()])
    }

    fn cell(&self, k: usize) -> Cell {
        let (h0, h1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * self.dx, self.slopes[k + 1] * self.dx);
        Cell { h0, h1, m0, m1, cubic: hermite_is_monotone(h1 - h0, m0, m1) }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.cells();
        let s = (x - self.x_min) / self.dx;
        if s <= 0.0 {
            return self.values[0] + self.slopes[0] * (x - self.x_min);
        }
        if s >= n as f64 {
            let xe = self.node(n);
            return self.values[n] + self.slopes[n] * (x - xe);
        }
        let k = (s.floor() as usize).min(n - 1);
        let theta = ((x - self.node(k)) / self.dx).clamp(0.0, 1.0);
        if theta == 0.0 {
            return self.values[k];
        }
        self.cell(k).value(theta)
    }

    /// The unique `x` in the window with `H(x) = h`.
    pub fn invert(&self, h: f64) -> Option<f64> {
        let (lo, hi) = self.range();
        if !(h >= lo && h <= hi) {
            return None;
        }
        let n = self.cells();
        // First node with value > h; the bracketing cell is the one before.
        let k = self.values.partition_point(|&v| v <= h);
        if k == 0 {
            return Some(self.node(0));
        }
        let k = k - 1;
        if self.values[k] == h || k == n {
            return Some(self.node(k));
        }
        let theta = self.cell(k).solve(h);
        Some(if theta == 0.0 { self.node(k) } else { self.node(k) + theta * self.dx })
    }

    /// Inverse with the linear continuation beyond the window.
    pub fn invert_extended(&self, h: f64) -> f64 {
        let (lo, hi) = self.range();
        let n = self.cells();
        if h < lo {
            self.x_min + (h - lo) / self.slopes[0]
        } else if h > hi {
            self.node(n) + (h - hi) / self.slopes[n]
        } else {
            self.invert(h).expect("level inside range")
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    h0: f64,
    h1: f64,
    m0: f64,
    m1: f64,
    cubic: bool,
}

impl Cell {
    fn value(&self, th: f64) -> f64 {
        if !self.cubic {
            return self.h0 + th * (self.h1 - self.h0);
        }
        let th2 = th * th;
        let th3 = th2 * th;
        (2.0 * th3 - 3.0 * th2 + 1.0) * self.h0
            + (th3 - 2.0 * th2 + th) * self.m0
            + (-2.0 * th3 + 3.0 * th2) * self.h1
            + (th3 - th2) * self.m1
    }

    fn derivative(&self, th: f64) -> f64 {
        if !self.cubic {
            return self.h1 - self.h0;
        }
        let th2 = th * th;
        (6.0 * th2 - 6.0 * th) * self.h0
            + (3.0 * th2 - 4.0 * th + 1.0) * self.m0
            + (-6.0 * th2 + 6.0 * th) * self.h1
            + (3.0 * th2 - 2.0 * th) * self.m1
    }

    /// Root of `value(theta) = h` in `[0, 1]`, bracketed Newton.
    fn solve(&self, h: f64) -> f64 {
        let secant = self.h1 - self.h0;
        let mut th = ((h - self.h0) / secant).clamp(0.0, 1.0);
        if !self.cubic {
            return th;
        }
        let (mut a, mut b) = (0.0_f64, 1.0_f64);
        for _ in 0..64 {
            let r = self.value(th) - h;
            if r == 0.0 {
                return th;
            }
            if r < 0.0 {
                a = th;
            } else {
                b = th;
            }
            let d = self.derivative(th);
            let mut next = th - r / d;
            if !(next > a && next < b) || !next.is_finite() {
                next = 0.5 * (a + b);
            }
            if (next - th).abs() <= 4.0 * f64::EPSILON * th.abs().max(f64::MIN_POSITIVE) || b - a <= f64::EPSILON {
                return next;
            }
            th = next;
        }
        th
    }
}

/// Fritsch-Carlson region for a cubic Hermite cell with end slopes `m0`,
/// `m1` (already scaled by the cell width) and rise `delta`.
fn hermite_is_monotone(delta: f64, m0: f64, m1: f64) -> bool {
    if !(delta > 0.0 && m0 >= 0.0 && m1 >= 0.0) {
        return false;
    }
    let (a, b) = (m0 / delta, m1 / delta);
    if a + b - 2.0 <= 0.0 || 2.0 * a + b - 3.0 <= 0.0 || a + 2.0 * b - 3.0 <= 0.0 {
        return true;
    }
    a - (2.0 * a + b - 3.0).powi(2) / (3.0 * (a + b - 2.0)) >= 0.0
}
