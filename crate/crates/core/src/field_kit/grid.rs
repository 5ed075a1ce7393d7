use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform node lattice on `[0, T] x [x_min, x_max]`.
///
/// Node coordinates are always produced by multiplication (`i * dt`,
/// `x_min + j * dx`) so that repeated lookups of the same node agree bit for
/// bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeGrid {
    t_final: f64,
    x_min: f64,
    x_max: f64,
    nt: usize,
    nx: usize,
}

impl SpaceTimeGrid {
    pub fn new(t_final: f64, x_min: f64, x_max: f64, nt: usize, nx: usize) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidGrid(format!("T must be positive, got {t_final}")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidGrid(format!(
                "window [{x_min}, {x_max}] is empty or not finite"
            )));
        }
        if nt < 2 || nx < 2 {
            return Err(Error::InvalidGrid(format!(
                "need nt >= 2 and nx >= 2, got nt={nt}, nx={nx}"
            )));
        }
        Ok(Self { t_final, x_min, x_max, nt, nx })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }
    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    /// Number of time cells; there are `nt + 1` time nodes.
    pub fn nt(&self) -> usize {
        self.nt
    }
    /// Number of space cells; there are `nx + 1` space nodes.
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn dt(&self) -> f64 {
        self.t_final / self.nt as f64
    }
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }
    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.dt()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn node_count(&self) -> usize {
        (self.nt + 1) * (self.nx + 1)
    }

    pub fn times(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.nt + 1).map(move |i| self.t(i))
    }

    pub fn xs(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.nx + 1).map(move |j| self.x(j))
    }

    /// Nearest time node index to `t`, clamped to the grid.
    pub fn nearest_time_index(&self, t: f64) -> usize {
        let s = (t / self.dt()).round();
        if s <= 0.0 {
            0
        } else {
            (s as usize).min(self.nt)
        }
    }

    /// Same window with a different resolution.
    pub fn with_resolution(&self, nt: usize, nx: usize) -> Result<Self> {
        Self::new(self.t_final, self.x_min, self.x_max, nt, nx)
    }

    /// Window shrunk by `margin` on both sides; `None` when nothing is left.
    pub fn padded_interval(&self, margin: f64) -> Option<(f64, f64)> {
        let lo = self.x_min + margin;
        let hi = self.x_max - margin;
        (hi > lo).then_some((lo, hi))
    }

    /// Locate `x` relative to the space nodes: returns the cell index and the
    /// local coordinate in `[0, 1]`. Points beyond the window are clamped.
    /// A point that coincides with node `j` yields `(j, 0.0)` (or `(nx-1, 1.0)`
    /// for the last node).
    pub(crate) fn locate_x(&self, x: f64) -> (usize, f64) {
        locate(x, self.x_min, self.dx(), self.nx, |j| self.x(j))
    }

    pub(crate) fn locate_t(&self, t: f64) -> (usize, f64) {
        locate(t, 0.0, self.dt(), self.nt, |i| self.t(i))
    }
}

fn locate(v: f64, origin: f64, step: f64, cells: usize, node: impl Fn(usize) -> f64) -> (usize, f64) {
    let s = (v - origin) / step;
    if !(s > 0.0) {
        return (0, 0.0);
    }
    if s >= cells as f64 {
        return (cells - 1, 1.0);
    }
    let nearest = s.round() as usize;
    if node(nearest) == v {
        return if nearest == cells { (cells - 1, 1.0) } else { (nearest, 0.0) };
    }
    let k = (s.floor() as usize).min(cells - 1);
    let theta = ((v - node(k)) / step).clamp(0.0, 1.0);
    (k, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_grids() {
        assert!(SpaceTimeGrid::new(0.0, 0.0, 1.0, 4, 4).is_err());
        assert!(SpaceTimeGrid::new(1.0, 1.0, 1.0, 4, 4).is_err());
        assert!(SpaceTimeGrid::new(1.0, 0.0, 1.0, 1, 4).is_err());
        assert!(SpaceTimeGrid::new(1.0, 0.0, 1.0, 4, 1).is_err());
        assert!(SpaceTimeGrid::new(f64::NAN, 0.0, 1.0, 4, 4).is_err());
    }

    #[test]
    fn nodes_by_multiplication() {
        let g = SpaceTimeGrid::new(1.0, -1.0, 1.0, 10, 10).unwrap();
        assert_eq!(g.x(10), -1.0 + 10.0 * 0.2);
        assert_eq!(g.t(3), 3.0 * 0.1);
        assert_eq!(g.x(0), -1.0);
    }

    #[test]
    fn locate_hits_nodes_exactly() {
        let g = SpaceTimeGrid::new(1.0, -2.0, 2.0, 7, 13).unwrap();
        for j in 0..=13 {
            let (k, th) = g.locate_x(g.x(j));
            if j == 13 {
                assert_eq!((k, th), (12, 1.0));
            } else {
                assert_eq!((k, th), (j, 0.0));
            }
        }
        assert_eq!(g.locate_x(-10.0), (0, 0.0));
        assert_eq!(g.locate_x(10.0), (12, 1.0));
    }
}
