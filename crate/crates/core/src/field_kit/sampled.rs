use crate::error::{Error, Result};
use crate::field_kit::SpaceTimeGrid;

/// Node values of a scalar field on a [`SpaceTimeGrid`], stored time-major.
///
/// Evaluation is bilinear inside the window; outside `[x_min, x_max]` the
/// value of the nearest boundary node is used, and times are clamped to
/// `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: SpaceTimeGrid,
    values: Vec<f64>,
}

impl SampledField {
    pub fn new(grid: SpaceTimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidField(format!(
                "expected {} values, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let nx1 = grid.nx() + 1;
            return Err(Error::InvalidField(format!(
                "non-finite value at node (i={}, j={})",
                pos / nx1,
                pos % nx1
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(t, x)` at every node.
    pub fn from_fn(grid: SpaceTimeGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.node_count());
        for i in 0..=grid.nt() {
            let t = grid.t(i);
            for j in 0..=grid.nx() {
                values.push(f(t, grid.x(j)));
            }
        }
        Self::new(grid, values)
    }

    pub(crate) fn from_raw(grid: SpaceTimeGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        Self { grid, values }
    }

    pub fn constant(grid: SpaceTimeGrid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.node_count()])
    }

    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.grid.nx() + 1) + j]
    }

    /// Values of time slice `i`.
    pub fn slice(&self, i: usize) -> &[f64] {
        let n = self.grid.nx() + 1;
        &self.values[i * n..(i + 1) * n]
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let (i, a) = self.grid.locate_t(t);
        let (j, b) = self.grid.locate_x(x);
        if a == 0.0 {
            return self.eval_slice(i, j, b);
        }
        if a == 1.0 {
            return self.eval_slice(i + 1, j, b);
        }
        (1.0 - a) * self.eval_slice(i, j, b) + a * self.eval_slice(i + 1, j, b)
    }

    /// Linear interpolation within slice `i` at `x`.
    pub fn eval_at_slice(&self, i: usize, x: f64) -> f64 {
        let (j, b) = self.grid.locate_x(x);
        self.eval_slice(i, j, b)
    }

    #[inline]
    fn eval_slice(&self, i: usize, j: usize, b: f64) -> f64 {
        let s = self.slice(i);
        if b == 0.0 {
            s[j]
        } else if b == 1.0 {
            s[j + 1]
        } else {
            (1.0 - b) * s[j] + b * s[j + 1]
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Node-wise product of two fields on the same grid.
    pub fn product(&self, other: &SampledField) -> Result<SampledField> {
        if self.grid != other.grid {
            return Err(Error::InvalidField("fields live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self::from_raw(self.grid, values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpaceTimeGrid {
        SpaceTimeGrid::new(1.0, -1.0, 1.0, 4, 8).unwrap()
    }

    #[test]
    fn nodes_are_exact() {
        let f = SampledField::from_fn(grid(), |t, x| (3.0 * t).sin() + x.powi(3)).unwrap();
        let g = grid();
        for i in 0..=g.nt() {
            for j in 0..=g.nx() {
                assert_eq!(f.eval(g.t(i), g.x(j)), f.at(i, j));
            }
        }
    }

    #[test]
    fn bilinear_reproduces_bilinear_functions() {
        let f = SampledField::from_fn(grid(), |t, x| 1.0 + 2.0 * t - x + 0.5 * t * x).unwrap();
        for &(t, x) in &[(0.13, 0.27), (0.9, -0.91), (0.5, 0.0)] {
            let exact = 1.0 + 2.0 * t - x + 0.5 * t * x;
            assert!((f.eval(t, x) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_extension_outside_window() {
        let f = SampledField::from_fn(grid(), |t, x| t + x).unwrap();
        assert_eq!(f.eval(0.5, 5.0), f.at(2, 8));
        assert_eq!(f.eval(0.5, -5.0), f.at(2, 0));
    }

    #[test]
    fn rejects_non_finite() {
        let mut v = vec![0.0; grid().node_count()];
        v[7] = f64::NAN;
        assert!(SampledField::new(grid(), v).is_err());
        assert!(SampledField::new(grid(), vec![0.0; 3]).is_err());
    }
}
