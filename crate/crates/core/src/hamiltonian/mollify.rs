use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianField;

/// The standard `C∞` bump `exp(-1 / (1 - s²))` on `(-1, 1)`.
pub fn standard_bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// `H * ω_ε` on `[ε, T-ε] x [x_min+ε, x_max-ε]`, stored at the parent
/// grid's nodes.
#[derive(Debug, Clone)]
pub struct MollifiedHamiltonian {
    eps: f64,
    rows: (usize, usize),
    cols: (usize, usize),
    dt: f64,
    dx: f64,
    values: Vec<f64>,
    report: MollifyReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MollifyReport {
    pub eps: f64,
    pub min_x_slope: f64,
    /// `sup |H_eps - H|` on the sub-window.
    pub sup_deviation: f64,
    /// `Lip(H) * eps`.
    pub deviation_bound: f64,
}

impl MollifiedHamiltonian {
    pub fn eps(&self) -> f64 {
        self.eps
    }
    /// Inclusive range of parent time indices covered.
    pub fn rows(&self) -> (usize, usize) {
        self.rows
    }
    /// Inclusive range of parent space indices covered.
    pub fn cols(&self) -> (usize, usize) {
        self.cols
    }
    pub fn report(&self) -> &MollifyReport {
        &self.report
    }

    fn width(&self) -> usize {
        self.cols.1 - self.cols.0 + 1
    }

    /// Value at parent node `(i, j)`; both must lie inside the sub-window.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        debug_assert!(self.contains(i, j));
        self.values[(i - self.rows.0) * self.width() + (j - self.cols.0)]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        (self.rows.0..=self.rows.1).contains(&i) && (self.cols.0..=self.cols.1).contains(&j)
    }

    /// `∂t H_eps` at `(i, j)`: centered differences inside, second-order
    /// one-sided differences on the first and last rows.
    pub fn dt(&self, i: usize, j: usize) -> f64 {
        let (r0, r1) = self.rows;
        let h = self.dt;
        if i > r0 && i < r1 {
            (self.at(i + 1, j) - self.at(i - 1, j)) / (2.0 * h)
        } else if i == r0 {
            (-3.0 * self.at(i, j) + 4.0 * self.at(i + 1, j) - self.at(i + 2, j)) / (2.0 * h)
        } else {
            (3.0 * self.at(i, j) - 4.0 * self.at(i - 1, j) + self.at(i - 2, j)) / (2.0 * h)
        }
    }

    /// `∂x H_eps` at `(i, j)`, same stencils as [`Self::dt`].
    pub fn dx(&self, i: usize, j: usize) -> f64 {
        let (c0, c1) = self.cols;
        let h = self.dx;
        if j > c0 && j < c1 {
            (self.at(i, j + 1) - self.at(i, j - 1)) / (2.0 * h)
        } else if j == c0 {
            (-3.0 * self.at(i, j) + 4.0 * self.at(i, j + 1) - self.at(i, j + 2)) / (2.0 * h)
        } else {
            (3.0 * self.at(i, j) - 4.0 * self.at(i, j - 1) + self.at(i, j - 2)) / (2.0 * h)
        }
    }
}

/// Normalized kernel weights at offsets `p * step` with `|p * step| < eps`.
fn kernel_weights(eps: f64, step: f64) -> Vec<f64> {
    let reach = (eps / step).ceil() as usize;
    let raw: Vec<f64> = (0..=2 * reach)
        .map(|k| standard_bump((k as f64 - reach as f64) * step / eps))
        .collect();
    let mass: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / mass).collect()
}

/// Convolves `H` with the product bump kernel of radius `eps`.
///
/// `H` is first extended to negative times by `H(-t, x) = H(t, x)`. The
/// kernel is sampled at the grid nodes and normalized to unit discrete
/// mass, so affine functions are reproduced exactly.
pub fn mollify(h: &HamiltonianField, eps: f64) -> Result<MollifiedHamiltonian> {
    let g = *h.grid();
    let (dt, dx) = (g.dt(), g.dx());
    if !(eps > 0.0) {
        return Err(Error::BadRadius { eps, reason: "must be positive".into() });
    }
    let finest = 3.0 * dt.max(dx);
    if eps < finest {
        return Err(Error::BadRadius {
            eps,
            reason: format!("kernel under-resolved; need eps >= 3 max(dt, dx) = {finest}"),
        });
    }
    let largest = (g.t_final() / 4.0).min(g.width() / 8.0);
    if eps > largest {
        return Err(Error::BadRadius {
            eps,
            reason: format!("too large for the window; need eps <= min(T/4, width/8) = {largest}"),
        });
    }

    // Index windows: t_i in [eps, T - eps], x_j in [x_min + eps, x_max - eps].
    let snap = 1e-9;
    let i0 = (eps / dt - snap).ceil() as usize;
    let i1 = g.nt() - i0;
    let j0 = (eps / dx - snap).ceil() as usize;
    let j1 = g.nx() - j0;

    let wt = kernel_weights(eps, dt);
    let wx = kernel_weights(eps, dx);
    let (rt, rx) = ((wt.len() - 1) / 2, (wx.len() - 1) / 2);

    // Time pass over the needed rows, then space pass.
    let reflected = |i: isize| -> usize { i.unsigned_abs().min(g.nt()) };
    let ncols = g.nx() + 1;
    let mut smoothed_t = vec![0.0; (i1 - i0 + 1) * ncols];
    for i in i0..=i1 {
        let row = &mut smoothed_t[(i - i0) * ncols..(i - i0 + 1) * ncols];
        for (p, w) in wt.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let src = reflected(i as isize + p as isize - rt as isize);
            for (out, v) in row.iter_mut().zip(h.values().slice(src)) {
                *out += w * v;
            }
        }
    }
    let width = j1 - j0 + 1;
    let mut values = vec![0.0; (i1 - i0 + 1) * width];
    for r in 0..=(i1 - i0) {
        let src = &smoothed_t[r * ncols..(r + 1) * ncols];
        for j in j0..=j1 {
            let mut acc = 0.0;
            for (q, w) in wx.iter().enumerate() {
                acc += w * src[j + q - rx];
            }
            values[r * width + (j - j0)] = acc;
        }
    }

    let mut min_slope = f64::INFINITY;
    let mut sup_dev = 0.0_f64;
    for r in 0..=(i1 - i0) {
        for c in 0..width {
            let v = values[r * width + c];
            sup_dev = sup_dev.max((v - h.at(i0 + r, j0 + c)).abs());
            if c + 1 < width {
                let s = (values[r * width + c + 1] - v) / dx;
                min_slope = min_slope.min(s);
                if !(s > 0.0) {
                    return Err(Error::SlopeViolation {
                        i: i0 + r,
                        j: j0 + c,
                        detail: format!("mollified Hamiltonian not increasing (slope {s})"),
                    });
                }
            }
        }
    }

    Ok(MollifiedHamiltonian {
        eps,
        rows: (i0, i1),
        cols: (j0, j1),
        dt,
        dx,
        values,
        report: MollifyReport {
            eps,
            min_x_slope: min_slope,
            sup_deviation: sup_dev,
            deviation_bound: h.lipschitz() * eps,
        },
    })
}
