//! CSV tables with fixed column order and 17 significant digits.

use std::fmt::Write as _;

use crate::compactness_lab::MemberReport;
use crate::flow::FlowMap;
use crate::transport::{DecayRow, TransportSolution};

/// `d.dddddddddddddddde±x`; `NaN` for missing entries.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn table(header: &str, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Columns `t,x,X,Xinv`.
pub fn flow_csv(flow: &FlowMap) -> String {
    let g = *flow.grid();
    table(
        "t,x,X,Xinv",
        (0..=g.nt()).flat_map(move |i| {
            (0..=g.nx()).map(move |j| {
                vec![num(g.t(i)), num(g.x(j)), num(flow.x_row(i)[j]), num(flow.xinv_row(i)[j])]
            })
        }),
    )
}

/// Columns `t,h,Y`.
pub fn levels_csv(flow: &FlowMap) -> String {
    let g = *flow.grid();
    table(
        "t,h,Y",
        (0..=g.nt()).flat_map(move |i| (0..=flow.nh()).map(move |k| vec![num(g.t(i)), num(flow.level(k)), num(flow.y(i, k))])),
    )
}

/// Columns `t,x,u`.
pub fn solution_csv(sol: &TransportSolution) -> String {
    let g = *sol.grid();
    let u = sol.u();
    table(
        "t,x,u",
        (0..=g.nt()).flat_map(move |i| (0..=g.nx()).map(move |j| vec![num(g.t(i)), num(g.x(j)), num(u.at(i, j))])),
    )
}

/// Columns `eps,D,boundary_gap`.
pub fn decay_csv(rows: &[DecayRow]) -> String {
    table("eps,D,boundary_gap", rows.iter().map(|r| vec![num(r.eps), num(r.d), num(r.boundary_gap)]))
}

/// Columns `test_id,residual`.
pub fn residuals_csv(residuals: &[f64]) -> String {
    table("test_id,residual", residuals.iter().enumerate().map(|(k, r)| vec![k.to_string(), num(*r)]))
}

/// Columns `n,C1_meas,C2_meas,bmax_meas,TV_b,modulus_ratio,sup_dist_to_id`.
pub fn family_csv(rows: &[MemberReport]) -> String {
    table(
        "n,C1_meas,C2_meas,bmax_meas,TV_b,modulus_ratio,sup_dist_to_id",
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                num(r.c1_meas),
                num(r.c2_meas),
                num(r.bmax_meas),
                num(r.tv_b),
                num(r.modulus_ratio),
                num(r.sup_dist_to_id),
            ]
        }),
    )
}

/// Columns `t,value` for an observable time series.
pub fn series_csv(name: &str, times: &[f64], values: &[f64]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "t,{name}");
    for (t, v) in times.iter().zip(values) {
        let _ = writeln!(out, "{},{}", num(*t), num(*v));
    }
    out
}
