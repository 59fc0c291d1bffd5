use exdep::approx::{ou_coefficients, partition_1d, PartitionMode};
use exdep::kernels::ou_eta;
use exdep::lintrans::eta_closed_form;
use serde::Deserialize;

use crate::error::{usage, CliResult};
use crate::output::{csv_writer, finish, load_params};
use crate::Common;

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub a: f64,
    pub s1: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub deltas: Vec<f64>,
    /// Lags `h = s2 - s1`; defaults to steps of 0.02 up to `T - s1`.
    pub h: Option<Vec<f64>>,
}

impl Default for Params {
    fn default() -> Self {
        Self { a: 0.2, s1: 0.0, t: 4.0, deltas: vec![0.4, 0.2, 0.05], h: None }
    }
}

pub fn run(c: &Common) -> CliResult<Vec<u8>> {
    let p: Params = load_params(c.params.as_deref())?;
    let span = p.t - p.s1;
    if !(p.a > 0.0) || !(span > 0.0) || p.deltas.iter().any(|&d| !(d > 0.0)) {
        return usage("need a > 0, T > s1 and positive deltas");
    }
    let hs = p.h.clone().unwrap_or_else(|| {
        let steps = (span / 0.02).round() as usize;
        (1..=steps).map(|i| (0.02 * i as f64).min(span)).collect()
    });
    let mut w = csv_writer(&["delta", "h", "eta_n", "eta_limit"])?;
    for &delta in &p.deltas {
        let part = partition_1d(p.s1 - p.t, p.t, PartitionMode::Equidistant(delta))?;
        let mut sup = 0.0f64;
        for &h in &hs {
            let eta = eta_closed_form(&ou_coefficients(p.a, p.s1, p.s1 + h, &part)?)?;
            let limit = ou_eta(p.a, h);
            sup = sup.max(eta - limit);
            w.write_record([delta, h, eta, limit].map(|v| v.to_string()))?;
        }
        eprintln!("delta {delta}: sup-gap {sup:.5}");
    }
    finish(w)
}
