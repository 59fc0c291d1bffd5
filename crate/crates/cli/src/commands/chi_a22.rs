use exdep::exptail::GhParams;
use exdep::lintrans::{chi_gh_two, chi_limit_a22};
use serde::Deserialize;

use crate::error::{usage, CliError, CliResult};
use crate::output::{csv_writer, finish, load_params};
use crate::Common;

#[derive(Debug, Clone, Copy, Deserialize)]
pub struct Mixing {
    pub lambda: f64,
    pub tau: f64,
    pub psi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub a12: f64,
    /// Defaults to the multiples of 0.01 in `(a12, 1)`.
    pub a22: Option<Vec<f64>>,
    pub sets: Vec<Mixing>,
}

impl Default for Params {
    fn default() -> Self {
        let m = |lambda, tau, psi| Mixing { lambda, tau, psi };
        let mut sets: Vec<Mixing> = [-0.5, 1.0, 5.0, 30.0].iter().map(|&l| m(l, 1.0, 1.0)).collect();
        sets.extend([0.5, 1.0, 5.0, 30.0].iter().map(|&t| m(1.0, t, 1.0)));
        sets.extend([0.5, 1.0, 5.0, 30.0].iter().map(|&p| m(1.0, 1.0, p)));
        Self { a12: 0.3, a22: None, sets }
    }
}

pub fn run(c: &Common) -> CliResult<Vec<u8>> {
    let p: Params = load_params(c.params.as_deref())?;
    let grid = p.a22.clone().unwrap_or_else(|| (1..100).map(|i| i as f64 / 100.0).filter(|&a| a > p.a12).collect());
    if grid.iter().any(|&a| !(a > p.a12 && a < 1.0)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return usage("a22 grid must be increasing inside (a12, 1)");
    }
    let mut w = csv_writer(&["lambda", "tau", "psi", "a22", "chi"])?;
    for s in &p.sets {
        let gh = GhParams::new(s.lambda, s.tau, s.psi, 0.0, 0.0)?;
        let curve = grid.iter().map(|&a22| chi_gh_two(p.a12, a22, &gh)).collect::<exdep::Result<Vec<f64>>>()?;
        if curve.windows(2).any(|v| v[1] >= v[0]) {
            return Err(CliError::Model(exdep::Error::Numerical(format!(
                "chi curve for lambda={}, tau={}, psi={} is not strictly decreasing",
                s.lambda, s.tau, s.psi
            ))));
        }
        let limit = chi_limit_a22(p.a12, &gh)?;
        for (a22, chi) in grid.iter().zip(&curve).chain([(&1.0, &limit)]) {
            w.write_record([s.lambda, s.tau, s.psi, *a22, *chi].map(|v| v.to_string()))?;
        }
    }
    finish(w)
}
