use exdep::estimate::{empirical_chi, BivariateSample};
use rand::Rng;
use rand_distr::{Pareto, StandardNormal};
use serde::Deserialize;

use crate::error::{usage, CliResult};
use crate::output::{csv_writer, finish, load_params};
use crate::Common;

/// `X_j = X / n + eps_j` with `X` Pareto and `eps_j` standard normal.
#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub n: Vec<f64>,
    /// Pareto tail index of `X`.
    pub index: f64,
    pub q: Vec<f64>,
}

impl Default for Params {
    fn default() -> Self {
        Self { n: vec![1.0, 10.0, 100.0], index: 1.0, q: vec![0.99, 0.999] }
    }
}

const DESK_SAMPLES: usize = 1_000_000;

/// Rows per n, then `n = inf` for `eps` alone. The `chi_theory` column is the
/// limit in q: 1 for every finite n, 0 without the common term.
pub fn run(c: &Common) -> CliResult<Vec<u8>> {
    let p: Params = load_params(c.params.as_deref())?;
    let seed = c.require_seed()?;
    let size = c.samples.unwrap_or(DESK_SAMPLES);
    if !(p.index > 0.0) || p.n.iter().any(|&n| !(n > 0.0)) || size < 2 {
        return usage("need a positive index, positive n values and at least two samples");
    }
    let pareto = Pareto::new(1.0, p.index).map_err(|e| crate::error::CliError::Usage(e.to_string()))?;
    let mut rng = exdep::rng::stream(seed);
    let mut draw = |n: usize| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut x = Vec::with_capacity(n);
        let mut e1 = Vec::with_capacity(n);
        let mut e2 = Vec::with_capacity(n);
        for _ in 0..n {
            x.push(rng.sample(pareto));
            e1.push(rng.sample::<f64, _>(StandardNormal));
            e2.push(rng.sample::<f64, _>(StandardNormal));
        }
        (x, e1, e2)
    };
    let (x, e1, e2) = draw(size);
    let mut w = csv_writer(&["n", "q", "chi_hat", "se", "chi_theory"])?;
    let scales = p.n.iter().map(|&n| (n.to_string(), Some(n))).chain([("inf".to_string(), None)]);
    for (label, n) in scales {
        let common: Vec<f64> = x.iter().map(|&v| n.map_or(0.0, |n| v / n)).collect();
        let s = BivariateSample::new(
            common.iter().zip(&e1).map(|(c, e)| c + e).collect(),
            common.iter().zip(&e2).map(|(c, e)| c + e).collect(),
        )?;
        let theory = if n.is_some() { "1" } else { "0" };
        for &q in &p.q {
            let e = empirical_chi(&s, q)?;
            w.write_record([label.clone(), q.to_string(), e.chi.to_string(), e.std_error.to_string(), theory.into()])?;
        }
    }
    finish(w)
}
