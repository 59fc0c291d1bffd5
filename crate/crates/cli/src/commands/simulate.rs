use exdep::approx::{fem_assemble, fem_assemble_fractional, lattice_mesh_2d, simulate_field, FieldModel, SimulationOptions};
use exdep::estimate::{all_pairs, chi_curve, BivariateSample};
use exdep::exptail::{Family, GhParams};
use serde::Deserialize;

use super::{distance, random_sites};
use crate::error::{usage, CliResult};
use crate::output::{csv_writer, finish, lattice_side, load_params};
use crate::Common;

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// GH noise of the field.
    pub noise: Family,
    pub kappa: f64,
    pub alpha: f64,
    pub sites: usize,
    pub q: Vec<f64>,
    pub extension: Option<usize>,
    pub lumped: bool,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            noise: Family::Gh(GhParams::nig(1.0, 1.0, -1.0, 1.0).expect("valid NIG")),
            kappa: 2.0,
            alpha: 2.0,
            sites: 20,
            q: vec![0.95, 0.975, 0.99],
            extension: None,
            lumped: true,
        }
    }
}

const DESK_SAMPLES: usize = 100_000;
const FULL_SCALE_SAMPLES: usize = 50_000_000;

pub fn run(c: &Common) -> CliResult<Vec<u8>> {
    let p: Params = load_params(c.params.as_deref())?;
    let seed = c.require_seed()?;
    let Family::Gh(noise) = p.noise else { return usage("noise must be a GH family") };
    let n = c.samples.unwrap_or(if c.paper_scale { FULL_SCALE_SAMPLES } else { DESK_SAMPLES });
    let side = lattice_side(c.mesh_nodes.unwrap_or(400))?;
    if p.sites < 2 || p.q.iter().any(|&q| !(q > 0.0 && q < 1.0)) {
        return usage("need at least two sites and levels q in (0, 1)");
    }
    let mut w = csv_writer(&["pair_id", "h", "q", "chi_hat", "se"])?;
    if n == 0 {
        return finish(w);
    }
    let mesh = lattice_mesh_2d([0.0, 0.0, 1.0, 1.0], side, p.extension.unwrap_or(side / 2))?;
    let system = if p.alpha.fract() == 0.0 && [2.0, 4.0, 6.0].contains(&p.alpha) {
        fem_assemble(&mesh, p.kappa, p.alpha as u32, p.lumped)?
    } else {
        fem_assemble_fractional(&mesh, p.kappa, p.alpha, p.lumped)?
    };
    // Sites use a sub-stream distinct from the field draws.
    let sites = random_sites(p.sites, seed ^ 0x0051_57e5);
    let model = FieldModel::fem(&system, &mesh, &sites)?;
    let samples = simulate_field(&model, &noise, n, seed, SimulationOptions::default())?;
    let columns: Vec<Vec<f64>> = (0..sites.len()).map(|j| samples.column(j)).collect();
    for (id, (i, j)) in all_pairs(sites.len()).into_iter().enumerate() {
        let s = BivariateSample::new(columns[i].clone(), columns[j].clone())?;
        let h = distance(sites[i], sites[j]);
        for e in chi_curve(&s, &p.q)?.points {
            w.write_record([id.to_string(), h.to_string(), e.q.to_string(), e.chi.to_string(), e.std_error.to_string()])?;
        }
    }
    finish(w)
}
