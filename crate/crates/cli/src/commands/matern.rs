use exdep::approx::{fem_assemble, fem_assemble_fractional, fem_coefficients, integral_coefficients, lattice_mesh_2d, FemSystem, Mesh2D};
use exdep::estimate::all_pairs;
use exdep::kernels::{limit_eta_conjecture, limit_eta_symmetric, Kernel};
use exdep::lintrans::{eta_closed_form, CoefficientMatrix};
use serde::Deserialize;

use super::{distance, random_sites};
use crate::error::{usage, CliResult};
use crate::output::{csv_writer, finish, lattice_side, load_params};
use crate::Common;

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub kappa: f64,
    pub alphas: Vec<f64>,
    pub sites: usize,
    /// Lattice rings added around the unit square; defaults to half the side.
    pub extension: Option<usize>,
    pub lumped: bool,
    /// Methods to run, any of `integral` and `fem`.
    pub methods: Vec<String>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            kappa: 2.0,
            alphas: vec![2.0, 3.0, 4.0, 5.0],
            sites: 50,
            extension: None,
            lumped: true,
            methods: vec!["integral".into(), "fem".into()],
        }
    }
}

const FULL_SCALE_SITES: usize = 225;

fn fem_system(mesh: &Mesh2D, kappa: f64, alpha: f64, lumped: bool) -> exdep::Result<FemSystem> {
    if alpha.fract() == 0.0 && (alpha as u32) % 2 == 0 && (2..=6).contains(&(alpha as u32)) {
        fem_assemble(mesh, kappa, alpha as u32, lumped)
    } else {
        fem_assemble_fractional(mesh, kappa, alpha, lumped)
    }
}

pub fn run(c: &Common) -> CliResult<Vec<u8>> {
    let p: Params = load_params(c.params.as_deref())?;
    let seed = c.require_seed()?;
    let side = lattice_side(c.mesh_nodes.unwrap_or(1600))?;
    let n_sites = if c.paper_scale { FULL_SCALE_SITES } else { p.sites };
    if n_sites < 2 {
        return usage("need at least two sites");
    }
    if let Some(m) = p.methods.iter().find(|m| *m != "integral" && *m != "fem") {
        return usage(format!("unknown method {m:?}"));
    }
    let mesh = lattice_mesh_2d([0.0, 0.0, 1.0, 1.0], side, p.extension.unwrap_or(side / 2))?;
    let sites = random_sites(n_sites, seed);
    let pairs = all_pairs(sites.len());
    let mut w = csv_writer(&["alpha", "method", "h", "eta", "eta_thm1", "eta_conjecture"])?;
    for &alpha in &p.alphas {
        let kernel = Kernel::matern(p.kappa, alpha, 2)?;
        for method in &p.methods {
            let a: CoefficientMatrix = match method.as_str() {
                "integral" => integral_coefficients(&kernel, &sites, &mesh)?,
                _ => fem_coefficients(&fem_system(&mesh, p.kappa, alpha, p.lumped)?, &mesh, &sites)?,
            };
            for &(i, j) in &pairs {
                let h = distance(sites[i], sites[j]);
                let eta = eta_closed_form(&a.pair(i, j)?)?;
                let thm1 = if kernel.convex() { limit_eta_symmetric(&kernel, h)?.to_string() } else { String::new() };
                let conj = limit_eta_conjecture(&kernel, h)?.0;
                w.write_record([alpha.to_string(), method.clone(), h.to_string(), eta.to_string(), thm1, conj.to_string()])?;
            }
        }
    }
    finish(w)
}
