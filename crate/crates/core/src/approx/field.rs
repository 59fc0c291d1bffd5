use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Gamma, InverseGaussian, StandardNormal};
use rayon::prelude::*;

use super::fem::{fem_rows, FemSystem};
use super::mesh::{Mesh2D, Point};
use crate::error::{param, Error, Result};
use crate::exptail::GhParams;
use crate::lintrans::CoefficientMatrix;
use crate::rng::{chunks, substream};

/// Linear map from independent cell values to site values.
#[derive(Debug, Clone)]
pub struct FieldModel {
    weights: Vec<Vec<f64>>,
    areas: Vec<f64>,
}

impl FieldModel {
    /// Finite-element field: weights `K^{-1} phi(s_j)`, cells are dual cells.
    pub fn fem(system: &FemSystem, mesh: &Mesh2D, sites: &[Point]) -> Result<Self> {
        Ok(Self { weights: fem_rows(system, mesh, sites)?, areas: system.dual_areas().to_vec() })
    }

    /// Linear model `X = A Y` with one cell of the given area per column (unit areas by default).
    pub fn matrix(a: &CoefficientMatrix, areas: Option<Vec<f64>>) -> Result<Self> {
        let areas = areas.unwrap_or_else(|| vec![1.0; a.cols()]);
        if areas.len() != a.cols() || areas.iter().any(|v| !(*v > 0.0)) {
            return param("cell areas must be positive, one per column");
        }
        Ok(Self { weights: (0..a.rows()).map(|r| a.row(r).to_vec()).collect(), areas })
    }

    pub fn sites(&self) -> usize {
        self.weights.len()
    }

    pub fn cells(&self) -> usize {
        self.areas.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SimulationOptions {
    /// Replace every mixing value by 1, leaving a Gaussian field.
    pub unit_mixing: bool,
}

/// Row-major `n x m` sample matrix, one column per site.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl SampleMatrix {
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.data[r * self.cols + c]).collect()
    }

    /// CSV with header `site_1,...,site_m`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record((1..=self.cols).map(|i| format!("site_{i}")))?;
        for r in 0..self.rows {
            out.write_record(self.row(r).iter().map(|v| v.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }
}

enum Mixing {
    InverseGaussian(Vec<InverseGaussian<f64>>),
    Gamma(Vec<Gamma<f64>>),
}

impl Mixing {
    /// Per-cell mixing laws with the additive parameter scaled by cell area.
    fn new(noise: &GhParams, areas: &[f64]) -> Result<Self> {
        noise.validate()?;
        let unsupported = || {
            Error::Unsupported(format!(
                "mixing law GIG({}, {}, {}) is not closed under convolution; use inverse Gaussian or gamma",
                noise.lambda, noise.tau, noise.psi
            ))
        };
        if noise.lambda == -0.5 && noise.tau > 0.0 && noise.psi > 0.0 {
            // GIG(-1/2, tau, psi) is IG(mean sqrt(tau/psi), shape tau); sqrt(tau) is additive.
            let laws = areas
                .iter()
                .map(|&a| {
                    let tau = noise.tau * a * a;
                    InverseGaussian::new((tau / noise.psi).sqrt(), tau)
                        .map_err(|e| Error::Parameter(format!("inverse Gaussian cell law: {e}")))
                })
                .collect::<Result<_>>()?;
            Ok(Mixing::InverseGaussian(laws))
        } else if noise.tau == 0.0 && noise.lambda > 0.0 && noise.psi > 0.0 {
            let laws = areas
                .iter()
                .map(|&a| {
                    Gamma::new(noise.lambda * a, 2.0 / noise.psi)
                        .map_err(|e| Error::Parameter(format!("gamma cell law: {e}")))
                })
                .collect::<Result<_>>()?;
            Ok(Mixing::Gamma(laws))
        } else {
            Err(unsupported())
        }
    }

    fn draw<R: Rng + ?Sized>(&self, cell: usize, rng: &mut R) -> f64 {
        match self {
            Mixing::InverseGaussian(l) => l[cell].sample(rng),
            Mixing::Gamma(l) => l[cell].sample(rng),
        }
    }
}

/// Simulates `n` replicates of `u(s_j) = sum_i w_ji (mu + gamma v_i + sqrt(v_i) z_i)`,
/// `v_i` drawn from the mixing law of cell `i`. Deterministic per seed.
pub fn simulate_field(
    model: &FieldModel,
    noise: &GhParams,
    n: usize,
    seed: u64,
    options: SimulationOptions,
) -> Result<SampleMatrix> {
    let mixing = Mixing::new(noise, &model.areas)?;
    let m = model.sites();
    let cells = model.cells();
    let blocks: Vec<(usize, usize)> = chunks(n).collect();
    let parts: Vec<Vec<f64>> = blocks
        .par_iter()
        .enumerate()
        .map(|(k, &(_, len))| {
            let mut rng = substream(seed, k as u64);
            let mut out = vec![0.0; len * m];
            let mut b = vec![0.0; cells];
            for r in 0..len {
                for (i, bi) in b.iter_mut().enumerate() {
                    let v = if options.unit_mixing { 1.0 } else { mixing.draw(i, &mut rng) };
                    let z: f64 = rng.sample(StandardNormal);
                    *bi = noise.mu + noise.gamma * v + v.sqrt() * z;
                }
                for (j, w) in model.weights.iter().enumerate() {
                    out[r * m + j] = w.iter().zip(&b).map(|(x, y)| x * y).sum();
                }
            }
            out
        })
        .collect();
    Ok(SampleMatrix { rows: n, cols: m, data: parts.concat() })
}
