//! Exponential-tailed noise: GIG and GH laws.

mod cdf;
mod density;
mod mgf;
mod params;
mod sampler;

use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use density::{gh_density, gig_density};
pub use params::{Family, GhParams, GigParams, ParamRecord};
pub use sampler::sample_gig;

use crate::error::{precondition, Error, Result};
use crate::quad::{self, Tolerance};
use crate::rng;
use cdf::CdfGrid;

/// A GIG or GH law with cached normalizer and probability grid.
#[derive(Debug, Serialize, Deserialize)]
#[serde(try_from = "Family", into = "Family")]
pub struct NoiseDistribution {
    family: Family,
    ln_norm: f64,
    beta: Option<f64>,
    center: f64,
    scale: f64,
    #[serde(skip)]
    grid: OnceLock<CdfGrid>,
}

impl Clone for NoiseDistribution {
    fn clone(&self) -> Self {
        Self {
            family: self.family,
            ln_norm: self.ln_norm,
            beta: self.beta,
            center: self.center,
            scale: self.scale,
            grid: self.grid.clone(),
        }
    }
}

impl PartialEq for NoiseDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
    }
}

impl TryFrom<Family> for NoiseDistribution {
    type Error = Error;
    fn try_from(f: Family) -> Result<Self> {
        Self::new(f)
    }
}

impl From<NoiseDistribution> for Family {
    fn from(d: NoiseDistribution) -> Self {
        d.family
    }
}

/// Location and spread used to place quadrature breakpoints.
fn gig_shape(p: &GigParams) -> (f64, f64) {
    let (l, t, s) = (p.lambda, p.tau, p.psi);
    if t == 0.0 {
        let mean = 2.0 * l / s;
        return (mean, 2.0 * l.sqrt() / s);
    }
    if s == 0.0 {
        let k = -l;
        let theta = 0.5 * t;
        let mode = theta / (k + 1.0);
        let spread = if k > 2.0 { theta / ((k - 1.0) * (k - 2.0).sqrt()) } else { theta };
        return (mode, spread.max(mode));
    }
    let w = (t * s).sqrt();
    let r = (t / s).sqrt();
    let k0 = crate::special::ln_bessel_k(l, w);
    let m1 = r * (crate::special::ln_bessel_k(l + 1.0, w) - k0).exp();
    let m2 = r * r * (crate::special::ln_bessel_k(l + 2.0, w) - k0).exp();
    let var = (m2 - m1 * m1).max(1e-300);
    (m1, var.sqrt())
}

impl NoiseDistribution {
    pub fn new(family: Family) -> Result<Self> {
        family.validate()?;
        let gig = family.gig();
        let ln_norm = density::gig_ln_norm(&gig);
        if !ln_norm.is_finite() {
            return Err(Error::Numerical("GIG normalizing constant is not finite".into()));
        }
        let (gc, gs) = gig_shape(&gig);
        let (beta, center, scale) = match family {
            Family::Gig(p) => ((p.psi > 0.0).then_some(0.5 * p.psi), gc, gs),
            Family::Gh(p) => {
                let beta = (p.psi > 0.0).then(|| mgf::gh_right_index(&p));
                let inv_gamma = p.psi == 0.0;
                let center = if inv_gamma { p.mu } else { p.mu + p.gamma * gc };
                let scale = if inv_gamma {
                    (gc.sqrt() + p.gamma.abs() * gc).max(1e-3)
                } else {
                    (gc + p.gamma * p.gamma * gs * gs).sqrt().max(1e-3)
                };
                (beta, center, scale)
            }
        };
        Ok(Self { family, ln_norm, beta, center, scale, grid: OnceLock::new() })
    }

    pub fn gig(p: GigParams) -> Result<Self> {
        Self::new(Family::Gig(p))
    }

    pub fn gh(p: GhParams) -> Result<Self> {
        Self::new(Family::Gh(p))
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Whether the support is the positive half-line.
    pub fn is_positive(&self) -> bool {
        matches!(self.family, Family::Gig(_))
    }

    pub(crate) fn center(&self) -> f64 {
        self.center
    }

    pub(crate) fn scale(&self) -> f64 {
        self.scale
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        match &self.family {
            Family::Gig(p) => density::gig_ln_pdf(p, self.ln_norm, x),
            Family::Gh(p) => density::gh_ln_pdf(p, self.ln_norm, x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// Right-tail exponential index `beta`.
    pub fn tail_index(&self) -> Result<f64> {
        self.beta.ok_or_else(|| {
            Error::UnsupportedTail("psi = 0 gives a polynomial right tail with no exponential index".into())
        })
    }

    /// `E[exp(tY)]`; [`Error::Divergent`] when the integral is infinite.
    pub fn mgf(&self, t: f64) -> Result<f64> {
        self.ln_mgf(t).map(f64::exp)
    }

    /// `log E[exp(tY)]`.
    pub fn ln_mgf(&self, t: f64) -> Result<f64> {
        mgf::ln_mgf(self, t)
    }

    fn grid(&self) -> &CdfGrid {
        self.grid.get_or_init(|| CdfGrid::build(self))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.grid().cdf(self, x)
    }

    /// Survival function `P(Y > x)`, accurate far into the right tail.
    pub fn sf(&self, x: f64) -> f64 {
        self.grid().sf(self, x)
    }

    pub fn quantile(&self, u: f64) -> Result<f64> {
        self.grid().quantile(self, u)
    }

    /// One draw.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.family {
            Family::Gig(p) => sample_gig(p, rng),
            Family::Gh(p) => {
                let r = sample_gig(&self.family.gig(), rng);
                let w: f64 = rng.sample(rand_distr::StandardNormal);
                p.mu + p.gamma * r + r.sqrt() * w
            }
        }
    }

    /// `n` i.i.d. draws from a single stream.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }

    /// `n` draws split over fixed-size chunks, chunk `c` using sub-stream `c`
    /// of `seed`. Output does not depend on the thread count.
    pub fn sample_parallel(&self, seed: u64, n: usize) -> Vec<f64> {
        let parts: Vec<Vec<f64>> = rng::chunks(n)
            .collect::<Vec<_>>()
            .into_par_iter()
            .enumerate()
            .map(|(c, (_, len))| self.sample(&mut rng::substream(seed, c as u64), len))
            .collect();
        parts.concat()
    }

    /// Mean and variance by quadrature of the density.
    pub fn moments(&self) -> Result<(f64, f64)> {
        let tol = Tolerance::new(1e-14, 1e-12);
        let m = |k: i32| self.integrate_density(|x| x.powi(k), tol);
        let m1 = m(1)?;
        let m2 = m(2)?;
        Ok((m1, m2 - m1 * m1))
    }

    /// `int g(x) f(x) dx` over the support.
    pub fn integrate_density<G: Fn(f64) -> f64>(&self, g: G, tol: Tolerance) -> Result<f64> {
        let h = |x: f64| {
            let d = self.pdf(x);
            if d == 0.0 {
                0.0
            } else {
                g(x) * d
            }
        };
        let est = if self.is_positive() {
            let c = self.center.max(1e-12);
            quad::combine(
                &[quad::integrate(h, 0.0, c, tol), quad::integrate_upper(h, c, self.scale, tol)],
                tol,
            )
        } else {
            quad::integrate_line(h, self.center, self.scale, tol)
        };
        if !est.value.is_finite() {
            return Err(Error::Numerical("density integral is not finite".into()));
        }
        Ok(est.value)
    }
}

/// Asymptotic right-quantile offset of `Y + sum a_i Y_i` relative to `Y`:
/// `(1/beta) log prod_i M(a_i beta)` for coefficients in `[0, 1)`.
pub fn quantile_shift(base: &NoiseDistribution, addend_coeffs: &[f64]) -> Result<f64> {
    if let Some(&a) = addend_coeffs.iter().find(|&&a| !(a < 1.0)) {
        return precondition(format!("addend coefficient {a} must be < 1"));
    }
    if let Some(&a) = addend_coeffs.iter().find(|&&a| a < 0.0) {
        return crate::error::param(format!("addend coefficient {a} is negative"));
    }
    let beta = base.tail_index()?;
    let mut total = 0.0;
    for &a in addend_coeffs {
        total += base.ln_mgf(a * beta)?;
    }
    Ok(total / beta)
}
