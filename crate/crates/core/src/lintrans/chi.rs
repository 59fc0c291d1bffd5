use rand::Rng;
use rayon::prelude::*;

use super::matrix::{classify, CoefficientMatrix, Regime};
use crate::error::{precondition, Error, Result};
use crate::exptail::{GhParams, NoiseDistribution};
use crate::quad::{self, Tolerance};
use crate::rng;

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Streaming mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(self, other: Welford) -> Welford {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        Welford {
            n,
            mean: self.mean + d * nb / n as f64,
            m2: self.m2 + other.m2 + d * d * na * nb / n as f64,
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

struct Residuals<'a> {
    dist: &'a NoiseDistribution,
    beta: f64,
    c1: Vec<f64>,
    c2: Vec<f64>,
    lm1: f64,
    lm2: f64,
}

impl<'a> Residuals<'a> {
    fn new(a: &CoefficientMatrix, dist: &'a NoiseDistribution) -> Result<Self> {
        let split = classify(a)?;
        if split.regime != Regime::AsymptoticDependence {
            return Err(Error::Regime {
                expected: Regime::AsymptoticDependence.to_string(),
                found: split.regime.to_string(),
            });
        }
        let beta = dist.tail_index()?;
        let [c1, c2] = split.residual;
        let ln_m = |c: &[f64]| -> Result<f64> { c.iter().map(|&w| dist.ln_mgf(w * beta)).sum() };
        let (lm1, lm2) = (ln_m(&c1)?, ln_m(&c2)?);
        Ok(Self { dist, beta, c1, c2, lm1, lm2 })
    }

    fn draw<R: Rng + ?Sized>(&self, r: &mut R) -> f64 {
        let (mut z1, mut z2) = (0.0, 0.0);
        for (w1, w2) in self.c1.iter().zip(&self.c2) {
            let y = self.dist.sample_one(r);
            z1 += w1 * y;
            z2 += w2 * y;
        }
        (self.beta * z1 - self.lm1).min(self.beta * z2 - self.lm2).exp()
    }
}

/// Tail dependence coefficient of an asymptotically dependent model by
/// Monte Carlo over the residual variables. Chunk `c` of the draws uses
/// sub-stream `c` of `seed`; chunk summaries merge in chunk order.
pub fn chi_mc(a: &CoefficientMatrix, dist: &NoiseDistribution, n_samples: usize, seed: u64) -> Result<McEstimate> {
    let res = Residuals::new(a, dist)?;
    if res.c1.is_empty() {
        return Ok(McEstimate { value: 1.0, std_error: 0.0, samples: n_samples });
    }
    let chunks: Vec<(usize, usize)> = rng::chunks(n_samples).collect();
    let parts: Vec<Welford> = chunks
        .into_par_iter()
        .enumerate()
        .map(|(k, (_, len))| {
            let mut r = rng::substream(seed, k as u64);
            let mut acc = Welford::default();
            for _ in 0..len {
                acc.push(res.draw(&mut r));
            }
            acc
        })
        .collect();
    let acc = parts.into_iter().fold(Welford::default(), Welford::merge);
    Ok(McEstimate { value: acc.mean(), std_error: acc.std_error(), samples: n_samples })
}

/// Single-stream variant of [`chi_mc`] drawing from `r`.
pub fn chi_mc_stream<R: Rng + ?Sized>(
    a: &CoefficientMatrix,
    dist: &NoiseDistribution,
    n_samples: usize,
    r: &mut R,
) -> Result<McEstimate> {
    let res = Residuals::new(a, dist)?;
    if res.c1.is_empty() {
        return Ok(McEstimate { value: 1.0, std_error: 0.0, samples: n_samples });
    }
    let mut acc = Welford::default();
    for _ in 0..n_samples {
        acc.push(res.draw(r));
    }
    Ok(McEstimate { value: acc.mean(), std_error: acc.std_error(), samples: n_samples })
}

fn symmetric_gh(params: &GhParams) -> Result<NoiseDistribution> {
    if !(params.psi > 0.0) || params.gamma != 0.0 {
        return Err(Error::Unsupported("requires a symmetric GH law with psi > 0 and gamma = 0".into()));
    }
    NoiseDistribution::gh(*params)
}

/// `int_lo^hi exp(b y - ln_m) f(y) dy` with either end possibly infinite.
fn tilted_mass(d: &NoiseDistribution, b: f64, ln_m: f64, lo: f64, hi: f64) -> f64 {
    let g = |y: f64| {
        let v = b * y + d.ln_pdf(y) - ln_m;
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            v.exp()
        }
    };
    let tol = Tolerance::new(1e-13, 1e-11);
    let s = d.scale();
    // Breakpoints around the bulk keep the infinite-range maps well scaled.
    let mut cuts: Vec<f64> = [-8.0, -2.0, 0.0, 2.0, 8.0].iter().map(|k| d.center() + k * s).collect();
    cuts.retain(|&c| c > lo && c < hi);
    let mut pts = vec![lo];
    pts.extend(cuts);
    pts.push(hi);
    let mut parts = Vec::new();
    for w in pts.windows(2) {
        let (a, c) = (w[0], w[1]);
        let est = if a == f64::NEG_INFINITY {
            quad::integrate_lower(g, c, s, tol)
        } else if c == f64::INFINITY {
            quad::integrate_upper(g, a, s, tol)
        } else {
            quad::integrate(g, a, c, tol)
        };
        parts.push(est);
    }
    quad::combine(&parts, tol).value
}

/// Two-piece integral: weight `b_hi` below the threshold `k`, `b_lo` above.
fn two_piece(d: &NoiseDistribution, b_hi: f64, b_lo: f64, k: f64) -> Result<f64> {
    let (lm_hi, lm_lo) = (d.ln_mgf(b_hi)?, d.ln_mgf(b_lo)?);
    let chi = tilted_mass(d, b_hi, lm_hi, f64::NEG_INFINITY, k) + tilted_mass(d, b_lo, lm_lo, k, f64::INFINITY);
    Ok(chi)
}

/// Tail dependence coefficient of `(Y_1 + a12 Y_2, Y_1 + a22 Y_2)` for i.i.d.
/// symmetric GH noise, by quadrature.
pub fn chi_gh_two(a12: f64, a22: f64, params: &GhParams) -> Result<f64> {
    if !(0.0..1.0).contains(&a12) || !(0.0..1.0).contains(&a22) {
        return precondition(format!("coefficients must lie in [0, 1), got {a12} and {a22}"));
    }
    let d = symmetric_gh(params)?;
    if a12 == a22 {
        return Ok(1.0);
    }
    let s = params.psi.sqrt();
    let (hi, lo) = if a22 > a12 { (a22, a12) } else { (a12, a22) };
    let (b_hi, b_lo) = (hi * s, lo * s);
    let k = (d.ln_mgf(b_hi)? - d.ln_mgf(b_lo)?) / (b_hi - b_lo);
    Ok(two_piece(&d, b_hi, b_lo, k)?.clamp(0.0, 1.0))
}

/// Limit of [`chi_gh_two`] as `a22` increases to one.
pub fn chi_limit_a22(a12: f64, params: &GhParams) -> Result<f64> {
    if !(0.0..1.0).contains(&a12) {
        return precondition(format!("a12 must lie in [0, 1), got {a12}"));
    }
    let d = symmetric_gh(params)?;
    if params.lambda >= 0.0 {
        return Ok(0.0);
    }
    let s = params.psi.sqrt();
    let (b_hi, b_lo) = (s, a12 * s);
    let k = (d.ln_mgf(b_hi)? - d.ln_mgf(b_lo)?) / (b_hi - b_lo);
    Ok(two_piece(&d, b_hi, b_lo, k)?.clamp(0.0, 1.0))
}
