//! Distribution and quantile functions from a cached probability grid.

use super::NoiseDistribution;
use crate::error::{domain, Error, Result};
use crate::quad::{self, Tolerance};

const GRID_POINTS: usize = 1024;
const TAIL_MASS: f64 = 1e-14;

fn tol() -> Tolerance {
    Tolerance { abs: 1e-17, rel: 1e-13, max_intervals: 4000 }
}

/// Probability masses at 1024 ordered abscissae, accumulated from both ends.
#[derive(Debug, Clone)]
pub(crate) struct CdfGrid {
    xs: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
}

fn piece(d: &NoiseDistribution, a: f64, b: f64) -> f64 {
    quad::integrate(|x| d.pdf(x), a, b, tol()).value
}

fn lower_mass(d: &NoiseDistribution, x: f64) -> f64 {
    if d.is_positive() {
        if !(x > 0.0) {
            return 0.0;
        }
        quad::integrate_lower(|u: f64| (d.ln_pdf(u.exp()) + u).exp(), x.ln(), 1.0, tol()).value
    } else {
        quad::integrate_lower(|y| d.pdf(y), x, d.scale().max((x - d.center()).abs() * 0.25), tol()).value
    }
}

fn upper_mass(d: &NoiseDistribution, x: f64) -> f64 {
    let x0 = if d.is_positive() { x.max(0.0) } else { x };
    let scale = match d.tail_index() {
        Ok(beta) => d.scale().min(2.0 / beta).max(1e-3),
        Err(_) => d.scale().max((x0 - d.center()).abs()),
    };
    quad::integrate_upper(|y| d.pdf(y), x0, scale, tol()).value
}

impl CdfGrid {
    pub(crate) fn build(d: &NoiseDistribution) -> Self {
        let (c, s) = (d.center(), d.scale());
        let mut hi = c + s;
        for k in 0..60 {
            hi = c + s * 2f64.powi(k);
            if upper_mass(d, hi) < TAIL_MASS {
                break;
            }
        }
        let xs: Vec<f64> = if d.is_positive() {
            let c = c.max(1e-300);
            let mut lo = c;
            for k in 1..400 {
                lo = c * 2f64.powi(-k);
                if lower_mass(d, lo) < TAIL_MASS {
                    break;
                }
            }
            let (a, b) = (lo.ln(), hi.ln());
            (0..GRID_POINTS).map(|i| (a + (b - a) * i as f64 / (GRID_POINTS - 1) as f64).exp()).collect()
        } else {
            let mut lo = c - s;
            for k in 0..60 {
                lo = c - s * 2f64.powi(k);
                if lower_mass(d, lo) < TAIL_MASS {
                    break;
                }
            }
            let (a, b) = (((lo - c) / s).asinh(), ((hi - c) / s).asinh());
            (0..GRID_POINTS).map(|i| c + s * (a + (b - a) * i as f64 / (GRID_POINTS - 1) as f64).sinh()).collect()
        };
        let pieces: Vec<f64> = xs.windows(2).map(|w| piece(d, w[0], w[1])).collect();
        let n = xs.len();
        let mut left = vec![0.0; n];
        let mut right = vec![0.0; n];
        left[0] = lower_mass(d, xs[0]);
        for i in 0..n - 1 {
            left[i + 1] = left[i] + pieces[i];
        }
        right[n - 1] = upper_mass(d, xs[n - 1]);
        for i in (0..n - 1).rev() {
            right[i] = right[i + 1] + pieces[i];
        }
        Self { xs, left, right }
    }

    fn cell(&self, x: f64) -> Option<usize> {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return None;
        }
        Some(self.xs.partition_point(|&g| g <= x).saturating_sub(1).min(n - 2))
    }

    pub(crate) fn cdf(&self, d: &NoiseDistribution, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if d.is_positive() && x <= 0.0 {
            return 0.0;
        }
        let v = match self.cell(x) {
            Some(i) => self.left[i] + piece(d, self.xs[i], x),
            None if x < self.xs[0] => lower_mass(d, x),
            None => 1.0 - upper_mass(d, x),
        };
        v.clamp(0.0, 1.0)
    }

    pub(crate) fn sf(&self, d: &NoiseDistribution, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if d.is_positive() && x <= 0.0 {
            return 1.0;
        }
        let v = match self.cell(x) {
            Some(i) => self.right[i + 1] + piece(d, x, self.xs[i + 1]),
            None if x > self.xs[self.xs.len() - 1] => upper_mass(d, x),
            None => 1.0 - lower_mass(d, x),
        };
        v.clamp(0.0, 1.0)
    }

    pub(crate) fn quantile(&self, d: &NoiseDistribution, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return domain(format!("quantile level {u} outside (0, 1)"));
        }
        let n = self.xs.len();
        let s = d.scale();
        let (lo, hi, upper) = if u <= 0.5 {
            if u < self.left[0] {
                let hi = self.xs[0];
                let mut lo = hi;
                for k in 0..2000 {
                    lo = if d.is_positive() { hi * 2f64.powi(-k - 1) } else { hi - s * 2f64.powi(k) };
                    if self.cdf(d, lo) < u {
                        break;
                    }
                }
                (lo, hi, false)
            } else {
                let i = self.left.partition_point(|&p| p <= u).saturating_sub(1).min(n - 2);
                (self.xs[i], self.xs[i + 1], false)
            }
        } else {
            let v = 1.0 - u;
            if v < self.right[n - 1] {
                let lo = self.xs[n - 1];
                let mut hi = lo;
                for k in 0..2000 {
                    hi = lo + s * 2f64.powi(k);
                    if self.sf(d, hi) < v {
                        break;
                    }
                }
                (lo, hi, true)
            } else {
                let i = self.right.partition_point(|&p| p >= v).saturating_sub(1).min(n - 2);
                (self.xs[i], self.xs[i + 1], true)
            }
        };
        let xtol = 1e-14 * (lo.abs() + hi.abs() + s);
        let root = if upper {
            let v = 1.0 - u;
            quad::brent(|x| self.sf(d, x) - v, lo, hi, xtol, 300)
        } else {
            quad::brent(|x| self.cdf(d, x) - u, lo, hi, xtol, 300)
        };
        root.ok_or_else(|| Error::Numerical(format!("failed to bracket quantile {u}")))
    }
}
