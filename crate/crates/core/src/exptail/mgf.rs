//! Moment generating functions by quadrature.
//!
//! For GIG the integral `int exp(s x) f(x) dx` is taken in `u = log x`,
//! which turns both the power-law boundary tail and the double-exponential
//! interior tails into exponential ones. For GH the Gaussian layer of the
//! mixture integrates exactly, leaving a GIG integral at
//! `s = gamma t + t^2/2`; the rate `psi/2 - s` is formed in factored form so
//! that it vanishes exactly at the boundary `t = beta`.

use super::params::{Family, GhParams, GigParams};
use super::NoiseDistribution;
use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};

const BOUNDARY_TOL: f64 = 1e-12;

/// `sqrt(psi + gamma^2) - gamma` without cancellation.
pub(crate) fn gh_right_index(p: &GhParams) -> f64 {
    let r = (p.psi + p.gamma * p.gamma).sqrt();
    if p.gamma > 0.0 {
        p.psi / (r + p.gamma)
    } else {
        r - p.gamma
    }
}

/// `sqrt(psi + gamma^2) + gamma` without cancellation.
fn gh_left_index(p: &GhParams) -> f64 {
    let r = (p.psi + p.gamma * p.gamma).sqrt();
    if p.gamma < 0.0 {
        p.psi / (r - p.gamma)
    } else {
        r + p.gamma
    }
}

/// Log of `C int_0^inf x^(lambda-1) exp(-tau/(2x) - rate x) dx`, with `C`
/// the GIG normalizer of `p`. `rate` must be `>= 0`, and `rate = 0` only
/// when `lambda < 0`.
fn gig_ln_integral(p: &GigParams, ln_norm: f64, rate: f64) -> Result<f64> {
    let (l, t) = (p.lambda, p.tau);
    let y = if t == 0.0 {
        l / rate
    } else if l <= 0.0 {
        t / ((l * l + 2.0 * t * rate).sqrt() - l)
    } else {
        (l + (l * l + 2.0 * t * rate).sqrt()) / (2.0 * rate)
    };
    let u0 = y.ln();
    let g = |u: f64| {
        let e = u.exp();
        let inner = if t == 0.0 { 0.0 } else { 0.5 * t / e };
        let outer = if rate == 0.0 { 0.0 } else { rate * e };
        l * u - inner - outer
    };
    let g0 = g(u0);
    let curv = (if t == 0.0 { 0.0 } else { 0.5 * t / y }) + rate * y;
    let width = (1.0 / curv.sqrt()).clamp(1e-3, 1e3);
    let tol = Tolerance { abs: 1e-300, rel: 1e-12, max_intervals: 8000 };
    let est = quad::integrate_line(|u| (g(u) - g0).exp(), u0, width, tol);
    if !(est.value > 0.0) || !est.value.is_finite() {
        return Err(Error::Numerical(format!("mgf quadrature failed (value {})", est.value)));
    }
    if est.abs_error > 1e-9 * est.value {
        return Err(Error::Numerical(format!(
            "mgf quadrature relative error {:e} above 1e-9",
            est.abs_error / est.value
        )));
    }
    Ok(ln_norm + g0 + est.value.ln())
}

/// Rate `psi/2 - s` classified against the boundary.
fn checked_rate(p: &GigParams, rate: f64, scale: f64, t: f64, beta: f64) -> Result<f64> {
    if rate.abs() <= BOUNDARY_TOL * scale {
        if p.lambda < 0.0 {
            Ok(0.0)
        } else {
            Err(Error::Divergent { t, beta })
        }
    } else if rate < 0.0 {
        Err(Error::Divergent { t, beta })
    } else {
        Ok(rate)
    }
}

pub(crate) fn ln_mgf(d: &NoiseDistribution, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    if t.is_nan() {
        return Err(Error::Domain("mgf at NaN".into()));
    }
    match d.family() {
        Family::Gig(p) => {
            let beta = 0.5 * p.psi;
            let rate = checked_rate(p, beta - t, beta.max(t.abs()), t, beta)?;
            gig_ln_integral(p, d.ln_norm, rate)
        }
        Family::Gh(p) => {
            let br = gh_right_index(p);
            let bl = gh_left_index(p);
            let gig = d.family().gig();
            let (dr, dl) = if (t - br).abs() <= BOUNDARY_TOL * br.max(1.0) {
                (0.0, bl + t)
            } else if (t + bl).abs() <= BOUNDARY_TOL * bl.max(1.0) {
                (br - t, 0.0)
            } else {
                (br - t, bl + t)
            };
            let rate = 0.5 * dr * dl;
            let rate = checked_rate(&gig, rate, 1.0, t, br)?;
            Ok(p.mu * t + gig_ln_integral(&gig, d.ln_norm, rate)?)
        }
    }
}
