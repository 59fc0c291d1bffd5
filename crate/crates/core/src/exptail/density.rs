use std::f64::consts::{LN_2, PI};

use super::params::{GhParams, GigParams};
use crate::error::{domain, Result};
use crate::special::{ln_bessel_k, ln_gamma};

/// Log of the GIG normalizing constant.
pub(crate) fn gig_ln_norm(p: &GigParams) -> f64 {
    let (l, t, s) = (p.lambda, p.tau, p.psi);
    if t == 0.0 {
        l * (0.5 * s).ln() - ln_gamma(l)
    } else if s == 0.0 {
        -l * (0.5 * t).ln() - ln_gamma(-l)
    } else {
        0.5 * l * (s / t).ln() - LN_2 - ln_bessel_k(l, (t * s).sqrt())
    }
}

/// GIG log-density at `x`, `-inf` outside the support.
pub(crate) fn gig_ln_pdf(p: &GigParams, ln_norm: f64, x: f64) -> f64 {
    if !(x > 0.0) || x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    let inner = if p.tau == 0.0 { 0.0 } else { p.tau / x };
    let outer = if p.psi == 0.0 { 0.0 } else { p.psi * x };
    ln_norm + (p.lambda - 1.0) * x.ln() - 0.5 * (inner + outer)
}

/// GH log-density at `x`; `ln_norm` is the mixing GIG log normalizer.
pub(crate) fn gh_ln_pdf(p: &GhParams, ln_norm: f64, x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NEG_INFINITY;
    }
    let order = p.lambda - 0.5;
    let z = x - p.mu;
    let a = p.tau + z * z;
    let b = p.psi + p.gamma * p.gamma;
    let core = if a == 0.0 {
        if order > 0.0 {
            ln_gamma(order) + order * (2.0 / b).ln()
        } else {
            f64::INFINITY
        }
    } else if b == 0.0 {
        ln_gamma(-order) + order * (0.5 * a).ln()
    } else {
        LN_2 + 0.5 * order * (a / b).ln() + ln_bessel_k(order, (a * b).sqrt())
    };
    ln_norm - 0.5 * (2.0 * PI).ln() + core + p.gamma * z
}

/// GIG density. Boundary cases `tau = 0` (gamma) and `psi = 0` (inverse
/// gamma) use their exact densities.
pub fn gig_density(params: GigParams, x: f64) -> Result<f64> {
    params.validate()?;
    if !(x > 0.0) {
        return domain(format!("GIG density needs x > 0, got {x}"));
    }
    Ok(gig_ln_pdf(&params, gig_ln_norm(&params), x).exp())
}

/// Generalized hyperbolic density.
pub fn gh_density(params: GhParams, x: f64) -> Result<f64> {
    let mix = params.mixing()?;
    params.validate()?;
    if x.is_nan() {
        return domain("GH density at NaN");
    }
    Ok(gh_ln_pdf(&params, gig_ln_norm(&mix), x).exp())
}
