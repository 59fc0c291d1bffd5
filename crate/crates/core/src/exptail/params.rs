use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

fn admissible(lambda: f64, tau: f64, psi: f64) -> bool {
    if !(lambda.is_finite() && tau.is_finite() && psi.is_finite()) || tau < 0.0 || psi < 0.0 {
        return false;
    }
    (lambda < 0.0 && tau > 0.0) || (lambda == 0.0 && tau > 0.0 && psi > 0.0) || (lambda > 0.0 && psi > 0.0)
}

/// Generalized inverse Gaussian parameters, density proportional to
/// `x^(lambda-1) exp(-(tau/x + psi x)/2)` on `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GigParams {
    pub lambda: f64,
    pub tau: f64,
    pub psi: f64,
}

impl GigParams {
    pub fn new(lambda: f64, tau: f64, psi: f64) -> Result<Self> {
        let p = Self { lambda, tau, psi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if admissible(self.lambda, self.tau, self.psi) {
            Ok(())
        } else {
            param(format!(
                "GIG(lambda={}, tau={}, psi={}) is not admissible",
                self.lambda, self.tau, self.psi
            ))
        }
    }

    /// Inverse Gaussian mixing law (`lambda = -1/2`).
    pub fn inverse_gaussian(tau: f64, psi: f64) -> Result<Self> {
        Self::new(-0.5, tau, psi)
    }

    /// Gamma law with shape `lambda` and rate `psi/2`.
    pub fn gamma(lambda: f64, psi: f64) -> Result<Self> {
        Self::new(lambda, 0.0, psi)
    }
}

/// Generalized hyperbolic parameters: `mu + gamma R + sqrt(R) W` with
/// `R ~ GIG(lambda, tau, psi)` and `W` standard normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhParams {
    pub lambda: f64,
    pub tau: f64,
    pub psi: f64,
    pub mu: f64,
    pub gamma: f64,
}

impl GhParams {
    pub fn new(lambda: f64, tau: f64, psi: f64, mu: f64, gamma: f64) -> Result<Self> {
        let p = Self { lambda, tau, psi, mu, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.gamma.is_finite()) {
            return param("GH location and skewness must be finite");
        }
        self.mixing().map(|_| ())
    }

    /// Normal inverse Gaussian (`lambda = -1/2`).
    pub fn nig(tau: f64, psi: f64, mu: f64, gamma: f64) -> Result<Self> {
        Self::new(-0.5, tau, psi, mu, gamma)
    }

    /// Variance gamma (`tau = 0`).
    pub fn variance_gamma(lambda: f64, psi: f64, mu: f64, gamma: f64) -> Result<Self> {
        Self::new(lambda, 0.0, psi, mu, gamma)
    }

    pub fn mixing(&self) -> Result<GigParams> {
        GigParams::new(self.lambda, self.tau, self.psi)
    }
}

/// Distribution family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamRecord", into = "ParamRecord")]
pub enum Family {
    Gig(GigParams),
    Gh(GhParams),
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        match self {
            Family::Gig(p) => p.validate(),
            Family::Gh(p) => p.validate(),
        }
    }

    pub fn gig(&self) -> GigParams {
        match *self {
            Family::Gig(p) => p,
            Family::Gh(p) => GigParams { lambda: p.lambda, tau: p.tau, psi: p.psi },
        }
    }
}

/// Flat JSON form `{family, lambda, tau, psi, mu, gamma}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamRecord {
    pub family: String,
    pub lambda: f64,
    pub tau: f64,
    pub psi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl TryFrom<ParamRecord> for Family {
    type Error = Error;

    fn try_from(r: ParamRecord) -> Result<Self> {
        match r.family.to_ascii_uppercase().as_str() {
            "GIG" => {
                if r.mu.is_some_and(|m| m != 0.0) || r.gamma.is_some_and(|g| g != 0.0) {
                    return param("GIG record must not carry mu or gamma");
                }
                Ok(Family::Gig(GigParams::new(r.lambda, r.tau, r.psi)?))
            }
            "GH" | "NIG" | "VG" => Ok(Family::Gh(GhParams::new(
                r.lambda,
                r.tau,
                r.psi,
                r.mu.unwrap_or(0.0),
                r.gamma.unwrap_or(0.0),
            )?)),
            other => param(format!("unknown family {other:?}")),
        }
    }
}

impl From<Family> for ParamRecord {
    fn from(f: Family) -> Self {
        match f {
            Family::Gig(p) => ParamRecord {
                family: "GIG".into(),
                lambda: p.lambda,
                tau: p.tau,
                psi: p.psi,
                mu: None,
                gamma: None,
            },
            Family::Gh(p) => ParamRecord {
                family: "GH".into(),
                lambda: p.lambda,
                tau: p.tau,
                psi: p.psi,
                mu: Some(p.mu),
                gamma: Some(p.gamma),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility() {
        assert!(GigParams::new(-0.5, 1.0, 0.0).is_ok());
        assert!(GigParams::new(-0.5, 0.0, 1.0).is_err());
        assert!(GigParams::new(0.0, 1.0, 1.0).is_ok());
        assert!(GigParams::new(0.0, 0.0, 1.0).is_err());
        assert!(GigParams::new(0.0, 1.0, 0.0).is_err());
        assert!(GigParams::new(2.0, 0.0, 1.0).is_ok());
        assert!(GigParams::new(2.0, 1.0, 0.0).is_err());
        assert!(GigParams::new(1.0, -1.0, 1.0).is_err());
        assert!(GigParams::new(f64::NAN, 1.0, 1.0).is_err());
        assert!(GhParams::new(1.0, 1.0, 1.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = Family::Gh(GhParams::nig(1.0, 1.0, -1.0, 1.0).unwrap());
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"family":"GH","lambda":-0.5,"tau":1.0,"psi":1.0,"mu":-1.0,"gamma":1.0}"#);
        let back: Family = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let g: Family = serde_json::from_str(r#"{"family":"GIG","lambda":1,"tau":0,"psi":2}"#).unwrap();
        assert_eq!(g, Family::Gig(GigParams::gamma(1.0, 2.0).unwrap()));
        assert!(serde_json::from_str::<Family>(r#"{"family":"GIG","lambda":-1,"tau":0,"psi":2}"#).is_err());
    }
}
