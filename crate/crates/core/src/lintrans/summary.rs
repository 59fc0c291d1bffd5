use serde::{Deserialize, Serialize};

use super::chi::{chi_gh_two, chi_mc};
use super::eta::eta_closed_form;
use super::matrix::{classify, CoefficientMatrix, Regime};
use super::oracle::eta_gauge_oracle;
use crate::error::Result;
use crate::exptail::{Family, NoiseDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiMethod {
    MonteCarlo,
    Quadrature,
    LimitFormula,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaMethod {
    ClosedForm,
    Oracle,
}

/// Regime with tail coefficients and how each was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSummary {
    pub regime: Regime,
    pub chi: Option<f64>,
    pub chi_se: Option<f64>,
    pub chi_method: Option<ChiMethod>,
    pub eta: f64,
    pub eta_method: EtaMethod,
}

#[derive(Debug, Clone, Copy)]
pub struct SummaryOptions {
    pub mc_samples: usize,
    pub seed: u64,
    pub oracle: bool,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        Self { mc_samples: 1_000_000, seed: 0, oracle: false }
    }
}

/// Classifies `a` and attaches eta, plus chi when `dist` is given.
pub fn summarize(a: &CoefficientMatrix, dist: Option<&NoiseDistribution>, opts: SummaryOptions) -> Result<TailSummary> {
    let split = classify(a)?;
    let (eta, eta_method) = if opts.oracle {
        (eta_gauge_oracle(a)?, EtaMethod::Oracle)
    } else if a.cols() >= 2 {
        (eta_closed_form(a)?, EtaMethod::ClosedForm)
    } else {
        (1.0, EtaMethod::ClosedForm)
    };
    let mut s = TailSummary { regime: split.regime, chi: None, chi_se: None, chi_method: None, eta, eta_method };
    match split.regime {
        Regime::AsymptoticIndependence => {
            s.chi = Some(0.0);
            s.chi_method = Some(ChiMethod::LimitFormula);
        }
        Regime::Boundary => s.chi_method = Some(ChiMethod::Undetermined),
        Regime::AsymptoticDependence => {
            let Some(d) = dist else { return Ok(s) };
            if let (Family::Gh(p), true) = (d.family(), split.residual[0].len() == 1 && a.cols() == 2) {
                if p.gamma == 0.0 && p.psi > 0.0 {
                    s.chi = Some(chi_gh_two(split.residual[0][0], split.residual[1][0], p)?);
                    s.chi_method = Some(ChiMethod::Quadrature);
                    return Ok(s);
                }
            }
            let est = chi_mc(a, d, opts.mc_samples, opts.seed)?;
            s.chi = Some(est.value);
            s.chi_se = Some(est.std_error);
            s.chi_method = Some(ChiMethod::MonteCarlo);
        }
    }
    Ok(s)
}
