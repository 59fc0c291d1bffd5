use std::path::PathBuf;

use clap::Args;
use exdep::exptail::{Family, NoiseDistribution};
use exdep::lintrans::{summarize, CoefficientMatrix, SummaryOptions};

use crate::error::{usage, CliResult};
use crate::output::load_params;
use crate::Common;

#[derive(Args, Debug)]
pub struct EtaArgs {
    /// Coefficient matrix: JSON array of rows, or CSV.
    pub matrix: PathBuf,
    /// Use the gauge-function oracle instead of the closed form.
    #[arg(long)]
    pub oracle: bool,
}

/// `--params` holds an optional noise law, used for chi in the dependent regime.
#[derive(Debug, Default, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Params {
    noise: Option<Family>,
}

pub fn run(c: &Common, args: &EtaArgs) -> CliResult<Vec<u8>> {
    let p: Params = load_params(c.params.as_deref())?;
    let text = std::fs::read_to_string(&args.matrix)
        .or_else(|e| usage(format!("cannot read {}: {e}", args.matrix.display())))?;
    let a: CoefficientMatrix = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).or_else(|e| usage(format!("invalid matrix: {e}")))?
    } else {
        CoefficientMatrix::read_csv(text.as_bytes())?
    };
    let dist = p.noise.map(NoiseDistribution::new).transpose()?;
    let mut opts = SummaryOptions { oracle: args.oracle, ..SummaryOptions::default() };
    if dist.is_some() {
        opts.seed = c.require_seed()?;
    }
    if let Some(n) = c.samples {
        opts.mc_samples = n;
    }
    let summary = summarize(&a, dist.as_ref(), opts)?;
    let mut bytes = serde_json::to_vec_pretty(&summary).map_err(exdep::Error::from)?;
    bytes.push(b'\n');
    Ok(bytes)
}
