//! The finite linear model `X_j = sum_i a_ji Y_i` with i.i.d.
//! exponential-tailed `Y_i`: regimes, `chi` and `eta`.

mod chi;
mod eta;
mod matrix;
mod oracle;
mod summary;

pub use chi::{chi_gh_two, chi_limit_a22, chi_mc, chi_mc_stream, McEstimate, Welford};
pub use eta::eta_closed_form;
pub use matrix::{classify, pearson_correlation, product_to_sum, CoefficientMatrix, Regime, RegimeSplit, ARGMAX_TOL};
pub use oracle::eta_gauge_oracle;
pub use summary::{summarize, ChiMethod, EtaMethod, SummaryOptions, TailSummary};

#[cfg(test)]
mod tests;
