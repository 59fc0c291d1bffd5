//! Rank-based estimators of tail dependence from bivariate samples.

use std::io::{Read, Write};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::Point;
use crate::error::{param, Error, Result};
use crate::lintrans::{eta_closed_form, CoefficientMatrix};

/// Conditioning exceedances below this count flag a chi estimate as low-count.
pub const LOW_COUNT: usize = 20;

/// Normal quantile for the 95% intervals.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Paired observations with cached pseudo-uniform margins.
#[derive(Debug, Clone)]
pub struct BivariateSample {
    x1: Vec<f64>,
    x2: Vec<f64>,
    uniforms: OnceLock<PseudoUniform>,
}

/// Margins `U = rank / (n + 1)` of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoUniform {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl BivariateSample {
    pub fn new(x1: Vec<f64>, x2: Vec<f64>) -> Result<Self> {
        if x1.len() != x2.len() {
            return param(format!("columns have lengths {} and {}", x1.len(), x2.len()));
        }
        if x1.len() < 2 {
            return param("a bivariate sample needs at least two observations");
        }
        if x1.iter().chain(&x2).any(|v| !v.is_finite()) {
            return param("sample values must be finite");
        }
        Ok(Self { x1, x2, uniforms: OnceLock::new() })
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect())
    }

    /// Reads CSV with a header naming columns `x1` and `x2`.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers.iter().position(|h| h == name).ok_or_else(|| Error::Parameter(format!("CSV header lacks column {name}")))
        };
        let (c1, c2) = (col("x1")?, col("x2")?);
        let (mut x1, mut x2) = (Vec::new(), Vec::new());
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |c: usize| -> Result<f64> {
                rec.get(c)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::Parameter(format!("row {}: column {} is not a number", line + 2, c + 1)))
            };
            x1.push(parse(c1)?);
            x2.push(parse(c2)?);
        }
        Self::new(x1, x2)
    }

    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x1.is_empty()
    }

    pub fn x1(&self) -> &[f64] {
        &self.x1
    }

    pub fn x2(&self) -> &[f64] {
        &self.x2
    }

    pub fn uniforms(&self) -> &PseudoUniform {
        self.uniforms.get_or_init(|| rank_transform(self))
    }
}

/// Average-tie ranks scaled by `n + 1`.
fn uniform_margin(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.par_sort_unstable_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut u = vec![0.0; n];
    let denom = n as f64 + 1.0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && x[idx[end]] == x[idx[start]] {
            end += 1;
        }
        // Ranks start..end (1-based start+1..=end) share their average.
        let rank = 0.5 * ((start + 1 + end) as f64);
        for &i in &idx[start..end] {
            u[i] = rank / denom;
        }
        start = end;
    }
    u
}

pub fn rank_transform(s: &BivariateSample) -> PseudoUniform {
    let (u1, u2) = rayon::join(|| uniform_margin(&s.x1), || uniform_margin(&s.x2));
    PseudoUniform { u1, u2 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiEstimate {
    pub q: f64,
    pub chi: f64,
    pub std_error: f64,
    pub joint: usize,
    pub conditioning: usize,
    /// Fewer than [`LOW_COUNT`] conditioning exceedances.
    pub low_count: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaEstimate {
    pub eta: f64,
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
}

impl EtaEstimate {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    pub fn overlaps(&self, other: &EtaEstimate) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

impl PseudoUniform {
    pub fn len(&self) -> usize {
        self.u1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u1.is_empty()
    }

    /// `#{U1 > q, U2 > q} / #{U2 > q}` with its binomial standard error.
    pub fn chi(&self, q: f64) -> Result<ChiEstimate> {
        if !(q > 0.0 && q < 1.0) {
            return param(format!("quantile level must lie in (0, 1), got {q}"));
        }
        let (joint, conditioning) = self
            .u1
            .iter()
            .zip(&self.u2)
            .filter(|(_, &b)| b > q)
            .fold((0usize, 0usize), |(j, c), (&a, _)| (j + (a > q) as usize, c + 1));
        if conditioning == 0 {
            return Err(Error::Undefined(format!("no observation exceeds q = {q} in the conditioning margin")));
        }
        let chi = joint as f64 / conditioning as f64;
        Ok(ChiEstimate {
            q,
            chi,
            std_error: (chi * (1.0 - chi) / conditioning as f64).sqrt(),
            joint,
            conditioning,
            low_count: conditioning < LOW_COUNT,
        })
    }

    /// Hill estimator on the top `k` order statistics of `T = min(1/(1-U1), 1/(1-U2))`,
    /// with interval `eta (1 +- z / sqrt(k))`. `k` defaults to `ceil(sqrt(n))`.
    pub fn eta(&self, k: Option<usize>) -> Result<EtaEstimate> {
        let n = self.len();
        let k = k.unwrap_or_else(|| (n as f64).sqrt().ceil() as usize);
        if k < 10 || 2 * k > n {
            return param(format!("top-order count k = {k} outside [10, n/2] for n = {n}"));
        }
        let mut t: Vec<f64> = self.u1.iter().zip(&self.u2).map(|(&a, &b)| 1.0 / (1.0 - a.max(0.0).min(b))).collect();
        let pivot = n - k - 1;
        let (_, &mut threshold, top) = t.select_nth_unstable_by(pivot, f64::total_cmp);
        let ln_threshold = threshold.ln();
        let eta = top.iter().map(|v| v.ln() - ln_threshold).sum::<f64>() / k as f64;
        let half = Z95 / (k as f64).sqrt();
        Ok(EtaEstimate { eta, k, lower: eta * (1.0 - half), upper: eta * (1.0 + half) })
    }
}

pub fn empirical_chi(s: &BivariateSample, q: f64) -> Result<ChiEstimate> {
    s.uniforms().chi(q)
}

pub fn empirical_eta(s: &BivariateSample, k: Option<usize>) -> Result<EtaEstimate> {
    s.uniforms().eta(k)
}

/// `chi(q)` over increasing levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiCurve {
    pub points: Vec<ChiEstimate>,
}

impl ChiCurve {
    pub fn levels(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.q).collect()
    }

    /// CSV with header `q,chi,se`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["q", "chi", "se"])?;
        for p in &self.points {
            out.write_record([p.q.to_string(), p.chi.to_string(), p.std_error.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn chi_curve(s: &BivariateSample, levels: &[f64]) -> Result<ChiCurve> {
    if levels.windows(2).any(|w| !(w[1] > w[0])) {
        return param("quantile levels must be strictly increasing");
    }
    let u = s.uniforms();
    let points = levels.par_iter().map(|&q| u.chi(q)).collect::<Result<Vec<_>>>()?;
    Ok(ChiCurve { points })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaPoint {
    pub h: f64,
    pub eta: f64,
    pub method: String,
}

/// Rows `(h, eta, method)` for eta-versus-distance plots.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EtaTable {
    pub rows: Vec<EtaPoint>,
}

impl EtaTable {
    pub fn extend(&mut self, other: EtaTable) {
        self.rows.extend(other.rows);
    }

    /// CSV with header `h,eta,method`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["h", "eta", "method"])?;
        for r in &self.rows {
            out.write_record([r.h.to_string(), r.eta.to_string(), r.method.clone()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// All unordered index pairs `(i, j)`, `i < j < n`.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Closed-form `eta` for each site pair of a model whose row `j` belongs to `sites[j]`.
pub fn eta_vs_distance(
    coefficients: &CoefficientMatrix,
    sites: &[Point],
    pairs: &[(usize, usize)],
    method: &str,
) -> Result<EtaTable> {
    if coefficients.rows() != sites.len() {
        return param(format!("{} coefficient rows for {} sites", coefficients.rows(), sites.len()));
    }
    let rows = pairs
        .par_iter()
        .map(|&(i, j)| {
            if i >= sites.len() || j >= sites.len() {
                return param(format!("pair ({i}, {j}) out of range"));
            }
            let h = (sites[i][0] - sites[j][0]).hypot(sites[i][1] - sites[j][1]);
            let eta = eta_closed_form(&coefficients.pair(i, j)?)?;
            Ok(EtaPoint { h, eta, method: method.to_string() })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EtaTable { rows })
}
