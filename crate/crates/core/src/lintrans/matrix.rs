use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{param, precondition, Error, Result};

/// Relative tolerance for membership in a row's argmax set.
pub const ARGMAX_TOL: f64 = 1e-12;

/// Non-negative `m x n` coefficient matrix of the model `X = A Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct CoefficientMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    row_max: Vec<f64>,
    argmax: Vec<Vec<usize>>,
}

impl TryFrom<Vec<Vec<f64>>> for CoefficientMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<CoefficientMatrix> for Vec<Vec<f64>> {
    fn from(m: CoefficientMatrix) -> Self {
        (0..m.rows).map(|r| m.row(r).to_vec()).collect()
    }
}

impl CoefficientMatrix {
    /// Validates entries (finite, non-negative), non-zero rows and columns.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return param("coefficient matrix has no rows");
        }
        let n = rows[0].len();
        if n == 0 {
            return param("coefficient matrix has no columns");
        }
        if rows.iter().any(|r| r.len() != n) {
            return param("coefficient matrix rows differ in length");
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        Self::from_flat(m, n, data)
    }

    /// Row-major constructor.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols || rows == 0 || cols == 0 {
            return param("coefficient matrix shape mismatch");
        }
        if let Some(v) = data.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return param(format!("coefficient {v} is not a finite non-negative number"));
        }
        let mut row_max = Vec::with_capacity(rows);
        let mut argmax = Vec::with_capacity(rows);
        for r in 0..rows {
            let row = &data[r * cols..(r + 1) * cols];
            let mx = row.iter().cloned().fold(0.0, f64::max);
            if !(mx > 0.0) {
                return precondition(format!("row {r} is identically zero"));
            }
            let cut = mx * (1.0 - ARGMAX_TOL);
            argmax.push((0..cols).filter(|&i| row[i] >= cut).collect());
            row_max.push(mx);
        }
        for c in 0..cols {
            if (0..rows).all(|r| data[r * cols + c] == 0.0) {
                return precondition(format!("column {c} is zero in every row"));
            }
        }
        Ok(Self { rows, cols, data, row_max, argmax })
    }

    /// Like [`Self::new`] but silently drops all-zero columns.
    pub fn dropping_zero_columns(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return param("coefficient matrix rows differ in length");
        }
        let keep: Vec<usize> = (0..n).filter(|&c| rows.iter().any(|r| r[c] != 0.0)).collect();
        Self::new(rows.iter().map(|r| keep.iter().map(|&c| r[c]).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row_max(&self, r: usize) -> f64 {
        self.row_max[r]
    }

    /// Indices attaining the row maximum within [`ARGMAX_TOL`].
    pub fn argmax(&self, r: usize) -> &[usize] {
        &self.argmax[r]
    }

    /// Row divided by its maximum.
    pub fn normalized_row(&self, r: usize) -> Vec<f64> {
        let m = self.row_max[r];
        self.row(r).iter().map(|v| v / m).collect()
    }

    /// The 2-row submatrix of rows `j` and `k`, without columns zero in both.
    pub fn pair(&self, j: usize, k: usize) -> Result<CoefficientMatrix> {
        if j >= self.rows || k >= self.rows {
            return param(format!("row index out of range ({j}, {k}) for {} rows", self.rows));
        }
        Self::dropping_zero_columns(vec![self.row(j).to_vec(), self.row(k).to_vec()])
    }

    pub(crate) fn require_pair(&self) -> Result<()> {
        if self.rows != 2 {
            return precondition(format!("operation needs a 2-row matrix, got {} rows", self.rows));
        }
        Ok(())
    }

    /// Writes one CSV line per row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        for r in 0..self.rows {
            wr.write_record(self.row(r).iter().map(|v| format!("{v}")))?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads rows of numbers; a leading non-numeric header line is skipped.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> = t.split(',').map(|s| s.trim().parse::<f64>()).collect();
            match parsed {
                Ok(v) => rows.push(v),
                Err(_) if rows.is_empty() && i == 0 => continue,
                Err(e) => return param(format!("line {}: {e}", i + 1)),
            }
        }
        Self::new(rows)
    }
}

/// Extremal dependence regime of a 2-row model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    AsymptoticDependence,
    AsymptoticIndependence,
    Boundary,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::AsymptoticDependence => "AsymptoticDependence",
            Regime::AsymptoticIndependence => "AsymptoticIndependence",
            Regime::Boundary => "Boundary",
        };
        f.write_str(s)
    }
}

/// Normalized rows and the split into shared maximizers and residual terms.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeSplit {
    pub regime: Regime,
    /// Intersection of the two argmax sets.
    pub shared_argmax: Vec<usize>,
    pub normalized: [Vec<f64>; 2],
    /// Column indices outside `shared_argmax`.
    pub residual_index: Vec<usize>,
    /// `normalized[j]` restricted to `residual_index`.
    pub residual: [Vec<f64>; 2],
}

/// Classifies a 2-row matrix by its argmax sets.
pub fn classify(a: &CoefficientMatrix) -> Result<RegimeSplit> {
    a.require_pair()?;
    let (i1, i2) = (a.argmax(0), a.argmax(1));
    let shared: Vec<usize> = i1.iter().copied().filter(|i| i2.contains(i)).collect();
    let regime = if i1 == i2 {
        Regime::AsymptoticDependence
    } else if shared.is_empty() {
        Regime::AsymptoticIndependence
    } else {
        Regime::Boundary
    };
    let normalized = [a.normalized_row(0), a.normalized_row(1)];
    let residual_index: Vec<usize> = (0..a.cols()).filter(|i| !shared.contains(i)).collect();
    let residual = [
        residual_index.iter().map(|&i| normalized[0][i]).collect(),
        residual_index.iter().map(|&i| normalized[1][i]).collect(),
    ];
    Ok(RegimeSplit { regime, shared_argmax: shared, normalized, residual_index, residual })
}

/// Correlation of `X_1, X_2` under i.i.d. finite-variance noise.
pub fn pearson_correlation(a: &CoefficientMatrix) -> Result<f64> {
    a.require_pair()?;
    let (r1, r2) = (a.row(0), a.row(1));
    let dot: f64 = r1.iter().zip(r2).map(|(x, y)| x * y).sum();
    let n1: f64 = r1.iter().map(|x| x * x).sum::<f64>().sqrt();
    let n2: f64 = r2.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(dot / (n1 * n2))
}

/// The product model `prod_i Ybar_i^{b_ji}` reduces to the sum model with
/// coefficients `b_ji` on `log Ybar_i`; the exponent matrix is returned as is.
pub fn product_to_sum(exponents: Vec<Vec<f64>>) -> Result<CoefficientMatrix> {
    CoefficientMatrix::new(exponents)
}
