use serde::{Deserialize, Serialize};

use crate::error::{param, precondition, Result};
use crate::kernels::ou_kernel;
use crate::lintrans::CoefficientMatrix;

/// Strictly increasing partition points `t_0 < ... < t_m = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition1D {
    points: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PartitionMode {
    /// Mesh length; the cell count is `round((T - start) / delta)`.
    Equidistant(f64),
    Explicit(Vec<f64>),
}

impl Partition1D {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        *self.points.last().expect("non-empty partition")
    }

    pub fn cells(&self) -> usize {
        self.points.len() - 1
    }

    fn tolerance(&self) -> f64 {
        1e-9 * (self.end() - self.start()).max(1.0)
    }
}

pub fn partition_1d(start: f64, end: f64, mode: PartitionMode) -> Result<Partition1D> {
    if !(start.is_finite() && end.is_finite() && start < end) {
        return param(format!("partition needs finite start < end, got [{start}, {end}]"));
    }
    let points = match mode {
        PartitionMode::Equidistant(delta) => {
            if !(delta > 0.0 && delta.is_finite()) {
                return param(format!("mesh length must be positive, got {delta}"));
            }
            let m = ((end - start) / delta).round().max(1.0) as usize;
            let step = (end - start) / m as f64;
            let mut p: Vec<f64> = (0..m).map(|i| start + i as f64 * step).collect();
            p.push(end);
            p
        }
        PartitionMode::Explicit(p) => {
            if p.len() < 2 || p.windows(2).any(|w| !(w[1] > w[0])) || p.iter().any(|v| !v.is_finite()) {
                return param("explicit partition points must be finite and strictly increasing");
            }
            if p[0] != start || *p.last().unwrap() != end {
                return param(format!("explicit partition must run from {start} to {end}"));
            }
            p
        }
    };
    Ok(Partition1D { points })
}

/// One-sided OU approximation: site `s` loads `exp(-a (s - t_i))` on every cell
/// `[t_i, t_{i+1})` with `t_{i+1} <= s`.
pub fn ou_coefficients(a: f64, s1: f64, s2: f64, p: &Partition1D) -> Result<CoefficientMatrix> {
    if !(a > 0.0 && a.is_finite()) {
        return param(format!("OU rate must be positive, got {a}"));
    }
    if !(p.start() < s1 && s1 < s2 && s2 <= p.end()) {
        return precondition(format!(
            "sites must satisfy start < s1 < s2 <= T, got {s1}, {s2} in [{}, {}]",
            p.start(),
            p.end()
        ));
    }
    let tol = p.tolerance();
    let t = p.points();
    let row = |s: f64| -> Vec<f64> {
        (0..p.cells()).map(|i| if t[i + 1] <= s + tol { ou_kernel(a, s - t[i]) } else { 0.0 }).collect()
    };
    let r1 = row(s1);
    if r1.iter().all(|&v| v == 0.0) {
        return precondition(format!("no partition cell ends before s1 = {s1}"));
    }
    CoefficientMatrix::dropping_zero_columns(vec![r1, row(s2)])
}
