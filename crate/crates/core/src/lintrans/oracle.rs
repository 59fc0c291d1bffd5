//! Brute-force evaluation of eta through the gauge-function minimization.
//!
//! With rows normalized to maximum one and unit tail index, `1/eta` is the
//! minimum of the gauge `g(x) = sum_i |(M^-1 x)_i|` over `x_1, x_2 >= 1`,
//! where `M` stacks the two rows on top of identity rows for all but a
//! pivot pair of columns. Equivalently `1/eta = min |y|_1` subject to
//! `a_1 . y >= 1`, `a_2 . y >= 1`, `y >= 0`. The oracle solves the dual
//! (a two-variable LP) by enumerating every vertex, evaluates `g` at every
//! primal basic solution, requires both to agree, and finally runs seeded
//! Nelder-Mead starts on `g` as a guard against a missed candidate.

use rand::Rng;

use super::matrix::CoefficientMatrix;
use crate::error::{Error, Result};
use crate::rng::substream;

const MAX_COLS: usize = 8;
const STARTS: u64 = 64;
const ORACLE_SEED: u64 = 0x6a09_e667_f3bc_c908;

fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() < 1e-13 {
            return None;
        }
        a.swap(c, p);
        let piv = a[c][c];
        for v in a[c].iter_mut() {
            *v /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

struct Gauge {
    inv: Vec<Vec<f64>>,
}

impl Gauge {
    fn eval(&self, x: &[f64]) -> f64 {
        self.inv.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().abs()).sum()
    }

    /// Gauge on the feasible region after folding `x_1, x_2` back above one.
    fn eval_folded(&self, z: &[f64]) -> f64 {
        let mut x = z.to_vec();
        for v in x.iter_mut().take(2) {
            *v = 1.0 + (*v - 1.0).abs();
        }
        self.eval(&x)
    }
}

fn dual_optimum(r1: &[f64], r2: &[f64]) -> f64 {
    let mut lines: Vec<(f64, f64, f64)> = r1.iter().zip(r2).map(|(&a, &b)| (a, b, 1.0)).collect();
    lines.push((1.0, 0.0, 0.0));
    lines.push((0.0, 1.0, 0.0));
    let feasible = |u1: f64, u2: f64| {
        u1 >= -1e-12 && u2 >= -1e-12 && r1.iter().zip(r2).all(|(&a, &b)| a * u1 + b * u2 <= 1.0 + 1e-12)
    };
    let mut best = 0.0f64;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, b1, c1) = lines[i];
            let (a2, b2, c2) = lines[j];
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-14 {
                continue;
            }
            let u1 = (c1 * b2 - c2 * b1) / det;
            let u2 = (a1 * c2 - a2 * c1) / det;
            if feasible(u1, u2) {
                best = best.max(u1 + u2);
            }
        }
    }
    best
}

/// Primal basic solutions with support of size one or two.
fn primal_candidates(r1: &[f64], r2: &[f64]) -> Vec<Vec<f64>> {
    let n = r1.len();
    let mut out = Vec::new();
    for i in 0..n {
        let m = r1[i].min(r2[i]);
        if m > 0.0 {
            let mut y = vec![0.0; n];
            y[i] = 1.0 / m;
            out.push(y);
        }
        for j in i + 1..n {
            let det = r1[i] * r2[j] - r1[j] * r2[i];
            if det.abs() < 1e-14 {
                continue;
            }
            let yi = (r2[j] - r1[j]) / det;
            let yj = (r1[i] - r2[i]) / det;
            if yi >= -1e-14 && yj >= -1e-14 {
                let mut y = vec![0.0; n];
                y[i] = yi.max(0.0);
                y[j] = yj.max(0.0);
                out.push(y);
            }
        }
    }
    out
}

fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, x0: Vec<f64>, step: f64, iters: usize) -> f64 {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.clone()];
    for k in 0..n {
        let mut v = x0.clone();
        v[k] += step;
        simplex.push(v);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    for _ in 0..iters {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        if (vals[n] - vals[0]).abs() < 1e-15 {
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (simplex[n][k] - centroid[k])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
        } else {
            let xc = if fr < vals[n] { along(-0.5) } else { along(0.5) };
            let fc = f(&xc);
            if fc < vals[n].min(fr) {
                simplex[n] = xc;
                vals[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = (0..n).map(|k| best[k] + 0.5 * (simplex[i][k] - best[k])).collect();
                    vals[i] = f(&simplex[i]);
                }
            }
        }
    }
    vals.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// `eta` by exhaustive search; intended for instances with at most 8 columns.
pub fn eta_gauge_oracle(a: &CoefficientMatrix) -> Result<f64> {
    a.require_pair()?;
    let n = a.cols();
    if n > MAX_COLS {
        return Err(Error::Size(format!("gauge oracle handles at most {MAX_COLS} columns, got {n}")));
    }
    let r1 = a.normalized_row(0);
    let r2 = a.normalized_row(1);
    let dual = dual_optimum(&r1, &r2);

    let pivot = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, (r1[i] * r2[j] - r1[j] * r2[i]).abs()))
        .max_by(|x, y| x.2.total_cmp(&y.2));
    let gauge = match pivot {
        Some((p, q, det)) if det > 1e-12 => {
            let mut m = vec![r1.clone(), r2.clone()];
            for k in (0..n).filter(|&k| k != p && k != q) {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                m.push(e);
            }
            invert(&m).map(|inv| (Gauge { inv }, m))
        }
        _ => None,
    };
    let Some((gauge, m)) = gauge else {
        // Identical normalized rows.
        return Ok((1.0 / dual).min(1.0));
    };

    let mut primal = f64::INFINITY;
    for y in primal_candidates(&r1, &r2) {
        let x: Vec<f64> = m.iter().map(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum()).collect();
        if x[0] >= 1.0 - 1e-12 && x[1] >= 1.0 - 1e-12 {
            primal = primal.min(gauge.eval(&x));
        }
    }
    if (primal - dual).abs() > 1e-9 * dual.max(1.0) {
        return Err(Error::Numerical(format!("gauge oracle: primal {primal} and dual {dual} disagree")));
    }

    let f = |z: &[f64]| gauge.eval_folded(z);
    for s in 0..STARTS {
        let mut rng = substream(ORACLE_SEED, s);
        let x0: Vec<f64> = (0..n)
            .map(|k| if k < 2 { rng.gen_range(1.0..10.0) } else { rng.gen_range(-10.0..10.0) })
            .collect();
        let found = nelder_mead(&f, x0, 1.0, 400 * n);
        if found < primal - 1e-9 {
            return Err(Error::Numerical(format!(
                "gauge oracle: local search reached {found}, below vertex optimum {primal}"
            )));
        }
    }
    Ok((1.0 / primal).min(1.0))
}
