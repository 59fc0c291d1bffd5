use super::matrix::CoefficientMatrix;
use crate::error::{precondition, Result};

/// Contribution of the column pair `(i, j)`: `|det| / (|d_i| + |d_j|)`,
/// zero when the determinant vanishes.
#[inline]
pub(crate) fn pair_term(a1i: f64, a2i: f64, a1j: f64, a2j: f64) -> f64 {
    let det = a2i * a1j - a1i * a2j;
    if det == 0.0 {
        return 0.0;
    }
    let den = (a2i - a1i).abs() + (a2j - a1j).abs();
    if den == 0.0 {
        return 0.0;
    }
    det.abs() / den
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex hull (counter-clockwise, collinear points dropped) by monotone chain.
fn hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut h: Vec<[f64; 2]> = Vec::with_capacity(pts.len() + 1);
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while h.len() >= start + 2 && cross(h[h.len() - 2], h[h.len() - 1], p) <= 0.0 {
                h.pop();
            }
            h.push(p);
        }
        h.pop();
    }
    h
}

/// Largest pairwise or single-column term over normalized rows.
///
/// The pair terms are diagonal crossings of chords of `conv{+-(r1_i, r2_i)}`,
/// so the largest one is the crossing of the hull edge met by the ray `t (1, 1)`.
pub(crate) fn eta_rows(r1: &[f64], r2: &[f64]) -> f64 {
    let n = r1.len();
    let single = (0..n).map(|i| r1[i].min(r2[i])).fold(0.0, f64::max);
    let pts: Vec<[f64; 2]> = (0..n).flat_map(|i| [[r1[i], r2[i]], [-r1[i], -r2[i]]]).collect();
    let h = hull(pts);
    if h.len() < 3 {
        return single;
    }
    let mut best = single;
    for k in 0..h.len() {
        let (u, v) = (h[k], h[(k + 1) % h.len()]);
        let (du, dv) = (u[1] - u[0], v[1] - v[0]);
        if du * dv <= 0.0 && u[0] + u[1] + v[0] + v[1] > 0.0 {
            best = best.max(pair_term(u[0], u[1], v[0], v[1]));
        }
    }
    best
}

/// Residual tail dependence coefficient of a 2-row model in closed form.
pub fn eta_closed_form(a: &CoefficientMatrix) -> Result<f64> {
    a.require_pair()?;
    if a.cols() < 2 {
        return precondition("closed-form eta needs at least two columns");
    }
    let eta = eta_rows(&a.normalized_row(0), &a.normalized_row(1));
    Ok(eta.clamp(f64::MIN_POSITIVE, 1.0))
}

/// All-pairs evaluation, used to test the hull shortcut.
#[cfg(test)]
pub(crate) fn eta_rows_full(r1: &[f64], r2: &[f64]) -> f64 {
    let n = r1.len();
    let mut best = (0..n).map(|i| r1[i].min(r2[i])).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                best = best.max(pair_term(r1[i], r2[i], r1[j], r2[j]));
            }
        }
    }
    best
}
