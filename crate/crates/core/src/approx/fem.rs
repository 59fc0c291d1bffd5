use std::io::Write;

use std::f64::consts::PI;

use sprs::{CsMat, TriMat};
use sprs_ldl::{Ldl, LdlNumeric};

use super::mesh::{Mesh2D, Point};
use crate::error::{param, precondition, Error, Result};
use crate::lintrans::CoefficientMatrix;

/// Relative accuracy targeted by the quadrature for fractional powers.
pub const FRACTIONAL_TOL: f64 = 1e-10;

/// Step of the trapezoidal rule in `y = ln t`.
const SINC_STEP: f64 = 0.4;

/// Relative floor below which negative coefficients are clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-10;

enum Operator {
    /// `K^{-1} = (L^{-1} C)^{p-1} L^{-1}` for `alpha = 2p`.
    Even { factor: LdlNumeric<f64, usize>, power: usize },
    /// `K^{-1} = (L^{-1} C)^m sum_l w_l (t_l C + L)^{-1}` for `alpha = 2 (m + beta)`,
    /// the sum being a sinc quadrature of `A^{-beta}`, `A = C^{-1} L`.
    Fractional { factor: LdlNumeric<f64, usize>, power: usize, shifts: Vec<(f64, LdlNumeric<f64, usize>)> },
}

/// Piecewise-linear finite-element discretization of `(kappa^2 - Laplacian)^(alpha/2)`.
pub struct FemSystem {
    kappa: f64,
    alpha: f64,
    lumped: bool,
    mass: CsMat<f64>,
    lumped_mass: Vec<f64>,
    stiffness: CsMat<f64>,
    operator: CsMat<f64>,
    k_alpha: Option<CsMat<f64>>,
    solver: Operator,
}

impl std::fmt::Debug for FemSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FemSystem")
            .field("nodes", &self.nodes())
            .field("kappa", &self.kappa)
            .field("alpha", &self.alpha)
            .field("lumped", &self.lumped)
            .finish()
    }
}

struct Assembled {
    mass: CsMat<f64>,
    lumped: Vec<f64>,
    stiffness: CsMat<f64>,
}

fn assemble(mesh: &Mesh2D) -> Result<Assembled> {
    let n = mesh.nodes().len();
    let mut mass = TriMat::new((n, n));
    let mut stiff = TriMat::new((n, n));
    let mut lumped = vec![0.0; n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let p = mesh.corners(t);
        let area = mesh.areas()[t];
        if !(area > 0.0) {
            return Err(Error::DegenerateTriangle { index: t, area });
        }
        let b: [f64; 3] = std::array::from_fn(|i| p[(i + 1) % 3][1] - p[(i + 2) % 3][1]);
        let c: [f64; 3] = std::array::from_fn(|i| p[(i + 2) % 3][0] - p[(i + 1) % 3][0]);
        for i in 0..3 {
            lumped[tri[i]] += area / 3.0;
            for j in 0..3 {
                let m = if i == j { area / 6.0 } else { area / 12.0 };
                mass.add_triplet(tri[i], tri[j], m);
                stiff.add_triplet(tri[i], tri[j], (b[i] * b[j] + c[i] * c[j]) / (4.0 * area));
            }
        }
    }
    Ok(Assembled { mass: mass.to_csr(), lumped, stiffness: stiff.to_csr() })
}

fn diagonal(d: &[f64]) -> CsMat<f64> {
    let n = d.len();
    CsMat::new((n, n), (0..=n).collect(), (0..n).collect(), d.to_vec())
}

pub(crate) fn mat_vec(m: &CsMat<f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; m.rows()];
    if m.is_csr() {
        for (r, row) in m.outer_iterator().enumerate() {
            y[r] = row.iter().map(|(c, &v)| v * x[c]).sum();
        }
    } else {
        for (c, col) in m.outer_iterator().enumerate() {
            for (r, &v) in col.iter() {
                y[r] += v * x[c];
            }
        }
    }
    y
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return param(format!("kappa must be positive, got {kappa}"));
    }
    Ok(())
}

/// Sparse assembly for `alpha` in {2, 4, 6}.
pub fn fem_assemble(mesh: &Mesh2D, kappa: f64, alpha_even: u32, lumped: bool) -> Result<FemSystem> {
    check_kappa(kappa)?;
    if !matches!(alpha_even, 2 | 4 | 6) {
        return precondition(format!("sparse assembly needs alpha in {{2, 4, 6}}, got {alpha_even}"));
    }
    let a = assemble(mesh)?;
    let c = if lumped { diagonal(&a.lumped) } else { a.mass.clone() };
    let l = (&(&c * (kappa * kappa)) + &a.stiffness).to_csr();
    let power = (alpha_even / 2) as usize;
    let k_alpha = if power == 1 {
        Some(l.clone())
    } else if lumped {
        let inv = diagonal(&a.lumped.iter().map(|v| 1.0 / v).collect::<Vec<_>>());
        let step = &l * &inv;
        let mut k = l.clone();
        for _ in 1..power {
            k = (&step * &k).to_csr();
        }
        Some(k)
    } else {
        None
    };
    let factor = factorize(&l, "kappa^2 C + G")?;
    Ok(FemSystem {
        kappa,
        alpha: alpha_even as f64,
        lumped,
        mass: a.mass,
        lumped_mass: a.lumped,
        stiffness: a.stiffness,
        operator: l,
        k_alpha,
        solver: Operator::Even { factor, power },
    })
}

fn factorize(m: &CsMat<f64>, what: &str) -> Result<LdlNumeric<f64, usize>> {
    let f = Ldl::new().numeric(m.view()).map_err(|e| Error::LinearAlgebra(format!("factorizing {what}: {e}")))?;
    if f.d().iter().any(|&v| !(v > 0.0)) {
        return Err(Error::LinearAlgebra(format!("{what} is not positive definite")));
    }
    Ok(f)
}

/// Assembly for any `alpha > 0`. Even integers use exact sparse powers; the
/// fractional part `beta` of `alpha / 2` goes through
/// `A^{-beta} = sin(pi beta)/pi * integral exp((1 - beta) y) (e^y I + A)^{-1} dy`.
pub fn fem_assemble_fractional(mesh: &Mesh2D, kappa: f64, alpha: f64, lumped: bool) -> Result<FemSystem> {
    check_kappa(kappa)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return param(format!("alpha must be positive, got {alpha}"));
    }
    let half = 0.5 * alpha;
    let power = half.floor() as usize;
    let beta = half - power as f64;
    let a = assemble(mesh)?;
    let c = if lumped { diagonal(&a.lumped) } else { a.mass.clone() };
    let l = (&(&c * (kappa * kappa)) + &a.stiffness).to_csr();
    let factor = factorize(&l, "kappa^2 C + G")?;
    let mut shifts = Vec::new();
    if beta > 1e-12 {
        // Spectrum of A lies in [kappa^2, lambda_max]; Gershgorin on the lumped form,
        // doubled to cover the consistent mass.
        let lambda_max = l
            .outer_iterator()
            .enumerate()
            .map(|(r, row)| row.iter().map(|(_, v)| v.abs()).sum::<f64>() / a.lumped[r])
            .fold(0.0, f64::max)
            * if lumped { 1.0 } else { 2.0 };
        let lambda_min = kappa * kappa;
        let ln_eps = FRACTIONAL_TOL.ln();
        let y_lo = lambda_min.ln() + (ln_eps + (1.0 - beta).ln()) / (1.0 - beta);
        let y_hi = lambda_max.ln() + (-ln_eps - beta.ln()) / beta;
        let steps = ((y_hi - y_lo) / SINC_STEP).ceil() as usize;
        let scale = (PI * beta).sin() / PI * SINC_STEP;
        for k in 0..=steps {
            let y = y_lo + k as f64 * SINC_STEP;
            let shifted = (&(&c * y.exp()) + &l).to_csr();
            shifts.push((scale * ((1.0 - beta) * y).exp(), factorize(&shifted, "t C + L")?));
        }
    }
    let k_alpha = (power == 1 && shifts.is_empty()).then(|| l.clone());
    Ok(FemSystem {
        kappa,
        alpha,
        lumped,
        mass: a.mass,
        lumped_mass: a.lumped,
        stiffness: a.stiffness,
        operator: l,
        k_alpha,
        solver: Operator::Fractional { factor, power, shifts },
    })
}

impl FemSystem {
    pub fn nodes(&self) -> usize {
        self.lumped_mass.len()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lumped(&self) -> bool {
        self.lumped
    }

    /// Consistent mass matrix `C_ij = <phi_i, phi_j>`.
    pub fn mass(&self) -> &CsMat<f64> {
        &self.mass
    }

    /// Row sums of the mass matrix, `integral of phi_i`.
    pub fn lumped_mass(&self) -> &[f64] {
        &self.lumped_mass
    }

    /// Stiffness matrix `G_ij = <grad phi_i, grad phi_j>`.
    pub fn stiffness(&self) -> &CsMat<f64> {
        &self.stiffness
    }

    /// `kappa^2 C + G`, with `C` lumped when the system is.
    pub fn operator(&self) -> &CsMat<f64> {
        &self.operator
    }

    /// Sparse `K_alpha` when it exists: always for `alpha = 2`, and for lumped even powers.
    pub fn k_alpha(&self) -> Option<&CsMat<f64>> {
        self.k_alpha.as_ref()
    }

    /// Areas of the dual cells `D_j`, equal to the lumped mass.
    pub fn dual_areas(&self) -> &[f64] {
        &self.lumped_mass
    }

    fn c_times(&self, x: &[f64]) -> Vec<f64> {
        if self.lumped {
            x.iter().zip(&self.lumped_mass).map(|(a, b)| a * b).collect()
        } else {
            mat_vec(&self.mass, x)
        }
    }

    /// `K_alpha^{-1} b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.nodes() {
            return param(format!("right-hand side has {} entries for {} nodes", b.len(), self.nodes()));
        }
        let x = match &self.solver {
            Operator::Even { factor, power } => {
                let mut x: Vec<f64> = factor.solve(b);
                for _ in 1..*power {
                    x = factor.solve(&self.c_times(&x));
                }
                x
            }
            Operator::Fractional { factor, power, shifts } => {
                let mut x = if shifts.is_empty() {
                    b.to_vec()
                } else {
                    let mut acc = vec![0.0; b.len()];
                    for (w, f) in shifts {
                        let y: Vec<f64> = f.solve(b);
                        for (a, v) in acc.iter_mut().zip(&y) {
                            *a += w * v;
                        }
                    }
                    acc
                };
                for k in 0..*power {
                    // With no fractional part the first step is L^{-1} b itself.
                    let rhs = if k == 0 && shifts.is_empty() { x.clone() } else { self.c_times(&x) };
                    x = factor.solve(&rhs);
                }
                x
            }
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearAlgebra("solve produced non-finite values".into()));
        }
        Ok(x)
    }

    /// `K_alpha x` for even systems (inverse of [`FemSystem::solve`]).
    pub fn apply(&self, x: &[f64]) -> Option<Vec<f64>> {
        let Operator::Even { power, .. } = &self.solver else {
            return None;
        };
        let mut y = mat_vec(&self.operator, x);
        for _ in 1..*power {
            let z: Vec<f64> = if self.lumped {
                y.iter().zip(&self.lumped_mass).map(|(a, b)| a / b).collect()
            } else {
                let f = Ldl::new().numeric(self.mass.view()).ok()?;
                f.solve(&y)
            };
            y = mat_vec(&self.operator, &z);
        }
        Some(y)
    }
}

/// Writes `row,col,value` lines for a sparse matrix.
pub fn write_coo<W: Write>(m: &CsMat<f64>, mut w: W) -> Result<()> {
    writeln!(w, "row,col,value")?;
    for (v, (r, c)) in m.iter() {
        writeln!(w, "{r},{c},{v}")?;
    }
    Ok(())
}

/// Hat-basis values at `x`, as (node, weight) pairs.
fn basis_at(mesh: &Mesh2D, x: Point, site: usize) -> Result<[(usize, f64); 3]> {
    let (t, w) = mesh
        .locate(x)
        .ok_or_else(|| Error::Domain(format!("site {site} at ({}, {}) lies outside the mesh", x[0], x[1])))?;
    let tri = mesh.triangles()[t];
    Ok([(tri[0], w[0]), (tri[1], w[1]), (tri[2], w[2])])
}

/// Rows `K_alpha^{-1} phi(s_j)` over all nodes, with tiny negatives clamped.
pub(crate) fn fem_rows(system: &FemSystem, mesh: &Mesh2D, sites: &[Point]) -> Result<Vec<Vec<f64>>> {
    if mesh.nodes().len() != system.nodes() {
        return param("mesh and finite-element system have different node counts");
    }
    sites
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let mut phi = vec![0.0; system.nodes()];
            for (node, w) in basis_at(mesh, s, j)? {
                phi[node] += w;
            }
            let mut row = system.solve(&phi)?;
            let row_max = row.iter().cloned().fold(0.0, f64::max);
            if !(row_max > 0.0) {
                return Err(Error::LinearAlgebra(format!("row {j} has no positive coefficient")));
            }
            for v in row.iter_mut() {
                if *v < 0.0 {
                    if *v < -NEGATIVE_CLAMP * row_max {
                        return Err(Error::Nonnegativity { row: j, value: *v, row_max });
                    }
                    *v = 0.0;
                }
            }
            Ok(row)
        })
        .collect()
}

/// Coefficients of the finite-element approximation at `sites`; nodes no row loads are dropped.
pub fn fem_coefficients(system: &FemSystem, mesh: &Mesh2D, sites: &[Point]) -> Result<CoefficientMatrix> {
    CoefficientMatrix::dropping_zero_columns(fem_rows(system, mesh, sites)?)
}
