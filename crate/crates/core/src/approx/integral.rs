use super::mesh::{Mesh2D, Point};
use crate::error::{Error, Result};
use crate::kernels::{Kernel, KernelValue};
use crate::lintrans::CoefficientMatrix;

/// Integral approximation: entry `(j, i) = G(|s_j - d_i|)` over the cells of `mesh`.
pub fn integral_coefficients(kernel: &Kernel, sites: &[Point], mesh: &Mesh2D) -> Result<CoefficientMatrix> {
    let rows = sites
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            if mesh.locate(s).is_none() {
                return Err(Error::Domain(format!("site {j} at ({}, {}) lies outside the mesh", s[0], s[1])));
            }
            mesh.representatives()
                .iter()
                .map(|d| {
                    let h = (s[0] - d[0]).hypot(s[1] - d[1]);
                    match kernel.value(h)? {
                        KernelValue::Finite(v) => Ok(v),
                        KernelValue::Infinite => Err(Error::SingularCoefficient { site: j }),
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    CoefficientMatrix::new(rows)
}
