//! Discretizations of moving-average processes into coefficient matrices.

mod fem;
mod field;
mod integral;
mod mesh;
mod partition;

pub use fem::{fem_assemble, fem_assemble_fractional, fem_coefficients, write_coo, FemSystem, FRACTIONAL_TOL, NEGATIVE_CLAMP};
pub use field::{simulate_field, FieldModel, SampleMatrix, SimulationOptions};
pub use integral::integral_coefficients;
pub use mesh::{lattice_mesh_2d, Mesh2D, MeshRecord, Point, Representative};
pub use partition::{ou_coefficients, partition_1d, Partition1D, PartitionMode};
