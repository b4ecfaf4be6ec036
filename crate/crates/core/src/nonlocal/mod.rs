//! Nonlocal curvature, the fractional Laplacian on a curve, the Jacobi
//! operator and the deformed-distance kernels.

mod fmc;
mod kernel;
mod table;

pub use fmc::{first_variation, fractional_mean_curvature};
pub use kernel::{
    comparability_range, kernel_ku, kernel_linearized, moment_identity, moment_psi,
    s_kappa_diagnostics, KernelDiagnostics, KernelMatrix, MomentIdentity,
};
pub use table::{c_s_squared, fractional_laplacian_subtracted, read_binary_matrix, NonlocalOperatorTable};

pub(crate) use kernel::graph_nodes;
