//! States, Hamiltonians, entropic functionals and the dense Hermitian
//! linear-algebra kernel.

pub mod eigen;
pub mod entropy;
pub mod matrix;
pub mod state;

pub use eigen::{eigh, eigvalsh, HermitianEigen};
pub use entropy::{
    fidelity, free_energy, gibbs_state, gibbs_weight, log_partition_function, relative_entropy, shannon_entropy,
    trace_distance, von_neumann_entropy,
};
pub use matrix::{ComplexMatrix, C64};
pub use state::{DensityMatrix, Hamiltonian, ThermoContext};

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Maximum |A_ij − conj(A_ji)| accepted for Hermitian input.
    pub const HERMITIAN: f64 = 1e-9;
    /// Most negative eigenvalue accepted for a PSD input.
    pub const PSD: f64 = 1e-9;
    /// Allowed deviation of a state's trace from one.
    pub const TRACE: f64 = 1e-9;
    /// Eigenvalues at or below this contribute 0 to entropies.
    pub const EIG_CUTOFF: f64 = 1e-12;
    /// ‖Σ K†K − 1‖ accepted for a channel.
    pub const TRACE_PRESERVING: f64 = 1e-8;
}

/// Partial trace keeping the listed factors.
pub fn partial_trace(mat: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> crate::Result<ComplexMatrix> {
    mat.partial_trace(dims, keep)
}
