//! Dense complex linear algebra: the Hermitian eigensolver, matrix
//! functions, norms, fidelity, divergences, tensor structure and random
//! matrices.

mod eig;
mod funcs;
mod matrix;
mod random;
mod tensor;

pub use eig::{hermitian_eig, EigenSystem, DEFAULT_TOL, HERMITIAN_TOL, SWEEP_CAP};
pub use funcs::{
    fidelity, mat_func, mat_func_eig, rel_entropy, renyi_divergence, sandwiched_renyi, schatten_norm,
    singular_values, sqrt_psd, trace_power, NEG_CLIP, SUPPORT_TOL,
};
pub use matrix::ComplexMatrix;
pub use random::{ginibre, haar_unitary, random_hermitian, RandomStream};
pub use tensor::{kron, partial_trace, partial_transpose, Dims, Subsystem};
