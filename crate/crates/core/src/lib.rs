//! Logical-qudit laboratory: generalized qudit operators, logical encodings,
//! stabilizer-group homomorphisms, nonclassicality witnesses, exhaustive
//! local-hidden-variable oracles and truncated-Fock continuous-variable checks.
//!
//! The linear-algebra layer ([`tensor`], [`qudit`], [`weyl`]) is generic over
//! the real scalar type; the analysis modules work in `f64` through the
//! aliases re-exported here.

pub mod cv;
pub mod encodings;
pub mod error;
pub mod io;
pub mod lhv;
pub mod qudit;
pub mod scalar;
pub mod stabilizer;
pub mod tables;
pub mod tensor;
pub mod weyl;
pub mod witness;

pub use error::{Error, Result};
pub use qudit::{
    clock_z, ghz_state, half_root_power, omega_power, shift_x, uniform_state, w_state, y_op,
    y_op_with_branch, QuditDim, RootBranch,
};
pub use scalar::Real;
pub use tensor::{embed_local, expectation, kron, kron_all, variance, Expectation};
pub use weyl::{weyl_to_matrix, WeylWord};

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision dense complex matrix.
pub type ComplexMatrix = tensor::Matrix<f64>;
/// Double-precision pure state.
pub type StateVector = tensor::State<f64>;
/// Double-precision mixed state.
pub type DensityMatrix = tensor::DensityMatrix<f64>;

pub use tensor::{Matrix, State};
