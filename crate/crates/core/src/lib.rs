//! Finite-element forward and adjoint solvers for the radial Helmholtz
//! equation in a layered ball, and multi-frequency reconstruction of radial
//! sources from boundary traces.
//!
//! The crate is `no_std` with `alloc`. Fields live on a one-dimensional grid
//! in the radius; all integrals include the spherical weight `4π r²`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod eigen;
pub mod error;
pub mod helmholtz;
pub mod media;
pub mod nonradiating;
pub mod quadrature;
pub mod radial;
pub mod reconstruction;
pub mod tridiag;

pub use eigen::{eigen_reconstruct, sturm_liouville_eigs, EigenBasis};
pub use error::{Error, Result};
pub use helmholtz::{solve_adjoint, solve_direct, ProblemKind};
pub use media::{FrequencyWeight, MediumSpec, SourceSpec};
pub use nonradiating::{make_nonradiating, RadialPolynomial};
pub use radial::{PiecewiseRadialProfile, RadialField, RadialGrid, Segment, SegmentShape};
pub use reconstruction::{
    adjoint_fields, assemble_gram, minimum_norm_reconstruction, relative_error, GramSystem, Measurement, MeasurementSet,
    ReconstructionResult, Regularization,
};

pub use num_complex::Complex64;
