//! Certificates of universal rigidity for bar-joint frameworks.
//!
//! The crate computes equilibrium stresses and stress matrices in exact
//! rational arithmetic, decides super stability (PSD stress of rank
//! n − d − 1 with no conic at infinity), runs the lift test through a
//! higher-dimensional super-stable framework, projects frameworks
//! orthogonally with exact distance splitting, and traces planar flexes of
//! line frameworks to exhibit non-rigidity.
//!
//! The [`gallery`] module builds the triangular-prism pair on the line: two
//! realizations with the same vertex order, one certified universally rigid
//! and one with an explicit noncongruent planar realization.

pub mod certify;
pub mod error;
pub mod flex;
pub mod framework;
pub mod gallery;
pub mod linalg;
pub mod scalar;
pub mod stress;
pub mod transform;

pub use certify::{
    certify_by_lift, certify_super_stable, check_affine_image, check_convex_polygon_stress, AffineMap,
    SearchOptions, SuperStabilityCertificate, Verdict,
};
pub use error::{Error, Result};
pub use framework::{affine_span_dim, check_congruent, check_equivalent, Configuration, Framework, Graph};
pub use linalg::{psd_rank, rref_kernel, MatrixR, PsdCertificate};
pub use scalar::Scalar;
pub use stress::{equilibrium_stress_basis, is_equilibrium, stress_matrix, Stress};
