//! Numerical engine for the Moebius (conformal) geometry of parametrized
//! umbilic-free hypersurfaces in Euclidean space.
//!
//! The crate computes pointwise Moebius invariants (conformal factor, Moebius
//! shape operator and principal curvatures, Blaschke tensor, Moebius form,
//! curvature of the Moebius metric), evaluates the conformal structure
//! equations as residuals, decides semi-parallelity of the Moebius second
//! fundamental form by two independent routes, and classifies sampled
//! hypersurfaces against the known branch structure. A catalog of standard
//! constructions (cylinders, cones, rotational hypersurfaces, product
//! spheres, prescribed-curvature curves) provides ready-made fixtures.

pub mod catalog;
pub mod classifier;
pub mod error;
pub mod invariants;
pub mod jet;
pub mod linalg;
pub mod report;
pub mod sampling;
pub mod semiparallel;
pub mod taylor;

pub use error::{Error, Result};
pub use jet::{evaluate_jet, evaluate_jet_fd, ImmersionSpec, Jet};
