//! Ready-made hypersurface fixtures: the space-form surfaces, the cylinder /
//! cone / rotational constructions over them, the standard two-curvature
//! products, prescribed-curvature curves, and two negative controls.

pub mod constructions;
pub mod curves;
pub mod registry;
pub mod specfile;
pub mod surfaces;

pub use constructions::{
    generic_graph, make_cone, make_cylinder, make_rotational, perturbed_clifford_cone,
    sphere_patch, standard_cone, standard_cylinder, standard_products, standard_torus,
    ProductKind,
};
pub use curves::{
    curve_with_curvature, integrated_curve_cylinder, spiral_cylinder, CurvatureLaw,
    IntegratedCurve,
};
pub use registry::{entries, lookup, parse_name, EntryInfo};
pub use specfile::{load_spec_file, parse_spec_file, resolve, SpecFile};
pub use surfaces::{
    clifford_torus, hyperbolic_cylinder, surface_geometry, SurfaceGeometry, SurfaceSpec,
};
