//! Convex polyhedra with prescribed face areas.
//!
//! Any list of `n >= 4` positive areas whose largest entry does not exceed the
//! sum of the rest is the list of face areas of a closed convex polyhedron.
//! This crate builds one:
//!
//! 1. [`feasibility`] validates and classifies the areas, and handles the flat
//!    (equality) case directly.
//! 2. [`cyclic`] closes the chain of links `A_1..A_n` into a convex polygon
//!    inscribed in a circle.
//! 3. [`lift`] rotates part of that planar polygon out of the plane so that the
//!    edge vectors span R³ while still summing to zero.
//! 4. [`minkowski`] finds support numbers whose halfspace intersection has the
//!    edge vectors as facet area vectors, using the [`geometry`] kernel.

pub mod cyclic;
mod error;
pub mod feasibility;
pub mod geometry;
pub mod lift;
pub mod minkowski;

pub use error::{Error, Result};

pub use cyclic::{closure_residual, layout_polygon, solve_radius, Branch, CyclicPolygon};
pub use feasibility::{
    classify, construct_flat, make_area_spec, AreaSpec, Classification, FlatPolyhedron, Tag,
    DEFAULT_TOL_EQ,
};
pub use geometry::{area_jacobian, intersect_halfspaces, measure, Facet, Polyhedron};
pub use lift::{balanced_spins, half_fold, validate_system, EquilibratedSystem, LiftMode, ValidationReport};
pub use minkowski::{solve_minkowski, verify_solution, MinkowskiSolution, SolveOptions, VerificationReport};

/// 3D vector type used throughout the crate.
pub type Vec3 = nalgebra::Vector3<f64>;
