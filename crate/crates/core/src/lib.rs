//! Exact-rational computational kernel for asymmetric `L_p`-projection-body
//! operators on convex polytopes.
//!
//! The crate is split along the natural layers of the problem:
//!
//! * [`rational`] / [`linalg`] — exact arithmetic: big rationals, vectors,
//!   matrices with cached determinants.
//! * [`hull`] — exact convex hull and facet enumeration, triangulation.
//! * [`polytope`] — the V/H polytope representation, hyperplane cuts,
//!   origin cones, simplices and JSON round-tripping.
//! * [`lp`] — the algebra of p-homogeneous functions `Σ cᵢ⟨wᵢ,·⟩±^p` and
//!   their formal differences.
//! * [`ops`] — the projection-body operators `Π_p^±`, their extensions,
//!   the signed valuations `Δ_p^±`, nonnegative combinations and
//!   constant fitting.
//! * [`verify`] — seeded generators and the property-check harness for
//!   every identity the operators satisfy.
//!
//! All combinatorial decisions (hull incidence, sign of support values,
//! cut vertices) are made in exact rational arithmetic; floating point
//! only enters through `(n-1)`-volumes and real powers `|h|^{1-p}`.

pub mod error;
pub mod hull;
pub mod linalg;
pub mod lp;
pub mod ops;
pub mod polytope;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::LinearMap;
pub use lp::{LpFunction, LpTerm, SignedLpFunction, TermSign};
pub use ops::OperatorKind;
pub use polytope::{Facet, Hyperplane, Polytope};
pub use rational::{Int, Rat, Vector};
pub use verify::CheckReport;
