//! Solver library for monotone front equilibria in anti-plane shear of a
//! generalized neo-Hookean slab under a live body force.
//!
//! The displacement `u` on the strip `R x (-pi/2, pi/2)` satisfies the
//! quasilinear equation
//!
//! ```text
//!   div( W'(|grad u|^2) grad u ) - b(u, lambda) = 0,      u = 0 on the walls,
//! ```
//!
//! with `W` the strain-energy density and `b` a load-dependent body force.
//! The crate is organized along the objects of that problem:
//!
//! * [`material`]: constitutive data `W`, `b` and the structural conditions
//!   the solver relies on (ellipticity, monotone convex body force).
//! * [`conjugate`]: the one-dimensional transversal states `U±(lambda)` that
//!   a front connects, computed through the conserved quantity of the planar
//!   reduction, plus the flow force that ranks them.
//! * [`spectrum`]: the linearized transversal operator, its principal
//!   eigenvalue and a shooting certificate for kernel triviality.
//! * [`front`]: the two-dimensional Newton solver on a truncated strip,
//!   asymptotic seeds, and the nodal / gradient-bound diagnostics.

pub mod conjugate;
pub mod continuation;
pub mod error;
pub mod front;
pub mod material;
pub mod numerics;
pub mod spectrum;
pub mod verify;

pub use conjugate::TransversalProfile;
pub use continuation::{Branch, BranchPoint, ContinuationControls, TerminationTag};
pub use error::{Error, Result};
pub use front::{FrontState, Grid2D, MaxPrincipleReport, NodalReport};
pub use material::{BodyForceFamily, ConditionReport, MaterialModel};
pub use spectrum::{EigenResult, TransversalOperator};
pub use verify::CriterionReport;
