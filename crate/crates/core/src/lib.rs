//! Quadratic repulsion functionals on generational (tree-structured) sets,
//! measures that minimize them, and the bridge to discrete Riesz 1-energy
//! and capacity of separated planar point configurations.
//!
//! The library is organized around a [`filtration::GenerationalSet`]: a tree
//! of constituents graded by generation, optionally carrying axis-aligned
//! square geometry (the four-corner Cantor construction is the canonical
//! geometric instance). On top of the set sit:
//!
//! * [`repulsion`]: the quadratic form `Q(mu) = sum r(Q,R) mu(Q) mu(R)` over
//!   leaf pairs, with both a quadratic-cost reference evaluator and a
//!   linear-cost hierarchical one, plus mass-exchange perturbations.
//! * [`minimizer`]: probability measures minimizing the repulsion form,
//!   with equidistribution and non-degeneracy certificates.
//! * [`riesz`]: seeded Monte Carlo estimation of the continuous 1-energy of
//!   a leaf-supported measure, and the repulsion-based lower bound.
//! * [`point_config`]: the inverse-distance kernel matrix of a separated
//!   point configuration, its equilibrium weights, capacity statistics, and
//!   batch sweeps that look for sign violations of the equilibrium weights.
//!
//! All randomized routines take explicit seeds and produce output that is
//! independent of thread count.

pub mod error;
pub mod filtration;
pub mod minimizer;
pub mod point_config;
pub mod repulsion;
pub mod riesz;
pub mod util;

pub use error::{Error, Result};
pub use filtration::{
    BoxGeom, BranchingProfile, GenerationalSet, LeafMeasure, RepulsionSchedule,
};
