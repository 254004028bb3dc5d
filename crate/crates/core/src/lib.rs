//! Exact solvers, certifiers and experiment drivers for fair division of
//! multidimensional necklaces.
//!
//! A *necklace* is an axis-aligned cube (or cuboid) whose points are
//! partitioned into `k` colors; a *fair q-splitting of size t* divides it by
//! `t` hyperplane cuts into pieces that can be handed to `q` parts so that
//! every part captures exactly `1/q` of every color. This crate provides:
//!
//! * exact rational domain types for necklaces, colorings, cuts and
//!   splittings ([`model`]),
//! * exact polytope geometry for arbitrary-hyperplane splittings
//!   ([`geometry`], [`linprog`]),
//! * exhaustive 1-D solvers and certifiers ([`splitter1d`]),
//! * the lexicographic-lift splitter and discrete d-dimensional oracles
//!   ([`splittermd`]),
//! * adversarial colorings, degrees-of-freedom audits and fairness equation
//!   systems ([`adversary`]),
//! * searches for pairs of equally colored cubes ([`distinguish`]),
//! * subset-counting experiments for discrete lower bounds
//!   ([`discrete_bounds`]),
//! * a canonical JSON interchange format ([`mod@format`]) and deterministic
//!   seed-stream splitting ([`seed`]).
//!
//! All geometric quantities are exact rationals; floating point appears only
//! inside numerical *search* (multistart root finding), and every numerical
//! candidate is re-validated exactly before being reported.

pub mod adversary;
mod affine;
pub mod discrete_bounds;
pub mod distinguish;
mod error;
pub mod format;
pub mod geometry;
pub mod linprog;
pub mod model;
pub mod numeric;
pub mod rat;
pub mod seed;
pub mod splitter1d;
pub mod splittermd;

pub use error::{Error, Result};
pub use model::{
    discrete_to_grid, granularity_axis, part_measures, AxisCut, ColorId, Cuboid,
    DiscreteNecklace, GridColoring, NecklaceBox, PartMeasures, Splitting,
};
pub use rat::Rat;
