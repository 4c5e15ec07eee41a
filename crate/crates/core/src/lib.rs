//! Certified two-sided bounds on the analytic capacity of the compact sets
//! `K = {z : |R(z)| >= 1}` cut out by rational maps in partial-fraction form,
//! and the machinery to decide whether such a map is an Ahlfors function.
//!
//! The pipeline is: build a [`RationalMapPF`], check that its critical
//! values lie in the unit disk ([`RationalMapPF::is_n_good`]), trace the
//! boundary curves of `K` ([`boundary::trace`]), form the quadratic problems
//! over the rational basis `(z - p)^{-j}` ([`capacity::bounds_sequence`]) and
//! compare the resulting bracket with the sum of the residues
//! ([`capacity::verdict`]).

// `!(x > 0.0)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod capacity;
pub mod closedform;
pub mod format;
pub mod numerics;
pub mod published;
pub mod ratmap;

mod error;

pub use boundary::{BoundaryCurve, BoundaryNode, BoundarySampling};
pub use capacity::{
    AhlforsVerdict, BasisSpec, BoundEstimate, BoundsRow, CapacityBounds, GramSystem, VerdictStatus,
};
pub use error::{Error, Result};
pub use numerics::{Complex, ComplexPolynomial};
pub use ratmap::{CriticalData, GoodnessStatus, GoodnessVerdict, RationalMapPF, Term};
