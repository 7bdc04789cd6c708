//! Local invariants, infinitesimal symmetries and singular-surface analysis of
//! sub-Riemannian structures `(Δ = ker ω, g|Δ)` on open subsets of ℝ³.
//!
//! Every quantity is carried as a truncated Taylor [`Jet`] at the point of
//! interest, so the derivatives that the invariants and the symmetry system
//! need come out exactly up to rounding. The usual entry points are
//! [`invariants::compute_invariants`], [`symmetry::build_system`] and
//! [`singular::locate_sigma`].

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod expr;
pub mod field;
pub mod frame;
pub mod invariants;
pub mod jet;
mod parse;
pub mod quadrature;
pub mod report;
pub mod selftest;
pub mod settings;
pub mod singular;
pub mod symmetry;
pub mod vector;

pub use error::{Error, JetError, ParseError, Result};
pub use expr::Expr;
pub use field::{parse_scalar, FieldRef, MetricField, OneForm, ScalarField};
pub use frame::{AdaptedFrame, FrameKind, Pair, StructureFunctions};
pub use invariants::InvariantValues;
pub use jet::{Axis, Jet, MultiIndex, Point};
pub use settings::{Gauge, Settings};
pub use vector::{Covector, JetVector};
