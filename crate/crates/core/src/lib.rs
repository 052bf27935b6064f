//! Laboratory for seminormed fuzzy integrals on finite spaces.
//!
//! The objects of study are monotone set functions (capacities) on a small
//! finite space, simple functions into `[0, 1]`, and semicopulas: binary
//! operations on the unit interval that are non-decreasing in each argument
//! and have 1 as neutral element. The integral pairs a capacity with a
//! function through a semicopula by maximizing `S(t, mu(f >= t))` over
//! thresholds `t`, which on a finite space is an exact finite computation.
//!
//! The crate centers on one question: when does scaling the integrand
//! through the semicopula factor out of the integral? The [`homogeneity`]
//! module checks that identity on single instances and fuzzes it over
//! random ones; [`section`] profiles the one-variable sections of a
//! semicopula and classifies the operation by their continuity; and
//! [`limit_lab`] probes the boundary cases that finite instances cannot
//! reach, where the identity genuinely breaks for discontinuous
//! operations.
//!
//! [`doc`] defines the JSON documents the `sugenolab` command-line tool
//! reads and writes. All reports print floats with 17 significant digits,
//! so equal runs produce byte-identical output.

pub mod capacity;
pub mod doc;
pub mod homogeneity;
pub mod integral;
pub mod limit_lab;
pub mod section;
pub mod semicopula;
pub mod unit;

pub use capacity::{Capacity, ClosureBias, FiniteSpace, SimpleFunction, SubsetMask};
pub use homogeneity::{CheckReport, Expect, FuzzConfig, Instance};
pub use integral::{integrate, integrate_grid_oracle, IntegralResult};
pub use semicopula::{Semicopula, SemicopulaKind};
pub use unit::UnitValue;
