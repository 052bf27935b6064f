//! The seminormed integral of a simple function against a capacity.
//!
//! For `S` a semicopula, `mu` a capacity and `f` simple, the integral is
//!
//! ```text
//! I(mu, f) = sup over t in [0, 1] of S(t, mu({f >= t}))
//! ```
//!
//! With `S = minimum` this is the classical fuzzy integral; with
//! `S = product` the value is the largest rectangle `t * mu({f >= t})`.

use crate::capacity::{level_set_f64, Capacity, SimpleFunction};
use crate::semicopula::Semicopula;
use crate::unit::UnitValue;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegralError {
    #[error("capacity and function are defined on different spaces")]
    SpaceMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralMethod {
    Exact,
    Grid(u32),
}

impl Serialize for IntegralMethod {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            IntegralMethod::Exact => serializer.serialize_str("exact"),
            IntegralMethod::Grid(n) => serializer.serialize_str(&format!("grid({n})")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: UnitValue,
    /// Smallest level attaining the value.
    pub argmax_level: UnitValue,
    pub method: IntegralMethod,
}

/// Exact evaluation by finite reduction.
///
/// On a finite space `mu({f >= t})` is constant between consecutive
/// distinct values of `f`: for `t` in `(v_{i-1}, v_i]` the level set is
/// exactly `{f >= v_i}`. Since `S` is non-decreasing in its first
/// argument, the supremum over such an interval is attained at `t = v_i`.
/// Below the smallest value the level set is all of `X` and the segment
/// supremum is `S(t, 1) = t -> v_min`; above the largest value the level
/// set is empty and `S(t, 0) = 0`. So scanning `{0} union values(f)`
/// is exhaustive, not an approximation.
pub fn integrate(
    s: &Semicopula,
    mu: &Capacity,
    f: &SimpleFunction,
) -> Result<IntegralResult, IntegralError> {
    if mu.space() != f.space() {
        return Err(IntegralError::SpaceMismatch);
    }
    let mut candidates: Vec<f64> = f.values().to_vec();
    candidates.push(0.0);
    Ok(maximize(s, mu, f, candidates, IntegralMethod::Exact))
}

/// Independent slow route: maximizes over an equispaced grid of levels
/// joined with the values of `f`. Agrees with [`integrate`] for every
/// grid size because the extra candidates never beat the attained ones;
/// kept as a cross-check, not an optimization.
pub fn integrate_grid_oracle(
    s: &Semicopula,
    mu: &Capacity,
    f: &SimpleFunction,
    grid_n: u32,
) -> Result<IntegralResult, IntegralError> {
    if mu.space() != f.space() {
        return Err(IntegralError::SpaceMismatch);
    }
    let mut candidates: Vec<f64> = (0..=grid_n).map(|i| i as f64 / grid_n as f64).collect();
    candidates.extend_from_slice(f.values());
    Ok(maximize(s, mu, f, candidates, IntegralMethod::Grid(grid_n)))
}

fn maximize(
    s: &Semicopula,
    mu: &Capacity,
    f: &SimpleFunction,
    mut candidates: Vec<f64>,
    method: IntegralMethod,
) -> IntegralResult {
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("validated values are not NaN"));
    candidates.dedup();
    let mut best_value = 0.0;
    let mut best_level = 0.0;
    for t in candidates {
        let m = mu.value_f64(level_set_f64(f, t));
        let v = s.eval_f64(t, m);
        // strict: ties keep the earlier, hence smallest, level
        if v > best_value {
            best_value = v;
            best_level = t;
        }
    }
    IntegralResult {
        value: UnitValue::clamped(best_value),
        argmax_level: UnitValue::clamped(best_level),
        method,
    }
}
