//! Scalars constrained to the closed unit interval.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

/// A validated number in `[0, 1]`.
///
/// Every scalar that crosses a public boundary in this crate — semicopula
/// arguments, capacity values, function values, integral levels — is a
/// `UnitValue`. Construction rejects NaN, infinities and out-of-range
/// numbers, so internal arithmetic never has to re-check.
///
/// Serializes as a JSON number with 17 significant digits, which is enough
/// to round-trip any `f64` exactly.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct UnitValue(f64);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitValueError {
    #[error("value {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("value is not finite")]
    NotFinite,
}

impl UnitValue {
    pub const ZERO: UnitValue = UnitValue(0.0);
    pub const ONE: UnitValue = UnitValue(1.0);

    pub fn new(value: f64) -> Result<Self, UnitValueError> {
        if !value.is_finite() {
            return Err(UnitValueError::NotFinite);
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(UnitValueError::OutOfRange(value));
        }
        Ok(UnitValue(value))
    }

    /// Clamps a finite number into `[0, 1]`.
    ///
    /// For values produced by arithmetic that is already known to stay in
    /// range up to rounding. Panics on NaN rather than guessing.
    pub fn clamped(value: f64) -> Self {
        assert!(!value.is_nan(), "cannot clamp NaN into [0, 1]");
        UnitValue(value.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl Eq for UnitValue {}

// No NaN by construction, so the total order is safe.
impl Ord for UnitValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).expect("UnitValue is never NaN")
    }
}

impl PartialOrd for UnitValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<UnitValue> for f64 {
    fn from(v: UnitValue) -> f64 {
        v.0
    }
}

impl Serialize for UnitValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        crate::doc::serialize_f64_sig17(&self.0, serializer)
    }
}

impl<'de> Deserialize<'de> for UnitValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = f64::deserialize(deserializer)?;
        UnitValue::new(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_and_non_finite() {
        assert!(UnitValue::new(0.0).is_ok());
        assert!(UnitValue::new(1.0).is_ok());
        assert!(UnitValue::new(-0.0001).is_err());
        assert!(UnitValue::new(1.0001).is_err());
        assert!(UnitValue::new(f64::NAN).is_err());
        assert!(UnitValue::new(f64::INFINITY).is_err());
    }

    #[test]
    fn ordering_is_total_on_valid_values() {
        let a = UnitValue::new(0.25).unwrap();
        let b = UnitValue::new(0.75).unwrap();
        assert!(a < b);
        assert_eq!(a.max(b), b);
    }

    #[test]
    fn serializes_with_17_significant_digits() {
        let v = UnitValue::new(0.5).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), "5.0000000000000000e-1");
        let w = UnitValue::new(0.1).unwrap();
        // round-trips exactly
        let back: UnitValue = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn deserializes_integer_tokens() {
        let v: UnitValue = serde_json::from_str("1").unwrap();
        assert_eq!(v, UnitValue::ONE);
        assert!(serde_json::from_str::<UnitValue>("1.5").is_err());
    }
}
