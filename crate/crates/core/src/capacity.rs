//! Finite spaces, monotone set functions on them, and simple functions.
//!
//! A capacity assigns a value in `[0, 1]` to every subset of a finite space,
//! with `mu(empty) = 0`, `mu(X) = 1`, and monotonicity under inclusion.
//! Subsets are bitmasks over the point indices, so a space is limited to
//! [`MAX_POINTS`] points and a capacity is a dense table of `2^n` values.

use crate::unit::{UnitValue, UnitValueError};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

/// Hard cap on the number of points; keeps `2^n` tables small.
pub const MAX_POINTS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("a space needs at least one point")]
    Empty,
    #[error("a space is limited to {MAX_POINTS} points, got {0}")]
    TooLarge(usize),
    #[error("duplicate point label {0:?}")]
    DuplicateLabel(String),
    #[error("point label {0:?} contains a comma, which is reserved for subset notation")]
    LabelHasComma(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error("capacity table has {got} entries, expected {expected}")]
    WrongTableSize { got: usize, expected: usize },
    #[error("capacity value for {subset:?} is invalid: {source}")]
    BadValue {
        subset: String,
        source: UnitValueError,
    },
    #[error("capacity must assign 0 to the empty set, got {0}")]
    EmptyNotZero(f64),
    #[error("capacity must assign 1 to the full space, got {0}")]
    FullNotOne(f64),
    #[error(
        "capacity is not monotone: mu({smaller:?}) = {smaller_value} > mu({larger:?}) = {larger_value}"
    )]
    NotMonotone {
        smaller: String,
        smaller_value: f64,
        larger: String,
        larger_value: f64,
    },
    #[error("unknown point label {0:?}")]
    UnknownPoint(String),
    #[error("distortion must sample a non-decreasing map with d(0) = 0 and d(n) = 1")]
    BadDistortion,
}

/// A subset of a [`FiniteSpace`], one bit per point index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    #[inline]
    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    #[inline]
    pub fn with(self, index: usize) -> SubsetMask {
        SubsetMask(self.0 | (1 << index))
    }

    #[inline]
    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn cardinality(self) -> u32 {
        self.0.count_ones()
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |i| self.contains(*i))
    }
}

/// An ordered, labelled finite set of points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    labels: Vec<String>,
}

impl FiniteSpace {
    pub fn new<I, S>(labels: I) -> Result<Self, SpaceError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(SpaceError::Empty);
        }
        if labels.len() > MAX_POINTS {
            return Err(SpaceError::TooLarge(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.contains(',') {
                return Err(SpaceError::LabelHasComma(l.clone()));
            }
            if labels[..i].contains(l) {
                return Err(SpaceError::DuplicateLabel(l.clone()));
            }
        }
        Ok(FiniteSpace { labels })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn full_mask(&self) -> SubsetMask {
        SubsetMask(((1u64 << self.n()) - 1) as u32)
    }

    pub fn subset_count(&self) -> usize {
        1usize << self.n()
    }

    /// All subsets in mask order (empty first, full space last).
    pub fn masks(&self) -> impl Iterator<Item = SubsetMask> {
        (0..self.subset_count() as u32).map(SubsetMask)
    }

    /// Comma-joined labels in point order; the empty subset is `""`.
    pub fn subset_label(&self, mask: SubsetMask) -> String {
        let parts: Vec<&str> = (0..self.n())
            .filter(|i| mask.contains(*i))
            .map(|i| self.labels[i].as_str())
            .collect();
        parts.join(",")
    }

    pub fn parse_subset(&self, text: &str) -> Result<SubsetMask, CapacityError> {
        if text.is_empty() {
            return Ok(SubsetMask::EMPTY);
        }
        let mut mask = SubsetMask::EMPTY;
        for part in text.split(',') {
            let idx = self
                .index_of(part)
                .ok_or_else(|| CapacityError::UnknownPoint(part.to_string()))?;
            mask = mask.with(idx);
        }
        Ok(mask)
    }
}

/// How a capacity was built; kept so documents echo the same descriptor
/// they were parsed from instead of collapsing everything to a table.
#[derive(Debug, Clone, PartialEq)]
pub enum CapacityFamily {
    Table,
    Dirac { point: String },
    NormalizedCardinality,
    MinCapacity,
    MaxCapacity,
    DistortedCounting { samples: Vec<f64> },
}

/// Which closure direction [`Capacity::random`] repairs monotonicity with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureBias {
    /// `mu(A) = max` of the draw on `A` and all draws below it. Tends to
    /// push mass toward large values.
    Upward,
    /// `mu(A) = min` of the draw on `A` and all draws above it.
    Downward,
}

impl Default for ClosureBias {
    fn default() -> Self {
        ClosureBias::Upward
    }
}

/// A normalized monotone set function on a finite space.
#[derive(Debug, Clone, PartialEq)]
pub struct Capacity {
    space: Arc<FiniteSpace>,
    values: Vec<f64>,
    family: CapacityFamily,
}

impl Capacity {
    /// Builds a capacity from a dense table indexed by subset mask.
    pub fn from_table(space: Arc<FiniteSpace>, values: Vec<f64>) -> Result<Self, CapacityError> {
        Self::from_table_as(space, values, CapacityFamily::Table)
    }

    fn from_table_as(
        space: Arc<FiniteSpace>,
        values: Vec<f64>,
        family: CapacityFamily,
    ) -> Result<Self, CapacityError> {
        if values.len() != space.subset_count() {
            return Err(CapacityError::WrongTableSize {
                got: values.len(),
                expected: space.subset_count(),
            });
        }
        let cap = Capacity {
            space,
            values,
            family,
        };
        cap.validate()?;
        Ok(cap)
    }

    /// Full validation: range, exact boundary conditions, and monotonicity
    /// along every covering edge `A -> A + {x}` of the subset lattice.
    /// Covering edges suffice: any inclusion is a chain of them.
    fn validate(&self) -> Result<(), CapacityError> {
        for mask in self.space.masks() {
            let v = self.values[mask.0 as usize];
            if let Err(source) = UnitValue::new(v) {
                return Err(CapacityError::BadValue {
                    subset: self.space.subset_label(mask),
                    source,
                });
            }
        }
        if self.values[0] != 0.0 {
            return Err(CapacityError::EmptyNotZero(self.values[0]));
        }
        let full = self.space.full_mask();
        if self.values[full.0 as usize] != 1.0 {
            return Err(CapacityError::FullNotOne(self.values[full.0 as usize]));
        }
        for mask in self.space.masks() {
            let v = self.values[mask.0 as usize];
            for i in 0..self.space.n() {
                if mask.contains(i) {
                    continue;
                }
                let bigger = mask.with(i);
                let w = self.values[bigger.0 as usize];
                if v > w {
                    return Err(CapacityError::NotMonotone {
                        smaller: self.space.subset_label(mask),
                        smaller_value: v,
                        larger: self.space.subset_label(bigger),
                        larger_value: w,
                    });
                }
            }
        }
        Ok(())
    }

    /// Point mass: `mu(A) = 1` iff `A` contains the given point.
    pub fn dirac(space: Arc<FiniteSpace>, point: &str) -> Result<Self, CapacityError> {
        let idx = space
            .index_of(point)
            .ok_or_else(|| CapacityError::UnknownPoint(point.to_string()))?;
        let values = space
            .masks()
            .map(|m| if m.contains(idx) { 1.0 } else { 0.0 })
            .collect();
        Self::from_table_as(
            space,
            values,
            CapacityFamily::Dirac {
                point: point.to_string(),
            },
        )
    }

    /// `mu(A) = |A| / n`; the uniform probability measure.
    pub fn normalized_cardinality(space: Arc<FiniteSpace>) -> Self {
        let n = space.n() as f64;
        let values = space.masks().map(|m| m.cardinality() as f64 / n).collect();
        Self::from_table_as(space, values, CapacityFamily::NormalizedCardinality)
            .expect("normalized cardinality is always a capacity")
    }

    /// The smallest capacity: `0` on every proper subset, `1` on `X`.
    pub fn min_capacity(space: Arc<FiniteSpace>) -> Self {
        let full = space.full_mask();
        let values = space
            .masks()
            .map(|m| if m == full { 1.0 } else { 0.0 })
            .collect();
        Self::from_table_as(space, values, CapacityFamily::MinCapacity)
            .expect("min capacity is always a capacity")
    }

    /// The largest capacity: `1` on every non-empty subset.
    pub fn max_capacity(space: Arc<FiniteSpace>) -> Self {
        let values = space
            .masks()
            .map(|m| if m == SubsetMask::EMPTY { 0.0 } else { 1.0 })
            .collect();
        Self::from_table_as(space, values, CapacityFamily::MaxCapacity)
            .expect("max capacity is always a capacity")
    }

    /// `mu(A) = d(|A|)` for a sampled distortion `d` with `d(0) = 0`,
    /// `d(n) = 1`, non-decreasing. `samples` lists `d(0), ..., d(n)`.
    pub fn distorted_counting(
        space: Arc<FiniteSpace>,
        samples: Vec<f64>,
    ) -> Result<Self, CapacityError> {
        if samples.len() != space.n() + 1
            || samples[0] != 0.0
            || samples[space.n()] != 1.0
            || samples.iter().any(|v| UnitValue::new(*v).is_err())
            || samples.windows(2).any(|w| w[0] > w[1])
        {
            return Err(CapacityError::BadDistortion);
        }
        let values = space
            .masks()
            .map(|m| samples[m.cardinality() as usize])
            .collect();
        Self::from_table_as(
            space,
            values,
            CapacityFamily::DistortedCounting { samples },
        )
    }

    /// Deterministic random capacity: one uniform draw per proper non-empty
    /// subset, then a monotone closure, then rescaling so `mu(X) = 1`.
    pub fn random(space: Arc<FiniteSpace>, seed: u64, bias: ClosureBias) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_from_rng(space, &mut rng, bias)
    }

    pub fn random_from_rng<R: Rng>(
        space: Arc<FiniteSpace>,
        rng: &mut R,
        bias: ClosureBias,
    ) -> Self {
        let count = space.subset_count();
        let mut values = vec![0.0f64; count];
        for v in values.iter_mut().take(count - 1).skip(1) {
            *v = uniform_unit(rng.next_u64());
        }
        match bias {
            ClosureBias::Upward => {
                // mask order visits every strict subset before its supersets
                for mask in 1..count {
                    for i in 0..space.n() {
                        if mask & (1 << i) != 0 {
                            let below = values[mask & !(1 << i)];
                            if below > values[mask] {
                                values[mask] = below;
                            }
                        }
                    }
                }
            }
            ClosureBias::Downward => {
                values[count - 1] = 1.0;
                for mask in (1..count - 1).rev() {
                    for i in 0..space.n() {
                        if mask & (1 << i) == 0 {
                            let above = values[mask | (1 << i)];
                            if above < values[mask] {
                                values[mask] = above;
                            }
                        }
                    }
                }
            }
        }
        let top = values[count - 1];
        if top > 0.0 {
            for v in values.iter_mut() {
                *v /= top;
            }
        }
        values[0] = 0.0;
        values[count - 1] = 1.0;
        Self::from_table_as(space, values, CapacityFamily::Table)
            .expect("closure and rescaling produce a valid capacity")
    }

    #[inline]
    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn family(&self) -> &CapacityFamily {
        &self.family
    }

    pub fn value(&self, subset: SubsetMask) -> UnitValue {
        UnitValue::clamped(self.values[subset.0 as usize])
    }

    #[inline]
    pub fn value_f64(&self, subset: SubsetMask) -> f64 {
        self.values[subset.0 as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Setwise order: `self(A) <= other(A)` for every subset.
    pub fn setwise_le(&self, other: &Capacity) -> bool {
        self.space == other.space
            && self
                .values
                .iter()
                .zip(other.values.iter())
                .all(|(a, b)| a <= b)
    }
}

/// 53-bit uniform in `[0, 1)`; independent of rand's float conversions so
/// fuzz-report bytes stay stable across dependency upgrades.
#[inline]
pub(crate) fn uniform_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A function from the points of a finite space into `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleFunction {
    space: Arc<FiniteSpace>,
    values: Vec<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("function has {got} values, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("value for point {point:?} is invalid: {source}")]
    BadValue {
        point: String,
        source: UnitValueError,
    },
}

impl SimpleFunction {
    pub fn from_values(space: Arc<FiniteSpace>, values: Vec<f64>) -> Result<Self, FunctionError> {
        if values.len() != space.n() {
            return Err(FunctionError::WrongLength {
                got: values.len(),
                expected: space.n(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if let Err(source) = UnitValue::new(*v) {
                return Err(FunctionError::BadValue {
                    point: space.label(i).to_string(),
                    source,
                });
            }
        }
        Ok(SimpleFunction { space, values })
    }

    pub fn constant(space: Arc<FiniteSpace>, value: UnitValue) -> Self {
        let n = space.n();
        SimpleFunction {
            space,
            values: vec![value.get(); n],
        }
    }

    /// `b` on the subset, `0` elsewhere.
    pub fn scaled_indicator(space: Arc<FiniteSpace>, subset: SubsetMask, b: UnitValue) -> Self {
        let values = (0..space.n())
            .map(|i| if subset.contains(i) { b.get() } else { 0.0 })
            .collect();
        SimpleFunction { space, values }
    }

    #[inline]
    pub fn space(&self) -> &Arc<FiniteSpace> {
        &self.space
    }

    pub fn value(&self, index: usize) -> UnitValue {
        UnitValue::clamped(self.values[index])
    }

    #[inline]
    pub fn value_f64(&self, index: usize) -> f64 {
        self.values[index]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Applies a pointwise map; the result must stay in `[0, 1]`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, FunctionError> {
        Self::from_values(self.space.clone(), self.values.iter().map(|v| f(*v)).collect())
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// The level set `{x : f(x) >= t}` as a mask.
pub fn level_set(f: &SimpleFunction, t: UnitValue) -> SubsetMask {
    level_set_f64(f, t.get())
}

#[inline]
pub(crate) fn level_set_f64(f: &SimpleFunction, t: f64) -> SubsetMask {
    let mut mask = SubsetMask::EMPTY;
    for (i, v) in f.values().iter().enumerate() {
        if *v >= t {
            mask = mask.with(i);
        }
    }
    mask
}
