//! The scaling identity `I(mu, S(a, f)) = S(a, I(mu, f))` and a
//! counterexample search harness around it.
//!
//! Associativity of `S` with well-behaved sections makes the identity
//! hold on finite spaces; a non-associative `S` breaks it already on
//! two-point instances (see [`indicator_instance`]). The fuzz campaign
//! hunts for violations with deterministic per-trial randomness, confirms
//! every hit through the independent grid route, and [`shrink`] reduces a
//! witness to something a human can read.

use crate::capacity::{Capacity, ClosureBias, FiniteSpace, SimpleFunction, SubsetMask};
use crate::integral::{integrate, integrate_grid_oracle, IntegralError};
use crate::semicopula::{Semicopula, SemicopulaKind};
use crate::unit::UnitValue;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

/// Everything below this gap is attributed to rounding, not structure.
/// The evaluation paths keep rounding within a few ulps, roughly three
/// orders of magnitude under this line.
pub const CHECK_TOLERANCE: f64 = 1e-12;

/// Grid size used when re-confirming a hit through the oracle route.
const CONFIRM_GRID: u32 = 128;

/// One fully specified check case: operation, capacity, function, level.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub semicopula: Semicopula,
    pub capacity: Capacity,
    pub function: SimpleFunction,
    pub a: UnitValue,
}

impl Instance {
    pub fn new(
        semicopula: Semicopula,
        capacity: Capacity,
        function: SimpleFunction,
        a: UnitValue,
    ) -> Result<Self, IntegralError> {
        if capacity.space() != function.space() {
            return Err(IntegralError::SpaceMismatch);
        }
        Ok(Instance {
            semicopula,
            capacity,
            function,
            a,
        })
    }

    pub fn space(&self) -> &Arc<FiniteSpace> {
        self.capacity.space()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckVerdict {
    EqualWithinTol,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    /// `I(mu, S(a, f))`
    pub l: UnitValue,
    /// `S(a, I(mu, f))`
    pub p: UnitValue,
    #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
    pub gap: f64,
    pub verdict: CheckVerdict,
    #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
    pub tolerance: f64,
    pub instance: Instance,
}

fn both_sides(instance: &Instance) -> (UnitValue, UnitValue) {
    let s = &instance.semicopula;
    let a = instance.a.get();
    let scaled = instance
        .function
        .map(|v| s.eval_f64(a, v))
        .expect("scaling stays inside [0, 1]");
    let l = integrate(s, &instance.capacity, &scaled)
        .expect("instance spaces were validated")
        .value;
    let inner = integrate(s, &instance.capacity, &instance.function)
        .expect("instance spaces were validated")
        .value;
    let p = s.evaluate(instance.a, inner);
    (l, p)
}

/// Evaluates both routes of the identity on one instance.
pub fn check(instance: &Instance) -> CheckReport {
    let (l, p) = both_sides(instance);
    let gap = (l.get() - p.get()).abs();
    let verdict = if gap <= CHECK_TOLERANCE {
        CheckVerdict::EqualWithinTol
    } else {
        CheckVerdict::Violation
    };
    CheckReport {
        l,
        p,
        gap,
        verdict,
        tolerance: CHECK_TOLERANCE,
        instance: instance.clone(),
    }
}

pub fn violates(instance: &Instance) -> bool {
    let (l, p) = both_sides(instance);
    (l.get() - p.get()).abs() > CHECK_TOLERANCE
}

/// Confirms a hit through the grid route; disagreement between the two
/// routes would mean an integration bug, and such a hit is not counted.
fn confirmed_by_oracle(instance: &Instance) -> bool {
    let s = &instance.semicopula;
    let a = instance.a.get();
    let scaled = instance
        .function
        .map(|v| s.eval_f64(a, v))
        .expect("scaling stays inside [0, 1]");
    let l = integrate_grid_oracle(s, &instance.capacity, &scaled, CONFIRM_GRID)
        .expect("instance spaces were validated")
        .value;
    let inner = integrate_grid_oracle(s, &instance.capacity, &instance.function, CONFIRM_GRID)
        .expect("instance spaces were validated")
        .value;
    let p = s.evaluate(instance.a, inner);
    (l.get() - p.get()).abs() > CHECK_TOLERANCE
}

/// The two-point probe `f = b * 1_{p}` with `mu({p}) = c`, `mu({q}) = 0`.
///
/// Both routes collapse to one association order each:
/// left `S(S(a, b), c)` versus right `S(a, S(b, c))`, so this family
/// reduces the identity to plain associativity of `S`.
pub fn indicator_instance(s: &Semicopula, a: UnitValue, b: UnitValue, c: UnitValue) -> Instance {
    let space = Arc::new(FiniteSpace::new(["p", "q"]).expect("two fresh labels"));
    let capacity = Capacity::from_table(space.clone(), vec![0.0, c.get(), 0.0, 1.0])
        .expect("indicator capacity is monotone by construction");
    let function = SimpleFunction::scaled_indicator(space, SubsetMask(0b01), b);
    Instance::new(s.clone(), capacity, function, a).expect("spaces match by construction")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Holds,
    MayFail,
}

/// Campaign shape. `trials` instances are generated from `seed` with one
/// independent stream per trial index, so reports are byte-identical
/// across runs and thread counts.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub trials: u32,
    pub seed: u64,
    /// Points per instance are drawn from `1..=max_points`.
    pub max_points: usize,
    /// Function values and `a` come from this grid...
    pub value_grid: Vec<UnitValue>,
    /// ...unless `continuous` asks for uniform draws instead.
    pub continuous: bool,
    pub closure: ClosureBias,
    pub expect: Expect,
}

/// `0, 0.05, ..., 1`.
pub fn default_value_grid() -> Vec<UnitValue> {
    (0..=20)
        .map(|i| UnitValue::clamped(i as f64 / 20.0))
        .collect()
}

impl FuzzConfig {
    pub fn new(trials: u32, seed: u64, expect: Expect) -> Self {
        FuzzConfig {
            trials,
            seed,
            max_points: 5,
            value_grid: default_value_grid(),
            continuous: false,
            closure: ClosureBias::Upward,
            expect,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub semicopula: SemicopulaKind,
    pub trials: u32,
    pub violations: u32,
    #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
    pub worst_gap: f64,
    pub first_witness: Option<Instance>,
    pub expect: Expect,
    pub passed: bool,
    pub seed: u64,
}

/// Builds the instance for one trial. Deterministic in `(seed, index)`:
/// each trial owns stream `index + 1` of the seeded generator, so trial
/// order and thread scheduling cannot leak into the data.
pub fn trial_instance(s: &Semicopula, config: &FuzzConfig, index: u32) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64 + 1);
    let n = (rng.next_u64() % config.max_points as u64) as usize + 1;
    let space = Arc::new(
        FiniteSpace::new((0..n).map(|i| format!("p{i}"))).expect("generated labels are valid"),
    );
    let capacity = Capacity::random_from_rng(space.clone(), &mut rng, config.closure);
    let draw = |rng: &mut ChaCha8Rng| -> f64 {
        if config.continuous {
            crate::capacity::uniform_unit(rng.next_u64())
        } else {
            let i = (rng.next_u64() % config.value_grid.len() as u64) as usize;
            config.value_grid[i].get()
        }
    };
    let values: Vec<f64> = (0..n).map(|_| draw(&mut rng)).collect();
    let function =
        SimpleFunction::from_values(space, values).expect("grid and uniform draws are in range");
    let a = UnitValue::clamped(draw(&mut rng));
    Instance::new(s.clone(), capacity, function, a).expect("spaces match by construction")
}

#[derive(Clone)]
struct Tally {
    violations: u32,
    worst_gap: f64,
    first: Option<(u32, Instance)>,
}

impl Tally {
    fn empty() -> Self {
        Tally {
            violations: 0,
            worst_gap: 0.0,
            first: None,
        }
    }

    // associative and commutative, so rayon's reduction tree cannot
    // change the outcome
    fn merge(self, other: Tally) -> Tally {
        Tally {
            violations: self.violations + other.violations,
            worst_gap: self.worst_gap.max(other.worst_gap),
            first: match (self.first, other.first) {
                (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
                (a, b) => a.or(b),
            },
        }
    }
}

pub fn fuzz_campaign(s: &Semicopula, config: &FuzzConfig) -> CampaignReport {
    assert!(
        (1..=crate::capacity::MAX_POINTS).contains(&config.max_points),
        "max_points must be in 1..={}",
        crate::capacity::MAX_POINTS
    );
    assert!(
        config.continuous || !config.value_grid.is_empty(),
        "a grid campaign needs a non-empty value grid"
    );
    let tally = (0..config.trials)
        .into_par_iter()
        .map(|index| {
            let instance = trial_instance(s, config, index);
            let (l, p) = both_sides(&instance);
            let gap = (l.get() - p.get()).abs();
            let mut t = Tally {
                violations: 0,
                worst_gap: gap,
                first: None,
            };
            if gap > CHECK_TOLERANCE && confirmed_by_oracle(&instance) {
                t.violations = 1;
                t.first = Some((index, instance));
            }
            t
        })
        .reduce(Tally::empty, Tally::merge);
    let passed = match config.expect {
        Expect::Holds => tally.violations == 0,
        Expect::MayFail => tally.violations > 0,
    };
    CampaignReport {
        semicopula: s.kind().clone(),
        trials: config.trials,
        violations: tally.violations,
        worst_gap: tally.worst_gap,
        first_witness: tally.first.map(|(_, i)| i),
        expect: config.expect,
        passed,
        seed: config.seed,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShrinkError {
    #[error("shrink requires a violating instance")]
    NotAViolation,
}

/// Greedy minimization of a violating instance: drop points, zero out
/// values, then snap the survivors to coarse grids, repeating until no
/// move is accepted. Every intermediate stays a valid instance and keeps
/// the gap above tolerance, so the result is still a counterexample.
pub fn shrink(start: &Instance) -> Result<Instance, ShrinkError> {
    if !violates(start) {
        return Err(ShrinkError::NotAViolation);
    }
    let mut cur = start.clone();
    for _round in 0..100 {
        let mut changed = false;

        // drop whole points while possible
        loop {
            let n = cur.space().n();
            if n <= 1 {
                break;
            }
            let accepted = (0..n).find_map(|i| {
                let cand = drop_point(&cur, i)?;
                violates(&cand).then_some(cand)
            });
            match accepted {
                Some(cand) => {
                    cur = cand;
                    changed = true;
                }
                None => break,
            }
        }

        // zero out function values
        for i in 0..cur.space().n() {
            if cur.function.value_f64(i) != 0.0 {
                if let Some(cand) = with_function_value(&cur, i, 0.0) {
                    if violates(&cand) {
                        cur = cand;
                        changed = true;
                    }
                }
            }
        }

        // zero out capacity entries
        for raw in 1..cur.space().subset_count() as u32 - 1 {
            let mask = SubsetMask(raw);
            if cur.capacity.value_f64(mask) != 0.0 {
                if let Some(cand) = with_capacity_value(&cur, mask, 0.0) {
                    if violates(&cand) {
                        cur = cand;
                        changed = true;
                    }
                }
            }
        }

        // snap scalars onto coarse grids, coarsest first
        for denom in [2.0, 4.0, 8.0, 10.0, 20.0] {
            let snap = |v: f64| ((v * denom).round() / denom).clamp(0.0, 1.0);
            let a_snapped = snap(cur.a.get());
            if a_snapped != cur.a.get() {
                let cand = Instance {
                    a: UnitValue::clamped(a_snapped),
                    ..cur.clone()
                };
                if violates(&cand) {
                    cur = cand;
                    changed = true;
                }
            }
            for i in 0..cur.space().n() {
                let v = cur.function.value_f64(i);
                let w = snap(v);
                if w != v {
                    if let Some(cand) = with_function_value(&cur, i, w) {
                        if violates(&cand) {
                            cur = cand;
                            changed = true;
                        }
                    }
                }
            }
            for raw in 1..cur.space().subset_count() as u32 - 1 {
                let mask = SubsetMask(raw);
                let v = cur.capacity.value_f64(mask);
                let w = snap(v);
                if w != v {
                    if let Some(cand) = with_capacity_value(&cur, mask, w) {
                        if violates(&cand) {
                            cur = cand;
                            changed = true;
                        }
                    }
                }
            }
        }

        if !changed {
            break;
        }
    }
    Ok(cur)
}

/// Restriction to the space without point `i`; the new full space is
/// re-pinned to 1. Restriction preserves monotonicity, so this always
/// yields a valid capacity.
fn drop_point(instance: &Instance, i: usize) -> Option<Instance> {
    let old_space = instance.space();
    let n = old_space.n();
    if n <= 1 {
        return None;
    }
    let labels: Vec<String> = (0..n)
        .filter(|j| *j != i)
        .map(|j| old_space.label(j).to_string())
        .collect();
    let space = Arc::new(FiniteSpace::new(labels).ok()?);
    let expand = |mask: u32| -> u32 {
        // reinsert a zero bit at position i
        let low = mask & ((1 << i) - 1);
        let high = (mask >> i) << (i + 1);
        low | high
    };
    let mut values: Vec<f64> = (0..space.subset_count() as u32)
        .map(|m| instance.capacity.value_f64(SubsetMask(expand(m))))
        .collect();
    let top = values.len() - 1;
    values[top] = 1.0;
    let capacity = Capacity::from_table(space.clone(), values).ok()?;
    let f_values: Vec<f64> = (0..n)
        .filter(|j| *j != i)
        .map(|j| instance.function.value_f64(j))
        .collect();
    let function = SimpleFunction::from_values(space, f_values).ok()?;
    Instance::new(
        instance.semicopula.clone(),
        capacity,
        function,
        instance.a,
    )
    .ok()
}

fn with_function_value(instance: &Instance, i: usize, v: f64) -> Option<Instance> {
    let mut values = instance.function.values().to_vec();
    values[i] = v;
    let function = SimpleFunction::from_values(instance.space().clone(), values).ok()?;
    Instance::new(
        instance.semicopula.clone(),
        instance.capacity.clone(),
        function,
        instance.a,
    )
    .ok()
}

fn with_capacity_value(instance: &Instance, mask: SubsetMask, v: f64) -> Option<Instance> {
    let mut values = instance.capacity.values().to_vec();
    values[mask.0 as usize] = v;
    let capacity = Capacity::from_table(instance.space().clone(), values).ok()?;
    Instance::new(
        instance.semicopula.clone(),
        capacity,
        instance.function.clone(),
        instance.a,
    )
    .ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: f64) -> UnitValue {
        UnitValue::new(v).unwrap()
    }

    /// Frozen two-point case: cubic at a = 0.9, b = 0.8, c = 0.1.
    /// Left route: S(S(0.9, 0.8), 0.1) = S(0.648, 0.1) = 0.0419904.
    /// Right route: S(0.9, S(0.8, 0.1)) = S(0.9, 0.064) = 0.05184.
    #[test]
    fn cubic_indicator_witness_has_the_frozen_gap() {
        let s = Semicopula::builtin("cubic").unwrap();
        let inst = indicator_instance(&s, u(0.9), u(0.8), u(0.1));
        let report = check(&inst);
        assert!((report.l.get() - 0.0419904).abs() < 1e-15);
        assert!((report.p.get() - 0.05184).abs() < 1e-15);
        assert!((report.gap - 0.0098496).abs() < 1e-15);
        assert_eq!(report.verdict, CheckVerdict::Violation);
    }

    #[test]
    fn associative_builtins_pass_the_indicator_probe_on_a_grid() {
        for name in ["minimum", "product", "lukasiewicz", "nilpotent_minimum", "drastic"] {
            let s = Semicopula::builtin(name).unwrap();
            for i in 0..=10 {
                for j in 0..=10 {
                    for k in 0..=10 {
                        let inst = indicator_instance(
                            &s,
                            u(i as f64 / 10.0),
                            u(j as f64 / 10.0),
                            u(k as f64 / 10.0),
                        );
                        let report = check(&inst);
                        assert_eq!(
                            report.verdict,
                            CheckVerdict::EqualWithinTol,
                            "{name} at ({i}, {j}, {k}): gap {}",
                            report.gap
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn small_campaigns_match_the_expected_outcomes() {
        let holds = ["minimum", "product", "lukasiewicz", "nilpotent_minimum", "drastic"];
        for name in holds {
            let s = Semicopula::builtin(name).unwrap();
            let report = fuzz_campaign(&s, &FuzzConfig::new(500, 42, Expect::Holds));
            assert_eq!(report.violations, 0, "{name} must hold on finite instances");
            assert!(report.passed);
            assert!(report.first_witness.is_none());
        }
        let cubic = Semicopula::builtin("cubic").unwrap();
        let report = fuzz_campaign(&cubic, &FuzzConfig::new(500, 42, Expect::MayFail));
        assert!(report.violations > 0, "cubic campaigns must find violations");
        assert!(report.passed);
        assert!(report.worst_gap > CHECK_TOLERANCE);
        assert!(report.first_witness.is_some());
    }

    #[test]
    fn campaign_reports_are_identical_across_runs() {
        let s = Semicopula::builtin("cubic").unwrap();
        let config = FuzzConfig::new(300, 7, Expect::MayFail);
        let a = fuzz_campaign(&s, &config);
        let b = fuzz_campaign(&s, &config);
        assert_eq!(a, b);
    }

    #[test]
    fn continuous_campaigns_draw_off_grid_values() {
        let s = Semicopula::builtin("product").unwrap();
        let mut config = FuzzConfig::new(50, 3, Expect::Holds);
        config.continuous = true;
        let report = fuzz_campaign(&s, &config);
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn shrink_reduces_the_cubic_witness_to_two_points_or_fewer() {
        let s = Semicopula::builtin("cubic").unwrap();
        let campaign = fuzz_campaign(&s, &FuzzConfig::new(200, 5, Expect::MayFail));
        let witness = campaign.first_witness.expect("cubic finds a witness");
        let small = shrink(&witness).unwrap();
        assert!(small.space().n() <= 2, "got {} points", small.space().n());
        assert!(violates(&small), "shrunk instance must still violate");
        // idempotent: shrinking a fixpoint changes nothing
        let again = shrink(&small).unwrap();
        assert_eq!(again, small);
    }

    #[test]
    fn shrink_rejects_a_passing_instance() {
        let s = Semicopula::builtin("minimum").unwrap();
        let inst = indicator_instance(&s, u(0.5), u(0.5), u(0.5));
        assert_eq!(shrink(&inst), Err(ShrinkError::NotAViolation));
    }
}
