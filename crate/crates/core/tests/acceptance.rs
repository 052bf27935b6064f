//! Acceptance gate: eight numbered criteria, one test and one printed
//! verdict line each. Run with `--nocapture` to see the lines for passing
//! criteria too. Tolerances are pinned in the assertions, not configurable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;
use sugenolab_core::capacity::ClosureBias;
use sugenolab_core::homogeneity::{self, FuzzConfig};
use sugenolab_core::limit_lab::{self, Direction, LimitFamily, LimitInstance};
use sugenolab_core::section::{self, ClassEvidence, ClassifyParams, DetectedClass};
use sugenolab_core::semicopula::{BaseNorm, Summand};
use sugenolab_core::{
    integrate, integrate_grid_oracle, Capacity, Expect, FiniteSpace, Semicopula, SimpleFunction,
    UnitValue,
};

fn criterion(id: &str, description: &str, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {id} {verdict} {description} [{detail}]");
    assert!(passed, "{id} {description} [{detail}]");
}

fn u(v: f64) -> UnitValue {
    UnitValue::new(v).unwrap()
}

fn ordinal_example() -> Semicopula {
    Semicopula::ordinal_sum(vec![
        Summand {
            lo: u(0.0),
            hi: u(0.5),
            base: BaseNorm::Product,
        },
        Summand {
            lo: u(0.5),
            hi: u(1.0),
            base: BaseNorm::Lukasiewicz,
        },
    ])
    .unwrap()
}

fn standard_campaign(trials: u32, seed: u64, expect: Expect) -> FuzzConfig {
    // up to 5 points, f and a drawn from multiples of 0.05
    FuzzConfig::new(trials, seed, expect)
}

#[test]
fn a01_associative_continuous_operations_hold_at_scale() {
    let mut worst = (String::new(), 0.0f64, std::time::Duration::ZERO);
    let mut ok = true;
    let ordinal = ordinal_example();
    let named: Vec<(String, Semicopula)> = ["minimum", "product", "lukasiewicz"]
        .iter()
        .map(|n| (n.to_string(), Semicopula::builtin(n).unwrap()))
        .chain([("ordinal_sum".to_string(), ordinal)])
        .collect();
    for (name, s) in &named {
        let start = Instant::now();
        let report = homogeneity::fuzz_campaign(s, &standard_campaign(10_000, 1802, Expect::Holds));
        let elapsed = start.elapsed();
        let this_ok =
            report.violations == 0 && report.worst_gap <= 1e-12 && elapsed.as_secs_f64() <= 10.0;
        ok &= this_ok;
        if report.worst_gap >= worst.1 {
            worst = (name.clone(), report.worst_gap, elapsed);
        }
    }
    criterion(
        "a01",
        "10^4-trial campaigns on minimum/product/lukasiewicz/ordinal_sum: 0 violations, gap <= 1e-12, <= 10 s each",
        ok,
        &format!(
            "worst gap {:.3e} ({}, {:?})",
            worst.1, worst.0, worst.2
        ),
    );
}

#[test]
fn a02_nilpotent_minimum_holds_on_finite_spaces() {
    let s = Semicopula::builtin("nilpotent_minimum").unwrap();
    let report = homogeneity::fuzz_campaign(&s, &standard_campaign(10_000, 1802, Expect::Holds));
    criterion(
        "a02",
        "nilpotent_minimum campaign of 10^4 trials: 0 violations, gap <= 1e-12",
        report.violations == 0 && report.worst_gap <= 1e-12,
        &format!(
            "{} violations, worst gap {:.3e}",
            report.violations, report.worst_gap
        ),
    );
}

#[test]
fn a03_cubic_breaks_the_identity_and_witnesses_shrink() {
    let s = Semicopula::builtin("cubic").unwrap();
    let golden = homogeneity::indicator_instance(&s, u(0.9), u(0.8), u(0.1));
    let report = homogeneity::check(&golden);
    let golden_ok = (report.l.get() - 0.0419904).abs() <= 1e-12
        && (report.p.get() - 0.0518400).abs() <= 1e-12
        && (report.gap - 0.0098496).abs() <= 1e-12;

    let campaign = homogeneity::fuzz_campaign(&s, &standard_campaign(10_000, 1802, Expect::MayFail));
    let witness = campaign.first_witness.as_ref();
    let shrunk = witness.map(|w| homogeneity::shrink(w).expect("witness still violates"));
    let shrink_ok = shrunk
        .as_ref()
        .map(|w| w.space().n() <= 2 && homogeneity::violates(w))
        .unwrap_or(false);

    criterion(
        "a03",
        "cubic: golden witness L=0.0419904 P=0.05184 gap=0.0098496 (1e-12); >= 1 violation in 10^4 trials; shrink to <= 2 points",
        golden_ok && campaign.violations >= 1 && shrink_ok,
        &format!(
            "gap {:.10}, {} violations, shrunk witness has {} point(s)",
            report.gap,
            campaign.violations,
            shrunk.map(|w| w.space().n()).unwrap_or(0)
        ),
    );
}

#[test]
fn a04_limit_probes_separate_continuous_from_discontinuous() {
    let start = Instant::now();
    let grid = section::default_a_grid(19);

    let nil = Semicopula::builtin("nilpotent_minimum").unwrap();
    let case = LimitInstance::new(
        nil,
        u(0.6),
        u(0.4),
        Direction::FromAbove,
        LimitFamily::MinCapacity,
        40,
    )
    .unwrap();
    let out = limit_lab::evaluate_limit_case(&case).unwrap();
    let nil_ok = (out.gap - 0.4).abs() <= 1e-6;

    let drastic = Semicopula::builtin("drastic").unwrap();
    let drastic_ok = grid.iter().all(|a| {
        let case = LimitInstance::new(
            drastic.clone(),
            *a,
            u(1.0),
            Direction::FromBelow,
            LimitFamily::MaxCapacity,
            40,
        )
        .unwrap();
        let out = limit_lab::evaluate_limit_case(&case).unwrap();
        (out.gap - a.get()).abs() <= 1e-9
    });

    let mut sweep_worst = 0.0f64;
    let mut sweep_ok = true;
    for name in ["minimum", "product", "lukasiewicz", "cubic"] {
        let s = Semicopula::builtin(name).unwrap();
        for a in &grid {
            for b in &grid {
                for (direction, family) in [
                    (Direction::FromAbove, LimitFamily::MinCapacity),
                    (Direction::FromBelow, LimitFamily::MaxCapacity),
                ] {
                    let case =
                        LimitInstance::new(s.clone(), *a, *b, direction, family, 40).unwrap();
                    let out = limit_lab::evaluate_limit_case(&case).unwrap();
                    sweep_worst = sweep_worst.max(out.gap);
                    sweep_ok &= out.gap <= 1e-9;
                }
            }
        }
    }
    let elapsed = start.elapsed();

    criterion(
        "a04",
        "limit probes: nilpotent (0.6, 0.4+, min) gap 0.4 (1e-6); drastic (a, 1-, max) gap a (1e-9) on the a-grid; continuous builtins <= 1e-9 over 19x19 sweeps; <= 5 s",
        nil_ok && drastic_ok && sweep_ok && elapsed.as_secs_f64() <= 5.0,
        &format!(
            "nilpotent gap {:.7}, sweep worst {:.3e}, {:?}",
            out.gap, sweep_worst, elapsed
        ),
    );
}

#[test]
fn a05_grid_oracle_and_indicator_identity() {
    let names = [
        "minimum",
        "product",
        "lukasiewicz",
        "cubic",
        "nilpotent_minimum",
        "drastic",
    ];
    let mut oracle_ok = true;
    let config = standard_campaign(0, 77, Expect::Holds);
    for index in 0..10_000u32 {
        let s = Semicopula::builtin(names[(index % 6) as usize]).unwrap();
        let inst = homogeneity::trial_instance(&s, &config, index);
        let exact = integrate(&s, &inst.capacity, &inst.function).unwrap();
        let grid = integrate_grid_oracle(&s, &inst.capacity, &inst.function, 50).unwrap();
        oracle_ok &= exact.value.get().to_bits() == grid.value.get().to_bits();
    }

    let space = Arc::new(FiniteSpace::new((0..5).map(|i| format!("p{i}"))).unwrap());
    let mu = Capacity::random(space.clone(), 2024, ClosureBias::Upward);
    let mut indicator_ok = true;
    for name in names {
        let s = Semicopula::builtin(name).unwrap();
        for mask in space.masks() {
            let f = SimpleFunction::scaled_indicator(space.clone(), mask, u(1.0));
            let r = integrate(&s, &mu, &f).unwrap();
            indicator_ok &= r.value.get().to_bits() == mu.value_f64(mask).to_bits();
        }
    }

    criterion(
        "a05",
        "exact integral == grid oracle on 10^4 fuzzed instances; integral of 1_A == mu(A) over all 32 subsets, all builtins",
        oracle_ok && indicator_ok,
        &format!("oracle agreement {oracle_ok}, indicator identity {indicator_ok}"),
    );
}

#[test]
fn a06_classification_recovers_the_declared_classes() {
    let params = ClassifyParams::default();
    let mut ok = true;
    let mut detail = String::new();

    for (s, expected) in [
        (Semicopula::builtin("minimum").unwrap(), DetectedClass::S0),
        (Semicopula::builtin("product").unwrap(), DetectedClass::S0),
        (
            Semicopula::builtin("lukasiewicz").unwrap(),
            DetectedClass::S0,
        ),
        (ordinal_example(), DetectedClass::S0),
    ] {
        let report = section::classify(&s, &params).unwrap();
        if report.detected != expected || report.mismatch {
            ok = false;
            detail = format!("{} detected {:?}", report.name, report.detected);
        }
    }

    let nil = Semicopula::builtin("nilpotent_minimum").unwrap();
    let report = section::classify(&nil, &params).unwrap();
    let mut jump_worst = 0.0f64;
    let jumps_ok = report.sections.iter().all(|profile| {
        let expected = 1.0 - profile.a.get();
        profile.jumps.len() == 1 && {
            let err = (profile.jumps[0].location - expected).abs();
            jump_worst = jump_worst.max(err);
            err <= 1e-4
        }
    });
    if report.detected != DetectedClass::S1 || !jumps_ok {
        ok = false;
        detail = format!("nilpotent_minimum detected {:?}", report.detected);
    }

    let cubic = section::classify(&Semicopula::builtin("cubic").unwrap(), &params).unwrap();
    if cubic.detected != DetectedClass::Other
        || !matches!(cubic.evidence, ClassEvidence::Associativity(_))
    {
        ok = false;
        detail = "cubic evidence is not an associativity witness".to_string();
    }

    let drastic = section::classify(&Semicopula::builtin("drastic").unwrap(), &params).unwrap();
    match &drastic.evidence {
        ClassEvidence::Section { jump, problem, .. }
            if drastic.detected == DetectedClass::Other
                && *problem == section::SectionProblem::NotLeftContinuous
                && jump.location == 1.0 => {}
        other => {
            ok = false;
            detail = format!("drastic evidence unexpected: {other:?}");
        }
    }

    criterion(
        "a06",
        "classify: S0 for the four continuous associative ops; S1 for nilpotent_minimum with jumps at 1-a (1e-4); cubic/drastic are other with the right evidence",
        ok,
        &if ok {
            format!("worst nilpotent jump location error {jump_worst:.2e}")
        } else {
            detail
        },
    );
}

#[test]
fn a07_extrema_exchange_on_continuous_sections() {
    let names = ["minimum", "product", "lukasiewicz", "cubic"];
    let mut rng = ChaCha8Rng::seed_from_u64(424242);
    let mut ok = true;
    for trial in 0..1000 {
        let s = if trial % 5 == 4 {
            ordinal_example()
        } else {
            Semicopula::builtin(names[trial % 4]).unwrap()
        };
        let n = rng.random_range(1..=5);
        let space = Arc::new(FiniteSpace::new((0..n).map(|i| format!("p{i}"))).unwrap());
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let h = SimpleFunction::from_values(space, values).unwrap();
        let a = u(rng.random_range(0.0..=1.0));
        let report = limit_lab::check_extremum_exchange(&s, a, &h);
        ok &= report.holds
            && report.inf_exchange.is_some()
            && report.sup_exchange.is_some();
    }
    criterion(
        "a07",
        "min/max exchange through continuous sections holds exactly on 10^3 random (operation, a, h) triples",
        ok,
        "both exchanges checked on every trial",
    );
}

#[test]
fn a08_campaigns_are_reproducible_byte_for_byte() {
    let mut ok = true;
    let mut detail = String::new();
    for (name, expect) in [
        ("cubic", Expect::MayFail),
        ("lukasiewicz", Expect::Holds),
        ("drastic", Expect::Holds),
    ] {
        let s = Semicopula::builtin(name).unwrap();
        let config = standard_campaign(2000, 9099, expect);
        let first = homogeneity::fuzz_campaign(&s, &config);
        let second = homogeneity::fuzz_campaign(&s, &config);
        let first_bytes = serde_json::to_string(&first).unwrap();
        let second_bytes = serde_json::to_string(&second).unwrap();
        if first != second || first_bytes != second_bytes {
            ok = false;
            detail = format!("{name} reports diverged");
        }
    }
    criterion(
        "a08",
        "two runs of a campaign with the same seed serialize byte-identically",
        ok,
        if detail.is_empty() {
            "cubic, lukasiewicz and drastic campaigns replayed"
        } else {
            &detail
        },
    );
}
