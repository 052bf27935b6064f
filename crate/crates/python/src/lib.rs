//! Python bindings. Scalar helpers return floats; anything structured
//! comes back as the same JSON report text the command-line tool prints,
//! so the two front ends stay byte-compatible.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use sugenolab_core::doc::{
    self, CampaignReportDoc, CheckReportDoc, ClassifyReportDoc, IntegrateReportDoc, LimitReportDoc,
};
use sugenolab_core::homogeneity;
use sugenolab_core::limit_lab::{self, Direction, LimitFamily, LimitInstance};
use sugenolab_core::section::{self, ClassifyParams, ScanParams};
use sugenolab_core::semicopula::BUILTIN_NAMES;
use sugenolab_core::{integrate as integrate_core, integrate_grid_oracle, Semicopula, UnitValue};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A semicopula argument is either a builtin name or a descriptor document.
fn resolve(descriptor: &str) -> PyResult<Semicopula> {
    if descriptor.trim_start().starts_with('{') {
        doc::parse_semicopula(descriptor).map_err(value_err)
    } else {
        Semicopula::builtin(descriptor).map_err(value_err)
    }
}

fn unit(v: f64, name: &str) -> PyResult<UnitValue> {
    UnitValue::new(v).map_err(|e| value_err(format!("{name}: {e}")))
}

/// Names of the built-in semicopulas.
#[pyfunction]
fn builtins() -> Vec<String> {
    BUILTIN_NAMES.iter().map(|n| n.to_string()).collect()
}

/// Evaluate `S(x, y)` for a builtin name or descriptor JSON.
#[pyfunction]
fn eval(semicopula: &str, x: f64, y: f64) -> PyResult<f64> {
    let s = resolve(semicopula)?;
    let x = unit(x, "x")?;
    let y = unit(y, "y")?;
    Ok(s.evaluate(x, y).get())
}

/// Integrate an instance document; returns the report as JSON text.
#[pyfunction]
#[pyo3(signature = (instance_json, grid_oracle=None))]
fn integrate(instance_json: &str, grid_oracle: Option<u32>) -> PyResult<String> {
    let document = doc::parse_instance_document(instance_json).map_err(value_err)?;
    let parts = doc::build_parts(&document).map_err(value_err)?;
    let result =
        integrate_core(&parts.semicopula, &parts.capacity, &parts.function).map_err(value_err)?;
    let oracle = match grid_oracle {
        Some(n) => Some(
            integrate_grid_oracle(&parts.semicopula, &parts.capacity, &parts.function, n)
                .map_err(value_err)?,
        ),
        None => None,
    };
    let oracle_agrees = oracle
        .as_ref()
        .map(|o| o.value.get().to_bits() == result.value.get().to_bits());
    let report = IntegrateReportDoc {
        value: result.value,
        argmax_level: result.argmax_level,
        method: result.method,
        oracle,
        oracle_agrees,
        version: doc::TOOL_VERSION.to_string(),
        config_hash: doc::config_hash(&document),
    };
    Ok(doc::to_json_pretty(&report))
}

/// Check the scaling identity on one instance document; returns the
/// report as JSON text (field `verdict` carries the outcome).
#[pyfunction]
fn check(instance_json: &str) -> PyResult<String> {
    let document = doc::parse_instance_document(instance_json).map_err(value_err)?;
    let instance = doc::build_instance(&document).map_err(value_err)?;
    let report = homogeneity::check(&instance);
    let out = CheckReportDoc {
        l: report.l,
        p: report.p,
        gap: report.gap,
        verdict: report.verdict,
        tolerance: report.tolerance,
        instance: doc::instance_document(&instance),
        version: doc::TOOL_VERSION.to_string(),
        config_hash: doc::config_hash(&document),
    };
    Ok(doc::to_json_pretty(&out))
}

/// Run a fuzz campaign from a configuration document; `seed` overrides
/// the document's seed before anything is derived from it.
#[pyfunction]
#[pyo3(signature = (config_json, seed=None))]
fn fuzz(config_json: &str, seed: Option<u64>) -> PyResult<String> {
    let mut document = doc::parse_campaign_document(config_json).map_err(value_err)?;
    if let Some(seed) = seed {
        document.seed = seed;
    }
    let (semicopula, config) = doc::build_campaign(&document).map_err(value_err)?;
    let report = homogeneity::fuzz_campaign(&semicopula, &config);
    let out = CampaignReportDoc::from_report(&report, doc::config_hash(&document));
    Ok(doc::to_json_pretty(&out))
}

/// Profile sections on a grid of `a` values and classify the operation.
#[pyfunction]
#[pyo3(signature = (semicopula, a_grid=19))]
fn classify(semicopula: &str, a_grid: usize) -> PyResult<String> {
    let s = resolve(semicopula)?;
    let params = ClassifyParams {
        a_grid: section::default_a_grid(a_grid),
        scan: ScanParams::default(),
        ..ClassifyParams::default()
    };
    let hash = doc::config_hash(s.kind());
    let report = section::classify(&s, &params)
        .map_err(|interrupted| PyRuntimeError::new_err(interrupted.error.to_string()))?;
    let out = ClassifyReportDoc {
        name: report.name,
        detected: report.detected,
        declared: report.declared,
        mismatch: report.mismatch,
        associativity: report.associativity,
        evidence: report.evidence,
        sections: report.sections,
        version: doc::TOOL_VERSION.to_string(),
        config_hash: hash,
    };
    Ok(doc::to_json_pretty(&out))
}

/// Greedily reduce a violating instance while it keeps violating;
/// returns the shrunk instance as a document. The input must itself
/// violate the identity (carrying its scalar `a`), else ValueError.
#[pyfunction]
fn shrink(instance_json: &str) -> PyResult<String> {
    let document = doc::parse_instance_document(instance_json).map_err(value_err)?;
    let instance = doc::build_instance(&document).map_err(value_err)?;
    let small = homogeneity::shrink(&instance).map_err(value_err)?;
    Ok(doc::to_json_pretty(&doc::instance_document(&small)))
}

/// Evaluate one degenerate-capacity limit case. `direction` is
/// "from_above" or "from_below"; `family` is "min_capacity" or
/// "max_capacity" (only the matching pairing is defined).
#[pyfunction]
#[pyo3(signature = (semicopula, a, b, direction, family, n_max=40))]
fn limit_case(
    semicopula: &str,
    a: f64,
    b: f64,
    direction: &str,
    family: &str,
    n_max: u32,
) -> PyResult<String> {
    let s = resolve(semicopula)?;
    let a = unit(a, "a")?;
    let b = unit(b, "b")?;
    let direction = match direction {
        "from_above" => Direction::FromAbove,
        "from_below" => Direction::FromBelow,
        other => return Err(value_err(format!("unknown direction {other:?}"))),
    };
    let family = match family {
        "min_capacity" => LimitFamily::MinCapacity,
        "max_capacity" => LimitFamily::MaxCapacity,
        other => return Err(value_err(format!("unknown family {other:?}"))),
    };
    let instance = LimitInstance::new(s, a, b, direction, family, n_max).map_err(value_err)?;
    let outcome = match limit_lab::evaluate_limit_case(&instance) {
        Ok(o) => o,
        Err(e @ limit_lab::LimitError::NotResolved { .. }) => {
            return Err(PyRuntimeError::new_err(e.to_string()))
        }
        Err(e) => return Err(value_err(e)),
    };
    let hash = doc::config_hash(&(
        instance.semicopula.kind().clone(),
        instance.a,
        instance.b,
        instance.direction,
        instance.family,
        instance.n_max,
    ));
    Ok(doc::to_json_pretty(&LimitReportDoc::from_outcome(
        &outcome, hash,
    )))
}

#[pymodule]
fn sugenolab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(builtins, m)?)?;
    m.add_function(wrap_pyfunction!(eval, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(fuzz, m)?)?;
    m.add_function(wrap_pyfunction!(shrink, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(limit_case, m)?)?;
    Ok(())
}
