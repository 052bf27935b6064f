//! Command-line front end.
//!
//! Exit codes are a stable contract: 0 success (and identity confirmed
//! where one is checked), 1 a mathematical violation or an unmet campaign
//! expectation, 2 input or validation errors, 3 a resource budget ran out
//! (section scan jump budget, unresolved limit probes). Reports go to
//! stdout as pretty JSON with 17-significant-digit numbers; diagnostics go
//! to stderr.

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use sugenolab_core::doc::{
    self, CampaignReportDoc, CheckReportDoc, ClassifyPartialDoc, ClassifyReportDoc,
    IntegrateReportDoc, LimitReportDoc,
};
use sugenolab_core::homogeneity::{self, CheckVerdict};
use sugenolab_core::limit_lab::{self, Direction, LimitFamily, LimitInstance};
use sugenolab_core::section::{self, ClassifyParams, ScanParams};
use sugenolab_core::semicopula::SemicopulaError;
use sugenolab_core::{integrate, integrate_grid_oracle, Semicopula, UnitValue};

#[derive(Parser)]
#[command(
    name = "sugenolab",
    version,
    about = "Seminormed fuzzy integrals on finite spaces: compute, check, fuzz, classify, probe limits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the integral of an instance document.
    Integrate {
        /// Instance document (JSON).
        file: PathBuf,
        /// Also run the level-grid oracle with this many grid steps and
        /// report agreement.
        #[arg(long, value_name = "N")]
        grid_oracle: Option<u32>,
    },
    /// Check the scaling identity on one instance document.
    Check {
        /// Instance document (JSON) including the scalar `a`.
        file: PathBuf,
    },
    /// Run a seeded random campaign against the scaling identity.
    Fuzz {
        /// Campaign configuration (JSON).
        config: PathBuf,
        /// Also write one `trial,gap` CSV row per trial.
        #[arg(long, value_name = "PATH")]
        gaps_csv: Option<PathBuf>,
    },
    /// Profile the sections of an operation and classify it.
    Classify {
        /// Builtin name or path to a descriptor document (JSON).
        descriptor: String,
        /// Number of interior grid values of `a` to scan.
        #[arg(long, value_name = "K", default_value_t = 19)]
        a_grid: usize,
        /// Scan resolution: candidate jump brackets are narrowed to this
        /// width before refinement.
        #[arg(long, value_name = "DELTA", default_value_t = 1e-4)]
        resolution: f64,
        /// Smallest increase treated as a potential jump.
        #[arg(long, value_name = "ETA", default_value_t = 1e-6)]
        jump_threshold: f64,
        /// Abort the scan after confirming this many jumps in one section.
        #[arg(long, value_name = "N", default_value_t = 100)]
        max_jumps: usize,
        /// Write per-section `t,s` sample CSVs into this directory.
        #[arg(long, value_name = "DIR")]
        plot_data: Option<PathBuf>,
    },
    /// Probe one-sided limits of the degenerate-capacity integrals.
    Limit {
        /// Builtin name or path to a descriptor document (JSON).
        descriptor: String,
        /// Sweep the 19x19 grid of (a, b) over both canonical
        /// direction/family pairings and print CSV.
        #[arg(long)]
        sweep: bool,
        #[arg(long, value_name = "A")]
        a: Option<f64>,
        #[arg(long, value_name = "B")]
        b: Option<f64>,
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        /// Dyadic probe depth for estimated limits.
        #[arg(long, value_name = "N", default_value_t = 40)]
        n_max: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    FromAbove,
    FromBelow,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    MinCapacity,
    MaxCapacity,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Direction {
        match d {
            DirectionArg::FromAbove => Direction::FromAbove,
            DirectionArg::FromBelow => Direction::FromBelow,
        }
    }
}

impl From<FamilyArg> for LimitFamily {
    fn from(f: FamilyArg) -> LimitFamily {
        match f {
            FamilyArg::MinCapacity => LimitFamily::MinCapacity,
            FamilyArg::MaxCapacity => LimitFamily::MaxCapacity,
        }
    }
}

const EXIT_OK: u8 = 0;
const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    // die quietly when the reader of a pipe goes away, like any filter
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Integrate { file, grid_oracle } => cmd_integrate(&file, grid_oracle),
        Command::Check { file } => cmd_check(&file),
        Command::Fuzz { config, gaps_csv } => cmd_fuzz(&config, gaps_csv.as_deref()),
        Command::Classify {
            descriptor,
            a_grid,
            resolution,
            jump_threshold,
            max_jumps,
            plot_data,
        } => cmd_classify(
            &descriptor,
            a_grid,
            resolution,
            jump_threshold,
            max_jumps,
            plot_data.as_deref(),
        ),
        Command::Limit {
            descriptor,
            sweep,
            a,
            b,
            direction,
            family,
            n_max,
        } => cmd_limit(&descriptor, sweep, a, b, direction, family, n_max),
    };
    ExitCode::from(code)
}

fn read_file(path: &Path) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_INPUT
    })
}

fn input_error(context: &str, e: impl std::fmt::Display) -> u8 {
    eprintln!("error: {context}: {e}");
    EXIT_INPUT
}

/// Resolves a semicopula argument: an existing file is parsed as a
/// descriptor document, anything else must be a builtin name.
fn resolve_semicopula(arg: &str) -> Result<Semicopula, u8> {
    if Path::new(arg).is_file() {
        let text = read_file(Path::new(arg))?;
        doc::parse_semicopula(&text).map_err(|e| input_error(arg, e))
    } else {
        Semicopula::builtin(arg).map_err(|e| input_error("not a file or builtin name", e))
    }
}

fn cmd_integrate(file: &Path, grid_oracle: Option<u32>) -> u8 {
    let text = match read_file(file) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let document = match doc::parse_instance_document(&text) {
        Ok(d) => d,
        Err(e) => return input_error(&file.display().to_string(), e),
    };
    let parts = match doc::build_parts(&document) {
        Ok(p) => p,
        Err(e) => return input_error(&file.display().to_string(), e),
    };
    let result = integrate(&parts.semicopula, &parts.capacity, &parts.function)
        .expect("document construction ties the capacity and function to one space");
    let oracle = grid_oracle.map(|n| {
        integrate_grid_oracle(&parts.semicopula, &parts.capacity, &parts.function, n)
            .expect("same space as the exact route")
    });
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
    print!("{}", doc::to_json_pretty(&report));
    EXIT_OK
}

fn cmd_check(file: &Path) -> u8 {
    let text = match read_file(file) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let document = match doc::parse_instance_document(&text) {
        Ok(d) => d,
        Err(e) => return input_error(&file.display().to_string(), e),
    };
    let instance = match doc::build_instance(&document) {
        Ok(i) => i,
        Err(e) => return input_error(&file.display().to_string(), e),
    };
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
    print!("{}", doc::to_json_pretty(&out));
    match report.verdict {
        CheckVerdict::EqualWithinTol => EXIT_OK,
        CheckVerdict::Violation => EXIT_VIOLATION,
    }
}

fn cmd_fuzz(config: &Path, gaps_csv: Option<&Path>) -> u8 {
    let text = match read_file(config) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let mut document = match doc::parse_campaign_document(&text) {
        Ok(d) => d,
        Err(e) => return input_error(&config.display().to_string(), e),
    };
    // The override rewrites the document before hashing, so the report's
    // config_hash names the campaign that actually ran.
    if let Ok(text) = std::env::var("SUGENOLAB_SEED") {
        match text.parse::<u64>() {
            Ok(seed) => document.seed = seed,
            Err(e) => return input_error("SUGENOLAB_SEED", e),
        }
    }
    let (semicopula, fuzz_config) = match doc::build_campaign(&document) {
        Ok(pair) => pair,
        Err(e) => return input_error(&config.display().to_string(), e),
    };
    let report = homogeneity::fuzz_campaign(&semicopula, &fuzz_config);
    if let Some(path) = gaps_csv {
        let gaps: Vec<f64> = (0..fuzz_config.trials)
            .into_par_iter()
            .map(|i| homogeneity::check(&homogeneity::trial_instance(&semicopula, &fuzz_config, i)).gap)
            .collect();
        let mut csv = String::from("trial,gap\n");
        for (i, gap) in gaps.iter().enumerate() {
            csv.push_str(&format!("{i},{}\n", doc::sig17(*gap)));
        }
        if let Err(e) = std::fs::write(path, csv) {
            return input_error(&path.display().to_string(), e);
        }
    }
    let out = CampaignReportDoc::from_report(&report, doc::config_hash(&document));
    print!("{}", doc::to_json_pretty(&out));
    if report.passed {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn write_plot_data(dir: &Path, s: &Semicopula, a_grid: &[UnitValue]) -> Result<(), u8> {
    std::fs::create_dir_all(dir).map_err(|e| input_error(&dir.display().to_string(), e))?;
    const SAMPLES: usize = 512;
    for (idx, a) in a_grid.iter().enumerate() {
        let mut csv = String::from("t,s\n");
        for i in 0..=SAMPLES {
            let t = i as f64 / SAMPLES as f64;
            csv.push_str(&format!(
                "{},{}\n",
                doc::sig17(t),
                doc::sig17(s.eval_f64(a.get(), t))
            ));
        }
        let path = dir.join(format!("section_{idx:02}.csv"));
        std::fs::write(&path, csv).map_err(|e| input_error(&path.display().to_string(), e))?;
    }
    Ok(())
}

fn cmd_classify(
    descriptor: &str,
    a_grid: usize,
    resolution: f64,
    jump_threshold: f64,
    max_jumps: usize,
    plot_data: Option<&Path>,
) -> u8 {
    let s = match resolve_semicopula(descriptor) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if !(resolution > 0.0) || !(jump_threshold > 0.0) {
        return input_error(
            "flags",
            "--resolution and --jump-threshold must be positive",
        );
    }
    let params = ClassifyParams {
        a_grid: section::default_a_grid(a_grid),
        scan: ScanParams {
            delta: resolution,
            eta: jump_threshold,
            max_jumps,
            ..ScanParams::default()
        },
        ..ClassifyParams::default()
    };
    if let Some(dir) = plot_data {
        if let Err(code) = write_plot_data(dir, &s, &params.a_grid) {
            return code;
        }
    }
    let hash = doc::config_hash(s.kind());
    match section::classify(&s, &params) {
        Ok(report) => {
            let mismatch = report.mismatch;
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
            print!("{}", doc::to_json_pretty(&out));
            if mismatch {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            }
        }
        Err(interrupted) => {
            let is_budget = matches!(
                interrupted.error,
                SemicopulaError::ScanBudgetExhausted { .. }
            );
            eprintln!("error: {}", interrupted.error);
            let out = ClassifyPartialDoc {
                error: interrupted.error.to_string(),
                sections: interrupted.completed,
                version: doc::TOOL_VERSION.to_string(),
                config_hash: hash,
            };
            print!("{}", doc::to_json_pretty(&out));
            if is_budget {
                EXIT_BUDGET
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn limit_sweep(s: &Semicopula, n_max: u32) -> Result<String, u8> {
    let grid = section::default_a_grid(19);
    let mut cases = Vec::new();
    for a in &grid {
        for b in &grid {
            for (direction, family) in [
                (Direction::FromAbove, LimitFamily::MinCapacity),
                (Direction::FromBelow, LimitFamily::MaxCapacity),
            ] {
                cases.push(
                    LimitInstance::new(s.clone(), *a, *b, direction, family, n_max)
                        .expect("interior grid points admit both canonical pairings"),
                );
            }
        }
    }
    let outcomes: Vec<_> = cases
        .par_iter()
        .map(limit_lab::evaluate_limit_case)
        .collect();
    let mut csv = String::from("a,b,direction,L,P,gap,verdict\n");
    for outcome in outcomes {
        let out = match outcome {
            Ok(o) => o,
            Err(e) => {
                eprintln!("error: {e}");
                return Err(EXIT_BUDGET);
            }
        };
        let direction = match out.direction {
            Direction::FromAbove => "from_above",
            Direction::FromBelow => "from_below",
        };
        let verdict = match out.verdict {
            limit_lab::LimitVerdict::ContinuityConfirmed => "continuity_confirmed",
            limit_lab::LimitVerdict::DiscontinuityWitness => "discontinuity_witness",
        };
        csv.push_str(&format!(
            "{},{},{direction},{},{},{},{verdict}\n",
            doc::sig17(out.a.get()),
            doc::sig17(out.b.get()),
            doc::sig17(out.l),
            doc::sig17(out.p),
            doc::sig17(out.gap),
        ));
    }
    Ok(csv)
}

fn cmd_limit(
    descriptor: &str,
    sweep: bool,
    a: Option<f64>,
    b: Option<f64>,
    direction: Option<DirectionArg>,
    family: Option<FamilyArg>,
    n_max: u32,
) -> u8 {
    let s = match resolve_semicopula(descriptor) {
        Ok(s) => s,
        Err(code) => return code,
    };
    if sweep {
        return match limit_sweep(&s, n_max) {
            Ok(csv) => {
                print!("{csv}");
                EXIT_OK
            }
            Err(code) => code,
        };
    }
    let (Some(a), Some(b), Some(direction), Some(family)) = (a, b, direction, family) else {
        return input_error(
            "flags",
            "single-case mode needs --a, --b, --direction and --family (or use --sweep)",
        );
    };
    let a = match UnitValue::new(a) {
        Ok(v) => v,
        Err(e) => return input_error("--a", e),
    };
    let b = match UnitValue::new(b) {
        Ok(v) => v,
        Err(e) => return input_error("--b", e),
    };
    let instance = match LimitInstance::new(s, a, b, direction.into(), family.into(), n_max) {
        Ok(i) => i,
        Err(e) => return input_error("limit case", e),
    };
    match limit_lab::evaluate_limit_case(&instance) {
        Ok(outcome) => {
            let hash = doc::config_hash(&(
                instance.semicopula.kind().clone(),
                instance.a,
                instance.b,
                instance.direction,
                instance.family,
                instance.n_max,
            ));
            let out = LimitReportDoc::from_outcome(&outcome, hash);
            print!("{}", doc::to_json_pretty(&out));
            EXIT_OK
        }
        Err(e @ limit_lab::LimitError::NotResolved { .. }) => {
            eprintln!("error: {e}");
            EXIT_BUDGET
        }
        Err(e) => input_error("limit case", e),
    }
}
