//! Horizontal section analysis: for fixed `a`, the map `x -> S(a, x)`.
//!
//! Sections of a semicopula are non-decreasing from `S(a, 0) = 0` to
//! `S(a, 1) = a`. What distinguishes the interesting classes is their
//! continuity structure, so a [`SectionProfile`] records a piecewise
//! description (plateaus and increasing stretches) together with every
//! jump: location, one-sided limits, the value taken at the point, and
//! how isolated the jump is.
//!
//! Profiles come from two independent routes: closed-form construction
//! ([`analytic_section`]) and a derivative-free numeric scan
//! ([`scan_section_numeric`]). The two are cross-checked in tests; the
//! classifier deliberately uses only the numeric route, so its verdicts
//! are evidence gathered from evaluations, never read off a formula.

use crate::semicopula::{
    check_associativity, AssocOutcome, AssocStrategy, AssocWitness, BaseNorm, DeclaredClass,
    Semicopula, SemicopulaError, SemicopulaKind,
};
use crate::unit::UnitValue;
use serde::Serialize;
use thiserror::Error;

/// Agreement tolerance when deciding whether a jump's value coincides
/// with one of its one-sided limits. Numeric limits are probed at
/// distance `2^-40`, far inside this.
const FLAG_TOL: f64 = 1e-9;

/// Locations this close to 0 or 1 are snapped onto the endpoint.
const ENDPOINT_SNAP: f64 = 9.5e-10; // just above 2^-30

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Parameters of the numeric scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanParams {
    /// Coarsest interval width that still gets subdivided.
    pub delta: f64,
    /// Minimum increase treated as structure rather than flatness.
    pub eta: f64,
    /// One-sided limits are probed at `z +/- 2^-j` for `j` in this range.
    pub j_min: u32,
    pub j_max: u32,
    /// Abort once more than this many jumps are confirmed.
    pub max_jumps: usize,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams {
            delta: 1e-4,
            eta: 1e-6,
            j_min: 10,
            j_max: 40,
            max_jumps: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentKind {
    Plateau {
        #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
        level: f64,
    },
    Increasing {
        #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
        from: f64,
        #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
        to: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
    pub lo: f64,
    #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
    pub hi: f64,
    #[serde(flatten)]
    pub kind: SegmentKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpRecord {
    #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
    pub location: f64,
    /// Limit from the left; at `location = 0` this is the value itself.
    #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
    pub left_limit: f64,
    /// Limit from the right; at `location = 1` this is the value itself.
    #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
    pub right_limit: f64,
    #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
    pub value_at: f64,
    /// Distance to the nearest other discontinuity or interval end.
    /// Zero exactly when the jump sits on an endpoint.
    #[serde(serialize_with = "crate::doc::serialize_f64_sig17")]
    pub isolation_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ContinuityFlags {
    pub continuous: bool,
    pub left_continuous: bool,
    pub right_continuous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionProfile {
    pub a: UnitValue,
    pub pieces: Vec<Segment>,
    pub jumps: Vec<JumpRecord>,
    pub continuity: ContinuityFlags,
}

fn finalize_profile(a: UnitValue, pieces: Vec<Segment>, mut jumps: Vec<JumpRecord>) -> SectionProfile {
    let n = jumps.len();
    for i in 0..n {
        let z = jumps[i].location;
        let mut radius = z.min(1.0 - z);
        if i > 0 {
            radius = radius.min(z - jumps[i - 1].location);
        }
        if i + 1 < n {
            radius = radius.min(jumps[i + 1].location - z);
        }
        jumps[i].isolation_radius = radius;
    }
    let left_continuous = jumps
        .iter()
        .all(|j| (j.value_at - j.left_limit).abs() <= FLAG_TOL);
    let right_continuous = jumps
        .iter()
        .all(|j| (j.value_at - j.right_limit).abs() <= FLAG_TOL);
    SectionProfile {
        a,
        pieces: normalize_pieces(pieces),
        jumps,
        continuity: ContinuityFlags {
            continuous: n == 0,
            left_continuous,
            right_continuous,
        },
    }
}

/// Drops zero-width segments and merges mergeable neighbours.
fn normalize_pieces(pieces: Vec<Segment>) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if p.lo >= p.hi {
            continue;
        }
        if let Some(last) = out.last_mut() {
            match (&mut last.kind, &p.kind) {
                (
                    SegmentKind::Increasing { to, .. },
                    SegmentKind::Increasing { to: p_to, .. },
                ) if last.hi == p.lo => {
                    *to = *p_to;
                    last.hi = p.hi;
                    continue;
                }
                (SegmentKind::Plateau { level }, SegmentKind::Plateau { level: p_level })
                    if last.hi == p.lo && (*level - *p_level).abs() <= FLAG_TOL =>
                {
                    last.hi = p.hi;
                    continue;
                }
                _ => {}
            }
        }
        out.push(p);
    }
    out
}

/// Closed-form section profile. Covers every expressible operation; the
/// formulas are per-construction case analysis, exercised against the
/// numeric scanner in tests.
pub fn analytic_section(s: &Semicopula, a: UnitValue) -> Option<SectionProfile> {
    let av = a.get();
    let plat = |lo: f64, hi: f64, level: f64| Segment {
        lo,
        hi,
        kind: SegmentKind::Plateau { level },
    };
    let inc = |lo: f64, hi: f64, from: f64, to: f64| Segment {
        lo,
        hi,
        kind: SegmentKind::Increasing { from, to },
    };
    if av == 0.0 {
        return Some(finalize_profile(a, vec![plat(0.0, 1.0, 0.0)], vec![]));
    }
    if av == 1.0 {
        return Some(finalize_profile(a, vec![inc(0.0, 1.0, 0.0, 1.0)], vec![]));
    }
    let profile = match s.kind() {
        SemicopulaKind::Minimum => {
            finalize_profile(a, vec![inc(0.0, av, 0.0, av), plat(av, 1.0, av)], vec![])
        }
        SemicopulaKind::Product | SemicopulaKind::Cubic => {
            finalize_profile(a, vec![inc(0.0, 1.0, 0.0, av)], vec![])
        }
        SemicopulaKind::Lukasiewicz => {
            let z = 1.0 - av;
            finalize_profile(a, vec![plat(0.0, z, 0.0), inc(z, 1.0, 0.0, av)], vec![])
        }
        SemicopulaKind::NilpotentMinimum => {
            let z = 1.0 - av;
            let t2 = av.min(z);
            let mut pieces = vec![plat(0.0, z, 0.0)];
            if av > z {
                pieces.push(inc(z, av, z, av));
                pieces.push(plat(av, 1.0, av));
            } else {
                pieces.push(plat(z, 1.0, av));
            }
            let jump = JumpRecord {
                location: z,
                left_limit: 0.0,
                right_limit: t2,
                value_at: 0.0, // x + a = 1 still maps to 0: left-continuous
                isolation_radius: 0.0,
            };
            finalize_profile(a, pieces, vec![jump])
        }
        SemicopulaKind::Drastic => {
            let jump = JumpRecord {
                location: 1.0,
                left_limit: 0.0,
                right_limit: av, // endpoint convention: the value itself
                value_at: av,
                isolation_radius: 0.0,
            };
            finalize_profile(a, vec![plat(0.0, 1.0, 0.0)], vec![jump])
        }
        SemicopulaKind::OrdinalSum { summands } => {
            let inside = summands
                .iter()
                .find(|su| su.lo.get() < av && av < su.hi.get());
            match inside {
                None => {
                    // a on a block edge or between blocks: min shape
                    finalize_profile(a, vec![inc(0.0, av, 0.0, av), plat(av, 1.0, av)], vec![])
                }
                Some(su) => {
                    let (lo, hi) = (su.lo.get(), su.hi.get());
                    let mut pieces = vec![inc(0.0, lo, 0.0, lo)];
                    match su.base {
                        BaseNorm::Product => pieces.push(inc(lo, hi, lo, av)),
                        BaseNorm::Lukasiewicz => {
                            let x0 = lo + hi - av;
                            pieces.push(plat(lo, x0, lo));
                            pieces.push(inc(x0, hi, lo, av));
                        }
                    }
                    pieces.push(plat(hi, 1.0, av));
                    finalize_profile(a, pieces, vec![])
                }
            }
        }
    };
    Some(profile)
}

/// One-sided limit read from the analytic profile when the query point is
/// exactly a known jump, else just the (continuous there) value.
pub fn analytic_one_sided_limit(s: &Semicopula, a: UnitValue, x: f64, side: Side) -> Option<f64> {
    let profile = analytic_section(s, a)?;
    for j in &profile.jumps {
        if j.location == x {
            return Some(match side {
                Side::Left => j.left_limit,
                Side::Right => j.right_limit,
            });
        }
    }
    Some(s.eval_f64(a.get(), x))
}

/// Estimates `lim S(a, x +/- h)` by evaluating at `x +/- 2^-j` and taking
/// the finest probe. Probes outside `[0, 1]` are skipped.
pub fn estimate_one_sided_limit(
    g: impl Fn(f64) -> f64,
    x: f64,
    side: Side,
    j_min: u32,
    j_max: u32,
) -> f64 {
    let mut last = None;
    for j in j_min..=j_max {
        let step = (2.0f64).powi(-(j as i32));
        let p = match side {
            Side::Left => x - step,
            Side::Right => x + step,
        };
        if !(0.0..=1.0).contains(&p) || p == x {
            continue;
        }
        last = Some(g(p));
    }
    last.unwrap_or_else(|| g(x))
}

/// Scans a section, preferring the closed form when one exists.
pub fn scan_section(
    s: &Semicopula,
    a: UnitValue,
    params: &ScanParams,
) -> Result<SectionProfile, SemicopulaError> {
    match analytic_section(s, a) {
        Some(p) => Ok(p),
        None => scan_section_numeric(s, a, params),
    }
}

/// Scans a section purely by evaluation.
pub fn scan_section_numeric(
    s: &Semicopula,
    a: UnitValue,
    params: &ScanParams,
) -> Result<SectionProfile, SemicopulaError> {
    scan_function(|x| s.eval_f64(a.get(), x), a, params)
}

#[derive(Debug, Clone, Copy)]
struct RawChunk {
    lo: f64,
    hi: f64,
    g_lo: f64,
    g_hi: f64,
}

enum ScanEvent {
    Chunk(RawChunk),
    Jump(JumpRecord),
}

/// Numeric section scan over an arbitrary non-decreasing `g` on `[0, 1]`.
///
/// Three phases. (1) Adaptive bisection: intervals whose total increase is
/// below `eta` are accepted as flat without further work, everything else
/// is split until it is narrower than `delta`. (2) Each narrow candidate
/// is bisected toward its point of steepest increase; if the increase
/// spreads out (a steep but continuous stretch) the candidate is dismissed
/// early, otherwise the bracket collapses to adjacent floats and the jump
/// is confirmed by one-sided probes at `z +/- 2^-j`. (3) The chunks and
/// confirmed jumps are assembled into plateau / increasing pieces.
///
/// A confirmed jump is reported at the last float before the transition,
/// and the value there naturally equals the left limit. When the transition
/// hugs an endpoint of `[0, 1]` the location snaps onto the endpoint and
/// the value is re-evaluated there, which is what distinguishes a jump
/// *at* 1 (value above the left limit) from a jump just before it.
pub fn scan_function(
    g: impl Fn(f64) -> f64,
    a: UnitValue,
    params: &ScanParams,
) -> Result<SectionProfile, SemicopulaError> {
    let eta = params.eta;
    // phase 1: left-to-right adaptive subdivision
    let mut flats_and_candidates: Vec<(RawChunk, bool)> = Vec::new();
    let mut stack = vec![RawChunk {
        lo: 0.0,
        hi: 1.0,
        g_lo: g(0.0),
        g_hi: g(1.0),
    }];
    while let Some(c) = stack.pop() {
        if c.g_hi - c.g_lo < eta {
            flats_and_candidates.push((c, false));
            continue;
        }
        if c.hi - c.lo <= params.delta {
            flats_and_candidates.push((c, true));
            continue;
        }
        let mid = 0.5 * (c.lo + c.hi);
        let g_mid = g(mid);
        stack.push(RawChunk {
            lo: mid,
            hi: c.hi,
            g_lo: g_mid,
            g_hi: c.g_hi,
        });
        stack.push(RawChunk {
            lo: c.lo,
            hi: mid,
            g_lo: c.g_lo,
            g_hi: g_mid,
        });
    }

    // phase 2: refine candidates into jumps or dismiss them as steep rises
    let mut events: Vec<ScanEvent> = Vec::new();
    let mut jump_count = 0usize;
    for (c, is_candidate) in flats_and_candidates {
        if !is_candidate {
            events.push(ScanEvent::Chunk(c));
            continue;
        }
        match refine_candidate(&g, c, params) {
            None => events.push(ScanEvent::Chunk(c)),
            Some(jump) => {
                jump_count += 1;
                if jump_count > params.max_jumps {
                    return Err(SemicopulaError::ScanBudgetExhausted {
                        a: a.get(),
                        max_jumps: params.max_jumps,
                    });
                }
                // split the chunk around the jump; the left part tops out
                // at the left limit even when the jump value sits above it
                events.push(ScanEvent::Chunk(RawChunk {
                    lo: c.lo,
                    hi: jump.location,
                    g_lo: c.g_lo,
                    g_hi: jump.left_limit,
                }));
                let right_start = jump.right_limit;
                events.push(ScanEvent::Jump(jump));
                events.push(ScanEvent::Chunk(RawChunk {
                    lo: jump.location,
                    hi: c.hi,
                    g_lo: right_start,
                    g_hi: c.g_hi,
                }));
            }
        }
    }

    // phase 3: group chunks between jumps into pieces
    let mut pieces: Vec<Segment> = Vec::new();
    let mut jumps: Vec<JumpRecord> = Vec::new();
    let mut current: Option<(RawChunk, bool)> = None; // (span, is_rising)
    let flush = |current: &mut Option<(RawChunk, bool)>, pieces: &mut Vec<Segment>| {
        if let Some((span, _)) = current.take() {
            if span.hi > span.lo {
                // relabel by total increase so slow creep is not called flat
                let kind = if span.g_hi - span.g_lo >= eta {
                    SegmentKind::Increasing {
                        from: span.g_lo,
                        to: span.g_hi,
                    }
                } else {
                    SegmentKind::Plateau { level: span.g_lo }
                };
                pieces.push(Segment {
                    lo: span.lo,
                    hi: span.hi,
                    kind,
                });
            }
        }
    };
    for ev in events {
        match ev {
            ScanEvent::Jump(j) => {
                flush(&mut current, &mut pieces);
                jumps.push(j);
            }
            ScanEvent::Chunk(c) => {
                if c.hi <= c.lo {
                    continue;
                }
                let rising = c.g_hi - c.g_lo >= eta;
                match &mut current {
                    Some((span, span_rising)) if *span_rising == rising => {
                        span.hi = c.hi;
                        span.g_hi = c.g_hi;
                    }
                    _ => {
                        flush(&mut current, &mut pieces);
                        current = Some((c, rising));
                    }
                }
            }
        }
    }
    flush(&mut current, &mut pieces);
    Ok(finalize_profile(a, pieces, jumps))
}

/// Bisects a narrow candidate toward its steepest point. Returns a jump
/// when the increase stays concentrated all the way down to adjacent
/// floats, `None` when it spreads (continuous rise).
fn refine_candidate(
    g: &impl Fn(f64) -> f64,
    c: RawChunk,
    params: &ScanParams,
) -> Option<JumpRecord> {
    let eta = params.eta;
    let (mut l, mut h, mut gl, mut gh) = (c.lo, c.hi, c.g_lo, c.g_hi);
    for _ in 0..80 {
        if gh - gl < eta {
            return None;
        }
        let m = 0.5 * (l + h);
        if m <= l || m >= h {
            break; // l and h are adjacent floats
        }
        let gm = g(m);
        if gm - gl >= gh - gm {
            h = m;
            gh = gm;
        } else {
            l = m;
            gl = gm;
        }
    }
    if gh - gl < eta {
        return None;
    }
    let z = if l <= ENDPOINT_SNAP {
        0.0
    } else if h >= 1.0 - ENDPOINT_SNAP {
        1.0
    } else {
        l
    };
    let value_at = g(z);
    let left_limit = if z == 0.0 {
        value_at
    } else {
        estimate_one_sided_limit(g, z, Side::Left, params.j_min, params.j_max)
    };
    let right_limit = if z == 1.0 {
        value_at
    } else {
        estimate_one_sided_limit(g, z, Side::Right, params.j_min, params.j_max)
    };
    if right_limit - left_limit < 0.5 * eta {
        return None;
    }
    Some(JumpRecord {
        location: z,
        left_limit,
        right_limit,
        value_at,
        isolation_radius: 0.0, // filled in by finalize_profile
    })
}

/// Grid of interior levels `i / (k + 1)`, `i = 1..=k`.
pub fn default_a_grid(k: usize) -> Vec<UnitValue> {
    (1..=k)
        .map(|i| UnitValue::clamped(i as f64 / (k + 1) as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyParams {
    pub a_grid: Vec<UnitValue>,
    pub scan: ScanParams,
    pub assoc: AssocStrategy,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            a_grid: default_a_grid(19),
            scan: ScanParams::default(),
            assoc: AssocStrategy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectedClass {
    /// Associative, all scanned sections continuous.
    S0,
    /// Associative, sections left-continuous with isolated jumps only.
    S1,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassEvidence {
    Associativity(AssocWitness),
    Section {
        a: UnitValue,
        jump: JumpRecord,
        problem: SectionProblem,
    },
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionProblem {
    NotLeftContinuous,
    JumpNotIsolated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub name: String,
    pub detected: DetectedClass,
    pub declared: DeclaredClass,
    /// Set when the detected class contradicts the declared one.
    pub mismatch: bool,
    pub associativity: AssocOutcome,
    pub evidence: ClassEvidence,
    pub sections: Vec<SectionProfile>,
}

/// Classification interrupted by a scan failure; carries the sections
/// finished before the failure for partial reporting.
#[derive(Debug, Error)]
#[error("{error}")]
pub struct ClassifyInterrupted {
    pub error: SemicopulaError,
    pub completed: Vec<SectionProfile>,
}

/// Classifies by numerical evidence only: an associativity search plus a
/// numeric scan of every section over the level grid. The verdict is
/// as strong as the grid and scan resolution, never a proof.
pub fn classify(s: &Semicopula, params: &ClassifyParams) -> Result<ClassReport, ClassifyInterrupted> {
    let associativity = check_associativity(s, params.assoc);
    let mut sections: Vec<SectionProfile> = Vec::with_capacity(params.a_grid.len());
    for a in &params.a_grid {
        match scan_section_numeric(s, *a, &params.scan) {
            Ok(p) => sections.push(p),
            Err(error) => {
                return Err(ClassifyInterrupted {
                    error,
                    completed: sections,
                })
            }
        }
    }

    let (detected, evidence) = if let AssocOutcome::Witness(w) = &associativity {
        (DetectedClass::Other, ClassEvidence::Associativity(w.clone()))
    } else if sections.iter().all(|p| p.continuity.continuous) {
        (DetectedClass::S0, ClassEvidence::None)
    } else {
        let offender = sections.iter().find_map(|p| {
            p.jumps.iter().find_map(|j| {
                if (j.value_at - j.left_limit).abs() > FLAG_TOL {
                    Some((p.a, *j, SectionProblem::NotLeftContinuous))
                } else if j.isolation_radius <= 0.0 {
                    Some((p.a, *j, SectionProblem::JumpNotIsolated))
                } else {
                    None
                }
            })
        });
        match offender {
            None => (DetectedClass::S1, ClassEvidence::None),
            Some((a, jump, problem)) => (
                DetectedClass::Other,
                ClassEvidence::Section { a, jump, problem },
            ),
        }
    };

    let declared = s.declared_class();
    let compatible = matches!(
        (declared, detected),
        (DeclaredClass::S0, DetectedClass::S0)
            | (DeclaredClass::S1, DetectedClass::S1)
            | (DeclaredClass::General, DetectedClass::Other)
            | (DeclaredClass::Unknown, _)
    );
    Ok(ClassReport {
        name: s.name().to_string(),
        detected,
        declared,
        mismatch: !compatible,
        associativity,
        evidence,
        sections,
    })
}
