//! The pipeline behind every subcommand: classify, trace, bound, decide.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use capax_core::boundary::{self, emit_csv, emit_svg, BoundarySampling};
use capax_core::capacity::{bounds_from_sampling, verdict, AhlforsVerdict, CapacityBounds};
use capax_core::format::sig;
use capax_core::published::{self, Example};
use capax_core::ratmap::DEFAULT_GOODNESS_DELTA;
use capax_core::{Complex, GoodnessStatus, GoodnessVerdict, RationalMapPF};

use crate::config::{Artifact, JobConfig, DEFAULT_NODES, DEFAULT_TOL};
use crate::expr::format_map;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_GOOD: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Rendered artifacts plus the process exit code. Diagnostics are meant for
/// standard error.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub code: i32,
    pub artifacts: BTreeMap<Artifact, String>,
    pub diagnostics: Vec<String>,
}

impl RunOutput {
    fn fail(code: i32, message: String) -> Self {
        RunOutput {
            code,
            artifacts: BTreeMap::new(),
            diagnostics: vec![message],
        }
    }
}

fn complex_text(z: Complex) -> String {
    if z.im == 0.0 {
        sig(z.re, 15)
    } else {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{sign}{}i", sig(z.re, 15), sig(z.im.abs(), 15))
    }
}

/// Map echo, degree, residue sum and goodness.
pub fn goodness_report(map: &RationalMapPF, goodness: &GoodnessVerdict) -> String {
    let mut out = String::new();
    writeln!(out, "map: {}", format_map(map)).unwrap();
    writeln!(out, "n: {}", map.degree()).unwrap();
    writeln!(
        out,
        "sum of residues: {}",
        complex_text(map.derivative_at_infinity())
    )
    .unwrap();
    writeln!(
        out,
        "goodness: {:?} (margin {})",
        goodness.status,
        sig(goodness.margin, 6)
    )
    .unwrap();
    out
}

/// `k,lower,upper` with 15 significant digits and LF line endings.
pub fn bounds_csv(bounds: &CapacityBounds) -> String {
    let mut out = String::from("k,lower,upper\n");
    for r in &bounds.rows {
        writeln!(out, "{},{},{}", r.k, sig(r.lower, 15), sig(r.upper, 15)).unwrap();
    }
    out
}

pub fn verdict_text(goodness: &GoodnessVerdict, bounds: &CapacityBounds, v: &AhlforsVerdict) -> String {
    let mut out = goodness_report(&bounds.map, goodness);
    writeln!(out, "nodes: {}", bounds.nodes).unwrap();
    if let Some(last) = bounds.last() {
        writeln!(out, "k: {}", last.k).unwrap();
        writeln!(out, "bracket: [{}, {}]", sig(last.lower, 15), sig(last.upper, 15)).unwrap();
    }
    writeln!(out, "verdict: {:?} (margin {})", v.status, sig(v.margin, 6)).unwrap();
    writeln!(
        out,
        "certified: {}",
        if bounds.certified() { "yes" } else { "no" }
    )
    .unwrap();
    out
}

fn classify(map: &RationalMapPF) -> Result<GoodnessVerdict, RunOutput> {
    let goodness = map
        .is_n_good(DEFAULT_GOODNESS_DELTA)
        .map_err(|e| RunOutput::fail(EXIT_NUMERICAL, format!("critical values: {e}")))?;
    Ok(goodness)
}

/// The `check` subcommand: goodness only.
pub fn check(map: &RationalMapPF) -> RunOutput {
    let goodness = match classify(map) {
        Ok(g) => g,
        Err(out) => return out,
    };
    let code = if goodness.status == GoodnessStatus::Good {
        EXIT_OK
    } else {
        EXIT_NOT_GOOD
    };
    RunOutput {
        code,
        artifacts: BTreeMap::from([(Artifact::VerdictText, goodness_report(map, &goodness))]),
        diagnostics: Vec::new(),
    }
}

struct Computed {
    goodness: GoodnessVerdict,
    sampling: BoundarySampling,
    bounds: Option<CapacityBounds>,
}

fn compute(
    map: &RationalMapPF,
    orders: &[usize],
    nodes: usize,
    need_bounds: bool,
) -> Result<Computed, RunOutput> {
    let goodness = classify(map)?;
    if goodness.status != GoodnessStatus::Good {
        return Err(RunOutput::fail(
            EXIT_NOT_GOOD,
            format!(
                "map is not n-good ({:?}, margin {}); no bounds computed",
                goodness.status,
                sig(goodness.margin, 6)
            ),
        ));
    }
    let sampling = boundary::trace(map, nodes)
        .map_err(|e| RunOutput::fail(EXIT_NUMERICAL, format!("boundary trace: {e}")))?;
    let bounds = if need_bounds {
        let b = bounds_from_sampling(map, &sampling, orders, None)
            .map_err(|e| RunOutput::fail(EXIT_NUMERICAL, format!("capacity bounds: {e}")))?;
        Some(b)
    } else {
        None
    };
    Ok(Computed {
        goodness,
        sampling,
        bounds,
    })
}

/// Runs the pipeline and renders every artifact listed in `job.outputs`.
pub fn run(job: &JobConfig) -> RunOutput {
    if let Err(e) = job.validate() {
        return RunOutput::fail(EXIT_USAGE, e.to_string());
    }
    let need_bounds =
        job.outputs.contains_key(&Artifact::BoundsCsv) || job.outputs.contains_key(&Artifact::VerdictText);
    let orders: Vec<usize> = (1..=job.kmax).collect();
    let computed = match compute(&job.map, &orders, job.nodes, need_bounds) {
        Ok(c) => c,
        Err(out) => return out,
    };
    let mut out = RunOutput::default();
    for &artifact in job.outputs.keys() {
        let text = match artifact {
            Artifact::BoundsCsv => bounds_csv(computed.bounds.as_ref().expect("bounds requested")),
            Artifact::BoundaryCsv => emit_csv(&computed.sampling),
            Artifact::BoundarySvg => emit_svg(&computed.sampling),
            Artifact::VerdictText => {
                let b = computed.bounds.as_ref().expect("bounds requested");
                verdict_text(&computed.goodness, b, &verdict(b, job.tol))
            }
        };
        out.artifacts.insert(artifact, text);
    }
    if let Some(b) = &computed.bounds {
        if !b.certified() {
            out.diagnostics.push(
                "warning: some rows were computed from an ill-conditioned system (certified: no)".into(),
            );
        }
    }
    out
}

/// Comparison of a fresh run against a published table.
pub fn comparison_csv(example: &Example, bounds: &CapacityBounds) -> String {
    let mut out = String::from("k,lower,upper,paper_lower,paper_upper,abs_err_l,abs_err_u\n");
    for r in &bounds.rows {
        let published = match example.row(r.k) {
            Some((_, l, u)) => format!(
                "{},{},{},{}",
                sig(l, 15),
                sig(u, 15),
                sig((r.lower - l).abs(), 15),
                sig((r.upper - u).abs(), 15)
            ),
            None => ",,,".to_string(),
        };
        writeln!(
            out,
            "{},{},{},{published}",
            r.k,
            sig(r.lower, 15),
            sig(r.upper, 15)
        )
        .unwrap();
    }
    out
}

/// Reruns one of the six reference examples. `kmax` replaces the published
/// order list by `1..=kmax`.
pub fn repro(id: usize, kmax: Option<usize>, nodes: Option<usize>, svg: bool) -> RunOutput {
    let Some(example) = published::example(id) else {
        return RunOutput::fail(EXIT_USAGE, format!("no reference example {id}; choose 1 to 6"));
    };
    let orders = match kmax {
        Some(0) => return RunOutput::fail(EXIT_USAGE, "kmax must be at least 1".into()),
        Some(k) => (1..=k).collect(),
        None => example.orders(),
    };
    let nodes = nodes.unwrap_or(DEFAULT_NODES);
    if let Err(e) = boundary::validate_node_count(nodes) {
        return RunOutput::fail(EXIT_USAGE, e.to_string());
    }
    let map = example.map();
    let computed = match compute(&map, &orders, nodes, true) {
        Ok(c) => c,
        Err(out) => return out,
    };
    let bounds = computed.bounds.expect("bounds requested");
    let v = verdict(&bounds, DEFAULT_TOL);
    let mut out = RunOutput::default();
    out.artifacts
        .insert(Artifact::BoundsCsv, comparison_csv(&example, &bounds));
    out.artifacts.insert(
        Artifact::VerdictText,
        verdict_text(&computed.goodness, &bounds, &v),
    );
    if svg {
        out.artifacts
            .insert(Artifact::BoundarySvg, emit_svg(&computed.sampling));
    }
    let worst = bounds
        .rows
        .iter()
        .filter_map(|r| {
            example
                .row(r.k)
                .map(|(_, l, u)| (r.lower - l).abs().max((r.upper - u).abs()))
        })
        .fold(0.0, f64::max);
    out.diagnostics.push(format!(
        "example {id}: {} rows, max abs deviation from the published table {}",
        bounds.rows.len(),
        sig(worst, 3)
    ));
    out
}
