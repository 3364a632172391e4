//! The `qslab` command line: every command reads one JSON document and prints
//! one JSON report on stdout.
//!
//! Exit codes: 0 for passing or decided results, 1 for failing verification
//! reports, 2 for usage, parse and validation errors.

pub mod input;

use std::sync::Arc;

use clap::{Parser, Subcommand};
use nalgebra::DVector;
use qslab_core::almost_abelian::{
    classify_3d, decide_rigidity, heisenberg_identification, heisenberg_quasistate, AlmostAbelianSpec, PhiJson,
};
use qslab_core::frame::{check_frame_identity, default_test_points, triviality_pipeline};
use qslab_core::motion::{motion_ad_quasistate, no_mixed_decomposition_check, reconstruct, MotionAlgebra, MotionElement};
use qslab_core::quasistate::{check_ad_invariance, check_quasistate, pullback, QuasiState, VerificationReport, Verdict};
use qslab_core::realization::CMatrix;
use qslab_core::reductive::{eval_at_matrix, gw_quasistate, jordan_parts, weyl_vanishing_check, AlgebraKind, MatrixAlgebraElement};
use qslab_core::Error;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use input::{complex_matrix, AlgebraInput, FrameSpec, QuasiStateSpec, SublinearSpec};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const SEED_ENV: &str = "QSLAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "qslab", version, about = "Lie quasi-state laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Read the input JSON from a file.
    #[arg(long, global = true)]
    pub input: Option<String>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Compact JSON output (the default).
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Re-judge sampled verification reports against this tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a three-dimensional algebra.
    Classify3d { inline: Option<String> },
    /// Decide rigidity of g_φ and emit a Heisenberg witness when not rigid.
    Rigid { inline: Option<String> },
    /// Sample the quasi-state axiom.
    CheckQs { inline: Option<String> },
    /// Sample Ad-invariance.
    CheckAd { inline: Option<String> },
    /// Heisenberg quasi-state, optionally pulled back to a non-rigid g_φ.
    Heisenberg { inline: Option<String> },
    /// Ad-invariant quasi-state on sl2(R), su(2) or u(n).
    Gw { inline: Option<String> },
    /// Quasi-states on the unitary motion algebra.
    Motion { inline: Option<String> },
    /// Frame identity and the sublinear triviality pipeline.
    FramePipeline { inline: Option<String> },
    /// Rebuild a quasi-state value from a frame function.
    Reconstruct { inline: Option<String> },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify3d { .. } => "classify3d",
            Command::Rigid { .. } => "rigid",
            Command::CheckQs { .. } => "check-qs",
            Command::CheckAd { .. } => "check-ad",
            Command::Heisenberg { .. } => "heisenberg",
            Command::Gw { .. } => "gw",
            Command::Motion { .. } => "motion",
            Command::FramePipeline { .. } => "frame-pipeline",
            Command::Reconstruct { .. } => "reconstruct",
        }
    }

    fn inline(&self) -> Option<&str> {
        match self {
            Command::Classify3d { inline }
            | Command::Rigid { inline }
            | Command::CheckQs { inline }
            | Command::CheckAd { inline }
            | Command::Heisenberg { inline }
            | Command::Gw { inline }
            | Command::Motion { inline }
            | Command::FramePipeline { inline }
            | Command::Reconstruct { inline } => inline.as_deref(),
        }
    }
}

/// Result of one invocation: exit code, stdout JSON, stderr diagnostics.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Core(Error::Domain(_)) => "domain",
            Failure::Core(Error::Validation(_)) => "validation",
            Failure::Core(Error::DimensionMismatch { .. }) => "dimension_mismatch",
            Failure::Core(Error::Classification(_)) => "classification",
            Failure::Core(Error::Parse(_)) => "parse",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

struct Context {
    seed: u64,
    samples: usize,
    tolerance: Option<f64>,
}

impl Context {
    fn judge(&self, mut r: VerificationReport) -> VerificationReport {
        if let Some(t) = self.tolerance {
            r.tolerance = t;
            r.verdict = if r.max_residual <= t { Verdict::Pass } else { Verdict::Fail };
        }
        r
    }
}

/// Report plus whether it counts as success for the exit code.
struct Report {
    ok: bool,
    body: Value,
}

fn render(value: &Value, pretty: bool) -> String {
    let s = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    };
    s.expect("JSON values always serialize")
}

/// Runs `qslab` on `args` (including the program name).
pub fn run<I, T>(args: I, env_seed: Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                };
            }
            let f = Failure::Usage(e.to_string());
            return error_outcome(None, &f, false);
        }
    };
    let name = cli.command.name();
    let seed = match env_seed.as_deref().map(str::trim).filter(|s| !s.is_empty()) {
        None => cli.seed,
        Some(s) => match s.parse::<u64>() {
            Ok(v) => v,
            Err(_) => {
                let f = Failure::Usage(format!("{SEED_ENV}={s} is not an unsigned integer"));
                return error_outcome(Some(name), &f, cli.pretty);
            }
        },
    };
    let ctx = Context {
        seed,
        samples: cli.samples,
        tolerance: cli.tolerance,
    };
    match dispatch(&cli, &ctx) {
        Ok(report) => {
            let mut out = Map::new();
            out.insert("command".into(), json!(name));
            out.insert("seed".into(), json!(ctx.seed));
            out.insert("samples".into(), json!(ctx.samples));
            if let Some(t) = ctx.tolerance {
                out.insert("tolerance_override".into(), json!(t));
            }
            match report.body {
                Value::Object(m) => out.extend(m),
                other => {
                    out.insert("result".into(), other);
                }
            }
            Outcome {
                code: if report.ok { 0 } else { 1 },
                stdout: render(&Value::Object(out), cli.pretty),
                stderr: String::new(),
            }
        }
        Err(f) => error_outcome(Some(name), &f, cli.pretty),
    }
}

fn error_outcome(command: Option<&str>, f: &Failure, pretty: bool) -> Outcome {
    let body = json!({
        "command": command,
        "error": { "kind": f.kind(), "message": f.message() },
    });
    Outcome {
        code: 2,
        stdout: render(&body, pretty),
        stderr: format!("qslab: {}", f.message()),
    }
}

fn read_input<T: DeserializeOwned>(cli: &Cli) -> Result<T, Failure> {
    let text = match (&cli.input, cli.command.inline()) {
        (Some(_), Some(_)) => {
            return Err(Failure::Usage("give either --input or inline JSON, not both".into()))
        }
        (None, None) => return Err(Failure::Usage("missing input: pass --input PATH or inline JSON".into())),
        (Some(path), None) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?,
        (None, Some(s)) => s.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Failure::Core(Error::Parse(e.to_string())))
}

fn dispatch(cli: &Cli, ctx: &Context) -> Result<Report, Failure> {
    if ctx.samples == 0 {
        return Err(Failure::Usage("--samples must be at least 1".into()));
    }
    if ctx.tolerance.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
        return Err(Failure::Usage("--tolerance must be a finite non-negative number".into()));
    }
    match &cli.command {
        Command::Classify3d { .. } => classify3d(read_input(cli)?),
        Command::Rigid { .. } => rigid(read_input(cli)?),
        Command::CheckQs { .. } => check_qs(read_input(cli)?, ctx, false),
        Command::CheckAd { .. } => check_qs(read_input(cli)?, ctx, true),
        Command::Heisenberg { .. } => heisenberg(read_input(cli)?, ctx),
        Command::Gw { .. } => gw(read_input(cli)?, ctx),
        Command::Motion { .. } => motion(read_input(cli)?, ctx),
        Command::FramePipeline { .. } => frame_pipeline(read_input(cli)?, ctx),
        Command::Reconstruct { .. } => reconstruct_cmd(read_input(cli)?),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn classify3d(input: AlgebraInput) -> Result<Report, Failure> {
    let g = input.build()?;
    let class = classify_3d(&g)?;
    Ok(Report {
        ok: true,
        body: to_value(&class),
    })
}

fn rigid(input: PhiJson) -> Result<Report, Failure> {
    let spec = AlmostAbelianSpec::from_json(&input)?;
    let verdict = decide_rigidity(&spec)?;
    let mut body = to_value(&verdict);
    if let Some(w) = &verdict.witness {
        let terminal = classify_3d(w.terminal())?;
        let to_h3 = heisenberg_identification().compose(&w.composite())?;
        body["terminal_class"] = to_value(&terminal);
        body["heisenberg_map"] = to_value(&to_h3);
    }
    Ok(Report { ok: true, body })
}

fn check_qs(input: QuasiStateSpec, ctx: &Context, ad: bool) -> Result<Report, Failure> {
    let zeta = input.build()?;
    let report = ctx.judge(if ad {
        check_ad_invariance(&zeta, ctx.samples, ctx.seed)?
    } else {
        check_quasistate(&zeta, ctx.samples, ctx.seed)?
    });
    let mut body = to_value(&report);
    body["quasi_state"] = zeta.describe();
    Ok(Report {
        ok: report.passed(),
        body,
    })
}

#[derive(Debug, Deserialize)]
struct HeisenbergInput {
    a: f64,
    c: SublinearSpec,
    #[serde(default)]
    phi: Option<PhiJson>,
}

fn both_checks(zeta: &QuasiState, ctx: &Context) -> Result<(VerificationReport, VerificationReport), Failure> {
    Ok((
        ctx.judge(check_quasistate(zeta, ctx.samples, ctx.seed)?),
        ctx.judge(check_ad_invariance(zeta, ctx.samples, ctx.seed)?),
    ))
}

fn heisenberg(input: HeisenbergInput, ctx: &Context) -> Result<Report, Failure> {
    let base = heisenberg_quasistate(input.a, &input.c.build(None)?)?;
    let (zeta, chain_length) = match &input.phi {
        None => (base, None),
        Some(phi) => {
            let spec = AlmostAbelianSpec::from_json(phi)?;
            let verdict = decide_rigidity(&spec)?;
            let w = verdict.witness.ok_or_else(|| {
                Failure::Core(Error::Validation("φ is rigid, so g_φ has no surjection onto h3".into()))
            })?;
            let p = heisenberg_identification().compose(&w.composite())?;
            let source = Arc::new(qslab_core::almost_abelian::build_g_phi(&spec));
            (pullback(source, &p, &base)?, Some(w.chain.len()))
        }
    };
    let (qs, ad) = both_checks(&zeta, ctx)?;
    Ok(Report {
        ok: qs.passed() && ad.passed(),
        body: json!({
            "quasi_state": zeta.describe(),
            "witness_chain_length": chain_length,
            "quasistate_check": qs,
            "ad_invariance": ad,
        }),
    })
}

#[derive(Debug, Deserialize)]
struct GwInput {
    kind: AlgebraKind,
    lambda: f64,
    /// Optional element to evaluate, as `[[[re, im], ...], ...]`.
    #[serde(default)]
    matrix: Option<Vec<Vec<[f64; 2]>>>,
}

fn cmatrix_json(m: &CMatrix) -> Value {
    json!((0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn gw(input: GwInput, ctx: &Context) -> Result<Report, Failure> {
    let zeta = gw_quasistate(input.kind, input.lambda)?;
    let (qs, ad) = both_checks(&zeta, ctx)?;
    let weyl = match input.kind {
        AlgebraKind::Sl2R => Some(weyl_vanishing_check(&zeta, ctx.samples, ctx.seed)?),
        _ => None,
    };
    let evaluation = match &input.matrix {
        None => Value::Null,
        Some(rows) => {
            let x = MatrixAlgebraElement::new(input.kind, complex_matrix(rows)?)?;
            let parts = jordan_parts(&x);
            json!({
                "value": eval_at_matrix(&zeta, &x)?,
                "element_type": parts.element_type,
                "xc": cmatrix_json(&parts.xc),
                "xk": cmatrix_json(&parts.xk),
                "xa": cmatrix_json(&parts.xa),
                "xn": cmatrix_json(&parts.xn),
                "yc": cmatrix_json(&parts.yc),
            })
        }
    };
    let ok = qs.passed() && ad.passed() && weyl.as_ref().is_none_or(|w| w.passed());
    Ok(Report {
        ok,
        body: json!({
            "quasi_state": zeta.describe(),
            "quasistate_check": qs,
            "ad_invariance": ad,
            "weyl_vanishing": weyl,
            "evaluation": evaluation,
        }),
    })
}

#[derive(Debug, Deserialize)]
struct MotionInput {
    n: usize,
    #[serde(default)]
    lambda: f64,
    /// Extra linear functional on all of gₙ (coordinates: re/im of w, then u(n)).
    #[serde(default)]
    linear: Option<Vec<f64>>,
    #[serde(default)]
    element: Option<MotionElement>,
}

fn motion(input: MotionInput, ctx: &Context) -> Result<Report, Failure> {
    let m = MotionAlgebra::new(input.n)?;
    let mut zeta = motion_ad_quasistate(input.n, input.lambda)?;
    if let Some(coeffs) = &input.linear {
        let lin = QuasiState::linear(m.algebra().clone(), DVector::from_vec(coeffs.clone()))?;
        zeta = zeta.sum(&lin)?;
    }
    let (qs, ad) = both_checks(&zeta, ctx)?;
    let no_mixed = if input.n >= 2 {
        Some(no_mixed_decomposition_check(&zeta, ctx.samples, ctx.seed)?)
    } else {
        None
    };
    let value = match &input.element {
        None => Value::Null,
        Some(e) => json!(zeta.eval(&m.to_coords(e)?)?),
    };
    let ok = qs.passed() && ad.passed() && no_mixed.as_ref().is_none_or(|r| r.passed());
    Ok(Report {
        ok,
        body: json!({
            "quasi_state": zeta.describe(),
            "dim": m.algebra().dim(),
            "quasistate_check": qs,
            "ad_invariance": ad,
            "no_mixed": no_mixed,
            "value": value,
        }),
    })
}

fn default_steps() -> usize {
    60
}

fn default_points() -> usize {
    8
}

#[derive(Debug, Deserialize)]
struct PipelineInput {
    f: FrameSpec,
    #[serde(default = "default_steps")]
    steps: usize,
    #[serde(default = "default_points")]
    test_points: usize,
}

fn frame_pipeline(input: PipelineInput, ctx: &Context) -> Result<Report, Failure> {
    let f = input.f.build()?;
    let identity = check_frame_identity(&f, ctx.samples, ctx.seed)?;
    let points = default_test_points(f.n(), input.test_points, ctx.seed);
    let pipeline = triviality_pipeline(&f, &points, input.steps, ctx.seed)?;
    Ok(Report {
        ok: true,
        body: json!({
            "frame_function": f.describe(),
            "frame_identity": identity,
            "verdict": pipeline.verdict,
            "pipeline": pipeline,
        }),
    })
}

#[derive(Debug, Deserialize)]
struct ReconstructInput {
    f: FrameSpec,
    element: MotionElement,
}

fn reconstruct_cmd(input: ReconstructInput) -> Result<Report, Failure> {
    let f = input.f.build()?;
    let r = reconstruct(&f, &input.element)?;
    let mut body = to_value(&r);
    body["frame_function"] = f.describe();
    Ok(Report { ok: true, body })
}
