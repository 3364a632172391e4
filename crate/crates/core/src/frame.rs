//! Generalized frame functions on `ℂⁿ`: the orthogonal-additivity identity,
//! odd parts, dyadic contraction and the triviality pipeline for sublinear
//! frame functions.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, hermitian_inner};
use crate::quasistate::{ReportBuilder, VerificationReport};
use crate::sampling;

pub type CVector = DVector<Complex64>;
type FrameFn = Arc<dyn Fn(&CVector) -> f64 + Send + Sync>;

pub const FRAME_TOL: f64 = 1e-8;
pub const PIPELINE_TOL: f64 = 1e-6;

const FRAME_RADII: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    LinearReal,
    SquaredNorm,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthClass {
    Sublinear,
    Linear,
    Quadratic,
    Unknown,
}

#[derive(Clone)]
pub struct FrameFunction {
    n: usize,
    kind: FrameKind,
    growth: GrowthClass,
    params: Value,
    eval: FrameFn,
}

impl std::fmt::Debug for FrameFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrameFunction")
            .field("n", &self.n)
            .field("kind", &self.kind)
            .field("growth", &self.growth)
            .field("params", &self.params)
            .finish()
    }
}

impl FrameFunction {
    pub fn custom(
        n: usize,
        growth: GrowthClass,
        params: Value,
        f: impl Fn(&CVector) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            n,
            kind: FrameKind::Custom,
            growth,
            params,
            eval: Arc::new(f),
        }
    }

    pub fn zero(n: usize) -> Self {
        Self::custom(n, GrowthClass::Sublinear, json!({ "name": "zero" }), |_| 0.0)
    }

    /// `f(v) = Re⟨v, a⟩`.
    pub fn linear_real(a: CVector) -> Self {
        let params = json!({ "a": complex_json(&a) });
        Self {
            n: a.len(),
            kind: FrameKind::LinearReal,
            growth: GrowthClass::Linear,
            params,
            eval: Arc::new(move |v| hermitian_inner(v, &a).re),
        }
    }

    pub fn squared_norm(n: usize) -> Self {
        Self {
            n,
            kind: FrameKind::SquaredNorm,
            growth: GrowthClass::Quadratic,
            params: json!({}),
            eval: Arc::new(|v| v.norm_squared()),
        }
    }

    /// `‖v‖`, which is not a frame function.
    pub fn norm(n: usize) -> Self {
        Self::custom(n, GrowthClass::Linear, json!({ "name": "norm" }), |v| v.norm())
    }

    /// `Σ c_i f_i`.
    pub fn combination(terms: Vec<(f64, FrameFunction)>) -> Result<Self> {
        let n = terms
            .first()
            .map(|(_, f)| f.n)
            .ok_or_else(|| Error::Domain("empty combination".into()))?;
        for (_, f) in &terms {
            check_dim(n, f.n)?;
        }
        let growth = if terms.iter().any(|(c, f)| *c != 0.0 && f.growth == GrowthClass::Quadratic) {
            GrowthClass::Quadratic
        } else if terms.iter().any(|(c, f)| *c != 0.0 && f.growth == GrowthClass::Linear) {
            GrowthClass::Linear
        } else {
            GrowthClass::Unknown
        };
        let params = json!({
            "combination": terms.iter().map(|(c, f)| json!({ "coeff": c, "of": f.describe() })).collect::<Vec<_>>()
        });
        let fs: Vec<(f64, FrameFn)> = terms.into_iter().map(|(c, f)| (c, f.eval)).collect();
        Ok(Self::custom(n, growth, params, move |v| {
            fs.iter().map(|(c, f)| c * f(v)).sum()
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> FrameKind {
        self.kind
    }

    pub fn growth(&self) -> GrowthClass {
        self.growth
    }

    pub fn describe(&self) -> Value {
        json!({ "n": self.n, "kind": self.kind, "growth": self.growth, "params": self.params })
    }

    pub fn eval(&self, v: &CVector) -> Result<f64> {
        check_dim(self.n, v.len())?;
        Ok((self.eval)(v))
    }

    /// Evaluate on interleaved real coordinates `(re₁, im₁, ...)`.
    pub fn eval_real(&self, coords: &[f64]) -> Result<f64> {
        check_dim(2 * self.n, coords.len())?;
        Ok((self.eval)(&linalg::real_to_complex(coords)))
    }

    pub(crate) fn eval_raw(&self, v: &CVector) -> f64 {
        (self.eval)(v)
    }
}

pub fn complex_json(v: &CVector) -> Value {
    json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

pub fn random_complex(rng: &mut impl Rng, n: usize, radius: f64) -> CVector {
    linalg::real_to_complex(sampling::sphere_point(rng, 2 * n, radius).as_slice())
}

/// Random vector orthogonal to `u` of the given length (Gram-Schmidt, redrawn
/// on degenerate draws).
pub fn orthogonal_partner(rng: &mut impl Rng, u: &CVector, length: f64) -> CVector {
    let un2 = u.norm_squared();
    loop {
        let r = random_complex(rng, u.len(), 1.0);
        let proj = if un2 > 0.0 {
            u * (hermitian_inner(&r, u) / Complex64::new(un2, 0.0))
        } else {
            CVector::zeros(u.len())
        };
        let res = r - proj;
        let norm = res.norm();
        if norm >= 1e-12 {
            return res * Complex64::new(length / norm, 0.0);
        }
    }
}

fn require_frame_dim(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::Domain(
            "frame identities need n ≥ 2; for n = 1 every function with f(0) = 0 qualifies".into(),
        ))
    } else {
        Ok(())
    }
}

/// Samples orthogonal pairs and tests `f(u+v) = f(u) + f(v)`.
pub fn check_frame_identity(f: &FrameFunction, samples: usize, seed: u64) -> Result<VerificationReport> {
    require_frame_dim(f.n)?;
    if samples == 0 {
        return Err(Error::Domain("samples must be at least 1".into()));
    }
    let mut rng = sampling::rng(seed);
    let mut report = ReportBuilder::new(seed, FRAME_TOL);
    for _ in 0..samples {
        let ru = sampling::choose(&mut rng, &FRAME_RADII);
        let rv = sampling::choose(&mut rng, &FRAME_RADII);
        let u = random_complex(&mut rng, f.n, ru);
        let v = orthogonal_partner(&mut rng, &u, rv);
        let (fu, fv) = (f.eval_raw(&u), f.eval_raw(&v));
        let fuv = f.eval_raw(&(&u + &v));
        let raw = (fuv - fu - fv).abs();
        let scale = 1.0 + fu.abs() + fv.abs();
        report.record(raw / scale, || {
            json!({ "u": complex_json(&u), "v": complex_json(&v),
                    "f_u_plus_v": fuv, "f_u": fu, "f_v": fv, "raw_residual": raw })
        });
    }
    Ok(report.finish())
}

/// `f(u) - 2f(u/2) - f(v/2) - f(-v/2)` for orthogonal `u`, `v` of equal length.
pub fn basic_identity_residual(f: &FrameFunction, u: &CVector, v: &CVector) -> Result<f64> {
    check_dim(f.n, u.len())?;
    check_dim(f.n, v.len())?;
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 {
        return Err(Error::Domain("u must be nonzero".into()));
    }
    if hermitian_inner(u, v).norm() > 1e-10 * (1.0 + nu * nv) {
        return Err(Error::Domain("u and v are not orthogonal".into()));
    }
    if (nu - nv).abs() > 1e-10 * (1.0 + nu) {
        return Err(Error::Domain("u and v differ in length".into()));
    }
    let half = Complex64::new(0.5, 0.0);
    Ok(f.eval_raw(u)
        - 2.0 * f.eval_raw(&(u * half))
        - f.eval_raw(&(v * half))
        - f.eval_raw(&(v * -half)))
}

/// `f̃(u) = f(u) - f(-u)`.
pub fn odd_part(f: &FrameFunction) -> FrameFunction {
    let g = f.eval.clone();
    FrameFunction::custom(
        f.n,
        f.growth,
        json!({ "odd_part_of": f.describe() }),
        move |u| g(u) - g(&-u),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct DyadicSequences {
    /// `a_k = f(2ᵏu)/2ᵏ`.
    pub a: Vec<f64>,
    /// `b_k = f(2ᵏu)/4ᵏ`.
    pub b: Vec<f64>,
    /// Set when `2ᵏu` left the representable range before `steps`.
    pub truncated: bool,
}

pub fn dyadic_contraction(f: &FrameFunction, u: &CVector, steps: usize) -> Result<DyadicSequences> {
    check_dim(f.n, u.len())?;
    if steps == 0 {
        return Err(Error::Domain("steps must be at least 1".into()));
    }
    let mut a = Vec::with_capacity(steps + 1);
    let mut b = Vec::with_capacity(steps + 1);
    let mut truncated = false;
    for k in 0..=steps {
        let s = 2f64.powi(k as i32);
        let scaled = u * Complex64::new(s, 0.0);
        let norm = scaled.norm();
        if !norm.is_finite() || norm > 1e150 {
            truncated = true;
            break;
        }
        let value = f.eval_raw(&scaled);
        if !value.is_finite() {
            truncated = true;
            break;
        }
        a.push(value / s);
        b.push(value / (s * s));
    }
    Ok(DyadicSequences { a, b, truncated })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineVerdict {
    Trivial,
    NotFrame,
    NotSublinear,
    ClaimFailed,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimResult {
    pub passed: bool,
    pub max_value: f64,
    pub tolerance: f64,
}

impl ClaimResult {
    fn new(max_value: f64, tolerance: f64) -> Self {
        Self {
            passed: max_value <= tolerance,
            max_value,
            tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub verdict: PipelineVerdict,
    pub frame_identity: VerificationReport,
    /// `max |a_K| / ‖u‖` (and the same along `-u`).
    pub sublinearity: ClaimResult,
    /// Odd part after Claim-1 contraction.
    pub evenness: ClaimResult,
    pub weak_radiality: VerificationReport,
    /// `max |b_K|`.
    pub quadratic_contraction: ClaimResult,
    pub max_abs_value: ClaimResult,
    pub steps: usize,
    pub test_points: usize,
    pub truncated: bool,
    pub seed: u64,
}

pub const PIPELINE_FRAME_SAMPLES: usize = 200;
pub const PIPELINE_RADIALITY_SAMPLES: usize = 200;

/// Unit-length sample points for the pipeline.
pub fn default_test_points(n: usize, count: usize, seed: u64) -> Vec<CVector> {
    let mut rng = sampling::rng(seed);
    (0..count).map(|_| random_complex(&mut rng, n, 1.0)).collect()
}

/// Equal-length orthogonal pairs must have equal values.
pub fn check_weak_radiality(f: &FrameFunction, samples: usize, seed: u64) -> Result<VerificationReport> {
    require_frame_dim(f.n)?;
    radiality(f, samples, seed, true)
}

/// Equal-length pairs (not necessarily orthogonal) must have equal values.
pub fn check_radiality(f: &FrameFunction, samples: usize, seed: u64) -> Result<VerificationReport> {
    require_frame_dim(f.n)?;
    radiality(f, samples, seed, false)
}

fn radiality(f: &FrameFunction, samples: usize, seed: u64, orthogonal: bool) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::Domain("samples must be at least 1".into()));
    }
    let mut rng = sampling::rng(seed);
    let mut report = ReportBuilder::new(seed, PIPELINE_TOL);
    for _ in 0..samples {
        let r = sampling::choose(&mut rng, &FRAME_RADII);
        let u = random_complex(&mut rng, f.n, r);
        let v = if orthogonal {
            orthogonal_partner(&mut rng, &u, r)
        } else {
            random_complex(&mut rng, f.n, r)
        };
        let (fu, fv) = (f.eval_raw(&u), f.eval_raw(&v));
        let raw = (fu - fv).abs();
        report.record(raw / (1.0 + fu.abs()), || {
            json!({ "u": complex_json(&u), "v": complex_json(&v), "f_u": fu, "f_v": fv })
        });
    }
    Ok(report.finish())
}

/// Runs the frame check, re-derives sublinearity from dyadic contraction, then
/// the evenness, weak-radiality and quadratic-contraction claims.
pub fn triviality_pipeline(
    f: &FrameFunction,
    test_points: &[CVector],
    steps: usize,
    seed: u64,
) -> Result<PipelineReport> {
    require_frame_dim(f.n)?;
    if test_points.is_empty() {
        return Err(Error::Domain("need at least one test point".into()));
    }
    let frame_identity = check_frame_identity(f, PIPELINE_FRAME_SAMPLES, seed)?;
    let odd = odd_part(f);
    let mut truncated = false;
    let mut sub_max = 0.0_f64;
    let mut odd_max = 0.0_f64;
    let mut b_max = 0.0_f64;
    let mut value_max = 0.0_f64;
    for u in test_points {
        check_dim(f.n, u.len())?;
        let norm = u.norm();
        if norm == 0.0 {
            return Err(Error::Domain("test points must be nonzero".into()));
        }
        for dir in [u.clone(), -u] {
            let seq = dyadic_contraction(f, &dir, steps)?;
            truncated |= seq.truncated;
            sub_max = sub_max.max(seq.a.last().copied().unwrap_or(f64::INFINITY).abs() / norm);
        }
        let odd_seq = dyadic_contraction(&odd, u, steps)?;
        truncated |= odd_seq.truncated;
        odd_max = odd_max.max(odd_seq.a.last().copied().unwrap_or(f64::INFINITY).abs());
        let seq = dyadic_contraction(f, u, steps)?;
        b_max = b_max.max(seq.b.last().copied().unwrap_or(f64::INFINITY).abs());
        value_max = value_max.max(f.eval_raw(u).abs());
    }
    let sublinearity = ClaimResult::new(sub_max, PIPELINE_TOL);
    let evenness = ClaimResult::new(odd_max, PIPELINE_TOL);
    let weak_radiality = check_weak_radiality(f, PIPELINE_RADIALITY_SAMPLES, seed)?;
    let quadratic_contraction = ClaimResult::new(b_max, PIPELINE_TOL);
    let max_abs_value = ClaimResult::new(value_max, PIPELINE_TOL);

    let verdict = if !frame_identity.passed() {
        PipelineVerdict::NotFrame
    } else if !sublinearity.passed {
        PipelineVerdict::NotSublinear
    } else if evenness.passed
        && weak_radiality.passed()
        && quadratic_contraction.passed
        && max_abs_value.passed
    {
        PipelineVerdict::Trivial
    } else {
        PipelineVerdict::ClaimFailed
    };
    Ok(PipelineReport {
        verdict,
        frame_identity,
        sublinearity,
        evenness,
        weak_radiality,
        quadratic_contraction,
        max_abs_value,
        steps,
        test_points: test_points.len(),
        truncated,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(parts: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(parts.len(), parts.iter().map(|(r, i)| Complex64::new(*r, *i)))
    }

    fn a3() -> CVector {
        cv(&[(1.0, -0.5), (0.25, 2.0), (-1.0, 0.0)])
    }

    #[test]
    fn builtins_satisfy_the_identity() {
        for n in 2..=4 {
            let a = random_complex(&mut sampling::rng(n as u64), n, 1.5);
            for f in [
                FrameFunction::linear_real(a.clone()),
                FrameFunction::squared_norm(n),
                FrameFunction::combination(vec![
                    (2.0, FrameFunction::linear_real(a.clone())),
                    (0.5, FrameFunction::squared_norm(n)),
                ])
                .unwrap(),
            ] {
                let r = check_frame_identity(&f, 500, 11).unwrap();
                assert!(r.passed() && r.max_residual <= 1e-10, "{f:?}: {}", r.max_residual);
            }
        }
    }

    #[test]
    fn norm_fails_with_witness() {
        let r = check_frame_identity(&FrameFunction::norm(2), 50, 1).unwrap();
        assert!(!r.passed());
        assert!(r.worst_case.get("u").is_some() && r.worst_case.get("v").is_some());
    }

    #[test]
    fn n_equal_one_is_rejected() {
        let r = check_frame_identity(&FrameFunction::squared_norm(1), 10, 1);
        assert!(matches!(r, Err(Error::Domain(_))));
        let p = triviality_pipeline(&FrameFunction::zero(1), &default_test_points(1, 2, 0), 10, 0);
        assert!(matches!(p, Err(Error::Domain(_))));
    }

    #[test]
    fn basic_identity_examples() {
        let u = cv(&[(1.0, 0.0), (0.0, 0.0)]);
        let v = cv(&[(0.0, 0.0), (0.0, 1.0)]);
        let sq = basic_identity_residual(&FrameFunction::squared_norm(2), &u, &v).unwrap();
        assert!(sq.abs() < 1e-15);
        let lin = FrameFunction::linear_real(cv(&[(0.3, 1.0), (2.0, -1.0)]));
        assert!(basic_identity_residual(&lin, &u, &v).unwrap().abs() < 1e-15);
        let nr = basic_identity_residual(&FrameFunction::norm(2), &u, &v).unwrap();
        assert!((nr + 1.0).abs() < 1e-15);
        let w = cv(&[(1.0, 0.0), (1.0, 0.0)]);
        assert!(basic_identity_residual(&lin, &u, &w).is_err());
        assert!(basic_identity_residual(&lin, &u, &(&v * Complex64::new(2.0, 0.0))).is_err());
        assert!(basic_identity_residual(&lin, &CVector::zeros(2), &CVector::zeros(2)).is_err());
    }

    #[test]
    fn odd_parts() {
        let u = a3() * Complex64::new(0.7, 0.2);
        let even = odd_part(&FrameFunction::squared_norm(3));
        assert_eq!(even.eval(&u).unwrap(), 0.0);
        let lin = FrameFunction::linear_real(a3());
        let l = lin.eval(&u).unwrap();
        assert!((odd_part(&lin).eval(&u).unwrap() - 2.0 * l).abs() < 1e-14);
        let mix = FrameFunction::combination(vec![(1.0, lin), (1.0, FrameFunction::squared_norm(3))]).unwrap();
        assert!((odd_part(&mix).eval(&u).unwrap() - 2.0 * l).abs() < 1e-12);
    }

    #[test]
    fn dyadic_examples() {
        let u = cv(&[(0.6, 0.0), (0.0, 0.8)]);
        let z = dyadic_contraction(&FrameFunction::zero(2), &u, 8).unwrap();
        assert!(z.a.iter().chain(&z.b).all(|x| *x == 0.0));
        let q = dyadic_contraction(&FrameFunction::squared_norm(2), &u, 8).unwrap();
        for (k, (a, b)) in q.a.iter().zip(&q.b).enumerate() {
            assert!((a - 2f64.powi(k as i32)).abs() < 1e-12 * a);
            assert!((b - 1.0).abs() < 1e-12);
        }
        let lin = FrameFunction::linear_real(cv(&[(1.0 / 0.6, 0.0), (0.0, 0.0)]));
        let l = dyadic_contraction(&lin, &u, 8).unwrap();
        for (k, (a, b)) in l.a.iter().zip(&l.b).enumerate() {
            assert!((a - 1.0).abs() < 1e-12);
            assert!((b - 2f64.powi(-(k as i32))).abs() < 1e-12);
        }
        let t = dyadic_contraction(&FrameFunction::squared_norm(2), &u, 2000).unwrap();
        assert!(t.truncated && t.a.len() < 2001);
        assert!(dyadic_contraction(&lin, &u, 0).is_err());
    }

    #[test]
    fn pipeline_verdicts() {
        let pts = default_test_points(3, 4, 2);
        let zero = triviality_pipeline(&FrameFunction::zero(3), &pts, 60, 1).unwrap();
        assert_eq!(zero.verdict, PipelineVerdict::Trivial);
        let lin = triviality_pipeline(&FrameFunction::linear_real(a3()), &pts, 60, 1).unwrap();
        assert_eq!(lin.verdict, PipelineVerdict::NotSublinear);
        let sq = triviality_pipeline(&FrameFunction::squared_norm(3), &pts, 60, 1).unwrap();
        assert_eq!(sq.verdict, PipelineVerdict::NotSublinear);
        assert!(sq.weak_radiality.passed());
        assert!(!sq.quadratic_contraction.passed);
        let norm = triviality_pipeline(&FrameFunction::norm(3), &pts, 60, 1).unwrap();
        assert_eq!(norm.verdict, PipelineVerdict::NotFrame);
        let root = FrameFunction::custom(3, GrowthClass::Sublinear, Value::Null, |v| v.norm().sqrt());
        let r = triviality_pipeline(&root, &pts, 60, 1).unwrap();
        assert_eq!(r.verdict, PipelineVerdict::NotFrame);
    }

    #[test]
    fn radiality_for_n3() {
        let sq = FrameFunction::squared_norm(3);
        assert!(check_weak_radiality(&sq, 200, 3).unwrap().passed());
        assert!(check_radiality(&sq, 200, 3).unwrap().passed());
        let lin = FrameFunction::linear_real(a3());
        assert!(!check_weak_radiality(&lin, 200, 3).unwrap().passed());
    }
}
