//! Quasi-state evaluators and the randomized verification machinery.

use std::sync::Arc;

use nalgebra::DVector;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{check_dim, Error, Result};
use crate::lie::{Element, LieAlgebra, LinearMap, SemidirectSplit};
use crate::sampling::{self, SeededRng};

pub type Evaluator = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

pub const QS_TOL: f64 = 1e-7;
pub const AD_TOL: f64 = 1e-6;
pub const LINEARITY_TOL: f64 = 1e-8;

const QS_RADII: [f64; 3] = [0.1, 1.0, 10.0];
const GROUP_RADII: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Linear,
    ZetaAlphaC,
    Heisenberg,
    GwReductive,
    MotionAd,
    Pullback,
    Custom,
}

/// A real-valued function on a Lie algebra together with where it came from.
#[derive(Clone)]
pub struct QuasiState {
    algebra: Arc<LieAlgebra>,
    eval: Evaluator,
    family: Family,
    params: Value,
}

impl std::fmt::Debug for QuasiState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuasiState")
            .field("dim", &self.algebra.dim())
            .field("family", &self.family)
            .field("params", &self.params)
            .finish()
    }
}

impl QuasiState {
    pub fn new(
        algebra: Arc<LieAlgebra>,
        family: Family,
        params: Value,
        eval: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            algebra,
            eval: Arc::new(eval),
            family,
            params,
        }
    }

    pub fn zero(algebra: Arc<LieAlgebra>) -> Self {
        let n = algebra.dim();
        Self::linear(algebra, DVector::zeros(n)).expect("dimensions agree")
    }

    pub fn linear(algebra: Arc<LieAlgebra>, coeffs: DVector<f64>) -> Result<Self> {
        check_dim(algebra.dim(), coeffs.len())?;
        let params = json!({ "coeffs": coeffs.as_slice() });
        Ok(Self::new(algebra, Family::Linear, params, move |x| coeffs.dot(x)))
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn params(&self) -> &Value {
        &self.params
    }

    pub fn evaluator(&self) -> Evaluator {
        self.eval.clone()
    }

    pub fn eval(&self, x: &Element) -> Result<f64> {
        check_dim(self.algebra.dim(), x.len())?;
        Ok((self.eval)(x))
    }

    pub(crate) fn eval_raw(&self, x: &Element) -> f64 {
        (self.eval)(x)
    }

    /// Pointwise sum; the family tag is kept only when both agree.
    pub fn sum(&self, other: &QuasiState) -> Result<QuasiState> {
        check_dim(self.algebra.dim(), other.algebra.dim())?;
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let family = if self.family == other.family {
            self.family
        } else {
            Family::Custom
        };
        let params = json!({ "sum": [self.describe(), other.describe()] });
        Ok(QuasiState::new(self.algebra.clone(), family, params, move |x| {
            f(x) + g(x)
        }))
    }

    pub fn describe(&self) -> Value {
        json!({ "family": self.family, "params": self.params })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    pub samples: usize,
    pub seed: u64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub worst_case: Value,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Running maximum of normalized residuals.
pub(crate) struct ReportBuilder {
    seed: u64,
    tolerance: f64,
    samples: usize,
    max_residual: f64,
    worst_case: Value,
}

impl ReportBuilder {
    pub(crate) fn new(seed: u64, tolerance: f64) -> Self {
        Self {
            seed,
            tolerance,
            samples: 0,
            max_residual: 0.0,
            worst_case: Value::Null,
        }
    }

    /// `residual` is already normalized by its scale. NaN counts as failure.
    pub(crate) fn record(&mut self, residual: f64, case: impl FnOnce() -> Value) {
        self.samples += 1;
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        if residual > self.max_residual || self.worst_case.is_null() {
            self.max_residual = self.max_residual.max(residual);
            self.worst_case = case();
        }
    }

    pub(crate) fn finish(self) -> VerificationReport {
        let verdict = if self.max_residual <= self.tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        VerificationReport {
            verdict,
            samples: self.samples,
            seed: self.seed,
            max_residual: self.max_residual,
            tolerance: self.tolerance,
            worst_case: self.worst_case,
        }
    }
}

pub(crate) fn vec_json(v: &DVector<f64>) -> Value {
    json!(v.as_slice())
}

fn require_samples(samples: usize) -> Result<()> {
    if samples == 0 {
        Err(Error::Domain("samples must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn random_commuting_partner(g: &LieAlgebra, x: &Element, rng: &mut SeededRng) -> Result<Element> {
    let basis = g.commuting_basis(x)?;
    let coeffs = sampling::sphere_point(rng, basis.len(), 1.0);
    let mut y = g.zero();
    for (c, b) in coeffs.iter().zip(&basis) {
        y += b * *c;
    }
    let radius = sampling::choose(rng, &QS_RADII);
    let norm = y.norm();
    Ok(if norm > 0.0 { y * (radius / norm) } else { y })
}

/// Tests `ζ(aX + bY) = aζ(X) + bζ(Y)` on sampled commuting pairs.
pub fn check_quasistate(zeta: &QuasiState, samples: usize, seed: u64) -> Result<VerificationReport> {
    require_samples(samples)?;
    let g = zeta.algebra();
    let mut rng = sampling::rng(seed);
    let mut report = ReportBuilder::new(seed, QS_TOL);
    for _ in 0..samples {
        let rx = sampling::choose(&mut rng, &QS_RADII);
        let x = sampling::sphere_point(&mut rng, g.dim(), rx);
        let y = random_commuting_partner(g, &x, &mut rng)?;
        let a = sampling::uniform(&mut rng, -10.0, 10.0);
        let b = sampling::uniform(&mut rng, -10.0, 10.0);
        let lhs = zeta.eval_raw(&(&x * a + &y * b));
        let rhs = a * zeta.eval_raw(&x) + b * zeta.eval_raw(&y);
        let scale = 1.0 + a.abs() * x.norm() + b.abs() * y.norm();
        let raw = (lhs - rhs).abs();
        report.record(raw / scale, || {
            json!({ "x": vec_json(&x), "y": vec_json(&y), "a": a, "b": b,
                    "lhs": lhs, "rhs": rhs, "raw_residual": raw, "scale": scale })
        });
    }
    Ok(report.finish())
}

/// Tests `ζ(exp(ad g) X) = ζ(X)` on sampled `g`, `X`.
pub fn check_ad_invariance(zeta: &QuasiState, samples: usize, seed: u64) -> Result<VerificationReport> {
    require_samples(samples)?;
    let alg = zeta.algebra();
    let mut rng = sampling::rng(seed);
    let mut report = ReportBuilder::new(seed, AD_TOL);
    for _ in 0..samples {
        let rg = sampling::choose(&mut rng, &GROUP_RADII);
        let g = sampling::sphere_point(&mut rng, alg.dim(), rg);
        let rx = sampling::choose(&mut rng, &QS_RADII);
        let x = sampling::sphere_point(&mut rng, alg.dim(), rx);
        let moved = alg.exp_ad(&g)?.apply(&x)?;
        let before = zeta.eval_raw(&x);
        let after = zeta.eval_raw(&moved);
        let scale = 1.0 + x.norm();
        let raw = (after - before).abs();
        report.record(raw / scale, || {
            json!({ "g": vec_json(&g), "x": vec_json(&x), "ad_g_x": vec_json(&moved),
                    "zeta_x": before, "zeta_ad_g_x": after, "raw_residual": raw })
        });
    }
    Ok(report.finish())
}

/// Tests additivity on arbitrary (not necessarily commuting) pairs.
pub fn check_linearity(zeta: &QuasiState, samples: usize, seed: u64) -> Result<VerificationReport> {
    require_samples(samples)?;
    let g = zeta.algebra();
    let mut rng = sampling::rng(seed);
    let mut report = ReportBuilder::new(seed, LINEARITY_TOL);
    for _ in 0..samples {
        let rx = sampling::choose(&mut rng, &QS_RADII);
        let ry = sampling::choose(&mut rng, &QS_RADII);
        let x = sampling::sphere_point(&mut rng, g.dim(), rx);
        let y = sampling::sphere_point(&mut rng, g.dim(), ry);
        let a = sampling::uniform(&mut rng, -10.0, 10.0);
        let b = sampling::uniform(&mut rng, -10.0, 10.0);
        let lhs = zeta.eval_raw(&(&x * a + &y * b));
        let rhs = a * zeta.eval_raw(&x) + b * zeta.eval_raw(&y);
        let scale = 1.0 + a.abs() * x.norm() + b.abs() * y.norm();
        let raw = (lhs - rhs).abs();
        report.record(raw / scale, || {
            json!({ "x": vec_json(&x), "y": vec_json(&y), "a": a, "b": b, "raw_residual": raw })
        });
    }
    Ok(report.finish())
}

/// `ζ = ζ₀ + α + ψ` on a semidirect product `V ⋊ h`.
pub struct Decomposition {
    pub zeta0: QuasiState,
    /// `α(v) = ζ(v, 0)` as a quasi-state on the whole algebra.
    pub alpha: QuasiState,
    /// Coefficients of `α` in the `V` basis.
    pub alpha_coeffs: DVector<f64>,
    /// `ψ(X) = ζ(0, X)` on `h`.
    pub psi: QuasiState,
}

const DECOMPOSE_LINEARITY_SAMPLES: usize = 64;
const DECOMPOSE_SEED: u64 = 0x5eed;

pub fn decompose(zeta: &QuasiState, split: SemidirectSplit) -> Result<Decomposition> {
    let g = zeta.algebra().clone();
    let SemidirectSplit { v_dim, h_dim } = split;
    check_dim(g.dim(), v_dim + h_dim)?;
    let h = Arc::new(g.coordinate_subalgebra(v_dim..v_dim + h_dim)?);

    let f = zeta.evaluator();
    let embed_v = move |v: &DVector<f64>| {
        let mut x = DVector::zeros(v_dim + h_dim);
        x.rows_mut(0, v_dim).copy_from(&v.rows(0, v_dim));
        x
    };
    let embed_h = move |y: &DVector<f64>| {
        let mut x = DVector::zeros(v_dim + h_dim);
        x.rows_mut(v_dim, h_dim).copy_from(y);
        x
    };

    let alpha_on_v = {
        let f = f.clone();
        move |v: &DVector<f64>| f(&embed_v(v))
    };
    let alpha_coeffs = DVector::from_fn(v_dim, |i, _| {
        let mut e = DVector::zeros(v_dim + h_dim);
        e[i] = 1.0;
        alpha_on_v(&e)
    });

    let mut rng = sampling::rng(DECOMPOSE_SEED);
    for _ in 0..DECOMPOSE_LINEARITY_SAMPLES {
        let r = sampling::choose(&mut rng, &QS_RADII);
        let u = sampling::sphere_point(&mut rng, v_dim, r);
        let a = sampling::uniform(&mut rng, -10.0, 10.0);
        let x = embed_v(&u);
        let direct = alpha_on_v(&(&x * a));
        let via_coeffs = a * alpha_coeffs.dot(&u);
        let scale = 1.0 + a.abs() * u.norm();
        if (direct - via_coeffs).abs() > LINEARITY_TOL * scale {
            return Err(Error::Validation(format!(
                "restriction to V is not linear (|{direct} - {via_coeffs}| at scale {scale})"
            )));
        }
    }

    let alpha_fn: Evaluator = Arc::new(alpha_on_v);
    let psi_fn: Evaluator = {
        let f = f.clone();
        Arc::new(move |y: &DVector<f64>| f(&embed_h(y)))
    };

    let alpha = {
        let a = alpha_fn.clone();
        QuasiState::new(
            g.clone(),
            Family::Linear,
            json!({ "coeffs_v": alpha_coeffs.as_slice() }),
            move |x| a(x),
        )
    };
    let psi = {
        let p = psi_fn.clone();
        QuasiState::new(h, Family::Custom, json!({ "restriction_of": zeta.describe() }), move |y| {
            p(y)
        })
    };
    let zeta0 = {
        let (a, p) = (alpha_fn, psi_fn);
        QuasiState::new(
            g,
            Family::Custom,
            json!({ "normalized_part_of": zeta.describe() }),
            move |x| {
                let tail = x.rows(v_dim, h_dim).into_owned();
                f(x) - a(x) - p(&tail)
            },
        )
    };
    Ok(Decomposition {
        zeta0,
        alpha,
        alpha_coeffs,
        psi,
    })
}

/// `(p*ζ)(X) = ζ(p X)` for `p: source → zeta_q.algebra()`.
pub fn pullback(source: Arc<LieAlgebra>, p: &LinearMap, zeta_q: &QuasiState) -> Result<QuasiState> {
    check_dim(source.dim(), p.source_dim())?;
    check_dim(zeta_q.algebra().dim(), p.target_dim())?;
    let m = p.matrix().clone();
    let f = zeta_q.evaluator();
    Ok(QuasiState::new(
        source,
        Family::Pullback,
        json!({ "of": zeta_q.describe(), "map": p }),
        move |x| f(&(&m * x)),
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct SublinearityProfile {
    pub radii: Vec<f64>,
    pub maxima: Vec<f64>,
    /// Profile drops by at least a factor 2 from first to last radius, or
    /// stays below `PROFILE_FLOOR` throughout.
    pub consistent: bool,
}

/// Ratios `|f(v)|/‖v‖` below this are rounding noise.
pub const PROFILE_FLOOR: f64 = 1e-12;

/// Maximum of `|f(v)|/‖v‖` over `directions` sampled unit directions, per radius.
pub fn sublinearity_profile(
    f: &dyn Fn(&DVector<f64>) -> f64,
    dim: usize,
    directions: usize,
    radii: &[f64],
    seed: u64,
) -> Result<SublinearityProfile> {
    if radii.len() < 3 {
        return Err(Error::Domain("need at least 3 radii".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] <= 0.0 {
        return Err(Error::Domain("radii must be positive and increasing".into()));
    }
    if directions == 0 {
        return Err(Error::Domain("directions must be at least 1".into()));
    }
    let mut rng = sampling::rng(seed);
    let dirs: Vec<DVector<f64>> = (0..directions)
        .map(|_| sampling::sphere_point(&mut rng, dim, 1.0))
        .collect();
    let maxima: Vec<f64> = radii
        .iter()
        .map(|&r| {
            dirs.iter()
                .map(|d| f(&(d * r)).abs() / r)
                .fold(0.0, f64::max)
        })
        .collect();
    let consistent =
        maxima[maxima.len() - 1] <= 0.5 * maxima[0] || maxima.iter().all(|&m| m <= PROFILE_FLOOR);
    Ok(SublinearityProfile {
        radii: radii.to_vec(),
        maxima,
        consistent,
    })
}

/// Geometric radii `10^0, 10^step, ...`.
pub fn geometric_radii(count: usize, start: f64, ratio: f64) -> Vec<f64> {
    (0..count).map(|k| start * ratio.powi(k as i32)).collect()
}
