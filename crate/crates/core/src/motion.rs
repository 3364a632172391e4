//! The unitary motion algebras `gₙ = ℂⁿ ⋊ u(n)`, realified with interleaved
//! `(re, im)` coordinates on `ℂⁿ` followed by `u(n)` realization coordinates.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{check_dim, Error, Result};
use crate::frame::{self, check_frame_identity, complex_json, CVector, FrameFunction, GrowthClass};
use crate::lie::{LieAlgebra, LinearMap, SemidirectSplit};
use crate::linalg::{self, complex_matrix_norm, complex_to_real, hermitian_inner, real_to_complex};
use crate::quasistate::{
    check_quasistate, decompose, geometric_radii, sublinearity_profile, vec_json, Family, QuasiState,
    ReportBuilder, SublinearityProfile, VerificationReport,
};
use crate::realization::{CMatrix, MatrixRealization};
use crate::sampling;

/// Relative cutoff below which an eigenvalue of `-iX` counts as zero.
pub const EIGEN_CUTOFF: f64 = 1e-9;
pub const NORMALIZED_TOL: f64 = 1e-9;
pub const NO_MIXED_TOL: f64 = 1e-6;

const NORMALIZED_SAMPLES: usize = 64;
const NORMALIZED_SEED: u64 = 0x6e6f726d;
const SAMPLE_RADII: [f64; 3] = [0.1, 1.0, 10.0];
const PROFILE_DIRECTIONS: usize = 32;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

fn skew_defect(x: &CMatrix) -> f64 {
    complex_matrix_norm(&(x + x.adjoint()))
}

fn require_skew(x: &CMatrix) -> Result<()> {
    if !x.is_square() {
        return Err(Error::Domain("X must be square".into()));
    }
    let defect = skew_defect(x);
    if defect > 1e-12 * (1.0 + complex_matrix_norm(x)) {
        return Err(Error::Domain(format!("X is not skew-Hermitian (‖X + X*‖ = {defect:e})")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionElementJson {
    pub n: usize,
    pub w: Vec<[f64; 2]>,
    #[serde(rename = "X")]
    pub x: Vec<Vec<[f64; 2]>>,
}

/// `(w, X)` with `w ∈ ℂⁿ` and `X` skew-Hermitian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MotionElementJson", into = "MotionElementJson")]
pub struct MotionElement {
    n: usize,
    w: CVector,
    x: CMatrix,
}

impl MotionElement {
    pub fn new(w: CVector, x: CMatrix) -> Result<Self> {
        let n = w.len();
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if x.nrows() != n || x.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.nrows(),
            });
        }
        require_skew(&x)?;
        Ok(Self { n, w, x })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> &CVector {
        &self.w
    }

    pub fn x(&self) -> &CMatrix {
        &self.x
    }
}

impl TryFrom<MotionElementJson> for MotionElement {
    type Error = Error;

    fn try_from(j: MotionElementJson) -> Result<Self> {
        check_dim(j.n, j.w.len())?;
        check_dim(j.n, j.x.len())?;
        for row in &j.x {
            check_dim(j.n, row.len())?;
        }
        let w = CVector::from_iterator(j.n, j.w.iter().map(|[r, im]| Complex64::new(*r, *im)));
        let x = CMatrix::from_fn(j.n, j.n, |r, c| Complex64::new(j.x[r][c][0], j.x[r][c][1]));
        MotionElement::new(w, x)
    }
}

impl From<MotionElement> for MotionElementJson {
    fn from(e: MotionElement) -> Self {
        Self {
            n: e.n,
            w: e.w.iter().map(|z| [z.re, z.im]).collect(),
            x: (0..e.n)
                .map(|r| (0..e.n).map(|c| [e.x[(r, c)].re, e.x[(r, c)].im]).collect())
                .collect(),
        }
    }
}

/// `gₙ` with its `u(n)` realization, for moving between matrices and coordinates.
#[derive(Debug, Clone)]
pub struct MotionAlgebra {
    n: usize,
    algebra: Arc<LieAlgebra>,
    un: MatrixRealization,
}

pub fn build_motion_algebra(n: usize) -> Result<LieAlgebra> {
    Ok(MotionAlgebra::new(n)?.algebra.as_ref().clone())
}

impl MotionAlgebra {
    pub fn new(n: usize) -> Result<Self> {
        let un = MatrixRealization::un(n)?;
        let rho: Vec<LinearMap> = un.basis().iter().map(|b| LinearMap::new(linalg::realify(b))).collect();
        let g = LieAlgebra::semidirect(2 * n, un.algebra(), &rho)?;
        let mut labels: Vec<String> = (1..=n)
            .flat_map(|k| [format!("re(w{k})"), format!("im(w{k})")])
            .collect();
        labels.extend(un.algebra().labels().iter().cloned());
        let g = g.with_labels(labels)?;
        Ok(Self {
            n,
            algebra: Arc::new(g),
            un,
        })
    }

    /// Recovers `n` from `dim gₙ = 2n + n²`.
    pub fn for_dim(dim: usize) -> Result<Self> {
        let n = ((dim + 1) as f64).sqrt().round() as usize - 1;
        if 2 * n + n * n != dim || n == 0 {
            return Err(Error::Domain(format!("dimension {dim} is not of the form 2n + n²")));
        }
        Self::new(n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn split(&self) -> SemidirectSplit {
        SemidirectSplit {
            v_dim: 2 * self.n,
            h_dim: self.n * self.n,
        }
    }

    pub fn to_coords(&self, e: &MotionElement) -> Result<DVector<f64>> {
        check_dim(self.n, e.n)?;
        Ok(self.coords_raw(&e.w, &e.x))
    }

    fn coords_raw(&self, w: &CVector, x: &CMatrix) -> DVector<f64> {
        let wv = complex_to_real(w);
        let xv = self.un.to_coords(x).expect("skew-Hermitian matrices lie in u(n)");
        let mut out = DVector::zeros(2 * self.n + self.n * self.n);
        out.rows_mut(0, 2 * self.n).copy_from(&wv);
        out.rows_mut(2 * self.n, self.n * self.n).copy_from(&xv);
        out
    }

    pub fn element(&self, coords: &DVector<f64>) -> Result<MotionElement> {
        check_dim(self.algebra.dim(), coords.len())?;
        let (w, x) = self.split_raw(coords);
        MotionElement::new(w, x)
    }

    fn split_raw(&self, coords: &DVector<f64>) -> (CVector, CMatrix) {
        let m = 2 * self.n;
        let w = real_to_complex(&coords.as_slice()[..m]);
        let x = self.un.from_coords_raw(&coords.rows(m, self.n * self.n).into_owned());
        (w, x)
    }

    /// Coordinates of `i·1`.
    fn i_identity(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.n * self.n);
        x.rows_mut(0, self.n).fill(1.0);
        x
    }
}

/// `P_v(w) = i⟨w, v⟩/⟨v, v⟩ v`, i.e. the matrix `i v v* / (v* v)`.
pub fn projector(v: &CVector) -> Result<CMatrix> {
    let nv = v.norm_squared();
    if nv == 0.0 {
        return Err(Error::Domain("projector of the zero vector".into()));
    }
    Ok(v * v.adjoint() * (i() / nv))
}

/// Eigen-data of a skew-Hermitian `X`: `X v_j = iλ_j v_j`.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<CVector>,
    /// Number of eigenvalues above the zero cutoff; they come first.
    pub l: usize,
}

impl Serialize for SpectralData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        json!({
            "eigenvalues": self.eigenvalues,
            "eigenvectors": self.eigenvectors.iter().map(complex_json).collect::<Vec<_>>(),
            "l": self.l,
        })
        .serialize(s)
    }
}

fn phase_normalized(mut v: CVector) -> CVector {
    let scale = v.norm();
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12 * scale).copied() {
        v *= z.conj() / z.norm();
    }
    v
}

fn lex_key(v: &CVector) -> Vec<f64> {
    complex_to_real(v).iter().copied().collect()
}

pub fn spectral_data(x: &CMatrix) -> Result<SpectralData> {
    require_skew(x)?;
    let n = x.nrows();
    let h = x * (-i());
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let (values, vectors) = linalg::hermitian_eigen(&h);
    let mut pairs: Vec<(f64, CVector)> = (0..n)
        .map(|k| (values[k], phase_normalized(vectors.column(k).into_owned())))
        .collect();
    pairs.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
    let top = pairs.first().map_or(0.0, |p| p.0.abs());
    // Deterministic tie-break inside clusters of equal |λ|.
    let tie = 1e-12 * (1.0 + top);
    let mut start = 0;
    while start < pairs.len() {
        let head = pairs[start].0.abs();
        let mut end = start + 1;
        while end < pairs.len() && head - pairs[end].0.abs() <= tie {
            end += 1;
        }
        pairs[start..end].sort_by(|a, b| {
            b.0.total_cmp(&a.0).then_with(|| {
                let (ka, kb) = (lex_key(&a.1), lex_key(&b.1));
                kb.iter()
                    .zip(&ka)
                    .map(|(y, x)| y.total_cmp(x))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        start = end;
    }
    let l = pairs.iter().filter(|p| p.0.abs() > EIGEN_CUTOFF * top).count();
    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(SpectralData {
        eigenvalues,
        eigenvectors,
        l,
    })
}

impl SpectralData {
    /// `‖Σ_j P_{v_j} - i·1‖`.
    pub fn projector_sum_residual(&self) -> f64 {
        let n = self.eigenvectors.len();
        let sum = self
            .eigenvectors
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, v| acc + projector(v).expect("eigenvectors are nonzero"));
        complex_matrix_norm(&(sum - CMatrix::identity(n, n) * i()))
    }

    /// `max_j ‖X v_j - iλ_j v_j‖`.
    pub fn eigen_residual(&self, x: &CMatrix) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(l, v)| (x * v - v * (i() * *l)).norm())
            .fold(0.0, f64::max)
    }

    /// `max |⟨v_j, v_k⟩ - δ_jk|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (a, u) in self.eigenvectors.iter().enumerate() {
            for (b, v) in self.eigenvectors.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((hermitian_inner(u, v) - target).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Reconstruction {
    pub value: f64,
    pub spectral: SpectralData,
}

/// `Σ_{j ≤ l} λ_j f(P_{v_j} w / λ_j)`.
pub fn reconstruct(f: &FrameFunction, elem: &MotionElement) -> Result<Reconstruction> {
    check_dim(f.n(), elem.n)?;
    let spectral = spectral_data(&elem.x)?;
    let value = reconstruct_with_spectrum(f, &elem.w, &spectral)?;
    Ok(Reconstruction { value, spectral })
}

/// The reconstruction sum for a caller-supplied eigenbasis.
pub fn reconstruct_with_spectrum(f: &FrameFunction, w: &CVector, spectral: &SpectralData) -> Result<f64> {
    if f.n() < 2 {
        return Err(Error::Domain("reconstruction needs n ≥ 2".into()));
    }
    check_dim(f.n(), w.len())?;
    let mut total = 0.0;
    for (lambda, v) in spectral.eigenvalues.iter().zip(&spectral.eigenvectors).take(spectral.l) {
        let pw = projector(v)? * w / Complex64::new(*lambda, 0.0);
        total += lambda * f.eval(&pw)?;
    }
    Ok(total)
}

fn motion_for(zeta: &QuasiState) -> Result<MotionAlgebra> {
    let m = MotionAlgebra::for_dim(zeta.algebra().dim())?;
    if m.n < 2 {
        return Err(Error::Domain("need n ≥ 2".into()));
    }
    Ok(m)
}

/// Checks `ζ(v, 0) = ζ(0, X) = 0` on samples.
pub fn check_normalized(zeta: &QuasiState) -> Result<f64> {
    let m = MotionAlgebra::for_dim(zeta.algebra().dim())?;
    let dim = m.algebra.dim();
    let split = 2 * m.n;
    let mut rng = sampling::rng(NORMALIZED_SEED);
    let mut worst = 0.0_f64;
    for k in 0..NORMALIZED_SAMPLES {
        let r = sampling::choose(&mut rng, &SAMPLE_RADII);
        let mut x = sampling::sphere_point(&mut rng, dim, r);
        if k % 2 == 0 {
            x.rows_mut(split, dim - split).fill(0.0);
        } else {
            x.rows_mut(0, split).fill(0.0);
        }
        let v = zeta.eval(&x)?.abs() / (1.0 + x.norm());
        worst = if v.is_nan() { f64::INFINITY } else { worst.max(v) };
    }
    Ok(worst)
}

/// `f_ζ(w) = ζ(-iw, i·1)` for a normalized `ζ` on `gₙ`.
pub fn extract_frame_function(zeta0: &QuasiState) -> Result<FrameFunction> {
    let m = motion_for(zeta0)?;
    let defect = check_normalized(zeta0)?;
    if defect > NORMALIZED_TOL {
        return Err(Error::Validation(format!(
            "quasi-state is not normalized (|ζ(v,0)| or |ζ(0,X)| up to {defect:e})"
        )));
    }
    let eval = zeta0.evaluator();
    let n = m.n;
    let tail = m.i_identity();
    Ok(FrameFunction::custom(
        n,
        GrowthClass::Unknown,
        json!({ "extracted_from": zeta0.describe() }),
        move |w| {
            let mut x = DVector::zeros(2 * n + n * n);
            x.rows_mut(0, 2 * n).copy_from(&complex_to_real(&(w * -i())));
            x.rows_mut(2 * n, n * n).copy_from(&tail);
            eval(&x)
        },
    ))
}

/// `|f(w) - ζ(-iw, P_w)|` for nonzero `w`.
pub fn eq_projector_residual(zeta0: &QuasiState, f: &FrameFunction, w: &CVector) -> Result<f64> {
    let m = motion_for(zeta0)?;
    check_dim(m.n, w.len())?;
    let x = m.coords_raw(&(w * -i()), &projector(w)?);
    Ok((f.eval(w)? - zeta0.eval(&x)?).abs())
}

/// `ζ(w, X) = iλ·tr X`, real because `tr X ∈ iℝ`.
pub fn motion_ad_quasistate(n: usize, lambda: f64) -> Result<QuasiState> {
    let m = MotionAlgebra::new(n)?;
    let offset = 2 * n;
    Ok(QuasiState::new(
        m.algebra.clone(),
        Family::MotionAd,
        json!({ "n": n, "lambda": lambda }),
        // tr X = i Σ_k x_{d_k} in realization coordinates.
        move |x| -lambda * x.rows(offset, n).sum(),
    ))
}

/// Pseudo-inverse of `H = -iX` with the spectral zero cutoff.
fn hermitian_pinv(x: &CMatrix) -> CMatrix {
    let h = x * (-i());
    let top = linalg::complex_svd(&h).1.iter().copied().fold(0.0, f64::max);
    linalg::complex_pseudo_inverse(&h, EIGEN_CUTOFF * top)
}

/// `ζ(w, X) = ⟨H⁺w, w⟩` with `H = -iX`: a normalized (discontinuous)
/// quasi-state whose frame function is `‖·‖²`.
pub fn pinv_quadratic_quasistate(n: usize) -> Result<QuasiState> {
    let m = MotionAlgebra::new(n)?;
    let g = m.algebra.clone();
    Ok(QuasiState::new(g, Family::Custom, json!({ "name": "pinv_quadratic", "n": n }), move |x| {
        let (w, xm) = m.split_raw(x);
        hermitian_inner(&(hermitian_pinv(&xm) * &w), &w).re
    }))
}

/// `ζ(w, X) = Re⟨iΠw, a⟩` with `Π` the orthogonal projection onto the range of
/// `X`: a normalized (discontinuous) quasi-state whose frame function is `Re⟨·, a⟩`.
pub fn range_linear_quasistate(a: CVector) -> Result<QuasiState> {
    let m = MotionAlgebra::new(a.len())?;
    let g = m.algebra.clone();
    let params = json!({ "name": "range_linear", "a": complex_json(&a) });
    Ok(QuasiState::new(g, Family::Custom, params, move |x| {
        let (w, xm) = m.split_raw(x);
        let h = &xm * (-i());
        let pi = &h * hermitian_pinv(&xm);
        hermitian_inner(&(pi * w * i()), &a).re
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct NoMixedReport {
    #[serde(flatten)]
    pub report: VerificationReport,
    pub quasistate_check: VerificationReport,
    /// Growth profile of the frame function of `ζ₀`.
    pub profile: SublinearityProfile,
    pub applicable: bool,
    pub alpha_coeffs: Vec<f64>,
    pub note: Option<String>,
}

impl NoMixedReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Splits `ζ = ζ₀ + α + ψ` and checks that the normalized part vanishes.
pub fn no_mixed_decomposition_check(zeta: &QuasiState, samples: usize, seed: u64) -> Result<NoMixedReport> {
    let m = motion_for(zeta)?;
    if samples == 0 {
        return Err(Error::Domain("samples must be at least 1".into()));
    }
    let dec = decompose(zeta, m.split())?;
    let quasistate_check = check_quasistate(zeta, samples, seed)?;
    let n = m.n;
    let zeta0 = dec.zeta0.evaluator();
    let tail = m.i_identity();
    let f = |wr: &DVector<f64>| {
        let w = real_to_complex(wr.as_slice());
        let mut x = DVector::zeros(2 * n + n * n);
        x.rows_mut(0, 2 * n).copy_from(&complex_to_real(&(w * -i())));
        x.rows_mut(2 * n, n * n).copy_from(&tail);
        zeta0(&x)
    };
    let profile = sublinearity_profile(&f, 2 * n, PROFILE_DIRECTIONS, &geometric_radii(4, 1.0, 10.0), seed)?;
    let applicable = quasistate_check.passed() && profile.consistent;

    let mut rng = sampling::rng(seed);
    let mut builder = ReportBuilder::new(seed, NO_MIXED_TOL);
    let dim = m.algebra.dim();
    for _ in 0..samples {
        let r = sampling::choose(&mut rng, &SAMPLE_RADII);
        let x = sampling::sphere_point(&mut rng, dim, r);
        let value = zeta0(&x);
        builder.record(value.abs() / (1.0 + x.norm()), || json!({ "x": vec_json(&x), "zeta0": value }));
    }
    let report = builder.finish();
    let note = match (report.passed(), applicable) {
        (true, _) => None,
        (false, true) => Some(
            "theorem-contradiction candidate: nonzero normalized part with sublinear frame function; inspect input".into(),
        ),
        (false, false) => Some(
            "normalized part is nonzero, but the input is outside the continuous sublinear setting".into(),
        ),
    };
    Ok(NoMixedReport {
        report,
        quasistate_check,
        profile,
        applicable,
        alpha_coeffs: dec.alpha_coeffs.iter().copied().collect(),
        note,
    })
}

/// Extracted frame function together with its frame-identity report.
pub fn extract_and_check(zeta0: &QuasiState, samples: usize, seed: u64) -> Result<(FrameFunction, VerificationReport)> {
    let f = extract_frame_function(zeta0)?;
    let report = check_frame_identity(&f, samples, seed)?;
    Ok((f, report))
}

/// Random skew-Hermitian `n x n` matrix with Frobenius norm `radius`.
pub fn random_skew_hermitian(rng: &mut impl rand::Rng, n: usize, radius: f64) -> CMatrix {
    let real = MatrixRealization::un(n).expect("n ≥ 1");
    let x = sampling::sphere_point(rng, n * n, 1.0);
    let m = real.from_coords_raw(&x);
    let norm = complex_matrix_norm(&m);
    m * Complex64::new(radius / norm, 0.0)
}

pub fn random_element(rng: &mut impl rand::Rng, n: usize, radius: f64) -> MotionElement {
    let w = frame::random_complex(rng, n, radius);
    let x = random_skew_hermitian(rng, n, radius);
    MotionElement::new(w, x).expect("constructed skew-Hermitian")
}
