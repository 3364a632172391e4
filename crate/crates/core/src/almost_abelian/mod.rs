//! Almost-abelian algebras `g_φ = V ⋊ ℝ`: the ζ_{α,c} family, the
//! Ad-invariance criterion, rigidity with Heisenberg witnesses and the
//! three-dimensional classification.

mod classify;
mod rigidity;
mod sublinear;

pub use classify::{classify_3d, table_phi, Class3d, TableFamily};
pub use rigidity::{decide_rigidity, heisenberg_identification, InvariantSplitting, RigidityVerdict, Witness, WitnessStep};
pub use sublinear::{SublinearFunction, SublinearKind};

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{check_dim, Error, Result};
use crate::lie::{LieAlgebra, LinearMap};
use crate::linalg;
use crate::quasistate::{Family, QuasiState};
use crate::sampling;

/// The pair `(V, φ)` with cached rank data.
#[derive(Debug, Clone)]
pub struct AlmostAbelianSpec {
    phi: LinearMap,
    sigma_max: f64,
    rank_phi: usize,
    rank_phi2: usize,
    /// Orthonormal, sign-normalized basis of `W = im φ`; defines W-coordinates.
    w_basis: DMatrix<f64>,
    im_phi2: DMatrix<f64>,
    ker_phi: DMatrix<f64>,
}

/// JSON form `{"V_dim": n, "matrix": [[...]]}` (rows).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiJson {
    #[serde(rename = "V_dim")]
    pub v_dim: usize,
    pub matrix: Vec<Vec<f64>>,
}

impl AlmostAbelianSpec {
    pub fn new(phi: LinearMap) -> Result<Self> {
        let n = phi.source_dim();
        check_dim(n, phi.target_dim())?;
        if n == 0 {
            return Err(Error::Validation("V must be at least one-dimensional".into()));
        }
        let m = phi.matrix();
        let sigma_max = linalg::spectral_norm(m);
        let phi2 = m * m;
        let reference = if sigma_max > 0.0 { Some(sigma_max * sigma_max) } else { None };
        let rank_phi = linalg::rank(m);
        let rank_phi2 = if sigma_max > 0.0 {
            linalg::rank_with_reference(&phi2, reference)
        } else {
            0
        };
        let w_basis = linalg::image(m);
        let im_phi2 = if sigma_max > 0.0 {
            linalg::image_with_reference(&phi2, reference)
        } else {
            DMatrix::zeros(n, 0)
        };
        let ker_phi = linalg::nullspace(m);
        let spec = Self {
            phi,
            sigma_max,
            rank_phi,
            rank_phi2,
            w_basis,
            im_phi2,
            ker_phi,
        };
        let containment = linalg::containment_residual(&spec.im_phi2, &spec.w_basis);
        if spec.rank_phi2 > spec.rank_phi || containment > 1e-9 {
            return Err(Error::Validation(format!(
                "inconsistent rank data: rank φ = {}, rank φ² = {}, containment residual {containment:e}",
                spec.rank_phi, spec.rank_phi2
            )));
        }
        Ok(spec)
    }

    pub fn from_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(LinearMap::from_rows(rows)?)
    }

    pub fn from_json(json: &PhiJson) -> Result<Self> {
        check_dim(json.v_dim, json.matrix.len())?;
        let spec = Self::from_matrix(&json.matrix)?;
        check_dim(json.v_dim, spec.v_dim())?;
        Ok(spec)
    }

    pub fn to_json(&self) -> PhiJson {
        PhiJson {
            v_dim: self.v_dim(),
            matrix: self.phi.rows(),
        }
    }

    pub fn v_dim(&self) -> usize {
        self.phi.source_dim()
    }

    pub fn phi(&self) -> &LinearMap {
        &self.phi
    }

    pub fn phi_norm(&self) -> f64 {
        self.sigma_max
    }

    pub fn rank_phi(&self) -> usize {
        self.rank_phi
    }

    pub fn rank_phi2(&self) -> usize {
        self.rank_phi2
    }

    pub fn w_dim(&self) -> usize {
        self.w_basis.ncols()
    }

    pub fn w_basis(&self) -> &DMatrix<f64> {
        &self.w_basis
    }

    pub fn im_phi2_basis(&self) -> &DMatrix<f64> {
        &self.im_phi2
    }

    pub fn ker_phi_basis(&self) -> &DMatrix<f64> {
        &self.ker_phi
    }

    /// W-coordinates of a vector of `V` (orthogonal projection onto `W`).
    pub fn w_coords(&self, v: &DVector<f64>) -> DVector<f64> {
        self.w_basis.transpose() * v
    }

    /// Orthonormal basis of `im φ²` in W-coordinates.
    pub fn im_phi2_in_w(&self) -> DMatrix<f64> {
        self.w_basis.transpose() * &self.im_phi2
    }

    /// Orthonormal complement of `im φ²` inside `W`, in W-coordinates.
    pub fn quotient_complement(&self) -> DMatrix<f64> {
        let inner = self.im_phi2_in_w();
        if self.w_dim() == 0 {
            return DMatrix::zeros(0, 0);
        }
        linalg::orthogonal_complement(&inner, self.w_dim())
    }

    /// A random functional on `V` annihilating `im φ`.
    pub fn random_annihilator(&self, rng: &mut sampling::SeededRng) -> DVector<f64> {
        let g = sampling::gaussian_vector(rng, self.v_dim());
        let proj = &self.w_basis * (self.w_basis.transpose() * &g);
        g - proj
    }
}

/// `g_φ` on the basis `(v1, ..., vn, t)` with `[t, v] = φ(v)`.
pub fn build_g_phi(spec: &AlmostAbelianSpec) -> LieAlgebra {
    let line = LieAlgebra::abelian(1)
        .with_labels(vec!["t".into()])
        .expect("one label");
    LieAlgebra::semidirect(spec.v_dim(), &line, std::slice::from_ref(&spec.phi))
        .expect("a single endomorphism is always a representation of ℝ")
}

/// `ζ(v, t) = (c(φ(v)/t) + c0)·t + α(v)` for `t ≠ 0`, and `α(v)` at `t = 0`.
pub fn zeta_alpha_c(
    spec: &AlmostAbelianSpec,
    alpha: &DVector<f64>,
    c: &SublinearFunction,
    c0: f64,
) -> Result<QuasiState> {
    check_dim(spec.v_dim(), alpha.len())?;
    check_dim(spec.w_dim(), c.dim())?;
    let c_at_zero = c.eval(&DVector::zeros(c.dim()));
    if c_at_zero != 0.0 {
        return Err(Error::Validation(format!("c(0) must vanish, got {c_at_zero}")));
    }
    let n = spec.v_dim();
    let w_phi = spec.w_basis.transpose() * spec.phi.matrix();
    let alpha_c = alpha.clone();
    let cf = c.clone();
    let params = json!({
        "phi": spec.to_json(),
        "alpha": alpha.as_slice(),
        "c": c.describe(),
        "c0": c0,
    });
    Ok(QuasiState::new(
        Arc::new(build_g_phi(spec)),
        Family::ZetaAlphaC,
        params,
        move |x| {
            let v = x.rows(0, n);
            let t = x[n];
            let lin = alpha_c.dot(&v);
            if t == 0.0 {
                lin
            } else {
                let w = &w_phi * v / t;
                (cf.eval(&w) + c0) * t + lin
            }
        },
    ))
}

/// Outcome of the two-condition Ad-invariance test.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    /// `im φ ⊂ ker α`.
    pub condition_i: bool,
    /// `c` is invariant under translations by `im φ²`.
    pub condition_ii: bool,
    pub alpha_phi_norm: f64,
    /// True when (ii) was decided from the quotient-invariant structure.
    pub structural_ii: bool,
    pub ii_max_residual: f64,
}

const CRITERION_SAMPLES: usize = 256;
const CRITERION_SEED: u64 = 0xc0ffee;
const CRITERION_RADII: [f64; 3] = [0.1, 1.0, 10.0];

pub fn ad_invariance_criterion(
    spec: &AlmostAbelianSpec,
    alpha: &DVector<f64>,
    c: &SublinearFunction,
) -> Result<CriterionResult> {
    check_dim(spec.v_dim(), alpha.len())?;
    check_dim(spec.w_dim(), c.dim())?;
    let alpha_phi = spec.phi.matrix().transpose() * alpha;
    let alpha_phi_norm = alpha_phi.norm();
    let condition_i = alpha_phi_norm <= 1e-10 * alpha.norm() * spec.phi_norm();

    let b2 = spec.im_phi2_in_w();
    if let SublinearKind::QuotientInvariant { complement, .. } = c.kind() {
        let leak = if b2.ncols() == 0 || complement.ncols() == 0 {
            0.0
        } else {
            (complement.transpose() * &b2).amax()
        };
        if leak <= 1e-9 {
            return Ok(CriterionResult {
                condition_i,
                condition_ii: true,
                alpha_phi_norm,
                structural_ii: true,
                ii_max_residual: leak,
            });
        }
    }

    let phi2_w = spec.w_basis.transpose() * (spec.phi.matrix() * spec.phi.matrix());
    let mut rng = sampling::rng(CRITERION_SEED);
    let mut worst = 0.0_f64;
    let mut condition_ii = true;
    for _ in 0..CRITERION_SAMPLES {
        let rw = sampling::choose(&mut rng, &CRITERION_RADII);
        let ru = sampling::choose(&mut rng, &CRITERION_RADII);
        let w = sampling::sphere_point(&mut rng, spec.w_dim(), rw);
        let u = sampling::sphere_point(&mut rng, spec.v_dim(), ru);
        let cw = c.eval(&w);
        let shifted = c.eval(&(&w + &phi2_w * &u));
        let residual = (shifted - cw).abs() / (1.0 + cw.abs());
        worst = worst.max(residual);
        if !(residual <= 1e-8) {
            condition_ii = false;
        }
    }
    Ok(CriterionResult {
        condition_i,
        condition_ii,
        alpha_phi_norm,
        structural_ii: false,
        ii_max_residual: worst,
    })
}

/// `ζ(x, y, z) = c(y/x)·x + a·y` on the Heisenberg basis `(X, Y, Z)`.
pub fn heisenberg_quasistate(a: f64, c: &SublinearFunction) -> Result<QuasiState> {
    check_dim(1, c.dim())?;
    let c_at_zero = c.eval(&DVector::zeros(1));
    if c_at_zero != 0.0 {
        return Err(Error::Validation(format!("c(0) must vanish, got {c_at_zero}")));
    }
    let cf = c.clone();
    let params = json!({ "a": a, "c": c.describe() });
    Ok(QuasiState::new(
        Arc::new(LieAlgebra::heisenberg()),
        Family::Heisenberg,
        params,
        move |x| {
            let (xx, y) = (x[0], x[1]);
            if xx == 0.0 {
                a * y
            } else {
                cf.eval(&DVector::from_element(1, y / xx)) * xx + a * y
            }
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quasistate::{check_ad_invariance, check_quasistate, decompose};
    use std::f64::consts::PI;

    fn phi2() -> AlmostAbelianSpec {
        AlmostAbelianSpec::from_matrix(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap()
    }

    fn identity(n: usize) -> AlmostAbelianSpec {
        AlmostAbelianSpec::new(LinearMap::identity(n)).unwrap()
    }

    #[test]
    fn spec_rank_data() {
        let s = phi2();
        assert_eq!((s.rank_phi(), s.rank_phi2(), s.w_dim()), (1, 0, 1));
        assert_eq!(s.ker_phi_basis().ncols(), 1);
        let s = identity(3);
        assert_eq!((s.rank_phi(), s.rank_phi2()), (3, 3));
        let z = AlmostAbelianSpec::new(LinearMap::zeros(2, 2)).unwrap();
        assert_eq!((z.rank_phi(), z.rank_phi2(), z.w_dim()), (0, 0, 0));
        assert!(AlmostAbelianSpec::from_matrix(&[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn g_phi_examples() {
        assert!(build_g_phi(&AlmostAbelianSpec::new(LinearMap::zeros(3, 3)).unwrap()).is_abelian());
        let ax_b = build_g_phi(&identity(1));
        // [t, v1] = v1
        let b = ax_b.bracket(&ax_b.basis_vector(1), &ax_b.basis_vector(0)).unwrap();
        assert_eq!(b, ax_b.basis_vector(0));
        let h = build_g_phi(&phi2());
        assert_eq!(h.labels(), &["v1", "v2", "t"]);
        let b = h.bracket(&h.basis_vector(2), &h.basis_vector(1)).unwrap();
        assert_eq!(b, h.basis_vector(0));
    }

    #[test]
    fn ad_block_form_and_closed_form_exponential() {
        let phi = DMatrix::from_row_slice(2, 2, &[0.3, -1.0, 2.0, 0.5]);
        let spec = AlmostAbelianSpec::new(LinearMap::new(phi.clone())).unwrap();
        let g = build_g_phi(&spec);
        let w = DVector::from_vec(vec![0.7, -0.2]);
        let s = 0.8;
        let x = DVector::from_vec(vec![w[0], w[1], s]);
        let ad = g.ad(&x).unwrap();
        let phi_w = &phi * &w;
        let expected = DMatrix::from_row_slice(
            3,
            3,
            &[
                s * phi[(0, 0)], s * phi[(0, 1)], -phi_w[0],
                s * phi[(1, 0)], s * phi[(1, 1)], -phi_w[1],
                0.0, 0.0, 0.0,
            ],
        );
        assert!((ad.matrix() - expected).amax() < 1e-15);

        let v = DVector::from_vec(vec![1.1, 0.4]);
        let t = -1.3;
        let y = DVector::from_vec(vec![v[0], v[1], t]);
        let moved = g.exp_ad(&x).unwrap().apply(&y).unwrap();
        let e = (&phi * s).exp();
        let closed = &e * &v - (&e * &w - &w) * (t / s);
        assert!((moved.rows(0, 2) - closed).amax() < 1e-12);
        assert!((moved[2] - t).abs() < 1e-15);
    }

    #[test]
    fn zeta_examples() {
        let s = phi2();
        // α(yY + zZ) = a·y; in g_φ2 coordinates (v1 = Z, v2 = Y, t = X).
        let a = 0.75;
        let alpha = DVector::from_vec(vec![0.0, a]);
        let zeta = zeta_alpha_c(&s, &alpha, &SublinearFunction::arctan(1), 0.0).unwrap();
        let val = zeta.eval(&DVector::from_vec(vec![0.0, 1.0, 1.0])).unwrap();
        assert!((val - (PI / 4.0 + a)).abs() < 1e-15);

        let linear = zeta_alpha_c(&s, &alpha, &SublinearFunction::zero(1), 0.0).unwrap();
        let x = DVector::from_vec(vec![0.3, -2.0, 5.0]);
        assert_eq!(linear.eval(&x).unwrap(), alpha.dot(&x.rows(0, 2)));

        let odd = zeta_alpha_c(&s, &DVector::zeros(2), &SublinearFunction::arctan(1), 0.0).unwrap();
        let x = DVector::from_vec(vec![0.3, -2.0, 5.0]);
        assert!((odd.eval(&(-&x)).unwrap() + odd.eval(&x).unwrap()).abs() < 1e-15);

        let bad = zeta_alpha_c(&s, &alpha, &SublinearFunction::constant(1, 1.0), 0.0);
        assert!(matches!(bad, Err(Error::Validation(_))));
        let c0 = zeta_alpha_c(&s, &alpha, &SublinearFunction::zero(1), 2.5).unwrap();
        assert_eq!(c0.eval(&DVector::from_vec(vec![0.0, 0.0, 1.0])).unwrap(), 2.5);
    }

    #[test]
    fn zeta_on_h3_is_quasistate_and_ad_invariant() {
        let s = phi2();
        let alpha = DVector::from_vec(vec![0.0, 1.3]);
        let zeta = zeta_alpha_c(&s, &alpha, &SublinearFunction::arctan(1), 0.0).unwrap();
        assert!(check_quasistate(&zeta, 500, 1).unwrap().passed());
        assert!(check_ad_invariance(&zeta, 500, 1).unwrap().passed());
        let crit = ad_invariance_criterion(&s, &alpha, &SublinearFunction::arctan(1)).unwrap();
        assert!(crit.condition_i && crit.condition_ii);
    }

    #[test]
    fn identity_with_nonconstant_c_is_not_invariant() {
        let s = identity(2);
        let c = SublinearFunction::arctan(2);
        let zeta = zeta_alpha_c(&s, &DVector::zeros(2), &c, 0.0).unwrap();
        assert!(check_quasistate(&zeta, 300, 2).unwrap().passed());
        let crit = ad_invariance_criterion(&s, &DVector::zeros(2), &c).unwrap();
        assert!(crit.condition_i && !crit.condition_ii);
        let report = check_ad_invariance(&zeta, 300, 2).unwrap();
        assert!(!report.passed());
        assert!(report.worst_case.get("g").is_some());
    }

    #[test]
    fn criterion_condition_i_violation() {
        let s = phi2();
        let alpha = DVector::from_vec(vec![1.0, 0.0]);
        let crit = ad_invariance_criterion(&s, &alpha, &SublinearFunction::zero(1)).unwrap();
        assert!(!crit.condition_i && crit.condition_ii);
    }

    #[test]
    fn quotient_invariant_is_structural() {
        let s = AlmostAbelianSpec::from_matrix(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        let q = s.quotient_complement();
        assert_eq!(q.ncols(), 1);
        let c = SublinearFunction::quotient_invariant(q, SublinearFunction::arctan(1)).unwrap();
        let crit = ad_invariance_criterion(&s, &DVector::zeros(3), &c).unwrap();
        assert!(crit.structural_ii && crit.condition_ii);
        let generic = SublinearFunction::bounded_smooth(DVector::from_vec(vec![1.0, 1.0]));
        let crit = ad_invariance_criterion(&s, &DVector::zeros(3), &generic).unwrap();
        assert!(!crit.condition_ii);
    }

    #[test]
    fn continuity_at_t_zero() {
        let spec = AlmostAbelianSpec::from_matrix(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let alpha = DVector::from_vec(vec![0.4, -0.9]);
        let v = DVector::from_vec(vec![1.5, 2.0]);
        for c in [
            SublinearFunction::arctan(2),
            SublinearFunction::power(2, 0.5, 1.0).unwrap(),
            SublinearFunction::radial_log(2, 1.0),
        ] {
            let zeta = zeta_alpha_c(&spec, &alpha, &c, 0.0).unwrap();
            let base = alpha.dot(&v);
            let gaps: Vec<f64> = (1..=6)
                .map(|k| {
                    let t = 10f64.powi(-k);
                    let x = DVector::from_vec(vec![v[0], v[1], t]);
                    (zeta.eval(&x).unwrap() - base).abs()
                })
                .collect();
            assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{c:?}: {gaps:?}");
            assert!(gaps[5] < 1e-2);
        }
    }

    #[test]
    fn decompose_zeta_alpha_c() {
        let s = identity(2);
        let alpha = DVector::from_vec(vec![1.0, 2.0]);
        let c = SublinearFunction::power(2, 0.5, 1.0).unwrap();
        let zeta = zeta_alpha_c(&s, &alpha, &c, 0.0).unwrap();
        let split = zeta.algebra().semidirect_split().unwrap();
        let d = decompose(&zeta, split).unwrap();
        assert!((d.alpha_coeffs.clone() - &alpha).amax() < 1e-15);
        let bare = zeta_alpha_c(&s, &DVector::zeros(2), &c, 0.0).unwrap();
        let x = DVector::from_vec(vec![0.5, -1.0, 2.0]);
        assert!((d.zeta0.eval(&x).unwrap() - bare.eval(&x).unwrap()).abs() < 1e-14);
        assert_eq!(d.psi.eval(&DVector::from_vec(vec![3.0])).unwrap(), 0.0);

        let beta = DVector::from_vec(vec![-0.5, 4.0]);
        let shifted = zeta_alpha_c(&s, &(&alpha + &beta), &c, 0.0).unwrap();
        let d2 = decompose(&shifted, split).unwrap();
        assert!((d2.alpha_coeffs - (&alpha + &beta)).amax() < 1e-14);
        assert!((d2.zeta0.eval(&x).unwrap() - d.zeta0.eval(&x).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn heisenberg_family() {
        let z = heisenberg_quasistate(2.0, &SublinearFunction::zero(1)).unwrap();
        assert_eq!(z.eval(&DVector::from_vec(vec![3.0, 1.5, -7.0])).unwrap(), 3.0);
        let at = heisenberg_quasistate(0.0, &SublinearFunction::arctan(1)).unwrap();
        let v = at.eval(&DVector::from_vec(vec![2.0, 2.0, 5.0])).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-15);
        let v2 = at.eval(&DVector::from_vec(vec![2.0, 2.0, -11.0])).unwrap();
        assert_eq!(v, v2);
        let q = heisenberg_quasistate(-0.7, &SublinearFunction::power(1, 0.5, 1.0).unwrap()).unwrap();
        assert!(check_quasistate(&q, 500, 8).unwrap().passed());
        assert!(check_ad_invariance(&q, 500, 8).unwrap().passed());
    }
}
