//! Concrete reductive matrix algebras: type decomposition of elements, the
//! Ad-invariant quasi-state `ζ(X) = λ·θ(Y_c)` and its vanishing arguments.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{check_dim, Error, Result};
use crate::linalg;
use crate::quasistate::{Family, QuasiState, ReportBuilder, VerificationReport};
use crate::realization::{CMatrix, MatrixRealization};
use crate::sampling;

/// Relative cutoff on `det X` separating elliptic / hyperbolic / nilpotent in sl2.
pub const DET_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgebraKind {
    #[serde(rename = "sl2R")]
    Sl2R,
    Su2,
    Un(usize),
}

impl AlgebraKind {
    pub fn matrix_size(&self) -> usize {
        match self {
            AlgebraKind::Sl2R | AlgebraKind::Su2 => 2,
            AlgebraKind::Un(n) => *n,
        }
    }

    pub fn realization(&self) -> Result<MatrixRealization> {
        match self {
            AlgebraKind::Sl2R => Ok(MatrixRealization::sl2()),
            AlgebraKind::Su2 => Ok(MatrixRealization::su2()),
            AlgebraKind::Un(n) => MatrixRealization::un(*n),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatrixAlgebraElement {
    kind: AlgebraKind,
    matrix: CMatrix,
}

impl MatrixAlgebraElement {
    pub fn new(kind: AlgebraKind, matrix: CMatrix) -> Result<Self> {
        let n = kind.matrix_size();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows(),
            });
        }
        let norm = linalg::complex_matrix_norm(&matrix);
        match kind {
            AlgebraKind::Sl2R => {
                let imag = matrix.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
                let tr = matrix.trace().re;
                if imag > 0.0 || tr.abs() > 1e-12 * (1.0 + norm) {
                    return Err(Error::Validation("sl2R elements are real and traceless".into()));
                }
            }
            AlgebraKind::Su2 | AlgebraKind::Un(_) => {
                let skew = linalg::complex_matrix_norm(&(&matrix + matrix.adjoint()));
                if skew > 1e-12 * norm {
                    return Err(Error::Validation("element is not skew-Hermitian".into()));
                }
                if kind == AlgebraKind::Su2 && matrix.trace().norm() > 1e-12 * (1.0 + norm) {
                    return Err(Error::Validation("su2 elements are traceless".into()));
                }
            }
        }
        Ok(Self { kind, matrix })
    }

    pub fn real(kind: AlgebraKind, m: &DMatrix<f64>) -> Result<Self> {
        Self::new(kind, m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementType {
    Zero,
    Elliptic,
    Hyperbolic,
    Nilpotent,
    Compact,
}

#[derive(Debug, Clone)]
pub struct JordanParts {
    pub element_type: ElementType,
    pub xc: CMatrix,
    pub xk: CMatrix,
    pub xa: CMatrix,
    pub xn: CMatrix,
    pub yc: CMatrix,
}

fn real_entries(m: &CMatrix) -> DMatrix<f64> {
    m.map(|z| z.re)
}

fn sl2_type(x: &DMatrix<f64>) -> ElementType {
    let norm2 = x.norm_squared();
    if norm2 == 0.0 {
        return ElementType::Zero;
    }
    let det = x.determinant();
    if det > DET_CUTOFF * norm2 {
        ElementType::Elliptic
    } else if det < -DET_CUTOFF * norm2 {
        ElementType::Hyperbolic
    } else {
        ElementType::Nilpotent
    }
}

pub fn jordan_parts(x: &MatrixAlgebraElement) -> JordanParts {
    let n = x.kind.matrix_size();
    let zero = CMatrix::zeros(n, n);
    let m = x.matrix.clone();
    match x.kind {
        AlgebraKind::Sl2R => {
            let t = sl2_type(&real_entries(&m));
            let mut parts = JordanParts {
                element_type: t,
                xc: zero.clone(),
                xk: zero.clone(),
                xa: zero.clone(),
                xn: zero.clone(),
                yc: zero,
            };
            match t {
                ElementType::Elliptic => {
                    parts.xc = m.clone();
                    parts.yc = m;
                }
                ElementType::Hyperbolic => parts.xa = m,
                ElementType::Nilpotent => parts.xn = m,
                ElementType::Zero | ElementType::Compact => {}
            }
            parts
        }
        AlgebraKind::Su2 => JordanParts {
            element_type: if m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                ElementType::Zero
            } else {
                ElementType::Compact
            },
            xc: zero.clone(),
            xk: m,
            xa: zero.clone(),
            xn: zero.clone(),
            yc: zero,
        },
        AlgebraKind::Un(n) => {
            let xc = CMatrix::identity(n, n) * (m.trace() / Complex64::new(n as f64, 0.0));
            let xk = &m - &xc;
            JordanParts {
                element_type: if m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                    ElementType::Zero
                } else {
                    ElementType::Compact
                },
                yc: xc.clone(),
                xc,
                xk,
                xa: zero.clone(),
                xn: zero,
            }
        }
    }
}

/// Signed elliptic angle with `θ(θ₀ J) = θ₀` for `J = [[0,-1],[1,0]]`; zero off
/// the elliptic cone.
pub fn sl2_theta(x: &DMatrix<f64>) -> f64 {
    match sl2_type(x) {
        ElementType::Elliptic => {
            let sign = (x[(1, 0)] - x[(0, 1)]).signum();
            sign * x.determinant().sqrt()
        }
        _ => 0.0,
    }
}

/// The Ad-invariant quasi-state on the given algebra, in realization coordinates.
pub fn gw_quasistate(kind: AlgebraKind, lambda: f64) -> Result<QuasiState> {
    let real = kind.realization()?;
    let algebra = real.algebra().clone();
    let params = json!({ "algebra_kind": kind, "lambda": lambda });
    let qs = match kind {
        AlgebraKind::Sl2R => QuasiState::new(algebra, Family::GwReductive, params, move |x| {
            lambda * sl2_theta(&real_entries(&real.from_coords_raw(x)))
        }),
        AlgebraKind::Su2 => QuasiState::new(algebra, Family::GwReductive, params, |_| 0.0),
        AlgebraKind::Un(_) => QuasiState::new(algebra, Family::GwReductive, params, move |x| {
            lambda * real.from_coords_raw(x).trace().im
        }),
    };
    Ok(qs)
}

/// Evaluate `zeta` (on the realization of `x.kind()`) at a matrix element.
pub fn eval_at_matrix(zeta: &QuasiState, x: &MatrixAlgebraElement) -> Result<f64> {
    let real = x.kind.realization()?;
    check_dim(real.algebra().dim(), zeta.algebra().dim())?;
    zeta.eval(&real.to_coords(&x.matrix)?)
}

/// `g` with `g x g⁻¹ = 2x` for nonzero nilpotent `x ∈ sl2(R)`.
pub fn nilpotent_doubling_conjugator(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.nrows() != 2 || x.ncols() != 2 {
        return Err(Error::Domain("expected a 2x2 matrix".into()));
    }
    let norm2 = x.norm_squared();
    if norm2 == 0.0 {
        return Err(Error::Domain("x must be nonzero".into()));
    }
    if x.trace().abs() > 1e-10 * norm2.sqrt() || x.determinant().abs() > DET_CUTOFF * norm2 {
        return Err(Error::Domain("x is not nilpotent".into()));
    }
    // Columns (h1, h2) with x h2 = h1 and x h1 = 0, so h⁻¹ x h = E12.
    let c0 = x.column(0).norm();
    let c1 = x.column(1).norm();
    let h2 = if c1 >= c0 {
        DVector::from_vec(vec![0.0, 1.0])
    } else {
        DVector::from_vec(vec![1.0, 0.0])
    };
    let h1 = x * &h2;
    let mut h = DMatrix::zeros(2, 2);
    h.set_column(0, &h1);
    h.set_column(1, &h2);
    let h_inv = h
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("x is not nilpotent".into()))?;
    let d = DMatrix::from_diagonal(&DVector::from_vec(vec![2f64.sqrt(), 1.0 / 2f64.sqrt()]));
    Ok(h * d * h_inv)
}

pub const WEYL_TOL: f64 = 1e-8;

/// Checks `ζ(diag(t, -t)) = 0` on sampled `t`; the Weyl flip
/// `k = [[0,1],[-1,0]]` and the antisymmetry partner are reported alongside.
pub fn weyl_vanishing_check(zeta: &QuasiState, samples: usize, seed: u64) -> Result<VerificationReport> {
    if samples == 0 {
        return Err(Error::Domain("samples must be at least 1".into()));
    }
    let real = MatrixRealization::sl2();
    check_dim(real.algebra().dim(), zeta.algebra().dim())?;
    let k = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let k_inv = k.transpose();
    let mut rng = sampling::rng(seed);
    let mut report = ReportBuilder::new(seed, WEYL_TOL);
    for _ in 0..samples {
        let t = sampling::uniform(&mut rng, -10.0, 10.0);
        let a = DMatrix::from_row_slice(2, 2, &[t, 0.0, 0.0, -t]);
        let flipped = &k * &a * &k_inv;
        let coords = |m: &DMatrix<f64>| real.to_coords(&m.map(|x| Complex64::new(x, 0.0)));
        let za = zeta.eval(&coords(&a)?)?;
        let zneg = zeta.eval(&coords(&(-&a))?)?;
        let zflip = zeta.eval(&coords(&flipped)?)?;
        let residual = za.abs() / (1.0 + t.abs());
        report.record(residual, || {
            json!({ "t": t, "zeta_diag": za, "zeta_neg_diag": zneg, "zeta_weyl_flip": zflip })
        });
    }
    Ok(report.finish())
}
