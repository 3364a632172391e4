//! JSON input schemas and their conversion into core objects.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qslab_core::almost_abelian::{
    build_g_phi, heisenberg_quasistate, zeta_alpha_c, AlmostAbelianSpec, PhiJson, SublinearFunction,
};
use qslab_core::frame::{CVector, FrameFunction};
use qslab_core::lie::AlgebraJson;
use qslab_core::motion::{motion_ad_quasistate, MotionAlgebra};
use qslab_core::quasistate::{pullback, QuasiState};
use qslab_core::realization::{CMatrix, MatrixRealization};
use qslab_core::reductive::{gw_quasistate, AlgebraKind};
use qslab_core::{Error, LieAlgebra, LinearMap, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AlgebraInput {
    Named {
        named: String,
        #[serde(default)]
        n: Option<usize>,
    },
    Phi {
        phi: PhiJson,
    },
    Brackets(AlgebraJson),
}

impl AlgebraInput {
    pub fn build(&self) -> Result<LieAlgebra> {
        match self {
            AlgebraInput::Named { named, n } => {
                let need_n = || n.ok_or_else(|| Error::Parse(format!("algebra '{named}' needs \"n\"")));
                match named.as_str() {
                    "sl2" => Ok(LieAlgebra::sl2()),
                    "su2" => Ok(LieAlgebra::su2()),
                    "heisenberg" => Ok(LieAlgebra::heisenberg()),
                    "abelian" => Ok(LieAlgebra::abelian(need_n()?)),
                    "un" => Ok(MatrixRealization::un(need_n()?)?.algebra().as_ref().clone()),
                    "motion" => Ok(MotionAlgebra::new(need_n()?)?.algebra().as_ref().clone()),
                    other => Err(Error::Parse(format!("unknown named algebra '{other}'"))),
                }
            }
            AlgebraInput::Phi { phi } => Ok(build_g_phi(&AlmostAbelianSpec::from_json(phi)?)),
            AlgebraInput::Brackets(json) => LieAlgebra::from_json(json),
        }
    }
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SublinearSpec {
    Zero {
        dim: usize,
    },
    BoundedSmooth {
        direction: Vec<f64>,
    },
    Arctan {
        dim: usize,
    },
    Power {
        dim: usize,
        p: f64,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    RadialLog {
        dim: usize,
        #[serde(default = "default_scale")]
        scale: f64,
    },
    /// Without `complement` (rows of `Q`), the complement of `im φ²` in `W`
    /// from the surrounding φ is used.
    QuotientInvariant {
        #[serde(default)]
        complement: Option<Vec<Vec<f64>>>,
        inner: Box<SublinearSpec>,
    },
}

fn matrix_from_rows(rows: &[Vec<f64>], ncols_if_empty: usize) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Ok(DMatrix::zeros(0, ncols_if_empty));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

impl SublinearSpec {
    pub fn build(&self, default_complement: Option<&DMatrix<f64>>) -> Result<SublinearFunction> {
        Ok(match self {
            SublinearSpec::Zero { dim } => SublinearFunction::zero(*dim),
            SublinearSpec::BoundedSmooth { direction } => {
                SublinearFunction::bounded_smooth(DVector::from_vec(direction.clone()))
            }
            SublinearSpec::Arctan { dim } => SublinearFunction::arctan(*dim),
            SublinearSpec::Power { dim, p, scale } => SublinearFunction::power(*dim, *p, *scale)?,
            SublinearSpec::RadialLog { dim, scale } => SublinearFunction::radial_log(*dim, *scale),
            SublinearSpec::QuotientInvariant { complement, inner } => {
                let q = match (complement, default_complement) {
                    (Some(rows), _) => matrix_from_rows(rows, 0)?,
                    (None, Some(q)) => q.clone(),
                    (None, None) => {
                        return Err(Error::Parse(
                            "quotient_invariant needs \"complement\" outside a φ context".into(),
                        ))
                    }
                };
                SublinearFunction::quotient_invariant(q, inner.build(None)?)?
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum QuasiStateSpec {
    Zero {
        algebra: AlgebraInput,
    },
    Linear {
        algebra: AlgebraInput,
        coeffs: Vec<f64>,
    },
    ZetaAlphaC {
        phi: PhiJson,
        alpha: Vec<f64>,
        c: SublinearSpec,
        #[serde(default)]
        c0: f64,
    },
    Heisenberg {
        a: f64,
        c: SublinearSpec,
    },
    GwReductive {
        kind: AlgebraKind,
        lambda: f64,
    },
    MotionAd {
        n: usize,
        lambda: f64,
    },
    /// `(p*ζ)(x) = ζ(p x)` for the homomorphism `p` given by its rows.
    Pullback {
        algebra: AlgebraInput,
        map: Vec<Vec<f64>>,
        of: Box<QuasiStateSpec>,
    },
    Sum {
        terms: Vec<QuasiStateSpec>,
    },
}

impl QuasiStateSpec {
    pub fn build(&self) -> Result<QuasiState> {
        match self {
            QuasiStateSpec::Zero { algebra } => Ok(QuasiState::zero(Arc::new(algebra.build()?))),
            QuasiStateSpec::Linear { algebra, coeffs } => {
                QuasiState::linear(Arc::new(algebra.build()?), DVector::from_vec(coeffs.clone()))
            }
            QuasiStateSpec::ZetaAlphaC { phi, alpha, c, c0 } => {
                let spec = AlmostAbelianSpec::from_json(phi)?;
                let c = c.build(Some(&spec.quotient_complement()))?;
                zeta_alpha_c(&spec, &DVector::from_vec(alpha.clone()), &c, *c0)
            }
            QuasiStateSpec::Heisenberg { a, c } => heisenberg_quasistate(*a, &c.build(None)?),
            QuasiStateSpec::GwReductive { kind, lambda } => gw_quasistate(*kind, *lambda),
            QuasiStateSpec::MotionAd { n, lambda } => motion_ad_quasistate(*n, *lambda),
            QuasiStateSpec::Pullback { algebra, map, of } => {
                let source = Arc::new(algebra.build()?);
                let target = of.build()?;
                let p = LinearMap::new(matrix_from_rows(map, source.dim())?);
                let residual = qslab_core::lie::homomorphism_residual(&source, target.algebra(), &p)?;
                let scale = 1.0 + source.max_structure_constant() + target.algebra().max_structure_constant();
                if residual > qslab_core::lie::STRUCTURE_TOL * scale * (1.0 + p.matrix().amax().powi(2)) {
                    return Err(Error::Validation(format!(
                        "map is not a homomorphism (bracket residual {residual:e})"
                    )));
                }
                pullback(source, &p, &target)
            }
            QuasiStateSpec::Sum { terms } => {
                let mut it = terms.iter();
                let first = it
                    .next()
                    .ok_or_else(|| Error::Parse("empty sum".into()))?
                    .build()?;
                it.try_fold(first, |acc, t| acc.sum(&t.build()?))
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct FrameTerm {
    pub coeff: f64,
    pub f: FrameSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameSpec {
    Zero { n: usize },
    LinearReal { a: Vec<[f64; 2]> },
    SquaredNorm { n: usize },
    Norm { n: usize },
    Combination { terms: Vec<FrameTerm> },
}

pub fn complex_vector(v: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|[r, i]| Complex64::new(*r, *i)))
}

pub fn complex_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

impl FrameSpec {
    pub fn build(&self) -> Result<FrameFunction> {
        Ok(match self {
            FrameSpec::Zero { n } => FrameFunction::zero(*n),
            FrameSpec::LinearReal { a } => FrameFunction::linear_real(complex_vector(a)),
            FrameSpec::SquaredNorm { n } => FrameFunction::squared_norm(*n),
            FrameSpec::Norm { n } => FrameFunction::norm(*n),
            FrameSpec::Combination { terms } => FrameFunction::combination(
                terms
                    .iter()
                    .map(|t| Ok((t.coeff, t.f.build()?)))
                    .collect::<Result<Vec<_>>>()?,
            )?,
        })
    }
}
