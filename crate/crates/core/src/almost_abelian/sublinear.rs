//! Continuous sublinear functions `c` on `W = im φ` (in W-coordinates).

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use crate::error::{check_dim, Error, Result};

type CustomFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum SublinearKind {
    /// Constant value; only the zero constant is admissible as a `c`.
    Constant(f64),
    /// `arctan(d · w)`.
    BoundedSmooth { direction: DVector<f64> },
    /// `scale · ‖w‖^p` with `0 < p < 1`.
    Power { p: f64, scale: f64 },
    /// `scale · ln(1 + ‖w‖)`.
    RadialLog { scale: f64 },
    /// `inner(Qᵀ w)` where the columns of `Q` span a chosen complement of
    /// `im φ²` inside `W`.
    QuotientInvariant {
        inner: Box<SublinearFunction>,
        complement: DMatrix<f64>,
    },
    Custom { name: String, f: CustomFn },
}

#[derive(Clone)]
pub struct SublinearFunction {
    dim: usize,
    kind: SublinearKind,
}

impl std::fmt::Debug for SublinearFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SublinearFunction({})", self.describe())
    }
}

impl SublinearFunction {
    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        Self {
            dim,
            kind: SublinearKind::Constant(value),
        }
    }

    pub fn bounded_smooth(direction: DVector<f64>) -> Self {
        Self {
            dim: direction.len(),
            kind: SublinearKind::BoundedSmooth { direction },
        }
    }

    /// `arctan` of the first coordinate.
    pub fn arctan(dim: usize) -> Self {
        let mut d = DVector::zeros(dim);
        if dim > 0 {
            d[0] = 1.0;
        }
        Self::bounded_smooth(d)
    }

    pub fn power(dim: usize, p: f64, scale: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Validation(format!(
                "power exponent must lie in (0, 1), got {p}"
            )));
        }
        Ok(Self {
            dim,
            kind: SublinearKind::Power { p, scale },
        })
    }

    pub fn radial_log(dim: usize, scale: f64) -> Self {
        Self {
            dim,
            kind: SublinearKind::RadialLog { scale },
        }
    }

    /// Wrap `inner` so that it only sees the coordinates along the columns of
    /// `complement` (orthonormal, `dim x inner.dim()`).
    pub fn quotient_invariant(complement: DMatrix<f64>, inner: SublinearFunction) -> Result<Self> {
        check_dim(complement.ncols(), inner.dim)?;
        Ok(Self {
            dim: complement.nrows(),
            kind: SublinearKind::QuotientInvariant {
                inner: Box::new(inner),
                complement,
            },
        })
    }

    pub fn custom(
        dim: usize,
        name: impl Into<String>,
        f: impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            kind: SublinearKind::Custom {
                name: name.into(),
                f: Arc::new(f),
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &SublinearKind {
        &self.kind
    }

    pub fn eval(&self, w: &DVector<f64>) -> f64 {
        match &self.kind {
            SublinearKind::Constant(c) => *c,
            SublinearKind::BoundedSmooth { direction } => direction.dot(w).atan(),
            SublinearKind::Power { p, scale } => scale * w.norm().powf(*p),
            SublinearKind::RadialLog { scale } => scale * w.norm().ln_1p(),
            SublinearKind::QuotientInvariant { inner, complement } => {
                inner.eval(&(complement.transpose() * w))
            }
            SublinearKind::Custom { f, .. } => f(w),
        }
    }

    pub fn describe(&self) -> Value {
        match &self.kind {
            SublinearKind::Constant(c) => json!({ "kind": "constant", "value": c, "dim": self.dim }),
            SublinearKind::BoundedSmooth { direction } => {
                json!({ "kind": "bounded_smooth", "direction": direction.as_slice() })
            }
            SublinearKind::Power { p, scale } => {
                json!({ "kind": "power", "p": p, "scale": scale, "dim": self.dim })
            }
            SublinearKind::RadialLog { scale } => {
                json!({ "kind": "radial_log", "scale": scale, "dim": self.dim })
            }
            SublinearKind::QuotientInvariant { inner, complement } => json!({
                "kind": "quotient_invariant",
                "inner": inner.describe(),
                "complement": complement.row_iter().map(|r| r.iter().copied().collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
            SublinearKind::Custom { name, .. } => json!({ "kind": "custom", "name": name, "dim": self.dim }),
        }
    }
}
