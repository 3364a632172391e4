//! Isomorphism type of a three-dimensional real Lie algebra.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{LieAlgebra, LinearMap};
use crate::linalg::{self, RANK_CUTOFF};

/// Table families `L1`, `L2`, `L3(a)`, `L4(a)` plus the two simple algebras.
///
/// `L4(a)` is only defined up to positive rescaling of `a`, so it is reported
/// with `a ∈ {-1, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "label")]
pub enum Class3d {
    L1,
    L2,
    L3 { a: f64 },
    L4 { a: f64 },
    #[serde(rename = "simple_sl2")]
    SimpleSl2,
    #[serde(rename = "simple_su2")]
    SimpleSu2,
    #[serde(rename = "not_3d")]
    Not3d,
}

impl Class3d {
    /// Isomorphism test between labels (L3 parameters compared to 1e-9).
    pub fn same_class(&self, other: &Class3d) -> bool {
        match (self, other) {
            (Class3d::L3 { a }, Class3d::L3 { a: b }) => (a - b).abs() <= 1e-9 * (1.0 + a.abs()),
            (Class3d::L4 { a }, Class3d::L4 { a: b }) => a.signum() == b.signum() && (*a == 0.0) == (*b == 0.0),
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFamily {
    L1,
    L2,
    L3,
    L4,
}

/// `φ` realizing the table row in the column convention, so that
/// `build_g_phi` reproduces `[X3, X1]`, `[X3, X2]` with `(X1, X2, X3) = (v1, v2, t)`.
pub fn table_phi(family: TableFamily, a: f64) -> LinearMap {
    let m = match family {
        TableFamily::L1 => DMatrix::zeros(2, 2),
        TableFamily::L2 => DMatrix::identity(2, 2),
        TableFamily::L3 => DMatrix::from_row_slice(2, 2, &[0.0, a, 1.0, 1.0]),
        TableFamily::L4 => DMatrix::from_row_slice(2, 2, &[0.0, a, 1.0, 0.0]),
    };
    LinearMap::new(m)
}

pub fn classify_3d(g: &LieAlgebra) -> Result<Class3d> {
    if g.dim() != 3 {
        return Ok(Class3d::Not3d);
    }
    let scale = 1.0 + g.max_structure_constant();
    let killing = g.killing_form();
    let eig = linalg::symmetric_eigenvalues(&killing);
    let kmax = eig.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    if kmax > 0.0 && eig.iter().all(|e| e.abs() > RANK_CUTOFF * kmax) {
        let positive = eig.iter().filter(|e| **e > 0.0).count();
        return match positive {
            2 => Ok(Class3d::SimpleSl2),
            0 => Ok(Class3d::SimpleSu2),
            _ => Err(Error::Classification(format!(
                "nondegenerate Killing form with unexpected signature ({positive}, {})",
                3 - positive
            ))),
        };
    }

    let derived = g.derived_algebra();
    let v = match derived.ncols() {
        0 => return Ok(Class3d::L1),
        2 => derived,
        1 => {
            let z = derived.column(0).into_owned();
            let cz = g.commuting_basis(&z)?;
            if cz.len() == 2 {
                linalg::columns_to_matrix(3, &cz)
            } else {
                // z central: any plane through z is an abelian ideal.
                let comp = linalg::orthogonal_complement(&derived, 3);
                linalg::columns_to_matrix(3, &[z, comp.column(0).into_owned()])
            }
        }
        k => {
            return Err(Error::Classification(format!(
                "degenerate Killing form with {k}-dimensional derived algebra"
            )))
        }
    };

    let t = linalg::orthogonal_complement(&v, 3).column(0).into_owned();
    let v0 = v.column(0).into_owned();
    let v1 = v.column(1).into_owned();
    if g.bracket(&v0, &v1)?.amax() > RANK_CUTOFF * scale {
        return Err(Error::Classification("candidate ideal is not abelian".into()));
    }
    let mut phi = DMatrix::zeros(2, 2);
    for (j, vj) in [&v0, &v1].into_iter().enumerate() {
        let image = g.bracket(&t, vj)?;
        let inside = &v * (v.transpose() * &image);
        if (&image - &inside).amax() > RANK_CUTOFF * scale {
            return Err(Error::Classification("candidate abelian subspace is not an ideal".into()));
        }
        phi.set_column(j, &(v.transpose() * image));
    }
    Ok(match_phi(&phi))
}

fn match_phi(phi: &DMatrix<f64>) -> Class3d {
    let s = phi.norm();
    if s == 0.0 {
        return Class3d::L1;
    }
    let tr = phi.trace();
    let det = phi.determinant();
    let scalar = phi - DMatrix::identity(2, 2) * (tr / 2.0);
    if scalar.norm() <= RANK_CUTOFF * s {
        return Class3d::L2;
    }
    if tr.abs() > RANK_CUTOFF * s {
        return Class3d::L3 { a: -det / (tr * tr) };
    }
    let a = if det.abs() <= RANK_CUTOFF * s * s {
        0.0
    } else {
        -det.signum()
    };
    Class3d::L4 { a }
}
