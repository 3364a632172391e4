//! Rigidity of `g_φ` and explicit surjections onto the Heisenberg algebra.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use super::{build_g_phi, AlmostAbelianSpec};
use crate::error::{Error, Result};
use crate::lie::{homomorphism_residual, LieAlgebra, LinearMap, STRUCTURE_TOL};
use crate::linalg;

/// `V = V0 ⊕ V1`, both φ-invariant, with φ|V0 a single nilpotent block of size `n`.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantSplitting {
    /// Columns `φ^{n-1}x, ..., φx, x`.
    pub v0_basis: Vec<Vec<f64>>,
    pub v1_basis: Vec<Vec<f64>>,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessStep {
    pub map: LinearMap,
    pub target_labels: Vec<String>,
    pub bracket_residual: f64,
    #[serde(skip)]
    pub target: Arc<LieAlgebra>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub chain: Vec<WitnessStep>,
    pub splitting: InvariantSplitting,
}

impl Witness {
    /// The composite `g_φ → g_{φ₂}`.
    pub fn composite(&self) -> LinearMap {
        let mut it = self.chain.iter();
        let first = it.next().expect("chain is nonempty").map.clone();
        it.fold(first, |acc, step| step.map.compose(&acc).expect("chain dims agree"))
    }

    pub fn terminal(&self) -> &Arc<LieAlgebra> {
        &self.chain.last().expect("chain is nonempty").target
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RigidityVerdict {
    pub rigid: bool,
    pub rank_phi: usize,
    pub rank_phi2: usize,
    #[serde(rename = "witness_chain", serialize_with = "serialize_chain")]
    pub witness: Option<Witness>,
    pub invariant_splitting: Option<InvariantSplitting>,
}

fn serialize_chain<S: serde::Serializer>(w: &Option<Witness>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match w {
        None => s.serialize_none(),
        Some(w) => w.chain.serialize(s),
    }
}

/// The isomorphism `g_{φ₂} → h₃` sending `(v1, v2, t)` to `(Z, Y, X)` coordinates,
/// i.e. `(x, y, z) = (t, v2, v1)`.
pub fn heisenberg_identification() -> LinearMap {
    LinearMap::new(DMatrix::from_row_slice(
        3,
        3,
        &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0],
    ))
}

fn power(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    (0..k).fold(DMatrix::identity(m.nrows(), m.ncols()), |acc, _| &acc * m)
}

pub fn decide_rigidity(spec: &AlmostAbelianSpec) -> Result<RigidityVerdict> {
    let rigid = spec.rank_phi() == spec.rank_phi2();
    if rigid {
        return Ok(RigidityVerdict {
            rigid,
            rank_phi: spec.rank_phi(),
            rank_phi2: spec.rank_phi2(),
            witness: None,
            invariant_splitting: None,
        });
    }
    let witness = build_witness(spec)?;
    Ok(RigidityVerdict {
        rigid,
        rank_phi: spec.rank_phi(),
        rank_phi2: spec.rank_phi2(),
        invariant_splitting: Some(witness.splitting.clone()),
        witness: Some(witness),
    })
}

fn matrix_columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter().map(|c| c.iter().copied().collect()).collect()
}

fn build_witness(spec: &AlmostAbelianSpec) -> Result<Witness> {
    let d = spec.v_dim();
    let phi = spec.phi().matrix();
    let s = spec.phi_norm();
    let reference = |k: usize| Some(s.powi(k as i32));
    let powers: Vec<DMatrix<f64>> = (0..=d).map(|k| power(phi, k)).collect();
    let ranks: Vec<usize> = (0..=d)
        .map(|k| linalg::rank_with_reference(&powers[k], reference(k)))
        .collect();
    // Nilpotency index of φ on the generalized 0-eigenspace.
    let m = (0..=d)
        .find(|&k| ranks[k] == ranks[d])
        .expect("rank sequence stabilizes by k = dim V");
    if m < 2 {
        return Err(Error::Validation(
            "rank φ ≠ rank φ² but no nilpotent block of size ≥ 2 was found".into(),
        ));
    }

    let ker_m = linalg::nullspace_with_reference(&powers[m], reference(m));
    let ker_prev = linalg::nullspace_with_reference(&powers[m - 1], reference(m - 1));
    let projected = &ker_m - &ker_prev * (ker_prev.transpose() * &ker_m);
    let fresh = linalg::image(&projected);
    let x = linalg::normalize_sign(fresh.column(0).into_owned());

    let mut v0 = DMatrix::zeros(d, m);
    for j in 0..m {
        v0.set_column(j, &(&powers[m - 1 - j] * &x));
    }

    let range = linalg::image_with_reference(&powers[d], reference(d));
    let top = v0.column(0).into_owned();
    let ell = &top - &range * (range.transpose() * &top);
    let mut constraints = DMatrix::zeros(m, d);
    for k in 0..m {
        constraints.set_row(k, &(powers[k].transpose() * &ell).transpose());
    }
    let v1 = if d > m {
        linalg::nullspace(&constraints)
    } else {
        DMatrix::zeros(d, 0)
    };
    if v1.ncols() != d - m {
        return Err(Error::Validation(format!(
            "invariant complement has dimension {} instead of {}",
            v1.ncols(),
            d - m
        )));
    }

    let mut basis = DMatrix::zeros(d, d);
    basis.view_mut((0, 0), (d, m)).copy_from(&v0);
    basis.view_mut((0, m), (d, d - m)).copy_from(&v1);
    let inv = basis
        .try_inverse()
        .ok_or_else(|| Error::Validation("V0 and V1 are not complementary".into()))?;
    let mut p0 = DMatrix::zeros(m + 1, d + 1);
    p0.view_mut((0, 0), (m, d)).copy_from(&inv.rows(0, m));
    p0[(m, d)] = 1.0;

    let source = build_g_phi(spec);
    let block = AlmostAbelianSpec::new(jordan_block(m))?;
    let mut target = Arc::new(build_g_phi(&block));
    let p0 = LinearMap::new(p0);
    let residual = homomorphism_residual(&source, &target, &p0)?;
    let scale = 1.0 + source.max_structure_constant();
    check_step(residual, scale)?;
    let mut chain = vec![WitnessStep {
        map: p0,
        target_labels: target.labels().to_vec(),
        bracket_residual: residual,
        target: target.clone(),
    }];

    for size in (2..m).rev() {
        let current = target.clone();
        let (quotient, p) = current.quotient(&[current.basis_vector(0)])?;
        let reference_alg = build_g_phi(&AlmostAbelianSpec::new(jordan_block(size))?);
        let quotient = quotient.with_labels(reference_alg.labels().to_vec())?;
        let residual = homomorphism_residual(&current, &quotient, &p)?;
        check_step(residual, scale)?;
        target = Arc::new(quotient);
        chain.push(WitnessStep {
            map: p,
            target_labels: target.labels().to_vec(),
            bracket_residual: residual,
            target: target.clone(),
        });
    }

    Ok(Witness {
        chain,
        splitting: InvariantSplitting {
            v0_basis: matrix_columns(&v0),
            v1_basis: matrix_columns(&v1),
            n: m,
        },
    })
}

fn check_step(residual: f64, scale: f64) -> Result<()> {
    if residual > STRUCTURE_TOL * scale {
        Err(Error::Validation(format!(
            "witness map does not respect brackets (residual {residual:e})"
        )))
    } else {
        Ok(())
    }
}

/// Nilpotent block `φ_n` with `φ(e_k) = e_{k-1}`.
pub(crate) fn jordan_block(n: usize) -> LinearMap {
    LinearMap::new(DMatrix::from_fn(n, n, |i, j| if j == i + 1 { 1.0 } else { 0.0 }))
}
