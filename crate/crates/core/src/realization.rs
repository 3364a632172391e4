//! Lie algebras given by a basis of complex matrices, with conversion between
//! matrices and coordinates.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone)]
pub struct MatrixRealization {
    algebra: Arc<LieAlgebra>,
    basis: Vec<CMatrix>,
    size: usize,
    /// Least-squares solver from realified vectorizations to coordinates.
    pinv: DMatrix<f64>,
}

fn vectorize(m: &CMatrix) -> DVector<f64> {
    let n = m.nrows();
    DVector::from_fn(2 * n * n, |k, _| {
        let entry = m[((k / 2) / n, (k / 2) % n)];
        if k % 2 == 0 {
            entry.re
        } else {
            entry.im
        }
    })
}

fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

impl MatrixRealization {
    /// The basis must be linearly independent over ℝ and closed under commutators.
    pub fn from_matrix_basis(labels: Vec<String>, basis: Vec<CMatrix>) -> Result<Self> {
        check_dim(labels.len(), basis.len())?;
        let size = basis.first().map_or(0, |m| m.nrows());
        if basis.iter().any(|m| m.nrows() != size || m.ncols() != size) {
            return Err(Error::Validation("basis matrices must share one square shape".into()));
        }
        let cols: Vec<DVector<f64>> = basis.iter().map(vectorize).collect();
        let a = linalg::columns_to_matrix(2 * size * size, &cols);
        if linalg::rank(&a) != basis.len() {
            return Err(Error::Validation("basis matrices are linearly dependent".into()));
        }
        let pinv = linalg::pseudo_inverse(&a, 1e-12);
        let mut closure_error = 0.0_f64;
        let algebra = LieAlgebra::from_fn(labels, |i, j| {
            let c = commutator(&basis[i], &basis[j]);
            let v = vectorize(&c);
            let coords = &pinv * &v;
            closure_error = closure_error.max((&a * &coords - v).amax());
            coords.map(|x| if x.abs() < 1e-14 { 0.0 } else { x })
        })?;
        if closure_error > 1e-9 {
            return Err(Error::Validation(format!(
                "basis is not closed under commutators (residual {closure_error:e})"
            )));
        }
        Ok(Self {
            algebra: Arc::new(algebra),
            basis,
            size,
            pinv,
        })
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra> {
        &self.algebra
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn matrix_size(&self) -> usize {
        self.size
    }

    pub fn from_coords(&self, x: &DVector<f64>) -> Result<CMatrix> {
        check_dim(self.basis.len(), x.len())?;
        Ok(self.from_coords_raw(x))
    }

    pub(crate) fn from_coords_raw(&self, x: &DVector<f64>) -> CMatrix {
        let mut m = CMatrix::zeros(self.size, self.size);
        for (c, b) in x.iter().zip(&self.basis) {
            m += b * Complex64::new(*c, 0.0);
        }
        m
    }

    /// Coordinates of `m`; fails if `m` is not in the span (to 1e-9).
    pub fn to_coords(&self, m: &CMatrix) -> Result<DVector<f64>> {
        if m.nrows() != self.size || m.ncols() != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                found: m.nrows(),
            });
        }
        let coords = &self.pinv * vectorize(m);
        let back = self.from_coords_raw(&coords);
        let residual = linalg::complex_matrix_norm(&(back - m));
        if residual > 1e-9 * (1.0 + linalg::complex_matrix_norm(m)) {
            return Err(Error::Validation(format!(
                "matrix does not lie in the algebra (residual {residual:e})"
            )));
        }
        Ok(coords)
    }

    /// sl2(R) with basis e = E12, f = E21, h = diag(1, -1).
    pub fn sl2() -> Self {
        let r = |a: f64, b: f64, c: f64, d: f64| {
            CMatrix::from_row_slice(2, 2, &[a, b, c, d].map(|x| Complex64::new(x, 0.0)))
        };
        Self::from_matrix_basis(
            vec!["e".into(), "f".into(), "h".into()],
            vec![r(0.0, 1.0, 0.0, 0.0), r(0.0, 0.0, 1.0, 0.0), r(1.0, 0.0, 0.0, -1.0)],
        )
        .expect("sl2 basis is valid")
    }

    /// su(2) with basis `u_k = -(i/2) σ_k`, so `[u1, u2] = u3` cyclically.
    pub fn su2() -> Self {
        let c = Complex64::new;
        let half_i = c(0.0, -0.5);
        let s1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let s2 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let s3 = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        Self::from_matrix_basis(
            vec!["u1".into(), "u2".into(), "u3".into()],
            vec![s1 * half_i, s2 * half_i, s3 * half_i],
        )
        .expect("su2 basis is valid")
    }

    /// u(n) with basis `i E_kk`, `E_jk - E_kj`, `i (E_jk + E_kj)` for `j < k`.
    pub fn un(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("u(n) needs n ≥ 1".into()));
        }
        let (labels, basis) = un_basis(n);
        Self::from_matrix_basis(labels, basis)
    }
}

pub(crate) fn un_basis(n: usize) -> (Vec<String>, Vec<CMatrix>) {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let mut labels = Vec::new();
    let mut basis = Vec::new();
    for k in 0..n {
        let mut m = CMatrix::zeros(n, n);
        m[(k, k)] = i;
        labels.push(format!("d{}", k + 1));
        basis.push(m);
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let mut r = CMatrix::zeros(n, n);
            r[(j, k)] = one;
            r[(k, j)] = -one;
            labels.push(format!("r{}{}", j + 1, k + 1));
            basis.push(r);
            let mut s = CMatrix::zeros(n, n);
            s[(j, k)] = i;
            s[(k, j)] = i;
            labels.push(format!("s{}{}", j + 1, k + 1));
            basis.push(s);
        }
    }
    (labels, basis)
}
