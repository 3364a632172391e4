//! Dense linear-algebra helpers shared by every module: SVD-based rank and
//! subspace extraction, the matrix exponential, and complex/real conversions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Relative singular-value cutoff used for every rank and nullspace decision.
pub const RANK_CUTOFF: f64 = 1e-9;

/// Full SVD `m = U diag(s) Vᵀ` with `s` in decreasing order.
///
/// nalgebra's bidiagonal SVD returns inaccurate factors on some
/// rank-deficient inputs, so factorizations go through faer.
pub(crate) struct Svd {
    pub u: DMatrix<f64>,
    pub s: DVector<f64>,
    pub v: DMatrix<f64>,
}

pub(crate) fn svd(m: &DMatrix<f64>) -> Svd {
    let (r, c) = m.shape();
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    match fm.svd() {
        Ok(f) => {
            let (u, v) = (f.U(), f.V());
            let s = f.S().column_vector();
            Svd {
                u: DMatrix::from_fn(r, r, |i, j| u[(i, j)]),
                s: DVector::from_fn(r.min(c), |k, _| s[k]),
                v: DMatrix::from_fn(c, c, |i, j| v[(i, j)]),
            }
        }
        Err(_) => Svd {
            u: DMatrix::from_element(r, r, f64::NAN),
            s: DVector::from_element(r.min(c), f64::NAN),
            v: DMatrix::from_element(c, c, f64::NAN),
        },
    }
}

/// Complex SVD `m = U diag(s) V*`.
pub(crate) fn complex_svd(m: &DMatrix<Complex64>) -> (DMatrix<Complex64>, DVector<f64>, DMatrix<Complex64>) {
    let (r, c) = m.shape();
    let fm = faer::Mat::<faer::c64>::from_fn(r, c, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    let to_c = |z: faer::c64| Complex64::new(z.re, z.im);
    match fm.svd() {
        Ok(f) => {
            let (u, v) = (f.U(), f.V());
            let s = f.S().column_vector();
            (
                DMatrix::from_fn(r, r, |i, j| to_c(u[(i, j)])),
                DVector::from_fn(r.min(c), |k, _| s[k].re),
                DMatrix::from_fn(c, c, |i, j| to_c(v[(i, j)])),
            )
        }
        Err(_) => {
            let nan = Complex64::new(f64::NAN, f64::NAN);
            (
                DMatrix::from_element(r, r, nan),
                DVector::from_element(r.min(c), f64::NAN),
                DMatrix::from_element(c, c, nan),
            )
        }
    }
}

/// Eigenvalues and orthonormal eigenvectors (columns) of a Hermitian matrix;
/// only the lower triangle is read.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (DVector<f64>, DMatrix<Complex64>) {
    let n = m.nrows();
    let fm = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| {
        let z = m[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    match fm.self_adjoint_eigen(faer::Side::Lower) {
        Ok(e) => {
            let (s, u) = (e.S().column_vector(), e.U());
            (
                DVector::from_fn(n, |k, _| s[k].re),
                DMatrix::from_fn(n, n, |i, j| Complex64::new(u[(i, j)].re, u[(i, j)].im)),
            )
        }
        Err(_) => (
            DVector::from_element(n, f64::NAN),
            DMatrix::from_element(n, n, Complex64::new(f64::NAN, f64::NAN)),
        ),
    }
}

/// Eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> DVector<f64> {
    hermitian_eigen(&m.map(|x| Complex64::new(x, 0.0))).0
}

/// Moore-Penrose pseudo-inverse, dropping singular values `≤ cutoff`.
pub fn pseudo_inverse(m: &DMatrix<f64>, cutoff: f64) -> DMatrix<f64> {
    let Svd { u, s, v } = svd(m);
    let mut out = DMatrix::zeros(m.ncols(), m.nrows());
    for (k, sk) in s.iter().enumerate() {
        if *sk > cutoff {
            out += v.column(k) * u.column(k).transpose() / *sk;
        }
    }
    out
}

/// Complex pseudo-inverse, dropping singular values `≤ cutoff`.
pub fn complex_pseudo_inverse(m: &DMatrix<Complex64>, cutoff: f64) -> DMatrix<Complex64> {
    let (u, s, v) = complex_svd(m);
    let mut out = DMatrix::zeros(m.ncols(), m.nrows());
    for (k, sk) in s.iter().enumerate() {
        if *sk > cutoff {
            out += v.column(k) * u.column(k).adjoint() * Complex64::new(1.0 / sk, 0.0);
        }
    }
    out
}

/// Largest singular value (operator 2-norm).
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    svd(m).s.iter().fold(0.0_f64, |acc, s| acc.max(*s))
}

/// Threshold below which a singular value counts as zero. `reference`
/// overrides the matrix's own largest singular value as the scale.
fn threshold(sigma_max: f64, reference: Option<f64>) -> f64 {
    RANK_CUTOFF * reference.unwrap_or(sigma_max)
}

/// Numerical rank with the relative cutoff. `reference` sets the scale the
/// cutoff is relative to; `None` uses the matrix's own largest singular value.
pub fn rank_with_reference(m: &DMatrix<f64>, reference: Option<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = svd(m).s;
    let smax = sv.iter().fold(0.0_f64, |acc, s| acc.max(*s));
    if smax == 0.0 {
        return 0;
    }
    let tol = threshold(smax, reference);
    sv.iter().filter(|s| **s > tol).count()
}

pub fn rank(m: &DMatrix<f64>) -> usize {
    rank_with_reference(m, None)
}

/// Orthonormal basis (as columns) of the kernel of `m`.
pub fn nullspace_with_reference(m: &DMatrix<f64>, reference: Option<f64>) -> DMatrix<f64> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    let Svd { s: sv, v, .. } = svd(m);
    let smax = sv.iter().fold(0.0_f64, |acc, s| acc.max(*s));
    let tol = threshold(smax, reference);
    let picked: Vec<DVector<f64>> = (0..cols)
        .filter(|&i| smax == 0.0 || i >= sv.len() || sv[i] <= tol)
        .map(|i| normalize_sign(v.column(i).into_owned()))
        .collect();
    columns_to_matrix(cols, &picked)
}

pub fn nullspace(m: &DMatrix<f64>) -> DMatrix<f64> {
    nullspace_with_reference(m, None)
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn image_with_reference(m: &DMatrix<f64>, reference: Option<f64>) -> DMatrix<f64> {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let Svd { u, s: sv, .. } = svd(m);
    let smax = sv.iter().fold(0.0_f64, |acc, s| acc.max(*s));
    if smax == 0.0 {
        return DMatrix::zeros(rows, 0);
    }
    let tol = threshold(smax, reference);
    let mut idx: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > tol).collect();
    idx.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let picked: Vec<DVector<f64>> = idx
        .into_iter()
        .map(|i| normalize_sign(u.column(i).into_owned()))
        .collect();
    columns_to_matrix(rows, &picked)
}

pub fn image(m: &DMatrix<f64>) -> DMatrix<f64> {
    image_with_reference(m, None)
}

/// Orthonormal basis of the orthogonal complement of the column span of `basis`
/// inside R^dim.
pub fn orthogonal_complement(basis: &DMatrix<f64>, dim: usize) -> DMatrix<f64> {
    if basis.ncols() == 0 {
        return DMatrix::identity(dim, dim);
    }
    nullspace(&basis.transpose())
}

pub fn columns_to_matrix(rows: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Flip the sign so that the entry of largest magnitude is positive.
pub fn normalize_sign(mut v: DVector<f64>) -> DVector<f64> {
    let mut best = 0usize;
    for i in 0..v.len() {
        if v[i].abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if !v.is_empty() && v[best] < 0.0 {
        v.neg_mut();
    }
    v
}

/// Residual of projecting the columns of `sub` onto the span of the
/// orthonormal columns of `space`, relative to the norm of `sub`.
pub fn containment_residual(sub: &DMatrix<f64>, space: &DMatrix<f64>) -> f64 {
    if sub.ncols() == 0 {
        return 0.0;
    }
    let scale = sub.norm().max(f64::MIN_POSITIVE);
    let projected = if space.ncols() == 0 {
        DMatrix::zeros(sub.nrows(), sub.ncols())
    } else {
        space * (space.transpose() * sub)
    };
    (sub - projected).norm() / scale
}

// Pade(13) coefficients for scaling and squaring.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

fn norm_one(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Pade
/// approximant.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let norm = norm_one(a);
    if norm == 0.0 {
        return DMatrix::identity(n, n);
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a * 2f64.powi(-squarings);
    let b = &PADE13;
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &scaled * inner_u;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    let num = &v + &u;
    let den = &v - &u;
    let mut r = den
        .lu()
        .solve(&num)
        .expect("Pade denominator is nonsingular for the chosen scaling");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Real 2n x 2n matrix of a complex n x n matrix acting on C^n = R^{2n},
/// with coordinates interleaved as (re_1, im_1, re_2, im_2, ...).
pub fn realify(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

pub fn complex_to_real(v: &DVector<Complex64>) -> DVector<f64> {
    DVector::from_fn(2 * v.len(), |k, _| {
        let z = v[k / 2];
        if k % 2 == 0 {
            z.re
        } else {
            z.im
        }
    })
}

pub fn real_to_complex(v: &[f64]) -> DVector<Complex64> {
    assert!(v.len() % 2 == 0, "real vector must have even length");
    DVector::from_fn(v.len() / 2, |k, _| Complex64::new(v[2 * k], v[2 * k + 1]))
}

/// Inner product linear in the first argument, anti-linear in the second.
pub fn hermitian_inner(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub fn complex_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius norm of a complex matrix.
pub fn complex_matrix_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
