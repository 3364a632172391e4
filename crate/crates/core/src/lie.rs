//! Finite-dimensional real Lie algebras stored as dense structure-constant
//! tensors, together with the adjoint representation and the basic
//! constructions (direct sum, semidirect product, quotient).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg;

/// Coordinates of an element in the basis of some [`LieAlgebra`].
pub type Element = DVector<f64>;

/// Absolute tolerance (scaled by the size of the inputs) for representation,
/// ideal and homomorphism checks.
pub const STRUCTURE_TOL: f64 = 1e-9;

/// Relative tolerance for the Jacobi identity, against `1 + max|c|^3`.
pub const JACOBI_TOL: f64 = 1e-10;

/// A linear map between coordinate spaces, stored as a `target x source` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Parse("ragged matrix rows".into()));
        }
        Ok(Self::new(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j])))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn zeros(target_dim: usize, source_dim: usize) -> Self {
        Self::new(DMatrix::zeros(target_dim, source_dim))
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim(self.source_dim(), x.len())?;
        Ok(&self.matrix * x)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinearMap) -> Result<LinearMap> {
        check_dim(self.source_dim(), inner.target_dim())?;
        Ok(LinearMap::new(&self.matrix * &inner.matrix))
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.matrix
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

impl Serialize for LinearMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            source_dim: usize,
            target_dim: usize,
            matrix: Vec<Vec<f64>>,
        }
        Repr {
            source_dim: self.source_dim(),
            target_dim: self.target_dim(),
            matrix: self.rows(),
        }
        .serialize(s)
    }
}

/// Records that the first `v_dim` basis vectors span an abelian ideal `V` and
/// the remaining `h_dim` span a complementary subalgebra `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemidirectSplit {
    pub v_dim: usize,
    pub h_dim: usize,
}

/// A real Lie algebra with `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    dim: usize,
    structure: Vec<f64>,
    labels: Vec<String>,
    split: Option<SemidirectSplit>,
}

/// One upper-triangular entry of the JSON algebra format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<f64>,
}

/// JSON form of an algebra: only brackets with `i < j` are listed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default)]
    pub brackets: Vec<BracketEntry>,
}

fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl LieAlgebra {
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    /// Build from a list of brackets `[e_i, e_j]` with `i < j`; the tensor is
    /// completed antisymmetrically and the Jacobi identity is verified.
    pub fn from_brackets(labels: Vec<String>, brackets: &[(usize, usize, Vec<f64>)]) -> Result<Self> {
        let dim = labels.len();
        let mut alg = Self {
            dim,
            structure: vec![0.0; dim * dim * dim],
            labels,
            split: None,
        };
        for (i, j, coeffs) in brackets {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim {
                return Err(Error::Validation(format!(
                    "bracket index ({i}, {j}) out of range for dim {dim}"
                )));
            }
            if i >= j {
                return Err(Error::Validation(format!(
                    "bracket ({i}, {j}) must satisfy i < j"
                )));
            }
            check_dim(dim, coeffs.len())?;
            for (k, c) in coeffs.iter().enumerate() {
                let a = alg.idx(i, j, k);
                let b = alg.idx(j, i, k);
                alg.structure[a] = *c;
                alg.structure[b] = -*c;
            }
        }
        alg.validate_jacobi()?;
        Ok(alg)
    }

    /// Build from a closure giving `[e_i, e_j]` for `i < j`.
    pub(crate) fn from_fn(
        labels: Vec<String>,
        mut bracket: impl FnMut(usize, usize) -> DVector<f64>,
    ) -> Result<Self> {
        let dim = labels.len();
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let b = bracket(i, j);
                if b.iter().any(|c| *c != 0.0) {
                    entries.push((i, j, b.iter().copied().collect()));
                }
            }
        }
        Self::from_brackets(labels, &entries)
    }

    pub fn from_json(json: &AlgebraJson) -> Result<Self> {
        let labels = if json.labels.is_empty() {
            default_labels("e", json.dim)
        } else {
            check_dim(json.dim, json.labels.len())?;
            json.labels.clone()
        };
        let brackets: Vec<_> = json
            .brackets
            .iter()
            .map(|b| (b.i, b.j, b.coeffs.clone()))
            .collect();
        Self::from_brackets(labels, &brackets)
    }

    pub fn to_json(&self) -> AlgebraJson {
        let mut brackets = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let coeffs: Vec<f64> = (0..self.dim)
                    .map(|k| self.structure[self.idx(i, j, k)])
                    .collect();
                if coeffs.iter().any(|c| *c != 0.0) {
                    brackets.push(BracketEntry { i, j, coeffs });
                }
            }
        }
        AlgebraJson {
            dim: self.dim,
            labels: self.labels.clone(),
            brackets,
        }
    }

    pub fn abelian(n: usize) -> Self {
        Self {
            dim: n,
            structure: vec![0.0; n * n * n],
            labels: default_labels("a", n),
            split: None,
        }
    }

    /// Basis (X, Y, Z) with `[X, Y] = Z` and Z central.
    pub fn heisenberg() -> Self {
        Self::from_brackets(
            vec!["X".into(), "Y".into(), "Z".into()],
            &[(0, 1, vec![0.0, 0.0, 1.0])],
        )
        .expect("heisenberg structure constants satisfy Jacobi")
    }

    /// sl2(R) in the basis (e, f, h): `[e,f] = h`, `[h,e] = 2e`, `[h,f] = -2f`.
    pub fn sl2() -> Self {
        Self::from_brackets(
            vec!["e".into(), "f".into(), "h".into()],
            &[
                (0, 1, vec![0.0, 0.0, 1.0]),
                (0, 2, vec![-2.0, 0.0, 0.0]),
                (1, 2, vec![0.0, 2.0, 0.0]),
            ],
        )
        .expect("sl2 structure constants satisfy Jacobi")
    }

    /// su(2) ≅ so(3) with `[u1,u2] = u3` and cyclic permutations.
    pub fn su2() -> Self {
        Self::from_brackets(
            vec!["u1".into(), "u2".into(), "u3".into()],
            &[
                (0, 1, vec![0.0, 0.0, 1.0]),
                (0, 2, vec![0.0, -1.0, 0.0]),
                (1, 2, vec![1.0, 0.0, 0.0]),
            ],
        )
        .expect("su2 structure constants satisfy Jacobi")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        check_dim(self.dim, labels.len())?;
        self.labels = labels;
        Ok(self)
    }

    pub fn semidirect_split(&self) -> Option<SemidirectSplit> {
        self.split
    }

    /// `c^k_{ij}`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[self.idx(i, j, k)]
    }

    pub fn max_structure_constant(&self) -> f64 {
        self.structure.iter().fold(0.0, |a, c| a.max(c.abs()))
    }

    pub fn basis_vector(&self, i: usize) -> Element {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    pub fn zero(&self) -> Element {
        DVector::zeros(self.dim)
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().all(|c| *c == 0.0)
    }

    pub fn bracket(&self, x: &Element, y: &Element) -> Result<Element> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                let base = (i * n + j) * n;
                for k in 0..n {
                    out[k] += self.structure[base + k] * xy;
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `y ↦ [x, y]`.
    pub fn ad(&self, x: &Element) -> Result<LinearMap> {
        check_dim(self.dim, x.len())?;
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += x[i] * self.structure[self.idx(i, j, k)];
                }
            }
        }
        Ok(LinearMap::new(m))
    }

    /// `exp(ad x)`, the adjoint-group element generated by `x`.
    pub fn exp_ad(&self, x: &Element) -> Result<LinearMap> {
        let ad = self.ad(x)?;
        Ok(LinearMap::new(linalg::expm(ad.matrix())))
    }

    /// Orthonormal basis of the centralizer `ker(ad x)`.
    pub fn commuting_basis(&self, x: &Element) -> Result<Vec<Element>> {
        let ad = self.ad(x)?;
        let kernel = linalg::nullspace(ad.matrix());
        Ok(kernel.column_iter().map(|c| c.into_owned()).collect())
    }

    /// Largest Jacobi residual over basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = 0.0;
                        for m in 0..n {
                            s += self.structure_constant(j, k, m) * self.structure_constant(i, m, l)
                                + self.structure_constant(k, i, m)
                                    * self.structure_constant(j, m, l)
                                + self.structure_constant(i, j, m)
                                    * self.structure_constant(k, m, l);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    pub fn jacobi_scale(&self) -> f64 {
        1.0 + self.max_structure_constant().powi(3)
    }

    fn validate_jacobi(&self) -> Result<()> {
        let r = self.jacobi_residual();
        if r <= JACOBI_TOL * self.jacobi_scale() {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "Jacobi identity violated (residual {r:e})"
            )))
        }
    }

    /// Killing form `B(e_i, e_j) = tr(ad e_i ad e_j)`.
    pub fn killing_form(&self) -> DMatrix<f64> {
        let ads: Vec<DMatrix<f64>> = (0..self.dim)
            .map(|i| self.ad(&self.basis_vector(i)).expect("dim matches").into_matrix())
            .collect();
        DMatrix::from_fn(self.dim, self.dim, |i, j| (&ads[i] * &ads[j]).trace())
    }

    /// Orthonormal basis (columns) of `[g, g]`.
    pub fn derived_algebra(&self) -> DMatrix<f64> {
        let n = self.dim;
        let mut cols = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                cols.push(DVector::from_fn(n, |k, _| self.structure_constant(i, j, k)));
            }
        }
        if cols.is_empty() {
            return DMatrix::zeros(n, 0);
        }
        linalg::image(&linalg::columns_to_matrix(n, &cols))
    }

    /// Orthonormal basis (columns) of the center.
    pub fn center(&self) -> DMatrix<f64> {
        let n = self.dim;
        let mut stacked = DMatrix::zeros(n * n, n);
        for i in 0..n {
            let ad = self.ad(&self.basis_vector(i)).expect("dim matches");
            stacked.view_mut((i * n, 0), (n, n)).copy_from(ad.matrix());
        }
        linalg::nullspace(&stacked)
    }

    /// The subalgebra spanned by a contiguous range of basis vectors.
    pub fn coordinate_subalgebra(&self, range: std::ops::Range<usize>) -> Result<LieAlgebra> {
        if range.end > self.dim || range.start > range.end {
            return Err(Error::Validation(format!("invalid coordinate range {range:?}")));
        }
        let m = range.len();
        let off = range.start;
        let scale = 1.0 + self.max_structure_constant();
        let mut out = LieAlgebra {
            dim: m,
            structure: vec![0.0; m * m * m],
            labels: self.labels[range.clone()].to_vec(),
            split: None,
        };
        for i in 0..m {
            for j in 0..m {
                for k in 0..self.dim {
                    let c = self.structure_constant(off + i, off + j, k);
                    if range.contains(&k) {
                        let idx = out.idx(i, j, k - off);
                        out.structure[idx] = c;
                    } else if c.abs() > STRUCTURE_TOL * scale {
                        return Err(Error::Validation(format!(
                            "coordinates {range:?} do not span a subalgebra"
                        )));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Block-diagonal structure tensor; cross brackets vanish.
    pub fn direct_sum(g1: &LieAlgebra, g2: &LieAlgebra) -> LieAlgebra {
        let (n1, n2) = (g1.dim, g2.dim);
        let n = n1 + n2;
        let mut labels = g1.labels.clone();
        labels.extend(g2.labels.iter().cloned());
        let mut out = LieAlgebra {
            dim: n,
            structure: vec![0.0; n * n * n],
            labels,
            split: None,
        };
        for i in 0..n1 {
            for j in 0..n1 {
                for k in 0..n1 {
                    let a = out.idx(i, j, k);
                    out.structure[a] = g1.structure_constant(i, j, k);
                }
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                for k in 0..n2 {
                    let a = out.idx(n1 + i, n1 + j, n1 + k);
                    out.structure[a] = g2.structure_constant(i, j, k);
                }
            }
        }
        if g1.is_abelian() {
            out.split = Some(SemidirectSplit {
                v_dim: n1,
                h_dim: n2,
            });
        }
        out
    }

    /// `V ⋊_rho h` on the basis (V, h) with
    /// `[(v,X),(w,Y)] = (rho(X)w - rho(Y)v, [X,Y])`.
    ///
    /// `rho[a]` is the action of the a-th basis vector of `h`; the
    /// representation property is checked on all basis pairs.
    pub fn semidirect(v_dim: usize, h: &LieAlgebra, rho: &[LinearMap]) -> Result<LieAlgebra> {
        check_dim(h.dim, rho.len())?;
        for r in rho {
            if r.source_dim() != v_dim || r.target_dim() != v_dim {
                return Err(Error::Validation(format!(
                    "representation matrices must be {v_dim}x{v_dim}"
                )));
            }
        }
        let scale = 1.0 + rho.iter().map(|r| r.matrix.amax()).fold(0.0, f64::max).powi(2);
        for a in 0..h.dim {
            for b in (a + 1)..h.dim {
                let lhs: DMatrix<f64> = (0..h.dim).fold(DMatrix::zeros(v_dim, v_dim), |acc, k| {
                    acc + rho[k].matrix() * h.structure_constant(a, b, k)
                });
                let rhs = rho[a].matrix() * rho[b].matrix() - rho[b].matrix() * rho[a].matrix();
                let residual = (lhs - rhs).amax();
                if residual > STRUCTURE_TOL * scale {
                    return Err(Error::Validation(format!(
                        "rho is not a representation: rho([{la},{lb}]) != [rho({la}), rho({lb})] (residual {residual:e})",
                        la = h.labels[a],
                        lb = h.labels[b]
                    )));
                }
            }
        }
        let n = v_dim + h.dim;
        let mut labels = default_labels("v", v_dim);
        labels.extend(h.labels.iter().cloned());
        let mut out = LieAlgebra {
            dim: n,
            structure: vec![0.0; n * n * n],
            labels,
            split: Some(SemidirectSplit {
                v_dim,
                h_dim: h.dim,
            }),
        };
        for a in 0..h.dim {
            for j in 0..v_dim {
                for k in 0..v_dim {
                    let c = rho[a].matrix()[(k, j)];
                    let p = out.idx(v_dim + a, j, k);
                    let q = out.idx(j, v_dim + a, k);
                    out.structure[p] = c;
                    out.structure[q] = -c;
                }
            }
            for b in 0..h.dim {
                for k in 0..h.dim {
                    let p = out.idx(v_dim + a, v_dim + b, v_dim + k);
                    out.structure[p] = h.structure_constant(a, b, k);
                }
            }
        }
        out.validate_jacobi()?;
        Ok(out)
    }

    /// Quotient by the ideal spanned by `ideal_basis`.
    ///
    /// The quotient basis is a subset of the original coordinate vectors
    /// (chosen by pivoted Gram-Schmidt), so labels carry over. Returns the
    /// quotient algebra and the projection `p` along the ideal.
    pub fn quotient(&self, ideal_basis: &[Element]) -> Result<(LieAlgebra, LinearMap)> {
        let n = self.dim;
        for b in ideal_basis {
            check_dim(n, b.len())?;
        }
        let ideal = if ideal_basis.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            linalg::image(&linalg::columns_to_matrix(n, ideal_basis))
        };
        let r = ideal.ncols();
        let scale = 1.0 + self.max_structure_constant();
        for i in 0..n {
            let ei = self.basis_vector(i);
            for q in ideal.column_iter() {
                let br = self.bracket(&ei, &q.into_owned())?;
                let proj = &ideal * (ideal.transpose() * &br);
                let residual = (&br - proj).amax();
                if residual > STRUCTURE_TOL * scale {
                    return Err(Error::Validation(format!(
                        "span is not an ideal: [{}, ·] leaves it (residual {residual:e})",
                        self.labels[i]
                    )));
                }
            }
        }

        // Pivoted choice of complementary coordinate axes.
        let m = n - r;
        let mut ortho: Vec<DVector<f64>> = ideal.column_iter().map(|c| c.into_owned()).collect();
        let mut chosen = Vec::with_capacity(m);
        for _ in 0..m {
            let mut best: Option<(usize, f64, DVector<f64>)> = None;
            for k in 0..n {
                if chosen.contains(&k) {
                    continue;
                }
                let mut res = self.basis_vector(k);
                for q in &ortho {
                    let c = q.dot(&res);
                    res -= q * c;
                }
                let nr = res.norm();
                if best.as_ref().is_none_or(|(_, b, _)| nr > *b + 1e-12) {
                    best = Some((k, nr, res));
                }
            }
            let (k, nr, res) = best.expect("a complementary axis exists");
            chosen.push(k);
            ortho.push(res / nr);
        }
        chosen.sort_unstable();

        let mut full = DMatrix::zeros(n, n);
        for (a, &k) in chosen.iter().enumerate() {
            full[(k, a)] = 1.0;
        }
        for c in 0..r {
            full.set_column(m + c, &ideal.column(c));
        }
        let inv = full
            .try_inverse()
            .ok_or_else(|| Error::Validation("complement construction failed".into()))?;
        let p = LinearMap::new(inv.rows(0, m).into_owned());

        let labels: Vec<String> = chosen.iter().map(|&k| self.labels[k].clone()).collect();
        let mut q = LieAlgebra {
            dim: m,
            structure: vec![0.0; m * m * m],
            labels,
            split: None,
        };
        for a in 0..m {
            for b in 0..m {
                let br = self.bracket(&self.basis_vector(chosen[a]), &self.basis_vector(chosen[b]))?;
                let img = p.matrix() * br;
                for c in 0..m {
                    let idx = q.idx(a, b, c);
                    q.structure[idx] = if img[c].abs() < 1e-14 * scale { 0.0 } else { img[c] };
                }
            }
        }
        // Exact antisymmetry after floating-point projection.
        for a in 0..m {
            for b in (a + 1)..m {
                for c in 0..m {
                    let (x, y) = (q.idx(a, b, c), q.idx(b, a, c));
                    let avg = 0.5 * (q.structure[x] - q.structure[y]);
                    q.structure[x] = avg;
                    q.structure[y] = -avg;
                }
            }
            for c in 0..m {
                let x = q.idx(a, a, c);
                q.structure[x] = 0.0;
            }
        }
        let residual = homomorphism_residual(self, &q, &p)?;
        if residual > STRUCTURE_TOL * scale {
            return Err(Error::Validation(format!(
                "projection does not respect brackets (residual {residual:e})"
            )));
        }
        Ok((q, p))
    }
}

/// Largest `|p([e_i, e_j]) - [p e_i, p e_j]|` over basis pairs of `source`.
pub fn homomorphism_residual(source: &LieAlgebra, target: &LieAlgebra, p: &LinearMap) -> Result<f64> {
    check_dim(source.dim(), p.source_dim())?;
    check_dim(target.dim(), p.target_dim())?;
    let mut worst = 0.0_f64;
    for i in 0..source.dim() {
        for j in (i + 1)..source.dim() {
            let ei = source.basis_vector(i);
            let ej = source.basis_vector(j);
            let lhs = p.apply(&source.bracket(&ei, &ej)?)?;
            let rhs = target.bracket(&p.apply(&ei)?, &p.apply(&ej)?)?;
            worst = worst.max((lhs - rhs).amax());
        }
    }
    Ok(worst)
}
