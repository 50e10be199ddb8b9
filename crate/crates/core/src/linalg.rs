//! Small dense complex linear-algebra layer over `nalgebra`.
//!
//! Everything in the crate works on dynamically sized complex matrices. The
//! helpers here add the pieces `nalgebra` does not expose directly: a full
//! right-singular basis (thin SVDs drop the null space), null spaces, and
//! log-det of Hermitian matrices through their eigenvalues.

use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix};

/// Complex double.
pub type C64 = Complex<f64>;

/// Dense complex matrix, column-major.
pub type CMatrix = DMatrix<C64>;

/// Relative tolerance used for numerical rank decisions throughout the crate.
pub const RANK_TOL: f64 = 1e-9;

/// Singular values in descending order plus the full `cols x cols` matrix of
/// right-singular vectors, column `i` paired with `singular_values[i]` for
/// `i < min(rows, cols)`; trailing columns span the null space.
#[derive(Debug, Clone)]
pub struct FullSvd {
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

impl FullSvd {
    pub fn new(a: &CMatrix) -> Self {
        let (rows, cols) = a.shape();
        assert!(rows > 0 && cols > 0, "svd of an empty matrix");
        // Zero-padding the rows up to a square matrix makes the thin SVD
        // return a complete right basis without changing the singular values.
        let work = if rows < cols {
            let mut padded = CMatrix::zeros(cols, cols);
            padded.view_mut((0, 0), (rows, cols)).copy_from(a);
            padded
        } else {
            a.clone()
        };
        let svd = work.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let k = rows.min(cols);
        let singular_values = svd.singular_values.iter().take(k).copied().collect();
        Self {
            singular_values,
            v: v_t.adjoint(),
        }
    }

    /// Number of singular values above `RANK_TOL` relative to the largest.
    pub fn rank(&self) -> usize {
        numerical_rank(&self.singular_values)
    }

    pub fn columns(&self, indices: &[usize]) -> CMatrix {
        select_columns(&self.v, indices)
    }

    /// Orthonormal basis of the null space, `cols x (cols - rank)`.
    pub fn null_space(&self) -> CMatrix {
        let cols = self.v.ncols();
        let r = self.rank();
        self.v.columns(r, cols - r).into_owned()
    }
}

pub fn numerical_rank(sorted_desc: &[f64]) -> usize {
    match sorted_desc.first() {
        Some(&top) if top > 0.0 => sorted_desc
            .iter()
            .take_while(|&&s| s > RANK_TOL * top)
            .count(),
        _ => 0,
    }
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// True when the smallest singular value exceeds `RANK_TOL` times the largest.
pub fn is_full_rank(a: &CMatrix) -> bool {
    let sv = singular_values(a);
    !sv.is_empty() && numerical_rank(&sv) == sv.len()
}

pub fn select_columns(a: &CMatrix, indices: &[usize]) -> CMatrix {
    CMatrix::from_fn(a.nrows(), indices.len(), |i, j| a[(i, indices[j])])
}

/// Orthonormal basis for the orthogonal complement of the column space of
/// `b` inside `C^rows`. An empty `b` yields the identity.
pub fn column_complement(b: &CMatrix) -> CMatrix {
    let rows = b.nrows();
    if b.ncols() == 0 {
        return CMatrix::identity(rows, rows);
    }
    FullSvd::new(&b.adjoint()).null_space()
}

pub fn hconcat(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

pub fn vconcat(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.ncols());
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

/// `(A + A^H) / 2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitian_part(a)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `log2 det(I + A)` for Hermitian positive semidefinite `A`.
pub fn log2_det_identity_plus(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a)
        .into_iter()
        .map(|l| libm::log2(1.0 + l.max(0.0)))
        .sum()
}

/// `K^{-1/2}` for Hermitian PSD `K`, pseudo-inverting eigenvalues at or
/// below `eps`.
pub fn inverse_sqrt_psd(k: &CMatrix, eps: f64) -> CMatrix {
    let eig = hermitian_part(k).symmetric_eigen();
    let n = k.nrows();
    let scale = CMatrix::from_fn(n, n, |i, j| {
        if i == j && eig.eigenvalues[i] > eps {
            C64::new(1.0 / libm::sqrt(eig.eigenvalues[i]), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    &eig.eigenvectors * scale * eig.eigenvectors.adjoint()
}

/// Real parts of the diagonal.
pub fn real_diagonal(a: &CMatrix) -> Vec<f64> {
    a.diagonal().iter().map(|z| z.re).collect()
}

pub fn frobenius_sq(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| C64::new(data[i * cols + j], 0.0))
}
