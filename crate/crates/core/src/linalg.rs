//! Dense linear-algebra helpers shared by the samplers and models.

use nalgebra::{DMatrix, DVector, SymmetricEigen, QR, SVD};

use crate::error::{dim_err, Result};

/// `max |MᵀM − I|` over all entries.
pub fn orthonormality_error(m: &DMatrix<f64>) -> f64 {
    let gram = m.transpose() * m;
    let mut worst = 0.0_f64;
    for j in 0..gram.ncols() {
        for i in 0..gram.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// `max |A − Aᵀ|` over all entries.
pub fn symmetry_error(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Symmetry check with a tolerance of `1e-12` scaled by the largest entry
/// (never below an absolute `1e-12`).
pub fn is_symmetric(a: &DMatrix<f64>) -> bool {
    if !a.is_square() {
        return false;
    }
    let scale = a.amax().max(1.0);
    symmetry_error(a) <= 1e-12 * scale
}

/// Thin Q factor of `m` with columns flipped so that the triangular factor has
/// a non-negative diagonal. This removes the sign ambiguity of Householder QR.
pub fn qr_positive(m: DMatrix<f64>) -> DMatrix<f64> {
    let qr = QR::new(m);
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Orthonormal basis (`m × (m − k)`) of the orthogonal complement of the
/// column span of `retained` (`m × k`, orthonormal columns), taken from the
/// trailing columns of the full Householder Q.
pub fn null_space_basis(retained: &DMatrix<f64>) -> DMatrix<f64> {
    let m = retained.nrows();
    let k = retained.ncols();
    if k == 0 {
        return DMatrix::identity(m, m);
    }
    let qr = QR::new(retained.clone());
    let mut qt = DMatrix::identity(m, m);
    qr.q_tr_mul(&mut qt);
    // rows k.. of Qᵀ are the complement directions
    qt.rows(k, m - k).transpose()
}

/// Eigendecomposition of a symmetric matrix with eigenvalues in
/// non-increasing order (eigenvectors as matching columns).
pub fn sym_eigen_desc(a: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(a.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Thin SVD `(U, s, V)` with singular values non-increasing.
pub fn svd_desc(m: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let svd = SVD::new(m.clone(), true, true);
    let u = svd.u.expect("U requested");
    let v = svd.v_t.expect("Vᵀ requested").transpose();
    (u, svd.singular_values, v)
}

/// Best rank-`r` approximation of `m` in Frobenius norm (truncated SVD).
pub fn truncated_svd(m: &DMatrix<f64>, r: usize) -> Result<DMatrix<f64>> {
    let k = m.nrows().min(m.ncols());
    if r > k {
        return dim_err(format!("rank {r} exceeds min dimension {k}"));
    }
    let (u, s, v) = svd_desc(m);
    let ur = u.columns(0, r);
    let vr = v.columns(0, r);
    let sr = DMatrix::from_diagonal(&s.rows(0, r).into_owned());
    Ok(ur * sr * vr.transpose())
}

/// Principal angles (radians, ascending) between the column spans of two
/// matrices with orthonormal columns.
pub fn principal_angles(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    if a.nrows() != b.nrows() {
        return dim_err(format!("ambient dimensions {} and {} differ", a.nrows(), b.nrows()));
    }
    let cross = a.transpose() * b;
    let s = SVD::new(cross, false, false).singular_values;
    let mut angles: Vec<f64> = s.iter().map(|c| c.clamp(-1.0, 1.0).acos()).collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// Mean squared entrywise difference.
pub fn mean_squared_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return dim_err(format!("shapes {:?} and {:?} differ", a.shape(), b.shape()));
    }
    Ok((a - b).norm_squared() / (a.len() as f64))
}
