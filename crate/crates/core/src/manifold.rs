//! Points of the Stiefel manifold `V(R, m)` and the quadratic exponential
//! family on it.
//!
//! The matrix BMF family has unnormalized density `etr(CᵀU + diag(B)·UᵀAU)`
//! and the vector family `exp(cᵀu + uᵀAu)`. Normalizing constants are not
//! computed anywhere in this crate.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{dim_err, input_err, Error, Result};
use crate::linalg::{is_symmetric, orthonormality_error, qr_positive};

/// Maximum entrywise deviation of `UᵀU` from the identity that a frame may carry.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// An `m × R` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame {
    mat: DMatrix<f64>,
}

impl OrthonormalFrame {
    /// Validates `mat` against the frame invariants.
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        let (m, r) = mat.shape();
        if r == 0 || m == 0 {
            return dim_err("frame must have at least one row and one column");
        }
        if r > m {
            return dim_err(format!("frame has {r} columns but only {m} rows"));
        }
        let err = orthonormality_error(&mat);
        if err.is_nan() || err > ORTHONORMALITY_TOL {
            return Err(Error::Constraint(format!("columns are not orthonormal: max |UᵀU − I| = {err:e}")));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix the caller has just built from orthonormal pieces,
    /// repairing drift past the tolerance.
    pub(crate) fn from_parts(mat: DMatrix<f64>) -> Self {
        let mut frame = Self { mat };
        frame.enforce();
        frame
    }

    /// `m`
    pub fn rows(&self) -> usize {
        self.mat.nrows()
    }

    /// `R`
    pub fn cols(&self) -> usize {
        self.mat.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    pub fn orthonormality_error(&self) -> f64 {
        orthonormality_error(&self.mat)
    }

    /// Re-orthonormalizes with a sign-fixed thin QR if accumulated rounding
    /// has pushed the frame past [`ORTHONORMALITY_TOL`]. Returns whether a
    /// repair happened.
    pub fn enforce(&mut self) -> bool {
        if self.orthonormality_error() > ORTHONORMALITY_TOL {
            self.mat = qr_positive(self.mat.clone());
            true
        } else {
            false
        }
    }
}

/// Draws a frame from the uniform (Haar) distribution on `V(R, m)`.
///
/// Gaussian `m × R` matrix, thin QR, columns signed so that `diag(R) > 0`.
pub fn random_uniform_frame<G: Rng + ?Sized>(m: usize, r: usize, rng: &mut G) -> Result<OrthonormalFrame> {
    if m == 0 || r == 0 {
        return dim_err(format!("frame dimensions must be positive, got {m}×{r}"));
    }
    if r > m {
        return dim_err(format!("cannot draw {r} orthonormal columns in dimension {m}"));
    }
    let gauss = DMatrix::from_fn(m, r, |_, _| rng.sample::<f64, _>(StandardNormal));
    Ok(OrthonormalFrame::from_parts(qr_positive(gauss)))
}

/// Parameters `(A, B, C)` of the matrix BMF density `etr(CᵀU + diag(B)·UᵀAU)`.
///
/// `B` is kept in non-increasing order; [`BmfParams::new`] permutes `B` and
/// the columns of `C` together to get there.
#[derive(Debug, Clone, PartialEq)]
pub struct BmfParams {
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DMatrix<f64>,
    order: Vec<usize>,
}

impl BmfParams {
    /// Same as [`canonicalize_bmf`].
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: DMatrix<f64>) -> Result<Self> {
        canonicalize_bmf(a, b, c)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    /// `order[k]` is the original column index now stored at position `k`.
    pub fn column_order(&self) -> &[usize] {
        &self.order
    }

    /// `m`
    pub fn rows(&self) -> usize {
        self.c.nrows()
    }

    /// `R`
    pub fn cols(&self) -> usize {
        self.c.ncols()
    }

    /// Reorders the columns of a frame given in the original column labelling
    /// into the canonical one.
    pub fn permute_frame(&self, u: &OrthonormalFrame) -> Result<OrthonormalFrame> {
        if u.cols() != self.order.len() {
            return dim_err(format!("frame has {} columns, parameters {}", u.cols(), self.order.len()));
        }
        let src = u.as_matrix();
        let mat = DMatrix::from_fn(src.nrows(), src.ncols(), |i, k| src[(i, self.order[k])]);
        Ok(OrthonormalFrame { mat })
    }
}

/// Sorts `B` into non-increasing order, carrying the columns of `C` along.
///
/// The density at a frame `U` equals the canonical density at `U` with its
/// columns permuted the same way (see [`BmfParams::permute_frame`]).
pub fn canonicalize_bmf(a: DMatrix<f64>, b: DVector<f64>, c: DMatrix<f64>) -> Result<BmfParams> {
    let m = c.nrows();
    let r = c.ncols();
    if a.shape() != (m, m) {
        return dim_err(format!("A is {:?}, expected {m}×{m}", a.shape()));
    }
    if b.len() != r {
        return dim_err(format!("B has length {}, expected {r}", b.len()));
    }
    if !is_symmetric(&a) {
        return input_err("A is not symmetric");
    }
    let mut order: Vec<usize> = (0..r).collect();
    // stable, so ties keep their original relative order
    order.sort_by(|&i, &j| b[j].total_cmp(&b[i]));
    let b = DVector::from_iterator(r, order.iter().map(|&k| b[k]));
    let c = DMatrix::from_fn(m, r, |i, k| c[(i, order[k])]);
    Ok(BmfParams { a, b, c, order })
}

/// `tr(CᵀU) + tr(diag(B)·UᵀAU)`.
pub fn log_density_bmf(params: &BmfParams, u: &OrthonormalFrame) -> Result<f64> {
    if u.rows() != params.rows() || u.cols() != params.cols() {
        return dim_err(format!(
            "frame is {}×{}, parameters are {}×{}",
            u.rows(),
            u.cols(),
            params.rows(),
            params.cols()
        ));
    }
    Ok(bmf_exponent(&params.a, &params.b, &params.c, u.as_matrix()))
}

/// The exponent of the matrix BMF density for arbitrary (unsorted) `B` and any
/// `m × R` matrix `U`.
pub(crate) fn bmf_exponent(a: &DMatrix<f64>, b: &DVector<f64>, c: &DMatrix<f64>, u: &DMatrix<f64>) -> f64 {
    let linear = c.dot(u);
    let au = a * u;
    let quadratic: f64 = (0..u.ncols()).map(|j| b[j] * u.column(j).dot(&au.column(j))).sum();
    linear + quadratic
}

/// Parameters `(c, A)` of the vector BMF density `exp(cᵀu + uᵀAu)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorBmfParams {
    c: DVector<f64>,
    a: DMatrix<f64>,
}

impl VectorBmfParams {
    pub fn new(c: DVector<f64>, a: DMatrix<f64>) -> Result<Self> {
        let m = c.len();
        if a.shape() != (m, m) {
            return dim_err(format!("A is {:?}, expected {m}×{m}", a.shape()));
        }
        if !is_symmetric(&a) {
            return input_err("A is not symmetric");
        }
        Ok(Self { c, a })
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
}

/// `cᵀu + uᵀAu` for a unit vector `u`.
pub fn log_density_vector_bmf(params: &VectorBmfParams, u: &DVector<f64>) -> Result<f64> {
    if u.len() != params.c.len() {
        return dim_err(format!("u has length {}, expected {}", u.len(), params.c.len()));
    }
    let norm = u.norm();
    if (norm - 1.0).abs() > ORTHONORMALITY_TOL {
        return Err(Error::Constraint(format!("u has norm {norm}, expected 1")));
    }
    Ok(params.c.dot(u) + u.dot(&(&params.a * u)))
}
