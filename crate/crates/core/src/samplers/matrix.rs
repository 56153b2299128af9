use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::bingham::{bingham_step_in_basis, centered, check_symmetric};
use super::{sample_mf_vector, uniform_sphere};
use crate::error::{dim_err, input_err, Result};
use crate::linalg::{null_space_basis, svd_desc, sym_eigen_desc};
use crate::manifold::{random_uniform_frame, OrthonormalFrame};

/// Sweeps run by [`sample_mf_matrix`] before returning.
pub const DEFAULT_BURN_SWEEPS: usize = 25;

/// A matrix Gibbs chain: the current frame and how many sweeps produced it.
#[derive(Debug, Clone)]
pub struct GibbsKernelState {
    current: OrthonormalFrame,
    sweep_count: u64,
}

impl GibbsKernelState {
    pub fn new(start: OrthonormalFrame) -> Self {
        Self { current: start, sweep_count: 0 }
    }

    pub fn current(&self) -> &OrthonormalFrame {
        &self.current
    }

    pub fn sweep_count(&self) -> u64 {
        self.sweep_count
    }

    pub fn into_current(self) -> OrthonormalFrame {
        self.current
    }

    /// One sweep targeting `etr(CᵀU)`.
    pub fn mf_sweep<G: Rng + ?Sized>(&mut self, c: &DMatrix<f64>, rng: &mut G) -> Result<()> {
        self.current = sample_mf_matrix_gibbs(c, &self.current, rng)?;
        self.sweep_count += 1;
        Ok(())
    }

    /// One sweep targeting `etr(diag(B)·UᵀAU)`.
    pub fn bingham_sweep<G: Rng + ?Sized>(&mut self, a: &DMatrix<f64>, b: &DVector<f64>, rng: &mut G) -> Result<()> {
        self.current = sample_bingham_matrix_gibbs(a, b, &self.current, rng)?;
        self.sweep_count += 1;
        Ok(())
    }
}

fn other_columns(u: &DMatrix<f64>, j: usize) -> DMatrix<f64> {
    u.clone().remove_column(j)
}

/// One column-wise Gibbs sweep whose stationary distribution is the matrix
/// von Mises-Fisher `etr(CᵀU)`. Each column is an exact draw from its full
/// conditional.
pub fn sample_mf_matrix_gibbs<G: Rng + ?Sized>(
    c: &DMatrix<f64>,
    current: &OrthonormalFrame,
    rng: &mut G,
) -> Result<OrthonormalFrame> {
    if c.shape() != (current.rows(), current.cols()) {
        return dim_err(format!(
            "parameter is {}×{}, frame is {}×{}",
            c.nrows(),
            c.ncols(),
            current.rows(),
            current.cols()
        ));
    }
    if c.iter().any(|x| !x.is_finite()) {
        return input_err("parameter matrix has non-finite entries");
    }
    let mut u = current.as_matrix().clone();
    for j in 0..u.ncols() {
        let basis = null_space_basis(&other_columns(&u, j));
        let cj = c.column(j);
        let z = if cj.iter().all(|&x| x == 0.0) {
            uniform_sphere(basis.ncols(), rng)
        } else {
            sample_mf_vector(&basis.tr_mul(&cj), rng)?
        };
        u.set_column(j, &(&basis * z));
    }
    Ok(OrthonormalFrame::from_parts(u))
}

/// Approximate independent draw from `etr(CᵀU)`: `burn_sweeps` Gibbs sweeps
/// started at the mode (the orthogonal polar factor of `C`), or at a uniform
/// frame when `C = 0`.
pub fn sample_mf_matrix<G: Rng + ?Sized>(
    c: &DMatrix<f64>,
    burn_sweeps: usize,
    rng: &mut G,
) -> Result<OrthonormalFrame> {
    let (m, r) = c.shape();
    let start = if c.iter().all(|&x| x == 0.0) {
        random_uniform_frame(m, r, rng)?
    } else {
        if r > m {
            return dim_err(format!("cannot place {r} orthonormal columns in dimension {m}"));
        }
        let (h, _, k) = svd_desc(c);
        OrthonormalFrame::from_parts(h * k.transpose())
    };
    let mut state = GibbsKernelState::new(start);
    for _ in 0..burn_sweeps.max(1) {
        state.mf_sweep(c, rng)?;
    }
    Ok(state.into_current())
}

/// One column-wise Gibbs sweep whose stationary distribution is the matrix
/// Bingham `etr(diag(B)·UᵀAU)`.
///
/// Column `j` is updated by one rotation sweep of the vector Bingham kernel
/// with parameter `B_j·NᵀAN` in the complement basis `N`, started from the
/// current column. `B_j = 0` resamples the column uniformly.
pub fn sample_bingham_matrix_gibbs<G: Rng + ?Sized>(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    current: &OrthonormalFrame,
    rng: &mut G,
) -> Result<OrthonormalFrame> {
    check_symmetric(a)?;
    let (m, r) = (current.rows(), current.cols());
    if a.nrows() != m {
        return dim_err(format!("A is {}×{}, frame has {m} rows", a.nrows(), a.ncols()));
    }
    if b.len() != r {
        return dim_err(format!("B has length {}, frame has {r} columns", b.len()));
    }
    if b.iter().any(|x| !x.is_finite()) {
        return input_err("B has non-finite entries");
    }
    let a = centered(a);
    let mut u = current.as_matrix().clone();
    for j in 0..r {
        let basis = null_space_basis(&other_columns(&u, j));
        let z = if b[j] == 0.0 {
            uniform_sphere(basis.ncols(), rng)
        } else {
            let mut p = basis.tr_mul(&(&a * &basis)) * b[j];
            p = (&p + p.transpose()) * 0.5;
            let (l, e) = sym_eigen_desc(&p);
            let mut z0 = basis.tr_mul(&u.column(j));
            z0 /= z0.norm();
            bingham_step_in_basis(l.as_slice(), &e, &z0, rng)
        };
        u.set_column(j, &(&basis * z));
    }
    Ok(OrthonormalFrame::from_parts(u))
}
