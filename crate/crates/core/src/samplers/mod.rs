//! Random variates on spheres and Stiefel manifolds.
//!
//! | target                         | routine                          | kind                |
//! |--------------------------------|----------------------------------|---------------------|
//! | `exp(cᵀu)` on `S^{m−1}`        | [`sample_mf_vector`]             | exact (Wood)        |
//! | `exp(uᵀAu)` on `S^{m−1}`       | [`sample_bingham_vector`]        | exact (ACG envelope)|
//! | `exp(uᵀAu)` on `S^{m−1}`       | [`sample_bingham_vector_gibbs`]  | Markov kernel       |
//! | `etr(CᵀU)` on `V(R, m)`        | [`sample_mf_matrix_gibbs`]       | Markov kernel       |
//! | `etr(diag(B)UᵀAU)` on `V(R, m)`| [`sample_bingham_matrix_gibbs`]  | Markov kernel       |
//!
//! The matrix kernels update one column at a time. Given the other columns,
//! column `j` lives on the unit sphere of their `(m − R + 1)`-dimensional
//! orthogonal complement; in an orthonormal basis `N` of that complement the
//! conditional is vector MF with parameter `Nᵀc_j`, or vector Bingham with
//! parameter `B_j·NᵀAN`.

mod bingham;
mod matrix;
mod truncnorm;
mod vmf;
mod von_mises;

pub use bingham::{sample_bingham_vector, sample_bingham_vector_gibbs};
pub use matrix::{
    sample_bingham_matrix_gibbs, sample_mf_matrix, sample_mf_matrix_gibbs, GibbsKernelState, DEFAULT_BURN_SWEEPS,
};
pub use truncnorm::{sample_truncated_normal, Truncation};
pub use vmf::sample_mf_vector;
pub use von_mises::sample_von_mises;

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

/// Uniform point on the unit sphere in `R^q`.
pub(crate) fn uniform_sphere<G: Rng + ?Sized>(q: usize, rng: &mut G) -> DVector<f64> {
    loop {
        let g = DVector::from_fn(q, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = g.norm();
        if norm > 1e-300 {
            return g / norm;
        }
    }
}
