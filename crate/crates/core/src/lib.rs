//! Simulation from Bingham-von Mises-Fisher (BMF) distributions on the Stiefel
//! manifold, and two Bayesian models whose Gibbs samplers are built on them:
//!
//! * [`svd`]: reduced-rank mean estimation `Y = U diag(d) Vᵀ + E`, where the
//!   full conditionals of `U` and `V` are matrix von Mises-Fisher.
//! * [`eigenmodel`]: a probit latent-factor model for symmetric binary
//!   networks, where the full conditional of `U` is matrix Bingham.
//!
//! The building blocks live in [`manifold`] (frames, parameters, unnormalized
//! log-densities, uniform sampling) and [`samplers`] (vector and matrix
//! MF/Bingham variates, truncated normals).
//!
//! Every random function takes an explicit `&mut impl Rng`; nothing holds
//! global state, so independent chains only need independent streams (see
//! [`rng`]).

pub mod eigenmodel;
mod error;
pub mod linalg;
pub mod manifold;
pub mod rng;
pub mod samplers;
pub mod svd;

pub use error::{Error, Result};
pub use manifold::{
    canonicalize_bmf, log_density_bmf, log_density_vector_bmf, random_uniform_frame, BmfParams, OrthonormalFrame,
    VectorBmfParams, ORTHONORMALITY_TOL,
};
