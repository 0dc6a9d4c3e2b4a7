//! The 1D Anderson Hamiltonian -d^2/dx^2 + B' on [0, L] with Dirichlet
//! conditions: Brownian driving paths, Riccati explosion counting, shooting
//! and finite-difference eigenvalues, and McKean's Gumbel statistics for the
//! ground state.

mod fd;
mod mckean;
mod path;
mod riccati;
mod shooting;

pub use fd::fd_diagonalize;
pub use mckean::{mckean_centering, mckean_statistics, McKeanLevel, McKeanReport};
pub use path::BrownianPath;
pub use riccati::{first_explosion, ricatti_count, ricatti_trace, RiccatiTrace, X_CAP};
pub use shooting::eigenvalues_by_shooting;
