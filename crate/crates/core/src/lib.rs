//! Spectral toolkit for the renormalized two-dimensional continuous Anderson
//! Hamiltonian H = -Lap + xi on the torus.
//!
//! The crate is organized bottom-up:
//!
//! - [`field`]: periodic grids, Fourier-coefficient fields, FFT transforms,
//!   Fourier multipliers sigma(D), sigma_a(D), and dealiased products.
//! - [`paracalc`]: Littlewood-Paley blocks, Besov norm estimation, Bony
//!   paraproducts / resonant products, and the commutators R and C.
//! - [`noise`]: periodic white noise, mollification xi_eps, the
//!   renormalization constant c_eps, and the enhanced pair
//!   Xi = (xi_eps, Xi2_eps).
//! - [`operator`]: the matrix-free Hamiltonian, Lanczos eigensolvers, the
//!   resolvent fixed point, and the paracontrolled decomposition f -> (f#, fb).
//! - [`anderson1d`]: the 1D Dirichlet Anderson operator: Riccati explosion
//!   counting, shooting, finite differences, and McKean ground-state
//!   statistics.
//! - [`experiments`]: seeded Monte Carlo studies (renormalized convergence,
//!   mollifier universality, Lipschitz probe, scaling identity, log L growth,
//!   tail shape, localization diagnostic).
//! - [`snapshot`]: binary field persistence used by the CLI.
//!
//! The field layer is generic over the scalar (`f32`/`f64`) via [`scalar::Real`];
//! everything above the field layer is pinned to `f64`, where all tolerances
//! live. Concrete aliases are exported at the crate root.

pub mod anderson1d;
pub mod error;
pub mod experiments;
pub mod field;
pub mod linalg;
pub mod noise;
pub mod operator;
pub mod paracalc;
pub mod rng;
pub mod scalar;
pub mod snapshot;
pub mod stats;

pub use error::CoreError;
pub use field::{Field, MultiplierSpec, TorusGrid, Transformer};

/// Single-precision field.
pub type Field32 = field::Field<f32>;
/// Double-precision field: the working type of every module above `field`.
pub type Field64 = field::Field<f64>;
/// Double-precision transformer.
pub type Transformer64 = field::Transformer<f64>;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, CoreError>;
