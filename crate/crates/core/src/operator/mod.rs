//! The renormalized Hamiltonian and everything that queries its spectrum:
//! matrix-free applies, Lanczos eigensolvers, resolvent fixed-point solves,
//! the paracontrolled decomposition, and derived observables.

mod hamiltonian;
mod lanczos;
mod observables;
mod paracontrolled;
mod resolvent;
mod shift_invert;

pub use hamiltonian::{dense_spectrum, HamiltonianOp};
pub use lanczos::{lowest_eigenpairs, SpectrumResult, DEFAULT_EIG_TOL};
pub use observables::{
    heat_semigroup, inverse_participation_ratio, rayleigh_quotient, HeatEvolution,
};
pub use paracontrolled::{
    paracontrolled_split, resonant_product_paracontrolled, ParacontrolledDecomposition,
    ParacontrolledNorms, PARACONTROLLED_GAMMA,
};
pub use resolvent::{
    resolve_auto, resolvent_fixed_point, resolvent_lambda_max, ResolventSolve,
};
pub use shift_invert::{shift_invert_lowest, ShiftInvertSolve};
