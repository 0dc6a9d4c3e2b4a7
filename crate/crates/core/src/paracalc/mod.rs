//! Littlewood-Paley analysis on the torus: dyadic blocks, Besov norm
//! estimation, Bony paraproducts, and the commutators used by the
//! paracontrolled machinery.

mod besov;
mod commutator;
mod paraproduct;
mod partition;
mod synth;

pub use besov::{besov_norm, sobolev_norm_direct, BesovNormReport, LebesgueExp};
pub use commutator::{commutator_c, commutator_r};
pub use paraproduct::{
    decompose, lp_block, paraproduct_greater, paraproduct_less, resonant,
};
pub use partition::{smooth_step, DyadicPartition};
pub use synth::synth_field;
