//! The two commutators the paracontrolled analysis rests on:
//! R(f,g,h) = (f≺g)∘h − f·(g∘h) and C(f,g) = m(D)(f≺g) − f≺m(D)g.

use crate::field::{apply_multiplier, Field, MultiplierSpec, Transformer};
use crate::scalar::Real;
use crate::Result;

use super::paraproduct::{paraproduct_less, resonant};
use super::partition::DyadicPartition;

/// R(f, g, h) = (f ≺ g) ∘ h − f · (g ∘ h), trilinear, smoothing.
pub fn commutator_r<S: Real>(
    tf: &mut Transformer<S>,
    f: &Field<S>,
    g: &Field<S>,
    h: &Field<S>,
    part: &DyadicPartition,
) -> Result<Field<S>> {
    f.check_same_grid(g)?;
    f.check_same_grid(h)?;
    let fg = paraproduct_less(tf, f, g, part)?;
    let mut lhs = resonant(tf, &fg, h, part)?;
    let gh = resonant(tf, g, h, part)?;
    let rhs = tf.product(f, &gh)?;
    lhs.axpy(-1.0, &rhs)?;
    lhs.set_label(format!("R({},{},{})", f.label(), g.label(), h.label()));
    Ok(lhs)
}

/// C(f, g) = m(D)(f ≺ g) − f ≺ m(D)g, bilinear, gains two derivatives for
/// m = sigma.
pub fn commutator_c<S: Real>(
    tf: &mut Transformer<S>,
    f: &Field<S>,
    g: &Field<S>,
    m: &MultiplierSpec,
    part: &DyadicPartition,
) -> Result<Field<S>> {
    f.check_same_grid(g)?;
    let fg = paraproduct_less(tf, f, g, part)?;
    let mut lhs = apply_multiplier(m, &fg)?;
    let mg = apply_multiplier(m, g)?;
    let rhs = paraproduct_less(tf, f, &mg, part)?;
    lhs.axpy(-1.0, &rhs)?;
    lhs.set_label(format!("C({},{})", f.label(), g.label()));
    Ok(lhs)
}
