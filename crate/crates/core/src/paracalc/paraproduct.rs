//! Bony decomposition: f·g = f≺g + f∘g + f≻g.
//!
//! All block products go through `Transformer::product`, which is an exact
//! truncated convolution for Nyquist-free inputs, so the reconstruction
//! identity holds to accumulated FFT roundoff (~1e-13 relative), well inside
//! the 1e-10 contract. The symmetries f∘g = g∘f and f≺g = g≻f are bitwise:
//! ≻ is literally ≺ with swapped arguments, and the resonant accumulator
//! only ever combines swap-paired terms through single commutative adds.

use crate::error::CoreError;
use crate::field::{Field, Transformer};
use crate::scalar::Real;
use crate::Result;

use super::partition::DyadicPartition;

/// All Littlewood-Paley blocks of f: index 0 is the chi block (j = -1),
/// index j+1 the annulus block j.
pub fn decompose<S: Real>(f: &Field<S>, part: &DyadicPartition) -> Vec<Field<S>> {
    let grid = f.grid();
    let jm = part.j_max();
    let mut out: Vec<Field<S>> = (-1..=jm)
        .map(|j| Field::zeros(grid, format!("{}[{}]", f.label(), j)))
        .collect();
    for flat in 0..grid.modes() {
        let c = f.coeffs()[flat];
        if c.re == S::zero() && c.im == S::zero() {
            continue;
        }
        let r = grid.freq_norm_sq(flat).sqrt();
        for j in -1..=jm {
            let s = part.block_symbol(j, r).expect("j in range by construction");
            if s != 0.0 {
                out[(j + 1) as usize].coeffs_mut()[flat] = c * S::of(s);
            }
        }
    }
    out
}

/// Single block Delta_j f, j in [-1, j_max].
pub fn lp_block<S: Real>(f: &Field<S>, j: i32, part: &DyadicPartition) -> Result<Field<S>> {
    if j < -1 || j > part.j_max() {
        return Err(CoreError::BlockOutOfRange { j, j_max: part.j_max() });
    }
    let grid = f.grid();
    let mut out = Field::zeros(grid, format!("{}[{}]", f.label(), j));
    for flat in 0..grid.modes() {
        let r = grid.freq_norm_sq(flat).sqrt();
        let s = part.block_symbol(j, r)?;
        if s != 0.0 {
            out.coeffs_mut()[flat] = f.coeffs()[flat] * S::of(s);
        }
    }
    Ok(out)
}

/// f ≺ g = Σ_j S_{j-2}f · Δ_j g, with S_{j-2}f = Σ_{i ≤ j-2} Δ_i f.
pub fn paraproduct_less<S: Real>(
    tf: &mut Transformer<S>,
    f: &Field<S>,
    g: &Field<S>,
    part: &DyadicPartition,
) -> Result<Field<S>> {
    f.check_same_grid(g)?;
    let bf = decompose(f, part);
    let bg = decompose(g, part);
    let jm = part.j_max();
    let mut acc = Field::zeros(f.grid(), format!("({})<({})", f.label(), g.label()));
    let mut partial = Field::zeros(f.grid(), "partial");
    for j in 1..=jm {
        // bring the running sum up to S_{j-2}; empty for j < 1
        partial.axpy(1.0, &bf[(j - 1) as usize])?;
        let p = tf.product(&partial, &bg[(j + 1) as usize])?;
        acc.axpy(1.0, &p)?;
    }
    Ok(acc)
}

/// f ≻ g := g ≺ f (same code path, so f≺g = g≻f is bitwise exact).
pub fn paraproduct_greater<S: Real>(
    tf: &mut Transformer<S>,
    f: &Field<S>,
    g: &Field<S>,
    part: &DyadicPartition,
) -> Result<Field<S>> {
    let mut out = paraproduct_less(tf, g, f, part)?;
    out.set_label(format!("({})>({})", f.label(), g.label()));
    Ok(out)
}

/// f ∘ g = Σ_{|i-j|≤1} Δ_i f · Δ_j g.
///
/// Accumulation order: all diagonal terms (swap-invariant products), then per
/// adjacent pair the single sum Δ_j f Δ_{j+1} g + Δ_{j+1} f Δ_j g, which a
/// swap of f and g turns into the same two addends in the other order of one
/// commutative IEEE add. Hence f∘g = g∘f bitwise.
pub fn resonant<S: Real>(
    tf: &mut Transformer<S>,
    f: &Field<S>,
    g: &Field<S>,
    part: &DyadicPartition,
) -> Result<Field<S>> {
    f.check_same_grid(g)?;
    let bf = decompose(f, part);
    let bg = decompose(g, part);
    let jm = part.j_max();
    let mut acc = Field::zeros(f.grid(), format!("({})o({})", f.label(), g.label()));
    for j in -1..=jm {
        let p = tf.product(&bf[(j + 1) as usize], &bg[(j + 1) as usize])?;
        acc.axpy(1.0, &p)?;
    }
    for j in -1..jm {
        let lo = (j + 1) as usize;
        let up = tf.product(&bf[lo], &bg[lo + 1])?;
        let mut down = tf.product(&bf[lo + 1], &bg[lo])?;
        down.axpy(1.0, &up)?;
        acc.axpy(1.0, &down)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::TorusGrid;
    use crate::paracalc::synth::synth_field;

    fn setup(n: usize) -> (TorusGrid, DyadicPartition, Transformer<f64>) {
        let g = TorusGrid::new_2d(n, 1.0).unwrap();
        (g, DyadicPartition::for_grid(&g), Transformer::new())
    }

    fn rel(a: &Field<f64>, b: &Field<f64>) -> f64 {
        let mut diff = a.clone();
        diff.axpy(-1.0, b).unwrap();
        diff.l2_norm() / b.l2_norm().max(1e-300)
    }

    #[test]
    fn blocks_reconstruct_field() {
        let (g, part, _) = setup(64);
        let f = synth_field::<f64>(g, -0.5, 11).unwrap();
        let mut sum = Field::zeros(g, "sum");
        for b in decompose(&f, &part) {
            sum.axpy(1.0, &b).unwrap();
        }
        let d = rel(&sum, &f);
        assert!(d <= 1e-10, "block reconstruction defect {d:.3e}");
    }

    #[test]
    fn constant_field_lives_in_chi_block() {
        let (g, part, _) = setup(32);
        let mut f = Field::<f64>::zeros(g, "const");
        f.add_constant(2.5);
        let b = decompose(&f, &part);
        assert!((b[0].mean() - 2.5).abs() < 1e-14);
        for (j, blk) in b.iter().enumerate().skip(1) {
            assert_eq!(blk.l2_norm(), 0.0, "block {} should be empty", j as i32 - 1);
        }
    }

    #[test]
    fn bony_reconstruction_and_symmetry() {
        let (g, part, mut tf) = setup(32);
        let f = synth_field::<f64>(g, -0.6, 3).unwrap();
        let h = synth_field::<f64>(g, 0.4, 4).unwrap();
        let less = paraproduct_less(&mut tf, &f, &h, &part).unwrap();
        let grt = paraproduct_greater(&mut tf, &f, &h, &part).unwrap();
        let res = resonant(&mut tf, &f, &h, &part).unwrap();
        let mut sum = less.clone();
        sum.axpy(1.0, &grt).unwrap();
        sum.axpy(1.0, &res).unwrap();
        let direct = tf.product(&f, &h).unwrap();
        let d = rel(&sum, &direct);
        assert!(d <= 1e-10, "Bony reconstruction defect {d:.3e}");

        // bitwise symmetries
        let res_swap = resonant(&mut tf, &h, &f, &part).unwrap();
        assert_eq!(res.coeffs(), res_swap.coeffs(), "f∘g must equal g∘f bitwise");
        let grt_swap = paraproduct_less(&mut tf, &h, &f, &part).unwrap();
        assert_eq!(grt.coeffs(), grt_swap.coeffs(), "f≻g must equal g≺f bitwise");
    }

    #[test]
    fn naive_double_loop_oracle() {
        // group the full (i,j) product table by |i-j| and compare each output
        let (g, part, mut tf) = setup(32);
        let f = synth_field::<f64>(g, -0.3, 7).unwrap();
        let h = synth_field::<f64>(g, 0.1, 8).unwrap();
        let bf = decompose(&f, &part);
        let bh = decompose(&h, &part);
        let jm = part.j_max();
        let mut naive_less = Field::zeros(g, "nl");
        let mut naive_grt = Field::zeros(g, "ng");
        let mut naive_res = Field::zeros(g, "nr");
        for i in -1..=jm {
            for j in -1..=jm {
                let p = tf.product(&bf[(i + 1) as usize], &bh[(j + 1) as usize]).unwrap();
                let target = if i <= j - 2 {
                    &mut naive_less
                } else if j <= i - 2 {
                    &mut naive_grt
                } else {
                    &mut naive_res
                };
                target.axpy(1.0, &p).unwrap();
            }
        }
        let less = paraproduct_less(&mut tf, &f, &h, &part).unwrap();
        let grt = paraproduct_greater(&mut tf, &f, &h, &part).unwrap();
        let res = resonant(&mut tf, &f, &h, &part).unwrap();
        let scale = tf.product(&f, &h).unwrap().l2_norm();
        for (got, want, name) in [
            (&less, &naive_less, "less"),
            (&grt, &naive_grt, "greater"),
            (&res, &naive_res, "resonant"),
        ] {
            let mut diff = (*got).clone();
            diff.axpy(-1.0, want).unwrap();
            let d = diff.l2_norm() / scale;
            assert!(d <= 1e-10, "{name} deviates from naive grouping by {d:.3e}");
        }
    }

    #[test]
    fn two_mode_resonant_hand_computation() {
        // Both inputs a single cosine pair at the same frequency: every block
        // product is either the full product or zero, so f∘g must equal f·g
        // minus nothing (the pair sits in at most two adjacent blocks).
        let (g, part, mut tf) = setup(32);
        let m = [3i64, 0];
        let mut cf = vec![num_complex::Complex::new(0.0f64, 0.0); g.modes()];
        cf[g.flat_of_mode(m).unwrap()] = num_complex::Complex::new(0.5, 0.0);
        cf[g.flat_of_mode([-3, 0]).unwrap()] = num_complex::Complex::new(0.5, 0.0);
        let f = Field::from_coeffs(g, cf, "cos3").unwrap();
        let res = resonant(&mut tf, &f, &f, &part).unwrap();
        let less = paraproduct_less(&mut tf, &f, &f, &part).unwrap();
        let direct = tf.product(&f, &f).unwrap();
        // |omega| = 6*pi for mode 3 on L=1; blocks j with 0.75 <= 6pi/2^j <= 2
        // are j = 4 (6pi/16 = 1.178); S_{j-2} is then empty below j = 6, and
        // the mode has no content at j >= 5, so the paraproducts vanish and
        // the resonant part carries the whole product.
        assert!(less.l2_norm() <= 1e-14, "less = {:.3e}", less.l2_norm());
        let d = rel(&res, &direct);
        assert!(d <= 1e-12, "resonant vs direct product: {d:.3e}");
    }

    #[test]
    fn bilinearity() {
        let (g, part, mut tf) = setup(32);
        let f1 = synth_field::<f64>(g, -0.2, 21).unwrap();
        let f2 = synth_field::<f64>(g, -0.2, 22).unwrap();
        let h = synth_field::<f64>(g, 0.3, 23).unwrap();
        let mut fsum = f1.clone();
        fsum.axpy(1.0, &f2).unwrap();
        for op in [paraproduct_less::<f64>, resonant::<f64>] {
            let whole = op(&mut tf, &fsum, &h, &part).unwrap();
            let mut parts = op(&mut tf, &f1, &h, &part).unwrap();
            let p2 = op(&mut tf, &f2, &h, &part).unwrap();
            parts.axpy(1.0, &p2).unwrap();
            let d = rel(&parts, &whole);
            assert!(d <= 1e-10, "bilinearity defect {d:.3e}");
        }
    }
}
