//! Eigenvalues by shooting: bisection on the Riccati counting function
//! N(lambda) = #{explosions} = #{eigenvalues < lambda}, whose jump points
//! are the Dirichlet eigenvalues.

use crate::anderson1d::riccati::ricatti_count_capped;
use crate::anderson1d::BrownianPath;
use crate::error::CoreError;
use crate::Result;

const MAX_WIDENINGS: usize = 60;

/// Lowest `n` eigenvalues, each bracketed to width <= tol by bisection on
/// the counting function. The same stored path drives every lambda.
pub fn eigenvalues_by_shooting(path: &BrownianPath, n: usize, tol: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(CoreError::InvalidArgument("eigenvalue count must be >= 1".into()));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(CoreError::InvalidArgument(format!("bracket tolerance {tol}")));
    }
    let l = path.len();
    // lower end: widen down until the spectrum is entirely above
    let mut lo = -8.0;
    let mut attempts = 0usize;
    while ricatti_count_capped(path, lo, 1)? > 0 {
        attempts += 1;
        if attempts > MAX_WIDENINGS {
            return Err(CoreError::BracketNotFound { lo, hi: 0.0, attempts });
        }
        lo *= 2.0;
    }
    let mut out = Vec::with_capacity(n);
    let mut hi = lo;
    for k in 1..=n {
        // upper end: the k-th Dirichlet level of the free operator plus slack
        let mut guess = hi.max(((k + 1) as f64 * std::f64::consts::PI / l).powi(2) + 8.0);
        attempts = 0;
        while ricatti_count_capped(path, guess, k)? < k {
            attempts += 1;
            if attempts > MAX_WIDENINGS {
                return Err(CoreError::BracketNotFound { lo, hi: guess, attempts });
            }
            guess = 2.0 * guess + 8.0;
        }
        hi = guess;
        let (mut a, mut b) = (lo, hi);
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if ricatti_count_capped(path, mid, k)? >= k {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
        // count(a) <= k - 1 < k + 1, so a is a valid lower end for level k+1
        lo = a;
        hi = b;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anderson1d::{fd_diagonalize, ricatti_count};
    use std::f64::consts::PI;

    #[test]
    fn zero_noise_recovers_the_dirichlet_spectrum() {
        let path = BrownianPath::zero(1.0, 1e-4).unwrap();
        let got = eigenvalues_by_shooting(&path, 3, 1e-8).unwrap();
        for (k, &lam) in got.iter().enumerate() {
            let want = ((k + 1) as f64 * PI).powi(2);
            assert!(
                (lam - want).abs() <= 1e-4 * want,
                "k={}: {lam} vs (k pi)^2 = {want}",
                k + 1
            );
        }
    }

    #[test]
    fn matches_fd_and_the_gap_shrinks_under_refinement() {
        let coarse = BrownianPath::sample(1.0, 1e-3, 17).unwrap();
        let fine = coarse.refine().refine();
        let gap = |p: &BrownianPath| -> f64 {
            let shoot = eigenvalues_by_shooting(p, 1, 1e-7).unwrap()[0];
            let fd = fd_diagonalize(p, p.steps(), 1).unwrap()[0];
            (shoot - fd).abs()
        };
        let e_coarse = gap(&coarse);
        let e_fine = gap(&fine);
        assert!(
            e_fine < e_coarse,
            "shooting/FD gap should shrink: coarse {e_coarse:.3e}, fine {e_fine:.3e}"
        );
        assert!(e_fine < 0.05, "refined gap {e_fine} still large");
    }

    #[test]
    fn gaps_are_strictly_positive_across_paths() {
        for seed in 0..25u64 {
            let path = BrownianPath::sample(1.0, 1e-3, 3000 + seed).unwrap();
            let eig = eigenvalues_by_shooting(&path, 3, 1e-6).unwrap();
            for w in eig.windows(2) {
                assert!(
                    w[1] - w[0] > 1e-4,
                    "seed {seed}: near-degenerate pair {w:?}"
                );
            }
        }
    }

    #[test]
    fn count_between_eigenvalues_equals_the_lower_index() {
        for seed in [2u64, 41, 77, 105, 400, 823] {
            let path = BrownianPath::sample(1.0, 1e-3, seed).unwrap();
            let eig = eigenvalues_by_shooting(&path, 4, 1e-6).unwrap();
            for k in 0..3 {
                let mid = 0.5 * (eig[k] + eig[k + 1]);
                let c = ricatti_count(&path, mid).unwrap();
                assert_eq!(
                    c,
                    k + 1,
                    "seed {seed}: count at midpoint {mid} between {} and {}",
                    eig[k],
                    eig[k + 1]
                );
            }
        }
    }

    #[test]
    fn invalid_arguments_rejected() {
        let path = BrownianPath::zero(1.0, 1e-2).unwrap();
        assert!(eigenvalues_by_shooting(&path, 0, 1e-6).is_err());
        assert!(eigenvalues_by_shooting(&path, 1, 0.0).is_err());
        assert!(eigenvalues_by_shooting(&path, 1, f64::NAN).is_err());
    }
}
