//! Riccati explosion counting: dX = -(lambda + X^2) dx + dB with X(0) = +inf,
//! where each blow-down to -inf is one eigenvalue below lambda.
//!
//! Scheme: semi-implicit Euler-Maruyama in the X chart; once |X| passes
//! X_CAP the integration switches to Y = -1/X, whose drift near the pole is
//! -1 + O(Y^2), crosses zero, and re-enters the X chart on the other side.
//! Explosion positions are the zero crossings of Y from above.

use crate::anderson1d::BrownianPath;
use crate::error::CoreError;
use crate::Result;

/// Chart switch threshold pinned with the scheme: |X| > X_CAP integrates Y.
pub const X_CAP: f64 = 1e3;
/// Substep target: delta * (|X| + sqrt|lambda|) <= C_STEP in the X chart.
const C_STEP: f64 = 0.05;
/// Refinement floor as a fraction of the path step.
const FLOOR_FRACTION: f64 = 1.49e-8; // 2^-26

#[derive(Clone, Copy, Debug)]
enum Chart {
    X(f64),
    Y(f64),
}

#[derive(Clone, Debug)]
pub struct RiccatiTrace {
    pub lambda: f64,
    pub path_seed: u64,
    pub path_h: f64,
    /// Strictly increasing explosion positions in (0, L].
    pub explosion_positions: Vec<f64>,
    /// X(L) when finite-side; None while mid-explosion (X below -X_CAP).
    pub final_value: Option<f64>,
}

/// Integrates the Riccati diffusion over the whole path and records every
/// explosion. Noise below the path resolution is interpolated linearly
/// (substeps share the cell increment proportionally to their length).
pub fn ricatti_trace(path: &BrownianPath, lambda: f64) -> Result<RiccatiTrace> {
    trace_capped(path, lambda, usize::MAX)
}

/// Same trajectory, but stops as soon as `cap` explosions are seen; the
/// returned `final_value` is then meaningless and set to None. The prefix of
/// the integration is bit-identical to the uncapped run.
fn trace_capped(path: &BrownianPath, lambda: f64, cap: usize) -> Result<RiccatiTrace> {
    if !lambda.is_finite() {
        return Err(CoreError::InvalidArgument(format!("lambda = {lambda}")));
    }
    let h = path.h();
    let floor = h * FLOOR_FRACTION;
    let scale = lambda.abs().sqrt() + 1.0;
    let mut state = Chart::Y(0.0);
    let mut explosions = Vec::new();
    for i in 0..path.steps() {
        let x0 = i as f64 * h;
        let db_cell = path.increment(i);
        let mut rem = h;
        while rem > 0.0 {
            let want = match state {
                Chart::X(x) => C_STEP / (x.abs() + scale),
                // the Y drift is -1 + O(lambda Y^2); only huge lambda shortens it
                Chart::Y(y) => C_STEP / (0.05 + lambda.abs() * y * y),
            };
            if want < floor {
                return Err(CoreError::SubstepFloor { x: x0 + (h - rem), floor });
            }
            let delta = want.min(rem);
            let db = db_cell * (delta / h);
            state = match state {
                Chart::X(x) => {
                    // (1 + delta x) >= 1 - C_STEP by the substep rule
                    let xn = (x - lambda * delta + db) / (1.0 + delta * x);
                    if xn.abs() > X_CAP {
                        Chart::Y(-1.0 / xn)
                    } else {
                        Chart::X(xn)
                    }
                }
                Chart::Y(y) => {
                    let drift = -1.0 - lambda * y * y + y * y * y;
                    let yn = y + drift * delta + y * y * db;
                    if y > 0.0 && yn <= 0.0 {
                        let frac = y / (y - yn);
                        explosions.push(x0 + (h - rem) + frac * delta);
                        if explosions.len() >= cap {
                            return Ok(RiccatiTrace {
                                lambda,
                                path_seed: path.seed(),
                                path_h: h,
                                explosion_positions: explosions,
                                final_value: None,
                            });
                        }
                    }
                    if yn != 0.0 && yn.abs() > 1.0 / X_CAP {
                        Chart::X(-1.0 / yn)
                    } else {
                        Chart::Y(yn)
                    }
                }
            };
            rem -= delta;
        }
    }
    let final_value = match state {
        Chart::X(x) => Some(x),
        Chart::Y(y) if y < 0.0 => Some(-1.0 / y),
        Chart::Y(_) => None,
    };
    Ok(RiccatiTrace {
        lambda,
        path_seed: path.seed(),
        path_h: h,
        explosion_positions: explosions,
        final_value,
    })
}

/// Number of explosions before L, i.e. the number of eigenvalues < lambda.
pub fn ricatti_count(path: &BrownianPath, lambda: f64) -> Result<usize> {
    Ok(ricatti_trace(path, lambda)?.explosion_positions.len())
}

/// Explosion count clipped at `cap`: the integration stops early once the
/// bisection predicate `count >= cap` is decided.
pub(crate) fn ricatti_count_capped(path: &BrownianPath, lambda: f64, cap: usize) -> Result<usize> {
    Ok(trace_capped(path, lambda, cap)?.explosion_positions.len())
}

/// Position of the first explosion, if any; monotone decreasing in lambda
/// path-by-path.
pub fn first_explosion(path: &BrownianPath, lambda: f64) -> Result<Option<f64>> {
    Ok(ricatti_trace(path, lambda)?.explosion_positions.first().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anderson1d::fd_diagonalize;
    use std::f64::consts::PI;

    #[test]
    fn zero_noise_counts_and_positions_follow_cot() {
        // X = sqrt(l) cot(sqrt(l) x) explodes at x_j = j pi / sqrt(l)
        let path = BrownianPath::zero(1.0, 1e-3).unwrap();
        for lambda in [30.0, 50.0, 200.0, 1000.0] {
            let trace = ricatti_trace(&path, lambda).unwrap();
            let want = (lambda.sqrt() / PI).floor() as usize;
            assert_eq!(
                trace.explosion_positions.len(),
                want,
                "lambda {lambda}: positions {:?}",
                trace.explosion_positions
            );
            for (j, &x) in trace.explosion_positions.iter().enumerate() {
                let exact = (j as f64 + 1.0) * PI / lambda.sqrt();
                assert!(
                    (x - exact).abs() < 5e-3,
                    "lambda {lambda} explosion {j}: {x} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn zero_noise_final_value_matches_cot() {
        let path = BrownianPath::zero(0.4, 1e-4).unwrap();
        let lambda = 30.0f64;
        let trace = ricatti_trace(&path, lambda).unwrap();
        assert!(trace.explosion_positions.is_empty(), "first explosion is at 0.5736");
        let got = trace.final_value.expect("finite at x=0.4");
        let want = lambda.sqrt() / (lambda.sqrt() * 0.4).tan();
        assert!(
            (got - want).abs() <= 0.02 * want.abs(),
            "X(0.4) = {got} vs cot value {want}"
        );
    }

    #[test]
    fn count_is_monotone_in_lambda_on_a_fixed_path() {
        let path = BrownianPath::sample(1.0, 1e-3, 11).unwrap();
        let mut prev = 0usize;
        for i in 0..50 {
            let lambda = -20.0 + 320.0 * (i as f64) / 49.0;
            let c = ricatti_count(&path, lambda).unwrap();
            assert!(
                c >= prev,
                "count dropped {prev} -> {c} at lambda {lambda}"
            );
            prev = c;
        }
    }

    #[test]
    fn coupled_first_explosions_are_monotone() {
        // larger lambda explodes no later, path by path (Sturm comparison)
        for seed in [3u64, 8, 21] {
            let path = BrownianPath::sample(1.0, 1e-3, seed).unwrap();
            let mut prev = f64::INFINITY;
            for i in 0..25 {
                let lambda = 5.0 + 400.0 * (i as f64) / 24.0;
                let pos = first_explosion(&path, lambda)
                    .unwrap()
                    .unwrap_or(f64::INFINITY);
                assert!(
                    pos <= prev + 1e-9,
                    "seed {seed} lambda {lambda}: first explosion {pos} after {prev}"
                );
                prev = pos;
            }
        }
    }

    #[test]
    fn below_fd_ground_state_the_count_is_zero() {
        let path = BrownianPath::sample(1.0, 1e-3, 29).unwrap();
        let ground = fd_diagonalize(&path, 500, 1).unwrap()[0];
        assert_eq!(ricatti_count(&path, ground - 1.0).unwrap(), 0);
        assert_eq!(ricatti_count(&path, ground + 1.0).unwrap(), 1);
    }

    #[test]
    fn positions_are_strictly_increasing_and_inside_the_interval() {
        let path = BrownianPath::sample(1.0, 1e-3, 7).unwrap();
        let trace = ricatti_trace(&path, 400.0).unwrap();
        assert!(trace.explosion_positions.len() >= 4, "want several explosions");
        for w in trace.explosion_positions.windows(2) {
            assert!(w[0] < w[1], "positions not increasing: {w:?}");
        }
        for &x in &trace.explosion_positions {
            assert!(x > 0.0 && x <= 1.0, "position {x} outside (0, 1]");
        }
    }

    #[test]
    fn trace_is_deterministic() {
        let path = BrownianPath::sample(1.0, 1e-3, 13).unwrap();
        let a = ricatti_trace(&path, 120.0).unwrap();
        let b = ricatti_trace(&path, 120.0).unwrap();
        assert_eq!(a.explosion_positions, b.explosion_positions);
        assert_eq!(a.final_value, b.final_value);
    }
}
