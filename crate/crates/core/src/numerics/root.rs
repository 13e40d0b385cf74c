use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// Solve `g(x) = target` for continuous monotone `g` on `[lo, hi]`.
///
/// Safeguarded secant iteration: each step tries the secant through the
/// current bracket ends and falls back to bisection whenever the secant
/// leaves the bracket or fails to halve it.
pub fn solve_scalar<G>(g: G, target: f64, bracket: (f64, f64)) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::BadInput("bracket must be finite".into()));
    }
    let tol = super::floored(1e-12, target);
    let mut f_lo = g(lo) - target;
    let mut f_hi = g(hi) - target;
    if f_lo.abs() <= tol {
        return Ok(lo);
    }
    if f_hi.abs() <= tol {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoBracket {
            target,
            g_lo: f_lo + target,
            g_hi: f_hi + target,
        });
    }

    let mut best = if f_lo.abs() < f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let width = hi - lo;
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let mid = 0.5 * (lo + hi);
        let x = if secant.is_finite() && secant > lo && secant < hi {
            secant
        } else {
            mid
        };
        let fx = g(x) - target;
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        // Secant stalling on one side: force a bisection.
        if hi - lo > 0.5 * width {
            let fm = g(mid) - target;
            if fm.abs() <= tol {
                return Ok(mid);
            }
            if fm.signum() == f_lo.signum() {
                if mid > lo {
                    lo = mid;
                    f_lo = fm;
                }
            } else if mid < hi {
                hi = mid;
                f_hi = fm;
            }
        }
        if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations,
        residual: best.1.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_of_four() {
        let x = solve_scalar(|x| x * x, 4.0, (0.0, 10.0)).unwrap();
        assert!((x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn identity_negative_target() {
        let x = solve_scalar(|x| x, -3.0, (-10.0, 0.0)).unwrap();
        assert!((x + 3.0).abs() < 1e-12);
    }

    #[test]
    fn cubic() {
        // g(2) = 8 + 2 = 10
        let x = solve_scalar(|x| x.powi(3) + x, 10.0, (0.0, 3.0)).unwrap();
        assert!((x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn decreasing_function_and_reversed_bracket() {
        let x = solve_scalar(|x| -x.exp(), -2.0, (3.0, -1.0)).unwrap();
        assert!((x - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn no_bracket() {
        assert!(matches!(
            solve_scalar(|x| x * x, -1.0, (0.0, 10.0)),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn discontinuous_step_does_not_converge() {
        let r = solve_scalar(|x| if x < 0.3 { -1.0 } else { 1.0 }, 0.0, (0.0, 1.0));
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }
}
