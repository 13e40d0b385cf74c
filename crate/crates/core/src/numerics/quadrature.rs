use crate::error::{Error, Result};

/// Composite midpoint rule for `∮ f(t) dt` over one period `t ∈ [0, 1)`.
///
/// For smooth periodic integrands the midpoint (equivalently trapezoidal)
/// rule converges spectrally, and there is no duplicated endpoint.
pub fn integrate_closed<F>(f: F, n: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if n < 8 {
        return Err(Error::InvalidPanelCount(n));
    }
    let h = 1.0 / n as f64;
    let sum: f64 = (0..n).map(|k| f((k as f64 + 0.5) * h)).sum();
    Ok(sum * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn zero_mean_sine() {
        let v = integrate_closed(|t| (TAU * t).sin(), 64).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn constant() {
        assert_eq!(integrate_closed(|_| 1.0, 8).unwrap(), 1.0);
    }

    #[test]
    fn cos_squared_mean() {
        let v = integrate_closed(|t| (TAU * t).cos().powi(2), 256).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn too_few_panels() {
        assert_eq!(
            integrate_closed(|_| 1.0, 7),
            Err(Error::InvalidPanelCount(7))
        );
    }
}
