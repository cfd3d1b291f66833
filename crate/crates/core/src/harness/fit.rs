//! Log-log least-squares slopes.

use crate::error::{KgError, Result};

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(KgError::Config(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(KgError::Config(format!(
            "slope fit needs positive values, got ({x:e}, {y:e})"
        )));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(KgError::Config("slope fit needs distinct abscissae".into()));
    }
    Ok(sxy / sxx)
}

/// Decay rate in `c`: the slope of `err` against `1/c`.
pub fn decay_rate_in_c(cs: &[f64], errors: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = cs.iter().zip(errors).map(|(&c, &e)| (1.0 / c, e)).collect();
    fit_slope(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_power_laws() {
        let sq: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x| (x, x * x)).collect();
        assert!((fit_slope(&sq).unwrap() - 2.0).abs() < 1e-14);
        let q: Vec<(f64, f64)> = [0.5f64, 1.5, 3.0]
            .iter()
            .map(|&x| (x, 7.0 * x.powi(4)))
            .collect();
        assert!((fit_slope(&q).unwrap() - 4.0).abs() < 1e-13);
        let rate =
            decay_rate_in_c(&[4.0, 8.0, 16.0], &[1.0 / 16.0, 1.0 / 64.0, 1.0 / 256.0]).unwrap();
        assert!((rate - 2.0).abs() < 1e-14);
    }

    #[test]
    fn noisy_quadratic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pts: Vec<(f64, f64)> = (1..=10)
            .map(|i| {
                let x = i as f64;
                (x, x * x * (1.0 + rng.gen_range(-0.01..0.01)))
            })
            .collect();
        let s = fit_slope(&pts).unwrap();
        assert!((1.9..=2.1).contains(&s));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_slope(&[(1.0, 1.0), (2.0, 4.0)]).is_err());
        assert!(fit_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 9.0)]).is_err());
        assert!(fit_slope(&[(-1.0, 1.0), (2.0, 4.0), (3.0, 9.0)]).is_err());
        assert!(fit_slope(&[(2.0, 1.0), (2.0, 4.0), (2.0, 9.0)]).is_err());
    }
}
