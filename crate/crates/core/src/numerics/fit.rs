use crate::error::{Error, Result};

/// Least-squares `r` in `y ≈ C r^x`, fitted to `ln y`.
pub fn exponential_rate(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::validation("an exponential fit needs at least two paired points"));
    }
    if let Some(bad) = ys.iter().find(|y| !(**y > 0.0 && y.is_finite())) {
        return Err(Error::validation(format!("an exponential fit needs positive values, got {bad}")));
    }
    let n = xs.len() as f64;
    let logs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = logs.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::validation("an exponential fit needs distinct abscissae"));
    }
    let sxy: f64 = xs.iter().zip(&logs).map(|(x, l)| (x - mx) * (l - my)).sum();
    Ok((sxy / sxx).exp())
}
