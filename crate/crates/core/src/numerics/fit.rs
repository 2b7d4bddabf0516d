use super::NumericsError;

/// Least-squares fit of `ln y = slope·ln x + intercept`.
pub fn fit_loglog_slope(samples: &[(f64, f64)]) -> Result<(f64, f64), NumericsError> {
    if samples.len() < 2 {
        return Err(NumericsError::TooFewSamples(samples.len()));
    }
    if let Some(&(x, y)) = samples.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(NumericsError::NonPositiveSample { x, y });
    }
    let n = samples.len() as f64;
    let (sx, sy) = samples
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x.ln(), sy + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in samples {
        let dx = x.ln() - mx;
        sxx += dx * dx;
        sxy += dx * (y.ln() - my);
    }
    if sxx == 0.0 {
        return Err(NumericsError::DegenerateAbscissae);
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Coefficient `c` of `y ≈ c·x^exponent` with the exponent held fixed:
/// the geometric mean of `y / x^exponent`.
pub fn fit_power_coefficient(samples: &[(f64, f64)], exponent: f64) -> Result<f64, NumericsError> {
    if samples.is_empty() {
        return Err(NumericsError::TooFewSamples(0));
    }
    if let Some(&(x, y)) = samples.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(NumericsError::NonPositiveSample { x, y });
    }
    let mean = samples.iter().map(|&(x, y)| y.ln() - exponent * x.ln()).sum::<f64>() / samples.len() as f64;
    Ok(mean.exp())
}
