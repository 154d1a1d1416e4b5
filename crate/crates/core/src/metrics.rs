//! Error-rate bookkeeping: relative changes and binomial standard errors.

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("error rate {0} is outside [0, 1]")]
    Rate(f64),
    #[error("denominator error rate is zero")]
    ZeroDenominator,
    #[error("standard error needs at least one example")]
    NoExamples,
}

fn check(rate: f64) -> Result<f64, MetricError> {
    if (0.0..=1.0).contains(&rate) {
        Ok(rate)
    } else {
        Err(MetricError::Rate(rate))
    }
}

/// Percent change in clean-test error from training on perturbed data:
/// `100 · (clean-trained error / perturbed-trained error − 1)`. Positive
/// means the perturbed data helped.
pub fn rel_ood_change(err_clean_trained: f64, err_perturbed_trained: f64) -> Result<f64, MetricError> {
    let num = check(err_clean_trained)?;
    let den = check(err_perturbed_trained)?;
    if den == 0.0 {
        return Err(MetricError::ZeroDenominator);
    }
    Ok(100.0 * (num / den - 1.0))
}

/// Percent improvement from training on all classes instead of one family:
/// `100 · (1 − single-task error / multi-task error)`.
pub fn rel_multitask_improvement(err_single: f64, err_multi: f64) -> Result<f64, MetricError> {
    let single = check(err_single)?;
    let multi = check(err_multi)?;
    if multi == 0.0 {
        return Err(MetricError::ZeroDenominator);
    }
    Ok(100.0 * (1.0 - single / multi))
}

/// The other sign convention for the multi-task comparison:
/// `100 · (single-task error / multi-task error − 1)`.
pub fn rel_multitask_change(err_single: f64, err_multi: f64) -> Result<f64, MetricError> {
    rel_ood_change(err_single, err_multi)
}

/// Binomial standard error `sqrt(err (1 − err) / n)`.
pub fn stderr_of_rate(err: f64, n: usize) -> Result<f64, MetricError> {
    let err = check(err)?;
    if n == 0 {
        return Err(MetricError::NoExamples);
    }
    Ok(crate::math::sqrt(err * (1.0 - err) / n as f64))
}
