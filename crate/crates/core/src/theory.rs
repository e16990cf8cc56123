//! Closed-form quantities from the high-probability regret analysis of the
//! merge-family algorithms. These feed diagnostics and plots only; no policy
//! decision depends on them except through the exploration constant.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("alpha = {0} must exceed 0.5 for the exploration constant to be defined")]
    AlphaOutOfTheory(f64),
    #[error("gap must be strictly positive, got {0}")]
    ZeroGap(f64),
    #[error("invalid parameter: {0}")]
    BadParams(String),
}

/// Exploration constant `C(eps) = ((4a - 1) K^2 / ((2a - 1) eps))^(1 / (2a - 1))`.
pub fn exploration_constant(alpha: f64, k: usize, epsilon: f64) -> Result<f64, TheoryError> {
    if !(alpha > 0.5) || !alpha.is_finite() {
        return Err(TheoryError::AlphaOutOfTheory(alpha));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(TheoryError::BadParams(format!("epsilon = {epsilon} not in (0, 1]")));
    }
    if k == 0 {
        return Err(TheoryError::BadParams("k must be >= 1".into()));
    }
    let k2 = (k as f64) * (k as f64);
    let base = (4.0 * alpha - 1.0) * k2 / ((2.0 * alpha - 1.0) * epsilon);
    Ok(base.powf(1.0 / (2.0 * alpha - 1.0)))
}

/// The failure probability that makes [`exploration_constant`] return `c`.
pub fn implied_epsilon(alpha: f64, k: usize, c: f64) -> Result<f64, TheoryError> {
    if !(alpha > 0.5) {
        return Err(TheoryError::AlphaOutOfTheory(alpha));
    }
    if !(c > 0.0) {
        return Err(TheoryError::BadParams(format!("C = {c} must be positive")));
    }
    let k2 = (k as f64) * (k as f64);
    let base = (4.0 * alpha - 1.0) * k2 / (2.0 * alpha - 1.0);
    Ok(base / c.powf(2.0 * alpha - 1.0))
}

/// High-probability cumulative regret bound `8 a M K ln(T + C) / gap^2`.
pub fn theoretical_bound(
    alpha: f64,
    batch_size: usize,
    k: usize,
    horizon: u64,
    epsilon: f64,
    delta_min: f64,
) -> Result<f64, TheoryError> {
    let c = exploration_constant(alpha, k, epsilon)?;
    if batch_size < 4 {
        return Err(TheoryError::BadParams(format!(
            "batch size {batch_size} below the minimum of 4 the bound requires"
        )));
    }
    if !(delta_min > 0.0) {
        return Err(TheoryError::ZeroGap(delta_min));
    }
    Ok(bound_with_constant(alpha, batch_size, k, horizon as f64, c, delta_min))
}

/// Same closed form with an explicit constant; `horizon` is real-valued so
/// callers can probe `ln(T + C)` exactly.
pub fn bound_with_constant(
    alpha: f64,
    batch_size: usize,
    k: usize,
    horizon: f64,
    c_const: f64,
    delta_min: f64,
) -> f64 {
    8.0 * alpha * batch_size as f64 * k as f64 * (horizon + c_const).ln() / (delta_min * delta_min)
}

/// Maximum number of duels between a distinguishable pair inside one batch
/// before that batch merges: `4 a ln(T + C) / gap_B^2`.
pub fn pair_comparison_bound(
    alpha: f64,
    horizon: f64,
    c_const: f64,
    delta_batch_min: f64,
) -> Result<f64, TheoryError> {
    if !(delta_batch_min > 0.0) {
        return Err(TheoryError::ZeroGap(delta_batch_min));
    }
    Ok(4.0 * alpha * (horizon + c_const).ln() / (delta_batch_min * delta_batch_min))
}
