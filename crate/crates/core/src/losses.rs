//! Detection loss functions: focal loss for classification, smooth L1 for
//! box regression, cross entropy for orientation classification, and their
//! weighted total.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LossError {
    #[error("log singularity: probability of the true class is 0")]
    ZeroProbability,
    #[error("probability {0} outside [0, 1]")]
    ProbabilityRange(f64),
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// How a zero true-class probability is handled: a loud error by default,
/// or clamping to a small epsilon when explicitly requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbPolicy {
    #[default]
    Strict,
    Clamp,
}

const CLAMP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalParams {
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for FocalParams {
    fn default() -> Self {
        Self { alpha: 0.25, gamma: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothL1Params {
    pub beta: f64,
}

impl Default for SmoothL1Params {
    fn default() -> Self {
        Self { beta: 1.0 / 9.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub classification: f64,
    pub regression: f64,
    pub orientation: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { classification: 1.0, regression: 2.0, orientation: 2.0 }
    }
}

/// Focal loss -alpha_t (1 - p_t)^gamma ln(p_t), with p_t = p for a positive
/// label and 1 - p for a negative one, alpha_t likewise alpha or 1 - alpha.
pub fn focal_loss(
    p: f64,
    positive: bool,
    params: &FocalParams,
    policy: ProbPolicy,
) -> Result<f64, LossError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(LossError::ProbabilityRange(p));
    }
    let (p_t, alpha_t) = if positive {
        (p, params.alpha)
    } else {
        (1.0 - p, 1.0 - params.alpha)
    };
    if p_t == 1.0 {
        return Ok(0.0);
    }
    let p_t = match policy {
        ProbPolicy::Strict if p_t == 0.0 => return Err(LossError::ZeroProbability),
        ProbPolicy::Clamp => p_t.max(CLAMP_EPS),
        ProbPolicy::Strict => p_t,
    };
    Ok(-alpha_t * (1.0 - p_t).powf(params.gamma) * p_t.ln())
}

/// Smooth L1: quadratic 0.5 (x - y)^2 / beta below the knot, linear
/// |x - y| - 0.5 beta above it.
pub fn smooth_l1(x: f64, y: f64, params: &SmoothL1Params) -> f64 {
    let diff = (x - y).abs();
    if diff < params.beta {
        0.5 * diff * diff / params.beta
    } else {
        diff - 0.5 * params.beta
    }
}

/// Cross entropy -sum truth_i ln(predicted_i) between two distributions.
pub fn cross_entropy(
    predicted: &[f64],
    truth: &[f64],
    policy: ProbPolicy,
) -> Result<f64, LossError> {
    if predicted.len() != truth.len() {
        return Err(LossError::LengthMismatch(predicted.len(), truth.len()));
    }
    let mut sum = 0.0;
    for (&p, &t) in predicted.iter().zip(truth) {
        if t == 0.0 {
            continue;
        }
        let p = match policy {
            ProbPolicy::Strict if p == 0.0 => return Err(LossError::ZeroProbability),
            ProbPolicy::Clamp => p.max(CLAMP_EPS),
            ProbPolicy::Strict => p,
        };
        sum -= t * p.ln();
    }
    Ok(sum)
}

/// Weighted sum of the three loss components.
pub fn total_loss(classification: f64, regression: f64, orientation: f64, w: &LossWeights) -> f64 {
    w.classification * classification + w.regression * regression + w.orientation * orientation
}
