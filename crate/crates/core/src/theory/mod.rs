//! Closed-form expectations, probabilities, Poisson limits and threshold
//! locations for the geometric and uniform models.
//!
//! Every value is a [`TheoryPrediction`]. `exact` is true when the formula
//! holds at finite `n`; asymptotic values are flagged `exact: false` and
//! carry a textual regime.

mod exact;
mod poisson;
mod threshold;

use serde::{Deserialize, Serialize};

pub use exact::{
    argmax_p_exact_consecutive, expected_components, expected_exact_consecutive_count, expected_gaps,
    mean_component_length, mean_gap_length, prob_exact_consecutive_at_position,
    prob_exact_consecutive_at_position_uniform, prob_ordering_at_position, prob_tmax_lt, prob_tmin_ge,
};
pub use poisson::{alpha_at_point, poisson_limit, regime_point, Param, RegimePoint, StatParams, StatisticId};
pub use threshold::{square_k_star, square_regime, threshold_location, SquareRegime};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionKind {
    Expectation,
    Probability,
    PoissonMean,
    ThresholdLocation,
}

/// Which count outcome makes the named property hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HoldsWhen {
    /// Property holds when the counted structure is absent.
    None,
    /// Property holds when at least one counted structure is present.
    Some,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonDetail {
    pub mean: f64,
    pub p_none: f64,
    pub p_some: f64,
    pub holds_when: HoldsWhen,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDetail {
    /// `appearance` for increasing transitions, `disappearance` otherwise.
    pub transition: String,
    /// Model parameter the threshold is stated in: `p`, `q`, `k` or `r`.
    pub parameter: String,
    /// Symbolic location, e.g. `n^(-1/2)`.
    pub location: String,
    /// Exponent `e` with parameter `~ n^e`, when the location is a power of `n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_exponent: Option<String>,
    /// Exponent `e` with `m* ~ n^e` in the uniform model.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_exponent: Option<String>,
    /// `m* = n p*/q*` at the given `n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_star: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub quantity: String,
    pub kind: PredictionKind,
    pub value: f64,
    pub regime: String,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poisson: Option<PoissonDetail>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdDetail>,
}

impl TheoryPrediction {
    pub(crate) fn exact(quantity: &str, kind: PredictionKind, value: f64, regime: impl Into<String>) -> Self {
        TheoryPrediction {
            quantity: quantity.to_string(),
            kind,
            value,
            regime: regime.into(),
            exact: true,
            poisson: None,
            threshold: None,
        }
    }
}

/// Compensated (Neumaier) summation.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier_sum(v), 2.0);
    }
}
