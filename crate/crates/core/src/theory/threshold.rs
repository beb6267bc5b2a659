use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{PredictionKind, StatParams, ThresholdDetail, TheoryPrediction};
use crate::error::{Error, Result};
use crate::patterns::{PatternKind, PatternSpec, Shape};

type Exp = Ratio<i64>;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Var {
    P,
    Q,
}

/// A power-law threshold `x* = n^(-a)` in `p` or `q`.
struct PowerThreshold {
    var: Var,
    a: Exp,
    appearance: bool,
}

fn ratio_text(r: Exp) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl PowerThreshold {
    fn new(var: Var, numer: i64, denom: i64, appearance: bool) -> Self {
        PowerThreshold { var, a: Ratio::new(numer, denom), appearance }
    }

    /// `m* = n p*/q*`: `n^(1-a)` for thresholds in `p`, `n^(1+a)` in `q`.
    fn m_exponent(&self) -> Exp {
        match self.var {
            Var::P => Ratio::from_integer(1) - self.a,
            Var::Q => Ratio::from_integer(1) + self.a,
        }
    }

    fn into_prediction(self, quantity: &str, n: Option<u64>) -> TheoryPrediction {
        let name = if self.var == Var::P { "p" } else { "q" };
        let location = format!("{name}* = n^(-{})", ratio_text(self.a));
        let (value, m_star) = match n {
            Some(n) => {
                let nf = n as f64;
                let x = nf.powf(-(*self.a.numer() as f64) / *self.a.denom() as f64);
                let (p, q) = if self.var == Var::P { (x, 1.0 - x) } else { (1.0 - x, x) };
                (x, Some(nf * p / q))
            }
            None => (f64::NAN, None),
        };
        TheoryPrediction {
            quantity: quantity.to_string(),
            kind: PredictionKind::ThresholdLocation,
            value,
            regime: "coarse threshold, geometric model; uniform model by m* = n p*/q*".to_string(),
            exact: false,
            poisson: None,
            threshold: Some(ThresholdDetail {
                transition: if self.appearance { "appearance" } else { "disappearance" }.to_string(),
                parameter: name.to_string(),
                location,
                n_exponent: Some(ratio_text(-self.a)),
                m_exponent: Some(ratio_text(self.m_exponent())),
                m_star,
            }),
        }
    }
}

fn need_k(params: &StatParams, name: &str, min: u64) -> Result<i64> {
    match params.k {
        Some(k) if k >= min => Ok(k as i64),
        _ => Err(Error::param(format!("{name} needs parameter k >= {min}"))),
    }
}

fn need_r(params: &StatParams, name: &str) -> Result<i64> {
    match params.r {
        Some(r) if r >= 1 => Ok(r as i64),
        _ => Err(Error::param(format!("{name} needs parameter r >= 1"))),
    }
}

fn pattern_thresholds(spec: &PatternSpec) -> Result<Vec<PowerThreshold>> {
    use Var::{P, Q};
    let k = spec.length() as i64;
    let r = spec.max_term() as i64;
    let nonzero = spec.is_nonzero();
    let out = match (spec.kind(), spec.shape()) {
        (PatternKind::Exact, Shape::Consecutive) if nonzero => {
            let s = spec.size() as i64;
            vec![PowerThreshold::new(P, 1, s, true), PowerThreshold::new(Q, 1, k, false)]
        }
        (PatternKind::Exact, Shape::Nonconsecutive) if nonzero => {
            vec![PowerThreshold::new(P, 1, r, true), PowerThreshold::new(Q, 1, 1, false)]
        }
        (PatternKind::Exact, Shape::Vincular) if nonzero => {
            let s = spec.block_sizes().into_iter().max().unwrap_or(0) as i64;
            let l = spec.block_lengths().into_iter().max().unwrap_or(1) as i64;
            if s == 0 {
                return Err(Error::Unsupported(format!("`{spec}` has only zero blocks")));
            }
            vec![PowerThreshold::new(P, 1, s, true), PowerThreshold::new(Q, 1, l, false)]
        }
        (PatternKind::Upper, Shape::Consecutive) if nonzero => {
            vec![PowerThreshold::new(P, 1, spec.size() as i64, true)]
        }
        (PatternKind::Upper, Shape::Nonconsecutive) if nonzero => vec![PowerThreshold::new(P, 1, r, true)],
        (PatternKind::Lower, Shape::Consecutive) => vec![PowerThreshold::new(Q, 1, k, false)],
        (PatternKind::Lower, Shape::Nonconsecutive) => vec![PowerThreshold::new(Q, 1, 1, false)],
        (PatternKind::Ordering, Shape::Consecutive) => {
            let d = k - spec.value_multiplicities().len() as i64;
            if d == 0 {
                if k < 2 {
                    return Err(Error::Unsupported("ordering pattern of length 1 always occurs".into()));
                }
                vec![PowerThreshold::new(P, 2, k * (k - 1), true)]
            } else {
                vec![PowerThreshold::new(Q, 1, d, false)]
            }
        }
        (PatternKind::Ordering, Shape::Nonconsecutive) if spec.value_multiplicities().iter().all(|&l| l == 1) => {
            vec![PowerThreshold::new(P, 1, k - 1, true)]
        }
        _ => {
            return Err(Error::Unsupported(format!("no threshold is known for `{spec}`")));
        }
    };
    Ok(out)
}

/// Threshold locations for a statistic or pattern, with the uniform-model
/// transfer `m* = n p*/q*`. With `n` given, the values are evaluated at
/// that size.
pub fn threshold_location(name: &str, params: &StatParams, n: Option<u64>) -> Result<Vec<TheoryPrediction>> {
    use Var::{P, Q};
    let thresholds = match name {
        "cmax_ge" => vec![PowerThreshold::new(P, 1, need_k(params, name, 1)?, true)],
        "gmax_ge" => vec![PowerThreshold::new(Q, 1, need_k(params, name, 1)?, false)],
        "cmin_gt" => vec![PowerThreshold::new(Q, 1, 2, true)],
        "gmin_gt" => vec![PowerThreshold::new(P, 1, 2, false)],
        "tmax_ge" => vec![PowerThreshold::new(P, 1, need_r(params, name)?, true)],
        "tmin_ge" => vec![PowerThreshold::new(Q, 1, 1, true)],
        "equal_nonzero_run" => {
            let k = need_k(params, name, 2)?;
            vec![PowerThreshold::new(P, 1, k, true), PowerThreshold::new(Q, 1, k - 1, false)]
        }
        "increasing_run" => {
            let k = need_k(params, name, 2)?;
            vec![PowerThreshold::new(P, 2, k * (k - 1), true)]
        }
        "equal_run" => vec![PowerThreshold::new(Q, 1, need_k(params, name, 2)? - 1, false)],
        "carlitz" => vec![PowerThreshold::new(Q, 1, 1, true)],
        "equal_terms" => {
            let k = need_k(params, name, 2)?;
            vec![PowerThreshold::new(Q, k, k - 1, false)]
        }
        "pattern" | "exact_appear" | "exact_disappear" | "upper_appear" | "lower_disappear" | "ordering_disappear" => {
            let spec = params.pattern.as_ref().ok_or_else(|| Error::param(format!("{name} needs a pattern")))?;
            pattern_thresholds(spec)?
        }
        "square" => {
            let n = n.ok_or_else(|| Error::param("square threshold needs n"))?;
            let c = params.c.unwrap_or(0.0);
            let k = square_k_star(n, c)?;
            return Ok(vec![TheoryPrediction {
                quantity: "square".to_string(),
                kind: PredictionKind::ThresholdLocation,
                value: k,
                regime: "q = theta log log n / log n with theta near; asymptotic only".to_string(),
                exact: false,
                poisson: None,
                threshold: Some(ThresholdDetail {
                    transition: "appearance".to_string(),
                    parameter: "k".to_string(),
                    location: "k*(n) = (log n / log log n)(1 + c log log log n / log log n)".to_string(),
                    n_exponent: None,
                    m_exponent: None,
                    m_star: None,
                }),
            }]);
        }
        other => return Err(Error::UnknownStatistic(other.to_string())),
    };
    Ok(thresholds.into_iter().map(|t| t.into_prediction(name, n)).collect())
}

/// `(log n / log log n)(1 + c log log log n / log log n)`.
pub fn square_k_star(n: u64, c: f64) -> Result<f64> {
    let ln = (n as f64).ln();
    let lln = ln.ln();
    if !(lln > 0.0 && lln.ln() > 0.0) {
        return Err(Error::param("square threshold needs n > e^e"));
    }
    let llln = lln.ln();
    Ok(ln / lln * (1.0 + c * llln / lln))
}

/// Evaluated quantities from the square-pattern analysis at finite `n`.
/// Nothing here is asserted: no desk-scale `n` is in the asymptotic regime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareRegime {
    pub q: f64,
    pub k: f64,
    /// `log((n+1-k) q^k p^(k^2))`.
    pub log_expected: f64,
    /// `log(n^-1 q^(1-k) p^(k-k^2))`, the log of the correlation ratio bound.
    pub log_r: f64,
    /// Leading-order asymptotic form of `log_expected` for near `theta`.
    pub asymptotic_log_expected: f64,
    /// Leading-order asymptotic form of `log_r` for near `theta` and `c != 1`.
    pub asymptotic_log_r: f64,
}

pub fn square_regime(n: u64, theta: f64, c: f64) -> Result<SquareRegime> {
    if !(theta > 0.0) {
        return Err(Error::param("theta must be positive"));
    }
    let k = square_k_star(n, c)?;
    let nf = n as f64;
    let (ln, lln) = (nf.ln(), nf.ln().ln());
    let llln = lln.ln();
    let q = theta * lln / ln;
    if q >= 1.0 {
        return Err(Error::param("theta log log n / log n must be below 1"));
    }
    let (ln_q, ln_p) = (q.ln(), (-q).ln_1p());
    let log_expected = (nf + 1.0 - k).max(1.0).ln() + k * ln_q + k * k * ln_p;
    let log_r = -ln + (1.0 - k) * ln_q + (k - k * k) * ln_p;
    let scale = ln * llln / lln;
    let asymptotic_log_expected = if c == 1.0 { -ln / lln } else { (1.0 - c) * scale };
    Ok(SquareRegime { q, k, log_expected, log_r, asymptotic_log_expected, asymptotic_log_r: (c - 1.0) * scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::parse_pattern;

    fn detail(t: &TheoryPrediction) -> &ThresholdDetail {
        t.threshold.as_ref().unwrap()
    }

    #[test]
    fn exact_pattern_transfer() {
        let params = StatParams::with_pattern(parse_pattern("e:[3,1,4,1,5,9]").unwrap());
        let t = threshold_location("pattern", &params, None).unwrap();
        assert_eq!(detail(&t[0]).m_exponent.as_deref(), Some("22/23"));
        assert_eq!(detail(&t[0]).transition, "appearance");
        assert_eq!(detail(&t[1]).m_exponent.as_deref(), Some("7/6"));
        assert_eq!(detail(&t[1]).transition, "disappearance");
    }

    #[test]
    fn named_thresholds() {
        let gap = threshold_location("gmax_ge", &StatParams::with_k(3), None).unwrap();
        assert_eq!(detail(&gap[0]).m_exponent.as_deref(), Some("4/3"));
        let carlitz = threshold_location("carlitz", &StatParams::default(), Some(100)).unwrap();
        assert_eq!(detail(&carlitz[0]).location, "q* = n^(-1)");
        assert_eq!(detail(&carlitz[0]).m_exponent.as_deref(), Some("2"));
        assert!((carlitz[0].value - 0.01).abs() < 1e-15);
        assert!((detail(&carlitz[0]).m_star.unwrap() - 9900.0).abs() < 1e-9);
        let inc = threshold_location("increasing_run", &StatParams::with_k(3), None).unwrap();
        assert_eq!(detail(&inc[0]).n_exponent.as_deref(), Some("-1/3"));
        let eq = threshold_location("equal_terms", &StatParams::with_k(2), None).unwrap();
        assert_eq!(detail(&eq[0]).n_exponent.as_deref(), Some("-2"));
        assert!(matches!(threshold_location("bogus", &StatParams::default(), None), Err(Error::UnknownStatistic(_))));
    }

    #[test]
    fn square_evaluator() {
        let k = square_k_star(1_000_000, 0.0).unwrap();
        let ln = 1e6f64.ln();
        assert!((k - ln / ln.ln()).abs() < 1e-12);
        let reg = square_regime(1_000_000, 1.0, 0.5).unwrap();
        assert!(reg.log_expected.is_finite() && reg.log_r.is_finite());
        assert!(reg.asymptotic_log_expected > 0.0 && reg.asymptotic_log_r < 0.0);
        assert!(square_k_star(10, 0.0).is_err());
    }
}
