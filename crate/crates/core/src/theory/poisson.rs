use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{HoldsWhen, PoissonDetail, PredictionKind, TheoryPrediction};
use crate::error::{Error, Result};
use crate::patterns::{PatternKind, PatternSpec, Shape};

/// Stable identifiers of the Poisson-limit statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StatisticId {
    CmaxGe,
    GmaxGe,
    CmaxGeSharp,
    GmaxGeSharp,
    CminGt,
    GminGt,
    CminGtGrowing,
    GminGtGrowing,
    ExactAppear,
    ExactDisappear,
    EqualNonzeroRunAppear,
    EqualNonzeroRunDisappear,
    UpperAppear,
    LowerDisappear,
    TmaxGe,
    TmaxGeWindow,
    TmaxGeConstantP,
    TminGe,
    TminGeGrowing,
    IncreasingRun,
    OrderingDisappear,
    EqualRun,
    Carlitz,
    EqualTerms,
}

const ALL_IDS: [(StatisticId, &str); 24] = [
    (StatisticId::CmaxGe, "cmax_ge"),
    (StatisticId::GmaxGe, "gmax_ge"),
    (StatisticId::CmaxGeSharp, "cmax_ge_sharp"),
    (StatisticId::GmaxGeSharp, "gmax_ge_sharp"),
    (StatisticId::CminGt, "cmin_gt"),
    (StatisticId::GminGt, "gmin_gt"),
    (StatisticId::CminGtGrowing, "cmin_gt_growing"),
    (StatisticId::GminGtGrowing, "gmin_gt_growing"),
    (StatisticId::ExactAppear, "exact_appear"),
    (StatisticId::ExactDisappear, "exact_disappear"),
    (StatisticId::EqualNonzeroRunAppear, "equal_nonzero_run_appear"),
    (StatisticId::EqualNonzeroRunDisappear, "equal_nonzero_run_disappear"),
    (StatisticId::UpperAppear, "upper_appear"),
    (StatisticId::LowerDisappear, "lower_disappear"),
    (StatisticId::TmaxGe, "tmax_ge"),
    (StatisticId::TmaxGeWindow, "tmax_ge_window"),
    (StatisticId::TmaxGeConstantP, "tmax_ge_constant_p"),
    (StatisticId::TminGe, "tmin_ge"),
    (StatisticId::TminGeGrowing, "tmin_ge_growing"),
    (StatisticId::IncreasingRun, "increasing_run"),
    (StatisticId::OrderingDisappear, "ordering_disappear"),
    (StatisticId::EqualRun, "equal_run"),
    (StatisticId::Carlitz, "carlitz"),
    (StatisticId::EqualTerms, "equal_terms"),
];

impl StatisticId {
    pub fn all() -> impl Iterator<Item = StatisticId> {
        ALL_IDS.iter().map(|&(id, _)| id)
    }

    pub fn as_str(self) -> &'static str {
        ALL_IDS.iter().find(|&&(id, _)| id == self).map(|&(_, s)| s).expect("listed")
    }
}

impl fmt::Display for StatisticId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatisticId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ALL_IDS
            .iter()
            .find(|&&(_, name)| name == s)
            .map(|&(id, _)| id)
            .ok_or_else(|| Error::UnknownStatistic(s.to_string()))
    }
}

impl Serialize for StatisticId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for StatisticId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parameters of a statistic; which ones are needed depends on the id.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternSpec>,
}

impl StatParams {
    pub fn with_k(k: u64) -> Self {
        StatParams { k: Some(k), ..Self::default() }
    }

    pub fn with_r(r: u64) -> Self {
        StatParams { r: Some(r), ..Self::default() }
    }

    pub fn with_pattern(pattern: PatternSpec) -> Self {
        StatParams { pattern: Some(pattern), ..Self::default() }
    }

    fn k(&self, id: StatisticId, min: u64) -> Result<u64> {
        match self.k {
            Some(k) if k >= min => Ok(k),
            Some(k) => Err(Error::param(format!("{id} needs k >= {min}, got {k}"))),
            None => Err(Error::param(format!("{id} needs parameter k"))),
        }
    }

    fn r(&self, id: StatisticId) -> Result<u64> {
        match self.r {
            Some(r) if r >= 1 => Ok(r),
            Some(_) => Err(Error::param(format!("{id} needs r >= 1"))),
            None => Err(Error::param(format!("{id} needs parameter r"))),
        }
    }

    fn pattern(&self, id: StatisticId, kind: PatternKind) -> Result<&PatternSpec> {
        let spec = self.pattern.as_ref().ok_or_else(|| Error::param(format!("{id} needs a pattern")))?;
        if spec.kind() != kind || spec.shape() != Shape::Consecutive {
            return Err(Error::param(format!(
                "{id} needs a consecutive {} pattern, got `{spec}`",
                format!("{kind:?}").to_lowercase()
            )));
        }
        Ok(spec)
    }
}

/// The model parameter a regime is stated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    P,
    Q,
}

/// A geometric-model parameter value, kept in whichever of `p` or `q` it
/// was computed in so tiny values of `q` keep full precision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimePoint {
    pub param: Param,
    pub value: f64,
}

impl RegimePoint {
    pub fn p(&self) -> f64 {
        match self.param {
            Param::P => self.value,
            Param::Q => 1.0 - self.value,
        }
    }

    pub fn q(&self) -> f64 {
        match self.param {
            Param::P => 1.0 - self.value,
            Param::Q => self.value,
        }
    }
}

/// How the regime parameter depends on `n` and the scale constant.
enum Scale {
    /// `x = alpha * n^(-e)`.
    Power(Param, f64),
    /// `x = alpha / sqrt(k n)`.
    InvSqrtKn(Param, f64),
    /// `x = alpha / (r n)`.
    InvRn(Param, f64),
    /// `x = exp(-(ln n - alpha) / k)`.
    SharpLog(Param, f64),
    /// `p = exp(-(ln n + c) / r)`.
    TmaxWindow(f64),
    /// Constant `p`, `r = log_{1/p} n + c`.
    ConstantP(f64),
}

struct Row {
    mean: f64,
    holds: HoldsWhen,
    regime: String,
    scale: Scale,
}

fn exponent_text(e: f64) -> String {
    let mut s = format!("{e:.6}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

fn row(id: StatisticId, params: &StatParams, alpha: f64) -> Result<Row> {
    use HoldsWhen::{None as Zero, Some as Any};
    use Param::{P, Q};
    use StatisticId::*;
    let power = |param: Param, e: f64| {
        let name = if param == P { "p" } else { "q" };
        (format!("{name} ~ alpha n^(-{})", exponent_text(e)), Scale::Power(param, e))
    };
    let (mean, holds, (regime, scale)) = match id {
        CmaxGe | GmaxGe => {
            let k = params.k(id, 1)?;
            let param = if id == CmaxGe { P } else { Q };
            (alpha.powi(k as i32), Any, power(param, 1.0 / k as f64))
        }
        CmaxGeSharp | GmaxGeSharp => {
            let k = params.k(id, 1)? as f64;
            let param = if id == CmaxGeSharp { P } else { Q };
            let name = if param == P { "p" } else { "q" };
            (alpha.exp(), Any, (format!("{name} = exp(-(log n - alpha)/k), 1 << k << log n"), Scale::SharpLog(param, k)))
        }
        CminGt | GminGt => {
            let k = params.k(id, 1)?;
            let param = if id == CminGt { Q } else { P };
            (alpha * alpha * k as f64, Zero, power(param, 0.5))
        }
        CminGtGrowing | GminGtGrowing => {
            let k = params.k(id, 1)? as f64;
            let param = if id == CminGtGrowing { Q } else { P };
            let name = if param == P { "p" } else { "q" };
            (alpha * alpha, Zero, (format!("{name} ~ alpha/sqrt(k n), 1 << k << n"), Scale::InvSqrtKn(param, k)))
        }
        ExactAppear => {
            let spec = params.pattern(id, PatternKind::Exact)?;
            let s = spec.size();
            if s == 0 {
                return Err(Error::param("exact_appear needs a nonzero pattern"));
            }
            (alpha.powi(s as i32), Any, power(P, 1.0 / s as f64))
        }
        ExactDisappear => {
            let spec = params.pattern(id, PatternKind::Exact)?;
            if !spec.is_nonzero() {
                return Err(Error::param("exact_disappear needs a nonzero pattern"));
            }
            let k = spec.length();
            (alpha.powi(k as i32), Any, power(Q, 1.0 / k as f64))
        }
        EqualNonzeroRunAppear => {
            let k = params.k(id, 2)?;
            (alpha.powi(k as i32), Any, power(P, 1.0 / k as f64))
        }
        EqualNonzeroRunDisappear => {
            let k = params.k(id, 2)?;
            (alpha.powi(k as i32 - 1) / k as f64, Any, power(Q, 1.0 / (k - 1) as f64))
        }
        UpperAppear => {
            let spec = params.pattern(id, PatternKind::Upper)?;
            let s = spec.size();
            if s == 0 {
                return Err(Error::param("upper_appear needs a nonzero pattern"));
            }
            (alpha.powi(s as i32), Any, power(P, 1.0 / s as f64))
        }
        LowerDisappear => {
            let spec = params.pattern(id, PatternKind::Lower)?;
            let k = spec.length();
            let rho: f64 = spec.terms().iter().map(|&r| r as f64 + 1.0).product();
            (alpha.powi(k as i32) * rho, Any, power(Q, 1.0 / k as f64))
        }
        TmaxGe => {
            let r = params.r(id)?;
            (alpha.powi(r as i32), Any, power(P, 1.0 / r as f64))
        }
        TmaxGeWindow => {
            let r = params.r(id)? as f64;
            ((-alpha).exp(), Any, ("p = 1/omega, r = (log n + c)/log omega, alpha = c".to_string(), Scale::TmaxWindow(r)))
        }
        TmaxGeConstantP => {
            let p = params.p.ok_or_else(|| Error::param("tmax_ge_constant_p needs parameter p"))?;
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::param("tmax_ge_constant_p needs 0 < p < 1"));
            }
            (p.powf(alpha), Any, ("p constant, r = log_{1/p} n + c, alpha = c".to_string(), Scale::ConstantP(p)))
        }
        TminGe => {
            let r = params.r(id)?;
            (alpha * r as f64, Zero, power(Q, 1.0))
        }
        TminGeGrowing => {
            let r = params.r(id)? as f64;
            (alpha, Zero, ("q ~ alpha/(r n), r >> 1".to_string(), Scale::InvRn(Q, r)))
        }
        IncreasingRun => {
            let k = params.k(id, 2)?;
            let e = (k * (k - 1) / 2) as i32;
            (alpha.powi(e), Any, power(P, 1.0 / e as f64))
        }
        OrderingDisappear => {
            let spec = params.pattern(id, PatternKind::Ordering)?;
            let ls = spec.value_multiplicities();
            let d = spec.length() - ls.len();
            if d == 0 {
                return Err(Error::param("ordering_disappear needs a pattern with a repeated value"));
            }
            let mut lambda = 1.0;
            let mut suffix = 0usize;
            for &l in ls.iter().rev() {
                suffix += l;
                lambda *= suffix as f64;
            }
            (alpha.powi(d as i32) / lambda, Any, power(Q, 1.0 / d as f64))
        }
        EqualRun | Carlitz => {
            let k = if id == Carlitz { 2 } else { params.k(id, 2)? };
            let holds = if id == Carlitz { Zero } else { Any };
            (alpha.powi(k as i32 - 1) / k as f64, holds, power(Q, 1.0 / (k - 1) as f64))
        }
        EqualTerms => {
            let k = params.k(id, 2)?;
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            (alpha.powi(k as i32 - 1) / (k as f64 * fact), Any, power(Q, k as f64 / (k - 1) as f64))
        }
    };
    Ok(Row { mean, holds, regime, scale })
}

/// Limiting Poisson law of the count behind statistic `id` at scale
/// constant `alpha`. The prediction value is the limiting probability that
/// the named property holds.
pub fn poisson_limit(id: StatisticId, params: &StatParams, alpha: f64) -> Result<TheoryPrediction> {
    if !alpha.is_finite() {
        return Err(Error::param("alpha must be finite"));
    }
    let needs_positive = !matches!(
        id,
        StatisticId::CmaxGeSharp | StatisticId::GmaxGeSharp | StatisticId::TmaxGeWindow | StatisticId::TmaxGeConstantP
    );
    if needs_positive && alpha <= 0.0 {
        return Err(Error::param("alpha must be positive"));
    }
    let row = row(id, params, alpha)?;
    let p_none = (-row.mean).exp();
    let p_some = -(-row.mean).exp_m1();
    let value = match row.holds {
        HoldsWhen::None => p_none,
        HoldsWhen::Some => p_some,
    };
    Ok(TheoryPrediction {
        quantity: id.as_str().to_string(),
        kind: PredictionKind::Probability,
        value,
        regime: row.regime,
        exact: false,
        poisson: Some(PoissonDetail { mean: row.mean, p_none, p_some, holds_when: row.holds }),
        threshold: None,
    })
}

/// The geometric-model parameter that puts statistic `id` at scale
/// constant `alpha` for size `n`.
pub fn regime_point(id: StatisticId, params: &StatParams, alpha: f64, n: u64) -> Result<RegimePoint> {
    let row = row(id, params, alpha)?;
    let nf = n as f64;
    let (param, value) = match row.scale {
        Scale::Power(param, e) => (param, alpha * nf.powf(-e)),
        Scale::InvSqrtKn(param, k) => (param, alpha / (k * nf).sqrt()),
        Scale::InvRn(param, r) => (param, alpha / (r * nf)),
        Scale::SharpLog(param, k) => (param, (-(nf.ln() - alpha) / k).exp()),
        Scale::TmaxWindow(r) => (Param::P, (-(nf.ln() + alpha) / r).exp()),
        Scale::ConstantP(p) => (Param::P, p),
    };
    let inside = match param {
        Param::P => (0.0..1.0).contains(&value),
        Param::Q => value > 0.0 && value <= 1.0,
    };
    if !inside {
        return Err(Error::param(format!("{id} at alpha={alpha}, n={n} gives {param:?} = {value}, outside the model")));
    }
    Ok(RegimePoint { param, value })
}

/// Inverse of [`regime_point`]: the scale constant implied by a model
/// point `(n, p)`.
pub fn alpha_at_point(id: StatisticId, params: &StatParams, n: u64, point: RegimePoint) -> Result<f64> {
    let row = row(id, params, 1.0)?;
    let nf = n as f64;
    let pick = |param: Param| match param {
        Param::P => point.p(),
        Param::Q => point.q(),
    };
    Ok(match row.scale {
        Scale::Power(param, e) => pick(param) * nf.powf(e),
        Scale::InvSqrtKn(param, k) => pick(param) * (k * nf).sqrt(),
        Scale::InvRn(param, r) => pick(param) * r * nf,
        Scale::SharpLog(param, k) => nf.ln() + k * pick(param).ln(),
        Scale::TmaxWindow(r) => -r * point.p().ln() - nf.ln(),
        Scale::ConstantP(p) => {
            let r = params.r.ok_or_else(|| Error::param("tmax_ge_constant_p needs parameter r to locate a point"))?;
            r as f64 - nf.ln() / (1.0 / p).ln()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::parse_pattern;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn ids_round_trip() {
        for id in StatisticId::all() {
            assert_eq!(id.as_str().parse::<StatisticId>().unwrap(), id);
        }
        assert!(matches!("nope".parse::<StatisticId>(), Err(Error::UnknownStatistic(_))));
    }

    #[test]
    fn table_values() {
        let cmax = poisson_limit(StatisticId::CmaxGe, &StatParams::with_k(2), 1.0).unwrap();
        assert!(close(cmax.value, 0.632_120_558_828_557_7, 1e-15));

        let eq = poisson_limit(StatisticId::EqualTerms, &StatParams::with_k(2), 1.0).unwrap();
        assert!(close(eq.poisson.as_ref().unwrap().mean, 0.25, 1e-15));
        assert!(close(eq.poisson.unwrap().p_none, (-0.25f64).exp(), 1e-15));

        let ord = StatParams::with_pattern(parse_pattern("o:[0,1,0]").unwrap());
        let od = poisson_limit(StatisticId::OrderingDisappear, &ord, 1.0).unwrap();
        assert!(close(od.poisson.unwrap().mean, 1.0 / 3.0, 1e-15));

        let cmin = poisson_limit(StatisticId::CminGt, &StatParams::with_k(1), 1.0).unwrap();
        assert!(close(cmin.value, (-1f64).exp(), 1e-15));

        let low = StatParams::with_pattern(parse_pattern("l:[0,2]").unwrap());
        let ld = poisson_limit(StatisticId::LowerDisappear, &low, 0.5).unwrap();
        assert!(close(ld.poisson.unwrap().mean, 0.25 * 3.0, 1e-15));

        let carlitz = poisson_limit(StatisticId::Carlitz, &StatParams::default(), 2.0).unwrap();
        assert!(close(carlitz.value, (-1f64).exp(), 1e-15));

        let tmin = poisson_limit(StatisticId::TminGe, &StatParams::with_r(3), 0.5).unwrap();
        assert!(close(tmin.value, (-1.5f64).exp(), 1e-15));

        let window = poisson_limit(StatisticId::TmaxGeWindow, &StatParams::with_r(2), 0.0).unwrap();
        assert!(close(window.value, 1.0 - (-1f64).exp(), 1e-15));
    }

    #[test]
    fn missing_parameters_rejected() {
        assert!(poisson_limit(StatisticId::CmaxGe, &StatParams::default(), 1.0).is_err());
        let wrong = StatParams::with_pattern(parse_pattern("u:[1]").unwrap());
        assert!(poisson_limit(StatisticId::ExactAppear, &wrong, 1.0).is_err());
        assert!(poisson_limit(StatisticId::CmaxGe, &StatParams::with_k(2), -1.0).is_err());
    }

    #[test]
    fn regime_points_invert() {
        let n = 20_000;
        let cases = [
            (StatisticId::CmaxGe, StatParams::with_k(2), 1.3),
            (StatisticId::CminGt, StatParams::with_k(1), 0.7),
            (StatisticId::EqualTerms, StatParams::with_k(2), 1.0),
            (StatisticId::TminGeGrowing, StatParams::with_r(5), 2.0),
            (StatisticId::CmaxGeSharp, StatParams::with_k(3), 0.5),
            (StatisticId::TmaxGeWindow, StatParams::with_r(3), -0.4),
        ];
        for (id, params, alpha) in cases {
            let pt = regime_point(id, &params, alpha, n).unwrap();
            let back = alpha_at_point(id, &params, n, pt).unwrap();
            assert!(close(back, alpha, 1e-9), "{id}: {back} vs {alpha}");
        }
        let pt = regime_point(StatisticId::EqualTerms, &StatParams::with_k(2), 1.0, n).unwrap();
        assert_eq!(pt.param, Param::Q);
        assert!(close(pt.q(), 1.0 / (n as f64 * n as f64), 1e-22));
    }
}
