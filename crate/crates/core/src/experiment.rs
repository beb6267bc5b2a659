//! Config-driven Monte Carlo sweeps over model grids.
//!
//! Every trial draws from its own substream `(point_index << 40) | trial`
//! of the configured seed, so results do not depend on the worker count.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::estimate::{estimate_probability, poisson_tv_distance, EstimateResult, IntervalMethod, DEFAULT_CONFIDENCE};
use crate::oracle::{exact_prob_geometric_law, exact_prob_uniform, DpOptions};
use crate::property::{Property, PropertySpec};
use crate::rng::RngStream;
use crate::samplers::{fill_geometric, fill_uniform_bars, GeometricLaw};
use crate::theory::{alpha_at_point, poisson_limit, Param, RegimePoint, StatParams, StatisticId, TheoryPrediction};

/// Config schema version understood by this build.
pub const CONFIG_VERSION: u32 = 1;

/// Seed used when neither the config nor the caller supplies one.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// CSV header of [`rows_to_csv`].
pub const CSV_HEADER: &str = "n,m_or_p,trials,p_hat,ci_low,ci_high,theory,abs_diff,seconds";

const TRIAL_BITS: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Uniform,
    Geometric,
}

/// Which model parameter a power grid sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridParam {
    M,
    P,
    Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

fn one() -> Vec<f64> {
    vec![1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Grid {
    /// Explicit model points.
    Points { points: Vec<GridPoint> },
    /// `param = alpha * n^exponent` for every `n`, `alpha` and `exponent`
    /// (in that nesting order); `m` is rounded to the nearest integer.
    Power {
        n: Vec<u64>,
        param: GridParam,
        #[serde(default = "one")]
        alpha: Vec<f64>,
        exponent: Vec<f64>,
    },
}

/// Worker count: a positive number or `"auto"`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "WorkersRepr", into = "WorkersRepr")]
pub enum Workers {
    Count(usize),
    #[default]
    Auto,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AutoTag {
    Auto,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum WorkersRepr {
    Count(usize),
    Name(AutoTag),
}

impl From<WorkersRepr> for Workers {
    fn from(r: WorkersRepr) -> Self {
        match r {
            WorkersRepr::Count(n) => Workers::Count(n),
            WorkersRepr::Name(AutoTag::Auto) => Workers::Auto,
        }
    }
}

impl From<Workers> for WorkersRepr {
    fn from(w: Workers) -> Self {
        match w {
            Workers::Count(n) => WorkersRepr::Count(n),
            Workers::Auto => WorkersRepr::Name(AutoTag::Auto),
        }
    }
}

/// Where the theory column comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TheorySource {
    /// Limiting Poisson probability at the scale constant implied by the
    /// point. Uniform points use `p = m / (m + n)`.
    Poisson {
        statistic: StatisticId,
        #[serde(default)]
        params: StatParams,
    },
    /// Exact value from the oracle: enumeration for the uniform model,
    /// the transfer dynamic program for the geometric model.
    Oracle,
}

fn default_confidence() -> f64 {
    DEFAULT_CONFIDENCE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub model: ModelKind,
    pub grid: Grid,
    pub property: PropertySpec,
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub workers: Workers,
    #[serde(default)]
    pub interval: IntervalMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory: Option<TheorySource>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::Config(format!("unsupported config version {}, expected {CONFIG_VERSION}", self.version)));
        }
        if self.trials == 0 || self.trials >= 1 << TRIAL_BITS {
            return Err(Error::Config(format!("trials must lie in 1..2^{TRIAL_BITS}")));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::Config("confidence must lie in (0, 1)".into()));
        }
        if self.workers == Workers::Count(0) {
            return Err(Error::Config("workers must be positive or \"auto\"".into()));
        }
        self.property.build()?;
        if self.points()?.is_empty() {
            return Err(Error::Config("grid is empty".into()));
        }
        Ok(())
    }

    /// The grid resolved to model points, in output order.
    pub fn points(&self) -> Result<Vec<ModelPoint>> {
        let raw: Vec<GridPoint> = match &self.grid {
            Grid::Points { points } => points.clone(),
            Grid::Power { n, param, alpha, exponent } => {
                let mut out = Vec::new();
                for &n in n {
                    for &a in alpha {
                        for &e in exponent {
                            let x = a * (n as f64).powf(e);
                            let mut pt = GridPoint { n, m: None, p: None, q: None };
                            match param {
                                GridParam::M => pt.m = Some(x.round() as u64),
                                GridParam::P => pt.p = Some(x),
                                GridParam::Q => pt.q = Some(x),
                            }
                            out.push(pt);
                        }
                    }
                }
                out
            }
        };
        raw.iter().map(|pt| ModelPoint::resolve(self.model, pt)).collect()
    }
}

/// A resolved model point.
#[derive(Clone, Debug, PartialEq)]
pub enum ModelPoint {
    Uniform { n: u64, m: u64 },
    Geometric { n: u64, point: RegimePoint, law: GeometricLaw },
}

impl ModelPoint {
    fn resolve(model: ModelKind, pt: &GridPoint) -> Result<Self> {
        if pt.n == 0 {
            return Err(Error::Config("grid point needs n >= 1".into()));
        }
        match (model, pt.m, pt.p, pt.q) {
            (ModelKind::Uniform, Some(m), None, None) => Ok(ModelPoint::Uniform { n: pt.n, m }),
            (ModelKind::Geometric, None, Some(p), None) => {
                Ok(ModelPoint::Geometric { n: pt.n, point: RegimePoint { param: Param::P, value: p }, law: GeometricLaw::from_p(p)? })
            }
            (ModelKind::Geometric, None, None, Some(q)) => {
                Ok(ModelPoint::Geometric { n: pt.n, point: RegimePoint { param: Param::Q, value: q }, law: GeometricLaw::from_q(q)? })
            }
            (ModelKind::Uniform, ..) => Err(Error::Config("uniform grid points need exactly `n` and `m`".into())),
            (ModelKind::Geometric, ..) => Err(Error::Config("geometric grid points need `n` and one of `p`, `q`".into())),
        }
    }

    pub fn n(&self) -> u64 {
        match self {
            ModelPoint::Uniform { n, .. } | ModelPoint::Geometric { n, .. } => *n,
        }
    }

    /// `m` for uniform points, `p` for geometric points.
    pub fn m_or_p(&self) -> String {
        match self {
            ModelPoint::Uniform { m, .. } => m.to_string(),
            ModelPoint::Geometric { law, .. } => law.p().to_string(),
        }
    }

    fn regime_point(&self) -> RegimePoint {
        match self {
            ModelPoint::Uniform { n, m } => RegimePoint { param: Param::P, value: *m as f64 / (*m + *n) as f64 },
            ModelPoint::Geometric { point, .. } => *point,
        }
    }

    fn sample_into(&self, buf: &mut Vec<u64>, rng: &mut RngStream) -> Result<()> {
        match self {
            ModelPoint::Uniform { n, m } => fill_uniform_bars(buf, *n as usize, *m, rng),
            ModelPoint::Geometric { n, law, .. } => {
                fill_geometric(buf, *n as usize, law, rng);
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u64,
    pub m_or_p: String,
    pub estimate: EstimateResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theory: Option<TheoryPrediction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_diff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

/// Runtime overrides for a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SweepOptions {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    /// Fill the `seconds` column with wall-clock time per point.
    pub timing: bool,
}

fn pool(cfg: &ExperimentConfig, opts: &SweepOptions) -> Result<rayon::ThreadPool> {
    let threads = match (opts.workers, cfg.workers) {
        (Some(w), _) | (None, Workers::Count(w)) => w,
        (None, Workers::Auto) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::Config(e.to_string()))
}

/// Runs `f` on every trial of point `index`, in parallel, and folds the
/// per-trial outputs with `merge` in an order-independent way.
fn trials<T, F, M>(point: &ModelPoint, index: usize, seed: u64, trials: u64, init: T, f: F, merge: M) -> Result<T>
where
    T: Clone + Send + Sync,
    F: Fn(&mut T, &Composition) -> Result<()> + Sync,
    M: Fn(T, T) -> T + Sync + Send,
{
    let base = RngStream::new(seed, 0);
    let point_bits = (index as u64) << TRIAL_BITS;
    (0..trials)
        .into_par_iter()
        .try_fold(
            || (init.clone(), Vec::new()),
            |(mut acc, mut buf), t| {
                let mut rng = base.substream(point_bits | t);
                point.sample_into(&mut buf, &mut rng)?;
                let c = Composition::from_vec_unchecked(std::mem::take(&mut buf));
                f(&mut acc, &c)?;
                buf = c.into_terms();
                Ok::<_, Error>((acc, buf))
            },
        )
        .map(|r| r.map(|(acc, _)| acc))
        .try_reduce(|| init.clone(), |a, b| Ok(merge(a, b)))
}

fn theory_at(source: &TheorySource, point: &ModelPoint, property: &Property) -> Result<TheoryPrediction> {
    match source {
        TheorySource::Poisson { statistic, params } => {
            let alpha = alpha_at_point(*statistic, params, point.n(), point.regime_point())?;
            poisson_limit(*statistic, params, alpha)
        }
        TheorySource::Oracle => {
            let exact = match point {
                ModelPoint::Uniform { n, m } => {
                    let mut failure = None;
                    let r = exact_prob_uniform(*n, *m, |c| match property.eval(c) {
                        Ok(b) => b,
                        Err(e) => {
                            failure.get_or_insert(e);
                            false
                        }
                    })?;
                    if let Some(e) = failure {
                        return Err(e);
                    }
                    r
                }
                ModelPoint::Geometric { n, law, .. } => exact_prob_geometric_law(*n, law, property, &DpOptions::default())?,
            };
            Ok(TheoryPrediction {
                quantity: format!("P({property})"),
                kind: crate::theory::PredictionKind::Probability,
                value: exact.value(),
                regime: "finite n".into(),
                exact: !exact.flagged,
                poisson: None,
                threshold: None,
            })
        }
    }
}

/// Estimates `P(property)` at every grid point.
pub fn run_sweep(cfg: &ExperimentConfig, opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let property = cfg.property.build()?;
    let seed = opts.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let pool = pool(cfg, opts)?;
    let mut rows = Vec::new();
    for (index, point) in cfg.points()?.iter().enumerate() {
        let start = Instant::now();
        let hits = pool.install(|| {
            trials(
                point,
                index,
                seed,
                cfg.trials,
                0u64,
                |acc, c| {
                    *acc += property.eval(c)? as u64;
                    Ok(())
                },
                |a, b| a + b,
            )
        })?;
        let seconds = start.elapsed().as_secs_f64();
        let estimate = estimate_probability(hits, cfg.trials, seed, cfg.confidence, cfg.interval)?;
        let theory = cfg.theory.as_ref().map(|t| theory_at(t, point, &property)).transpose()?;
        let abs_diff = theory.as_ref().map(|t| (estimate.point - t.value).abs());
        rows.push(SweepRow {
            n: point.n(),
            m_or_p: point.m_or_p(),
            estimate,
            theory,
            abs_diff,
            seconds: opts.timing.then_some(seconds),
        });
    }
    Ok(rows)
}

/// Empirical law of the occurrence count behind the property at one
/// grid point, compared with the limiting Poisson law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonFitRow {
    pub n: u64,
    pub m_or_p: String,
    pub trials: u64,
    /// `histogram[j]` = number of trials with count `j`.
    pub histogram: Vec<u64>,
    pub mean_hat: f64,
    pub p0_hat: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poisson_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p0_theory: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_distance: Option<f64>,
}

/// Records the occurrence count of the property's predicate per trial.
/// The Poisson mean comes from a `poisson` theory source when present.
pub fn run_poisson_fit(cfg: &ExperimentConfig, opts: &SweepOptions) -> Result<Vec<PoissonFitRow>> {
    cfg.validate()?;
    let property = cfg.property.build()?;
    let seed = opts.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let pool = pool(cfg, opts)?;
    let mut rows = Vec::new();
    for (index, point) in cfg.points()?.iter().enumerate() {
        let histogram = pool.install(|| {
            trials(
                point,
                index,
                seed,
                cfg.trials,
                Vec::<u64>::new(),
                |h, c| {
                    let x = property.predicate.count(c)? as usize;
                    if h.len() <= x {
                        h.resize(x + 1, 0);
                    }
                    h[x] += 1;
                    Ok(())
                },
                |mut a, b| {
                    if a.len() < b.len() {
                        a.resize(b.len(), 0);
                    }
                    for (x, y) in a.iter_mut().zip(&b) {
                        *x += y;
                    }
                    a
                },
            )
        })?;
        let total = cfg.trials as f64;
        let mean_hat = histogram.iter().enumerate().map(|(j, &c)| j as f64 * c as f64).sum::<f64>() / total;
        let p0_hat = histogram.first().copied().unwrap_or(0) as f64 / total;
        let poisson_mean = match &cfg.theory {
            Some(t @ TheorySource::Poisson { .. }) => theory_at(t, point, &property)?.poisson.map(|d| d.mean),
            _ => None,
        };
        let tv_distance = poisson_mean.map(|m| poisson_tv_distance(&histogram, m)).transpose()?;
        rows.push(PoissonFitRow {
            n: point.n(),
            m_or_p: point.m_or_p(),
            trials: cfg.trials,
            histogram,
            mean_hat,
            p0_hat,
            poisson_mean,
            p0_theory: poisson_mean.map(|m| (-m).exp()),
            tv_distance,
        });
    }
    Ok(rows)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// CSV text with header [`CSV_HEADER`], one line per row.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let e = &r.estimate;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            r.m_or_p,
            e.trials,
            e.point,
            e.ci_low,
            e.ci_high,
            opt(r.theory.as_ref().map(|t| t.value)),
            opt(r.abs_diff),
            opt(r.seconds.map(|s| (s * 1e6).round() / 1e6)),
        );
    }
    out
}

/// One JSON document per line.
pub fn rows_to_json_lines<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).map_err(|e| Error::Config(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text).unwrap()
    }

    const BASIC: &str = r#"{
        "version": 1,
        "model": "geometric",
        "grid": {"kind": "points", "points": [{"n": 50, "p": 0.1}, {"n": 50, "q": 0.5}]},
        "property": {"statistic": "cmax_ge", "k": 2},
        "trials": 2000,
        "seed": 7,
        "theory": {"kind": "oracle"}
    }"#;

    #[test]
    fn parses_and_resolves_grids() {
        let cfg = config(BASIC);
        assert_eq!(cfg.workers, Workers::Auto);
        let pts = cfg.points().unwrap();
        assert_eq!(pts[1].m_or_p(), "0.5");
        let power = config(
            r#"{"version":1,"model":"uniform","grid":{"kind":"power","n":[100],"param":"m","exponent":[0.5,1]},
            "property":{"pattern":"u:[1,1]"},"trials":10,"workers":3}"#,
        );
        assert_eq!(power.workers, Workers::Count(3));
        let pts = power.points().unwrap();
        assert_eq!(pts.iter().map(|p| p.m_or_p()).collect::<Vec<_>>(), ["10", "100"]);
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            BASIC.replace("\"version\": 1", "\"version\": 2"),
            BASIC.replace("\"trials\": 2000", "\"trials\": 0"),
            BASIC.replace("cmax_ge", "no_such"),
            BASIC.replace("\"seed\": 7", "\"seed\": 7, \"extra\": 1"),
            BASIC.replace("{\"n\": 50, \"p\": 0.1}", "{\"n\": 50, \"m\": 3}"),
            BASIC.replace("\"points\": [{\"n\": 50, \"p\": 0.1}, {\"n\": 50, \"q\": 0.5}]", "\"points\": []"),
        ] {
            assert!(ExperimentConfig::from_json(&bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let cfg = config(BASIC);
        let one = rows_to_csv(&run_sweep(&cfg, &SweepOptions { workers: Some(1), ..Default::default() }).unwrap());
        let four = rows_to_csv(&run_sweep(&cfg, &SweepOptions { workers: Some(4), ..Default::default() }).unwrap());
        assert_eq!(one, four);
        assert!(one.starts_with(CSV_HEADER));
        assert_eq!(one.lines().count(), 3);
    }

    #[test]
    fn estimates_track_the_oracle() {
        let rows = run_sweep(&config(BASIC), &SweepOptions::default()).unwrap();
        for r in rows {
            let t = r.theory.unwrap().value;
            let se = (t * (1.0 - t) / r.estimate.trials as f64).sqrt();
            assert!(r.abs_diff.unwrap() <= 4.0 * se + 1e-12, "{} vs {t}", r.estimate.point);
            assert!(r.seconds.is_none());
        }
    }

    #[test]
    fn poisson_fit_histogram() {
        let cfg = config(
            r#"{"version":1,"model":"geometric","grid":{"kind":"power","n":[400],"param":"p","exponent":[-0.5]},
            "property":{"statistic":"cmax_ge","k":2},"trials":3000,"seed":3,
            "theory":{"kind":"poisson","statistic":"cmax_ge","params":{"k":2}}}"#,
        );
        let rows = run_poisson_fit(&cfg, &SweepOptions::default()).unwrap();
        let r = &rows[0];
        assert_eq!(r.histogram.iter().sum::<u64>(), 3000);
        assert!((r.poisson_mean.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.tv_distance.unwrap() < 0.1);
        assert!((r.mean_hat - 1.0).abs() < 0.15);
    }
}
