//! The `randcomp` command line.
//!
//! Exit codes: 0 on success, 1 on usage or parameter errors, 2 when a
//! request is unsupported or exceeds an enumeration guard.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::composition::Composition;
use crate::error::{Error, Result};
use crate::estimate::IntervalMethod;
use crate::experiment::{
    rows_to_csv, rows_to_json_lines, run_poisson_fit, run_sweep, ExperimentConfig, SweepOptions, DEFAULT_SEED,
};
use crate::oracle::{exact_prob_geometric_given_size, exact_prob_geometric_law, exact_prob_uniform, DpOptions};
use crate::patterns::{match_pattern, parse_pattern, GapMode, MatchOptions};
use crate::property::{Predicate, Property};
use crate::render::{render_ascii, render_svg};
use crate::report::StatsReport;
use crate::rng::RngStream;
use crate::samplers::{fill_geometric, fill_uniform_bars, sample_uniform_chain, GeometricLaw};
use crate::theory::{self, StatParams, StatisticId};

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "RANDCOMP_SEED";

#[derive(Parser, Debug)]
#[command(name = "randcomp", version, about = "Random weak integer compositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw random compositions, one per line.
    Sample(SampleArgs),
    /// Statistics of one composition as JSON.
    Stats {
        /// Comma-separated terms or a digit string; `-` reads stdin.
        composition: String,
    },
    /// Match a pattern against a composition.
    Match(MatchArgs),
    /// Evaluate a closed-form prediction.
    Theory {
        /// poisson, regime-point, threshold, expected-components,
        /// expected-gaps, mean-component-length, mean-gap-length,
        /// exact-at-position, exact-count, exact-argmax,
        /// exact-at-position-uniform, ordering-at-position, tmax-lt,
        /// tmin-ge or square-k-star.
        what: String,
        /// A statistic id (for poisson, regime-point and threshold)
        /// followed by `key=value` parameters.
        args: Vec<String>,
    },
    /// Run a Monte Carlo sweep from a JSON config.
    Sweep(SweepArgs),
    /// Draw a composition as bars.
    Render {
        composition: String,
        #[arg(long, value_enum, default_value_t = RenderFormat::Ascii)]
        format: RenderFormat,
    },
    /// Exact probability of a property by enumeration or transfer DP.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Uniform model; takes `n=` and `m=`.
    #[arg(long, conflicts_with = "geometric")]
    uniform: bool,
    /// Geometric model; takes `n=` and `p=` or `q=`.
    #[arg(long)]
    geometric: bool,
    /// Use the evolutionary chain for the uniform model.
    #[arg(long, requires = "uniform")]
    chain: bool,
    /// Model parameters as `key=value`.
    params: Vec<String>,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = SampleFormat::Csv)]
    format: SampleFormat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SampleFormat {
    Csv,
    Digits,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RenderFormat {
    Ascii,
    Svg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepFormat {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IntervalArg {
    Wilson,
    ClopperPearson,
}

#[derive(Args, Debug)]
struct MatchArgs {
    composition: String,
    pattern: String,
    /// Require at least one position between vincular blocks.
    #[arg(long)]
    strict_gaps: bool,
    /// Report up to this many occurrence anchors.
    #[arg(long, default_value_t = 0)]
    positions: usize,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Path to the JSON config; `-` reads stdin.
    config: String,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fill the `seconds` column.
    #[arg(long)]
    timing: bool,
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    format: SweepFormat,
    /// Override the config's interval method.
    #[arg(long, value_enum)]
    interval: Option<IntervalArg>,
    /// Report the empirical count law against the Poisson limit instead.
    #[arg(long)]
    poisson_fit: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// `uniform` (enumeration) or `geometric` (transfer DP).
    model: String,
    /// `n=`, and `m=` or `p=`/`q=`; `given_m=` conditions the geometric
    /// model on its size.
    params: Vec<String>,
    #[arg(long, conflicts_with = "pattern")]
    statistic: Option<String>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    strict_gaps: bool,
    #[arg(long)]
    negate: bool,
    /// Target interval width for truncated DP results.
    #[arg(long)]
    width: Option<f64>,
}

/// `key=value` arguments, each used at most once.
struct KeyValues {
    map: BTreeMap<String, String>,
}

impl KeyValues {
    fn parse(args: &[String]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for a in args {
            let (k, v) =
                a.split_once('=').ok_or_else(|| Error::param(format!("expected key=value, got `{a}`")))?;
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::param(format!("parameter `{k}` given twice")));
            }
        }
        Ok(KeyValues { map })
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| Error::param(format!("invalid value `{v}` for `{key}`"))),
        }
    }

    fn need<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        self.take(key)?.ok_or_else(|| Error::param(format!("missing parameter `{key}`")))
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::param(format!("unknown parameter `{k}`"))),
            None => Ok(()),
        }
    }
}

fn read_input(arg: &str) -> Result<String> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::param(format!("reading stdin: {e}")))?;
        Ok(s)
    } else {
        Ok(arg.to_string())
    }
}

fn default_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::param(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))
}

fn geometric_law(kv: &mut KeyValues) -> Result<GeometricLaw> {
    match (kv.take::<f64>("p")?, kv.take::<f64>("q")?) {
        (Some(p), None) => GeometricLaw::from_p(p),
        (None, Some(q)) => GeometricLaw::from_q(q),
        _ => Err(Error::param("give exactly one of `p=` or `q=`")),
    }
}

fn cmd_sample(a: &SampleArgs, out: &mut dyn Write) -> Result<()> {
    let mut kv = KeyValues::parse(&a.params)?;
    let n: usize = kv.need("n")?;
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    let seed = match a.seed {
        Some(s) => s,
        None => default_seed()?,
    };
    enum Model {
        Uniform(u64),
        Geometric(GeometricLaw),
    }
    let model = if a.uniform {
        Model::Uniform(kv.need("m")?)
    } else if a.geometric {
        Model::Geometric(geometric_law(&mut kv)?)
    } else {
        return Err(Error::param("choose --uniform or --geometric"));
    };
    kv.finish()?;
    let mut buf = Vec::with_capacity(n);
    for i in 0..a.count {
        let mut rng = RngStream::new(seed, i);
        let c = match &model {
            Model::Uniform(m) if a.chain => sample_uniform_chain(n, *m, &mut rng)?,
            Model::Uniform(m) => {
                fill_uniform_bars(&mut buf, n, *m, &mut rng)?;
                Composition::new(buf.clone())?
            }
            Model::Geometric(law) => {
                fill_geometric(&mut buf, n, law, &mut rng);
                Composition::new(buf.clone())?
            }
        };
        let line = match a.format {
            SampleFormat::Csv => c.to_csv(),
            SampleFormat::Json => format!("[{}]", c.to_csv()),
            SampleFormat::Digits => c
                .to_digits()
                .ok_or_else(|| Error::param(format!("digits format needs every term <= 9, sample {i} has a larger term")))?,
        };
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(())
}

fn io(e: std::io::Error) -> Error {
    Error::param(format!("write failed: {e}"))
}

fn cmd_match(a: &MatchArgs, out: &mut dyn Write) -> Result<()> {
    let c = Composition::parse(&read_input(&a.composition)?)?;
    let spec = parse_pattern(&a.pattern)?;
    let gap = if a.strict_gaps { GapMode::Strict } else { GapMode::Loose };
    let opts = MatchOptions { gap, max_positions: a.positions, ..MatchOptions::default() };
    let report = match_pattern(&c, &spec, &opts)?;
    #[derive(Serialize)]
    struct Out<'a> {
        pattern: String,
        shape: crate::patterns::Shape,
        gap: GapMode,
        #[serde(flatten)]
        report: &'a crate::patterns::MatchReport,
    }
    let o = Out { pattern: spec.to_dsl(), shape: spec.shape(), gap, report: &report };
    writeln!(out, "{}", json(&o)?).map_err(io)
}

fn stat_params(kv: &mut KeyValues) -> Result<StatParams> {
    let pattern = kv.take::<String>("pattern")?.map(|p| parse_pattern(&p)).transpose()?;
    Ok(StatParams { k: kv.take("k")?, r: kv.take("r")?, p: kv.take("p")?, c: kv.take("c")?, pattern })
}

fn cmd_theory(what: &str, args: &[String], out: &mut dyn Write) -> Result<()> {
    let needs_id = matches!(what, "poisson" | "regime-point" | "threshold");
    let (id, rest) = if needs_id {
        let (first, rest) = args.split_first().ok_or_else(|| Error::param(format!("`theory {what}` needs a statistic id")))?;
        (Some(first.as_str()), rest)
    } else {
        (None, args)
    };
    let mut kv = KeyValues::parse(rest)?;
    let text = match what {
        "poisson" => {
            let id: StatisticId = id.unwrap_or_default().parse()?;
            let alpha: f64 = kv.need("alpha")?;
            let params = stat_params(&mut kv)?;
            kv.finish()?;
            json(&theory::poisson_limit(id, &params, alpha)?)?
        }
        "regime-point" => {
            let id: StatisticId = id.unwrap_or_default().parse()?;
            let alpha: f64 = kv.need("alpha")?;
            let n: u64 = kv.need("n")?;
            let params = stat_params(&mut kv)?;
            kv.finish()?;
            json(&theory::regime_point(id, &params, alpha, n)?)?
        }
        "threshold" => {
            let n: Option<u64> = kv.take("n")?;
            let params = stat_params(&mut kv)?;
            kv.finish()?;
            json(&theory::threshold_location(id.unwrap_or_default(), &params, n)?)?
        }
        "expected-components" | "expected-gaps" | "mean-component-length" | "mean-gap-length" => {
            let n: u64 = kv.need("n")?;
            let p: f64 = kv.need("p")?;
            kv.finish()?;
            let f = match what {
                "expected-components" => theory::expected_components,
                "expected-gaps" => theory::expected_gaps,
                "mean-component-length" => theory::mean_component_length,
                _ => theory::mean_gap_length,
            };
            json(&f(n, p)?)?
        }
        "exact-at-position" | "ordering-at-position" | "exact-argmax" => {
            let spec = parse_pattern(&kv.need::<String>("pattern")?)?;
            let p: Option<f64> = kv.take("p")?;
            kv.finish()?;
            let p = || p.ok_or_else(|| Error::param("missing parameter `p`"));
            match what {
                "exact-at-position" => json(&theory::prob_exact_consecutive_at_position(&spec, p()?)?)?,
                "ordering-at-position" => json(&theory::prob_ordering_at_position(&spec, p()?)?)?,
                _ => json(&theory::argmax_p_exact_consecutive(&spec)?)?,
            }
        }
        "exact-count" => {
            let spec = parse_pattern(&kv.need::<String>("pattern")?)?;
            let (n, p) = (kv.need("n")?, kv.need("p")?);
            kv.finish()?;
            json(&theory::expected_exact_consecutive_count(n, &spec, p)?)?
        }
        "exact-at-position-uniform" => {
            let spec = parse_pattern(&kv.need::<String>("pattern")?)?;
            let (n, m) = (kv.need("n")?, kv.need("m")?);
            kv.finish()?;
            json(&theory::prob_exact_consecutive_at_position_uniform(n, m, &spec)?)?
        }
        "tmax-lt" | "tmin-ge" => {
            let (n, p, r) = (kv.need("n")?, kv.need("p")?, kv.need("r")?);
            kv.finish()?;
            if what == "tmax-lt" {
                json(&theory::prob_tmax_lt(n, p, r)?)?
            } else {
                json(&theory::prob_tmin_ge(n, p, r)?)?
            }
        }
        "square-k-star" => {
            let n: u64 = kv.need("n")?;
            let c: f64 = kv.take("c")?.unwrap_or(0.0);
            kv.finish()?;
            json(&theory::square_k_star(n, c)?)?
        }
        other => return Err(Error::param(format!("unknown theory quantity `{other}`"))),
    };
    writeln!(out, "{text}").map_err(io)
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let text = if a.config == "-" {
        read_input("-")?
    } else {
        std::fs::read_to_string(&a.config).map_err(|e| Error::Config(format!("{}: {e}", a.config)))?
    };
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(i) = a.interval {
        cfg.interval = match i {
            IntervalArg::Wilson => IntervalMethod::Wilson,
            IntervalArg::ClopperPearson => IntervalMethod::ClopperPearson,
        };
    }
    let seed = match (a.seed, cfg.seed) {
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => default_seed()?,
    };
    let opts = SweepOptions { seed: Some(seed), workers: a.workers, timing: a.timing };
    let text = if a.poisson_fit {
        rows_to_json_lines(&run_poisson_fit(&cfg, &opts)?)?
    } else {
        let rows = run_sweep(&cfg, &opts)?;
        match a.format {
            SweepFormat::Csv => rows_to_csv(&rows),
            SweepFormat::Jsonl => rows_to_json_lines(&rows)?,
        }
    };
    out.write_all(text.as_bytes()).map_err(io)
}

fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<()> {
    let predicate = match (&a.statistic, &a.pattern) {
        (Some(id), None) => Predicate::from_id(id, a.k)?,
        (None, Some(p)) => {
            Predicate::Contains(parse_pattern(p)?, if a.strict_gaps { GapMode::Strict } else { GapMode::Loose })
        }
        _ => return Err(Error::param("give --statistic or --pattern")),
    };
    let property = Property { predicate, negate: a.negate };
    let mut kv = KeyValues::parse(&a.params)?;
    let n: u64 = kv.need("n")?;
    let result = match a.model.as_str() {
        "uniform" => {
            let m: u64 = kv.need("m")?;
            kv.finish()?;
            let mut failure = None;
            let r = exact_prob_uniform(n, m, |c| {
                property.eval(c).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    false
                })
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            r
        }
        "geometric" => {
            let law = geometric_law(&mut kv)?;
            let given: Option<u64> = kv.take("given_m")?;
            kv.finish()?;
            match given {
                Some(m) => exact_prob_geometric_given_size(n, law.p(), m, &property)?,
                None => {
                    let opts = DpOptions { width: a.width.unwrap_or(DpOptions::default().width), ..DpOptions::default() };
                    exact_prob_geometric_law(n, &law, &property, &opts)?
                }
            }
        }
        other => return Err(Error::param(format!("unknown model `{other}`, expected uniform or geometric"))),
    };
    writeln!(out, "{}", json(&result)?).map_err(io)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Sample(a) => cmd_sample(&a, out),
        Command::Stats { composition } => {
            let c = Composition::parse(&read_input(&composition)?)?;
            writeln!(out, "{}", json(&StatsReport::new(&c))?).map_err(io)
        }
        Command::Match(a) => cmd_match(&a, out),
        Command::Theory { what, args } => cmd_theory(&what, &args, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Render { composition, format } => {
            let c = Composition::parse(&read_input(&composition)?)?;
            let text = match format {
                RenderFormat::Ascii => render_ascii(&c),
                RenderFormat::Svg => render_svg(&c),
            };
            out.write_all(text.as_bytes()).map_err(io)
        }
        Command::Oracle(a) => cmd_oracle(&a, out),
    }
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Unsupported(_) | Error::GuardExceeded { .. } => 2,
        _ => 1,
    }
}

/// Runs the command line `args` (including the program name) and
/// returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("randcomp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn sample_formats() {
        assert_eq!(run_str(&["sample", "--uniform", "n=5", "m=0", "--count", "1"]).1, "0,0,0,0,0\n");
        let (code, out, _) = run_str(&["sample", "--geometric", "n=4", "p=0", "--count", "2", "--format", "digits"]);
        assert_eq!((code, out.as_str()), (0, "0000\n0000\n"));
        let (code, _, err) = run_str(&["sample", "--uniform", "n=2", "m=30", "--format", "digits", "--seed", "1"]);
        assert_eq!(code, 1);
        assert!(err.contains("digits"));
        let a = run_str(&["sample", "--geometric", "n=20", "q=0.3", "--count", "3", "--seed", "9"]).1;
        let b = run_str(&["sample", "--geometric", "n=20", "q=0.3", "--count", "3", "--seed", "9"]).1;
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 3);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_str(&["sample", "--uniform", "n=5"]).0, 1);
        assert_eq!(run_str(&["sample", "--uniform", "n=5", "m=1", "x=2"]).0, 1);
        assert_eq!(run_str(&["nope"]).0, 1);
        assert_eq!(run_str(&["match", "012", "e:[1,"]).0, 1);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn unsupported_exits_two() {
        assert_eq!(run_str(&["match", "0123", "o:[0,1],[1,0]"]).0, 2);
        assert_eq!(run_str(&["oracle", "uniform", "n=30", "m=30", "--statistic", "carlitz"]).0, 2);
        assert_eq!(run_str(&["oracle", "geometric", "n=3", "p=0.5", "--statistic", "all_distinct"]).0, 2);
    }

    #[test]
    fn match_and_theory() {
        let (_, out, _) = run_str(&["match", "000", "o:[0,0,0]"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["count"], 1);
        let (_, out, _) = run_str(&["theory", "poisson", "cmax_ge", "k=2", "alpha=1"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["value"].as_f64().unwrap() - 0.632121).abs() < 1e-6);
        let (_, out, _) = run_str(&["theory", "expected-components", "n=100", "p=0.3"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["value"].as_f64().unwrap() - 21.09).abs() < 1e-9);
        let (code, out, _) = run_str(&["theory", "threshold", "carlitz"]);
        assert_eq!(code, 0);
        assert!(out.contains("n^(-1)"), "{out}");
    }

    #[test]
    fn oracle_commands() {
        let (_, out, _) = run_str(&["oracle", "uniform", "n=3", "m=2", "--pattern", "e:[1,1]"]);
        assert!(out.contains("\"1/3\""), "{out}");
        let (_, out, _) = run_str(&["oracle", "geometric", "n=2", "p=0.5", "--pattern", "e:[0,0]"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["lo"], 0.25);
    }

    #[test]
    fn render_and_stats() {
        assert_eq!(run_str(&["render", "012"]).1, "  #\n ##\n---\n");
        let (_, out, _) = run_str(&["stats", "5"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!((v["components"].as_u64(), v["tmax"].as_u64()), (Some(1), Some(5)));
    }
}
