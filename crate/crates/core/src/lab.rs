//! Experiment orchestration: the constants chain, the conditional H-freeness
//! estimator, the advancing-property checker, the multi-exposure trace and
//! config-driven runs with reports and manifests.
//!
//! Per-sample streams are `SeedSpec::new(seed, "sample:i")`, so a sample's
//! graph depends only on the master seed and its index. Threaded runs collect
//! results in index order and are byte-identical to `deterministic` runs.
//! `KLR_LAB_THREADS` caps the worker count.

use crate::blowup::{BlowupGraph, Edge};
use crate::census::{count_canonical, degree_vector, poor_pairs};
use crate::logspace::LogScale;
use crate::pattern::{ln_expected, two_density, PatternGraph};
use crate::regularity::{check_blowup, delta_schedule, CheckOptions, Mode, RegularityParams, Status};
use crate::rng::SeedSpec;
use crate::sampler::{partition_exposure, sample_gnm_h};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Largest part size the estimator accepts unless a config raises it.
pub const DEFAULT_N_CAP: usize = 64;

// ---------------------------------------------------------------------------
// Constants chain

/// Free inputs of the constants chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantInputs {
    pub lambda: f64,
    pub beta: f64,
    pub d: f64,
    pub eps: f64,
    pub xi_pp: f64,
    pub gamma_pp: f64,
    pub t: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantLedger {
    pub pattern: String,
    pub sub_pattern: String,
    pub v: usize,
    /// `e(H')`; the inductive step works with `H'' = H' - ab`.
    pub e_sub: usize,
    pub n: u64,
    pub m: u64,
    pub inputs: ConstantInputs,
    /// Log scale: underflows `f64` once `lambda` is small.
    pub d0: LogScale,
    /// Parameters handed to the inductive step: `lambda/2`, `min(d, d0)`.
    pub lambda_next: f64,
    pub d_next: LogScale,
    pub beta1: f64,
    pub beta2: f64,
    pub xi_p: f64,
    pub z: u64,
    pub xi: f64,
    pub gamma_p: f64,
    pub gamma: f64,
    pub m_p: f64,
    pub mu: LogScale,
    pub mu_e: LogScale,
    /// `gamma n^v (m/n^2)^{e(H')}`, which equals `gamma' mu`.
    pub event_threshold: LogScale,
}

fn open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::param(name, v, "must lie in (0, 1)"))
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, v, "must be positive and finite"))
    }
}

/// `ceil(x)`, treating values within a relative `1e-12` of an integer as that
/// integer, so that e.g. `4 / 0.01^2` gives `40000` despite binary rounding.
fn snapped_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * r.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// The constants of the inductive step for `H' ⊆ H` at part size `n` and
/// `m` edges per block.
pub fn derive_constants(
    h: &PatternGraph,
    h_sub: &PatternGraph,
    inputs: &ConstantInputs,
    n: u64,
    m: u64,
) -> Result<ConstantLedger> {
    let ConstantInputs {
        lambda,
        beta,
        d,
        eps,
        xi_pp,
        gamma_pp,
        t,
    } = *inputs;
    open_unit("lambda", lambda)?;
    open_unit("beta", beta)?;
    open_unit("d", d)?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::param("eps", eps, "must lie in (0, 1]"));
    }
    positive("xi_pp", xi_pp)?;
    positive("gamma_pp", gamma_pp)?;
    positive("t", t)?;
    if n == 0 {
        return Err(Error::param("n", 0.0, "must be positive"));
    }
    if h_sub.k() != h.k() || !h_sub.is_subgraph_of(h) {
        return Err(Error::Mismatch(format!(
            "{} is not a spanning subgraph of {}",
            h_sub.spec_string(),
            h.spec_string()
        )));
    }
    let e_sub = h_sub.edge_count();
    if e_sub == 0 {
        return Err(Error::EdgelessPattern);
    }
    let v = h.k();
    let e = e_sub as i32;

    let d0 = LogScale(delta_schedule(lambda, beta)?.ln_eval(1.0));
    let beta1 = beta * 3f64.powi(-e);
    let beta2 = beta1 * beta1 * 2f64.powi(-4 * e);
    let xi_p = (xi_pp / 2.0).min(lambda * eps * eps / 4.0);
    let z = snapped_ceil(4.0 * t / (gamma_pp * gamma_pp));
    let xi = xi_p / (2.0 * z);
    let gamma_p = gamma_pp * lambda * eps * eps / 8.0;
    let gamma = gamma_p / (2.0 * z).powi(e);
    let m_p = m as f64 / (2.0 * z);

    let nf = n as f64;
    let ln_mu = v as f64 * nf.ln() + e_sub as f64 * (m_p / (nf * nf)).ln();
    let ln_mu_e = v as f64 * nf.ln() + (e_sub - 1) as f64 * (m_p / (nf * nf)).ln() - 2.0 * nf.ln();
    let ln_event = gamma.ln() + ln_expected(n, m, v, e_sub);

    Ok(ConstantLedger {
        pattern: h.spec_string(),
        sub_pattern: h_sub.spec_string(),
        v,
        e_sub,
        n,
        m,
        inputs: *inputs,
        d0,
        lambda_next: lambda / 2.0,
        d_next: LogScale(d.ln().min(d0.ln())),
        beta1,
        beta2,
        xi_p,
        z: z as u64,
        xi,
        gamma_p,
        gamma,
        m_p,
        mu: LogScale(ln_mu),
        mu_e: LogScale(ln_mu_e),
        event_threshold: LogScale(ln_event),
    })
}

impl ConstantLedger {
    /// Failed chain inequalities, by name. Empty on a consistent ledger.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut bad = Vec::new();
        let positive = [self.beta1, self.beta2, self.xi_p, self.xi, self.gamma_p, self.gamma];
        if positive.iter().any(|&x| !(x > 0.0)) || !self.d0.ln().is_finite() || self.z == 0 {
            bad.push("positivity");
        }
        if !(self.beta2 < self.beta1 && self.beta1 < self.inputs.beta) {
            bad.push("beta2 < beta1 < beta");
        }
        if !(self.gamma < self.gamma_p) {
            bad.push("gamma < gamma'");
        }
        if !(self.xi < self.xi_p) {
            bad.push("xi < xi'");
        }
        let lhs = self.mu.ln();
        let rhs = self.mu_e.ln() + self.m_p.ln();
        if self.m_p > 0.0 && (lhs - rhs).abs() > 1e-9 * lhs.abs().max(1.0) {
            bad.push("mu = mu_e m'");
        }
        bad
    }
}

// ---------------------------------------------------------------------------
// Wilson interval

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
/// Zero trials give `[0, 1]`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Interval {
    if trials == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let nf = trials as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    Interval {
        lo: (centre - half).max(0.0).min(p),
        hi: (centre + half).min(1.0).max(p),
    }
}

// ---------------------------------------------------------------------------
// Configs

/// `m = ceil(c n^{2 - 1/m_2(H)})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MRule {
    pub c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Estimate,
    Exposure,
}

fn default_mode() -> Mode {
    Mode::Exact
}

fn default_n_cap() -> usize {
    DEFAULT_N_CAP
}

fn default_pair() -> (usize, usize) {
    (0, 1)
}

fn default_output() -> PathBuf {
    PathBuf::from("klr-out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Pattern in any form accepted by `PatternGraph::from_str`.
    pub pattern: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_rule: Option<MRule>,
    #[serde(default)]
    pub eps: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Exposure rounds are `2z`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<usize>,
    #[serde(default = "default_pair")]
    pub pair: (usize, usize),
    #[serde(default = "default_n_cap")]
    pub n_cap: usize,
}

fn config_error(e: serde_json::Error) -> Error {
    let text = e.to_string();
    let field = text.split('`').nth(1).map(str::to_string).unwrap_or_default();
    Error::Config { field, message: text }
}

fn field_error(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(config_error)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn pattern_graph(&self) -> Result<PatternGraph> {
        self.pattern
            .parse()
            .map_err(|e: Error| field_error("pattern", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let h = self.pattern_graph()?;
        if self.n == 0 || self.n > self.n_cap {
            return Err(field_error("n", format!("must lie in 1..={}", self.n_cap)));
        }
        match (self.m, self.m_rule) {
            (Some(_), Some(_)) => return Err(field_error("m", "give either `m` or `m_rule`, not both")),
            (None, None) => return Err(field_error("m", "missing; give `m` or `m_rule`")),
            (_, Some(rule)) if !(rule.c > 0.0) => return Err(field_error("m_rule", "`c` must be positive")),
            _ => {}
        }
        let m = self.resolve_m(&h)?;
        if m > self.n * self.n {
            return Err(field_error("m", format!("{m} exceeds n^2 = {}", self.n * self.n)));
        }
        match self.kind {
            ExperimentKind::Estimate => {
                if !(self.eps > 0.0 && self.eps <= 1.0) {
                    return Err(field_error("eps", "must lie in (0, 1]"));
                }
                if !(self.lambda > 0.0 && self.lambda <= 1.0) {
                    return Err(field_error("lambda", "must lie in (0, 1]"));
                }
                if !(self.gamma > 0.0) {
                    return Err(field_error("gamma", "must be positive"));
                }
                if h.edge_count() == 0 {
                    return Err(field_error("pattern", "needs at least one edge"));
                }
            }
            ExperimentKind::Exposure => {
                if !matches!(self.z, Some(z) if z >= 1) {
                    return Err(field_error("z", "required and at least 1 for exposure runs"));
                }
                let (a, b) = self.pair;
                if !h.has_edge(a, b) {
                    return Err(field_error("pair", format!("{a}-{b} is not an edge of the pattern")));
                }
            }
        }
        Ok(())
    }

    /// The per-block edge count, from `m` or the exponent rule.
    pub fn resolve_m(&self, h: &PatternGraph) -> Result<usize> {
        if let Some(m) = self.m {
            return Ok(m);
        }
        let rule = self.m_rule.ok_or_else(|| field_error("m", "missing"))?;
        let exponent = two_density(h)?.threshold_exponent();
        Ok(snapped_ceil(rule.c * (self.n as f64).powf(exponent)) as usize)
    }
}

/// Execution knobs that do not change results.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub deterministic: bool,
    pub threads: Option<usize>,
}

impl RunOptions {
    /// `threads` from `KLR_LAB_THREADS` when set and positive.
    pub fn from_env(deterministic: bool) -> Self {
        let threads = std::env::var("KLR_LAB_THREADS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&t| t > 0);
        RunOptions { deterministic, threads }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let threads = if self.deterministic {
            1
        } else {
            self.threads.unwrap_or(0)
        };
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Mismatch(format!("thread pool: {e}")))
    }
}

// ---------------------------------------------------------------------------
// Estimator

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRecord {
    pub sample: usize,
    pub seed: u64,
    pub status: Status,
    pub zcount: u128,
    /// `Z <= threshold`, recorded for every sample; only regular ones count.
    pub event: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub pattern: String,
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub mode: Mode,
    pub seed: u64,
    pub threshold: f64,
    pub total_samples: usize,
    pub regular_count: usize,
    pub irregular_count: usize,
    pub unknown_count: usize,
    pub event_count: usize,
    pub point_estimate: f64,
    pub wilson95: Interval,
    /// No regular sample: the interval is `[0, 1]` and the point estimate 0.
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_sample_log: Option<String>,
}

pub fn sample_seed(master: u64, index: usize) -> SeedSpec {
    SeedSpec::new(master, format!("sample:{index}"))
}

fn classify(g: &BlowupGraph, params: &RegularityParams, mode: Mode, seed: &SeedSpec) -> Result<Status> {
    let opts = CheckOptions {
        seed: seed.child("regularity"),
        ..CheckOptions::default()
    };
    let verdicts = match check_blowup(g, params, mode, &opts) {
        Ok(v) => v,
        Err(Error::EnumerationCap { .. }) => return Ok(Status::Unknown),
        Err(e) => return Err(e),
    };
    if verdicts.values().any(|v| v.status == Status::Irregular) {
        Ok(Status::Irregular)
    } else if verdicts.values().all(|v| v.is_regular()) {
        Ok(Status::CertifiedRegular)
    } else {
        Ok(Status::Unknown)
    }
}

fn run_sample(
    h: &PatternGraph,
    cfg: &ExperimentConfig,
    m: usize,
    params: &RegularityParams,
    threshold: f64,
    index: usize,
) -> Result<SampleRecord> {
    let seed = sample_seed(cfg.seed, index);
    let g = sample_gnm_h(h, cfg.n, m, &seed)?;
    let status = classify(&g, params, cfg.mode, &seed)?;
    let zcount = count_canonical(&g, h)?;
    Ok(SampleRecord {
        sample: index,
        seed: seed.stream_seed(),
        status,
        zcount,
        event: (zcount as f64) <= threshold,
    })
}

/// Per-sample records followed by their summary.
pub fn estimate_samples(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<(EstimateReport, Vec<SampleRecord>)> {
    cfg.validate()?;
    let h = cfg.pattern_graph()?;
    let m = cfg.resolve_m(&h)?;
    let params = RegularityParams::constant(cfg.eps, cfg.lambda)?;
    let threshold = cfg.gamma * ln_expected(cfg.n as u64, m.max(1) as u64, h.k(), h.edge_count()).exp();
    let threshold = if m == 0 { 0.0 } else { threshold };

    let pool = opts.pool()?;
    let records: Result<Vec<SampleRecord>> = pool.install(|| {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| run_sample(&h, cfg, m, &params, threshold, i))
            .collect()
    });
    let records = records?;
    Ok((summarize(cfg, &h, m, threshold, &records), records))
}

/// Recomputes the report from per-sample records.
pub fn summarize(
    cfg: &ExperimentConfig,
    h: &PatternGraph,
    m: usize,
    threshold: f64,
    records: &[SampleRecord],
) -> EstimateReport {
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    let regular = count(Status::CertifiedRegular);
    let events = records
        .iter()
        .filter(|r| r.status == Status::CertifiedRegular && r.event)
        .count();
    let point = if regular == 0 {
        0.0
    } else {
        events as f64 / regular as f64
    };
    EstimateReport {
        pattern: h.spec_string(),
        n: cfg.n,
        m,
        eps: cfg.eps,
        lambda: cfg.lambda,
        gamma: cfg.gamma,
        mode: cfg.mode,
        seed: cfg.seed,
        threshold,
        total_samples: records.len(),
        regular_count: regular,
        irregular_count: count(Status::Irregular),
        unknown_count: count(Status::Unknown),
        event_count: events,
        point_estimate: point,
        wilson95: wilson_interval(events as u64, regular as u64, Z95),
        degenerate: regular == 0,
        per_sample_log: None,
    }
}

/// Estimates `Pr[Z_H <= gamma n^v (m/n^2)^e | G is (eps, lambda)-lower-regular]`.
pub fn estimate_hfree_probability(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<EstimateReport> {
    estimate_samples(cfg, opts).map(|(report, _)| report)
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::CertifiedRegular => "regular",
        Status::Irregular => "irregular",
        Status::Unknown => "unknown",
    }
}

/// `sample,seed,regular,zcount,event`; `regular` is `regular`, `irregular` or `unknown`.
pub fn samples_csv(records: &[SampleRecord]) -> String {
    let mut out = String::from("sample,seed,regular,zcount,event\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.sample,
            r.seed,
            status_word(r.status),
            r.zcount,
            u8::from(r.event)
        );
    }
    out
}

/// Parses a log written by [`samples_csv`].
pub fn parse_samples_csv(text: &str) -> Result<Vec<SampleRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some("sample,seed,regular,zcount,event") {
        return Err(Error::Parse("missing per-sample log header".into()));
    }
    lines
        .enumerate()
        .map(|(row, line)| {
            let bad = || Error::Parse(format!("per-sample log row {}: `{line}`", row + 1));
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(bad());
            }
            let status = match cols[2] {
                "regular" => Status::CertifiedRegular,
                "irregular" => Status::Irregular,
                "unknown" => Status::Unknown,
                _ => return Err(bad()),
            };
            Ok(SampleRecord {
                sample: cols[0].parse().map_err(|_| bad())?,
                seed: cols[1].parse().map_err(|_| bad())?,
                status,
                zcount: cols[3].parse().map_err(|_| bad())?,
                event: match cols[4] {
                    "1" => true,
                    "0" => false,
                    _ => return Err(bad()),
                },
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Advancing property

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AdvancingVerdict {
    A,
    B,
    Neither,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdvancingReport {
    pub verdict: AdvancingVerdict,
    pub copies: u128,
    /// `gamma' mu`.
    pub copy_target: f64,
    pub poor_before: usize,
    pub poor_after: usize,
    /// `n^2 / z`.
    pub required_drop: f64,
}

/// Evaluates clauses (A) and (B) of the advancing property for one `X`.
///
/// All graphs live in `K_n^H`; `d` carries the blocks of `H - H'`, `ghat` and
/// `g` those of `H'`. Clause (A): `d ∪ ghat ∪ (g - X)` has at least
/// `gamma' mu` canonical copies of `H`. Clause (B): the poor set shrinks by
/// more than `n^2 / z` when `g - X` joins `ghat`.
#[allow(clippy::too_many_arguments)]
pub fn advancing_check(
    d: &BlowupGraph,
    ghat: &BlowupGraph,
    g: &BlowupGraph,
    x: &[Edge],
    ledger: &ConstantLedger,
    h: &PatternGraph,
    a: usize,
    b: usize,
) -> Result<AdvancingReport> {
    let budget = ledger.xi_p * ledger.m_p;
    if x.len() as f64 > budget {
        return Err(Error::BudgetExceeded { size: x.len(), budget });
    }
    if !h.has_edge(a, b) {
        return Err(Error::Mismatch(format!(
            "{a}-{b} is not an edge of {}",
            h.spec_string()
        )));
    }
    let rest = g.difference(x);
    let grown = ghat.union(&rest)?;
    let host = d.union(&grown)?;
    let copies = count_canonical(&host, h)?;
    let copy_target = ledger.gamma_p * ledger.mu.value();

    let gamma_pp = ledger.inputs.gamma_pp;
    let poor_before = poor_pairs(d, ghat, h, a, b, gamma_pp, ledger.mu_e)?.count;
    let poor_after = poor_pairs(d, &grown, h, a, b, gamma_pp, ledger.mu_e)?.count;
    let n = g.n() as f64;
    let required_drop = n * n / ledger.z as f64;

    let verdict = if copies as f64 >= copy_target {
        AdvancingVerdict::A
    } else if (poor_after as f64) < poor_before as f64 - required_drop {
        AdvancingVerdict::B
    } else {
        AdvancingVerdict::Neither
    };
    Ok(AdvancingReport {
        verdict,
        copies,
        copy_target,
        poor_before,
        poor_after,
        required_drop,
    })
}

// ---------------------------------------------------------------------------
// Multi-exposure

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExposureRound {
    pub round: usize,
    /// Pairs of `D` left after this round.
    pub d_size: usize,
    /// Pairs removed from `D` this round.
    pub covered: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExposureTrace {
    pub pattern: String,
    pub pair: (usize, usize),
    pub n: usize,
    pub m_requested: usize,
    /// `m` rounded down to a multiple of `2z`.
    pub m: usize,
    pub z: usize,
    pub seed: u64,
    pub initial: usize,
    pub rounds: Vec<ExposureRound>,
    /// Edges of the sampled `(a, b)` block that still lie in `D` at the end.
    pub surviving: usize,
}

/// Reveals `G ∈ G(H, n, m)` in `2z` equal chunks and, starting from the
/// complete `(a, b)` pair `D`, removes after each round every pair that the
/// chunks revealed so far complete to a copy of `H`.
pub fn multi_exposure_experiment(
    h: &PatternGraph,
    n: usize,
    m: usize,
    z: usize,
    pair: (usize, usize),
    seed: u64,
) -> Result<ExposureTrace> {
    if z == 0 {
        return Err(Error::param("z", 0.0, "must be positive"));
    }
    let (a, b) = (pair.0.min(pair.1), pair.0.max(pair.1));
    if !h.has_edge(a, b) {
        return Err(Error::Mismatch(format!(
            "{a}-{b} is not an edge of {}",
            h.spec_string()
        )));
    }
    let rounds = 2 * z;
    let m_used = m - m % rounds;
    let spec = SeedSpec::new(seed, "exposure");
    let g = sample_gnm_h(h, n, m_used, &spec.child("graph"))?;
    let chunks = partition_exposure(&g, rounds, &spec.child("chunks"))?;
    exposure_trace(h, &g, &chunks, (a, b), m, z, seed)
}

/// The round loop of [`multi_exposure_experiment`] on given chunks.
pub fn exposure_trace(
    h: &PatternGraph,
    g: &BlowupGraph,
    chunks: &[BlowupGraph],
    pair: (usize, usize),
    m_requested: usize,
    z: usize,
    seed: u64,
) -> Result<ExposureTrace> {
    let (a, b) = pair;
    let n = g.n();
    let reduced = h.without_edge(a, b)?;
    let mut alive = vec![true; n * n];
    let mut d_size = n * n;
    let mut revealed = BlowupGraph::bare(h, n)?;
    let mut trace = Vec::with_capacity(chunks.len());
    for (i, chunk) in chunks.iter().enumerate() {
        revealed = revealed.union(chunk)?;
        let dv = degree_vector(&revealed.minus_pair(a, b), &reduced, a, b)?;
        let mut covered = 0;
        for (slot, &deg) in alive.iter_mut().zip(&dv.values) {
            if *slot && deg > 0 {
                *slot = false;
                covered += 1;
            }
        }
        d_size -= covered;
        trace.push(ExposureRound {
            round: i + 1,
            d_size,
            covered,
        });
    }
    let surviving = g
        .block(a, b)
        .map(|blk| blk.iter_ones().filter(|&(u, v)| alive[u * n + v]).count())
        .unwrap_or(0);
    Ok(ExposureTrace {
        pattern: h.spec_string(),
        pair: (a, b),
        n,
        m_requested,
        m: g.block_edge_count(a, b),
        z,
        seed,
        initial: n * n,
        rounds: trace,
        surviving,
    })
}

// ---------------------------------------------------------------------------
// Config runs

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub m_requested: usize,
    pub m_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_adjustment: Option<String>,
    pub deterministic: bool,
    pub threads: usize,
    pub wall_seconds: f64,
    pub files: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum RunResult {
    Estimate(EstimateReport),
    Exposure(ExposureTrace),
}

#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub result: RunResult,
    pub report: PathBuf,
    pub log: Option<PathBuf>,
    pub manifest: PathBuf,
}

/// Pretty JSON with a trailing newline.
pub fn write_report<T: Serialize>(report: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    if let Some(dir) = path.as_ref().parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

/// Runs a parsed config, writing `report.json` (or `trace.json`),
/// `samples.csv` for estimates and `manifest.json` into `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunArtifacts> {
    cfg.validate()?;
    let started = Instant::now();
    let h = cfg.pattern_graph()?;
    let m_requested = cfg.resolve_m(&h)?;
    let out = &cfg.output;
    fs::create_dir_all(out)?;
    let threads = if opts.deterministic {
        1
    } else {
        opts.pool()?.current_num_threads()
    };

    let (result, report_path, log_path, m_used) = match cfg.kind {
        ExperimentKind::Estimate => {
            let (mut report, records) = estimate_samples(cfg, opts)?;
            let log = out.join("samples.csv");
            fs::write(&log, samples_csv(&records))?;
            report.per_sample_log = Some("samples.csv".into());
            let path = out.join("report.json");
            write_report(&report, &path)?;
            (RunResult::Estimate(report), path, Some(log), m_requested)
        }
        ExperimentKind::Exposure => {
            let z = cfg.z.expect("validated");
            let trace = multi_exposure_experiment(&h, cfg.n, m_requested, z, cfg.pair, cfg.seed)?;
            let path = out.join("trace.json");
            write_report(&trace, &path)?;
            let used = trace.m;
            (RunResult::Exposure(trace), path, None, used)
        }
    };
    let m_adjustment =
        (m_used != m_requested).then(|| format!("m rounded down from {m_requested} to {m_used}, a multiple of 2z"));
    let mut files = vec![file_name(&report_path)];
    if let Some(log) = &log_path {
        files.push(file_name(log));
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg.clone(),
        seed: cfg.seed,
        m_requested,
        m_used,
        m_adjustment,
        deterministic: opts.deterministic,
        threads,
        wall_seconds: started.elapsed().as_secs_f64(),
        files,
    };
    let manifest_path = out.join("manifest.json");
    write_report(&manifest, &manifest_path)?;
    Ok(RunArtifacts {
        result,
        report: report_path,
        log: log_path,
        manifest: manifest_path,
    })
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn run_config(path: impl AsRef<Path>, opts: &RunOptions) -> Result<RunArtifacts> {
    run_experiment(&ExperimentConfig::load(path)?, opts)
}
