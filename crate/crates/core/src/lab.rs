//! Seeded sweeps, trimming, log-log fits and CSV output.
//!
//! A sweep draws `trials_per_size` graphs for every size. Each graph carries
//! one chain per drift value, so reversible and drifted variants are compared
//! on the same graph. Trial seeds come from
//! [`trial_seed`](crate::rng::trial_seed), which makes every record a
//! function of the configuration alone.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::time::Instant;

use log::{info, warn};
use thiserror::Error;

use crate::chain::{self, ChainError, ChainParams};
use crate::conductance::{self, ConductanceError, PhiKind};
use crate::exec::{self, Parallelism};
use crate::mixing::{self, MixingError, MixingOptions, MixingResult};
use crate::numeric::{floor_snap, median_sorted};
use crate::rng::trial_seed;
use crate::topology::{self, LongRangeGraph, Model, TopologyError};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid sweep configuration: {0}")]
    InvalidConfig(String),
    #[error("no samples")]
    EmptyInput,
    #[error("cannot fit: {0}")]
    DegeneratePoints(String),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Conductance(#[from] ConductanceError),
    #[error(transparent)]
    Mixing(#[from] MixingError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

type Result<T> = std::result::Result<T, LabError>;

/// Everything that determines a sweep's records.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: Model,
    pub alpha: f64,
    /// Strictly increasing cycle sizes.
    pub sizes: Vec<usize>,
    pub trials_per_size: usize,
    pub q_c: f64,
    pub q_l: f64,
    /// Long-range divisor; `None` means `⌈2/(α−1)⌉`.
    pub d: Option<usize>,
    /// Drift values; one chain per value on every graph.
    pub r_values: Vec<f64>,
    pub epsilon: f64,
    pub base_seed: u64,
    /// Fraction dropped from each tail before medians and means.
    pub trim_fraction: f64,
    /// Graphs drawn per trial before it is recorded as skipped.
    pub max_attempts: usize,
    /// When false only conductance is computed.
    pub compute_mixing: bool,
    /// Fill the `wall_time_ms` column. Off by default so reruns are byte-identical.
    pub record_wall_time: bool,
    pub parallelism: Parallelism,
}

impl SweepConfig {
    pub fn new(model: Model, alpha: f64, sizes: Vec<usize>, trials_per_size: usize, base_seed: u64) -> Self {
        SweepConfig {
            model,
            alpha,
            sizes,
            trials_per_size,
            q_c: 0.2,
            q_l: 0.1,
            d: None,
            r_values: vec![0.0, 0.15],
            epsilon: 0.125,
            base_seed,
            trim_fraction: 0.05,
            max_attempts: 100,
            compute_mixing: true,
            record_wall_time: false,
            parallelism: Parallelism::Auto,
        }
    }

    pub fn divisor(&self) -> Result<usize> {
        match self.d {
            Some(d) => Ok(d),
            None => Ok(topology::degree_cap(self.alpha)?),
        }
    }

    pub fn chain_params(&self, r: f64) -> Result<ChainParams> {
        Ok(ChainParams::new(self.q_c, self.q_l, r, self.divisor()?)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LabError::InvalidConfig(m));
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return bad(format!("alpha = {} outside (1, 2)", self.alpha));
        }
        if self.sizes.is_empty() || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sizes must be nonempty and strictly increasing".into());
        }
        if self.sizes[0] < 3 {
            return bad("sizes must be at least 3".into());
        }
        if self.trials_per_size == 0 {
            return bad("trials_per_size must be ≥ 1".into());
        }
        if !(0.0..0.5).contains(&self.trim_fraction) {
            return bad(format!("trim fraction {} outside [0, 0.5)", self.trim_fraction));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon {} outside (0, 1)", self.epsilon));
        }
        if self.r_values.is_empty() {
            return bad("need at least one drift value".into());
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be ≥ 1".into());
        }
        for &r in &self.r_values {
            self.chain_params(r).map_err(|e| LabError::InvalidConfig(e.to_string()))?;
        }
        Ok(())
    }

    /// Sets one `key = value` option.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| LabError::InvalidConfig(format!("{key}: cannot parse {value:?} as {what}"));
        let v = value.trim();
        match key.trim() {
            "model" => self.model = v.parse().map_err(|_| bad("model"))?,
            "alpha" => self.alpha = v.parse().map_err(|_| bad("number"))?,
            "sizes" => self.sizes = parse_list(v).map_err(|_| bad("list of sizes"))?,
            "trials" | "trials_per_size" => self.trials_per_size = v.parse().map_err(|_| bad("count"))?,
            "q_c" => self.q_c = v.parse().map_err(|_| bad("number"))?,
            "q_l" => self.q_l = v.parse().map_err(|_| bad("number"))?,
            "d" => {
                self.d = match v {
                    "auto" | "" => None,
                    _ => Some(v.parse().map_err(|_| bad("count"))?),
                }
            }
            "r" | "r_values" => self.r_values = parse_list(v).map_err(|_| bad("list of numbers"))?,
            "epsilon" => self.epsilon = v.parse().map_err(|_| bad("number"))?,
            "seed" | "base_seed" => self.base_seed = v.parse().map_err(|_| bad("u64"))?,
            "trim" | "trim_fraction" => self.trim_fraction = v.parse().map_err(|_| bad("number"))?,
            "max_attempts" => self.max_attempts = v.parse().map_err(|_| bad("count"))?,
            "compute_mixing" => self.compute_mixing = v.parse().map_err(|_| bad("bool"))?,
            "wall_time" | "record_wall_time" => self.record_wall_time = v.parse().map_err(|_| bad("bool"))?,
            other => return Err(LabError::InvalidConfig(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// The resolved configuration as `key=value` lines, in a fixed order.
    /// Execution settings that cannot change records are omitted.
    pub fn to_kv(&self) -> String {
        let join = |xs: Vec<String>| xs.join(",");
        let d = self.divisor().map(|d| d.to_string()).unwrap_or_else(|_| "invalid".into());
        let mut s = String::new();
        let _ = writeln!(s, "model={}", self.model);
        let _ = writeln!(s, "alpha={}", self.alpha);
        let _ = writeln!(s, "sizes={}", join(self.sizes.iter().map(|x| x.to_string()).collect()));
        let _ = writeln!(s, "trials={}", self.trials_per_size);
        let _ = writeln!(s, "q_c={}", self.q_c);
        let _ = writeln!(s, "q_l={}", self.q_l);
        let _ = writeln!(s, "d={d}");
        let _ = writeln!(s, "r={}", join(self.r_values.iter().map(|x| x.to_string()).collect()));
        let _ = writeln!(s, "epsilon={}", self.epsilon);
        let _ = writeln!(s, "base_seed={}", self.base_seed);
        let _ = writeln!(s, "trim={}", self.trim_fraction);
        let _ = writeln!(s, "max_attempts={}", self.max_attempts);
        let _ = writeln!(s, "compute_mixing={}", self.compute_mixing);
        let _ = writeln!(s, "wall_time={}", self.record_wall_time);
        s
    }

    /// Applies a flat `key = value` text; `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LabError::InvalidConfig(format!("line {}: expected key=value", ln + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }
}

fn parse_list<T: std::str::FromStr>(v: &str) -> std::result::Result<Vec<T>, T::Err> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect()
}

/// One chain variant of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub model: Model,
    pub n: usize,
    pub alpha: f64,
    pub r: f64,
    pub trial: usize,
    /// Seed of the accepted graph (of the last attempt when skipped).
    pub seed: u64,
    /// `None` when mixing was not computed or the trial was skipped.
    pub t_mix: Option<usize>,
    /// `None` for skipped trials.
    pub phi_kind: Option<PhiKind>,
    pub phi_value: Option<f64>,
    pub max_degree: Option<usize>,
    pub wall_time_ms: Option<f64>,
}

impl SweepRecord {
    pub const CSV_HEADER: &'static str = "model,n,alpha,r,seed,t_mix,phi_kind,phi_value,max_degree,wall_time_ms";

    pub fn is_skipped(&self) -> bool {
        self.phi_kind.is_none()
    }

    pub fn csv_row(&self) -> String {
        fn opt<T: ToString>(x: &Option<T>) -> String {
            x.as_ref().map(T::to_string).unwrap_or_default()
        }
        let kind = self.phi_kind.map(|k| k.as_str()).unwrap_or("skipped");
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.model,
            self.n,
            self.alpha,
            self.r,
            self.seed,
            opt(&self.t_mix),
            kind,
            opt(&self.phi_value),
            opt(&self.max_degree),
            opt(&self.wall_time_ms),
        )
    }
}

/// Runs every trial of `config`; records come back sorted by `(n, trial, r)`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    run_sweep_observed(config, |_, _| {})
}

/// [`run_sweep`], handing every computed mixing result to `observe` together
/// with its record. Calls may come from several threads in any order.
pub fn run_sweep_observed<F>(config: &SweepConfig, observe: F) -> Result<Vec<SweepRecord>>
where
    F: Fn(&SweepRecord, &MixingResult) + Sync,
{
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config
        .sizes
        .iter()
        .flat_map(|&n| (0..config.trials_per_size).map(move |t| (n, t)))
        .collect();
    let out = exec::map(config.parallelism, jobs, |(n, trial)| run_trial(config, n, trial, &observe));
    let mut records = Vec::new();
    let mut skipped = 0;
    for r in out {
        let r = r?;
        skipped += r.iter().filter(|x| x.is_skipped()).count();
        records.extend(r);
    }
    if skipped > 0 {
        warn!("{skipped} records skipped after {} attempts", config.max_attempts);
    }
    records.sort_by(|a, b| (a.n, a.trial).cmp(&(b.n, b.trial)).then(a.r.total_cmp(&b.r)));
    Ok(records)
}

/// Draws graphs until one admits every chain variant.
fn accepted_graph(config: &SweepConfig, n: usize, trial: usize) -> Result<(u64, Option<LongRangeGraph>, Option<usize>)> {
    let d = config.divisor()?;
    let params: Vec<ChainParams> = config.r_values.iter().map(|&r| config.chain_params(r)).collect::<Result<_>>()?;
    let mut last = (0, None);
    for attempt in 0..config.max_attempts {
        let seed = trial_seed(config.base_seed, n, trial, attempt);
        let g = match topology::generate(config.model, n, config.alpha, seed) {
            Ok(g) => g,
            Err(TopologyError::DegenerateModel(_)) => {
                last = (seed, None);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let deg = g.max_long_range_degree();
        if deg <= d && params.iter().all(|p| chain::is_feasible(&g, p)) {
            if attempt > 0 {
                info!("n = {n}, trial {trial}: accepted after {attempt} resamples");
            }
            return Ok((seed, Some(g), Some(deg)));
        }
        last = (seed, Some(deg));
    }
    Ok((last.0, None, last.1))
}

fn run_trial(
    config: &SweepConfig,
    n: usize,
    trial: usize,
    observe: &(impl Fn(&SweepRecord, &MixingResult) + Sync),
) -> Result<Vec<SweepRecord>> {
    let (seed, graph, max_degree) = accepted_graph(config, n, trial)?;
    let base = SweepRecord {
        model: config.model,
        n,
        alpha: config.alpha,
        r: 0.0,
        trial,
        seed,
        t_mix: None,
        phi_kind: None,
        phi_value: None,
        max_degree,
        wall_time_ms: None,
    };
    let Some(g) = graph else {
        return Ok(config.r_values.iter().map(|&r| SweepRecord { r, ..base.clone() }).collect());
    };
    let opts = MixingOptions { parallelism: config.parallelism, ..Default::default() };
    let mut records = Vec::with_capacity(config.r_values.len());
    for &r in &config.r_values {
        let clock = Instant::now();
        let p = chain::build_homogeneous(&g, &config.chain_params(r)?)?;
        let phi = conductance::best_estimate(&p, &g, config.parallelism)?;
        let mix = if config.compute_mixing {
            Some(mixing::mixing_time_with(&p, config.epsilon, &opts)?)
        } else {
            None
        };
        let wall_time_ms = config.record_wall_time.then(|| clock.elapsed().as_secs_f64() * 1e3);
        let record = SweepRecord {
            r,
            t_mix: mix.as_ref().map(|m| m.t_mix),
            phi_kind: Some(phi.kind),
            phi_value: Some(phi.value),
            wall_time_ms,
            ..base.clone()
        };
        if let Some(m) = &mix {
            observe(&record, m);
        }
        records.push(record);
    }
    Ok(records)
}

/// Sorted samples with `⌊trim · m⌋` values dropped from each tail.
pub fn trim_percentiles(samples: &[f64], trim_fraction: f64) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(LabError::EmptyInput);
    }
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(LabError::InvalidConfig(format!("trim fraction {trim_fraction} outside [0, 0.5)")));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let cut = floor_snap(trim_fraction * v.len() as f64) as usize;
    Ok(v[cut..v.len() - cut].to_vec())
}

/// Least-squares line through `(ln n, ln value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<Fit> {
    if points.iter().any(|&(n, v)| !(n > 0.0) || !(v > 0.0)) {
        return Err(LabError::DegeneratePoints("coordinates must be positive".into()));
    }
    let mut ns: Vec<f64> = points.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    ns.dedup();
    if ns.len() < 3 {
        return Err(LabError::DegeneratePoints(format!("{} distinct sizes, need 3", ns.len())));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(Fit { slope, intercept, residual: (sse / m).sqrt() })
}

/// Trimmed statistics of one `(n, r)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub n: usize,
    pub r: f64,
    /// Records in the group that were not skipped.
    pub count: usize,
    pub skipped: usize,
    pub t_median: Option<f64>,
    pub t_mean: Option<f64>,
    pub phi_median: Option<f64>,
    pub phi_mean: Option<f64>,
    /// Kind of every Φ value in the group, if they agree.
    pub phi_kind: Option<PhiKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRow {
    pub r: f64,
    /// `t_mix` or `phi`.
    pub quantity: &'static str,
    pub fit: Fit,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub groups: Vec<GroupSummary>,
    pub fits: Vec<FitRow>,
}

impl Summary {
    pub const GROUP_HEADER: &'static str = "n,r,count,skipped,t_median,t_mean,phi_median,phi_mean,phi_kind";
    pub const FIT_HEADER: &'static str = "r,quantity,slope,intercept,residual";

    pub fn groups_csv(&self) -> String {
        fn opt(x: Option<f64>) -> String {
            x.map(|v| v.to_string()).unwrap_or_default()
        }
        let mut s = format!("{}\n", Self::GROUP_HEADER);
        for g in &self.groups {
            let kind = g.phi_kind.map(|k| k.as_str()).unwrap_or("");
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{kind}",
                g.n,
                g.r,
                g.count,
                g.skipped,
                opt(g.t_median),
                opt(g.t_mean),
                opt(g.phi_median),
                opt(g.phi_mean),
            );
        }
        s
    }

    pub fn fits_csv(&self) -> String {
        let mut s = format!("{}\n", Self::FIT_HEADER);
        for f in &self.fits {
            let _ = writeln!(s, "{},{},{},{},{}", f.r, f.quantity, f.fit.slope, f.fit.intercept, f.fit.residual);
        }
        s
    }

    /// Two-column `n value` data of the trimmed medians for drift `r`.
    pub fn plot_data(&self, r: f64, quantity: &str) -> String {
        let mut s = format!("# n {quantity}_median r={r}\n");
        for g in self.groups.iter().filter(|g| g.r == r) {
            let v = if quantity == "phi" { g.phi_median } else { g.t_median };
            if let Some(v) = v {
                let _ = writeln!(s, "{} {v}", g.n);
            }
        }
        s
    }

    /// Distinct drift values in ascending order.
    pub fn r_values(&self) -> Vec<f64> {
        let mut rs: Vec<f64> = self.groups.iter().map(|g| g.r).collect();
        rs.sort_by(f64::total_cmp);
        rs.dedup();
        rs
    }
}

fn trimmed_stats(values: &[f64], trim: f64) -> (Option<f64>, Option<f64>) {
    match trim_percentiles(values, trim) {
        Ok(v) if !v.is_empty() => (Some(median_sorted(&v)), Some(v.iter().sum::<f64>() / v.len() as f64)),
        _ => (None, None),
    }
}

/// Per-`(n, r)` trimmed medians and means, plus log-log fits of the medians
/// for every drift value with at least three sizes.
pub fn summarize(records: &[SweepRecord], trim: f64) -> Summary {
    let mut groups: BTreeMap<(usize, u64), Vec<&SweepRecord>> = BTreeMap::new();
    for rec in records {
        // r is keyed by its bits; values are compared exactly
        groups.entry((rec.n, rec.r.to_bits())).or_default().push(rec);
    }
    let mut out: Vec<GroupSummary> = groups
        .into_values()
        .map(|recs| {
            let live: Vec<&&SweepRecord> = recs.iter().filter(|r| !r.is_skipped()).collect();
            let ts: Vec<f64> = live.iter().filter_map(|r| r.t_mix).map(|t| t as f64).collect();
            let phis: Vec<f64> = live.iter().filter_map(|r| r.phi_value).collect();
            let (t_median, t_mean) = trimmed_stats(&ts, trim);
            let (phi_median, phi_mean) = trimmed_stats(&phis, trim);
            let mut kinds: Vec<PhiKind> = live.iter().filter_map(|r| r.phi_kind).collect();
            kinds.dedup();
            GroupSummary {
                n: recs[0].n,
                r: recs[0].r,
                count: live.len(),
                skipped: recs.len() - live.len(),
                t_median,
                t_mean,
                phi_median,
                phi_mean,
                phi_kind: (kinds.len() == 1).then(|| kinds[0]),
            }
        })
        .collect();
    out.sort_by(|a, b| a.r.total_cmp(&b.r).then(a.n.cmp(&b.n)));
    let mut summary = Summary { groups: out, fits: Vec::new() };
    for r in summary.r_values() {
        for quantity in ["t_mix", "phi"] {
            let pts: Vec<(f64, f64)> = summary
                .groups
                .iter()
                .filter(|g| g.r == r)
                .filter_map(|g| {
                    let v = if quantity == "phi" { g.phi_median } else { g.t_median };
                    v.map(|v| (g.n as f64, v))
                })
                .collect();
            if let Ok(fit) = fit_exponent(&pts) {
                summary.fits.push(FitRow { r, quantity, fit });
            }
        }
    }
    summary.groups.sort_by(|a, b| a.n.cmp(&b.n).then(a.r.total_cmp(&b.r)));
    summary
}

/// Writes `# key=value` provenance lines, the header and one line per record.
pub fn write_records_csv(mut w: impl Write, config: &SweepConfig, records: &[SweepRecord]) -> io::Result<()> {
    for line in config.to_kv().lines() {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "{}", SweepRecord::CSV_HEADER)?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Parses records written by [`write_records_csv`]; `#` lines are skipped.
pub fn read_records_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut out = Vec::new();
    let mut trial_of: BTreeMap<(usize, u64), usize> = BTreeMap::new();
    let mut trials_at: BTreeMap<usize, usize> = BTreeMap::new();
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == SweepRecord::CSV_HEADER => {}
        _ => return Err(LabError::InvalidConfig("missing records header".into())),
    }
    for (ln, line) in lines.enumerate() {
        let bad = || LabError::InvalidConfig(format!("record {}: {line:?}", ln + 1));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(bad());
        }
        fn opt<T: std::str::FromStr>(s: &str) -> std::result::Result<Option<T>, T::Err> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some)
            }
        }
        let n: usize = f[1].parse().map_err(|_| bad())?;
        let seed: u64 = f[4].parse().map_err(|_| bad())?;
        let trial = *trial_of.entry((n, seed)).or_insert_with(|| {
            let count = trials_at.entry(n).or_default();
            *count += 1;
            *count - 1
        });
        out.push(SweepRecord {
            model: f[0].parse().map_err(|_| bad())?,
            n,
            alpha: f[2].parse().map_err(|_| bad())?,
            r: f[3].parse().map_err(|_| bad())?,
            trial,
            seed,
            t_mix: opt(f[5]).map_err(|_| bad())?,
            phi_kind: if f[6] == "skipped" { None } else { Some(f[6].parse().map_err(|_| bad())?) },
            phi_value: opt(f[7]).map_err(|_| bad())?,
            max_degree: opt(f[8]).map_err(|_| bad())?,
            wall_time_ms: opt(f[9]).map_err(|_| bad())?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trimming() {
        let v: Vec<f64> = (0..20).map(f64::from).collect();
        let t = trim_percentiles(&v, 0.05).unwrap();
        assert_eq!(t.len(), 18);
        assert_eq!(t[0], 1.0);
        assert_eq!(trim_percentiles(&v, 0.0).unwrap(), v);
        assert_eq!(trim_percentiles(&[3.0; 7], 0.2).unwrap(), vec![3.0; 5]);
        assert!(matches!(trim_percentiles(&[], 0.1), Err(LabError::EmptyInput)));
        assert!(trim_percentiles(&v, 0.5).is_err());
    }

    #[test]
    fn exact_power_law_fit() {
        let pts: Vec<(f64, f64)> = [64.0, 128.0, 256.0, 512.0].iter().map(|&n| (n, n * n)).collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert!(fit_exponent(&pts[..2]).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (1.0, 2.0), (2.0, 3.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn config_keys_round_trip() {
        let mut c = SweepConfig::new(Model::M2, 1.5, vec![64, 128], 3, 9);
        c.apply_kv("model = m3 # comment\nsizes=32, 64,128\nr=0,0.1\nd=5\n").unwrap();
        assert_eq!(c.model, Model::M3);
        assert_eq!(c.sizes, vec![32, 64, 128]);
        assert_eq!(c.r_values, vec![0.0, 0.1]);
        assert_eq!(c.divisor().unwrap(), 5);
        let mut d = SweepConfig::new(Model::M1, 1.2, vec![], 1, 0);
        d.apply_kv(&c.to_kv()).unwrap();
        assert_eq!(d, c);
        assert!(c.set("colour", "red").is_err());
    }

    #[test]
    fn config_validation() {
        let c = SweepConfig::new(Model::M2, 1.5, vec![64, 64], 3, 1);
        assert!(c.validate().is_err());
        let mut c = SweepConfig::new(Model::M2, 1.5, vec![64], 3, 1);
        c.validate().unwrap();
        c.r_values = vec![0.3];
        assert!(c.validate().is_err());
    }

    #[test]
    fn summary_single_record() {
        let rec = SweepRecord {
            model: Model::M2,
            n: 64,
            alpha: 1.5,
            r: 0.0,
            trial: 0,
            seed: 1,
            t_mix: Some(100),
            phi_kind: Some(PhiKind::ArcUpperBound),
            phi_value: Some(0.01),
            max_degree: Some(2),
            wall_time_ms: None,
        };
        let s = summarize(std::slice::from_ref(&rec), 0.05);
        assert_eq!(s.groups.len(), 1);
        assert_eq!(s.groups[0].t_median, Some(100.0));
        assert_eq!(s.groups[0].phi_mean, Some(0.01));
        assert!(s.fits.is_empty());
        let text = format!("{}\n{}\n", SweepRecord::CSV_HEADER, rec.csv_row());
        assert_eq!(read_records_csv(&text).unwrap(), vec![rec]);
    }
}
