//! Monte Carlo experiments comparing assignment strategies.
//!
//! Each realization samples a topology, a channel, training traffic and
//! evaluation traffic once. All strategies are scored on the same decode
//! table, and threshold or `eta` sweeps reuse the same samples, so every
//! comparison is paired.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::assign::{
    build_p3_objective, build_p4_objective, oracle_best_from_profile, random_assignment, solve, OracleMetric,
};
use crate::channel::ChannelRealization;
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::model::{Assignment, Topology};
use crate::phy::{compute_sinr_table, draw_received_powers, DecodeProfile, SinrTable};
use crate::rng::{derive_seed, streams, substream};
use crate::traffic::{generate_interferer_traffic, generate_topology, generate_unb_traffic, TrafficTrace};
use crate::training::{low_overhead_stats, sample_full_training, stats_from_slots, TrainingSlot};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strategy {
    Proposed,
    ProposedLowOverhead,
    Heuristic,
    Random,
    OracleTrans,
    OraclePacket,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Proposed,
        Strategy::ProposedLowOverhead,
        Strategy::Heuristic,
        Strategy::Random,
        Strategy::OracleTrans,
        Strategy::OraclePacket,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Proposed => "proposed",
            Strategy::ProposedLowOverhead => "proposed_low_overhead",
            Strategy::Heuristic => "heuristic",
            Strategy::Random => "random",
            Strategy::OracleTrans => "oracle_trans",
            Strategy::OraclePacket => "oracle_packet",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub realization: usize,
    pub strategy: Strategy,
    pub pdp: f64,
    pub transmission_rate: f64,
    pub error_rate: f64,
    pub assignment: Assignment,
    /// Time spent choosing the assignment.
    pub wall_time_s: f64,
}

/// Everything random about one realization, independent of the decode
/// threshold and of `eta`.
#[derive(Debug, Clone)]
pub struct RealizationSamples {
    pub realization: usize,
    pub seed: u64,
    pub topology: Topology,
    pub training: Vec<TrainingSlot>,
    pub evaluation: SinrTable,
}

/// Seed of realization `i` under `master_seed`.
pub fn realization_seed(master_seed: u64, i: usize) -> u64 {
    derive_seed(master_seed, streams::REALIZATION_BASE + i as u64)
}

fn with_context<T>(realization: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Realization { realization, source: Box::new(e) })
}

pub fn sample_realization(config: &SimConfig, realization: usize, seed: u64) -> Result<RealizationSamples> {
    with_context(realization, sample_inner(config, realization, seed))
}

fn sample_inner(config: &SimConfig, realization: usize, seed: u64) -> Result<RealizationSamples> {
    config.validate()?;
    let topology = generate_topology(config, &mut substream(seed, streams::TOPOLOGY));
    let channel = ChannelRealization::generate(&topology, config, &mut substream(seed, streams::SHADOWING))?;
    let training = sample_full_training(&topology, &channel, config, &mut substream(seed, streams::TRAINING))?;

    let eval_seed = derive_seed(seed, streams::EVALUATION);
    let horizon = config.sim_horizon;
    let unb = generate_unb_traffic(&topology, config, horizon, None, &mut substream(eval_seed, streams::UNB_TRAFFIC));
    let interferers =
        generate_interferer_traffic(&topology, config, horizon, &mut substream(eval_seed, streams::INTERFERER_TRAFFIC))?;
    let trace = TrafficTrace::merge(unb, interferers);
    let powers = draw_received_powers(&trace, &topology, &channel, config, &mut substream(eval_seed, streams::NOISE))?;
    let evaluation = compute_sinr_table(&trace, &powers, config.num_bands);
    Ok(RealizationSamples { realization, seed, topology, training, evaluation })
}

/// Chooses and scores every strategy's assignment at `config.sinr_threshold`
/// and `config.eta`.
pub fn evaluate_realization(samples: &RealizationSamples, config: &SimConfig) -> Result<Vec<ExperimentResult>> {
    with_context(samples.realization, evaluate_inner(samples, config))
}

fn evaluate_inner(samples: &RealizationSamples, config: &SimConfig) -> Result<Vec<ExperimentResult>> {
    let (b_n, m_n, tau) = (config.num_bs, config.num_bands, config.sinr_threshold);
    let cap = config.enumeration_cap;
    let restarts = config.local_search_restarts;
    let seed = samples.seed;
    let table = samples.evaluation.decode_table(tau);
    if table.num_events() == 0 {
        return Err(Error::EmptyTable);
    }
    let profile = table.profile();

    let mut out = Vec::with_capacity(Strategy::ALL.len());
    for strategy in Strategy::ALL {
        let start = Instant::now();
        let assignment = match strategy {
            Strategy::Proposed => {
                let stats = stats_from_slots(&samples.training, b_n, m_n, tau);
                solve(&build_p3_objective(&stats), cap, restarts, &mut substream(seed, streams::LOCAL_SEARCH))?
                    .assignment
            }
            Strategy::ProposedLowOverhead => {
                let probe = config.probe_band();
                let slot = samples
                    .training
                    .iter()
                    .find(|s| s.band == probe)
                    .ok_or_else(|| Error::InvalidConfig(format!("probe band {probe} has no training slot")))?;
                let stats = low_overhead_stats(slot, b_n, m_n, tau);
                solve(&build_p3_objective(&stats), cap, restarts, &mut substream(seed, streams::LOCAL_SEARCH))?
                    .assignment
            }
            Strategy::Heuristic => {
                let obj = build_p4_objective(&samples.topology.bs_locations, config.eta, m_n)?;
                solve(&obj, cap, restarts, &mut substream(seed, streams::LOCAL_SEARCH))?.assignment
            }
            Strategy::Random => random_assignment(b_n, m_n, &mut substream(seed, streams::RANDOM_ASSIGNMENT)),
            Strategy::OracleTrans => oracle_best_from_profile(&profile, OracleMetric::Transmission, cap)?.assignment,
            Strategy::OraclePacket => oracle_best_from_profile(&profile, OracleMetric::Packet, cap)?.assignment,
        };
        let wall_time_s = start.elapsed().as_secs_f64();
        out.push(score(samples.realization, strategy, assignment, &profile, wall_time_s)?);
    }
    Ok(out)
}

fn score(
    realization: usize,
    strategy: Strategy,
    assignment: Assignment,
    profile: &DecodeProfile,
    wall_time_s: f64,
) -> Result<ExperimentResult> {
    let m = profile.metrics(&assignment)?;
    Ok(ExperimentResult {
        realization,
        strategy,
        pdp: m.pdp,
        transmission_rate: m.transmission_rate,
        error_rate: 1.0 - m.pdp,
        assignment,
        wall_time_s,
    })
}

/// Samples and evaluates one realization.
pub fn run_realization(config: &SimConfig, realization: usize, seed: u64) -> Result<Vec<ExperimentResult>> {
    evaluate_realization(&sample_realization(config, realization, seed)?, config)
}

/// Mean, standard error and variance of the error rate of one strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub n: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub variance: f64,
    pub mean_transmission_rate: f64,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var)
}

fn errors_of(results: &[ExperimentResult], strategy: Strategy) -> Vec<(usize, f64)> {
    results.iter().filter(|r| r.strategy == strategy).map(|r| (r.realization, r.error_rate)).collect()
}

/// Per-strategy summary in [`Strategy::ALL`] order; strategies without
/// results are omitted.
pub fn summarize(results: &[ExperimentResult]) -> Vec<StrategySummary> {
    Strategy::ALL
        .into_iter()
        .filter_map(|strategy| {
            let rows: Vec<&ExperimentResult> = results.iter().filter(|r| r.strategy == strategy).collect();
            if rows.is_empty() {
                return None;
            }
            let errs: Vec<f64> = rows.iter().map(|r| r.error_rate).collect();
            let (mean_error, variance) = mean_var(&errs);
            let rates: Vec<f64> = rows.iter().map(|r| r.transmission_rate).collect();
            Some(StrategySummary {
                strategy,
                n: rows.len(),
                mean_error,
                std_error: (variance / rows.len() as f64).sqrt(),
                variance,
                mean_transmission_rate: mean_var(&rates).0,
            })
        })
        .collect()
}

/// Mean and standard error of the per-realization error difference `a - b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedDifference {
    pub n: usize,
    pub mean: f64,
    pub std_error: f64,
}

pub fn paired_difference(results: &[ExperimentResult], a: Strategy, b: Strategy) -> PairedDifference {
    let mut ea = errors_of(results, a);
    let mut eb = errors_of(results, b);
    ea.sort_by_key(|x| x.0);
    eb.sort_by_key(|x| x.0);
    let diffs: Vec<f64> = ea
        .iter()
        .filter_map(|(r, x)| eb.binary_search_by_key(r, |y| y.0).ok().map(|j| x - eb[j].1))
        .collect();
    if diffs.is_empty() {
        return PairedDifference { n: 0, mean: f64::NAN, std_error: f64::NAN };
    }
    let (mean, var) = mean_var(&diffs);
    PairedDifference { n: diffs.len(), mean, std_error: (var / diffs.len() as f64).sqrt() }
}

#[derive(Debug, Clone)]
pub struct MonteCarloRun {
    pub results: Vec<ExperimentResult>,
    pub summary: Vec<StrategySummary>,
}

fn sort_results(results: &mut [ExperimentResult]) {
    results.sort_by_key(|r| (r.realization, r.strategy));
}

/// Runs `n` realizations in parallel with seeds derived from `master_seed`.
pub fn run_monte_carlo(config: &SimConfig, n: usize, master_seed: u64) -> Result<MonteCarloRun> {
    if n == 0 {
        return Err(Error::InvalidArgument("at least one realization is required".into()));
    }
    config.validate()?;
    let per: Vec<Vec<ExperimentResult>> = (0..n)
        .into_par_iter()
        .map(|i| run_realization(config, i, realization_seed(master_seed, i)))
        .collect::<Result<_>>()?;
    let mut results: Vec<ExperimentResult> = per.into_iter().flatten().collect();
    sort_results(&mut results);
    let summary = summarize(&results);
    Ok(MonteCarloRun { results, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    NumBs,
    SinrThreshold,
    Eta,
    TrainingDuration,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::NumBs => "num_bs",
            SweepParam::SinrThreshold => "sinr_threshold",
            SweepParam::Eta => "eta",
            SweepParam::TrainingDuration => "training_duration",
        }
    }

    /// True if changing the parameter leaves every sampled quantity intact.
    fn evaluation_only(self) -> bool {
        matches!(self, SweepParam::SinrThreshold | SweepParam::Eta)
    }

    pub fn apply(self, config: &SimConfig, value: f64) -> Result<SimConfig> {
        config.with_override(self.name(), value)
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [SweepParam::NumBs, SweepParam::SinrThreshold, SweepParam::Eta, SweepParam::TrainingDuration]
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("cannot sweep {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub run: MonteCarloRun,
}

/// One Monte Carlo batch per value. Realization `i` uses the same seed for
/// every value; threshold and `eta` sweeps also reuse the sampled traffic
/// and channel.
pub fn sweep(
    config: &SimConfig,
    param: SweepParam,
    values: &[f64],
    n: usize,
    master_seed: u64,
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one value".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("at least one realization is required".into()));
    }
    let configs: Vec<SimConfig> = values.iter().map(|&v| param.apply(config, v)).collect::<Result<_>>()?;
    if !param.evaluation_only() {
        return values
            .iter()
            .zip(&configs)
            .map(|(&value, cfg)| Ok(SweepPoint { value, run: run_monte_carlo(cfg, n, master_seed)? }))
            .collect();
    }
    // Realization-major so only one realization's samples are alive per worker.
    let per: Vec<Vec<Vec<ExperimentResult>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let samples = sample_realization(&configs[0], i, realization_seed(master_seed, i))?;
            configs.iter().map(|cfg| evaluate_realization(&samples, cfg)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut columns: Vec<Vec<ExperimentResult>> = vec![Vec::with_capacity(n * Strategy::ALL.len()); values.len()];
    for realization in per {
        for (col, rows) in columns.iter_mut().zip(realization) {
            col.extend(rows);
        }
    }
    Ok(values
        .iter()
        .zip(columns)
        .map(|(&value, mut results)| {
            sort_results(&mut results);
            let summary = summarize(&results);
            SweepPoint { value, run: MonteCarloRun { results, summary } }
        })
        .collect())
}

pub const CSV_HEADER: &str = "param_value,realization,strategy,pdp,transmission_rate,error_rate,assignment,wall_time_s";

/// Writes result rows. `wall_time_s` is written as 0 unless `timing` is set,
/// which keeps output byte-identical across runs.
pub fn write_csv<W: Write>(
    mut out: W,
    rows: &[(Option<f64>, &ExperimentResult)],
    timing: bool,
) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for (param, r) in rows {
        let param = param.map(|v| v.to_string()).unwrap_or_default();
        let wall = if timing { r.wall_time_s } else { 0.0 };
        writeln!(
            out,
            "{param},{},{},{},{},{},{},{wall}",
            r.realization,
            r.strategy,
            r.pdp,
            r.transmission_rate,
            r.error_rate,
            r.assignment.render()
        )?;
    }
    Ok(())
}

pub fn write_run_csv<W: Write>(out: W, run: &MonteCarloRun, timing: bool) -> Result<()> {
    let rows: Vec<_> = run.results.iter().map(|r| (None, r)).collect();
    write_csv(out, &rows, timing)
}

pub fn write_sweep_csv<W: Write>(out: W, points: &[SweepPoint], timing: bool) -> Result<()> {
    let rows: Vec<_> = points.iter().flat_map(|p| p.run.results.iter().map(move |r| (Some(p.value), r))).collect();
    write_csv(out, &rows, timing)
}

/// Human-readable summary table.
pub fn write_summary<W: Write>(mut out: W, summary: &[StrategySummary]) -> Result<()> {
    writeln!(out, "{:<22} {:>5} {:>10} {:>10} {:>10} {:>10}", "strategy", "n", "error", "std_err", "variance", "tx_rate")?;
    for s in summary {
        writeln!(
            out,
            "{:<22} {:>5} {:>10.5} {:>10.5} {:>10.3e} {:>10.5}",
            s.strategy.name(),
            s.n,
            s.mean_error,
            s.std_error,
            s.variance,
            s.mean_transmission_rate
        )?;
    }
    Ok(())
}
