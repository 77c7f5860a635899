//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Runs at full scale (200 realizations per batch); expect several minutes
//! in the optimized test profile.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unb_core::assign::{build_p3_objective, random_assignment, solve_enumeration};
use unb_core::harness::{
    paired_difference, run_monte_carlo, sample_realization, realization_seed, summarize, sweep, write_run_csv,
    write_sweep_csv, ExperimentResult, MonteCarloRun, Strategy, SweepParam,
};
use unb_core::training::{estimate_r, estimate_s, stats_from_slots, TrainingRecord};
use unb_core::{Band, DecodeStats, SimConfig};

const SEED: u64 = 20_240_501;
const REALIZATIONS: usize = 200;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn min_eigenvalue(gram: &[Vec<f64>]) -> f64 {
    let n = gram.len();
    let m = DMatrix::from_fn(n, n, |i, j| gram[i][j]);
    m.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn random_stats(rng: &mut ChaCha8Rng, b_n: usize, m_n: usize) -> DecodeStats {
    let mut stats = DecodeStats::zeros(b_n, m_n);
    for m in 0..m_n {
        let s: Vec<f64> = (0..b_n).map(|_| rng.random::<f64>()).collect();
        for b in 0..b_n {
            stats.set_s(b, m, s[b], 1);
            stats.set_r(b, b, m, s[b], 1);
            for k in b + 1..b_n {
                let lo = (s[b] + s[k] - 1.0).max(0.0);
                let hi = s[b].min(s[k]);
                stats.set_r(b, k, m, lo + (hi - lo) * rng.random::<f64>(), 1);
            }
        }
    }
    stats
}

/// Exhaustive maximizer written directly against the statistics, sharing
/// nothing with the solver. Returns the best value and every assignment
/// within `1e-12` of it.
fn brute_force(stats: &DecodeStats) -> (f64, Vec<Vec<usize>>) {
    let (b_n, m_n) = (stats.num_bs(), stats.num_bands());
    let value = |x: &[usize]| {
        let mut v = 0.0;
        for b in 0..b_n {
            v += stats.s(b, x[b]);
            for k in b + 1..b_n {
                if x[b] == x[k] {
                    v -= stats.r(b, k, x[b]);
                }
            }
        }
        v
    };
    let mut all = vec![Vec::new()];
    for _ in 0..b_n {
        all = all.into_iter().flat_map(|p: Vec<usize>| (0..m_n).map(move |m| [p.clone(), vec![m]].concat())).collect();
    }
    let scored: Vec<(f64, Vec<usize>)> = all.into_iter().map(|x| (value(&x), x)).collect();
    let best = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    (best, scored.into_iter().filter(|s| s.0 >= best - 1e-12).map(|s| s.1).collect())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let mut matched = 0;
    let total = 500;
    for _ in 0..total {
        let b_n = rng.random_range(1..=6);
        let m_n = rng.random_range(1..=3);
        let stats = random_stats(&mut rng, b_n, m_n);
        let sol = solve_enumeration(&build_p3_objective(&stats), u64::MAX).expect("within cap");
        let (best, argmax) = brute_force(&stats);
        let bands: Vec<usize> = sol.assignment.bands().iter().map(|b| b.index()).collect();
        if (sol.value - best).abs() <= 1e-12 && argmax.contains(&bands) {
            matched += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(matched == total && secs < 10.0, format!("{matched}/{total} match brute force in {secs:.2} s"))
}

fn criteria_2_3(config: &SimConfig) -> (Outcome, Outcome) {
    let n = 100;
    let assignments = 50;
    let m_n = config.num_bands;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_pooled = f64::NEG_INFINITY;
    let mut min_eig = f64::INFINITY;
    for i in 0..n {
        let samples = sample_realization(config, i, realization_seed(SEED, i)).expect("realization");
        let table = samples.evaluation.decode_table(config.sinr_threshold);
        let stats = table.empirical_stats();
        let obj = build_p3_objective(&stats);
        let counts = table.band_counts();
        let mut rng = ChaCha8Rng::seed_from_u64(realization_seed(SEED ^ 2, i));
        for _ in 0..assignments {
            let x = random_assignment(config.num_bs, m_n, &mut rng);
            let listeners = x.listener_masks();
            let mut decoded = vec![0u64; m_n];
            for e in 0..table.num_events() {
                let m = table.event_band(e).index();
                decoded[m] += u64::from(table.mask(e) & listeners[m] != 0);
            }
            // Every band carries 1/M of the transmissions in expectation, so
            // the band-stratified rate weights each band's rate by 1/M.
            let stratified: f64 =
                (0..m_n).filter(|&m| counts[m] > 0).map(|m| decoded[m] as f64 / counts[m] as f64).sum::<f64>()
                    / m_n as f64;
            let bound = obj.value(&x).expect("value") / m_n as f64;
            worst = worst.max(bound - stratified);
            let pooled = unb_core::phy::metrics(&x, &table).expect("metrics").transmission_rate;
            worst_pooled = worst_pooled.max(bound - pooled);
        }
        let training = stats_from_slots(&samples.training, config.num_bs, m_n, config.sinr_threshold);
        for m in 0..m_n {
            min_eig = min_eig.min(min_eigenvalue(&stats.gram_matrix(m)));
            min_eig = min_eig.min(min_eigenvalue(&training.gram_matrix(m)));
        }
    }
    let c2 = outcome(
        worst <= 1e-9,
        format!(
            "max (P3/M - band-stratified transmission rate) = {worst:.3e} over {n} x {assignments}; \
             against the pooled rate {worst_pooled:.3e}"
        ),
    );
    let c3 = outcome(min_eig >= -1e-9, format!("min Gram eigenvalue {min_eig:.3e} over {n} realizations"));
    (c2, c3)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let trials = 1000;
    let mut lines = Vec::new();
    let mut pass = true;
    for len in [100usize, 1_000, 10_000] {
        let (mut ok_s, mut ok_r) = (0, 0);
        for _ in 0..trials {
            let p0: f64 = rng.random_range(0.1..0.9);
            let p1: f64 = rng.random_range(0.1..0.9);
            let c: f64 = rng.random();
            // Mixture of a comonotone and an independent pair.
            let p11 = c * p0.min(p1) + (1.0 - c) * p0 * p1;
            let records: Vec<TrainingRecord> = (0..len)
                .map(|_| {
                    let u: f64 = rng.random();
                    let y0 = u < p0;
                    let y1 = if rng.random::<f64>() < c { u < p1 } else { rng.random::<f64>() < p1 };
                    TrainingRecord {
                        tuned: vec![Band::from_index(0); 2],
                        decoded: u64::from(y0) | u64::from(y1) << 1,
                    }
                })
                .collect();
            let l = len as f64;
            let s = estimate_s(&records, 2, 1)[0][0].value;
            let r = estimate_r(&records, 2, 1)[0][0][1].value;
            ok_s += u32::from((s - p0).abs() <= 3.0 * (p0 * (1.0 - p0) / l).sqrt());
            ok_r += u32::from((r - p11).abs() <= 3.0 * (p11 * (1.0 - p11) / l).sqrt());
        }
        let (rs, rr) = (ok_s as f64 / trials as f64, ok_r as f64 / trials as f64);
        pass &= rs >= 0.99 && rr >= 0.99;
        lines.push(format!("L={len}: S {:.1}% R {:.1}%", 100.0 * rs, 100.0 * rr));
    }
    outcome(pass, format!("within 3 sigma: {}", lines.join(", ")))
}

fn mean_error(run: &MonteCarloRun, s: Strategy) -> f64 {
    run.summary.iter().find(|x| x.strategy == s).expect("strategy present").mean_error
}

fn criterion_5(run: &MonteCarloRun) -> Outcome {
    use Strategy::*;
    let e = |s| mean_error(run, s);
    let chain = e(OraclePacket) <= e(OracleTrans) && e(OracleTrans) <= e(Proposed) && e(Proposed) <= e(Random);
    let vs_random = paired_difference(&run.results, Proposed, Random);
    let vs_oracle = paired_difference(&run.results, Proposed, OracleTrans);
    let strict = vs_random.mean <= -2.0 * vs_random.std_error;
    let close = vs_oracle.mean.abs() <= 2.0 * vs_oracle.std_error;
    outcome(
        chain && strict && close,
        format!(
            "means oracle_packet {:.4} oracle_trans {:.4} proposed {:.4} random {:.4} (ordered: {chain}); \
             proposed-random {:+.4} ({:.1} SE, strict: {strict}); \
             proposed-oracle_trans {:+.4} ({:.1} SE, within 2 SE: {close})",
            e(OraclePacket),
            e(OracleTrans),
            e(Proposed),
            e(Random),
            vs_random.mean,
            vs_random.mean / vs_random.std_error,
            vs_oracle.mean,
            vs_oracle.mean / vs_oracle.std_error,
        ),
    )
}

fn not_above(results: &[ExperimentResult], a: Strategy, b: Strategy) -> (bool, String) {
    let d = paired_difference(results, a, b);
    (d.mean <= 2.0 * d.std_error, format!("{}-{} {:+.4} (SE {:.4})", a.name(), b.name(), d.mean, d.std_error))
}

fn criterion_6(run: &MonteCarloRun) -> Outcome {
    use Strategy::*;
    let (a, da) = not_above(&run.results, Proposed, ProposedLowOverhead);
    let (b, db) = not_above(&run.results, ProposedLowOverhead, Random);
    let d = paired_difference(&run.results, Proposed, Random);
    let strict = d.mean <= -2.0 * d.std_error;
    outcome(a && b && strict, format!("{da}; {db}; proposed-random strict: {strict}"))
}

fn criterion_7(run: &MonteCarloRun) -> Outcome {
    let (ok, d) = not_above(&run.results, Strategy::Heuristic, Strategy::Random);
    outcome(ok, d)
}

/// First threshold at which the increasing curve reaches `level`, by linear
/// interpolation.
fn crossing(taus: &[f64], curve: &[f64], level: f64) -> Option<f64> {
    (1..taus.len()).find_map(|i| {
        let (y0, y1) = (curve[i - 1], curve[i]);
        if y0 <= level && level <= y1 && y1 > y0 {
            Some(taus[i - 1] + (level - y0) / (y1 - y0) * (taus[i] - taus[i - 1]))
        } else if y0 == level {
            Some(taus[i - 1])
        } else {
            None
        }
    })
}

fn criterion_8(taus: &[f64], runs: &[&MonteCarloRun]) -> Outcome {
    let random: Vec<f64> = runs.iter().map(|r| mean_error(r, Strategy::Random)).collect();
    let proposed: Vec<f64> = runs.iter().map(|r| mean_error(r, Strategy::Proposed)).collect();
    let lo = random.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = random.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let level = 0.5 * (lo + hi);
    let Some(t_random) = crossing(taus, &random, level) else {
        return outcome(false, format!("random curve never crosses {level:.4}"));
    };
    let (gap, bound) = match crossing(taus, &proposed, level) {
        Some(t) => (t - t_random, ""),
        // Proposed stays below the level over the whole range.
        None if proposed.iter().all(|&e| e < level) => (taus[taus.len() - 1] - t_random, " (lower bound)"),
        None => return outcome(false, format!("proposed curve never crosses {level:.4}")),
    };
    outcome(gap >= 1.5, format!("gap {gap:.2} dB{bound} at error level {level:.4} (random crosses at {t_random:.2} dB)"))
}

fn errors(run: &MonteCarloRun, s: Strategy) -> Vec<f64> {
    run.results.iter().filter(|r| r.strategy == s).map(|r| r.error_rate).collect()
}

/// Mean and standard error of `later - earlier` over matching realizations.
fn paired_step(earlier: &[f64], later: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = later.iter().zip(earlier).map(|(l, e)| l - e).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Checks every step between consecutive runs: rising curves may fall, and
/// falling curves may rise, by at most 2 paired standard errors.
fn monotone(runs: &[&MonteCarloRun], rising: bool) -> (bool, Vec<String>) {
    let mut bad = Vec::new();
    for s in Strategy::ALL {
        for w in runs.windows(2) {
            let (mean, se) = paired_step(&errors(w[0], s), &errors(w[1], s));
            let against = if rising { -mean } else { mean };
            if against > 2.0 * se {
                bad.push(format!("{} step {mean:+.4} (SE {se:.4})", s.name()));
            }
        }
    }
    (bad.is_empty(), bad)
}

fn dominance_violations(run: &MonteCarloRun) -> usize {
    let n = run.results.iter().map(|r| r.realization).max().map_or(0, |m| m + 1);
    (0..n)
        .filter(|&i| {
            let rows: Vec<&ExperimentResult> = run.results.iter().filter(|r| r.realization == i).collect();
            let best = rows.iter().find(|r| r.strategy == Strategy::OraclePacket).expect("oracle row").pdp;
            rows.iter().any(|r| r.pdp > best)
        })
        .count()
}

fn criterion_9(tau_runs: &[&MonteCarloRun], bs_runs: &[&MonteCarloRun]) -> Outcome {
    let (ok_b, bad_b) = monotone(bs_runs, false);
    let (ok_t, bad_t) = monotone(tau_runs, true);
    let violations: usize = tau_runs.iter().chain(bs_runs).map(|r| dominance_violations(r)).sum();
    let mut detail = format!(
        "B 3..9 nonincreasing: {ok_b}; tau nondecreasing: {ok_t}; oracle_packet dominance violations: {violations}"
    );
    for b in bad_b.iter().chain(&bad_t) {
        detail.push_str(&format!("; {b}"));
    }
    outcome(ok_b && ok_t && violations == 0, detail)
}

fn criterion_10(config: &SimConfig) -> Outcome {
    let csv = || {
        let run = run_monte_carlo(config, 6, SEED).expect("run");
        let points = sweep(config, SweepParam::SinrThreshold, &[8.0, 12.0], 3, SEED).expect("sweep");
        let mut out = Vec::new();
        write_run_csv(&mut out, &run, false).expect("csv");
        write_sweep_csv(&mut out, &points, false).expect("csv");
        out
    };
    let (a, b) = (csv(), csv());
    outcome(a == b && !a.is_empty(), format!("{} bytes, identical: {}", a.len(), a == b))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let config = SimConfig::default();
    let mut outcomes: Vec<(u32, Outcome)> = Vec::new();
    let mut report = |n: u32, o: Outcome| {
        println!("{} criterion {n}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        outcomes.push((n, o));
    };

    report(1, criterion_1());
    let (c2, c3) = criteria_2_3(&config);
    report(2, c2);
    report(3, c3);
    report(4, criterion_4());

    let taus: Vec<f64> = (0..=16).map(|i| 6.0 + 0.5 * i as f64).collect();
    let tau_points = sweep(&config, SweepParam::SinrThreshold, &taus, REALIZATIONS, SEED).expect("tau sweep");
    let at_default = tau_points
        .iter()
        .find(|p| p.value == config.sinr_threshold)
        .map(|p| &p.run)
        .expect("sweep covers the default threshold");
    report(5, criterion_5(at_default));
    report(6, criterion_6(at_default));
    report(7, criterion_7(at_default));
    let tau_runs: Vec<&MonteCarloRun> = tau_points.iter().map(|p| &p.run).collect();
    report(8, criterion_8(&taus, &tau_runs));

    let bs_values = [3usize, 4, 5, 6, 7, 8, 9];
    let bs_owned: Vec<Option<MonteCarloRun>> = bs_values
        .iter()
        .map(|&b| {
            (b != config.num_bs).then(|| {
                let cfg = SweepParam::NumBs.apply(&config, b as f64).expect("num_bs");
                run_monte_carlo(&cfg, REALIZATIONS, SEED).expect("B sweep")
            })
        })
        .collect();
    let bs_runs: Vec<&MonteCarloRun> = bs_owned.iter().map(|r| r.as_ref().unwrap_or(at_default)).collect();
    for (b, r) in bs_values.iter().zip(&bs_runs) {
        let s = summarize(&r.results);
        let line: Vec<String> = s.iter().map(|x| format!("{} {:.4}", x.strategy.name(), x.mean_error)).collect();
        println!("  B={b}: {}", line.join(", "));
    }
    report(9, criterion_9(&tau_runs, &bs_runs));
    report(10, criterion_10(&config));

    let failed: Vec<u32> = outcomes.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    println!(
        "{} of {} criteria passed in {:.0} s",
        outcomes.len() - failed.len(),
        outcomes.len(),
        started.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}
