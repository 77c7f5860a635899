//! Training-based estimation of per-band decode rates `S[b][m]` and pairwise
//! joint decode rates `R[b][k][m]`.
//!
//! Full training splits the training period into `M` equal slots. In slot
//! `m` every BS listens to band `m` and UNB devices are restricted to it,
//! while interferers keep their usual band behaviour. The low-overhead
//! variant runs only the slot of one probe band and copies its estimates to
//! every band.

use rand::RngCore;

use crate::channel::ChannelRealization;
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::model::{Band, DecodeStats, Topology};
use crate::phy::{compute_sinr_table, cotuned_stats, draw_received_powers, SinrTable};
use crate::rng::{derive_seed, streams, substream};
use crate::traffic::{generate_interferer_traffic, generate_unb_traffic, TrafficTrace};

/// One training transmission: the band each BS was tuned to and which BSs
/// decoded it (bit `b` set iff BS `b` decoded).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingRecord {
    pub tuned: Vec<Band>,
    pub decoded: u64,
}

impl TrainingRecord {
    pub fn y(&self, bs: usize) -> bool {
        self.decoded >> bs & 1 == 1
    }
}

/// Sample mean and the number of samples behind it. A cell with no samples
/// holds 0 and is flagged.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellEstimate {
    pub value: f64,
    pub count: u64,
}

impl CellEstimate {
    fn from_counts(hits: u64, count: u64) -> Self {
        let value = if count == 0 { 0.0 } else { hits as f64 / count as f64 };
        CellEstimate { value, count }
    }

    pub fn flagged(&self) -> bool {
        self.count == 0
    }
}

/// `S[b][m]`: mean of `y_b` over records where BS `b` was tuned to `m`.
pub fn estimate_s(records: &[TrainingRecord], num_bs: usize, num_bands: usize) -> Vec<Vec<CellEstimate>> {
    let mut hits = vec![vec![0u64; num_bands]; num_bs];
    let mut count = vec![vec![0u64; num_bands]; num_bs];
    for rec in records {
        for (b, band) in rec.tuned.iter().enumerate().take(num_bs) {
            count[b][band.index()] += 1;
            hits[b][band.index()] += u64::from(rec.y(b));
        }
    }
    (0..num_bs)
        .map(|b| (0..num_bands).map(|m| CellEstimate::from_counts(hits[b][m], count[b][m])).collect())
        .collect()
}

/// `R[m][b][k]`: mean of `y_b y_k` over records where BSs `b` and `k` were
/// both tuned to `m`. Symmetric; the diagonal equals [`estimate_s`].
pub fn estimate_r(records: &[TrainingRecord], num_bs: usize, num_bands: usize) -> Vec<Vec<Vec<CellEstimate>>> {
    let mut hits = vec![vec![vec![0u64; num_bs]; num_bs]; num_bands];
    let mut count = vec![vec![vec![0u64; num_bs]; num_bs]; num_bands];
    for rec in records {
        for b in 0..num_bs {
            let m = rec.tuned[b].index();
            let yb = rec.y(b);
            for k in b..num_bs {
                if rec.tuned[k].index() == m {
                    count[m][b][k] += 1;
                    hits[m][b][k] += u64::from(yb && rec.y(k));
                }
            }
        }
    }
    (0..num_bands)
        .map(|m| {
            (0..num_bs)
                .map(|b| {
                    (0..num_bs)
                        .map(|k| {
                            let (lo, hi) = (b.min(k), b.max(k));
                            CellEstimate::from_counts(hits[m][lo][hi], count[m][lo][hi])
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Both estimators packed into [`DecodeStats`].
pub fn estimate_stats(records: &[TrainingRecord], num_bs: usize, num_bands: usize) -> DecodeStats {
    let s = estimate_s(records, num_bs, num_bands);
    let r = estimate_r(records, num_bs, num_bands);
    let mut stats = DecodeStats::zeros(num_bs, num_bands);
    for m in 0..num_bands {
        for b in 0..num_bs {
            stats.set_s(b, m, s[b][m].value, s[b][m].count);
            for k in b..num_bs {
                stats.set_r(b, k, m, r[m][b][k].value, r[m][b][k].count);
            }
        }
    }
    stats
}

/// Simulated SINRs of one training slot, kept so that the threshold can be
/// varied without resampling.
#[derive(Debug, Clone)]
pub struct TrainingSlot {
    pub band: Band,
    pub sinr: SinrTable,
}

impl TrainingSlot {
    /// Records for this slot with every BS tuned to the slot band.
    pub fn records(&self, tau: f64) -> Vec<TrainingRecord> {
        let table = self.sinr.decode_table(tau);
        let tuned = vec![self.band; self.sinr.num_bs()];
        (0..table.num_events())
            .map(|n| TrainingRecord { tuned: tuned.clone(), decoded: table.mask(n) })
            .collect()
    }
}

fn check_duration(config: &SimConfig) -> Result<()> {
    if !(config.training_duration > 0.0 && config.training_duration.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "training_duration must be positive, got {}",
            config.training_duration
        )));
    }
    Ok(())
}

/// Simulates the training slot for `band`. The slot's randomness depends only
/// on `(base_seed, band)`.
pub fn sample_training_slot(
    topology: &Topology,
    channel: &ChannelRealization,
    config: &SimConfig,
    band: Band,
    base_seed: u64,
) -> Result<TrainingSlot> {
    let slot_seed = derive_seed(base_seed, streams::SLOT_BASE + band.index() as u64);
    let horizon = config.training_slot_duration();
    let unb = generate_unb_traffic(topology, config, horizon, Some(band), &mut substream(slot_seed, streams::UNB_TRAFFIC));
    let interferers =
        generate_interferer_traffic(topology, config, horizon, &mut substream(slot_seed, streams::INTERFERER_TRAFFIC))?;
    let trace = TrafficTrace::merge(unb, interferers);
    let powers = draw_received_powers(&trace, topology, channel, config, &mut substream(slot_seed, streams::EVALUATION))?;
    Ok(TrainingSlot { band, sinr: compute_sinr_table(&trace, &powers, config.num_bands) })
}

/// All `M` slots of full training, drawing one base seed from `rng`.
pub fn sample_full_training<R: RngCore + ?Sized>(
    topology: &Topology,
    channel: &ChannelRealization,
    config: &SimConfig,
    rng: &mut R,
) -> Result<Vec<TrainingSlot>> {
    check_duration(config)?;
    let base_seed = rng.next_u64();
    (0..config.num_bands)
        .map(|m| sample_training_slot(topology, channel, config, Band::from_index(m), base_seed))
        .collect()
}

/// Pools the records of all slots and estimates `S` and `R`. Same result
/// as [`estimate_stats`] over every slot's [`TrainingSlot::records`].
pub fn stats_from_slots(slots: &[TrainingSlot], num_bs: usize, num_bands: usize, tau: f64) -> DecodeStats {
    let rows = slots.iter().flat_map(|slot| {
        let m = slot.band.index();
        slot.sinr.decode_masks(tau).map(move |mask| (m, mask))
    });
    cotuned_stats(rows, num_bs, num_bands)
}

/// Estimates from a single probe slot, copied to every band.
pub fn low_overhead_stats(slot: &TrainingSlot, num_bs: usize, num_bands: usize, tau: f64) -> DecodeStats {
    let probe = stats_from_slots(std::slice::from_ref(slot), num_bs, num_bands, tau);
    replicate_band(&probe, slot.band)
}

/// Copies the `S` and `R` entries of `band` to every band.
pub fn replicate_band(stats: &DecodeStats, band: Band) -> DecodeStats {
    let (b_n, m_n, p) = (stats.num_bs(), stats.num_bands(), band.index());
    let mut out = DecodeStats::zeros(b_n, m_n);
    for m in 0..m_n {
        for b in 0..b_n {
            out.set_s(b, m, stats.s(b, p), stats.s_count(b, p));
            for k in b..b_n {
                out.set_r(b, k, m, stats.r(b, k, p), stats.r_count(b, k, p));
            }
        }
    }
    out
}

/// Full training: one slot per band, estimates pooled over all slots.
pub fn run_full_training<R: RngCore + ?Sized>(
    topology: &Topology,
    channel: &ChannelRealization,
    config: &SimConfig,
    rng: &mut R,
) -> Result<DecodeStats> {
    let slots = sample_full_training(topology, channel, config, rng)?;
    Ok(stats_from_slots(&slots, config.num_bs, config.num_bands, config.sinr_threshold))
}

/// Low-overhead training on `probe_band` only. Consumes `rng` exactly like
/// [`run_full_training`] and reproduces that run's slot for `probe_band`.
pub fn run_low_overhead_training<R: RngCore + ?Sized>(
    topology: &Topology,
    channel: &ChannelRealization,
    config: &SimConfig,
    rng: &mut R,
    probe_band: Band,
) -> Result<DecodeStats> {
    check_duration(config)?;
    if probe_band.index() >= config.num_bands {
        return Err(Error::InvalidArgument(format!(
            "probe band {probe_band} outside 1..={}",
            config.num_bands
        )));
    }
    let base_seed = rng.next_u64();
    let slot = sample_training_slot(topology, channel, config, probe_band, base_seed)?;
    Ok(low_overhead_stats(&slot, config.num_bs, config.num_bands, config.sinr_threshold))
}
