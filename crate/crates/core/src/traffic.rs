//! Topology sampling and unslotted random-access traffic for UNB devices
//! and interferers.

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Poisson};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::model::{band_of_frequency, Band, Point2D, SourceKind, Topology, TransmissionEvent};
use crate::rng::{streams, substream};

/// Time-sorted transmissions over `[0, horizon]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrafficTrace {
    pub events: Vec<TransmissionEvent>,
    pub horizon: f64,
}

impl TrafficTrace {
    fn sorted(mut events: Vec<TransmissionEvent>, horizon: f64) -> Self {
        events.sort_by(|a, b| {
            a.start_time
                .total_cmp(&b.start_time)
                .then(a.kind.cmp(&b.kind))
                .then(a.source_id.cmp(&b.source_id))
                .then(a.packet_id.cmp(&b.packet_id))
                .then(a.rep_index.cmp(&b.rep_index))
        });
        Self { events, horizon }
    }

    /// Merges two traces over the same horizon.
    pub fn merge(a: TrafficTrace, b: TrafficTrace) -> Self {
        let horizon = a.horizon.max(b.horizon);
        let mut events = a.events;
        events.extend(b.events);
        Self::sorted(events, horizon)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn unb_count(&self) -> usize {
        self.events.iter().filter(|e| e.is_unb()).count()
    }

    pub fn max_duration(&self) -> f64 {
        self.events.iter().map(|e| e.duration).fold(0.0, f64::max)
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    // Poisson::new only fails for non-positive or non-finite means.
    let d = Poisson::new(mean).expect("finite positive Poisson mean");
    d.sample(rng) as usize
}

fn uniform_points<R: Rng + ?Sized>(count: usize, side: f64, rng: &mut R) -> Vec<Point2D> {
    (0..count)
        .map(|_| Point2D::new(rng.random::<f64>() * side, rng.random::<f64>() * side))
        .collect()
}

/// Samples BS, IoT and interferer locations for one realization.
///
/// The three populations come from independent substreams, so BS `b`'s
/// location does not depend on how many devices were drawn. Unless
/// `nested_topology` is set the BS stream is keyed by the BS count.
pub fn generate_topology<R: RngCore + ?Sized>(config: &SimConfig, rng: &mut R) -> Topology {
    let bs_seed = rng.next_u64();
    let iot_seed = rng.next_u64();
    let int_seed = rng.next_u64();
    let side = config.area_side;

    let bs_stream = if config.nested_topology { 0 } else { config.num_bs as u64 + 1 };
    let bs_locations = uniform_points(config.num_bs, side, &mut substream(bs_seed, bs_stream));

    let mut iot_rng = substream(iot_seed, streams::IOT_LOCATIONS);
    let n_iot = poisson_count(config.mean_iot_count, &mut iot_rng);
    let iot_locations = uniform_points(n_iot, side, &mut iot_rng);

    let mut int_rng = substream(int_seed, streams::INTERFERERS);
    let n_int = poisson_count(config.mean_interferer_count, &mut int_rng);
    let interferer_locations = uniform_points(n_int, side, &mut int_rng);
    let interferer_band_probs = (0..n_int)
        .map(|_| build_interferer_band_probs(config.num_bands, &mut int_rng))
        .collect();

    Topology { bs_locations, iot_locations, interferer_locations, interferer_band_probs }
}

/// `M` i.i.d. `U(0,1)` draws normalized by their sum.
pub fn build_interferer_band_probs<R: Rng + ?Sized>(num_bands: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let draws: Vec<f64> = (0..num_bands).map(|_| rng.random::<f64>()).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            return draws.into_iter().map(|v| v / total).collect();
        }
    }
}

fn uniform_in<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    if hi > lo {
        lo + (hi - lo) * rng.random::<f64>()
    } else {
        lo
    }
}

/// UNB traffic over `[0, horizon]`.
///
/// Each device starts packets as a Poisson process of rate `N / 3600`;
/// every packet is sent `R` times back to back, each repetition on an
/// independent uniform carrier. With `band_lock = Some(m)` carriers stay
/// inside band `m`. Packets whose repetition train would run past the
/// horizon are dropped entirely, so every packet in the trace is complete.
pub fn generate_unb_traffic<R: Rng + ?Sized>(
    topology: &Topology,
    config: &SimConfig,
    horizon: f64,
    band_lock: Option<Band>,
    rng: &mut R,
) -> TrafficTrace {
    let t = config.tx_duration();
    let w = config.tx_bandwidth;
    let big_w = config.band_width;
    let reps = config.repetitions;
    let (f_lo, f_hi) = match band_lock {
        Some(m) => {
            let (lo, hi) = m.edges(big_w);
            (lo + w / 2.0, hi - w / 2.0)
        }
        None => (w / 2.0, config.total_bandwidth() - w / 2.0),
    };
    let mean_packets = config.packets_per_hour / 3600.0 * horizon;
    let train = reps as f64 * t;

    let mut events = Vec::new();
    let mut packet_id = 0;
    for device in 0..topology.iot_locations.len() {
        let count = poisson_count(mean_packets, rng);
        for _ in 0..count {
            let t_p = rng.random::<f64>() * horizon;
            let phis: Vec<f64> = (0..reps).map(|_| uniform_in(f_lo, f_hi, rng)).collect();
            if t_p + train > horizon {
                continue;
            }
            for (r, phi) in phis.into_iter().enumerate() {
                events.push(TransmissionEvent {
                    source_id: device,
                    kind: SourceKind::Unb,
                    packet_id,
                    rep_index: r as u32 + 1,
                    start_time: t_p + r as f64 * t,
                    duration: t,
                    carrier_freq: phi,
                    band: band_of_frequency(phi, big_w, config.num_bands),
                    bandwidth: w,
                });
            }
            packet_id += 1;
        }
    }
    TrafficTrace::sorted(events, horizon)
}

/// Interferer bursts over `[0, horizon]`.
///
/// Bursts follow a Poisson process of rate `N' / 3600` per interferer. Each
/// burst picks a band from the interferer's probability vector and a carrier
/// that keeps the whole `w'`-wide signal inside that band.
pub fn generate_interferer_traffic<R: Rng + ?Sized>(
    topology: &Topology,
    config: &SimConfig,
    horizon: f64,
    rng: &mut R,
) -> Result<TrafficTrace> {
    let wp = config.interferer_bandwidth;
    let big_w = config.band_width;
    if wp > big_w {
        return Err(Error::InvalidConfig(format!(
            "interferer bandwidth {wp} Hz exceeds band width {big_w} Hz"
        )));
    }
    let dur = config.interferer_duration();
    let mean_bursts = config.interferer_packets_per_hour / 3600.0 * horizon;

    let mut events = Vec::new();
    let mut packet_id = 0;
    for (i, probs) in topology.interferer_band_probs.iter().enumerate() {
        let count = poisson_count(mean_bursts, rng);
        for _ in 0..count {
            let start = rng.random::<f64>() * horizon;
            let band = pick_band(probs, rng.random::<f64>());
            let (lo, hi) = band.edges(big_w);
            let phi = uniform_in(lo + wp / 2.0, hi - wp / 2.0, rng);
            if start + dur > horizon {
                continue;
            }
            events.push(TransmissionEvent {
                source_id: i,
                kind: SourceKind::Interferer,
                packet_id,
                rep_index: 0,
                start_time: start,
                duration: dur,
                carrier_freq: phi,
                band,
                bandwidth: wp,
            });
            packet_id += 1;
        }
    }
    Ok(TrafficTrace::sorted(events, horizon))
}

/// Inverse-CDF draw from a categorical distribution.
fn pick_band(probs: &[f64], u: f64) -> Band {
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (m, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = m;
        }
        acc += p;
        if u < acc && p > 0.0 {
            return Band::from_index(m);
        }
    }
    Band::from_index(last_positive)
}
