//! Time-frequency collisions, aggregate interference, SINR and the
//! assignment-independent decode table.
//!
//! A [`DecodeTable`] records, for every UNB transmission and every BS,
//! whether the BS would decode it if it listened to the transmission's band.
//! Because listening does not change the SINR, one table answers every
//! assignment.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Normal};

use crate::channel::{received_power_dbm, sample_fading_db, ChannelRealization};
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::model::{Assignment, Band, DecodeStats, SourceKind, Topology, TransmissionEvent};
use crate::rng::{streams, substream};
use crate::traffic::TrafficTrace;

pub fn dbm_to_mw(dbm: f64) -> f64 {
    (dbm * (std::f64::consts::LN_10 / 10.0)).exp()
}

/// True iff the closed frequency supports and the closed time intervals of
/// the two transmissions both intersect.
pub fn time_freq_overlap(a: &TransmissionEvent, b: &TransmissionEvent) -> bool {
    let (a_lo, a_hi) = a.freq_support();
    let (b_lo, b_hi) = b.freq_support();
    a_lo <= b_hi && b_lo <= a_hi && a.start_time <= b.end_time() && b.start_time <= a.end_time()
}

/// Share of `other`'s power landing in `target`'s receive band, assuming a
/// flat spectrum across `other`'s bandwidth.
pub fn overlap_fraction(target: &TransmissionEvent, other: &TransmissionEvent) -> f64 {
    let (t_lo, t_hi) = target.freq_support();
    let (o_lo, o_hi) = other.freq_support();
    let width = (t_hi.min(o_hi) - t_lo.max(o_lo)).max(0.0);
    width / other.bandwidth
}

fn same_packet(a: &TransmissionEvent, b: &TransmissionEvent) -> bool {
    a.kind == b.kind && a.source_id == b.source_id && a.packet_id == b.packet_id
}

/// Interference at BS `bs` during `events[target]`, in mW: the overlap-
/// weighted power of every other overlapping transmission, excluding the
/// target's own repetitions. `powers_dbm` is indexed `[bs][event]`.
///
/// Linear scan over all events; [`compute_sinr_table`] does the same sum
/// with a time-window search.
pub fn interference_power_mw(
    target: usize,
    bs: usize,
    events: &[TransmissionEvent],
    powers_dbm: &[Vec<f64>],
) -> f64 {
    let t = &events[target];
    events
        .iter()
        .enumerate()
        .filter(|&(j, e)| j != target && !same_packet(t, e) && time_freq_overlap(t, e))
        .map(|(j, e)| dbm_to_mw(powers_dbm[bs][j]) * overlap_fraction(t, e))
        .sum()
}

/// SINR in dB with noise and interference added in linear power.
pub fn sinr_db(noise_dbm: f64, interference_mw: f64, signal_dbm: f64) -> f64 {
    signal_dbm - 10.0 * (dbm_to_mw(noise_dbm) + interference_mw).log10()
}

/// Received power of every transmission at every BS, plus per-transmission noise.
#[derive(Debug, Clone)]
pub struct ReceivedPowers {
    /// `[bs][event]`, dBm.
    pub dbm: Vec<Vec<f64>>,
    /// Per-event noise power, dBm.
    pub noise_dbm: Vec<f64>,
}

/// Draws fading per (transmission, BS) and composes received powers.
///
/// BS `b` draws its fading from its own substream, so results for the first
/// `k` BSs do not depend on how many BSs exist.
pub fn draw_received_powers<R: RngCore + ?Sized>(
    trace: &TrafficTrace,
    topology: &Topology,
    channel: &ChannelRealization,
    config: &SimConfig,
    rng: &mut R,
) -> Result<ReceivedPowers> {
    let fading_seed = rng.next_u64();
    let noise_seed = rng.next_u64();
    let num_bs = channel.num_bs();
    let dbm = (0..num_bs)
        .map(|b| {
            let mut frng = substream(fading_seed, streams::FADING_BASE + b as u64);
            trace
                .events
                .iter()
                .map(|e| {
                    let src = topology.source_index(e.kind, e.source_id);
                    let p_tx = match e.kind {
                        SourceKind::Unb => config.tx_power_iot,
                        SourceKind::Interferer => config.tx_power_interferer,
                    };
                    let fading = sample_fading_db(config.fading_scale, &mut frng);
                    received_power_dbm(p_tx, channel.pathloss_db[b][src], channel.shadowing_db[b][src], fading)
                })
                .collect()
        })
        .collect();
    let noise_dbm = if config.noise_jitter_db > 0.0 {
        let jitter = Normal::new(config.noise_power, config.noise_jitter_db)
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut nrng = substream(noise_seed, streams::NOISE);
        trace.events.iter().map(|_| jitter.sample(&mut nrng)).collect()
    } else {
        vec![config.noise_power; trace.len()]
    };
    Ok(ReceivedPowers { dbm, noise_dbm })
}

/// SINR of every UNB transmission at every BS, before thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrTable {
    num_bs: usize,
    num_bands: usize,
    event_band: Vec<Band>,
    event_packet: Vec<usize>,
    /// `[event * num_bs + bs]`, dB.
    sinr: Vec<f64>,
    packets: Vec<Vec<usize>>,
}

impl SinrTable {
    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_events(&self) -> usize {
        self.event_band.len()
    }

    pub fn sinr(&self, bs: usize, event: usize) -> f64 {
        self.sinr[event * self.num_bs + bs]
    }

    pub fn event_band(&self, event: usize) -> Band {
        self.event_band[event]
    }

    /// Decode masks at threshold `tau` dB, one per transmission.
    pub fn decode_masks(&self, tau: f64) -> impl Iterator<Item = u64> + '_ {
        self.sinr.chunks(self.num_bs.max(1)).take(self.event_band.len()).map(move |row| {
            row.iter().enumerate().filter(|(_, &g)| g >= tau).fold(0u64, |m, (b, _)| m | (1 << b))
        })
    }

    /// Thresholds at `tau` dB.
    pub fn decode_table(&self, tau: f64) -> DecodeTable {
        let masks = self.decode_masks(tau).collect();
        DecodeTable {
            num_bs: self.num_bs,
            num_bands: self.num_bands,
            masks,
            event_band: self.event_band.clone(),
            event_packet: self.event_packet.clone(),
            packets: self.packets.clone(),
        }
    }
}

/// Computes the SINR table for every UNB transmission in `trace`.
pub fn compute_sinr_table(trace: &TrafficTrace, powers: &ReceivedPowers, num_bands: usize) -> SinrTable {
    let events = &trace.events;
    let num_bs = powers.dbm.len();
    let n = events.len();
    // Event-major linear powers for contiguous access per interferer.
    let mut mw = vec![0.0; n * num_bs];
    for (b, row) in powers.dbm.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            mw[j * num_bs + b] = dbm_to_mw(p);
        }
    }
    let index = OverlapIndex::new(events);

    // Packet ids are dense within a trace.
    let max_packet = events.iter().filter(|e| e.is_unb()).map(|e| e.packet_id + 1).max().unwrap_or(0);
    let mut packet_index = vec![usize::MAX; max_packet];
    let mut packets: Vec<Vec<usize>> = Vec::new();
    let mut event_band = Vec::new();
    let mut event_packet = Vec::new();
    let mut sinr = Vec::new();
    let mut interference = vec![0.0; num_bs];

    for (i, target) in events.iter().enumerate() {
        if !target.is_unb() {
            continue;
        }
        interference.iter_mut().for_each(|v| *v = 0.0);
        index.for_each_overlap(i, target, |j, frac| {
            if !same_packet(target, &events[j]) {
                for (acc, p) in interference.iter_mut().zip(&mw[j * num_bs..(j + 1) * num_bs]) {
                    *acc += p * frac;
                }
            }
        });
        let noise = dbm_to_mw(powers.noise_dbm[i]);
        for b in 0..num_bs {
            sinr.push(powers.dbm[b][i] - 10.0 * (noise + interference[b]).log10());
        }
        let idx = event_band.len();
        let slot = &mut packet_index[target.packet_id];
        if *slot == usize::MAX {
            *slot = packets.len();
            packets.push(Vec::new());
        }
        let p = *slot;
        packets[p].push(idx);
        event_band.push(target.band);
        event_packet.push(p);
    }
    SinrTable { num_bs, num_bands, event_band, event_packet, sinr, packets }
}

/// Events grouped by bandwidth and then by frequency bin of that width, each
/// bin sorted by start time. An event in bin `k` of width `w` starts its
/// support in `[k w, (k + 1) w)`, so only a few bins can touch a target.
struct OverlapIndex {
    groups: Vec<BinGroup>,
}

struct BinGroup {
    width: f64,
    first_key: i64,
    bins: Vec<Bin>,
}

/// Scanned fields stored contiguously per bin.
#[derive(Default)]
struct Bin {
    starts: Vec<f64>,
    ends: Vec<f64>,
    f_lo: Vec<f64>,
    f_hi: Vec<f64>,
    events: Vec<usize>,
    max_duration: f64,
}

impl OverlapIndex {
    fn new(events: &[TransmissionEvent]) -> Self {
        let mut widths: Vec<f64> = Vec::new();
        for e in events {
            if !widths.contains(&e.bandwidth) {
                widths.push(e.bandwidth);
            }
        }
        widths.sort_by(f64::total_cmp);
        let key = |e: &TransmissionEvent, w: f64| (e.freq_support().0 / w).floor() as i64;
        let groups = widths
            .into_iter()
            .map(|width| {
                let members = || events.iter().enumerate().filter(move |(_, e)| e.bandwidth == width);
                let first_key = members().map(|(_, e)| key(e, width)).min().unwrap_or(0);
                let last_key = members().map(|(_, e)| key(e, width)).max().unwrap_or(0);
                let mut bins: Vec<Bin> = (first_key..=last_key).map(|_| Bin::default()).collect();
                for (j, e) in members() {
                    let bin = &mut bins[(key(e, width) - first_key) as usize];
                    let (lo, hi) = e.freq_support();
                    bin.starts.push(e.start_time);
                    bin.ends.push(e.end_time());
                    bin.f_lo.push(lo);
                    bin.f_hi.push(hi);
                    bin.events.push(j);
                    bin.max_duration = bin.max_duration.max(e.duration);
                }
                BinGroup { width, first_key, bins }
            })
            .collect();
        OverlapIndex { groups }
    }

    /// Calls `f(j, overlap_fraction)` for every event `j != i` overlapping
    /// `target = events[i]` with a positive spectral share.
    fn for_each_overlap(&self, i: usize, target: &TransmissionEvent, mut f: impl FnMut(usize, f64)) {
        let (t0, t1) = (target.start_time, target.end_time());
        let (lo_f, hi_f) = target.freq_support();
        for group in &self.groups {
            let first = (((lo_f - group.width) / group.width).floor() as i64 - group.first_key).max(0);
            let last = ((hi_f / group.width).floor() as i64 - group.first_key).min(group.bins.len() as i64 - 1);
            for bin in group.bins.iter().take((last + 1).max(0) as usize).skip(first as usize) {
                let lo = bin.starts.partition_point(|&s| s < t0 - bin.max_duration);
                let hi = bin.starts.partition_point(|&s| s <= t1);
                for q in lo..hi {
                    if bin.ends[q] < t0 || bin.f_lo[q] >= hi_f || bin.f_hi[q] <= lo_f || bin.events[q] == i {
                        continue;
                    }
                    f(bin.events[q], (hi_f.min(bin.f_hi[q]) - lo_f.max(bin.f_lo[q])) / group.width);
                }
            }
        }
    }
}

/// Draws received powers, computes SINRs and thresholds at the configured `tau`.
pub fn build_decode_table<R: RngCore + ?Sized>(
    trace: &TrafficTrace,
    topology: &Topology,
    channel: &ChannelRealization,
    config: &SimConfig,
    rng: &mut R,
) -> Result<DecodeTable> {
    let powers = draw_received_powers(trace, topology, channel, config, rng)?;
    Ok(compute_sinr_table(trace, &powers, config.num_bands).decode_table(config.sinr_threshold))
}

/// Fraction of packets and of transmissions decoded under an assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub pdp: f64,
    pub transmission_rate: f64,
}

/// Per-(BS, transmission) decode indicators for UNB transmissions.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeTable {
    num_bs: usize,
    num_bands: usize,
    /// Bit `b` of `masks[n]` is `d[b][n]`.
    masks: Vec<u64>,
    event_band: Vec<Band>,
    event_packet: Vec<usize>,
    packets: Vec<Vec<usize>>,
}

impl DecodeTable {
    /// Builds a table from raw parts. Packet ids are renumbered densely in
    /// order of first appearance.
    pub fn from_parts(
        num_bs: usize,
        num_bands: usize,
        rows: impl IntoIterator<Item = (usize, Band, u64)>,
    ) -> Result<Self> {
        if num_bs > 64 {
            return Err(Error::InvalidArgument(format!("at most 64 BSs supported, got {num_bs}")));
        }
        let mut table = DecodeTable {
            num_bs,
            num_bands,
            masks: Vec::new(),
            event_band: Vec::new(),
            event_packet: Vec::new(),
            packets: Vec::new(),
        };
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let valid_bits = if num_bs == 64 { u64::MAX } else { (1u64 << num_bs) - 1 };
        for (packet, band, mask) in rows {
            if band.index() >= num_bands {
                return Err(Error::InvalidArgument(format!("band {band} outside 1..={num_bands}")));
            }
            if mask & !valid_bits != 0 {
                return Err(Error::InvalidArgument(format!("decode mask {mask:#x} has bits beyond {num_bs} BSs")));
            }
            let n = table.masks.len();
            let p = *ids.entry(packet).or_insert_with(|| {
                table.packets.push(Vec::new());
                table.packets.len() - 1
            });
            table.packets[p].push(n);
            table.masks.push(mask);
            table.event_band.push(band);
            table.event_packet.push(p);
        }
        Ok(table)
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_bands(&self) -> usize {
        self.num_bands
    }

    pub fn num_events(&self) -> usize {
        self.masks.len()
    }

    pub fn num_packets(&self) -> usize {
        self.packets.len()
    }

    pub fn d(&self, bs: usize, event: usize) -> bool {
        self.masks[event] >> bs & 1 == 1
    }

    pub fn mask(&self, event: usize) -> u64 {
        self.masks[event]
    }

    pub fn event_band(&self, event: usize) -> Band {
        self.event_band[event]
    }

    pub fn event_packet(&self, event: usize) -> usize {
        self.event_packet[event]
    }

    pub fn packet_events(&self, packet: usize) -> Option<&[usize]> {
        self.packets.get(packet).map(Vec::as_slice)
    }

    fn check_assignment(&self, x: &Assignment) -> Result<()> {
        if x.num_bs() != self.num_bs || x.num_bands() != self.num_bands {
            return Err(Error::InvalidArgument(format!(
                "assignment is {}x{}, table is {}x{}",
                x.num_bs(),
                x.num_bands(),
                self.num_bs,
                self.num_bands
            )));
        }
        Ok(())
    }

    fn event_decoded(&self, listeners: &[u64], n: usize) -> bool {
        self.masks[n] & listeners[self.event_band[n].index()] != 0
    }

    /// Number of transmissions on each band.
    pub fn band_counts(&self) -> Vec<u64> {
        let mut counts = vec![0; self.num_bands];
        for band in &self.event_band {
            counts[band.index()] += 1;
        }
        counts
    }

    /// Empirical `S` and `R` from this table: per band, the mean of `d[b]`
    /// and of `d[b] d[k]` over the band's transmissions.
    pub fn empirical_stats(&self) -> DecodeStats {
        cotuned_stats(
            self.masks.iter().zip(&self.event_band).map(|(&mask, band)| (band.index(), mask)),
            self.num_bs,
            self.num_bands,
        )
    }

    /// Collapses the table into counts of distinct decode patterns for fast
    /// evaluation of many assignments.
    pub fn profile(&self) -> DecodeProfile {
        let mut events: HashMap<(usize, u64), u64> = HashMap::new();
        for (mask, band) in self.masks.iter().zip(&self.event_band) {
            *events.entry((band.index(), *mask)).or_default() += 1;
        }
        let mut packets: HashMap<Vec<(usize, u64)>, u64> = HashMap::new();
        for evs in &self.packets {
            let mut key: Vec<(usize, u64)> = evs
                .iter()
                .map(|&n| (self.event_band[n].index(), self.masks[n]))
                .filter(|&(_, mask)| mask != 0)
                .collect();
            key.sort_unstable();
            *packets.entry(key).or_default() += 1;
        }
        let mut events: Vec<_> = events.into_iter().filter(|((_, mask), _)| *mask != 0).collect();
        events.sort_unstable();
        let mut packets: Vec<_> = packets.into_iter().filter(|(k, _)| !k.is_empty()).collect();
        packets.sort_unstable();
        DecodeProfile {
            num_bs: self.num_bs,
            num_bands: self.num_bands,
            total_events: self.num_events() as u64,
            total_packets: self.num_packets() as u64,
            events,
            packets,
        }
    }

    /// Writes `event_id,packet_id,band,d1..dB` rows with one-based bands.
    pub fn write_columnar<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "event_id,packet_id,band")?;
        for b in 1..=self.num_bs {
            write!(out, ",d{b}")?;
        }
        writeln!(out)?;
        for n in 0..self.num_events() {
            write!(out, "{},{},{}", n, self.event_packet[n], self.event_band[n].number())?;
            for b in 0..self.num_bs {
                write!(out, ",{}", u8::from(self.d(b, n)))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Reads a table written by [`DecodeTable::write_columnar`].
    pub fn read_columnar<R: BufRead>(input: R, num_bands: usize) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines.next().ok_or(Error::Parse { line: 1, message: "missing header".into() })??;
        let num_bs = header.split(',').count().saturating_sub(3);
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: i + 2, message };
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != num_bs + 3 {
                return Err(err(format!("expected {} fields, found {}", num_bs + 3, f.len())));
            }
            let packet: usize = f[1].parse().map_err(|_| err(format!("bad packet id {:?}", f[1])))?;
            let band = f[2]
                .parse::<usize>()
                .ok()
                .and_then(Band::from_number)
                .ok_or_else(|| err(format!("bad band {:?}", f[2])))?;
            let mut mask = 0u64;
            for (b, bit) in f[3..].iter().enumerate() {
                match *bit {
                    "0" => {}
                    "1" => mask |= 1 << b,
                    other => return Err(err(format!("bad decode bit {other:?}"))),
                }
            }
            rows.push((packet, band, mask));
        }
        Self::from_parts(num_bs, num_bands, rows)
    }
}

/// `S` and `R` from `(band, mask)` rows where every BS listened to the
/// row's band.
pub fn cotuned_stats(rows: impl IntoIterator<Item = (usize, u64)>, num_bs: usize, num_bands: usize) -> DecodeStats {
    let (b_n, m_n) = (num_bs, num_bands);
    let mut counts = vec![0u64; m_n];
    let mut single = vec![0u64; b_n * m_n];
    let mut joint = vec![0u64; b_n * b_n * m_n];
    for (m, mask) in rows {
        counts[m] += 1;
        let mut rest = mask;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            single[m * b_n + b] += 1;
            let mut higher = rest;
            while higher != 0 {
                let k = higher.trailing_zeros() as usize;
                higher &= higher - 1;
                joint[(m * b_n + b) * b_n + k] += 1;
            }
        }
    }
    let mut stats = DecodeStats::zeros(b_n, m_n);
    for m in 0..m_n {
        let c = counts[m];
        let rate = |x: u64| if c == 0 { 0.0 } else { x as f64 / c as f64 };
        for b in 0..b_n {
            let s = rate(single[m * b_n + b]);
            stats.set_s(b, m, s, c);
            stats.set_r(b, b, m, s, c);
            for k in b + 1..b_n {
                stats.set_r(b, k, m, rate(joint[(m * b_n + b) * b_n + k]), c);
            }
        }
    }
    stats
}

/// True iff some repetition of the packet is decoded by some BS listening to
/// that repetition's band.
pub fn packet_decoded(x: &Assignment, packet_id: usize, table: &DecodeTable) -> Result<bool> {
    table.check_assignment(x)?;
    let events = table.packet_events(packet_id).ok_or(Error::UnknownPacket(packet_id))?;
    let listeners = x.listener_masks();
    Ok(events.iter().any(|&n| table.event_decoded(&listeners, n)))
}

/// Packet decoding probability and transmission decoding rate of `x`.
pub fn metrics(x: &Assignment, table: &DecodeTable) -> Result<Metrics> {
    table.check_assignment(x)?;
    if table.num_events() == 0 {
        return Err(Error::EmptyTable);
    }
    let listeners = x.listener_masks();
    let decoded_events = (0..table.num_events()).filter(|&n| table.event_decoded(&listeners, n)).count();
    let decoded_packets = table
        .packets
        .iter()
        .filter(|evs| evs.iter().any(|&n| table.event_decoded(&listeners, n)))
        .count();
    Ok(Metrics {
        pdp: decoded_packets as f64 / table.num_packets() as f64,
        transmission_rate: decoded_events as f64 / table.num_events() as f64,
    })
}

/// Distinct decode patterns with multiplicities. Transmissions and packets
/// nobody can decode are counted in the totals only.
#[derive(Debug, Clone)]
pub struct DecodeProfile {
    num_bs: usize,
    num_bands: usize,
    total_events: u64,
    total_packets: u64,
    events: Vec<((usize, u64), u64)>,
    packets: Vec<(Vec<(usize, u64)>, u64)>,
}

impl DecodeProfile {
    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_bands(&self) -> usize {
        self.num_bands
    }

    pub fn total_events(&self) -> u64 {
        self.total_events
    }

    pub fn total_packets(&self) -> u64 {
        self.total_packets
    }

    pub fn decoded_events(&self, listeners: &[u64]) -> u64 {
        self.events
            .iter()
            .filter(|((band, mask), _)| mask & listeners[*band] != 0)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn decoded_packets(&self, listeners: &[u64]) -> u64 {
        self.packets
            .iter()
            .filter(|(reps, _)| reps.iter().any(|(band, mask)| mask & listeners[*band] != 0))
            .map(|(_, c)| c)
            .sum()
    }

    /// Same values as [`metrics`] on the originating table.
    pub fn metrics(&self, x: &Assignment) -> Result<Metrics> {
        if self.total_events == 0 {
            return Err(Error::EmptyTable);
        }
        let listeners = x.listener_masks();
        Ok(Metrics {
            pdp: self.decoded_packets(&listeners) as f64 / self.total_packets as f64,
            transmission_rate: self.decoded_events(&listeners) as f64 / self.total_events as f64,
        })
    }
}

/// Random `B x n` decode table with `R` repetitions per packet, for tests
/// and solver experiments.
pub fn random_decode_table<R: Rng + ?Sized>(
    num_bs: usize,
    num_bands: usize,
    num_packets: usize,
    reps: usize,
    decode_prob: f64,
    rng: &mut R,
) -> DecodeTable {
    let rows: Vec<(usize, Band, u64)> = (0..num_packets)
        .flat_map(|p| (0..reps).map(move |_| p))
        .map(|p| {
            let band = Band::from_index(rng.random_range(0..num_bands));
            let mask = (0..num_bs).filter(|_| rng.random::<f64>() < decode_prob).fold(0u64, |m, b| m | 1 << b);
            (p, band, mask)
        })
        .collect();
    DecodeTable::from_parts(num_bs, num_bands, rows).expect("valid random table")
}
