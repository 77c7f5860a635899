//! Shared domain types: geometry, bands, transmissions, topologies,
//! assignments and the decode statistics gathered during training.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// A location in the simulation plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        distance(self, other)
    }
}

/// Euclidean distance in meters.
pub fn distance(a: &Point2D, b: &Point2D) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// A multiplexing band. Stored zero-based; displayed one-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Band(usize);

impl Band {
    pub const fn from_index(index: usize) -> Self {
        Band(index)
    }

    /// Band from its one-based number. Returns `None` for 0.
    pub fn from_number(number: usize) -> Option<Self> {
        number.checked_sub(1).map(Band)
    }

    pub const fn index(self) -> usize {
        self.0
    }

    pub const fn number(self) -> usize {
        self.0 + 1
    }

    /// Lower and upper edge of the band in Hz.
    pub fn edges(self, band_width: f64) -> (f64, f64) {
        let lo = self.0 as f64 * band_width;
        (lo, lo + band_width)
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Maps a carrier frequency to the band containing it: `1 + floor(phi / W)`
/// clipped to `[1, M]`, so the top edge `phi = M * W` belongs to band `M`.
pub fn band_of_frequency(phi: f64, band_width: f64, num_bands: usize) -> Band {
    debug_assert!(
        phi >= 0.0 && phi <= num_bands as f64 * band_width,
        "carrier {phi} Hz outside [0, {}]",
        num_bands as f64 * band_width
    );
    let idx = (phi / band_width).floor();
    let idx = if idx < 0.0 { 0 } else { idx as usize };
    Band(idx.min(num_bands.saturating_sub(1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceKind {
    Unb,
    Interferer,
}

/// One transmission: a single repetition of a UNB packet, or one interferer burst.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionEvent {
    /// Index of the device within its kind (IoT device or interferer).
    pub source_id: usize,
    pub kind: SourceKind,
    pub packet_id: usize,
    /// One-based repetition number for UNB events, 0 for interferers.
    pub rep_index: u32,
    pub start_time: f64,
    pub duration: f64,
    pub carrier_freq: f64,
    pub band: Band,
    pub bandwidth: f64,
}

impl TransmissionEvent {
    pub fn end_time(&self) -> f64 {
        self.start_time + self.duration
    }

    /// Closed frequency support `[phi - bw/2, phi + bw/2]`.
    pub fn freq_support(&self) -> (f64, f64) {
        let half = 0.5 * self.bandwidth;
        (self.carrier_freq - half, self.carrier_freq + half)
    }

    pub fn is_unb(&self) -> bool {
        self.kind == SourceKind::Unb
    }
}

/// Node locations for one Monte Carlo realization.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Topology {
    pub bs_locations: Vec<Point2D>,
    pub iot_locations: Vec<Point2D>,
    pub interferer_locations: Vec<Point2D>,
    /// Per-interferer probability of operating in each band.
    pub interferer_band_probs: Vec<Vec<f64>>,
}

impl Topology {
    pub fn num_bs(&self) -> usize {
        self.bs_locations.len()
    }

    /// IoT devices followed by interferers.
    pub fn num_sources(&self) -> usize {
        self.iot_locations.len() + self.interferer_locations.len()
    }

    /// Column index of a transmission source in the channel matrices.
    pub fn source_index(&self, kind: SourceKind, source_id: usize) -> usize {
        match kind {
            SourceKind::Unb => source_id,
            SourceKind::Interferer => self.iot_locations.len() + source_id,
        }
    }

    pub fn source_locations(&self) -> Vec<Point2D> {
        self.iot_locations
            .iter()
            .chain(self.interferer_locations.iter())
            .copied()
            .collect()
    }
}

/// Checks that a raw `B x M` matrix is binary with exactly one 1 per row.
pub fn validate_assignment(x: &[Vec<u8>], num_bs: usize, num_bands: usize) -> Result<()> {
    if x.len() != num_bs {
        return Err(Error::InvalidArgument(format!(
            "assignment has {} rows, expected {num_bs}",
            x.len()
        )));
    }
    for (row, values) in x.iter().enumerate() {
        if values.len() != num_bands {
            return Err(Error::Assignment {
                row,
                reason: format!("{} columns, expected {num_bands}", values.len()),
            });
        }
        if let Some(v) = values.iter().find(|&&v| v > 1) {
            return Err(Error::Assignment {
                row,
                reason: format!("entry {v} is not binary"),
            });
        }
        let ones = values.iter().filter(|&&v| v == 1).count();
        if ones != 1 {
            return Err(Error::Assignment {
                row,
                reason: format!("row sums to {ones}"),
            });
        }
    }
    Ok(())
}

/// A one-hot BS-to-band assignment, stored as its row-band vector.
///
/// Ordering is lexicographic on the row-band vector, which is the tie-break
/// rule used by every solver.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    bands: Vec<Band>,
    num_bands: usize,
}

impl Assignment {
    pub fn from_bands(bands: Vec<Band>, num_bands: usize) -> Result<Self> {
        if num_bands == 0 {
            return Err(Error::InvalidArgument("assignment needs at least one band".into()));
        }
        if let Some((row, b)) = bands.iter().enumerate().find(|(_, b)| b.index() >= num_bands) {
            return Err(Error::Assignment {
                row,
                reason: format!("band {b} outside 1..={num_bands}"),
            });
        }
        Ok(Self { bands, num_bands })
    }

    pub fn from_matrix(x: &[Vec<u8>], num_bands: usize) -> Result<Self> {
        validate_assignment(x, x.len(), num_bands)?;
        let bands = x
            .iter()
            .map(|row| Band(row.iter().position(|&v| v == 1).unwrap_or_default()))
            .collect();
        Ok(Self { bands, num_bands })
    }

    /// Every BS on the same band.
    pub fn uniform(num_bs: usize, band: Band, num_bands: usize) -> Result<Self> {
        Self::from_bands(vec![band; num_bs], num_bands)
    }

    pub fn num_bs(&self) -> usize {
        self.bands.len()
    }

    pub fn num_bands(&self) -> usize {
        self.num_bands
    }

    pub fn band(&self, bs: usize) -> Band {
        self.bands[bs]
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    /// Entry `X[b][m]`.
    pub fn x(&self, bs: usize, band: Band) -> bool {
        self.bands[bs] == band
    }

    pub fn matrix(&self) -> Vec<Vec<u8>> {
        self.bands
            .iter()
            .map(|b| (0..self.num_bands).map(|m| u8::from(b.index() == m)).collect())
            .collect()
    }

    /// Bit mask of BSs listening to each band.
    pub fn listener_masks(&self) -> Vec<u64> {
        let mut masks = vec![0u64; self.num_bands];
        for (bs, band) in self.bands.iter().enumerate() {
            masks[band.index()] |= 1 << bs;
        }
        masks
    }

    /// Hyphen-joined one-based band numbers, e.g. `1-3-2`.
    pub fn render(&self) -> String {
        self.bands
            .iter()
            .map(|b| b.number().to_string())
            .collect::<Vec<_>>()
            .join("-")
    }

    pub fn parse(text: &str, num_bands: usize) -> Result<Self> {
        let bands = text
            .trim()
            .split('-')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .ok()
                    .and_then(Band::from_number)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad band number {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bands(bands, num_bands)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Estimated single-BS decode rates `S[b][m]` and pairwise joint decode
/// rates `R[b][k][m]`, with the number of samples behind each cell.
///
/// Cells with a zero count are unmeasured and hold 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeStats {
    num_bs: usize,
    num_bands: usize,
    s: Vec<f64>,
    s_count: Vec<u64>,
    r: Vec<f64>,
    r_count: Vec<u64>,
}

impl DecodeStats {
    pub fn zeros(num_bs: usize, num_bands: usize) -> Self {
        Self {
            num_bs,
            num_bands,
            s: vec![0.0; num_bs * num_bands],
            s_count: vec![0; num_bs * num_bands],
            r: vec![0.0; num_bs * num_bs * num_bands],
            r_count: vec![0; num_bs * num_bs * num_bands],
        }
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_bands(&self) -> usize {
        self.num_bands
    }

    fn s_idx(&self, b: usize, m: usize) -> usize {
        m * self.num_bs + b
    }

    fn r_idx(&self, b: usize, k: usize, m: usize) -> usize {
        (m * self.num_bs + b) * self.num_bs + k
    }

    pub fn s(&self, b: usize, m: usize) -> f64 {
        self.s[self.s_idx(b, m)]
    }

    pub fn s_count(&self, b: usize, m: usize) -> u64 {
        self.s_count[self.s_idx(b, m)]
    }

    pub fn r(&self, b: usize, k: usize, m: usize) -> f64 {
        self.r[self.r_idx(b, k, m)]
    }

    pub fn r_count(&self, b: usize, k: usize, m: usize) -> u64 {
        self.r_count[self.r_idx(b, k, m)]
    }

    pub fn set_s(&mut self, b: usize, m: usize, value: f64, count: u64) {
        let i = self.s_idx(b, m);
        self.s[i] = value;
        self.s_count[i] = count;
    }

    /// Sets `R[b][k][m]` and its mirror `R[k][b][m]`.
    pub fn set_r(&mut self, b: usize, k: usize, m: usize, value: f64, count: u64) {
        let i = self.r_idx(b, k, m);
        let j = self.r_idx(k, b, m);
        self.r[i] = value;
        self.r[j] = value;
        self.r_count[i] = count;
        self.r_count[j] = count;
    }

    /// Number of S cells and upper-triangle R cells without samples.
    pub fn flagged_cells(&self) -> usize {
        let s = self.s_count.iter().filter(|&&c| c == 0).count();
        let mut r = 0;
        for m in 0..self.num_bands {
            for b in 0..self.num_bs {
                for k in b + 1..self.num_bs {
                    if self.r_count(b, k, m) == 0 {
                        r += 1;
                    }
                }
            }
        }
        s + r
    }

    /// Per-band Gram matrix: diagonal `S[b][m]`, off-diagonal `R[b][k][m]`.
    pub fn gram_matrix(&self, m: usize) -> Vec<Vec<f64>> {
        (0..self.num_bs)
            .map(|b| {
                (0..self.num_bs)
                    .map(|k| if b == k { self.s(b, m) } else { self.r(b, k, m) })
                    .collect()
            })
            .collect()
    }

    /// Writes the flat `b,k,m,value,count` table (one-based indices).
    /// Rows with `b == k` carry `S[b][m]`; rows with `b < k` carry `R[b][k][m]`.
    pub fn write_table<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "b,k,m,value,count")?;
        for m in 0..self.num_bands {
            for b in 0..self.num_bs {
                writeln!(out, "{},{},{},{},{}", b + 1, b + 1, m + 1, self.s(b, m), self.s_count(b, m))?;
                for k in b + 1..self.num_bs {
                    writeln!(
                        out,
                        "{},{},{},{},{}",
                        b + 1,
                        k + 1,
                        m + 1,
                        self.r(b, k, m),
                        self.r_count(b, k, m)
                    )?;
                }
            }
        }
        Ok(())
    }

    /// Reads a table written by [`DecodeStats::write_table`]. Dimensions are
    /// inferred from the largest indices; diagonal R entries are set to S.
    pub fn read_table<R: BufRead>(input: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with('b')) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse_err = |message: String| Error::Parse { line: lineno + 1, message };
            if fields.len() != 5 {
                return Err(parse_err(format!("expected 5 fields, found {}", fields.len())));
            }
            let idx = |s: &str| -> Result<usize> {
                match s.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(parse_err(format!("bad index {s:?}"))),
                }
            };
            let b = idx(fields[0])?;
            let k = idx(fields[1])?;
            let m = idx(fields[2])?;
            let value: f64 = fields[3]
                .parse()
                .map_err(|_| parse_err(format!("bad value {:?}", fields[3])))?;
            let count: u64 = fields[4]
                .parse()
                .map_err(|_| parse_err(format!("bad count {:?}", fields[4])))?;
            if !(0.0..=1.0).contains(&value) {
                return Err(parse_err(format!("rate {value} outside [0, 1]")));
            }
            rows.push((b, k, m, value, count));
        }
        let num_bs = rows.iter().map(|r| r.0.max(r.1) + 1).max().unwrap_or(0);
        let num_bands = rows.iter().map(|r| r.2 + 1).max().unwrap_or(0);
        if num_bs == 0 || num_bands == 0 {
            return Err(Error::Parse { line: 0, message: "empty stats table".into() });
        }
        let mut stats = Self::zeros(num_bs, num_bands);
        for (b, k, m, value, count) in rows {
            if b == k {
                stats.set_s(b, m, value, count);
            }
            stats.set_r(b, k, m, value, count);
        }
        Ok(stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&Point2D::new(0.0, 0.0), &Point2D::new(0.0, 0.0)), 0.0);
        assert_eq!(distance(&Point2D::new(0.0, 0.0), &Point2D::new(3.0, 4.0)), 5.0);
        assert_eq!(distance(&Point2D::new(1.0, 1.0), &Point2D::new(4.0, 5.0)), 5.0);
    }

    #[test]
    fn band_of_frequency_examples() {
        assert_eq!(band_of_frequency(100e3, 200e3, 3).number(), 1);
        assert_eq!(band_of_frequency(200e3, 200e3, 3).number(), 2);
        assert_eq!(band_of_frequency(600e3, 200e3, 3).number(), 3);
        assert_eq!(band_of_frequency(0.0, 200e3, 3).number(), 1);
    }

    #[test]
    fn band_of_frequency_is_monotone_and_surjective() {
        let (w, m) = (200e3, 4);
        let mut last = 0;
        let mut seen = vec![false; m];
        for i in 0..=8000 {
            let phi = i as f64 * (m as f64 * w) / 8000.0;
            let band = band_of_frequency(phi, w, m).index();
            assert!(band >= last);
            last = band;
            seen[band] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn validate_assignment_examples() {
        assert!(validate_assignment(&[vec![1, 0], vec![0, 1]], 2, 2).is_ok());
        match validate_assignment(&[vec![1, 0], vec![0, 0]], 2, 2) {
            Err(Error::Assignment { row, .. }) => assert_eq!(row, 1),
            other => panic!("unexpected {other:?}"),
        }
        match validate_assignment(&[vec![1, 1], vec![0, 1]], 2, 2) {
            Err(Error::Assignment { row, .. }) => assert_eq!(row, 0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(validate_assignment(&[vec![2, 0]], 1, 2).is_err());
    }

    #[test]
    fn assignment_matrix_round_trip() {
        let a = Assignment::parse("1-3-2-2-1-3", 3).unwrap();
        assert_eq!(a.render(), "1-3-2-2-1-3");
        let back = Assignment::from_matrix(&a.matrix(), 3).unwrap();
        assert_eq!(a, back);
        assert_eq!(a.listener_masks(), vec![0b010001, 0b001100, 0b100010]);
        assert!(Assignment::parse("1-4", 3).is_err());
        assert!(Assignment::parse("0-1", 3).is_err());
    }

    #[test]
    fn stats_table_round_trip() {
        let mut stats = DecodeStats::zeros(3, 2);
        stats.set_s(0, 0, 0.5, 10);
        stats.set_s(2, 1, 0.25, 8);
        stats.set_r(0, 1, 0, 0.125, 10);
        stats.set_r(1, 2, 1, 0.0625, 0);
        for m in 0..2 {
            for b in 0..3 {
                let (v, c) = (stats.s(b, m), stats.s_count(b, m));
                stats.set_r(b, b, m, v, c);
            }
        }
        let mut buf = Vec::new();
        stats.write_table(&mut buf).unwrap();
        let back = DecodeStats::read_table(buf.as_slice()).unwrap();
        assert_eq!(back, stats);
        assert_eq!(back.r(1, 0, 0), 0.125);
    }

    #[test]
    fn stats_table_rejects_garbage() {
        assert!(DecodeStats::read_table("b,k,m,value,count\n1,1,1,2.0,3\n".as_bytes()).is_err());
        assert!(DecodeStats::read_table("b,k,m,value,count\n0,1,1,0.5,3\n".as_bytes()).is_err());
        assert!(DecodeStats::read_table("b,k,m,value,count\n1,1,1\n".as_bytes()).is_err());
    }
}
