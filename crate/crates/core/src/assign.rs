//! Quadratic objectives over one-hot BS-to-band assignments and their
//! solvers.
//!
//! An objective assigns each assignment `x` (BS `b` listens to band `x_b`)
//! the value
//!
//! ```text
//! sum_b linear[b][x_b] + sum_{b<k, x_b = x_k} quadratic[x_b][b][k]
//! ```
//!
//! The decode-rate objective keeps `S` as linear term and `-R` as quadratic
//! term and is maximized. The location objective has no linear term,
//! penalizes co-banded BSs by inverse distance, and is minimized.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Assignment, Band, DecodeStats, Point2D};
use crate::phy::{DecodeProfile, DecodeTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// True iff `candidate` is strictly better than `incumbent`.
    pub fn better(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            Sense::Maximize => candidate > incumbent,
            Sense::Minimize => candidate < incumbent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticAssignmentObjective {
    num_bs: usize,
    num_bands: usize,
    /// `[b * M + m]`
    linear: Vec<f64>,
    /// `[(m * B + b) * B + k]`, symmetric in `b, k`, zero diagonal.
    quadratic: Vec<f64>,
    sense: Sense,
}

impl QuadraticAssignmentObjective {
    /// `linear` is `B x M`; `quadratic` is `M x B x B`.
    pub fn new(linear: &[Vec<f64>], quadratic: &[Vec<Vec<f64>>], sense: Sense) -> Result<Self> {
        let num_bs = linear.len();
        let num_bands = quadratic.len();
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if num_bands == 0 {
            return bad("objective needs at least one band".into());
        }
        if linear.iter().any(|row| row.len() != num_bands) {
            return bad(format!("linear term must be {num_bs}x{num_bands}"));
        }
        let mut lin = Vec::with_capacity(num_bs * num_bands);
        for row in linear {
            lin.extend_from_slice(row);
        }
        let mut quad = Vec::with_capacity(num_bands * num_bs * num_bs);
        for (m, mat) in quadratic.iter().enumerate() {
            if mat.len() != num_bs || mat.iter().any(|row| row.len() != num_bs) {
                return bad(format!("quadratic term of band {} must be {num_bs}x{num_bs}", m + 1));
            }
            for b in 0..num_bs {
                if mat[b][b] != 0.0 {
                    return bad(format!("quadratic term of band {} has a nonzero diagonal", m + 1));
                }
                for k in 0..num_bs {
                    if mat[b][k] != mat[k][b] {
                        return bad(format!("quadratic term of band {} is not symmetric", m + 1));
                    }
                }
                quad.extend_from_slice(&mat[b]);
            }
        }
        if lin.iter().chain(&quad).any(|v| !v.is_finite()) {
            return bad("objective coefficients must be finite".into());
        }
        Ok(Self { num_bs, num_bands, linear: lin, quadratic: quad, sense })
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_bands(&self) -> usize {
        self.num_bands
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn linear(&self, b: usize, m: usize) -> f64 {
        self.linear[b * self.num_bands + m]
    }

    pub fn quadratic(&self, m: usize, b: usize, k: usize) -> f64 {
        self.quadratic[(m * self.num_bs + b) * self.num_bs + k]
    }

    /// Value for band indices `bands[b]`.
    pub fn value_of(&self, bands: &[usize]) -> f64 {
        let mut v = 0.0;
        for (b, &m) in bands.iter().enumerate() {
            v += self.linear(b, m);
            for (k, &mk) in bands.iter().enumerate().skip(b + 1) {
                if mk == m {
                    v += self.quadratic(m, b, k);
                }
            }
        }
        v
    }

    pub fn value(&self, x: &Assignment) -> Result<f64> {
        if x.num_bs() != self.num_bs || x.num_bands() != self.num_bands {
            return Err(Error::InvalidArgument(format!(
                "assignment is {}x{}, objective is {}x{}",
                x.num_bs(),
                x.num_bands(),
                self.num_bs,
                self.num_bands
            )));
        }
        Ok(self.value_of(&indices(x)))
    }
}

fn indices(x: &Assignment) -> Vec<usize> {
    x.bands().iter().map(|b| b.index()).collect()
}

fn to_assignment(bands: &[usize], num_bands: usize) -> Assignment {
    Assignment::from_bands(bands.iter().map(|&m| Band::from_index(m)).collect(), num_bands)
        .expect("band indices are in range")
}

/// Maximize `sum S x - sum_{b<k} R x x`, with flagged cells entering as 0.
pub fn build_p3_objective(stats: &DecodeStats) -> QuadraticAssignmentObjective {
    let (b_n, m_n) = (stats.num_bs(), stats.num_bands());
    let linear: Vec<Vec<f64>> = (0..b_n).map(|b| (0..m_n).map(|m| stats.s(b, m)).collect()).collect();
    let quadratic: Vec<Vec<Vec<f64>>> = (0..m_n)
        .map(|m| {
            (0..b_n)
                .map(|b| (0..b_n).map(|k| if b == k { 0.0 } else { -stats.r(b, k, m) }).collect())
                .collect()
        })
        .collect();
    QuadraticAssignmentObjective::new(&linear, &quadratic, Sense::Maximize).expect("stats are finite and symmetric")
}

/// Minimize `sum_{b<k} ||p_b - p_k||^-eta x x`, identical across bands.
/// Distances below 1 m are clamped to 1 m.
pub fn build_p4_objective(bs_locations: &[Point2D], eta: f64, num_bands: usize) -> Result<QuadraticAssignmentObjective> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidArgument(format!("eta must be positive and finite, got {eta}")));
    }
    let b_n = bs_locations.len();
    let c: Vec<Vec<f64>> = (0..b_n)
        .map(|b| {
            (0..b_n)
                .map(|k| {
                    if b == k {
                        0.0
                    } else {
                        bs_locations[b].distance(&bs_locations[k]).max(crate::channel::MIN_DISTANCE_M).powf(-eta)
                    }
                })
                .collect()
        })
        .collect();
    let linear = vec![vec![0.0; num_bands]; b_n];
    QuadraticAssignmentObjective::new(&linear, &vec![c; num_bands], Sense::Minimize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub assignment: Assignment,
    pub value: f64,
    /// Assignments evaluated.
    pub visited: u64,
}

/// Exhaustive search over all `M^B` assignments in lexicographic order with
/// BS 1 most significant; only strict improvements replace the incumbent, so
/// ties go to the lexicographically smallest assignment.
pub fn enumerate_best<F>(num_bs: usize, num_bands: usize, sense: Sense, cap: u64, mut value: F) -> Result<Solution>
where
    F: FnMut(&[usize]) -> f64,
{
    let size = (num_bands as u128).checked_pow(num_bs as u32).unwrap_or(u128::MAX);
    if num_bands == 0 || size > cap as u128 {
        return Err(Error::EnumerationCap { size, cap });
    }
    let mut bands = vec![0usize; num_bs];
    let mut best = bands.clone();
    let mut best_value = value(&bands);
    let mut visited = 1u64;
    loop {
        let mut pos = num_bs;
        loop {
            if pos == 0 {
                return Ok(Solution { assignment: to_assignment(&best, num_bands), value: best_value, visited });
            }
            pos -= 1;
            bands[pos] += 1;
            if bands[pos] < num_bands {
                break;
            }
            bands[pos] = 0;
        }
        let v = value(&bands);
        visited += 1;
        if sense.better(v, best_value) {
            best_value = v;
            best.copy_from_slice(&bands);
        }
    }
}

/// Exact optimum of `obj` by enumeration, refusing above `cap` assignments.
pub fn solve_enumeration(obj: &QuadraticAssignmentObjective, cap: u64) -> Result<Solution> {
    enumerate_best(obj.num_bs, obj.num_bands, obj.sense, cap, |bands| obj.value_of(bands))
}

/// Best local optimum over `restarts` random starts. Each descent moves one
/// BS at a time to its best band until a full pass changes nothing.
pub fn solve_local_search<R: Rng + ?Sized>(
    obj: &QuadraticAssignmentObjective,
    restarts: usize,
    rng: &mut R,
) -> Result<Solution> {
    if restarts == 0 {
        return Err(Error::InvalidArgument("local search needs at least one restart".into()));
    }
    let (b_n, m_n) = (obj.num_bs, obj.num_bands);
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut visited = 0u64;
    for _ in 0..restarts {
        let mut bands: Vec<usize> = (0..b_n).map(|_| rng.random_range(0..m_n)).collect();
        let mut current = obj.value_of(&bands);
        visited += 1;
        let mut improved = true;
        while improved {
            improved = false;
            for b in 0..b_n {
                let keep = bands[b];
                let mut choice = keep;
                for m in 0..m_n {
                    if m == keep {
                        continue;
                    }
                    bands[b] = m;
                    let v = obj.value_of(&bands);
                    visited += 1;
                    if obj.sense.better(v, current) {
                        current = v;
                        choice = m;
                    }
                }
                bands[b] = choice;
                improved |= choice != keep;
            }
        }
        let replace = match &best {
            None => true,
            Some((bb, bv)) => obj.sense.better(current, *bv) || (current == *bv && bands < *bb),
        };
        if replace {
            best = Some((bands, current));
        }
    }
    let (bands, value) = best.expect("at least one restart");
    Ok(Solution { assignment: to_assignment(&bands, m_n), value, visited })
}

/// Enumeration when the space fits under `cap`, otherwise local search.
pub fn solve<R: Rng + ?Sized>(
    obj: &QuadraticAssignmentObjective,
    cap: u64,
    restarts: usize,
    rng: &mut R,
) -> Result<Solution> {
    match solve_enumeration(obj, cap) {
        Err(Error::EnumerationCap { .. }) => solve_local_search(obj, restarts, rng),
        other => other,
    }
}

/// Each BS on an independent uniform band.
pub fn random_assignment<R: Rng + ?Sized>(num_bs: usize, num_bands: usize, rng: &mut R) -> Assignment {
    let bands: Vec<usize> = (0..num_bs).map(|_| rng.random_range(0..num_bands)).collect();
    to_assignment(&bands, num_bands)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMetric {
    Packet,
    Transmission,
}

fn listener_masks(bands: &[usize], masks: &mut [u64]) {
    masks.iter_mut().for_each(|m| *m = 0);
    for (b, &m) in bands.iter().enumerate() {
        masks[m] |= 1 << b;
    }
}

/// Assignment maximizing the chosen decode rate on a fixed table, with the
/// achieved rate as value.
pub fn oracle_best_assignment(table: &DecodeTable, metric: OracleMetric, cap: u64) -> Result<Solution> {
    oracle_best_from_profile(&table.profile(), metric, cap)
}

/// As [`oracle_best_assignment`], reusing a precomputed profile.
pub fn oracle_best_from_profile(profile: &DecodeProfile, metric: OracleMetric, cap: u64) -> Result<Solution> {
    let mut masks = vec![0u64; profile.num_bands()];
    let (total_packets, total_events) = (profile.total_packets().max(1), profile.total_events().max(1));
    enumerate_best(profile.num_bs(), profile.num_bands(), Sense::Maximize, cap, |bands| {
        listener_masks(bands, &mut masks);
        match metric {
            OracleMetric::Packet => profile.decoded_packets(&masks) as f64 / total_packets as f64,
            OracleMetric::Transmission => profile.decoded_events(&masks) as f64 / total_events as f64,
        }
    })
}
