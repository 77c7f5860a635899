//! Channel model: power-law path loss, spatially correlated log-normal
//! shadowing, and Rayleigh fading, combined in the dB domain.

pub mod grid;

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::model::{distance, Point2D, Topology};

use self::grid::CirculantEmbedding;

/// Distances below this clamp to it, so path loss never turns into gain.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// Path loss `-10 alpha log10(d)` in dB.
pub fn path_loss_db(alpha: f64, d: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::InvalidArgument(format!("path loss distance must be positive, got {d}")));
    }
    Ok(-10.0 * alpha * d.max(MIN_DISTANCE_M).log10())
}

/// Rayleigh fading power in dB, with `E[h^2] = sigma_f^2`.
///
/// The amplitude is Rayleigh with scale `sigma_f / sqrt(2)`, so `h^2` is
/// exponential with mean `sigma_f^2`.
pub fn sample_fading_db<R: Rng + ?Sized>(sigma_f: f64, rng: &mut R) -> f64 {
    let e: f64 = rng.sample(Exp1);
    10.0 * (sigma_f * sigma_f * e).log10()
}

pub fn received_power_dbm(p_tx: f64, path_loss: f64, shadowing: f64, fading: f64) -> f64 {
    p_tx + path_loss + shadowing + fading
}

/// How shadowing fields are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShadowingMethod {
    /// Exact below the given source count, grid field above it.
    Auto { max_exact_sources: usize },
    Exact,
    Grid,
}

impl Default for ShadowingMethod {
    fn default() -> Self {
        ShadowingMethod::Auto { max_exact_sources: 4000 }
    }
}

/// Samples the `B x sources` shadowing matrix in dB.
///
/// Each row is a zero-mean Gaussian field over the source locations with
/// covariance `sigma^2 exp(-|q1 - q2| / beta)`. Rows are independent unless
/// `cross_bs_correlated`, in which case the covariance picks up the factor
/// `exp(-|qb - qk| / beta)` between BSs.
pub fn sample_shadowing<R: Rng + ?Sized>(
    bs_locations: &[Point2D],
    source_locations: &[Point2D],
    sigma: f64,
    beta: f64,
    cross_bs_correlated: bool,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    sample_shadowing_with(
        bs_locations,
        source_locations,
        sigma,
        beta,
        cross_bs_correlated,
        ShadowingMethod::default(),
        rng,
    )
}

pub fn sample_shadowing_with<R: Rng + ?Sized>(
    bs_locations: &[Point2D],
    source_locations: &[Point2D],
    sigma: f64,
    beta: f64,
    cross_bs_correlated: bool,
    method: ShadowingMethod,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    if !(beta > 0.0) || !(sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "shadowing needs beta > 0 and sigma >= 0, got beta={beta} sigma={sigma}"
        )));
    }
    let num_bs = bs_locations.len();
    if sigma == 0.0 || source_locations.is_empty() {
        return Ok(vec![vec![0.0; source_locations.len()]; num_bs]);
    }
    let exact = match method {
        ShadowingMethod::Exact => true,
        ShadowingMethod::Grid => false,
        ShadowingMethod::Auto { max_exact_sources } => source_locations.len() <= max_exact_sources,
    };
    let fields = if exact {
        exact_fields(num_bs, source_locations, sigma, beta, rng)?
    } else {
        grid_fields(num_bs, source_locations, sigma, beta, rng)?
    };
    if !cross_bs_correlated || num_bs < 2 {
        return Ok(fields);
    }
    let bs_cov = exponential_covariance(bs_locations, 1.0, beta);
    let l = cholesky_with_jitter(bs_cov)?;
    let n = source_locations.len();
    Ok((0..num_bs)
        .map(|b| {
            (0..n)
                .map(|s| (0..=b).map(|k| l[(b, k)] * fields[k][s]).sum())
                .collect()
        })
        .collect())
}

fn exponential_covariance(points: &[Point2D], var: f64, beta: f64) -> DMatrix<f64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |i, j| var * (-distance(&points[i], &points[j]) / beta).exp())
}

/// Lower Cholesky factor, adding diagonal jitter until the factorization succeeds.
fn cholesky_with_jitter(cov: DMatrix<f64>) -> Result<DMatrix<f64>> {
    debug_assert!(cov.relative_eq(&cov.transpose(), 1e-12, 1e-12));
    let scale = cov.diagonal().max().max(f64::MIN_POSITIVE);
    for jitter in [0.0, 1e-12, 1e-10, 1e-8, 1e-6] {
        let mut c = cov.clone();
        for i in 0..c.nrows() {
            c[(i, i)] += jitter * scale;
        }
        if let Some(ch) = c.cholesky() {
            return Ok(ch.unpack());
        }
    }
    Err(Error::Shadowing(format!(
        "{0}x{0} covariance failed Cholesky even with 1e-6 relative jitter",
        cov.nrows()
    )))
}

fn exact_fields<R: Rng + ?Sized>(
    num_bs: usize,
    sources: &[Point2D],
    sigma: f64,
    beta: f64,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    // Coincident sources share one node so their values are identical.
    let mut unique: Vec<Point2D> = Vec::new();
    let mut seen: HashMap<(u64, u64), usize> = HashMap::new();
    let slot: Vec<usize> = sources
        .iter()
        .map(|p| {
            *seen.entry((p.x.to_bits(), p.y.to_bits())).or_insert_with(|| {
                unique.push(*p);
                unique.len() - 1
            })
        })
        .collect();
    let l = cholesky_with_jitter(exponential_covariance(&unique, sigma * sigma, beta))?;
    let n = unique.len();
    Ok((0..num_bs)
        .map(|_| {
            let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let v = &l * z;
            slot.iter().map(|&i| v[i]).collect()
        })
        .collect())
}

fn grid_fields<R: Rng + ?Sized>(
    num_bs: usize,
    sources: &[Point2D],
    sigma: f64,
    beta: f64,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    let emb = CirculantEmbedding::covering(sources, sigma, beta)?;
    let mut rows = Vec::with_capacity(num_bs);
    while rows.len() < num_bs {
        let (a, b) = emb.sample_pair(rng);
        for field in [a, b] {
            if rows.len() < num_bs {
                rows.push(sources.iter().map(|p| field.interpolate(p)).collect());
            }
        }
    }
    Ok(rows)
}

/// Static large-scale gains for one realization, `B x sources` in dB.
/// Sources are the IoT devices followed by the interferers.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub shadowing_db: Vec<Vec<f64>>,
    pub pathloss_db: Vec<Vec<f64>>,
}

impl ChannelRealization {
    pub fn generate<R: Rng + ?Sized>(topology: &Topology, config: &SimConfig, rng: &mut R) -> Result<Self> {
        let sources = topology.source_locations();
        let pathloss_db = topology
            .bs_locations
            .iter()
            .map(|bs| {
                sources
                    .iter()
                    .map(|s| path_loss_db(config.pathloss_exponent, distance(bs, s).max(MIN_DISTANCE_M)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let shadowing_db = sample_shadowing_with(
            &topology.bs_locations,
            &sources,
            config.shadowing_std,
            config.shadowing_decorrelation,
            config.cross_bs_shadowing_correlated,
            ShadowingMethod::Auto { max_exact_sources: config.exact_shadowing_max_sources },
            rng,
        )?;
        Ok(Self { shadowing_db, pathloss_db })
    }

    /// Deterministic channel without shadowing.
    pub fn without_shadowing(topology: &Topology, config: &SimConfig) -> Result<Self> {
        let mut cfg = config.clone();
        cfg.shadowing_std = 0.0;
        Self::generate(topology, &cfg, &mut crate::rng::substream(0, 0))
    }

    pub fn num_bs(&self) -> usize {
        self.pathloss_db.len()
    }

    /// Path loss plus shadowing.
    pub fn link_gain_db(&self, bs: usize, source: usize) -> f64 {
        self.pathloss_db[bs][source] + self.shadowing_db[bs][source]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn path_loss_examples() {
        assert_eq!(path_loss_db(3.0, 1.0).unwrap(), 0.0);
        assert!((path_loss_db(3.0, 100.0).unwrap() + 60.0).abs() < 1e-12);
        assert!((path_loss_db(3.5, 1000.0).unwrap() + 105.0).abs() < 1e-12);
        assert_eq!(path_loss_db(3.0, 0.5).unwrap(), 0.0);
        assert!(path_loss_db(3.0, 0.0).is_err());
        assert!(path_loss_db(3.0, -1.0).is_err());
    }

    #[test]
    fn path_loss_monotone() {
        let mut last = f64::INFINITY;
        for i in 0..200 {
            let d = 1.0 + i as f64 * 37.0;
            let pl = path_loss_db(3.5, d).unwrap();
            assert!(pl < last || i == 0);
            last = pl;
        }
        assert!(path_loss_db(4.0, 10.0).unwrap() < path_loss_db(3.0, 10.0).unwrap());
    }

    #[test]
    fn received_power_examples() {
        assert_eq!(received_power_dbm(14.0, -60.0, 0.0, 0.0), -46.0);
        assert_eq!(received_power_dbm(14.0, -105.0, 9.0, -3.0), -85.0);
        assert_eq!(received_power_dbm(0.0, 0.0, 0.0, 0.0), 0.0);
        assert_eq!(
            received_power_dbm(14.0, -105.0, 9.0, -3.0),
            received_power_dbm(-3.0, 9.0, -105.0, 14.0)
        );
    }

    #[test]
    fn zero_sigma_gives_zero_shadowing() {
        let bs = [Point2D::new(0.0, 0.0), Point2D::new(5.0, 5.0)];
        let src = [Point2D::new(1.0, 1.0), Point2D::new(2.0, 3.0)];
        let sh = sample_shadowing(&bs, &src, 0.0, 200.0, false, &mut substream(1, 1)).unwrap();
        assert_eq!(sh, vec![vec![0.0; 2]; 2]);
    }

    #[test]
    fn coincident_sources_share_values() {
        let bs = [Point2D::new(0.0, 0.0), Point2D::new(500.0, 0.0)];
        let src = [Point2D::new(10.0, 10.0), Point2D::new(300.0, 40.0), Point2D::new(10.0, 10.0)];
        for cross in [false, true] {
            let sh = sample_shadowing(&bs, &src, 9.0, 200.0, cross, &mut substream(2, 1)).unwrap();
            for row in &sh {
                assert_eq!(row[0], row[2]);
                assert_ne!(row[0], row[1]);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = [Point2D::default()];
        assert!(sample_shadowing(&p, &p, 1.0, 0.0, false, &mut substream(0, 0)).is_err());
        assert!(sample_shadowing(&p, &p, -1.0, 10.0, false, &mut substream(0, 0)).is_err());
    }

    #[test]
    fn exact_shadowing_correlation_at_beta() {
        // Two sources one decorrelation length apart: correlation e^-1.
        let beta = 200.0;
        let bs: Vec<Point2D> = (0..50).map(|i| Point2D::new(i as f64, 0.0)).collect();
        let src = [Point2D::new(0.0, 0.0), Point2D::new(beta, 0.0)];
        let mut rng = substream(11, 0);
        let (mut xy, mut xx, mut yy) = (0.0, 0.0, 0.0);
        for _ in 0..100 {
            let sh = sample_shadowing(&bs, &src, 9.0, beta, false, &mut rng).unwrap();
            for row in sh {
                xy += row[0] * row[1];
                xx += row[0] * row[0];
                yy += row[1] * row[1];
            }
        }
        let rho = xy / (xx * yy).sqrt();
        assert!((rho - (-1.0f64).exp()).abs() < 0.05, "rho = {rho}");
    }

    #[test]
    fn cross_bs_correlation_follows_product_kernel() {
        let beta = 200.0;
        let bs = [Point2D::new(0.0, 0.0), Point2D::new(beta, 0.0)];
        let src = [Point2D::new(0.0, 1000.0)];
        let mut rng = substream(12, 0);
        let (mut xy, mut xx, mut yy) = (0.0, 0.0, 0.0);
        for _ in 0..5000 {
            let sh = sample_shadowing(&bs, &src, 1.0, beta, true, &mut rng).unwrap();
            xy += sh[0][0] * sh[1][0];
            xx += sh[0][0] * sh[0][0];
            yy += sh[1][0] * sh[1][0];
        }
        let rho = xy / (xx * yy).sqrt();
        assert!((rho - (-1.0f64).exp()).abs() < 0.05, "rho = {rho}");
    }

    #[test]
    fn grid_shadowing_moments() {
        let beta = 200.0;
        let mut rng = substream(13, 0);
        let src: Vec<Point2D> = (0..3000)
            .map(|_| Point2D::new(rng.random_range(0.0..4000.0), rng.random_range(0.0..4000.0)))
            .collect();
        let bs = vec![Point2D::default(); 4];
        let sh =
            sample_shadowing_with(&bs, &src, 9.0, beta, false, ShadowingMethod::Grid, &mut rng).unwrap();
        let all: Vec<f64> = sh.iter().flatten().copied().collect();
        let n = all.len() as f64;
        let mean = all.iter().sum::<f64>() / n;
        let var = all.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        // Spatially correlated samples: effective sample size is far below n.
        assert!(mean.abs() < 1.5, "mean {mean}");
        // Bilinear interpolation loses a few percent of variance mid-cell.
        assert!(var > 0.8 * 81.0 && var < 1.15 * 81.0, "var {var}");
    }

    #[test]
    fn fading_mean_power_and_median() {
        let mut rng = substream(14, 0);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut below = 0usize;
        for _ in 0..n {
            let p = 10f64.powf(sample_fading_db(1.0, &mut rng) / 10.0);
            sum += p;
            if p < std::f64::consts::LN_2 {
                below += 1;
            }
        }
        assert!((sum / n as f64 - 1.0).abs() < 0.01);
        assert!((below as f64 / n as f64 - 0.5).abs() < 0.01);

        let mut sum2 = 0.0;
        for _ in 0..200_000 {
            sum2 += 10f64.powf(sample_fading_db(2.0, &mut rng) / 10.0);
        }
        assert!((sum2 / 200_000.0 - 4.0).abs() < 0.05);
    }

    #[test]
    fn fading_lag_one_autocorrelation() {
        let mut rng = substream(15, 0);
        let x: Vec<f64> = (0..100_000).map(|_| sample_fading_db(1.0, &mut rng)).collect();
        let mean = x.iter().sum::<f64>() / x.len() as f64;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        let lag = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum::<f64>();
        assert!((lag / var).abs() < 0.02);
    }

    #[test]
    fn realization_pathloss_is_nonpositive() {
        let topo = Topology {
            bs_locations: vec![Point2D::new(0.0, 0.0)],
            iot_locations: vec![Point2D::new(1000.0, 0.0), Point2D::new(0.0, 0.0)],
            interferer_locations: vec![Point2D::new(10.0, 0.0)],
            interferer_band_probs: vec![vec![1.0]],
        };
        let ch = ChannelRealization::without_shadowing(&topo, &SimConfig::default()).unwrap();
        assert!((ch.pathloss_db[0][0] + 105.0).abs() < 1e-12);
        assert_eq!(ch.pathloss_db[0][1], 0.0);
        assert!(ch.pathloss_db[0].iter().all(|&v| v <= 0.0));
        assert_eq!(ch.link_gain_db(0, 2), -35.0);
    }
}
