//! Stationary Gaussian random fields on a regular grid by circulant
//! embedding, for shadowing over more sources than a dense Cholesky
//! factorization can handle.
//!
//! The exponential covariance is laid out on an `m x m` torus padded by at
//! least ten decorrelation lengths, so wrap-around correlation is below
//! `exp(-10)`. Its 2-D DFT gives the eigenvalues of the block-circulant
//! covariance; one complex FFT of scaled white noise then yields two
//! independent fields (real and imaginary parts).

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::model::Point2D;

/// Largest grid side (points) before the cell is enlarged.
const MAX_GRID_POINTS: usize = 2049;
/// Wrap-around padding in decorrelation lengths.
const PAD_DECORRELATIONS: f64 = 10.0;
/// Tolerated share of negative eigenvalue mass before giving up.
const MAX_NEGATIVE_MASS: f64 = 1e-3;

/// A sampled field on `n x n` grid points starting at `origin`.
#[derive(Debug, Clone)]
pub struct GridField {
    origin: Point2D,
    cell: f64,
    n: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn cell(&self) -> f64 {
        self.cell
    }

    pub fn side_points(&self) -> usize {
        self.n
    }

    pub fn at_node(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Bilinear interpolation; points outside the grid are clamped to it.
    pub fn interpolate(&self, p: &Point2D) -> f64 {
        if self.n == 1 {
            return self.values[0];
        }
        let last = (self.n - 2) as f64;
        let fx = ((p.x - self.origin.x) / self.cell).clamp(0.0, self.n as f64 - 1.0);
        let fy = ((p.y - self.origin.y) / self.cell).clamp(0.0, self.n as f64 - 1.0);
        let ix = fx.floor().min(last);
        let iy = fy.floor().min(last);
        let (tx, ty) = (fx - ix, fy - iy);
        let (i, j) = (ix as usize, iy as usize);
        let v00 = self.at_node(i, j);
        let v10 = self.at_node(i + 1, j);
        let v01 = self.at_node(i, j + 1);
        let v11 = self.at_node(i + 1, j + 1);
        (1.0 - tx) * ((1.0 - ty) * v00 + ty * v01) + tx * ((1.0 - ty) * v10 + ty * v11)
    }
}

/// Square-root eigenvalues of the embedded covariance, ready for sampling.
pub struct CirculantEmbedding {
    origin: Point2D,
    cell: f64,
    n: usize,
    m: usize,
    scaled_sqrt_eig: Arc<Vec<f64>>,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CirculantEmbedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantEmbedding")
            .field("origin", &self.origin)
            .field("cell", &self.cell)
            .field("n", &self.n)
            .field("m", &self.m)
            .finish()
    }
}

type EigenKey = (usize, u64, u64, u64);

fn eigen_cache() -> &'static Mutex<HashMap<EigenKey, Arc<Vec<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<EigenKey, Arc<Vec<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Smallest `2^a 3^b 5^c` not below `n`.
fn fft_friendly(n: usize) -> usize {
    let mut k = n.max(1);
    loop {
        let mut r = k;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return k;
        }
        k += 1;
    }
}

impl CirculantEmbedding {
    /// Embedding covering the bounding box of `points` with covariance
    /// `sigma^2 * exp(-d / beta)`, on a grid no coarser than `beta / 4`.
    pub fn covering(points: &[Point2D], sigma: f64, beta: f64) -> Result<Self> {
        let (mut lo_x, mut lo_y) = (f64::INFINITY, f64::INFINITY);
        let (mut hi_x, mut hi_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo_x = lo_x.min(p.x);
            lo_y = lo_y.min(p.y);
            hi_x = hi_x.max(p.x);
            hi_y = hi_y.max(p.y);
        }
        if points.is_empty() {
            (lo_x, lo_y, hi_x, hi_y) = (0.0, 0.0, 0.0, 0.0);
        }
        let extent = (hi_x - lo_x).max(hi_y - lo_y).max(0.0);
        let mut cell = beta / 8.0;
        if extent / cell + 1.0 > MAX_GRID_POINTS as f64 {
            cell = extent / (MAX_GRID_POINTS - 1) as f64;
        }
        if cell > beta / 4.0 {
            return Err(Error::Shadowing(format!(
                "area extent {extent} m needs a grid cell of {cell} m, coarser than beta/4 = {} m",
                beta / 4.0
            )));
        }
        let n = (extent / cell).ceil() as usize + 1;
        Self::new(Point2D::new(lo_x, lo_y), cell, n, sigma, beta)
    }

    pub fn new(origin: Point2D, cell: f64, n: usize, sigma: f64, beta: f64) -> Result<Self> {
        let pad = (PAD_DECORRELATIONS * beta / cell).ceil() as usize;
        let m = fft_friendly(n + pad);
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        let key = (m, cell.to_bits(), sigma.to_bits(), beta.to_bits());
        let cached = eigen_cache().lock().ok().and_then(|c| c.get(&key).cloned());
        let scaled_sqrt_eig = match cached {
            Some(v) => v,
            None => {
                let v = Arc::new(Self::eigenvalues(m, cell, sigma, beta, fft.as_ref())?);
                if let Ok(mut c) = eigen_cache().lock() {
                    c.insert(key, Arc::clone(&v));
                }
                v
            }
        };
        Ok(Self { origin, cell, n, m, scaled_sqrt_eig, fft })
    }

    /// `sqrt(max(lambda, 0) / m^2)` for each torus frequency.
    fn eigenvalues(m: usize, cell: f64, sigma: f64, beta: f64, fft: &dyn Fft<f64>) -> Result<Vec<f64>> {
        let var = sigma * sigma;
        let mut buf: Vec<Complex64> = (0..m * m)
            .map(|idx| {
                let (i, j) = (idx / m, idx % m);
                let di = i.min(m - i) as f64;
                let dj = j.min(m - j) as f64;
                let d = cell * di.hypot(dj);
                Complex64::new(var * (-d / beta).exp(), 0.0)
            })
            .collect();
        fft2(&mut buf, m, fft);
        let total: f64 = buf.iter().map(|c| c.re.abs()).sum();
        let negative: f64 = buf.iter().filter(|c| c.re < 0.0).map(|c| -c.re).sum();
        if total > 0.0 && negative / total > MAX_NEGATIVE_MASS {
            return Err(Error::Shadowing(format!(
                "circulant embedding of size {m} has negative eigenvalue mass {:.3e}",
                negative / total
            )));
        }
        let norm = (m * m) as f64;
        Ok(buf.iter().map(|c| (c.re.max(0.0) / norm).sqrt()).collect())
    }

    pub fn embedding_size(&self) -> usize {
        self.m
    }

    /// Two independent fields from one FFT.
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (GridField, GridField) {
        let m = self.m;
        let mut buf: Vec<Complex64> = self
            .scaled_sqrt_eig
            .iter()
            .map(|&s| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(s * re, s * im)
            })
            .collect();
        fft2(&mut buf, m, self.fft.as_ref());
        let n = self.n;
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for c in &buf[i * m..i * m + n] {
                re.push(c.re);
                im.push(c.im);
            }
        }
        let field = |values| GridField { origin: self.origin, cell: self.cell, n, values };
        (field(re), field(im))
    }
}

/// In-place 2-D DFT of a row-major `m x m` buffer.
fn fft2(buf: &mut [Complex64], m: usize, fft: &dyn Fft<f64>) {
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    fft.process_with_scratch(buf, &mut scratch);
    transpose(buf, m);
    fft.process_with_scratch(buf, &mut scratch);
    transpose(buf, m);
}

fn transpose(buf: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in i + 1..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn fft_friendly_sizes() {
        assert_eq!(fft_friendly(601), 625);
        assert_eq!(fft_friendly(7), 8);
        assert_eq!(fft_friendly(1), 1);
    }

    #[test]
    fn node_statistics_match_kernel() {
        // Grid nodes are exact samples of the field: check variance and the
        // correlation at 4 cells (= beta / 2 at cell = beta / 8).
        let (sigma, beta) = (2.0, 80.0);
        let emb = CirculantEmbedding::new(Point2D::default(), beta / 8.0, 40, sigma, beta).unwrap();
        let mut rng = substream(7, 0);
        let (mut var, mut cov, mut count) = (0.0, 0.0, 0.0);
        for _ in 0..200 {
            let (a, b) = emb.sample_pair(&mut rng);
            for f in [a, b] {
                for i in 0..30 {
                    for j in (0..40).step_by(5) {
                        let v0 = f.at_node(i, j);
                        var += v0 * v0;
                        cov += v0 * f.at_node(i + 4, j);
                        count += 1.0;
                    }
                }
            }
        }
        let var = var / count;
        let rho = cov / count / var;
        assert!((var / (sigma * sigma) - 1.0).abs() < 0.05, "variance ratio {}", var / 4.0);
        assert!((rho - (-0.5f64).exp()).abs() < 0.05, "correlation {rho}");
    }

    #[test]
    fn interpolation_hits_nodes() {
        let emb = CirculantEmbedding::new(Point2D::new(10.0, 20.0), 5.0, 6, 1.0, 40.0).unwrap();
        let (f, _) = emb.sample_pair(&mut substream(1, 1));
        assert_eq!(f.interpolate(&Point2D::new(10.0, 20.0)), f.at_node(0, 0));
        let p = Point2D::new(10.0 + 2.0 * 5.0, 20.0 + 3.0 * 5.0);
        assert!((f.interpolate(&p) - f.at_node(2, 3)).abs() < 1e-12);
        let mid = Point2D::new(10.0 + 2.5, 20.0);
        let expect = 0.5 * (f.at_node(0, 0) + f.at_node(1, 0));
        assert!((f.interpolate(&mid) - expect).abs() < 1e-12);
    }

    #[test]
    fn oversized_area_is_rejected() {
        let pts = [Point2D::new(0.0, 0.0), Point2D::new(1e6, 1e6)];
        assert!(CirculantEmbedding::covering(&pts, 1.0, 10.0).is_err());
    }
}
