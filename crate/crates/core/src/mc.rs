//! Monte Carlo estimate of `D(h)` from the ensemble mean-squared displacement.
//! Displacements are counted in unit cells, like the jump observable.
//!
//! Each particle keeps its fractional position as a 64-bit binary fraction and
//! its unit cell as an integer. Doubling shifts the fraction left by one bit and
//! shifts in a fresh random bit, which is the next binary digit of a uniformly
//! distributed seed, so trajectories are exact for the map with `h` rounded to
//! 64 fractional bits. Iterating in `f64` instead would exhaust the mantissa
//! after about 53 steps and lock dyadic `h` onto spurious periodic orbits.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{DiffusionEstimate, Method};
use crate::map::MapParams;

pub const N_BLOCKS: usize = 10;
pub const MIN_PARTICLES: usize = 1_000;
pub const MIN_STEPS: usize = 100;
pub const MAX_STEPS: usize = 10_000;
pub const DEFAULT_FIT_WINDOW: f64 = 0.5;

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_particles: usize,
    pub n_steps: usize,
    pub seed: u64,
    /// Trailing fraction of the time steps used in the slope fit.
    pub fit_window: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_particles: 100_000,
            n_steps: 1_000,
            seed: 0,
            fit_window: DEFAULT_FIT_WINDOW,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_particles < MIN_PARTICLES {
            return Err(Error::InvalidParameter(format!(
                "n_particles = {} is below {MIN_PARTICLES}",
                self.n_particles
            )));
        }
        if !(MIN_STEPS..=MAX_STEPS).contains(&self.n_steps) {
            return Err(Error::InvalidParameter(format!(
                "n_steps = {} is outside [{MIN_STEPS}, {MAX_STEPS}]",
                self.n_steps
            )));
        }
        if !(self.fit_window > 0.0 && self.fit_window <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "fit_window = {} is outside (0, 1]",
                self.fit_window
            )));
        }
        Ok(())
    }

    /// First time index of the fit window; at least two points are always fitted.
    fn fit_start(&self) -> usize {
        let len = ((self.fit_window * self.n_steps as f64).floor() as usize).max(1);
        self.n_steps - len.min(self.n_steps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsdSeries {
    pub times: Vec<usize>,
    pub msd: Vec<f64>,
    /// Half the least-squares slope of `msd` over the fit window.
    pub d_hat: f64,
    /// Standard error of `d_hat` from the spread of the block estimates.
    pub std_err: f64,
    /// Per-block estimates of `D`.
    pub block_d: Vec<f64>,
    /// Ensemble mean displacement at the final time.
    pub mean_displacement: f64,
    pub mean_displacement_err: f64,
}

impl MsdSeries {
    pub fn estimate(&self, h: f64) -> DiffusionEstimate {
        DiffusionEstimate::new(Method::Mc, 0, h, self.d_hat).with_bound(self.std_err)
    }
}

/// `h` as a whole part and a 64-bit binary fraction.
fn split_lift(h: f64) -> (i64, u64) {
    let whole = h.floor();
    let frac = ((h - whole) * TWO_POW_64).round();
    if frac >= TWO_POW_64 {
        (whole as i64 + 1, 0)
    } else {
        (whole as i64, frac as u64)
    }
}

/// Per-step sums of one block: displacement and squared displacement.
struct BlockSums {
    count: usize,
    sum_d: Vec<f64>,
    sum_sq: Vec<f64>,
}

fn run_block(range: std::ops::Range<usize>, whole: i64, frac: u64, cfg: &SimConfig) -> BlockSums {
    let steps = cfg.n_steps;
    let mut sum_d = vec![0.0; steps + 1];
    let mut sum_sq = vec![0.0; steps + 1];
    let count = range.len();
    for particle in range {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(particle as u64);
        let mut y = rng.next_u64();
        let mut cell: i64 = 0;
        let mut bits = 0u64;
        let mut left = 0u32;
        for n in 1..=steps {
            if left == 0 {
                bits = rng.next_u64();
                left = 64;
            }
            let fresh = bits >> 63;
            bits <<= 1;
            left -= 1;
            let upper = y >> 63 == 1;
            let z = (y << 1) | fresh;
            if upper {
                let (next, borrow) = z.overflowing_sub(frac);
                y = next;
                cell -= whole + borrow as i64;
            } else {
                let (next, carry) = z.overflowing_add(frac);
                y = next;
                cell += whole + carry as i64;
            }
            let d = cell as f64;
            sum_d[n] += d;
            sum_sq[n] += d * d;
        }
    }
    BlockSums { count, sum_d, sum_sq }
}

/// Least-squares slope of `ys` against `start..start+len`.
fn slope(start: usize, ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let mx = start as f64 + (n - 1.0) / 2.0;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = (start + i) as f64 - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

fn mean_and_err(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Simulates `n_particles` uniform seeds for `n_steps` steps. Particle `i` draws
/// its bits from ChaCha8 seeded with `seed` on stream `i`, so the result does
/// not depend on how blocks are scheduled.
pub fn simulate_msd(p: &MapParams, cfg: &SimConfig) -> Result<MsdSeries> {
    cfg.validate()?;
    let (whole, frac) = split_lift(p.h());
    let per_block = cfg.n_particles / N_BLOCKS;
    let ranges: Vec<_> = (0..N_BLOCKS)
        .map(|b| {
            let end = if b + 1 == N_BLOCKS { cfg.n_particles } else { (b + 1) * per_block };
            b * per_block..end
        })
        .collect();
    let blocks: Vec<BlockSums> = ranges
        .into_par_iter()
        .map(|r| run_block(r, whole, frac, cfg))
        .collect();

    let steps = cfg.n_steps;
    let total = cfg.n_particles as f64;
    let mut msd = vec![0.0; steps + 1];
    let mut mean_d = 0.0;
    for b in &blocks {
        for (m, s) in msd.iter_mut().zip(&b.sum_sq) {
            *m += s;
        }
        mean_d += b.sum_d[steps];
    }
    msd.iter_mut().for_each(|m| *m /= total);
    mean_d /= total;

    let start = cfg.fit_start();
    let d_hat = slope(start, &msd[start..]) / 2.0;
    let block_d: Vec<f64> = blocks
        .iter()
        .map(|b| {
            let series: Vec<f64> = b.sum_sq[start..].iter().map(|s| s / b.count as f64).collect();
            slope(start, &series) / 2.0
        })
        .collect();
    let (_, std_err) = mean_and_err(&block_d);
    let block_drift: Vec<f64> = blocks.iter().map(|b| b.sum_d[steps] / b.count as f64).collect();
    let (_, mean_displacement_err) = mean_and_err(&block_drift);

    Ok(MsdSeries {
        times: (0..=steps).collect(),
        msd,
        d_hat,
        std_err,
        block_d,
        mean_displacement: mean_d,
        mean_displacement_err,
    })
}
