//! Small numerical helpers: order-stable summation, least squares, seeding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of independent generator streams a Monte Carlo run is split into.
/// Fixed so that results do not depend on the thread count.
pub const MC_BLOCKS: u64 = 64;

/// Generator for block `block` of a run seeded with `seed`.
pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// A seed for the `index`-th of several related runs, so that they draw
/// from unrelated generator states.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Sample counts per block, summing to `total`.
pub fn block_sizes(total: u64) -> Vec<u64> {
    let base = total / MC_BLOCKS;
    let extra = total % MC_BLOCKS;
    (0..MC_BLOCKS).map(|b| base + u64::from(b < extra)).collect()
}

/// Pairwise (cascade) summation; the result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Ordinary least-squares line `y = intercept + slope·x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    /// Standard error of the slope (NaN with fewer than three points).
    pub slope_se: f64,
    pub residuals: Vec<f64>,
}

pub fn least_squares(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    let slope_se = if n > 2 {
        (residuals.iter().map(|r| r * r).sum::<f64>() / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Some(LinearFit { intercept, slope, slope_se, residuals })
}
