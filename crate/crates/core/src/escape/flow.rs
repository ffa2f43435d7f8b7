use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::stats::{block_rng, block_sizes, least_squares};
use crate::suspension::RoofFunction;
use crate::thermo::GibbsMarkovMeasure;

use super::{Hole, OpenSystem};

/// Tail grid points with fewer survivors than this make the band unreliable.
pub const MIN_TAIL_SURVIVORS: u64 = 100;

/// Points in an automatically chosen time grid.
const AUTO_GRID_POINTS: usize = 24;

/// The automatic grid reaches the time where survival is about `e^{-5}`.
const AUTO_GRID_DECAY: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowEscapeParams {
    /// Increasing positive times; chosen from the exact rate when `None`.
    pub t_grid: Option<Vec<f64>>,
    pub n_samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowEscapeEstimate {
    /// `-slope` of `log μ{S_τ f >= t}` against `t` over the upper half of the grid.
    pub rate: f64,
    /// Standard error of the slope, combining the regression residuals with
    /// the binomial error of each tail count.
    pub band: f64,
    /// The same fit over the upper third of the grid.
    pub rate_upper_third: f64,
    /// Decay rate from the open kernel, without sampling.
    pub exact_rate: f64,
    pub t_grid: Vec<f64>,
    /// Number of samples with `S_τ f >= t` at each grid time.
    pub survivors: Vec<u64>,
    pub samples: u64,
    pub too_few_survivors: bool,
    /// Samples with `S_τ f >= t` and `τ <= εt` for `ε = 1/(2‖f‖)`; always zero
    /// since `S_τ f <= τ‖f‖`.
    pub violations: u64,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    let ok = !grid.is_empty() && grid[0] > 0.0 && grid.windows(2).all(|p| p[0] < p[1]) && grid.iter().all(|t| t.is_finite());
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument("t_grid must be positive, finite and strictly increasing".into()))
    }
}

/// `-slope` and its band over the grid points with index `>= from`.
fn tail_fit(grid: &[f64], survivors: &[u64], samples: u64, from: usize) -> (f64, f64) {
    let n = samples as f64;
    let (mut x, mut y, mut var) = (Vec::new(), Vec::new(), Vec::new());
    for i in from..grid.len() {
        if survivors[i] > 0 {
            let p = survivors[i] as f64 / n;
            x.push(grid[i]);
            y.push(p.ln());
            var.push((1.0 - p) / (n * p));
        }
    }
    let Some(fit) = least_squares(&x, &y) else {
        return (f64::NAN, f64::NAN);
    };
    let mx = x.iter().sum::<f64>() / x.len() as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sampling: f64 = x.iter().zip(&var).map(|(v, s)| ((v - mx) / sxx).powi(2) * s).sum();
    let regression = if fit.slope_se.is_nan() { 0.0 } else { fit.slope_se };
    (-fit.slope, (regression * regression + sampling).sqrt())
}

/// Monte Carlo estimate of the flow escape rate through `hole`.
pub fn flow_escape_rate(
    mu: &GibbsMarkovMeasure,
    f: &RoofFunction,
    hole: &Hole,
    params: &FlowEscapeParams,
) -> Result<FlowEscapeEstimate> {
    if params.n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let open = OpenSystem::new(mu, hole, f.depth())?;
    let exact_rate = open.flow_escape_rate_exact(f)?;
    let grid = match &params.t_grid {
        Some(g) => g.clone(),
        None => {
            let t_max = if exact_rate.is_finite() { AUTO_GRID_DECAY / exact_rate } else { f.sup_norm() };
            (1..=AUTO_GRID_POINTS).map(|i| t_max * i as f64 / AUTO_GRID_POINTS as f64).collect()
        }
    };
    check_grid(&grid)?;
    let t_max = grid[grid.len() - 1];
    let roof = open.roof_on_states(f);
    let chain = open.chain();
    let cumulative = chain.cumulative_initial();
    let epsilon = 0.5 / f.sup_norm();

    let blocks = block_sizes(params.n_samples)
        .into_par_iter()
        .enumerate()
        .map(|(b, n)| {
            let mut rng = block_rng(params.seed, b as u64);
            // above[i]: samples whose S_τ f reaches exactly i grid times.
            let mut above = vec![0u64; grid.len() + 1];
            let mut violations = 0u64;
            for _ in 0..n {
                let mut state = chain.sample_initial(&cumulative, &mut rng);
                let mut sum = 0.0;
                let mut steps = 0u64;
                let hit = loop {
                    sum += roof[state];
                    steps += 1;
                    state = chain.sample_next(state, &mut rng);
                    if open.in_hole(state) {
                        break true;
                    }
                    if sum >= t_max {
                        break false;
                    }
                };
                let reached = grid.partition_point(|&t| t <= sum);
                above[reached] += 1;
                // A censored orbit has τ > steps.
                let tau_floor = if hit { steps } else { steps + 1 };
                if reached > 0 && (tau_floor as f64) <= epsilon * grid[reached - 1] {
                    violations += 1;
                }
            }
            (above, violations)
        })
        .collect::<Vec<_>>();

    let mut above = vec![0u64; grid.len() + 1];
    let mut violations = 0;
    for (a, v) in &blocks {
        for (acc, x) in above.iter_mut().zip(a) {
            *acc += x;
        }
        violations += v;
    }
    let mut survivors = vec![0u64; grid.len()];
    let mut running = 0;
    for i in (0..grid.len()).rev() {
        running += above[i + 1];
        survivors[i] = running;
    }

    let half = grid.len() / 2;
    let (rate, band) = tail_fit(&grid, &survivors, params.n_samples, half);
    let (rate_upper_third, _) = tail_fit(&grid, &survivors, params.n_samples, grid.len() - grid.len() / 3);
    let too_few_survivors = survivors[half..].iter().any(|&s| s < MIN_TAIL_SURVIVORS) || rate.is_nan();
    Ok(FlowEscapeEstimate {
        rate,
        band,
        rate_upper_third,
        exact_rate,
        t_grid: grid,
        survivors,
        samples: params.n_samples,
        too_few_survivors,
        violations,
    })
}
