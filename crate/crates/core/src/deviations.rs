//! Explicit large-deviation bounds for flow averages, and exact and Monte
//! Carlo estimates of the deviation probability they control.
//!
//! The concentration input is `μ{|S_m g/m - ∫g dμ| >= ε} <= 2 exp(-B m ε²)`
//! with `B = (4 D |g|_θ²)^{-1}` for locally constant `g`. `D` is not
//! computable from the shift alone; [`fit_d`] estimates the least value
//! consistent with exact probabilities on a grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::sft::LocallyConstantFunction;
use crate::stats::{block_rng, block_sizes, pairwise_sum};
use crate::suspension::{flow_birkhoff, nu_integral, sample_nu_indices, FlowObservable, RoofFunction};
use crate::thermo::GibbsMarkovMeasure;

/// Default cap on the number of words an exact enumeration may touch.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

/// Relative slack when classifying a deviation that lands on `ε` itself,
/// so that rounding in the average does not move boundary cases.
const BOUNDARY_SLACK: f64 = 1e-12;

pub const D_SAFETY_FACTOR: f64 = 1.1;
pub const DEFAULT_D: f64 = 1.0;

/// Constants of the large-deviation bound for one `(f, F, ε, D)`.
///
/// The proof bounds the deviation probability by
/// `2t‖f‖ exp(-(1/4D)/|F̃|² · n₁(t) · ε₂²) + 2t‖f‖ exp(-(1/4D)/|f|² · n₁(t) · ε₃²)`
/// with `n₁(t) = ⌊t/‖f‖ - 1⌋`. Since `n₁(t) >= t/‖f‖ - 2`, `ε₂ = ε₁/2` and
/// `ε₃ = ε₁/(2‖f‖‖F‖)`, this is at most the two-term form
/// `2t‖f‖ [exp(-C₁(t/‖f‖-2)ε₁²) + exp(-C₂(t/‖f‖-2)ε₁²/(‖f‖‖F‖)²)]`
/// exactly when `C₁ = 1/(16D|F̃|²)` and `C₂ = 1/(16D|f|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdBoundConstants {
    pub epsilon: f64,
    pub d: f64,
    pub roof_sup: f64,
    pub roof_seminorm: f64,
    pub obs_sup: f64,
    pub tilde_seminorm: f64,
    pub c1: f64,
    pub c2: f64,
    pub c: f64,
    pub x: f64,
    pub y: f64,
    pub t0: f64,
}

impl LdBoundConstants {
    pub fn new(
        epsilon: f64,
        d: f64,
        roof_sup: f64,
        roof_seminorm: f64,
        obs_sup: f64,
        tilde_seminorm: f64,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidArgument(format!("D must be positive, got {d}")));
        }
        if roof_seminorm == 0.0 {
            return Err(Error::DegenerateSeminorm("roof"));
        }
        if tilde_seminorm == 0.0 || obs_sup == 0.0 {
            return Err(Error::DegenerateSeminorm("integrated observable"));
        }
        let c1 = 1.0 / (16.0 * d * tilde_seminorm * tilde_seminorm);
        let c2 = 1.0 / (16.0 * d * roof_seminorm * roof_seminorm);
        let c = c1.min(c2);
        let (x, y) = collapse_exponents(c, epsilon, roof_sup, obs_sup);
        Ok(LdBoundConstants {
            epsilon,
            d,
            roof_sup,
            roof_seminorm,
            obs_sup,
            tilde_seminorm,
            c1,
            c2,
            c,
            x,
            y,
            t0: threshold(epsilon, roof_sup, obs_sup),
        })
    }

    /// `B = (4 D |g|_θ²)^{-1}`.
    pub fn b(&self, seminorm: f64) -> f64 {
        1.0 / (4.0 * self.d * seminorm * seminorm)
    }

    fn product(&self) -> f64 {
        self.roof_sup * self.obs_sup
    }

    /// `ε₁(t) = ε - ‖f‖‖F‖(1 + ‖f‖)/t`.
    pub fn epsilon1(&self, t: f64) -> f64 {
        self.epsilon - self.product() * (1.0 + self.roof_sup) / t
    }

    pub fn epsilon2(&self, t: f64) -> f64 {
        self.epsilon1(t) / 2.0
    }

    pub fn epsilon3(&self, t: f64) -> f64 {
        self.epsilon1(t) / (2.0 * self.product())
    }

    /// `n₁(t) = ⌊t/‖f‖ - 1⌋`.
    pub fn n1(&self, t: f64) -> f64 {
        (t / self.roof_sup - 1.0).floor()
    }

    /// The two-term bound written with `C₁`, `C₂`.
    pub fn two_term(&self, t: f64) -> f64 {
        let e1 = self.epsilon1(t);
        let laps = t / self.roof_sup - 2.0;
        let pre = 2.0 * t * self.roof_sup;
        pre * (-self.c1 * laps * e1 * e1).exp() + pre * (-self.c2 * laps * e1 * e1 / self.product().powi(2)).exp()
    }

    /// The two-term bound as it appears before the constants are matched,
    /// with `B` and the integer `n₁(t)`.
    pub fn proof_form(&self, t: f64) -> f64 {
        let n1 = self.n1(t);
        let pre = 2.0 * t * self.roof_sup;
        let (e2, e3) = (self.epsilon2(t), self.epsilon3(t));
        pre * (-self.b(self.tilde_seminorm) * n1 * e2 * e2).exp()
            + pre * (-self.b(self.roof_seminorm) * n1 * e3 * e3).exp()
    }

    /// Whether the two-term bound collapses into `exp(-Xt + log t + Y)`:
    /// the second exponent dominates only when `‖f‖‖F‖ >= 1`.
    pub fn collapses(&self) -> bool {
        self.product() >= 1.0
    }
}

/// `(X, Y)` from `C`, `ε`, `‖f‖`, `‖F‖`.
pub fn collapse_exponents(c: f64, epsilon: f64, roof_sup: f64, obs_sup: f64) -> (f64, f64) {
    let x = c * epsilon * epsilon / (4.0 * roof_sup.powi(3) * obs_sup * obs_sup);
    let y = (4.0 * roof_sup).ln() + 2.0 * c * epsilon * epsilon / (4.0 * (roof_sup * obs_sup).powi(2));
    (x, y)
}

/// `T₀ = max(2‖f‖, 2‖f‖‖F‖(1 + ‖f‖)/ε)`.
pub fn threshold(epsilon: f64, roof_sup: f64, obs_sup: f64) -> f64 {
    (2.0 * roof_sup).max(2.0 * roof_sup * obs_sup * (1.0 + roof_sup) / epsilon)
}

/// Constants for roof `f` and observable `F` with its exact `F̃` and `‖F‖`.
pub fn ld_constants(f: &RoofFunction, obs: &FlowObservable, epsilon: f64, d: f64) -> Result<LdBoundConstants> {
    LdBoundConstants::new(epsilon, d, f.sup_norm(), f.seminorm(), obs.sup_norm(), obs.tilde().seminorm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdBound {
    /// `exp(-Xt + log t + Y)`.
    pub single: f64,
    /// Its logarithm, `-Xt + log t + Y`.
    pub log_single: f64,
    /// The sharper two-term bound.
    pub two_term: f64,
}

pub fn ld_bound(constants: &LdBoundConstants, t: f64) -> Result<LdBound> {
    if !(t >= constants.t0) || !t.is_finite() {
        return Err(Error::BelowThreshold { t, t0: constants.t0 });
    }
    let log_single = -constants.x * t + t.ln() + constants.y;
    Ok(LdBound { single: log_single.exp(), log_single, two_term: constants.two_term(t) })
}

/// Where flow orbits start when measuring deviations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelMode {
    /// `(x, 0)` with `x ~ μ`.
    Zero,
    /// `(x, l) ~ ν`.
    Nu,
}

/// Mass of the deviation event in its `>= ε` and `> ε` forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationMass {
    pub at_least: f64,
    pub exceeding: f64,
}

fn deviates(dev: f64, epsilon: f64) -> (bool, bool) {
    (dev >= epsilon * (1.0 - BOUNDARY_SLACK), dev > epsilon * (1.0 + BOUNDARY_SLACK))
}

fn check_inputs(epsilon: f64, t: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::BadTime(t));
    }
    Ok(())
}

/// Longest word an orbit segment of duration `t` from level 0 can read,
/// given `f >= 1` and an observable resolved at `depth`.
fn zero_level_len(t: f64, depth: usize) -> usize {
    t.floor() as usize + depth
}

fn nu_level_len(f: &RoofFunction, t: f64, depth: usize) -> usize {
    (t + f.sup_norm()).floor() as usize + depth
}

fn check_budget(mu: &GibbsMarkovMeasure, len: usize, budget: u128) -> Result<()> {
    let count = mu.spec().count_words(len);
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    Ok(())
}

/// Runs a pruned depth-first walk over all words up to `max_len`, split
/// into independent subtrees processed in parallel. Each subtree
/// accumulates into a pair of sums; the pairs are combined in a fixed order.
fn parallel_walk<V>(mu: &GibbsMarkovMeasure, max_len: usize, visit: V) -> [f64; 2]
where
    V: Fn(&[u8], f64, &mut [f64; 2]) -> bool + Sync,
{
    let spec = mu.spec();
    let mut split = mu.state_len().max(1);
    while split < max_len && spec.count_words(split) < 256 {
        split += 1;
    }
    let parts: Vec<[f64; 2]> = spec
        .enumerate_indices(split)
        .into_par_iter()
        .map(|prefix| {
            let mut acc = [0.0; 2];
            mu.walk_from(&prefix, &mut |w, mass| visit(w, mass, &mut acc));
            acc
        })
        .collect();
    let first: Vec<f64> = parts.iter().map(|p| p[0]).collect();
    let second: Vec<f64> = parts.iter().map(|p| p[1]).collect();
    [pairwise_sum(&first), pairwise_sum(&second)]
}

/// Partial roof sums `[S_0, ..., S_{m+1}]` with `S_m <= total < S_{m+1}`,
/// or `None` when `w` is too short to decide.
fn lap_sums(f: &RoofFunction, w: &[u8], total: f64) -> Option<Vec<f64>> {
    let k = f.depth();
    let mut sums = vec![0.0];
    let mut j = 0;
    loop {
        if j + k > w.len() {
            return None;
        }
        let next = sums[j] + f.eval_indices(&w[j..]);
        sums.push(next);
        if total < next {
            return Some(sums);
        }
        j += 1;
    }
}

/// Lebesgue measure of the levels `l ∈ [0, f(x))` on the cylinder `[w]`
/// whose time-`t` average deviates, in both forms; `None` if `w` is too short.
fn deviating_levels(
    f: &RoofFunction,
    obs: &FlowObservable,
    w: &[u8],
    t: f64,
    mean: f64,
    epsilon: f64,
) -> Option<(f64, f64)> {
    let fx = f.eval_indices(w);
    let sums = lap_sums(f, w, fx + t)?;
    let m = sums.len() - 2;
    if m + obs.joint_depth() > w.len() {
        return None;
    }
    let q0 = obs.poly_indices(w).antiderivative();
    let mut tilde_sum = 0.0;
    let (mut at_least, mut exceeding) = (0.0, 0.0);
    for j in 0..=m {
        let lo = (sums[j] - t).max(0.0);
        let hi = (sums[j + 1] - t).min(fx);
        if hi > lo {
            // On this piece l + t lies in lap j, so
            // ∫_l^{l+t} F = S_j F̃ + Q_j(l + t - S_j) - Q_0(l).
            let qj = obs.poly_indices(&w[j..]).antiderivative().shift(t - sums[j]);
            let dev = (&(&qj - &q0) + &Polynomial::constant(tilde_sum - mean * t)).scale(1.0 / t);
            let upper = &dev - &Polynomial::constant(epsilon);
            let lower = &dev + &Polynomial::constant(epsilon);
            let slack = epsilon * BOUNDARY_SLACK;
            at_least += upper.measure_where(lo, hi, |v| v >= -slack) + lower.measure_where(lo, hi, |v| v <= slack);
            exceeding += upper.measure_where(lo, hi, |v| v > slack) + lower.measure_where(lo, hi, |v| v < -slack);
        }
        tilde_sum += obs.tilde().eval_indices(&w[j..]);
    }
    Some((at_least, exceeding))
}

/// Exact probability that the time-`t` flow average of `F` deviates from
/// `∫F dν` by at least (and by more than) `ε`.
///
/// With [`LevelMode::Zero`] the average is constant on cylinders of length
/// `⌊t⌋ + depth`; with [`LevelMode::Nu`] each cylinder's level interval is
/// split at the roots of the piecewise-polynomial deviation.
pub fn empirical_z_exact(
    mu: &GibbsMarkovMeasure,
    f: &RoofFunction,
    obs: &FlowObservable,
    epsilon: f64,
    t: f64,
    mode: LevelMode,
    budget: u128,
) -> Result<DeviationMass> {
    check_inputs(epsilon, t)?;
    let mean = nu_integral(mu, f, obs);
    let depth = obs.joint_depth().max(mu.state_len());
    let [at_least, exceeding] = match mode {
        LevelMode::Zero => {
            let len = zero_level_len(t, depth);
            check_budget(mu, len, budget)?;
            parallel_walk(mu, len, |w, mass, acc| match obs.integral_from_base(f, w, t) {
                Ok(v) => {
                    let (ge, gt) = deviates((v / t - mean).abs(), epsilon);
                    acc[0] += if ge { mass } else { 0.0 };
                    acc[1] += if gt { mass } else { 0.0 };
                    false
                }
                Err(_) => true,
            })
        }
        LevelMode::Nu => {
            let len = nu_level_len(f, t, depth);
            check_budget(mu, len, budget)?;
            let norm = f.mean_under(mu);
            parallel_walk(mu, len, |w, mass, acc| match deviating_levels(f, obs, w, t, mean, epsilon) {
                Some((ge, gt)) => {
                    acc[0] += mass * ge / norm;
                    acc[1] += mass * gt / norm;
                    false
                }
                None => true,
            })
        }
    };
    Ok(DeviationMass { at_least, exceeding })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// Binomial standard error `sqrt(p(1-p)/n)`.
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
}

impl McEstimate {
    pub fn from_counts(hits: u64, samples: u64) -> Self {
        let p = hits as f64 / samples as f64;
        McEstimate { estimate: p, std_error: (p * (1.0 - p) / samples as f64).sqrt(), samples, hits }
    }
}

/// Monte Carlo frequency of the `>= ε` deviation event. Samples are split
/// into fixed blocks with independent generator streams, so the result
/// depends only on `seed` and `n_samples`.
#[allow(clippy::too_many_arguments)]
pub fn empirical_z_mc(
    mu: &GibbsMarkovMeasure,
    f: &RoofFunction,
    obs: &FlowObservable,
    epsilon: f64,
    t: f64,
    n_samples: u64,
    seed: u64,
    mode: LevelMode,
) -> Result<McEstimate> {
    check_inputs(epsilon, t)?;
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1".into()));
    }
    let mean = nu_integral(mu, f, obs);
    let depth = obs.joint_depth().max(mu.state_len());
    let len = match mode {
        LevelMode::Zero => zero_level_len(t, depth),
        LevelMode::Nu => nu_level_len(f, t, depth),
    };
    let counts = block_sizes(n_samples)
        .into_par_iter()
        .enumerate()
        .map(|(b, n)| -> Result<u64> {
            let mut rng = block_rng(seed, b as u64);
            let mut hits = 0;
            for _ in 0..n {
                let integral = match mode {
                    LevelMode::Zero => obs.integral_from_base(f, &mu.sample_indices(len, &mut rng), t)?,
                    LevelMode::Nu => flow_birkhoff(obs, f, &sample_nu_indices(mu, f, len, &mut rng).0, t)?,
                };
                hits += u64::from(deviates((integral / t - mean).abs(), epsilon).0);
            }
            Ok(hits)
        })
        .collect::<Result<Vec<u64>>>()?;
    Ok(McEstimate::from_counts(counts.iter().sum(), n_samples))
}

/// One grid point of a concentration fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DFitPoint {
    pub probe: usize,
    pub m: usize,
    pub epsilon: f64,
    /// `μ{|S_m g/m - ∫g dμ| >= ε}`, exact.
    pub probability: f64,
    /// Least `D` for which `2 exp(-B m ε²)` dominates `probability`.
    pub implied_d: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DFit {
    pub d: f64,
    pub points: Vec<DFitPoint>,
    /// True when no grid point had positive probability and [`DEFAULT_D`] was used.
    pub fallback: bool,
}

/// `μ{|S_m g/m - ∫g dμ| >= ε}` by exhaustive enumeration.
pub fn birkhoff_deviation_probability(
    mu: &GibbsMarkovMeasure,
    g: &LocallyConstantFunction,
    m: usize,
    epsilon: f64,
    budget: u128,
) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let mean = mu.integrate(g);
    let len = (m + g.depth() - 1).max(mu.state_len());
    check_budget(mu, len, budget)?;
    let [p, _] = parallel_walk(mu, len, |w, mass, acc| {
        if w.len() < len {
            return true;
        }
        let avg = g.birkhoff_sum_indices(w, m) / m as f64;
        if deviates((avg - mean).abs(), epsilon).0 {
            acc[0] += mass;
        }
        false
    });
    Ok(p)
}

/// Least concentration constant consistent with exact deviation
/// probabilities over the grid, times [`D_SAFETY_FACTOR`].
pub fn fit_d(
    mu: &GibbsMarkovMeasure,
    probes: &[LocallyConstantFunction],
    m_grid: &[usize],
    epsilon_grid: &[f64],
    budget: u128,
) -> Result<DFit> {
    if probes.is_empty() || m_grid.is_empty() || epsilon_grid.is_empty() {
        return Err(Error::InvalidArgument("fit grids must be nonempty".into()));
    }
    let mut points = Vec::new();
    let mut sup = 0.0f64;
    for (i, g) in probes.iter().enumerate() {
        let semi = g.seminorm();
        for &m in m_grid {
            for &epsilon in epsilon_grid {
                let probability = birkhoff_deviation_probability(mu, g, m, epsilon, budget)?;
                let implied_d = (probability > 0.0 && semi > 0.0).then(|| {
                    m as f64 * epsilon * epsilon / (4.0 * semi * semi * -(probability / 2.0).ln())
                });
                if let Some(d) = implied_d {
                    sup = sup.max(d);
                }
                points.push(DFitPoint { probe: i, m, epsilon, probability, implied_d });
            }
        }
    }
    let fallback = sup == 0.0;
    let d = if fallback { DEFAULT_D } else { sup * D_SAFETY_FACTOR };
    Ok(DFit { d, points, fallback })
}
