use crate::sft::{common_prefix, Word};
use crate::stats::least_squares;
use crate::thermo::GibbsMarkovMeasure;

use super::HoleSequence;

/// Tolerance of the dominance check `μ(I_n) <= c ρ^n`.
const DOMINANCE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NestedRow {
    pub n: usize,
    pub size: usize,
    pub measure: f64,
    /// Largest `m` with `I_n ⊆ [z_1 ... z_m]`.
    pub l: usize,
    pub contains_z: bool,
    /// `I_n ⊆ I_{n-1}`; `None` for the first hole.
    pub inside_previous: Option<bool>,
    /// `σ^{-p}(I_n) ∩ [z]_p ⊆ I_n`; `None` when `p = 0`.
    pub pullback: Option<bool>,
}

/// Verdicts on the five structural requirements of a shrinking hole sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedReport {
    pub rows: Vec<NestedRow>,
    /// Each hole is a union of cylinders of length `n`.
    pub cylinders: bool,
    /// Holes decrease and all contain `z`.
    pub nested: bool,
    pub c: f64,
    pub rho: f64,
    /// `μ(I_n) <= c ρ^n` with `ρ < 1`.
    pub exponential: bool,
    pub kappa: f64,
    pub kappa_min: f64,
    /// `κ_min < l_n / n` for every `n`.
    pub long_prefix: bool,
    /// Least `n` from which the pullback inclusion holds throughout the range.
    pub n0: Option<usize>,
    /// `None` when `z` is aperiodic.
    pub periodic: Option<bool>,
}

impl NestedReport {
    pub fn verdicts(&self) -> [Option<bool>; 5] {
        [Some(self.cylinders), Some(self.nested), Some(self.exponential), Some(self.long_prefix), self.periodic]
    }
}

pub fn nested_check(holes: &HoleSequence, mu: &GibbsMarkovMeasure, kappa_min: f64) -> NestedReport {
    let spec = holes.spec();
    let z = holes.z();
    let p = holes.period();
    let mut rows = Vec::new();
    let mut cylinders = true;
    for (i, hole) in holes.holes().iter().enumerate() {
        let n = hole.word_len();
        cylinders &= hole.words().iter().all(|w| w.len() == n && spec.is_admissible(w));
        let zn = z.prefix(n);
        let l = hole.words().iter().map(|w| common_prefix(w.indices(), zn.indices())).min().unwrap_or(0);
        let inside_previous =
            (i > 0).then(|| hole.words().iter().all(|w| holes.holes()[i - 1].contains(&w.prefix(n - 1))));
        let pullback = (p > 0).then(|| {
            z.len() >= p
                && hole.words().iter().all(|u| {
                    let mut x = z.prefix(p).indices().to_vec();
                    x.extend_from_slice(u.indices());
                    let x = Word::from_indices(x);
                    !spec.is_admissible(&x) || hole.contains(&x)
                })
        });
        rows.push(NestedRow {
            n,
            size: hole.size(),
            measure: hole.measure(mu),
            l,
            contains_z: z.len() >= n && hole.contains(&zn),
            inside_previous,
            pullback,
        });
    }
    let nested = rows.iter().all(|r| r.contains_z && r.inside_previous != Some(false));

    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.measure.ln()).collect();
    let (c, rho, exponential) = match least_squares(&xs, &ys) {
        Some(fit) if ys.iter().all(|y| y.is_finite()) => {
            let rho = fit.slope.exp();
            let log_c = xs.iter().zip(&ys).map(|(x, y)| y - x * fit.slope).fold(f64::NEG_INFINITY, f64::max);
            let c = log_c.exp();
            let dominated = rows.iter().all(|r| r.measure <= c * rho.powi(r.n as i32) * (1.0 + DOMINANCE_SLACK));
            (c, rho, rho < 1.0 && dominated)
        }
        _ => (f64::NAN, f64::NAN, false),
    };

    let kappa = rows.iter().map(|r| r.l as f64 / r.n as f64).fold(f64::INFINITY, f64::min);
    let long_prefix = rows.iter().all(|r| r.l as f64 / r.n as f64 > kappa_min);

    let n0 = (p > 0)
        .then(|| {
            let tail = rows.iter().rev().take_while(|r| r.pullback == Some(true)).count();
            (tail > 0).then(|| rows[rows.len() - tail].n)
        })
        .flatten();
    let periodic = (p > 0).then_some(n0.is_some());

    NestedReport { rows, cylinders, nested, c, rho, exponential, kappa, kappa_min, long_prefix, n0, periodic }
}
