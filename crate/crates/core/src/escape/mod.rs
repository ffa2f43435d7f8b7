//! Escape through shrinking holes: discrete escape rates from open kernels,
//! the periodic correction `γ(z)`, hitting times, flow escape rates from
//! roof sums, the structural checks on a hole sequence, and the ratio report.

mod flow;
mod hole;
mod nested;
mod open;
mod report;

pub use flow::{flow_escape_rate, FlowEscapeEstimate, FlowEscapeParams, MIN_TAIL_SURVIVORS};
pub use hole::{Hole, HoleSequence};
pub use nested::{nested_check, NestedReport, NestedRow};
pub use open::{discrete_escape_rate, survivor_mass, OpenSystem, KERNEL_POWER_BUDGET};
pub use report::{escape_report, EscapeReport, EscapeRow};

use crate::error::{Error, Result};
use crate::sft::Word;
use crate::thermo::GibbsMarkovMeasure;

/// Whether `w` repeats with period `q` over its whole length.
fn has_period(w: &[u8], q: usize) -> bool {
    (q..w.len()).all(|i| w[i] == w[i - q])
}

/// `γ(z) = 1 - exp(S_p φ(z) - p P(φ))` for `z` of prime period `p`, and 1
/// for aperiodic `z` (`p = 0`).
pub fn gamma(mu: &GibbsMarkovMeasure, z: &Word, p: usize) -> Result<f64> {
    if p == 0 {
        return Ok(1.0);
    }
    let zi = z.indices();
    if zi.len() < 2 * p {
        return Err(Error::WordTooShort { needed: 2 * p, have: zi.len() });
    }
    if !has_period(zi, p) {
        return Err(Error::NotActuallyPeriodic(p));
    }
    if let Some(q) = (1..p).find(|&q| has_period(zi, q)) {
        return Err(Error::PeriodNotPrime { period: p, smaller: q });
    }
    let phi = mu.potential();
    let orbit: Vec<u8> = (0..p + phi.depth() - 1).map(|i| zi[i % p]).collect();
    let sum = phi.birkhoff_sum_indices(&orbit, p);
    Ok(1.0 - (sum - p as f64 * mu.pressure()).exp())
}

/// Least `m >= 1` with the `n`-window of `w` at offset `m` in the hole, or
/// `None` if no window within the truncation hits.
pub fn hitting_time(hole: &Hole, w: &Word) -> Option<usize> {
    let n = hole.word_len();
    let wi = w.indices();
    (1..(wi.len() + 1).saturating_sub(n)).find(|&m| hole.contains_indices(&wi[m..]))
}
