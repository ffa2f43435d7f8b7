use crate::error::{Error, Result};
use crate::perron::{CyclicComponents, SparseMatrix};
use crate::suspension::RoofFunction;
use crate::thermo::{BlockChain, GibbsMarkovMeasure};

use super::Hole;

/// Cap on `k · nnz` for survivor masses computed by kernel powers.
pub const KERNEL_POWER_BUDGET: u128 = 10_000_000_000;

/// The equilibrium state's chain on `L`-words with every transition into
/// the hole removed. `L` is large enough that the hole, the potential and
/// a roof of the given depth are all functions of the current state.
#[derive(Debug, Clone)]
pub struct OpenSystem {
    chain: BlockChain,
    in_hole: Vec<bool>,
    open: SparseMatrix,
    components: CyclicComponents,
}

impl OpenSystem {
    pub fn new(mu: &GibbsMarkovMeasure, hole: &Hole, roof_depth: usize) -> Result<Self> {
        let spec = mu.spec();
        if hole.size() as u128 >= spec.count_words(hole.word_len()) {
            return Err(Error::HoleIsEverything);
        }
        let len = hole.word_len().max(mu.state_len()).max(roof_depth).max(1);
        let chain = mu.block_chain(len)?;
        let in_hole: Vec<bool> = (0..chain.num_states()).map(|i| hole.contains_indices(chain.state_word(i))).collect();
        let open = SparseMatrix::new(
            (0..chain.num_states())
                .map(|i| chain.successors(i).iter().copied().filter(|&(j, _)| !in_hole[j]).collect())
                .collect(),
        );
        let components = CyclicComponents::of(&open);
        Ok(OpenSystem { chain, in_hole, open, components })
    }

    pub fn chain(&self) -> &BlockChain {
        &self.chain
    }

    pub fn in_hole(&self, state: usize) -> bool {
        self.in_hole[state]
    }

    pub fn open_kernel(&self) -> &SparseMatrix {
        &self.open
    }

    /// `μ{x : σ^i x ∉ I, 0 <= i < k}` by exact kernel powers.
    pub fn survivor_mass(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let nnz: usize = (0..self.open.dim()).map(|i| self.open.row(i).len()).sum();
        let work = k as u128 * nnz as u128;
        if work > KERNEL_POWER_BUDGET {
            return Err(Error::BudgetExceeded { count: work, budget: KERNEL_POWER_BUDGET });
        }
        let mut x: Vec<f64> =
            self.chain.initial().iter().zip(&self.in_hole).map(|(&m, &h)| if h { 0.0 } else { m }).collect();
        let mut y = vec![0.0; x.len()];
        for _ in 1..k {
            self.open.vec_mul(&x, &mut y);
            std::mem::swap(&mut x, &mut y);
        }
        Ok(x.iter().sum())
    }

    /// Spectral radius of the open kernel; zero when every orbit falls in.
    pub fn spectral_radius(&self) -> Result<f64> {
        self.components.spectral_radius(&self.open)
    }

    /// `-log ρ`, infinite for a nilpotent open kernel.
    pub fn escape_rate(&self) -> Result<f64> {
        let rho = self.spectral_radius()?;
        Ok(if rho > 0.0 { -rho.ln() } else { f64::INFINITY })
    }

    /// Roof values on the states, requiring `L >= depth(f)`.
    pub fn roof_on_states(&self, f: &RoofFunction) -> Vec<f64> {
        (0..self.chain.num_states()).map(|i| f.eval_indices(self.chain.state_word(i))).collect()
    }

    /// Exact decay rate `s*` of `t ↦ μ{S_τ f >= t}`: the root of
    /// `ρ(diag(e^{s f}) Q) = 1`, which lies in `[R/‖f‖, R/min f]`.
    pub fn flow_escape_rate_exact(&self, f: &RoofFunction) -> Result<f64> {
        let rate = self.escape_rate()?;
        if !rate.is_finite() {
            return Ok(f64::INFINITY);
        }
        let roof = self.roof_on_states(f);
        let log_rho = |s: f64| -> Result<f64> {
            let weights: Vec<f64> = roof.iter().map(|&v| (s * v).exp()).collect();
            Ok(self.components.spectral_radius(&self.open.scale_rows(&weights))?.ln())
        };
        let (mut lo, mut hi) = (rate / f.sup_norm(), rate / f.min_value());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if log_rho(mid)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// `R(I) = -log ρ(Q_I)` for the open kernel `Q_I`.
pub fn discrete_escape_rate(mu: &GibbsMarkovMeasure, hole: &Hole) -> Result<f64> {
    OpenSystem::new(mu, hole, 1)?.escape_rate()
}

/// `μ{x : σ^i x ∉ I, 0 <= i < k}`.
pub fn survivor_mass(mu: &GibbsMarkovMeasure, hole: &Hole, k: usize) -> Result<f64> {
    OpenSystem::new(mu, hole, 1)?.survivor_mass(k)
}
