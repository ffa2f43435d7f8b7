use rayon::prelude::*;

use crate::error::Result;
use crate::stats::derive_seed;
use crate::suspension::RoofFunction;
use crate::thermo::GibbsMarkovMeasure;

use super::{flow_escape_rate, gamma, nested_check, FlowEscapeEstimate, FlowEscapeParams, HoleSequence, NestedReport, OpenSystem};

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeRow {
    pub n: usize,
    pub mu_hole: f64,
    pub r_discrete: f64,
    pub ratio_discrete: f64,
    pub flow: FlowEscapeEstimate,
    /// `ν(I_n × [0, 1]) = μ(I_n) / ∫f dμ`.
    pub nu_slab: f64,
    /// `R̃ · ∫f dμ / μ(I_n)`.
    pub ratio_flow: f64,
    /// The flow band carried to the ratio scale.
    pub ratio_flow_band: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeReport {
    pub gamma: f64,
    pub roof_mean: f64,
    pub roof_sup: f64,
    /// `W = 1 + ‖f‖ / ∫f dμ`.
    pub w: f64,
    /// `γ(z) / W`.
    pub lower_bound: f64,
    /// `|γ/W - γ ∫f / (∫f + ‖f‖)|`.
    pub identity_gap: f64,
    pub rows: Vec<EscapeRow>,
    pub nested: NestedReport,
}

/// Discrete and flow escape ratios for every hole, with the lower bound `γ(z)/W`.
pub fn escape_report(
    mu: &GibbsMarkovMeasure,
    f: &RoofFunction,
    holes: &HoleSequence,
    params: &FlowEscapeParams,
    kappa_min: f64,
) -> Result<EscapeReport> {
    let nested = nested_check(holes, mu, kappa_min);
    let gamma = gamma(mu, holes.z(), holes.period())?;
    let roof_mean = f.mean_under(mu);
    let roof_sup = f.sup_norm();
    let w = 1.0 + roof_sup / roof_mean;
    let lower_bound = gamma / w;
    let identity_gap = (lower_bound - gamma * roof_mean / (roof_mean + roof_sup)).abs();

    let rows = holes
        .holes()
        .par_iter()
        .map(|hole| -> Result<EscapeRow> {
            let n = hole.word_len();
            let mu_hole = hole.measure(mu);
            let r_discrete = OpenSystem::new(mu, hole, 1)?.escape_rate()?;
            let flow_params = FlowEscapeParams { seed: derive_seed(params.seed, n as u64), ..params.clone() };
            let flow = flow_escape_rate(mu, f, hole, &flow_params)?;
            let scale = roof_mean / mu_hole;
            Ok(EscapeRow {
                n,
                mu_hole,
                r_discrete,
                ratio_discrete: r_discrete / mu_hole,
                nu_slab: mu_hole / roof_mean,
                ratio_flow: flow.rate * scale,
                ratio_flow_band: flow.band * scale,
                flow,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(EscapeReport { gamma, roof_mean, roof_sup, w, lower_bound, identity_gap, rows, nested })
}
