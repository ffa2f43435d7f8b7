//! Equilibrium states on subshifts of finite type, suspension semi-flows
//! over them, explicit large-deviation bounds for flow averages, and escape
//! rates through shrinking holes.

pub mod deviations;
pub mod error;
pub mod escape;
pub mod perron;
pub mod poly;
pub mod sft;
pub mod stats;
pub mod suspension;
pub mod thermo;

pub use error::{Error, Result};
pub use sft::{LocallyConstantFunction, Norms, SftSpec, Word};
pub use suspension::{FlowObservable, FlowPoint, RoofFunction};
pub use thermo::GibbsMarkovMeasure;
