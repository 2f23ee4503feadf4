//! The infinite-depth construction: nested laps `P^n`, the composite maps
//! `g`, lifted arcs `phi_n`, sampled `X_n`, and checks of its properties.

mod lift;
mod model;
mod seq;
mod verify;

pub use lift::{LiftSampler, XinfOptions, TAG_NAMES};
pub use model::{AffineH, DepthModel, Loc, G_DOMAIN_TOL};
pub use seq::{IndexSeq, LapTable};
pub use verify::{condition_report, Check, ReportOptions, Status, TailSample};
