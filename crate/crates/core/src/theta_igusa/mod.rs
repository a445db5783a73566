//! Genus-2 theta constants, split/Jacobian verdicts and Igusa invariants.

mod igusa;
mod theta;

pub use igusa::{
    absolute_invariants, curve_invariants, igusa_clebsch, same_curve_over_closure, AbsoluteInvariants, InvariantSet,
    SexticCurve,
};
pub use theta::{
    decomposition_verdict, decomposition_verdict_with, default_threshold, even_theta_nulls, even_theta_nulls_with,
    verdict_from_nulls, ThetaCharacteristic, ThetaConfig, ThetaNullVector, Verdict,
};
