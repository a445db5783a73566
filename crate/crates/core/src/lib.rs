//! Principal polarizations on abelian surfaces of GL2-type.
//!
//! Exact lattice algebra ([`exact_forms`], [`quad_order`], [`polarization_kit`]),
//! multiprecision analytic data ([`torus_analytic`], [`theta_igusa`]) and
//! finite-field cross-checks ([`ffield_verify`]).

pub mod error;
pub mod exact_forms;
pub mod ffield_verify;
pub mod par;
pub mod polarization_kit;
pub mod quad_order;
pub mod theta_igusa;
pub mod torus_analytic;

pub use error::{Error, Result};
