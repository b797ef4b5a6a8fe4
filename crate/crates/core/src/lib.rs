//! Curvature of weighted Sasaki metrics g^{f1,f2} = f1·π*g ⊕ f2·π*g on the
//! tangent bundle TM and on tangent sphere bundles S_rM, evaluated from
//! closed-form block formulas and checked against a brute-force coordinate
//! computation on the 2m-dimensional bundle chart.

pub mod base_manifold;
pub mod cli;
pub mod conformal_fiber;
pub mod coordinate_oracle;
pub mod error;
pub mod levi_civita;
pub mod output;
pub mod sasaki;
pub mod sphere_bundle;
pub mod tensorkit;

pub use error::{GeoError, Result};
