//! Origin-centric affine reduction of dimensionality.
//!
//! A scatter `X` is centered on a chosen origin and replaced by its
//! Mahalanobis canonical form `H`, which depends on `X` only up to nonsingular
//! affine maps. A rank-`q` image `Z = HB` is then sought that best reproduces
//! all squared inter-point distances of `H`. Because those distances include
//! the (explicit or implicit) distances to the origin, the fit puts extra
//! weight on how far each point sits from the origin.
//!
//! Modules follow the pipeline: [`geometry`] and [`centering`] prepare the
//! scatter, [`canonical`] builds `H`, [`objective`] and [`optimizer`] find `B`,
//! and [`baselines`] holds classical PCA plus interpretation aids.

pub mod baselines;
pub mod canonical;
pub mod centering;
mod config;
mod error;
pub mod fixtures;
pub mod geometry;
mod linalg;
pub mod objective;
pub mod optimizer;

pub use canonical::{canonical_form, canonical_form_weighted, CanonicalForm, SimplexKind};
pub use centering::{CenteringVector, MedianResult};
pub use config::Configuration;
pub use error::{Error, Result};
pub use geometry::{OriginDistances, SquaredDistances};
pub use objective::{ObjectiveValue, ReductionObjective};
pub use optimizer::{ReductionResult, SearchOptions};
