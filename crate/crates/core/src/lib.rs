//! Numerical laboratory for Kähler–Einstein metrics with cone singularities of small angle.
//!
//! The crate evaluates the Calabi-ansatz potentials and the model metrics they define,
//! their collapse limits, the radial gluing with the model Ricci-flat metric, and Poisson
//! solvers plus Hölder-norm probes for the Laplacian of the flat cone of angle `2πβ`.

pub mod calabi;
pub mod cli;
pub mod collapse;
pub mod cone;
pub mod error;
pub mod fit;
pub mod glue;
pub mod interp;
pub mod linalg;
pub mod metric;
pub mod quad;
pub mod schauder;
pub mod verify;

pub use calabi::{constants, AnsatzSign, ConstantsReport, PotentialProfile, ScaledPotential};
pub use error::{ConeError, Result};
pub use fit::ScalingFit;
