//! Force sensing with a constant-tension wire.
//!
//! - [`model`]: point-contact and homogeneous-load force estimators.
//! - [`oracle`]: discretized energy minimizer used to validate the closed forms.
//! - [`ingest`]: sensor/pose CSV parsing, calibration and time alignment.
//! - [`mapping`]: force-field grid maps and their CSV/PGM export.
//! - [`sim`]: synthetic traversal logs for closed-loop checks.

pub mod ingest;
pub mod mapping;
pub mod model;
pub mod oracle;
pub mod sim;

pub use model::{Estimator, ForceEstimate, ForceModel, WireConfig};
