//! Size-power trade-off bounds for one-shot text detectors over diverse
//! writer populations, with brute-force verification, TV estimation, and
//! stratified false-positive-rate auditing.
//!
//! When a detector must decide from a single document whether an unknown
//! writer or an AI system produced it, the null hypothesis is composite:
//! every writer has their own distribution, and the detector does not know
//! whose document it is scoring. On finite sample spaces this crate makes
//! the resulting trade-offs exactly computable:
//!
//! - [`distributions`] — sample spaces, pmfs, TV distance, mixtures, and
//!   weighted populations with subgroup structure;
//! - [`detectors`] — extensional (possibly randomized) detectors, their
//!   per-student FPR and power, and the TV-tight optimal detector;
//! - [`bounds`] — the average-case, worst-case, and subgroup FPR bounds,
//!   the institution-wide aggregation, and the bound-map grid;
//! - [`verify`] — exact brute-force checks of every inequality on random
//!   instances, tightness searches, and institution-scale Monte Carlo;
//! - [`tvest`] — the classifier-accuracy route to TV lower bounds with its
//!   direction-of-inference guard;
//! - [`audit`] — the stratified FPR auditing pipeline over labeled
//!   detector-score records, with Wilson intervals and per-stratum gates;
//! - [`scenario`] — the JSON scenario file tying populations, AI models,
//!   and detectors together for the CLI and examples.
//!
//! Start with the runnable examples (one per capability) under
//! `examples/`, or with the `sizepower` binary's subcommands: `bound-map`,
//! `verify`, `simulate`, `estimate-tv`, and `audit`.
//!
//! Everything is deterministic given inputs and a seed: randomness flows
//! from explicit seeds through ChaCha streams, reports embed the seed, and
//! file outputs carry provenance stamps instead of timestamps.

pub mod audit;
pub mod bounds;
pub mod detectors;
pub mod distributions;
pub mod error;
pub mod provenance;
pub mod scenario;
pub mod tvest;
pub mod verify;

pub use detectors::{optimal_detector, threshold_detector, Detector};
pub use distributions::{
    mixture, tv_distance, Pmf, PopulationModel, SampleSpace, StudentType,
};
pub use error::{Error, Result};
pub use scenario::Scenario;
