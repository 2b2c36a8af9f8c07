//! Config-driven runs, comparisons and the front-speed fit behind the binary.

mod compare;
mod config;
mod front_speed;
mod run;
mod selftest;

pub use compare::{compare, compare_fields, ComparisonReport, ComparisonSection, PointDeviation, Reference, ScalingRow};
pub use config::{load_config, parse_config, InteractionSpec, OutputSpec, RunConfig, SystemKind, UnknownKeys};
pub use front_speed::{front_speed, FrontReport};
pub use run::{format_float, run, Derived, InvariantCheck, RunManifest, RunOutput, CSV_HEADER};
pub use selftest::{selftest, SelftestLine};
