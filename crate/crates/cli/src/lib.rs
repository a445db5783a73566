//! Fixture loading, check execution and reports behind the `polkit` binary.

pub mod checks;
pub mod fixture;
pub mod report;

pub use checks::{run_fixture, Settings};
pub use fixture::{load_fixture, parse_fixture, validate_fixture, Fixture, SchemaError};
pub use report::{RunReport, Status};
