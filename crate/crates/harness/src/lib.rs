//! Scenario runner and verification suites for `unidisc`.

pub mod error;
pub mod report;
pub mod scenario;
pub mod suites;

pub use error::{HarnessError, Result};
pub use report::{CheckRecord, Outcome, SuiteReport};
pub use scenario::{Format, Scenario, SuiteId};
pub use suites::{run_all, run_suite};
