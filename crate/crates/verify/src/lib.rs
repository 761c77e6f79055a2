//! Experiment suites, configuration and CSV reports for the `dynwalk`
//! command-line tool.

pub mod config;
pub mod report;
pub mod suites;
pub mod summarize;

pub use config::ExperimentConfig;
pub use report::SuiteOutput;

/// Environment variable naming the default report directory.
pub const OUT_DIR_ENV: &str = "DYNWALK_OUT_DIR";
