//! Config-driven verification harness for `orlicz-core`.
//!
//! A TOML [`config::SuiteConfig`] names Orlicz functions and lists probe
//! suites; [`runner::run`] executes them in order and returns a
//! [`report::Report`] whose checks are keyed by inequality anchors such as
//! `eq7a`. Tables (intervals, defects, ratio curves) export as CSV with 12
//! significant digits.

pub mod config;
pub mod error;
pub mod report;
pub mod runner;
pub mod spec_json;
pub mod trials;

pub use error::LabError;
