//! Experiment harness for (C,α) means of Walsh–Fourier series.
//!
//! Every command produces an [`ExperimentReport`]: a parameter record, a table
//! of `(value, bound, ratio)` rows, fitted constants, and a pass/fail verdict.

pub mod error;
pub mod experiments;
pub mod phi;
pub mod report;

pub use error::{HarnessError, HarnessResult};
pub use phi::PhiSchedule;
pub use report::{emit, render, ExperimentReport, Format, Row, Verdict};
