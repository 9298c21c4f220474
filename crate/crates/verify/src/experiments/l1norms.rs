//! `∫ |K_n^α| dμ` for every order up to `n_max`, with a bounded-tail verdict.

use dyadic_core::l1_norm_scan;

use super::{check_alpha, check_nmax, check_positive};
use crate::error::{invalid, HarnessResult};
use crate::report::{ExperimentReport, Row};

#[derive(Debug, Clone, PartialEq)]
pub struct L1NormsParams {
    pub alpha: f64,
    pub resolution: u32,
    pub n_max: usize,
    /// Allowed ratio of the tail maximum to the head maximum.
    pub tail_ratio: f64,
}

pub fn run(p: &L1NormsParams) -> HarnessResult<ExperimentReport> {
    check_alpha(p.alpha)?;
    check_nmax(p.n_max, p.resolution)?;
    check_positive("tail ratio", p.tail_ratio)?;
    if p.n_max < 4 {
        return Err(invalid(format!("n_max {} leaves no head range (need at least 4)", p.n_max)));
    }
    let head_end = p.n_max / 4;
    let mut report = ExperimentReport::new("l1norms");
    report.parameter("alpha", p.alpha);
    report.parameter("resolution", p.resolution);
    report.parameter("n_max", p.n_max);
    report.parameter("head_end", head_end);
    report.parameter("tail_ratio", p.tail_ratio);

    let scan = l1_norm_scan(p.alpha, p.n_max, p.resolution)?;
    let mut head = 0.0f64;
    let mut tail = 0.0f64;
    let mut dyadic = 0.0f64;
    for row in &scan {
        report.push(Row::plain("l1", "norm", Some(row.n as u64), row.norm));
        if row.n <= head_end {
            head = head.max(row.norm);
        } else {
            tail = tail.max(row.norm);
        }
        if row.n.is_power_of_two() {
            dyadic = dyadic.max(row.norm);
        }
    }
    report.metric("head_max", head);
    report.metric("tail_max", tail);
    report.metric("dyadic_order_max", dyadic);
    report.metric("tail_over_head", tail / head);
    report.check(
        "bounded_tail",
        tail.is_finite() && tail <= p.tail_ratio * head,
        format!("tail max {tail} vs {} x head max {head}", p.tail_ratio),
    );
    Ok(report)
}
