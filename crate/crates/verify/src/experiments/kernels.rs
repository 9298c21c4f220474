//! Closed forms of the dyadic Dirichlet and Fejér kernels against summation,
//! plus the pointwise majorization of `K_n^α`.

use dyadic_core::kernels::{
    dirichlet_dyadic_value, fejer_dyadic_numerator, fejer_numerator_brute_force, majorization_scan,
};
use dyadic_core::dirichlet_kernel;

use super::{check_alpha, check_nmax, walsh_sign};
use crate::error::HarnessResult;
use crate::report::{ExperimentReport, Row};

/// Kernel tables are printed only up to this resolution.
pub const TABLE_RESOLUTION_LIMIT: u32 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelsParams {
    pub alpha: f64,
    pub resolution: u32,
    pub n_max: usize,
}

pub fn run(p: &KernelsParams) -> HarnessResult<ExperimentReport> {
    check_alpha(p.alpha)?;
    check_nmax(p.n_max, p.resolution)?;
    let m = p.resolution;
    let len = 1usize << m;
    let mut report = ExperimentReport::new("kernels");
    report.parameter("alpha", p.alpha);
    report.parameter("resolution", m);
    report.parameter("n_max", p.n_max);

    // D_n by the Paley identity against incremental summation, every n
    let mut d = vec![0i64; len];
    let mut identity_mismatches = 0usize;
    for n in 1..=p.n_max {
        for (x, v) in d.iter_mut().enumerate() {
            *v += walsh_sign(n - 1, x);
        }
        let table = dirichlet_kernel(n, m)?;
        let exact = table.exact_numerators.as_deref().unwrap_or_default();
        identity_mismatches += exact.iter().zip(&d).filter(|(a, b)| a != b).count();
    }
    report.push(Row::plain("dirichlet", "identity_mismatches", None, identity_mismatches as f64));

    let top = usize::BITS - 1 - p.n_max.leading_zeros();
    let mut dyadic_mismatches = 0usize;
    let mut fejer_mismatches = 0usize;
    let mut d = vec![0i64; len];
    let mut k = 0usize;
    for j in 0..=top {
        let order = 1usize << j;
        while k < order {
            for (x, v) in d.iter_mut().enumerate() {
                *v += walsh_sign(k, x);
            }
            k += 1;
        }
        let dm = (0..len).filter(|&x| dirichlet_dyadic_value(j, x) != d[x]).count();
        let brute = fejer_numerator_brute_force(order, m)?;
        let fm = (0..len).filter(|&x| fejer_dyadic_numerator(j, x) != brute[x]).count();
        report.push(Row::plain("dirichlet_dyadic", "mismatches", Some(order as u64), dm as f64));
        report.push(Row::plain("fejer_dyadic", "mismatches", Some(order as u64), fm as f64));
        dyadic_mismatches += dm;
        fejer_mismatches += fm;
        if m <= TABLE_RESOLUTION_LIMIT {
            for x in 0..len {
                let value = fejer_dyadic_numerator(j, x) as f64 / order as f64;
                report.push(Row::plain("fejer_table", format!("x={x}"), Some(order as u64), value));
            }
        }
    }

    let scan = majorization_scan(p.alpha, p.n_max, m)?;
    let mut worst = 0.0f64;
    let mut violations = 0usize;
    for c in &scan {
        report.push(Row::plain("lemma2", "worst_ratio", Some(c.n as u64), c.worst_ratio));
        worst = worst.max(c.worst_ratio);
        violations += c.violations;
    }
    let finite = scan.iter().all(|c| c.worst_ratio.is_finite());

    report.metric("dirichlet_identity_mismatches", identity_mismatches as f64);
    report.metric("dirichlet_dyadic_mismatches", dyadic_mismatches as f64);
    report.metric("fejer_dyadic_mismatches", fejer_mismatches as f64);
    report.metric("lemma2_fitted_constant", worst);
    report.metric("lemma2_support_violations", violations as f64);
    report.check(
        "closed_forms_exact",
        identity_mismatches == 0 && dyadic_mismatches == 0 && fejer_mismatches == 0,
        format!("identity {identity_mismatches}, dirichlet {dyadic_mismatches}, fejer {fejer_mismatches} mismatched slots"),
    );
    report.check(
        "lemma2_majorization",
        finite && violations == 0,
        format!("worst ratio {worst}, support violations {violations}"),
    );
    report.sort_rows();
    Ok(report)
}
