//! Integrals `∫_{I_M} |K_n^α(x + t)| dμ(t)` over the complement classes of
//! `I_M`, compared with their coset-dependent bounds.

use dyadic_core::kernels::majorization_scan;
use dyadic_core::{cesaro_kernel, complement_classes};
use rayon::prelude::*;

use super::{check_alpha, check_positive, check_resolution, class_bound_exponents, class_members, Spread};
use crate::error::{invalid, HarnessResult};
use crate::report::{ExperimentReport, Row};

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma3Params {
    pub alpha: f64,
    pub resolutions: Vec<u32>,
    /// Number of evenly spaced probe orders in `(2^M, 2^{M'}]`; all when `None`.
    pub n_probes: Option<usize>,
    /// `M' - M`.
    pub working_extra: u32,
    pub stability_factor: f64,
}

/// Evenly spaced orders in `(lo, hi]`, or all of them.
pub fn probe_orders(lo: usize, hi: usize, count: Option<usize>) -> Vec<usize> {
    match count {
        None => (lo + 1..=hi).collect(),
        Some(c) => {
            let span = hi - lo;
            let mut v: Vec<usize> = (1..=c).map(|i| lo + (i * span).div_ceil(c)).collect();
            v.dedup();
            v
        }
    }
}

/// The bound attached to a class at order `n`.
pub fn class_bound(alpha: f64, m: u32, k: u32, l: Option<u32>, n: usize) -> f64 {
    match l {
        Some(l) => (alpha * l as f64 + k as f64 - m as f64).exp2() / (n as f64).powf(alpha),
        None => (k as f64 - m as f64).exp2(),
    }
}

struct ProbeResult {
    n: usize,
    /// Largest integral per class.
    values: Vec<f64>,
}

pub fn run(p: &Lemma3Params) -> HarnessResult<ExperimentReport> {
    check_alpha(p.alpha)?;
    check_positive("stability factor", p.stability_factor)?;
    if p.resolutions.is_empty() {
        return Err(invalid("empty resolution list"));
    }
    if p.working_extra == 0 {
        return Err(invalid("working resolution must exceed M"));
    }
    if p.n_probes == Some(0) {
        return Err(invalid("n_probes must be positive"));
    }
    for &m in &p.resolutions {
        check_resolution(m)?;
        check_resolution(m + p.working_extra)?;
    }
    let mut report = ExperimentReport::new("lemma3");
    report.parameter("alpha", p.alpha);
    report.parameter("resolutions", p.resolutions.clone());
    report.parameter("working_extra", p.working_extra);
    report.parameter("n_probes", p.n_probes.map(|c| c as u64));
    report.parameter("stability_factor", p.stability_factor);

    let mut pair_fits = Vec::new();
    let mut single_fits = Vec::new();
    let mut lemma2_fits = Vec::new();
    let mut all_finite = true;
    let mut violations = 0usize;

    for &m in &p.resolutions {
        let w = m + p.working_extra;
        let classes = complement_classes(m)?;
        let members = class_members(&classes, m, m);
        let probes = probe_orders(1 << m, 1 << w, p.n_probes);
        let fiber = 1usize << p.working_extra;
        let cell = (-(w as f64)).exp2();
        let results: Vec<ProbeResult> = probes
            .par_iter()
            .map(|&n| {
                let kernel = cesaro_kernel(p.alpha, n, w)?;
                let kv = kernel.values.values();
                let values = members
                    .iter()
                    .map(|xs| {
                        xs.iter()
                            .map(|&x| (0..fiber).map(|j| kv[x ^ (j << m)].abs()).sum::<f64>() * cell)
                            .fold(0.0f64, f64::max)
                    })
                    .collect();
                Ok(ProbeResult { n, values })
            })
            .collect::<HarnessResult<_>>()?;

        let mut pair_max = 0.0f64;
        let mut single_max = 0.0f64;
        for r in &results {
            for (class, &value) in classes.iter().zip(&r.values) {
                let (k, l) = class_bound_exponents(class);
                let bound = class_bound(p.alpha, m, k, l, r.n);
                let row = Row::new(
                    if l.is_some() { "pair" } else { "single" },
                    format!("M={m} {}", class.label()),
                    Some(r.n as u64),
                    value,
                    bound,
                );
                all_finite &= row.ratio.is_finite();
                if l.is_some() {
                    pair_max = pair_max.max(row.ratio);
                } else {
                    single_max = single_max.max(row.ratio);
                }
                report.push(row);
            }
        }

        let scan = majorization_scan(p.alpha, 1 << w, w)?;
        let lemma2 = scan.iter().fold(0.0f64, |a, c| a.max(c.worst_ratio));
        all_finite &= scan.iter().all(|c| c.worst_ratio.is_finite());
        violations += scan.iter().map(|c| c.violations).sum::<usize>();

        report.push(Row::plain("fit", format!("M={m} pair"), Some(m as u64), pair_max));
        report.push(Row::plain("fit", format!("M={m} single"), Some(m as u64), single_max));
        report.push(Row::plain("fit", format!("M={m} lemma2"), Some(m as u64), lemma2));
        report.metric(format!("c_pair_M{m}"), pair_max);
        report.metric(format!("c_single_M{m}"), single_max);
        report.metric(format!("c_lemma2_M{m}"), lemma2);
        report.metric(format!("classes_M{m}"), classes.len() as f64);
        pair_fits.push(pair_max);
        single_fits.push(single_max);
        lemma2_fits.push(lemma2);
    }

    report.check("ratios_finite", all_finite, "every integral and majorization ratio is finite");
    report.check(
        "support_violations",
        violations == 0,
        format!("{violations} slots where the majorant vanishes but the kernel does not"),
    );
    for (name, fits) in [("pair", &pair_fits), ("single", &single_fits), ("lemma2", &lemma2_fits)] {
        let s = Spread::of(fits.iter().copied());
        report.metric(format!("c_{name}"), s.max);
        report.check(format!("{name}_constant_stable"), s.stable_within(p.stability_factor), s.describe());
    }
    report.sort_rows();
    Ok(report)
}
