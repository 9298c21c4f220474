//! Random atoms on `I_M`: vanishing of low-order means, pointwise coset
//! bounds, and the log-weighted maximal integral over the complement of `I_M`.

use dyadic_core::hardy::{random_atom, validate_atom};
use dyadic_core::{complement_classes, CesaroSweeper, CosetClass, DyadicFunction};
use rayon::prelude::*;

use super::{
    ceil_log2, check_alpha, check_positive, check_resolution, class_bound_exponents, class_members, Spread,
};
use crate::error::{invalid, HarnessResult};
use crate::report::{ExperimentReport, Row};

/// `σ_n^α a` for `n <= 2^M` counts as zero below this multiple of `‖a‖_∞`.
pub const VANISHING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1aParams {
    pub alpha: f64,
    pub resolutions: Vec<u32>,
    /// Largest order; `2^{M+2}` per resolution when `None`.
    pub n_max: Option<usize>,
    pub seeds: usize,
    pub seed: u64,
    pub stability_factor: f64,
}

/// Pointwise bound at order `n` on a class: `2^{αl+k} 2^{αM} / n^α` on
/// `I_{l+1}(e_k+e_l)` and `2^{αM+k}` on `I_M(e_k)`.
pub fn pointwise_bound(alpha: f64, m: u32, k: u32, l: Option<u32>, n: usize) -> f64 {
    match l {
        Some(l) => (alpha * (l + m) as f64 + k as f64).exp2() / (n as f64).powf(alpha),
        None => (alpha * m as f64 + k as f64).exp2(),
    }
}

/// Worst pointwise ratio on one class, with the value and bound attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassWorst {
    pub n: usize,
    pub value: f64,
    pub bound: f64,
}

impl ClassWorst {
    fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.value / self.bound
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomScan {
    /// `max_{n <= 2^M} ‖σ_n^α a‖_∞`.
    pub low_order_max: f64,
    pub classes: Vec<ClassWorst>,
    /// `∫ over the complement of I_M of (sup_{2^M < n <= n_max} |σ_n^α a| / ln^{1+α} n)^{1/(1+α)}`.
    pub integral: f64,
}

/// Scans one function supported on `I_M`; `classes` and `members` come from
/// [`complement_classes`] and the matching slot groups at the function's resolution.
pub fn scan_atom(
    alpha: f64,
    m: u32,
    n_max: usize,
    a: &DyadicFunction,
    classes: &[CosetClass],
    members: &[Vec<usize>],
) -> HarnessResult<AtomScan> {
    let sweeper = CesaroSweeper::new(alpha, a)?;
    let low = 1usize << m;
    let mut low_order_max = 0.0f64;
    sweeper.for_each(1..=low, |_, v| {
        low_order_max = v.iter().fold(low_order_max, |acc, x| acc.max(x.abs()));
    })?;
    let mut worst: Vec<ClassWorst> = vec![ClassWorst { n: low + 1, value: 0.0, bound: 1.0 }; classes.len()];
    let exps: Vec<(u32, Option<u32>)> = classes.iter().map(class_bound_exponents).collect();
    let mut sup = vec![0.0f64; a.len()];
    sweeper.for_each(low + 1..=n_max, |n, v| {
        let weight = (n as f64).ln().powf(1.0 + alpha);
        for (s, x) in sup.iter_mut().zip(v) {
            *s = s.max(x.abs() / weight);
        }
        for ((w, &(k, l)), xs) in worst.iter_mut().zip(&exps).zip(members) {
            let bound = pointwise_bound(alpha, m, k, l, n);
            let value = xs.iter().fold(0.0f64, |acc, &x| acc.max(v[x].abs()));
            if value / bound > w.ratio() {
                *w = ClassWorst { n, value, bound };
            }
        }
    })?;
    let p = 1.0 / (1.0 + alpha);
    let mask = low - 1;
    let integral = sup
        .iter()
        .enumerate()
        .filter(|(x, _)| x & mask != 0)
        .map(|(_, s)| s.powf(p))
        .sum::<f64>()
        * a.cell_measure();
    Ok(AtomScan {
        low_order_max,
        classes: worst,
        integral,
    })
}

struct AtomOutcome {
    seed: u64,
    valid: bool,
    sup: f64,
    scan: AtomScan,
}

pub fn run(p: &Theorem1aParams) -> HarnessResult<ExperimentReport> {
    check_alpha(p.alpha)?;
    check_positive("stability factor", p.stability_factor)?;
    if p.resolutions.is_empty() {
        return Err(invalid("empty resolution list"));
    }
    if p.seeds == 0 {
        return Err(invalid("at least one atom seed is required"));
    }
    let mut plan = Vec::new();
    for &m in &p.resolutions {
        check_resolution(m)?;
        let n_max = p.n_max.unwrap_or(1usize << (m + 2).min(usize::BITS - 1));
        if n_max <= 1usize << m {
            return Err(invalid(format!("n_max {n_max} must exceed 2^{m}")));
        }
        let w = ceil_log2(n_max);
        check_resolution(w)?;
        plan.push((m, n_max, w));
    }
    let exponent = 1.0 / (1.0 + p.alpha);
    let mut report = ExperimentReport::new("theorem1a");
    report.parameter("alpha", p.alpha);
    report.parameter("p", exponent);
    report.parameter("resolutions", p.resolutions.clone());
    report.parameter("n_max", plan.iter().map(|x| x.1 as u64).collect::<Vec<_>>());
    report.parameter("seeds", p.seeds as u64);
    report.parameter("seed", p.seed);
    report.parameter("stability_factor", p.stability_factor);

    let mut pair_fits = Vec::new();
    let mut single_fits = Vec::new();
    let mut integral_maxima = Vec::new();
    let mut all_valid = true;
    let mut worst_vanishing = 0.0f64;

    for &(m, n_max, w) in &plan {
        let classes = complement_classes(m)?;
        let members = class_members(&classes, m, w);
        let outcomes: Vec<AtomOutcome> = (0..p.seeds as u64)
            .into_par_iter()
            .map(|i| {
                let seed = p.seed.wrapping_add(i);
                let atom = random_atom(exponent, m, w, seed)?;
                let valid = validate_atom(&atom)?.passed();
                let scan = scan_atom(p.alpha, m, n_max, &atom.values, &classes, &members)?;
                Ok(AtomOutcome { seed, valid, sup: atom.values.sup_norm(), scan })
            })
            .collect::<HarnessResult<_>>()?;

        let mut vanishing = 0.0f64;
        let mut integral_max = 0.0f64;
        let mut best: Vec<ClassWorst> = vec![ClassWorst { n: 0, value: 0.0, bound: 1.0 }; classes.len()];
        for o in &outcomes {
            all_valid &= o.valid;
            if o.sup > 0.0 {
                vanishing = vanishing.max(o.scan.low_order_max / o.sup);
            }
            integral_max = integral_max.max(o.scan.integral);
            report.push(Row::plain("integral", format!("M={m}"), Some(o.seed), o.scan.integral));
            for (b, c) in best.iter_mut().zip(&o.scan.classes) {
                if c.ratio() > b.ratio() {
                    *b = *c;
                }
            }
        }
        let mut pair_max = 0.0f64;
        let mut single_max = 0.0f64;
        for (class, b) in classes.iter().zip(&best) {
            let is_pair = matches!(class, CosetClass::Pair { .. });
            let row = Row::new(
                if is_pair { "pointwise_pair" } else { "pointwise_single" },
                format!("M={m} {}", class.label()),
                Some(b.n as u64),
                b.value,
                b.bound,
            );
            if is_pair {
                pair_max = pair_max.max(row.ratio);
            } else {
                single_max = single_max.max(row.ratio);
            }
            report.push(row);
        }
        report.push(Row::new("vanishing", format!("M={m}"), Some(1 << m), vanishing, VANISHING_TOLERANCE));
        report.push(Row::plain("fit", format!("M={m} pair"), Some(m as u64), pair_max));
        report.push(Row::plain("fit", format!("M={m} single"), Some(m as u64), single_max));
        report.push(Row::plain("fit", format!("M={m} integral"), Some(m as u64), integral_max));
        report.metric(format!("c_pair_M{m}"), pair_max);
        report.metric(format!("c_single_M{m}"), single_max);
        report.metric(format!("integral_max_M{m}"), integral_max);
        worst_vanishing = worst_vanishing.max(vanishing);
        pair_fits.push(pair_max);
        single_fits.push(single_max);
        integral_maxima.push(integral_max);
    }

    report.metric("vanishing_max_relative", worst_vanishing);
    report.check("atoms_valid", all_valid, "every generated atom passes validation");
    report.check(
        "low_orders_vanish",
        worst_vanishing <= VANISHING_TOLERANCE,
        format!("max |σ_n a| / ‖a‖_∞ over n <= 2^M is {worst_vanishing:e}"),
    );
    for (name, fits) in [("pair", &pair_fits), ("single", &single_fits), ("integral", &integral_maxima)] {
        let s = Spread::of(fits.iter().copied());
        report.metric(format!("c_{name}"), s.max);
        report.check(format!("{name}_uniform"), s.stable_within(p.stability_factor), s.describe());
    }
    report.sort_rows();
    Ok(report)
}
