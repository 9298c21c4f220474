//! The family `f_{nk} = D_{2^{2nk+1}} - D_{2^{2nk}}`: exact partial-sum
//! identities, band lower bounds for `σ_q^α f_{nk}`, Hardy quasinorm decay and
//! the `φ`-weighted divergence statistic.

use dyadic_core::hardy::lp_integral;
use dyadic_core::{counterexample, dirichlet_kernel, hp_quasinorm, CesaroSweeper, MAX_RESOLUTION};

use super::{check_alpha, check_positive, walsh_sign, Spread};
use crate::error::{invalid, HarnessResult};
use crate::phi::PhiSchedule;
use crate::report::{ExperimentReport, Row};

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleParams {
    pub alpha: f64,
    pub nk_list: Vec<u32>,
    pub phis: Vec<PhiSchedule>,
    pub stability_factor: f64,
    /// Relative tolerance on the fitted log-slope of `‖f_{nk}‖_H`.
    pub slope_tolerance: f64,
}

/// Mismatched slots in the three-case description of `S_i f_{nk}`, checked
/// for every `i <= 2^{2nk+2}` at resolution `2nk+2`.
pub fn partial_sum_mismatches(nk: u32) -> HarnessResult<usize> {
    let r = 2 * nk + 2;
    let len = 1usize << r;
    let lo = 1usize << (2 * nk);
    let hi = lo << 1;
    let d_lo = dirichlet_kernel(lo, r)?.exact_numerators.unwrap_or_default();
    let d_hi = dirichlet_kernel(hi, r)?.exact_numerators.unwrap_or_default();
    let f: Vec<i64> = d_hi.iter().zip(&d_lo).map(|(a, b)| a - b).collect();
    let mut s = vec![0i64; len];
    let mut mismatches = 0;
    for i in 0..=len {
        let expected: Vec<i64> = if i <= lo {
            vec![0; len]
        } else if i < hi {
            let d = dirichlet_kernel(i, r)?.exact_numerators.unwrap_or_default();
            d.iter().zip(&d_lo).map(|(a, b)| a - b).collect()
        } else {
            f.clone()
        };
        mismatches += s.iter().zip(&expected).filter(|(a, b)| a != b).count();
        if i < len && (lo..hi).contains(&i) {
            for (x, v) in s.iter_mut().enumerate() {
                *v += walsh_sign(i, x);
            }
        }
    }
    Ok(mismatches)
}

/// Mismatched slots in `D_{j+2^{2nk}} - D_{2^{2nk}} = w_{2^{2nk}} D_j`,
/// `1 <= j < 2^{2nk}`, at resolution `2nk+1`.
pub fn shift_identity_mismatches(nk: u32) -> HarnessResult<usize> {
    let r = 2 * nk + 1;
    let lo = 1usize << (2 * nk);
    let d_lo = dirichlet_kernel(lo, r)?.exact_numerators.unwrap_or_default();
    let mut mismatches = 0;
    for j in 1..lo {
        let left = dirichlet_kernel(j + lo, r)?.exact_numerators.unwrap_or_default();
        let dj = dirichlet_kernel(j, r)?.exact_numerators.unwrap_or_default();
        mismatches += (0..1usize << r)
            .filter(|&x| left[x] - d_lo[x] != walsh_sign(lo, x) * dj[x])
            .count();
    }
    Ok(mismatches)
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

pub fn run(p: &CounterexampleParams) -> HarnessResult<ExperimentReport> {
    check_alpha(p.alpha)?;
    check_positive("stability factor", p.stability_factor)?;
    check_positive("slope tolerance", p.slope_tolerance)?;
    if p.nk_list.is_empty() || p.phis.is_empty() {
        return Err(invalid("nk list and phi list must be non-empty"));
    }
    for &nk in &p.nk_list {
        if nk == 0 {
            return Err(dyadic_core::Error::InvalidCount(0).into());
        }
        if 2 * nk + 2 > MAX_RESOLUTION {
            return Err(invalid(format!("nk {nk} needs resolution {} above the cap", 2 * nk + 2)));
        }
    }
    for phi in &p.phis {
        phi.validate(p.alpha)?;
    }
    let exponent = 1.0 / (1.0 + p.alpha);
    let mut report = ExperimentReport::new("counterexample");
    report.parameter("alpha", p.alpha);
    report.parameter("p", exponent);
    report.parameter("nk_list", p.nk_list.clone());
    report.parameter("phi", p.phis.iter().map(|f| f.to_string()).collect::<Vec<_>>());
    report.parameter("stability_factor", p.stability_factor);
    report.parameter("slope_tolerance", p.slope_tolerance);

    let mut exact_mismatches = 0usize;
    let mut band_ratios = Vec::new();
    let mut all_band_ratios_positive = true;
    let mut hp = Vec::new();
    let mut stats: Vec<Vec<f64>> = vec![Vec::new(); p.phis.len()];

    for &nk in &p.nk_list {
        let m = 2 * nk + 1;
        let spec = counterexample(p.alpha, nk, m)?;
        let mut rep_mismatch = usize::from(!spec.representations_agree());
        let ps = partial_sum_mismatches(nk)?;
        let sh = shift_identity_mismatches(nk)?;
        report.push(Row::plain("partial_sums", "mismatches", Some(nk as u64), ps as f64));
        report.push(Row::plain("shift_identity", "mismatches", Some(nk as u64), sh as f64));
        rep_mismatch += ps + sh;
        exact_mismatches += rep_mismatch;

        let sweeper = CesaroSweeper::from_spectrum(p.alpha, spec.spectrum.clone())?;
        for (s, &q) in spec.probe_orders.iter().enumerate() {
            let mean = sweeper.mean(q)?;
            let s = s as u32;
            let band_min = mean
                .values()
                .iter()
                .enumerate()
                .filter(|(x, _)| x & ((1 << (2 * s + 1)) - 1) == 1 << (2 * s))
                .fold(f64::INFINITY, |acc, (_, v)| acc.min(v.abs()));
            let bound = (2.0 * s as f64 * (1.0 + p.alpha) - 2.0 * p.alpha * nk as f64).exp2();
            let row = Row::new("band_lower_bound", format!("nk={nk} s={s}"), Some(q as u64), band_min, bound);
            if s >= 1 {
                all_band_ratios_positive &= row.ratio > 0.0;
                band_ratios.push(row.ratio);
            }
            report.push(row);
        }

        let norm = hp_quasinorm(&spec.function, exponent)?;
        report.push(Row::new("hp_norm", "f_nk", Some(nk as u64), norm, (-2.0 * p.alpha * nk as f64).exp2()));
        hp.push((nk as f64, norm));

        let top = 1usize << m;
        for (i, phi) in p.phis.iter().enumerate() {
            let sup = sweeper.weighted_sup(1..=top, |n| phi.eval(p.alpha, n))?;
            let stat = lp_integral(&sup, exponent)?.powf(1.0 + p.alpha) / norm;
            let shape = (nk as f64).powf(1.0 + p.alpha) / phi.eval(p.alpha, top);
            report.push(Row::new("statistic", phi.to_string(), Some(nk as u64), stat, shape));
            stats[i].push(stat);
        }
    }

    report.metric("exact_mismatches", exact_mismatches as f64);
    report.check(
        "exact_identities",
        exact_mismatches == 0,
        format!("{exact_mismatches} mismatched slots across representations, partial sums and shift identity"),
    );

    if band_ratios.is_empty() {
        report.check("band_constant_stable", false, "no band with s >= 1 in the nk list");
    } else {
        let s = Spread::of(band_ratios.iter().copied());
        report.metric("band_constant", s.min);
        report.check(
            "band_constant_stable",
            all_band_ratios_positive && s.stable_within(p.stability_factor),
            s.describe(),
        );
    }

    if hp.len() >= 2 {
        let xs: Vec<f64> = hp.iter().map(|h| h.0).collect();
        let ys: Vec<f64> = hp.iter().map(|h| h.1.ln()).collect();
        let slope = fit_slope(&xs, &ys);
        let target = -2.0 * p.alpha * std::f64::consts::LN_2;
        report.metric("hp_log_slope", slope);
        report.metric("hp_log_slope_target", target);
        report.check(
            "hp_decay",
            ((slope - target) / target).abs() <= p.slope_tolerance,
            format!("slope {slope} vs {target}"),
        );
    } else {
        report.check("hp_decay", false, "slope needs at least two nk values");
    }
    let hp_c = hp.iter().fold(0.0f64, |a, &(nk, v)| a.max(v / (-2.0 * p.alpha * nk).exp2()));
    report.metric("hp_fitted_constant", hp_c);

    for (phi, values) in p.phis.iter().zip(&stats) {
        let increasing = values.windows(2).all(|w| w[1] > w[0]);
        if let Some(last) = values.last() {
            report.metric(format!("statistic_last {phi}"), *last);
        }
        report.check(format!("statistic_increasing {phi}"), increasing, format!("{values:?}"));
    }
    report.sort_rows();
    Ok(report)
}
