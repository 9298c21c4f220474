//! Logarithmic strong means `(1/ln n) sum_{m<=n} ‖σ_m^α a‖_p^p / m` of random
//! atoms, `p = 1/(1+α)`, with the per-term quantity taken in `L_p`.

use dyadic_core::hardy::{lp_integral, random_atom};
use dyadic_core::{CesaroSweeper, DyadicFunction};
use rayon::prelude::*;

use super::{ceil_log2, check_alpha, check_positive, check_resolution, Spread};
use crate::error::{invalid, HarnessResult};
use crate::report::{ExperimentReport, Row};

#[derive(Debug, Clone, PartialEq)]
pub struct StrongSumParams {
    pub alpha: f64,
    pub resolutions: Vec<u32>,
    pub n_max: usize,
    pub seeds: usize,
    pub seed: u64,
    /// Resolution the atom values are drawn at before refinement to the
    /// working resolution; the working resolution when `None`.
    pub atom_resolution: Option<u32>,
    pub plateau_ratio: f64,
    pub stability_factor: f64,
}

/// `T(n)` for `n = 1..=n_max` (entry `n - 1`); `T(1)` is reported as 0.
pub fn strong_means(alpha: f64, a: &DyadicFunction, n_max: usize) -> HarnessResult<Vec<f64>> {
    let exponent = 1.0 / (1.0 + alpha);
    let sweeper = CesaroSweeper::new(alpha, a)?;
    let mut running = 0.0;
    let mut out = Vec::with_capacity(n_max);
    let mut err = None;
    sweeper.for_each(1..=n_max, |m, v| {
        let term = match DyadicFunction::new(a.resolution(), v.to_vec()).and_then(|f| lp_integral(&f, exponent)) {
            Ok(t) => t,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        };
        running += term / m as f64;
        out.push(if m >= 2 { running / (m as f64).ln() } else { 0.0 });
    })?;
    match err {
        Some(e) => Err(e.into()),
        None => Ok(out),
    }
}

/// `T(n_max) / T(n_max / 2)`, taken as 1 when both vanish.
pub fn plateau(means: &[f64]) -> (f64, f64, f64) {
    let last = means[means.len() - 1];
    let half = means[means.len() / 2 - 1];
    let ratio = if half == 0.0 && last == 0.0 { 1.0 } else { last / half };
    (last, half, ratio)
}

struct AtomOutcome {
    seed: u64,
    means: Vec<f64>,
}

pub fn run(p: &StrongSumParams) -> HarnessResult<ExperimentReport> {
    check_alpha(p.alpha)?;
    check_positive("plateau ratio", p.plateau_ratio)?;
    check_positive("stability factor", p.stability_factor)?;
    if p.resolutions.is_empty() {
        return Err(invalid("empty resolution list"));
    }
    if p.seeds == 0 {
        return Err(invalid("at least one atom seed is required"));
    }
    let w = ceil_log2(p.n_max);
    check_resolution(w)?;
    let atom_resolution = p.atom_resolution.unwrap_or(w);
    if atom_resolution > w {
        return Err(invalid(format!("atom resolution {atom_resolution} exceeds working resolution {w}")));
    }
    for &m in &p.resolutions {
        check_resolution(m)?;
        if p.n_max <= 2usize << m {
            return Err(invalid(format!("n_max {} must exceed 2^{}", p.n_max, m + 1)));
        }
        if atom_resolution < m {
            return Err(invalid(format!("atom resolution {atom_resolution} is coarser than the support rank {m}")));
        }
    }
    let exponent = 1.0 / (1.0 + p.alpha);
    let mut report = ExperimentReport::new("strongsum");
    report.parameter("alpha", p.alpha);
    report.parameter("p", exponent);
    report.parameter("resolutions", p.resolutions.clone());
    report.parameter("n_max", p.n_max);
    report.parameter("working_resolution", w);
    report.parameter("atom_resolution", atom_resolution);
    report.parameter("seeds", p.seeds as u64);
    report.parameter("seed", p.seed);
    report.parameter("plateau_ratio", p.plateau_ratio);
    report.parameter("stability_factor", p.stability_factor);
    report.parameter("per_term_norm", "L_p quasinorm of the mean, raised to p");

    let mut maxima = Vec::new();
    let mut worst_plateau = 0.0f64;
    let mut prefix_max = 0.0f64;
    for &m in &p.resolutions {
        let outcomes: Vec<AtomOutcome> = (0..p.seeds as u64)
            .into_par_iter()
            .map(|i| {
                let seed = p.seed.wrapping_add(i);
                let atom = random_atom(exponent, m, atom_resolution, seed)?.values.refine(w)?;
                Ok(AtomOutcome { seed, means: strong_means(p.alpha, &atom, p.n_max)? })
            })
            .collect::<HarnessResult<_>>()?;
        let mut final_max = 0.0f64;
        let mut plateau_max = 0.0f64;
        let mut checkpoints: Vec<usize> = vec![(1 << m) + 1];
        checkpoints.extend((m + 1..=w).map(|j| 1usize << j).filter(|&n| n <= p.n_max));
        checkpoints.push(p.n_max);
        checkpoints.dedup();
        let mut checkpoint_max = vec![0.0f64; checkpoints.len()];
        for o in &outcomes {
            let (last, half, ratio) = plateau(&o.means);
            let row = if half > 0.0 {
                Row::new("plateau", format!("M={m}"), Some(o.seed), last, half)
            } else {
                Row::plain("plateau", format!("M={m}"), Some(o.seed), ratio)
            };
            report.push(row);
            final_max = final_max.max(last);
            plateau_max = plateau_max.max(ratio);
            prefix_max = prefix_max.max(o.means[(1 << m) - 1]);
            for (c, &n) in checkpoint_max.iter_mut().zip(&checkpoints) {
                *c = c.max(o.means[n - 1]);
            }
        }
        for (&n, &c) in checkpoints.iter().zip(&checkpoint_max) {
            report.push(Row::plain("checkpoint", format!("M={m}"), Some(n as u64), c));
        }
        report.metric(format!("final_max_M{m}"), final_max);
        report.metric(format!("plateau_max_M{m}"), plateau_max);
        worst_plateau = worst_plateau.max(plateau_max);
        maxima.push(final_max);
    }
    report.metric("plateau_max", worst_plateau);
    report.metric("prefix_max", prefix_max);
    report.check(
        "plateau",
        worst_plateau <= p.plateau_ratio,
        format!("largest final/half ratio {worst_plateau} vs {}", p.plateau_ratio),
    );
    let s = Spread::of(maxima.iter().copied());
    report.metric("c_strong_sum", s.max);
    report.check("uniform_bound", s.stable_within(p.stability_factor), s.describe());
    report.sort_rows();
    Ok(report)
}
