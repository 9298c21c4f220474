//! Finite dyadic martingales, Hardy-space quasinorms, atoms, and the
//! two-band test functions used to probe the weighted maximal operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{check_resolution, low_mask, slot_count, DyadicFunction, DyadicInterval};
use crate::error::{Error, Result};
use crate::walsh::{fwht, WalshSpectrum};

/// `E_n f`: average of `f` over each rank-`n` coset.
pub fn conditional_expectation(f: &DyadicFunction, n: u32) -> Result<DyadicFunction> {
    let m = f.resolution();
    if n > m {
        return Err(Error::ResolutionTooCoarse {
            rank: n,
            resolution: m,
        });
    }
    let mask = low_mask(n);
    let mut sums = vec![0.0; slot_count(n)];
    for (i, v) in f.values().iter().enumerate() {
        sums[i & mask] += v;
    }
    let scale = (-((m - n) as f64)).exp2();
    sums.iter_mut().for_each(|s| *s *= scale);
    DyadicFunction::from_fn(m, |i| sums[i & mask])
}

/// Levels `F_0, ..., F_M` of a martingale on the rank-`M` filtration.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMartingale {
    resolution: u32,
    levels: Vec<DyadicFunction>,
}

impl FiniteMartingale {
    /// The martingale `F_n = E_n f` generated by `f`.
    pub fn generated_by(f: &DyadicFunction) -> Self {
        let levels = (0..=f.resolution())
            .map(|n| conditional_expectation(f, n).expect("level within resolution"))
            .collect();
        Self {
            resolution: f.resolution(),
            levels,
        }
    }

    /// Accepts explicit levels after checking measurability (exact) and the
    /// tower property `E_n F_m = F_n` (relative tolerance `1e-12`).
    pub fn from_levels(levels: Vec<DyadicFunction>) -> Result<Self> {
        let resolution = levels
            .first()
            .map(DyadicFunction::resolution)
            .ok_or(Error::InvalidCount(0))?;
        check_resolution(resolution)?;
        if levels.len() != resolution as usize + 1 {
            return Err(Error::LengthMismatch {
                len: levels.len(),
                resolution,
            });
        }
        for lvl in &levels {
            if lvl.resolution() != resolution {
                return Err(Error::ResolutionMismatch {
                    left: resolution,
                    right: lvl.resolution(),
                });
            }
        }
        let martingale = Self { resolution, levels };
        if !martingale.is_adapted() || !martingale.has_tower_property(1e-12) {
            return Err(Error::InvalidMartingale);
        }
        Ok(martingale)
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn levels(&self) -> &[DyadicFunction] {
        &self.levels
    }

    pub fn level(&self, n: u32) -> &DyadicFunction {
        &self.levels[n as usize]
    }

    /// Every `F_n` is constant on rank-`n` cosets.
    pub fn is_adapted(&self) -> bool {
        self.levels.iter().enumerate().all(|(n, lvl)| {
            let mask = low_mask(n as u32);
            lvl.values()
                .iter()
                .enumerate()
                .all(|(i, v)| *v == lvl.values()[i & mask])
        })
    }

    /// `E_n F_m = F_n` for all `n <= m`, up to `rel` times `max |F_m|`.
    pub fn has_tower_property(&self, rel: f64) -> bool {
        for m in 0..=self.resolution {
            let fm = self.level(m);
            let scale = fm.sup_norm().max(f64::MIN_POSITIVE);
            for n in 0..=m {
                let e = conditional_expectation(fm, n).expect("n <= m");
                let ok = e
                    .values()
                    .iter()
                    .zip(self.level(n).values())
                    .all(|(a, b)| (a - b).abs() <= rel * scale);
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// `F* = sup_n |F_n|`.
    pub fn maximal(&self) -> DyadicFunction {
        let mut out = vec![0.0f64; slot_count(self.resolution)];
        for lvl in &self.levels {
            for (o, v) in out.iter_mut().zip(lvl.values()) {
                *o = o.max(v.abs());
            }
        }
        DyadicFunction::new(self.resolution, out).expect("shape")
    }
}

/// Martingale maximal function of `f`: slotwise `max_{0<=n<=M} |E_n f|`.
pub fn maximal_function(f: &DyadicFunction) -> DyadicFunction {
    let m = f.resolution();
    let mut out: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    // coarsen level by level: sums at rank n are pairwise sums of rank n+1
    let mut sums = f.values().to_vec();
    for n in (0..m).rev() {
        let half = slot_count(n);
        for r in 0..half {
            sums[r] += sums[r + half];
        }
        sums.truncate(half);
        let scale = (-((m - n) as f64)).exp2();
        let mask = low_mask(n);
        for (i, o) in out.iter_mut().enumerate() {
            *o = o.max((sums[i & mask] * scale).abs());
        }
    }
    DyadicFunction::new(m, out).expect("shape")
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `∫ |f|^p dμ`.
pub fn lp_integral(f: &DyadicFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(f.values().iter().map(|v| v.abs().powf(p)).sum::<f64>() * f.cell_measure())
}

/// `‖f‖_p = (∫ |f|^p dμ)^{1/p}`.
pub fn lp_quasinorm(f: &DyadicFunction, p: f64) -> Result<f64> {
    Ok(lp_integral(f, p)?.powf(1.0 / p))
}

/// `sup_λ λ μ(|f| > λ)^{1/p}`.
///
/// `f` takes finitely many values, so the supremum is the limit as `λ`
/// increases to one of the distinct values `v` of `|f|`, where it equals
/// `v μ(|f| >= v)^{1/p}`.
pub fn weak_lp_quasinorm(f: &DyadicFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let mut abs: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| b.total_cmp(a));
    let cell = f.cell_measure();
    let mut best = 0.0f64;
    let mut i = 0;
    while i < abs.len() && abs[i] > 0.0 {
        let v = abs[i];
        while i < abs.len() && abs[i] == v {
            i += 1;
        }
        best = best.max(v * (i as f64 * cell).powf(1.0 / p));
    }
    Ok(best)
}

/// `‖f‖_{H_p} = ‖f*‖_p` for the martingale generated by `f`.
pub fn hp_quasinorm(f: &DyadicFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    lp_quasinorm(&maximal_function(f), p)
}

/// A candidate `p`-atom.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpec {
    pub p: f64,
    pub support: DyadicInterval,
    pub values: DyadicFunction,
}

/// Diagnostics from [`validate_atom`].
#[derive(Debug, Clone, PartialEq)]
pub struct AtomValidation {
    /// `∫_I a dμ`.
    pub mean: f64,
    pub mean_ok: bool,
    /// `‖a‖_∞`.
    pub sup: f64,
    /// `μ(I)^{-1/p}`.
    pub sup_bound: f64,
    pub sup_ok: bool,
    /// Largest `|a|` outside the support.
    pub outside: f64,
    pub support_ok: bool,
}

impl AtomValidation {
    pub fn passed(&self) -> bool {
        self.mean_ok && self.sup_ok && self.support_ok
    }

    /// Names of the failed conditions.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.mean_ok {
            out.push("mean");
        }
        if !self.sup_ok {
            out.push("sup");
        }
        if !self.support_ok {
            out.push("support");
        }
        out
    }
}

/// Absolute tolerance on the atom mean.
pub const ATOM_MEAN_TOLERANCE: f64 = 1e-12;

/// Checks mean zero, `‖a‖_∞ <= μ(I)^{-1/p}` and `supp a ⊂ I`.
pub fn validate_atom(atom: &AtomSpec) -> Result<AtomValidation> {
    check_exponent(atom.p)?;
    let a = &atom.values;
    let mean = a.integrate(&atom.support)?;
    let sup = a.sup_norm();
    let sup_bound = atom.support.measure().powf(-1.0 / atom.p);
    let outside = a
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| !atom.support.contains(*i))
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    Ok(AtomValidation {
        mean,
        mean_ok: mean.abs() <= ATOM_MEAN_TOLERANCE,
        sup,
        sup_bound,
        sup_ok: sup <= sup_bound * (1.0 + 1e-12),
        outside,
        support_ok: outside == 0.0,
    })
}

/// Deterministic random `p`-atom supported on `I_{support_rank}`, tabulated at
/// `resolution`.
///
/// Values on the support are drawn uniformly from `[-1, 1)`, centered, then
/// scaled so that `‖a‖_∞` equals a fraction in `(0.5, 1]` of the bound
/// `μ(I)^{-1/p}`. When the support is a single slot the centered atom is zero.
pub fn random_atom(p: f64, support_rank: u32, resolution: u32, seed: u64) -> Result<AtomSpec> {
    check_exponent(p)?;
    check_resolution(resolution)?;
    if support_rank > resolution {
        return Err(Error::ResolutionTooCoarse {
            rank: support_rank,
            resolution,
        });
    }
    let support = DyadicInterval::centered(support_rank);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = support.indices(resolution)?;
    let mut raw: Vec<f64> = idx.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    raw.iter_mut().for_each(|v| *v -= mean);
    // second pass removes the residual left by rounding in the first
    let residual = raw.iter().sum::<f64>() / raw.len() as f64;
    raw.iter_mut().for_each(|v| *v -= residual);
    let fraction = 1.0 - 0.5 * rng.gen::<f64>();
    let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bound = support.measure().powf(-1.0 / p);
    let scale = if peak > 0.0 { fraction * bound / peak } else { 0.0 };
    let mut values = vec![0.0; slot_count(resolution)];
    for (&i, v) in idx.iter().zip(&raw) {
        values[i] = (v * scale).clamp(-bound, bound);
    }
    Ok(AtomSpec {
        p,
        support,
        values: DyadicFunction::new(resolution, values)?,
    })
}

/// The test function `f_{nk} = D_{2^{2nk+1}} - D_{2^{2nk}}` and its probe orders
/// `q^s = 2^{2nk} + 2^{2s}`, `s = 0..nk`.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleSpec {
    pub alpha: f64,
    pub nk: u32,
    pub resolution: u32,
    pub function: DyadicFunction,
    pub spectrum: WalshSpectrum,
    pub probe_orders: Vec<usize>,
}

impl CounterexampleSpec {
    /// First frequency of the flat band, `2^{2nk}`.
    pub fn band_start(&self) -> usize {
        1 << (2 * self.nk)
    }

    /// One past the last frequency of the band, `2^{2nk+1}`.
    pub fn band_end(&self) -> usize {
        1 << (2 * self.nk + 1)
    }

    /// Pointwise form: `2^{2nk}` on `I_{2nk+1}`, `-2^{2nk}` on
    /// `I_{2nk} \ I_{2nk+1}`, zero elsewhere.
    pub fn pointwise_value(&self, x: usize) -> f64 {
        let h = self.band_start() as f64;
        let r = 2 * self.nk;
        if x & low_mask(r + 1) == 0 {
            h
        } else if x & low_mask(r) == 0 {
            -h
        } else {
            0.0
        }
    }

    /// Spectral form: `f̂(i) = 1` on `[2^{2nk}, 2^{2nk+1})`, zero elsewhere.
    pub fn spectral_value(&self, i: usize) -> f64 {
        if (self.band_start()..self.band_end()).contains(&i) {
            1.0
        } else {
            0.0
        }
    }

    /// Whether the stored function and spectrum agree with both closed forms.
    pub fn representations_agree(&self) -> bool {
        let pointwise = self
            .function
            .values()
            .iter()
            .enumerate()
            .all(|(x, v)| *v == self.pointwise_value(x));
        let spectral = self
            .spectrum
            .coefficients()
            .iter()
            .enumerate()
            .all(|(i, c)| *c == self.spectral_value(i));
        pointwise && spectral
    }
}

pub fn counterexample(alpha: f64, nk: u32, resolution: u32) -> Result<CounterexampleSpec> {
    check_resolution(resolution)?;
    if nk == 0 {
        return Err(Error::InvalidCount(0));
    }
    if resolution < 2 * nk + 1 {
        return Err(Error::ResolutionTooCoarse {
            rank: 2 * nk + 1,
            resolution,
        });
    }
    let function = DyadicFunction::from_fn(resolution, |x| {
        (crate::kernels::dirichlet_dyadic_value(2 * nk + 1, x)
            - crate::kernels::dirichlet_dyadic_value(2 * nk, x)) as f64
    })?;
    let spectrum = fwht(&function);
    let probe_orders = (0..nk).map(|s| (1usize << (2 * nk)) + (1usize << (2 * s))).collect();
    let spec = CounterexampleSpec {
        alpha,
        nk,
        resolution,
        function,
        spectrum,
        probe_orders,
    };
    debug_assert!(spec.representations_agree());
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::GroupPoint;
    use crate::walsh::walsh_function;
    use proptest::prelude::*;
    use rand::Rng;

    fn dyadic_random(m: u32, seed: u64) -> DyadicFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DyadicFunction::from_fn(m, |_| rng.gen_range(-512i32..512) as f64 / 64.0).unwrap()
    }

    #[test]
    fn conditional_expectation_examples() {
        let f = dyadic_random(6, 1);
        let e0 = conditional_expectation(&f, 0).unwrap();
        assert!(e0.values().iter().all(|&v| v == f.integral()));
        assert_eq!(conditional_expectation(&f, 6).unwrap(), f);
        for m in 0..=6u32 {
            let d = DyadicFunction::from_fn(6, |x| crate::kernels::dirichlet_dyadic_value(m, x) as f64)
                .unwrap();
            for n in 0..=m {
                let e = conditional_expectation(&d, n).unwrap();
                for x in 0..64 {
                    assert_eq!(e.values()[x], crate::kernels::dirichlet_dyadic_value(n, x) as f64);
                }
            }
        }
        assert!(conditional_expectation(&f, 7).is_err());
    }

    #[test]
    fn tower_property_exact_on_dyadic_rationals() {
        for m in 1..=10u32 {
            let f = dyadic_random(m, m as u64);
            let mart = FiniteMartingale::generated_by(&f);
            assert!(mart.is_adapted());
            for a in 0..=m {
                let ea = conditional_expectation(&f, a).unwrap();
                for b in 0..=m {
                    let eab = conditional_expectation(&ea, b).unwrap();
                    assert_eq!(eab, conditional_expectation(&f, a.min(b)).unwrap());
                }
            }
        }
    }

    #[test]
    fn martingale_from_levels() {
        let f = dyadic_random(4, 3);
        let mart = FiniteMartingale::generated_by(&f);
        let again = FiniteMartingale::from_levels(mart.levels().to_vec()).unwrap();
        assert_eq!(again, mart);
        assert_eq!(again.maximal(), maximal_function(&f));

        let mut broken = mart.levels().to_vec();
        broken[1] = broken[2].clone();
        assert_eq!(FiniteMartingale::from_levels(broken), Err(Error::InvalidMartingale));
        assert!(FiniteMartingale::from_levels(vec![]).is_err());
    }

    #[test]
    fn maximal_function_examples() {
        let c = DyadicFunction::constant(5, -3.0).unwrap();
        assert!(maximal_function(&c).values().iter().all(|&v| v == 3.0));

        // f = D_{2^m}: f* = 2^{n} on I_n \ I_{n+1}, 2^m on I_m
        let m = 4;
        let d = DyadicFunction::from_fn(6, |x| crate::kernels::dirichlet_dyadic_value(m, x) as f64)
            .unwrap();
        let star = maximal_function(&d);
        for x in 0..64usize {
            let depth = if x == 0 { 6 } else { x.trailing_zeros() };
            assert_eq!(star.values()[x], (1u64 << depth.min(m)) as f64);
        }

        for j in 1..64 {
            let w = walsh_function(j, 6).unwrap();
            assert!(maximal_function(&w).values().iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn lp_examples() {
        for n in 0..=6u32 {
            let ind = DyadicFunction::indicator(&DyadicInterval::centered(n), 6).unwrap();
            for p in [0.4, 0.5, 1.0, 2.0] {
                let expected = (-(n as f64) / p).exp2();
                assert!((lp_quasinorm(&ind, p).unwrap() - expected).abs() < 1e-14);
                assert!((weak_lp_quasinorm(&ind, p).unwrap() - expected).abs() < 1e-14);
            }
        }
        let w = walsh_function(13, 5).unwrap();
        assert_eq!(lp_quasinorm(&w, 0.5).unwrap(), 1.0);
        let zero = DyadicFunction::zeros(3).unwrap();
        assert_eq!(weak_lp_quasinorm(&zero, 0.5).unwrap(), 0.0);
        assert_eq!(lp_quasinorm(&zero, 0.0), Err(Error::InvalidExponent(0.0)));
        assert_eq!(weak_lp_quasinorm(&zero, -1.0), Err(Error::InvalidExponent(-1.0)));
        assert!(hp_quasinorm(&zero, 0.0).is_err());
    }

    #[test]
    fn counterexample_norms_closed_form() {
        // f = ±2^{2nk} on two sets of measure 2^{-2nk-1}; ‖f‖_p = 2^{2nk} 2^{-2nk/p}
        for nk in 1..=4u32 {
            let ce = counterexample(0.5, nk, 2 * nk + 1).unwrap();
            for alpha in [0.25, 0.5, 0.75] {
                let p = 1.0 / (1.0 + alpha);
                let expected = (2.0 * nk as f64 * (1.0 - 1.0 / p)).exp2();
                let lp = lp_quasinorm(&ce.function, p).unwrap();
                assert!((lp - expected).abs() <= 1e-12 * expected);
                // f* = |f| since every coarser average vanishes
                assert_eq!(maximal_function(&ce.function), ce.function.abs());
                let hp = hp_quasinorm(&ce.function, p).unwrap();
                assert!((hp - (-2.0 * alpha * nk as f64).exp2()).abs() <= 1e-12 * hp);
            }
        }
    }

    #[test]
    fn counterexample_examples() {
        let ce = counterexample(0.5, 1, 3).unwrap();
        assert_eq!(ce.function.values(), &[4.0, 0.0, 0.0, 0.0, -4.0, 0.0, 0.0, 0.0]);
        let c: Vec<f64> = (0..8).map(|i| if (4..8).contains(&i) { 1.0 } else { 0.0 }).collect();
        assert_eq!(ce.spectrum.coefficients(), c.as_slice());
        assert!(ce.representations_agree());
        assert_eq!(counterexample(0.5, 2, 5).unwrap().probe_orders, vec![17, 20]);
        assert!(counterexample(0.5, 2, 4).is_err());
        for nk in 1..=5 {
            assert!(counterexample(0.5, nk, 2 * nk + 2).unwrap().representations_agree());
        }
    }

    #[test]
    fn hp_dominates_lp() {
        for seed in 0..20 {
            let f = dyadic_random(6, seed);
            for p in [0.5, 0.8, 1.0] {
                assert!(hp_quasinorm(&f, p).unwrap() >= lp_quasinorm(&f, p).unwrap() * (1.0 - 1e-14));
            }
        }
        let c = DyadicFunction::constant(4, 2.5).unwrap();
        assert!((hp_quasinorm(&c, 0.5).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn validate_atom_examples() {
        for alpha in [0.25, 0.5, 0.75] {
            let p = 1.0 / (1.0 + alpha);
            let m = 3u32;
            let res = 6;
            let height = (m as f64 * (1.0 + alpha)).exp2();
            let w = walsh_function(1 << m, res).unwrap();
            let ind = DyadicFunction::indicator(&DyadicInterval::centered(m), res).unwrap();
            let values =
                DyadicFunction::from_fn(res, |i| height * w.values()[i] * ind.values()[i]).unwrap();
            let atom = AtomSpec { p, support: DyadicInterval::centered(m), values };
            let v = validate_atom(&atom).unwrap();
            assert!(v.passed(), "{v:?}");
        }
        let one = AtomSpec {
            p: 0.5,
            support: DyadicInterval::whole(),
            values: DyadicFunction::constant(3, 1.0).unwrap(),
        };
        let v = validate_atom(&one).unwrap();
        assert!(!v.passed());
        assert_eq!(v.failures(), vec!["mean"]);

        let zero = AtomSpec {
            p: 0.5,
            support: DyadicInterval::centered(2),
            values: DyadicFunction::zeros(4).unwrap(),
        };
        assert!(validate_atom(&zero).unwrap().passed());

        // too tall and leaking outside the support
        let mut vals = vec![0.0; 16];
        vals[0] = 100.0;
        vals[4] = -100.0;
        vals[1] = 1.0;
        let bad = AtomSpec {
            p: 0.5,
            support: DyadicInterval::centered(2),
            values: DyadicFunction::new(4, vals).unwrap(),
        };
        let v = validate_atom(&bad).unwrap();
        assert_eq!(v.failures(), vec!["sup", "support"]);
    }

    #[test]
    fn translated_atom_still_validates() {
        let atom = random_atom(0.5, 3, 7, 42).unwrap();
        let t = GroupPoint::new(0b101, 7).unwrap();
        let moved = AtomSpec {
            p: atom.p,
            support: DyadicInterval::new(3, 0b101),
            values: atom.values.translate(t).unwrap(),
        };
        assert!(validate_atom(&moved).unwrap().passed());
    }

    #[test]
    fn random_atom_is_deterministic() {
        let a = random_atom(0.6, 3, 8, 17).unwrap();
        let b = random_atom(0.6, 3, 8, 17).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_atom(0.6, 3, 8, 18).unwrap());
        let single = random_atom(0.6, 5, 5, 1).unwrap();
        assert_eq!(single.values.sup_norm(), 0.0);
        assert!(random_atom(0.6, 6, 5, 1).is_err());
    }

    #[test]
    fn random_atoms_validate() {
        for alpha in [0.25, 0.5, 0.75] {
            let p = 1.0 / (1.0 + alpha);
            for seed in 0..1000u64 {
                let rank = (seed % 5) as u32;
                let atom = random_atom(p, rank, rank + 1 + (seed % 4) as u32, seed).unwrap();
                let v = validate_atom(&atom).unwrap();
                assert!(v.passed(), "seed {seed}: {v:?}");
                assert!(v.sup >= 0.5 * v.sup_bound && v.sup <= v.sup_bound);
                assert!(atom.values.integral().abs() <= 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn p_triangle(seed in any::<u64>(), p in 0.2f64..=1.0) {
            let f = dyadic_random(6, seed);
            let g = dyadic_random(6, seed ^ 0xdead_beef);
            let sum = f.linear_combination(1.0, &g, 1.0).unwrap();
            let lhs = lp_integral(&sum, p).unwrap();
            let rhs = lp_integral(&f, p).unwrap() + lp_integral(&g, p).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }

        #[test]
        fn weak_below_strong(seed in any::<u64>(), p in 0.2f64..=2.0) {
            let f = dyadic_random(7, seed);
            prop_assert!(weak_lp_quasinorm(&f, p).unwrap() <= lp_quasinorm(&f, p).unwrap() * (1.0 + 1e-12));
        }
    }
}
