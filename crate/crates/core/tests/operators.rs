use dyadic_core::{
    cesaro_mean, conditional_expectation, counterexample, fwht, hp_quasinorm, partial_sum, random_atom,
    CesaroSweeper, DyadicFunction, GroupPoint,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_function(m: u32, seed: u64) -> DyadicFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DyadicFunction::from_fn(m, |_| rng.gen_range(-256i32..256) as f64 / 32.0).unwrap()
}

fn max_diff(a: &DyadicFunction, b: &DyadicFunction) -> f64 {
    a.values().iter().zip(b.values()).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

#[test]
fn dyadic_partial_sums_are_conditional_expectations() {
    for m in 1..=9 {
        let f = random_function(m, m as u64);
        let spectrum = fwht(&f);
        for n in 0..=m {
            let s = partial_sum(&spectrum, 1 << n).unwrap();
            let e = conditional_expectation(&f, n).unwrap();
            assert!(max_diff(&s, &e) < 1e-12, "M={m} n={n}");
        }
    }
}

#[test]
fn counterexample_means_have_flat_modulus_on_bands() {
    for alpha in [0.25, 0.5, 1.0] {
        for nk in 1..=3 {
            let spec = counterexample(alpha, nk, 2 * nk + 1).unwrap();
            let sweeper = CesaroSweeper::from_spectrum(alpha, spec.spectrum.clone()).unwrap();
            for (s, &q) in spec.probe_orders.iter().enumerate() {
                let mean = sweeper.mean(q).unwrap();
                let band: Vec<f64> = mean
                    .values()
                    .iter()
                    .enumerate()
                    .filter(|(x, _)| x & ((1 << (2 * s + 1)) - 1) == 1 << (2 * s))
                    .map(|(_, v)| v.abs())
                    .collect();
                let first = band[0];
                assert!(first > 0.0);
                assert!(band.iter().all(|v| (v - first).abs() <= 1e-12 * first), "nk={nk} s={s}");
            }
        }
    }
}

#[test]
fn fejer_means_at_dyadic_orders_are_positive() {
    for m in 2..=8 {
        let f = DyadicFunction::from_fn(m, |x| ((x * 37) % 11) as f64).unwrap();
        for j in 0..=m {
            let mean = cesaro_mean(1.0, &f, 1 << j).unwrap();
            assert!(mean.values().iter().all(|&v| v >= -1e-12), "M={m} j={j}");
        }
    }
}

proptest! {
    #[test]
    fn means_commute_with_translation(
        seed in any::<u64>(),
        m in 2u32..=8,
        shift in any::<usize>(),
        order in any::<usize>(),
        alpha in 0.05f64..=1.0,
    ) {
        let f = random_function(m, seed);
        let h = GroupPoint::new(shift % (1 << m), m).unwrap();
        let n = 1 + order % (1 << m);
        let left = cesaro_mean(alpha, &f.translate(h).unwrap(), n).unwrap();
        let right = cesaro_mean(alpha, &f, n).unwrap().translate(h).unwrap();
        prop_assert!(max_diff(&left, &right) <= 1e-10 * (1.0 + f.sup_norm()));
    }

    #[test]
    fn atoms_have_unit_hardy_ball_norm(
        seed in any::<u64>(),
        support in 0u32..=5,
        extra in 1u32..=3,
        alpha in 0.05f64..=1.0,
    ) {
        let p = 1.0 / (1.0 + alpha);
        let atom = random_atom(p, support, support + extra, seed).unwrap();
        prop_assert!(hp_quasinorm(&atom.values, p).unwrap() <= 1.0 + 1e-12);
    }
}
