//! Rademacher and Walsh–Paley functions and the fast Walsh–Hadamard transform.
//!
//! With coordinate `x_j` stored as bit `j` of the slot index, the Paley-ordered
//! Walsh function is `w_n(x) = (-1)^popcount(n & x)`. The butterfly below runs
//! stages with half-width `h = 1, 2, 4, ..., 2^(M-1)`; stage `h = 2^j` combines
//! slots differing only in coordinate `x_j` and thereby resolves frequency bit
//! `n_j`. After all stages slot `n` holds `sum_x f(x) w_n(x)`, i.e. the output
//! is already in Paley order and no bit reversal is needed.
//!
//! Normalization: analysis ([`fwht`]) divides by `2^M` so that coefficients are
//! the integrals `∫ f w_k dμ`; synthesis applies no factor.

use crate::dyadic::{check_resolution, slot_count, DyadicFunction, GroupPoint};
use crate::error::{Error, Result};

/// `r_k(x) = (-1)^{x_k}`.
pub fn rademacher(k: u32, x: GroupPoint) -> Result<f64> {
    if k >= x.resolution() {
        return Err(Error::OutOfRange {
            index: k as usize,
            resolution: x.resolution(),
        });
    }
    Ok(if x.coordinate(k) == 0 { 1.0 } else { -1.0 })
}

/// `w_n(x) = prod_k r_k(x)^{n_k}`.
pub fn walsh(n: usize, x: GroupPoint) -> Result<f64> {
    if n >= slot_count(x.resolution()) {
        return Err(Error::FrequencyAboveResolution {
            frequency: n,
            resolution: x.resolution(),
        });
    }
    Ok(walsh_sign(n, x.index()) as f64)
}

#[inline]
pub(crate) fn walsh_sign(n: usize, x: usize) -> i64 {
    if (n & x).count_ones() & 1 == 0 {
        1
    } else {
        -1
    }
}

/// `w_n` tabulated at resolution `M`.
pub fn walsh_function(n: usize, resolution: u32) -> Result<DyadicFunction> {
    check_resolution(resolution)?;
    if n >= slot_count(resolution) {
        return Err(Error::FrequencyAboveResolution {
            frequency: n,
            resolution,
        });
    }
    DyadicFunction::from_fn(resolution, |x| walsh_sign(n, x) as f64)
}

/// Unnormalized in-place Walsh–Hadamard butterfly in Paley order.
///
/// `data.len()` must be a power of two. Applying it twice multiplies by the
/// length.
pub fn fwht_in_place(data: &mut [f64]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let mut half = 1;
    while half < len {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
}

/// Integer variant of [`fwht_in_place`]; exact for bounded inputs.
pub fn fwht_in_place_i64(data: &mut [i64]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let mut half = 1;
    while half < len {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
}

/// Walsh–Fourier coefficients `f̂(0), ..., f̂(2^M - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalshSpectrum {
    resolution: u32,
    coefficients: Vec<f64>,
}

impl WalshSpectrum {
    pub fn new(resolution: u32, coefficients: Vec<f64>) -> Result<Self> {
        check_resolution(resolution)?;
        if coefficients.len() != slot_count(resolution) {
            return Err(Error::LengthMismatch {
                len: coefficients.len(),
                resolution,
            });
        }
        Ok(Self {
            resolution,
            coefficients,
        })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, k: usize) -> f64 {
        self.coefficients[k]
    }

    /// `sum_k f̂(k) w_k`.
    pub fn synthesize(&self) -> DyadicFunction {
        let mut values = self.coefficients.clone();
        fwht_in_place(&mut values);
        DyadicFunction::new(self.resolution, values).expect("shape preserved")
    }

    /// `sum_{k < n} weight(k) f̂(k) w_k`.
    pub fn synthesize_weighted(
        &self,
        n: usize,
        weight: impl Fn(usize) -> f64,
    ) -> Result<DyadicFunction> {
        self.check_order(n)?;
        let mut values = vec![0.0; self.coefficients.len()];
        for (k, (v, c)) in values.iter_mut().zip(&self.coefficients).take(n).enumerate() {
            *v = c * weight(k);
        }
        fwht_in_place(&mut values);
        DyadicFunction::new(self.resolution, values)
    }

    pub(crate) fn check_order(&self, n: usize) -> Result<()> {
        if n > self.coefficients.len() {
            return Err(Error::FrequencyAboveResolution {
                frequency: n,
                resolution: self.resolution,
            });
        }
        Ok(())
    }
}

/// Analysis: `f̂(k) = 2^-M sum_i f(i) w_k(i)` in `O(M 2^M)`.
pub fn fwht(f: &DyadicFunction) -> WalshSpectrum {
    let mut values = f.values().to_vec();
    fwht_in_place(&mut values);
    let scale = f.cell_measure();
    values.iter_mut().for_each(|v| *v *= scale);
    WalshSpectrum {
        resolution: f.resolution(),
        coefficients: values,
    }
}

/// `S_n f = sum_{k<n} f̂(k) w_k`, with `S_0 f = 0`.
pub fn partial_sum(spectrum: &WalshSpectrum, n: usize) -> Result<DyadicFunction> {
    spectrum.synthesize_weighted(n, |_| 1.0)
}

/// `σ_n f = (1/n) sum_{k=1}^n S_k f`, evaluated with triangular weights
/// `1 - k/n` on the coefficients.
pub fn fejer_mean(spectrum: &WalshSpectrum, n: usize) -> Result<DyadicFunction> {
    if n == 0 {
        return Err(Error::InvalidCount(0));
    }
    let nf = n as f64;
    spectrum.synthesize_weighted(n, |k| 1.0 - k as f64 / nf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_analysis(f: &DyadicFunction) -> Vec<f64> {
        let n = f.len();
        (0..n)
            .map(|k| {
                let s: f64 = (0..n)
                    .map(|i| f.values()[i] * walsh_sign(k, i) as f64)
                    .sum();
                s / n as f64
            })
            .collect()
    }

    fn lcg_values(m: u32, seed: u64, scale: f64) -> DyadicFunction {
        let mut s = seed;
        DyadicFunction::from_fn(m, |_| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * scale
        })
        .unwrap()
    }

    #[test]
    fn rademacher_examples() {
        let zero = GroupPoint::zero(3).unwrap();
        let e0 = GroupPoint::unit(0, 3).unwrap();
        assert_eq!(rademacher(0, zero).unwrap(), 1.0);
        assert_eq!(rademacher(0, e0).unwrap(), -1.0);
        assert_eq!(rademacher(2, GroupPoint::new(5, 4).unwrap()).unwrap(), -1.0);
        assert!(matches!(
            rademacher(3, zero),
            Err(Error::OutOfRange { index: 3, resolution: 3 })
        ));
    }

    #[test]
    fn walsh_examples() {
        for x in 0..8 {
            assert_eq!(walsh(0, GroupPoint::new(x, 3).unwrap()).unwrap(), 1.0);
        }
        assert_eq!(walsh(5, GroupPoint::new(1, 3).unwrap()).unwrap(), -1.0);
        assert_eq!(walsh(3, GroupPoint::zero(3).unwrap()).unwrap(), 1.0);
        assert!(matches!(
            walsh(8, GroupPoint::zero(3).unwrap()),
            Err(Error::FrequencyAboveResolution { frequency: 8, resolution: 3 })
        ));
    }

    #[test]
    fn walsh_product_and_factored_forms_agree() {
        let m = 6;
        for n in 0..slot_count(m) {
            for xi in 0..slot_count(m) {
                let x = GroupPoint::new(xi, m).unwrap();
                let product: f64 = (0..m)
                    .filter(|&k| (n >> k) & 1 == 1)
                    .map(|k| rademacher(k, x).unwrap())
                    .product();
                let w = walsh(n, x).unwrap();
                assert_eq!(w, product);
                if n > 0 {
                    let top = usize::BITS - 1 - n.leading_zeros();
                    let exponent: u32 = (0..top)
                        .map(|k| ((n >> k) & 1) as u32 * x.coordinate(k) as u32)
                        .sum();
                    let factored =
                        rademacher(top, x).unwrap() * if exponent % 2 == 0 { 1.0 } else { -1.0 };
                    assert_eq!(w, factored);
                }
            }
        }
    }

    #[test]
    fn fwht_examples() {
        let one = DyadicFunction::constant(4, 1.0).unwrap();
        let s = fwht(&one);
        assert_eq!(s.coefficient(0), 1.0);
        assert!(s.coefficients()[1..].iter().all(|&c| c == 0.0));

        let w5 = walsh_function(5, 3).unwrap();
        let s = fwht(&w5);
        for k in 0..8 {
            assert_eq!(s.coefficient(k), if k == 5 { 1.0 } else { 0.0 });
        }

        // D_4 = w_0 + w_1 + w_2 + w_3 pins the Paley ordering of the butterfly
        let d4 = DyadicFunction::from_fn(3, |x| {
            (0..4).map(|k| walsh_sign(k, x)).sum::<i64>() as f64
        })
        .unwrap();
        assert_eq!(d4.values(), &[4.0, 0.0, 0.0, 0.0, 4.0, 0.0, 0.0, 0.0]);
        let s = fwht(&d4);
        assert_eq!(s.coefficients(), &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn fwht_matches_naive_on_integers() {
        for m in 1..=8 {
            let mut s = 0x9e37_79b9_u64 + m as u64;
            let f = DyadicFunction::from_fn(m, |_| {
                s = s.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
                ((s >> 33) % 2001) as f64 - 1000.0
            })
            .unwrap();
            assert_eq!(fwht(&f).coefficients(), naive_analysis(&f).as_slice());
        }
    }

    #[test]
    fn butterfly_twice_scales_by_length() {
        let f = lcg_values(9, 7, 64.0);
        let mut v = f.values().to_vec();
        fwht_in_place(&mut v);
        fwht_in_place(&mut v);
        for (a, b) in v.iter().zip(f.values()) {
            assert!((a - 512.0 * b).abs() <= 1e-9 * 512.0 * b.abs().max(1.0));
        }
        let mut ints: Vec<i64> = (0..64).map(|i| (i * 37 % 11) - 5).collect();
        let orig = ints.clone();
        fwht_in_place_i64(&mut ints);
        fwht_in_place_i64(&mut ints);
        assert!(ints.iter().zip(&orig).all(|(a, b)| *a == 64 * b));
    }

    proptest! {
        #[test]
        fn parseval_and_round_trip(m in 4u32..=12, seed in any::<u64>()) {
            let f = lcg_values(m, seed, 10.0);
            let spec = fwht(&f);
            let energy: f64 = spec.coefficients().iter().map(|c| c * c).sum();
            let norm2: f64 = f.values().iter().map(|v| v * v).sum::<f64>() * f.cell_measure();
            prop_assert!((energy - norm2).abs() <= 1e-12 * norm2);

            let back = spec.synthesize();
            let scale = f.sup_norm();
            for (a, b) in back.values().iter().zip(f.values()) {
                prop_assert!((a - b).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn partial_sum_examples() {
        let f = lcg_values(5, 3, 4.0);
        let spec = fwht(&f);
        let s0 = partial_sum(&spec, 0).unwrap();
        assert!(s0.values().iter().all(|&v| v == 0.0));
        let full = partial_sum(&spec, 32).unwrap();
        for (a, b) in full.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let w7 = walsh_function(7, 4).unwrap();
        let sw = fwht(&w7);
        for n in 0..=16 {
            let s = partial_sum(&sw, n).unwrap();
            let expected = if 7 < n { w7.clone() } else { DyadicFunction::zeros(4).unwrap() };
            assert_eq!(s, expected);
        }
        assert!(matches!(
            partial_sum(&spec, 33),
            Err(Error::FrequencyAboveResolution { frequency: 33, .. })
        ));
    }

    #[test]
    fn fejer_mean_examples() {
        let f = lcg_values(4, 11, 2.0);
        let spec = fwht(&f);
        let s1 = fejer_mean(&spec, 1).unwrap();
        for v in s1.values() {
            assert!((v - spec.coefficient(0)).abs() < 1e-15);
        }
        let w0 = DyadicFunction::constant(4, 1.0).unwrap();
        let sw0 = fwht(&w0);
        for n in 1..=16 {
            assert_eq!(fejer_mean(&sw0, n).unwrap(), w0);
        }
        // f̂ = (1, 1, 0, ...): σ_2 f = 1 + w_1 / 2
        let mut c = vec![0.0; 8];
        c[0] = 1.0;
        c[1] = 1.0;
        let spec = WalshSpectrum::new(3, c).unwrap();
        let s2 = fejer_mean(&spec, 2).unwrap();
        for x in 0..8 {
            assert_eq!(s2.values()[x], 1.0 + 0.5 * walsh_sign(1, x) as f64);
        }
        assert_eq!(fejer_mean(&spec, 0), Err(Error::InvalidCount(0)));
    }

    #[test]
    fn fejer_weights_match_mean_of_partial_sums() {
        for m in [3u32, 6, 10] {
            let f = lcg_values(m, m as u64, 8.0);
            let spec = fwht(&f);
            let len = slot_count(m);
            for n in [1, 2, 3, 7, len / 2 + 1, len] {
                let mut acc = vec![0.0; len];
                for k in 1..=n {
                    let s = partial_sum(&spec, k).unwrap();
                    acc.iter_mut().zip(s.values()).for_each(|(a, v)| *a += v);
                }
                let fm = fejer_mean(&spec, n).unwrap();
                let scale = acc.iter().fold(1e-300f64, |m, v| m.max(v.abs())) / n as f64;
                for (a, b) in acc.iter().zip(fm.values()) {
                    assert!((a / n as f64 - b).abs() <= 1e-12 * scale.max(1.0));
                }
            }
        }
    }
}
