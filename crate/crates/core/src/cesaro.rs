//! (C,α) means and their maximal operators over finite ranges of orders.
//!
//! `σ_n^α f = (1/A_n^α) sum_{k=1}^n A_{n-k}^{α-1} S_k f`. Exchanging the sums
//! gives coefficient `A_{n-1-j}^α / A_n^α` on `f̂(j) w_j` for `j < n`, so every
//! mean is one weighted synthesis of the spectrum.

use std::ops::RangeInclusive;

use crate::dyadic::{slot_count, DyadicFunction};
use crate::error::{Error, Result};
use crate::hardy::lp_quasinorm;
use crate::kernels::{check_alpha, CesaroWeights};
use crate::walsh::{fwht, fwht_in_place, WalshSpectrum};

/// Evaluates `σ_n^α f` for many `n` from one spectrum.
#[derive(Debug, Clone)]
pub struct CesaroSweeper {
    alpha: f64,
    spectrum: WalshSpectrum,
    weights: CesaroWeights,
}

impl CesaroSweeper {
    pub fn new(alpha: f64, f: &DyadicFunction) -> Result<Self> {
        Self::from_spectrum(alpha, fwht(f))
    }

    pub fn from_spectrum(alpha: f64, spectrum: WalshSpectrum) -> Result<Self> {
        check_alpha(alpha)?;
        let weights = CesaroWeights::new(alpha, slot_count(spectrum.resolution()))?;
        Ok(Self {
            alpha,
            spectrum,
            weights,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn resolution(&self) -> u32 {
        self.spectrum.resolution()
    }

    pub fn spectrum(&self) -> &WalshSpectrum {
        &self.spectrum
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidCount(0));
        }
        self.spectrum.check_order(n)
    }

    /// Writes `σ_n^α f` into `buf` (length `2^M`).
    pub fn mean_into(&self, n: usize, buf: &mut [f64]) -> Result<()> {
        self.check(n)?;
        let an = self.weights.get(n);
        buf.iter_mut().for_each(|v| *v = 0.0);
        for (j, (b, c)) in buf
            .iter_mut()
            .zip(self.spectrum.coefficients())
            .take(n)
            .enumerate()
        {
            *b = c * self.weights.get(n - 1 - j) / an;
        }
        fwht_in_place(buf);
        Ok(())
    }

    pub fn mean(&self, n: usize) -> Result<DyadicFunction> {
        let mut buf = vec![0.0; slot_count(self.resolution())];
        self.mean_into(n, &mut buf)?;
        DyadicFunction::new(self.resolution(), buf)
    }

    /// Calls `visit(n, values)` for each order in `orders`, in increasing order.
    pub fn for_each(
        &self,
        orders: RangeInclusive<usize>,
        mut visit: impl FnMut(usize, &[f64]),
    ) -> Result<()> {
        if !orders.is_empty() {
            self.check(*orders.start())?;
            self.check(*orders.end())?;
        }
        let mut buf = vec![0.0; slot_count(self.resolution())];
        for n in orders {
            self.mean_into(n, &mut buf)?;
            visit(n, &buf);
        }
        Ok(())
    }

    /// Slotwise `sup_{n in orders} |σ_n^α f| / divisor(n)`.
    pub fn weighted_sup(
        &self,
        orders: RangeInclusive<usize>,
        divisor: impl Fn(usize) -> f64,
    ) -> Result<DyadicFunction> {
        let mut out = vec![0.0f64; slot_count(self.resolution())];
        self.for_each(orders, |n, values| {
            let d = divisor(n);
            for (o, v) in out.iter_mut().zip(values) {
                *o = o.max(v.abs() / d);
            }
        })?;
        DyadicFunction::new(self.resolution(), out)
    }
}

/// `σ_n^α f`.
pub fn cesaro_mean(alpha: f64, f: &DyadicFunction, n: usize) -> Result<DyadicFunction> {
    CesaroSweeper::new(alpha, f)?.mean(n)
}

/// What a sweep retains per order.
#[derive(Debug, Clone, PartialEq)]
pub enum StoragePolicy {
    /// Keep every mean.
    Full,
    /// Keep only the `L_p` quasinorms for the listed exponents.
    Norms(Vec<f64>),
    /// `Full` up to resolution 12, `Norms` above.
    Auto(Vec<f64>),
}

/// Resolution above which [`StoragePolicy::Auto`] stops retaining functions.
pub const AUTO_FULL_STORAGE_LIMIT: u32 = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum SweepStorage {
    Functions(Vec<DyadicFunction>),
    /// `values[n - 1][e]` is the quasinorm of `σ_n^α f` for `exponents[e]`.
    Norms {
        exponents: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

/// All means `σ_1^α f, ..., σ_N^α f`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanSweep {
    pub alpha: f64,
    pub n_max: usize,
    pub storage: SweepStorage,
}

impl MeanSweep {
    /// `σ_n^α f` when functions were retained.
    pub fn get(&self, n: usize) -> Option<&DyadicFunction> {
        match &self.storage {
            SweepStorage::Functions(fs) => n.checked_sub(1).and_then(|i| fs.get(i)),
            SweepStorage::Norms { .. } => None,
        }
    }
}

/// Sweep with full storage.
pub fn mean_sweep(alpha: f64, f: &DyadicFunction, n_max: usize) -> Result<MeanSweep> {
    mean_sweep_with(alpha, f, n_max, &StoragePolicy::Full)
}

pub fn mean_sweep_with(
    alpha: f64,
    f: &DyadicFunction,
    n_max: usize,
    policy: &StoragePolicy,
) -> Result<MeanSweep> {
    let sweeper = CesaroSweeper::new(alpha, f)?;
    if n_max == 0 {
        return Err(Error::InvalidCount(0));
    }
    let resolution = f.resolution();
    let exponents = match policy {
        StoragePolicy::Full => None,
        StoragePolicy::Norms(e) => Some(e.clone()),
        StoragePolicy::Auto(e) if resolution > AUTO_FULL_STORAGE_LIMIT => Some(e.clone()),
        StoragePolicy::Auto(_) => None,
    };
    let storage = match exponents {
        None => {
            let mut fs = Vec::with_capacity(n_max);
            sweeper.for_each(1..=n_max, |_, v| {
                fs.push(DyadicFunction::new(resolution, v.to_vec()).expect("shape"));
            })?;
            SweepStorage::Functions(fs)
        }
        Some(exponents) => {
            if let Some(&p) = exponents.iter().find(|&&p| p <= 0.0 || p.is_nan()) {
                return Err(Error::InvalidExponent(p));
            }
            let mut values = Vec::with_capacity(n_max);
            let mut scratch = DyadicFunction::zeros(resolution)?;
            sweeper.for_each(1..=n_max, |_, v| {
                scratch = DyadicFunction::new(resolution, v.to_vec()).expect("shape");
                values.push(
                    exponents
                        .iter()
                        .map(|&p| lp_quasinorm(&scratch, p).expect("validated exponent"))
                        .collect(),
                );
            })?;
            SweepStorage::Norms { exponents, values }
        }
    };
    Ok(MeanSweep {
        alpha,
        n_max,
        storage,
    })
}

/// `σ^{α,*} f` truncated to `n = 1..=N`.
pub fn maximal_operator(alpha: f64, f: &DyadicFunction, n_max: usize) -> Result<DyadicFunction> {
    if n_max == 0 {
        return Err(Error::InvalidCount(0));
    }
    CesaroSweeper::new(alpha, f)?.weighted_sup(1..=n_max, |_| 1.0)
}

/// `sup_{2 <= n <= N} |σ_n^α f| / log^{1+α} n` (natural logarithm).
pub fn weighted_maximal_operator(
    alpha: f64,
    f: &DyadicFunction,
    n_max: usize,
) -> Result<DyadicFunction> {
    if n_max < 2 {
        return Err(Error::InvalidRange(n_max));
    }
    CesaroSweeper::new(alpha, f)?.weighted_sup(2..=n_max, |n| log_weight(alpha, n))
}

/// `log^{1+α} n`.
pub fn log_weight(alpha: f64, n: usize) -> f64 {
    (n as f64).ln().powf(1.0 + alpha)
}
