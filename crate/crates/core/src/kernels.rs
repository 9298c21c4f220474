//! Dirichlet, Fejér and (C,α) kernels, Cesàro numbers, and the kernel scans
//! built on them.
//!
//! Kernel values are tabulated at a resolution `M` and require order
//! `n <= 2^M`, since `D_n` for such `n` is constant on rank-`M` cosets.

use rayon::prelude::*;

use crate::dyadic::{check_resolution, low_mask, slot_count, DyadicFunction};
use crate::error::{Error, Result};
use crate::walsh::{fwht_in_place, walsh_sign};

/// Cesàro numbers `A_0^α, ..., A_upto^α`.
///
/// `A_0^α = 1` and `A_n^α = A_{n-1}^α (α + n) / n`. This is the empty-product
/// convention; it is the one under which `A_n^α - A_{n-1}^α = A_n^{α-1}` and
/// `sum_{k=0}^n A_{n-k}^{α-1} = A_n^α` both hold.
#[derive(Debug, Clone, PartialEq)]
pub struct CesaroWeights {
    alpha: f64,
    values: Vec<f64>,
}

impl CesaroWeights {
    pub fn new(alpha: f64, upto: usize) -> Result<Self> {
        if alpha <= -1.0 || !alpha.is_finite() {
            return Err(Error::Pole(alpha));
        }
        let mut values = Vec::with_capacity(upto + 1);
        let mut a = 1.0;
        values.push(a);
        for n in 1..=upto {
            a = a * (alpha + n as f64) / n as f64;
            values.push(a);
        }
        Ok(Self { alpha, values })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn upto(&self) -> usize {
        self.values.len() - 1
    }

    /// `A_n^α`. Panics if `n > upto`.
    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Shorthand for [`CesaroWeights::new`].
pub fn cesaro_weights(alpha: f64, n_max: usize) -> Result<CesaroWeights> {
    CesaroWeights::new(alpha, n_max)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

fn check_order(n: usize, resolution: u32) -> Result<()> {
    check_resolution(resolution)?;
    if n > slot_count(resolution) {
        return Err(Error::FrequencyAboveResolution {
            frequency: n,
            resolution,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    Dirichlet,
    Fejer,
    Cesaro { alpha: f64 },
}

/// A tabulated kernel, optionally with its exact integer numerators
/// (`D_n` itself for Dirichlet, `n K_n` for Fejér).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub kind: KernelKind,
    pub n: usize,
    pub values: DyadicFunction,
    pub exact_numerators: Option<Vec<i64>>,
}

impl KernelTable {
    pub fn resolution(&self) -> u32 {
        self.values.resolution()
    }

    /// `∫ |K| dμ`.
    pub fn l1_norm(&self) -> f64 {
        l1_norm(self.values.values(), self.resolution())
    }
}

fn l1_norm(values: &[f64], resolution: u32) -> f64 {
    values.iter().map(|v| v.abs()).sum::<f64>() * (-(resolution as f64)).exp2()
}

/// `D_{2^j}(x)`: `2^j` on `I_j`, zero elsewhere.
pub fn dirichlet_dyadic_value(j: u32, x: usize) -> i64 {
    if x & low_mask(j) == 0 {
        1i64 << j
    } else {
        0
    }
}

/// `D_n` through `D_n = w_n sum_j n_j r_j D_{2^j}`, evaluated in integers.
///
/// On `I_j` the product `w_n r_j` only sees frequency bits above `j`, which
/// keeps the formula valid for `n = 2^M`.
pub fn dirichlet_kernel(n: usize, resolution: u32) -> Result<KernelTable> {
    check_order(n, resolution)?;
    let numerators: Vec<i64> = (0..slot_count(resolution))
        .map(|x| dirichlet_value(n, x))
        .collect();
    let values = numerators.iter().map(|&v| v as f64).collect();
    Ok(KernelTable {
        kind: KernelKind::Dirichlet,
        n,
        values: DyadicFunction::new(resolution, values)?,
        exact_numerators: Some(numerators),
    })
}

fn dirichlet_value(n: usize, x: usize) -> i64 {
    let mut acc = 0i64;
    let mut bits = n;
    while bits != 0 {
        let j = bits.trailing_zeros();
        bits &= bits - 1;
        if x & low_mask(j) == 0 {
            let high_n = n.checked_shr(j + 1).unwrap_or(0);
            let high_x = x.checked_shr(j + 1).unwrap_or(0);
            acc += walsh_sign(high_n, high_x) << j;
        }
    }
    acc
}

/// `D_n = sum_{k<n} w_k` by direct summation (reference path).
pub fn dirichlet_brute_force(n: usize, resolution: u32) -> Result<Vec<i64>> {
    check_order(n, resolution)?;
    Ok((0..slot_count(resolution))
        .map(|x| (0..n).map(|k| walsh_sign(k, x)).sum())
        .collect())
}

/// All of `D_1, ..., D_{n_max}` by incremental summation `D_{k+1} = D_k + w_k`.
/// Entry `k - 1` holds `D_k`.
pub fn dirichlet_sequence(n_max: usize, resolution: u32) -> Result<Vec<Vec<i64>>> {
    check_order(n_max, resolution)?;
    let len = slot_count(resolution);
    let mut current = vec![0i64; len];
    let mut out = Vec::with_capacity(n_max);
    for k in 0..n_max {
        for (x, v) in current.iter_mut().enumerate() {
            *v += walsh_sign(k, x);
        }
        out.push(current.clone());
    }
    Ok(out)
}

/// `2^j K_{2^j}(x)` from the closed form: `2^j (2^j + 1) / 2` on `I_j`,
/// `2^j 2^{t-1}` on `I_j(e_t)` for `t < j`, zero otherwise.
pub fn fejer_dyadic_numerator(j: u32, x: usize) -> i64 {
    let low = x & low_mask(j);
    if low == 0 {
        // (2^j)(2^j + 1) / 2, exact for j = 0 as well
        ((1i64 << j) * ((1i64 << j) + 1)) / 2
    } else {
        let t = low.trailing_zeros();
        if low == 1 << t {
            // 2^j * 2^{t-1}
            1i64 << (j + t - 1)
        } else {
            0
        }
    }
}

/// `K_{2^j}` from its closed form, with numerators `2^j K_{2^j}`.
pub fn fejer_kernel_dyadic(j: u32, resolution: u32) -> Result<KernelTable> {
    check_resolution(resolution)?;
    if j > resolution {
        return Err(Error::ResolutionTooCoarse {
            rank: j,
            resolution,
        });
    }
    let numerators: Vec<i64> = (0..slot_count(resolution))
        .map(|x| fejer_dyadic_numerator(j, x))
        .collect();
    let scale = (-(j as f64)).exp2();
    let values = numerators.iter().map(|&v| v as f64 * scale).collect();
    Ok(KernelTable {
        kind: KernelKind::Fejer,
        n: 1 << j,
        values: DyadicFunction::new(resolution, values)?,
        exact_numerators: Some(numerators),
    })
}

/// `n K_n = sum_{k=1}^n D_k` in integers (reference path).
pub fn fejer_numerator_brute_force(n: usize, resolution: u32) -> Result<Vec<i64>> {
    check_order(n, resolution)?;
    let len = slot_count(resolution);
    let mut d = vec![0i64; len];
    let mut acc = vec![0i64; len];
    for k in 0..n {
        for x in 0..len {
            d[x] += walsh_sign(k, x);
            acc[x] += d[x];
        }
    }
    Ok(acc)
}

/// `K_n` for any `n >= 1`, via `n K_n = sum_{k=1}^n D_k`.
pub fn fejer_kernel(n: usize, resolution: u32) -> Result<KernelTable> {
    if n == 0 {
        return Err(Error::InvalidCount(0));
    }
    let numerators = fejer_numerator_brute_force(n, resolution)?;
    let values = numerators.iter().map(|&v| v as f64 / n as f64).collect();
    Ok(KernelTable {
        kind: KernelKind::Fejer,
        n,
        values: DyadicFunction::new(resolution, values)?,
        exact_numerators: Some(numerators),
    })
}

/// Kernel of a (C,α) mean evaluated from its Walsh coefficients.
///
/// `K_n^α = (1/A_n^α) sum_{k=1}^n A_{n-k}^{α-1} D_k` has coefficient
/// `A_{n-1-j}^α / A_n^α` on `w_j` for `j < n`.
pub fn cesaro_kernel(alpha: f64, n: usize, resolution: u32) -> Result<KernelTable> {
    check_alpha(alpha)?;
    check_order(n, resolution)?;
    if n == 0 {
        return Err(Error::InvalidCount(0));
    }
    let weights = CesaroWeights::new(alpha, n)?;
    let values = cesaro_kernel_values(&weights, n, resolution);
    Ok(KernelTable {
        kind: KernelKind::Cesaro { alpha },
        n,
        values: DyadicFunction::new(resolution, values)?,
        exact_numerators: None,
    })
}

/// Raw values of `K_n^α`; `weights` must reach `n`.
pub(crate) fn cesaro_kernel_values(weights: &CesaroWeights, n: usize, resolution: u32) -> Vec<f64> {
    let len = slot_count(resolution);
    let an = weights.get(n);
    let mut buf = vec![0.0; len];
    for (j, c) in buf.iter_mut().enumerate().take(n) {
        *c = weights.get(n - 1 - j) / an;
    }
    fwht_in_place(&mut buf);
    buf
}

/// `K_n^α` straight from its definition as a weighted sum of Dirichlet
/// kernels. `O(n 2^M)`; used to cross-check [`cesaro_kernel`].
pub fn cesaro_kernel_reference(alpha: f64, n: usize, resolution: u32) -> Result<KernelTable> {
    check_alpha(alpha)?;
    check_order(n, resolution)?;
    if n == 0 {
        return Err(Error::InvalidCount(0));
    }
    let a = CesaroWeights::new(alpha, n)?;
    let b = CesaroWeights::new(alpha - 1.0, n)?;
    let len = slot_count(resolution);
    let mut d = vec![0i64; len];
    let mut acc = vec![0.0; len];
    for k in 1..=n {
        let weight = b.get(n - k);
        for x in 0..len {
            d[x] += walsh_sign(k - 1, x);
            acc[x] += weight * d[x] as f64;
        }
    }
    let an = a.get(n);
    acc.iter_mut().for_each(|v| *v /= an);
    Ok(KernelTable {
        kind: KernelKind::Cesaro { alpha },
        n,
        values: DyadicFunction::new(resolution, acc)?,
        exact_numerators: None,
    })
}

/// One row of an L1-norm scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Row {
    pub n: usize,
    pub norm: f64,
    pub running_max: f64,
}

/// `∫ |K_n^α| dμ` for `n = 1..=n_max`, with the running maximum.
pub fn l1_norm_scan(alpha: f64, n_max: usize, resolution: u32) -> Result<Vec<L1Row>> {
    check_alpha(alpha)?;
    check_order(n_max, resolution)?;
    let weights = CesaroWeights::new(alpha, n_max)?;
    let norms: Vec<f64> = (1..=n_max)
        .into_par_iter()
        .map(|n| l1_norm(&cesaro_kernel_values(&weights, n, resolution), resolution))
        .collect();
    let mut running = f64::NEG_INFINITY;
    Ok(norms
        .into_iter()
        .enumerate()
        .map(|(i, norm)| {
            running = running.max(norm);
            L1Row {
                n: i + 1,
                norm,
                running_max: running,
            }
        })
        .collect())
}

/// `|n|`, the index of the highest set bit (`n >= 1`).
pub fn top_bit(n: usize) -> u32 {
    debug_assert!(n > 0);
    usize::BITS - 1 - n.leading_zeros()
}

/// Outcome of comparing `|K_n^α|` against the dyadic Fejér majorant
/// `(1/A_{n-1}^α) sum_{j=0}^{|n|} 2^{jα} K_{2^j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorizationCheck {
    pub n: usize,
    /// Largest pointwise ratio over slots with nonzero majorant.
    pub worst_ratio: f64,
    pub worst_slot: usize,
    /// Slots where the majorant vanishes but the kernel does not.
    pub violations: usize,
}

/// Cached dyadic Fejér kernels and Cesàro numbers for repeated majorization
/// checks at one `(α, M)`.
pub struct MajorizationScanner {
    alpha: f64,
    resolution: u32,
    weights: CesaroWeights,
    fejer: Vec<Vec<f64>>,
}

impl MajorizationScanner {
    pub fn new(alpha: f64, resolution: u32) -> Result<Self> {
        check_alpha(alpha)?;
        check_resolution(resolution)?;
        let weights = CesaroWeights::new(alpha, slot_count(resolution))?;
        let fejer = (0..=resolution)
            .map(|j| {
                fejer_kernel_dyadic(j, resolution).map(|k| k.values.into_values())
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            alpha,
            resolution,
            weights,
            fejer,
        })
    }

    /// The majorant without its constant, tabulated.
    pub fn majorant(&self, n: usize) -> Result<Vec<f64>> {
        check_order(n, self.resolution)?;
        if n == 0 {
            return Err(Error::InvalidCount(0));
        }
        let len = slot_count(self.resolution);
        let mut out = vec![0.0; len];
        for j in 0..=top_bit(n) {
            let w = (j as f64 * self.alpha).exp2();
            for (o, k) in out.iter_mut().zip(&self.fejer[j as usize]) {
                *o += w * k;
            }
        }
        let scale = 1.0 / self.weights.get(n - 1);
        out.iter_mut().for_each(|v| *v *= scale);
        Ok(out)
    }

    pub fn check(&self, n: usize) -> Result<MajorizationCheck> {
        let majorant = self.majorant(n)?;
        let kernel = cesaro_kernel_values(&self.weights, n, self.resolution);
        let mut worst_ratio = 0.0;
        let mut worst_slot = 0;
        let mut violations = 0;
        for (x, (k, m)) in kernel.iter().zip(&majorant).enumerate() {
            if *m > 0.0 {
                let r = k.abs() / m;
                if r > worst_ratio {
                    worst_ratio = r;
                    worst_slot = x;
                }
            } else if k.abs() > 1e-12 {
                violations += 1;
            }
        }
        Ok(MajorizationCheck {
            n,
            worst_ratio,
            worst_slot,
            violations,
        })
    }
}

/// Pointwise majorization check of `K_n^α` at one order.
pub fn lemma2_majorization_check(alpha: f64, n: usize, resolution: u32) -> Result<MajorizationCheck> {
    MajorizationScanner::new(alpha, resolution)?.check(n)
}

/// Majorization checks for every `n = 1..=n_max`.
pub fn majorization_scan(alpha: f64, n_max: usize, resolution: u32) -> Result<Vec<MajorizationCheck>> {
    check_order(n_max, resolution)?;
    let scanner = MajorizationScanner::new(alpha, resolution)?;
    (1..=n_max).into_par_iter().map(|n| scanner.check(n)).collect()
}

/// `(f * K)(x) = ∫ f(t) K(x + t) dμ(t)`, `O(4^M)` reference convolution.
pub fn convolve(f: &DyadicFunction, kernel: &DyadicFunction) -> Result<DyadicFunction> {
    if f.resolution() != kernel.resolution() {
        return Err(Error::ResolutionMismatch {
            left: f.resolution(),
            right: kernel.resolution(),
        });
    }
    let fv = f.values();
    let kv = kernel.values();
    let scale = f.cell_measure();
    DyadicFunction::from_fn(f.resolution(), |x| {
        fv.iter()
            .enumerate()
            .map(|(t, v)| v * kv[x ^ t])
            .sum::<f64>()
            * scale
    })
}
