//! One module per harness command. Each exposes a parameter struct and a
//! `run` function returning an [`ExperimentReport`](crate::report::ExperimentReport).

pub mod counterexample;
pub mod kernels;
pub mod l1norms;
pub mod lemma3;
pub mod strongsum;
pub mod theorem1a;

use dyadic_core::{CosetClass, Error, MAX_RESOLUTION};

use crate::error::{invalid, HarnessResult};

pub(crate) fn check_alpha(alpha: f64) -> HarnessResult<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha).into())
    }
}

pub(crate) fn check_resolution(m: u32) -> HarnessResult<()> {
    if (1..=MAX_RESOLUTION).contains(&m) {
        Ok(())
    } else {
        Err(Error::InvalidResolution(m).into())
    }
}

/// `n_max` must be an order representable at resolution `m`.
pub(crate) fn check_nmax(n_max: usize, m: u32) -> HarnessResult<()> {
    check_resolution(m)?;
    if n_max == 0 {
        return Err(Error::InvalidCount(0).into());
    }
    if n_max > 1usize << m {
        return Err(Error::FrequencyAboveResolution {
            frequency: n_max,
            resolution: m,
        }
        .into());
    }
    Ok(())
}

pub(crate) fn check_positive(name: &str, v: f64) -> HarnessResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {v}")))
    }
}

/// Smallest `r` with `2^r >= n`.
pub(crate) fn ceil_log2(n: usize) -> u32 {
    n.next_power_of_two().trailing_zeros()
}

/// `(-1)^{popcount(n & x)}`.
pub(crate) fn walsh_sign(n: usize, x: usize) -> i64 {
    1 - 2 * ((n & x).count_ones() & 1) as i64
}

/// Spread of a family of positive constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub min: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        values.into_iter().fold(
            Spread {
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
            },
            |s, v| Spread {
                min: s.min.min(v),
                max: s.max.max(v),
            },
        )
    }

    pub fn factor(&self) -> f64 {
        self.max / self.min
    }

    /// Positive, finite and `max <= factor * min`.
    pub fn stable_within(&self, factor: f64) -> bool {
        self.min > 0.0 && self.max.is_finite() && self.max <= factor * self.min
    }

    pub fn describe(&self) -> String {
        format!("min {} max {} factor {}", self.min, self.max, self.factor())
    }
}

/// Which class-wise kernel bound governs a coset class.
pub(crate) fn class_bound_exponents(class: &CosetClass) -> (u32, Option<u32>) {
    match *class {
        CosetClass::Pair { k, l } => (k, Some(l)),
        CosetClass::Single { k, .. } => (k, None),
    }
}

/// Slots at `resolution` grouped by the complement class of their low `m` bits,
/// in the order of `classes`.
pub(crate) fn class_members(classes: &[CosetClass], m: u32, resolution: u32) -> Vec<Vec<usize>> {
    let mask = (1usize << m) - 1;
    let mut lookup = vec![usize::MAX; 1 << m];
    for (c, class) in classes.iter().enumerate() {
        let iv = class.interval();
        for (low, slot) in lookup.iter_mut().enumerate() {
            if iv.contains(low) {
                *slot = c;
            }
        }
    }
    let mut out = vec![Vec::new(); classes.len()];
    for x in 0..(1usize << resolution) {
        let c = lookup[x & mask];
        if c != usize::MAX {
            out[c].push(x);
        }
    }
    out
}
