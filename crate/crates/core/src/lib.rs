//! Walsh–Fourier analysis on the dyadic group at finite resolution.
//!
//! The crate is organized bottom-up:
//!
//! - [`dyadic`]: group points, dyadic intervals, functions constant on fine cosets;
//! - [`walsh`]: Rademacher/Walsh functions and the fast Walsh–Hadamard transform;
//! - [`kernels`]: Dirichlet, Fejér and (C,α) kernels and Cesàro numbers;
//! - [`cesaro`]: (C,α) means and their maximal operators;
//! - [`hardy`]: martingales, quasinorms, atoms and test functions.

pub mod cesaro;
pub mod dyadic;
pub mod error;
pub mod hardy;
pub mod kernels;
pub mod walsh;

pub use cesaro::{
    cesaro_mean, maximal_operator, mean_sweep, mean_sweep_with, weighted_maximal_operator,
    CesaroSweeper, MeanSweep, StoragePolicy, SweepStorage,
};
pub use dyadic::{
    add, complement_classes, complement_partition, interval_indices, make_point, CosetClass,
    DyadicFunction, DyadicInterval, GroupPoint, MAX_RESOLUTION,
};
pub use error::{Error, Result};
pub use hardy::{
    conditional_expectation, counterexample, hp_quasinorm, lp_quasinorm, maximal_function,
    random_atom, validate_atom, weak_lp_quasinorm, AtomSpec, AtomValidation, CounterexampleSpec,
    FiniteMartingale,
};
pub use kernels::{
    cesaro_kernel, cesaro_weights, dirichlet_kernel, fejer_kernel_dyadic, l1_norm_scan,
    lemma2_majorization_check, CesaroWeights, KernelKind, KernelTable,
};
pub use walsh::{fejer_mean, fwht, partial_sum, rademacher, walsh, WalshSpectrum};
