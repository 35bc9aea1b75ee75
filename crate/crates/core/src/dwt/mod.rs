//! Periodic orthonormal discrete wavelet transforms (1D and 2D) for the Haar,
//! Daubechies-2/3 and coiflet-1 filter banks, and the matrix-free sampling
//! operator built on them.

mod filters;
mod index;
mod measure;
mod transform;

pub use filters::{Wavelet, WaveletFamily};
pub use index::{log2_exact, CoeffLayout, CoefficientVector, IndexKind, MultiIndex};
pub use measure::{
    adjoint_measurement, apply_measurement, validate_sample_indices, MeasurementSet,
    SamplingOperator,
};
pub use transform::{
    analyze_in_place, forward_dwt, forward_dwt_2d, inverse_dwt, synthesize_in_place,
};
