//! Numerical thresholds used across the crate, each pinned once.

/// A frame matrix with `|det A|` at or below this is treated as singular.
/// Far below the conditioning of any catalog case, far above f64 noise.
pub const SINGULAR_DET: f64 = 1e-12;

/// Default central-difference step. With O(h²) truncation this puts the
/// derivative error near 1e-8 on order-one coefficients.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Default fixed step for the classical 4th-order Runge-Kutta kernels.
pub const DEFAULT_ODE_STEP: f64 = 1e-3;

/// Integrability check passes below this: ten times the finite-difference
/// error bound at [`DEFAULT_FD_STEP`] on catalog-scale coefficients.
pub const DEFAULT_OBSTRUCTION_TOL: f64 = 1e-6;

/// Frame residual verification passes below this. One order of slack
/// above the build refusal threshold avoids flapping near it.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-5;

/// Determinant transport is compared against the trace integral at this
/// tolerance.
pub const DEFAULT_LIOUVILLE_TOL: f64 = 1e-6;

/// An adapted map must reproduce the identity-plus-constant embedding at
/// grid nodes within this.
pub const ADAPTED_EMBED_TOL: f64 = 1e-12;
