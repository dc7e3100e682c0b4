//! Weighted norms, coefficients from point evaluations, approximation
//! errors, inequality probes and convergence-rate fits.

mod approx;
mod coeffs;
mod fit;
mod norms;
mod oracle;
mod probe;

pub use approx::{approx_error, law_error_sq, ApproxOperator, CoefficientSource, SeparableLaw, TAIL_FRACTION};
pub use coeffs::{coefficients_from_oracle, exact_coefficient_defect, COEFF_TOL};
pub use fit::{fit_rate, RateFit};
pub use norms::{h_norm, h_norm_for, lq_norm, rho, sobolev_norm, sobolev_norm_expansion, NormOptions, Target};
pub use oracle::{derivative_orders, differentiate_axis, evaluate, DerivFn, EvalFn, FunctionOracle};
pub use probe::{inequality_probe, ProbeKind, ProbeRow, ProbeSpec};
