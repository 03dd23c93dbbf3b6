//! The analytic side: the Følner-type profile `F` and its inverse, the Nash
//! ODE for the return-probability envelope `a(t)`, lower-bound assembly,
//! and exponent fits of `log(-log E[α^{N_n}])` against `log n`.

mod fit;
mod lower;
mod nash;

use thiserror::Error;

pub use fit::{fit_exponent, fit_values, linear_fit, write_curve_csv, BoundCurve, BoundSide, ExponentFit, LineFit};
pub use lower::{
    alpha_transfer, lemma_4_5_check, lower_bound_assemble, lower_bound_displayed, surrogate_scan, FactRow,
    Lemma45Report, LowerBoundReport, ALPHA_ONE,
};
pub use nash::{nash_ode_solve, piecewise_constants_fit, NashProfile, NashSolution, PiecewiseFit, RegimeFit};

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("need at least {needed} usable points, found {usable}")]
    InsufficientPoints { usable: usize, needed: usize },
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("radius must be positive")]
    ZeroRadius,
    #[error(transparent)]
    Walk(#[from] crate::walk::WalkError),
    #[error(transparent)]
    Cluster(#[from] crate::percolation::ClusterError),
}
