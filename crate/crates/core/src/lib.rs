//! Certified bounds for the convexity-defect quantity
//! `δ_X = inf_ψ [sup_X (‖x‖² + ψ) − inf_X (‖x‖² + ψ)]` (ψ ranging over convex
//! functions on X), convex-hull membership certificates for `0 ∈ conv Φ(X)`,
//! and near-zero certificates `inf_X ‖Φ‖ ≤ L·δ_X/2` for operators whose
//! derivative is L-Lipschitz.

pub mod certify;
pub mod delta;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod minimax;
pub mod operators;
pub mod optim;
pub mod tolerances;

pub use certify::{certify_near_zero, check_theorem12, example11_table, search_small_delta};
pub use delta::{delta_bounds, DeltaBounds, PsiData};
pub use error::{Error, Result};
pub use geometry::{ConvexBody, SampleGrid};
pub use linalg::{Matrix, Vector};
pub use operators::{make_catalog_operator, OperatorHandle};
pub use tolerances::Tolerances;

/// Library version string.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
