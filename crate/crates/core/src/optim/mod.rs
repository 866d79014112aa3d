//! Small-scale optimization kernels shared by every certified quantity.

pub mod convex_min;
pub mod lp;
pub mod meb;
pub mod min_norm;

pub use convex_min::{minimize_convex, ConvexMinimum, ConvexObjective, FnObjective};
pub use lp::{solve_lp, solve_lp_with, LinearProgram, LpOptions, LpSolution, LpStatus, RowKind, Sense};
pub use meb::{min_enclosing_ball, EnclosingBall};
pub use min_norm::{min_norm_point, MinNormResult};
