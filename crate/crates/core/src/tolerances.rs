use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Library-wide numerical defaults. Every solver takes its tolerance
/// explicitly; these are the values the high-level entry points pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Absolute feasibility for LP solutions.
    pub lp_feasibility: f64,
    /// Frank–Wolfe dual-gap target.
    pub fw_gap: f64,
    /// Target slack for certified convex minimization.
    pub convex_min_slack: f64,
    /// Residual below which `0` counts as a member of a sampled hull.
    pub hull: f64,
    /// Central finite-difference step for Jacobians.
    pub fd_step: f64,
    /// Relative tolerance of the spectral-norm power iteration.
    pub power_iteration: f64,
    /// Largest grid handed to the δ lower-bound LP.
    pub lp_max_points: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            lp_feasibility: 1e-8,
            fw_gap: 1e-10,
            convex_min_slack: 1e-6,
            hull: 1e-6,
            fd_step: 1e-5,
            power_iteration: 1e-10,
            lp_max_points: 200.0,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 7] = [
        "lp_feasibility",
        "fw_gap",
        "convex_min_slack",
        "hull",
        "fd_step",
        "power_iteration",
        "lp_max_points",
    ];

    /// Overrides one field by name.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter {
                name: name.to_string(),
                reason: format!("tolerance must be positive and finite, got {value}"),
            });
        }
        let slot = match name {
            "lp_feasibility" => &mut self.lp_feasibility,
            "fw_gap" => &mut self.fw_gap,
            "convex_min_slack" => &mut self.convex_min_slack,
            "hull" => &mut self.hull,
            "fd_step" => &mut self.fd_step,
            "power_iteration" => &mut self.power_iteration,
            "lp_max_points" => &mut self.lp_max_points,
            _ => {
                return Err(Error::InvalidParameter {
                    name: name.to_string(),
                    reason: format!("unknown tolerance; expected one of {:?}", Self::NAMES),
                })
            }
        };
        *slot = value;
        Ok(())
    }
}
