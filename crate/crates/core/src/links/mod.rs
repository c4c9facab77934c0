//! Distances and linking between closed curves in S³.
//!
//! Two disjoint linked curves are never farther apart than `π/2`, and the
//! bound is attained by the Hopf pair of dual great circles. This module
//! measures set distances, computes linking numbers through the Gauss
//! integral of a stereographic image, probes convexity of complements of
//! large metric neighbourhoods, and searches for maximin configurations in a
//! family of Fourier loops.
//!
//! "Linked" always means a nonzero linking number here.

mod convexity;
mod distance;
mod linking;
mod search;

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use serde::Serialize;

pub use convexity::{
    complement_convexity_check, ConvexityReport, GEODESIC_POINTS, MAX_DRAWS, MEMBERSHIP_SLACK,
};
pub use distance::{curve_distance, pair_distance, sample_distance, Closest, REFINE_STEP};
pub use linking::{
    linking_number, linking_number_from, pole_design, LinkingReport, INTEGER_TOL,
    MIN_POLE_CLEARANCE,
};
pub use search::{
    extremal_search, write_trajectory_csv, FourierLoopFamily, SearchConfig, SearchResult,
    TrajectoryRow,
};

use crate::error::{Error, Result};
use crate::immersions::{great_circle, hopf_pair, small_circle, torus_knot_curve, CurvePair};

/// Slack on the `π/2` bound.
pub const GEHRING_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GehringReport {
    pub linking: LinkingReport,
    pub distance: f64,
    /// The bound only constrains linked pairs.
    pub applicable: bool,
    pub bound_satisfied: bool,
    /// Distance equals `π/2` within [`GEHRING_TOL`].
    pub saturated: bool,
}

/// Checks `d(A, B) ≤ π/2` for a linked pair.
pub fn gehring_check(pair: &CurvePair) -> Result<GehringReport> {
    let linking = linking_number(pair)?;
    let distance = pair_distance(pair, true)?.distance;
    let applicable = linking.number != 0;
    Ok(GehringReport {
        linking,
        distance,
        applicable,
        bound_satisfied: !applicable || distance <= FRAC_PI_2 + GEHRING_TOL,
        saturated: (distance - FRAC_PI_2).abs() <= GEHRING_TOL,
    })
}

/// Named curve pairs:
///
/// | name | parameters |
/// |---|---|
/// | `hopf` | none |
/// | `perturbed_hopf` | amplitude, seed, optional order (default 3) |
/// | `knot_axis` | `p`, `q`, `a`: torus knot against `{z₁ = 0}` |
/// | `unlinked_circles` | radius: small circles about `±e₀` |
pub fn make_pair(name: &str, params: &[f64]) -> Result<CurvePair> {
    let count = |what: &str, x: f64| -> Result<usize> {
        if x >= 0.0 && x.fract() == 0.0 && x < 1e9 {
            Ok(x as usize)
        } else {
            Err(Error::InvalidParameter(format!(
                "{what} must be a nonnegative integer, got {x}"
            )))
        }
    };
    let arity = |allowed: &[usize]| -> Result<()> {
        if allowed.contains(&params.len()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "pair `{name}` takes {allowed:?} parameters, got {}",
                params.len()
            )))
        }
    };
    match name {
        "hopf" | "hopf_pair" => {
            arity(&[0])?;
            Ok(hopf_pair())
        }
        "perturbed_hopf" => {
            arity(&[2, 3])?;
            let order = if params.len() == 3 {
                count("order", params[2])?
            } else {
                3
            };
            FourierLoopFamily::perturbed_hopf(order, params[0], count("seed", params[1])? as u64)?
                .pair(256)
        }
        "knot_axis" => {
            arity(&[3])?;
            let knot = torus_knot_curve(
                count("p", params[0])? as u32,
                count("q", params[1])? as u32,
                params[2],
            )?;
            let axis = great_circle([0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0])?;
            CurvePair::new(Arc::new(knot), Arc::new(axis))
        }
        "unlinked_circles" => {
            arity(&[1])?;
            let rho = params[0];
            let a = small_circle(
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                rho,
            )?;
            let b = small_circle(
                [-1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                rho,
            )?;
            CurvePair::new(Arc::new(a), Arc::new(b))
        }
        other => Err(Error::InvalidParameter(format!("unknown pair `{other}`"))),
    }
}
