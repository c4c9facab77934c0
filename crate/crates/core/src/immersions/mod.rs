//! Parametrized closed surfaces and curves in S³ together with the
//! curvature, area, Willmore and Gauss–Bonnet integrals over them.
//!
//! A surface is a list of charts on the periodic square [0, 2π)². Tori use
//! one chart. Spheres use two charts with polar axes at right angles, each
//! covering the sphere twice and carrying a smooth partition-of-unity weight
//! that vanishes at its own poles, so every integrand stays periodic and
//! smooth and the trapezoidal rule keeps its spectral accuracy.

mod builtin;
mod curvature;
mod curves;
pub(crate) mod fd;
mod grid_file;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{compensated_sum, QuadratureGrid};
use crate::vec4::{self, Vec4};

pub use builtin::{
    clifford_torus, dumbbell_torus, fourier_torus, geodesic_sphere, make_builtin, rotation_torus,
    Builtin, DumbbellTorus, FourierTorus, GeodesicSphereChart, RotationTorus,
};
pub use curvature::{curvature_frame, frame_from_jet, CurvatureFrame};
pub use curves::{
    great_circle, hopf_pair, sample_curve, small_circle, torus_knot_curve, ClosedCurve, CurvePair,
    FourierLoop, GreatCircle, SampledCurve, SmallCircle, TorusKnot,
};
pub use grid_file::{
    load_grid_surface, read_grid_surface, write_grid_samples, write_grid_surface, GridSurface,
};

/// Position and first and second parameter derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub pos: Vec4,
    pub du: Vec4,
    pub dv: Vec4,
    pub duu: Vec4,
    pub duv: Vec4,
    pub dvv: Vec4,
}

impl Jet {
    /// Jet of `Y / |Y|` from the jet of an ambient map `Y`.
    pub fn radial_projection(y: &Jet) -> Jet {
        let r2 = vec4::dot(&y.pos, &y.pos);
        let r = r2.sqrt();
        let s = 1.0 / r;
        let r3 = r2 * r;
        let r5 = r3 * r2;
        let yu = vec4::dot(&y.pos, &y.du);
        let yv = vec4::dot(&y.pos, &y.dv);
        let su = -yu / r3;
        let sv = -yv / r3;
        let second = |ya: &Vec4, yb: &Vec4, yab: &Vec4, pa: f64, pb: f64| -> f64 {
            -(vec4::dot(ya, yb) + vec4::dot(&y.pos, yab)) / r3 + 3.0 * pa * pb / r5
        };
        let suu = second(&y.du, &y.du, &y.duu, yu, yu);
        let suv = second(&y.du, &y.dv, &y.duv, yu, yv);
        let svv = second(&y.dv, &y.dv, &y.dvv, yv, yv);
        let comb = |yab: &Vec4, sa: f64, yb: &Vec4, sb: f64, ya: &Vec4, sab: f64| -> Vec4 {
            std::array::from_fn(|k| s * yab[k] + sa * yb[k] + sb * ya[k] + sab * y.pos[k])
        };
        Jet {
            pos: vec4::scale(&y.pos, s),
            du: vec4::lincomb(s, &y.du, su, &y.pos),
            dv: vec4::lincomb(s, &y.dv, sv, &y.pos),
            duu: comb(&y.duu, su, &y.du, su, &y.du, suu),
            duv: comb(&y.duv, su, &y.dv, sv, &y.du, suv),
            dvv: comb(&y.dvv, sv, &y.dv, sv, &y.dv, svv),
        }
    }
}

/// One chart of a surface: a smooth map of the periodic square into S³.
pub trait SurfaceMap: Send + Sync + fmt::Debug {
    fn jet(&self, u: f64, v: f64) -> Jet;

    /// Partition-of-unity weight of this chart, including the reciprocal of
    /// its covering multiplicity.
    fn weight(&self, _u: f64, _v: f64) -> f64 {
        1.0
    }

    /// Optional vector fixing the sign of the unit normal (`N · hint > 0`).
    /// Without a hint the normal orientation comes from the order
    /// (position, ∂u, ∂v) of the generalized cross product.
    fn normal_hint(&self, _jet: &Jet) -> Option<Vec4> {
        None
    }

    /// Lattice on which the chart is known, for surfaces loaded from samples.
    fn native_grid(&self) -> Option<QuadratureGrid> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Torus,
    Sphere,
}

impl Topology {
    pub fn euler_characteristic(self) -> i32 {
        match self {
            Topology::Torus => 0,
            Topology::Sphere => 2,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Torus => "torus",
            Topology::Sphere => "sphere",
        })
    }
}

/// A closed immersed surface in S³.
#[derive(Debug, Clone)]
pub struct SurfaceImmersion {
    name: String,
    topology: Topology,
    charts: Vec<Arc<dyn SurfaceMap>>,
}

/// Weights below this are treated as zero; charts are only evaluated where
/// they carry weight, which keeps polar degeneracies out of the samples.
const MIN_WEIGHT: f64 = 1e-14;

impl SurfaceImmersion {
    pub fn new(
        name: impl Into<String>,
        topology: Topology,
        charts: Vec<Arc<dyn SurfaceMap>>,
    ) -> Self {
        assert!(!charts.is_empty(), "a surface needs at least one chart");
        Self {
            name: name.into(),
            topology,
            charts,
        }
    }

    pub fn torus(name: impl Into<String>, chart: impl SurfaceMap + 'static) -> Self {
        Self::new(name, Topology::Torus, vec![Arc::new(chart)])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn charts(&self) -> &[Arc<dyn SurfaceMap>] {
        &self.charts
    }

    /// Checks that `grid` can be evaluated on every chart (sampled surfaces
    /// accept only grids that subsample their own lattice).
    pub fn check_grid(&self, grid: &QuadratureGrid) -> Result<()> {
        for chart in &self.charts {
            if let Some(native) = chart.native_grid() {
                if native.n_u % grid.n_u != 0 || native.n_v % grid.n_v != 0 {
                    return Err(Error::InvalidParameter(format!(
                        "grid {}x{} does not subsample the {}x{} lattice of {}",
                        grid.n_u, grid.n_v, native.n_u, native.n_v, self.name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Computes curvature frames on every weighted grid node of every chart.
    pub fn sample(&self, grid: &QuadratureGrid) -> Result<SampledSurface> {
        self.check_grid(grid)?;
        let per_chart = grid.len();
        let samples: Vec<Option<Result<SurfaceSample>>> = (0..self.charts.len() * per_chart)
            .into_par_iter()
            .map(|k| {
                let chart_index = k / per_chart;
                let (i, j) = ((k % per_chart) / grid.n_v, k % grid.n_v);
                let chart = &self.charts[chart_index];
                let (u, v) = (grid.u(i), grid.v(j));
                let weight = chart.weight(u, v);
                if weight < MIN_WEIGHT {
                    return None;
                }
                let jet = chart.jet(u, v);
                let hint = chart.normal_hint(&jet);
                Some(
                    frame_from_jet(&jet, hint.as_ref(), u, v).map(|frame| SurfaceSample {
                        chart: chart_index,
                        i,
                        j,
                        weight,
                        jet,
                        frame,
                    }),
                )
            })
            .collect();
        let samples = samples.into_iter().flatten().collect::<Result<Vec<_>>>()?;
        Ok(SampledSurface {
            grid: *grid,
            topology: self.topology,
            samples,
        })
    }

    /// Area `∫ √det g du dv`.
    pub fn area(&self, grid: &QuadratureGrid) -> Result<f64> {
        Ok(self.sample(grid)?.area())
    }

    /// Willmore energy `∫ (1 + H²) dμ` with `H = (κ₁ + κ₂)/2`.
    pub fn willmore_energy(&self, grid: &QuadratureGrid) -> Result<f64> {
        Ok(self.sample(grid)?.willmore_energy())
    }

    /// `(1/2π) ∫ (1 + κ₁κ₂) dμ`, the Euler characteristic via the Gauss
    /// equation `K = 1 + κ₁κ₂` and Gauss–Bonnet.
    pub fn gauss_bonnet_characteristic(&self, grid: &QuadratureGrid) -> Result<f64> {
        Ok(self.sample(grid)?.gauss_bonnet_characteristic())
    }
}

/// One weighted quadrature node with its curvature frame.
#[derive(Debug, Clone)]
pub struct SurfaceSample {
    pub chart: usize,
    pub i: usize,
    pub j: usize,
    pub weight: f64,
    pub jet: Jet,
    pub frame: CurvatureFrame,
}

impl SurfaceSample {
    /// Quadrature weight of this node for integrals against `dμ`.
    pub fn measure(&self, grid: &QuadratureGrid) -> f64 {
        self.weight * self.frame.area_element() * grid.cell_area()
    }
}

/// Curvature frames on a quadrature grid, reused across integrals.
#[derive(Debug, Clone)]
pub struct SampledSurface {
    pub grid: QuadratureGrid,
    pub topology: Topology,
    pub samples: Vec<SurfaceSample>,
}

impl SampledSurface {
    /// `∫ f dμ`, summed in chart/row-major order.
    pub fn integrate(&self, f: impl Fn(&CurvatureFrame) -> f64) -> f64 {
        compensated_sum(
            self.samples
                .iter()
                .map(|s| f(&s.frame) * s.measure(&self.grid)),
        )
    }

    pub fn area(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn willmore_energy(&self) -> f64 {
        self.integrate(|f| 1.0 + f.mean * f.mean)
    }

    /// `∫ (κ₁² + κ₂²)/2 dμ`.
    pub fn mean_square_curvature(&self) -> f64 {
        self.integrate(|f| 0.5 * (f.k1 * f.k1 + f.k2 * f.k2))
    }

    pub fn gauss_bonnet_characteristic(&self) -> f64 {
        self.integrate(|f| 1.0 + f.k1 * f.k2) / std::f64::consts::TAU
    }

    /// Largest `|κᵢ|` over the samples, with the index of the sample.
    pub fn max_abs_curvature(&self) -> (f64, usize) {
        let mut best = (0.0, 0);
        for (k, s) in self.samples.iter().enumerate() {
            let m = s.frame.k1.abs().max(s.frame.k2.abs());
            if m > best.0 {
                best = (m, k);
            }
        }
        best
    }
}
