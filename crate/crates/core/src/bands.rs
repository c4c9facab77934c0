//! Tube bands `Σ × [−r, r]` embedded by Fermi coordinates, their width as a
//! shortest-path distance between the two boundary faces, and curvature of
//! the parallel surfaces between them.
//!
//! The band's `t` axis follows the surface normal of the sampled frame; the
//! face `Y₋` sits at `t = −r` and `Y₊` at `t = +r`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::immersions::SurfaceImmersion;
use crate::quadrature::QuadratureGrid;
use crate::sphere::chord_angle;
use crate::tubes::focal_radius;
use crate::vec4::{self, Vec4};

/// Bands may use at most this fraction of the focal radius.
pub const MAX_RADIUS_FRACTION: f64 = 0.98;
/// Relative bound on the metrication error of 26-neighbour shortest paths.
pub const STENCIL_ERROR: f64 = 0.08;
const CHECK_GRID: usize = 128;

#[derive(Debug, Clone)]
pub struct Band {
    core: SurfaceImmersion,
    radius: f64,
    focal_radius: f64,
}

impl Band {
    pub fn core(&self) -> &SurfaceImmersion {
        &self.core
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn focal_radius(&self) -> f64 {
        self.focal_radius
    }

    /// Ambient point at Fermi coordinates `(u, v, t)` on the first chart.
    pub fn embed(&self, u: f64, v: f64, t: f64) -> Result<Vec4> {
        if t.abs() > self.radius {
            return Err(Error::OutOfRange {
                name: "Fermi coordinate t",
                value: t,
                range: "[−r, r]",
            });
        }
        let chart = &self.core.charts()[0];
        let jet = chart.jet(u, v);
        let frame =
            crate::immersions::frame_from_jet(&jet, chart.normal_hint(&jet).as_ref(), u, v)?;
        Ok(vec4::lincomb(
            t.cos(),
            frame.point.coords(),
            t.sin(),
            &frame.normal,
        ))
    }
}

/// Builds the tube band of radius `r` over `core` after computing its focal
/// radius.
pub fn build_tube_band(core: SurfaceImmersion, r: f64) -> Result<Band> {
    let focal = focal_radius(&core)?.focal_radius;
    build_tube_band_with(core, r, focal)
}

/// [`build_tube_band`] with a known focal radius.
pub fn build_tube_band_with(core: SurfaceImmersion, r: f64, focal: f64) -> Result<Band> {
    if !(r > 0.0 && r <= MAX_RADIUS_FRACTION * focal) {
        return Err(Error::OutOfRange {
            name: "band radius",
            value: r,
            range: "(0, 0.98·focal radius]",
        });
    }
    let sampled = core.sample(&QuadratureGrid::square(CHECK_GRID)?)?;
    for s in &sampled.samples {
        for t in [-r, r] {
            let f = s.frame.fermi_factor(t);
            if !(f > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "Fermi factor {f:e} at t = {t} on chart {} node ({}, {})",
                    s.chart, s.i, s.j
                )));
            }
        }
    }
    Ok(Band {
        core,
        radius: r,
        focal_radius: focal,
    })
}

/// Fermi lattice `n × n × (n/2 + 1)` with 26-neighbour edges weighted by
/// ambient geodesic distance.
#[derive(Debug, Clone)]
pub struct GridGraph {
    pub n_u: usize,
    pub n_v: usize,
    pub n_t: usize,
    points: Vec<Vec4>,
}

impl GridGraph {
    pub fn new(band: &Band, resolution: usize) -> Result<Self> {
        let grid = QuadratureGrid::square(resolution)?;
        let n_t = resolution / 2 + 1;
        let chart = &band.core.charts()[0];
        let r = band.radius;
        let frames: Vec<(Vec4, Vec4)> = grid
            .nodes()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(i, j)| {
                let (u, v) = (grid.u(i), grid.v(j));
                let jet = chart.jet(u, v);
                crate::immersions::frame_from_jet(&jet, chart.normal_hint(&jet).as_ref(), u, v)
                    .map(|f| (*f.point.coords(), f.normal))
            })
            .collect::<Result<_>>()?;
        let mut points = Vec::with_capacity(frames.len() * n_t);
        for (x, n) in &frames {
            for k in 0..n_t {
                let t = -r + 2.0 * r * k as f64 / (n_t - 1) as f64;
                points.push(vec4::lincomb(t.cos(), x, t.sin(), n));
            }
        }
        Ok(Self {
            n_u: grid.n_u,
            n_v: grid.n_v,
            n_t,
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n_v + j) * self.n_t + k
    }

    fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let k = idx % self.n_t;
        let ij = idx / self.n_t;
        (ij / self.n_v, ij % self.n_v, k)
    }

    /// Neighbours of `idx` with edge weights; `u` and `v` wrap.
    pub fn neighbours(&self, idx: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (i, j, k) = self.coords(idx);
        let p = self.points[idx];
        (0..27).filter(|&o| o != 13).filter_map(move |o| {
            let (di, dj, dk) = (o / 9, (o / 3) % 3, o % 3);
            let kk = k + dk;
            if kk == 0 || kk > self.n_t {
                return None;
            }
            let ii = (i + self.n_u + di - 1) % self.n_u;
            let jj = (j + self.n_v + dj - 1) % self.n_v;
            let q = self.index(ii, jj, kk - 1);
            Some((q, chord_angle(&p, &self.points[q])))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    // min-heap on distance, then on index
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandWidth {
    pub radius: f64,
    pub resolution: usize,
    pub width: f64,
    /// [`STENCIL_ERROR`] times the width.
    pub error_bound: f64,
}

/// Shortest path from the face `t = −r` to the face `t = +r` in the lattice
/// graph at `resolution`.
pub fn band_width(band: &Band, resolution: usize) -> Result<BandWidth> {
    let g = GridGraph::new(band, resolution)?;
    let mut dist = vec![f64::INFINITY; g.len()];
    let mut heap = BinaryHeap::new();
    for i in 0..g.n_u {
        for j in 0..g.n_v {
            let s = g.index(i, j, 0);
            dist[s] = 0.0;
            heap.push(Entry(0.0, s));
        }
    }
    while let Some(Entry(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        if v % g.n_t == g.n_t - 1 {
            return Ok(BandWidth {
                radius: band.radius,
                resolution,
                width: d,
                error_bound: STENCIL_ERROR * d,
            });
        }
        for (w, len) in g.neighbours(v) {
            let nd = d + len;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Entry(nd, w));
            }
        }
    }
    Err(Error::Disconnected)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetReport {
    pub level: f64,
    /// Fermi coordinate of the level set, `level − r`.
    pub t: f64,
    /// Smallest and largest principal curvature of the parallel surface,
    /// against the normal pointing away from `Y₋`.
    pub min_curvature: f64,
    pub max_curvature: f64,
    pub convex: bool,
    pub samples: usize,
}

/// Principal curvatures of the parallel surface at distance `level` from
/// `Y₋`. Informational: nothing is asserted about convexity.
pub fn levelset_convexity_probe(
    band: &Band,
    level: f64,
    grid: &QuadratureGrid,
) -> Result<LevelSetReport> {
    let width = 2.0 * band.radius;
    if !(level > 0.0 && level < width) {
        return Err(Error::OutOfRange {
            name: "level",
            value: level,
            range: "(0, 2r)",
        });
    }
    let t = level - band.radius;
    let sampled = band.core.sample(grid)?;
    let (lo, hi) = sampled
        .samples
        .par_iter()
        .map(|s| {
            let (a, b) = s.frame.parallel_curvatures(t);
            (b, a)
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |x, y| (x.0.min(y.0), x.1.max(y.1)),
        );
    Ok(LevelSetReport {
        level,
        t,
        min_curvature: lo,
        max_curvature: hi,
        convex: lo > 0.0,
        samples: sampled.samples.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersions::clifford_torus;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn radius_precondition() {
        assert!(build_tube_band_with(clifford_torus(), 0.7, FRAC_PI_4).is_ok());
        assert!(build_tube_band_with(clifford_torus(), 0.8, FRAC_PI_4).is_err());
    }

    #[test]
    fn lattice_neighbours() {
        let band = build_tube_band_with(clifford_torus(), 0.5, FRAC_PI_4).unwrap();
        let g = GridGraph::new(&band, 8).unwrap();
        assert_eq!(g.neighbours(g.index(3, 3, 2)).count(), 26);
        assert_eq!(g.neighbours(g.index(0, 0, 0)).count(), 17);
        for (q, w) in g.neighbours(g.index(0, 7, 4)) {
            assert!(w > 0.0);
            assert!(g
                .neighbours(q)
                .any(|(p, w2)| p == g.index(0, 7, 4) && w2 == w));
        }
    }

    #[test]
    fn thin_band() {
        let band = build_tube_band_with(clifford_torus(), 0.01, FRAC_PI_4).unwrap();
        let w = band_width(&band, 16).unwrap().width;
        assert!((w - 0.02).abs() < 0.05 * 0.02, "{w}");
    }
}
