//! Focal radius, tube volumes in Fermi coordinates and the chain of
//! inequalities linking tube volume, area and Willmore energy of a torus.
//!
//! The focal radius is the smaller of two quantities:
//!
//! * the curvature focal distance, `min arctan(1/|κᵢ|)` over the samples,
//!   where the Fermi factor `cos t − κ sin t` first vanishes;
//! * the reach, the first radius at which normal segments issuing from
//!   distant parts of the surface meet.
//!
//! The reach is the largest `r` such that every ball of radius `r` tangent
//! to the surface at a base point `b` avoids all other points. For a pair
//! `(b, b')` that ball first touches `b'` at radius
//! `arctan((1 − b·b') / |N_b·b'|)`; a normal segment from `b` and one from
//! `b'` meet at its centre. The estimate is the smallest such radius over
//! pairs of samples farther apart than a few grid spacings. Sample points are
//! hashed in 4-space with cells of the chord `2 sin(cap)`, so only pairs that
//! could meet below the curvature cap are scored.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::immersions::{SampledSurface, SurfaceImmersion, Topology};
use crate::quadrature::{compensated_sum, gauss_legendre, QuadratureGrid};
use crate::vec4::{self, Vec4};

/// `vol(S³)`.
pub const SPHERE_VOLUME: f64 = 2.0 * PI * PI;

/// Slack used when comparing the sides of an inequality.
pub const CHAIN_TOL: f64 = 1e-6;

/// Slack on the focal radius precondition.
pub const FOCAL_SLACK: f64 = 1e-9;

/// Tube of radius `radius` about a closed surface.
#[derive(Debug, Clone)]
pub struct TubeSpec {
    pub surface: SurfaceImmersion,
    pub radius: f64,
}

impl TubeSpec {
    pub fn new(surface: SurfaceImmersion, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < FRAC_PI_2) {
            return Err(Error::OutOfRange {
                name: "tube radius",
                value: radius,
                range: "(0, π/2)",
            });
        }
        Ok(Self { surface, radius })
    }
}

/// Parameter location of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Location {
    pub chart: usize,
    pub u: f64,
    pub v: f64,
}

fn location(s: &SampledSurface, k: usize) -> Location {
    let sample = &s.samples[k];
    Location {
        chart: sample.chart,
        u: s.grid.u(sample.i),
        v: s.grid.v(sample.j),
    }
}

/// First zero of `cos t − κ sin t` for `t > 0`, i.e. `arctan(1/|κ|)`.
pub fn focal_distance(kappa: f64) -> f64 {
    1f64.atan2(kappa.abs())
}

/// Curvature focal distance of already sampled frames, with the sample
/// where it is attained.
pub fn curvature_focal_of(sampled: &SampledSurface) -> (f64, usize) {
    let (kmax, k) = sampled.max_abs_curvature();
    (focal_distance(kmax), k)
}

/// `min` over samples and `i` of `arctan(1/|κᵢ|)`.
pub fn curvature_focal_radius(surface: &SurfaceImmersion, grid: &QuadratureGrid) -> Result<f64> {
    Ok(curvature_focal_of(&surface.sample(grid)?).0)
}

/// Settings for the reach search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReachOptions {
    /// Grid points per direction.
    pub resolution: usize,
    /// Largest admissible base sample spacing; also bounds the step in `t`.
    pub tolerance: f64,
    /// Base points closer than this many sample spacings are neighbours and
    /// never count as a collision.
    pub exclusion_cells: f64,
}

impl Default for ReachOptions {
    fn default() -> Self {
        Self {
            resolution: 128,
            tolerance: 0.05,
            exclusion_cells: 4.0,
        }
    }
}

/// Two base points whose normal segments meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Collision {
    pub first: Location,
    pub second: Location,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReachEstimate {
    /// Estimated reach, capped at the curvature focal distance.
    pub value: f64,
    /// Radii in `(value − tolerance, value]` are not resolved.
    pub tolerance: f64,
    /// The closest non-local collision found below the cap, if any.
    pub collision: Option<Collision>,
    pub curvature_focal: f64,
}

/// Ball radius at `b` (normal `n`) that first reaches `q`.
fn tangent_ball_radius(b: &Vec4, n: &Vec4, q: &Vec4) -> f64 {
    (1.0 - vec4::dot(b, q))
        .max(0.0)
        .atan2(vec4::dot(n, q).abs())
}

fn cell_of(x: &Vec4, size: f64) -> [i32; 4] {
    x.map(|c| (c / size).floor() as i32)
}

/// Largest distance between a sample and its grid neighbours on the same
/// chart, for points `pos(k)`.
fn max_spacing(
    s: &SampledSurface,
    index: &HashMap<(usize, usize, usize), usize>,
    pos: impl Fn(usize) -> Vec4 + Sync,
) -> f64 {
    let g = s.grid;
    (0..s.samples.len())
        .into_par_iter()
        .map(|k| {
            let sample = &s.samples[k];
            let p = pos(k);
            [
                ((sample.i + 1) % g.n_u, sample.j),
                (sample.i, (sample.j + 1) % g.n_v),
            ]
            .iter()
            .filter_map(|&(i, j)| index.get(&(sample.chart, i, j)))
            .map(|&q| vec4::norm(&vec4::sub(&p, &pos(q))))
            .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Estimates the reach of `surface` from normal-segment collisions.
pub fn reach_estimate(surface: &SurfaceImmersion, options: &ReachOptions) -> Result<ReachEstimate> {
    let grid = QuadratureGrid::square(options.resolution)?;
    let sampled = surface.sample(&grid)?;
    reach_of(&sampled, options)
}

/// [`reach_estimate`] on frames sampled at the resolution in `options`.
pub fn reach_of(sampled: &SampledSurface, options: &ReachOptions) -> Result<ReachEstimate> {
    let samples = &sampled.samples;
    let index: HashMap<(usize, usize, usize), usize> = samples
        .iter()
        .enumerate()
        .map(|(k, s)| ((s.chart, s.i, s.j), k))
        .collect();
    let base: Vec<Vec4> = samples.iter().map(|s| *s.frame.point.coords()).collect();
    let normal: Vec<Vec4> = samples.iter().map(|s| s.frame.normal).collect();
    let spacing = max_spacing(sampled, &index, |k| base[k]);
    if spacing > options.tolerance {
        return Err(Error::TooCoarse(format!(
            "sample spacing {spacing:.4} at resolution {} exceeds the reach tolerance {}",
            options.resolution, options.tolerance
        )));
    }
    let (curvature_focal, _) = curvature_focal_of(sampled);
    let cap = curvature_focal.min(FRAC_PI_2);
    // a ball of radius below `cap` tangent at b only reaches points within 2·cap
    let reach_chord = 2.0 * cap.sin();
    let far2 = reach_chord * reach_chord;
    let exclusion = options.exclusion_cells * spacing;
    let near2 = exclusion * exclusion;
    let limit = cap.tan();
    let size = reach_chord.max(spacing);
    let mut cells: HashMap<[i32; 4], Vec<u32>> = HashMap::new();
    for (k, x) in base.iter().enumerate() {
        cells.entry(cell_of(x, size)).or_default().push(k as u32);
    }
    log::debug!(
        "reach search: {} samples in {} cells",
        samples.len(),
        cells.len()
    );

    let best = (0..base.len())
        .into_par_iter()
        .filter_map(|p| {
            let (b, n) = (&base[p], &normal[p]);
            let c = cell_of(b, size);
            let mut local: Option<(f64, usize, usize)> = None;
            for off in 0..81 {
                let mut key = c;
                let mut o = off;
                for axis in key.iter_mut() {
                    *axis += o % 3 - 1;
                    o /= 3;
                }
                let Some(bucket) = cells.get(&key) else {
                    continue;
                };
                for &q in bucket {
                    let q = q as usize;
                    if q <= p {
                        continue;
                    }
                    let bq = &base[q];
                    let gap = 1.0 - vec4::dot(b, bq);
                    let chord2 = 2.0 * gap;
                    if chord2 >= far2 || chord2 <= near2 {
                        continue;
                    }
                    let (np, nq) = (vec4::dot(n, bq).abs(), vec4::dot(&normal[q], b).abs());
                    if gap >= limit * np.max(nq) {
                        continue;
                    }
                    let r = tangent_ball_radius(b, n, bq)
                        .min(tangent_ball_radius(&base[q], &normal[q], b));
                    let cand = (r, p, q);
                    if local.is_none_or(|l| cand < l) {
                        local = Some(cand);
                    }
                }
            }
            local
        })
        .min_by(|a, b| a.partial_cmp(b).expect("finite radii"));

    let collision = best.filter(|b| b.0 < cap).map(|(radius, a, b)| Collision {
        first: location(sampled, a),
        second: location(sampled, b),
        radius,
    });
    Ok(ReachEstimate {
        value: collision.map_or(cap, |c| c.radius),
        tolerance: 0.5 * spacing,
        collision,
        curvature_focal,
    })
}

/// Settings for [`focal_radius_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FocalOptions {
    /// Grid for the curvature focal distance.
    pub curvature_grid: QuadratureGrid,
    pub reach: ReachOptions,
}

impl Default for FocalOptions {
    fn default() -> Self {
        Self {
            curvature_grid: QuadratureGrid::square(128).expect("valid grid"),
            reach: ReachOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FocalReport {
    pub curvature_focal: f64,
    pub reach_estimate: f64,
    /// `min(curvature_focal, reach_estimate)`.
    pub focal_radius: f64,
    /// Resolution limit of the reach estimate.
    pub tolerance: f64,
    /// Where the focal radius is attained.
    pub argmin: Location,
    pub collision: Option<Collision>,
}

pub fn focal_radius(surface: &SurfaceImmersion) -> Result<FocalReport> {
    focal_radius_with(surface, &FocalOptions::default())
}

pub fn focal_radius_with(
    surface: &SurfaceImmersion,
    options: &FocalOptions,
) -> Result<FocalReport> {
    let sampled = surface.sample(&options.curvature_grid)?;
    let (curvature_focal, k) = curvature_focal_of(&sampled);
    let reach = reach_estimate(surface, &options.reach)?;
    // the reach search is capped at its own (coarser) curvature focal value
    let reach_value = match reach.collision {
        Some(c) => c.radius,
        None => curvature_focal.max(reach.value),
    };
    let focal = curvature_focal.min(reach_value).min(FRAC_PI_2);
    let argmin = match reach.collision {
        Some(c) if c.radius < curvature_focal => c.first,
        _ => location(&sampled, k),
    };
    Ok(FocalReport {
        curvature_focal,
        reach_estimate: reach_value,
        focal_radius: focal,
        tolerance: reach.tolerance,
        argmin,
        collision: reach.collision,
    })
}

/// Default number of Gauss–Legendre nodes across the tube.
pub const DEFAULT_NT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TubeVolume {
    pub value: f64,
    /// The radius exceeds the curvature focal distance, so Fermi
    /// coordinates overlap and the value overcounts.
    pub beyond_focal: bool,
}

/// `∫_Σ ∫_{−r}^{r} (cos t − κ₁ sin t)(cos t − κ₂ sin t) dt dμ`.
pub fn tube_volume_numeric(
    spec: &TubeSpec,
    grid: &QuadratureGrid,
    n_t: usize,
) -> Result<TubeVolume> {
    tube_volume_of(&spec.surface.sample(grid)?, spec.radius, n_t)
}

/// [`tube_volume_numeric`] on already sampled frames.
pub fn tube_volume_of(sampled: &SampledSurface, r: f64, n_t: usize) -> Result<TubeVolume> {
    if n_t < 4 {
        return Err(Error::InvalidParameter(format!(
            "n_t = {n_t} is below the minimum of 4 Gauss–Legendre nodes"
        )));
    }
    let rule = gauss_legendre(n_t, -r, r)?;
    let value = compensated_sum(sampled.samples.iter().map(|s| {
        let inner = compensated_sum(rule.iter().map(|&(t, w)| w * s.frame.fermi_factor(t)));
        inner * s.measure(&sampled.grid)
    }));
    let (focal, _) = curvature_focal_of(sampled);
    let beyond_focal = r > focal + FOCAL_SLACK;
    if beyond_focal {
        log::warn!(
            "tube radius {r} exceeds the curvature focal distance {focal}; volume overcounts"
        );
    }
    Ok(TubeVolume {
        value,
        beyond_focal,
    })
}

/// `sin(2r)·area + 2πχ(r − sin r cos r)`.
pub fn tube_volume_formula(area: f64, euler_characteristic: i32, r: f64) -> f64 {
    (2.0 * r).sin() * area + 2.0 * PI * euler_characteristic as f64 * (r - r.sin() * r.cos())
}

/// Closed-form tube volume with the area evaluated on `grid`.
pub fn tube_volume_closed(spec: &TubeSpec, grid: &QuadratureGrid) -> Result<f64> {
    let area = spec.surface.area(grid)?;
    Ok(tube_volume_formula(
        area,
        spec.surface.topology().euler_characteristic(),
        spec.radius,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One inequality `lhs ≤ rhs` or `lhs ≥ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainEntry {
    pub label: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    /// Margin by which the inequality holds (negative if violated).
    pub slack: f64,
    pub applicable: bool,
    pub holds: bool,
    /// `|slack| ≤ tol`.
    pub tight: bool,
}

impl ChainEntry {
    fn new(
        label: &str,
        lhs: f64,
        relation: Relation,
        rhs: f64,
        applicable: bool,
        tol: f64,
    ) -> Self {
        let slack = match relation {
            Relation::AtMost => rhs - lhs,
            Relation::AtLeast => lhs - rhs,
        };
        Self {
            label: label.to_owned(),
            lhs,
            relation,
            rhs,
            slack,
            applicable,
            holds: slack >= -tol,
            tight: slack.abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub surface: String,
    pub radius: f64,
    pub focal_radius: f64,
    /// The radius exceeds the focal radius, so nothing is asserted.
    pub vacuous: bool,
    pub volume: f64,
    pub area: f64,
    pub willmore: f64,
    pub mean_square_curvature: f64,
    pub max_abs_curvature: f64,
    pub entries: Vec<ChainEntry>,
}

impl ChainReport {
    /// Every applicable inequality holds.
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| !e.applicable || e.holds)
    }

    pub fn entry(&self, label: &str) -> Option<&ChainEntry> {
        self.entries.iter().find(|e| e.label == label)
    }
}

/// Evaluates both sides of
///
/// 1. `vol B(Σ, r) ≤ 2π²`
/// 2. `sin(2r)·area ≥ cot(r)·area`
/// 3. `cot(r)·area ≤ 2π²`
/// 4. `W ≥ 2π²`
/// 5. `W ≤ ∫ (κ₁² + κ₂²)/2 dμ`
/// 6. `2π² ≤ cot²(r)·area`
///
/// and the curvature bound `max |κᵢ| ≤ cot r`. Relations 2 and 3 rest on
/// `sin 2r ≥ cot r`, which holds only for `r ≥ π/4`, and are marked
/// inapplicable below that. Relation 6 follows from 4, 5 and the curvature
/// bound and is applicable whenever `r` is within the focal radius.
pub fn verify_inequality_chain(
    surface: &SurfaceImmersion,
    r: f64,
    grid: &QuadratureGrid,
) -> Result<ChainReport> {
    let options = FocalOptions {
        curvature_grid: *grid,
        ..FocalOptions::default()
    };
    let focal = focal_radius_with(surface, &options)?;
    verify_inequality_chain_with(surface, r, grid, focal.focal_radius)
}

/// [`verify_inequality_chain`] with a known focal radius.
pub fn verify_inequality_chain_with(
    surface: &SurfaceImmersion,
    r: f64,
    grid: &QuadratureGrid,
    focal_radius: f64,
) -> Result<ChainReport> {
    if surface.topology() != Topology::Torus {
        return Err(Error::Topology(format!(
            "the tube inequality chain needs a torus, got a {}",
            surface.topology()
        )));
    }
    if !(r > 0.0 && r < FRAC_PI_2) {
        return Err(Error::OutOfRange {
            name: "chain radius",
            value: r,
            range: "(0, π/2)",
        });
    }
    let sampled = surface.sample(grid)?;
    let vacuous = r > focal_radius + FOCAL_SLACK;
    let volume = tube_volume_of(&sampled, r, DEFAULT_NT)?.value;
    let area = sampled.area();
    let willmore = sampled.willmore_energy();
    let msc = sampled.mean_square_curvature();
    let (kmax, _) = sampled.max_abs_curvature();
    let cot = 1.0 / r.tan();
    let wide = r >= std::f64::consts::FRAC_PI_4 - FOCAL_SLACK;
    let ok = !vacuous;
    use Relation::*;
    let entries = vec![
        ChainEntry::new(
            "(1) vol(B(Σ,r)) <= 2π²",
            volume,
            AtMost,
            SPHERE_VOLUME,
            ok,
            CHAIN_TOL,
        ),
        ChainEntry::new(
            "(2) sin(2r)·area >= cot(r)·area",
            (2.0 * r).sin() * area,
            AtLeast,
            cot * area,
            ok && wide,
            CHAIN_TOL,
        ),
        ChainEntry::new(
            "(3) cot(r)·area <= 2π²",
            cot * area,
            AtMost,
            SPHERE_VOLUME,
            ok && wide,
            CHAIN_TOL,
        ),
        ChainEntry::new(
            "(4) W >= 2π²",
            willmore,
            AtLeast,
            SPHERE_VOLUME,
            ok,
            CHAIN_TOL,
        ),
        ChainEntry::new(
            "(5) W <= ∫(κ₁²+κ₂²)/2",
            willmore,
            AtMost,
            msc,
            ok,
            CHAIN_TOL,
        ),
        ChainEntry::new(
            "(6) 2π² <= cot²(r)·area",
            SPHERE_VOLUME,
            AtMost,
            cot * cot * area,
            ok,
            CHAIN_TOL,
        ),
        ChainEntry::new("max|κ| <= cot(r)", kmax, AtMost, cot, ok, CHAIN_TOL),
    ];
    Ok(ChainReport {
        surface: surface.name().to_owned(),
        radius: r,
        focal_radius,
        vacuous,
        volume,
        area,
        willmore,
        mean_square_curvature: msc,
        max_abs_curvature: kmax,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersions::{clifford_torus, geodesic_sphere, rotation_torus};
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn focal_distance_of_curvature() {
        assert_eq!(focal_distance(0.0), FRAC_PI_2);
        assert!((focal_distance(1.0) - FRAC_PI_4).abs() < 1e-15);
        assert!((focal_distance(-3f64.sqrt()) - FRAC_PI_6).abs() < 1e-15);
    }

    #[test]
    fn tangent_ball_on_a_sphere() {
        // on the sphere of radius ρ every pair gives exactly ρ
        let rho = 0.9;
        let s = geodesic_sphere(rho, None)
            .unwrap()
            .sample(&QuadratureGrid::square(16).unwrap())
            .unwrap();
        let (a, b) = (&s.samples[3], &s.samples[100]);
        let r = tangent_ball_radius(
            a.frame.point.coords(),
            &a.frame.normal,
            b.frame.point.coords(),
        );
        assert!((r - rho).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_ball_difference_for_spheres() {
        let ball = |s: f64| PI * (2.0 * s - (2.0 * s).sin());
        for (rho, r) in [(FRAC_PI_3, 0.2), (1.0, 0.9), (2.5, 0.3)] {
            let area = 4.0 * PI * f64::sin(rho).powi(2);
            let closed = tube_volume_formula(area, 2, r);
            assert!((closed - (ball(rho + r) - ball(rho - r))).abs() < 1e-12);
        }
    }

    #[test]
    fn tube_spec_range() {
        assert!(TubeSpec::new(clifford_torus(), 0.0).is_err());
        assert!(TubeSpec::new(clifford_torus(), FRAC_PI_2).is_err());
        let spec = TubeSpec::new(clifford_torus(), 0.3).unwrap();
        assert!(tube_volume_numeric(&spec, &QuadratureGrid::fast(), 3).is_err());
    }

    #[test]
    fn beyond_focal_is_flagged_not_clamped() {
        let spec = TubeSpec::new(rotation_torus(FRAC_PI_6).unwrap(), 0.7).unwrap();
        let v = tube_volume_numeric(&spec, &QuadratureGrid::fast(), DEFAULT_NT).unwrap();
        assert!(v.beyond_focal);
        let closed = tube_volume_closed(&spec, &QuadratureGrid::fast()).unwrap();
        assert!((v.value - closed).abs() < 1e-9);
    }

    #[test]
    fn coarse_reach_resolution_is_rejected() {
        let opts = ReachOptions {
            resolution: 16,
            tolerance: 0.05,
            ..ReachOptions::default()
        };
        assert!(matches!(
            reach_estimate(&clifford_torus(), &opts),
            Err(Error::TooCoarse(_))
        ));
    }

    #[test]
    fn chain_rejects_spheres() {
        let s = geodesic_sphere(1.0, None).unwrap();
        assert!(matches!(
            verify_inequality_chain_with(&s, 0.5, &QuadratureGrid::fast(), 1.0),
            Err(Error::Topology(_))
        ));
    }
}
