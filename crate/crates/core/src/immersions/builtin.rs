//! Built-in surface and curve families.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::curves::{
    great_circle, hopf_pair, small_circle, torus_knot_curve, ClosedCurve, CurvePair,
};
use super::{Jet, SurfaceImmersion, SurfaceMap, Topology};
use crate::error::{Error, Result};
use crate::sphere::SpherePoint;
use crate::vec4::{self, Vec4};

/// Flat torus `(cos a e^{iθ}, sin a e^{iφ})` with `(u, v) = (θ, φ)`.
#[derive(Debug, Clone, Copy)]
pub struct RotationTorus {
    pub a: f64,
}

impl SurfaceMap for RotationTorus {
    fn jet(&self, u: f64, v: f64) -> Jet {
        let (sa, ca) = self.a.sin_cos();
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        Jet {
            pos: [ca * cu, ca * su, sa * cv, sa * sv],
            du: [-ca * su, ca * cu, 0.0, 0.0],
            dv: [0.0, 0.0, -sa * sv, sa * cv],
            duu: [-ca * cu, -ca * su, 0.0, 0.0],
            duv: [0.0; 4],
            dvv: [0.0, 0.0, -sa * cv, -sa * sv],
        }
    }
}

pub fn rotation_torus(a: f64) -> Result<SurfaceImmersion> {
    if !(a > 0.0 && a < FRAC_PI_2) {
        return Err(Error::OutOfRange {
            name: "rotation torus angle a",
            value: a,
            range: "(0, π/2)",
        });
    }
    Ok(SurfaceImmersion::torus(
        format!("rotation_torus({a})"),
        RotationTorus { a },
    ))
}

/// The Clifford torus `|z₁| = |z₂| = 1/√2`.
pub fn clifford_torus() -> SurfaceImmersion {
    SurfaceImmersion::torus("clifford_torus", RotationTorus { a: FRAC_PI_4 })
}

/// Exponent of the partition of unity between the two sphere charts.
const PARTITION_POWER: i32 = 6;

/// One chart of a geodesic sphere: spherical coordinates about `polar`,
/// with the polar angle `u` running over a full period so that the chart
/// covers the sphere twice.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicSphereChart {
    pub rho: f64,
    pub center: Vec4,
    pub polar: Vec4,
    pub x: Vec4,
    pub y: Vec4,
    /// Polar axis of the companion chart.
    pub other_polar: Vec4,
}

impl GeodesicSphereChart {
    fn direction(&self, u: f64, v: f64) -> Vec4 {
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        std::array::from_fn(|k| su * (cv * self.x[k] + sv * self.y[k]) + cu * self.polar[k])
    }
}

impl SurfaceMap for GeodesicSphereChart {
    fn jet(&self, u: f64, v: f64) -> Jet {
        let (sr, cr) = self.rho.sin_cos();
        let (su, cu) = u.sin_cos();
        let (sv, cv) = v.sin_cos();
        let radial: Vec4 = std::array::from_fn(|k| cv * self.x[k] + sv * self.y[k]);
        let turn: Vec4 = std::array::from_fn(|k| -sv * self.x[k] + cv * self.y[k]);
        let s = self.direction(u, v);
        Jet {
            pos: vec4::lincomb(cr, &self.center, sr, &s),
            du: std::array::from_fn(|k| sr * (cu * radial[k] - su * self.polar[k])),
            dv: vec4::scale(&turn, sr * su),
            duu: vec4::scale(&s, -sr),
            duv: vec4::scale(&turn, sr * cu),
            dvv: vec4::scale(&radial, -sr * su),
        }
    }

    fn weight(&self, u: f64, v: f64) -> f64 {
        let s = self.direction(u, v);
        let own = (1.0 - vec4::dot(&s, &self.polar).powi(2))
            .max(0.0)
            .powi(PARTITION_POWER);
        let other = (1.0 - vec4::dot(&s, &self.other_polar).powi(2))
            .max(0.0)
            .powi(PARTITION_POWER);
        0.5 * own / (own + other)
    }

    /// Inward: toward the center.
    fn normal_hint(&self, jet: &Jet) -> Option<Vec4> {
        Some(vec4::axpy(
            -vec4::dot(&self.center, &jet.pos),
            &jet.pos,
            &self.center,
        ))
    }
}

/// Geodesic sphere of radius `rho` about `center` (default `(1, 0, 0, 0)`),
/// oriented by the inward normal.
pub fn geodesic_sphere(rho: f64, center: Option<SpherePoint>) -> Result<SurfaceImmersion> {
    if !(rho > 0.0 && rho < PI) {
        return Err(Error::OutOfRange {
            name: "geodesic sphere radius",
            value: rho,
            range: "(0, π)",
        });
    }
    let c = center.map_or([1.0, 0.0, 0.0, 0.0], |p| *p.coords());
    let b = vec4::orthonormal_complement(&c);
    let first = GeodesicSphereChart {
        rho,
        center: c,
        polar: b[2],
        x: b[0],
        y: b[1],
        other_polar: b[0],
    };
    let second = GeodesicSphereChart {
        rho,
        center: c,
        polar: b[0],
        x: b[1],
        y: b[2],
        other_polar: b[2],
    };
    Ok(SurfaceImmersion::new(
        format!("geodesic_sphere({rho})"),
        Topology::Sphere,
        vec![Arc::new(first), Arc::new(second)],
    ))
}

/// Clifford torus plus a smooth low-order Fourier displacement in ambient
/// 4-space, projected radially back to S³. The displacement has sup norm at
/// most `amplitude`.
#[derive(Debug, Clone)]
pub struct FourierTorus {
    pub seed: u64,
    pub amplitude: f64,
    modes: Vec<FourierMode>,
}

#[derive(Debug, Clone, Copy)]
struct FourierMode {
    k: f64,
    l: f64,
    cos: Vec4,
    sin: Vec4,
}

impl FourierTorus {
    pub const MAX_ORDER: i32 = 2;

    pub fn new(seed: u64, amplitude: f64) -> Result<Self> {
        if !(0.0..0.1).contains(&amplitude) {
            return Err(Error::OutOfRange {
                name: "fourier torus amplitude",
                value: amplitude,
                range: "[0, 0.1)",
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::new();
        for k in 0..=Self::MAX_ORDER {
            for l in -Self::MAX_ORDER..=Self::MAX_ORDER {
                if k == 0 && l < 0 {
                    continue;
                }
                let mut draw = || -> Vec4 { std::array::from_fn(|_| rng.gen_range(-1.0..1.0)) };
                modes.push(FourierMode {
                    k: k as f64,
                    l: l as f64,
                    cos: draw(),
                    sin: draw(),
                });
            }
        }
        let total: f64 = modes
            .iter()
            .map(|m| vec4::norm(&m.cos) + vec4::norm(&m.sin))
            .sum();
        for m in &mut modes {
            m.cos = vec4::scale(&m.cos, amplitude / total);
            m.sin = vec4::scale(&m.sin, amplitude / total);
        }
        Ok(Self {
            seed,
            amplitude,
            modes,
        })
    }
}

impl SurfaceMap for FourierTorus {
    fn jet(&self, u: f64, v: f64) -> Jet {
        let mut y = RotationTorus { a: FRAC_PI_4 }.jet(u, v);
        for m in &self.modes {
            let (s, c) = (m.k * u + m.l * v).sin_cos();
            // d/dθ of (A cos θ + B sin θ) is (−A sin θ + B cos θ)
            let f0: Vec4 = std::array::from_fn(|i| m.cos[i] * c + m.sin[i] * s);
            let f1: Vec4 = std::array::from_fn(|i| -m.cos[i] * s + m.sin[i] * c);
            y.pos = vec4::add(&y.pos, &f0);
            y.du = vec4::axpy(m.k, &f1, &y.du);
            y.dv = vec4::axpy(m.l, &f1, &y.dv);
            y.duu = vec4::axpy(-m.k * m.k, &f0, &y.duu);
            y.duv = vec4::axpy(-m.k * m.l, &f0, &y.duv);
            y.dvv = vec4::axpy(-m.l * m.l, &f0, &y.dvv);
        }
        Jet::radial_projection(&y)
    }
}

pub fn fourier_torus(seed: u64, amplitude: f64) -> Result<SurfaceImmersion> {
    let chart = FourierTorus::new(seed, amplitude)?;
    Ok(SurfaceImmersion::torus(
        format!("fourier_torus({seed}, {amplitude})"),
        chart,
    ))
}

/// Torus `(w(θ), √(1 − |w|²) e^{iφ})` whose profile `w` is a scaled Cassini
/// oval `r² = cos 2θ + √(e⁴ − sin² 2θ)`. For `e` slightly above 1 the oval
/// has a narrow waist between two round lobes, so the torus has a bottleneck
/// narrower than its curvature focal distance.
#[derive(Debug, Clone, Copy)]
pub struct DumbbellTorus {
    pub scale: f64,
    pub eccentricity: f64,
}

impl DumbbellTorus {
    /// Profile point and its first two θ-derivatives.
    fn profile(&self, theta: f64) -> [[f64; 2]; 3] {
        let e4 = self.eccentricity.powi(4);
        let (s, c) = (2.0 * theta).sin_cos();
        let root = (e4 - s * s).sqrt();
        let q = c + root;
        let dq = -2.0 * s - 2.0 * s * c / root;
        let ddq = -4.0 * c - 4.0 * (c * c - s * s) / root - 4.0 * s * s * c * c / root.powi(3);
        let r = q.sqrt();
        let dr = dq / (2.0 * r);
        let ddr = (ddq - 2.0 * dr * dr) / (2.0 * r);
        let (st, ct) = theta.sin_cos();
        let k = self.scale;
        [
            [k * r * ct, k * r * st],
            [k * (dr * ct - r * st), k * (dr * st + r * ct)],
            [
                k * ((ddr - r) * ct - 2.0 * dr * st),
                k * ((ddr - r) * st + 2.0 * dr * ct),
            ],
        ]
    }
}

impl SurfaceMap for DumbbellTorus {
    fn jet(&self, u: f64, v: f64) -> Jet {
        let [w, dw, ddw] = self.profile(u);
        let dot2 = |a: &[f64; 2], b: &[f64; 2]| a[0] * b[0] + a[1] * b[1];
        let z = (1.0 - dot2(&w, &w)).sqrt();
        let ww1 = dot2(&w, &dw);
        let dz = -ww1 / z;
        let ddz = -(dot2(&dw, &dw) + dot2(&w, &ddw)) / z - ww1 * ww1 / z.powi(3);
        let (sv, cv) = v.sin_cos();
        Jet {
            pos: [w[0], w[1], z * cv, z * sv],
            du: [dw[0], dw[1], dz * cv, dz * sv],
            dv: [0.0, 0.0, -z * sv, z * cv],
            duu: [ddw[0], ddw[1], ddz * cv, ddz * sv],
            duv: [0.0, 0.0, -dz * sv, dz * cv],
            dvv: [0.0, 0.0, -z * cv, -z * sv],
        }
    }
}

pub fn dumbbell_torus(scale: f64, eccentricity: f64) -> Result<SurfaceImmersion> {
    if !(eccentricity > 1.0 && eccentricity < 2f64.sqrt()) {
        return Err(Error::OutOfRange {
            name: "dumbbell eccentricity",
            value: eccentricity,
            range: "(1, √2)",
        });
    }
    let reach = scale * (1.0 + eccentricity * eccentricity).sqrt();
    if !(scale > 0.0 && reach < 0.95) {
        return Err(Error::InvalidParameter(format!(
            "dumbbell scale {scale} puts the profile outside the unit disk"
        )));
    }
    Ok(SurfaceImmersion::torus(
        format!("dumbbell_torus({scale}, {eccentricity})"),
        DumbbellTorus {
            scale,
            eccentricity,
        },
    ))
}

/// A constructed built-in object.
#[derive(Debug, Clone)]
pub enum Builtin {
    Surface(SurfaceImmersion),
    Curve(Arc<dyn ClosedCurve>),
    Pair(CurvePair),
}

fn expect_params(name: &str, params: &[f64], allowed: &[usize]) -> Result<()> {
    if allowed.contains(&params.len()) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} takes {allowed:?} parameters, got {}",
            params.len()
        )))
    }
}

fn as_count(name: &str, x: f64) -> Result<u64> {
    if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53) {
        Ok(x as u64)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be a nonnegative integer, got {x}"
        )))
    }
}

/// Constructs a built-in family by name.
///
/// | name | parameters |
/// |---|---|
/// | `clifford_torus` | none |
/// | `rotation_torus` | `a` |
/// | `geodesic_sphere` | `ρ` or `ρ, c₀, c₁, c₂, c₃` |
/// | `fourier_torus` | `seed, amplitude` |
/// | `dumbbell_torus` | none or `scale, e` |
/// | `great_circle` | none or two orthonormal 4-vectors |
/// | `small_circle` | `ρ` (about `(1, 0, 0, 0)` in the first three axes) |
/// | `hopf_pair` | none |
/// | `torus_knot_curve` | `p, q, a` |
pub fn make_builtin(name: &str, params: &[f64]) -> Result<Builtin> {
    match name {
        "clifford_torus" | "clifford" => {
            expect_params(name, params, &[0])?;
            Ok(Builtin::Surface(clifford_torus()))
        }
        "rotation_torus" => {
            expect_params(name, params, &[1])?;
            Ok(Builtin::Surface(rotation_torus(params[0])?))
        }
        "geodesic_sphere" => {
            expect_params(name, params, &[1, 5])?;
            let center = if params.len() == 5 {
                Some(SpherePoint::from_slice(&params[1..])?)
            } else {
                None
            };
            Ok(Builtin::Surface(geodesic_sphere(params[0], center)?))
        }
        "fourier_torus" => {
            expect_params(name, params, &[2])?;
            Ok(Builtin::Surface(fourier_torus(
                as_count("seed", params[0])?,
                params[1],
            )?))
        }
        "dumbbell_torus" => {
            expect_params(name, params, &[0, 2])?;
            let (s, e) = if params.is_empty() {
                (0.5, 1.05)
            } else {
                (params[0], params[1])
            };
            Ok(Builtin::Surface(dumbbell_torus(s, e)?))
        }
        "great_circle" => {
            expect_params(name, params, &[0, 8])?;
            let (e1, e2) = if params.is_empty() {
                ([1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0])
            } else {
                (
                    [params[0], params[1], params[2], params[3]],
                    [params[4], params[5], params[6], params[7]],
                )
            };
            Ok(Builtin::Curve(Arc::new(great_circle(e1, e2)?)))
        }
        "small_circle" => {
            expect_params(name, params, &[1])?;
            let c = [1.0, 0.0, 0.0, 0.0];
            Ok(Builtin::Curve(Arc::new(small_circle(
                c,
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                params[0],
            )?)))
        }
        "hopf_pair" | "hopf" => {
            expect_params(name, params, &[0])?;
            Ok(Builtin::Pair(hopf_pair()))
        }
        "torus_knot_curve" | "torus_knot" => {
            expect_params(name, params, &[3])?;
            let p = as_count("p", params[0])?;
            let q = as_count("q", params[1])?;
            Ok(Builtin::Curve(Arc::new(torus_knot_curve(
                p as u32, q as u32, params[2],
            )?)))
        }
        other => Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
    }
}
