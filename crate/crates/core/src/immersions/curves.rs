use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::fd;
use crate::error::{Error, Result};
use crate::sphere::{chord_angle, INPUT_NORM_TOL};
use crate::vec4::{self, Vec4};

/// Default number of samples per curve.
pub const DEFAULT_RESOLUTION: usize = 256;

/// Closed curve `[0, 2π) → S³` with a derivative.
pub trait ClosedCurve: Send + Sync + fmt::Debug {
    fn point(&self, u: f64) -> Vec4;

    /// `d/du` of [`point`](Self::point).
    fn tangent(&self, u: f64) -> Vec4;

    fn label(&self) -> String;
}

/// `m` equally spaced samples starting at `u = 0`.
pub fn sample_curve(curve: &dyn ClosedCurve, m: usize) -> Vec<Vec4> {
    (0..m)
        .map(|k| curve.point(TAU * k as f64 / m as f64))
        .collect()
}

fn orthonormal_pair(e1: Vec4, e2: Vec4) -> Result<(Vec4, Vec4)> {
    for e in [&e1, &e2] {
        let n = vec4::norm(e);
        if (n - 1.0).abs() > INPUT_NORM_TOL {
            return Err(Error::NotUnit { norm: n });
        }
    }
    let d = vec4::dot(&e1, &e2);
    if d.abs() > INPUT_NORM_TOL {
        return Err(Error::InvalidParameter(format!(
            "frame vectors are not orthogonal (inner product {d:e})"
        )));
    }
    let e1 = vec4::normalized(&e1);
    let e2 = vec4::normalized(&vec4::axpy(-vec4::dot(&e1, &e2), &e1, &e2));
    Ok((e1, e2))
}

/// `cos u e₁ + sin u e₂`.
#[derive(Debug, Clone, Copy)]
pub struct GreatCircle {
    pub e1: Vec4,
    pub e2: Vec4,
}

pub fn great_circle(e1: Vec4, e2: Vec4) -> Result<GreatCircle> {
    let (e1, e2) = orthonormal_pair(e1, e2)?;
    Ok(GreatCircle { e1, e2 })
}

impl ClosedCurve for GreatCircle {
    fn point(&self, u: f64) -> Vec4 {
        let (s, c) = u.sin_cos();
        vec4::lincomb(c, &self.e1, s, &self.e2)
    }

    fn tangent(&self, u: f64) -> Vec4 {
        let (s, c) = u.sin_cos();
        vec4::lincomb(-s, &self.e1, c, &self.e2)
    }

    fn label(&self) -> String {
        format!("great_circle({:?}, {:?})", self.e1, self.e2)
    }
}

/// Circle of geodesic radius `radius` about `center` in the great 2-sphere
/// spanned by `center, e₁, e₂`.
#[derive(Debug, Clone, Copy)]
pub struct SmallCircle {
    pub center: Vec4,
    pub e1: Vec4,
    pub e2: Vec4,
    pub radius: f64,
}

pub fn small_circle(center: Vec4, e1: Vec4, e2: Vec4, radius: f64) -> Result<SmallCircle> {
    if !(radius > 0.0 && radius < std::f64::consts::PI) {
        return Err(Error::OutOfRange {
            name: "small circle radius",
            value: radius,
            range: "(0, π)",
        });
    }
    let (e1, e2) = orthonormal_pair(e1, e2)?;
    let nc = vec4::norm(&center);
    if (nc - 1.0).abs() > INPUT_NORM_TOL {
        return Err(Error::NotUnit { norm: nc });
    }
    if vec4::dot(&center, &e1).abs() > INPUT_NORM_TOL
        || vec4::dot(&center, &e2).abs() > INPUT_NORM_TOL
    {
        return Err(Error::InvalidParameter(
            "circle frame is not orthogonal to its center".into(),
        ));
    }
    Ok(SmallCircle {
        center: vec4::normalized(&center),
        e1,
        e2,
        radius,
    })
}

impl ClosedCurve for SmallCircle {
    fn point(&self, u: f64) -> Vec4 {
        let (sr, cr) = self.radius.sin_cos();
        let (s, c) = u.sin_cos();
        std::array::from_fn(|k| cr * self.center[k] + sr * (c * self.e1[k] + s * self.e2[k]))
    }

    fn tangent(&self, u: f64) -> Vec4 {
        let sr = self.radius.sin();
        let (s, c) = u.sin_cos();
        std::array::from_fn(|k| sr * (-s * self.e1[k] + c * self.e2[k]))
    }

    fn label(&self) -> String {
        format!("small_circle({})", self.radius)
    }
}

/// `(cos a e^{ipu}, sin a e^{iqu})` on the rotation torus `T_a`.
#[derive(Debug, Clone, Copy)]
pub struct TorusKnot {
    pub p: u32,
    pub q: u32,
    pub a: f64,
}

pub fn torus_knot_curve(p: u32, q: u32, a: f64) -> Result<TorusKnot> {
    if p == 0 || q == 0 || num_integer::gcd(p, q) != 1 {
        return Err(Error::InvalidParameter(format!(
            "torus knot needs coprime positive (p, q), got ({p}, {q})"
        )));
    }
    if !(a > 0.0 && a < FRAC_PI_2) {
        return Err(Error::OutOfRange {
            name: "torus knot angle a",
            value: a,
            range: "(0, π/2)",
        });
    }
    Ok(TorusKnot { p, q, a })
}

impl ClosedCurve for TorusKnot {
    fn point(&self, u: f64) -> Vec4 {
        let (sa, ca) = self.a.sin_cos();
        let (sp, cp) = (self.p as f64 * u).sin_cos();
        let (sq, cq) = (self.q as f64 * u).sin_cos();
        [ca * cp, ca * sp, sa * cq, sa * sq]
    }

    fn tangent(&self, u: f64) -> Vec4 {
        let (sa, ca) = self.a.sin_cos();
        let (p, q) = (self.p as f64, self.q as f64);
        let (sp, cp) = (p * u).sin_cos();
        let (sq, cq) = (q * u).sin_cos();
        [-p * ca * sp, p * ca * cp, -q * sa * sq, q * sa * cq]
    }

    fn label(&self) -> String {
        format!("torus_knot_curve({}, {}, {})", self.p, self.q, self.a)
    }
}

/// Radial projection of a truncated Fourier loop in ambient 4-space:
/// `Y(u) = Σₖ aₖ cos ku + bₖ sin ku`, `X = Y/|Y|`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierLoop {
    cos: Vec<Vec4>,
    sin: Vec<Vec4>,
}

impl FourierLoop {
    /// Smallest admissible ambient norm of `Y`.
    pub const MIN_AMBIENT_NORM: f64 = 0.1;
    const CHECK_SAMPLES_PER_MODE: usize = 64;

    /// `cos[k]`, `sin[k]` for `k = 0..=K`; `sin[0]` is ignored.
    pub fn new(cos: Vec<Vec4>, mut sin: Vec<Vec4>) -> Result<Self> {
        if cos.is_empty() || cos.len() != sin.len() {
            return Err(Error::InvalidParameter(
                "Fourier loop needs matching, nonempty cos/sin coefficient lists".into(),
            ));
        }
        sin[0] = [0.0; 4];
        let curve = Self { cos, sin };
        let m = Self::CHECK_SAMPLES_PER_MODE * (curve.order() + 1);
        let least = (0..m)
            .map(|k| vec4::norm(&curve.ambient(TAU * k as f64 / m as f64).0))
            .fold(f64::INFINITY, f64::min);
        if !(least > Self::MIN_AMBIENT_NORM) {
            return Err(Error::InvalidParameter(format!(
                "Fourier loop passes within {least:.3e} of the origin; radial projection is ill-defined"
            )));
        }
        Ok(curve)
    }

    pub fn order(&self) -> usize {
        self.cos.len() - 1
    }

    pub fn coefficients(&self) -> (&[Vec4], &[Vec4]) {
        (&self.cos, &self.sin)
    }

    /// Flat parameter vector `[cos₀, cos₁, sin₁, cos₂, sin₂, …]`.
    pub fn params(&self) -> Vec<f64> {
        let mut out = self.cos[0].to_vec();
        for k in 1..=self.order() {
            out.extend_from_slice(&self.cos[k]);
            out.extend_from_slice(&self.sin[k]);
        }
        out
    }

    pub fn from_params(order: usize, params: &[f64]) -> Result<Self> {
        if params.len() != 4 * (2 * order + 1) {
            return Err(Error::DimensionMismatch {
                expected: 4 * (2 * order + 1),
                found: params.len(),
            });
        }
        let chunk =
            |i: usize| -> Vec4 { params[4 * i..4 * i + 4].try_into().expect("chunk of four") };
        let mut cos = vec![chunk(0)];
        let mut sin = vec![[0.0; 4]];
        for k in 1..=order {
            cos.push(chunk(2 * k - 1));
            sin.push(chunk(2 * k));
        }
        Self::new(cos, sin)
    }

    /// Number of free parameters at order `K`.
    pub fn param_count(order: usize) -> usize {
        4 * (2 * order + 1)
    }

    /// Ambient value and derivative.
    fn ambient(&self, u: f64) -> (Vec4, Vec4) {
        let mut y = self.cos[0];
        let mut dy = [0.0; 4];
        for k in 1..=self.order() {
            let kf = k as f64;
            let (s, c) = (kf * u).sin_cos();
            for i in 0..4 {
                y[i] += self.cos[k][i] * c + self.sin[k][i] * s;
                dy[i] += kf * (-self.cos[k][i] * s + self.sin[k][i] * c);
            }
        }
        (y, dy)
    }
}

impl ClosedCurve for FourierLoop {
    fn point(&self, u: f64) -> Vec4 {
        vec4::normalized(&self.ambient(u).0)
    }

    fn tangent(&self, u: f64) -> Vec4 {
        let (y, dy) = self.ambient(u);
        let r = vec4::norm(&y);
        let x = vec4::scale(&y, 1.0 / r);
        vec4::scale(&vec4::axpy(-vec4::dot(&x, &dy), &x, &dy), 1.0 / r)
    }

    fn label(&self) -> String {
        format!("fourier_loop(K = {})", self.order())
    }
}

/// Closed curve through equally spaced samples: piecewise cubic Hermite
/// interpolation with finite-difference node tangents, projected radially.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    points: Vec<Vec4>,
    tangents: Vec<Vec4>,
}

impl SampledCurve {
    pub const MIN_SAMPLES: usize = 8;
    pub const MIN_SPEED: f64 = 1e-6;

    pub fn new(points: Vec<Vec4>) -> Result<Self> {
        let m = points.len();
        if m < Self::MIN_SAMPLES {
            return Err(Error::TooCoarse(format!(
                "sampled curve needs at least {} points, got {m}",
                Self::MIN_SAMPLES
            )));
        }
        for p in &points {
            let n = vec4::norm(p);
            if (n - 1.0).abs() > INPUT_NORM_TOL {
                return Err(Error::NotUnit { norm: n });
            }
        }
        let points: Vec<Vec4> = points.iter().map(vec4::normalized).collect();
        let h = TAU / m as f64;
        let tangents: Vec<Vec4> = (0..m)
            .map(|k| fd::first(|d| points[fd::wrap(k as isize + d, m)], h))
            .collect();
        if let Some(k) = tangents
            .iter()
            .position(|t| vec4::norm(t) <= Self::MIN_SPEED)
        {
            return Err(Error::InvalidParameter(format!(
                "sampled curve is singular at sample {k}"
            )));
        }
        Ok(Self { points, tangents })
    }

    pub fn from_curve(curve: &dyn ClosedCurve, m: usize) -> Result<Self> {
        Self::new(sample_curve(curve, m))
    }

    pub fn samples(&self) -> &[Vec4] {
        &self.points
    }

    /// Ambient Hermite value and derivative.
    fn hermite(&self, u: f64) -> (Vec4, Vec4) {
        let m = self.points.len();
        let h = TAU / m as f64;
        let x = u.rem_euclid(TAU) / h;
        let k = (x.floor() as usize).min(m - 1);
        let s = x - k as f64;
        let (p0, p1) = (&self.points[k], &self.points[(k + 1) % m]);
        let (m0, m1) = (
            vec4::scale(&self.tangents[k], h),
            vec4::scale(&self.tangents[(k + 1) % m], h),
        );
        let (s2, s3) = (s * s, s * s * s);
        let w = [
            2.0 * s3 - 3.0 * s2 + 1.0,
            s3 - 2.0 * s2 + s,
            -2.0 * s3 + 3.0 * s2,
            s3 - s2,
        ];
        let dw = [
            6.0 * s2 - 6.0 * s,
            3.0 * s2 - 4.0 * s + 1.0,
            -6.0 * s2 + 6.0 * s,
            3.0 * s2 - 2.0 * s,
        ];
        let comb = |c: &[f64; 4]| -> Vec4 {
            std::array::from_fn(|i| c[0] * p0[i] + c[1] * m0[i] + c[2] * p1[i] + c[3] * m1[i])
        };
        (comb(&w), vec4::scale(&comb(&dw), 1.0 / h))
    }
}

impl ClosedCurve for SampledCurve {
    fn point(&self, u: f64) -> Vec4 {
        vec4::normalized(&self.hermite(u).0)
    }

    fn tangent(&self, u: f64) -> Vec4 {
        let (y, dy) = self.hermite(u);
        let r = vec4::norm(&y);
        let x = vec4::scale(&y, 1.0 / r);
        vec4::scale(&vec4::axpy(-vec4::dot(&x, &dy), &x, &dy), 1.0 / r)
    }

    fn label(&self) -> String {
        format!("sampled_curve({})", self.points.len())
    }
}

/// Two disjoint closed curves with their sample resolutions.
#[derive(Debug, Clone)]
pub struct CurvePair {
    pub a: Arc<dyn ClosedCurve>,
    pub b: Arc<dyn ClosedCurve>,
    pub m_a: usize,
    pub m_b: usize,
}

impl CurvePair {
    pub const MIN_SEPARATION: f64 = 1e-4;

    pub fn new(a: Arc<dyn ClosedCurve>, b: Arc<dyn ClosedCurve>) -> Result<Self> {
        Self::with_resolution(a, b, DEFAULT_RESOLUTION, DEFAULT_RESOLUTION)
    }

    pub fn with_resolution(
        a: Arc<dyn ClosedCurve>,
        b: Arc<dyn ClosedCurve>,
        m_a: usize,
        m_b: usize,
    ) -> Result<Self> {
        if m_a < SampledCurve::MIN_SAMPLES || m_b < SampledCurve::MIN_SAMPLES {
            return Err(Error::TooCoarse(format!(
                "curve resolutions {m_a}, {m_b} are below {}",
                SampledCurve::MIN_SAMPLES
            )));
        }
        let pair = Self { a, b, m_a, m_b };
        let (sa, sb) = pair.samples();
        let distance = sa
            .par_iter()
            .map(|p| {
                sb.iter()
                    .map(|q| chord_angle(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if !(distance > Self::MIN_SEPARATION) {
            return Err(Error::NotDisjoint { distance });
        }
        Ok(pair)
    }

    /// Same curves at new resolutions.
    pub fn resampled(&self, m_a: usize, m_b: usize) -> Result<Self> {
        Self::with_resolution(self.a.clone(), self.b.clone(), m_a, m_b)
    }

    pub fn samples(&self) -> (Vec<Vec4>, Vec<Vec4>) {
        (
            sample_curve(self.a.as_ref(), self.m_a),
            sample_curve(self.b.as_ref(), self.m_b),
        )
    }
}

/// The dual great circles `{(e^{iθ}, 0)}` and `{(0, e^{iφ})}`.
pub fn hopf_pair() -> CurvePair {
    let a = GreatCircle {
        e1: [1.0, 0.0, 0.0, 0.0],
        e2: [0.0, 1.0, 0.0, 0.0],
    };
    let b = GreatCircle {
        e1: [0.0, 0.0, 1.0, 0.0],
        e2: [0.0, 0.0, 0.0, 1.0],
    };
    CurvePair::new(Arc::new(a), Arc::new(b)).expect("Hopf circles are π/2 apart")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_tangent(c: &dyn ClosedCurve, tol: f64) {
        let h = 1e-5;
        for u in [0.0, 0.7, 2.5, 6.0] {
            let fd = vec4::scale(&vec4::sub(&c.point(u + h), &c.point(u - h)), 0.5 / h);
            let err = vec4::norm(&vec4::sub(&fd, &c.tangent(u)));
            assert!(err < tol, "{}: tangent error {err:e} at u = {u}", c.label());
            assert!((vec4::norm(&c.point(u)) - 1.0).abs() < 1e-12);
        }
        let closure = vec4::norm(&vec4::sub(&c.point(0.0), &c.point(TAU - 1e-12)));
        assert!(closure < 1e-9);
    }

    #[test]
    fn analytic_tangents() {
        check_tangent(
            &great_circle([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]).unwrap(),
            1e-8,
        );
        check_tangent(&torus_knot_curve(2, 3, 0.6).unwrap(), 1e-7);
        check_tangent(
            &small_circle(
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                0.3,
            )
            .unwrap(),
            1e-8,
        );
        let f = FourierLoop::new(
            vec![
                [0.1, 0.0, 0.2, 0.0],
                [1.0, 0.1, 0.0, -0.2],
                [0.0, 0.3, 0.1, 0.0],
            ],
            vec![[0.0; 4], [0.0, 1.0, 0.1, 0.0], [0.2, 0.0, 0.0, 0.1]],
        )
        .unwrap();
        check_tangent(&f, 1e-7);
        check_tangent(&SampledCurve::from_curve(&f, 200).unwrap(), 1e-5);
    }

    #[test]
    fn sampled_curve_interpolates_smoothly() {
        let knot = torus_knot_curve(2, 3, 0.7).unwrap();
        let s = SampledCurve::from_curve(&knot, 256).unwrap();
        for u in [0.01, 1.234, 5.5] {
            assert!(vec4::norm(&vec4::sub(&s.point(u), &knot.point(u))) < 1e-6);
            assert!(vec4::norm(&vec4::sub(&s.tangent(u), &knot.tangent(u))) < 1e-3);
        }
        assert!(SampledCurve::new(vec![[1.0, 0.0, 0.0, 0.0]; 4]).is_err());
        assert!(SampledCurve::new(vec![[1.0, 0.0, 0.0, 0.0]; 16]).is_err());
    }

    #[test]
    fn parameter_round_trip() {
        let f = FourierLoop::new(
            vec![[0.0; 4], [1.0, 0.0, 0.0, 0.0]],
            vec![[0.0; 4], [0.0, 1.0, 0.0, 0.0]],
        )
        .unwrap();
        let p = f.params();
        assert_eq!(p.len(), FourierLoop::param_count(1));
        assert_eq!(FourierLoop::from_params(1, &p).unwrap(), f);
        // a loop through the origin is rejected
        assert!(FourierLoop::new(
            vec![[0.0; 4], [1.0, 0.0, 0.0, 0.0]],
            vec![[0.0; 4], [0.0; 4]]
        )
        .is_err());
    }

    #[test]
    fn pair_validation() {
        let c = Arc::new(great_circle([1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]).unwrap());
        assert!(matches!(
            CurvePair::new(c.clone(), c),
            Err(Error::NotDisjoint { .. })
        ));
        let h = hopf_pair();
        assert_eq!((h.m_a, h.m_b), (DEFAULT_RESOLUTION, DEFAULT_RESOLUTION));
        assert!(great_circle([1.0, 0.0, 0.0, 0.0], [0.5, 0.5, 0.0, 0.0]).is_err());
        assert!(torus_knot_curve(2, 4, 0.5).is_err());
    }
}
