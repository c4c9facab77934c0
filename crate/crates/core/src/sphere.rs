//! Points, tangent vectors and geodesics of the round unit sphere, ball
//! volumes in S³ and stereographic projection.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec4::{self, Vec4};

/// Tolerance on the norm of raw input coordinates.
pub const INPUT_NORM_TOL: f64 = 1e-8;

/// A point of the unit sphere Sⁿ ⊂ ℝⁿ⁺¹, stored by its ambient coordinates.
/// `D = n + 1` is the ambient dimension; the default is S³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint<const D: usize = 4> {
    #[serde(with = "serde_coords")]
    coords: [f64; D],
}

impl<const D: usize> SpherePoint<D> {
    /// Builds a point from coordinates that are already unit length within
    /// [`INPUT_NORM_TOL`]; the stored coordinates are renormalized.
    pub fn new(coords: [f64; D]) -> Result<Self> {
        let norm = vec4::norm(&coords);
        if !norm.is_finite() || (norm - 1.0).abs() > INPUT_NORM_TOL {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self::from_unit(vec4::scale(&coords, 1.0 / norm)))
    }

    /// Radial projection of any nonzero vector onto the sphere.
    pub fn project(coords: [f64; D]) -> Result<Self> {
        let norm = vec4::norm(&coords);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotUnit { norm });
        }
        Ok(Self::from_unit(vec4::scale(&coords, 1.0 / norm)))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        let arr: [f64; D] = coords.try_into().map_err(|_| Error::DimensionMismatch {
            expected: D,
            found: coords.len(),
        })?;
        Self::new(arr)
    }

    pub(crate) fn from_unit(coords: [f64; D]) -> Self {
        Self { coords }
    }

    pub fn coords(&self) -> &[f64; D] {
        &self.coords
    }

    /// Dimension n of the sphere Sⁿ.
    pub fn dim(&self) -> usize {
        D - 1
    }

    pub fn dot(&self, other: &Self) -> f64 {
        vec4::dot(&self.coords, &other.coords)
    }

    pub fn antipode(&self) -> Self {
        Self::from_unit(vec4::scale(&self.coords, -1.0))
    }
}

/// A tangent vector `dir` at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector<const D: usize = 4> {
    pub base: SpherePoint<D>,
    pub dir: [f64; D],
}

impl<const D: usize> TangentVector<D> {
    pub fn new(base: SpherePoint<D>, dir: [f64; D]) -> Result<Self> {
        let dot = vec4::dot(base.coords(), &dir);
        if dot.abs() > 1e-10 {
            return Err(Error::NotTangent { dot });
        }
        Ok(Self { base, dir })
    }

    pub fn norm(&self) -> f64 {
        vec4::norm(&self.dir)
    }
}

/// Great-circle distance between two points, in `[0, π]`.
///
/// Evaluated as `2·atan2(|p − q|, |p + q|)`, which is well conditioned at 0
/// and π where `arccos` of the (clamped) inner product loses half the digits.
pub fn geodesic_distance<const D: usize>(p: &SpherePoint<D>, q: &SpherePoint<D>) -> f64 {
    chord_angle(p.coords(), q.coords())
}

#[inline]
pub(crate) fn chord_angle<const D: usize>(p: &[f64; D], q: &[f64; D]) -> f64 {
    let mut minus = 0.0;
    let mut plus = 0.0;
    for i in 0..D {
        let a = p[i] - q[i];
        let b = p[i] + q[i];
        minus += a * a;
        plus += b * b;
    }
    2.0 * minus.sqrt().atan2(plus.sqrt())
}

/// Dimension-checked distance for coordinates given as slices.
pub fn geodesic_distance_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    let minus: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
    let plus: f64 = p.iter().zip(q).map(|(a, b)| (a + b) * (a + b)).sum();
    Ok(2.0 * minus.sqrt().atan2(plus.sqrt()))
}

/// Follows the geodesic from `v.base` with unit initial direction `v.dir`
/// for arc length `t`.
pub fn exp_map<const D: usize>(v: &TangentVector<D>, t: f64) -> Result<SpherePoint<D>> {
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitDirection { norm });
    }
    Ok(exp_unchecked(v.base.coords(), &v.dir, t))
}

#[inline]
pub(crate) fn exp_unchecked<const D: usize>(
    base: &[f64; D],
    dir: &[f64; D],
    t: f64,
) -> SpherePoint<D> {
    let (s, c) = t.sin_cos();
    let x = vec4::lincomb(c, base, s, dir);
    SpherePoint::from_unit(vec4::normalized(&x))
}

/// Unit initial direction of the minimizing geodesic from `p` to `q`.
pub fn log_map<const D: usize>(p: &SpherePoint<D>, q: &SpherePoint<D>) -> Result<TangentVector<D>> {
    let dir = unit_log(p.coords(), q.coords()).ok_or(Error::UndefinedDirection)?;
    Ok(TangentVector { base: *p, dir })
}

/// Unit tangent at `p` pointing to `q`, or `None` when `q = ±p` within 1e-10.
#[inline]
pub(crate) fn unit_log<const D: usize>(p: &[f64; D], q: &[f64; D]) -> Option<[f64; D]> {
    let w = vec4::axpy(-vec4::dot(p, q), p, q);
    let n = vec4::norm(&w);
    if n < 1e-10 {
        None
    } else {
        Some(vec4::scale(&w, 1.0 / n))
    }
}

/// Volume of a geodesic ball of radius `s` in S³: `π(2s − sin 2s)`.
pub fn ball_volume(s: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&s) {
        return Err(Error::OutOfRange {
            name: "ball radius",
            value: s,
            range: "[0, π]",
        });
    }
    Ok(PI * (2.0 * s - (2.0 * s).sin()))
}

/// Stereographic projection of S³ from a pole onto the equatorial 3-space
/// orthogonal to it, in a fixed orthonormal basis of that space.
#[derive(Debug, Clone)]
pub struct Stereographic {
    pole: SpherePoint,
    basis: [Vec4; 3],
}

impl Stereographic {
    pub fn new(pole: SpherePoint) -> Self {
        let b = vec4::orthonormal_complement(pole.coords());
        let mut basis = [b[0], b[1], b[2]];
        // (−pole, basis) positive: the chart preserves the orientation of S³
        // as the boundary of the unit ball
        if vec4::dot(
            &vec4::cross4(pole.coords(), &basis[0], &basis[1]),
            &basis[2],
        ) > 0.0
        {
            basis[2] = vec4::scale(&basis[2], -1.0);
        }
        Self { pole, basis }
    }

    pub fn pole(&self) -> &SpherePoint {
        &self.pole
    }

    pub fn project(&self, p: &SpherePoint) -> Result<[f64; 3]> {
        let distance = geodesic_distance(p, &self.pole);
        if distance <= 1e-6 {
            return Err(Error::NearPole { distance });
        }
        Ok(self.project_raw(p.coords()))
    }

    #[inline]
    pub(crate) fn project_raw(&self, x: &Vec4) -> [f64; 3] {
        let denom = 1.0 - vec4::dot(x, self.pole.coords());
        std::array::from_fn(|k| vec4::dot(x, &self.basis[k]) / denom)
    }

    /// Image of the ambient tangent vector `dx` at `x` under the differential.
    #[inline]
    pub(crate) fn push_forward(&self, x: &Vec4, dx: &Vec4) -> [f64; 3] {
        let denom = 1.0 - vec4::dot(x, self.pole.coords());
        let dn = vec4::dot(dx, self.pole.coords());
        std::array::from_fn(|k| {
            vec4::dot(dx, &self.basis[k]) / denom
                + vec4::dot(x, &self.basis[k]) * dn / (denom * denom)
        })
    }

    pub fn unproject(&self, y: &[f64; 3]) -> SpherePoint {
        let r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        let mut x = vec4::scale(self.pole.coords(), (r2 - 1.0) / (r2 + 1.0));
        for (k, b) in self.basis.iter().enumerate() {
            x = vec4::axpy(2.0 * y[k] / (r2 + 1.0), b, &x);
        }
        SpherePoint::from_unit(vec4::normalized(&x))
    }
}

/// One-shot stereographic projection of `p` from `pole`.
pub fn stereographic_project(p: &SpherePoint, pole: &SpherePoint) -> Result<[f64; 3]> {
    Stereographic::new(*pole).project(p)
}

mod serde_coords {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const D: usize>(c: &[f64; D], s: S) -> Result<S::Ok, S::Error> {
        c.as_slice().serialize(s)
    }

    pub fn deserialize<'de, De: Deserializer<'de>, const D: usize>(
        d: De,
    ) -> Result<[f64; D], De::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into()
            .map_err(|v: Vec<f64>| serde::de::Error::invalid_length(v.len(), &"sphere coordinates"))
    }
}
