use serde::Serialize;

use super::{Jet, SurfaceImmersion};
use crate::error::{Error, Result};
use crate::sphere::{SpherePoint, TangentVector};
use crate::vec4::{self, Vec4};

/// Metric determinant below which an immersion is treated as degenerate.
pub const DEGENERATE_DET: f64 = 1e-10;

/// Extrinsic geometry of a surface in S³ at one point.
///
/// The normal is the normalized generalized cross product of
/// (position, ∂u, ∂v), flipped to agree with the chart's normal hint when
/// one is given. The second fundamental form is `h_ab = ∂a∂b X · N`, and the
/// principal curvatures are the eigenvalues of `g⁻¹h`, so that the normal
/// geodesic `cos t X + sin t N` has Jacobian factors `cos t − κᵢ sin t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureFrame {
    pub point: SpherePoint,
    pub normal: Vec4,
    pub metric: [[f64; 2]; 2],
    pub second: [[f64; 2]; 2],
    pub k1: f64,
    pub k2: f64,
    pub mean: f64,
    /// Extrinsic Gauss term κ₁κ₂.
    pub gauss_ext: f64,
}

impl CurvatureFrame {
    pub fn metric_det(&self) -> f64 {
        self.metric[0][0] * self.metric[1][1] - self.metric[0][1] * self.metric[1][0]
    }

    pub fn area_element(&self) -> f64 {
        self.metric_det().sqrt()
    }

    pub fn normal_vector(&self) -> TangentVector {
        TangentVector {
            base: self.point,
            dir: self.normal,
        }
    }

    /// Intrinsic Gauss curvature `1 + κ₁κ₂`.
    pub fn intrinsic_curvature(&self) -> f64 {
        1.0 + self.gauss_ext
    }

    /// Fermi area factor `(cos t − κ₁ sin t)(cos t − κ₂ sin t)` of the
    /// parallel surface at signed distance `t`.
    pub fn fermi_factor(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        (c - self.k1 * s) * (c - self.k2 * s)
    }

    /// Principal curvatures of the parallel surface at signed distance `t`,
    /// measured against the transported normal `−sin t X + cos t N`.
    pub fn parallel_curvatures(&self, t: f64) -> (f64, f64) {
        let (s, c) = t.sin_cos();
        let shift = |k: f64| (k * c + s) / (c - k * s);
        let (a, b) = (shift(self.k1), shift(self.k2));
        (a.max(b), a.min(b))
    }
}

/// Builds the frame from a jet. `(u, v)` only labels errors.
pub fn frame_from_jet(jet: &Jet, hint: Option<&Vec4>, u: f64, v: f64) -> Result<CurvatureFrame> {
    let e = vec4::dot(&jet.du, &jet.du);
    let f = vec4::dot(&jet.du, &jet.dv);
    let g = vec4::dot(&jet.dv, &jet.dv);
    let det = e * g - f * f;
    if !(det > DEGENERATE_DET) {
        return Err(Error::DegenerateMetric { u, v, det });
    }
    let mut normal = vec4::normalized(&vec4::cross4(&jet.pos, &jet.du, &jet.dv));
    if let Some(h) = hint {
        if vec4::dot(&normal, h) < 0.0 {
            normal = vec4::scale(&normal, -1.0);
        }
    }
    let l = vec4::dot(&jet.duu, &normal);
    let m = vec4::dot(&jet.duv, &normal);
    let n = vec4::dot(&jet.dvv, &normal);
    // shape operator g⁻¹h; the discriminant is formed from its entries so
    // that umbilic points do not pick up a √ε splitting
    let s11 = (g * l - f * m) / det;
    let s12 = (g * m - f * n) / det;
    let s21 = (e * m - f * l) / det;
    let s22 = (e * n - f * m) / det;
    let mean = 0.5 * (s11 + s22);
    let gauss_ext = (l * n - m * m) / det;
    let half_gap = 0.5 * (s11 - s22);
    let disc = (half_gap * half_gap + s12 * s21).max(0.0).sqrt();
    let point = SpherePoint::from_unit(vec4::normalized(&jet.pos));
    Ok(CurvatureFrame {
        point,
        normal,
        metric: [[e, f], [f, g]],
        second: [[l, m], [m, n]],
        k1: mean + disc,
        k2: mean - disc,
        mean,
        gauss_ext,
    })
}

/// Frame of the first chart of `surface` at `(u, v)`.
pub fn curvature_frame(surface: &SurfaceImmersion, u: f64, v: f64) -> Result<CurvatureFrame> {
    let chart = &surface.charts()[0];
    let jet = chart.jet(u, v);
    let hint = chart.normal_hint(&jet);
    frame_from_jet(&jet, hint.as_ref(), u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersions::{clifford_torus, geodesic_sphere, rotation_torus};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn check_invariants(fr: &CurvatureFrame, jet: &Jet) {
        for t in [&jet.du, &jet.dv, fr.point.coords()] {
            assert!(vec4::dot(&fr.normal, t).abs() < 1e-9);
        }
        assert!(fr.k1 >= fr.k2);
        let scale = fr
            .second
            .iter()
            .flatten()
            .map(|x| x.abs())
            .fold(0.0, f64::max)
            .max(1.0);
        for k in [fr.k1, fr.k2] {
            let a = [
                [
                    fr.second[0][0] - k * fr.metric[0][0],
                    fr.second[0][1] - k * fr.metric[0][1],
                ],
                [
                    fr.second[1][0] - k * fr.metric[1][0],
                    fr.second[1][1] - k * fr.metric[1][1],
                ],
            ];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            assert!(det.abs() < 1e-8 * scale * scale, "det = {det}");
        }
    }

    #[test]
    fn clifford_principal_curvatures() {
        let s = clifford_torus();
        for (u, v) in [(0.0, 0.0), (1.0, 2.0), (4.0, 0.3)] {
            let fr = curvature_frame(&s, u, v).unwrap();
            assert!((fr.k1 - 1.0).abs() < 1e-12);
            assert!((fr.k2 + 1.0).abs() < 1e-12);
            assert!(fr.mean.abs() < 1e-12);
            check_invariants(&fr, &s.charts()[0].jet(u, v));
        }
    }

    /// For T_a = (cos a e^{iθ}, sin a e^{iφ}) the tangents are
    /// cos a (−sin θ, cos θ, 0, 0) and sin a (0, 0, −sin φ, cos φ), the unit
    /// normal is ±(sin a cos θ, sin a sin θ, −cos a cos φ, −cos a sin φ), and
    /// X_θθ·N = ∓ sin a cos a, X_φφ·N = ± sin a cos a, X_θφ = 0. Dividing by
    /// g = diag(cos²a, sin²a) gives {−tan a, cot a} up to a global sign.
    #[test]
    fn rotation_torus_principal_curvatures() {
        for a in [0.3, FRAC_PI_6, 1.0, 1.3] {
            let s = rotation_torus(a).unwrap();
            let fr = curvature_frame(&s, 0.4, 2.2).unwrap();
            let mut got = [fr.k1, fr.k2];
            got.sort_by(f64::total_cmp);
            let mut plus = [a.tan(), -1.0 / a.tan()];
            plus.sort_by(f64::total_cmp);
            let mut minus = [-a.tan(), 1.0 / a.tan()];
            minus.sort_by(f64::total_cmp);
            let matches =
                |e: [f64; 2]| (got[0] - e[0]).abs() < 1e-10 && (got[1] - e[1]).abs() < 1e-10;
            assert!(matches(plus) || matches(minus), "a = {a}: {got:?}");
        }
    }

    #[test]
    fn geodesic_sphere_is_umbilic_with_inward_normal() {
        for rho in [0.4, FRAC_PI_3, FRAC_PI_2, 2.0] {
            let s = geodesic_sphere(rho, None).unwrap();
            for (chart, jet_at) in s.charts().iter().zip([(0.7, 1.1), (2.0, 4.0)]) {
                let jet = chart.jet(jet_at.0, jet_at.1);
                let fr = frame_from_jet(&jet, chart.normal_hint(&jet).as_ref(), jet_at.0, jet_at.1)
                    .unwrap();
                let expected = 1.0 / rho.tan();
                assert!((fr.k1 - expected).abs() < 1e-10, "rho = {rho}: {fr:?}");
                assert!((fr.k2 - expected).abs() < 1e-10);
                check_invariants(&fr, &jet);
            }
        }
    }

    #[test]
    fn parallel_curvature_of_sphere() {
        let s = geodesic_sphere(FRAC_PI_3, None).unwrap();
        let fr = curvature_frame(&s, 1.0, 1.0).unwrap();
        let (a, b) = fr.parallel_curvatures(0.1);
        let expected = 1.0 / (FRAC_PI_3 - 0.1).tan();
        assert!((a - expected).abs() < 1e-12 && (b - expected).abs() < 1e-12);
        // at the focal distance of the Clifford torus the factor vanishes
        let c = curvature_frame(&clifford_torus(), 0.0, 0.0).unwrap();
        assert!(c.fermi_factor(FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn principal_pair_is_reparametrization_invariant() {
        let s = crate::immersions::fourier_torus(3, 0.05).unwrap();
        let chart = &s.charts()[0];
        let (u, v) = (1.3, 0.8);
        let fr = curvature_frame(&s, u, v).unwrap();
        // reflect u ↦ −u: jet of (u, v) ↦ X(−u, v)
        let j = chart.jet(u, v);
        let reflected = Jet {
            pos: j.pos,
            du: vec4::scale(&j.du, -1.0),
            dv: j.dv,
            duu: j.duu,
            duv: vec4::scale(&j.duv, -1.0),
            dvv: j.dvv,
        };
        let fr2 = frame_from_jet(&reflected, None, -u, v).unwrap();
        let mut a = [fr.k1.abs(), fr.k2.abs()];
        let mut b = [fr2.k1.abs(), fr2.k2.abs()];
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert!((a[0] - b[0]).abs() < 1e-9 && (a[1] - b[1]).abs() < 1e-9);
        // the reflected chart has the opposite normal
        assert!((vec4::dot(&fr.normal, &fr2.normal) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_metric_is_rejected() {
        let jet = Jet {
            pos: [1.0, 0.0, 0.0, 0.0],
            du: [0.0, 1.0, 0.0, 0.0],
            dv: [0.0, 2.0, 0.0, 0.0],
            duu: [0.0; 4],
            duv: [0.0; 4],
            dvv: [0.0; 4],
        };
        assert!(matches!(
            frame_from_jet(&jet, None, 0.0, 0.0),
            Err(Error::DegenerateMetric { .. })
        ));
    }
}
