use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::immersions::{ClosedCurve, CurvePair};
use crate::sphere::{chord_angle, SpherePoint, Stereographic};
use crate::vec4::Vec4;

/// Smallest admissible distance from the projection pole to either curve.
pub const MIN_POLE_CLEARANCE: f64 = 0.2;
/// Largest admissible distance of the raw integral from an integer.
pub const INTEGER_TOL: f64 = 0.1;

const DESIGN_LEVELS: usize = 6;
const DESIGN_PHASES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkingReport {
    pub number: i64,
    /// Value of the Gauss integral before rounding.
    pub raw: f64,
    pub pole: Vec4,
    pub clearance: f64,
}

/// 600 points in Hopf coordinates `(cos η e^{iξ₁}, sin η e^{iξ₂})`, with
/// `sin² η` equally spaced so that every point carries equal volume.
pub fn pole_design() -> &'static [Vec4] {
    static DESIGN: OnceLock<Vec<Vec4>> = OnceLock::new();
    DESIGN.get_or_init(|| {
        let mut out = Vec::with_capacity(DESIGN_LEVELS * DESIGN_PHASES * DESIGN_PHASES);
        for l in 0..DESIGN_LEVELS {
            let eta = ((l as f64 + 0.5) / DESIGN_LEVELS as f64).sqrt().asin();
            let (s, c) = eta.sin_cos();
            // stagger the phases between levels
            let shift = 0.5 * (l % 2) as f64;
            for a in 0..DESIGN_PHASES {
                let x1 = TAU * (a as f64 + shift) / DESIGN_PHASES as f64;
                for b in 0..DESIGN_PHASES {
                    let x2 = TAU * (b as f64 + 0.5 * shift) / DESIGN_PHASES as f64;
                    out.push([c * x1.cos(), c * x1.sin(), s * x2.cos(), s * x2.sin()]);
                }
            }
        }
        out
    })
}

fn clearance(pole: &Vec4, a: &[Vec4], b: &[Vec4]) -> f64 {
    a.iter()
        .chain(b)
        .map(|x| chord_angle(pole, x))
        .fold(f64::INFINITY, f64::min)
}

/// The design point farthest from both curves.
fn best_pole(a: &[Vec4], b: &[Vec4]) -> (Vec4, f64) {
    pole_design()
        .par_iter()
        .map(|p| (*p, clearance(p, a, b)))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(([0.0; 4], f64::NEG_INFINITY), |acc, x| {
            if x.1 > acc.1 {
                x
            } else {
                acc
            }
        })
}

fn gauss_integral(pair: &CurvePair, projection: &Stereographic) -> f64 {
    let image = |c: &dyn ClosedCurve, m: usize| -> Vec<([f64; 3], [f64; 3])> {
        (0..m)
            .map(|k| {
                let u = TAU * k as f64 / m as f64;
                let x = c.point(u);
                (
                    projection.project_raw(&x),
                    projection.push_forward(&x, &c.tangent(u)),
                )
            })
            .collect()
    };
    let ga = image(pair.a.as_ref(), pair.m_a);
    let gb = image(pair.b.as_ref(), pair.m_b);
    let rows: Vec<f64> = ga
        .par_iter()
        .map(|(x, dx)| {
            gb.iter()
                .map(|(y, dy)| {
                    let r = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
                    let c = [
                        dx[1] * dy[2] - dx[2] * dy[1],
                        dx[2] * dy[0] - dx[0] * dy[2],
                        dx[0] * dy[1] - dx[1] * dy[0],
                    ];
                    let n2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
                    (r[0] * c[0] + r[1] * c[1] + r[2] * c[2]) / (n2 * n2.sqrt())
                })
                .sum()
        })
        .collect();
    let h = TAU * TAU / (pair.m_a * pair.m_b) as f64;
    rows.iter().sum::<f64>() * h / (4.0 * PI)
}

/// Linking number through projection from `pole`.
pub fn linking_number_from(pair: &CurvePair, pole: &SpherePoint) -> Result<LinkingReport> {
    let (a, b) = pair.samples();
    let clear = clearance(pole.coords(), &a, &b);
    if !(clear > MIN_POLE_CLEARANCE) {
        return Err(Error::NoAdmissiblePole { clearance: clear });
    }
    let raw = gauss_integral(pair, &Stereographic::new(*pole));
    let number = raw.round();
    if !((raw - number).abs() <= INTEGER_TOL) {
        return Err(Error::NonIntegerLinking { raw });
    }
    Ok(LinkingReport {
        number: number as i64,
        raw,
        pole: *pole.coords(),
        clearance: clear,
    })
}

/// Linking number of the pair, projecting from the design point with the
/// largest clearance.
pub fn linking_number(pair: &CurvePair) -> Result<LinkingReport> {
    let (a, b) = pair.samples();
    let (pole, clear) = best_pole(&a, &b);
    if !(clear > MIN_POLE_CLEARANCE) {
        return Err(Error::NoAdmissiblePole { clearance: clear });
    }
    linking_number_from(pair, &SpherePoint::new(pole)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec4;

    #[test]
    fn design_is_unit_and_spread() {
        let d = pole_design();
        assert_eq!(d.len(), 600);
        assert!(d.iter().all(|p| (vec4::norm(p) - 1.0).abs() < 1e-14));
        // every point of S³ is within 0.6 of the design
        let probe = [0.5, -0.5, 0.5, 0.5];
        assert!(
            d.iter()
                .map(|p| chord_angle(p, &probe))
                .fold(f64::INFINITY, f64::min)
                < 0.6
        );
    }
}
