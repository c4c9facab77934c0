use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::immersions::{sample_curve, ClosedCurve, CurvePair};
use crate::sphere::{chord_angle, unit_log};
use crate::vec4::{self, Vec4};

/// Smallest step, in parameter space, at which refinement stops.
pub const REFINE_STEP: f64 = 1e-10;
const REFINE_STARTS: usize = 8;
const REFINE_MAX_ITERS: usize = 10_000;

/// Closest pair found between two sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Closest {
    pub distance: f64,
    /// Minimum over the sample pairs alone.
    pub coarse: f64,
    /// Parameters (curves) or sample indices (point sets) of the minimizer.
    pub u_a: f64,
    pub u_b: f64,
}

fn closest_to(p: &Vec4, b: &[Vec4]) -> (f64, usize) {
    b.iter()
        .enumerate()
        .map(|(j, q)| (chord_angle(p, q), j))
        .fold(
            (f64::INFINITY, 0),
            |acc, x| if x.0 < acc.0 { x } else { acc },
        )
}

/// For each sample of `a`, its nearest sample of `b`.
fn nearest_rows(a: &[Vec4], b: &[Vec4]) -> Vec<(f64, usize)> {
    a.par_iter().map(|p| closest_to(p, b)).collect()
}

/// Minimum distance over all sample pairs.
pub fn sample_distance(a: &[Vec4], b: &[Vec4]) -> Result<Closest> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let rows = nearest_rows(a, b);
    let (i, &(d, j)) = rows
        .iter()
        .enumerate()
        .min_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
        .expect("nonempty");
    Ok(Closest {
        distance: d,
        coarse: d,
        u_a: i as f64,
        u_b: j as f64,
    })
}

/// `d(A(u), B(v))` and its gradient in `(u, v)`.
fn objective(a: &dyn ClosedCurve, b: &dyn ClosedCurve, u: f64, v: f64) -> (f64, [f64; 2]) {
    let (p, q) = (a.point(u), b.point(v));
    let d = chord_angle(&p, &q);
    match (unit_log(&p, &q), unit_log(&q, &p)) {
        (Some(wp), Some(wq)) => (
            d,
            [
                -vec4::dot(&wp, &a.tangent(u)),
                -vec4::dot(&wq, &b.tangent(v)),
            ],
        ),
        _ => (d, [0.0; 2]),
    }
}

/// Gradient descent with backtracking halving from `(u, v)`.
fn descend(
    a: &dyn ClosedCurve,
    b: &dyn ClosedCurve,
    mut u: f64,
    mut v: f64,
    h: f64,
) -> (f64, f64, f64) {
    let (mut d, mut g) = objective(a, b, u, v);
    let mut step = h;
    for _ in 0..REFINE_MAX_ITERS {
        let gn = g[0].hypot(g[1]);
        if gn == 0.0 {
            break;
        }
        loop {
            let (nu, nv) = (u - step * g[0] / gn, v - step * g[1] / gn);
            let (nd, ng) = objective(a, b, nu, nv);
            if nd < d {
                (u, v, d, g) = (nu.rem_euclid(TAU), nv.rem_euclid(TAU), nd, ng);
                step = (2.0 * step).min(1.0);
                break;
            }
            step *= 0.5;
            if step < REFINE_STEP {
                return (d, u, v);
            }
        }
    }
    (d, u, v)
}

/// Distance between two closed curves from `m_a × m_b` samples, optionally
/// refined by descent on the curve parameters from the best coarse pairs.
pub fn curve_distance(
    a: &dyn ClosedCurve,
    m_a: usize,
    b: &dyn ClosedCurve,
    m_b: usize,
    refine: bool,
) -> Result<Closest> {
    let (sa, sb) = (sample_curve(a, m_a), sample_curve(b, m_b));
    if sa.is_empty() || sb.is_empty() {
        return Err(Error::EmptySet);
    }
    let rows = nearest_rows(&sa, &sb);
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&i, &j| rows[i].0.total_cmp(&rows[j].0).then(i.cmp(&j)));
    let coarse = rows[order[0]].0;
    let (ha, hb) = (TAU / m_a as f64, TAU / m_b as f64);
    let param = |i: usize| (ha * i as f64, hb * rows[i].1 as f64);
    let (u0, v0) = param(order[0]);
    let mut best = Closest {
        distance: coarse,
        coarse,
        u_a: u0,
        u_b: v0,
    };
    if !refine {
        return Ok(best);
    }
    // starts at rows that are local minima along A, best first
    let starts: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| {
            let m = rows.len();
            rows[i].0 <= rows[(i + 1) % m].0 && rows[i].0 <= rows[(i + m - 1) % m].0
        })
        .take(REFINE_STARTS)
        .collect();
    for i in starts {
        let (u, v) = param(i);
        let (d, u, v) = descend(a, b, u, v, ha.min(hb));
        if d < best.distance {
            best = Closest {
                distance: d,
                coarse,
                u_a: u,
                u_b: v,
            };
        }
    }
    Ok(best)
}

/// Distance between the curves of `pair` at its sample resolutions.
pub fn pair_distance(pair: &CurvePair, refine: bool) -> Result<Closest> {
    curve_distance(pair.a.as_ref(), pair.m_a, pair.b.as_ref(), pair.m_b, refine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersions::hopf_pair;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn hopf_distance_is_a_quarter_turn() {
        let c = pair_distance(&hopf_pair(), true).unwrap();
        assert!((c.distance - FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn points_and_empty_sets() {
        let p = [1.0, 0.0, 0.0, 0.0];
        let q = [0.0, 0.6, 0.8, 0.0];
        assert!((sample_distance(&[p], &[q]).unwrap().distance - FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(sample_distance(&[], &[q]), Err(Error::EmptySet)));
    }
}
