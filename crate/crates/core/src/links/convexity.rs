use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sphere::{chord_angle, unit_log};
use crate::vec4::{self, Vec4};

/// Points checked along each minimizing geodesic, endpoints included.
pub const GEODESIC_POINTS: usize = 64;
pub const MEMBERSHIP_SLACK: f64 = 1e-6;
/// Draws after which an empty sample declares the complement empty.
pub const MAX_DRAWS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub radius: f64,
    pub pairs_requested: usize,
    pub pairs_tested: usize,
    pub violations: usize,
    /// No point of the complement was found in [`MAX_DRAWS`] draws.
    pub empty: bool,
    pub draws: usize,
    /// Smallest `d(x, A) − r` over all probed geodesic points.
    pub min_margin: f64,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// `true` if `x` is at distance at least `r − slack` from every point of `a`.
fn outside(x: &Vec4, a: &[Vec4], r: f64, slack: f64) -> bool {
    a.iter().all(|p| chord_angle(x, p) >= r - slack)
}

fn distance_to(x: &Vec4, a: &[Vec4]) -> f64 {
    a.iter()
        .map(|p| chord_angle(x, p))
        .fold(f64::INFINITY, f64::min)
}

/// Uniform point on S³ by rejection from the unit ball.
fn uniform_point(rng: &mut impl Rng) -> Vec4 {
    loop {
        let x: Vec4 = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = vec4::norm(&x);
        if n <= 1.0 && n > 1e-3 {
            return vec4::scale(&x, 1.0 / n);
        }
    }
}

/// Probes convexity of `N = S³ ∖ B(A, r)` for `r > π/2`: draws `n_pairs`
/// pairs of points of `N` and checks that the minimizing geodesic between
/// each pair stays in `N`.
pub fn complement_convexity_check(
    a: &[Vec4],
    r: f64,
    n_pairs: usize,
    seed: u64,
) -> Result<ConvexityReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(r > FRAC_PI_2 + 1e-6 && r <= PI) {
        return Err(Error::OutOfRange {
            name: "complement radius",
            value: r,
            range: "(π/2, π]",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = 0;
    let member = |rng: &mut ChaCha8Rng, draws: &mut usize| -> Option<Vec4> {
        while *draws < MAX_DRAWS {
            *draws += 1;
            let x = uniform_point(rng);
            if outside(&x, a, r, 0.0) {
                return Some(x);
            }
        }
        None
    };
    let mut report = ConvexityReport {
        radius: r,
        pairs_requested: n_pairs,
        pairs_tested: 0,
        violations: 0,
        empty: false,
        draws: 0,
        min_margin: f64::INFINITY,
    };
    while report.pairs_tested < n_pairs {
        let Some(p) = member(&mut rng, &mut draws) else {
            break;
        };
        let Some(q) = member(&mut rng, &mut draws) else {
            break;
        };
        let theta = chord_angle(&p, &q);
        let Some(w) = unit_log(&p, &q) else { continue };
        if theta > PI - 1e-6 {
            continue;
        }
        let mut bad = false;
        for k in 0..GEODESIC_POINTS {
            let t = theta * k as f64 / (GEODESIC_POINTS - 1) as f64;
            let (s, c) = t.sin_cos();
            let x = vec4::lincomb(c, &p, s, &w);
            let margin = distance_to(&x, a) - r;
            report.min_margin = report.min_margin.min(margin);
            bad |= margin < -MEMBERSHIP_SLACK;
        }
        report.violations += bad as usize;
        report.pairs_tested += 1;
    }
    report.draws = draws;
    report.empty = report.pairs_tested == 0 && draws >= MAX_DRAWS;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_must_exceed_a_quarter_turn() {
        let a = [[1.0, 0.0, 0.0, 0.0]];
        assert!(complement_convexity_check(&a, FRAC_PI_2, 10, 0).is_err());
    }

    #[test]
    fn complement_of_a_point_ball() {
        let a = [[1.0, 0.0, 0.0, 0.0]];
        let rep = complement_convexity_check(&a, 0.6 * PI, 200, 3).unwrap();
        assert!(rep.passed() && !rep.empty && rep.pairs_tested == 200);
        assert!(rep.min_margin >= -MEMBERSHIP_SLACK);
    }
}
