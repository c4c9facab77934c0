use std::f64::consts::TAU;
use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::distance::pair_distance;
use super::linking::linking_number;
use crate::error::{Error, Result};
use crate::immersions::{CurvePair, FourierLoop};
use crate::sphere::unit_log;
use crate::vec4::{self, Vec4};

/// Two Fourier loops of a common order `K`, as one search state.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierLoopFamily {
    pub a: FourierLoop,
    pub b: FourierLoop,
    pub seed: u64,
}

fn pad(lp: &FourierLoop, order: usize) -> Result<FourierLoop> {
    let (c, s) = lp.coefficients();
    let mut cos = c.to_vec();
    let mut sin = s.to_vec();
    cos.resize(order + 1, [0.0; 4]);
    sin.resize(order + 1, [0.0; 4]);
    FourierLoop::new(cos, sin)
}

fn circle_coefficients(order: usize, e1: Vec4, e2: Vec4) -> (Vec<Vec4>, Vec<Vec4>) {
    let mut cos = vec![[0.0; 4]; order + 1];
    let mut sin = vec![[0.0; 4]; order + 1];
    cos[1] = e1;
    sin[1] = e2;
    (cos, sin)
}

fn perturb(coeffs: &mut [Vec4], amplitude: f64, rng: &mut impl Rng) {
    for c in coeffs {
        for x in c.iter_mut() {
            *x += amplitude * rng.gen_range(-1.0..=1.0);
        }
    }
}

const E: [Vec4; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

impl FourierLoopFamily {
    /// Pads both loops to the larger order.
    pub fn new(a: FourierLoop, b: FourierLoop, seed: u64) -> Result<Self> {
        let order = a.order().max(b.order()).max(1);
        Ok(Self {
            a: pad(&a, order)?,
            b: pad(&b, order)?,
            seed,
        })
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }

    /// The Hopf pair with every coefficient of both loops shifted by an
    /// independent uniform draw from `[−amplitude, amplitude]`.
    pub fn perturbed_hopf(order: usize, amplitude: f64, seed: u64) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidParameter(
                "Fourier order must be at least 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&amplitude) {
            return Err(Error::OutOfRange {
                name: "perturbation amplitude",
                value: amplitude,
                range: "[0, 1)",
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut make = |e1: Vec4, e2: Vec4| {
            let (mut cos, mut sin) = circle_coefficients(order, e1, e2);
            perturb(&mut cos, amplitude, &mut rng);
            perturb(&mut sin[1..], amplitude, &mut rng);
            FourierLoop::new(cos, sin)
        };
        let a = make(E[0], E[1])?;
        let b = make(E[2], E[3])?;
        Ok(Self { a, b, seed })
    }

    /// The `(p, q)` torus knot at `cos a` against the circle `{z₁ = 0}`.
    pub fn knot_and_axis(p: usize, q: usize, a: f64) -> Result<Self> {
        let order = p.max(q).max(1);
        let (ca, sa) = (a.cos(), a.sin());
        let mut cos = vec![[0.0; 4]; order + 1];
        let mut sin = vec![[0.0; 4]; order + 1];
        cos[p][0] += ca;
        sin[p][1] += ca;
        cos[q][2] += sa;
        sin[q][3] += sa;
        let knot = FourierLoop::new(cos, sin)?;
        let (cos, sin) = circle_coefficients(order, E[2], E[3]);
        Self::new(knot, FourierLoop::new(cos, sin)?, 0)
    }

    pub fn params(&self) -> Vec<f64> {
        let mut x = self.a.params();
        x.extend(self.b.params());
        x
    }

    pub fn from_params(order: usize, x: &[f64], seed: u64) -> Result<Self> {
        let n = FourierLoop::param_count(order);
        if x.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: x.len(),
            });
        }
        Ok(Self {
            a: FourierLoop::from_params(order, &x[..n])?,
            b: FourierLoop::from_params(order, &x[n..])?,
            seed,
        })
    }

    /// The loops as a validated pair sampled `m` times each.
    pub fn pair(&self, m: usize) -> Result<CurvePair> {
        CurvePair::with_resolution(Arc::new(self.a.clone()), Arc::new(self.b.clone()), m, m)
    }
}

/// Settings for [`extremal_search`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchConfig {
    /// Inverse temperatures of the softmin, one stage each.
    pub betas: Vec<f64>,
    /// Samples per loop in the surrogate.
    pub surrogate_samples: usize,
    /// Samples per loop for distances and linking numbers.
    pub eval_samples: usize,
    pub max_iters_per_stage: usize,
    pub initial_step: f64,
    /// A stage ends once an accepted step gains less than this.
    pub gain_tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            betas: vec![20.0, 50.0, 100.0, 200.0, 500.0],
            surrogate_samples: 64,
            eval_samples: 128,
            max_iters_per_stage: 150,
            initial_step: 0.05,
            gain_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub iteration: usize,
    pub beta: f64,
    pub surrogate: f64,
    pub distance: f64,
    pub linking: i64,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_distance: f64,
    pub best: FourierLoopFamily,
    pub linking: i64,
    pub trajectory: Vec<TrajectoryRow>,
}

/// Radial projections of a loop at `m` nodes: points and ambient norms.
fn loop_samples(lp: &FourierLoop, m: usize) -> (Vec<Vec4>, Vec<f64>) {
    (0..m)
        .map(|k| {
            let u = TAU * k as f64 / m as f64;
            let (c, s) = lp.coefficients();
            let mut y = c[0];
            for j in 1..c.len() {
                let (sj, cj) = (j as f64 * u).sin_cos();
                y = vec4::lincomb(1.0, &y, cj, &c[j]);
                y = vec4::axpy(sj, &s[j], &y);
            }
            let n = vec4::norm(&y);
            (vec4::scale(&y, 1.0 / n), n)
        })
        .unzip()
}

/// `d − (1/β) log mean exp(−β (d_ij − d))` with `d = min d_ij`, and its
/// gradient in the flat parameters of both loops.
fn softmin(family: &FourierLoopFamily, m: usize, beta: f64) -> (f64, Vec<f64>) {
    let order = family.order();
    let (pa, na) = loop_samples(&family.a, m);
    let (pb, nb) = loop_samples(&family.b, m);
    let d: Vec<f64> = pa
        .iter()
        .flat_map(|p| pb.iter().map(|q| crate::sphere::chord_angle(p, q)))
        .collect();
    let dmin = d.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = d.iter().map(|x| (-beta * (x - dmin)).exp()).collect();
    let total: f64 = w.iter().sum();
    let value = dmin - (total / d.len() as f64).ln() / beta;

    let mut ga = vec![[0.0; 4]; m];
    let mut gb = vec![[0.0; 4]; m];
    for i in 0..m {
        for j in 0..m {
            let wij = w[i * m + j] / total;
            if wij < 1e-300 {
                continue;
            }
            if let (Some(ta), Some(tb)) = (unit_log(&pa[i], &pb[j]), unit_log(&pb[j], &pa[i])) {
                ga[i] = vec4::axpy(-wij / na[i], &ta, &ga[i]);
                gb[j] = vec4::axpy(-wij / nb[j], &tb, &gb[j]);
            }
        }
    }
    let project = |g: &[Vec4]| -> Vec<f64> {
        let mut out = vec![0.0; FourierLoop::param_count(order)];
        for (k, gk) in g.iter().enumerate() {
            let u = TAU * k as f64 / m as f64;
            for c in 0..4 {
                out[c] += gk[c];
            }
            for j in 1..=order {
                let (s, co) = (j as f64 * u).sin_cos();
                for c in 0..4 {
                    out[4 * (2 * j - 1) + c] += gk[c] * co;
                    out[4 * (2 * j) + c] += gk[c] * s;
                }
            }
        }
        out
    };
    let mut grad = project(&ga);
    grad.extend(project(&gb));
    (value, grad)
}

struct Evaluated {
    family: FourierLoopFamily,
    distance: f64,
    linking: i64,
}

fn evaluate(family: FourierLoopFamily, m: usize) -> Result<Evaluated> {
    let pair = family.pair(m)?;
    let distance = pair_distance(&pair, true)?.distance;
    let linking = linking_number(&pair)?.number;
    Ok(Evaluated {
        family,
        distance,
        linking,
    })
}

/// Ascends the softmin of pairwise distances over the loop coefficients,
/// annealing `β` over stages. A step is accepted only if it raises the
/// surrogate, keeps the linking number and does not lower the true distance.
pub fn extremal_search(start: &FourierLoopFamily, config: &SearchConfig) -> Result<SearchResult> {
    if config.betas.is_empty() || config.surrogate_samples < 8 || config.eval_samples < 8 {
        return Err(Error::InvalidParameter(
            "search needs at least one stage and 8 samples per loop".into(),
        ));
    }
    let order = start.order();
    let seed = start.seed;
    let mut state = evaluate(start.clone(), config.eval_samples)?;
    if state.linking == 0 {
        return Err(Error::Unlinked);
    }
    let target = state.linking;
    let mut trajectory = Vec::new();
    let mut iteration = 0;
    for &beta in &config.betas {
        let (mut value, mut grad) = softmin(&state.family, config.surrogate_samples, beta);
        trajectory.push(TrajectoryRow {
            iteration,
            beta,
            surrogate: value,
            distance: state.distance,
            linking: state.linking,
        });
        let mut step = config.initial_step;
        for _ in 0..config.max_iters_per_stage {
            let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if !(gn > 1e-14) {
                break;
            }
            let x = state.family.params();
            let mut accepted = None;
            while step >= 1e-9 {
                let trial: Vec<f64> = x
                    .iter()
                    .zip(&grad)
                    .map(|(x, g)| x + step * g / gn)
                    .collect();
                let next = FourierLoopFamily::from_params(order, &trial, seed)
                    .ok()
                    .map(|f| (softmin(&f, config.surrogate_samples, beta), f))
                    .filter(|((v, _), _)| *v > value)
                    .and_then(|(s, f)| evaluate(f, config.eval_samples).ok().map(|e| (s, e)))
                    .filter(|(_, e)| e.linking == target && e.distance >= state.distance);
                if let Some(n) = next {
                    accepted = Some(n);
                    break;
                }
                step *= 0.5;
            }
            let Some(((next_value, next_grad), next)) = accepted else {
                break;
            };
            iteration += 1;
            let gain = next_value - value;
            (value, grad, state) = (next_value, next_grad, next);
            trajectory.push(TrajectoryRow {
                iteration,
                beta,
                surrogate: value,
                distance: state.distance,
                linking: state.linking,
            });
            log::debug!(
                "search β = {beta}: iteration {iteration}, surrogate {value:.9}, distance {:.9}",
                state.distance
            );
            step = (2.0 * step).min(config.initial_step);
            if gain < config.gain_tol {
                break;
            }
        }
    }
    Ok(SearchResult {
        best_distance: state.distance,
        best: state.family,
        linking: state.linking,
        trajectory,
    })
}

/// Writes the trajectory as CSV with a header row.
pub fn write_trajectory_csv(rows: &[TrajectoryRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "iteration,beta,surrogate,distance,linking")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.17e},{:.17e},{}",
            r.iteration, r.beta, r.surrogate, r.distance, r.linking
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersions::ClosedCurve;

    #[test]
    fn softmin_gradient_matches_difference_quotient() {
        let f = FourierLoopFamily::perturbed_hopf(2, 0.1, 7).unwrap();
        let (v, g) = softmin(&f, 32, 20.0);
        let x = f.params();
        let h = 1e-6;
        for k in [0, 5, 13, 27, 33] {
            let mut y = x.clone();
            y[k] += h;
            let (vp, _) = softmin(&FourierLoopFamily::from_params(2, &y, 0).unwrap(), 32, 20.0);
            y[k] -= 2.0 * h;
            let (vm, _) = softmin(&FourierLoopFamily::from_params(2, &y, 0).unwrap(), 32, 20.0);
            let fd = (vp - vm) / (2.0 * h);
            assert!(
                (fd - g[k]).abs() < 1e-6 * (1.0 + fd.abs()),
                "param {k}: {fd} vs {}",
                g[k]
            );
        }
        assert!(v.is_finite());
    }

    #[test]
    fn knot_family_is_the_torus_knot() {
        let f = FourierLoopFamily::knot_and_axis(2, 3, 0.7).unwrap();
        let u = 0.37f64;
        let p = f.a.point(u);
        let expect = [
            0.7f64.cos() * (2.0 * u).cos(),
            0.7f64.cos() * (2.0 * u).sin(),
            0.7f64.sin() * (3.0 * u).cos(),
            0.7f64.sin() * (3.0 * u).sin(),
        ];
        assert!(vec4::norm(&vec4::sub(&p, &expect)) < 1e-14);
    }
}
