//! Periodic trapezoidal quadrature on the parameter torus [0, 2π)², compensated
//! summation, and Gauss–Legendre rules for the normal direction of tubes.

use std::f64::consts::TAU;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform sampling of the doubly periodic parameter domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    pub n_u: usize,
    pub n_v: usize,
}

impl QuadratureGrid {
    pub const MIN: usize = 8;

    pub fn new(n_u: usize, n_v: usize) -> Result<Self> {
        if n_u < Self::MIN || n_v < Self::MIN {
            return Err(Error::TooCoarse(format!(
                "quadrature grid {n_u}x{n_v} is below the {min}x{min} minimum",
                min = Self::MIN
            )));
        }
        Ok(Self { n_u, n_v })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    /// 256×256, used for reports.
    pub fn report() -> Self {
        Self { n_u: 256, n_v: 256 }
    }

    /// 64×64, used for quick checks.
    pub fn fast() -> Self {
        Self { n_u: 64, n_v: 64 }
    }

    pub fn len(&self) -> usize {
        self.n_u * self.n_v
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn u(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n_u as f64
    }

    pub fn v(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_v as f64
    }

    pub fn cell_area(&self) -> f64 {
        (TAU / self.n_u as f64) * (TAU / self.n_v as f64)
    }

    /// Parameter pairs in row-major order (`u` outer, `v` inner).
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_u).flat_map(move |i| (0..self.n_v).map(move |j| (i, j)))
    }
}

/// Neumaier compensated accumulator. Summing the same sequence in the same
/// order always gives the same bits.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum in iteration order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// Trapezoidal rule on [0, 2π)² for row-major samples `values[i * n_v + j]`
/// taken at `(u_i, v_j)`.
pub fn integrate_periodic(values: &[f64], grid: &QuadratureGrid) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::GridShape {
            expected: grid.len(),
            found: values.len(),
        });
    }
    Ok(compensated_sum(values.iter().copied()) * grid.cell_area())
}

/// Samples `f` on the grid (in parallel) and integrates it.
pub fn integrate_fn<F>(f: F, grid: &QuadratureGrid) -> f64
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    use rayon::prelude::*;
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|k| f(grid.u(k / grid.n_v), grid.v(k % grid.n_v)))
        .collect();
    integrate_periodic(&values, grid).expect("sampled on the grid")
}

/// Gauss–Legendre nodes and weights mapped to `[a, b]`, nodes ascending.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
    let degree = NonZeroUsize::new(n).ok_or_else(|| {
        Error::InvalidParameter("Gauss–Legendre rule needs at least one node".into())
    })?;
    let rule = GaussLegendre::new(degree);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let mut pairs: Vec<(f64, f64)> = rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn minimum_grid() {
        assert!(QuadratureGrid::new(7, 8).is_err());
        assert!(QuadratureGrid::new(8, 8).is_ok());
    }

    #[test]
    fn constant_integrates_to_domain_area() {
        let g = QuadratureGrid::new(8, 12).unwrap();
        let v = vec![1.0; g.len()];
        assert!((integrate_periodic(&v, &g).unwrap() - 4.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn shape_mismatch() {
        let g = QuadratureGrid::fast();
        assert!(matches!(
            integrate_periodic(&[1.0; 10], &g),
            Err(Error::GridShape {
                expected: 4096,
                found: 10
            })
        ));
    }

    #[test]
    fn sin_squared() {
        let g = QuadratureGrid::fast();
        let got = integrate_fn(|u, _| u.sin().powi(2), &g);
        // ∫∫ sin²u du dv = π · 2π
        assert!((got - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn fourier_modes_below_nyquist_are_exact() {
        let g = QuadratureGrid::new(16, 24).unwrap();
        for k in 1..8 {
            for l in 0..8 {
                let got = integrate_fn(|u, v| (k as f64 * u).cos() * (l as f64 * v).cos(), &g);
                assert!(got.abs() < 1e-12, "mode ({k}, {l}) gave {got}");
            }
        }
        let got = integrate_fn(
            |u, v| (3.0 * u).cos() * (5.0 * v).cos(),
            &QuadratureGrid::fast(),
        );
        assert!(got.abs() < 1e-12);
    }

    #[test]
    fn spectral_convergence_on_analytic_integrand() {
        // ∫₀^{2π} du / (c − cos u) = 2π / √(c² − 1); times 2π for v.
        let c: f64 = 1.1;
        let exact = 4.0 * PI * PI / (c * c - 1.0).sqrt();
        let f = |u: f64, _v: f64| 1.0 / (c - u.cos());
        let e32 = (integrate_fn(f, &QuadratureGrid::square(32).unwrap()) - exact).abs();
        let e64 = (integrate_fn(f, &QuadratureGrid::square(64).unwrap()) - exact).abs();
        assert!(e32 / e64 >= 16.0, "e32 = {e32:e}, e64 = {e64:e}");
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut values = vec![1e16, 1.0, -1e16];
        values.extend(std::iter::repeat_n(1e-3, 1000));
        assert!((compensated_sum(values) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(4, -0.3, 0.7).unwrap();
        // degree 7 polynomial
        let f = |x: f64| x.powi(7) - 2.0 * x.powi(3) + x;
        let antideriv = |x: f64| x.powi(8) / 8.0 - x.powi(4) / 2.0 + x * x / 2.0;
        let got: f64 = rule.iter().map(|&(x, w)| w * f(x)).sum();
        assert!((got - (antideriv(0.7) - antideriv(-0.3))).abs() < 1e-15);
        assert!(gauss_legendre(0, 0.0, 1.0).is_err());
    }
}
