//! Small fixed-size vector helpers for ambient 4-space.

pub type Vec4 = [f64; 4];

#[inline]
pub fn dot<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm<const D: usize>(a: &[f64; D]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn add<const D: usize>(a: &[f64; D], b: &[f64; D]) -> [f64; D] {
    std::array::from_fn(|i| a[i] + b[i])
}

#[inline]
pub fn sub<const D: usize>(a: &[f64; D], b: &[f64; D]) -> [f64; D] {
    std::array::from_fn(|i| a[i] - b[i])
}

#[inline]
pub fn scale<const D: usize>(a: &[f64; D], s: f64) -> [f64; D] {
    std::array::from_fn(|i| a[i] * s)
}

/// `a * x + y`
#[inline]
pub fn axpy<const D: usize>(a: f64, x: &[f64; D], y: &[f64; D]) -> [f64; D] {
    std::array::from_fn(|i| a * x[i] + y[i])
}

#[inline]
pub fn lincomb<const D: usize>(a: f64, x: &[f64; D], b: f64, y: &[f64; D]) -> [f64; D] {
    std::array::from_fn(|i| a * x[i] + b * y[i])
}

#[inline]
pub fn normalized<const D: usize>(a: &[f64; D]) -> [f64; D] {
    scale(a, 1.0 / norm(a))
}

/// Generalized cross product in 4-space: the vector `n` with
/// `n · e = det[a, b, c, e]` for every `e`.
pub fn cross4(a: &Vec4, b: &Vec4, c: &Vec4) -> Vec4 {
    let m = |i: usize, j: usize, k: usize| {
        a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i])
            + a[k] * (b[i] * c[j] - b[j] * c[i])
    };
    [-m(1, 2, 3), m(0, 2, 3), -m(0, 1, 3), m(0, 1, 2)]
}

/// Orthonormal vectors completing `unit` to a basis, in a fixed order.
pub fn orthonormal_complement<const D: usize>(unit: &[f64; D]) -> Vec<[f64; D]> {
    let mut axes: Vec<usize> = (0..D).collect();
    // Start from the standard axes least aligned with `unit`.
    axes.sort_by(|&i, &j| unit[i].abs().total_cmp(&unit[j].abs()).then(i.cmp(&j)));
    let mut basis: Vec<[f64; D]> = Vec::with_capacity(D - 1);
    for &axis in axes.iter().take(D - 1) {
        let mut e = [0.0; D];
        e[axis] = 1.0;
        e = axpy(-dot(&e, unit), unit, &e);
        for b in &basis {
            e = axpy(-dot(&e, b), b, &e);
        }
        basis.push(normalized(&e));
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross4_is_orthogonal_and_oriented() {
        let a = [0.3, -0.2, 0.9, 0.1];
        let b = [0.5, 0.7, -0.1, 0.2];
        let c = [-0.4, 0.1, 0.3, 0.8];
        let n = cross4(&a, &b, &c);
        for v in [&a, &b, &c] {
            assert!(dot(&n, v).abs() < 1e-14);
        }
        // det[a, b, c, n] = |n|^2 > 0
        assert!(dot(&n, &n) > 0.0);
        let e0 = [1.0, 0.0, 0.0, 0.0];
        let e1 = [0.0, 1.0, 0.0, 0.0];
        let e2 = [0.0, 0.0, 1.0, 0.0];
        assert_eq!(cross4(&e0, &e1, &e2), [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn complement_is_orthonormal() {
        let u = normalized(&[0.1, 0.7, -0.7, 0.2]);
        let basis = orthonormal_complement(&u);
        assert_eq!(basis.len(), 3);
        for (i, b) in basis.iter().enumerate() {
            assert!(dot(b, &u).abs() < 1e-14);
            assert!((norm(b) - 1.0).abs() < 1e-14);
            for c in &basis[i + 1..] {
                assert!(dot(b, c).abs() < 1e-14);
            }
        }
    }
}
