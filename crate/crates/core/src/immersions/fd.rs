//! Sixth-order central differences on periodic lattices.

use crate::vec4::{self, Vec4};

const FIRST: [f64; 3] = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
const SECOND: [f64; 4] = [-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];

pub(crate) fn wrap(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

/// `f'(0)` from samples `at(k) = f(k h)`.
pub(crate) fn first(at: impl Fn(isize) -> Vec4, h: f64) -> Vec4 {
    let mut acc = [0.0; 4];
    for (k, c) in FIRST.iter().enumerate() {
        let k = k as isize + 1;
        acc = vec4::axpy(*c, &vec4::sub(&at(k), &at(-k)), &acc);
    }
    vec4::scale(&acc, 1.0 / h)
}

/// `f''(0)` from samples `at(k) = f(k h)`.
pub(crate) fn second(at: impl Fn(isize) -> Vec4, h: f64) -> Vec4 {
    let mut acc = vec4::scale(&at(0), SECOND[0]);
    for (k, c) in SECOND.iter().enumerate().skip(1) {
        let k = k as isize;
        acc = vec4::axpy(*c, &vec4::add(&at(k), &at(-k)), &acc);
    }
    vec4::scale(&acc, 1.0 / (h * h))
}
