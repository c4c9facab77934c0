use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

use spherelab::bands::*;
use spherelab::immersions::{clifford_torus, geodesic_sphere, rotation_torus};
use spherelab::QuadratureGrid;

fn clifford_band(r: f64) -> Band {
    build_tube_band_with(clifford_torus(), r, FRAC_PI_4).unwrap()
}

#[test]
fn radius_preconditions_use_the_focal_radius() {
    assert!(build_tube_band(clifford_torus(), 0.7).is_ok());
    assert!(build_tube_band(clifford_torus(), 0.8).is_err());
    let b = build_tube_band(rotation_torus(FRAC_PI_6).unwrap(), 0.5).unwrap();
    assert!((b.focal_radius() - FRAC_PI_6).abs() < 5e-3);
}

#[test]
fn clifford_band_widths() {
    let mut widest: f64 = 0.0;
    for r in [0.3, 0.5, 0.7, 0.98 * FRAC_PI_4] {
        let w = band_width(&clifford_band(r), 64).unwrap();
        assert!(
            (w.width - 2.0 * r).abs() <= 0.02 * 2.0 * r,
            "r = {r}: {w:?}"
        );
        assert!((w.error_bound - 0.08 * w.width).abs() < 1e-15);
        widest = widest.max(w.width);
    }
    assert!(widest <= FRAC_PI_2 * 1.02);
}

#[test]
fn widths_do_not_grow_under_refinement() {
    for r in [0.3, 0.7] {
        let band = clifford_band(r);
        let coarse = band_width(&band, 32).unwrap().width;
        let fine = band_width(&band, 64).unwrap().width;
        assert!(fine <= coarse + 1e-12, "r = {r}: {fine} > {coarse}");
    }
}

#[test]
fn thin_band_width() {
    let w = band_width(&clifford_band(0.01), 64).unwrap().width;
    assert!((w - 0.02).abs() < 0.05 * 0.02);
}

#[test]
fn rotation_torus_band_width() {
    let band = build_tube_band_with(rotation_torus(FRAC_PI_6).unwrap(), 0.5, FRAC_PI_6).unwrap();
    let w = band_width(&band, 64).unwrap().width;
    assert!((w - 1.0).abs() < 0.02, "{w}");
}

#[test]
fn level_set_probes() {
    let g = QuadratureGrid::fast();
    let band = clifford_band(0.7);
    let rep = levelset_convexity_probe(&band, 0.7, &g).unwrap();
    assert!((rep.max_curvature - 1.0).abs() < 1e-9 && (rep.min_curvature + 1.0).abs() < 1e-9);
    assert!(!rep.convex);
    assert!(levelset_convexity_probe(&band, 0.0, &g).is_err());
    assert!(levelset_convexity_probe(&band, 1.4, &g).is_err());

    // the normal of a geodesic sphere points at its centre, so the level set
    // at `c` is the sphere of radius ρ + r − c
    let sphere =
        build_tube_band_with(geodesic_sphere(FRAC_PI_3, None).unwrap(), 0.2, FRAC_PI_3).unwrap();
    let rep = levelset_convexity_probe(&sphere, 0.3, &g).unwrap();
    let k = 1.0 / (FRAC_PI_3 + 0.2 - 0.3).tan();
    assert!(
        (rep.min_curvature - k).abs() < 1e-9 && (rep.max_curvature - k).abs() < 1e-9,
        "{rep:?}"
    );
    assert!(rep.convex);
}
