use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::io::Cursor;

use spherelab::immersions::{
    clifford_torus, fourier_torus, geodesic_sphere, make_builtin, read_grid_surface,
    rotation_torus, write_grid_samples, Builtin, SurfaceImmersion,
};
use spherelab::vec4;
use spherelab::QuadratureGrid;

const TWO_PI2: f64 = 2.0 * PI * PI;

fn grid(n: usize) -> QuadratureGrid {
    QuadratureGrid::square(n).unwrap()
}

fn reload(surface: &SurfaceImmersion, n: usize) -> SurfaceImmersion {
    let mut buf = Vec::new();
    write_grid_samples(surface, &grid(n), &mut buf).unwrap();
    SurfaceImmersion::torus("reloaded", read_grid_surface(Cursor::new(buf)).unwrap())
}

#[test]
fn areas_of_closed_form_families() {
    let g = QuadratureGrid::report();
    assert!((clifford_torus().area(&g).unwrap() - TWO_PI2).abs() < 1e-8);
    let t = rotation_torus(FRAC_PI_6).unwrap().area(&g).unwrap();
    assert!((t - PI * PI * 3f64.sqrt()).abs() < 1e-8, "{t}");
    let s = geodesic_sphere(FRAC_PI_3, None).unwrap().area(&g).unwrap();
    assert!((s - 3.0 * PI).abs() < 1e-8, "{s}");
}

#[test]
fn willmore_energies() {
    let g = QuadratureGrid::report();
    assert!((clifford_torus().willmore_energy(&g).unwrap() - TWO_PI2).abs() < 1e-8);
    let w = rotation_torus(FRAC_PI_6)
        .unwrap()
        .willmore_energy(&g)
        .unwrap();
    assert!((w - 4.0 * 3f64.sqrt() * PI * PI / 3.0).abs() < 1e-8, "{w}");
    for rho in [0.3, FRAC_PI_3, FRAC_PI_2, 2.5] {
        let w = geodesic_sphere(rho, None)
            .unwrap()
            .willmore_energy(&g)
            .unwrap();
        assert!((w - 4.0 * PI).abs() < 1e-8, "rho = {rho}: {w}");
    }
}

#[test]
fn willmore_bound_on_tori() {
    let g = QuadratureGrid::fast();
    let mut tori: Vec<SurfaceImmersion> = (3..=12)
        .map(|k| rotation_torus(0.1 * k as f64).unwrap())
        .collect();
    tori.extend((0..5).map(|seed| fourier_torus(seed, 0.08).unwrap()));
    for t in &tori {
        let s = t.sample(&g).unwrap();
        let (w, a) = (s.willmore_energy(), s.area());
        assert!(w - a >= -1e-10);
        assert!(w >= TWO_PI2 - 1e-6, "{}: {w}", t.name());
    }
}

#[test]
fn gauss_bonnet() {
    let g = QuadratureGrid::report();
    for a in [0.3, 0.9, 1.4] {
        assert!(
            rotation_torus(a)
                .unwrap()
                .gauss_bonnet_characteristic(&g)
                .unwrap()
                .abs()
                < 1e-8
        );
    }
    for rho in [0.5, 2.0] {
        let chi = geodesic_sphere(rho, None)
            .unwrap()
            .gauss_bonnet_characteristic(&g)
            .unwrap();
        assert!((chi - 2.0).abs() < 1e-8, "{chi}");
    }
    let chi = fourier_torus(1, 0.05)
        .unwrap()
        .gauss_bonnet_characteristic(&g)
        .unwrap();
    assert!(chi.abs() < 1e-6, "{chi}");
}

#[test]
fn off_center_sphere() {
    let c = spherelab::SpherePoint::project([0.3, -0.2, 0.8, 0.1]).unwrap();
    let s = geodesic_sphere(1.1, Some(c))
        .unwrap()
        .sample(&QuadratureGrid::report())
        .unwrap();
    assert!((s.area() - 4.0 * PI * 1.1f64.sin().powi(2)).abs() < 1e-8);
    for sample in &s.samples {
        let d = spherelab::sphere::geodesic_distance(&sample.frame.point, &c);
        assert!((d - 1.1).abs() < 1e-12);
    }
}

#[test]
fn reloaded_clifford_torus() {
    let fine = reload(&clifford_torus(), 128);
    let a = fine.area(&grid(128)).unwrap();
    assert!((a - TWO_PI2).abs() < 1e-6, "128²: {:e}", a - TWO_PI2);
    let coarse = reload(&clifford_torus(), 8);
    let a = coarse.area(&grid(8)).unwrap();
    assert!((a - TWO_PI2).abs() < 0.05 * TWO_PI2, "8²: {a}");
}

#[test]
fn finite_difference_curvatures_match_analytic() {
    let s = fourier_torus(4, 0.06).unwrap();
    let g = grid(128);
    let exact = s.sample(&g).unwrap();
    let fd = reload(&s, 128).sample(&g).unwrap();
    for (a, b) in exact.samples.iter().zip(&fd.samples) {
        for (x, y) in [(a.jet.du, b.jet.du), (a.jet.dv, b.jet.dv)] {
            assert!(vec4::norm(&vec4::sub(&x, &y)) < 1e-6);
        }
    }
    assert!((exact.willmore_energy() - fd.willmore_energy()).abs() < 1e-6);
}

#[test]
fn builtin_dispatch() {
    match make_builtin("rotation_torus", &[FRAC_PI_4]).unwrap() {
        Builtin::Surface(s) => {
            let a = s.area(&QuadratureGrid::fast()).unwrap();
            assert!((a - TWO_PI2).abs() < 1e-10);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(make_builtin("geodesic_sphere", &[1.0, 0.0, 2.0, 0.0, 0.0]).is_err());
    assert!(make_builtin("fourier_torus", &[1.5, 0.05]).is_err());
}
