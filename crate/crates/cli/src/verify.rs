//! The acceptance suite behind `verify-all`.
//!
//! Criteria 1 to 10 run here. Determinism (criterion 11) compares two whole
//! runs and lives with the callers.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use log::info;
use spherelab::bands::{band_width, build_tube_band_with};
use spherelab::immersions::CurvePair;
use spherelab::immersions::{
    clifford_torus, fourier_torus, geodesic_sphere, make_builtin, rotation_torus, Builtin,
    CurvatureFrame, SurfaceImmersion,
};
use spherelab::links::{
    complement_convexity_check, extremal_search, gehring_check, linking_number,
    linking_number_from, make_pair, pole_design, FourierLoopFamily, SearchConfig, GEHRING_TOL,
};
use spherelab::quadrature::gauss_legendre;
use spherelab::sphere::ball_volume;
use spherelab::tubes::{
    focal_radius_with, tube_volume_numeric, verify_inequality_chain, verify_inequality_chain_with,
    FocalOptions, FocalReport, TubeSpec, SPHERE_VOLUME,
};
use spherelab::{Error, QuadratureGrid, SpherePoint};

use crate::commands::{chain_rows, load_set, load_surface, surface_grid};
use crate::config::RunConfig;
use crate::report::{ResultRow, Verdict};
use crate::Result;

pub const RANDOM_TORI: usize = 20;
pub const FOURIER_AMPLITUDE: f64 = 0.08;
pub const LINKED_PAIRS: usize = 50;
pub const SEARCH_BUDGET: Duration = Duration::from_secs(300);
const REPORT_GRID: usize = 256;
const POLE_CHOICES: usize = 20;

/// One acceptance criterion and its rows. Id 0 is the chain at the
/// configured surface and radius.
#[derive(Debug, Clone)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub rows: Vec<ResultRow>,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    /// Rows prefixed with the criterion, followed by its verdict.
    pub fn into_rows(self) -> Vec<ResultRow> {
        let ok = self.passed();
        let tag = self.tag();
        let mut rows: Vec<ResultRow> = self
            .rows
            .into_iter()
            .map(|r| ResultRow {
                name: format!("{tag}/{}", r.name),
                ..r
            })
            .collect();
        rows.push(ResultRow::check(
            format!("{tag}: {}", self.title),
            ok as u8 as f64,
            0.0,
            ok,
        ));
        rows
    }

    fn tag(&self) -> String {
        if self.id == 0 {
            "configured".into()
        } else {
            format!("criterion {}", self.id)
        }
    }
}

fn grid() -> QuadratureGrid {
    QuadratureGrid::square(REPORT_GRID).expect("valid grid")
}

fn focal_options() -> FocalOptions {
    FocalOptions {
        curvature_grid: grid(),
        ..FocalOptions::default()
    }
}

/// Computed once and shared between criteria.
struct Shared {
    clifford_focal: FocalReport,
    /// `(seed, torus, focal report)`.
    random_tori: Vec<(u64, SurfaceImmersion, FocalReport)>,
}

impl Shared {
    fn new(cfg: &RunConfig) -> Result<Self> {
        let clifford_focal = focal_radius_with(&clifford_torus(), &focal_options())?;
        let mut random_tori = Vec::with_capacity(RANDOM_TORI);
        for k in 0..RANDOM_TORI as u64 {
            let seed = cfg.seed.wrapping_add(k);
            let torus = fourier_torus(seed, FOURIER_AMPLITUDE)?;
            let focal = focal_radius_with(&torus, &focal_options())?;
            random_tori.push((seed, torus, focal));
        }
        Ok(Self {
            clifford_focal,
            random_tori,
        })
    }
}

fn volume_calibration() -> Result<Criterion> {
    let exact = ball_volume(PI)?;
    let numeric: f64 = gauss_legendre(32, 0.0, PI)?
        .iter()
        .map(|&(t, w)| w * 4.0 * PI * t.sin().powi(2))
        .sum();
    Ok(Criterion {
        id: 1,
        title: "volume calibration",
        rows: vec![
            ResultRow::check(
                "ball_volume(π) − 2π²",
                exact - SPHERE_VOLUME,
                0.0,
                exact == SPHERE_VOLUME,
            ),
            ResultRow::close("∫ 4π sin²t dt", numeric, SPHERE_VOLUME, 1e-9),
        ],
    })
}

/// Largest distance of the principal curvatures from `{1, −1}`.
fn clifford_curvature_deviation(frames: impl Iterator<Item = CurvatureFrame>) -> f64 {
    frames
        .map(|f| {
            let straight = (f.k1 - 1.0).abs().max((f.k2 + 1.0).abs());
            let swapped = (f.k1 + 1.0).abs().max((f.k2 - 1.0).abs());
            straight.min(swapped)
        })
        .fold(0.0, f64::max)
}

fn clifford_constants(shared: &Shared) -> Result<Criterion> {
    let s = clifford_torus().sample(&grid())?;
    let dev = clifford_curvature_deviation(s.samples.iter().map(|x| x.frame));
    let focal = &shared.clifford_focal;
    Ok(Criterion {
        id: 2,
        title: "Clifford torus constants",
        rows: vec![
            ResultRow::close("area", s.area(), SPHERE_VOLUME, 1e-8),
            ResultRow::close("willmore_energy", s.willmore_energy(), SPHERE_VOLUME, 1e-8),
            ResultRow::check("principal_curvature_deviation", dev, 1e-9, dev <= 1e-9),
            ResultRow::close("focal_radius", focal.focal_radius, FRAC_PI_4, 5e-3),
            ResultRow::close(
                "gauss_bonnet_characteristic",
                s.gauss_bonnet_characteristic(),
                0.0,
                1e-8,
            ),
        ],
    })
}

/// `(a, r)` with `r ≤ min(a, π/2 − a)`.
pub const ROTATION_TUBES: [(f64, f64); 10] = [
    (0.3, 0.1),
    (0.3, 0.3),
    (0.5, 0.25),
    (0.5, 0.5),
    (0.7, 0.4),
    (FRAC_PI_4, 0.5),
    (FRAC_PI_4, FRAC_PI_4),
    (1.0, 0.3),
    (1.0, FRAC_PI_2 - 1.0),
    (1.2, 0.2),
];

fn tube_formula(cfg: &RunConfig) -> Result<Criterion> {
    let g = grid();
    let mut rows = Vec::new();
    for (a, r) in ROTATION_TUBES {
        let spec = TubeSpec::new(rotation_torus(a)?, r)?;
        let v = tube_volume_numeric(&spec, &g, cfg.n_t)?.value;
        let closed = (2.0 * r).sin() * SPHERE_VOLUME * (2.0 * a).sin();
        let tol = 1e-6 * (1.0 + v);
        let gap = (v - closed).abs();
        rows.push(ResultRow::check(
            format!("rotation_torus({a:.6}) r={r:.6}"),
            gap,
            tol,
            gap <= tol,
        ));
    }
    for (rho, r) in [(FRAC_PI_3, 0.2), (2.2, 0.3), (0.5, 0.4)] {
        let spec = TubeSpec::new(geodesic_sphere(rho, None)?, r)?;
        let v = tube_volume_numeric(&spec, &g, cfg.n_t)?.value;
        let oracle = ball_volume(rho + r)? - ball_volume(rho - r)?;
        rows.push(ResultRow::close(
            format!("geodesic_sphere({rho:.6}) r={r:.6}"),
            v,
            oracle,
            1e-6,
        ));
    }
    Ok(Criterion {
        id: 3,
        title: "tube volume formula",
        rows,
    })
}

fn inequality_chain(shared: &Shared) -> Result<Criterion> {
    let g = grid();
    let clifford = verify_inequality_chain_with(
        &clifford_torus(),
        FRAC_PI_4,
        &g,
        shared.clifford_focal.focal_radius,
    )?;
    let mut rows = Vec::new();
    for e in &clifford.entries {
        let ok = e.applicable && e.tight;
        rows.push(ResultRow::check(
            format!("clifford {}", e.label),
            e.lhs - e.rhs,
            1e-6,
            ok,
        ));
    }
    for (seed, torus, focal) in &shared.random_tori {
        let chain =
            verify_inequality_chain_with(torus, focal.focal_radius, &g, focal.focal_radius)?;
        let slack = chain
            .entries
            .iter()
            .filter(|e| e.applicable)
            .map(|e| e.slack)
            .fold(f64::INFINITY, f64::min);
        let ok = !chain.vacuous && slack >= -1e-6;
        rows.push(ResultRow::check(
            format!("fourier_torus({seed}) min slack"),
            slack,
            1e-6,
            ok,
        ));
    }
    Ok(Criterion {
        id: 4,
        title: "tube inequality chain",
        rows,
    })
}

fn willmore_property(shared: &Shared) -> Result<Criterion> {
    let g = grid();
    let bound = SPHERE_VOLUME - 1e-6;
    let mut rows = Vec::new();
    for k in 3..=12 {
        let a = k as f64 / 10.0;
        let w = rotation_torus(a)?.willmore_energy(&g)?;
        rows.push(ResultRow::check(
            format!("rotation_torus({a:.1})"),
            w,
            1e-6,
            w >= bound,
        ));
    }
    for (seed, torus, _) in &shared.random_tori {
        let w = torus.willmore_energy(&g)?;
        rows.push(ResultRow::check(
            format!("fourier_torus({seed})"),
            w,
            1e-6,
            w >= bound,
        ));
    }
    for rho in [0.3, FRAC_PI_3, FRAC_PI_2, 2.5] {
        let w = geodesic_sphere(rho, None)?.willmore_energy(&g)?;
        rows.push(ResultRow::close(
            format!("geodesic_sphere({rho:.6})"),
            w,
            4.0 * PI,
            1e-8,
        ));
    }
    Ok(Criterion {
        id: 5,
        title: "Willmore lower bound",
        rows,
    })
}

fn focal_radius_bound(shared: &Shared) -> Result<Criterion> {
    let cap = FRAC_PI_4 + 5e-3;
    let mut rows = Vec::new();
    let mut bounded = |name: String, f: &FocalReport| {
        rows.push(ResultRow::check(
            name,
            f.focal_radius,
            5e-3,
            f.focal_radius <= cap,
        ));
    };
    bounded("clifford_torus".into(), &shared.clifford_focal);
    for (seed, _, f) in &shared.random_tori {
        bounded(format!("fourier_torus({seed})"), f);
    }
    if let Builtin::Surface(d) = make_builtin("dumbbell_torus", &[])? {
        bounded(
            "dumbbell_torus".into(),
            &focal_radius_with(&d, &focal_options())?,
        );
    }
    for a in [0.3, 0.5, FRAC_PI_4, 1.0] {
        let f = focal_radius_with(&rotation_torus(a)?, &focal_options())?;
        let expected = a.min(FRAC_PI_2 - a);
        let ok = f.focal_radius <= cap && (f.focal_radius - expected).abs() <= 5e-3;
        rows.push(ResultRow::check(
            format!("rotation_torus({a:.6})"),
            f.focal_radius,
            5e-3,
            ok,
        ));
    }
    Ok(Criterion {
        id: 6,
        title: "focal radius of tori",
        rows,
    })
}

fn gehring_bound(cfg: &RunConfig) -> Result<Criterion> {
    let mut rows = Vec::new();
    let mut linked = 0;
    let mut widest: f64 = 0.0;
    let mut all_bounded = true;
    let mut k = 0u64;
    while linked < LINKED_PAIRS && k < 20 * LINKED_PAIRS as u64 {
        let seed = cfg.seed.wrapping_add(k);
        k += 1;
        let pair = match FourierLoopFamily::perturbed_hopf(2, 0.5, seed).and_then(|f| f.pair(256)) {
            Ok(p) => p,
            // draws that do not define a pair of disjoint loops
            Err(Error::NotDisjoint { .. } | Error::InvalidParameter(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        let g = match gehring_check(&pair) {
            Ok(g) => g,
            Err(Error::NoAdmissiblePole { .. } | Error::NonIntegerLinking { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        if g.applicable {
            linked += 1;
            widest = widest.max(g.distance);
            all_bounded &= g.bound_satisfied;
        }
    }
    rows.push(ResultRow::check(
        "linked_random_pairs",
        linked as f64,
        0.0,
        linked == LINKED_PAIRS,
    ));
    rows.push(ResultRow::check(
        "max_linked_distance − π/2",
        widest - FRAC_PI_2,
        GEHRING_TOL,
        all_bounded,
    ));

    let hopf = gehring_check(&make_pair("hopf", &[])?)?;
    rows.push(ResultRow::close(
        "hopf_pair distance",
        hopf.distance,
        FRAC_PI_2,
        1e-10,
    ));
    rows.push(ResultRow::check(
        "hopf_pair linking",
        hopf.linking.number as f64,
        0.0,
        hopf.linking.number.abs() == 1,
    ));

    let start = Instant::now();
    let res = extremal_search(
        &FourierLoopFamily::perturbed_hopf(3, 0.05, cfg.seed)?,
        &SearchConfig::default(),
    )?;
    let elapsed = start.elapsed();
    info!(
        "extremal search: {:.6} in {:.1?}",
        res.best_distance, elapsed
    );
    let reached =
        res.best_distance >= FRAC_PI_2 - 0.05 && res.best_distance <= FRAC_PI_2 + GEHRING_TOL;
    rows.push(ResultRow::check(
        "extremal_search distance",
        res.best_distance,
        0.05,
        reached && elapsed <= SEARCH_BUDGET,
    ));
    Ok(Criterion {
        id: 7,
        title: "distance bound for linked loops",
        rows,
    })
}

/// Linking numbers at 20 design poles, spread by a stride coprime to the
/// design size, and at doubled resolution.
fn linking_stable(pair: &CurvePair) -> Result<(i64, bool)> {
    let base = linking_number(pair)?.number;
    let doubled = linking_number(&pair.resampled(2 * pair.m_a, 2 * pair.m_b)?)?.number;
    let design = pole_design();
    let mut stable = doubled == base;
    let mut found = 0;
    for k in 0..design.len() {
        if found == POLE_CHOICES {
            break;
        }
        let pole = SpherePoint::new(design[(k * 29) % design.len()])?;
        match linking_number_from(pair, &pole) {
            Ok(l) => {
                found += 1;
                stable &= l.number == base;
            }
            Err(Error::NoAdmissiblePole { .. }) => {}
            Err(Error::NonIntegerLinking { .. }) => {
                found += 1;
                stable = false;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok((base, stable && found == POLE_CHOICES))
}

fn linking_robustness(cfg: &RunConfig) -> Result<Criterion> {
    let pairs: [(&str, Vec<f64>, Option<i64>); 4] = [
        ("hopf", vec![], None),
        ("knot_axis", vec![2.0, 3.0, FRAC_PI_4], Some(2)),
        ("perturbed_hopf", vec![0.2, cfg.seed as f64], None),
        ("unlinked_circles", vec![0.4], Some(0)),
    ];
    let mut rows = Vec::new();
    for (name, params, expected) in pairs {
        let pair = make_pair(name, &params)?;
        let (n, stable) = linking_stable(&pair)?;
        let ok = stable && expected.is_none_or(|e| e == n);
        rows.push(ResultRow::check(name, n as f64, 0.0, ok));
    }
    Ok(Criterion {
        id: 8,
        title: "linking number robustness",
        rows,
    })
}

fn convexity(cfg: &RunConfig) -> Result<Criterion> {
    let n = 1000;
    let mut rows = Vec::new();
    for (set, r) in [
        ("point", 0.6 * PI),
        ("small_circle:0.3,100", 0.52 * PI),
        ("fourier_loop:128", 0.52 * PI),
    ] {
        let rep = complement_convexity_check(&load_set(set)?, r, n, cfg.seed)?;
        let ok = rep.passed() && rep.pairs_tested == n && !rep.empty;
        rows.push(ResultRow::check(
            format!("{set} violations"),
            rep.violations as f64,
            0.0,
            ok,
        ));
    }
    let rep = complement_convexity_check(&load_set("hopf_circle")?, 0.55 * PI, n, cfg.seed)?;
    rows.push(ResultRow::check(
        "hopf_circle empty",
        rep.empty as u8 as f64,
        0.0,
        rep.empty,
    ));
    Ok(Criterion {
        id: 9,
        title: "convexity of complements",
        rows,
    })
}

fn band_widths(shared: &Shared) -> Result<Criterion> {
    let focal = shared.clifford_focal.focal_radius;
    let mut rows = Vec::new();
    let mut widest: f64 = 0.0;
    for r in [0.3, 0.5, 0.7, 0.98 * focal] {
        let band = build_tube_band_with(clifford_torus(), r, focal)?;
        let fine = band_width(&band, 64)?;
        let coarse = band_width(&band, 32)?;
        widest = widest.max(fine.width);
        let tol = 0.02 * 2.0 * r;
        rows.push(ResultRow::close(
            format!("clifford r={r:.6} width"),
            fine.width,
            2.0 * r,
            tol,
        ));
        rows.push(ResultRow::check(
            format!("clifford r={r:.6} refinement gain"),
            fine.width - coarse.width,
            1e-12,
            fine.width <= coarse.width + 1e-12,
        ));
    }
    rows.push(ResultRow::check(
        "max width",
        widest,
        0.02 * FRAC_PI_2,
        widest <= 1.02 * FRAC_PI_2,
    ));
    Ok(Criterion {
        id: 10,
        title: "band width",
        rows,
    })
}

/// Chain at the configured surface and radius (π/4 if unset). A radius
/// beyond the focal radius gives a vacuous report, which passes.
fn configured_chain(cfg: &RunConfig) -> Result<Criterion> {
    let surface = load_surface(&cfg.surface)?;
    let g = surface_grid(cfg, &surface)?;
    let chain = verify_inequality_chain(&surface, cfg.radius.unwrap_or(FRAC_PI_4), &g)?;
    Ok(Criterion {
        id: 0,
        title: "chain at the configured surface",
        rows: chain_rows(&chain, ""),
    })
}

/// Runs the configured chain and criteria 1 to 10 in order.
pub fn verify_all(cfg: &RunConfig) -> Result<Vec<Criterion>> {
    let mut out = Vec::with_capacity(11);
    let mut record = |name: &str, c: Result<Criterion>| -> Result<()> {
        let c = c?;
        info!("{name}: {}", if c.passed() { "pass" } else { "FAIL" });
        out.push(c);
        Ok(())
    };
    record("configured chain", configured_chain(cfg))?;
    let shared = Shared::new(cfg)?;
    record("criterion 1", volume_calibration())?;
    record("criterion 2", clifford_constants(&shared))?;
    record("criterion 3", tube_formula(cfg))?;
    record("criterion 4", inequality_chain(&shared))?;
    record("criterion 5", willmore_property(&shared))?;
    record("criterion 6", focal_radius_bound(&shared))?;
    record("criterion 7", gehring_bound(cfg))?;
    record("criterion 8", linking_robustness(cfg))?;
    record("criterion 9", convexity(cfg))?;
    record("criterion 10", band_widths(&shared))?;
    Ok(out)
}
