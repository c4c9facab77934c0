//! One function per command; each returns the rows of its report.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;
use std::time::Instant;

use spherelab::bands::{band_width, build_tube_band, levelset_convexity_probe};
use spherelab::immersions::CurvePair;
use spherelab::immersions::{
    hopf_pair, load_grid_surface, make_builtin, sample_curve, small_circle, Builtin, FourierLoop,
    SampledCurve, SampledSurface, SurfaceImmersion,
};
use spherelab::links::{
    complement_convexity_check, extremal_search, gehring_check, linking_number, make_pair,
    pair_distance, write_trajectory_csv, FourierLoopFamily, SearchConfig, GEHRING_TOL,
    MEMBERSHIP_SLACK, REFINE_STEP,
};
use spherelab::tubes::{
    curvature_focal_of, focal_radius_with, tube_volume_formula, tube_volume_numeric,
    verify_inequality_chain, ChainReport, FocalOptions, ReachOptions, TubeSpec, CHAIN_TOL,
};
use spherelab::vec4::Vec4;
use spherelab::QuadratureGrid;

use crate::config::{parse_spec, RunConfig};
use crate::report::{write_atomic, Report, ResultRow, Verdict};
use crate::{verify, CliError, Result};

pub const COMMANDS: [&str; 10] = [
    "surface-report",
    "tube-volume",
    "focal-radius",
    "verify-chain",
    "link-distance",
    "link-number",
    "gehring-search",
    "convexity-check",
    "band-width",
    "verify-all",
];

const DEFAULT_GRID: usize = 256;
const DEFAULT_BAND_RESOLUTION: usize = 64;

/// Surface from `family[:params]` or `grid:PATH`.
pub fn load_surface(spec: &str) -> Result<SurfaceImmersion> {
    if let Some(path) = spec.strip_prefix("grid:") {
        return Ok(load_grid_surface(Path::new(path))?);
    }
    let (name, params) = parse_spec(spec)?;
    match make_builtin(&name, &params)? {
        Builtin::Surface(s) => Ok(s),
        _ => Err(CliError::Config(format!(
            "`{name}` is not a surface family"
        ))),
    }
}

/// Quadrature grid: the configured size, else the file lattice, else 256².
pub fn surface_grid(cfg: &RunConfig, surface: &SurfaceImmersion) -> Result<QuadratureGrid> {
    if let Some(n) = cfg.grid {
        return Ok(QuadratureGrid::square(n)?);
    }
    Ok(surface.charts()[0]
        .native_grid()
        .unwrap_or(QuadratureGrid::square(DEFAULT_GRID)?))
}

fn load_pair(cfg: &RunConfig) -> Result<CurvePair> {
    let (name, params) = parse_spec(&cfg.pair)?;
    let pair = make_pair(&name, &params)?;
    Ok(match cfg.resolution {
        Some(m) => pair.resampled(m, m)?,
        None => pair,
    })
}

/// Point set for the convexity probe.
pub fn load_set(spec: &str) -> Result<Vec<Vec4>> {
    let (name, p) = parse_spec(spec)?;
    let count = |i: usize, default: usize| -> Result<usize> {
        match p.get(i) {
            None => Ok(default),
            Some(&x) if x >= 1.0 && x.fract() == 0.0 => Ok(x as usize),
            Some(&x) => Err(CliError::Config(format!(
                "sample count must be a positive integer, got {x}"
            ))),
        }
    };
    match name.as_str() {
        "point" => Ok(vec![[1.0, 0.0, 0.0, 0.0]]),
        "small_circle" => {
            let rho = p.first().copied().unwrap_or(0.3);
            let c = small_circle(
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                rho,
            )?;
            Ok(sample_curve(&c, count(1, 100)?))
        }
        "hopf_circle" => Ok(sample_curve(hopf_pair().a.as_ref(), count(0, 256)?)),
        "fourier_loop" => {
            let c = SampledCurve::from_curve(&small_fourier_loop(), count(0, 128)?)?;
            Ok(c.samples().to_vec())
        }
        other => Err(CliError::Config(format!("unknown point set `{other}`"))),
    }
}

/// A wobbly loop about `e₀` of angular size about a quarter radian.
pub fn small_fourier_loop() -> FourierLoop {
    FourierLoop::new(
        vec![
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.25, 0.0, 0.0],
            [0.0, 0.0, 0.05, 0.0],
        ],
        vec![[0.0; 4], [0.0, 0.0, 0.25, 0.05], [0.0, 0.03, 0.0, 0.0]],
    )
    .expect("loop stays away from the origin")
}

/// Search start: `perturbed_hopf[:amp,order]`, `knot_axis:p,q,a` or `hopf`.
pub fn load_family(spec: &str, seed: u64) -> Result<FourierLoopFamily> {
    let (name, p) = parse_spec(spec)?;
    let int = |x: f64| -> Result<usize> {
        if x >= 0.0 && x.fract() == 0.0 {
            Ok(x as usize)
        } else {
            Err(CliError::Config(format!(
                "expected a nonnegative integer, got {x}"
            )))
        }
    };
    match name.as_str() {
        "perturbed_hopf" => {
            let amp = p.first().copied().unwrap_or(0.05);
            let order = p.get(1).map(|&x| int(x)).transpose()?.unwrap_or(3);
            Ok(FourierLoopFamily::perturbed_hopf(order, amp, seed)?)
        }
        "hopf" => Ok(FourierLoopFamily::perturbed_hopf(1, 0.0, seed)?),
        "knot_axis" => {
            if p.len() != 3 {
                return Err(CliError::Config("knot_axis needs p,q,a".into()));
            }
            Ok(FourierLoopFamily::knot_and_axis(
                int(p[0])?,
                int(p[1])?,
                p[2],
            )?)
        }
        other => Err(CliError::Config(format!("unknown search family `{other}`"))),
    }
}

fn require_radius(cfg: &RunConfig, command: &str) -> Result<f64> {
    cfg.radius.ok_or_else(|| {
        CliError::Config(format!(
            "{command} needs a radius (--radius or `radius` in the config)"
        ))
    })
}

fn surface_report(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let surface = load_surface(&cfg.surface)?;
    let grid = surface_grid(cfg, &surface)?;
    let fine = surface.sample(&grid)?;
    // the half grid estimates the quadrature error
    let half = QuadratureGrid::new((grid.n_u / 2).max(8), (grid.n_v / 2).max(8))?;
    let coarse = surface.sample(&half)?;
    let focal = |s: &SampledSurface| curvature_focal_of(s).0;
    let pairs = [
        ("area", fine.area(), coarse.area()),
        (
            "willmore_energy",
            fine.willmore_energy(),
            coarse.willmore_energy(),
        ),
        (
            "mean_square_curvature",
            fine.mean_square_curvature(),
            coarse.mean_square_curvature(),
        ),
        (
            "gauss_bonnet_characteristic",
            fine.gauss_bonnet_characteristic(),
            coarse.gauss_bonnet_characteristic(),
        ),
        (
            "max_abs_curvature",
            fine.max_abs_curvature().0,
            coarse.max_abs_curvature().0,
        ),
        ("curvature_focal_distance", focal(&fine), focal(&coarse)),
    ];
    Ok(pairs
        .into_iter()
        .map(|(name, v, w)| ResultRow::info(name, v, (v - w).abs()))
        .collect())
}

fn tube_volume(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let r = require_radius(cfg, "tube-volume")?;
    let surface = load_surface(&cfg.surface)?;
    let grid = surface_grid(cfg, &surface)?;
    let chi = surface.topology().euler_characteristic();
    let spec = TubeSpec::new(surface, r)?;
    let v = tube_volume_numeric(&spec, &grid, cfg.n_t)?;
    let half = tube_volume_numeric(&spec, &grid, (cfg.n_t / 2).max(4))?;
    let area = spec.surface.area(&grid)?;
    let closed = tube_volume_formula(area, chi, r);
    let agree_tol = 1e-6 * (1.0 + v.value);
    let agreement = if v.beyond_focal {
        ResultRow::info("closed_form_gap", (v.value - closed).abs(), agree_tol)
    } else {
        ResultRow::check(
            "closed_form_gap",
            (v.value - closed).abs(),
            agree_tol,
            (v.value - closed).abs() <= agree_tol,
        )
    };
    Ok(vec![
        ResultRow::info("volume", v.value, (v.value - half.value).abs()),
        ResultRow::info("volume_closed_form", closed, 0.0),
        ResultRow::info("beyond_focal", v.beyond_focal as u8 as f64, 0.0),
        agreement,
    ])
}

fn focal_options(cfg: &RunConfig) -> Result<FocalOptions> {
    let mut opts = FocalOptions::default();
    if let Some(n) = cfg.grid {
        opts.curvature_grid = QuadratureGrid::square(n)?;
    }
    opts.reach = ReachOptions {
        resolution: cfg.resolution.unwrap_or(opts.reach.resolution),
        ..opts.reach
    };
    Ok(opts)
}

fn focal_radius_cmd(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let surface = load_surface(&cfg.surface)?;
    let f = focal_radius_with(&surface, &focal_options(cfg)?)?;
    Ok(vec![
        ResultRow::info("curvature_focal_distance", f.curvature_focal, 0.0),
        ResultRow::info("reach_estimate", f.reach_estimate, f.tolerance),
        ResultRow::info("focal_radius", f.focal_radius, f.tolerance),
        ResultRow::info("reach_limited", f.collision.is_some() as u8 as f64, 0.0),
    ])
}

fn verify_chain(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let surface = load_surface(&cfg.surface)?;
    let grid = surface_grid(cfg, &surface)?;
    let r = match cfg.radius {
        Some(r) => r,
        None => focal_radius_with(&surface, &focal_options(cfg)?)?.focal_radius,
    };
    let chain = verify_inequality_chain(&surface, r, &grid)?;
    Ok(chain_rows(&chain, ""))
}

/// Rows for a chain report; each entry's value is `lhs − rhs`.
pub fn chain_rows(chain: &ChainReport, prefix: &str) -> Vec<ResultRow> {
    let mut rows = vec![
        ResultRow::info(format!("{prefix}radius"), chain.radius, 0.0),
        ResultRow::info(format!("{prefix}focal_radius"), chain.focal_radius, 0.0),
        ResultRow::info(format!("{prefix}vacuous"), chain.vacuous as u8 as f64, 0.0),
    ];
    for e in &chain.entries {
        let verdict = if !e.applicable {
            Verdict::Info
        } else {
            Verdict::from_bool(e.holds)
        };
        rows.push(ResultRow::new(
            format!("{prefix}{}", e.label),
            e.lhs - e.rhs,
            CHAIN_TOL,
            verdict,
        ));
    }
    rows
}

fn link_distance(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let pair = load_pair(cfg)?;
    let g = gehring_check(&pair)?;
    let coarse = pair_distance(&pair, false)?.distance;
    let bound = if g.applicable {
        ResultRow::check(
            "distance_minus_quarter_turn",
            g.distance - FRAC_PI_2,
            GEHRING_TOL,
            g.bound_satisfied,
        )
    } else {
        ResultRow::info(
            "distance_minus_quarter_turn",
            g.distance - FRAC_PI_2,
            GEHRING_TOL,
        )
    };
    Ok(vec![
        ResultRow::info("distance", g.distance, REFINE_STEP),
        ResultRow::info("coarse_distance", coarse, coarse - g.distance),
        ResultRow::info("linking_number", g.linking.number as f64, 0.0),
        bound,
    ])
}

fn link_number(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let pair = load_pair(cfg)?;
    let l = linking_number(&pair)?;
    Ok(vec![
        ResultRow::info("linking_number", l.number as f64, 0.0),
        ResultRow::info("gauss_integral", l.raw, (l.raw - l.number as f64).abs()),
        ResultRow::info("pole_clearance", l.clearance, 0.0),
    ])
}

fn gehring_search(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let start = load_family(&cfg.family, cfg.seed)?;
    let config = SearchConfig::default();
    let res = extremal_search(&start, &config)?;
    if let Some(path) = &cfg.trajectory {
        let mut buf = Vec::new();
        write_trajectory_csv(&res.trajectory, &mut buf)?;
        write_atomic(path, &buf)?;
    }
    let first = res
        .trajectory
        .first()
        .map_or(res.best_distance, |r| r.distance);
    let monotone = res
        .trajectory
        .windows(2)
        .all(|w| w[1].distance >= w[0].distance);
    let below = res
        .trajectory
        .iter()
        .all(|r| r.distance <= FRAC_PI_2 + GEHRING_TOL);
    Ok(vec![
        ResultRow::info("initial_distance", first, REFINE_STEP),
        ResultRow::info("final_distance", res.best_distance, REFINE_STEP),
        ResultRow::info("linking_number", res.linking as f64, 0.0),
        ResultRow::info(
            "accepted_steps",
            res.trajectory.last().map_or(0, |r| r.iteration) as f64,
            0.0,
        ),
        ResultRow::check(
            "distance_nondecreasing",
            monotone as u8 as f64,
            0.0,
            monotone,
        ),
        ResultRow::check(
            "max_distance_minus_quarter_turn",
            res.best_distance - FRAC_PI_2,
            GEHRING_TOL,
            below,
        ),
    ])
}

fn convexity_check(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let r = require_radius(cfg, "convexity-check")?;
    let set = load_set(&cfg.set)?;
    let rep = complement_convexity_check(&set, r, cfg.n_pairs, cfg.seed)?;
    let margin = if rep.min_margin.is_finite() {
        rep.min_margin
    } else {
        0.0
    };
    Ok(vec![
        ResultRow::info("pairs_tested", rep.pairs_tested as f64, 0.0),
        ResultRow::check("violations", rep.violations as f64, 0.0, rep.passed()),
        ResultRow::info("empty", rep.empty as u8 as f64, 0.0),
        ResultRow::info("draws", rep.draws as f64, 0.0),
        ResultRow::info("min_margin", margin, MEMBERSHIP_SLACK),
    ])
}

fn band_width_cmd(cfg: &RunConfig) -> Result<Vec<ResultRow>> {
    let r = require_radius(cfg, "band-width")?;
    let surface = load_surface(&cfg.surface)?;
    let grid = surface_grid(cfg, &surface)?;
    let band = build_tube_band(surface, r)?;
    let w = band_width(&band, cfg.resolution.unwrap_or(DEFAULT_BAND_RESOLUTION))?;
    let mut rows = vec![
        ResultRow::info("width", w.width, w.error_bound),
        ResultRow::info("focal_radius", band.focal_radius(), 0.0),
    ];
    if let Some(level) = cfg.level {
        let p = levelset_convexity_probe(&band, level, &grid)?;
        rows.push(ResultRow::info("level_min_curvature", p.min_curvature, 0.0));
        rows.push(ResultRow::info("level_max_curvature", p.max_curvature, 0.0));
        rows.push(ResultRow::info("level_convex", p.convex as u8 as f64, 0.0));
    }
    Ok(rows)
}

/// Runs `command` and wraps its rows in a report.
pub fn run(command: &str, cfg: &RunConfig) -> Result<Report> {
    let start = Instant::now();
    let rows = match command {
        "surface-report" => surface_report(cfg)?,
        "tube-volume" => tube_volume(cfg)?,
        "focal-radius" => focal_radius_cmd(cfg)?,
        "verify-chain" => verify_chain(cfg)?,
        "link-distance" => link_distance(cfg)?,
        "link-number" => link_number(cfg)?,
        "gehring-search" => gehring_search(cfg)?,
        "convexity-check" => convexity_check(cfg)?,
        "band-width" => band_width_cmd(cfg)?,
        "verify-all" => verify::verify_all(cfg)?
            .into_iter()
            .flat_map(|c| c.into_rows())
            .collect(),
        other => {
            return Err(CliError::Config(format!(
                "unknown command `{other}`; expected one of {}",
                COMMANDS.join(", ")
            )))
        }
    };
    Ok(Report::new(
        command,
        cfg,
        rows,
        start.elapsed().as_millis() as u64,
    ))
}
