use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::process::{Command, Output};

use spherelab_cli::report::{Report, Verdict};

fn spherelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherelab"))
        .args(args)
        .output()
        .expect("spawn spherelab")
}

fn report(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

fn value(r: &Report, name: &str) -> f64 {
    r.results
        .iter()
        .find(|row| row.name == name)
        .unwrap_or_else(|| panic!("no row {name}"))
        .value
}

#[test]
fn clifford_chain_is_tight_at_a_quarter_turn() {
    let out = spherelab(&[
        "verify-chain",
        "--surface",
        "clifford",
        "--radius",
        "0.7853981633974483",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let relations: Vec<_> = r
        .results
        .iter()
        .filter(|row| row.name.starts_with('('))
        .collect();
    assert_eq!(relations.len(), 6);
    for row in relations {
        assert_eq!(row.verdict, Verdict::Pass);
        assert!(row.value.abs() <= 1e-6, "{row:?}");
    }
}

#[test]
fn hopf_distance() {
    let out = spherelab(&["link-distance", "--pair", "hopf"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((value(&report(&out), "distance") - FRAC_PI_2).abs() < 1e-9);
}

#[test]
fn band_width_in_csv() {
    let out = spherelab(&[
        "band-width",
        "--surface",
        "clifford",
        "--radius",
        "0.7",
        "--resolution",
        "64",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,value,tolerance,verdict"));
    let fields: Vec<_> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields[0], "width");
    let w: f64 = fields[1].parse().unwrap();
    assert!((w - 1.4).abs() <= 0.02 * 1.4, "{w}");
}

#[test]
fn degrees_flag_converts_the_radius() {
    let out = spherelab(&[
        "band-width",
        "--surface",
        "clifford",
        "--radius",
        "30",
        "--degrees",
        "--resolution",
        "32",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((r.config.radius.unwrap() - std::f64::consts::FRAC_PI_6).abs() < 1e-15);
}

#[test]
fn radius_beyond_focal_is_vacuous() {
    let out = spherelab(&["verify-chain", "--surface", "clifford", "--radius", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(value(&report(&out), "vacuous"), 1.0);
}

#[test]
fn config_file_and_atomic_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "pair = \"knot_axis:2,3,0.7853981633974483\"\nseed = 3\n",
    )
    .unwrap();
    let out_path = dir.path().join("report.json");
    let out = spherelab(&[
        "link-number",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Report = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r.config.seed, 3);
    assert_eq!(value(&r, "linking_number"), 2.0);
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(spherelab(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        spherelab(&["tube-volume", "--surface", "clifford"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        spherelab(&["verify-chain", "--surface", "warped_torus"])
            .status
            .code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "radious = 0.5\n").unwrap();
    assert_eq!(
        spherelab(&["verify-chain", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let unwritable = dir.path().join("missing/dir/report.json");
    let out = spherelab(&["link-number", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn corrupted_grid_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torus.grid");
    let n = 8;
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "{n} {n}").unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in 0..n {
            let (u, v) = (
                i as f64 * std::f64::consts::TAU / n as f64,
                j as f64 * std::f64::consts::TAU / n as f64,
            );
            let scale = if (i, j) == (2, 5) { 1.5 } else { 1.0 };
            writeln!(
                f,
                "{i} {j} {} {} {} {}",
                scale * s * u.cos(),
                scale * s * u.sin(),
                scale * s * v.cos(),
                scale * s * v.sin()
            )
            .unwrap();
        }
    }
    drop(f);
    let spec = format!("grid:{}", path.display());
    let out = spherelab(&["surface-report", "--surface", &spec]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("line 23") && err.contains("i = 2, j = 5"),
        "{err}"
    );
}

#[test]
fn gehring_search_writes_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("t.csv");
    let out = spherelab(&[
        "gehring-search",
        "--family",
        "perturbed_hopf:0.05,2",
        "--trajectory",
        traj.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert!(value(&r, "final_distance") >= FRAC_PI_2 - 0.05);
    let csv = std::fs::read_to_string(&traj).unwrap();
    assert!(csv.lines().count() > 1);
}
