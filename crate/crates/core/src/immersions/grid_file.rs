//! Plain-text sampled tori: a header line `n_u n_v`, then one line
//! `i j x0 x1 x2 x3` per lattice node in row-major order.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::curvature::DEGENERATE_DET;
use super::{fd, Jet, SurfaceImmersion, SurfaceMap, Topology};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureGrid;
use crate::sphere::INPUT_NORM_TOL;
use crate::vec4::{self, Vec4};

/// A torus known only on a lattice, with finite-difference jets.
#[derive(Debug, Clone)]
pub struct GridSurface {
    n_u: usize,
    n_v: usize,
    raw: Vec<Vec4>,
    jets: Vec<Jet>,
}

impl GridSurface {
    /// Builds the surface from row-major samples, validating unit norms and
    /// the immersion condition at every node.
    pub fn new(n_u: usize, n_v: usize, raw: Vec<Vec4>) -> Result<Self> {
        QuadratureGrid::new(n_u, n_v)?;
        if raw.len() != n_u * n_v {
            return Err(Error::GridShape {
                expected: n_u * n_v,
                found: raw.len(),
            });
        }
        for (row, x) in raw.iter().enumerate() {
            let norm = vec4::norm(x);
            if !((norm - 1.0).abs() <= INPUT_NORM_TOL) {
                return Err(Error::NonUnitRow {
                    row: row + 2,
                    i: row / n_v,
                    j: row % n_v,
                    norm,
                });
            }
        }
        let pos: Vec<Vec4> = raw.iter().map(vec4::normalized).collect();
        let at = |i: isize, j: isize| pos[fd::wrap(i, n_u) * n_v + fd::wrap(j, n_v)];
        let (hu, hv) = (TAU / n_u as f64, TAU / n_v as f64);
        let dv: Vec<Vec4> = (0..n_u * n_v)
            .map(|k| {
                let (i, j) = ((k / n_v) as isize, (k % n_v) as isize);
                fd::first(|d| at(i, j + d), hv)
            })
            .collect();
        let dv_at = |i: isize, j: isize| dv[fd::wrap(i, n_u) * n_v + fd::wrap(j, n_v)];
        let mut jets = Vec::with_capacity(n_u * n_v);
        for k in 0..n_u * n_v {
            let (i, j) = ((k / n_v) as isize, (k % n_v) as isize);
            let jet = Jet {
                pos: pos[k],
                du: fd::first(|d| at(i + d, j), hu),
                dv: dv[k],
                duu: fd::second(|d| at(i + d, j), hu),
                duv: fd::first(|d| dv_at(i + d, j), hu),
                dvv: fd::second(|d| at(i, j + d), hv),
            };
            let e = vec4::dot(&jet.du, &jet.du);
            let f = vec4::dot(&jet.du, &jet.dv);
            let g = vec4::dot(&jet.dv, &jet.dv);
            let det = e * g - f * f;
            if !(det > DEGENERATE_DET) {
                return Err(Error::DegenerateMetric {
                    u: i as f64 * hu,
                    v: j as f64 * hv,
                    det,
                });
            }
            jets.push(jet);
        }
        Ok(Self {
            n_u,
            n_v,
            raw,
            jets,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_u, self.n_v)
    }

    /// Samples exactly as read.
    pub fn raw(&self) -> &[Vec4] {
        &self.raw
    }

    fn index(&self, u: f64, v: f64) -> usize {
        let i = (u.rem_euclid(TAU) / TAU * self.n_u as f64).round() as usize % self.n_u;
        let j = (v.rem_euclid(TAU) / TAU * self.n_v as f64).round() as usize % self.n_v;
        i * self.n_v + j
    }
}

impl SurfaceMap for GridSurface {
    /// Jet at the lattice node nearest to `(u, v)`.
    fn jet(&self, u: f64, v: f64) -> Jet {
        self.jets[self.index(u, v)]
    }

    fn native_grid(&self) -> Option<QuadratureGrid> {
        Some(QuadratureGrid {
            n_u: self.n_u,
            n_v: self.n_v,
        })
    }
}

/// Writes samples in the grid format with 17 significant digits.
pub fn write_grid_surface(
    mut out: impl Write,
    n_u: usize,
    n_v: usize,
    points: &[Vec4],
) -> Result<()> {
    if points.len() != n_u * n_v {
        return Err(Error::GridShape {
            expected: n_u * n_v,
            found: points.len(),
        });
    }
    writeln!(out, "{n_u} {n_v}")?;
    for (k, x) in points.iter().enumerate() {
        writeln!(
            out,
            "{} {} {:.16e} {:.16e} {:.16e} {:.16e}",
            k / n_v,
            k % n_v,
            x[0],
            x[1],
            x[2],
            x[3]
        )?;
    }
    Ok(())
}

/// Samples the first chart of a torus on `grid` and writes it.
pub fn write_grid_samples(
    surface: &SurfaceImmersion,
    grid: &QuadratureGrid,
    out: impl Write,
) -> Result<()> {
    if surface.topology() != Topology::Torus {
        return Err(Error::Topology(format!(
            "{} is not a torus; grid files hold one periodic chart",
            surface.name()
        )));
    }
    let chart = &surface.charts()[0];
    let points: Vec<Vec4> = grid
        .nodes()
        .map(|(i, j)| chart.jet(grid.u(i), grid.v(j)).pos)
        .collect();
    write_grid_surface(out, grid.n_u, grid.n_v, &points)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a grid file.
pub fn read_grid_surface(input: impl BufRead) -> Result<GridSurface> {
    let mut lines = input.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (n_u, n_v) = loop {
        let Some((no, line)) = lines.next() else {
            return Err(parse_err(1, "missing header"));
        };
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let dims: Vec<usize> = fields
            .iter()
            .map(|f| f.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(no, format!("header: {e}")))?;
        if dims.len() != 2 {
            return Err(parse_err(
                no,
                format!("header needs `n_u n_v`, found {} fields", dims.len()),
            ));
        }
        break (dims[0], dims[1]);
    };
    let mut raw = Vec::with_capacity(n_u * n_v);
    for (no, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(parse_err(
                no,
                format!("expected `i j x0 x1 x2 x3`, found {} fields", fields.len()),
            ));
        }
        let k = raw.len();
        if k >= n_u * n_v {
            return Err(parse_err(
                no,
                format!("more than {} sample rows", n_u * n_v),
            ));
        }
        let expect = (k / n_v, k % n_v);
        let idx = (fields[0].parse::<usize>(), fields[1].parse::<usize>());
        match idx {
            (Ok(i), Ok(j)) if (i, j) == expect => {}
            _ => {
                return Err(parse_err(
                    no,
                    format!(
                        "expected indices {} {}, found {} {}",
                        expect.0, expect.1, fields[0], fields[1]
                    ),
                ))
            }
        }
        let mut x = [0.0; 4];
        for (c, f) in x.iter_mut().zip(&fields[2..]) {
            *c = f
                .parse::<f64>()
                .map_err(|e| parse_err(no, format!("coordinate `{f}`: {e}")))?;
        }
        let norm = vec4::norm(&x);
        if !((norm - 1.0).abs() <= INPUT_NORM_TOL) {
            return Err(Error::NonUnitRow {
                row: no,
                i: expect.0,
                j: expect.1,
                norm,
            });
        }
        raw.push(x);
    }
    if raw.len() != n_u * n_v {
        return Err(parse_err(
            0,
            format!("expected {} sample rows, found {}", n_u * n_v, raw.len()),
        ));
    }
    GridSurface::new(n_u, n_v, raw)
}

/// Loads a grid file as a torus named after the file stem.
pub fn load_grid_surface(path: impl AsRef<Path>) -> Result<SurfaceImmersion> {
    let path = path.as_ref();
    let grid = read_grid_surface(BufReader::new(File::open(path)?))?;
    let name = path
        .file_stem()
        .map_or("grid".into(), |s| s.to_string_lossy().into_owned());
    Ok(SurfaceImmersion::torus(name, grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::immersions::{clifford_torus, rotation_torus};
    use std::f64::consts::PI;
    use std::io::Cursor;

    fn round_trip(surface: &SurfaceImmersion, n: usize) -> (Vec<u8>, GridSurface) {
        let mut buf = Vec::new();
        write_grid_samples(surface, &QuadratureGrid::square(n).unwrap(), &mut buf).unwrap();
        let g = read_grid_surface(Cursor::new(&buf)).unwrap();
        (buf, g)
    }

    #[test]
    fn write_read_write_is_bit_exact() {
        let (buf, g) = round_trip(&rotation_torus(0.6).unwrap(), 16);
        let mut again = Vec::new();
        write_grid_surface(&mut again, 16, 16, g.raw()).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn finite_difference_jets_match_analytic() {
        let s = rotation_torus(0.6).unwrap();
        let (_, g) = round_trip(&s, 128);
        let grid = QuadratureGrid::square(128).unwrap();
        for (i, j) in [(0, 0), (17, 90), (127, 3)] {
            let (u, v) = (grid.u(i), grid.v(j));
            let a = s.charts()[0].jet(u, v);
            let b = g.jet(u, v);
            for (x, y) in [
                (a.du, b.du),
                (a.dv, b.dv),
                (a.duu, b.duu),
                (a.duv, b.duv),
                (a.dvv, b.dvv),
            ] {
                assert!(vec4::norm(&vec4::sub(&x, &y)) < 1e-6);
            }
        }
    }

    #[test]
    fn grids_must_subsample_the_lattice() {
        let (_, g) = round_trip(&clifford_torus(), 32);
        let s = SurfaceImmersion::torus("g", g);
        assert!(s.area(&QuadratureGrid::square(16).unwrap()).is_ok());
        assert!(s.area(&QuadratureGrid::square(24).unwrap()).is_err());
        let area = s.area(&QuadratureGrid::square(32).unwrap()).unwrap();
        assert!((area - 2.0 * PI * PI).abs() < 1e-3);
    }

    #[test]
    fn malformed_files() {
        let bad_norm = "8 8\n0 0 0.5 0 0 0\n";
        let err = read_grid_surface(Cursor::new(bad_norm)).unwrap_err();
        assert!(
            matches!(
                err,
                Error::NonUnitRow {
                    row: 2,
                    i: 0,
                    j: 0,
                    ..
                }
            ),
            "{err}"
        );
        assert!(matches!(
            read_grid_surface(Cursor::new("8\n")),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_grid_surface(Cursor::new("8 8\n0 1 1 0 0 0\n")),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            read_grid_surface(Cursor::new("8 8\n0 0 1 0 0 0\n")),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            read_grid_surface(Cursor::new("")),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn degenerate_lattice_is_rejected() {
        let raw = vec![[1.0, 0.0, 0.0, 0.0]; 64];
        assert!(matches!(
            GridSurface::new(8, 8, raw),
            Err(Error::DegenerateMetric { .. })
        ));
    }
}
