//! JSON, CSV and DOT encodings. Rationals are written as `"p/q"` strings.

use crate::arith::{fmt_q, parse_q, Q};
use crate::error::{invalid, Result};
use crate::fractal::ConjectureRow;
use crate::mesh::{MeshWindow, Row};
use crate::pin::{lat, Lat, YPin};
use crate::projective::ProjPoint;
use crate::quiver::Quiver;
use num::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

#[derive(Serialize, Deserialize)]
struct RowJson {
    j: i64,
    i_lo: i64,
    points: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct MeshJson {
    pin: YPin,
    dim: usize,
    seed: u64,
    rows: Vec<RowJson>,
}

fn point_strings(p: &ProjPoint) -> Vec<String> {
    p.canonical().iter().map(fmt_q).collect()
}

fn parse_point(v: &[String], dim: usize) -> Result<ProjPoint> {
    if v.len() != dim + 1 {
        return invalid(format!("expected {} homogeneous coordinates, got {}", dim + 1, v.len()));
    }
    let q: Vec<Q> = v.iter().map(|s| parse_q(s)).collect::<Result<_>>()?;
    ProjPoint::from_rationals(&q)
}

pub fn mesh_to_json(w: &MeshWindow) -> Result<String> {
    let rows = w
        .rows
        .iter()
        .map(|(&j, r)| RowJson { j, i_lo: r.i_lo, points: r.points.iter().map(point_strings).collect() })
        .collect();
    Ok(serde_json::to_string_pretty(&MeshJson { pin: w.pin, dim: w.dim, seed: w.seed, rows })?)
}

pub fn mesh_from_json(s: &str) -> Result<MeshWindow> {
    let m: MeshJson = serde_json::from_str(s)?;
    let mut w = MeshWindow::new(m.pin, m.dim, m.seed);
    for r in m.rows {
        let points = r.points.iter().map(|p| parse_point(p, m.dim)).collect::<Result<_>>()?;
        w.rows.insert(r.j, Row { i_lo: r.i_lo, points });
    }
    Ok(w)
}

#[derive(Serialize, Deserialize, Debug, PartialEq, Eq)]
pub struct QuiverJson {
    pub vertices: Vec<[i64; 2]>,
    pub arrows: Vec<[i64; 3]>,
}

/// Lattice-labelled quiver: `arrows` lists `[u, v, multiplicity]` with indices into `vertices`.
pub fn quiver_json(vertices: &[Lat], q: &Quiver) -> QuiverJson {
    QuiverJson {
        vertices: vertices.iter().map(|&p| p.into()).collect(),
        arrows: q.arrows().into_iter().map(|(u, v, m)| [u as i64, v as i64, m]).collect(),
    }
}

pub fn quiver_from_json(j: &QuiverJson) -> Result<(Vec<Lat>, Quiver)> {
    let n = j.vertices.len();
    let mut arrows = vec![];
    for &[u, v, m] in &j.arrows {
        if u < 0 || v < 0 || u as usize >= n || v as usize >= n {
            return invalid(format!("arrow {u} -> {v} refers to a missing vertex"));
        }
        arrows.push((u as usize, v as usize, m));
    }
    let vertices = j.vertices.iter().map(|&[i, j]| lat(i, j)).collect();
    Ok((vertices, Quiver::from_arrows(n, &arrows)?))
}

/// Graphviz digraph with one edge per arrow, labelled by multiplicity when it exceeds one.
pub fn quiver_dot(name: &str, vertices: &[Lat], q: &Quiver) -> String {
    let mut s = format!("digraph \"{}\" {{\n", name.replace('"', "'"));
    for (k, p) in vertices.iter().enumerate() {
        let _ = writeln!(s, "  v{k} [label=\"({},{})\", pos=\"{},{}!\"];", p.i, p.j, p.i, p.j);
    }
    for (u, v, m) in q.arrows() {
        if m == 1 {
            let _ = writeln!(s, "  v{u} -> v{v};");
        } else {
            let _ = writeln!(s, "  v{u} -> v{v} [label=\"{m}\"];");
        }
    }
    s.push_str("}\n");
    s
}

/// Affine chart of a window: `i, j, finite, x1..xD`; points at infinity keep their canonical
/// homogeneous coordinates `x0..xD` with `finite = false`.
pub fn affine_csv<W: Write>(w: &MeshWindow, out: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().flexible(true).from_writer(out);
    let mut header = vec!["i".to_string(), "j".to_string(), "finite".to_string()];
    header.extend((1..=w.dim).map(|k| format!("x{k}")));
    wr.write_record(&header)?;
    for (p, pt) in w.iter() {
        let c = pt.canonical();
        let finite = !pt.coords()[0].is_zero();
        let mut rec = vec![p.i.to_string(), p.j.to_string(), finite.to_string()];
        if finite {
            rec.extend(c[1..].iter().map(fmt_q));
        } else {
            rec.extend(c.iter().map(fmt_q));
        }
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

/// `r_i, r_j, y_num, y_den` rows in lattice order.
pub fn y_csv<W: Write>(y: &BTreeMap<Lat, Q>, out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["r_i", "r_j", "y_num", "y_den"])?;
    for (r, v) in y {
        wr.write_record([r.i.to_string(), r.j.to_string(), v.numer().to_string(), v.denom().to_string()])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn y_from_csv(s: &str) -> Result<BTreeMap<Lat, Q>> {
    let mut rd = csv::Reader::from_reader(s.as_bytes());
    let mut out = BTreeMap::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |k: usize| rec.get(k).unwrap_or("");
        let i: i64 = f(0).parse().map_err(|_| crate::Error::Invalid(format!("bad r_i {:?}", f(0))))?;
        let j: i64 = f(1).parse().map_err(|_| crate::Error::Invalid(format!("bad r_j {:?}", f(1))))?;
        out.insert(lat(i, j), parse_q(&format!("{}/{}", f(2), f(3)))?);
    }
    Ok(out)
}

pub fn fractal_csv<W: Write>(rows: &[ConjectureRow], out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

/// Checks the subset of DOT syntax written by [`quiver_dot`]: a single digraph block whose body
/// lines are node or edge statements ending in `;`.
pub fn dot_is_well_formed(s: &str) -> bool {
    let lines: Vec<&str> = s.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let (Some(first), Some(last)) = (lines.first(), lines.last()) else { return false };
    if !first.starts_with("digraph ") || !first.ends_with('{') || *last != "}" {
        return false;
    }
    let ident = |t: &str| t.starts_with('v') && t.len() > 1 && t[1..].chars().all(|c| c.is_ascii_digit());
    lines[1..lines.len() - 1].iter().all(|l| {
        let Some(body) = l.strip_suffix(';') else { return false };
        if body.matches('"').count() % 2 != 0 {
            return false;
        }
        let head = body.split(" [").next().unwrap();
        let attrs_ok = body.find(" [").is_none_or(|k| body[k..].trim_start().starts_with('[') && body.ends_with(']'));
        let stmt_ok = match head.split_once(" -> ") {
            Some((u, v)) => ident(u) && ident(v),
            None => ident(head),
        };
        attrs_ok && stmt_ok
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::mesh::generate;
    use crate::pin::zoo_pin;
    use crate::quiver::QSTemplate;

    #[test]
    fn mesh_round_trip() {
        for (name, dim) in [("pentagram", 2), ("rabbit", 4), ("lower pentagram", 1)] {
            let mut w = generate(&zoo_pin(name).unwrap(), dim, 8, 11).unwrap();
            w.step(1).unwrap();
            let s = mesh_to_json(&w).unwrap();
            let back = mesh_from_json(&s).unwrap();
            assert_eq!(back, w);
            assert_eq!(mesh_to_json(&back).unwrap(), s);
        }
    }

    #[test]
    fn quiver_round_trip_and_dot() {
        let t = QSTemplate::build(&zoo_pin("short diagonal").unwrap()).unwrap();
        let fq = t.materialize(5).unwrap();
        let verts: Vec<Lat> = (0..fq.quiver.len()).map(|k| fq.vertex(k)).collect();
        let j = quiver_json(&verts, &fq.quiver);
        let text = serde_json::to_string(&j).unwrap();
        let (v2, q2) = quiver_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!((v2, q2), (verts.clone(), fq.quiver.clone()));
        let dot = quiver_dot("Q_5", &verts, &fq.quiver);
        assert!(dot_is_well_formed(&dot));
        assert!(!dot_is_well_formed(&dot.replace(';', "")));
    }

    #[test]
    fn y_csv_schema() {
        let y = BTreeMap::from([(lat(0, 1), q(-3, 7)), (lat(2, 0), q(5, 1))]);
        let mut buf = vec![];
        y_csv(&y, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().next(), Some("r_i,r_j,y_num,y_den"));
        assert!(s.contains("0,1,-3,7"));
        assert_eq!(y_from_csv(&s).unwrap(), y);
    }

    #[test]
    fn affine_chart_rows() {
        let w = generate(&zoo_pin("pentagram").unwrap(), 2, 4, 2).unwrap();
        let mut buf = vec![];
        affine_csv(&w, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), w.len() + 1);
        assert!(s.starts_with("i,j,finite,x1,x2"));
    }
}
