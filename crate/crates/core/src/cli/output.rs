//! CSV and OBJ writers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rotational::ProfileCurve;

/// A CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn render(&self, precision: usize) -> String {
        match self {
            Cell::Num(v) => format!("{:.*e}", precision.saturating_sub(1), v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

/// Header plus rows, in output order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }
}

/// Writes `bytes` to `path`, or to stdout for `None` or `-`. A closed stdout
/// pipe is not an error.
fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(bytes)?;
            w.flush()?;
            Ok(())
        }
        _ => {
            let mut out = io::stdout().lock();
            match out.write_all(bytes).and_then(|_| out.flush()) {
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(Error::from),
            }
        }
    }
}

/// RFC 4180 CSV with numbers at `precision` significant digits.
pub fn write_csv(table: &Table, precision: usize, out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| c.render(precision)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_to(table: &Table, precision: usize, path: Option<&Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(table, precision, &mut buf)?;
    emit(&buf, path)
}

/// Triangle mesh of a surface of revolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// 1-based vertex indices.
    pub faces: Vec<[usize; 3]>,
}

/// Revolves `(r(t), t)` about the third axis: `angular` vertices per ring and
/// `axial` rings over `[t0, t1]`; open at both ends.
pub fn revolve(profile: &dyn ProfileCurve, t_range: (f64, f64), angular: usize, axial: usize) -> Result<Mesh> {
    let mut vertices = Vec::with_capacity(angular * axial);
    for i in 0..axial {
        let t = t_range.0 + (t_range.1 - t_range.0) * i as f64 / (axial - 1) as f64;
        let r = profile.jet(t)?.r;
        for j in 0..angular {
            let phi = std::f64::consts::TAU * j as f64 / angular as f64;
            vertices.push([r * phi.cos(), r * phi.sin(), t]);
        }
    }
    let idx = |i: usize, j: usize| i * angular + (j % angular) + 1;
    let mut faces = Vec::with_capacity(2 * angular * (axial - 1));
    for i in 0..axial - 1 {
        for j in 0..angular {
            faces.push([idx(i, j), idx(i, j + 1), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i + 1, j)]);
        }
    }
    Ok(Mesh { vertices, faces })
}

pub fn write_obj(mesh: &Mesh, precision: usize, out: &mut impl Write) -> Result<()> {
    let p = precision.saturating_sub(1);
    for v in &mesh.vertices {
        writeln!(out, "v {:.*e} {:.*e} {:.*e}", p, v[0], p, v[1], p, v[2])?;
    }
    for f in &mesh.faces {
        writeln!(out, "f {} {} {}", f[0], f[1], f[2])?;
    }
    Ok(())
}

pub fn write_obj_to(mesh: &Mesh, precision: usize, path: Option<&Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_obj(mesh, precision, &mut buf)?;
    emit(&buf, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotational::CoshProfile;
    use std::collections::HashMap;

    #[test]
    fn header_only_for_no_rows() {
        let mut buf = Vec::new();
        write_csv(&Table::new(&["t", "r"]), 17, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,r\r\n");
    }

    #[test]
    fn doubles_round_trip() {
        let vals = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 1.0 - f64::EPSILON];
        let mut t = Table::new(&["v"]);
        t.rows = vals.iter().map(|&v| vec![Cell::Num(v)]).collect();
        let mut buf = Vec::new();
        write_csv(&t, 17, &mut buf).unwrap();
        let mut rd = csv::Reader::from_reader(buf.as_slice());
        for (rec, v) in rd.records().zip(vals) {
            let back: f64 = rec.unwrap()[0].parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn text_cells_are_quoted() {
        let mut t = Table::new(&["name"]);
        t.rows.push(vec![Cell::Text("a,\"b\"".into())]);
        let mut buf = Vec::new();
        write_csv(&t, 17, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name\r\n\"a,\"\"b\"\"\"\r\n");
    }

    #[test]
    fn mesh_counts_and_topology() {
        let m = revolve(&CoshProfile, (-1.0, 1.0), 64, 64).unwrap();
        assert_eq!(m.vertices.len(), 4096);
        assert_eq!(m.faces.len(), 2 * 64 * 63);
        // every interior edge is shared by two faces; boundary rings by one
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &m.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let boundary = edges.values().filter(|&&c| c == 1).count();
        assert_eq!(boundary, 2 * 64);
        assert!(edges.values().all(|&c| c == 1 || c == 2));
    }
}
