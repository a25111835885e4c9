//! ASCII mesh format `capmesh v1`.
//!
//! ```text
//! capmesh v1
//! <vertex count>
//! <triangle count>
//! x y z        (one line per vertex)
//! i j k        (one line per triangle, zero-based)
//! ```
//!
//! Boundary loops are not stored; they are recomputed on load.

use std::fmt::Write as _;

use super::{MeshError, TriSurface, Vec3};

pub const HEADER: &str = "capmesh v1";

pub fn write_capmesh(s: &TriSurface) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "{}", s.vertices.len()).unwrap();
    writeln!(out, "{}", s.triangles.len()).unwrap();
    for v in &s.vertices {
        writeln!(out, "{} {} {}", v.x, v.y, v.z).unwrap();
    }
    for t in &s.triangles {
        writeln!(out, "{} {} {}", t[0], t[1], t[2]).unwrap();
    }
    out
}

pub fn read_capmesh(text: &str) -> Result<TriSurface, MeshError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let fmt = |m: &str| MeshError::Format(m.to_string());
    if lines.next() != Some(HEADER) {
        return Err(fmt("missing `capmesh v1` header"));
    }
    let nv: usize = lines.next().and_then(|l| l.parse().ok()).ok_or_else(|| fmt("bad vertex count"))?;
    let nt: usize = lines.next().and_then(|l| l.parse().ok()).ok_or_else(|| fmt("bad triangle count"))?;
    let mut vertices = Vec::with_capacity(nv);
    for k in 0..nv {
        let line = lines.next().ok_or_else(|| fmt("truncated vertex block"))?;
        let c: Vec<f64> = line
            .split_whitespace()
            .map(|w| w.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| MeshError::Format(format!("bad vertex line {k}")))?;
        if c.len() != 3 {
            return Err(MeshError::Format(format!("vertex line {k} needs 3 coordinates")));
        }
        vertices.push(Vec3::new(c[0], c[1], c[2]));
    }
    let mut triangles = Vec::with_capacity(nt);
    for k in 0..nt {
        let line = lines.next().ok_or_else(|| fmt("truncated triangle block"))?;
        let c: Vec<usize> = line
            .split_whitespace()
            .map(|w| w.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| MeshError::Format(format!("bad triangle line {k}")))?;
        if c.len() != 3 {
            return Err(MeshError::Format(format!("triangle line {k} needs 3 indices")));
        }
        triangles.push([c[0], c[1], c[2]]);
    }
    if lines.next().is_some() {
        return Err(fmt("trailing data after triangle block"));
    }
    TriSurface::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate;

    #[test]
    fn round_trip_is_exact() {
        let s = generate::hemisphere(1.3, 5);
        let text = write_capmesh(&s);
        let back = read_capmesh(&text).unwrap();
        assert_eq!(back.vertices, s.vertices);
        assert_eq!(back.triangles, s.triangles);
        assert_eq!(back.boundary_loops, s.boundary_loops);
        assert_eq!(write_capmesh(&back), text);
    }

    #[test]
    fn rejects_bad_header() {
        assert!(matches!(read_capmesh("mesh\n0\n0\n"), Err(MeshError::Format(_))));
    }
}
