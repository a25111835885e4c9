//! Structured mesh generators: concentric-ring disks and the surfaces obtained
//! by mapping them, plus revolution bands and square sheets.

use std::f64::consts::PI;

use super::{TriSurface, Vec3};

/// Concentric-ring triangulation of the unit disk in polar coordinates.
///
/// Ring `k` (1 ≤ k ≤ rings) holds `6k` vertices at radius `k/rings`; vertex 0
/// is the centre. Triangles are counter-clockwise seen from `+e₃`.
pub fn ring_disk(rings: usize) -> (Vec<(f64, f64)>, Vec<[usize; 3]>) {
    assert!(rings >= 1);
    let mut polar = vec![(0.0, 0.0)];
    let mut start = vec![0usize];
    for k in 1..=rings {
        start.push(polar.len());
        let m = 6 * k;
        for j in 0..m {
            polar.push((k as f64 / rings as f64, 2.0 * PI * j as f64 / m as f64));
        }
    }
    let mut tris = Vec::with_capacity(6 * rings * rings);
    for j in 0..6 {
        tris.push([0, start[1] + j, start[1] + (j + 1) % 6]);
    }
    for k in 2..=rings {
        let (m_in, m_out) = (6 * (k - 1), 6 * k);
        let inner = |i: usize| start[k - 1] + i % m_in;
        let outer = |j: usize| start[k] + j % m_out;
        let (mut i, mut j) = (0, 0);
        while i < m_in || j < m_out {
            let advance_outer = i == m_in || (j < m_out && (j + 1) * m_in <= (i + 1) * m_out);
            if advance_outer {
                tris.push([inner(i), outer(j), outer(j + 1)]);
                j += 1;
            } else {
                tris.push([inner(i), outer(j), inner(i + 1)]);
                i += 1;
            }
        }
    }
    (polar, tris)
}

/// Maps the ring disk through `f(ρ, φ)` with `ρ ∈ [0, 1]`.
pub fn mapped_disk<F: Fn(f64, f64) -> Vec3>(rings: usize, f: F) -> TriSurface {
    let (polar, tris) = ring_disk(rings);
    let verts = polar.iter().map(|&(r, p)| f(r, p)).collect();
    TriSurface::new(verts, tris).expect("ring disk is a valid surface")
}

/// Flat disk of the given radius in the plane `x₃ = height`.
pub fn flat_disk(radius: f64, height: f64, rings: usize) -> TriSurface {
    mapped_disk(rings, |r, p| Vec3::new(radius * r * p.cos(), radius * r * p.sin(), height))
}

/// Upper hemisphere of radius `radius` centred at the origin, boundary on `x₃ = 0`.
pub fn hemisphere(radius: f64, rings: usize) -> TriSurface {
    sphere_cap(radius, 0.5 * PI, rings)
}

/// Spherical cap `{polar angle ≤ max_polar}` around `+e₃`, outward normal.
pub fn sphere_cap(radius: f64, max_polar: f64, rings: usize) -> TriSurface {
    mapped_disk(rings, |r, p| {
        let th = r * max_polar;
        let z = if r == 1.0 && (max_polar - 0.5 * PI).abs() < 1e-15 { 0.0 } else { radius * th.cos() };
        Vec3::new(radius * th.sin() * p.cos(), radius * th.sin() * p.sin(), z)
    })
}

/// Revolution band of `r = m cosh(z/m)` for `z ∈ [z0, z1]`, outward normal.
pub fn catenoid_band(m: f64, z0: f64, z1: f64, n_phi: usize, n_z: usize) -> TriSurface {
    revolution_band(|z| m * (z / m).cosh(), z0, z1, n_phi, n_z)
}

/// Revolution band of `r = f(z)` for `z ∈ [z0, z1]`, outward normal.
pub fn revolution_band<F: Fn(f64) -> f64>(f: F, z0: f64, z1: f64, n_phi: usize, n_z: usize) -> TriSurface {
    let mut verts = Vec::with_capacity(n_phi * (n_z + 1));
    for j in 0..=n_z {
        let z = z0 + (z1 - z0) * j as f64 / n_z as f64;
        let r = f(z);
        for i in 0..n_phi {
            // stagger alternate rows for better triangle shapes
            let p = 2.0 * PI * (i as f64 + 0.5 * (j % 2) as f64) / n_phi as f64;
            verts.push(Vec3::new(r * p.cos(), r * p.sin(), z));
        }
    }
    let id = |i: usize, j: usize| j * n_phi + i % n_phi;
    let mut tris = Vec::with_capacity(2 * n_phi * n_z);
    for j in 0..n_z {
        for i in 0..n_phi {
            if j % 2 == 0 {
                tris.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                tris.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            } else {
                tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
    }
    TriSurface::new(verts, tris).expect("revolution band is a valid surface")
}

/// Square sheet `[0, side]²` split into `n × n` cells.
pub fn square_sheet(side: f64, n: usize) -> TriSurface {
    let h = side / n as f64;
    let mut verts = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            verts.push(Vec3::new(i as f64 * h, j as f64 * h, 0.0));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut tris = Vec::new();
    for j in 0..n {
        for i in 0..n {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriSurface::new(verts, tris).expect("square sheet is a valid surface")
}
