//! Topology-preserving remeshing: edge split, interior edge collapse and
//! Delaunay-style flips. Boundary vertices carry support coordinates
//! `[φ, u]` and stay on the support through `eval_boundary`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::{MeshError, TriSurface, Vec3};

#[derive(Debug, Clone, Copy)]
pub struct RemeshOptions {
    pub target_edge: f64,
    pub split_above: f64,
    pub collapse_below: f64,
    pub passes: usize,
}

impl RemeshOptions {
    pub fn new(target_edge: f64) -> Self {
        Self { target_edge, split_above: 1.5, collapse_below: 0.5, passes: 3 }
    }
}

/// Working triangle soup with per-vertex boundary coordinates.
pub struct RemeshInput<'a> {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_coords: Vec<Option<[f64; 2]>>,
    pub eval_boundary: &'a dyn Fn([f64; 2]) -> Vec3,
}

pub struct RemeshOutput {
    pub surface: TriSurface,
    pub boundary_coords: Vec<Option<[f64; 2]>>,
    pub splits: usize,
    pub collapses: usize,
    pub flips: usize,
}

fn wrap_angle(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d < -PI {
        d += 2.0 * PI;
    }
    d
}

fn directed_map(tris: &[[usize; 3]]) -> BTreeMap<(usize, usize), usize> {
    let mut m = BTreeMap::new();
    for (t, tri) in tris.iter().enumerate() {
        for k in 0..3 {
            m.insert((tri[k], tri[(k + 1) % 3]), t);
        }
    }
    m
}

fn opposite(tri: &[usize; 3], a: usize, b: usize) -> usize {
    *tri.iter().find(|&&v| v != a && v != b).unwrap()
}

fn normal(v: &[Vec3], t: &[usize; 3]) -> Vec3 {
    (v[t[1]] - v[t[0]]).cross(&(v[t[2]] - v[t[0]]))
}

fn angle_at(v: &[Vec3], p: usize, a: usize, b: usize) -> f64 {
    let u = v[a] - v[p];
    let w = v[b] - v[p];
    u.cross(&w).norm().atan2(u.dot(&w))
}

pub fn remesh(mut input: RemeshInput, opts: RemeshOptions, floor: f64) -> Result<RemeshOutput, MeshError> {
    let (mut splits, mut collapses, mut flips) = (0, 0, 0);
    for _ in 0..opts.passes {
        splits += split_pass(&mut input, opts.split_above * opts.target_edge);
        collapses += collapse_pass(&mut input, opts.collapse_below * opts.target_edge, floor);
        flips += flip_pass(&mut input);
    }
    let RemeshInput { vertices, triangles, boundary_coords, .. } = input;
    // compact away vertices no longer referenced
    let mut used = vec![false; vertices.len()];
    for t in &triangles {
        for &v in t {
            used[v] = true;
        }
    }
    let mut map = vec![usize::MAX; vertices.len()];
    let mut verts = Vec::new();
    let mut coords = Vec::new();
    for i in 0..vertices.len() {
        if used[i] {
            map[i] = verts.len();
            verts.push(vertices[i]);
            coords.push(boundary_coords[i]);
        }
    }
    let tris = triangles.iter().map(|t| [map[t[0]], map[t[1]], map[t[2]]]).collect();
    let surface = TriSurface::new(verts, tris)?.with_floor(floor);
    Ok(RemeshOutput { surface, boundary_coords: coords, splits, collapses, flips })
}

fn split_pass(m: &mut RemeshInput, max_len: f64) -> usize {
    let directed = directed_map(&m.triangles);
    let mut long: Vec<(usize, usize)> = directed
        .keys()
        .filter(|&&(a, b)| a < b || !directed.contains_key(&(b, a)))
        .filter(|&&(a, b)| (m.vertices[a] - m.vertices[b]).norm() > max_len)
        .copied()
        .collect();
    long.sort();
    let mut touched = vec![false; m.triangles.len()];
    let mut count = 0;
    for (a, b) in long {
        let t1 = directed[&(a, b)];
        let t2 = directed.get(&(b, a)).copied();
        if touched[t1] || t2.is_some_and(|t| touched[t]) {
            continue;
        }
        let mid = match t2 {
            None => {
                let (Some(ca), Some(cb)) = (m.boundary_coords[a], m.boundary_coords[b]) else {
                    continue;
                };
                let c = [ca[0] + 0.5 * wrap_angle(cb[0] - ca[0]), 0.5 * (ca[1] + cb[1])];
                m.boundary_coords.push(Some(c));
                (m.eval_boundary)(c)
            }
            Some(_) => {
                m.boundary_coords.push(None);
                0.5 * (m.vertices[a] + m.vertices[b])
            }
        };
        let mi = m.vertices.len();
        m.vertices.push(mid);
        let c = opposite(&m.triangles[t1], a, b);
        m.triangles[t1] = [a, mi, c];
        m.triangles.push([mi, b, c]);
        touched[t1] = true;
        if let Some(t2) = t2 {
            let d = opposite(&m.triangles[t2], a, b);
            m.triangles[t2] = [b, mi, d];
            m.triangles.push([mi, a, d]);
            touched[t2] = true;
        }
        count += 1;
    }
    count
}

fn collapse_pass(m: &mut RemeshInput, min_len: f64, floor: f64) -> usize {
    let mut count = 0;
    loop {
        let directed = directed_map(&m.triangles);
        let mut nbrs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(a, b) in directed.keys() {
            nbrs.entry(a).or_default().push(b);
            nbrs.entry(b).or_default().push(a);
        }
        let mut on_boundary = vec![false; m.vertices.len()];
        for &(a, b) in directed.keys() {
            if !directed.contains_key(&(b, a)) {
                on_boundary[a] = true;
                on_boundary[b] = true;
            }
        }
        let mut candidate = None;
        for (&(a, b), _) in directed.range(..) {
            if a > b || on_boundary[a] || on_boundary[b] {
                continue;
            }
            if (m.vertices[a] - m.vertices[b]).norm() >= min_len {
                continue;
            }
            let mut na = nbrs[&a].clone();
            let mut nb = nbrs[&b].clone();
            na.sort_unstable();
            na.dedup();
            nb.sort_unstable();
            nb.dedup();
            let common = na.iter().filter(|v| nb.binary_search(v).is_ok()).count();
            if common != 2 {
                continue;
            }
            let mid = 0.5 * (m.vertices[a] + m.vertices[b]);
            let ok = m.triangles.iter().all(|t| {
                let has_a = t.contains(&a);
                let has_b = t.contains(&b);
                if has_a && has_b || !(has_a || has_b) {
                    return true;
                }
                let p = t.map(|v| if v == a || v == b { mid } else { m.vertices[v] });
                let n_old = normal(&m.vertices, t);
                let n_new = (p[1] - p[0]).cross(&(p[2] - p[0]));
                let q = super::triangle_quality(&p[0], &p[1], &p[2]);
                n_old.dot(&n_new) > 0.0 && q > floor * 10.0
            });
            if ok {
                candidate = Some((a, b, mid));
                break;
            }
        }
        let Some((a, b, mid)) = candidate else {
            return count;
        };
        m.vertices[a] = mid;
        m.triangles.retain(|t| !(t.contains(&a) && t.contains(&b)));
        for t in &mut m.triangles {
            for v in t.iter_mut() {
                if *v == b {
                    *v = a;
                }
            }
        }
        count += 1;
    }
}

fn flip_pass(m: &mut RemeshInput) -> usize {
    let mut count = 0;
    for _sweep in 0..4 {
        let directed = directed_map(&m.triangles);
        let mut flipped_here = 0;
        let mut touched = vec![false; m.triangles.len()];
        let mut created = std::collections::BTreeSet::new();
        let edges: Vec<(usize, usize)> = directed.keys().filter(|&&(a, b)| a < b).copied().collect();
        for (a, b) in edges {
            let (Some(&t1), Some(&t2)) = (directed.get(&(a, b)), directed.get(&(b, a))) else {
                continue;
            };
            if touched[t1] || touched[t2] {
                continue;
            }
            let c = opposite(&m.triangles[t1], a, b);
            let d = opposite(&m.triangles[t2], a, b);
            if directed.contains_key(&(c, d)) || directed.contains_key(&(d, c)) || created.contains(&(c.min(d), c.max(d))) {
                continue;
            }
            let sum = angle_at(&m.vertices, c, a, b) + angle_at(&m.vertices, d, a, b);
            if sum <= PI + 1e-9 {
                continue;
            }
            let n1 = [c, a, d];
            let n2 = [d, b, c];
            let ref_n = normal(&m.vertices, &m.triangles[t1]) + normal(&m.vertices, &m.triangles[t2]);
            if normal(&m.vertices, &n1).dot(&ref_n) <= 0.0 || normal(&m.vertices, &n2).dot(&ref_n) <= 0.0 {
                continue;
            }
            m.triangles[t1] = n1;
            m.triangles[t2] = n2;
            touched[t1] = true;
            touched[t2] = true;
            created.insert((c.min(d), c.max(d)));
            flipped_here += 1;
        }
        count += flipped_here;
        if flipped_here == 0 {
            break;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate;

    fn input_for(s: &TriSurface, radius: f64) -> (Vec<Option<[f64; 2]>>, impl Fn([f64; 2]) -> Vec3) {
        let coords = (0..s.n_vertices())
            .map(|i| {
                s.is_boundary(i).then(|| {
                    let v = s.vertices[i];
                    [v.y.atan2(v.x), radius]
                })
            })
            .collect();
        (coords, |c: [f64; 2]| Vec3::new(c[1] * c[0].cos(), c[1] * c[0].sin(), 0.0))
    }

    #[test]
    fn remeshing_preserves_euler_characteristic() {
        let s = generate::flat_disk(1.0, 0.0, 6);
        let chi = s.euler_characteristic();
        let (coords, eval) = input_for(&s, 1.0);
        let out = remesh(
            RemeshInput { vertices: s.vertices.clone(), triangles: s.triangles.clone(), boundary_coords: coords, eval_boundary: &eval },
            RemeshOptions::new(0.08),
            1e-3,
        )
        .unwrap();
        assert!(out.splits > 0);
        assert_eq!(out.surface.euler_characteristic(), chi);
        assert!((out.surface.area().unwrap() - s.area().unwrap()).abs() < 0.05);
        for (i, c) in out.boundary_coords.iter().enumerate() {
            assert_eq!(c.is_some(), out.surface.is_boundary(i));
            if c.is_some() {
                assert!((out.surface.vertices[i].norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coarsening_preserves_euler_characteristic() {
        let s = generate::catenoid_band(1.0, 0.0, 1.0, 24, 12);
        let chi = s.euler_characteristic();
        let coords = vec![None; s.n_vertices()];
        let eval = |_c: [f64; 2]| Vec3::zeros();
        let out = remesh(
            RemeshInput { vertices: s.vertices.clone(), triangles: s.triangles.clone(), boundary_coords: coords, eval_boundary: &eval },
            RemeshOptions { passes: 1, ..RemeshOptions::new(0.5) },
            1e-3,
        )
        .unwrap();
        assert!(out.collapses > 0);
        assert_eq!(out.surface.euler_characteristic(), chi);
    }
}
