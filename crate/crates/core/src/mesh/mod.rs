//! Triangulated surfaces with boundary.
//!
//! A [`TriSurface`] owns vertex positions, consistently oriented triangles and
//! the boundary loops derived from them. Loops are ordered so that, with the
//! surface normal taken from the triangle orientation, the loop tangent is
//! `ν × μ` for the outward co-normal `μ`.

pub mod curvature;
pub mod generate;
pub mod io;
pub mod remesh;

use std::collections::BTreeMap;

use nalgebra::Vector3;
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

pub const DEFAULT_DEGENERACY_FLOOR: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("triangle {0} references missing vertex {1}")]
    BadIndex(usize, usize),
    #[error("triangle {0} repeats a vertex")]
    RepeatedVertex(usize),
    #[error("edge ({0}, {1}) is shared by more than two triangles or has inconsistent orientation")]
    NonManifoldEdge(usize, usize),
    #[error("vertex {0} has more than one outgoing boundary edge")]
    NonManifoldVertex(usize),
    #[error("connected component containing triangle {0} is closed")]
    ClosedComponent(usize),
    #[error("triangle {index} is degenerate: quality {quality:e} below floor {floor:e}")]
    Degenerate { index: usize, quality: f64, floor: f64 },
    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),
    #[error("surface has no boundary")]
    EmptyBoundary,
    #[error("mesh format error: {0}")]
    Format(String),
}

#[derive(Debug, Clone)]
pub struct TriSurface {
    pub vertices: Vec<Vec3>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_loops: Vec<Vec<usize>>,
    /// Per-vertex flag; true for boundary vertices constrained to the support.
    pub boundary_on_support: Vec<bool>,
    pub degeneracy_floor: f64,
}

impl TriSurface {
    /// Builds a surface, recomputing boundary loops and checking combinatorial
    /// invariants and admissibility (no closed components).
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let boundary_loops = compute_boundary_loops(vertices.len(), &triangles)?;
        let mut boundary_on_support = vec![false; vertices.len()];
        for l in &boundary_loops {
            for &v in l {
                boundary_on_support[v] = true;
            }
        }
        let surf = Self {
            vertices,
            triangles,
            boundary_loops,
            boundary_on_support,
            degeneracy_floor: DEFAULT_DEGENERACY_FLOOR,
        };
        surf.check_admissible()?;
        Ok(surf)
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.degeneracy_floor = floor;
        self
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary_on_support[v]
    }

    fn check_admissible(&self) -> Result<(), MeshError> {
        let comps = self.triangle_components();
        let mut has_boundary = vec![false; comps.count];
        let mut first_tri = vec![usize::MAX; comps.count];
        for (t, tri) in self.triangles.iter().enumerate() {
            let c = comps.labels[t];
            if first_tri[c] == usize::MAX {
                first_tri[c] = t;
            }
            if tri.iter().any(|&v| self.boundary_on_support[v]) {
                has_boundary[c] = true;
            }
        }
        for c in 0..comps.count {
            if !has_boundary[c] {
                return Err(MeshError::ClosedComponent(first_tri[c]));
            }
        }
        Ok(())
    }

    /// Unsigned triangle area without quality checks.
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        triangle_area(&self.vertices[a], &self.vertices[b], &self.vertices[c])
    }

    /// Triangle quality, inradius over longest edge (≈0.2887 for equilateral).
    pub fn triangle_quality(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        triangle_quality(&self.vertices[a], &self.vertices[b], &self.vertices[c])
    }

    /// Fails with the first triangle whose quality is below the floor.
    pub fn check_quality(&self) -> Result<(), MeshError> {
        for t in 0..self.triangles.len() {
            let q = self.triangle_quality(t);
            if !(q >= self.degeneracy_floor) {
                return Err(MeshError::Degenerate { index: t, quality: q, floor: self.degeneracy_floor });
            }
        }
        Ok(())
    }

    /// Total area; fails on a degenerate triangle.
    pub fn area(&self) -> Result<f64, MeshError> {
        self.check_quality()?;
        Ok(self.area_unchecked())
    }

    pub fn area_unchecked(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Length of each boundary loop.
    pub fn boundary_lengths(&self) -> Vec<f64> {
        self.boundary_loops
            .iter()
            .map(|l| {
                (0..l.len())
                    .map(|i| (self.vertices[l[(i + 1) % l.len()]] - self.vertices[l[i]]).norm())
                    .sum()
            })
            .collect()
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary_lengths().iter().sum()
    }

    /// Undirected edges, each listed once with the smaller index first.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut set = std::collections::BTreeSet::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                set.insert((a.min(b), a.max(b)));
            }
        }
        set.into_iter().collect()
    }

    /// Euler characteristic V − E + F over referenced vertices.
    pub fn euler_characteristic(&self) -> i64 {
        let mut used = vec![false; self.vertices.len()];
        for tri in &self.triangles {
            for &v in tri {
                used[v] = true;
            }
        }
        let v = used.iter().filter(|&&u| u).count() as i64;
        v - self.edges().len() as i64 + self.triangles.len() as i64
    }

    /// Connected components by shared vertices.
    pub fn triangle_components(&self) -> Components {
        let mut uf = UnionFind::new(self.vertices.len());
        for tri in &self.triangles {
            uf.union(tri[0], tri[1]);
            uf.union(tri[1], tri[2]);
        }
        let mut root_label = BTreeMap::new();
        let mut labels = Vec::with_capacity(self.triangles.len());
        for tri in &self.triangles {
            let r = uf.find(tri[0]);
            let next = root_label.len();
            labels.push(*root_label.entry(r).or_insert(next));
        }
        Components { count: root_label.len(), labels }
    }

    /// Splits into connected components, each a standalone surface.
    pub fn components(&self) -> Vec<TriSurface> {
        let comps = self.triangle_components();
        (0..comps.count)
            .map(|c| {
                let mut map = vec![usize::MAX; self.vertices.len()];
                let mut verts = Vec::new();
                let mut tris = Vec::new();
                for (t, tri) in self.triangles.iter().enumerate() {
                    if comps.labels[t] != c {
                        continue;
                    }
                    let mut nt = [0; 3];
                    for k in 0..3 {
                        if map[tri[k]] == usize::MAX {
                            map[tri[k]] = verts.len();
                            verts.push(self.vertices[tri[k]]);
                        }
                        nt[k] = map[tri[k]];
                    }
                    tris.push(nt);
                }
                TriSurface::new(verts, tris)
                    .expect("component of a valid surface is valid")
                    .with_floor(self.degeneracy_floor)
            })
            .collect()
    }

    /// Applies `x ↦ λx + shift` to every vertex.
    pub fn transformed(&self, scale: f64, shift: Vec3) -> TriSurface {
        let mut s = self.clone();
        for v in &mut s.vertices {
            *v = *v * scale + shift;
        }
        s
    }

    /// Unnormalised triangle normal (twice the area vector).
    pub fn triangle_normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangles[t];
        (self.vertices[b] - self.vertices[a]).cross(&(self.vertices[c] - self.vertices[a]))
    }

    /// Area-weighted vertex normals (unit length).
    pub fn vertex_normals(&self) -> Vec<Vec3> {
        let mut n = vec![Vec3::zeros(); self.vertices.len()];
        for t in 0..self.triangles.len() {
            let tn = self.triangle_normal(t);
            for &v in &self.triangles[t] {
                n[v] += tn;
            }
        }
        n.iter().map(|v| if v.norm() > 0.0 { v.normalize() } else { *v }).collect()
    }

    /// One-third incident triangle area per vertex.
    pub fn vertex_areas(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.vertices.len()];
        for t in 0..self.triangles.len() {
            let ta = self.triangle_area(t) / 3.0;
            for &v in &self.triangles[t] {
                a[v] += ta;
            }
        }
        a
    }

    /// Sorted vertex adjacency.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.vertices.len()];
        for (a, b) in self.edges() {
            nb[a].push(b);
            nb[b].push(a);
        }
        for l in &mut nb {
            l.sort_unstable();
        }
        nb
    }
}

pub struct Components {
    pub count: usize,
    pub labels: Vec<usize>,
}

pub fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

pub fn triangle_quality(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let la = (b - c).norm();
    let lb = (c - a).norm();
    let lc = (a - b).norm();
    let longest = la.max(lb).max(lc);
    if longest == 0.0 {
        return 0.0;
    }
    let inradius = 2.0 * triangle_area(a, b, c) / (la + lb + lc);
    inradius / longest
}

fn compute_boundary_loops(n_vertices: usize, triangles: &[[usize; 3]]) -> Result<Vec<Vec<usize>>, MeshError> {
    let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for &v in tri {
            if v >= n_vertices {
                return Err(MeshError::BadIndex(t, v));
            }
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(MeshError::RepeatedVertex(t));
        }
        for k in 0..3 {
            let e = (tri[k], tri[(k + 1) % 3]);
            if directed.insert(e, t).is_some() {
                return Err(MeshError::NonManifoldEdge(e.0, e.1));
            }
        }
    }
    let mut next: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b) in directed.keys() {
        if !directed.contains_key(&(b, a)) && next.insert(a, b).is_some() {
            return Err(MeshError::NonManifoldVertex(a));
        }
    }
    let mut loops = Vec::new();
    let mut visited = std::collections::BTreeSet::new();
    for &start in next.keys() {
        if visited.contains(&start) {
            continue;
        }
        let mut lp = vec![start];
        visited.insert(start);
        let mut cur = next[&start];
        while cur != start {
            if !visited.insert(cur) {
                return Err(MeshError::NonManifoldVertex(cur));
            }
            lp.push(cur);
            cur = *next.get(&cur).ok_or(MeshError::NonManifoldVertex(cur))?;
        }
        loops.push(lp);
    }
    Ok(loops)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
