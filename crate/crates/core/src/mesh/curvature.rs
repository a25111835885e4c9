//! Discrete curvature fields: cotangent mean-curvature vector, angle-defect
//! Gauss curvature, boundary turning angles and a quadric-fit second
//! fundamental form.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Matrix2};

use super::{MeshError, TriSurface, Vec3};

#[derive(Debug, Clone)]
pub struct CurvatureField {
    /// `−Δx` with the cotangent Laplacian over one-third areas.
    pub mean_curvature_vector: Vec<Vec3>,
    /// `⟨H⃗, ν⟩`; positive on spheres with outward normal.
    pub mean_curvature: Vec<f64>,
    /// Angle defect over one-third area at interior vertices, 0 on the boundary.
    pub gauss_curvature: Vec<f64>,
    /// `π − Σθ` at boundary vertices, 0 in the interior.
    pub turning_angle: Vec<f64>,
    /// Half the sum of the two incident boundary edge lengths.
    pub dual_length: Vec<f64>,
    /// Turning angle over dual length at boundary vertices, 0 in the interior.
    pub geodesic_curvature: Vec<f64>,
    /// Second fundamental form in the frame `frames[i]`, w.r.t. `normals[i]`.
    pub second_fundamental_form: Vec<Matrix2<f64>>,
    pub frames: Vec<(Vec3, Vec3)>,
    pub normals: Vec<Vec3>,
    pub vertex_areas: Vec<f64>,
}

impl CurvatureField {
    /// `|h|²` per vertex.
    pub fn h_norm_sq(&self) -> Vec<f64> {
        self.second_fundamental_form.iter().map(|h| h.norm_squared()).collect()
    }
}

/// Per-corner interior angles of each triangle.
pub fn corner_angles(s: &TriSurface) -> Vec<[f64; 3]> {
    s.triangles
        .iter()
        .map(|tri| {
            let mut ang = [0.0; 3];
            for k in 0..3 {
                let p = s.vertices[tri[k]];
                let u = s.vertices[tri[(k + 1) % 3]] - p;
                let v = s.vertices[tri[(k + 2) % 3]] - p;
                ang[k] = u.cross(&v).norm().atan2(u.dot(&v));
            }
            ang
        })
        .collect()
}

/// Cotangent edge weights `½(cot α + cot β)` keyed by sorted vertex pair, in
/// the order of [`TriSurface::edges`].
pub fn cotan_weights(s: &TriSurface) -> Vec<((usize, usize), f64)> {
    let mut w = std::collections::BTreeMap::new();
    for tri in &s.triangles {
        for k in 0..3 {
            let p = s.vertices[tri[k]];
            let (a, b) = (tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let u = s.vertices[a] - p;
            let v = s.vertices[b] - p;
            let cot = u.dot(&v) / u.cross(&v).norm();
            *w.entry((a.min(b), a.max(b))).or_insert(0.0) += 0.5 * cot;
        }
    }
    w.into_iter().collect()
}

pub fn curvatures(s: &TriSurface) -> Result<CurvatureField, MeshError> {
    let n = s.n_vertices();
    let mut incident = vec![0usize; n];
    for tri in &s.triangles {
        for &v in tri {
            incident[v] += 1;
        }
    }
    if let Some(v) = incident.iter().position(|&c| c == 0) {
        return Err(MeshError::IsolatedVertex(v));
    }
    let areas = s.vertex_areas();
    let normals = s.vertex_normals();
    let angles = corner_angles(s);

    let mut lap = vec![Vec3::zeros(); n];
    for ((a, b), w) in cotan_weights(s) {
        let d = s.vertices[b] - s.vertices[a];
        lap[a] += w * d;
        lap[b] -= w * d;
    }
    let mean_curvature_vector: Vec<Vec3> = (0..n).map(|i| -lap[i] / areas[i]).collect();
    let mean_curvature = (0..n).map(|i| mean_curvature_vector[i].dot(&normals[i])).collect();

    let mut angle_sum = vec![0.0; n];
    for (tri, ang) in s.triangles.iter().zip(&angles) {
        for k in 0..3 {
            angle_sum[tri[k]] += ang[k];
        }
    }
    let mut gauss_curvature = vec![0.0; n];
    let mut turning_angle = vec![0.0; n];
    let mut dual_length = vec![0.0; n];
    let mut geodesic_curvature = vec![0.0; n];
    for i in 0..n {
        if !s.is_boundary(i) {
            gauss_curvature[i] = (2.0 * PI - angle_sum[i]) / areas[i];
        } else {
            turning_angle[i] = PI - angle_sum[i];
        }
    }
    for lp in &s.boundary_loops {
        let m = lp.len();
        for k in 0..m {
            let (a, b) = (lp[k], lp[(k + 1) % m]);
            let len = (s.vertices[b] - s.vertices[a]).norm();
            dual_length[a] += 0.5 * len;
            dual_length[b] += 0.5 * len;
        }
    }
    for i in 0..n {
        if s.is_boundary(i) {
            geodesic_curvature[i] = turning_angle[i] / dual_length[i];
        }
    }

    let neighbors = s.vertex_neighbors();
    let mut frames = Vec::with_capacity(n);
    let mut sff = Vec::with_capacity(n);
    for i in 0..n {
        let (frame, h) = quadric_fit(s, &neighbors, i, normals[i]);
        frames.push(frame);
        sff.push(h);
    }

    Ok(CurvatureField {
        mean_curvature_vector,
        mean_curvature,
        gauss_curvature,
        turning_angle,
        dual_length,
        geodesic_curvature,
        second_fundamental_form: sff,
        frames,
        normals,
        vertex_areas: areas,
    })
}

/// Orthonormal tangent frame for a unit normal.
pub fn tangent_frame(n: Vec3) -> (Vec3, Vec3) {
    let seed = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (seed - n * seed.dot(&n)).normalize();
    (e1, n.cross(&e1))
}

fn quadric_fit(s: &TriSurface, nb: &[Vec<usize>], i: usize, normal: Vec3) -> ((Vec3, Vec3), Matrix2<f64>) {
    let mut ring: Vec<usize> = nb[i].clone();
    for &j in &nb[i] {
        ring.extend_from_slice(&nb[j]);
    }
    ring.sort_unstable();
    ring.dedup();
    ring.retain(|&j| j != i);
    let x0 = s.vertices[i];
    let scale = nb[i].iter().map(|&j| (s.vertices[j] - x0).norm()).sum::<f64>() / nb[i].len() as f64;

    let mut n = normal;
    let mut result = (tangent_frame(n), Matrix2::zeros());
    if ring.len() < 5 || scale == 0.0 {
        return result;
    }
    for _pass in 0..2 {
        let (e1, e2) = tangent_frame(n);
        let mut a = DMatrix::zeros(ring.len(), 5);
        let mut rhs = DVector::zeros(ring.len());
        for (r, &j) in ring.iter().enumerate() {
            let d = (s.vertices[j] - x0) / scale;
            let (x, y, z) = (d.dot(&e1), d.dot(&e2), d.dot(&n));
            a[(r, 0)] = x * x;
            a[(r, 1)] = x * y;
            a[(r, 2)] = y * y;
            a[(r, 3)] = x;
            a[(r, 4)] = y;
            rhs[r] = z;
        }
        let Ok(p) = a.svd(true, true).solve(&rhs, 1e-12) else {
            return result;
        };
        let hess = Matrix2::new(2.0 * p[0], p[1], p[1], 2.0 * p[2]) / scale;
        result = ((e1, e2), -hess);
        let tilted = n - e1 * p[3] - e2 * p[4];
        n = tilted.normalize();
    }
    result
}

/// `|Σ_int K A + Σ_∂ (π − Σθ) − 2πχ|`.
pub fn gauss_bonnet_residual(s: &TriSurface) -> Result<f64, MeshError> {
    let c = curvatures(s)?;
    let total: f64 = (0..s.n_vertices())
        .map(|i| if s.is_boundary(i) { c.turning_angle[i] } else { c.gauss_curvature[i] * c.vertex_areas[i] })
        .sum();
    Ok((total - 2.0 * PI * s.euler_characteristic() as f64).abs())
}

/// `|∂Σ|² / (4π|Σ|)` for a connected surface.
pub fn isoperimetric_ratio(s: &TriSurface) -> Result<f64, MeshError> {
    if s.boundary_loops.is_empty() {
        return Err(MeshError::EmptyBoundary);
    }
    let l = s.boundary_length();
    Ok(l * l / (4.0 * PI * s.area()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate;

    #[test]
    fn flat_disk_has_zero_mean_curvature_and_unit_geodesic_curvature() {
        let s = generate::flat_disk(1.0, 0.0, 12);
        let c = curvatures(&s).unwrap();
        for i in 0..s.n_vertices() {
            if s.is_boundary(i) {
                assert!((c.geodesic_curvature[i] - 1.0).abs() < 2e-3);
            } else {
                assert!(c.mean_curvature_vector[i].norm() < 1e-9);
                assert!(c.gauss_curvature[i].abs() < 1e-9);
            }
            assert!(c.second_fundamental_form[i].norm() < 1e-9);
        }
    }

    /// Area-weighted mean of `|f − exact|` over interior vertices.
    fn weighted_error(s: &TriSurface, c: &CurvatureField, f: impl Fn(usize) -> f64) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for i in (0..s.n_vertices()).filter(|&i| !s.is_boundary(i)) {
            num += c.vertex_areas[i] * f(i).abs();
            den += c.vertex_areas[i];
        }
        num / den
    }

    #[test]
    fn sphere_cap_gauss_curvature() {
        let r = 2.0;
        let s = generate::sphere_cap(r, 0.6 * PI, 16);
        let c = curvatures(&s).unwrap();
        // vertices of irregular valence near the pole carry O(1) pointwise error
        assert!(weighted_error(&s, &c, |i| c.gauss_curvature[i] * r * r - 1.0) < 0.02);
        assert!(weighted_error(&s, &c, |i| c.mean_curvature[i] * r - 2.0) < 0.02);
        assert!(weighted_error(&s, &c, |i| c.h_norm_sq()[i] * r * r - 2.0) < 0.05);
        for i in 0..s.n_vertices() {
            if !s.is_boundary(i) {
                assert!((c.gauss_curvature[i] * r * r - 1.0).abs() < 0.1);
            }
        }
    }

    #[test]
    fn catenoid_band_is_minimal_and_negatively_curved() {
        let s = generate::catenoid_band(1.0, 0.0, 1.0, 64, 16);
        let c = curvatures(&s).unwrap();
        let exact_k = |i: usize| -1.0 / s.vertices[i].z.cosh().powi(4);
        for i in 0..s.n_vertices() {
            if !s.is_boundary(i) {
                assert!(c.gauss_curvature[i] < 0.0);
                assert!(c.mean_curvature[i].abs() < 0.02);
                assert!(c.second_fundamental_form[i].trace().abs() < 0.05);
            }
        }
        assert!(weighted_error(&s, &c, |i| c.gauss_curvature[i] - exact_k(i)) < 0.01);
        let h2 = c.h_norm_sq();
        assert!(weighted_error(&s, &c, |i| h2[i] + 2.0 * exact_k(i)) < 0.02);
        assert_eq!(s.euler_characteristic(), 0);
        assert!(gauss_bonnet_residual(&s).unwrap() < 1e-10);
    }

    #[test]
    fn isoperimetric_ratio_of_square_and_disk() {
        let sq = generate::square_sheet(1.0, 4);
        assert!((isoperimetric_ratio(&sq).unwrap() - 4.0 / PI).abs() < 1e-12);
        let d = generate::flat_disk(1.0, 0.0, 16);
        let r = isoperimetric_ratio(&d).unwrap();
        assert!(r >= 1.0 && r - 1.0 < 1e-3);
    }
}
