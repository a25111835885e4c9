//! Free energy `J_t = |Σ| − Φ(t)|S(Σ)|` on axisymmetric supports, its exact
//! discrete gradient, the contact residual and the free energy mass.
//!
//! Interior vertices move freely in ℝ³. Each boundary vertex keeps a fixed
//! azimuth `φ` and moves along its meridian through the parameter `u`, so it
//! lies on the support exactly. `|S(Σ)|` is the cap offset plus the discrete
//! band of [`polygon_band`].

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::mesh::{MeshError, TriSurface, Vec3};
use crate::support::lateral::polygon_band;
use crate::support::{axis_derivatives, axis_normal, axis_point, project_axisymmetric, AxisPoint, AxisProfile, SupportError};

/// `Φ(t) = tanh t` and `Φ′(t)`; the only place the capillary function enters.
pub fn capillary_phi(t: f64) -> (f64, f64) {
    let th = t.tanh();
    (th, 1.0 - th * th)
}

/// Nominal capillary angle `arccos(−Φ(t))`.
pub fn capillary_angle(t: f64) -> f64 {
    (-capillary_phi(t).0).acos()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("boundary vertex {vertex} is tangent to the support (sin θ = {sin_theta:e})")]
    Tangency { vertex: usize, sin_theta: f64 },
    #[error("boundary vertex {vertex} is {distance:e} away from the support")]
    OffSupport { vertex: usize, distance: f64 },
    #[error(transparent)]
    Support(#[from] SupportError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// One discrete surface at fixed `t` with its cached energy terms.
#[derive(Debug, Clone, Serialize)]
pub struct CapillaryState {
    pub t: f64,
    #[serde(skip)]
    pub mesh: TriSurface,
    /// Support coordinates of boundary vertices, `None` in the interior.
    #[serde(skip)]
    pub coords: Vec<Option<AxisPoint>>,
    pub offset: f64,
    pub area: f64,
    pub band: f64,
    pub energy: f64,
    pub residual: f64,
}

pub const TOL_PROJ: f64 = 1e-8;
pub const TANGENCY_FLOOR: f64 = 1e-6;

impl CapillaryState {
    /// Attaches a mesh to the support: boundary vertices are projected and
    /// must already lie on `S` within `TOL_PROJ` (relative).
    pub fn new(t: f64, mesh: TriSurface, profile: &AxisProfile) -> Result<Self, EnergyError> {
        let mut coords = vec![None; mesh.n_vertices()];
        let mut mesh = mesh;
        for lp in mesh.boundary_loops.clone() {
            for v in lp {
                let x = mesh.vertices[v];
                let ap = project_axisymmetric(profile, x)?;
                let foot = axis_point(profile, ap)?;
                let dist = (foot - x).norm();
                if dist > TOL_PROJ * (1.0 + x.norm()) {
                    return Err(EnergyError::OffSupport { vertex: v, distance: dist });
                }
                mesh.vertices[v] = foot;
                coords[v] = Some(ap);
            }
        }
        let mut s = Self { t, mesh, coords, offset: profile.cap_area(), area: 0.0, band: 0.0, energy: 0.0, residual: 0.0 };
        s.refresh(profile)?;
        Ok(s)
    }

    /// Recomputes the cached terms.
    pub fn refresh(&mut self, profile: &AxisProfile) -> Result<(), EnergyError> {
        self.area = self.mesh.area_unchecked();
        self.band = self.band(profile)?;
        self.energy = self.area - capillary_phi(self.t).0 * (self.offset + self.band);
        self.residual = contact_residual(self, profile)?;
        Ok(())
    }

    pub fn lateral_area(&self) -> f64 {
        self.offset + self.band
    }

    fn band(&self, profile: &AxisProfile) -> Result<f64, EnergyError> {
        let mut total = 0.0;
        for lp in &self.mesh.boundary_loops {
            total += polygon_band(profile, &self.loop_coords(lp))?;
        }
        Ok(total)
    }

    pub fn loop_coords(&self, lp: &[usize]) -> Vec<[f64; 2]> {
        lp.iter()
            .map(|&v| {
                let c = self.coords[v].expect("boundary vertex has support coordinates");
                [c.phi, c.u]
            })
            .collect()
    }

    /// Same state at another parameter `t`.
    pub fn with_t(&self, t: f64, profile: &AxisProfile) -> Result<Self, EnergyError> {
        let mut s = self.clone();
        s.t = t;
        s.refresh(profile)?;
        Ok(s)
    }
}

/// `J_t = |Σ| − tanh(t)(offset + band)`.
pub fn free_energy(state: &CapillaryState) -> f64 {
    state.area - capillary_phi(state.t).0 * (state.offset + state.band)
}

/// `m_f = sech(t)·√(|Σ|/π)`.
pub fn free_energy_mass(state: &CapillaryState) -> f64 {
    (state.area / PI).sqrt() / state.t.cosh()
}

/// Layout of the reduced coordinates: 3 per interior vertex, 1 (`u`) per
/// boundary vertex, in vertex order.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub offset: Vec<usize>,
    pub len: usize,
}

impl DofMap {
    pub fn new(coords: &[Option<AxisPoint>]) -> Self {
        let mut offset = Vec::with_capacity(coords.len());
        let mut len = 0;
        for c in coords {
            offset.push(len);
            len += if c.is_some() { 1 } else { 3 };
        }
        Self { offset, len }
    }
}

/// Gradient of `J_t` in reduced coordinates and as per-vertex vectors.
#[derive(Debug, Clone)]
pub struct EnergyGradient {
    pub reduced: Vec<f64>,
    /// Interior: `∇_x J`. Boundary: the tangent vector `X_u ∂J/∂u / |X_u|²`.
    pub vectors: Vec<Vec3>,
    pub max_norm: f64,
}

/// Area gradient `Σ ½(x_b − x_c) × n̂` per vertex.
pub fn area_gradient(mesh: &TriSurface) -> Vec<Vec3> {
    let mut g = vec![Vec3::zeros(); mesh.n_vertices()];
    for tri in &mesh.triangles {
        let p = tri.map(|v| mesh.vertices[v]);
        let n = (p[1] - p[0]).cross(&(p[2] - p[0]));
        let nn = n.norm();
        if nn == 0.0 {
            continue;
        }
        let nh = n / nn;
        for k in 0..3 {
            g[tri[k]] += 0.5 * (p[(k + 1) % 3] - p[(k + 2) % 3]).cross(&nh);
        }
    }
    g
}

/// Per boundary vertex, half the sum of `sin Δφ` over its two boundary edges
/// and `Σ ½ sin Δφ (r_i − r_j)`, the coefficients of `G′(u_i)` and `−r′(u_i)`
/// in `∂ band / ∂u_i`.
pub fn boundary_weights(state: &CapillaryState, profile: &AxisProfile) -> Result<Vec<(f64, f64)>, EnergyError> {
    let mut w = vec![(0.0, 0.0); state.mesh.n_vertices()];
    for lp in &state.mesh.boundary_loops {
        let n = lp.len();
        for k in 0..n {
            let (a, b) = (lp[k], lp[(k + 1) % n]);
            let (ca, cb) = (state.coords[a].unwrap(), state.coords[b].unwrap());
            let s = (cb.phi - ca.phi).sin();
            let dr = profile.jet(ca.u)?.r - profile.jet(cb.u)?.r;
            w[a].0 += 0.5 * s;
            w[b].0 += 0.5 * s;
            w[a].1 += 0.5 * s * dr;
            w[b].1 -= 0.5 * s * dr;
        }
    }
    Ok(w)
}

pub fn gradient(state: &CapillaryState, profile: &AxisProfile) -> Result<EnergyGradient, EnergyError> {
    let ga = area_gradient(&state.mesh);
    let normals = state.mesh.vertex_normals();
    let weights = boundary_weights(state, profile)?;
    let dofs = DofMap::new(&state.coords);
    let tanh_t = capillary_phi(state.t).0;
    let mut reduced = vec![0.0; dofs.len];
    let mut vectors = vec![Vec3::zeros(); state.mesh.n_vertices()];
    for i in 0..state.mesh.n_vertices() {
        let o = dofs.offset[i];
        match state.coords[i] {
            None => {
                reduced[o..o + 3].copy_from_slice(ga[i].as_slice());
                vectors[i] = ga[i];
            }
            Some(ap) => {
                let nu_s = axis_normal(profile, ap)?;
                let c = normals[i].dot(&nu_s);
                let sin = (1.0 - c * c).max(0.0).sqrt();
                if sin < TANGENCY_FLOOR {
                    return Err(EnergyError::Tangency { vertex: i, sin_theta: sin });
                }
                let (xu, _) = axis_derivatives(profile, ap)?;
                let jet = profile.jet(ap.u)?;
                let (w, c) = weights[i];
                let d = ga[i].dot(&xu) - tanh_t * (jet.area_density() * w - jet.r1 * c);
                reduced[o] = d;
                vectors[i] = xu * (d / xu.norm_squared());
            }
        }
    }
    let max_norm = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(EnergyGradient { reduced, vectors, max_norm })
}

/// `max |⟨ν(Σ), ν(S)⟩ + tanh t|` over boundary vertices, with area-weighted
/// vertex normals.
pub fn contact_residual(state: &CapillaryState, profile: &AxisProfile) -> Result<f64, EnergyError> {
    let normals = state.mesh.vertex_normals();
    let tanh_t = capillary_phi(state.t).0;
    let mut worst = 0.0_f64;
    for (i, c) in state.coords.iter().enumerate() {
        if let Some(ap) = c {
            let nu_s = axis_normal(profile, *ap)?;
            worst = worst.max((normals[i].dot(&nu_s) + tanh_t).abs());
        }
    }
    Ok(worst)
}

/// Moves the state along a reduced direction: `q ↦ q + α d`. Boundary vertices
/// are re-evaluated on the support from their new `u`.
pub fn displaced(state: &CapillaryState, profile: &AxisProfile, dir: &[f64], alpha: f64) -> Result<CapillaryState, EnergyError> {
    let dofs = DofMap::new(&state.coords);
    let mut next = state.clone();
    for i in 0..state.mesh.n_vertices() {
        let o = dofs.offset[i];
        match state.coords[i] {
            None => {
                next.mesh.vertices[i] += alpha * Vec3::new(dir[o], dir[o + 1], dir[o + 2]);
            }
            Some(ap) => {
                let moved = AxisPoint { phi: ap.phi, u: ap.u + alpha * dir[o] };
                next.mesh.vertices[i] = axis_point(profile, moved)?;
                next.coords[i] = Some(moved);
            }
        }
    }
    next.refresh(profile)?;
    Ok(next)
}

/// `J(b) − J(a)` summed triangle by triangle and edge by edge, for states on
/// the same combinatorics; avoids cancellation between large totals.
pub fn energy_difference(a: &CapillaryState, b: &CapillaryState, profile: &AxisProfile) -> Result<f64, EnergyError> {
    let (d_area, d_band) = term_differences(a, b, profile)?;
    Ok(d_area - capillary_phi(a.t).0 * d_band)
}

/// `(|Σ_b| − |Σ_a|, band_b − band_a)` with the same cancellation-free summation.
pub fn term_differences(a: &CapillaryState, b: &CapillaryState, profile: &AxisProfile) -> Result<(f64, f64), EnergyError> {
    let mut d_area = 0.0;
    for t in 0..a.mesh.n_triangles() {
        d_area += b.mesh.triangle_area(t) - a.mesh.triangle_area(t);
    }
    let mut d_band = 0.0;
    for lp in &a.mesh.boundary_loops {
        let n = lp.len();
        let mut dg = Vec::with_capacity(n);
        let mut radii = Vec::with_capacity(n);
        for &v in lp {
            let (ua, ub) = (a.coords[v].unwrap().u, b.coords[v].unwrap().u);
            dg.push(area_between(profile, ua, ub)?);
            radii.push((profile.jet(ua)?.r, profile.jet(ub)?.r));
        }
        for k in 0..n {
            let (i, j) = (lp[k], lp[(k + 1) % n]);
            let s = (a.coords[j].unwrap().phi - a.coords[i].unwrap().phi).sin();
            let (ri, rj) = (radii[k], radii[(k + 1) % n]);
            let (da, db) = (ri.0 - rj.0, ri.1 - rj.1);
            d_band += s * (0.5 * (dg[k] + dg[(k + 1) % n]) - 0.25 * (db - da) * (db + da));
        }
    }
    Ok((d_area, d_band))
}

/// `G(u₁) − G(u₀)`, integrated directly when the parameters are close.
pub fn area_between(profile: &AxisProfile, u0: f64, u1: f64) -> Result<f64, SupportError> {
    if u0 == u1 {
        return Ok(0.0);
    }
    if (u1 - u0).abs() < 1e-2 {
        profile.jet(u0.min(u1))?;
        return Ok(crate::quadrature::gauss_legendre(|u| profile.jet(u).map(|j| j.area_density()).unwrap_or(f64::NAN), u0, u1));
    }
    Ok(profile.area_antiderivative(u1)? - profile.area_antiderivative(u0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate;
    use crate::support::SupportSurface;

    fn catenoid_disk(t: f64, rings: usize) -> (AxisProfile, CapillaryState) {
        let s = SupportSurface::catenoid(1.0);
        let p = s.profile().unwrap().clone();
        let mesh = generate::flat_disk(t.cosh(), t, rings);
        let st = CapillaryState::new(t, mesh, &p).unwrap();
        (p, st)
    }

    #[test]
    fn flat_disk_at_matching_height_is_critical() {
        let (p, st) = catenoid_disk(1.0, 8);
        let g = gradient(&st, &p).unwrap();
        assert!(g.max_norm < 1e-12, "{}", g.max_norm);
        assert!(st.residual < 1e-14);
        let n = 48.0;
        let c_n = n * (2.0 * PI / n).sin() / (2.0 * PI);
        assert!((free_energy_mass(&st) - c_n.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn energy_of_band_convention() {
        let (p, st) = catenoid_disk(1.0, 16);
        let n = 96.0;
        let c_n = n * (2.0 * PI / n).sin() / (2.0 * PI);
        let band_only = st.area - 1f64.tanh() * st.band;
        assert!((band_only - c_n * PI * (1.0 - 1f64.tanh())).abs() < 1e-12);
        assert!((free_energy(&st) - (band_only - 1f64.tanh() * p.cap_area())).abs() < 1e-12);
    }

    #[test]
    fn mismatched_parameter_residual() {
        let (p, st) = catenoid_disk(1.0, 8);
        let other = st.with_t(1.5, &p).unwrap();
        assert!((other.residual - (1.5f64.tanh() - 1f64.tanh())).abs() < 1e-12);
    }

    #[test]
    fn t_zero_energy_is_area() {
        let (p, st) = catenoid_disk(0.0, 8);
        assert_eq!(free_energy(&st), st.area);
        assert!(gradient(&st, &p).unwrap().max_norm < 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences_off_critical() {
        let (p, st) = catenoid_disk(1.0, 6);
        let dofs = DofMap::new(&st.coords);
        let bump: Vec<f64> = (0..dofs.len).map(|k| 0.05 * ((k as f64 * 1.37).sin())).collect();
        let st = displaced(&st, &p, &bump, 1.0).unwrap();
        let g = gradient(&st, &p).unwrap();
        let h = 1e-6;
        for k in (0..dofs.len).step_by(7) {
            let mut e = vec![0.0; dofs.len];
            e[k] = 1.0;
            let plus = displaced(&st, &p, &e, h).unwrap();
            let minus = displaced(&st, &p, &e, -h).unwrap();
            let fd = (energy_difference(&st, &plus, &p).unwrap() - energy_difference(&st, &minus, &p).unwrap()) / (2.0 * h);
            assert!((fd - g.reduced[k]).abs() < 1e-7, "dof {k}: {fd} vs {}", g.reduced[k]);
            let direct = (plus.energy - minus.energy) / (2.0 * h);
            assert!((direct - fd).abs() < 1e-6);
        }
    }
}
