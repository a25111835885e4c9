//! Flux of logarithmic ends, its homotopy invariance, neck size from the
//! outermost free boundary minimal disks, and the flux/neck comparison.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::mesh::{TriSurface, Vec3};
use crate::quadrature::{composite_gauss_legendre, periodic_trapezoid};
use crate::solver::{default_seed, solve_outermost_disk, SolverError, SolverOptions};
use crate::support::{AxisProfile, GraphSupport, SupportError};

#[derive(Debug, Error)]
pub enum FluxError {
    #[error("loop reaches radius {radius}, inside the graphical region of the end (ρ ≥ {inner})")]
    Domain { radius: f64, inner: f64 },
    #[error("support has no catenoidal far end")]
    NoEnd,
    #[error("need at least two distinct fit radii")]
    FitRadii,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Support(#[from] SupportError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Top,
    Bottom,
}

/// Exact graph `x₃ = ψ(|y|)` of an end over `|y| ≥ inner`.
#[derive(Debug, Clone)]
pub enum EndGeometry {
    /// `b ± a arccosh(ρ/a)`, the upper or lower half of `a cosh((x₃ − b)/a)`.
    Catenoid { a: f64, b: f64, side: Side, inner: f64 },
    Graph(GraphSupport),
    Plane { height: f64 },
}

impl EndGeometry {
    /// Far end of an axisymmetric support, and its mirror image for `Bottom`.
    pub fn from_profile(profile: &AxisProfile, side: Side) -> Result<Self, FluxError> {
        if profile.is_plane() {
            return Ok(EndGeometry::Plane { height: 0.0 });
        }
        let (a, b, from) = profile.catenoid_tail().ok_or(FluxError::NoEnd)?;
        let inner = a * ((from - b) / a).cosh();
        let b = if side == Side::Top { b } else { -b };
        Ok(EndGeometry::Catenoid { a, b, side, inner })
    }

    pub fn inner_radius(&self) -> f64 {
        match self {
            EndGeometry::Catenoid { inner, .. } => *inner,
            EndGeometry::Graph(g) => g.inner_radius(),
            EndGeometry::Plane { .. } => 0.0,
        }
    }

    /// `(ψ, ψ′)` at radius `ρ`.
    pub fn radial(&self, rho: f64) -> Result<(f64, f64), FluxError> {
        let inner = self.inner_radius();
        if !(rho > inner) && !(matches!(self, EndGeometry::Plane { .. }) && rho >= 0.0) {
            return Err(FluxError::Domain { radius: rho, inner });
        }
        Ok(match self {
            EndGeometry::Catenoid { a, b, side, .. } => {
                let s = if *side == Side::Top { 1.0 } else { -1.0 };
                let q = rho / a;
                (b + s * a * (q + (q * q - 1.0).sqrt()).ln(), s * a / (rho * rho - a * a).sqrt())
            }
            EndGeometry::Graph(g) => {
                let j = g.radial_jet(rho)?;
                (j[0], j[1])
            }
            EndGeometry::Plane { height } => (*height, 0.0),
        })
    }
}

/// A closed loop in the parameter plane of the end, traversed counter-clockwise.
#[derive(Debug, Clone, Serialize)]
pub enum EndLoop {
    Circle(f64),
    /// `ρ(φ) = r(1 + ε cos(kφ + φ₀))`.
    Star { radius: f64, amplitude: f64, lobes: u32, phase: f64 },
    /// Straight segments between planar vertices.
    Polygon(Vec<[f64; 2]>),
}

#[derive(Debug, Clone)]
pub struct EndDescriptor {
    pub index: usize,
    /// Fitted `ψ ≈ a log|y| + b`.
    pub a: f64,
    pub b: f64,
    pub representative: EndLoop,
    pub side: Side,
    pub geometry: EndGeometry,
}

impl EndDescriptor {
    /// Fits `a, b` on `radii` and uses the circle of the largest radius as the
    /// representative loop.
    pub fn new(index: usize, geometry: EndGeometry, side: Side, radii: &[f64]) -> Result<Self, FluxError> {
        let fit = fit_log_coefficients(&geometry, radii)?;
        let r = radii.iter().copied().fold(0.0, f64::max);
        Ok(Self { index, a: fit.a, b: fit.b, representative: EndLoop::Circle(r), side, geometry })
    }
}

pub const FLUX_NODES: usize = 512;
const SEGMENT_PANELS: usize = 16;

/// `∮_Γ μ`, with `μ` the unit co-normal pointing out of the region enclosed
/// by `Γ`, i.e. toward the end.
pub fn flux(end: &EndGeometry, lp: &EndLoop) -> Result<Vec3, FluxError> {
    // γ(λ) = (y, ψ(|y|)), integrand γ′ × N with N the upward unit normal
    let integrand = |y: [f64; 2], dy: [f64; 2]| -> Result<Vec3, FluxError> {
        let rho = y[0].hypot(y[1]);
        let (_, d) = end.radial(rho)?;
        let grad = [d * y[0] / rho, d * y[1] / rho];
        let w = (1.0 + d * d).sqrt();
        let n = Vec3::new(-grad[0], -grad[1], 1.0) / w;
        let tangent = Vec3::new(dy[0], dy[1], grad[0] * dy[0] + grad[1] * dy[1]);
        Ok(tangent.cross(&n))
    };
    let min_radius = match lp {
        EndLoop::Circle(r) => *r,
        EndLoop::Star { radius, amplitude, .. } => radius * (1.0 - amplitude.abs()),
        EndLoop::Polygon(pts) => polygon_min_radius(pts),
    };
    if !(min_radius > end.inner_radius()) && !matches!(end, EndGeometry::Plane { .. }) {
        return Err(FluxError::Domain { radius: min_radius, inner: end.inner_radius() });
    }
    let mut total = Vec3::zeros();
    match lp {
        EndLoop::Circle(r) => {
            for k in 0..3 {
                total[k] = periodic_trapezoid(
                    |p| {
                        let (s, c) = p.sin_cos();
                        integrand([r * c, r * s], [-r * s, r * c]).map(|v| v[k]).unwrap_or(f64::NAN)
                    },
                    FLUX_NODES,
                );
            }
        }
        EndLoop::Star { radius, amplitude, lobes, phase } => {
            let k_f = *lobes as f64;
            for k in 0..3 {
                total[k] = periodic_trapezoid(
                    |p| {
                        let (s, c) = p.sin_cos();
                        let rho = radius * (1.0 + amplitude * (k_f * p + phase).cos());
                        let drho = -radius * amplitude * k_f * (k_f * p + phase).sin();
                        let y = [rho * c, rho * s];
                        let dy = [drho * c - rho * s, drho * s + rho * c];
                        integrand(y, dy).map(|v| v[k]).unwrap_or(f64::NAN)
                    },
                    FLUX_NODES,
                );
            }
        }
        EndLoop::Polygon(pts) => {
            let n = pts.len();
            for e in 0..n {
                let (a, b) = (pts[e], pts[(e + 1) % n]);
                let dy = [b[0] - a[0], b[1] - a[1]];
                for k in 0..3 {
                    total[k] += composite_gauss_legendre(
                        |l| integrand([a[0] + l * dy[0], a[1] + l * dy[1]], dy).map(|v| v[k]).unwrap_or(f64::NAN),
                        0.0,
                        1.0,
                        SEGMENT_PANELS,
                    );
                }
            }
        }
    }
    Ok(total)
}

fn polygon_min_radius(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    (0..n)
        .map(|e| {
            let (a, b) = (pts[e], pts[(e + 1) % n]);
            let d = [b[0] - a[0], b[1] - a[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let l = if len2 > 0.0 { (-(a[0] * d[0] + a[1] * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
            (a[0] + l * d[0]).hypot(a[1] + l * d[1])
        })
        .fold(f64::INFINITY, f64::min)
}

/// `|Flux(Γ₁) − Flux(Γ₂)|`.
pub fn flux_homotopy_check(end: &EndGeometry, first: &EndLoop, second: &EndLoop) -> Result<f64, FluxError> {
    Ok((flux(end, first)? - flux(end, second)?).norm())
}

/// Flux of a boundary loop of a mesh: `Σ e × n̂` over its edges, the
/// discrete outward co-normal times length.
pub fn mesh_loop_flux(mesh: &TriSurface, lp: &[usize]) -> Vec3 {
    let mut owner = HashMap::new();
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for k in 0..3 {
            owner.insert((tri[k], tri[(k + 1) % 3]), t);
        }
    }
    let n = lp.len();
    let mut total = Vec3::zeros();
    for k in 0..n {
        let (a, b) = (lp[k], lp[(k + 1) % n]);
        let t = owner.get(&(a, b)).or_else(|| owner.get(&(b, a))).copied();
        if let Some(t) = t {
            let nrm = mesh.triangle_normal(t).normalize();
            total += (mesh.vertices[b] - mesh.vertices[a]).cross(&nrm);
        }
    }
    total
}

#[derive(Debug, Clone, Serialize)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    /// `max |ψ − a log ρ − b|` at each fit radius.
    pub residuals: Vec<f64>,
}

/// Least squares of `ψ(ρᵢ)` against `log ρᵢ`; `b` is the mean of `ψ − a log ρ`.
pub fn fit_log_coefficients(end: &EndGeometry, radii: &[f64]) -> Result<LogFit, FluxError> {
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for &r in radii {
        xs.push(r.ln());
        ys.push(end.radial(r)?.0);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return Err(FluxError::FitRadii);
    }
    let a = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / sxx;
    let b = xs.iter().zip(&ys).map(|(x, y)| y - a * x).sum::<f64>() / n;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| (y - a * x - b).abs()).collect();
    Ok(LogFit { a, b, residuals })
}

#[derive(Debug, Clone, Serialize)]
pub struct SideNeck {
    pub disk_area: f64,
    /// `√(4π|D|)`.
    pub gamma: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct NeckReport {
    pub top: Option<SideNeck>,
    pub bottom: Option<SideNeck>,
    pub neck_size: f64,
    /// No side has a free boundary minimal disk.
    pub plane: bool,
}

fn side_neck(profile: &AxisProfile, rings: usize, opts: &SolverOptions) -> Result<Option<SideNeck>, FluxError> {
    let seed = default_seed(profile, rings)?;
    match solve_outermost_disk(profile, seed, opts) {
        Ok(sol) => Ok(Some(SideNeck { disk_area: sol.state.area, gamma: (4.0 * PI * sol.state.area).sqrt(), iterations: sol.iterations })),
        Err(SolverError::NoOutermostDisk { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// `max(γ⁺, γ⁻)` with `γ^± = √(4π|D^±|)`; 0 with the plane flag when both
/// sides collapse.
pub fn neck_size(top: &AxisProfile, bottom: &AxisProfile, rings: usize, opts: &SolverOptions) -> Result<NeckReport, FluxError> {
    let top = side_neck(top, rings, opts)?;
    let bottom = side_neck(bottom, rings, opts)?;
    let neck = [&top, &bottom].iter().filter_map(|s| s.as_ref().map(|s| s.gamma)).fold(0.0, f64::max);
    let plane = top.is_none() && bottom.is_none();
    Ok(NeckReport { top, bottom, neck_size: neck, plane })
}

pub const VERDICT_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Serialize)]
pub struct CharacterizationReport {
    pub fluxes: Vec<[f64; 3]>,
    pub largest_flux: f64,
    pub neck_size: f64,
    /// `largest_flux ≤ neck_size + VERDICT_TOL · max(largest_flux, neck_size) + 1e-9`.
    pub catenoid_or_plane_candidate: bool,
    pub verdict: &'static str,
    /// `m − √(|D|/π)` with `m` from the top end's flux `(0, 0, 2πm)`.
    pub penrose_margin: Option<f64>,
    pub caveat: &'static str,
}

pub fn characterization_report(ends: &[EndDescriptor], neck: &NeckReport) -> Result<CharacterizationReport, FluxError> {
    let mut fluxes = Vec::with_capacity(ends.len());
    for e in ends {
        let f = flux(&e.geometry, &e.representative)?;
        fluxes.push([f.x, f.y, f.z]);
    }
    let largest = fluxes.iter().map(|f| Vec3::new(f[0], f[1], f[2]).norm()).fold(0.0, f64::max);
    let tol = VERDICT_TOL * largest.max(neck.neck_size) + 1e-9;
    let ok = largest <= neck.neck_size + tol;
    let top_flux = ends.iter().zip(&fluxes).find(|(e, _)| e.side == Side::Top).map(|(_, f)| f[2]);
    let penrose_margin = match (top_flux, &neck.top) {
        (Some(fz), Some(d)) => Some(fz / (2.0 * PI) - (d.disk_area / PI).sqrt()),
        (Some(fz), None) => Some(fz / (2.0 * PI)),
        _ => None,
    };
    Ok(CharacterizationReport {
        fluxes,
        largest_flux: largest,
        neck_size: neck.neck_size,
        catenoid_or_plane_candidate: ok,
        verdict: if ok { "catenoid-or-plane candidate" } else { "not a catenoid or plane" },
        penrose_margin,
        caveat: "neck size comes from a stable stationary disk, an upper bound for the least separating area",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::{Bump, GraphBase};

    fn unit_top() -> EndGeometry {
        EndGeometry::from_profile(&AxisProfile::catenoid(1.0, 1.0, vec![]).unwrap(), Side::Top).unwrap()
    }

    #[test]
    fn catenoid_end_flux_is_exact_on_every_loop() {
        let end = unit_top();
        for r in [2.0, 30.0, 500.0] {
            let f = flux(&end, &EndLoop::Circle(r)).unwrap();
            assert!((f - Vec3::new(0.0, 0.0, 2.0 * PI)).norm() < 1e-12, "{f:?}");
        }
        let star = EndLoop::Star { radius: 10.0, amplitude: 0.3, lobes: 3, phase: 0.4 };
        assert!(flux_homotopy_check(&end, &star, &EndLoop::Circle(60.0)).unwrap() < 1e-10);
        let poly = EndLoop::Polygon((0..7).map(|k| {
            let p = 2.0 * PI * k as f64 / 7.0;
            [40.0 * p.cos() + 3.0, 35.0 * p.sin()]
        }).collect());
        assert!(flux_homotopy_check(&end, &poly, &EndLoop::Circle(30.0)).unwrap() < 1e-8);
        let bottom = EndGeometry::from_profile(&AxisProfile::catenoid(1.0, 1.0, vec![]).unwrap(), Side::Bottom).unwrap();
        assert!((flux(&bottom, &EndLoop::Circle(5.0)).unwrap().z + 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn log_graph_flux_closed_form() {
        // ψ = log ρ is not minimal: the flux 2πr/√(r² + 1) depends on the loop
        let end = EndGeometry::Graph(GraphSupport::new(GraphBase::Log { a: 1.0, b: 0.0 }, vec![]));
        for r in [5.0, 50.0] {
            let f = flux(&end, &EndLoop::Circle(r)).unwrap();
            assert!((f.z - 2.0 * PI * r / (r * r + 1.0).sqrt()).abs() < 1e-12);
            assert!(f.x.abs() < 1e-12 && f.y.abs() < 1e-12);
        }
        assert!(matches!(flux(&unit_top(), &EndLoop::Circle(0.5)), Err(FluxError::Domain { .. })));
    }

    #[test]
    fn plane_and_repeated_loop() {
        let plane = EndGeometry::from_profile(&AxisProfile::plane(), Side::Top).unwrap();
        assert!(flux(&plane, &EndLoop::Circle(3.0)).unwrap().norm() < 1e-12);
        let c = EndLoop::Circle(7.0);
        assert_eq!(flux_homotopy_check(&unit_top(), &c, &c).unwrap(), 0.0);
    }

    #[test]
    fn log_fit_recovers_catenoid_coefficients() {
        let fit = fit_log_coefficients(&unit_top(), &[1e2, 1e3, 1e4]).unwrap();
        assert!((fit.a - 1.0).abs() < 1e-4, "{fit:?}");
        assert!((fit.b - 2f64.ln()).abs() < 1e-3);
        let bumped = AxisProfile::curvature_bump(1.0, 1.0, vec![Bump::new(0.6, 0.4, 0.15)]).unwrap();
        let end = EndGeometry::from_profile(&bumped, Side::Top).unwrap();
        let f = flux(&end, &EndLoop::Circle(100.0)).unwrap();
        assert!((f.z - 2.0 * PI * bumped.far_end_mass()).abs() < 1e-10);
        let below = EndGeometry::from_profile(&bumped, Side::Bottom).unwrap();
        let (up, down) = (fit_log_coefficients(&end, &[1e2, 1e3]).unwrap(), fit_log_coefficients(&below, &[1e2, 1e3]).unwrap());
        assert!((up.a + down.a).abs() < 1e-12 && (up.b + down.b).abs() < 1e-12);
    }

    #[test]
    fn mesh_flux_of_flat_disk_is_radial() {
        let mesh = crate::mesh::generate::flat_disk(2.0, 0.0, 6);
        let f = mesh_loop_flux(&mesh, &mesh.boundary_loops[0]);
        assert!(f.norm() < 1e-12);
    }
}
