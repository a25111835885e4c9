//! Lateral regions `S(Σ)` between a reference loop and the current loop, and
//! the mean-curvature sign check of the exterior support.

use std::f64::consts::PI;

use serde::Serialize;

use super::{axis_point, AxisPoint, AxisProfile, GraphSupport, SupportError, SupportSurface};
use crate::mesh::Vec3;
use crate::quadrature::{adaptive_simpson, composite_gauss_legendre};

/// A closed curve on the support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum LoopSpec {
    /// Axisymmetric kinds: the parallel at parameter `u`. Graph kind: circle
    /// of radius `u`.
    Circle(f64),
    /// Axisymmetric kinds: vertices `(φ, u)` in counter-clockwise order.
    /// Graph kind: planar vertices `(y₁, y₂)`.
    Polygon(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Serialize)]
pub struct LateralRegion {
    pub reference: LoopSpec,
    pub current: LoopSpec,
    /// `|S(D)|_ref`, the support area enclosed by the reference loop.
    pub offset: f64,
}

impl LateralRegion {
    /// Region measured from the reference circle `u = 0`, offset by the cap.
    pub fn from_reference(profile: &AxisProfile, current: LoopSpec) -> Self {
        Self { reference: LoopSpec::Circle(0.0), current, offset: profile.cap_area() }
    }
}

pub const SIMPSON_TOL: f64 = 1e-10;

/// Discrete band of a polygonal loop:
/// `Σ sin(φ_b − φ_a)·[(G(u_a) + G(u_b))/2 − (r_a − r_b)²/4]`.
///
/// On the plane this is the area of the polygon, and for a regular polygon on
/// a parallel it is the area of the polygonal section, so flat polygonal disks
/// are exact discrete critical points. The radial term keeps high-frequency
/// boundary modes from gaining band faster than the chord triangles gain area.
pub fn polygon_band(profile: &AxisProfile, lp: &[[f64; 2]]) -> Result<f64, SupportError> {
    let g: Vec<(f64, f64)> = lp
        .iter()
        .map(|p| Ok((profile.area_antiderivative(p[1])?, profile.jet(p[1])?.r)))
        .collect::<Result<_, SupportError>>()?;
    let n = lp.len();
    Ok((0..n)
        .map(|k| {
            let j = (k + 1) % n;
            let dr = g[k].1 - g[j].1;
            (lp[j][0] - lp[k][0]).sin() * (0.5 * (g[k].0 + g[j].0) - 0.25 * dr * dr)
        })
        .sum())
}

fn loop_band(s: &SupportSurface, lp: &LoopSpec) -> Result<f64, SupportError> {
    match (s, lp) {
        (SupportSurface::Axisymmetric(p), LoopSpec::Circle(u)) => {
            p.jet(*u)?;
            Ok(adaptive_simpson(|v| 2.0 * PI * p.jet(v).map(|j| j.area_density()).unwrap_or(f64::NAN), 0.0, *u, SIMPSON_TOL))
        }
        (SupportSurface::Axisymmetric(p), LoopSpec::Polygon(pts)) => polygon_band(p, pts),
        (SupportSurface::Graph(g), LoopSpec::Circle(r)) => graph_disk_area(g, *r),
        (SupportSurface::Graph(g), LoopSpec::Polygon(pts)) => graph_polygon_area(g, pts),
    }
}

/// `|S(Σ)|` band between the reference and the current loop.
pub fn lateral_area(s: &SupportSurface, region: &LateralRegion) -> Result<f64, SupportError> {
    if region.reference == region.current {
        return Ok(0.0);
    }
    check_nested(s, &region.reference, &region.current)?;
    Ok(loop_band(s, &region.current)? - loop_band(s, &region.reference)?)
}

fn radial_extent(s: &SupportSurface, lp: &LoopSpec) -> (f64, f64) {
    let radius = |p: &[f64; 2]| match s {
        SupportSurface::Axisymmetric(_) => p[1],
        SupportSurface::Graph(_) => p[0].hypot(p[1]),
    };
    match lp {
        LoopSpec::Circle(u) => (*u, *u),
        LoopSpec::Polygon(pts) => pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            let r = radius(p);
            (lo.min(r), hi.max(r))
        }),
    }
}

fn check_nested(s: &SupportSurface, reference: &LoopSpec, current: &LoopSpec) -> Result<(), SupportError> {
    let (_, ref_hi) = radial_extent(s, reference);
    let (cur_lo, _) = radial_extent(s, current);
    if cur_lo < ref_hi {
        return Err(SupportError::Region("current loop is not outside the reference loop".into()));
    }
    Ok(())
}

/// Antiderivative `Q(ρ) = ∫_{ρ₀}^{ρ} √(1 + ψ′²) s ds` used by fan quadrature.
fn graph_q(g: &GraphSupport, rho0: f64, rho: f64) -> f64 {
    adaptive_simpson(|s| g.area_density(s), rho0, rho, SIMPSON_TOL)
}

fn graph_disk_area(g: &GraphSupport, r: f64) -> Result<f64, SupportError> {
    let rho0 = g.inner_radius();
    g.radial_jet(r)?;
    Ok(2.0 * PI * graph_q(g, rho0, r))
}

/// Area over the star-shaped planar polygon, modulo the constant `2π Q(ρ₀)`
/// which cancels in band differences: `∮ Q(ρ(φ)) dφ` edge by edge.
fn graph_polygon_area(g: &GraphSupport, pts: &[[f64; 2]]) -> Result<f64, SupportError> {
    let rho0 = g.inner_radius();
    for p in pts {
        g.radial_jet(p[0].hypot(p[1]))?;
    }
    let n = pts.len();
    let mut total = 0.0;
    for k in 0..n {
        let a = pts[k];
        let b = pts[(k + 1) % n];
        let d = [b[0] - a[0], b[1] - a[1]];
        let f = |lam: f64| {
            let p = [a[0] + lam * d[0], a[1] + lam * d[1]];
            let r2 = p[0] * p[0] + p[1] * p[1];
            let dphi = (p[0] * d[1] - p[1] * d[0]) / r2;
            graph_q(g, rho0, r2.sqrt()) * dphi
        };
        total += composite_gauss_legendre(f, 0.0, 1.0, 4);
    }
    Ok(total)
}

/// Minimum `H(S)` over parallels `u ∈ [u_from, u_to]` (axisymmetric) or
/// circles `ρ ∈ [u_from, u_to]` (graph), sampled at `n` levels.
pub fn mean_curvature_sign_report(s: &SupportSurface, u_from: f64, u_to: f64, n: usize) -> Result<f64, SupportError> {
    let levels: Vec<f64> = (0..=n).map(|k| u_from + (u_to - u_from) * k as f64 / n as f64).collect();
    let samples: Vec<Vec3> = match s {
        SupportSurface::Axisymmetric(p) => {
            levels.iter().map(|&u| axis_point(p, AxisPoint { phi: 0.3, u })).collect::<Result<_, _>>()?
        }
        SupportSurface::Graph(g) => levels
            .iter()
            .map(|&r| g.radial_jet(r).map(|j| Vec3::new(r * 0.3f64.cos(), r * 0.3f64.sin(), j[0])))
            .collect::<Result<_, _>>()?,
    };
    s.min_mean_curvature(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::{Bump, GraphBase};

    #[test]
    fn catenoid_band_from_zero_to_one() {
        let s = SupportSurface::catenoid(1.0);
        let p = s.profile().unwrap().clone();
        let reg = LateralRegion::from_reference(&p, LoopSpec::Circle(1.0));
        let band = lateral_area(&s, &reg).unwrap();
        assert!((band - PI * (1.0 + 1f64.sinh() * 1f64.cosh())).abs() < 1e-9);
        let same = LateralRegion { reference: LoopSpec::Circle(0.5), current: LoopSpec::Circle(0.5), offset: 0.0 };
        assert_eq!(lateral_area(&s, &same).unwrap(), 0.0);
    }

    #[test]
    fn plane_annulus() {
        let s = SupportSurface::plane();
        let reg = LateralRegion { reference: LoopSpec::Circle(1.0), current: LoopSpec::Circle(2.0), offset: PI };
        assert!((lateral_area(&s, &reg).unwrap() - 3.0 * PI).abs() < 1e-10);
        let bad = LateralRegion { reference: LoopSpec::Circle(2.0), current: LoopSpec::Circle(1.0), offset: 0.0 };
        assert!(matches!(lateral_area(&s, &bad), Err(SupportError::Region(_))));
    }

    #[test]
    fn regular_polygon_band_is_polygon_area() {
        let s = SupportSurface::plane();
        let n = 96;
        let pts: Vec<[f64; 2]> = (0..n).map(|k| [2.0 * PI * k as f64 / n as f64, 1.5]).collect();
        let band = polygon_band(s.profile().unwrap(), &pts).unwrap();
        let exact = 0.5 * n as f64 * 1.5 * 1.5 * (2.0 * PI / n as f64).sin();
        assert!((band - exact).abs() < 1e-13);
        let star: Vec<[f64; 2]> = (0..n).map(|k| [2.0 * PI * k as f64 / n as f64, 1.0 + 0.3 * (k % 2) as f64]).collect();
        let shoelace: f64 = (0..n).map(|k| 0.5 * star[k][1] * star[(k + 1) % n][1] * (2.0 * PI / n as f64).sin()).sum();
        assert!((polygon_band(s.profile().unwrap(), &star).unwrap() - shoelace).abs() < 1e-13);
    }

    #[test]
    fn graph_polygon_and_circle_agree() {
        let g = GraphSupport::new(GraphBase::Log { a: 1.0, b: 0.0 }, vec![Bump::new(3.0, 0.5, 0.2)]);
        let s = SupportSurface::Graph(g);
        let poly = |r: f64| LoopSpec::Polygon((0..256).map(|k| {
            let p = 2.0 * PI * k as f64 / 256.0;
            [r * p.cos(), r * p.sin()]
        }).collect());
        let circ = lateral_area(&s, &LateralRegion { reference: LoopSpec::Circle(1.0), current: LoopSpec::Circle(4.0), offset: 0.0 }).unwrap();
        let pol = lateral_area(&s, &LateralRegion { reference: poly(1.0), current: poly(4.0), offset: 0.0 }).unwrap();
        assert!((circ - pol).abs() / circ < 1e-3, "{circ} {pol}");
    }

    #[test]
    fn curvature_bump_support_is_mean_convex_outside() {
        let p = AxisProfile::curvature_bump(1.0, 1.0, vec![Bump::new(0.6, 0.4, 0.15)]).unwrap();
        let s = SupportSurface::Axisymmetric(p);
        assert!(mean_curvature_sign_report(&s, 0.0, 4.0, 400).unwrap() > -1e-9);
        let c = SupportSurface::catenoid(1.0);
        assert!(mean_curvature_sign_report(&c, 0.0, 4.0, 400).unwrap().abs() < 1e-10);
    }
}
