//! Support surfaces `S`: axisymmetric profiles (plane, half-catenoid with a
//! cap, curvature-bump perturbations) and radial graphs.

pub mod bump;
pub mod graph;
pub mod lateral;
pub mod mass;
pub mod profile;

use nalgebra::Matrix2;
use thiserror::Error;

pub use bump::Bump;
pub use graph::{GraphBase, GraphSupport};
pub use profile::{AxisProfile, ProfileJet};

use crate::mesh::Vec3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SupportError {
    #[error("point or parameter {0} is outside the modelled part of the support")]
    OutOfReach(f64),
    #[error("closest-point projection did not converge in {0} steps")]
    Projection(usize),
    #[error("invalid support parameter: {0}")]
    InvalidParameter(String),
    #[error("lateral region error: {0}")]
    Region(String),
    #[error("operation needs a {0} support")]
    WrongKind(&'static str),
}

#[derive(Debug, Clone)]
pub enum SupportSurface {
    Axisymmetric(AxisProfile),
    Graph(GraphSupport),
}

/// Geometry at the closest point on `S`.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceGeometry {
    pub foot: Vec3,
    pub normal: Vec3,
    /// Orthonormal tangent frame in which `shape` is expressed.
    pub frame: (Vec3, Vec3),
    pub shape: Matrix2<f64>,
    pub mean_curvature: f64,
}

/// Position of a support point in axisymmetric coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisPoint {
    pub phi: f64,
    pub u: f64,
}

const NEWTON_STEPS: usize = 60;

impl SupportSurface {
    pub fn plane() -> Self {
        Self::Axisymmetric(AxisProfile::plane())
    }

    /// Half-catenoid of mass `m` with the default cap depth `m`.
    pub fn catenoid(m: f64) -> Self {
        Self::Axisymmetric(AxisProfile::catenoid(m, m, vec![]).expect("positive mass"))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Axisymmetric(p) if p.catenoid_mass().is_some() => "catenoid_extension",
            Self::Axisymmetric(_) => "axisymmetric",
            Self::Graph(_) => "graph",
        }
    }

    pub fn profile(&self) -> Result<&AxisProfile, SupportError> {
        match self {
            Self::Axisymmetric(p) => Ok(p),
            Self::Graph(_) => Err(SupportError::WrongKind("axisymmetric")),
        }
    }

    /// Closest point, normal, shape operator and mean curvature near `p`.
    pub fn eval_geometry(&self, p: Vec3) -> Result<SurfaceGeometry, SupportError> {
        match self {
            Self::Axisymmetric(prof) => {
                let ap = project_axisymmetric(prof, p)?;
                axis_geometry(prof, ap)
            }
            Self::Graph(g) => graph_geometry(g, p),
        }
    }

    /// Minimum sampled mean curvature; see [`lateral::mean_curvature_sign_report`].
    pub fn min_mean_curvature(&self, samples: &[Vec3]) -> Result<f64, SupportError> {
        let mut min = f64::INFINITY;
        for &p in samples {
            min = min.min(self.eval_geometry(p)?.mean_curvature);
        }
        Ok(min)
    }
}

pub fn axis_point(prof: &AxisProfile, ap: AxisPoint) -> Result<Vec3, SupportError> {
    let j = prof.jet(ap.u)?;
    let (s, c) = ap.phi.sin_cos();
    Ok(Vec3::new(j.r * c, j.r * s, j.z))
}

/// `X_u` and `X_uu` at an axisymmetric point.
pub fn axis_derivatives(prof: &AxisProfile, ap: AxisPoint) -> Result<(Vec3, Vec3), SupportError> {
    let j = prof.jet(ap.u)?;
    let (s, c) = ap.phi.sin_cos();
    Ok((Vec3::new(j.r1 * c, j.r1 * s, j.z1), Vec3::new(j.r2 * c, j.r2 * s, j.z2)))
}

pub fn axis_normal(prof: &AxisProfile, ap: AxisPoint) -> Result<Vec3, SupportError> {
    let j = prof.jet(ap.u)?;
    let (s, c) = ap.phi.sin_cos();
    let l = j.speed();
    Ok(Vec3::new(j.z1 * c / l, j.z1 * s / l, -j.r1 / l))
}

pub fn axis_geometry(prof: &AxisProfile, ap: AxisPoint) -> Result<SurfaceGeometry, SupportError> {
    let j = prof.jet(ap.u)?;
    let (s, c) = ap.phi.sin_cos();
    let l = j.speed();
    let e_phi = Vec3::new(-s, c, 0.0);
    let e_u = Vec3::new(j.r1 * c, j.r1 * s, j.z1) / l;
    let (k1, k2) = (j.kappa_parallel(), j.kappa_meridian());
    Ok(SurfaceGeometry {
        foot: Vec3::new(j.r * c, j.r * s, j.z),
        normal: Vec3::new(j.z1 * c / l, j.z1 * s / l, -j.r1 / l),
        frame: (e_phi, e_u),
        shape: Matrix2::new(k1, 0.0, 0.0, k2),
        mean_curvature: k1 + k2,
    })
}

/// Closest point on an axisymmetric support by Newton on the meridian.
pub fn project_axisymmetric(prof: &AxisProfile, p: Vec3) -> Result<AxisPoint, SupportError> {
    let rho = p.x.hypot(p.y);
    let phi = p.y.atan2(p.x);
    if prof.is_plane() {
        return Ok(AxisPoint { phi, u: rho });
    }
    // Start from the height; parameter is the height on z-parametrised profiles.
    let mut u = p.z.max(prof.u_min());
    for step in 0..NEWTON_STEPS {
        let j = prof.jet(u)?;
        let dr = j.r - rho;
        let dz = j.z - p.z;
        let g = dr * j.r1 + dz * j.z1;
        let mut h = j.r1 * j.r1 + j.z1 * j.z1 + dr * j.r2 + dz * j.z2;
        if h <= 0.0 {
            h = j.r1 * j.r1 + j.z1 * j.z1;
        }
        let mut du = -g / h;
        let scale = 1.0 + rho.max(p.z.abs());
        if du.abs() > 0.5 * scale {
            du = 0.5 * scale * du.signum();
        }
        let next = (u + du).max(prof.u_min());
        if (next - u).abs() <= 1e-15 * scale || (step > 0 && g.abs() <= 1e-15 * scale * scale) {
            return Ok(AxisPoint { phi, u: next });
        }
        u = next;
    }
    Err(SupportError::Projection(NEWTON_STEPS))
}

fn graph_geometry(g: &GraphSupport, p: Vec3) -> Result<SurfaceGeometry, SupportError> {
    let y = graph_foot(g, p)?;
    let (f, grad, hess) = g.jet2(y)?;
    let w = (1.0 + grad[0] * grad[0] + grad[1] * grad[1]).sqrt();
    let normal = Vec3::new(grad[0], grad[1], -1.0) / w;
    let x1 = Vec3::new(1.0, 0.0, grad[0]);
    let x2 = Vec3::new(0.0, 1.0, grad[1]);
    // h_ij = ψ_ij / W in coordinates; express in a Gram–Schmidt frame
    let e1 = x1 / x1.norm();
    let c11 = 1.0 / x1.norm();
    let t = x2 - e1 * x2.dot(&e1);
    let tn = t.norm();
    let e2 = t / tn;
    let c12 = -x2.dot(&e1) * c11 / tn;
    let c22 = 1.0 / tn;
    let c = Matrix2::new(c11, c12, 0.0, c22);
    let h = Matrix2::new(hess[0][0], hess[0][1], hess[1][0], hess[1][1]) / w;
    let shape = c.transpose() * h * c;
    Ok(SurfaceGeometry {
        foot: Vec3::new(y[0], y[1], f),
        normal,
        frame: (e1, e2),
        shape,
        mean_curvature: shape.trace(),
    })
}

fn graph_foot(g: &GraphSupport, p: Vec3) -> Result<[f64; 2], SupportError> {
    let mut y = [p.x, p.y];
    let scale = 1.0 + p.x.hypot(p.y);
    for _ in 0..NEWTON_STEPS {
        let (f, gr, he) = g.jet2(y)?;
        let d = f - p.z;
        let grad = [y[0] - p.x + d * gr[0], y[1] - p.y + d * gr[1]];
        let m = Matrix2::new(
            1.0 + gr[0] * gr[0] + d * he[0][0],
            gr[0] * gr[1] + d * he[0][1],
            gr[1] * gr[0] + d * he[1][0],
            1.0 + gr[1] * gr[1] + d * he[1][1],
        );
        let step = m.try_inverse().ok_or(SupportError::Projection(0))? * nalgebra::Vector2::new(grad[0], grad[1]);
        y = [y[0] - step[0], y[1] - step[1]];
        if step.norm() <= 1e-15 * scale {
            return Ok(y);
        }
    }
    Err(SupportError::Projection(NEWTON_STEPS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_projection() {
        let s = SupportSurface::plane();
        let g = s.eval_geometry(Vec3::new(0.3, 0.4, 0.2)).unwrap();
        assert!((g.foot - Vec3::new(0.3, 0.4, 0.0)).norm() < 1e-15);
        assert_eq!(g.mean_curvature, 0.0);
        assert!((g.normal + Vec3::z()).norm() < 1e-15);
    }

    #[test]
    fn catenoid_point_is_minimal_and_projection_idempotent() {
        let s = SupportSurface::catenoid(1.0);
        let p = Vec3::new(1f64.cosh() * 0.6, 1f64.cosh() * 0.8, 1.0);
        let g = s.eval_geometry(p).unwrap();
        assert!((g.foot - p).norm() < 1e-12);
        assert!(g.mean_curvature.abs() < 1e-12);
        assert!((g.shape.trace() - g.mean_curvature).abs() < 1e-15);
        let off = p + g.normal * 0.05;
        let g2 = s.eval_geometry(off).unwrap();
        assert!((g2.foot - p).norm() < 1e-10);
        let g3 = s.eval_geometry(g2.foot).unwrap();
        assert!((g3.foot - g2.foot).norm() < 1e-14);
        assert!((g.normal.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn graph_mean_curvature_matches_symbolic_formula() {
        let g = SupportSurface::Graph(GraphSupport::new(GraphBase::Log { a: 1.0, b: 0.0 }, vec![]));
        let rho: f64 = 10.0;
        let p = Vec3::new(rho * 0.28, rho * 0.96, rho.ln());
        let geo = g.eval_geometry(p).unwrap();
        // H = ψ″/W³ + ψ′/(ρW) for radial graphs, ψ = log ρ
        let (f1, f2) = (1.0 / rho, -1.0 / (rho * rho));
        let w = (1.0 + f1 * f1).sqrt();
        let exact = f2 / w.powi(3) + f1 / (rho * w);
        assert!((geo.mean_curvature - exact).abs() < 1e-14);
        assert!(geo.mean_curvature.abs() > 1e-8);
        let cat = SupportSurface::Graph(GraphSupport::new(GraphBase::CatenoidEnd { m: 1.0 }, vec![]));
        let q = Vec3::new(10.0, 0.0, 10f64.acosh());
        assert!(cat.eval_geometry(q).unwrap().mean_curvature.abs() < 1e-14);
    }

    #[test]
    fn dented_catenoid_has_negative_mean_curvature() {
        let prof = AxisProfile::catenoid(1.0, 1.0, vec![Bump::new(1.0, 0.4, -0.1)]).unwrap();
        let s = SupportSurface::Axisymmetric(prof.clone());
        let samples: Vec<Vec3> =
            (0..200).map(|k| axis_point(&prof, AxisPoint { phi: 0.0, u: k as f64 * 0.01 }).unwrap()).collect();
        assert!(s.min_mean_curvature(&samples).unwrap() < -1e-3);
    }
}
