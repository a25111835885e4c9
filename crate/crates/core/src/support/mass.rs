//! Exterior mass `m = lim (2πr)⁻¹ ∮_{|y|=r} y·∇ψ` by periodic trapezoid
//! quadrature on circles and extrapolation `I(r) = m + c r^{−q}`.

use std::f64::consts::PI;

use serde::Serialize;

use super::{SupportError, SupportSurface};
use crate::quadrature::periodic_trapezoid;

pub const ANGULAR_NODES: usize = 512;

#[derive(Debug, Clone, Serialize)]
pub struct MassReport {
    pub mass: f64,
    pub radii: Vec<f64>,
    pub integrals: Vec<f64>,
    pub exponent: f64,
    pub coefficient: f64,
    pub fit_residual: f64,
    pub warnings: Vec<String>,
}

/// `I(r)`, the normalised flux of `y·∇ψ` over the circle of radius `r`.
pub fn mass_integral(s: &SupportSurface, r: f64) -> Result<f64, SupportError> {
    // y·∇ψ = ρ ψ′(ρ) on the circle; for axisymmetric profiles ψ′ = z′/r′ on
    // the outer branch
    let density = match s {
        SupportSurface::Graph(g) => {
            g.radial_jet(r)?;
            periodic_trapezoid(
                |phi| {
                    let y = [r * phi.cos(), r * phi.sin()];
                    g.jet2(y).map(|(_, grad, _)| y[0] * grad[0] + y[1] * grad[1]).unwrap_or(f64::NAN)
                },
                ANGULAR_NODES,
            )
        }
        SupportSurface::Axisymmetric(p) => {
            if p.is_plane() {
                0.0
            } else {
                let u = p.u_at_radius(r)?;
                let j = p.jet(u)?;
                if !(j.r1 > 0.0) {
                    return Err(SupportError::OutOfReach(r));
                }
                let slope = j.z1 / j.r1;
                periodic_trapezoid(|_| r * slope, ANGULAR_NODES)
            }
        }
    };
    Ok(density / (2.0 * PI))
}

/// Extrapolated exterior mass from at least three increasing radii.
pub fn exterior_mass(s: &SupportSurface, radii: &[f64]) -> Result<MassReport, SupportError> {
    if radii.len() < 3 {
        return Err(SupportError::InvalidParameter("exterior mass needs at least three radii".into()));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(SupportError::InvalidParameter("radii must be strictly increasing".into()));
    }
    let integrals = radii.iter().map(|&r| mass_integral(s, r)).collect::<Result<Vec<_>, _>>()?;
    let mut warnings = Vec::new();
    if radii.windows(2).any(|w| w[1] / w[0] < 1.2) {
        warnings.push("radii too close for a reliable extrapolation".into());
    }
    let (mass, coefficient, exponent, fit_residual) = fit_power_tail(radii, &integrals);
    let dev: Vec<f64> = integrals.iter().map(|i| (i - mass).abs()).collect();
    let scale = integrals.iter().fold(0.0_f64, |a, b| a.max(b.abs())).max(1.0);
    if dev.windows(2).any(|w| w[1] > w[0] + 1e-12 * scale) {
        warnings.push("non-monotone fit residual".into());
    }
    Ok(MassReport { mass, radii: radii.to_vec(), integrals, exponent, coefficient, fit_residual, warnings })
}

/// Least-squares fit `I = m + c r^{−q}` with `q ∈ [0.5, 2]` chosen by
/// golden-section search; returns `(m, c, q, rms residual)`.
pub fn fit_power_tail(radii: &[f64], values: &[f64]) -> (f64, f64, f64, f64) {
    let solve = |q: f64| {
        let n = radii.len() as f64;
        let x: Vec<f64> = radii.iter().map(|r| r.powf(-q)).collect();
        let sx: f64 = x.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let sy: f64 = values.iter().sum();
        let sxy: f64 = x.iter().zip(values).map(|(a, b)| a * b).sum();
        let det = n * sxx - sx * sx;
        let (m, c) = if det.abs() > 0.0 { ((sxx * sy - sx * sxy) / det, (n * sxy - sx * sy) / det) } else { (sy / n, 0.0) };
        let sse: f64 = x.iter().zip(values).map(|(xi, yi)| (m + c * xi - yi).powi(2)).sum();
        (m, c, sse)
    };
    let (mut a, mut b) = (0.5_f64, 2.0_f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = solve(x1).2;
    let mut f2 = solve(x2).2;
    for _ in 0..80 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = solve(x1).2;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = solve(x2).2;
        }
    }
    // endpoints can win when the data pin q to a bound
    let best = [0.5 * (a + b), 0.5, 2.0]
        .into_iter()
        .map(|q| (q, solve(q)))
        .min_by(|l, r| l.1 .2.partial_cmp(&r.1 .2).unwrap())
        .unwrap();
    let (q, (m, c, sse)) = best;
    (m, c, q, (sse / radii.len() as f64).sqrt())
}
