//! Radial graph supports `x₃ = ψ(|y|)` over the plane, used for exterior-mass
//! and flux computations on asymptotically flat ends.

use serde::{Deserialize, Serialize};

use super::bump::{sum_jet, Bump};
use super::SupportError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GraphBase {
    Flat,
    /// `a log ρ + b`
    Log { a: f64, b: f64 },
    /// `m arccosh(ρ/m)`, the upper end of the catenoid of mass `m`.
    CatenoidEnd { m: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSupport {
    pub base: GraphBase,
    pub bumps: Vec<Bump>,
}

impl GraphSupport {
    pub fn new(base: GraphBase, bumps: Vec<Bump>) -> Self {
        Self { base, bumps }
    }

    /// Smallest radius where the graph is defined.
    pub fn inner_radius(&self) -> f64 {
        match self.base {
            GraphBase::Flat => 0.0,
            GraphBase::Log { .. } => 0.0,
            GraphBase::CatenoidEnd { m } => m,
        }
    }

    /// `ψ`, `ψ′`, `ψ″` as functions of `ρ`.
    pub fn radial_jet(&self, rho: f64) -> Result<[f64; 3], SupportError> {
        if !(rho > self.inner_radius()) && !(matches!(self.base, GraphBase::Flat) && rho >= 0.0) {
            return Err(SupportError::OutOfReach(rho));
        }
        let mut j = match self.base {
            GraphBase::Flat => [0.0; 3],
            GraphBase::Log { a, b } => [a * rho.ln() + b, a / rho, -a / (rho * rho)],
            GraphBase::CatenoidEnd { m } => {
                let s = (rho * rho - m * m).sqrt();
                [m * (rho / m).acosh(), m / s, -m * rho / s.powi(3)]
            }
        };
        let bj = sum_jet(&self.bumps, rho);
        for k in 0..3 {
            j[k] += bj[k];
        }
        Ok(j)
    }

    /// Radial area density `ρ√(1 + ψ′²)`, finite at the origin for log bases.
    pub fn area_density(&self, rho: f64) -> f64 {
        let bump = sum_jet(&self.bumps, rho)[1];
        let slope_rho = match self.base {
            GraphBase::Flat => rho * bump,
            GraphBase::Log { a, .. } => a + rho * bump,
            GraphBase::CatenoidEnd { .. } => match self.radial_jet(rho) {
                Ok(j) => rho * j[1],
                Err(_) => f64::NAN,
            },
        };
        rho.hypot(slope_rho)
    }

    /// `ψ(y)`, `∇ψ` and the Hessian for a point `y` in the plane.
    pub fn jet2(&self, y: [f64; 2]) -> Result<(f64, [f64; 2], [[f64; 2]; 2]), SupportError> {
        let rho = y[0].hypot(y[1]);
        let [f, f1, f2] = self.radial_jet(rho)?;
        if rho == 0.0 {
            return Ok((f, [0.0; 2], [[f2, 0.0], [0.0, f2]]));
        }
        let e = [y[0] / rho, y[1] / rho];
        let grad = [f1 * e[0], f1 * e[1]];
        let mut hess = [[0.0; 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                let delta = if i == k { 1.0 } else { 0.0 };
                hess[i][k] = f2 * e[i] * e[k] + f1 / rho * (delta - e[i] * e[k]);
            }
        }
        Ok((f, grad, hess))
    }
}
