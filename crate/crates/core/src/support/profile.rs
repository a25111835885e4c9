//! Generatrix profiles `u ↦ (r(u), z(u))` of axisymmetric supports.
//!
//! The support point is `X(φ, u) = (r cos φ, r sin φ, z)` and its normal
//! `ν = (z′ e_r − r′ e₃)/L`, `L = √(r′² + z′²)`, points out of the region
//! above the support. Areas of support pieces are measured with
//! `G(u) = ∫₀ᵘ r L du` (per radian), so the reference height is `u = 0`.

use std::f64::consts::PI;

use super::bump::{sum_jet, Bump};
use super::SupportError;
use crate::quadrature::{adaptive_simpson, gauss_legendre};

/// Profile position and its first two `u`-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileJet {
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
    pub z: f64,
    pub z1: f64,
    pub z2: f64,
}

impl ProfileJet {
    pub fn speed(&self) -> f64 {
        self.r1.hypot(self.z1)
    }

    /// Meridian curvature `(r′z″ − z′r″)/L³`.
    pub fn kappa_meridian(&self) -> f64 {
        (self.r1 * self.z2 - self.z1 * self.r2) / self.speed().powi(3)
    }

    /// Parallel curvature `z′/(L r)`; the umbilic limit on the axis.
    pub fn kappa_parallel(&self) -> f64 {
        if self.r > 0.0 {
            self.z1 / (self.speed() * self.r)
        } else {
            self.kappa_meridian()
        }
    }

    pub fn mean_curvature(&self) -> f64 {
        self.kappa_meridian() + self.kappa_parallel()
    }

    /// Area density `r L` per radian, i.e. `G′(u)`.
    pub fn area_density(&self) -> f64 {
        self.r * self.speed()
    }

    /// `G″(u) = r′L + r L′`.
    pub fn area_density_derivative(&self) -> f64 {
        let l = self.speed();
        self.r1 * l + self.r * (self.r1 * self.r2 + self.z1 * self.z2) / l
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Plane,
    Catenoid { m: f64, cap_depth: f64, bumps: Vec<Bump> },
    CurvatureBump { ode: OdeProfile, cap_depth: f64 },
}

/// Profile of the catenoid `a cosh((z − b)/a)` with `G` anchored at `z0`.
#[derive(Debug, Clone, Copy)]
struct CatenoidTail {
    a: f64,
    b: f64,
}

impl CatenoidTail {
    fn jet(&self, z: f64) -> ProfileJet {
        let s = (z - self.b) / self.a;
        ProfileJet { r: self.a * s.cosh(), r1: s.sinh(), r2: s.cosh() / self.a, z, z1: 1.0, z2: 0.0 }
    }

    /// Antiderivative of `r L = a cosh²((z − b)/a)`.
    fn antiderivative(&self, z: f64) -> f64 {
        let s = (z - self.b) / self.a;
        0.5 * self.a * (z - self.b) + 0.25 * self.a * self.a * (2.0 * s).sinh()
    }
}

/// Radius profile obtained from a prescribed mean curvature `H(z)`;
/// quintic Hermite interpolation of an RK4 solution.
#[derive(Debug, Clone)]
struct OdeProfile {
    neck: f64,
    h: f64,
    nodes: Vec<[f64; 3]>,
    tail: CatenoidTail,
}

impl OdeProfile {
    fn rhs(bumps: &[Bump], z: f64, r: f64, p: f64) -> f64 {
        let q = 1.0 + p * p;
        q / r - sum_jet(bumps, z)[0] * q * q.sqrt()
    }

    fn solve(neck: f64, bumps: &[Bump]) -> Result<Self, SupportError> {
        let z_end = bumps.iter().map(|b| b.support().1).fold(0.0, f64::max);
        let w_min = bumps.iter().map(|b| b.width).fold(f64::INFINITY, f64::min);
        let target = (0.01 * neck).min(w_min / 40.0);
        let n = ((z_end / target).ceil() as usize).max(1);
        let h = z_end / n as f64;
        let sub = 10;
        let dz = h / sub as f64;
        let mut r = neck;
        let mut p = 0.0;
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push([r, p, Self::rhs(bumps, 0.0, r, p)]);
        for k in 0..n {
            for j in 0..sub {
                let z = k as f64 * h + j as f64 * dz;
                let f = |z: f64, r: f64, p: f64| (p, Self::rhs(bumps, z, r, p));
                let (k1r, k1p) = f(z, r, p);
                let (k2r, k2p) = f(z + 0.5 * dz, r + 0.5 * dz * k1r, p + 0.5 * dz * k1p);
                let (k3r, k3p) = f(z + 0.5 * dz, r + 0.5 * dz * k2r, p + 0.5 * dz * k2p);
                let (k4r, k4p) = f(z + dz, r + dz * k3r, p + dz * k3p);
                r += dz / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
                p += dz / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
                if !(r > 0.0) {
                    return Err(SupportError::InvalidParameter(
                        "curvature bumps pinch the profile to the axis".into(),
                    ));
                }
            }
            let z = (k + 1) as f64 * h;
            let acc = Self::rhs(bumps, z, r, p);
            if acc <= 0.0 {
                return Err(SupportError::InvalidParameter(
                    "curvature bumps too strong: profile stops flaring".into(),
                ));
            }
            nodes.push([r, p, acc]);
        }
        let a = r / (1.0 + p * p).sqrt();
        let b = z_end - a * (p).asinh();
        Ok(Self { neck, h, nodes, tail: CatenoidTail { a, b } })
    }

    fn z_end(&self) -> f64 {
        self.h * (self.nodes.len() - 1) as f64
    }

    fn jet(&self, z: f64) -> ProfileJet {
        let k = ((z / self.h).floor() as usize).min(self.nodes.len() - 2);
        let h = self.h;
        let t = (z - k as f64 * h) / h;
        let [p0, m0, a0] = self.nodes[k];
        let [p1, m1, a1] = self.nodes[k + 1];
        let coef = [p0, h * m0, h * h * a0, h * h * a1, h * m1, p1];
        let mut v = [0.0; 3];
        for (c, basis) in coef.iter().zip(HERMITE5.iter()) {
            let [b0, b1, b2] = poly_jet(basis, t);
            v[0] += c * b0;
            v[1] += c * b1;
            v[2] += c * b2;
        }
        ProfileJet { r: v[0], r1: v[1] / h, r2: v[2] / (h * h), z, z1: 1.0, z2: 0.0 }
    }
}

/// Quintic Hermite basis in powers of `t`, for coefficients
/// `[p₀, h m₀, h² a₀, h² a₁, h m₁, p₁]`.
const HERMITE5: [[f64; 6]; 6] = [
    [1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
    [0.0, 1.0, 0.0, -6.0, 8.0, -3.0],
    [0.0, 0.0, 0.5, -1.5, 1.5, -0.5],
    [0.0, 0.0, 0.0, 0.5, -1.0, 0.5],
    [0.0, 0.0, 0.0, -4.0, 7.0, -3.0],
    [0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
];

fn poly_jet(c: &[f64; 6], t: f64) -> [f64; 3] {
    let mut v = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for k in (0..6).rev() {
        d2 = d2 * t + 2.0 * d1;
        d1 = d1 * t + v;
        v = v * t + c[k];
    }
    [v, d1, d2]
}

/// Table of `G` at nodes; within a cell `G = G_k + GL8 ∫ r L`.
#[derive(Debug, Clone)]
struct AreaTable {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

/// Cap `r = m(1 + k z²/2)√(1 − z²/d²)` on `z ∈ (−d, 0]`, C²-matched at 0 to a
/// profile with `r(0) = m`, `r′(0) = 0`, `r″(0) = 1/m`.
fn cap_jet(m: f64, d: f64, z: f64) -> ProfileJet {
    let k = 1.0 / (m * m) + 1.0 / (d * d);
    let (p, p1, p2) = (1.0 + 0.5 * k * z * z, k * z, k);
    let q = (1.0 - z * z / (d * d)).sqrt();
    let q1 = -z / (d * d * q);
    let q2 = -1.0 / (d * d * q) - z * z / (d.powi(4) * q.powi(3));
    ProfileJet {
        r: m * p * q,
        r1: m * (p1 * q + p * q1),
        r2: m * (p2 * q + 2.0 * p1 * q1 + p * q2),
        z,
        z1: 1.0,
        z2: 0.0,
    }
}

/// Area of the cap (plus radius bumps in the cap) below `z = 0` via the
/// substitution `z = −d sin α`, which keeps the integrand smooth at the bottom.
fn cap_area(m: f64, d: f64, bumps: &[Bump]) -> f64 {
    let k = 1.0 / (m * m) + 1.0 / (d * d);
    let f = |al: f64| {
        let (s, c) = al.sin_cos();
        let z = -d * s;
        let zal = -d * c;
        let p = 1.0 + 0.5 * k * z * z;
        let bj = sum_jet(bumps, z);
        let r = m * p * c + bj[0];
        let ral = m * (k * z * zal * c - p * s) + bj[1] * zal;
        2.0 * PI * r * ral.hypot(zal)
    };
    adaptive_simpson(f, 0.0, 0.5 * PI, 1e-12)
}

/// An axisymmetric support profile with its area bookkeeping.
#[derive(Debug, Clone)]
pub struct AxisProfile {
    shape: Shape,
    u_min: f64,
    table: Option<AreaTable>,
    /// Closed form above `tail_from`: `G(u) = G(tail_from) + A(u) − A(tail_from)`.
    tail: Option<(CatenoidTail, f64)>,
    cap_area: f64,
}

impl AxisProfile {
    pub fn plane() -> Self {
        Self { shape: Shape::Plane, u_min: 0.0, table: None, tail: None, cap_area: 0.0 }
    }

    /// Half-catenoid of mass `m` over `z ≥ 0` closed by a cap of depth
    /// `cap_depth` below, with optional radius bumps.
    pub fn catenoid(m: f64, cap_depth: f64, bumps: Vec<Bump>) -> Result<Self, SupportError> {
        if !(m > 0.0) || !(cap_depth > 0.0) {
            return Err(SupportError::InvalidParameter("mass and cap depth must be positive".into()));
        }
        for b in &bumps {
            if !(b.width > 0.0) || b.support().0 <= -cap_depth {
                return Err(SupportError::InvalidParameter("bump support must lie above the cap bottom".into()));
            }
        }
        let u_hi = bumps.iter().map(|b| b.support().1).fold(0.0, f64::max);
        let mut p = Self {
            shape: Shape::Catenoid { m, cap_depth, bumps: bumps.clone() },
            u_min: -0.75 * cap_depth,
            table: None,
            tail: None,
            cap_area: 0.0,
        };
        let cap_bumps: Vec<Bump> = bumps.iter().copied().filter(|b| b.support().0 < 0.0).collect();
        if cap_bumps.iter().any(|b| b.support().1 > 0.0) {
            return Err(SupportError::InvalidParameter("a bump may not straddle the cap junction z = 0".into()));
        }
        p.cap_area = cap_area(m, cap_depth, &cap_bumps);
        // GL8 loses accuracy on cells wider than a small fraction of a bump
        let w_min = bumps.iter().map(|b| b.width).fold(f64::INFINITY, f64::min);
        p.build_table(&[p.u_min, 0.0, u_hi], (0.02 * m).min(w_min / 50.0));
        p.tail = Some((CatenoidTail { a: m, b: 0.0 }, u_hi));
        p.verify_positive_radius()?;
        Ok(p)
    }

    /// Profile whose mean curvature is the sum of `bumps` in the height
    /// variable, starting from a neck of radius `neck` at `z = 0`. Mean
    /// curvature is nonnegative wherever the bumps are.
    pub fn curvature_bump(neck: f64, cap_depth: f64, bumps: Vec<Bump>) -> Result<Self, SupportError> {
        if !(neck > 0.0) || !(cap_depth > 0.0) {
            return Err(SupportError::InvalidParameter("neck and cap depth must be positive".into()));
        }
        if bumps.is_empty() || bumps.iter().any(|b| !(b.width > 0.0) || b.support().0 < 0.0) {
            return Err(SupportError::InvalidParameter(
                "curvature bumps need positive width and support in z ≥ 0".into(),
            ));
        }
        let ode = OdeProfile::solve(neck, &bumps)?;
        let z_end = ode.z_end();
        let tail = ode.tail;
        let nodes_ode: Vec<f64> = (0..ode.nodes.len()).map(|k| k as f64 * ode.h).collect();
        let mut p = Self {
            shape: Shape::CurvatureBump { ode, cap_depth },
            u_min: -0.75 * cap_depth,
            table: None,
            tail: None,
            cap_area: cap_area(neck, cap_depth, &[]),
        };
        p.build_table(&[p.u_min, 0.0], 0.02 * neck);
        // ODE nodes in [0, z_end] become table nodes so cells never straddle a
        // Hermite breakpoint
        let base = p.table.take().unwrap();
        let mut nodes: Vec<f64> = base.nodes.iter().copied().filter(|&u| u < 0.0).collect();
        nodes.extend(nodes_ode);
        p.table = Some(p.table_from_nodes(nodes));
        p.tail = Some((tail, z_end));
        Ok(p)
    }

    fn verify_positive_radius(&self) -> Result<(), SupportError> {
        let hi = self.tail.map(|t| t.1).unwrap_or(0.0) + 1.0;
        let n = 2000;
        for k in 0..=n {
            let u = self.u_min + (hi - self.u_min) * k as f64 / n as f64;
            if !(self.jet_unchecked(u).r > 0.0) {
                return Err(SupportError::InvalidParameter(format!("profile radius not positive at u = {u}")));
            }
        }
        Ok(())
    }

    fn build_table(&mut self, breaks: &[f64], spacing: f64) {
        let mut nodes = Vec::new();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let n = ((b - a) / spacing).ceil().max(1.0) as usize;
            for k in 0..n {
                nodes.push(a + (b - a) * k as f64 / n as f64);
            }
        }
        nodes.push(breaks.iter().copied().fold(f64::MIN, f64::max));
        nodes.dedup();
        self.table = Some(self.table_from_nodes(nodes));
    }

    fn table_from_nodes(&self, nodes: Vec<f64>) -> AreaTable {
        let zero = nodes.iter().position(|&u| u == 0.0).expect("table contains the reference u = 0");
        let mut values = vec![0.0; nodes.len()];
        let w = |u: f64| self.jet_unchecked(u).area_density();
        for k in zero + 1..nodes.len() {
            values[k] = values[k - 1] + gauss_legendre(w, nodes[k - 1], nodes[k]);
        }
        for k in (0..zero).rev() {
            values[k] = values[k + 1] - gauss_legendre(w, nodes[k], nodes[k + 1]);
        }
        AreaTable { nodes, values }
    }

    pub fn is_plane(&self) -> bool {
        matches!(self.shape, Shape::Plane)
    }

    /// Exact catenoid mass if the profile is an unperturbed half-catenoid.
    pub fn catenoid_mass(&self) -> Option<f64> {
        match &self.shape {
            Shape::Catenoid { m, bumps, .. } if bumps.iter().all(|b| b.support().1 <= 0.0) => Some(*m),
            _ => None,
        }
    }

    /// Mass of the far catenoid end (`a` of the tail), 0 for the plane.
    pub fn far_end_mass(&self) -> f64 {
        match &self.shape {
            Shape::Plane => 0.0,
            _ => self.tail.map(|t| t.0.a).unwrap_or(0.0),
        }
    }

    /// `(a, b, z_from)`: above `z_from` the profile is the catenoid
    /// `a cosh((z − b)/a)`.
    pub fn catenoid_tail(&self) -> Option<(f64, f64, f64)> {
        self.tail.map(|(c, from)| (c.a, c.b, from))
    }

    /// Radius of the profile at `u = 0`, i.e. of the reference circle.
    pub fn neck_radius(&self) -> f64 {
        self.jet_unchecked(0.0).r
    }

    pub fn u_min(&self) -> f64 {
        self.u_min
    }

    /// Area of the support below the reference parameter `u = 0`.
    pub fn cap_area(&self) -> f64 {
        self.cap_area
    }

    /// Upper end of the non-closed-form region (0 if none).
    pub fn perturbed_until(&self) -> f64 {
        self.tail.map(|t| t.1).unwrap_or(0.0)
    }

    pub fn jet(&self, u: f64) -> Result<ProfileJet, SupportError> {
        if !(u >= self.u_min) || !u.is_finite() {
            return Err(SupportError::OutOfReach(u));
        }
        Ok(self.jet_unchecked(u))
    }

    fn jet_unchecked(&self, u: f64) -> ProfileJet {
        match &self.shape {
            Shape::Plane => ProfileJet { r: u, r1: 1.0, r2: 0.0, z: 0.0, z1: 0.0, z2: 0.0 },
            Shape::Catenoid { m, cap_depth, bumps } => {
                let mut j = if u >= 0.0 { CatenoidTail { a: *m, b: 0.0 }.jet(u) } else { cap_jet(*m, *cap_depth, u) };
                let bj = sum_jet(bumps, u);
                j.r += bj[0];
                j.r1 += bj[1];
                j.r2 += bj[2];
                j
            }
            Shape::CurvatureBump { ode, cap_depth } => {
                if u < 0.0 {
                    cap_jet(ode.neck, *cap_depth, u)
                } else if u <= ode.z_end() {
                    ode.jet(u)
                } else {
                    ode.tail.jet(u)
                }
            }
        }
    }

    /// Support area between `u = 0` and `u`, per radian.
    pub fn area_antiderivative(&self, u: f64) -> Result<f64, SupportError> {
        if !(u >= self.u_min) || !u.is_finite() {
            return Err(SupportError::OutOfReach(u));
        }
        if self.is_plane() {
            return Ok(0.5 * u * u);
        }
        if let Some((tail, from)) = self.tail {
            if u > from {
                let g0 = self.table_value(from);
                return Ok(g0 + tail.antiderivative(u) - tail.antiderivative(from));
            }
        }
        Ok(self.table_value(u))
    }

    fn table_value(&self, u: f64) -> f64 {
        let t = self.table.as_ref().expect("non-planar profiles carry a table");
        let k = match t.nodes.binary_search_by(|x| x.partial_cmp(&u).unwrap()) {
            Ok(k) => return t.values[k],
            Err(0) => 0,
            Err(k) => (k - 1).min(t.nodes.len() - 1),
        };
        t.values[k] + gauss_legendre(|s| self.jet_unchecked(s).area_density(), t.nodes[k], u)
    }

    /// Outer-branch parameter with `r(u) = rho`, searched over `u ≥ 0`.
    pub fn u_at_radius(&self, rho: f64) -> Result<f64, SupportError> {
        if self.is_plane() {
            return Ok(rho);
        }
        let mut hi = 1.0_f64.max(self.perturbed_until());
        let mut guard = 0;
        while self.jet_unchecked(hi).r < rho {
            hi *= 2.0;
            guard += 1;
            if guard > 200 {
                return Err(SupportError::OutOfReach(rho));
            }
        }
        let mut lo = hi * 0.5;
        if self.jet_unchecked(lo).r > rho {
            lo = 0.0;
        }
        if self.jet_unchecked(lo).r > rho {
            return Err(SupportError::OutOfReach(rho));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.jet_unchecked(mid).r < rho {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
