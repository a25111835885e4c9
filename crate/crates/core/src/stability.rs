//! Stability form `Q(f) = ∫|∇f|² − ∫|h|²f² − cosh t ∮H(S)f² + ∮k f²` on a
//! converged state, its lowest eigenpairs, finite-difference checks of the
//! first and second variation and the second derivative of the area profile.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sprs::{CsMat, SymmetryCheck};
use sprs_ldl::Ldl;
use thiserror::Error;

use crate::energy::{capillary_phi, displaced, term_differences, CapillaryState, DofMap, EnergyError};
use crate::linalg::{csr_mul, dot, SymmetricAssembler};
use crate::mesh::curvature::curvatures;
use crate::mesh::{MeshError, TriSurface, Vec3};
use crate::solver::{stiffness, ProfileSample};
use crate::support::{axis_derivatives, axis_geometry, AxisProfile, SupportError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error("eigen-iteration stagnated after {iterations} iterations (Rayleigh quotient {rayleigh:e})")]
    Stagnation { iterations: usize, rayleigh: f64 },
    #[error("shifted matrix could not be factorised: {0}")]
    Factorisation(String),
    #[error("mesh too coarse for stable second differences: {found} boundary vertices on a loop, need at least {needed}; refine the seed")]
    Resolution { found: usize, needed: usize },
    #[error("direction has {found} values for {expected} vertices")]
    Direction { found: usize, expected: usize },
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Support(#[from] SupportError),
}

impl From<sprs::errors::LinalgError> for StabilityError {
    fn from(e: sprs::errors::LinalgError) -> Self {
        StabilityError::Factorisation(e.to_string())
    }
}

/// Lumped P1 assembly of the stability form.
#[derive(Debug, Clone)]
pub struct JacobiForm {
    pub t: f64,
    /// Cotangent stiffness.
    pub stiffness: CsMat<f64>,
    /// `|h|² A_i` per vertex.
    pub potential: Vec<f64>,
    /// `(k − cosh t H(S)) ℓ_i` at boundary vertices, with `kℓ` the turning angle.
    pub boundary: Vec<f64>,
    /// Lumped mass `A_i`.
    pub mass: Vec<f64>,
}

impl JacobiForm {
    pub fn assemble(state: &CapillaryState, profile: &AxisProfile) -> Result<Self, StabilityError> {
        let c = curvatures(&state.mesh)?;
        let h2 = c.h_norm_sq();
        let cosh_t = state.t.cosh();
        let n = state.mesh.n_vertices();
        let mut boundary = vec![0.0; n];
        for lp in &state.mesh.boundary_loops {
            for &v in lp {
                let hs = match state.coords[v] {
                    Some(ap) => axis_geometry(profile, ap)?.mean_curvature,
                    None => 0.0,
                };
                boundary[v] = c.turning_angle[v] - cosh_t * hs * c.dual_length[v];
            }
        }
        Ok(Self {
            t: state.t,
            stiffness: stiffness(&state.mesh),
            potential: (0..n).map(|i| h2[i] * c.vertex_areas[i]).collect(),
            boundary,
            mass: c.vertex_areas,
        })
    }

    pub fn n(&self) -> usize {
        self.mass.len()
    }

    /// `K − P + B` as one sparse matrix.
    pub fn matrix(&self) -> CsMat<f64> {
        self.shifted(0.0)
    }

    /// `K − P + B − σM`.
    pub fn shifted(&self, sigma: f64) -> CsMat<f64> {
        let mut asm = SymmetricAssembler::new(self.n());
        for (v, (i, j)) in self.stiffness.iter() {
            if i <= j {
                asm.add(i, j, *v);
            }
        }
        for i in 0..self.n() {
            asm.add_diagonal(i, self.boundary[i] - self.potential[i] - sigma * self.mass[i]);
        }
        asm.build()
    }

    pub fn value(&self, f: &[f64]) -> f64 {
        let k = dot(f, &csr_mul(&self.stiffness, f));
        k + (0..self.n()).map(|i| (self.boundary[i] - self.potential[i]) * f[i] * f[i]).sum::<f64>()
    }

    pub fn mass_norm_sq(&self, f: &[f64]) -> f64 {
        (0..self.n()).map(|i| self.mass[i] * f[i] * f[i]).sum()
    }

    pub fn rayleigh(&self, f: &[f64]) -> f64 {
        self.value(f) / self.mass_norm_sq(f)
    }

    /// Gershgorin lower bound for the spectrum of `M^{-1/2}(K − P + B)M^{-1/2}`.
    fn spectral_floor(&self, a: &CsMat<f64>) -> f64 {
        let mut floor = f64::INFINITY;
        for (i, row) in a.outer_iterator().enumerate() {
            let mut diag = 0.0;
            let mut off = 0.0;
            for (j, v) in row.iter() {
                if i == j {
                    diag += v;
                } else {
                    off += v.abs() / (self.mass[i] * self.mass[j]).sqrt();
                }
            }
            floor = floor.min(diag / self.mass[i] - off);
        }
        floor
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Eigenpair {
    pub value: f64,
    /// Normalised to `Σ A_i f_i² = 1`, positive mean.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

pub const RAYLEIGH_TOL: f64 = 1e-8;
const MAX_EIGEN_ITERS: usize = 2000;

fn count_negative(d: &[f64]) -> usize {
    d.iter().filter(|&&x| x < 0.0).count()
}

fn factor(form: &JacobiForm, sigma: f64) -> Result<sprs_ldl::LdlNumeric<f64, usize>, StabilityError> {
    let a = form.shifted(sigma);
    Ok(Ldl::new().check_symmetry(SymmetryCheck::DontCheckSymmetry).numeric(a.view())?)
}

/// The `count` smallest eigenpairs of the generalised problem by shifted
/// inverse iteration with deflation. Shifts move toward the current Rayleigh
/// quotient and are accepted only while the LDLᵀ inertia shows them below the
/// wanted eigenvalue.
pub fn lowest_eigenpairs(form: &JacobiForm, count: usize) -> Result<Vec<Eigenpair>, StabilityError> {
    let n = form.n();
    let floor = form.spectral_floor(&form.matrix());
    let mut found: Vec<Eigenpair> = Vec::new();
    let m_dot = |a: &[f64], b: &[f64]| -> f64 { (0..n).map(|i| form.mass[i] * a[i] * b[i]).sum() };
    for k in 0..count.min(n) {
        let mut sigma = floor - 1e-3 * floor.abs() - 1e-9;
        let mut ldl = factor(form, sigma)?;
        if count_negative(ldl.d()) > 0 {
            return Err(StabilityError::Factorisation("Gershgorin shift is not below the spectrum".into()));
        }
        // constants plus a small deterministic perturbation
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 1e-3 * ((i * 7919) % 101) as f64).collect();
        let mut q_prev = f64::INFINITY;
        let mut done = None;
        for iter in 0..MAX_EIGEN_ITERS {
            for p in &found {
                let c = m_dot(&p.vector, &x);
                for i in 0..n {
                    x[i] -= c * p.vector[i];
                }
            }
            let norm = m_dot(&x, &x).sqrt();
            for v in &mut x {
                *v /= norm;
            }
            let q = form.value(&x);
            let tol = RAYLEIGH_TOL * q.abs().max(1e-6 * floor.abs()).max(1e-12);
            if (q - q_prev).abs() < tol {
                done = Some(Eigenpair { value: q, vector: x.clone(), iterations: iter });
                break;
            }
            q_prev = q;
            if iter % 5 == 4 && q - sigma > 0.0 {
                let mut trial = sigma + 0.5 * (q - sigma);
                for _ in 0..8 {
                    let l = factor(form, trial)?;
                    if count_negative(l.d()) <= k {
                        sigma = trial;
                        ldl = l;
                        break;
                    }
                    trial = sigma + 0.5 * (trial - sigma);
                }
            }
            let rhs: Vec<f64> = (0..n).map(|i| form.mass[i] * x[i]).collect();
            x = ldl.solve(&rhs[..]);
        }
        let Some(mut pair) = done else {
            return Err(StabilityError::Stagnation { iterations: MAX_EIGEN_ITERS, rayleigh: q_prev });
        };
        if pair.vector.iter().zip(&form.mass).map(|(f, m)| f * m).sum::<f64>() < 0.0 {
            for v in &mut pair.vector {
                *v = -*v;
            }
        }
        found.push(pair);
    }
    Ok(found)
}

/// `(κ_t, f_t)`, the first eigenpair of the stability form.
pub fn min_eigenpair(state: &CapillaryState, profile: &AxisProfile) -> Result<Eigenpair, StabilityError> {
    let form = JacobiForm::assemble(state, profile)?;
    Ok(lowest_eigenpairs(&form, 1)?.remove(0))
}

/// Mean edge length, the mesh scale `h` of the stability threshold `−10⁻³/h²`.
pub fn mesh_scale(mesh: &TriSurface) -> f64 {
    crate::solver::mean_edge(mesh)
}

// ---------------------------------------------------------------------------
// finite-difference variation checks

pub const FD_STEPS: [f64; 2] = [1e-4, 1e-5];
/// Index into [`FD_STEPS`] used for first variations (10⁻⁵) and for the
/// second variation (10⁻⁴, where roundoff in second differences is smaller).
pub const FIRST_STEP: usize = 1;
pub const SECOND_STEP: usize = 0;
pub const MIN_LOOP_VERTICES: usize = 12;

/// Derivatives of one functional along a variation path.
#[derive(Debug, Clone, Serialize)]
pub struct FdEntry {
    pub name: &'static str,
    pub analytic: f64,
    /// Central differences at [`FD_STEPS`].
    pub finite_difference: [f64; 2],
    pub relative_error: [f64; 2],
    /// `log₁₀(e(10⁻⁴)/e(10⁻⁵))`; near 2 while truncation dominates.
    pub observed_order: f64,
}

impl FdEntry {
    fn new(name: &'static str, analytic: f64, fd: [f64; 2], scale: f64) -> Self {
        let denom = analytic.abs().max(scale);
        let rel = fd.map(|v| (v - analytic).abs() / denom);
        let order = if rel[1] > 0.0 && rel[0] > 0.0 { (rel[0] / rel[1]).log10() } else { f64::NAN };
        Self { name, analytic, finite_difference: fd, relative_error: rel, observed_order: order }
    }
}

/// First variations of `|Σ|`, `|S(Σ)|` and `J_t`, and the second variation
/// `d²|Σ|/ds² + cos θ d²|S(Σ)|/ds²`.
#[derive(Debug, Clone, Serialize)]
pub struct FdReport {
    pub area_first: FdEntry,
    pub lateral_first: FdEntry,
    pub energy_first: FdEntry,
    pub second: FdEntry,
}

impl FdReport {
    pub fn entries(&self) -> [&FdEntry; 4] {
        [&self.area_first, &self.lateral_first, &self.energy_first, &self.second]
    }
}

/// Reduced direction of the variation with normal speed `f`: interior vertices
/// move by `f ν`, boundary vertices along their meridian by the `X_u`
/// component of `f(ν − cot θ μ)`, which is tangent to the support.
pub fn variation_direction(state: &CapillaryState, profile: &AxisProfile, f: &[f64]) -> Result<Vec<f64>, StabilityError> {
    let n = state.mesh.n_vertices();
    if f.len() != n {
        return Err(StabilityError::Direction { found: f.len(), expected: n });
    }
    let normals = state.mesh.vertex_normals();
    let conormals = outward_conormals(&state.mesh, &normals);
    let cot = {
        let cos = -capillary_phi(state.t).0;
        cos / (1.0 - cos * cos).sqrt()
    };
    let dofs = DofMap::new(&state.coords);
    let mut q = vec![0.0; dofs.len];
    for i in 0..n {
        let o = dofs.offset[i];
        match state.coords[i] {
            None => q[o..o + 3].copy_from_slice((normals[i] * f[i]).as_slice()),
            Some(ap) => {
                let (xu, _) = axis_derivatives(profile, ap)?;
                let x = (normals[i] - conormals[i] * cot) * f[i];
                q[o] = x.dot(&xu) / xu.norm_squared();
            }
        }
    }
    Ok(q)
}

/// Outward unit co-normal at boundary vertices, zero in the interior.
fn outward_conormals(mesh: &TriSurface, normals: &[Vec3]) -> Vec<Vec3> {
    let mut mu = vec![Vec3::zeros(); mesh.n_vertices()];
    for lp in &mesh.boundary_loops {
        let n = lp.len();
        for k in 0..n {
            let (prev, next) = (lp[(k + n - 1) % n], lp[(k + 1) % n]);
            let tau = (mesh.vertices[next] - mesh.vertices[prev]).normalize();
            // loop tangent is ν × μ, so μ = τ × ν
            mu[lp[k]] = tau.cross(&normals[lp[k]]).normalize();
        }
    }
    mu
}

/// Exact first and second derivatives of `(|Σ|, band)` along the path
/// `q + s d` in reduced coordinates, where boundary vertices follow their
/// meridians (velocity `X_u u̇`, acceleration `X_uu u̇²`).
///
/// Returns `[|Σ|′, band′, |Σ|″, band″]` and the sensitivity scales
/// `Σ |∂A_t/∂x_v| |ẋ_v|` and `Σ |∂b_e/∂u_v| |u̇_v|` of the first derivatives,
/// which stay positive when the derivatives themselves vanish.
pub fn path_derivatives(state: &CapillaryState, profile: &AxisProfile, dir: &[f64]) -> Result<([f64; 4], [f64; 2]), StabilityError> {
    let n = state.mesh.n_vertices();
    let dofs = DofMap::new(&state.coords);
    let mut vel = vec![Vec3::zeros(); n];
    let mut acc = vec![Vec3::zeros(); n];
    for i in 0..n {
        let o = dofs.offset[i];
        match state.coords[i] {
            None => vel[i] = Vec3::new(dir[o], dir[o + 1], dir[o + 2]),
            Some(ap) => {
                let (xu, xuu) = axis_derivatives(profile, ap)?;
                vel[i] = xu * dir[o];
                acc[i] = xuu * (dir[o] * dir[o]);
            }
        }
    }
    let (mut a1, mut a2, mut a_abs) = (0.0, 0.0, 0.0);
    for tri in &state.mesh.triangles {
        let [a, b, c] = *tri;
        let x = &state.mesh.vertices;
        let (e1, e2) = (x[b] - x[a], x[c] - x[a]);
        let (v1, v2) = (vel[b] - vel[a], vel[c] - vel[a]);
        let (w1, w2) = (acc[b] - acc[a], acc[c] - acc[a]);
        let nrm = e1.cross(&e2);
        let nd = v1.cross(&e2) + e1.cross(&v2);
        let ndd = w1.cross(&e2) + 2.0 * v1.cross(&v2) + e1.cross(&w2);
        let len = nrm.norm();
        let p = nrm.dot(&nd);
        a1 += 0.5 * p / len;
        a_abs += 0.5 * ((x[c] - x[b]).norm() * vel[a].norm() + e2.norm() * vel[b].norm() + e1.norm() * vel[c].norm());
        a2 += 0.5 * ((nd.norm_squared() + nrm.dot(&ndd)) / len - p * p / len.powi(3));
    }
    let (mut b1, mut b2, mut b_abs) = (0.0, 0.0, 0.0);
    for lp in &state.mesh.boundary_loops {
        let m = lp.len();
        for k in 0..m {
            let (i, j) = (lp[k], lp[(k + 1) % m]);
            let (ci, cj) = (state.coords[i].unwrap(), state.coords[j].unwrap());
            let s = (cj.phi - ci.phi).sin();
            let (ji, jj) = (profile.jet(ci.u)?, profile.jet(cj.u)?);
            let (ui, uj) = (dir[dofs.offset[i]], dir[dofs.offset[j]]);
            let dr = ji.r - jj.r;
            let drd = ji.r1 * ui - jj.r1 * uj;
            let drdd = ji.r2 * ui * ui - jj.r2 * uj * uj;
            b1 += s * (0.5 * (ji.area_density() * ui + jj.area_density() * uj) - 0.5 * dr * drd);
            b_abs += 0.5 * s.abs() * ((ji.area_density() + (dr * ji.r1).abs()) * ui.abs() + (jj.area_density() + (dr * jj.r1).abs()) * uj.abs());
            b2 += s
                * (0.5 * (ji.area_density_derivative() * ui * ui + jj.area_density_derivative() * uj * uj)
                    - 0.5 * (drd * drd + dr * drdd));
        }
    }
    Ok(([a1, b1, a2, b2], [a_abs, b_abs]))
}

fn check_resolution(mesh: &TriSurface) -> Result<(), StabilityError> {
    for lp in &mesh.boundary_loops {
        if lp.len() < MIN_LOOP_VERTICES {
            return Err(StabilityError::Resolution { found: lp.len(), needed: MIN_LOOP_VERTICES });
        }
    }
    Ok(())
}

/// Compares exact path derivatives with central differences along the
/// variation of normal speed `f` (fixed combinatorics).
pub fn fd_variation_check(state: &CapillaryState, profile: &AxisProfile, f: &[f64]) -> Result<FdReport, StabilityError> {
    check_resolution(&state.mesh)?;
    let dir = variation_direction(state, profile, f)?;
    let ([a1, b1, a2, b2], [a_abs, b_abs]) = path_derivatives(state, profile, &dir)?;
    let tanh_t = capillary_phi(state.t).0;
    let mut first_a = [0.0; 2];
    let mut first_b = [0.0; 2];
    let mut second = [0.0; 2];
    for (k, &h) in FD_STEPS.iter().enumerate() {
        let plus = displaced(state, profile, &dir, h)?;
        let minus = displaced(state, profile, &dir, -h)?;
        let (pa, pb) = term_differences(state, &plus, profile)?;
        let (ma, mb) = term_differences(state, &minus, profile)?;
        first_a[k] = (pa - ma) / (2.0 * h);
        first_b[k] = (pb - mb) / (2.0 * h);
        second[k] = ((pa + ma) - tanh_t * (pb + mb)) / (h * h);
    }
    let first_j = [0, 1].map(|k| first_a[k] - tanh_t * first_b[k]);
    let j1 = a1 - tanh_t * b1;
    let j2 = a2 - tanh_t * b2;
    Ok(FdReport {
        // first variations vanish at stationary states (|Σ| at t = 0, J_t
        // always), so errors are measured against the sensitivity scales
        area_first: FdEntry::new("d|Σ|/ds", a1, first_a, a_abs),
        lateral_first: FdEntry::new("d|S(Σ)|/ds", b1, first_b, b_abs),
        energy_first: FdEntry::new("dJ/ds", j1, first_j, a_abs + tanh_t * b_abs),
        second: FdEntry::new("d²|Σ|/ds² + cos θ d²|S(Σ)|/ds²", j2, second, 1e-12),
    })
}

/// Seeded random normal speeds, uniform in `[−1, 1]` per vertex.
pub fn random_direction(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

// ---------------------------------------------------------------------------
// second derivative of the area profile

#[derive(Debug, Clone, Serialize)]
pub struct ComponentTerms {
    pub boundary_length: f64,
    pub euler_characteristic: i64,
    pub h_norm_sq_integral: f64,
    pub support_mean_curvature_integral: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileSecondDerivative {
    pub prediction: f64,
    pub gamma: f64,
    pub weights: Vec<f64>,
    pub components: Vec<ComponentTerms>,
    /// `2π(1 − tanh²t)/Σ|∂Σᵢ|²`, the bound when `H(S) ≥ 0`.
    pub upper_bound: f64,
}

/// Default weights `γᵢ = |∂Σᵢ| / Σⱼ|∂Σⱼ|²`.
pub fn default_weights(lengths: &[f64]) -> Vec<f64> {
    let total: f64 = lengths.iter().map(|l| l * l).sum();
    lengths.iter().map(|l| l / total).collect()
}

fn component_terms(state: &CapillaryState, profile: &AxisProfile) -> Result<Vec<ComponentTerms>, StabilityError> {
    let mesh = &state.mesh;
    let comps = mesh.triangle_components();
    let mut vertex_comp = vec![usize::MAX; mesh.n_vertices()];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for &v in tri {
            vertex_comp[v] = comps.labels[t];
        }
    }
    let c = curvatures(mesh)?;
    let h2 = c.h_norm_sq();
    let mut terms: Vec<ComponentTerms> = (0..comps.count)
        .map(|_| ComponentTerms { boundary_length: 0.0, euler_characteristic: 0, h_norm_sq_integral: 0.0, support_mean_curvature_integral: 0.0 })
        .collect();
    for (k, part) in mesh.components().iter().enumerate() {
        terms[k].euler_characteristic = part.euler_characteristic();
    }
    for v in 0..mesh.n_vertices() {
        if vertex_comp[v] != usize::MAX {
            terms[vertex_comp[v]].h_norm_sq_integral += h2[v] * c.vertex_areas[v];
        }
    }
    for (lp, len) in mesh.boundary_loops.iter().zip(mesh.boundary_lengths()) {
        let k = vertex_comp[lp[0]];
        terms[k].boundary_length += len;
        for &v in lp {
            if let Some(ap) = state.coords[v] {
                terms[k].support_mean_curvature_integral += axis_geometry(profile, ap)?.mean_curvature * c.dual_length[v];
            }
        }
    }
    Ok(terms)
}

/// `γ⁻²(1 − tanh²t) Σγᵢ²(2πχ(Σᵢ) − ½∫|h|² − cosh t ∮H(S))`, with
/// `γ = Σγᵢ|∂Σᵢ|`; `weights = None` uses [`default_weights`].
pub fn profile_second_derivative(state: &CapillaryState, profile: &AxisProfile, weights: Option<&[f64]>) -> Result<ProfileSecondDerivative, StabilityError> {
    let comps = component_terms(state, profile)?;
    let lengths: Vec<f64> = comps.iter().map(|c| c.boundary_length).collect();
    let weights = weights.map(<[f64]>::to_vec).unwrap_or_else(|| default_weights(&lengths));
    let gamma: f64 = weights.iter().zip(&lengths).map(|(g, l)| g * l).sum();
    let sech2 = capillary_phi(state.t).1;
    let cosh_t = state.t.cosh();
    let sum: f64 = comps
        .iter()
        .zip(&weights)
        .map(|(c, g)| {
            g * g * (2.0 * PI * c.euler_characteristic as f64 - 0.5 * c.h_norm_sq_integral - cosh_t * c.support_mean_curvature_integral)
        })
        .sum();
    let total_sq: f64 = lengths.iter().map(|l| l * l).sum();
    Ok(ProfileSecondDerivative {
        prediction: sech2 * sum / (gamma * gamma),
        gamma,
        weights,
        components: comps,
        upper_bound: 2.0 * PI * sech2 / total_sq,
    })
}

/// Discrete derivatives of `υ(s)` on a sweep table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfilePoint {
    pub s: f64,
    pub sigma: f64,
    pub upsilon: f64,
    pub d1: f64,
    pub d2: f64,
    /// `υ(1 − υ′²)`.
    pub convexity: f64,
    /// False at the one-sided endpoints.
    pub interior: bool,
}

/// Three-point differences on the non-uniform `(s, υ)` grid; one-sided at the ends.
pub fn profile_derivatives(table: &[ProfileSample]) -> Vec<ProfilePoint> {
    let n = table.len();
    let point = |k: usize, d1: f64, d2: f64, interior: bool| {
        let p = table[k];
        ProfilePoint { s: p.s, sigma: p.sigma, upsilon: p.upsilon, d1, d2, convexity: p.upsilon * (1.0 - d1 * d1), interior }
    };
    if n < 3 {
        return (0..n).map(|k| point(k, f64::NAN, f64::NAN, false)).collect();
    }
    // derivatives of the parabola through samples (i, j, k), evaluated at `at`
    let parabola = |i: usize, j: usize, k: usize, at: usize| {
        let (x0, x1, x2) = (table[i].s, table[j].s, table[k].s);
        let (y0, y1, y2) = (table[i].upsilon, table[j].upsilon, table[k].upsilon);
        let d01 = (y1 - y0) / (x1 - x0);
        let d12 = (y2 - y1) / (x2 - x1);
        let c2 = (d12 - d01) / (x2 - x0);
        let x = table[at].s;
        (d01 + c2 * (2.0 * x - x0 - x1), 2.0 * c2)
    };
    (0..n)
        .map(|k| {
            let (i, j, l) = if k == 0 { (0, 1, 2) } else if k == n - 1 { (n - 3, n - 2, n - 1) } else { (k - 1, k, k + 1) };
            let (d1, d2) = parabola(i, j, l, k);
            point(k, d1, d2, k > 0 && k < n - 1)
        })
        .collect()
}
