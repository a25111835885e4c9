//! Minimisation of `J_t` at fixed `t` by preconditioned gradient descent with
//! an Armijo line search, the `t = 0` free boundary solve and warm-started
//! continuation sweeps.

use std::f64::consts::PI;

use log::{debug, info, warn};
use serde::Serialize;
use sprs::CsMat;
use thiserror::Error;

use crate::axisym::axisym_solve;
use crate::energy::{
    capillary_phi, displaced, energy_difference, free_energy_mass, gradient, CapillaryState, DofMap, EnergyError,
};
use crate::linalg::{conjugate_gradient, csr_mul, dot, SymmetricAssembler};
use crate::mesh::curvature::{cotan_weights, isoperimetric_ratio};
use crate::mesh::remesh::{remesh, RemeshInput, RemeshOptions};
use crate::mesh::{generate, MeshError, TriSurface, Vec3, DEFAULT_DEGENERACY_FLOOR};
use crate::support::{axis_derivatives, axis_normal, axis_point, AxisPoint, AxisProfile};

#[derive(Debug, Clone, Serialize)]
pub struct SolverOptions {
    pub tol_grad: f64,
    pub tol_angle: f64,
    pub max_iters: usize,
    pub shrink: f64,
    pub armijo: f64,
    pub remesh: bool,
    /// Target edge length for remeshing; the seed's mean edge when `None`.
    pub target_edge: Option<f64>,
    pub degeneracy_floor: f64,
    pub seed: u64,
    /// `t = 0` solves whose area drops below this fraction of the seed area
    /// are reported as collapsed.
    pub collapse_fraction: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_grad: 1e-7,
            tol_angle: 1e-4,
            max_iters: 4000,
            shrink: 0.5,
            armijo: 1e-4,
            remesh: false,
            target_edge: None,
            degeneracy_floor: DEFAULT_DEGENERACY_FLOOR,
            seed: 0,
            collapse_fraction: 0.01,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("tol_grad", self.tol_grad),
            ("tol_angle", self.tol_angle),
            ("armijo", self.armijo),
            ("degeneracy_floor", self.degeneracy_floor),
            ("collapse_fraction", self.collapse_fraction),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(format!("{name} must be positive"));
            }
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err("shrink must lie in (0, 1)".into());
        }
        if self.max_iters == 0 {
            return Err("max_iters must be positive".into());
        }
        if let Some(e) = self.target_edge {
            if !(e > 0.0) {
                return Err("target_edge must be positive".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("no convergence after {iterations} iterations (gradient {grad_norm:e}, residual {residual:e})")]
    NonConvergence { iterations: usize, grad_norm: f64, residual: f64, state: Box<CapillaryState> },
    #[error("mesh degenerated: {0}")]
    Degenerate(#[from] MeshError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error("no outermost disk: area collapsed to {area:e} from {seed_area:e}")]
    NoOutermostDisk { area: f64, seed_area: f64 },
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub state: CapillaryState,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Flat disk on the parallel `u` of the profile.
pub fn flat_seed(profile: &AxisProfile, u: f64, rings: usize) -> Result<TriSurface, SolverError> {
    let j = profile.jet(u).map_err(EnergyError::from)?;
    Ok(generate::flat_disk(j.r, j.z, rings))
}

/// Default `t = 0` seed: a hemisphere for the plane, otherwise a flat disk
/// slightly above the reference parallel.
pub fn default_seed(profile: &AxisProfile, rings: usize) -> Result<TriSurface, SolverError> {
    if profile.is_plane() {
        Ok(generate::hemisphere(1.0, rings))
    } else {
        flat_seed(profile, 0.1 * profile.neck_radius(), rings)
    }
}

/// `H¹`-type metric `K + εM` on vertex positions, pulled back to reduced
/// coordinates through `δx = X_u δu` on the boundary.
struct Metric {
    k: CsMat<f64>,
    mass: Vec<f64>,
    eps: f64,
    xu: Vec<Option<Vec3>>,
    dofs: DofMap,
}

/// P1 stiffness (cotangent) matrix; positive semidefinite for any
/// nondegenerate triangulation.
pub(crate) fn stiffness(mesh: &TriSurface) -> CsMat<f64> {
    let mut asm = SymmetricAssembler::new(mesh.n_vertices());
    for ((a, b), w) in cotan_weights(mesh) {
        asm.add(a, b, -w);
        asm.add_diagonal(a, w);
        asm.add_diagonal(b, w);
    }
    asm.build()
}

impl Metric {
    fn new(state: &CapillaryState, profile: &AxisProfile) -> Result<Self, SolverError> {
        let k = stiffness(&state.mesh);
        let mass = state.mesh.vertex_areas();
        let eps = PI / state.area.max(f64::MIN_POSITIVE);
        let xu = state
            .coords
            .iter()
            .map(|c| c.map(|ap| axis_derivatives(profile, ap).map(|d| d.0)).transpose())
            .collect::<Result<Vec<_>, _>>()
            .map_err(EnergyError::from)?;
        Ok(Self { k, mass, eps, xu, dofs: DofMap::new(&state.coords) })
    }

    fn embed(&self, q: &[f64]) -> [Vec<f64>; 3] {
        let n = self.xu.len();
        let mut x = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for i in 0..n {
            let o = self.dofs.offset[i];
            let v = match self.xu[i] {
                None => Vec3::new(q[o], q[o + 1], q[o + 2]),
                Some(xu) => xu * q[o],
            };
            for c in 0..3 {
                x[c][i] = v[c];
            }
        }
        x
    }

    fn apply(&self, q: &[f64], out: &mut [f64]) {
        let x = self.embed(q);
        let y: Vec<Vec<f64>> = (0..3)
            .map(|c| {
                let mut y = csr_mul(&self.k, &x[c]);
                for i in 0..y.len() {
                    y[i] += self.eps * self.mass[i] * x[c][i];
                }
                y
            })
            .collect();
        for i in 0..self.xu.len() {
            let o = self.dofs.offset[i];
            let v = Vec3::new(y[0][i], y[1][i], y[2][i]);
            match self.xu[i] {
                None => out[o..o + 3].copy_from_slice(v.as_slice()),
                Some(xu) => out[o] = xu.dot(&v),
            }
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dofs.len];
        for i in 0..self.xu.len() {
            let kii = self.k.get(i, i).copied().unwrap_or(0.0) + self.eps * self.mass[i];
            let o = self.dofs.offset[i];
            match self.xu[i] {
                None => d[o..o + 3].fill(kii),
                Some(xu) => d[o] = kii * xu.norm_squared(),
            }
        }
        d
    }
}

fn admissible_step(old: &TriSurface, new: &TriSurface, floor: f64) -> bool {
    (0..old.n_triangles()).all(|t| {
        old.triangle_normal(t).dot(&new.triangle_normal(t)) > 0.0 && new.triangle_quality(t) >= floor
    })
}

/// Mean edge length.
pub fn mean_edge(mesh: &TriSurface) -> f64 {
    let e = mesh.edges();
    e.iter().map(|&(a, b)| (mesh.vertices[a] - mesh.vertices[b]).norm()).sum::<f64>() / e.len().max(1) as f64
}

fn remeshed(state: &CapillaryState, profile: &AxisProfile, target: f64, floor: f64) -> Result<CapillaryState, SolverError> {
    let coords: Vec<Option<[f64; 2]>> = state.coords.iter().map(|c| c.map(|ap| [ap.phi, ap.u])).collect();
    let eval = |c: [f64; 2]| axis_point(profile, AxisPoint { phi: c[0], u: c[1] }).unwrap_or_else(|_| Vec3::repeat(f64::NAN));
    let out = remesh(
        RemeshInput {
            vertices: state.mesh.vertices.clone(),
            triangles: state.mesh.triangles.clone(),
            boundary_coords: coords,
            eval_boundary: &eval,
        },
        RemeshOptions::new(target),
        floor,
    )?;
    debug!("remesh: {} splits, {} collapses, {} flips", out.splits, out.collapses, out.flips);
    let mut next = state.clone();
    next.mesh = out.surface.with_floor(floor);
    next.coords = out.boundary_coords.iter().map(|c| c.map(|c| AxisPoint { phi: c[0], u: c[1] })).collect();
    next.refresh(profile)?;
    Ok(next)
}

/// Step along `dir`: a trial at the previous step length, refined by one
/// quadratic interpolation, then Armijo backtracking.
fn line_search(
    state: &CapillaryState,
    profile: &AxisProfile,
    dir: &[f64],
    slope: f64,
    alpha: f64,
    opts: &SolverOptions,
) -> Result<Option<(f64, CapillaryState)>, SolverError> {
    let trial = |a: f64| -> Result<Option<(f64, CapillaryState)>, SolverError> {
        match displaced(state, profile, dir, a) {
            Ok(t) if admissible_step(&state.mesh, &t.mesh, opts.degeneracy_floor) => {
                let dj = energy_difference(state, &t, profile)?;
                Ok(Some((dj, t)))
            }
            _ => Ok(None),
        }
    };
    let armijo = |a: f64, dj: f64| dj <= opts.armijo * a * slope;
    let mut a0 = alpha;
    let mut first = None;
    while a0 > 1e-14 {
        if let Some(r) = trial(a0)? {
            first = Some(r);
            break;
        }
        a0 *= opts.shrink;
    }
    let Some((dj0, s0)) = first else { return Ok(None) };
    let curvature = (dj0 - slope * a0) / (a0 * a0);
    let mut best = armijo(a0, dj0).then_some((a0, dj0, s0));
    let a_star = if curvature > 0.0 { (-slope / (2.0 * curvature)).clamp(0.05 * a0, 20.0 * a0) } else { 2.0 * a0 };
    if (a_star - a0).abs() > 1e-3 * a0 {
        if let Some((dj, s)) = trial(a_star)? {
            if armijo(a_star, dj) && best.as_ref().map_or(true, |b| dj < b.1) {
                best = Some((a_star, dj, s));
            }
        }
    }
    if let Some((a, _, s)) = best {
        return Ok(Some((a, s)));
    }
    let mut a = a0.min(a_star) * opts.shrink;
    while a > 1e-14 {
        if let Some((dj, s)) = trial(a)? {
            if armijo(a, dj) {
                return Ok(Some((a, s)));
            }
        }
        a *= opts.shrink;
    }
    Ok(None)
}

struct Monitor {
    collapse_below: Option<f64>,
    seed_area: f64,
}

fn descend(
    mut state: CapillaryState,
    profile: &AxisProfile,
    opts: &SolverOptions,
    monitor: Option<Monitor>,
) -> Result<Solution, SolverError> {
    opts.validate().map_err(SolverError::InvalidOptions)?;
    state.mesh.degeneracy_floor = opts.degeneracy_floor;
    state.mesh.check_quality()?;
    let target = opts.target_edge.unwrap_or_else(|| mean_edge(&state.mesh));
    let mut alpha = 1.0_f64;
    let mut grad_norm = f64::INFINITY;
    let mut memory: Option<(Vec<f64>, f64, Vec<f64>)> = None;
    for iter in 0..opts.max_iters {
        let remeshed_now = opts.remesh && iter > 0 && iter % 50 == 0;
        if remeshed_now {
            state = remeshed(&state, profile, target, opts.degeneracy_floor)?;
            memory = None;
        }
        let g = gradient(&state, profile)?;
        grad_norm = g.max_norm;
        if grad_norm < opts.tol_grad && state.residual < opts.tol_angle {
            return Ok(Solution { state, iterations: iter, grad_norm });
        }
        if let Some(m) = &monitor {
            if let Some(floor) = m.collapse_below {
                if state.area < floor {
                    return Err(SolverError::NoOutermostDisk { area: state.area, seed_area: m.seed_area });
                }
            }
        }
        let metric = Metric::new(&state, profile)?;
        let cg = conjugate_gradient(|x, y| metric.apply(x, y), &metric.diagonal(), &g.reduced, 1e-6, 2000);
        let z = cg.solution;
        // preconditioned Polak–Ribière direction with automatic restart
        let gz: f64 = dot(&g.reduced, &z);
        let mut dir: Vec<f64> = z.iter().map(|v| -v).collect();
        if let Some((g_prev, gz_prev, d_prev)) = memory.as_ref().filter(|m| m.0.len() == z.len()) {
            let beta = ((gz - dot(g_prev, &z)) / gz_prev).max(0.0);
            for (d, p) in dir.iter_mut().zip(d_prev) {
                *d += beta * p;
            }
        }
        let mut slope = dot(&dir, &g.reduced);
        if !(slope < 0.0) {
            dir = z.iter().map(|v| -v).collect();
            slope = -gz;
        }
        if !(slope < 0.0) {
            break;
        }
        let Some((a, next)) = line_search(&state, profile, &dir, slope, alpha, opts)? else {
            debug!("line search stalled at iteration {iter}, gradient {grad_norm:e}");
            if memory.take().is_some() {
                continue;
            }
            break;
        };
        memory = Some((g.reduced, gz, dir));
        debug_assert!(next.energy <= state.energy + 1e-12 * state.area.abs().max(1.0));
        alpha = a;
        state = next;
        if remeshed_now {
            memory = None;
        }
        if iter % 200 == 0 || log::log_enabled!(log::Level::Trace) {
            debug!("iter {iter}: J = {:.12}, |g| = {grad_norm:e}, alpha = {alpha:e}", state.energy);
        }
    }
    let g = gradient(&state, profile)?;
    if g.max_norm < opts.tol_grad && state.residual < opts.tol_angle {
        let iterations = opts.max_iters;
        return Ok(Solution { grad_norm: g.max_norm, state, iterations });
    }
    Err(SolverError::NonConvergence {
        iterations: opts.max_iters,
        grad_norm: g.max_norm.min(grad_norm),
        residual: state.residual,
        state: Box::new(state),
    })
}

/// Minimises `J_t` from a seed with boundary on the support.
pub fn minimize(t: f64, seed: TriSurface, profile: &AxisProfile, opts: &SolverOptions) -> Result<Solution, SolverError> {
    let state = CapillaryState::new(t, seed, profile)?;
    descend(state, profile, opts, None)
}

/// Minimises from an existing state (warm start).
pub fn minimize_state(state: CapillaryState, profile: &AxisProfile, opts: &SolverOptions) -> Result<Solution, SolverError> {
    descend(state, profile, opts, None)
}

/// Free boundary minimal disk at `t = 0`; collapse below
/// `collapse_fraction` of the seed area means there is none.
pub fn solve_outermost_disk(profile: &AxisProfile, seed: TriSurface, opts: &SolverOptions) -> Result<Solution, SolverError> {
    let state = CapillaryState::new(0.0, seed, profile)?;
    let seed_area = state.area;
    let monitor = Monitor { collapse_below: Some(opts.collapse_fraction * seed_area), seed_area };
    let sol = descend(state, profile, opts, Some(monitor))?;
    if sol.state.area < opts.collapse_fraction * seed_area {
        return Err(SolverError::NoOutermostDisk { area: sol.state.area, seed_area });
    }
    Ok(sol)
}

/// Warm start for parameter `t`: each boundary vertex moves along its
/// meridian to where its frozen normal meets the support at the new angle,
/// and the displacement is extended harmonically to the interior.
pub fn predict(state: &CapillaryState, profile: &AxisProfile, t: f64) -> Result<CapillaryState, SolverError> {
    let target = -capillary_phi(t).0;
    let normals = state.mesh.vertex_normals();
    let n = state.mesh.n_vertices();
    let mut disp = vec![Vec3::zeros(); n];
    let mut coords = state.coords.clone();
    for i in 0..n {
        let Some(ap) = state.coords[i] else { continue };
        let f = |u: f64| axis_normal(profile, AxisPoint { phi: ap.phi, u }).map(|nu| nu.dot(&normals[i]) - target);
        let mut u = ap.u;
        if profile.is_plane() {
            continue;
        }
        for _ in 0..40 {
            let Ok(fu) = f(u) else { break };
            let h = 1e-6 * (1.0 + u.abs());
            let Ok(fh) = f(u + h) else { break };
            let d = (fh - fu) / h;
            if d == 0.0 || !d.is_finite() {
                break;
            }
            let step = (-fu / d).clamp(-0.25 * (1.0 + u.abs()), 0.25 * (1.0 + u.abs()));
            let next = (u + step).max(profile.u_min());
            if (next - u).abs() < 1e-14 * (1.0 + u.abs()) {
                u = next;
                break;
            }
            u = next;
        }
        if f(u).map(|v| v.abs() < 1e-6).unwrap_or(false) {
            let moved = AxisPoint { phi: ap.phi, u };
            disp[i] = axis_point(profile, moved).map_err(EnergyError::from)? - state.mesh.vertices[i];
            coords[i] = Some(moved);
        }
    }
    harmonic_extension(&state.mesh, &mut disp);
    let mut next = state.clone();
    next.t = t;
    for i in 0..n {
        match coords[i] {
            Some(ap) => {
                next.mesh.vertices[i] = axis_point(profile, ap).map_err(EnergyError::from)?;
                next.coords[i] = Some(ap);
            }
            None => next.mesh.vertices[i] += disp[i],
        }
    }
    if !admissible_step(&state.mesh, &next.mesh, state.mesh.degeneracy_floor) {
        warn!("predictor step rejected at t = {t}; restarting from the previous state");
        return Ok(state.with_t(t, profile)?);
    }
    next.refresh(profile)?;
    Ok(next)
}

/// Replaces interior entries of `disp` by the discrete harmonic extension of
/// the boundary entries.
pub fn harmonic_extension(mesh: &TriSurface, disp: &mut [Vec3]) {
    let n = mesh.n_vertices();
    let interior: Vec<usize> = (0..n).filter(|&i| !mesh.is_boundary(i)).collect();
    let mut index = vec![usize::MAX; n];
    for (k, &i) in interior.iter().enumerate() {
        index[i] = k;
    }
    let k = stiffness(mesh);
    let diag: Vec<f64> = interior.iter().map(|&i| k.get(i, i).copied().unwrap_or(1.0)).collect();
    let apply = |x: &[f64], y: &mut [f64]| {
        for (r, &i) in interior.iter().enumerate() {
            let row = k.outer_view(i).unwrap();
            y[r] = row.iter().filter(|(j, _)| index[*j] != usize::MAX).map(|(j, v)| v * x[index[j]]).sum();
        }
    };
    for c in 0..3 {
        let rhs: Vec<f64> = interior
            .iter()
            .map(|&i| {
                let row = k.outer_view(i).unwrap();
                -row.iter().filter(|(j, _)| index[*j] == usize::MAX).map(|(j, v)| v * disp[j][c]).sum::<f64>()
            })
            .collect();
        let sol = conjugate_gradient(apply, &diag, &rhs, 1e-13, 5000).solution;
        for (r, &i) in interior.iter().enumerate() {
            disp[i][c] = sol[r];
        }
    }
}

/// One accepted member of a continuation sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub t: f64,
    pub area: f64,
    pub lateral_area: f64,
    pub mf: f64,
    pub residual: f64,
    pub grad_norm: f64,
    /// Smallest eigenvalue of the stability form, filled in by the caller.
    pub kappa: Option<f64>,
    pub components: usize,
    pub min_radius: f64,
    pub iters: usize,
    pub energy: f64,
    pub lateral_increasing: bool,
    pub disks: bool,
    pub inner_radius_ok: bool,
    /// An axisymmetric candidate has lower energy than the continued branch.
    pub branch_suspect: bool,
    pub isoperimetric_min: f64,
}

/// `(s, σ(s) = t, υ(s) = |Σ_t|)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileSample {
    pub s: f64,
    pub sigma: f64,
    pub upsilon: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub states: Vec<CapillaryState>,
}

impl SweepOutcome {
    pub fn profile_table(&self) -> Vec<ProfileSample> {
        self.records.iter().map(|r| ProfileSample { s: r.lateral_area, sigma: r.t, upsilon: r.area }).collect()
    }

    pub fn lateral_monotone(&self) -> bool {
        self.records.iter().all(|r| r.lateral_increasing)
    }
}

#[derive(Debug, Error)]
#[error("sweep stopped at t = {t}: {source}")]
pub struct SweepFailure {
    pub t: f64,
    pub partial: SweepOutcome,
    #[source]
    pub source: SolverError,
}

/// Grace band for the inner radius check, relative to the mesh size.
const INNER_RADIUS_GRACE: f64 = 1e-6;

fn record(state: &CapillaryState, profile: &AxisProfile, sol_iters: usize, grad_norm: f64, prev: Option<&SweepRecord>) -> SweepRecord {
    let comps = state.mesh.components();
    let disks = comps.iter().all(|c| c.euler_characteristic() == 1);
    let iso = comps.iter().filter_map(|c| isoperimetric_ratio(c).ok()).fold(f64::INFINITY, f64::min);
    let min_radius = state.mesh.vertices.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    let lateral = state.lateral_area();
    let scale = state.area.sqrt();
    let (lateral_increasing, inner_radius_ok) = match prev {
        None => (true, true),
        Some(p) => (lateral > p.lateral_area, min_radius >= p.min_radius - INNER_RADIUS_GRACE * scale),
    };
    let branch_suspect = match axisym_solve(profile, state.t) {
        Ok(c) => c.energy < (state.energy + capillary_phi(state.t).0 * state.offset) - 1e-2 * state.area,
        Err(_) => false,
    };
    SweepRecord {
        t: state.t,
        area: state.area,
        lateral_area: lateral,
        mf: free_energy_mass(state),
        residual: state.residual,
        grad_norm,
        kappa: None,
        components: comps.len(),
        min_radius,
        iters: sol_iters,
        energy: state.energy,
        lateral_increasing,
        disks,
        inner_radius_ok,
        branch_suspect,
        isoperimetric_min: iso,
    }
}

/// Warm-started sweep over an increasing grid starting at 0.
pub fn continuation_sweep(
    profile: &AxisProfile,
    t_grid: &[f64],
    seed: TriSurface,
    opts: &SolverOptions,
) -> Result<SweepOutcome, SweepFailure> {
    let mut out = SweepOutcome { records: Vec::new(), states: Vec::new() };
    let fail = |t: f64, out: SweepOutcome, e: SolverError| SweepFailure { t, partial: out, source: e };
    if t_grid.first() != Some(&0.0) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(fail(0.0, out, SolverError::InvalidOptions("t grid must start at 0 and increase".into())));
    }
    let first = match solve_outermost_disk(profile, seed, opts) {
        Ok(s) => s,
        Err(e) => return Err(fail(0.0, out, e)),
    };
    info!("t = 0: |D| = {:.10}, {} iterations", first.state.area, first.iterations);
    out.records.push(record(&first.state, profile, first.iterations, first.grad_norm, None));
    out.states.push(first.state);
    for &t in &t_grid[1..] {
        let prev = out.states.last().unwrap();
        let guess = match predict(prev, profile, t) {
            Ok(g) => g,
            Err(e) => return Err(fail(t, out, e)),
        };
        let sol = match minimize_state(guess, profile, opts) {
            Ok(s) => s,
            Err(e) => return Err(fail(t, out, e)),
        };
        let rec = record(&sol.state, profile, sol.iterations, sol.grad_norm, out.records.last());
        if !rec.lateral_increasing || !rec.disks || rec.branch_suspect {
            warn!("t = {t}: flagged record (lateral increasing {}, disks {}, branch suspect {})", rec.lateral_increasing, rec.disks, rec.branch_suspect);
        }
        info!("t = {t}: |Σ| = {:.10}, m_f = {:.8}, {} iterations", rec.area, rec.mf, rec.iters);
        out.records.push(rec);
        out.states.push(sol.state);
    }
    Ok(out)
}

/// `|Σ ∩ B_r|`, with each triangle split into `4^levels` pieces tested by centroid.
pub fn area_in_ball(mesh: &TriSurface, r: f64, levels: u32) -> f64 {
    fn piece(a: Vec3, b: Vec3, c: Vec3, r: f64, depth: u32) -> f64 {
        if a.norm().max(b.norm()).max(c.norm()) <= r {
            return crate::mesh::triangle_area(&a, &b, &c);
        }
        if depth == 0 {
            let g = (a + b + c) / 3.0;
            return if g.norm() <= r { crate::mesh::triangle_area(&a, &b, &c) } else { 0.0 };
        }
        let (ab, bc, ca) = ((a + b) / 2.0, (b + c) / 2.0, (c + a) / 2.0);
        piece(a, ab, ca, r, depth - 1) + piece(ab, b, bc, r, depth - 1) + piece(ca, bc, c, r, depth - 1) + piece(ab, bc, ca, r, depth - 1)
    }
    mesh.triangles
        .iter()
        .map(|t| piece(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], r, levels))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::SupportSurface;

    fn unit() -> AxisProfile {
        SupportSurface::catenoid(1.0).profile().unwrap().clone()
    }

    #[test]
    fn harmonic_extension_reproduces_affine_maps() {
        let mesh = generate::flat_disk(1.3, 0.2, 6);
        let mut disp: Vec<Vec3> = mesh.vertices.iter().map(|v| Vec3::new(0.1 * v.x, 0.1 * v.y, 0.3)).collect();
        let exact = disp.clone();
        for i in 0..mesh.n_vertices() {
            if !mesh.is_boundary(i) {
                disp[i] = Vec3::zeros();
            }
        }
        harmonic_extension(&mesh, &mut disp);
        for (d, e) in disp.iter().zip(&exact) {
            assert!((d - e).norm() < 1e-10);
        }
    }

    #[test]
    fn predictor_is_exact_for_flat_disks() {
        let p = unit();
        let s = CapillaryState::new(0.5, flat_seed(&p, 0.5, 6).unwrap(), &p).unwrap();
        let next = predict(&s, &p, 0.8).unwrap();
        assert!(next.residual < 1e-12);
        assert!(gradient(&next, &p).unwrap().max_norm < 1e-11);
    }

    #[test]
    fn minimize_moves_disk_to_matching_height() {
        let p = unit();
        let sol = minimize(1.0, flat_seed(&p, 0.8, 6).unwrap(), &p, &SolverOptions::default()).unwrap();
        let n = 36.0;
        let c_n = n * (2.0 * PI / n).sin() / (2.0 * PI);
        assert!((sol.state.area - c_n * PI * 1f64.cosh().powi(2)).abs() < 1e-6, "{}", sol.state.area);
        assert!(sol.state.residual < 1e-4);
    }

    #[test]
    fn plane_has_no_outermost_disk() {
        let p = AxisProfile::plane();
        let r = solve_outermost_disk(&p, default_seed(&p, 6).unwrap(), &SolverOptions::default());
        assert!(matches!(r, Err(SolverError::NoOutermostDisk { .. })), "{r:?}");
    }

    #[test]
    fn ball_area_of_flat_disk() {
        let d = generate::flat_disk(2.0, 0.0, 12);
        let a = area_in_ball(&d, 1.0, 4);
        assert!((a - PI).abs() < 0.02);
    }
}
