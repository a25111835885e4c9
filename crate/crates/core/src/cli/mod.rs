//! The `capillary-penrose` experiment runner: `mass`, `sweep`, `verify` and
//! `flux` commands over flat key/value configs.

pub mod config;
pub mod plot;
pub mod report;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use log::{info, warn};
use serde::Serialize;
use serde_json::{json, Value};

use crate::axisym::axisym_solve;
use crate::flux::{
    characterization_report, flux_homotopy_check, neck_size, EndDescriptor, EndGeometry, EndLoop, FluxError, Side,
};
use crate::mesh::curvature::{gauss_bonnet_residual, isoperimetric_ratio};
use crate::mesh::{MeshError, TriSurface};
use crate::solver::{continuation_sweep, default_seed, SolverError, SweepOutcome};
use crate::stability::{
    fd_variation_check, mesh_scale, min_eigenpair, random_direction, StabilityError, FIRST_STEP, MIN_LOOP_VERTICES,
    SECOND_STEP,
};
use crate::support::lateral::mean_curvature_sign_report;
use crate::support::mass::exterior_mass;
use crate::support::{AxisProfile, SupportSurface};

pub use config::{ConfigError, ExperimentConfig, SurfaceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MONOTONICITY: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;
pub const EXIT_RESOLUTION: i32 = 5;

/// Allowed decrease of `m_f` between consecutive sweep steps.
pub const MONOTONE_SLACK: f64 = 1e-3;
pub const FD_FIRST_TOL: f64 = 1e-6;
pub const FD_SECOND_TOL: f64 = 1e-4;
/// Gauss–Bonnet holds exactly for angle defects; this only absorbs rounding.
pub const GAUSS_BONNET_TOL: f64 = 1e-9;
pub const ISOPERIMETRIC_SLACK: f64 = 1e-2;
pub const KAPPA_SLACK: f64 = 1e-3;
/// Sampled `H(S)` on unperturbed catenoid stretches is zero up to this.
pub const H_ROUNDING: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Mass,
    Sweep,
    Verify,
    Flux,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Mass => "mass",
            Command::Sweep => "sweep",
            Command::Verify => "verify",
            Command::Flux => "flux",
        }
    }
}

/// Result of one command: exit code, printed lines and the JSON summary
/// (already written to the output directory when there is one).
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: i32,
    pub lines: Vec<String>,
    pub summary: Value,
}

impl Outcome {
    fn error(code: i32, message: String) -> Self {
        Self { code, lines: vec![format!("error: {message}")], summary: json!({ "error": message, "exit_code": code }) }
    }
}

fn axis_profile(cfg: &ExperimentConfig) -> Result<AxisProfile, Outcome> {
    match cfg.surface.build() {
        Ok(SupportSurface::Axisymmetric(p)) => Ok(p),
        Ok(SupportSurface::Graph(_)) => Err(Outcome::error(EXIT_CONFIG, "this command needs an axisymmetric support".into())),
        Err(e) => Err(Outcome::error(EXIT_CONFIG, e.to_string())),
    }
}

fn seed(cfg: &ExperimentConfig, profile: &AxisProfile) -> Result<TriSurface, Outcome> {
    match cfg.seed_mesh() {
        Ok(Some(m)) => {
            m.check_quality().map_err(|e| Outcome::error(EXIT_RESOLUTION, format!("degenerate seed: {e}")))?;
            Ok(m.with_floor(cfg.solver.degeneracy_floor))
        }
        Ok(None) => default_seed(profile, cfg.rings).map_err(|e| Outcome::error(EXIT_CONFIG, e.to_string())),
        Err(ConfigError::Mesh(e @ MeshError::Degenerate { .. })) => Err(Outcome::error(EXIT_RESOLUTION, format!("degenerate seed: {e}"))),
        Err(e) => Err(Outcome::error(EXIT_CONFIG, e.to_string())),
    }
}

fn finish(cfg: &ExperimentConfig, mut out: Outcome) -> Outcome {
    if let Some(obj) = out.summary.as_object_mut() {
        obj.insert("exit_code".into(), json!(out.code));
    }
    if let Err(e) = report::write_json(&cfg.out_dir.join(&cfg.summary), &out.summary) {
        out.lines.push(format!("error: cannot write summary: {e}"));
        if out.code == EXIT_OK {
            out.code = EXIT_FAIL;
        }
    }
    out
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Outcome {
    let out = match command {
        Command::Mass => cmd_mass(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Flux => cmd_flux(cfg),
    };
    finish(cfg, out)
}

pub fn cmd_mass(cfg: &ExperimentConfig) -> Outcome {
    let support = match cfg.surface.build() {
        Ok(s) => s,
        Err(e) => return Outcome::error(EXIT_CONFIG, e.to_string()),
    };
    let radii = cfg.mass_radii();
    let rep = match exterior_mass(&support, &radii) {
        Ok(r) => r,
        Err(e) => return Outcome::error(EXIT_CONFIG, e.to_string()),
    };
    let mut lines = vec![format!("m = {:.10}", rep.mass), format!("fit residual = {:e}", rep.fit_residual)];
    for (r, i) in rep.radii.iter().zip(&rep.integrals) {
        lines.push(format!("  r = {r}: I(r) = {i:.10}"));
    }
    for w in &rep.warnings {
        lines.push(format!("warning: {w}"));
    }
    Outcome { code: EXIT_OK, lines, summary: json!({ "command": "mass", "name": cfg.name, "support": support.kind(), "report": rep }) }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub name: String,
    pub completed: bool,
    pub failure: Option<String>,
    pub steps: usize,
    pub disk_area: f64,
    /// `m_f(0) = √(|D|/π)`.
    pub mf0: f64,
    pub max_mf: f64,
    pub final_mf: f64,
    pub exterior_mass: Option<f64>,
    pub penrose_margin: Option<f64>,
    pub monotonicity: &'static str,
    pub worst_decrease: f64,
    pub lateral_monotone: bool,
    pub min_mean_curvature: Option<f64>,
    /// Monotonicity failed on a support where `H(S) < 0` somewhere.
    pub hypothesis_violation: bool,
    pub branch_suspect_t: Vec<f64>,
    pub kappa_min: Option<f64>,
}

/// Largest drop `m_f(t_k) − m_f(t_{k+1})` along the records.
pub fn worst_decrease(outcome: &SweepOutcome) -> f64 {
    outcome.records.windows(2).map(|w| w[0].mf - w[1].mf).fold(0.0, f64::max)
}

fn fill_kappa(outcome: &mut SweepOutcome, profile: &AxisProfile) {
    for (rec, state) in outcome.records.iter_mut().zip(&outcome.states) {
        match min_eigenpair(state, profile) {
            Ok(e) => rec.kappa = Some(e.value),
            Err(e) => warn!("t = {}: no stability eigenvalue: {e}", rec.t),
        }
    }
}

/// `min H(S)` over the support from the reference parallel to past the last
/// perturbation.
fn exterior_min_curvature(profile: &AxisProfile) -> Option<f64> {
    if profile.is_plane() {
        return Some(0.0);
    }
    let upper = profile.perturbed_until().max(0.0) + profile.neck_radius();
    mean_curvature_sign_report(&SupportSurface::Axisymmetric(profile.clone()), 0.0, upper, 400).ok()
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> Outcome {
    let profile = match axis_profile(cfg) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let seed = match seed(cfg, &profile) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let grid = cfg.t_grid();
    let (mut outcome, failure) = match continuation_sweep(&profile, &grid, seed, &cfg.solver) {
        Ok(o) => (o, None),
        Err(f) => {
            let msg = f.to_string();
            (f.partial, Some(msg))
        }
    };
    if cfg.kappa {
        fill_kappa(&mut outcome, &profile);
    }
    let csv = report::sweep_csv(&outcome.records);
    let mut lines = Vec::new();
    if let Err(e) = report::write_text(&cfg.out_dir.join(&cfg.csv), &csv) {
        return Outcome::error(EXIT_FAIL, format!("cannot write CSV: {e}"));
    }
    let support = SupportSurface::Axisymmetric(profile.clone());
    let mass = exterior_mass(&support, &cfg.mass_radii()).ok().map(|r| r.mass);
    let records = &outcome.records;
    let disk_area = records.first().map(|r| r.area).unwrap_or(f64::NAN);
    let mf0 = (disk_area / PI).sqrt();
    let max_mf = records.iter().map(|r| r.mf).fold(f64::NAN, f64::max);
    let drop = worst_decrease(&outcome);
    let monotone = drop <= MONOTONE_SLACK;
    let min_h = exterior_min_curvature(&profile);
    let summary = SweepSummary {
        name: cfg.name.clone(),
        completed: failure.is_none(),
        failure: failure.clone(),
        steps: records.len(),
        disk_area,
        mf0,
        max_mf,
        final_mf: records.last().map(|r| r.mf).unwrap_or(f64::NAN),
        exterior_mass: mass,
        penrose_margin: mass.map(|m| m - mf0),
        monotonicity: if monotone { "PASS" } else { "FAIL" },
        worst_decrease: drop,
        lateral_monotone: outcome.lateral_monotone(),
        min_mean_curvature: min_h,
        hypothesis_violation: !monotone && min_h.is_some_and(|h| h < -H_ROUNDING),
        branch_suspect_t: records.iter().filter(|r| r.branch_suspect).map(|r| r.t).collect(),
        kappa_min: records.iter().filter_map(|r| r.kappa).reduce(f64::min),
    };
    if cfg.plots && !records.is_empty() {
        let ts: Vec<f64> = records.iter().map(|r| r.t).collect();
        let mfs: Vec<f64> = records.iter().map(|r| r.mf).collect();
        let table = outcome.profile_table();
        let s: Vec<f64> = table.iter().map(|p| p.s).collect();
        let u: Vec<f64> = table.iter().map(|p| p.upsilon).collect();
        for (file, xs, ys, reference) in [("mf.png", &ts, &mfs, mass), ("upsilon.png", &s, &u, None)] {
            if let Err(e) = plot::line_plot(&cfg.out_dir.join(file), xs, ys, reference) {
                warn!("plot {file}: {e}");
            }
        }
    }
    lines.push(format!("steps = {} of {}", records.len(), grid.len()));
    lines.push(format!("m_f(0) = sqrt(|D|/pi) = {mf0:.8}"));
    lines.push(format!("max m_f = {max_mf:.8}"));
    if let Some(m) = mass {
        lines.push(format!("exterior mass m = {m:.8}"));
        lines.push(format!("penrose margin m - sqrt(|D|/pi) = {:.3e}", m - mf0));
    }
    lines.push(format!("{} monotonicity (worst decrease {drop:.3e}, slack {MONOTONE_SLACK:e})", summary.monotonicity));
    if summary.hypothesis_violation {
        lines.push("warning: H(S) < 0 on the exterior; the monotonicity hypothesis does not hold".into());
    }
    let code = if let Some(f) = &failure {
        lines.push(format!("error: {f}; partial CSV written"));
        EXIT_NONCONVERGENCE
    } else if !monotone {
        EXIT_MONOTONICITY
    } else {
        EXIT_OK
    };
    let mut value = serde_json::to_value(&summary).expect("summary serialises");
    value.as_object_mut().unwrap().insert("command".into(), json!("sweep"));
    Outcome { code, lines, summary: value }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub t: Option<f64>,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, t: Option<f64>, value: f64, threshold: f64, pass: bool) -> Self {
        Self { name: name.into(), t, value, threshold, pass }
    }

    pub fn line(&self) -> String {
        let at = self.t.map(|t| format!(" t={t}")).unwrap_or_default();
        format!("{} {}{at}: {:.3e} (threshold {:.1e})", if self.pass { "PASS" } else { "FAIL" }, self.name, self.value, self.threshold)
    }
}

fn resolution_error(found: usize) -> Outcome {
    Outcome::error(
        EXIT_RESOLUTION,
        format!("boundary loop has {found} vertices, at least {MIN_LOOP_VERTICES} needed; increase mesh.rings"),
    )
}

pub fn cmd_verify(cfg: &ExperimentConfig) -> Outcome {
    let profile = match axis_profile(cfg) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let seed = match seed(cfg, &profile) {
        Ok(s) => s,
        Err(o) => return o,
    };
    if let Some(short) = seed.boundary_loops.iter().map(Vec::len).filter(|&n| n < MIN_LOOP_VERTICES).min() {
        return resolution_error(short);
    }
    let t_last = cfg.verify_t.iter().copied().fold(0.0, f64::max);
    let mut grid: Vec<f64> = cfg.t_grid().into_iter().filter(|&t| t < t_last - 1e-12).collect();
    grid.extend(cfg.verify_t.iter().copied());
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let outcome = match continuation_sweep(&profile, &grid, seed, &cfg.solver) {
        Ok(o) => o,
        Err(f) => {
            let code = match f.source {
                SolverError::Degenerate(_) => EXIT_RESOLUTION,
                _ => EXIT_FAIL,
            };
            return Outcome::error(code, f.to_string());
        }
    };
    let mut checks = Vec::new();
    for (rec, state) in outcome.records.iter().zip(&outcome.states) {
        if !cfg.verify_t.iter().any(|t| (t - rec.t).abs() < 1e-12) {
            continue;
        }
        let t = Some(rec.t);
        info!("verifying t = {}", rec.t);
        let n = state.mesh.n_vertices();
        let (mut first, mut second) = (0.0_f64, 0.0_f64);
        for k in 0..cfg.verify_directions {
            let f = random_direction(n, cfg.seed.wrapping_add(k as u64));
            match fd_variation_check(state, &profile, &f) {
                Ok(r) => {
                    for e in [&r.area_first, &r.lateral_first, &r.energy_first] {
                        first = first.max(e.relative_error[FIRST_STEP]);
                    }
                    second = second.max(r.second.relative_error[SECOND_STEP]);
                }
                Err(StabilityError::Resolution { found, .. }) => return resolution_error(found),
                Err(e) => {
                    checks.push(Check::new("fd", t, f64::NAN, FD_FIRST_TOL, false));
                    warn!("fd check failed: {e}");
                }
            }
        }
        if cfg.verify_directions > 0 {
            checks.push(Check::new("fd.first_variation", t, first, FD_FIRST_TOL, first < FD_FIRST_TOL));
            checks.push(Check::new("fd.second_variation", t, second, FD_SECOND_TOL, second < FD_SECOND_TOL));
        }
        let gb = gauss_bonnet_residual(&state.mesh).unwrap_or(f64::NAN);
        checks.push(Check::new("gauss_bonnet", t, gb, GAUSS_BONNET_TOL, gb <= GAUSS_BONNET_TOL));
        let iso = state.mesh.components().iter().map(|c| isoperimetric_ratio(c).unwrap_or(f64::NAN)).fold(f64::INFINITY, f64::min);
        checks.push(Check::new("isoperimetric", t, iso, 1.0 - ISOPERIMETRIC_SLACK, iso >= 1.0 - ISOPERIMETRIC_SLACK));
        match min_eigenpair(state, &profile) {
            Ok(e) => {
                let h = mesh_scale(&state.mesh);
                let floor = -KAPPA_SLACK / (h * h);
                checks.push(Check::new("stability.kappa", t, e.value, floor, e.value >= floor));
                let min = e.vector.iter().copied().fold(f64::INFINITY, f64::min);
                checks.push(Check::new("stability.eigenfunction_min", t, min, 0.0, min > 0.0));
            }
            Err(e) => {
                warn!("eigen-solve failed: {e}");
                checks.push(Check::new("stability.kappa", t, f64::NAN, 0.0, false));
            }
        }
        match axisym_solve(&profile, rec.t) {
            Ok(c) => {
                let mf = (c.area / PI).sqrt() / rec.t.cosh();
                let dev = (mf - rec.mf).abs();
                checks.push(Check::new("oracle.mf", t, dev, cfg.oracle_tol, dev < cfg.oracle_tol));
            }
            Err(e) => info!("t = {}: no axisymmetric oracle ({e})", rec.t),
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    let lines = checks.iter().map(Check::line).collect();
    Outcome {
        code: if pass { EXIT_OK } else { EXIT_FAIL },
        lines,
        summary: json!({ "command": "verify", "name": cfg.name, "pass": pass, "checks": checks }),
    }
}

fn flux_outcome(cfg: &ExperimentConfig) -> Result<Outcome, FluxError> {
    let top = match axis_profile(cfg) {
        Ok(p) => p,
        Err(o) => return Ok(o),
    };
    let bottom = match &cfg.bottom {
        None => top.clone(),
        Some(lower) => match lower.build() {
            Ok(SupportSurface::Axisymmetric(p)) => p,
            Ok(_) => return Ok(Outcome::error(EXIT_CONFIG, "bottom support must be axisymmetric".into())),
            Err(e) => return Ok(Outcome::error(EXIT_CONFIG, e.to_string())),
        },
    };
    let mut ends = Vec::new();
    let mut lines = Vec::new();
    let mut homotopy = Vec::new();
    for (index, (profile, side)) in [(&top, Side::Top), (&bottom, Side::Bottom)].into_iter().enumerate() {
        let geometry = EndGeometry::from_profile(profile, side)?;
        let inner = geometry.inner_radius();
        let radii: Vec<f64> = cfg.flux_radii.iter().map(|r| r.max(2.0 * inner)).collect();
        let end = EndDescriptor::new(index, geometry, side, &radii)?;
        let r0 = radii.iter().copied().fold(f64::INFINITY, f64::min);
        let star = EndLoop::Star { radius: r0, amplitude: 0.3, lobes: 3, phase: 0.25 };
        let dev = flux_homotopy_check(&end.geometry, &star, &end.representative)?;
        lines.push(format!("end {index} ({side:?}): a = {:.8}, b = {:.8}, homotopy deviation {dev:.3e}", end.a, end.b));
        homotopy.push(dev);
        ends.push(end);
    }
    let neck = neck_size(&top, &bottom, cfg.rings, &cfg.solver)?;
    let rep = characterization_report(&ends, &neck)?;
    lines.push(format!("largest flux = {:.8}", rep.largest_flux));
    lines.push(format!("neck size = {:.8}{}", rep.neck_size, if neck.plane { " (plane)" } else { "" }));
    lines.push(format!("verdict: {}", rep.verdict));
    if let Some(m) = rep.penrose_margin {
        lines.push(format!("penrose margin = {m:.3e}"));
    }
    lines.push(format!("note: {}", rep.caveat));
    let fits: Vec<Value> = ends
        .iter()
        .zip(&homotopy)
        .map(|(e, h)| json!({ "index": e.index, "side": e.side, "a": e.a, "b": e.b, "homotopy_deviation": h }))
        .collect();
    Ok(Outcome {
        code: EXIT_OK,
        lines,
        summary: json!({ "command": "flux", "name": cfg.name, "ends": fits, "neck": neck, "report": rep }),
    })
}

pub fn cmd_flux(cfg: &ExperimentConfig) -> Outcome {
    flux_outcome(cfg).unwrap_or_else(|e| Outcome::error(EXIT_FAIL, e.to_string()))
}

/// Loads each config and runs `command`, `jobs` configs at a time. With more
/// than one config each gets its own subdirectory of the output directory.
pub fn run_batch(command: Command, configs: &[PathBuf], out: Option<&Path>, jobs: usize) -> Vec<(PathBuf, Outcome)> {
    let many = configs.len() > 1;
    let prepare = |path: &Path| -> Result<ExperimentConfig, Outcome> {
        let mut cfg = ExperimentConfig::load(path).map_err(|e| Outcome::error(EXIT_CONFIG, e.to_string()))?;
        let base = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.out_dir.clone());
        cfg.out_dir = if many {
            base.join(path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| cfg.name.clone()))
        } else {
            base
        };
        Ok(cfg)
    };
    let results: Mutex<Vec<Option<Outcome>>> = Mutex::new(vec![None; configs.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, configs.len().max(1)) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                if k >= configs.len() {
                    break;
                }
                let o = match prepare(&configs[k]) {
                    Ok(cfg) => run(command, &cfg),
                    Err(o) => o,
                };
                results.lock().unwrap()[k] = Some(o);
            });
        }
    });
    configs.iter().cloned().zip(results.into_inner().unwrap().into_iter().map(|o| o.expect("every config ran"))).collect()
}
