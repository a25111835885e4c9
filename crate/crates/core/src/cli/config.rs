//! Flat `section.key = value` experiment configuration.
//!
//! ```text
//! # half-catenoid of mass 1
//! surface.kind = catenoid
//! surface.mass = 1
//! sweep.t_max = 3
//! ```
//!
//! Blank lines and `#` comments are ignored. Lists are comma separated; a
//! bump is `center:width:amplitude`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::mesh::io::read_capmesh;
use crate::mesh::{MeshError, TriSurface};
use crate::solver::SolverOptions;
use crate::support::{AxisProfile, Bump, GraphBase, GraphSupport, SupportError, SupportSurface};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("unknown key `{0}`")]
    Unknown(String),
    #[error("key `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("seed mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Support(#[from] SupportError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceConfig {
    Plane,
    Catenoid { mass: f64, cap_depth: f64, bumps: Vec<Bump> },
    CurvatureBump { neck: f64, cap_depth: f64, bumps: Vec<Bump> },
    Graph { base: GraphBase, bumps: Vec<Bump> },
}

impl SurfaceConfig {
    pub fn build(&self) -> Result<SupportSurface, SupportError> {
        Ok(match self {
            SurfaceConfig::Plane => SupportSurface::plane(),
            SurfaceConfig::Catenoid { mass, cap_depth, bumps } => {
                SupportSurface::Axisymmetric(AxisProfile::catenoid(*mass, *cap_depth, bumps.clone())?)
            }
            SurfaceConfig::CurvatureBump { neck, cap_depth, bumps } => {
                SupportSurface::Axisymmetric(AxisProfile::curvature_bump(*neck, *cap_depth, bumps.clone())?)
            }
            SurfaceConfig::Graph { base, bumps } => SupportSurface::Graph(GraphSupport::new(*base, bumps.clone())),
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub surface: SurfaceConfig,
    /// Lower side for two-ended flux reports; the mirror image of `surface`
    /// when absent.
    pub bottom: Option<SurfaceConfig>,
    pub rings: usize,
    pub seed_file: Option<PathBuf>,
    pub solver: SolverOptions,
    pub t_max: f64,
    pub t_step: f64,
    pub kappa: bool,
    pub mass_radii: Option<Vec<f64>>,
    pub flux_radii: Vec<f64>,
    pub verify_directions: usize,
    pub verify_t: Vec<f64>,
    pub oracle_tol: f64,
    pub out_dir: PathBuf,
    pub csv: String,
    pub summary: String,
    pub plots: bool,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            surface: SurfaceConfig::Catenoid { mass: 1.0, cap_depth: 1.0, bumps: vec![] },
            bottom: None,
            rings: 16,
            seed_file: None,
            solver: SolverOptions::default(),
            t_max: 3.0,
            t_step: 0.1,
            kappa: true,
            mass_radii: None,
            flux_radii: vec![1e2, 1e3, 1e4],
            verify_directions: 5,
            verify_t: vec![0.0, 1.0, 2.0, 3.0],
            oracle_tol: 1e-2,
            out_dir: PathBuf::from("out"),
            csv: "sweep.csv".into(),
            summary: "summary.json".into(),
            plots: false,
            seed: 0,
        }
    }
}

const SURFACE_KEYS: [&str; 7] = ["kind", "mass", "neck", "cap_depth", "bumps", "log_a", "log_b"];

const KEYS: [&str; 25] = [
    "name",
    "seed",
    "mesh.rings",
    "mesh.target_edge",
    "mesh.seed_file",
    "mesh.degeneracy_floor",
    "solver.tol_grad",
    "solver.tol_angle",
    "solver.max_iters",
    "solver.shrink",
    "solver.armijo",
    "solver.remesh",
    "solver.collapse_fraction",
    "sweep.t_max",
    "sweep.t_step",
    "sweep.kappa",
    "mass.radii",
    "flux.radii",
    "verify.directions",
    "verify.t",
    "verify.oracle_tol",
    "output.dir",
    "output.csv",
    "output.summary",
    "output.plots",
];

fn known(key: &str) -> bool {
    if let Some(rest) = key.strip_prefix("surface.").or_else(|| key.strip_prefix("bottom.")) {
        return SURFACE_KEYS.contains(&rest);
    }
    KEYS.contains(&key)
}

/// Key/value pairs in file order, comments stripped.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(ConfigError::Syntax { line: i + 1 });
        }
        if !known(k) {
            return Err(ConfigError::Unknown(k.into()));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(ConfigError::Duplicate { line: i + 1, key: k.into() });
        }
    }
    Ok(map)
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.into(), message: message.into() }
}

fn float(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.parse().map_err(|_| bad(key, format!("`{v}` is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(bad(key, "must be finite"))
    }
}

fn positive(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x = float(key, v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(bad(key, "must be positive"))
    }
}

fn count(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse().map_err(|_| bad(key, format!("`{v}` is not a nonnegative integer")))
}

fn flag(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, format!("`{v}` is not a boolean"))),
    }
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| float(key, s)).collect()
}

fn bumps(key: &str, v: &str) -> Result<Vec<Bump>, ConfigError> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|b| {
            let parts: Vec<&str> = b.split(':').collect();
            if parts.len() != 3 {
                return Err(bad(key, format!("bump `{b}` is not center:width:amplitude")));
            }
            Ok(Bump::new(float(key, parts[0])?, positive(key, parts[1])?, float(key, parts[2])?))
        })
        .collect()
}

fn surface(map: &BTreeMap<String, String>, prefix: &str) -> Result<Option<SurfaceConfig>, ConfigError> {
    let key = |k: &str| format!("{prefix}.{k}");
    let get = |k: &str| map.get(&key(k)).map(String::as_str);
    let Some(kind) = get("kind") else {
        if let Some(k) = SURFACE_KEYS.iter().find(|k| get(k).is_some()) {
            return Err(bad(&key(k), format!("needs `{prefix}.kind`")));
        }
        return Ok(None);
    };
    let num = |k: &str, default: f64| get(k).map(|v| positive(&key(k), v)).unwrap_or(Ok(default));
    let bs = get("bumps").map(|v| bumps(&key("bumps"), v)).unwrap_or(Ok(vec![]))?;
    let allowed: &[&str] = match kind {
        "plane" => &["kind"],
        "catenoid" => &["kind", "mass", "cap_depth", "bumps"],
        "curvature_bump" => &["kind", "neck", "cap_depth", "bumps"],
        "graph_log" => &["kind", "log_a", "log_b", "bumps"],
        "graph_flat" => &["kind", "bumps"],
        other => return Err(bad(&key("kind"), format!("unknown surface kind `{other}`"))),
    };
    if let Some(k) = SURFACE_KEYS.iter().find(|k| get(k).is_some() && !allowed.contains(k)) {
        return Err(bad(&key(k), format!("not used by surface kind `{kind}`")));
    }
    let parsed = match kind {
        "plane" => SurfaceConfig::Plane,
        "catenoid" => {
            let mass = num("mass", 1.0)?;
            SurfaceConfig::Catenoid { mass, cap_depth: num("cap_depth", mass)?, bumps: bs }
        }
        "curvature_bump" => SurfaceConfig::CurvatureBump { neck: num("neck", 1.0)?, cap_depth: num("cap_depth", 1.0)?, bumps: bs },
        "graph_log" => {
            let a = get("log_a").map(|v| float(&key("log_a"), v)).unwrap_or(Ok(1.0))?;
            let b = get("log_b").map(|v| float(&key("log_b"), v)).unwrap_or(Ok(0.0))?;
            SurfaceConfig::Graph { base: GraphBase::Log { a, b }, bumps: bs }
        }
        _ => SurfaceConfig::Graph { base: GraphBase::Flat, bumps: bs },
    };
    Ok(Some(parsed))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let map = parse_pairs(text)?;
        let mut c = Self::default();
        let get = |k: &str| map.get(k).map(String::as_str);
        if let Some(v) = get("name") {
            c.name = v.to_string();
        }
        if let Some(v) = get("seed") {
            c.seed = v.parse().map_err(|_| bad("seed", "not an unsigned integer"))?;
        }
        c.surface = surface(&map, "surface")?.ok_or_else(|| bad("surface.kind", "missing"))?;
        c.bottom = surface(&map, "bottom")?;
        if let Some(v) = get("mesh.rings") {
            c.rings = count("mesh.rings", v)?;
            if c.rings == 0 {
                return Err(bad("mesh.rings", "must be positive"));
            }
        }
        if let Some(v) = get("mesh.target_edge") {
            c.solver.target_edge = Some(positive("mesh.target_edge", v)?);
        }
        if let Some(v) = get("mesh.seed_file") {
            c.seed_file = Some(PathBuf::from(v));
        }
        let s = &mut c.solver;
        let f64_keys: [(&str, &mut f64); 6] = [
            ("solver.tol_grad", &mut s.tol_grad),
            ("solver.tol_angle", &mut s.tol_angle),
            ("solver.shrink", &mut s.shrink),
            ("solver.armijo", &mut s.armijo),
            ("solver.collapse_fraction", &mut s.collapse_fraction),
            ("mesh.degeneracy_floor", &mut s.degeneracy_floor),
        ];
        for (k, slot) in f64_keys {
            if let Some(v) = get(k) {
                *slot = positive(k, v)?;
            }
        }
        if let Some(v) = get("solver.max_iters") {
            s.max_iters = count("solver.max_iters", v)?;
        }
        if let Some(v) = get("solver.remesh") {
            s.remesh = flag("solver.remesh", v)?;
        }
        s.seed = c.seed;
        c.solver.validate().map_err(|m| bad("solver", m))?;
        if let Some(v) = get("sweep.t_max") {
            c.t_max = positive("sweep.t_max", v)?;
        }
        if let Some(v) = get("sweep.t_step") {
            c.t_step = positive("sweep.t_step", v)?;
        }
        if c.t_step > c.t_max {
            return Err(bad("sweep.t_step", "exceeds sweep.t_max"));
        }
        if let Some(v) = get("sweep.kappa") {
            c.kappa = flag("sweep.kappa", v)?;
        }
        if let Some(v) = get("mass.radii") {
            let r = list("mass.radii", v)?;
            if r.len() < 3 || r.iter().any(|x| !(*x > 0.0)) || r.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(bad("mass.radii", "need at least three positive increasing radii"));
            }
            c.mass_radii = Some(r);
        }
        if let Some(v) = get("flux.radii") {
            let r = list("flux.radii", v)?;
            if r.len() < 2 || r.iter().any(|x| !(*x > 0.0)) {
                return Err(bad("flux.radii", "need at least two positive radii"));
            }
            c.flux_radii = r;
        }
        if let Some(v) = get("verify.directions") {
            c.verify_directions = count("verify.directions", v)?;
        }
        if let Some(v) = get("verify.t") {
            c.verify_t = list("verify.t", v)?;
            if c.verify_t.iter().any(|t| *t < 0.0) {
                return Err(bad("verify.t", "must be nonnegative"));
            }
        }
        if let Some(v) = get("verify.oracle_tol") {
            c.oracle_tol = positive("verify.oracle_tol", v)?;
        }
        if let Some(v) = get("output.dir") {
            c.out_dir = PathBuf::from(v);
        }
        if let Some(v) = get("output.csv") {
            c.csv = v.to_string();
        }
        if let Some(v) = get("output.summary") {
            c.summary = v.to_string();
        }
        if let Some(v) = get("output.plots") {
            c.plots = flag("output.plots", v)?;
        }
        Ok(c)
    }

    /// Reads and parses `path`; a relative `mesh.seed_file` is resolved
    /// against the config's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.into(), source: e })?;
        let mut c = Self::parse(&text)?;
        if let (Some(f), Some(dir)) = (&c.seed_file, path.parent()) {
            if f.is_relative() {
                c.seed_file = Some(dir.join(f));
            }
        }
        Ok(c)
    }

    /// `0, Δt, 2Δt, …` up to `t_max`, the last point snapped onto `t_max`.
    pub fn t_grid(&self) -> Vec<f64> {
        let n = (self.t_max / self.t_step - 1e-9).ceil() as usize;
        (0..=n).map(|k| ((k as f64 * self.t_step * 1e12).round() / 1e12).min(self.t_max)).collect()
    }

    /// Default mass radii scale with the size of the support.
    pub fn mass_radii(&self) -> Vec<f64> {
        if let Some(r) = &self.mass_radii {
            return r.clone();
        }
        let scale = match &self.surface {
            SurfaceConfig::Catenoid { mass, .. } => *mass,
            SurfaceConfig::CurvatureBump { neck, bumps, .. } => bumps.iter().map(|b| b.center + b.width).fold(*neck, f64::max),
            SurfaceConfig::Graph { bumps, .. } => bumps.iter().map(|b| b.center + b.width).fold(1.0, f64::max),
            SurfaceConfig::Plane => 1.0,
        };
        vec![20.0 * scale, 40.0 * scale, 80.0 * scale]
    }

    pub fn seed_mesh(&self) -> Result<Option<TriSurface>, ConfigError> {
        let Some(path) = &self.seed_file else { return Ok(None) };
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.clone(), source: e })?;
        Ok(Some(read_capmesh(&text)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = ExperimentConfig::parse("surface.kind = catenoid\nsolver.tol_grad = 1e-6 # looser\nsweep.t_step = 0.5\n").unwrap();
        assert_eq!(c.solver.tol_grad, 1e-6);
        assert_eq!(c.t_grid(), vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(c.rings, 16);
        assert_eq!(c.mass_radii(), vec![20.0, 40.0, 80.0]);
    }

    #[test]
    fn bumps_and_kinds() {
        let c = ExperimentConfig::parse("surface.kind = curvature_bump\nsurface.bumps = 0.6:0.4:0.15, 1.5:0.5:0.05\n").unwrap();
        match c.surface {
            SurfaceConfig::CurvatureBump { bumps, .. } => assert_eq!(bumps[1], Bump::new(1.5, 0.5, 0.05)),
            _ => panic!(),
        }
        let g = ExperimentConfig::parse("surface.kind = graph_log\nsurface.log_a = 2\n").unwrap();
        assert_eq!(g.surface, SurfaceConfig::Graph { base: GraphBase::Log { a: 2.0, b: 0.0 }, bumps: vec![] });
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "surface.kind = catenoid\nsolver.tol_grad = 0\n",
            "surface.kind = catenoid\nsolver.tol_grad = -1\n",
            "surface.kind = catenoid\nsurface.colour = red\n",
            "surface.kind = catenoid\nunknown = 1\n",
            "surface.kind = torus\n",
            "surface.kind = plane\nsurface.mass = 2\n",
            "surface.kind = catenoid\nsurface.kind = plane\n",
            "surface.kind catenoid\n",
            "sweep.t_max = 3\n",
            "surface.kind = catenoid\nmass.radii = 10, 5, 20\n",
            "surface.kind = catenoid\nsurface.bumps = 1:2\n",
        ] {
            assert!(ExperimentConfig::parse(text).is_err(), "{text}");
        }
    }
}
