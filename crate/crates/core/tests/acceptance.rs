//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use capillary_penrose::cli::report::CSV_HEADER;
use capillary_penrose::flux::{
    characterization_report, flux_homotopy_check, neck_size, EndDescriptor, EndGeometry, EndLoop, Side,
};
use capillary_penrose::mesh::curvature::{gauss_bonnet_residual, isoperimetric_ratio};
use capillary_penrose::solver::{area_in_ball, continuation_sweep, default_seed, SolverOptions, SweepOutcome};
use capillary_penrose::stability::{
    fd_variation_check, mesh_scale, min_eigenpair, profile_derivatives, profile_second_derivative, random_direction,
    FIRST_STEP, SECOND_STEP,
};
use capillary_penrose::support::lateral::mean_curvature_sign_report;
use capillary_penrose::support::mass::exterior_mass;
use capillary_penrose::support::{AxisProfile, Bump, SupportSurface};

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} C{id} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

/// Sampled `H(S)` is zero only up to rounding on the unperturbed stretches.
const H_ROUNDING: f64 = 1e-8;

fn grid(step: f64, t_max: f64) -> Vec<f64> {
    let n = (t_max / step).round() as usize;
    (0..=n).map(|k| ((k as f64 * step) * 1e12).round() / 1e12).collect()
}

fn sweep(p: &AxisProfile, rings: usize, step: f64) -> SweepOutcome {
    let opts = SolverOptions::default();
    continuation_sweep(p, &grid(step, 3.0), default_seed(p, rings).unwrap(), &opts).unwrap_or_else(|f| {
        println!("sweep failed at t = {}: {}", f.t, f.source);
        f.partial
    })
}

fn at(out: &SweepOutcome, t: f64) -> Option<usize> {
    out.records.iter().position(|r| (r.t - t).abs() < 1e-9)
}

fn max_mf_error(out: &SweepOutcome, ts: &[f64], target: f64) -> f64 {
    ts.iter().map(|&t| at(out, t).map(|k| (out.records[k].mf - target).abs()).unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
}

fn run_bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_capillary-penrose")).args(args).env("CAPPEN_LOG", "error").output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn main() {
    let mut rep = Report { failed: 0 };
    let s1 = AxisProfile::catenoid(1.0, 1.0, vec![]).unwrap();
    let bumps = [Bump::new(0.6, 0.4, 0.15), Bump::new(1.5, 0.5, 0.05)];
    let cb1 = AxisProfile::curvature_bump(1.0, 1.0, vec![bumps[0]]).unwrap();
    let cb2 = AxisProfile::curvature_bump(1.0, 1.0, vec![bumps[1]]).unwrap();
    let bumped = [("cb1", &cb1), ("cb2", &cb2)];
    // H(S) is the bump sum by construction, so nonnegative amplitudes give H ≥ 0
    let amplitudes_ok = bumps.iter().all(|b| b.amplitude >= 0.0);

    let (s1_16, s1_32, s1_fine, cb, cb_fine) = std::thread::scope(|sc| {
        let a = sc.spawn(|| sweep(&s1, 16, 0.1));
        let b = sc.spawn(|| sweep(&s1, 32, 0.1));
        let c = sc.spawn(|| sweep(&s1, 16, 0.05));
        let d: Vec<_> = bumped.iter().map(|(_, p)| sc.spawn(move || sweep(p, 16, 0.1))).collect();
        let e: Vec<_> = bumped.iter().map(|(_, p)| sc.spawn(move || sweep(p, 16, 0.05))).collect();
        (
            a.join().unwrap(),
            b.join().unwrap(),
            c.join().unwrap(),
            d.into_iter().map(|h| h.join().unwrap()).collect::<Vec<_>>(),
            e.into_iter().map(|h| h.join().unwrap()).collect::<Vec<_>>(),
        )
    });

    // 1. catenoid constancy
    let ts = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    let (e16, e32) = (max_mf_error(&s1_16, &ts, 1.0), max_mf_error(&s1_32, &ts, 1.0));
    rep.line(
        1,
        "catenoid constancy",
        e16 < 1e-2 && e32 < 3e-3 && e32 < e16,
        format!("max |m_f - 1| = {e16:.3e} (16 rings), {e32:.3e} (32 rings), ratio {:.2}", e16 / e32),
    );

    // 2. Penrose equality
    let mass = exterior_mass(&SupportSurface::Axisymmetric(s1.clone()), &[20.0, 40.0, 80.0]).unwrap().mass;
    let disk = (s1_16.records[0].area / PI).sqrt();
    rep.line(
        2,
        "penrose equality on the catenoid",
        (mass - 1.0).abs() < 1e-4 && (disk - 1.0).abs() < 5e-3 && (mass - disk).abs() < 1e-2,
        format!("m = {mass:.8}, sqrt(|D|/pi) = {disk:.6}, margin {:.3e}", mass - disk),
    );

    // 3, 4. monotonicity and asymptotics
    let mut ok3 = true;
    let mut ok4 = true;
    let mut d3 = Vec::new();
    let mut d4 = Vec::new();
    for ((name, p), out) in bumped.iter().zip(&cb) {
        let sup = SupportSurface::Axisymmetric((*p).clone());
        let h_min = mean_curvature_sign_report(&sup, 0.0, p.perturbed_until() + p.neck_radius(), 400).unwrap();
        let m = exterior_mass(&sup, &[40.0, 80.0, 160.0]).unwrap().mass;
        let drop = out.records.windows(2).map(|w| w[0].mf - w[1].mf).fold(0.0, f64::max);
        let max_mf = out.records.iter().map(|r| r.mf).fold(0.0, f64::max);
        let complete = out.records.len() == 31;
        ok3 &= complete && h_min >= -H_ROUNDING && drop <= 1e-3 && max_mf <= m + 1e-2;
        d3.push(format!("{name}: min H {h_min:.2e}, worst drop {drop:.2e}, max m_f {max_mf:.6} vs m {m:.6}"));
        let last = out.records.last().unwrap();
        let gap = (last.mf - m).abs();
        ok4 &= complete && (last.t - 3.0).abs() < 1e-9 && gap < 2e-2;
        d4.push(format!("{name}: |m_f(3) - m| = {gap:.3e}"));
    }
    rep.line(3, "monotonicity", ok3 && amplitudes_ok, d3.join("; "));
    rep.line(4, "asymptotics", ok4, d4.join("; "));

    // 5. variation formulas
    let (mut first, mut second, mut states, mut errors) = (0.0_f64, 0.0_f64, 0, 0);
    for (out, p) in [(&s1_16, &s1), (&cb[0], &cb1), (&cb[1], &cb2)] {
        for t in ts {
            let Some(k) = at(out, t) else { continue };
            let st = &out.states[k];
            states += 1;
            for seed in 0..5 {
                match fd_variation_check(st, p, &random_direction(st.mesh.n_vertices(), seed)) {
                    Ok(r) => {
                        for e in [&r.area_first, &r.lateral_first, &r.energy_first] {
                            first = first.max(e.relative_error[FIRST_STEP]);
                        }
                        second = second.max(r.second.relative_error[SECOND_STEP]);
                    }
                    Err(_) => errors += 1,
                }
            }
        }
    }
    rep.line(
        5,
        "variation formulas",
        errors == 0 && states == 21 && first < 1e-6 && second < 1e-4,
        format!("{states} states x 5 directions: first {first:.3e}, second {second:.3e}, errors {errors}"),
    );

    // 6. profile second derivative
    let exact = 1.0 / (2.0 * PI * 1f64.cosh().powi(4));
    let k1 = at(&s1_16, 1.0).unwrap();
    let pred = profile_second_derivative(&s1_16.states[k1], &s1, None).unwrap().prediction;
    let d = profile_derivatives(&s1_16.profile_table());
    let disc = d[k1].d2;
    let (r_pred, r_disc) = ((pred - exact).abs() / exact, (disc - exact).abs() / exact);
    rep.line(
        6,
        "profile second derivative",
        r_pred < 2e-2 && r_disc < 5e-2,
        format!("exact {exact:.6}, predicted {pred:.6} ({r_pred:.2e}), discrete {disc:.6} ({r_disc:.2e})"),
    );

    // 7. profile convexity (sweeps at Δt = 0.05)
    let mut ok7 = true;
    let mut d7 = Vec::new();
    for ((name, _), out) in bumped.iter().zip(&cb_fine) {
        let pts: Vec<_> = profile_derivatives(&out.profile_table()).into_iter().filter(|q| q.interior).collect();
        let drop = pts.windows(2).map(|w| w[0].convexity - w[1].convexity).fold(0.0, f64::max);
        ok7 &= out.records.len() == 61 && drop <= 1e-3 * PI;
        d7.push(format!("{name}: worst drop {drop:.3e}"));
    }
    let pts: Vec<_> = profile_derivatives(&s1_fine.profile_table()).into_iter().filter(|q| q.interior).collect();
    let dev = pts.iter().map(|q| (q.convexity - PI).abs()).fold(0.0, f64::max);
    ok7 &= s1_fine.records.len() == 61 && dev <= 2e-2;
    d7.push(format!("S1: max |conv - pi| = {dev:.3e}"));
    rep.line(7, "profile convexity", ok7, d7.join("; "));

    // 8. structural identities, over every state of every sweep
    let all: Vec<&SweepOutcome> = [&s1_16, &s1_32, &s1_fine].into_iter().chain(&cb).chain(&cb_fine).collect();
    let (mut gb, mut iso, mut chi_ok, mut lat_ok, mut ball) = (0.0_f64, f64::INFINITY, true, true, 0.0_f64);
    for out in &all {
        lat_ok &= out.records.windows(2).all(|w| w[1].lateral_area > w[0].lateral_area);
        for st in &out.states {
            gb = gb.max(gauss_bonnet_residual(&st.mesh).unwrap());
            for c in st.mesh.components() {
                iso = iso.min(isoperimetric_ratio(&c).unwrap());
                chi_ok &= c.euler_characteristic() == 1;
            }
            for r in [1.0, 1.5, 2.0, 4.0, 8.0, 16.0] {
                ball = ball.max(area_in_ball(&st.mesh, r, 3) / (4.0 * PI * r * r));
            }
        }
    }
    rep.line(
        8,
        "structural identities",
        gb <= 1e-9 && iso >= 1.0 - 1e-2 && chi_ok && lat_ok && ball <= 1.0 + 1e-2,
        format!("GB residual {gb:.2e}, min iso {iso:.6}, chi = 1 {chi_ok}, lateral increasing {lat_ok}, max |S cap B_r|/4pi r^2 {ball:.4}"),
    );

    // 9. stability
    let (mut worst, mut pos, mut n9) = (f64::INFINITY, true, 0);
    for (out, p) in [(&s1_16, &s1), (&cb[0], &cb1), (&cb[1], &cb2)] {
        for st in &out.states {
            let e = min_eigenpair(st, p).unwrap();
            let h = mesh_scale(&st.mesh);
            worst = worst.min(e.value * h * h);
            pos &= e.vector.iter().all(|&v| v > 0.0);
            n9 += 1;
        }
    }
    rep.line(9, "stability", worst >= -1e-3 && pos, format!("{n9} states: min kappa h^2 = {worst:.3e}, eigenfunction positive {pos}"));

    // 10. flux and neck
    let radii = [1e2, 1e3, 1e4];
    let ends = |p: &AxisProfile| -> Vec<EndDescriptor> {
        [Side::Top, Side::Bottom]
            .into_iter()
            .enumerate()
            .map(|(i, s)| EndDescriptor::new(i, EndGeometry::from_profile(p, s).unwrap(), s, &radii).unwrap())
            .collect()
    };
    let opts = SolverOptions::default();
    let cat_neck = neck_size(&s1, &s1, 16, &opts).unwrap();
    let cat = characterization_report(&ends(&s1), &cat_neck).unwrap();
    let top = EndGeometry::from_profile(&s1, Side::Top).unwrap();
    let homotopy = flux_homotopy_check(&top, &EndLoop::Star { radius: 5.0, amplitude: 0.3, lobes: 3, phase: 0.25 }, &EndLoop::Circle(1e4)).unwrap();
    let plane = AxisProfile::plane();
    let plane_neck = neck_size(&plane, &plane, 16, &opts).unwrap();
    let pl = characterization_report(&ends(&plane), &plane_neck).unwrap();
    rep.line(
        10,
        "flux and neck",
        (cat.largest_flux - 2.0 * PI).abs() < 1e-3
            && (cat.neck_size - 2.0 * PI).abs() < 3e-2
            && cat.catenoid_or_plane_candidate
            && homotopy < 1e-6
            && pl.largest_flux < 1e-9
            && pl.neck_size == 0.0
            && pl.catenoid_or_plane_candidate,
        format!(
            "catenoid flux {:.8}, neck {:.6}, verdict {}; homotopy {homotopy:.2e}; plane ({:.1e}, {}) verdict {}",
            cat.largest_flux, cat.neck_size, cat.verdict, pl.largest_flux, pl.neck_size, pl.verdict
        ),
    );

    // 11. determinism and interfaces
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let write = |name: &str, text: &str| {
        let p = d.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    };
    let cat_cfg = write("cat.cfg", "surface.kind = catenoid\nsweep.t_step = 0.25\n");
    let s = |p: &Path| p.to_string_lossy().into_owned();
    let (c1, _) = run_bin(&["sweep", "--config", &cat_cfg, "--out", &s(&d.join("a"))]);
    let (c2, _) = run_bin(&["sweep", "--config", &cat_cfg, "--out", &s(&d.join("b"))]);
    let csv_a = std::fs::read(d.join("a/sweep.csv")).unwrap_or_default();
    let csv_b = std::fs::read(d.join("b/sweep.csv")).unwrap_or_default();
    let identical = !csv_a.is_empty() && csv_a == csv_b;
    let header_ok = String::from_utf8_lossy(&csv_a).lines().next() == Some(CSV_HEADER);
    let codes = [
        ("sweep pass", c1.max(c2), 0),
        ("bad config", run_bin(&["sweep", "--config", &write("bad.cfg", "surface.kind = catenoid\nsolver.tol_grad = -1\n")]).0, 2),
        ("unknown key", run_bin(&["mass", "--config", &write("unk.cfg", "surface.kind = plane\nsurface.colour = 1\n")]).0, 2),
        ("mass", run_bin(&["mass", "--config", &cat_cfg, "--out", &s(&d.join("m"))]).0, 0),
        (
            "monotonicity fail",
            run_bin(&["sweep", "--config", &write("dent.cfg", "surface.kind = catenoid\nsurface.bumps = 1.0:0.4:-0.1\nsweep.kappa = false\n"), "--out", &s(&d.join("dent"))]).0,
            3,
        ),
        (
            "non-convergence",
            run_bin(&["sweep", "--config", &write("nc.cfg", "surface.kind = catenoid\nsolver.max_iters = 1\n"), "--out", &s(&d.join("nc"))]).0,
            4,
        ),
        ("verify pass", run_bin(&["verify", "--config", &write("v.cfg", "surface.kind = catenoid\nverify.t = 0, 1\n"), "--out", &s(&d.join("v"))]).0, 0),
        (
            "verify fail",
            run_bin(&["verify", "--config", &write("vf.cfg", "surface.kind = catenoid\nverify.t = 0\nverify.oracle_tol = 1e-9\n"), "--out", &s(&d.join("vf"))]).0,
            1,
        ),
        ("verify resolution", run_bin(&["verify", "--config", &write("vr.cfg", "surface.kind = catenoid\nmesh.rings = 1\n"), "--out", &s(&d.join("vr"))]).0, 5),
        ("flux", run_bin(&["flux", "--config", &cat_cfg, "--out", &s(&d.join("f"))]).0, 0),
    ];
    let partial = std::fs::read_to_string(d.join("nc/sweep.csv")).map(|t| t.starts_with(CSV_HEADER)).unwrap_or(false);
    let wrong: Vec<String> = codes.iter().filter(|(_, got, want)| got != want).map(|(n, got, want)| format!("{n}: {got} != {want}")).collect();
    rep.line(
        11,
        "determinism and interfaces",
        identical && header_ok && partial && wrong.is_empty(),
        format!("byte-identical {identical}, header {header_ok}, partial CSV {partial}, {} exit codes checked{}", codes.len(), if wrong.is_empty() { String::new() } else { format!(", wrong: {}", wrong.join(", ")) }),
    );

    println!("{} of 11 criteria passed", 11 - rep.failed);
    if rep.failed > 0 {
        std::process::exit(1);
    }
}
