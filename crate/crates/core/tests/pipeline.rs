use std::f64::consts::PI;

use capillary_penrose::axisym::{axisym_solve, catenoid_exact};
use capillary_penrose::energy::free_energy_mass;
use capillary_penrose::mesh::curvature::gauss_bonnet_residual;
use capillary_penrose::mesh::generate;
use capillary_penrose::mesh::io::{read_capmesh, write_capmesh};
use capillary_penrose::mesh::TriSurface;
use capillary_penrose::solver::{continuation_sweep, default_seed, solve_outermost_disk, SolverError, SolverOptions};
use capillary_penrose::support::{AxisProfile, Bump};

#[test]
fn capmesh_round_trip_keeps_topology() {
    let band = generate::catenoid_band(1.0, -0.5, 0.7, 24, 6);
    let back = read_capmesh(&write_capmesh(&band)).unwrap();
    assert_eq!(back.vertices, band.vertices);
    assert_eq!(back.boundary_loops.len(), 2);
    assert_eq!(back.euler_characteristic(), 0);
    assert!(gauss_bonnet_residual(&back).unwrap() < 1e-10);
}

#[test]
fn disjoint_disks_are_separate_components() {
    let a = generate::flat_disk(1.0, 0.0, 4);
    let b = a.transformed(1.0, capillary_penrose::mesh::Vec3::new(5.0, 0.0, 0.0));
    let n = a.n_vertices();
    let mut v = a.vertices.clone();
    v.extend(b.vertices.iter().copied());
    let mut t = a.triangles.clone();
    t.extend(b.triangles.iter().map(|tri| [tri[0] + n, tri[1] + n, tri[2] + n]));
    let both = TriSurface::new(v, t).unwrap();
    let comps = both.components();
    assert_eq!(comps.len(), 2);
    assert!(comps.iter().all(|c| c.euler_characteristic() == 1));
    assert!((both.area().unwrap() - 2.0 * a.area().unwrap()).abs() < 1e-12);
}

#[test]
fn catenoid_sweep_scales_with_mass() {
    let opts = SolverOptions::default();
    for m in [0.5, 2.0] {
        let p = AxisProfile::catenoid(m, m, vec![]).unwrap();
        let out = continuation_sweep(&p, &[0.0, 0.5, 1.0], default_seed(&p, 12).unwrap(), &opts).unwrap();
        for (rec, st) in out.records.iter().zip(&out.states) {
            assert!((rec.mf / m - 1.0).abs() < 1e-3, "m = {m}, t = {}: {}", rec.t, rec.mf);
            assert_eq!(rec.mf, free_energy_mass(st));
        }
        let exact = catenoid_exact(m, 0.0);
        assert!((out.records[0].area / exact.disk_area - 1.0).abs() < 2e-3);
    }
}

#[test]
fn plane_has_no_outermost_disk() {
    let p = AxisProfile::plane();
    let r = solve_outermost_disk(&p, default_seed(&p, 8).unwrap(), &SolverOptions::default());
    assert!(matches!(r, Err(SolverError::NoOutermostDisk { .. })));
}

#[test]
fn dented_support_breaks_monotonicity() {
    let p = AxisProfile::catenoid(1.0, 1.0, vec![Bump::new(1.0, 0.4, -0.1)]).unwrap();
    let grid: Vec<f64> = (0..=15).map(|k| k as f64 * 0.1).collect();
    let out = continuation_sweep(&p, &grid, default_seed(&p, 16).unwrap(), &SolverOptions::default()).unwrap();
    let drop = out.records.windows(2).map(|w| w[0].mf - w[1].mf).fold(0.0, f64::max);
    assert!(drop > 1e-2, "{drop}");
    assert!(out.records.iter().any(|r| r.branch_suspect));
}

#[test]
fn oracle_matches_closed_form_on_the_catenoid() {
    let p = AxisProfile::catenoid(1.0, 1.0, vec![]).unwrap();
    for t in [0.0, 0.7, 2.0] {
        let c = axisym_solve(&p, t).unwrap();
        let mf = (c.area / PI).sqrt() / t.cosh();
        assert!((mf - 1.0).abs() < 1e-8, "t = {t}: {mf}");
    }
}
