use std::f64::consts::PI;

use capillary_penrose::flux::{characterization_report, neck_size, EndDescriptor, EndGeometry, Side};
use capillary_penrose::solver::SolverOptions;
use capillary_penrose::support::{AxisProfile, Bump};

fn ends(profile: &AxisProfile) -> Vec<EndDescriptor> {
    [Side::Top, Side::Bottom]
        .iter()
        .enumerate()
        .map(|(i, &s)| EndDescriptor::new(i, EndGeometry::from_profile(profile, s).unwrap(), s, &[1e2, 1e3, 1e4]).unwrap())
        .collect()
}

#[test]
fn catenoid_flux_matches_neck() {
    let p = AxisProfile::catenoid(1.0, 1.0, vec![]).unwrap();
    let neck = neck_size(&p, &p, 16, &SolverOptions::default()).unwrap();
    assert!(!neck.plane);
    assert!((neck.neck_size - 2.0 * PI).abs() < 2e-2 * 2.0 * PI, "{neck:?}");
    let rep = characterization_report(&ends(&p), &neck).unwrap();
    assert!(rep.catenoid_or_plane_candidate, "{rep:?}");
    assert!(rep.penrose_margin.unwrap().abs() < 1e-2);
}

#[test]
fn plane_has_no_neck() {
    let p = AxisProfile::plane();
    let neck = neck_size(&p, &p, 16, &SolverOptions::default()).unwrap();
    assert!(neck.plane && neck.neck_size == 0.0);
    let rep = characterization_report(&ends(&p), &neck).unwrap();
    assert!(rep.catenoid_or_plane_candidate && rep.largest_flux < 1e-10, "{rep:?}");
}

#[test]
fn bumped_support_is_rejected() {
    let p = AxisProfile::curvature_bump(1.0, 1.0, vec![Bump::new(0.6, 0.4, 0.15)]).unwrap();
    let neck = neck_size(&p, &p, 16, &SolverOptions::default()).unwrap();
    let rep = characterization_report(&ends(&p), &neck).unwrap();
    assert!(!rep.catenoid_or_plane_candidate, "{rep:?}");
    assert!(rep.penrose_margin.unwrap() > 1e-2);
}
