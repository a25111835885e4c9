use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use capillary_penrose_ffi::*;

#[test]
fn catenoid_exact_matches_closed_form() {
    let mut q = CpCatenoidQuantities::default();
    assert_eq!(unsafe { cp_catenoid_exact(1.0, 1.0, &mut q) }, CpStatus::Ok);
    assert!((q.free_energy_mass - 1.0).abs() < 1e-14);
    assert!((q.disk_radius - 1f64.cosh()).abs() < 1e-14);
    assert_eq!(unsafe { cp_catenoid_exact(1.0, 1.0, ptr::null_mut()) }, CpStatus::NullPointer);
    assert_eq!(unsafe { cp_catenoid_exact(0.0, 1.0, &mut q) }, CpStatus::InvalidArgument);
    let msg = unsafe { CStr::from_ptr(cp_last_error()) }.to_string_lossy().into_owned();
    assert!(msg.contains("positive"));
}

#[test]
fn exterior_mass_through_handles() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(cp_support_catenoid(2.0, 2.0, &mut s), CpStatus::Ok);
        let radii = [40.0, 80.0, 160.0];
        let mut m = 0.0;
        assert_eq!(cp_exterior_mass(s, radii.as_ptr(), 3, &mut m), CpStatus::Ok);
        assert!((m - 2.0).abs() < 2e-4);
        assert_eq!(cp_exterior_mass(s, radii.as_ptr(), 2, &mut m), CpStatus::InvalidArgument);
        cp_support_free(s);
        let mut p = ptr::null_mut();
        assert_eq!(cp_support_plane(&mut p), CpStatus::Ok);
        assert_eq!(cp_exterior_mass(p, radii.as_ptr(), 3, &mut m), CpStatus::Ok);
        assert_eq!(m, 0.0);
        cp_support_free(p);
        cp_support_free(ptr::null_mut());
    }
}

#[test]
fn sweep_records_and_csv() {
    unsafe {
        let (c, w, a) = ([0.6], [0.4], [0.15]);
        let mut s = ptr::null_mut();
        assert_eq!(cp_support_curvature_bump(1.0, 1.0, c.as_ptr(), w.as_ptr(), a.as_ptr(), 1, &mut s), CpStatus::Ok);
        let mut sw = ptr::null_mut();
        assert_eq!(cp_sweep_run(s, 1.0, 0.5, 12, &mut sw), CpStatus::Ok);
        assert_eq!(cp_sweep_len(sw), 3);
        let mut r = CpSweepRecord::default();
        assert_eq!(cp_sweep_record(sw, 2, &mut r), CpStatus::Ok);
        assert_eq!(r.t, 1.0);
        assert!(r.mf > 0.99 && r.kappa.is_nan());
        assert_eq!(cp_sweep_record(sw, 3, &mut r), CpStatus::InvalidArgument);
        let csv = cp_sweep_csv(sw);
        let text = CStr::from_ptr(csv).to_string_lossy().into_owned();
        assert!(text.starts_with("t,area,lateral_area,mf,"));
        assert_eq!(text.lines().count(), 4);
        cp_string_free(csv);
        cp_sweep_free(sw);
        cp_support_free(s);
    }
}

#[test]
fn plane_sweep_fails_with_partial_handle() {
    unsafe {
        let mut p = ptr::null_mut();
        cp_support_plane(&mut p);
        let mut sw = ptr::null_mut();
        let st = cp_sweep_run(p, 1.0, 0.5, 12, &mut sw);
        assert_ne!(st, CpStatus::Ok);
        assert!(!sw.is_null());
        assert_eq!(cp_sweep_len(sw), 0);
        assert!(!cp_last_error().is_null());
        cp_sweep_free(sw);
        cp_support_free(p);
    }
}

#[test]
fn header_is_valid_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/capillary_penrose.h")).unwrap();
    for name in ["cp_sweep_run", "cp_exterior_mass", "cp_catenoid_exact", "CP_STATUS_PANIC", "typedef struct CpSweep CpSweep"] {
        assert!(header.contains(name), "{name}");
    }
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/header_check.c"))
        .status()
    else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(status.success());
    // link and run against the static library when cargo has built it
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libcapillary_penrose_ffi.a");
    if !lib.exists() {
        return;
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("header_check");
    let built = Command::new("cc")
        .args(["-std=c99", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/header_check.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(built.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("1.000000\n"));
}
