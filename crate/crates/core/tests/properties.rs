use std::f64::consts::PI;

use proptest::prelude::*;

use capillary_penrose::axisym::catenoid_exact;
use capillary_penrose::cli::ExperimentConfig;
use capillary_penrose::flux::{flux, EndGeometry, EndLoop, Side};
use capillary_penrose::stability::random_direction;
use capillary_penrose::support::mass::fit_power_tail;
use capillary_penrose::support::AxisProfile;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn catenoid_flux_is_loop_independent(m in 0.2f64..5.0, scale in 3.0f64..50.0, amp in 0.0f64..0.5, lobes in 1u32..7, phase in 0.0f64..6.3) {
        let p = AxisProfile::catenoid(m, m, vec![]).unwrap();
        let end = EndGeometry::from_profile(&p, Side::Top).unwrap();
        let lp = EndLoop::Star { radius: scale * m, amplitude: amp, lobes, phase };
        let f = flux(&end, &lp).unwrap();
        prop_assert!((f.z - 2.0 * PI * m).abs() < 1e-9 * m);
        prop_assert!(f.x.hypot(f.y) < 1e-9 * m);
    }

    #[test]
    fn flat_disks_on_catenoids_have_constant_free_energy_mass(m in 0.1f64..10.0, h in 0.0f64..4.0) {
        let q = catenoid_exact(m, h * m);
        prop_assert!((q.free_energy_mass - m).abs() < 1e-12 * m);
        prop_assert!((q.profile_convexity - PI * m * m).abs() < 1e-10 * m * m);
    }

    #[test]
    fn power_tail_fit_recovers_synthetic_decay(m in -3.0f64..3.0, c in -2.0f64..2.0, q in 0.6f64..1.9) {
        let radii = [10.0, 20.0, 40.0, 80.0, 160.0];
        let vals: Vec<f64> = radii.iter().map(|r: &f64| m + c * r.powf(-q)).collect();
        let (fm, _, _, res) = fit_power_tail(&radii, &vals);
        prop_assert!((fm - m).abs() < 1e-6 * (1.0 + c.abs()));
        prop_assert!(res < 1e-8);
    }

    #[test]
    fn tolerances_must_be_positive(tol in -1.0f64..1.0) {
        let text = format!("surface.kind = catenoid\nsolver.tol_grad = {tol:e}\n");
        let parsed = ExperimentConfig::parse(&text);
        prop_assert_eq!(parsed.is_ok(), tol > 0.0);
        if let Ok(c) = parsed {
            prop_assert_eq!(c.solver.tol_grad, tol);
        }
    }

    #[test]
    fn seeded_directions_are_reproducible(n in 1usize..400, seed in any::<u64>()) {
        let a = random_direction(n, seed);
        prop_assert_eq!(&a, &random_direction(n, seed));
        prop_assert!(a.iter().all(|v| v.abs() <= 1.0));
    }
}
