mod common;

use common::{cp_spec, sup_dist};
use lindblad_relax::dynamics::{evolve, evolve_rk4, steady_state, uniform_grid, SteadyStateKind, Trajectory};
use lindblad_relax::generator::{bloch_affine, BlochVector};
use lindblad_relax::numerics::norm3;
use lindblad_relax::Tolerances;
use proptest::prelude::*;

fn physical_m0() -> impl Strategy<Value = BlochVector> {
    (prop::array::uniform3(-1.0f64..1.0), 0.0f64..=0.5).prop_map(|(d, r)| {
        let n = norm3(&d).max(1e-12);
        BlochVector(d.map(|c| c / n * r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cp_evolution_stays_physical(seed in any::<u64>(), m0 in physical_m0()) {
        let ba = bloch_affine(&cp_spec(seed));
        let tr = evolve(&ba, &m0, &uniform_grid(10.0, 200)).unwrap();
        prop_assert!(tr.worst_min_eig_rho() >= -1e-10, "{}", tr.worst_min_eig_rho());
    }

    #[test]
    fn exponential_and_rk4_agree(seed in any::<u64>(), m0 in physical_m0()) {
        let ba = bloch_affine(&cp_spec(seed));
        let rk = evolve_rk4(&ba, &m0, 2.0, 1e-3).unwrap();
        let ex = evolve(&ba, &m0, rk.times()).unwrap();
        for (a, b) in rk.states().iter().zip(ex.states()) {
            prop_assert!(sup_dist(&a.0, &b.0) <= 1e-6);
        }
    }

    #[test]
    fn semigroup_property(seed in any::<u64>(), m0 in physical_m0(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let ba = bloch_affine(&cp_spec(seed));
        let direct = evolve(&ba, &m0, &[s + t]).unwrap().states()[0];
        let mid = evolve(&ba, &m0, &[s]).unwrap().states()[0];
        let two_step = evolve(&ba, &mid, &[t]).unwrap().states()[0];
        prop_assert!(sup_dist(&direct.0, &two_step.0) < 1e-12);
    }

    #[test]
    fn steady_state_is_a_fixed_point(seed in any::<u64>()) {
        let ba = bloch_affine(&cp_spec(seed));
        let ss = steady_state(&ba, &Tolerances::default());
        prop_assert_eq!(ss.kind, SteadyStateKind::Unique);
        prop_assert!(norm3(&ba.derivative(&ss.m.0)) < 1e-10);
        prop_assert!(ss.m.is_physical() || ss.m.norm() < 0.5 + 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact(seed in any::<u64>(), m0 in physical_m0()) {
        let ba = bloch_affine(&cp_spec(seed));
        let tr = evolve(&ba, &m0, &uniform_grid(5.0, 33)).unwrap();
        let back = Trajectory::from_csv(&tr.to_csv()).unwrap();
        prop_assert_eq!(back.times(), tr.times());
        prop_assert_eq!(back.states(), tr.states());
    }

    #[test]
    fn cp_relaxation_contracts_towards_steady_state(seed in any::<u64>(), m0 in physical_m0()) {
        let ba = bloch_affine(&cp_spec(seed));
        let rs = lindblad_relax::spectrum::relaxation_spectrum(&ba, &Tolerances::default()).unwrap();
        let t_max = lindblad_relax::dynamics::default_t_max(&rs);
        let ss = steady_state(&ba, &Tolerances::default()).m;
        let tr = evolve(&ba, &m0, &uniform_grid(t_max, 64)).unwrap();
        let d0 = sup_dist(&m0.0, &ss.0);
        let d1 = sup_dist(&tr.last().unwrap().1 .0, &ss.0);
        prop_assume!(d0 > 1e-9);
        prop_assert!(d1 < d0);
    }
}

#[test]
fn amplitude_damping_closed_form() {
    let spec = lindblad_relax::generator::GeneratorSpec::new([0.0; 3], [0.5, 0.5, 1.0], [0.0, 0.0, -1.0], [0.0; 3]);
    let tr = evolve(&bloch_affine(&spec), &BlochVector([0.0, 0.0, 0.5]), &uniform_grid(10.0, 101)).unwrap();
    for (t, m) in tr.times().iter().zip(tr.states()) {
        assert!((m.0[2] - (-0.5 + (-t).exp())).abs() < 1e-13);
    }
}

#[test]
fn malformed_csv_is_rejected() {
    assert!(Trajectory::from_csv("t,mx,my,mz\n0,0,0,0\n").is_err());
    assert!(Trajectory::from_csv("t,mx,my,mz,min_eig_rho\n0,0,0,x,0.5\n").is_err());
    assert!(Trajectory::from_csv("t,mx,my,mz,min_eig_rho\n1,0,0,0,0.5\n0,0,0,0,0.5\n").is_err());
}
