use core::f64::consts::PI;

use shadowphase_core::eigensolver::{ground_pauli_expectation, ground_space, EigensolverConfig};
use shadowphase_core::features::{annni_observables, kh_quadrant_observables, plaquette_observable};
use shadowphase_core::hamiltonians::{build_annni, build_kitaev_heisenberg, AnnniParams, KhParams};

#[test]
fn ferromagnetic_corner_has_strong_zz_order() {
    let h = build_annni(&AnnniParams::new(12, 0.1, 0.1).unwrap()).unwrap();
    let gs = ground_space(&h, &EigensolverConfig::default()).unwrap();
    let set = annni_observables(12).unwrap();
    for (p, name) in set.observables.iter().zip(&set.names) {
        let v = ground_pauli_expectation(&gs, p).unwrap();
        assert!((-1.0..=1.0).contains(&v), "{name} = {v}");
        if name.starts_with("zz") {
            assert!(v >= 0.8, "{name} = {v}");
        }
    }
}

fn kh_ground(phi: f64) -> shadowphase_core::eigensolver::GroundSpace {
    let h = build_kitaev_heisenberg(&KhParams::new(6, phi).unwrap()).unwrap();
    ground_space(&h, &EigensolverConfig::default()).unwrap()
}

#[test]
fn plaquette_is_order_unity_only_in_the_spin_liquid() {
    let w = plaquette_observable(6, 1).unwrap();
    let fk = ground_pauli_expectation(&kh_ground(1.5 * PI), &w).unwrap();
    let fm = ground_pauli_expectation(&kh_ground(PI), &w).unwrap();
    assert!(fk.abs() > 0.9, "{fk}");
    assert!(fm.abs() < 0.1, "{fm}");
    assert!(fk.abs() >= 3.0 * fm.abs());
}

#[test]
fn rung_correlators_are_antiferromagnetic_in_the_rung_singlet_phase() {
    let gs = kh_ground(0.0);
    let set = kh_quadrant_observables(6).unwrap();
    let mut rungs = 0;
    for (p, name) in set.observables.iter().zip(&set.names) {
        let v = ground_pauli_expectation(&gs, p).unwrap();
        assert!((-1.0..=1.0).contains(&v));
        let mut sites = name[3..].split('_');
        let (a, b) = (sites.next().unwrap(), sites.next().unwrap());
        if a[..a.len() - 1] == b[..b.len() - 1] {
            assert!(v < 0.0, "{name} = {v}");
            rungs += 1;
        }
    }
    assert_eq!(rungs, 18);
}
