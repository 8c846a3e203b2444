use std::f64::consts::PI;

use gc_twin::circuit;
use gc_twin::*;

fn coarse() -> MeshSpec {
    MeshSpec::new(12, 96, 240)
}

#[test]
fn longitudinal_link_is_invariant_under_arm_rotation() {
    let s = Scenario::default_for(Placement::Longitudinal);
    let grid = FrequencyGrid::log(10e3, 1e6, 3).unwrap();
    let base = circuit::link_response(&s, &grid, &coarse()).unwrap().transfer().unwrap();
    // quarter turn maps azimuthal cells onto cells
    for dtheta in [PI / 2.0, PI, -PI / 2.0] {
        let rot = circuit::link_response(&s.rotated(dtheta), &grid, &coarse())
            .unwrap()
            .transfer()
            .unwrap();
        for (a, b) in base.values.iter().zip(&rot.values) {
            assert!((a - b).norm() <= 1e-6 * a.norm(), "rotation {dtheta}: {a} vs {b}");
        }
    }
}

#[test]
fn off_grid_rotation_stays_within_discretisation_error() {
    let s = Scenario::default_for(Placement::Longitudinal);
    let grid = FrequencyGrid::new(vec![100e3]).unwrap();
    let a = circuit::link_response(&s, &grid, &coarse()).unwrap().transfer().unwrap().values[0];
    let b = circuit::link_response(&s.rotated(0.3), &grid, &coarse())
        .unwrap()
        .transfer()
        .unwrap()
        .values[0];
    assert!((a - b).norm() <= 0.05 * a.norm(), "{a} vs {b}");
}
