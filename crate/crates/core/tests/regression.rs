//! Values pinned from earlier runs. A change here means the numerics moved.

use hhp_core::circle_map::{make_map, qs_ratio, radial_dilatation, MapDescriptor};
use hhp_core::linalg::max_abs;
use hhp_core::period::{equivariance_defect, period_matrix, siegel_action, siegel_membership};
use hhp_core::pullback::{operator_norm_estimate, pullback_matrix};
use hhp_core::{CircleFunction, SampleGrid, C64};

fn grid() -> SampleGrid {
    SampleGrid::new(4096)
}

#[test]
fn flow_sin_half_distortion() {
    let f = make_map(
        &MapDescriptor::flow(CircleFunction::sin(1, 1), 0.5),
        &grid(),
    )
    .unwrap();
    let qs = qs_ratio(&f, &[0.1, 0.5, 1.0]).unwrap();
    assert!((qs - 1.678686349652424).abs() < 1e-9, "{qs}");
    // phi' = 1 + 0.5 cos: 1 / min = 2
    assert!((radial_dilatation(&f).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn moebius_operator_norm() {
    let m = make_map(&MapDescriptor::moebius(C64::new(0.3, 0.0), 0.0), &grid()).unwrap();
    let norm = operator_norm_estimate(&pullback_matrix(&m, 16, &grid()).unwrap());
    assert!((norm - 1.0).abs() < 1e-12, "{norm}");
}

#[test]
fn flow_sin_2t_siegel_report() {
    let g = grid();
    let s = make_map(&MapDescriptor::flow(CircleFunction::sin(2, 2), 0.05), &g).unwrap();
    let z = period_matrix(&s, 16, &g).unwrap();
    let rep = siegel_membership(&z, 1e-6);
    assert!(rep.member);
    assert!(rep.symmetry_defect <= 1e-6);
    assert!((rep.sigma_max - 0.025043175052189316).abs() < 1e-10);
    assert!((rep.min_eig_i_minus_zzbar - 0.9993728393833052).abs() < 1e-10);
    assert!((rep.condition_of_a.unwrap() - 1.094619823503803).abs() < 1e-9);
    // first order: Z_11 = -eps / 2
    assert!((z.z()[(0, 0)] - C64::new(-0.02503135465769951, 0.0)).norm() < 1e-10);
}

#[test]
fn frozen_composition_order() {
    // Z(phi o psi) = action(T_psi, Z(phi))
    let g = grid();
    let phi = make_map(&MapDescriptor::flow(CircleFunction::sin(2, 2), 0.05), &g).unwrap();
    let psi = make_map(&MapDescriptor::moebius(C64::new(0.2, 0.0), 0.0), &g).unwrap();
    let d = equivariance_defect(&phi, &psi, 16, &g).unwrap();
    assert!(d <= 1e-9, "{d}");

    let comp = make_map(
        &MapDescriptor::compose(phi.descriptor().clone(), psi.descriptor().clone()),
        &g,
    )
    .unwrap();
    let acted = siegel_action(
        &pullback_matrix(&psi, 16, &g).unwrap(),
        &period_matrix(&phi, 16, &g).unwrap(),
    )
    .unwrap();
    let z = period_matrix(&comp, 16, &g).unwrap();
    assert!(max_abs(&(acted.z() - z.z())) <= 1e-9);
}
