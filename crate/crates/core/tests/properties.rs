use proptest::prelude::*;

use hhp_core::circle_map::{make_map, MapDescriptor};
use hhp_core::fourier::{
    analyze, hilbert_transform, inner_product, norm_squared, polarize, synthesize, C64,
};
use hhp_core::linalg::{max_abs, CMatrix};
use hhp_core::period::{period_matrix, siegel_action, siegel_membership, PeriodMatrix};
use hhp_core::pullback::{pullback_matrix, BlockOperator};
use hhp_core::quantum::{
    hs_bracket_check, hs_norm, hs_squared_closed_form, kernel_eval, quantum_derivative_matrix,
    KernelOrder,
};
use hhp_core::symplectic::{compatibility_defect, inner_product_via_form, symplectic_fourier};
use hhp_core::{CircleFunction, SampleGrid};

fn real_function(max_n: usize) -> impl Strategy<Value = CircleFunction> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=max_n).prop_map(|cs| {
        let coeffs: Vec<C64> = cs.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        CircleFunction::real_from_positive(&coeffs)
    })
}

fn complex_function(n: usize) -> impl Strategy<Value = CircleFunction> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2 * n).prop_map(move |cs| {
        let c: Vec<C64> = cs.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        CircleFunction::from_parts(c[..n].to_vec(), c[n..].to_vec()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hilbert_is_an_isometric_involution(f in real_function(32)) {
        let jf = hilbert_transform(&f);
        prop_assert_eq!(norm_squared(&jf), norm_squared(&f));
        prop_assert_eq!((&hilbert_transform(&jf) + &f).max_abs_coeff(), 0.0);
        prop_assert!(jf.is_real());
    }

    #[test]
    fn form_is_alternating_and_compatible(f in real_function(12), g in real_function(12)) {
        let s = symplectic_fourier(&f, &g);
        prop_assert!((s + symplectic_fourier(&g, &f)).norm() < 1e-13);
        prop_assert!(s.im.abs() < 1e-13);
        let scale = 1.0 + norm_squared(&f).sqrt() * norm_squared(&g).sqrt();
        prop_assert!(compatibility_defect(&f, &g).unwrap() < 1e-12 * scale);
    }

    #[test]
    fn inner_product_from_form(f in complex_function(6), g in complex_function(6)) {
        let a = inner_product(&f, &g);
        let b = inner_product_via_form(&f, &g);
        prop_assert!((a - b).norm() < 1e-12);
        let (p, m) = polarize(&f);
        prop_assert!((&(&p + &m) - &f).max_abs_coeff() == 0.0);
    }

    #[test]
    fn analysis_inverts_synthesis(f in complex_function(10), extra in 0usize..20) {
        let grid = SampleGrid::new(21 + extra);
        let back = analyze(&synthesize(&f, &grid), &grid, 10).unwrap();
        prop_assert!(back.max_abs_diff(&f) < 1e-13);
    }

    #[test]
    fn function_json_round_trips(f in real_function(8)) {
        let text = serde_json::to_string(&f).unwrap();
        let back: CircleFunction = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn quantum_operator_laws(f in complex_function(5), g in complex_function(5)) {
        let n = 10;
        let df = quantum_derivative_matrix(&f, n).unwrap();
        let dg = quantum_derivative_matrix(&g, n).unwrap();
        let dsum = quantum_derivative_matrix(&(&f + &g), n).unwrap();
        prop_assert_eq!(max_abs(&(dsum.entries() - (df.entries() + dg.entries()))), 0.0);
        for m in -(n as i64)..=n as i64 {
            for k in -(n as i64)..=n as i64 {
                if m.signum() == k.signum() {
                    prop_assert_eq!(df.entry(m, k), C64::new(0.0, 0.0));
                }
            }
        }
        let hs = hs_norm(&df).unwrap();
        prop_assert!((hs * hs - hs_squared_closed_form(&f)).abs() < 1e-12);
    }

    #[test]
    fn hs_bracket(f in real_function(16)) {
        let b = hs_bracket_check(&f).unwrap();
        prop_assert!(b.lower_ok && b.upper_ok);
    }

    #[test]
    fn identity_action_fixes_z(entries in prop::collection::vec(-0.2..0.2f64, 18)) {
        let z = CMatrix::from_fn(3, 3, |i, j| {
            let (a, b) = (i.min(j), i.max(j));
            C64::new(entries[3 * a + b], entries[9 + 3 * a + b])
        });
        let pm = PeriodMatrix::new(z).unwrap();
        let out = siegel_action(&BlockOperator::identity(3), &pm).unwrap();
        prop_assert!(max_abs(&(out.z() - pm.z())) < 1e-15);
        prop_assert!(siegel_membership(&pm, 1e-15).member);
    }

    #[test]
    fn kernels_are_symmetric(x in 0.0..6.0f64, d in 0.05..2.0f64) {
        let h = make_map(
            &MapDescriptor::flow(CircleFunction::sin(2, 2), 0.1),
            &SampleGrid::new(256),
        ).unwrap();
        for order in [KernelOrder::Log, KernelOrder::Second] {
            let a = kernel_eval(&h, order, x, x + d).unwrap();
            let b = kernel_eval(&h, order, x + d, x).unwrap();
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn moebius_maps_sit_at_the_basepoint(r in 0.0..0.5f64, arg in 0.0..std::f64::consts::TAU, beta in -3.0..3.0f64) {
        let grid = SampleGrid::new(2048);
        let d = MapDescriptor::moebius(C64::from_polar(r, arg), beta);
        let m = make_map(&d, &grid).unwrap();
        let z = period_matrix(&m, 8, &grid).unwrap();
        prop_assert!(max_abs(z.z()) <= 1e-6);
        let t = pullback_matrix(&m, 8, &grid).unwrap();
        prop_assert!(max_abs(t.b()) <= 1e-12);
    }

    #[test]
    fn flows_land_in_the_siegel_disc(f in real_function(4), eps in 0.01..0.1f64) {
        let grid = SampleGrid::new(2048);
        // keep the lift monotone: |eps v'| < 1
        let bound: f64 = f.positive().iter().enumerate().map(|(k, c)| 2.0 * (k + 1) as f64 * c.norm()).sum();
        let eps = eps / bound.max(1.0);
        let m = make_map(&MapDescriptor::flow(f, eps), &grid).unwrap();
        let z = period_matrix(&m, 12, &grid).unwrap();
        let rep = siegel_membership(&z, 1e-6 * max_abs(z.z()) + 1e-10);
        prop_assert!(rep.member, "{:?}", rep);
    }
}
