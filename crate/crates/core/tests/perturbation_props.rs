use std::f64::consts::PI;

use cfsgauge_core::dirac_box::{DiracBox, DiracBoxConfig, SpacetimePoint};
use cfsgauge_core::linalg::{fro, identity};
use cfsgauge_core::perturbation::{
    apply_local_phase, basis_waves, gauged_basis, perturbed_correlation, phase_first_order_residual,
};
use cfsgauge_core::Tolerances;
use proptest::prelude::*;

fn massless() -> DiracBox {
    DiracBox::new(DiracBoxConfig::new(PI, 1.0 / 2.2, 0.0).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn local_phase_leaves_correlation_and_basis_fixed(
        t in -1.0f64..1.0, a in -PI..PI, b in -PI..PI, c in -PI..PI, lambda in -PI..PI,
    ) {
        let dbox = massless();
        let tol = Tolerances::default();
        let x = SpacetimePoint::new(t, [a, b, c], PI);
        let w = dbox.wave_values(&x);
        let wt = apply_local_phase(&w, lambda);
        prop_assert!(fro(&(perturbed_correlation(&wt) - dbox.correlation_matrix(&x))) < 1e-12);
        let bw = basis_waves(&dbox, &x, &[], &tol).unwrap();
        prop_assert!(bw.max_residual < 1e-10);
        let plain = gauged_basis(&w, &w, &bw.chi, &identity(4), &tol).unwrap();
        let pert = gauged_basis(&w, &wt, &bw.chi, &identity(4), &tol).unwrap();
        prop_assert!(fro(&(pert - plain)) < 1e-9);
    }

    #[test]
    fn first_order_phase_error_is_quadratic(lambda in 0.01f64..0.1) {
        let w = massless().wave_values(&SpacetimePoint::new(0.3, [0.1, 0.2, 0.3], PI));
        // e^{iλ} − 1 − iλ ≈ −λ²/2
        let ratio = phase_first_order_residual(&w, lambda) / (0.5 * lambda * lambda * fro(&w));
        prop_assert!((ratio - 1.0).abs() < 0.05, "ratio {}", ratio);
    }
}
