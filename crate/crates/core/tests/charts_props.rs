use cfsgauge_core::cfs::{spin_space, CorrelationOperator, SpinSpaceData};
use cfsgauge_core::gauge_fix::{
    build_gauge, charts_coincide_check, gauge_orbit_witness, realize, symmetric_wave_chart, WaveChartPoint,
};
use cfsgauge_core::linalg::{fro, identity, real, CMat};
use cfsgauge_core::manifold::{hs_distance, manifold_dim, ChartCoordinates, ChartFrame};
use cfsgauge_core::{random, Tolerances};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config() -> impl Strategy<Value = (usize, usize, usize)> {
    prop_oneof![Just((1, 1, 4)), Just((1, 1, 6)), Just((2, 1, 6)), Just((2, 2, 8))]
}

fn frame(rng: &mut ChaCha8Rng, f: usize, p: usize, q: usize) -> ChartFrame {
    let x = random::fixed_signature(rng, f, p, q, 1.0, 2.0);
    ChartFrame::new(&x, p, q, Tolerances::default()).unwrap()
}

fn spin(y: CMat, n: usize) -> SpinSpaceData {
    let t = Tolerances::default();
    spin_space(&CorrelationOperator::new(y, n, &t).unwrap(), &t).unwrap()
}

fn coord_distance(a: &ChartCoordinates, b: &ChartCoordinates) -> f64 {
    (fro(&(&a.a - &b.a)).powi(2) + fro(&(&a.b - &b.b)).powi(2)).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn chart_round_trip((p, q, f) in config(), seed in any::<u64>(), scale in 0.0f64..0.4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fr = frame(&mut rng, f, p, q);
        let c = fr.random_coordinates(&mut rng, scale.max(1e-6));
        let y = fr.chart_forward(&c).unwrap();
        // image has the base point's signature and rank
        let (pp, qq) = cfsgauge_core::linalg::signature(&y, 1e-8);
        prop_assert_eq!((pp, qq), (p, q));
        prop_assert!(coord_distance(&fr.chart_inverse(&y).unwrap(), &c) < 1e-9);
    }

    #[test]
    fn transition_maps_agree_and_are_smooth((p, q, f) in config(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fr1 = frame(&mut rng, f, p, q);
        let base2 = fr1.chart_forward(&fr1.random_coordinates(&mut rng, 0.2)).unwrap();
        let fr2 = ChartFrame::new(&base2, p, q, Tolerances::default()).unwrap();
        let c = fr1.random_coordinates(&mut rng, 0.1);
        let dc = fr1.random_coordinates(&mut rng, 1.0);
        let transition = |t: f64| fr2.chart_inverse(&fr1.chart_forward(&ChartCoordinates {
            a: &c.a + &dc.a * real(t),
            b: &c.b + &dc.b * real(t),
        }).unwrap()).unwrap();
        let c2 = transition(0.0);
        // both charts describe the same operator
        let y1 = fr1.chart_forward(&c).unwrap();
        prop_assert!(hs_distance(&fr2.chart_forward(&c2).unwrap(), &y1) < 1e-9);
        // central differences of the transition map converge at second order
        let deriv = |h: f64| {
            let (a, b) = (transition(h), transition(-h));
            ChartCoordinates { a: (&a.a - &b.a) * real(0.5 / h), b: (&a.b - &b.b) * real(0.5 / h) }
        };
        let (d1, d2, d4) = (deriv(1e-2), deriv(5e-3), deriv(2.5e-3));
        let (e1, e2) = (coord_distance(&d1, &d2), coord_distance(&d2, &d4));
        prop_assume!(e2 > 1e-11);
        prop_assert!((2.5..6.0).contains(&(e1 / e2)), "ratio {}", e1 / e2);
    }

    #[test]
    fn charts_coincide_near_base(seed in any::<u64>(), f in prop_oneof![Just(6usize), Just(8)]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sx = spin(random::fixed_signature(&mut rng, f, 2, 2, 1.0, 2.0), 2);
        let samples: Vec<SpinSpaceData> = (0..3).map(|_| spin(random::perturb_regular(&mut rng, sx.point(), 0.05), 2)).collect();
        let rep = charts_coincide_check(&sx, &samples);
        prop_assert_eq!(rep.domain_failures(), 0);
        prop_assert!(rep.max_deviation < 1e-8);
    }

    #[test]
    fn gauge_is_unique_up_to_global_unitary(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sx = spin(random::fixed_signature(&mut rng, 8, 2, 2, 1.0, 2.0), 2);
        let omega: Vec<SpinSpaceData> = (0..3).map(|_| spin(random::perturb_regular(&mut rng, sx.point(), 0.05), 2)).collect();
        let g = build_gauge(&sx, &omega, &identity(4), &sx.krein).unwrap();
        let u = sx.krein.cayley_unitary(&random::with_norm(random::hermitian(&mut rng, 4), 0.7));
        let gu = build_gauge(&sx, &omega, &u, &sx.krein).unwrap();
        for ((a, b), sy) in g.values.iter().zip(&gu.values).zip(&omega) {
            prop_assert!(fro(&(&u * a - b)) < 1e-9);
            // each value realises its point, and any two wave charts of it lie on one orbit
            let psi = WaveChartPoint::from_ambient(&sx, a);
            prop_assert!(fro(&(realize(&sx, &psi) - sy.point())) < 1e-9);
            let psi_u = WaveChartPoint::from_ambient(&sx, b).left_mul(&cfsgauge_core::linalg::inverse(&u).unwrap());
            let w = gauge_orbit_witness(&sx, &psi, &psi_u).unwrap();
            prop_assert!(fro(&(w - identity(4))) < 1e-8);
        }
    }
}

#[test]
fn dimension_formula_matches_jacobian_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (p, q, f) in [(1, 0, 3), (1, 1, 4), (2, 1, 5), (2, 2, 8)] {
        let fr = frame(&mut rng, f, p, q);
        let r = p + q;
        assert_eq!(fr.jacobian_rank_at_origin().unwrap(), 2 * r * f - r * r);
        assert_eq!(manifold_dim(p, q, f).unwrap(), 2 * r * f - r * r);
        assert_eq!(fr.param_count(), 2 * r * f - r * r);
    }
}

#[test]
fn metric_gradient_vanishes_at_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let fr = frame(&mut rng, 4, 1, 1);
    let g1 = fr.metric_gradient_at_origin(1e-2).unwrap();
    let g2 = fr.metric_gradient_at_origin(5e-3).unwrap();
    assert!(g1 < 1e-2, "{g1}");
    assert!((3.5..4.5).contains(&(g1 / g2)), "ratio {}", g1 / g2);
}

#[test]
fn symmetric_chart_of_base_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sx = spin(random::fixed_signature(&mut rng, 7, 2, 2, 1.0, 2.0), 2);
    let phi = symmetric_wave_chart(&sx, &sx).unwrap();
    assert!(phi.point.distance(&WaveChartPoint::base(&sx)) < 1e-12);
}
