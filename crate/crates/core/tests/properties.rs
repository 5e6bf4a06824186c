use std::f64::consts::{PI, TAU};

use holonomy_lab::builtin;
use holonomy_lab::connection::{curvature_fd, ym_energy};
use holonomy_lab::geometry::{concat, reverse, winding_number, PathSpec, PlanePoint, PunctureSet};
use holonomy_lab::linalg::{self, c, expm, random_unitary, CMat};
use holonomy_lab::monodromy::{abelian_oracle, evaluate_word, monodromy_representation, LoopWord};
use holonomy_lab::oracle::uniform_midpoint_product;
use holonomy_lab::transport::{compose_transport, parallel_transport};
use holonomy_lab::vacua::{
    canonical_vacuum_cyclic, classify_z2, enumerate_vacua_z2, equivalent_reps_cyclic,
};
use holonomy_lab::wong::{wong_transport, wong_transport_components, SpinState};
use holonomy_lab::{ConnectionSpec, GridRegion, LieBasis};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point() -> impl Strategy<Value = PlanePoint> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y)| PlanePoint::new(x, y))
}

fn hermitian(z: f64, x: f64, y: f64) -> CMat {
    builtin::hermitian_traceless(z, x, y)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn circle_winding_equals_turns(center in point(), radius in 0.1..3.0f64, turns in -3i32..=3, start in 0.0..TAU) {
        prop_assume!(turns != 0);
        let path = PathSpec::circle(center, radius, turns, start).unwrap();
        prop_assert_eq!(winding_number(&path, center).unwrap(), turns as i64);
        let outside = center + PlanePoint::new(radius * 1.5 + 0.1, 0.0);
        prop_assert_eq!(winding_number(&path, outside).unwrap(), 0);
    }

    #[test]
    fn reversal_negates_winding(pts in prop::collection::vec(point(), 3..7), probe in point()) {
        let mut pts = pts;
        pts.push(pts[0]);
        let path = PathSpec::polyline(pts).unwrap();
        prop_assume!(path.distance_to(probe) > 1e-3);
        let w = winding_number(&path, probe).unwrap();
        prop_assert_eq!(winding_number(&reverse(&path), probe).unwrap(), -w);
    }

    #[test]
    fn winding_adds_under_concatenation(r1 in 0.5..2.0f64, r2 in 0.5..2.0f64, t1 in -2i32..=2, t2 in -2i32..=2) {
        prop_assume!(t1 != 0 && t2 != 0);
        // both circles start at the origin
        let a = PathSpec::circle(PlanePoint::new(r1, 0.0), r1, t1, PI).unwrap();
        let b = PathSpec::circle(PlanePoint::new(-r2, 0.0), r2, t2, 0.0).unwrap();
        let ab = concat(&a, &b).unwrap();
        for probe in [PlanePoint::new(r1, 0.0), PlanePoint::new(-r2, 0.0)] {
            let sum = winding_number(&a, probe).unwrap() + winding_number(&b, probe).unwrap();
            prop_assert_eq!(winding_number(&ab, probe).unwrap(), sum);
        }
    }

    #[test]
    fn evaluation_stays_on_reversed_path(center in point(), radius in 0.1..2.0f64, start in 0.0..TAU, sweep in -6.0..6.0f64, t in 0.0..1.0f64) {
        prop_assume!(sweep.abs() > 1e-3);
        let arc = PathSpec::arc(center, radius, start, sweep).unwrap();
        let fwd = arc.evaluate(t).point;
        let back = reverse(&arc).evaluate(1.0 - t).point;
        prop_assert!(fwd.distance(back) < 1e-12);
    }

    #[test]
    fn expm_of_negation_is_inverse(entries in prop::collection::vec(-2.0..2.0f64, 18)) {
        let a = CMat::from_fn(3, 3, |i, j| c(entries[2 * (3 * i + j)], entries[2 * (3 * i + j) + 1]));
        let prod = expm(&a) * expm(&(-&a));
        prop_assert!(linalg::dist(&prod, &linalg::identity(3)) < 1e-10 * (1.0 + linalg::frobenius(&expm(&a))).powi(2));
    }

    #[test]
    fn z2_multiplicities_sum_to_rank(signs in prop::collection::vec(any::<bool>(), 0..8), seed in any::<u64>()) {
        let m = signs.len();
        let d = linalg::diag(&signs.iter().map(|&s| c(if s { 1.0 } else { -1.0 }, 0.0)).collect::<Vec<_>>());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_unitary(&mut rng, m);
        let class = classify_z2(&(&h * d * h.adjoint()), 1e-9).unwrap();
        prop_assert_eq!(class.plus + class.minus, m);
        prop_assert_eq!(class.plus, signs.iter().filter(|&&s| s).count());
        prop_assert_eq!(enumerate_vacua_z2(m).len(), m + 1);
    }

    #[test]
    fn cyclic_class_is_conjugation_invariant(phases in prop::collection::vec(0.0..TAU, 1..6), seed in any::<u64>()) {
        let m = phases.len();
        let u = linalg::diag(&phases.iter().map(|&t| c(0.0, t).exp()).collect::<Vec<_>>());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_unitary(&mut rng, m);
        let a = canonical_vacuum_cyclic(&u, 1e-9).unwrap();
        let b = canonical_vacuum_cyclic(&(&s * &u * s.adjoint()), 1e-9).unwrap();
        prop_assert!(a.distance(&b) < 1e-8);
        prop_assert!(b.eigenphases.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(b.eigenphases.iter().all(|&p| (0.0..TAU).contains(&p)));
    }

    #[test]
    fn cyclic_equivalence_is_an_equivalence(seed in any::<u64>(), m in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, m);
        let (s1, s2) = (random_unitary(&mut rng, m), random_unitary(&mut rng, m));
        let v = &s1 * &u * s1.adjoint();
        let w = &s2 * &v * s2.adjoint();
        let tol = 1e-8;
        prop_assert!(equivalent_reps_cyclic(&u, &u, tol).unwrap());
        prop_assert_eq!(equivalent_reps_cyclic(&u, &v, tol).unwrap(), equivalent_reps_cyclic(&v, &u, tol).unwrap());
        prop_assert!(equivalent_reps_cyclic(&u, &v, tol).unwrap());
        prop_assert!(equivalent_reps_cyclic(&v, &w, tol).unwrap());
        prop_assert!(equivalent_reps_cyclic(&u, &w, tol).unwrap());
        let other = random_unitary(&mut rng, m);
        let a = equivalent_reps_cyclic(&u, &other, tol).unwrap();
        let b = equivalent_reps_cyclic(&other, &u, tol).unwrap();
        prop_assert_eq!(a, b);
    }
}

fn diagonal_fuchsian(entries: &[(f64, f64)], poles: &[PlanePoint]) -> (ConnectionSpec, Vec<CMat>) {
    let residues: Vec<CMat> = entries
        .iter()
        .map(|&(a, b)| linalg::diag(&[c(a, 0.0), c(b, 0.0)]))
        .collect();
    let set = PunctureSet::unlabelled(poles.to_vec()).unwrap();
    (
        ConnectionSpec::fuchsian_log(set, residues.clone(), vec![]).unwrap(),
        residues,
    )
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn abelian_generators_match_oracle(e in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..4)) {
        let poles: Vec<PlanePoint> = (0..e.len()).map(|k| PlanePoint::new(1.5 * k as f64, 0.3 * k as f64)).collect();
        let (conn, residues) = diagonal_fuchsian(&e, &poles);
        let tol = 1e-10;
        let rep = monodromy_representation(&conn, None, tol, false).unwrap();
        for (k, label) in conn.punctures().labels().iter().enumerate() {
            let mut w = vec![0i64; residues.len()];
            w[k] = 1;
            let oracle = abelian_oracle(&residues, &w).unwrap();
            let dev = linalg::dist(&rep.generators[label], &oracle);
            prop_assert!(dev < 10.0 * rep.error_estimates[label] + 1e-8, "dev {dev:e}");
        }
    }

    #[test]
    fn abelian_words_follow_exponent_sums(e in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..4), letters in prop::collection::vec((0usize..3, any::<bool>()), 0..6)) {
        let poles: Vec<PlanePoint> = (0..e.len()).map(|k| PlanePoint::new(1.5 * k as f64, 0.0)).collect();
        let (conn, residues) = diagonal_fuchsian(&e, &poles);
        let rep = monodromy_representation(&conn, None, 1e-10, false).unwrap();
        let labels = conn.punctures().labels().to_vec();
        let word = LoopWord::new(
            letters
                .iter()
                .filter(|(k, _)| *k < labels.len())
                .map(|&(k, inv)| (labels[k].clone(), if inv { -1 } else { 1 }))
                .collect(),
        );
        let sums = word.exponent_sums();
        let w: Vec<i64> = labels.iter().map(|l| sums.get(l).copied().unwrap_or(0)).collect();
        let dev = linalg::dist(&evaluate_word(&rep, &word).unwrap(), &abelian_oracle(&residues, &w).unwrap());
        prop_assert!(dev < 1e-7, "dev {dev:e}");
    }

    #[test]
    fn transport_then_reverse_is_identity(z in -0.4..0.4f64, x in -0.4..0.4f64, y in -0.4..0.4f64, a in point(), b in point()) {
        let conn = ConnectionSpec::fuchsian_log(
            PunctureSet::unlabelled(vec![PlanePoint::new(0.1, 0.2)]).unwrap(),
            vec![hermitian(z, x, y)],
            vec![],
        ).unwrap();
        let path = PathSpec::polyline(vec![a, b, PlanePoint::new(2.5, -2.5)]).unwrap();
        prop_assume!(path.distance_to(PlanePoint::new(0.1, 0.2)) > 0.05);
        let tol = 1e-10;
        let fwd = parallel_transport(&conn, &path, tol).unwrap();
        let back = parallel_transport(&conn, &reverse(&path), tol).unwrap();
        let both = compose_transport(&fwd, &back).unwrap();
        let scale = linalg::frobenius(&fwd.matrix) * linalg::frobenius(&back.matrix);
        prop_assert!(linalg::dist(&both.matrix, &linalg::identity(2)) < 1e-8 * scale.max(1.0));
    }

    #[test]
    fn concatenation_composes(radius in 0.5..2.5f64, split in 0.3..6.0f64) {
        let conn = builtin::two_pole_noncommuting();
        let o = PlanePoint::new(0.0, 0.0);
        prop_assume!((radius - 1.0).abs() > 0.05);
        let a = PathSpec::arc(o, radius, 0.0, split).unwrap();
        let b = PathSpec::arc(o, radius, split, TAU - split).unwrap();
        let tol = 1e-9;
        let whole = parallel_transport(&conn, &concat(&a, &b).unwrap(), tol).unwrap();
        let ta = parallel_transport(&conn, &a, tol).unwrap();
        let tb = parallel_transport(&conn, &b, tol).unwrap();
        let composed = compose_transport(&ta, &tb).unwrap();
        prop_assert!(linalg::dist(&whole.matrix, &composed.matrix) < 1e-7);
    }

    #[test]
    fn unitary_specs_give_unitary_holonomy(flux in -6.0..6.0f64, lambda in -2.0..2.0f64, radius in 0.2..3.0f64, turns in 1i32..3) {
        let path = PathSpec::circle(PlanePoint::new(0.05, -0.02), radius, turns, 0.7).unwrap();
        prop_assume!(path.distance_to(PlanePoint::ORIGIN) > 1e-2);
        for conn in [ConnectionSpec::aharonov_bohm(flux), ConnectionSpec::aharonov_casher(lambda)] {
            prop_assert!(conn.has_unitary_monodromy());
            let t = parallel_transport(&conn, &path, 1e-10).unwrap();
            prop_assert!(t.unitarity_defect() < 1e-8);
        }
    }

    #[test]
    fn gauge_covariance(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_unitary(&mut rng, 2);
        let conn = builtin::two_pole_noncommuting();
        let base = PlanePoint::new(0.0, -2.0);
        let rep = monodromy_representation(&conn, Some(base), 1e-9, false).unwrap();
        let moved = monodromy_representation(&conn.conjugated(&h).unwrap(), Some(base), 1e-9, false).unwrap();
        for (label, g) in &rep.generators {
            prop_assert!(linalg::dist(&moved.generators[label], &(&h * g * h.adjoint())) < 1e-6);
        }
    }

    #[test]
    fn homotopic_loops_agree(dx in -0.3..0.3f64, dy in -0.3..0.3f64, radius in 1.6..2.4f64) {
        // circles through the common basepoint (3, 0) that enclose both poles
        let conn = builtin::two_pole_noncommuting();
        let center = PlanePoint::new(dx, dy);
        let base = PlanePoint::new(3.0, 0.0);
        let spoke = |p: PlanePoint| PathSpec::polyline(vec![base, p]).unwrap();
        let lasso = |center: PlanePoint, r: f64| {
            let start = center + PlanePoint::new(r, 0.0);
            PathSpec::concat_all(vec![spoke(start), PathSpec::circle(center, r, 1, 0.0).unwrap(), reverse(&spoke(start))]).unwrap()
        };
        let a = parallel_transport(&conn, &lasso(center, radius), 1e-9).unwrap();
        let b = parallel_transport(&conn, &lasso(PlanePoint::ORIGIN, 2.0), 1e-9).unwrap();
        prop_assert!(linalg::dist(&a.matrix, &b.matrix) < 1e-6);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn holomorphic_builtins_have_no_curvature(p in point()) {
        for (name, conn) in builtin::all() {
            if !conn.is_flat_by_construction() || conn.punctures().distance_to(p) <= 0.1 {
                continue;
            }
            let f = curvature_fd(&conn, p, 1e-6).unwrap();
            prop_assert!(linalg::frobenius(&f) < 1e-6, "{name} at {p:?}: {:e}", linalg::frobenius(&f));
        }
    }

    #[test]
    fn yang_mills_energy_is_nonnegative(x0 in -3.0..3.0f64, y0 in -3.0..3.0f64, w in 0.1..2.0f64, h in 0.1..2.0f64) {
        let region = GridRegion::new(x0, x0 + w, y0, y0 + h, 12, 9).unwrap();
        for (_, conn) in builtin::all() {
            if let Ok(e) = ym_energy(&conn, &region) {
                prop_assert!(e >= 0.0);
            }
        }
    }
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn component_and_matrix_forms_agree(i in prop::array::uniform3(-1.0..1.0f64), lambda in -1.0..1.0f64, radius in 0.3..2.0f64) {
        let su2 = LieBasis::su2();
        let conn = ConnectionSpec::aharonov_casher(lambda);
        let path = PathSpec::circle(PlanePoint::new(0.1, 0.0), radius, 1, 0.4).unwrap();
        prop_assume!(path.distance_to(PlanePoint::ORIGIN) > 0.05);
        let tol = 1e-9;
        let i0 = SpinState::from_real_components(&su2, &i).unwrap();
        let m = wong_transport(&conn, &su2, &i0, &path, tol).unwrap();
        let comps = wong_transport_components(&conn, &su2, &i0.components, &path, tol).unwrap();
        let gap = comps.iter().zip(&m.final_state.components).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(gap < 10.0 * (tol + tol), "gap {gap:e}");
        prop_assert!(m.spectral_drift < 10.0 * tol);
    }
}

proptest! {
    #![proptest_config(config(10))]

    #[test]
    fn spin_transport_is_linear(i in prop::array::uniform3(-1.0..1.0f64), j in prop::array::uniform3(-1.0..1.0f64), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let su2 = LieBasis::su2();
        let conn = builtin::single_pole();
        let path = builtin::unit_circle();
        let tol = 1e-10;
        let run = |x: [f64; 3]| wong_transport(&conn, &su2, &SpinState::from_real_components(&su2, &x).unwrap(), &path, tol).unwrap().final_state.matrix;
        let mixed: [f64; 3] = std::array::from_fn(|k| a * i[k] + b * j[k]);
        let lhs = run(mixed);
        let rhs = run(i) * Complex64::from(a) + run(j) * Complex64::from(b);
        prop_assert!(linalg::dist(&lhs, &rhs) < 1e-9);
    }
}

#[test]
fn halving_tolerance_never_moves_away_from_the_oracle() {
    let (conn, residues) = diagonal_fuchsian(
        &[(0.4, -0.7), (-0.2, 0.9)],
        &[PlanePoint::new(-1.0, 0.0), PlanePoint::new(1.0, 0.5)],
    );
    // loop around both poles
    let path = PathSpec::circle(PlanePoint::new(0.0, 0.2), 2.5, 1, 0.0).unwrap();
    let oracle = abelian_oracle(&residues, &[1, 1]).unwrap();
    let mut prev = f64::INFINITY;
    let mut tol = 1e-3;
    while tol > 1e-11 {
        let dev = linalg::dist(
            &parallel_transport(&conn, &path, tol).unwrap().matrix,
            &oracle,
        );
        assert!(dev <= prev + 1e-13, "tol {tol:e}: {dev:e} > {prev:e}");
        prev = dev;
        tol /= 2.0;
    }
}

#[test]
fn midpoint_stepping_converges_at_second_order() {
    for (name, conn, path) in [
        (
            "two-pole",
            builtin::two_pole_noncommuting(),
            builtin::big_circle(),
        ),
        (
            "three-solenoids",
            builtin::three_solenoids(),
            PathSpec::circle(PlanePoint::new(0.0, 0.4), 2.5, 1, 0.0).unwrap(),
        ),
        (
            "single-pole",
            builtin::single_pole(),
            PathSpec::rectangle(-1.0, 1.5, -0.7, 1.2).unwrap(),
        ),
    ] {
        let n = 1024;
        let a = uniform_midpoint_product(&conn, &path, n).unwrap();
        let b = uniform_midpoint_product(&conn, &path, 2 * n).unwrap();
        let cc = uniform_midpoint_product(&conn, &path, 4 * n).unwrap();
        let (d1, d2) = (linalg::dist(&a, &b), linalg::dist(&b, &cc));
        if d2 < 1e-13 {
            continue;
        }
        let ratio = d1 / d2;
        assert!((3.0..5.0).contains(&ratio), "{name}: ratio {ratio}");
    }
}
