use hydromission_core::bbo::{species_step, stationary};
use hydromission_core::env::{CurrentField, CurrentSample, VortexParams};
use hydromission_core::pathplan::{compose_velocity, evaluate_spline};
use hydromission_core::Vec3;
use proptest::prelude::*;

/// de Boor's algorithm on a clamped uniform knot vector.
fn de_boor(ctrl: &[Vec3], order: usize, u: f64) -> Vec3 {
    let n = ctrl.len();
    let p = order - 1;
    let spans = n - p;
    let mut t = vec![0.0; p + 1];
    t.extend((1..spans).map(|i| i as f64));
    t.extend(std::iter::repeat_n(spans as f64, p + 1));
    // Knot span k with t[k] <= u < t[k+1], clamped to the last span.
    let k = if u >= spans as f64 { n - 1 } else { (p..n).rev().find(|&k| t[k] <= u).unwrap() };
    let mut d: Vec<Vec3> = (0..=p).map(|j| ctrl[j + k - p]).collect();
    for r in 1..=p {
        for j in (r..=p).rev() {
            let i = j + k - p;
            let a = (u - t[i]) / (t[i + p + 1 - r] - t[i]);
            d[j] = d[j - 1] * (1.0 - a) + d[j] * a;
        }
    }
    d[p]
}

fn vec3() -> impl Strategy<Value = Vec3> {
    (-5e3..5e3f64, -5e3..5e3f64, 0.0..1e3f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

proptest! {
    #[test]
    fn spline_samples_match_de_boor(
        ctrl in prop::collection::vec(vec3(), 3..9),
        order in 2usize..5,
        per_span in 1usize..25,
    ) {
        prop_assume!(ctrl.len() >= order);
        let pts = evaluate_spline(&ctrl, order, per_span).unwrap();
        let spans = ctrl.len() + 1 - order;
        prop_assert_eq!(pts.len(), spans * per_span + 1);
        for (j, p) in pts.iter().enumerate() {
            let u = spans as f64 * j as f64 / (pts.len() - 1) as f64;
            let q = de_boor(&ctrl, order, u);
            prop_assert!(p.distance(q) < 1e-9, "sample {} off by {}", j, p.distance(q));
        }
    }

    #[test]
    fn species_mass_is_conserved(
        raw in prop::collection::vec(0.0..1.0f64, 2..12),
        lam in 0.05..1.0f64,
        mu in 0.05..1.0f64,
    ) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let mut p: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let s = p.len() - 1;
        let l: Vec<f64> = (0..=s).map(|k| lam * (1.0 - k as f64 / s as f64)).collect();
        let m: Vec<f64> = (0..=s).map(|k| mu * k as f64 / s as f64).collect();
        for _ in 0..200 {
            p = species_step(&p, &l, &m, 0.05).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(p.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn vortices_superpose(x in 0.0..1e4f64, y in 0.0..1e4f64, z in 0.0..999.0f64) {
        let a = VortexParams::new([3000.0, 4000.0], 2500.0, 900.0);
        let b = VortexParams::new([6000.0, 5000.0], -1800.0, 1400.0);
        let mut both = CurrentField::calm(4, 250.0);
        let mut only_a = both.clone();
        let mut only_b = both.clone();
        for f in [&mut both, &mut only_a] {
            f.layers.iter_mut().for_each(|l| l.vortices.push(a.clone()));
        }
        for f in [&mut both, &mut only_b] {
            f.layers.iter_mut().for_each(|l| l.vortices.push(b.clone()));
        }
        let p = Vec3::new(x, y, z);
        let sum = only_a.velocity(p) + only_b.velocity(p);
        prop_assert!(both.velocity(p).distance(sum) < 1e-12);
    }
}

#[test]
fn composition_hand_cases() {
    let cases = [
        (Vec3::ZERO, Vec3::new(2.0, 0.0, 0.0)),
        (Vec3::new(1.0, 0.0, 0.0), Vec3::new(3.0, 0.0, 0.0)),
        (Vec3::new(0.0, 0.5, 0.0), Vec3::new(2.0, 0.5, 0.0)),
        (Vec3::new(0.0, 0.0, 0.5), Vec3::new(2.0, 0.0, 0.5)),
    ];
    for (current, want) in cases {
        let got = compose_velocity(2.0, 0.0, 0.0, &CurrentSample::from_velocity(current));
        assert_eq!(got, want, "current {current:?}");
    }
    // Climbing at 30 degrees in still water.
    let got = compose_velocity(2.0, 0.0, std::f64::consts::FRAC_PI_6, &CurrentSample::from_velocity(Vec3::ZERO));
    assert!((got.x - 3f64.sqrt()).abs() < 1e-15 && (got.z - 1.0).abs() < 1e-15 && got.y == 0.0);
}

#[test]
fn two_state_chain_settles_to_its_balance_point() {
    // Up at 0.6, down at 0.3: P = (0.3, 0.6) / 0.9.
    let (l, m) = ([0.6, 0.0], [0.0, 0.3]);
    let mut p = vec![1.0, 0.0];
    for _ in 0..100_000 {
        p = species_step(&p, &l, &m, 0.01).unwrap();
    }
    assert!((p[0] - 1.0 / 3.0).abs() < 1e-6 && (p[1] - 2.0 / 3.0).abs() < 1e-6, "{p:?}");
    let s = stationary(&l, &m);
    assert!((s[0] - 1.0 / 3.0).abs() < 1e-12);
}
