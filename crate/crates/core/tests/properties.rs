use std::sync::Arc;

use proptest::prelude::*;

use minkpoly::kaehler::{apply_I, metric_g, omega, project_normal, project_tangent, AmbientVector};
use minkpoly::mink3::{from_sl2, mink_bracket, mink_dot, sl2_bracket, sl2_dot, to_sl2, MinkVector};
use minkpoly::polygon::{deserialize, sample, serialize, Polygon, SampleOptions};
use minkpoly::tangent::{build_L, calibrate, gauge_transform, restrict_to_tangent};

fn vector() -> impl Strategy<Value = MinkVector> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y, z)| MinkVector::new(x, y, z))
}

fn polygon() -> impl Strategy<Value = Arc<Polygon>> {
    (4usize..=8, any::<u64>(), prop::sample::select(vec![0.5, 1.0, 3.0])).prop_map(|(n, seed, m)| {
        Arc::new(sample(n, &vec![m; n], seed, &SampleOptions::default()).expect("closable masses"))
    })
}

fn ambient_for(p: &Polygon, raw: &[MinkVector]) -> AmbientVector {
    AmbientVector::new(raw.iter().cycle().take(p.n()).copied().collect())
}

fn scale(vs: &[MinkVector]) -> f64 {
    vs.iter().map(|v| v.norm_inf()).fold(1.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_orthogonal_and_antisymmetric(u in vector(), v in vector()) {
        let b = mink_bracket(u, v);
        let s = scale(&[u, v]).powi(3);
        prop_assert!(mink_dot(b, u).abs() <= 1e-12 * s);
        prop_assert!(mink_dot(b, v).abs() <= 1e-12 * s);
        prop_assert!((b + mink_bracket(v, u)).norm_inf() <= 1e-12 * s);
    }

    #[test]
    fn bracket_satisfies_jacobi(u in vector(), v in vector(), w in vector()) {
        let b = mink_bracket;
        let j = b(u, b(v, w)) + b(v, b(w, u)) + b(w, b(u, v));
        prop_assert!(j.norm_inf() <= 1e-12 * scale(&[u, v, w]).powi(3));
    }

    #[test]
    fn sl2_map_is_an_isometric_homomorphism(u in vector(), v in vector()) {
        let s = scale(&[u, v]).powi(2);
        prop_assert!((sl2_dot(to_sl2(u), to_sl2(v)) - mink_dot(u, v)).abs() <= 1e-14 * s);
        prop_assert!((from_sl2(sl2_bracket(to_sl2(u), to_sl2(v))) - mink_bracket(u, v)).norm_inf() <= 1e-13 * s);
        prop_assert!((from_sl2(to_sl2(u)) - u).norm_inf() <= 1e-15 * scale(&[u]));
    }

    #[test]
    fn sampler_is_valid_and_deterministic(n in 4usize..=8, seed in any::<u64>(), m in 0.5..3.0f64) {
        let masses = vec![m; n];
        let p = sample(n, &masses, seed, &SampleOptions::default()).unwrap();
        prop_assert!(p.is_valid(1e-12 * p.scale(), 1e-13 * p.scale().powi(2)));
        prop_assert!(!p.degeneracy().collinear);
        let again = sample(n, &masses, seed, &SampleOptions::default()).unwrap();
        prop_assert_eq!(serialize(&again), serialize(&p));
    }

    #[test]
    fn polygon_json_roundtrips(p in polygon()) {
        let q = deserialize(&serialize(&p)).unwrap();
        prop_assert_eq!(q.edges(), p.edges());
        prop_assert_eq!(q.masses(), p.masses());
    }

    #[test]
    fn l_is_negative_definite(p in polygon(), xi in vector()) {
        prop_assume!(xi.norm_inf() > 1e-3);
        prop_assert!(mink_dot(build_L(&p).apply(xi), xi) < 0.0);
    }

    #[test]
    fn calibration_is_a_gauge_invariant_projection(p in polygon(), raw in prop::collection::vec(vector(), 8), x in vector()) {
        let q = calibrate(&restrict_to_tangent(&p, &ambient_for(&p, &raw)).unwrap()).unwrap();
        let s = q.norm_inf().max(1.0);
        prop_assert!(q.calibration_residual() <= 1e-11 * s * p.scale().max(1.0));
        let back = calibrate(&gauge_transform(&q, x)).unwrap();
        prop_assert!(back.distance_inf(&q) <= 1e-10 * s * x.norm_inf().max(1.0) * p.scale().max(1.0));
    }

    #[test]
    fn complex_structure_squares_to_minus_one(p in polygon(), raw in prop::collection::vec(vector(), 8)) {
        let q = project_tangent(&ambient_for(&p, &raw), &p).unwrap();
        let iiq = apply_I(&apply_I(&q).unwrap()).unwrap();
        prop_assert!(iiq.combine(1.0, &q, 1.0).unwrap().norm_inf() <= 1e-10 * q.norm_inf().max(1.0));
    }

    #[test]
    fn metric_is_positive_and_compatible(p in polygon(), raw in prop::collection::vec(vector(), 8)) {
        let q = project_tangent(&ambient_for(&p, &raw), &p).unwrap();
        prop_assume!(q.norm_inf() > 1e-6);
        let g = metric_g(&q, &q).unwrap();
        prop_assert!(g > 0.0);
        let iq = apply_I(&q).unwrap();
        prop_assert!((omega(&q, &iq).unwrap() - g).abs() <= 1e-10 * g.max(1.0));
    }

    #[test]
    fn projection_splits_ambient_vectors(p in polygon(), raw in prop::collection::vec(vector(), 8)) {
        let x = ambient_for(&p, &raw);
        let n = project_normal(&x, &p).unwrap();
        let t = project_tangent(&x, &p).unwrap();
        let sum = &t.to_ambient() + &n;
        prop_assert!((&sum - &x).norm_inf() <= 1e-12 * x.norm_inf().max(1.0));
        let nn = project_normal(&n, &p).unwrap();
        prop_assert!((&nn - &n).norm_inf() <= 1e-9 * n.norm_inf().max(1.0));
    }
}
