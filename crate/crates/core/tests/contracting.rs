use convbound::contracting::{
    certify_contracting, extend, fellow_travel_check, find_barriers, is_barrier, measured_constants,
    proj_distance, smallest_contracting_constant, truncate, verify_admissible, AdmissiblePath, Axis, Verdict,
};
use convbound::{GeodesicPath, ModelSpace, Word};
use proptest::prelude::*;

fn f2() -> ModelSpace {
    ModelSpace::preset("f2").unwrap()
}

fn w(sp: &ModelSpace, s: &str) -> Word {
    sp.parse(s).unwrap()
}

/// `p_0 = [e, (ab)^5]` on `Ax(ab)`, `q_1 = [(ab)^5, (ab)^5 b^3]`, `p_1` along `(ab)^5 b^3 Ax(ab^-1)`.
fn two_axis_path(sp: &ModelSpace) -> AdmissiblePath {
    let o = Word::identity();
    let ab = w(sp, "a b");
    let abi = w(sp, "a b^-1");
    let x1 = ab.pow(5);
    let x2 = x1.mul(&w(sp, "b^3"));
    let x3 = x2.mul(&abi.pow(5));
    AdmissiblePath {
        p: vec![GeodesicPath::canonical(&o, &x1), GeodesicPath::canonical(&x2, &x3)],
        q: vec![GeodesicPath::canonical(&x1, &x2)],
        saturation: vec![
            Some(Axis::with_stabilizer(&ab, &o, 40).unwrap()),
            Some(Axis::with_stabilizer(&abi, &x2, 40).unwrap()),
        ],
        l: 8,
        b: 0,
    }
}

#[test]
fn two_axis_path_is_admissible_and_fellow_travels() {
    let sp = f2();
    let mut path = two_axis_path(&sp);
    let (_, b) = measured_constants(&path).unwrap();
    path.b = b;
    let rep = verify_admissible(&path).unwrap();
    assert!(rep.pass, "{rep:?}");
    let ft = fellow_travel_check(&sp, &path, 2).unwrap();
    assert!(ft.pass);
    assert_eq!((ft.z.len(), ft.w.len()), (2, 2));
    assert!(ft.z.iter().zip(&ft.w).all(|(z, w)| z <= w));
}

#[test]
fn short_interior_segment_fails_long_local() {
    let sp = f2();
    let o = Word::identity();
    let ab = w(&sp, "a b");
    // interior p_1 of length L - 1
    let l = 8u64;
    let x1 = ab.pow(3);
    let x2 = x1.mul(&w(&sp, "b^2"));
    let inner = w(&sp, "a b^-1").pow(((l - 1) / 2) as i64).mul(&w(&sp, "a"));
    let x3 = x2.mul(&inner);
    let x4 = x3.mul(&w(&sp, "b^2"));
    let x5 = x4.mul(&ab.pow(3));
    let path = AdmissiblePath {
        p: vec![
            GeodesicPath::canonical(&o, &x1),
            GeodesicPath::canonical(&x2, &x3),
            GeodesicPath::canonical(&x4, &x5),
        ],
        q: vec![GeodesicPath::canonical(&x1, &x2), GeodesicPath::canonical(&x3, &x4)],
        saturation: vec![None, Some(Axis::with_stabilizer(&w(&sp, "a b^-1"), &x2, 40).unwrap()), None],
        l,
        b: 10,
    };
    assert_eq!(path.p[1].len() as u64, l - 1);
    let rep = verify_admissible(&path).unwrap();
    assert!(!rep.pass);
    assert!(!rep.segments[1].long_local);
}

#[test]
fn backtracking_connector_breaks_fellow_travel() {
    let sp = f2();
    let o = Word::identity();
    let x1 = w(&sp, "a b a b a b");
    let x2 = w(&sp, "a b");
    let x3 = x2.mul(&w(&sp, "a^3"));
    let path = AdmissiblePath {
        p: vec![GeodesicPath::canonical(&o, &x1), GeodesicPath::canonical(&x2, &x3)],
        q: vec![GeodesicPath::canonical(&x1, &x2)],
        saturation: vec![None, None],
        l: 1,
        b: 0,
    };
    let ft = fellow_travel_check(&sp, &path, 1).unwrap();
    assert!(!ft.pass);
    assert_eq!(ft.violation, Some(0));
}

#[test]
fn mismatched_segments_are_rejected() {
    let sp = f2();
    let mut path = two_axis_path(&sp);
    path.q[0] = GeodesicPath::canonical(&Word::identity(), &w(&sp, "b"));
    assert!(verify_admissible(&path).is_err());
}

#[test]
fn truncation_of_a_two_barrier_geodesic() {
    let sp = f2();
    let fs = vec![w(&sp, "a b a b a b"), w(&sp, "a b^-1 a b^-1 a b^-1")];
    let end = w(&sp, "a b").pow(4).mul(&w(&sp, "b")).mul(&w(&sp, "a b^-1").pow(4));
    let gamma = GeodesicPath::canonical(&Word::identity(), &end);
    let barriers = find_barriers(&sp, &gamma, &fs, 0).unwrap();
    assert!(!barriers.is_empty());
    for b in &barriers {
        assert!(is_barrier(&gamma, &b.h, &b.f, 0));
    }
    let path = truncate(&sp, &gamma, &barriers, 40).unwrap();
    assert_eq!(path.saturation.iter().filter(|s| s.is_some()).count(), 2);
    assert_eq!((path.start(), path.end()), (Word::identity(), end.clone()));
    assert!(verify_admissible(&path).unwrap().pass);
    assert!(fellow_travel_check(&sp, &path, path.b).unwrap().pass);

    // at r = 1 the two neighbourhood stretches share a vertex and are rejected
    let wide = find_barriers(&sp, &gamma, &fs, 1).unwrap();
    assert!(truncate(&sp, &gamma, &wide, 40).is_err());
}

#[test]
fn no_barriers_truncates_to_the_geodesic() {
    let sp = f2();
    let gamma = GeodesicPath::canonical(&Word::identity(), &w(&sp, "a^3 b^2"));
    let path = truncate(&sp, &gamma, &[], 20).unwrap();
    assert_eq!(path.p.len(), 1);
    assert!(verify_admissible(&path).unwrap().pass);
}

#[test]
fn certification_on_f2_and_z2() {
    let sp = f2();
    let ab = w(&sp, "a b");
    let axis = Axis::with_stabilizer(&ab, &Word::identity(), 44).unwrap();
    assert!(certify_contracting(&sp, &axis, 0, 10).unwrap().is_certified());

    let z2 = ModelSpace::preset("z2").unwrap();
    let x = Axis::with_stabilizer(&w(&z2, "a"), &Word::identity(), 52).unwrap();
    let cert = certify_contracting(&z2, &x, 0, 12).unwrap();
    match &cert.verdict {
        Verdict::Counterexample(c) => {
            assert!(c.diameter >= 10);
            assert!(c.center_word.len() + c.radius <= 12);
            // the ball really is disjoint from the axis
            assert!(x.distance_to(&c.center_word) > c.radius);
        }
        Verdict::Certified => panic!("Z^2 axis certified"),
    }
}

#[test]
fn smallest_constants_on_a_free_product() {
    let sp = ModelSpace::preset("z2*z").unwrap();
    let c = |f: &str| {
        let f = w(&sp, f);
        let axis = Axis::with_stabilizer(&f, &Word::identity(), 24 + 2 * f.len()).unwrap();
        smallest_contracting_constant(&sp, &axis, 6, 6).unwrap().map(|c| c.c)
    };
    assert_eq!(c("t"), Some(0));
    assert_eq!(c("a t"), Some(1));
}

#[test]
fn extension_lemma_example() {
    let sp = f2();
    let fs: Vec<Word> = ["a b a b a b", "a b^-1 a b^-1 a b^-1", "a^2 b a^2 b a^2 b"]
        .iter()
        .map(|s| w(&sp, s))
        .collect();
    let g = w(&sp, "b^5");
    let probe = w(&sp, "a^5");
    let (f, wit) = extend(&sp, &g, &fs, 2, &probe).unwrap();
    let gamma = GeodesicPath::canonical(&Word::identity(), &g.mul(&f).mul(&probe));
    assert!(is_barrier(&gamma, &g, &f, 2));
    assert_eq!(wit.h, g);

    let (f0, _) = extend(&sp, &Word::identity(), &fs, 0, &probe).unwrap();
    assert!(fs.contains(&f0));
}

fn f2_word() -> impl Strategy<Value = Word> {
    let gens = f2().generators().to_vec();
    prop::collection::vec(0..gens.len(), 0..16).prop_map(move |ix| {
        let mut x = Word::identity();
        for i in ix {
            x.mul_gen(gens[i]);
        }
        x
    })
}

fn zz_word() -> impl Strategy<Value = Word> {
    let gens = ModelSpace::preset("z2*z").unwrap().generators().to_vec();
    prop::collection::vec(0..gens.len(), 0..10).prop_map(move |ix| {
        let mut x = Word::identity();
        for i in ix {
            x.mul_gen(gens[i]);
        }
        x
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_projections_are_singletons(y in f2_word()) {
        let sp = f2();
        let axis = Axis::with_stabilizer(&w(&sp, "a b"), &Word::identity(), 40).unwrap();
        prop_assert_eq!(axis.project_indices(&y).unwrap().len(), 1);
    }

    #[test]
    fn projection_distance_triangle(x in zz_word(), y in zz_word(), z in zz_word()) {
        let sp = ModelSpace::preset("z2*z").unwrap();
        let axis = Axis::with_stabilizer(&w(&sp, "a t"), &Word::identity(), 40).unwrap();
        let d = |p: &Word, q: &Word| proj_distance(&sp, &axis, p, q).unwrap();
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
        prop_assert_eq!(d(&x, &y), d(&y, &x));
    }

    /// `|d_X(γ-, γ+) - ‖γ ∩ N_C(X)‖| <= 4C` for the certified `C` of `Ax(at)`.
    #[test]
    fn projection_tracks_the_neighbourhood(x in zz_word(), y in zz_word()) {
        let sp = ModelSpace::preset("z2*z").unwrap();
        let axis = Axis::with_stabilizer(&w(&sp, "a t"), &Word::identity(), 60).unwrap();
        let c = 1u64;
        let gamma = GeodesicPath::canonical(&x, &y);
        let near: Vec<usize> = gamma
            .vertices()
            .iter()
            .enumerate()
            .filter(|(_, v)| axis.distance_to(v) <= c)
            .map(|(i, _)| i)
            .collect();
        let span = match (near.first(), near.last()) {
            (Some(i), Some(j)) => (j - i) as u64,
            _ => 0,
        };
        let dx = proj_distance(&sp, &axis, &x, &y).unwrap();
        prop_assert!(dx.abs_diff(span) <= 4 * c, "d_X = {dx}, span = {span}");
    }
}
