use convbound::boundary::{
    busemann_cocycle, conical_witness, finite_difference, horo_limit, horofunction_vector, myrberg_stats, ns_dynamics,
    random_geodesic_ray, shadow_members, ConicalParams, GeodesicSemantics, HoroLimit, ShadowSpec,
};
use convbound::{AnnulusSpec, GeodesicPath, ModelSpace, Word};
use proptest::prelude::*;

fn f2() -> ModelSpace {
    ModelSpace::preset("f2").unwrap()
}

fn w(sp: &ModelSpace, s: &str) -> Word {
    sp.parse(s).unwrap()
}

fn word_in(space: &'static str, max_len: usize) -> impl Strategy<Value = Word> {
    let gens = ModelSpace::preset(space).unwrap().generators().to_vec();
    prop::collection::vec(0..gens.len(), 0..max_len).prop_map(move |ix| {
        let mut x = Word::identity();
        for i in ix {
            x.mul_gen(gens[i]);
        }
        x
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn horovectors_are_lipschitz_and_normalised(y in word_in("z2*z", 12)) {
        let sp = ModelSpace::preset("z2*z").unwrap();
        let b = horofunction_vector(&sp, &y, 3).unwrap();
        prop_assert!(b.is_lipschitz());
        prop_assert_eq!(b.value(&Word::identity()), Some(0));
        for (x, &v) in b.points().iter().zip(b.values()) {
            prop_assert_eq!(v, x.distance(&y) as i64 - y.len() as i64);
        }
    }

    #[test]
    fn busemann_cocycle_is_additive(y in word_in("f2", 14), x in word_in("f2", 3), z in word_in("f2", 3), u in word_in("f2", 3)) {
        let sp = f2();
        let b = horofunction_vector(&sp, &y, 3).unwrap();
        let c = |p: &Word, q: &Word| busemann_cocycle(&b, p, q).unwrap();
        prop_assert_eq!(c(&x, &z) + c(&z, &u), c(&x, &u));
        prop_assert_eq!(c(&x, &z), x.distance(&y) as i64 - z.distance(&y) as i64);
    }
}

#[test]
fn cocycle_outside_the_ball_is_an_error() {
    let sp = f2();
    let b = horofunction_vector(&sp, &w(&sp, "a^5"), 2).unwrap();
    assert!(busemann_cocycle(&b, &w(&sp, "b^3"), &Word::identity()).is_err());
}

#[test]
fn tree_difference_between_two_ends_grows_with_radius() {
    let sp = f2();
    let ys: Vec<Word> = (1..=20).map(|k| w(&sp, "a").pow(k)).collect();
    let zs: Vec<Word> = (1..=20).map(|k| w(&sp, "b").pow(k)).collect();
    for r in 1..=5u64 {
        let b1 = horo_limit(&sp, &ys, r, 5).unwrap().stabilized().unwrap();
        let b2 = horo_limit(&sp, &zs, r, 5).unwrap().stabilized().unwrap();
        // at x = a^R: b1 = -R and b2 = R
        let x = w(&sp, "a").pow(r as i64);
        assert_eq!((b1.value(&x), b2.value(&x)), (Some(-(r as i64)), Some(r as i64)));
        assert_eq!(finite_difference(&sp, &b1, &b2).unwrap().value, 2 * r);
    }
}

#[test]
fn alternating_sequence_does_not_stabilize() {
    let sp = f2();
    let ys: Vec<Word> = (1..=20).map(|k| w(&sp, if k % 2 == 0 { "a" } else { "b" }).pow(k)).collect();
    match horo_limit(&sp, &ys, 2, 5).unwrap() {
        HoroLimit::Diverged(d) => assert!(!d.oscillating.is_empty()),
        HoroLimit::Stabilized(_) => panic!("alternating ends stabilized"),
    }
}

/// `y` lies on the unique geodesic `[o, z]` of a tree.
fn tree_prefix(y: &Word, z: &Word) -> bool {
    y.len() + y.distance(z) == z.len()
}

#[test]
fn north_south_dynamics_of_ab() {
    let sp = f2();
    let h = w(&sp, "a b");
    let (u, v) = (h.pow(3), h.pow(-3));
    let o = Word::identity();
    let samples = sp.enumerate_annulus(&AnnulusSpec::sphere(6)).unwrap();
    let rep = ns_dynamics(
        &sp,
        &h,
        &ShadowSpec::plain(o.clone(), u.clone(), 0),
        &ShadowSpec::plain(o, v.clone(), 0),
        &samples,
        10,
    )
    .unwrap();

    let works = |n: i64| {
        samples.iter().all(|z| {
            (tree_prefix(&v, z) || tree_prefix(&u, &h.pow(n).mul(z)))
                && (tree_prefix(&u, z) || tree_prefix(&v, &h.pow(-n).mul(z)))
        })
    };
    let oracle = (0..=10).find(|&n| works(n)).unwrap();
    assert_eq!(rep.n as i64, oracle);
    assert_eq!(rep.n, 6);
    assert_eq!(rep.samples, samples.len());
}

#[test]
fn myrberg_counts_on_an_axis_ray() {
    let sp = f2();
    let ray = GeodesicPath::canonical(&Word::identity(), &w(&sp, "a b").pow(20));
    let fs = vec![w(&sp, "a b a b a b"), w(&sp, "a b^-1 a b^-1 a b^-1")];
    let st = myrberg_stats(&sp, &ray, &fs, 0).unwrap();
    assert!(st.counts[0][2] > 0);
    assert!(st.counts[0][0] <= st.counts[0][1] && st.counts[0][1] <= st.counts[0][2]);
    assert_eq!(st.counts[1], [0, 0, 0]);
    assert!(!st.all_positive());
}

#[test]
fn random_rays_are_geodesic_and_seeded() {
    let sp = ModelSpace::preset("z2*z").unwrap();
    let a = random_geodesic_ray(&sp, 60, 3);
    assert!(a.is_geodesic());
    assert_eq!(a.len(), 60);
    assert_eq!(a.end(), random_geodesic_ray(&sp, 60, 3).end());
}

/// Exact cone membership: some `v` in `B(y, r)` with `d(x, v) + d(v, z) = d(x, z)`.
fn some_geodesic_oracle(sp: &ModelSpace, x: &Word, y: &Word, r: u64, z: &Word) -> bool {
    sp.ball(r).unwrap().iter().any(|d| {
        let v = y.mul(d);
        x.distance(&v) + v.distance(z) == x.distance(z)
    })
}

#[test]
fn some_geodesic_shadows_contain_canonical_ones() {
    let sp = ModelSpace::preset("z2").unwrap();
    let o = Word::identity();
    let y = w(&sp, "a^3 b");
    let cands = sp.ball(7).unwrap();
    for r in 0..=2 {
        let canon = shadow_members(&sp, &ShadowSpec::plain(o.clone(), y.clone(), r), &cands).unwrap();
        let spec = ShadowSpec::plain(o.clone(), y.clone(), r).with_semantics(GeodesicSemantics::SomeGeodesic);
        let some = shadow_members(&sp, &spec, &cands).unwrap();
        assert!(canon.iter().all(|z| some.contains(z)));
        let oracle: Vec<Word> = cands.iter().filter(|z| some_geodesic_oracle(&sp, &o, &y, r, z)).cloned().collect();
        assert_eq!(some, oracle);
        if r == 0 {
            // flats have many geodesics; the canonical one misses part of the cone
            assert!(some.len() > canon.len());
        }
    }
    let too_wide = ShadowSpec::plain(o.clone(), y, 9).with_semantics(GeodesicSemantics::SomeGeodesic);
    assert!(shadow_members(&sp, &too_wide, &cands).is_err());
}

#[test]
fn conical_witness_on_a_random_free_ray() {
    let sp = f2();
    let fs = vec![w(&sp, "a b a b a b"), w(&sp, "a b^-1 a b^-1 a b^-1")];
    let ray = random_geodesic_ray(&sp, 400, 11);
    let cw = conical_witness(&sp, &ray, &fs, &ConicalParams::default()).unwrap();
    assert!(cw.certified.iter().all(|c| c.c == Some(0)));
    assert!(!cw.axes.is_empty());
    assert!(cw.axes.iter().all(|a| a.spread >= cw.l));
    assert!(cw.axes.windows(2).all(|p| p[0].position <= p[1].position));
}
