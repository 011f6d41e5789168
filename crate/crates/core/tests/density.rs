use convbound::boundary::ShadowSpec;
use convbound::density::{
    cogrowth_check, conformality_check, critical_exponent, exact_cylinder_mass, exact_shadow_report, poincare_partial,
    ps_measure, separated_subset, ConformalityMode, KahanSum,
};
use convbound::space::SubgroupPredicate;
use convbound::{AnnulusSpec, GeodesicPath, ModelSpace, Word};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn f2() -> ModelSpace {
    ModelSpace::preset("f2").unwrap()
}

fn free_sphere(n: u64) -> f64 {
    if n == 0 {
        1.0
    } else {
        4.0 * 3f64.powi(n as i32 - 1)
    }
}

#[test]
fn free_poincare_series_matches_closed_form() {
    let sp = f2();
    let o = Word::identity();
    let est = poincare_partial(&sp, &SubgroupPredicate::Whole, 2.0, &o, &o, 20).unwrap();
    let oracle: f64 = (0..=20).map(|n| free_sphere(n) * (-2.0 * n as f64).exp()).sum();
    assert!((est.partial_sum - oracle).abs() <= 1e-12 * oracle);
}

#[test]
fn free_series_grows_linearly_at_the_critical_exponent() {
    let sp = f2();
    let o = Word::identity();
    let p = |r| poincare_partial(&sp, &SubgroupPredicate::Whole, 3f64.ln(), &o, &o, r).unwrap().partial_sum;
    // each shell contributes 4·3^(n-1)·3^-n = 4/3
    assert!((p(20) - p(10) - 40.0 / 3.0).abs() < 1e-9);
    assert!((p(1) - (1.0 + 4.0 / 3.0)).abs() < 1e-12);
}

#[test]
fn growth_quotients_follow_sphere_sizes() {
    let sp = f2();
    let est = critical_exponent(&sp, &SubgroupPredicate::Whole, 14, 0).unwrap();
    for row in est.rows.iter().filter(|r| r.n > 0) {
        let q = row.quotient.unwrap();
        assert!((q - free_sphere(row.n).ln() / row.n as f64).abs() < 1e-12);
    }
    let z2 = ModelSpace::preset("z2").unwrap();
    let est = critical_exponent(&z2, &SubgroupPredicate::Whole, 50, 0).unwrap();
    assert!(est.omega_hat <= 0.15);
}

#[test]
fn cylinder_mass_under_the_estimator() {
    let sp = f2();
    let o = Word::identity();
    let m = ps_measure(&sp, 3f64.ln() + 0.05, &o, 12).unwrap();
    assert!((m.total_mass(&sp).unwrap() - 1.0).abs() < 1e-9);
    let a = sp.parse("a").unwrap();
    let mass = m.shadow_mass(&sp, &ShadowSpec::plain(o, a, 0)).unwrap();
    assert!((mass - 0.25).abs() <= 0.02, "{mass}");
}

#[test]
fn free_product_measure_is_a_probability() {
    let sp = ModelSpace::preset("z2*z").unwrap();
    let o = Word::identity();
    let s = 1.2;
    let m = ps_measure(&sp, s, &o, 8).unwrap();
    assert!((m.total_mass(&sp).unwrap() - 1.0).abs() < 1e-9);

    // from another basepoint the mass is P(s, x, o) / P(s, o, o) on the same ball
    let ball = sp.ball(8).unwrap();
    let x = sp.parse("a t").unwrap();
    let weight = |p: &Word| ball.iter().map(|g| (-s * p.distance(g) as f64).exp()).sum::<f64>();
    let mx = ps_measure(&sp, s, &x, 8).unwrap();
    let oracle = weight(&x) / weight(&o);
    assert!((mx.total_mass(&sp).unwrap() - oracle).abs() < 1e-9 * oracle);
}

/// Fraction of `S(x, N)` whose canonical geodesic from `o` passes through `v`.
fn cylinder_oracle(sp: &ModelSpace, x: &Word, v: &Word, n: u64) -> f64 {
    let sphere: Vec<Word> = sp.ball(n + x.len()).unwrap().into_iter().filter(|z| z.distance(x) == n).collect();
    let hits = sphere
        .iter()
        .filter(|z| GeodesicPath::canonical(&Word::identity(), z).vertices().contains(v))
        .count();
    hits as f64 / sphere.len() as f64
}

#[test]
fn exact_cylinder_masses_match_counting() {
    let sp = f2();
    for (x, v) in [("1", "a"), ("1", "a b^-1"), ("a", "a"), ("b", "a b"), ("a^-1", "a^2")] {
        let (x, v) = (sp.parse(x).unwrap(), sp.parse(v).unwrap());
        let exact = exact_cylinder_mass(&sp, &x, &v).unwrap().to_f64().unwrap();
        let oracle = cylinder_oracle(&sp, &x, &v, x.len() + v.len() + 1);
        assert!((exact - oracle).abs() < 1e-12, "{exact} vs {oracle}");
    }
}

#[test]
fn exact_shadow_ratios_are_three_quarters() {
    let sp = f2();
    let rep = exact_shadow_report(&sp, 1, 10).unwrap();
    let three_quarters = BigRational::new(3.into(), 4.into());
    for row in &rep.rows {
        assert_eq!(row.exact_ratio.as_deref(), Some(three_quarters.to_string().as_str()));
        assert!((row.ratio - 0.75).abs() < 1e-12);
    }
    assert_eq!(rep.annuli.len(), 10);
}

#[test]
fn exact_conformality_of_a_generator() {
    let sp = f2();
    let a = sp.parse("a").unwrap();
    let rep = conformality_check(&sp, ConformalityMode::Exact, &a, std::slice::from_ref(&a)).unwrap();
    let row = &rep.rows[0];
    assert!((row.mu_g - 3.0 * row.mu_o).abs() < 1e-12);
    assert_eq!(row.busemann, Some(-1));
    assert!((rep.max_defect - 1.0).abs() < 1e-12);
    assert!(conformality_check(&sp, ConformalityMode::Exact, &a, &[Word::identity()]).is_err());
}

#[test]
fn whole_group_cogrowth_matches_itself() {
    let sp = f2();
    let rep = cogrowth_check(&sp, &SubgroupPredicate::Whole, 12, None).unwrap();
    assert_eq!(rep.omega_g, rep.omega_h);
    assert!(rep.verdict);
    assert!(rep.audit.is_none());
}

#[test]
fn kahan_sum_keeps_small_terms() {
    let mut k = KahanSum::default();
    k.add(1.0);
    for _ in 0..1_000_000 {
        k.add(1e-16);
    }
    assert!((k.value() - (1.0 + 1e-10)).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn separated_subsets_are_separated(n in 2u64..5, sep in 0u64..5) {
        let sp = f2();
        let pts = sp.enumerate_annulus(&AnnulusSpec::sphere(n)).unwrap();
        let sub = separated_subset(&pts, sep);
        for (i, x) in sub.iter().enumerate() {
            for y in &sub[..i] {
                prop_assert!(x.distance(y) > sep);
            }
        }
        // maximal: every dropped point is within sep of a kept one
        for p in &pts {
            prop_assert!(sub.iter().any(|q| q.distance(p) <= sep));
        }
    }
}
