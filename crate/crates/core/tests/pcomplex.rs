use std::collections::BTreeSet;

use convbound::contracting::{fellow_travel_check, Axis};
use convbound::pcomplex::{
    build_complex, check_axioms, interval_set, lift_path, run_pipeline, AxisFamily, LargeProjectionTable,
    PipelineOptions,
};
use convbound::{ModelSpace, Word};

fn f2() -> ModelSpace {
    ModelSpace::preset("f2").unwrap()
}

fn family_words(sp: &ModelSpace) -> Vec<Word> {
    ["a b a b a b", "a b^-1 a b^-1 a b^-1", "a^2 b a^2 b a^2 b"]
        .iter()
        .map(|s| sp.parse(s).unwrap())
        .collect()
}

/// `V = Ax(ab)`, `M = (ab)^3 Ax(b)`, `W = (ab)^3 b^3 (ab)^3 Ax(ab)`.
fn three_axes(sp: &ModelSpace) -> AxisFamily {
    let p = |s: &str| sp.parse(s).unwrap();
    let w = 30;
    let (ab, b) = (p("a b"), p("b"));
    let axes = vec![
        Axis::with_stabilizer(&ab, &Word::identity(), w).unwrap(),
        Axis::with_stabilizer(&b, &p("a b a b a b"), w).unwrap(),
        Axis::with_stabilizer(&ab, &p("a b a b a b b b b a b a b a b"), w).unwrap(),
    ];
    AxisFamily::from_axes(sp, vec![ab, b], 0, w, axes, vec![0, 1, 0]).unwrap()
}

/// `diam(π_U(V) ∪ π_U(W))` from nearest-point sets computed point by point.
fn d_oracle(fam: &AxisFamily, u: usize, v: usize, w: usize) -> u64 {
    let axis = &fam.axes[u];
    let mut idx = BTreeSet::new();
    for other in [v, w] {
        for x in fam.axes[other].points() {
            let best = axis.points().iter().map(|p| p.distance(x)).min().unwrap();
            for (i, p) in axis.points().iter().enumerate() {
                if p.distance(x) == best {
                    idx.insert(i);
                }
            }
        }
    }
    let pts: Vec<&Word> = idx.iter().map(|&i| &axis.points()[i]).collect();
    pts.iter()
        .flat_map(|a| pts.iter().map(move |b| a.distance(b)))
        .max()
        .unwrap_or(0)
}

#[test]
fn projection_table_matches_point_by_point_oracle() {
    let sp = f2();
    let fam = three_axes(&sp);
    for u in 0..3 {
        for v in 0..3 {
            for w in 0..3 {
                if u != v && u != w {
                    assert_eq!(fam.d(u, v, w), d_oracle(&fam, u, v, w), "d_{u}({v},{w})");
                    assert_eq!(fam.d(u, v, w), fam.d(u, w, v));
                }
            }
        }
    }
    assert_eq!(fam.d(1, 0, 2), 4);
}

#[test]
fn interval_through_a_separating_axis() {
    let sp = f2();
    let fam = three_axes(&sp);
    for k in 0..4 {
        assert_eq!(interval_set(&fam, 0, k, 0, 2).unwrap().members, vec![0, 1, 2]);
        assert_eq!(interval_set(&fam, 0, k, 2, 0).unwrap().members, vec![2, 1, 0]);
    }
    // once K reaches d_M(V, W) the middle axis drops out
    assert_eq!(interval_set(&fam, 0, 4, 0, 2).unwrap().members, vec![0, 2]);
}

#[test]
fn large_threshold_gives_a_clique() {
    let sp = f2();
    let fam = AxisFamily::build(&sp, &family_words(&sp), 4, 14).unwrap();
    let rep = check_axioms(&fam, 100);
    assert!(rep.pass);
    let table = LargeProjectionTable::build(&fam, 1000);
    let g = build_complex(&fam, &table, 100, 1000);
    let n = fam.len();
    assert_eq!(g.edge_count(), n * (n - 1) / 2);
    assert_eq!(g.diameter(), Some(1));
}

#[test]
fn pipeline_at_radius_six() {
    let sp = f2();
    let (pl, sum) = run_pipeline(&sp, &family_words(&sp), 6, 14, &PipelineOptions::default()).unwrap();
    assert!(sum.axioms.pass);
    assert_eq!((sum.axes, pl.kappa, pl.k), (79, 4, 6));
    assert!(sum.connected);
    assert_eq!(sum.diameter, Some(2));
    assert_eq!(sum.interval_path_breaks, 0);
    assert!(sum.sandwich_max <= pl.kappa);
    let tripod = sum.tripod.expect("79 axes is under the tripod cap");
    assert!(tripod.pass, "{tripod:?}");

    // every edge has an interval with no interior
    for u in 0..pl.family.len() {
        for v in 0..pl.family.len() {
            if u != v && pl.graph.has_edge(u, v) {
                let iv = interval_set(&pl.family, pl.kappa, pl.k, u, v).unwrap();
                assert_eq!(iv.members, vec![u, v]);
            }
        }
    }
}

#[test]
fn lifted_paths_fellow_travel() {
    let sp = f2();
    let (pl, _) = run_pipeline(&sp, &family_words(&sp), 6, 14, &PipelineOptions::default()).unwrap();
    let fam = &pl.family;
    for u in 0..fam.len() {
        for v in 0..fam.len() {
            let x = fam.axes[u].points()[0].clone();
            let y = fam.axes[v].points().last().unwrap().clone();
            let lp = lift_path(fam, pl.kappa, pl.k, u, v, &x, &y).unwrap();
            assert!(lp.report.pass, "{u} -> {v}");
            assert_eq!(lp.saturation.first(), Some(&u));
            assert_eq!(lp.saturation.last(), Some(&v));
            let ft = fellow_travel_check(&sp, &lp.path, lp.path.b + pl.kappa).unwrap();
            assert!(ft.pass, "{u} -> {v}");
        }
    }
}
