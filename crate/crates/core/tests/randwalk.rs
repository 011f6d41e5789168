use convbound::randwalk::{boundary_convergence, drift, simulate, ConvergenceParams, StepDistribution};
use convbound::{ModelSpace, Word};

fn f2() -> ModelSpace {
    ModelSpace::preset("f2").unwrap()
}

#[test]
fn point_mass_converges_to_its_axis_end() {
    let sp = f2();
    let a = sp.parse("a").unwrap();
    let mu = StepDistribution::new(&sp, vec![(a.clone(), 1.0)]).unwrap();
    let t = simulate(&sp, &mu, 200, 0, 10, false).unwrap();
    assert_eq!(*t.end(), a.pow(200));
    let p = ConvergenceParams {
        r: 3,
        window: 5,
        fs: vec![sp.parse("a^3").unwrap(), sp.parse("b^3").unwrap()],
        barrier_r: 0,
    };
    let bc = boundary_convergence(&sp, &t, &p).unwrap();
    assert!(bc.stabilized);
    assert!(bc.gromov_monotone);
    let m = bc.myrberg.unwrap();
    assert!(m.counts[0][2] > 0);
    assert_eq!(m.counts[1], [0, 0, 0]);
}

#[test]
fn trajectories_are_determined_by_the_seed() {
    let sp = ModelSpace::preset("z2*z").unwrap();
    let mu = StepDistribution::preset(&sp, "srw").unwrap();
    let t1 = simulate(&sp, &mu, 5000, 42, 100, true).unwrap();
    let t2 = simulate(&sp, &mu, 5000, 42, 100, true).unwrap();
    assert_eq!(t1, t2);
    let t3 = simulate(&sp, &mu, 5000, 43, 100, false).unwrap();
    assert_ne!(t1.end(), t3.end());

    // replaying the stored increments reproduces every checkpoint
    let mut w = Word::identity();
    let mut at = t1.checkpoints.iter();
    assert_eq!(at.next().unwrap().1, w);
    for (n, &i) in t1.increments.as_ref().unwrap().iter().enumerate() {
        w = w.mul(&mu.support()[i as usize].0);
        if (n as u64 + 1).is_multiple_of(100) {
            assert_eq!(at.next().unwrap().1, w);
        }
    }
}

#[test]
fn lattice_walk_is_diffusive() {
    let sp = ModelSpace::preset("z2").unwrap();
    let mu = StepDistribution::preset(&sp, "srw").unwrap();
    let t = simulate(&sp, &mu, 100_000, 1, 1000, false).unwrap();
    let d = drift(&t).unwrap();
    assert!(d.diffusive_band <= 5.0, "{}", d.diffusive_band);
    assert!(d.terminal < 0.05);
}

#[test]
fn free_walk_has_drift_one_half() {
    // SRW on the 4-regular tree moves out with probability 3/4 and in with 1/4
    let sp = f2();
    let mu = StepDistribution::preset(&sp, "srw").unwrap();
    let t = simulate(&sp, &mu, 100_000, 5, 1000, false).unwrap();
    assert!((drift(&t).unwrap().terminal - 0.5).abs() < 0.02);

    let lazy = StepDistribution::preset(&sp, "lazy").unwrap();
    let t = simulate(&sp, &lazy, 100_000, 5, 1000, false).unwrap();
    assert!((drift(&t).unwrap().terminal - 0.25).abs() < 0.02);
}

#[test]
fn parsed_distributions() {
    let sp = f2();
    let mu = StepDistribution::parse(&sp, "# weights\n0.5 a\n0.25 b^-1\n\n0.25 a b\n").unwrap();
    assert_eq!(mu.support().len(), 3);
    assert!(!mu.generates_semigroup(&sp, 6));
    assert!(StepDistribution::parse(&sp, "2 a\n1 b").is_err());
    assert!(StepDistribution::parse(&sp, "x a").is_err());
    assert!(StepDistribution::parse(&sp, "1 q").is_err());
    assert!(StepDistribution::preset(&sp, "nope").is_err());
    assert!(StepDistribution::preset(&sp, "srw").unwrap().generates_semigroup(&sp, 1));
    assert!(simulate(&sp, &mu, 10, 0, 0, false).is_err());
}
