mod common;

use proptest::prelude::*;

use circle_ergodic::classify::{self, basin_decomposition, rotation_number, Label, Status, Target, WProtocol};
use circle_ergodic::exact::{CirclePoint, Rational};
use circle_ergodic::measure::{CircleMeasure, CylinderSpec};
use circle_ergodic::partition::ConsistentFamily;
use circle_ergodic::pl::{PLCircleMap, DEFAULT_MAX_BREAKPOINTS};
use circle_ergodic::shred::{self, ShredConfig};
use circle_ergodic::{q, sample, wicked};

use common::{c0_oracle, FloatMap};

fn pl(seed: u64, knots: usize, degree: i64) -> PLCircleMap {
    sample::pl_map(&mut sample::rng(seed), knots, degree).unwrap()
}

fn homeo(seed: u64, knots: usize) -> PLCircleMap {
    sample::homeo(&mut sample::rng(seed), knots).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composition_matches_pointwise(s1 in any::<u64>(), s2 in any::<u64>(), d1 in -2i64..=3, d2 in -2i64..=3, j in 0i64..97) {
        let f = pl(s1, 4, d1);
        let g = pl(s2, 4, d2);
        let fg = f.compose(&g).unwrap();
        let x = CirclePoint::from_lift(&q!(j, 97));
        prop_assert_eq!(fg.evaluate(&x), f.evaluate(&g.evaluate(&x)));
        prop_assert_eq!(fg.degree_i64(), d1 * d2);
    }

    #[test]
    fn homeo_inverse_is_identity(s in any::<u64>(), k in 1usize..7) {
        let h = homeo(s, k);
        prop_assert!(h.is_orientation_preserving_homeo());
        let inv = h.invert().unwrap();
        prop_assert_eq!(inv.compose(&h).unwrap(), PLCircleMap::identity());
        prop_assert_eq!(h.compose(&inv).unwrap(), PLCircleMap::identity());
    }

    #[test]
    fn distance_is_a_metric_bounded_by_half(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), d in 0i64..3) {
        let (f, g, h) = (pl(s1, 4, d), pl(s2, 4, d), pl(s3, 4, d));
        let fg = f.c0_distance(&g);
        prop_assert_eq!(&fg, &g.c0_distance(&f));
        prop_assert_eq!(&fg, &c0_oracle(&f, &g));
        prop_assert!(fg <= q!(1, 2));
        prop_assert!(fg <= f.c0_distance(&h) + h.c0_distance(&g));
        prop_assert!(f.c0_distance(&f).is_zero());
    }

    #[test]
    fn pushforward_keeps_mass_and_composes(s1 in any::<u64>(), s2 in any::<u64>(), d in -1i64..=2) {
        let f = pl(s1, 4, d);
        let g = pl(s2, 3, 1);
        let mu = CircleMeasure::lebesgue();
        let a = mu.pushforward(&f).pushforward(&g);
        prop_assert_eq!(a.total_mass(), Rational::one());
        prop_assert_eq!(a, mu.pushforward(&g.compose(&f).unwrap()));
    }

    #[test]
    fn pushforward_integrates_pullbacks(s in any::<u64>(), d in 1i64..=3, j in 0i64..8) {
        let f = pl(s, 5, d);
        let phi = WProtocol::default().observables().unwrap()[j as usize].clone();
        let left = CircleMeasure::lebesgue().pushforward(&f).integrate(&phi);
        let right = CircleMeasure::lebesgue().integrate(&phi.pull_back(&f).unwrap());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn rotation_number_is_a_conjugacy_invariant(s in any::<u64>(), r in 0i64..6, qd in 1i64..7) {
        let r = r % qd;
        let g = homeo(s, 4);
        let rot = PLCircleMap::rotation(&q!(r, qd));
        let h = g.invert().unwrap().compose(&rot).unwrap().compose(&g).unwrap();
        let rho = rotation_number(&h, 8).unwrap();
        prop_assert_eq!(rho.exact(), Some(&q!(r, qd)));
    }

    #[test]
    fn basin_measures_complete_the_circle(s in any::<u64>(), k in 1usize..4) {
        let h = sample::morse_smale(&mut sample::rng(s), k).unwrap();
        let d = basin_decomposition(&h, 4).unwrap();
        prop_assert_eq!(d.total(), Rational::one());
        prop_assert_eq!(d.physical.len(), k);
        for p in &d.physical {
            prop_assert!(p.measure.raw_pieces().is_empty());
            prop_assert!(p.basin_measure.is_positive());
        }
    }

    #[test]
    fn family_round_trips_a_homeo(s in any::<u64>(), ell in 2u32..4, depth in 1usize..4) {
        let h = homeo(s, 4);
        let fam = ConsistentFamily::from_homeo(&h, ell, depth).unwrap();
        prop_assert!(fam.consistency_check().is_ok());
        prop_assert!(fam.is_complete());
        let total: Rational = fam.level(depth).iter().map(|c| c.length.clone()).sum();
        prop_assert_eq!(total, Rational::one());
        // pushforward of Lebesgue through the family equals the exact one
        prop_assert_eq!(
            fam.cylinder_pushforward(0, depth).unwrap(),
            CircleMeasure::lebesgue().pushforward(&h).cylinder_vector(ell, depth).unwrap()
        );
    }

    #[test]
    fn rotation_companions_share_the_conjugate(s in any::<u64>(), ell in 2i64..5) {
        let h = homeo(s, 4);
        let fs: Vec<PLCircleMap> = wicked::rotation_companions(&h, ell)
            .unwrap()
            .iter()
            .map(|c| wicked::conjugate(c, ell).unwrap().f)
            .collect();
        prop_assert!(fs.iter().all(|f| f == &fs[0]));
        prop_assert_eq!(fs[0].fixed_points().len(), (ell - 1) as usize);
    }

    #[test]
    fn bernoulli_specs_are_invariant(a in 1i64..10, b in 1i64..10, p in 1usize..4, bump in 1i64..5) {
        let probs = [q!(a, a + b), q!(b, a + b)];
        let spec = CylinderSpec::bernoulli(&probs, p).unwrap();
        prop_assert!(spec.is_invariant());
        prop_assume!(p >= 2);
        let mut v = spec.values().to_vec();
        let eps = q!(bump, 1000) * v[0].clone().min(v[1].clone());
        v[0] += &eps;
        v[1] -= &eps;
        prop_assert!(!CylinderSpec::new(2, p, v).unwrap().is_invariant());
    }

    #[test]
    fn cesaro_split_is_exact(s in any::<u64>(), d in -1i64..=2, n in 1usize..6) {
        let mut rng = sample::rng(s);
        let f = sample::pl_map(&mut rng, 3, d).unwrap();
        let a = sample::arcs(&mut rng, 2);
        let split = classify::cesaro_split(&f, &a, n, DEFAULT_MAX_BREAKPOINTS).unwrap();
        prop_assert_eq!(split.whole, split.split);
    }

    #[test]
    fn float_copy_tracks_exact_evaluation(s in any::<u64>(), d in -2i64..=3, j in 0i64..1000) {
        let f = pl(s, 6, d);
        let x = q!(j, 1000);
        let exact = f.evaluate(&CirclePoint::from_lift(&x)).value().to_f64();
        let float = FloatMap::new(&f).eval(x.to_f64());
        prop_assert!(common::circle_dist_f64(exact, float) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn shredding_is_sound(s in any::<u64>(), e in prop::sample::select(vec![2i64, 5, 10])) {
        let f = pl(s, 4, 1);
        let eps = q!(1, e);
        let (g, rep) = shred::shred(&f, &eps, &ShredConfig::default()).unwrap();
        let v = shred::verify_shredding(&g, &rep);
        prop_assert!(v.all_passed(), "{:?}", v.first_failure());
        prop_assert!(v.min_slack().unwrap().is_positive());
        prop_assert!(rep.distance < eps);
        prop_assert_eq!(rep.regions.len(), rep.orbits.len() * rep.subcells[0].len());
    }

    #[test]
    fn perturbations_within_half_slack_keep_regions(s in any::<u64>()) {
        let f = PLCircleMap::expanding(2).unwrap();
        let (g, rep) = shred::shred(&f, &q!(1, 5), &ShredConfig::default()).unwrap();
        let slack = shred::verify_shredding(&g, &rep).min_slack().unwrap();
        let gp = sample::perturbation(&mut sample::rng(s), &g, &(slack / q!(2)), 4).unwrap();
        prop_assert!(shred::verify_shredding(&gp, &rep).items[0].passed);
    }

    #[test]
    fn labels_stay_exclusive(s in any::<u64>(), k in 1usize..3) {
        let protocol = WProtocol { grid: 60, horizons: vec![50, 500], ..WProtocol::default() };
        let h = sample::morse_smale(&mut sample::rng(s), k).unwrap();
        let f = pl(s, 4, 2);
        for target in [Target::Map(&h), Target::Map(&f)] {
            let d = classify::classify(target, &protocol).unwrap();
            let both = |a, b| d.status(a) == Status::Witnessed && d.status(b) == Status::Witnessed;
            prop_assert!(!both(Label::Wholesome, Label::Wacky));
            prop_assert!(!both(Label::Wonderful, Label::Weird));
        }
    }
}
