use ergm_extremal::classifier::{
    classify_clique_positive, phase_sweep, same_locations, Regime,
};
use ergm_extremal::criticals::{gamma_increasing, gamma_n_star, gamma_star, slope, tie_level, GAMMA_DECREASING};
use ergm_extremal::curves::{goodman_inflection, goodman_slope, razborov};
use ergm_extremal::variational::grid_minimize;
use ergm_extremal::{classify, Error, Exec, GraphonDescriptor as G, Objective, ParamPoint};
use proptest::prelude::*;

fn members(gamma: f64, a: f64, b: f64) -> Vec<G> {
    classify(&ParamPoint::negative(gamma, a, b)).unwrap().set.members
}

#[test]
fn spec_examples() {
    assert_eq!(members(0.5, -1.0, 0.0), vec![G::turan(2)]);
    assert_eq!(members(0.5, -2.0, 0.0), vec![G::turan(2), G::Complete]);
    assert_eq!(members(0.9, -slope(3, 0.9), 1.0), vec![G::turan(4)]);
    match members(2.0, -8.0 / 27.0, 0.0)[..] {
        [G::Interior { segment: 2, e_star, t_star }] => {
            assert!((e_star - 0.575).abs() < 5e-4);
            assert_eq!(t_star, razborov(2, e_star).unwrap());
        }
        ref other => panic!("{other:?}"),
    }
    assert_eq!(members(2.0, -6.0, 0.0), vec![G::Complete]);
    assert_eq!(members(1.5, 0.0, 0.0), vec![G::Empty]);
    let pos = classify(&ParamPoint::positive(1.0, -1.0, 0.0)).unwrap();
    assert_eq!(pos.set.members, vec![G::Empty, G::Complete]);
    match classify(&ParamPoint::positive(0.5, -1.0, 0.0)).unwrap().set.members[..] {
        [G::Box { side }] => assert!((side - 9.0 / 16.0).abs() < 1e-15),
        ref other => panic!("{other:?}"),
    }
    let v = classify(&ParamPoint::vertical(0.0, 3)).unwrap();
    assert_eq!(v.set.members, vec![G::Turan { k: 2, scale: 0.5 }]);
    assert_eq!(classify(&ParamPoint::vertical(1.0, 2)).unwrap().set.members, vec![G::Empty]);
    assert_eq!(classify_clique_positive(4, 1.0, -0.5, 0.0).unwrap().members, vec![G::Complete]);
    assert_eq!(classify_clique_positive(3, 1.0, -1.0, 0.5).unwrap().members, vec![G::Complete]);
    assert!(classify_clique_positive(2, 1.0, -1.0, 0.0).is_err());
}

#[test]
fn shallow_convex_point_is_interior() {
    // r^gamma leaves e_1 flat, so any a < 0 pushes the minimum past 1/2
    let c = classify(&ParamPoint::negative(2.0, -0.2, 0.0)).unwrap();
    assert_eq!(c.regime, Regime::ConvexShallow);
    assert!(matches!(c.set.members[..], [G::Interior { segment: 2, .. }]));
    assert!(c.certified);
}

#[test]
fn three_way_tie_at_gamma_n_star() {
    // at gamma_n*, a_{n-1} = s_n; choose n where that gamma is in the valley regime
    let n = 5;
    let g = gamma_n_star(n).unwrap();
    assert!(g > gamma_star() && g <= gamma_increasing());
    let a = -slope(n, g);
    assert!((tie_level(n - 1, g) + a).abs() < 1e-12);
    let set = members(g, a, 0.0);
    assert_eq!(set.len(), 3, "{set:?}");
    assert_eq!(members(g, a, -1.0), vec![G::turan(2)]);
    assert_eq!(members(g, a, 1.0), vec![G::turan(n + 1)]);
}

#[test]
fn gap_band_returns_oracle() {
    let err = classify(&ParamPoint::negative(1.1096, -1.55587, 0.0)).unwrap_err();
    match err {
        Error::Unclassified(u) => {
            assert_eq!(u.segment, Some(2));
            assert!((u.oracle.e_star - 2.0 / 3.0).abs() < 1e-4);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn appendix_consistency_below_gamma_star() {
    for g in [0.57, 0.6, 0.65, 0.69] {
        assert!(g > GAMMA_DECREASING && g < gamma_star());
        let lx2 = goodman_slope(goodman_inflection(g).unwrap(), g);
        for a in [-0.5 * lx2, -lx2] {
            assert_eq!(members(g, a, 0.0), vec![G::turan(2)], "g={g} a={a}");
        }
        let s2 = slope(2, g);
        for a in [-s2, -s2 - 0.3] {
            assert_eq!(members(g, a, 0.0), vec![G::Complete], "g={g} a={a}");
        }
    }
}

#[test]
fn regime_boundaries_are_continuous() {
    for boundary in [GAMMA_DECREASING, gamma_increasing()] {
        for a in [-0.3, -1.0, -1.7, -2.5] {
            let below = members(boundary - 1e-9, a, 0.0);
            let above = members(boundary + 1e-9, a, 0.0);
            assert_eq!(below, above, "gamma={boundary} a={a}");
        }
    }
}

#[test]
fn sweeps() {
    let rows = phase_sweep(0.5, &[-3.0, -1.0, -2.0], 0.0, Exec::Parallel).unwrap();
    let kinds: Vec<_> = rows.iter().map(|r| r.result.as_ref().unwrap().set.kind()).collect();
    assert_eq!(kinds, ["complete", "tie", "turan"]);

    // gamma = 100: interior e* increases with -a between -s_2 and -s_3
    let (s2, s3) = (slope(2, 100.0), slope(3, 100.0));
    let grid: Vec<f64> = (1..40).map(|i| -(s2 + (s3 - s2) * i as f64 / 40.0)).collect();
    let rows = phase_sweep(100.0, &grid, 0.0, Exec::Parallel).unwrap();
    let es: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.result.as_ref().ok())
        .map(|c| c.set.members[0].edge_density())
        .collect();
    assert!(es.len() > 30);
    // rows come back ordered by a, so -a decreases along the list
    assert!(es.windows(2).all(|w| w[1] < w[0]), "{es:?}");

    // gamma = 0.9: only Turán members, jumping from 2 to 3 classes as -a crosses s_2
    let (s2, s3) = (slope(2, 0.9), slope(3, 0.9));
    let grid: Vec<f64> = (1..40).map(|i| -(0.8 * s2 + (s3 - 0.8 * s2) * i as f64 / 40.0)).collect();
    let rows = phase_sweep(0.9, &grid, 0.0, Exec::Sequential).unwrap();
    let kinds: Vec<u64> = rows
        .iter()
        .map(|r| match r.result.as_ref().unwrap().set.members[..] {
            [G::Turan { k, .. }] => k,
            ref other => panic!("{other:?}"),
        })
        .collect();
    assert!(kinds.contains(&2) && kinds.contains(&3) && kinds.iter().all(|&k| k == 2 || k == 3));
    // a ascending means -a descending: 3 classes first, then 2
    assert!(kinds.windows(2).all(|w| w[0] >= w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn b_only_matters_at_ties(gamma in 0.1f64..3.0, frac in 0.01f64..1.0, b in -2.0f64..2.0) {
        let a = -(3.0 * gamma + 1.0) * frac;
        let base = classify(&ParamPoint::negative(gamma, a, 0.0));
        let moved = classify(&ParamPoint::negative(gamma, a, b));
        if let (Ok(x), Ok(y)) = (base, moved) {
            if !x.set.is_tie() {
                prop_assert_eq!(x.set, y.set);
            }
        }
    }

    #[test]
    fn positive_direction_matches_oracle(gamma in 0.2f64..2.0, a in -3.0f64..-0.01, s in 3u32..6) {
        let set = classify_clique_positive(s, gamma, a, 0.0).unwrap();
        let oracle = grid_minimize(&Objective::positive(a, gamma, s));
        prop_assert!(same_locations(&set.edge_densities(), &oracle.locations(), 1e-4));
    }
}
