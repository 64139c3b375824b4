//! Structural invariants checked on randomized inputs: box enumeration,
//! Spin^c bookkeeping, relation symmetry, determinant routes, blow-down
//! determinants, conjugation, and U-shift bookkeeping.

use num::BigRational;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use plumb_core::dcomb::LeveledVector;
use plumb_core::*;
use proptest::prelude::*;

fn arb_forest() -> impl Strategy<Value = PlumbingGraph> {
    (1usize..=6).prop_flat_map(|n| {
        let weights = proptest::collection::vec(-7i64..=-1, n);
        let links = proptest::collection::vec((any::<u8>(), any::<bool>()), n - 1);
        (weights, links).prop_map(move |(w, links)| {
            let mut edges = Vec::new();
            for (i, (p, keep)) in links.into_iter().enumerate() {
                let v = i + 1;
                if keep {
                    edges.push((p as usize % v, v));
                }
            }
            PlumbingGraph::new(w, edges).unwrap()
        })
    })
}

fn small_box(g: &PlumbingGraph) -> bool {
    initial_box_size(g) <= BigInt::from(4000)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn box_iteration_is_sorted_and_complete(g in arb_forest()) {
        prop_assume!(small_box(&g));
        let members: Vec<Vec<i64>> = initial_box(&g).collect();
        prop_assert_eq!(BigInt::from(members.len()), initial_box_size(&g));
        for k in &members {
            prop_assert!(is_characteristic(&g, k));
            prop_assert!(in_box(&g, k, 0));
        }
        for w in members.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn spinc_count_and_reduction(g in arb_forest(), pick in any::<u64>(), v in any::<u8>()) {
        let f = IntersectionForm::new(&g);
        prop_assume!(!f.det().is_zero());
        prop_assume!(small_box(&g));
        let sp = SpinCTable::new(&g, &f).unwrap();
        prop_assert_eq!(BigInt::from(sp.count()), f.h1_order().unwrap());
        let members: Vec<Vec<i64>> = initial_box(&g).collect();
        prop_assume!(!members.is_empty());
        let k = &members[(pick as usize) % members.len()];
        let t = sp.index_of_vector(&g, k).unwrap();
        // the residue is a fixed point of reduction
        let r = sp.reduce(sp.residue(t)).unwrap();
        prop_assert_eq!(&r, &sp.residue(t).to_vec());
        // moving by twice a column of Q stays in the class
        let v = v as usize % g.n();
        let shifted = add_2pd(&f, k, v, 1);
        prop_assert_eq!(sp.index_of_vector(&g, &shifted).unwrap(), t);
    }

    #[test]
    fn relation_steps_are_symmetric(g in arb_forest(), pick in any::<u64>(), level in 0i64..=2) {
        let f = IntersectionForm::new(&g);
        prop_assume!(!f.det().is_zero());
        prop_assume!(small_box(&g));
        let members: Vec<Vec<i64>> = initial_box(&g).collect();
        prop_assume!(!members.is_empty());
        let k = members[(pick as usize) % members.len()].clone();
        let x = LeveledVector::new(level, k);
        for y in relation_neighbors(&g, &f, &x) {
            prop_assert!(relation_neighbors(&g, &f, &y).contains(&x));
        }
    }

    #[test]
    fn square_increment_identity(g in arb_forest(), pick in any::<u64>(), v in any::<u8>()) {
        let f = IntersectionForm::new(&g);
        prop_assume!(!f.det().is_zero());
        prop_assume!(small_box(&g));
        let members: Vec<Vec<i64>> = initial_box(&g).collect();
        prop_assume!(!members.is_empty());
        let k = &members[(pick as usize) % members.len()];
        let v = v as usize % g.n();
        let up = add_2pd(&f, k, v, 1);
        let bump = BigRational::from(BigInt::from(4 * (k[v] + g.weight(v))));
        prop_assert_eq!(f.square(&up).unwrap(), f.square(k).unwrap() + bump);
    }

    #[test]
    fn determinant_routes_agree(g in arb_forest()) {
        let f = IntersectionForm::new(&g);
        prop_assert_eq!(&det_by_tree_expansion(&g), f.det());
    }

    #[test]
    fn blow_down_pair_matches_determinants(g in arb_forest(), v in any::<u8>()) {
        let v = v as usize % g.n();
        let (gprime, gplus) = g.blow_down_pair(v).unwrap();
        let dp = det_by_tree_expansion(&gprime).abs();
        let dq = det_by_tree_expansion(&gplus).abs();
        prop_assert_eq!(dp, dq);
    }

    #[test]
    fn conjugation_is_an_involution(g in arb_forest()) {
        let f = IntersectionForm::new(&g);
        prop_assume!(!f.det().is_zero());
        let sp = SpinCTable::new(&g, &f).unwrap();
        for t in 0..sp.count() {
            let c = sp.conjugate_index(t).unwrap();
            prop_assert_eq!(sp.conjugate_index(c).unwrap(), t);
            let neg: Vec<i64> = sp.residue(t).iter().map(|x| -x).collect();
            prop_assert_eq!(sp.index_of_vector(&g, &neg).unwrap(), c);
        }
    }
}

#[test]
fn conjugate_classes_share_censuses() {
    for s in [
        "5; -2 -2 -2 -3 -3; 0-1 0-2 0-3 0-4",
        "2; -2 -3; 0-1",
        "5; -2 -2 -2 -2 -2; 0-1 1-2 2-3 3-4",
    ] {
        let g = parse_graph(s).unwrap();
        let f = IntersectionForm::new(&g);
        let sp = SpinCTable::new(&g, &f).unwrap();
        for t in 0..sp.count() {
            let c = sp.conjugate_index(t).unwrap();
            let a = build_classes(&g, &f, &sp, t, 1, 1, DEFAULT_STATE_CAP).unwrap();
            let b = build_classes(&g, &f, &sp, c, 1, 1, DEFAULT_STATE_CAP).unwrap();
            for n in 0..=1 {
                assert_eq!(a.census(n).unwrap(), b.census(n).unwrap(), "{} class {}", s, t);
            }
        }
    }
}

#[test]
fn u_shift_raises_degree_by_two() {
    let two = BigRational::from(BigInt::from(2));
    for s in [
        "4; -1 -2 -3 -7; 0-1 0-2 0-3",
        "5; -2 -2 -2 -3 -3; 0-1 0-2 0-3 0-4",
    ] {
        let g = parse_graph(s).unwrap();
        let f = IntersectionForm::new(&g);
        let sp = SpinCTable::new(&g, &f).unwrap();
        for t in 0..sp.count() {
            let table = build_classes(&g, &f, &sp, t, 2, 1, DEFAULT_STATE_CAP).unwrap();
            for c in 0..table.classes.len() {
                if let Ok(sid) = table.u_shift(c) {
                    assert_eq!(
                        table.classes[sid].delta,
                        &table.classes[c].delta + &two
                    );
                    if let (Some(k), Some(ks)) =
                        (table.classes[c].kill, table.classes[sid].kill)
                    {
                        assert!(ks >= k + 1, "shift cannot lower the kill level");
                    }
                }
            }
        }
    }
}
