mod common;

use common::*;
use pomlab_core::greedy::{
    greedy_match, improve_to_pom, is_one_pom, is_pom, peel, witness_permutation,
};
use pomlab_core::{Matching, Permutation};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn greedy_matches_string_oracle(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rows = random_matrix(&mut g, 7);
        let mx = matrix(&rows);
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.shuffle(&mut g);
        let tau = greedy_match(&mx, &Permutation::new(order.clone(), rows.len()).unwrap()).unwrap();
        prop_assert_eq!(tau.cols().to_vec(), greedy_cols(&rows, &order));
        prop_assert!(is_pom(&mx, &tau));
        prop_assert!(is_one_pom(&mx, &tau));
        let pi = witness_permutation(&mx, &tau).unwrap();
        prop_assert_eq!(greedy_match(&mx, &pi).unwrap(), tau);
    }

    #[test]
    fn is_pom_agrees_with_coalition_search(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rows = random_matrix(&mut g, 5);
        let mx = matrix(&rows);
        // A random injective partial assignment.
        let mut used = std::collections::HashSet::new();
        let cols: Vec<Option<usize>> = rows
            .iter()
            .map(|row| {
                if g.gen_bool(0.2) {
                    return None;
                }
                let c = g.gen_range(0..row.len());
                used.insert(row[c].clone()).then_some(c)
            })
            .collect();
        let tau = Matching::new(&mx, cols.clone()).unwrap();
        prop_assert_eq!(is_pom(&mx, &tau), is_pom_by_coalitions(&rows, &cols));
        if is_one_pom(&mx, &tau) {
            let better = improve_to_pom(&mx, &tau);
            prop_assert!(is_pom_by_coalitions(&rows, better.cols()));
            prop_assert!(pom_images(&rows).contains(&image_of(&rows, better.cols())));
        }
    }

    #[test]
    fn peeling_covers_every_pom(seed in any::<u64>()) {
        let mut g = rng(seed);
        let rows = random_matrix(&mut g, 5);
        let mx = matrix(&rows);
        for cols in all_poms(&rows) {
            let tau = Matching::new(&mx, cols).unwrap();
            let p = peel(&mx, &tau);
            prop_assert!(p.completed());
            let assigned = tau.cols().iter().filter(|c| c.is_some()).count();
            prop_assert_eq!(p.order.len(), assigned);
        }
    }
}

#[test]
fn one_pom_fixture_is_not_pom() {
    let rows: Rows = vec![
        vec!["1".into(), "5".into(), "3".into()],
        vec!["5".into(), "1".into(), "4".into()],
        vec!["5".into(), "1".into(), "2".into()],
    ];
    let mx = matrix(&rows);
    let tau = Matching::new(&mx, vec![Some(1), Some(1), Some(2)]).unwrap();
    assert!(is_one_pom(&mx, &tau));
    assert!(!is_pom(&mx, &tau));
    assert!(!is_pom_by_coalitions(&rows, tau.cols()));
    assert!(!peel(&mx, &tau).completed());
}
