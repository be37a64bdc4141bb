mod common;

use std::collections::BTreeSet;

use common::*;
use pomlab_core::greedy::greedy_match;
use pomlab_core::multi::{
    bound_pomm_coverage, expand, greedy_multimatch, is_avoidable_element_multi, DegreeList,
    MultisetPermutation,
};
use pomlab_core::reach::enumerate_exactly_reachable;
use pomlab_core::Budget;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// Distinct orderings of the multiset in which row `r` appears `degrees[r]`
/// times.
fn multiset_orders(degrees: &[usize]) -> Vec<Vec<usize>> {
    fn go(left: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.iter().all(|&l| l == 0) {
            out.push(prefix.clone());
            return;
        }
        for r in 0..left.len() {
            if left[r] > 0 {
                left[r] -= 1;
                prefix.push(r);
                go(left, prefix, out);
                prefix.pop();
                left[r] += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut degrees.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Greedy multi-matching on string rows: each occurrence takes the leftmost
/// untaken element of its row.
fn multi_image(rows: &Rows, order: &[usize]) -> Image {
    let mut taken = Image::new();
    for &r in order {
        if let Some(e) = rows[r].iter().find(|e| !taken.contains(*e)) {
            taken.insert(e.clone());
        }
    }
    taken
}

fn random_instance(g: &mut impl Rng, max_m: usize, max_total: usize) -> (Rows, Vec<usize>) {
    loop {
        let m = g.gen_range(1..=max_m);
        let degrees: Vec<usize> = (0..m).map(|_| g.gen_range(1..=3)).collect();
        if degrees.iter().sum::<usize>() > max_total {
            continue;
        }
        let n = g.gen_range(degrees.iter().copied().max().unwrap()..=max_total + 2);
        let mut universe: Vec<String> = (1..=n).map(|e| e.to_string()).collect();
        let rows = degrees
            .iter()
            .map(|&l| {
                let len = g.gen_range(l..=n);
                universe.partial_shuffle(g, len).0.to_vec()
            })
            .collect();
        return (rows, degrees);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn multi_family_equals_expansion_family(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (rows, degrees) = random_instance(&mut g, 3, 6);
        let mx = matrix(&rows);
        let l = DegreeList::new(degrees.clone(), &mx).unwrap();
        let x = expand(&mx, &l).unwrap();
        let orders = multiset_orders(&degrees);
        let direct: BTreeSet<Image> = orders.iter().map(|o| multi_image(&rows, o)).collect();
        let expanded: BTreeSet<Image> = enumerate_exactly_reachable(&x.matrix, Budget::default())
            .unwrap()
            .exact_sets
            .iter()
            .map(strs)
            .collect();
        prop_assert_eq!(&direct, &expanded);

        for o in orders.iter().take(30) {
            let pi = MultisetPermutation::new(o.clone(), &l).unwrap();
            let mm = greedy_multimatch(&mx, &l, &pi).unwrap();
            prop_assert_eq!(strs(&mm.image(&mx)), multi_image(&rows, o));
            let lifted = greedy_match(&x.matrix, &x.lift(&pi)).unwrap();
            prop_assert_eq!(x.fold(lifted.cols(), rows.len()), mm);
            prop_assert!(is_pom_by_coalitions(&rows_of(&x.matrix), lifted.cols()));
        }

        for e in mx.element_universe() {
            let oracle = direct.iter().any(|s| !s.contains(e.as_str()));
            prop_assert_eq!(is_avoidable_element_multi(&mx, &l, &e).unwrap(), oracle);
        }

        let images: Vec<&Image> = direct.iter().collect();
        let m = rows.len();
        let all: Image = images.iter().flat_map(|s| s.iter().cloned()).collect();
        prop_assert!(all.len() <= bound_pomm_coverage(m, &l, m));
        for mask in 1u64..1 << images.len().min(12) {
            let k = mask.count_ones() as usize;
            let cover: Image = (0..images.len().min(12))
                .filter(|i| mask >> i & 1 == 1)
                .flat_map(|i| images[i].iter().cloned())
                .collect();
            prop_assert!(cover.len() <= bound_pomm_coverage(m, &l, k));
        }
    }
}
