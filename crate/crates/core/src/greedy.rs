//! Serial dictatorship and Pareto-optimality checks.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::model::{Matching, Permutation, PreferenceMatrix};

/// Processes rows in `pi`'s order; each row takes its leftmost element not
/// taken earlier, or stays unassigned when its row is exhausted.
pub fn greedy_match(matrix: &PreferenceMatrix, pi: &Permutation) -> Result<Matching> {
    if pi.len() != matrix.m() {
        return Err(Error::InvalidPermutation(format!(
            "permutation has {} rows, matrix has {}",
            pi.len(),
            matrix.m()
        )));
    }
    let mut taken = vec![false; matrix.n()];
    let mut cols = vec![None; matrix.m()];
    for &r in pi.order() {
        let pick = matrix.ids(r).iter().position(|&e| !taken[e as usize]);
        if let Some(c) = pick {
            taken[matrix.ids(r)[c] as usize] = true;
        }
        cols[r] = pick;
    }
    Ok(Matching::from_cols_unchecked(cols))
}

fn selected_flags(matrix: &PreferenceMatrix, tau: &Matching) -> Vec<bool> {
    let mut sel = vec![false; matrix.n()];
    for e in tau.image_ids(matrix) {
        sel[e as usize] = true;
    }
    sel
}

/// No single row can move to an element nobody selected: assigned rows have
/// every element left of their pick selected, unassigned rows have every
/// element selected.
pub fn is_one_pom(matrix: &PreferenceMatrix, tau: &Matching) -> bool {
    let sel = selected_flags(matrix, tau);
    (0..matrix.m()).all(|r| {
        let limit = tau.col(r).unwrap_or(matrix.row_len(r));
        matrix.ids(r)[..limit].iter().all(|&e| sel[e as usize])
    })
}

/// Every assigned row has all elements left of its pick selected.
pub fn selects_left_closure_holds(matrix: &PreferenceMatrix, tau: &Matching) -> bool {
    let sel = selected_flags(matrix, tau);
    (0..matrix.m()).all(|r| match tau.col(r) {
        Some(c) => matrix.ids(r)[..c].iter().all(|&e| sel[e as usize]),
        None => true,
    })
}

/// Result of peeling a matching: rows removed in order, and rows left over
/// when no further row had its pick as its top remaining element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Peeling {
    pub order: Vec<usize>,
    pub stuck: Vec<usize>,
}

impl Peeling {
    pub fn completed(&self) -> bool {
        self.stuck.is_empty()
    }
}

/// Repeatedly removes the lowest-index assigned row whose selected element is
/// its most preferred element among those not yet removed.
pub fn peel(matrix: &PreferenceMatrix, tau: &Matching) -> Peeling {
    let mut peeled_elems: HashSet<u32> = HashSet::new();
    let mut pending: Vec<usize> = (0..matrix.m()).filter(|&r| tau.col(r).is_some()).collect();
    let mut order = Vec::with_capacity(pending.len());
    loop {
        let next = pending.iter().position(|&r| {
            let top = matrix
                .ids(r)
                .iter()
                .position(|e| !peeled_elems.contains(e));
            top == tau.col(r)
        });
        match next {
            Some(i) => {
                let r = pending.remove(i);
                peeled_elems.insert(matrix.ids(r)[tau.col(r).unwrap()]);
                order.push(r);
            }
            None => break,
        }
    }
    Peeling {
        order,
        stuck: pending,
    }
}

/// Pareto optimality: peeling removes every assigned row and the matching is
/// a 1-POM (which covers unassigned rows).
pub fn is_pom(matrix: &PreferenceMatrix, tau: &Matching) -> bool {
    peel(matrix, tau).completed() && is_one_pom(matrix, tau)
}

/// Turns a 1-POM into a POM with the same image by rotating improvement
/// cycles until peeling completes.
///
/// Panics if `tau` is not a 1-POM.
pub fn improve_to_pom(matrix: &PreferenceMatrix, tau: &Matching) -> Matching {
    assert!(is_one_pom(matrix, tau), "improve_to_pom needs a 1-POM");
    let mut cols = tau.cols().to_vec();
    loop {
        let current = Matching::from_cols_unchecked(cols.clone());
        let peeling = peel(matrix, &current);
        if peeling.completed() {
            return current;
        }
        let peeled: HashSet<u32> = peeling
            .order
            .iter()
            .map(|&r| matrix.ids(r)[cols[r].unwrap()])
            .collect();
        let mut holder = vec![usize::MAX; matrix.n()];
        for &r in &peeling.stuck {
            holder[matrix.ids(r)[cols[r].unwrap()] as usize] = r;
        }
        // Each stuck row points at the stuck row holding its top remaining
        // element; in a 1-POM that element is always held, so a cycle exists.
        let wants = |r: usize| -> (usize, usize) {
            let c = matrix
                .ids(r)
                .iter()
                .position(|e| !peeled.contains(e))
                .expect("stuck row has an unpeeled pick");
            (c, holder[matrix.ids(r)[c] as usize])
        };
        let mut visited = vec![usize::MAX; matrix.m()];
        let mut path = Vec::new();
        let mut r = peeling.stuck[0];
        while visited[r] == usize::MAX {
            visited[r] = path.len();
            path.push(r);
            r = wants(r).1;
        }
        for &row in &path[visited[r]..] {
            cols[row] = Some(wants(row).0);
        }
    }
}

/// A permutation whose greedy matching equals the POM `tau`: its peeling
/// order followed by the unassigned rows.
pub fn witness_permutation(matrix: &PreferenceMatrix, tau: &Matching) -> Option<Permutation> {
    let peeling = peel(matrix, tau);
    if !peeling.completed() {
        return None;
    }
    let mut order = peeling.order;
    order.extend((0..matrix.m()).filter(|&r| tau.col(r).is_none()));
    let pi = Permutation::new(order, matrix.m()).ok()?;
    (greedy_match(matrix, &pi).ok()? == *tau).then_some(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_matrix, ElementId};

    const INTRO: &str = "1 5 3 2 4\n3 1 4 5 2\n1 3 5 4 2";
    const ONE_POM: &str = "1 5 3\n5 1 4\n5 1 2";

    fn m(text: &str) -> PreferenceMatrix {
        parse_matrix(text).unwrap()
    }

    fn image(mx: &PreferenceMatrix, tau: &Matching) -> Vec<String> {
        tau.image(mx).into_iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn greedy_on_intro_matrix() {
        let mx = m(INTRO);
        let pi = Permutation::parse_one_based("1 3 2", 3).unwrap();
        let tau = greedy_match(&mx, &pi).unwrap();
        assert_eq!(tau.cols(), &[Some(0), Some(2), Some(1)]);
        assert_eq!(image(&mx, &tau), ["1", "3", "4"]);
    }

    #[test]
    fn greedy_small_cases() {
        let one = m("1");
        let tau = greedy_match(&one, &Permutation::identity(1)).unwrap();
        assert_eq!(tau.cols(), &[Some(0)]);

        let two = m("1 4\n2 1\n2 5\n4 3");
        let pi = Permutation::parse_one_based("2 1 3 4", 4).unwrap();
        let tau = greedy_match(&two, &pi).unwrap();
        assert_eq!(image(&two, &tau), ["1", "2", "4", "5"]);

        assert!(greedy_match(&two, &Permutation::identity(3)).is_err());
    }

    #[test]
    fn greedy_leaves_exhausted_rows_unassigned() {
        let mx = m("1\n1 2");
        let pi = Permutation::parse_one_based("2 1", 2).unwrap();
        let tau = greedy_match(&mx, &pi).unwrap();
        assert_eq!(tau.cols(), &[None, Some(0)]);
        assert!(is_pom(&mx, &tau));
    }

    #[test]
    fn one_pom_but_not_pom() {
        let mx = m(ONE_POM);
        let tau = Matching::new(&mx, vec![Some(1), Some(2), Some(1)]).unwrap();
        assert!(is_one_pom(&mx, &tau));
        assert!(!is_pom(&mx, &tau));
        let peeling = peel(&mx, &tau);
        assert!(peeling.order.is_empty());
        assert_eq!(peeling.stuck, vec![0, 1, 2]);
    }

    #[test]
    fn intro_circled_matching_is_pom() {
        let mx = m(INTRO);
        let tau = Matching::new(&mx, vec![Some(0), Some(2), Some(1)]).unwrap();
        assert!(is_one_pom(&mx, &tau));
        assert!(is_pom(&mx, &tau));
        assert!(selects_left_closure_holds(&mx, &tau));
    }

    #[test]
    fn single_row_improvement_is_not_one_pom() {
        let mx = m(INTRO);
        let tau = Matching::new(&mx, vec![Some(1), Some(2), Some(1)]).unwrap();
        assert!(!is_one_pom(&mx, &tau));
        assert!(!is_pom(&mx, &tau));
    }

    #[test]
    fn distinct_first_column_is_pom() {
        let mx = m("1 2 3\n2 3 1\n3 1 2");
        let tau = Matching::new(&mx, vec![Some(0); 3]).unwrap();
        assert!(is_pom(&mx, &tau));
    }

    #[test]
    fn left_closure_fails_when_left_element_free() {
        let mx = m(INTRO);
        let tau = Matching::new(&mx, vec![Some(1), None, None]).unwrap();
        assert!(!selects_left_closure_holds(&mx, &tau));
    }

    #[test]
    fn improving_the_one_pom_fixture() {
        let mx = m(ONE_POM);
        let tau = Matching::new(&mx, vec![Some(1), Some(2), Some(1)]).unwrap();
        let better = improve_to_pom(&mx, &tau);
        assert!(is_pom(&mx, &better));
        assert_eq!(better.image(&mx), tau.image(&mx));
        let pi = witness_permutation(&mx, &better).unwrap();
        assert_eq!(greedy_match(&mx, &pi).unwrap(), better);
        let four = ElementId::new("4").unwrap();
        assert_eq!(better.selected(&mx, 1), Some(&four));
    }
}
