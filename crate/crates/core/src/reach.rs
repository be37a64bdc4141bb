//! Reachability: exhaustive exploration of all greedy orders, and the
//! polynomial decision procedure for matrices whose rows have at most two
//! entries.

use std::collections::{BTreeSet, HashSet};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::avoid::{max_bipartite_matching, unavoidable_elements, BipartiteGraph};
use crate::error::{Error, Result};
use crate::greedy::{improve_to_pom, witness_permutation};
use crate::model::{
    row_element_graph, ElementId, Matching, Permutation, PreferenceMatrix,
};

pub const DEFAULT_STATE_BUDGET: usize = 5_000_000;

/// Upper bound on explored states; exceeding it is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_states: DEFAULT_STATE_BUDGET,
        }
    }
}

impl Budget {
    pub fn new(max_states: usize) -> Self {
        Budget { max_states }
    }
}

/// Rows processed so far and elements taken so far. The taken set is not a
/// function of the processed rows, so both form the key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GreedyState {
    pub done_rows: u64,
    pub taken: FixedBitSet,
}

const MAX_ROWS: usize = 64;

struct Explorer<'a> {
    matrix: &'a PreferenceMatrix,
    m: usize,
    budget: Budget,
}

impl<'a> Explorer<'a> {
    fn new(matrix: &'a PreferenceMatrix, budget: Budget) -> Result<Self> {
        if matrix.m() > MAX_ROWS {
            return Err(Error::BudgetExceeded(0));
        }
        Ok(Explorer {
            matrix,
            m: matrix.m(),
            budget,
        })
    }

    fn all_rows(&self) -> u64 {
        if self.m == 64 {
            u64::MAX
        } else {
            (1u64 << self.m) - 1
        }
    }

    /// Leftmost untaken column of `row`, within the first `m` entries.
    fn pick(&self, row: usize, taken: &FixedBitSet) -> Option<usize> {
        self.matrix.ids(row)[..self.matrix.row_len(row).min(self.m)]
            .iter()
            .position(|&e| !taken.contains(e as usize))
    }

    /// All terminal taken-sets.
    fn terminals(&self) -> Result<(Vec<FixedBitSet>, usize)> {
        let start = GreedyState {
            done_rows: 0,
            taken: FixedBitSet::with_capacity(self.matrix.n()),
        };
        let full = self.all_rows();
        let mut seen: HashSet<GreedyState> = HashSet::new();
        let mut terminal: HashSet<FixedBitSet> = HashSet::new();
        let mut stack = vec![start.clone()];
        seen.insert(start);
        while let Some(state) = stack.pop() {
            if state.done_rows == full {
                terminal.insert(state.taken);
                continue;
            }
            for r in (0..self.m).filter(|r| state.done_rows & (1 << r) == 0) {
                let mut taken = state.taken.clone();
                if let Some(c) = self.pick(r, &taken) {
                    taken.insert(self.matrix.ids(r)[c] as usize);
                }
                let next = GreedyState {
                    done_rows: state.done_rows | (1 << r),
                    taken,
                };
                if !seen.contains(&next) {
                    if seen.len() >= self.budget.max_states {
                        return Err(Error::BudgetExceeded(seen.len()));
                    }
                    seen.insert(next.clone());
                    stack.push(next);
                }
            }
        }
        Ok((terminal.into_iter().collect(), seen.len()))
    }

    /// Every (row, col) some greedy order selects.
    ///
    /// States are keyed on the rows still to process and the taken elements
    /// that still occur in those rows; the rest of the taken set cannot
    /// influence later picks.
    fn reachable_positions(&self) -> Result<(Vec<BTreeSet<usize>>, usize)> {
        let n = self.matrix.n();
        let mut occurs_in: Vec<u64> = vec![0; n];
        for r in 0..self.m {
            for &e in &self.matrix.ids(r)[..self.matrix.row_len(r).min(self.m)] {
                occurs_in[e as usize] |= 1 << r;
            }
        }
        let project = |remaining: u64, taken: &FixedBitSet| -> FixedBitSet {
            let mut key = FixedBitSet::with_capacity(n);
            for e in taken.ones() {
                if occurs_in[e] & remaining != 0 {
                    key.insert(e);
                }
            }
            key
        };
        let mut positions = vec![BTreeSet::new(); self.m];
        let start = (self.all_rows(), FixedBitSet::with_capacity(n));
        let mut seen: HashSet<(u64, FixedBitSet)> = HashSet::new();
        seen.insert(start.clone());
        let mut stack = vec![start];
        while let Some((remaining, taken)) = stack.pop() {
            for r in (0..self.m).filter(|r| remaining & (1 << r) != 0) {
                let mut next_taken = taken.clone();
                if let Some(c) = self.pick(r, &taken) {
                    positions[r].insert(c);
                    next_taken.insert(self.matrix.ids(r)[c] as usize);
                }
                let rest = remaining & !(1 << r);
                let key = (rest, project(rest, &next_taken));
                if !seen.contains(&key) {
                    if seen.len() >= self.budget.max_states {
                        return Err(Error::BudgetExceeded(seen.len()));
                    }
                    seen.insert(key.clone());
                    stack.push(key);
                }
            }
        }
        Ok((positions, seen.len()))
    }
}

/// The exactly reachable image sets and their union.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReachFamily {
    /// Sorted lexicographically (each set compared as a sorted sequence).
    pub exact_sets: Vec<BTreeSet<ElementId>>,
    pub reachable_elements: BTreeSet<ElementId>,
    pub states_explored: usize,
}

impl ReachFamily {
    pub fn len(&self) -> usize {
        self.exact_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exact_sets.is_empty()
    }

    pub fn contains(&self, set: &BTreeSet<ElementId>) -> bool {
        self.exact_sets.binary_search(set).is_ok()
    }
}

pub(crate) fn exact_family_bits(
    matrix: &PreferenceMatrix,
    budget: Budget,
) -> Result<(Vec<FixedBitSet>, usize)> {
    Explorer::new(matrix, budget)?.terminals()
}

/// Explores every greedy order with memoization on [`GreedyState`].
pub fn enumerate_exactly_reachable(
    matrix: &PreferenceMatrix,
    budget: Budget,
) -> Result<ReachFamily> {
    let (bits, states) = exact_family_bits(matrix, budget)?;
    let mut exact_sets: Vec<BTreeSet<ElementId>> = bits
        .iter()
        .map(|b| matrix.names_of(b.ones().map(|e| e as u32)))
        .collect();
    exact_sets.sort();
    let reachable_elements = exact_sets.iter().flatten().cloned().collect();
    Ok(ReachFamily {
        exact_sets,
        reachable_elements,
        states_explored: states,
    })
}

/// Per row, the columns selected by at least one POM.
pub fn reachable_positions(
    matrix: &PreferenceMatrix,
    budget: Budget,
) -> Result<Vec<BTreeSet<usize>>> {
    Ok(Explorer::new(matrix, budget)?.reachable_positions()?.0)
}

/// Per row, the rightmost reachable column (`None` if the row is never
/// assigned).
pub fn last_reachable_positions(
    matrix: &PreferenceMatrix,
    budget: Budget,
) -> Result<Vec<Option<usize>>> {
    Ok(reachable_positions(matrix, budget)?
        .into_iter()
        .map(|cols| cols.last().copied())
        .collect())
}

/// `E*`, the union of all POM images.
pub fn reachable_elements(
    matrix: &PreferenceMatrix,
    budget: Budget,
) -> Result<BTreeSet<ElementId>> {
    let positions = reachable_positions(matrix, budget)?;
    Ok(positions
        .iter()
        .enumerate()
        .flat_map(|(r, cols)| cols.iter().map(move |&c| matrix.ids(r)[c]))
        .map(|e| matrix.name(e).clone())
        .collect())
}

fn every_row_at_most_two(matrix: &PreferenceMatrix) -> bool {
    matrix.width() <= 2
}

/// Is some POM image a superset of `set`?
pub fn is_reachable(
    matrix: &PreferenceMatrix,
    set: &BTreeSet<ElementId>,
    budget: Budget,
) -> Result<bool> {
    matrix.require_ids(set)?;
    if every_row_at_most_two(matrix) {
        return decide_reachable_2col(matrix, set);
    }
    let family = enumerate_exactly_reachable(matrix, budget)?;
    Ok(family.exact_sets.iter().any(|s| set.is_subset(s)))
}

/// Polynomial reachability for rows of length at most two, decided per
/// connected component of the row-element graph. A tree component (one more
/// element than rows) can reach any part of its elements except all of its
/// avoidable elements together; any other component can reach all of its
/// elements.
pub fn decide_reachable_2col(
    matrix: &PreferenceMatrix,
    set: &BTreeSet<ElementId>,
) -> Result<bool> {
    if !every_row_at_most_two(matrix) {
        return Err(Error::NotTwoColumn);
    }
    matrix.require_ids(set)?;
    let unavoidable = unavoidable_elements(matrix);
    for comp in row_element_graph(matrix).components() {
        if comp.elements.len() == comp.rows.len() + 1 {
            let all_avoidable_wanted = comp
                .elements
                .iter()
                .filter(|e| !unavoidable.contains(*e))
                .all(|e| set.contains(e));
            if all_avoidable_wanted {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Constructive witness for two-column reachability: a POM whose image
/// contains `set`, or `None` if `set` is not reachable.
///
/// Each component gets a matching that covers all of its elements (or all but
/// one avoidable element outside `set`, for trees). Such a matching is a
/// 1-POM, which is then improved to a POM.
pub fn reach_witness_2col(
    matrix: &PreferenceMatrix,
    set: &BTreeSet<ElementId>,
) -> Result<Option<Matching>> {
    if !decide_reachable_2col(matrix, set)? {
        return Ok(None);
    }
    let unavoidable = unavoidable_elements(matrix);
    let mut cols = vec![None; matrix.m()];
    for comp in row_element_graph(matrix).components() {
        let mut cover: Vec<ElementId> = comp.elements.iter().cloned().collect();
        if comp.elements.len() == comp.rows.len() + 1 {
            let skip = comp
                .elements
                .iter()
                .find(|e| !unavoidable.contains(*e) && !set.contains(*e))
                .expect("decided reachable");
            cover.retain(|e| e != skip);
        }
        // Elements on the left, component rows on the right.
        let adj = cover
            .iter()
            .map(|e| {
                comp.rows
                    .iter()
                    .enumerate()
                    .filter(|(_, &r)| matrix.position_of(r, e).is_some())
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let mm = max_bipartite_matching(&BipartiteGraph::new(comp.rows.len(), adj));
        debug_assert!(mm.saturates_left());
        for (ei, ri) in mm.left_to_right.iter().enumerate() {
            if let Some(ri) = ri {
                let r = comp.rows[*ri];
                cols[r] = matrix.position_of(r, &cover[ei]);
            }
        }
    }
    let tau = Matching::new(matrix, cols)?;
    Ok(Some(improve_to_pom(matrix, &tau)))
}

/// A permutation whose greedy image contains `set`, for rows of length at
/// most two.
pub fn reach_permutation_2col(
    matrix: &PreferenceMatrix,
    set: &BTreeSet<ElementId>,
) -> Result<Option<Permutation>> {
    Ok(reach_witness_2col(matrix, set)?.and_then(|tau| witness_permutation(matrix, &tau)))
}

/// `Σ_{i=1..m} ⌊m/i⌋`, the bound on the number of reachable elements.
pub fn bound_reachable_elements(m: usize) -> usize {
    bound_k_pom_elements(m, m)
}

/// `Σ_{i=1..k} ⌊m/i⌋`, the bound on elements covered by `k` POMs.
pub fn bound_k_pom_elements(m: usize, k: usize) -> usize {
    (1..=k).map(|i| m / i).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_element_set, parse_matrix};

    const EXAMPLE1: &str = "1 5 3 2\n3 1 5 4\n1 6 5 4\n3 6 2 4";

    fn m(text: &str) -> PreferenceMatrix {
        parse_matrix(text).unwrap()
    }

    fn set(t: &str) -> BTreeSet<ElementId> {
        parse_element_set(t).unwrap()
    }

    #[test]
    fn example1_family() {
        let fam = enumerate_exactly_reachable(&m(EXAMPLE1), Budget::default()).unwrap();
        let mut expected = vec![set("1,3,4,5"), set("1,2,3,5"), set("1,2,3,6"), set("1,3,5,6")];
        expected.sort();
        assert_eq!(fam.exact_sets, expected);
        assert_eq!(fam.reachable_elements, set("1,2,3,4,5,6"));
    }

    #[test]
    fn distinct_first_column_has_one_set() {
        let fam = enumerate_exactly_reachable(&m("1 2 3\n2 3 1\n3 1 2"), Budget::default()).unwrap();
        assert_eq!(fam.exact_sets, vec![set("1,2,3")]);
    }

    #[test]
    fn two_column_family() {
        let fam =
            enumerate_exactly_reachable(&m("1 4\n2 1\n2 5\n4 3"), Budget::default()).unwrap();
        // Row 1 is exhausted in the order (r3, r2, r4, r1).
        assert_eq!(fam.exact_sets, vec![set("1,2,3,4"), set("1,2,4"), set("1,2,4,5")]);
    }

    #[test]
    fn reachable_elements_small() {
        assert_eq!(
            reachable_elements(&m(EXAMPLE1), Budget::default()).unwrap(),
            set("1,2,3,4,5,6")
        );
        assert_eq!(reachable_elements(&m("1"), Budget::default()).unwrap(), set("1"));
    }

    #[test]
    fn budget_is_enforced() {
        let err = enumerate_exactly_reachable(&m(EXAMPLE1), Budget::new(3)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(_)));
    }

    #[test]
    fn reachability_queries_example1() {
        let mx = m(EXAMPLE1);
        let b = Budget::default();
        assert!(!is_reachable(&mx, &set("4,6"), b).unwrap());
        assert!(is_reachable(&mx, &set("2,6"), b).unwrap());
        assert!(is_reachable(&mx, &BTreeSet::new(), b).unwrap());
    }

    #[test]
    fn two_column_decisions() {
        let mx = m("1 4\n2 1\n2 5\n4 3");
        assert!(!decide_reachable_2col(&mx, &set("1,4,3,5")).unwrap());
        assert!(!decide_reachable_2col(&mx, &set("2,4,5,3")).unwrap());
        assert!(decide_reachable_2col(&mx, &set("1,2,3,4")).unwrap());
        assert!(decide_reachable_2col(&mx, &BTreeSet::new()).unwrap());
        assert_eq!(
            decide_reachable_2col(&m("1 2 3"), &BTreeSet::new()).unwrap_err(),
            Error::NotTwoColumn
        );
    }

    #[test]
    fn two_column_witness_replays() {
        let mx = m("1 4\n2 1\n2 5\n4 3");
        let d = set("1,3");
        let pi = reach_permutation_2col(&mx, &d).unwrap().unwrap();
        let image = crate::greedy::greedy_match(&mx, &pi).unwrap().image(&mx);
        assert!(d.is_subset(&image));
        assert!(reach_permutation_2col(&mx, &set("3,5")).unwrap().is_none());
    }

    #[test]
    fn bounds() {
        assert_eq!(bound_reachable_elements(4), 8);
        assert_eq!(bound_reachable_elements(1), 1);
        assert_eq!(bound_k_pom_elements(6, 3), 11);
        assert_eq!(bound_k_pom_elements(9, 1), 9);
    }

    #[test]
    fn last_reachable_fixture() {
        // Bottom row: 4 (col 3) is last reachable, yet 1 (col 1) and 5 (col 2)
        // are never selected.
        let mx = m("5 4 3 2\n5 1 6 7\n1 2 8 9\n2 1 5 4");
        let pos = reachable_positions(&mx, Budget::default()).unwrap();
        assert_eq!(pos[3].last(), Some(&3));
        assert!(!pos[3].contains(&1));
        assert!(!pos[3].contains(&2));
    }
}
