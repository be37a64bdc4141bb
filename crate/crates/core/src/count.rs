//! Counting reachable and exactly reachable sets.

use std::collections::{BTreeSet, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use serde::Serialize;

use crate::avoid::unavoidable_elements;
use crate::error::{Error, Result};
use crate::model::{row_element_graph, ElementId, PreferenceMatrix};
use crate::reach::{exact_family_bits, Budget};

/// One component of the row-element graph of a two-column matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub rows: usize,
    pub elements: BTreeSet<ElementId>,
    pub avoidable_count: usize,
    pub unavoidable_count: usize,
    pub is_tree: bool,
}

/// Number of reachable sets (the empty set included) for rows of length at
/// most two: `Π (2^{a_i} − χ_i) · 2^{u_i}` over components.
pub fn count_reachable_2col(
    matrix: &PreferenceMatrix,
) -> Result<(BigUint, Vec<ComponentSummary>)> {
    if matrix.width() > 2 {
        return Err(Error::NotTwoColumn);
    }
    let unavoidable = unavoidable_elements(matrix);
    let mut total = BigUint::from(1u32);
    let mut summaries = Vec::new();
    for comp in row_element_graph(matrix).components() {
        let u = comp.elements.iter().filter(|e| unavoidable.contains(*e)).count();
        let a = comp.elements.len() - u;
        let is_tree = comp.elements.len() == comp.rows.len() + 1;
        let avoidable_part = (BigUint::from(1u32) << a) - BigUint::from(u32::from(is_tree));
        total *= avoidable_part << u;
        summaries.push(ComponentSummary {
            rows: comp.rows.len(),
            elements: comp.elements,
            avoidable_count: a,
            unavoidable_count: u,
            is_tree,
        });
    }
    Ok((total, summaries))
}

/// Size of the downward closure of the exactly reachable family, by explicit
/// subset accumulation.
pub fn count_reachable_bruteforce(matrix: &PreferenceMatrix, budget: Budget) -> Result<usize> {
    let (family, _) = exact_family_bits(matrix, budget)?;
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let mut queue: VecDeque<FixedBitSet> = VecDeque::new();
    for s in family {
        if seen.insert(s.clone()) {
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        for e in s.ones() {
            let mut sub = s.clone();
            sub.set(e, false);
            if !seen.contains(&sub) {
                if seen.len() >= budget.max_states {
                    return Err(Error::BudgetExceeded(seen.len()));
                }
                seen.insert(sub.clone());
                queue.push_back(sub);
            }
        }
    }
    Ok(seen.len())
}

/// `|𝓔(M)|`.
pub fn count_exactly_reachable(matrix: &PreferenceMatrix, budget: Budget) -> Result<usize> {
    Ok(exact_family_bits(matrix, budget)?.0.len())
}

/// Exactly reachable sets containing `required`.
pub fn count_exactly_reachable_supersets(
    matrix: &PreferenceMatrix,
    required: &BTreeSet<ElementId>,
    budget: Budget,
) -> Result<usize> {
    let ids = matrix.require_ids(required)?;
    let (family, _) = exact_family_bits(matrix, budget)?;
    Ok(family
        .iter()
        .filter(|s| ids.iter().all(|&e| s.contains(e as usize)))
        .count())
}

/// `binom(N, m)` with `N = ⌈m (ln m + 1)⌉`.
pub fn bound_exact_family(m: usize) -> BigUint {
    assert!(m >= 1, "bound needs at least one row");
    let mf = m as f64;
    let n = (mf * (mf.ln() + 1.0)).ceil() as usize;
    binomial(n.max(m), m)
}

pub(crate) fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}
