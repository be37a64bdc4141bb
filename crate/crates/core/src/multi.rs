//! Multi-matchings: row `r` selects `ℓ_r` positions. Semantics follow the
//! expansion that repeats row `r` exactly `ℓ_r` times.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::avoid::is_avoidable_element;
use crate::error::{Error, Result};
use crate::model::{ElementId, Permutation, PreferenceMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DegreeList {
    degrees: Vec<usize>,
}

impl DegreeList {
    /// Each degree must be at least 1 and at most the length of its row.
    pub fn new(degrees: Vec<usize>, matrix: &PreferenceMatrix) -> Result<Self> {
        let list = DegreeList { degrees };
        list.check(matrix)?;
        Ok(list)
    }

    pub fn ones(m: usize) -> Self {
        DegreeList { degrees: vec![1; m] }
    }

    fn check(&self, matrix: &PreferenceMatrix) -> Result<()> {
        if self.degrees.len() != matrix.m() {
            return Err(Error::InvalidDegreeList(format!(
                "{} degrees for {} rows",
                self.degrees.len(),
                matrix.m()
            )));
        }
        for (r, &l) in self.degrees.iter().enumerate() {
            if l == 0 || l > matrix.row_len(r) {
                return Err(Error::InvalidDegreeList(format!(
                    "row {} has length {} but degree {l}",
                    r + 1,
                    matrix.row_len(r)
                )));
            }
        }
        Ok(())
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }
}

/// Whitespace-separated positive integers, one per row.
pub fn parse_degree_list(text: &str, matrix: &PreferenceMatrix) -> Result<DegreeList> {
    let degrees = text
        .split_ascii_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::InvalidDegreeList(format!("bad degree {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    DegreeList::new(degrees, matrix)
}

/// A sequence of rows in which row `r` occurs exactly `ℓ_r` times.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MultisetPermutation {
    order: Vec<usize>,
}

impl MultisetPermutation {
    pub fn new(order: Vec<usize>, degrees: &DegreeList) -> Result<Self> {
        let mut counts = vec![0usize; degrees.degrees().len()];
        for &r in &order {
            let slot = counts.get_mut(r).ok_or_else(|| {
                Error::InvalidPermutation(format!("row {} out of range", r + 1))
            })?;
            *slot += 1;
        }
        if counts != degrees.degrees() {
            return Err(Error::InvalidPermutation(
                "occurrence counts differ from the degree list".into(),
            ));
        }
        Ok(MultisetPermutation { order })
    }

    /// Each row repeated `ℓ_r` times, rows in ascending order.
    pub fn sorted(degrees: &DegreeList) -> Self {
        let order = degrees
            .degrees()
            .iter()
            .enumerate()
            .flat_map(|(r, &l)| std::iter::repeat_n(r, l))
            .collect();
        MultisetPermutation { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// Selected columns per row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MultiMatching {
    positions: Vec<BTreeSet<usize>>,
}

impl MultiMatching {
    pub fn positions(&self) -> &[BTreeSet<usize>] {
        &self.positions
    }

    pub fn selected(&self, matrix: &PreferenceMatrix, row: usize) -> BTreeSet<ElementId> {
        self.positions[row]
            .iter()
            .map(|&c| matrix.name(matrix.ids(row)[c]).clone())
            .collect()
    }

    pub fn image(&self, matrix: &PreferenceMatrix) -> BTreeSet<ElementId> {
        (0..self.positions.len())
            .flat_map(|r| self.selected(matrix, r))
            .collect()
    }
}

/// The expanded matrix with the `(row, copy)` label of each of its rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub matrix: PreferenceMatrix,
    pub labels: Vec<(usize, usize)>,
}

impl Expansion {
    /// Replaces the `β`-th occurrence of row `α` by the expanded row `(α, β)`.
    pub fn lift(&self, pi: &MultisetPermutation) -> Permutation {
        let rows = self.labels.iter().map(|&(a, _)| a).max().map_or(0, |a| a + 1);
        let mut seen = vec![0usize; rows];
        let order = pi
            .order()
            .iter()
            .map(|&a| {
                let beta = seen[a];
                seen[a] += 1;
                self.labels
                    .iter()
                    .position(|&l| l == (a, beta))
                    .expect("permutation matches the degree list")
            })
            .collect();
        Permutation::new(order, self.matrix.m()).expect("lifted order is a permutation")
    }

    /// Folds a matching of the expanded matrix back onto the original rows.
    pub fn fold(&self, cols: &[Option<usize>], original_rows: usize) -> MultiMatching {
        let mut positions = vec![BTreeSet::new(); original_rows];
        for (i, c) in cols.iter().enumerate() {
            if let Some(c) = c {
                positions[self.labels[i].0].insert(*c);
            }
        }
        MultiMatching { positions }
    }
}

pub fn expand(matrix: &PreferenceMatrix, degrees: &DegreeList) -> Result<Expansion> {
    degrees.check(matrix)?;
    let names = matrix.name_rows();
    let mut rows = Vec::with_capacity(degrees.total());
    let mut labels = Vec::with_capacity(degrees.total());
    for (a, &l) in degrees.degrees().iter().enumerate() {
        for b in 0..l {
            rows.push(names[a].clone());
            labels.push((a, b));
        }
    }
    Ok(Expansion {
        matrix: PreferenceMatrix::from_element_rows(rows)?,
        labels,
    })
}

/// Processes the occurrences of `pi` in order, each picking the leftmost
/// untaken element of its row.
pub fn greedy_multimatch(
    matrix: &PreferenceMatrix,
    degrees: &DegreeList,
    pi: &MultisetPermutation,
) -> Result<MultiMatching> {
    degrees.check(matrix)?;
    let pi = MultisetPermutation::new(pi.order().to_vec(), degrees)?;
    let mut taken = vec![false; matrix.n()];
    let mut positions = vec![BTreeSet::new(); matrix.m()];
    for &r in pi.order() {
        let ids = matrix.ids(r);
        if let Some(c) = (0..ids.len()).find(|&c| !taken[ids[c] as usize]) {
            taken[ids[c] as usize] = true;
            positions[r].insert(c);
        }
    }
    Ok(MultiMatching { positions })
}

/// Decided on the expanded matrix.
pub fn is_avoidable_element_multi(
    matrix: &PreferenceMatrix,
    degrees: &DegreeList,
    x: &ElementId,
) -> Result<bool> {
    matrix.require_id(x)?;
    let expansion = expand(matrix, degrees)?;
    Ok(is_avoidable_element(&expansion.matrix, x)?.avoidable)
}

/// `Σ_{i=1..min(k,m)} ⌊ℓ/i⌋` with `ℓ` the degree total.
pub fn bound_pomm_coverage(m: usize, degrees: &DegreeList, k: usize) -> usize {
    let l = degrees.total();
    (1..=k.min(m)).map(|i| l / i).sum()
}
