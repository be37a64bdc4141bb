//! Avoidable elements and sets through the Hall condition on the
//! "left of x" graph, plus exact reachability of full-size sets.
//!
//! All checks run on the completed square matrix (see
//! [`complete_square`]): rows are padded with shared fresh columns so that a
//! row that would otherwise end up unassigned takes a padding element. The
//! certificates are translated back to the original matrix, where a row
//! matched to padding is reported as unassigned.

mod bipartite;

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

pub use bipartite::{
    hall_violator, max_bipartite_matching, BipartiteGraph, BipartiteMatching,
};

use crate::error::Result;
use crate::greedy::{improve_to_pom, witness_permutation};
use crate::model::{
    complete_square, truncate_to_square, ElementId, Matching, Permutation, PreferenceMatrix,
};

/// What the left-of graph is built against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Target {
    Element(ElementId),
    /// A set collapsed to one pseudo-element at its leftmost occurrence in
    /// each row.
    Collapsed(BTreeSet<ElementId>),
}

/// Rows joined to the elements strictly left of the target in that row (the
/// whole row when the target does not occur).
#[derive(Debug, Clone)]
pub struct LeftOfGraph {
    pub target: Target,
    square: PreferenceMatrix,
    padding: Vec<ElementId>,
    prefix: Vec<usize>,
}

impl LeftOfGraph {
    pub fn new(matrix: &PreferenceMatrix, target: Target) -> Result<Self> {
        let members: Vec<ElementId> = match &target {
            Target::Element(x) => vec![x.clone()],
            Target::Collapsed(xs) => xs.iter().cloned().collect(),
        };
        matrix.require_ids(&members)?;
        let (square, padding) = complete_square(matrix);
        let prefix = prefixes(&square, &members);
        Ok(LeftOfGraph {
            target,
            square,
            padding,
            prefix,
        })
    }

    pub fn rows(&self) -> usize {
        self.square.m()
    }

    /// `E_x({row})`, including padding names for short rows.
    pub fn neighbors(&self, row: usize) -> impl Iterator<Item = &ElementId> + '_ {
        self.square.row(row).take(self.prefix[row])
    }

    /// `E_x(R)`.
    pub fn left_elements(&self, rows: &[usize]) -> BTreeSet<ElementId> {
        rows.iter()
            .flat_map(|&r| self.neighbors(r).cloned())
            .collect()
    }

    pub fn padding(&self) -> &[ElementId] {
        &self.padding
    }

    pub fn to_bipartite(&self) -> BipartiteGraph {
        bipartite_of(&self.square, &self.prefix)
    }
}

fn prefixes(square: &PreferenceMatrix, members: &[ElementId]) -> Vec<usize> {
    let targets: HashSet<u32> = members.iter().filter_map(|e| square.id_of(e)).collect();
    (0..square.m())
        .map(|r| {
            square
                .ids(r)
                .iter()
                .position(|e| targets.contains(e))
                .unwrap_or(square.row_len(r))
        })
        .collect()
}

fn bipartite_of(square: &PreferenceMatrix, prefix: &[usize]) -> BipartiteGraph {
    let adj = (0..square.m())
        .map(|r| square.ids(r)[..prefix[r]].iter().map(|&e| e as usize).collect())
        .collect();
    BipartiteGraph::new(square.n(), adj)
}

/// Witness returned with every avoidability answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchingCertificate {
    /// Every row matched to a distinct element left of the target. Rows that
    /// take a padding element are unassigned here.
    Saturating {
        #[serde(serialize_with = "serialize_cols")]
        matching: Matching,
    },
    /// Rows `R` with `|E_x(R)| < |R|`.
    Deficient {
        rows: Vec<usize>,
        left_elements: BTreeSet<ElementId>,
    },
}

fn serialize_cols<S: serde::Serializer>(
    m: &Matching,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    m.cols().serialize(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Avoidance {
    pub avoidable: bool,
    pub certificate: MatchingCertificate,
}

struct Solved {
    square: PreferenceMatrix,
    prefix: Vec<usize>,
    graph: BipartiteGraph,
    matching: BipartiteMatching,
}

fn solve(square: PreferenceMatrix, targets: &[ElementId]) -> Solved {
    let prefix = prefixes(&square, targets);
    let graph = bipartite_of(&square, &prefix);
    let matching = max_bipartite_matching(&graph);
    Solved {
        square,
        prefix,
        graph,
        matching,
    }
}

impl Solved {
    fn square_matching(&self) -> Option<Matching> {
        if !self.matching.saturates_left() {
            return None;
        }
        let cols = (0..self.square.m())
            .map(|r| {
                let e = self.matching.left_to_right[r].expect("saturating") as u32;
                self.square.ids(r).iter().position(|&x| x == e)
            })
            .collect();
        Some(Matching::from_cols_unchecked(cols))
    }

    fn certificate(&self, original: &PreferenceMatrix) -> MatchingCertificate {
        match self.square_matching() {
            Some(tau) => MatchingCertificate::Saturating {
                matching: to_original(original, &tau),
            },
            None => {
                let rows = hall_violator(&self.graph, &self.matching);
                let left_elements = rows
                    .iter()
                    .flat_map(|&r| self.square.ids(r)[..self.prefix[r]].iter())
                    .map(|&e| self.square.name(e).clone())
                    .collect();
                MatchingCertificate::Deficient {
                    rows,
                    left_elements,
                }
            }
        }
    }
}

/// Columns past the original row end point at padding; they become
/// unassigned.
fn to_original(original: &PreferenceMatrix, tau: &Matching) -> Matching {
    let cols = tau
        .cols()
        .iter()
        .enumerate()
        .map(|(r, c)| c.filter(|&c| c < original.row_len(r)))
        .collect();
    Matching::from_cols_unchecked(cols)
}

/// Decides whether some POM avoids `x`.
pub fn is_avoidable_element(matrix: &PreferenceMatrix, x: &ElementId) -> Result<Avoidance> {
    matrix.require_id(x)?;
    Ok(avoid_members(matrix, std::slice::from_ref(x)))
}

/// Decides whether some POM avoids every element of `set`.
pub fn is_avoidable_set(
    matrix: &PreferenceMatrix,
    set: &BTreeSet<ElementId>,
) -> Result<Avoidance> {
    matrix.require_ids(set)?;
    let members: Vec<ElementId> = set.iter().cloned().collect();
    Ok(avoid_members(matrix, &members))
}

fn avoid_members(matrix: &PreferenceMatrix, members: &[ElementId]) -> Avoidance {
    let (square, _) = complete_square(matrix);
    let solved = solve(square, members);
    Avoidance {
        avoidable: solved.matching.saturates_left(),
        certificate: solved.certificate(matrix),
    }
}

/// A POM of `matrix` whose image misses every element of `set`, if one
/// exists. Built by left-sliding the saturating matching into a 1-POM and
/// then removing improvement cycles.
pub fn avoiding_pom(
    matrix: &PreferenceMatrix,
    set: &BTreeSet<ElementId>,
) -> Result<Option<Matching>> {
    matrix.require_ids(set)?;
    let (square, _) = complete_square(matrix);
    let members: Vec<ElementId> = set.iter().cloned().collect();
    let solved = solve(square, &members);
    Ok(solved.square_matching().map(|tau| {
        let slid = left_slide(&solved.square, &tau);
        to_original(matrix, &improve_to_pom(&solved.square, &slid))
    }))
}

/// Moves rows, in ascending index order and repeated to a fixpoint, to their
/// leftmost element not selected by another row. Unassigned rows take their
/// leftmost free element. The result is a 1-POM.
pub fn left_slide(matrix: &PreferenceMatrix, tau: &Matching) -> Matching {
    let mut cols = tau.cols().to_vec();
    let mut holder: Vec<Option<usize>> = vec![None; matrix.n()];
    for (r, c) in cols.iter().enumerate() {
        if let Some(c) = *c {
            holder[matrix.ids(r)[c] as usize] = Some(r);
        }
    }
    loop {
        let mut moved = false;
        for r in 0..matrix.m() {
            let limit = cols[r].unwrap_or(matrix.row_len(r));
            let free = matrix.ids(r)[..limit]
                .iter()
                .position(|&e| holder[e as usize].is_none());
            if let Some(c) = free {
                if let Some(old) = cols[r] {
                    holder[matrix.ids(r)[old] as usize] = None;
                }
                holder[matrix.ids(r)[c] as usize] = Some(r);
                cols[r] = Some(c);
                moved = true;
            }
        }
        if !moved {
            return Matching::from_cols_unchecked(cols);
        }
    }
}

/// Elements of the square truncation that every POM selects.
pub fn unavoidable_elements(matrix: &PreferenceMatrix) -> BTreeSet<ElementId> {
    let (square, _) = complete_square(matrix);
    truncate_to_square(matrix)
        .element_universe()
        .into_iter()
        .filter(|x| {
            let solved = solve(square.clone(), std::slice::from_ref(x));
            !solved.matching.saturates_left()
        })
        .collect()
}

/// A permutation whose greedy matching has image exactly `set`, if any.
///
/// Sets with `|E| = m` go straight through set avoidability of the
/// complement. Smaller sets (possible only when some row can run out) are
/// first extended by the leading padding elements that the exhausted rows
/// would take in the completed matrix.
pub fn exact_reachability_witness(
    matrix: &PreferenceMatrix,
    set: &BTreeSet<ElementId>,
) -> Result<Option<Permutation>> {
    matrix.require_ids(set)?;
    let m = matrix.m();
    if set.len() > m {
        return Ok(None);
    }
    let (square, pad) = complete_square(matrix);
    let missing = m - set.len();
    if missing > pad.len() {
        return Ok(None);
    }
    let mut wanted: BTreeSet<ElementId> = set.clone();
    wanted.extend(pad[..missing].iter().cloned());
    if !wanted.iter().all(|e| square.contains(e)) {
        return Ok(None);
    }
    let complement: Vec<ElementId> = square
        .element_universe()
        .into_iter()
        .filter(|e| !wanted.contains(e))
        .collect();
    let solved = solve(square, &complement);
    let Some(tau) = solved.square_matching() else {
        return Ok(None);
    };
    let pom = improve_to_pom(&solved.square, &left_slide(&solved.square, &tau));
    let Some(pi) = witness_permutation(&solved.square, &pom) else {
        return Ok(None);
    };
    let image = crate::greedy::greedy_match(matrix, &pi)?.image(matrix);
    Ok((image == *set).then_some(pi))
}

pub fn is_exactly_reachable(matrix: &PreferenceMatrix, set: &BTreeSet<ElementId>) -> Result<bool> {
    Ok(exact_reachability_witness(matrix, set)?.is_some())
}

/// Re-checks a certificate against the matrix it was issued for.
pub fn verify_certificate(
    matrix: &PreferenceMatrix,
    target: &Target,
    certificate: &MatchingCertificate,
) -> Result<bool> {
    let graph = LeftOfGraph::new(matrix, target.clone())?;
    match certificate {
        MatchingCertificate::Deficient {
            rows,
            left_elements,
        } => {
            let actual = graph.left_elements(rows);
            Ok(!rows.is_empty() && actual == *left_elements && actual.len() < rows.len())
        }
        MatchingCertificate::Saturating { matching } => {
            if Matching::new(matrix, matching.cols().to_vec()).is_err() {
                return Ok(false);
            }
            let m = matrix.m();
            let mut spare = Vec::new();
            for r in 0..m {
                let allowed: Vec<&ElementId> = graph.neighbors(r).collect();
                match matching.selected(matrix, r) {
                    Some(e) => {
                        if !allowed.contains(&e) {
                            return Ok(false);
                        }
                    }
                    None => {
                        // Rows left unassigned must reach distinct padding
                        // elements left of the target.
                        let pads = allowed
                            .iter()
                            .filter(|e| graph.padding().contains(e))
                            .count();
                        spare.push(pads);
                    }
                }
            }
            spare.sort_unstable();
            Ok(spare.iter().enumerate().all(|(i, &cap)| cap > i))
        }
    }
}
