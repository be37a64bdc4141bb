//! Preference matrices, positions, matchings and permutations.
//!
//! Rows are applicants, entries are houses ("elements"). Row `r` lists its
//! elements from most to least preferred. Rows may be ragged; a row whose
//! elements are all taken stays unassigned.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Opaque house identifier. Ordering is lexicographic on the token.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(String);

impl ElementId {
    pub fn new(token: impl Into<String>) -> Result<Self> {
        let token = token.into();
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken(token));
        }
        Ok(ElementId(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ElementId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ElementId::new(s)
    }
}

impl Serialize for ElementId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

/// Parses a set of element tokens separated by commas and/or whitespace.
pub fn parse_element_set(text: &str) -> Result<BTreeSet<ElementId>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(ElementId::new)
        .collect()
}

/// Generator of element names guaranteed not to clash with a given universe.
///
/// Names are `~1`, `~2`, ... skipping any name already taken.
#[derive(Debug, Clone)]
pub struct FreshNames {
    used: HashSet<String>,
    counter: usize,
}

impl FreshNames {
    pub fn new<'a>(taken: impl IntoIterator<Item = &'a ElementId>) -> Self {
        FreshNames {
            used: taken.into_iter().map(|e| e.0.clone()).collect(),
            counter: 0,
        }
    }

    pub fn avoiding(matrix: &PreferenceMatrix) -> Self {
        Self::new(matrix.names.iter())
    }

    pub fn next_id(&mut self) -> ElementId {
        loop {
            self.counter += 1;
            let name = format!("~{}", self.counter);
            if self.used.insert(name.clone()) {
                return ElementId(name);
            }
        }
    }

    /// Reserves a caller-chosen name, appending `'` until it is unused.
    pub fn reserve(&mut self, base: &str) -> ElementId {
        let mut name = base.to_string();
        while !self.used.insert(name.clone()) {
            name.push('\'');
        }
        ElementId(name)
    }
}

/// `(row, col)`, both 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

/// Preference matrix with interned elements.
///
/// Internally each element is a dense `u32` index into `names`, assigned in
/// order of first appearance (row-major).
#[derive(Debug, Clone)]
pub struct PreferenceMatrix {
    rows: Vec<Vec<u32>>,
    names: Vec<ElementId>,
    index: HashMap<ElementId, u32>,
}

impl PreferenceMatrix {
    pub fn from_rows<R, T>(rows: impl IntoIterator<Item = R>) -> Result<Self>
    where
        R: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut names = Vec::new();
        let mut index: HashMap<ElementId, u32> = HashMap::new();
        let mut out = Vec::new();
        for (r, row) in rows.into_iter().enumerate() {
            let mut ids = Vec::new();
            for token in row {
                let id = ElementId::new(token.as_ref())?;
                let next = names.len() as u32;
                let ix = *index.entry(id.clone()).or_insert_with(|| {
                    names.push(id.clone());
                    next
                });
                if ids.contains(&ix) {
                    return Err(Error::DuplicateInRow(r, id));
                }
                ids.push(ix);
            }
            if ids.is_empty() {
                return Err(Error::EmptyRow(r));
            }
            out.push(ids);
        }
        if out.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        Ok(PreferenceMatrix {
            rows: out,
            names,
            index,
        })
    }

    pub fn from_element_rows(rows: Vec<Vec<ElementId>>) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(ElementId::as_str)))
    }

    /// Row count.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Longest row length.
    pub fn width(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_row_len(&self) -> usize {
        self.rows.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn row_len(&self, row: usize) -> usize {
        self.rows[row].len()
    }

    /// True when every row has at least `m` entries, so no row can ever be
    /// left without an element.
    pub fn is_complete(&self) -> bool {
        self.min_row_len() >= self.m()
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = &ElementId> + '_ {
        self.rows[row].iter().map(|&e| &self.names[e as usize])
    }

    pub fn entry(&self, pos: Position) -> &ElementId {
        &self.names[self.rows[pos.row][pos.col] as usize]
    }

    /// Number of distinct elements.
    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn element_universe(&self) -> BTreeSet<ElementId> {
        self.names.iter().cloned().collect()
    }

    pub fn contains(&self, e: &ElementId) -> bool {
        self.index.contains_key(e)
    }

    pub fn position_of(&self, row: usize, e: &ElementId) -> Option<usize> {
        let ix = *self.index.get(e)?;
        self.rows[row].iter().position(|&x| x == ix)
    }

    pub fn name_rows(&self) -> Vec<Vec<ElementId>> {
        (0..self.m()).map(|r| self.row(r).cloned().collect()).collect()
    }

    /// Text in the interchange format: one row per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.m() {
            let line: Vec<&str> = self.row(r).map(ElementId::as_str).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub(crate) fn ids(&self, row: usize) -> &[u32] {
        &self.rows[row]
    }

    pub(crate) fn name(&self, id: u32) -> &ElementId {
        &self.names[id as usize]
    }

    pub(crate) fn id_of(&self, e: &ElementId) -> Option<u32> {
        self.index.get(e).copied()
    }

    pub(crate) fn require_id(&self, e: &ElementId) -> Result<u32> {
        self.id_of(e).ok_or_else(|| Error::UnknownElement(e.clone()))
    }

    pub(crate) fn require_ids<'a>(
        &self,
        set: impl IntoIterator<Item = &'a ElementId>,
    ) -> Result<Vec<u32>> {
        set.into_iter().map(|e| self.require_id(e)).collect()
    }

    pub(crate) fn names_of(&self, ids: impl IntoIterator<Item = u32>) -> BTreeSet<ElementId> {
        ids.into_iter().map(|i| self.name(i).clone()).collect()
    }
}

impl PartialEq for PreferenceMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.m() == other.m() && (0..self.m()).all(|r| self.row(r).eq(other.row(r)))
    }
}

impl Eq for PreferenceMatrix {}

impl fmt::Display for PreferenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for PreferenceMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_matrix(s)
    }
}

impl Serialize for PreferenceMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.name_rows().serialize(serializer)
    }
}

/// Parses the line-oriented matrix format. Lines starting with `#` and
/// blank lines are skipped.
pub fn parse_matrix(text: &str) -> Result<PreferenceMatrix> {
    let rows: Vec<Vec<&str>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_ascii_whitespace().collect())
        .collect();
    PreferenceMatrix::from_rows(rows)
}

/// Keeps the first `min(m, len)` entries of every row. Entries past column
/// `m` can never be selected.
pub fn truncate_to_square(matrix: &PreferenceMatrix) -> PreferenceMatrix {
    let m = matrix.m();
    let rows = (0..m).map(|r| matrix.row(r).take(m).map(ElementId::as_str));
    PreferenceMatrix::from_rows(rows).expect("truncation preserves validity")
}

/// Appends `k` columns; column `j` of the appendix holds one fresh element
/// in every row.
pub fn pad_with_fresh_columns(matrix: &PreferenceMatrix, k: usize) -> PreferenceMatrix {
    pad_with_fresh_columns_named(matrix, k).0
}

/// Same as [`pad_with_fresh_columns`], also returning the fresh names in
/// column order.
pub fn pad_with_fresh_columns_named(
    matrix: &PreferenceMatrix,
    k: usize,
) -> (PreferenceMatrix, Vec<ElementId>) {
    let mut fresh = FreshNames::avoiding(matrix);
    let pad: Vec<ElementId> = (0..k).map(|_| fresh.next_id()).collect();
    let rows = matrix
        .name_rows()
        .into_iter()
        .map(|mut row| {
            row.extend(pad.iter().cloned());
            row
        })
        .collect();
    let padded = PreferenceMatrix::from_element_rows(rows).expect("fresh columns are distinct");
    (padded, pad)
}

/// The square, complete matrix equivalent to `matrix`: padded with enough
/// shared fresh columns that no row can run out, then truncated to `m`
/// columns. Returns the padding names in column order.
///
/// A set `E` is exactly reachable in `matrix` iff `E` plus the first
/// `m - |E|` padding names is exactly reachable in the result.
pub fn complete_square(matrix: &PreferenceMatrix) -> (PreferenceMatrix, Vec<ElementId>) {
    let k = matrix.m().saturating_sub(matrix.min_row_len());
    let (padded, pad) = pad_with_fresh_columns_named(matrix, k);
    (truncate_to_square(&padded), pad)
}

/// One connected piece of a [`RowElementGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub rows: Vec<usize>,
    pub elements: BTreeSet<ElementId>,
    pub edges: usize,
}

impl Component {
    /// Vertex count equals edge count plus one.
    pub fn is_tree(&self) -> bool {
        self.rows.len() + self.elements.len() == self.edges + 1
    }
}

/// Bipartite graph joining each row to the elements occurring in it.
#[derive(Debug, Clone)]
pub struct RowElementGraph {
    pub row_count: usize,
    pub element_count: usize,
    /// `adjacency[r]` lists element indices of row `r`.
    adjacency: Vec<Vec<u32>>,
    names: Vec<ElementId>,
}

impl RowElementGraph {
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn neighbors(&self, row: usize) -> impl Iterator<Item = &ElementId> + '_ {
        self.adjacency[row].iter().map(|&e| &self.names[e as usize])
    }

    pub fn components(&self) -> Vec<Component> {
        let mut parent: Vec<usize> = (0..self.row_count + self.element_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (r, adj) in self.adjacency.iter().enumerate() {
            for &e in adj {
                let a = find(&mut parent, r);
                let b = find(&mut parent, self.row_count + e as usize);
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut by_root: Vec<(usize, Component)> = Vec::new();
        for r in 0..self.row_count {
            let root = find(&mut parent, r);
            let slot = match by_root.iter().position(|(k, _)| *k == root) {
                Some(i) => i,
                None => {
                    by_root.push((
                        root,
                        Component {
                            rows: Vec::new(),
                            elements: BTreeSet::new(),
                            edges: 0,
                        },
                    ));
                    by_root.len() - 1
                }
            };
            let comp = &mut by_root[slot].1;
            comp.rows.push(r);
            comp.edges += self.adjacency[r].len();
            comp.elements
                .extend(self.adjacency[r].iter().map(|&e| self.names[e as usize].clone()));
        }
        by_root.into_iter().map(|(_, c)| c).collect()
    }
}

pub fn row_element_graph(matrix: &PreferenceMatrix) -> RowElementGraph {
    RowElementGraph {
        row_count: matrix.m(),
        element_count: matrix.n(),
        adjacency: matrix.rows.clone(),
        names: matrix.names.clone(),
    }
}

/// An ordering of all rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>, m: usize) -> Result<Self> {
        if order.len() != m {
            return Err(Error::InvalidPermutation(format!(
                "expected {m} rows, got {}",
                order.len()
            )));
        }
        let mut seen = vec![false; m];
        for &r in &order {
            if r >= m {
                return Err(Error::InvalidPermutation(format!("row {} out of range", r + 1)));
            }
            if std::mem::replace(&mut seen[r], true) {
                return Err(Error::InvalidPermutation(format!("row {} repeated", r + 1)));
            }
        }
        Ok(Permutation { order })
    }

    pub fn identity(m: usize) -> Self {
        Permutation {
            order: (0..m).collect(),
        }
    }

    /// Parses 1-based row numbers separated by whitespace or commas.
    pub fn parse_one_based(text: &str, m: usize) -> Result<Self> {
        let order = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| match t.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::InvalidPermutation(format!("bad row number {t:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(order, m)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Per-row selected column, or `None` for an unassigned row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    cols: Vec<Option<usize>>,
}

impl Matching {
    /// Validates that every column lies inside its row and that selected
    /// elements are pairwise distinct.
    pub fn new(matrix: &PreferenceMatrix, cols: Vec<Option<usize>>) -> Result<Self> {
        if cols.len() != matrix.m() {
            return Err(Error::InvalidMatching(format!(
                "expected {} rows, got {}",
                matrix.m(),
                cols.len()
            )));
        }
        let mut seen = HashSet::new();
        for (r, c) in cols.iter().enumerate() {
            if let Some(c) = *c {
                if c >= matrix.row_len(r) {
                    return Err(Error::InvalidMatching(format!(
                        "column {} outside row {}",
                        c + 1,
                        r + 1
                    )));
                }
                let e = matrix.ids(r)[c];
                if !seen.insert(e) {
                    return Err(Error::InvalidMatching(format!(
                        "element {} selected twice",
                        matrix.name(e)
                    )));
                }
            }
        }
        Ok(Matching { cols })
    }

    /// Builds a matching from the element each row selects (`None` for
    /// unassigned).
    pub fn from_elements(
        matrix: &PreferenceMatrix,
        selected: &[Option<ElementId>],
    ) -> Result<Self> {
        let cols = selected
            .iter()
            .enumerate()
            .map(|(r, e)| match e {
                None => Ok(None),
                Some(e) => matrix.position_of(r, e).map(Some).ok_or_else(|| {
                    Error::InvalidMatching(format!("element {e} not in row {}", r + 1))
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Matching::new(matrix, cols)
    }

    pub(crate) fn from_cols_unchecked(cols: Vec<Option<usize>>) -> Self {
        Matching { cols }
    }

    pub fn cols(&self) -> &[Option<usize>] {
        &self.cols
    }

    pub fn col(&self, row: usize) -> Option<usize> {
        self.cols[row]
    }

    pub fn positions(&self) -> Vec<Position> {
        self.cols
            .iter()
            .enumerate()
            .filter_map(|(row, c)| c.map(|col| Position { row, col }))
            .collect()
    }

    pub fn selected<'a>(&self, matrix: &'a PreferenceMatrix, row: usize) -> Option<&'a ElementId> {
        self.cols[row].map(|c| matrix.entry(Position { row, col: c }))
    }

    /// `s(τ)`.
    pub fn image(&self, matrix: &PreferenceMatrix) -> BTreeSet<ElementId> {
        matrix.names_of(self.image_ids(matrix))
    }

    pub(crate) fn image_ids(&self, matrix: &PreferenceMatrix) -> Vec<u32> {
        self.cols
            .iter()
            .enumerate()
            .filter_map(|(r, c)| c.map(|c| matrix.ids(r)[c]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use super::*;

    const INTRO: &str = "1 5 3 2 4\n3 1 4 5 2\n1 3 5 4 2";

    fn ids(tokens: &[&str]) -> BTreeSet<ElementId> {
        tokens.iter().map(|t| ElementId::new(*t).unwrap()).collect()
    }

    #[test]
    fn parses_intro_matrix() {
        let m = parse_matrix(INTRO).unwrap();
        assert_eq!(m.m(), 3);
        assert_eq!(m.width(), 5);
        assert_eq!(m.element_universe(), ids(&["1", "2", "3", "4", "5"]));
    }

    #[test]
    fn parses_minimal_and_skips_comments() {
        let m = parse_matrix("# comment\n\n1\n").unwrap();
        assert_eq!(m.m(), 1);
        assert_eq!(m.width(), 1);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_matrix("1 1").unwrap_err(),
            Error::DuplicateInRow(0, ElementId::new("1").unwrap())
        );
        assert_eq!(parse_matrix("# only\n\n").unwrap_err(), Error::EmptyMatrix);
        let empty: Vec<Vec<&str>> = vec![vec!["1"], vec![]];
        assert_eq!(PreferenceMatrix::from_rows(empty).unwrap_err(), Error::EmptyRow(1));
    }

    #[test]
    fn truncates_intro_to_square() {
        let m = parse_matrix(INTRO).unwrap();
        let sq = truncate_to_square(&m);
        assert_eq!(sq, parse_matrix("1 5 3\n3 1 4\n1 3 5").unwrap());
        let one = parse_matrix("1").unwrap();
        assert_eq!(truncate_to_square(&one), one);
    }

    #[test]
    fn pads_two_column_example() {
        let m = parse_matrix("1 4\n2 1\n2 5\n4 3").unwrap();
        let (p, pad) = pad_with_fresh_columns_named(&m, 2);
        assert_eq!(pad.len(), 2);
        assert!(pad.iter().all(|c| !m.contains(c)));
        assert_eq!(p.width(), 4);
        for r in 0..4 {
            let row: Vec<_> = p.row(r).cloned().collect();
            assert_eq!(&row[2..], &pad[..]);
        }
        assert_eq!(pad_with_fresh_columns(&m, 0), m);
    }

    #[test]
    fn fresh_names_skip_existing() {
        let m = parse_matrix("~1 ~2\n~3 a").unwrap();
        let mut fresh = FreshNames::avoiding(&m);
        assert_eq!(fresh.next_id().as_str(), "~4");
        assert_eq!(fresh.reserve("a").as_str(), "a'");
    }

    #[test]
    fn row_element_graph_shapes() {
        let g = row_element_graph(&parse_matrix("1 4\n2 1\n2 5\n4 3").unwrap());
        assert_eq!((g.row_count, g.element_count, g.edge_count()), (4, 5, 8));
        let comps = g.components();
        assert_eq!(comps.len(), 1);
        assert!(comps[0].is_tree());

        let g = row_element_graph(&parse_matrix("1").unwrap());
        assert_eq!(g.edge_count(), 1);

        let g = row_element_graph(&parse_matrix("1 2\n3 4").unwrap());
        assert_eq!(g.components().len(), 2);
    }

    #[test]
    fn matching_validation() {
        let m = parse_matrix(INTRO).unwrap();
        assert!(Matching::new(&m, vec![Some(0), Some(1), Some(0)]).is_err());
        assert!(Matching::new(&m, vec![Some(5), None, None]).is_err());
        let tau = Matching::new(&m, vec![Some(0), Some(2), Some(1)]).unwrap();
        assert_eq!(tau.image(&m), ids(&["1", "3", "4"]));
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 0], 2).is_err());
        assert!(Permutation::new(vec![0, 2], 2).is_err());
        assert!(Permutation::parse_one_based("1 3 2", 3).is_ok());
        assert!(Permutation::parse_one_based("0 1", 2).is_err());
    }

    #[test]
    fn complete_square_pads_short_rows() {
        let m = parse_matrix("1\n1 2").unwrap();
        let (c, pad) = complete_square(&m);
        assert!(c.is_complete());
        assert_eq!(pad.len(), 1);
        assert_eq!(c.row(0).cloned().collect::<Vec<_>>()[1], pad[0]);
    }

    proptest! {
        #[test]
        fn text_round_trip(rows in proptest::collection::vec(
            proptest::sample::subsequence((0..9).collect::<Vec<u32>>(), 1..6)
                .prop_shuffle(), 1..6)) {
            let text: String = rows
                .iter()
                .map(|r| r.iter().map(|e| format!("e{e}")).collect::<Vec<_>>().join(" ") + "\n")
                .collect();
            let m = parse_matrix(&text).unwrap();
            prop_assert_eq!(parse_matrix(&m.to_text()).unwrap(), m);
        }
    }
}
