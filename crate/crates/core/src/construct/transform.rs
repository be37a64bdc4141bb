use std::collections::HashMap;

use crate::avoid::is_avoidable_element;
use crate::error::{Error, Result};
use crate::model::{ElementId, FreshNames, PreferenceMatrix};
use crate::reach::{last_reachable_positions, Budget};

/// Deletes the listed unavoidable elements from every row and prepends one
/// constant column per listed element, in list order.
pub fn transform_unavoidable_front(
    matrix: &PreferenceMatrix,
    elements: &[ElementId],
) -> Result<PreferenceMatrix> {
    for e in elements {
        if !matrix.contains(e) {
            return Err(Error::UnknownElement(e.clone()));
        }
        if is_avoidable_element(matrix, e)?.avoidable {
            return Err(Error::ElementNotUnavoidable(e.clone()));
        }
    }
    let rows: Vec<Vec<ElementId>> = matrix
        .name_rows()
        .into_iter()
        .map(|row| {
            let mut out: Vec<ElementId> = elements.to_vec();
            out.extend(row.into_iter().filter(|e| !elements.contains(e)));
            out
        })
        .collect();
    PreferenceMatrix::from_element_rows(rows)
}

/// Replaces shared last-reachable elements by fresh ones until every row's
/// last reachable element occurs nowhere else. Rows are scanned in ascending
/// order and positions are recomputed after each replacement.
pub fn transform_unique_last_reachable(
    matrix: &PreferenceMatrix,
    budget: Budget,
) -> Result<PreferenceMatrix> {
    let mut fresh = FreshNames::avoiding(matrix);
    let mut current = matrix.clone();
    loop {
        let last = last_reachable_positions(&current, budget)?;
        let mut counts: HashMap<&ElementId, usize> = HashMap::new();
        for r in 0..current.m() {
            for e in current.row(r) {
                *counts.entry(e).or_default() += 1;
            }
        }
        let target = last.iter().enumerate().find_map(|(r, col)| {
            let c = (*col)?;
            let e = current.row(r).nth(c)?;
            (counts[e] > 1).then_some((r, c))
        });
        let Some((r, c)) = target else {
            return Ok(current);
        };
        let mut rows = current.name_rows();
        rows[r][c] = fresh.next_id();
        current = PreferenceMatrix::from_element_rows(rows)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::count_exactly_reachable;
    use crate::model::parse_matrix;

    const EXAMPLE1: &str = "1 5 3 2\n3 1 5 4\n1 6 5 4\n3 6 2 4";

    fn ids(tokens: &[&str]) -> Vec<ElementId> {
        tokens.iter().map(|t| ElementId::new(*t).unwrap()).collect()
    }

    #[test]
    fn front_transform_example() {
        let m = parse_matrix(EXAMPLE1).unwrap();
        let t = transform_unavoidable_front(&m, &ids(&["1", "3"])).unwrap();
        assert_eq!(t.to_text(), "1 3 5 2\n1 3 5 4\n1 3 6 5 4\n1 3 6 2 4\n");
        let b = Budget::default();
        assert!(count_exactly_reachable(&t, b).unwrap() >= count_exactly_reachable(&m, b).unwrap());
        assert_eq!(transform_unavoidable_front(&m, &[]).unwrap(), m);
    }

    #[test]
    fn front_transform_rejects_avoidable() {
        let m = parse_matrix(EXAMPLE1).unwrap();
        assert_eq!(
            transform_unavoidable_front(&m, &ids(&["2"])).unwrap_err(),
            Error::ElementNotUnavoidable(ElementId::new("2").unwrap())
        );
        assert!(transform_unavoidable_front(&m, &ids(&["9"])).is_err());
    }

    #[test]
    fn unique_last_already_unique() {
        let m = parse_matrix("1 2\n3 4").unwrap();
        assert_eq!(transform_unique_last_reachable(&m, Budget::default()).unwrap(), m);
    }

    #[test]
    fn unique_last_intro_matrix() {
        let m = parse_matrix("1 5 3 2 4\n3 1 4 5 2\n1 3 5 4 2").unwrap();
        let b = Budget::default();
        let t = transform_unique_last_reachable(&m, b).unwrap();
        let last = last_reachable_positions(&t, b).unwrap();
        for (r, c) in last.iter().enumerate() {
            let e = t.row(r).nth(c.unwrap()).unwrap();
            let occurrences = (0..t.m()).filter(|&s| t.row(s).any(|x| x == e)).count();
            assert_eq!(occurrences, 1);
        }
        assert!(count_exactly_reachable(&t, b).unwrap() >= count_exactly_reachable(&m, b).unwrap());
    }
}
