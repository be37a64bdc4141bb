use std::ops::Range;

use crate::model::{ElementId, FreshNames, PreferenceMatrix};

/// A flattened matrix together with the block of rows each original row
/// became.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flattened {
    pub matrix: PreferenceMatrix,
    pub blocks: Vec<Range<usize>>,
    pub links: Vec<ElementId>,
}

/// Rows longer than three become chains `(a1,a2,β1), (β1,a3,β2), …,
/// (β_{L−3},a_{L−1},a_L)` with new link elements `β`; shorter rows are kept.
pub fn flatten_to_3cols(matrix: &PreferenceMatrix) -> PreferenceMatrix {
    flatten_with_blocks(matrix).matrix
}

pub fn flatten_with_blocks(matrix: &PreferenceMatrix) -> Flattened {
    let mut fresh = FreshNames::avoiding(matrix);
    let mut rows: Vec<Vec<ElementId>> = Vec::new();
    let mut blocks = Vec::with_capacity(matrix.m());
    let mut links = Vec::new();
    for row in matrix.name_rows() {
        let start = rows.len();
        if row.len() <= 3 {
            rows.push(row);
        } else {
            let l = row.len();
            let betas: Vec<ElementId> = (0..l - 3).map(|_| fresh.next_id()).collect();
            rows.push(vec![row[0].clone(), row[1].clone(), betas[0].clone()]);
            for t in 1..l - 3 {
                rows.push(vec![betas[t - 1].clone(), row[t + 1].clone(), betas[t].clone()]);
            }
            rows.push(vec![betas[l - 4].clone(), row[l - 2].clone(), row[l - 1].clone()]);
            links.extend(betas);
        }
        blocks.push(start..rows.len());
    }
    Flattened {
        matrix: PreferenceMatrix::from_element_rows(rows).expect("flattened rows are valid"),
        blocks,
        links,
    }
}
