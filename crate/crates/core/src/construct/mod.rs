//! Extremal matrices, reduction gadgets and matrix transformations.

mod extremal;
mod flatten;
mod graph;
mod sat;
mod transform;

use serde::Serialize;

use crate::model::{ElementId, Permutation, PreferenceMatrix};

pub use extremal::{
    construct_half_constant, construct_mk, construct_nk, coverage, MAX_MK_LEVEL, MAX_NK_LEVEL,
};
pub use flatten::{flatten_to_3cols, flatten_with_blocks, Flattened};
pub use graph::{
    count_independent_sets, parse_edge_list, reduce_independent_set, SimpleGraph,
};
pub use sat::{
    count_one_in_three_assignments, parse_dimacs, reduce_1in3sat, CnfFormula, Literal,
};
pub use transform::{transform_unavoidable_front, transform_unique_last_reachable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionOutput {
    pub matrix: PreferenceMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Permutation>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub marked_element: Option<ElementId>,
    pub claimed_value: usize,
}
