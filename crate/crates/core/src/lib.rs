//! Pareto-optimal matchings in house allocation: greedy matchings, POM
//! checks, avoidability, reachability, counting, constructions and
//! multi-matchings.

pub mod avoid;
pub mod construct;
pub mod count;
pub mod error;
pub mod greedy;
pub mod model;
pub mod multi;
pub mod reach;

pub use error::{Error, Result};
pub use model::{
    parse_element_set, parse_matrix, ElementId, Matching, Permutation, Position, PreferenceMatrix,
};
pub use reach::Budget;
