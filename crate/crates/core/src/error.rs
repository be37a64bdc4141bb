use thiserror::Error;

use crate::model::ElementId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix has no rows")]
    EmptyMatrix,
    #[error("row {0} is empty")]
    EmptyRow(usize),
    #[error("element {1} appears twice in row {0}")]
    DuplicateInRow(usize, ElementId),
    #[error("invalid element token {0:?}")]
    InvalidToken(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("unknown element {0}")]
    UnknownElement(ElementId),
    #[error("state budget exceeded after exploring {0} states")]
    BudgetExceeded(usize),
    #[error("matrix has a row longer than two entries")]
    NotTwoColumn,
    #[error("construction level {level} exceeds the supported maximum {max}")]
    LevelTooLarge { level: usize, max: usize },
    #[error("graph is not connected")]
    GraphNotConnected,
    #[error("element {0} is avoidable")]
    ElementNotUnavoidable(ElementId),
    #[error("invalid degree list: {0}")]
    InvalidDegreeList(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}
