//! Exact-one-in-three formulas and their matrix gadget.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{ElementId, FreshNames, PreferenceMatrix};

use super::ConstructionOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    /// 1-based variable index.
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn from_dimacs(v: i64) -> Self {
        Literal {
            var: v.unsigned_abs() as usize,
            negated: v < 0,
        }
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var - 1] != self.negated
    }

    fn element(self) -> String {
        if self.negated {
            format!("!x{}", self.var)
        } else {
            format!("x{}", self.var)
        }
    }

    fn complement(self) -> Literal {
        Literal {
            negated: !self.negated,
            ..self
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}

/// A conjunction of 3-literal clauses read with exactly-one semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        for (i, clause) in clauses.iter().enumerate() {
            for lit in clause {
                if lit.var == 0 || lit.var > num_vars {
                    return Err(Error::Parse {
                        line: 0,
                        message: format!("clause {} uses variable {} outside 1..={num_vars}", i + 1, lit.var),
                    });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    /// Every clause has exactly one true literal.
    pub fn one_in_three(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().filter(|l| l.eval(assignment)).count() == 1)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            out.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        out
    }
}

/// Reads DIMACS-style text: `c` comment lines, one `p cnf <vars> <clauses>`
/// header, then 0-terminated clauses of exactly three nonzero literals.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let err = |line: usize, message: String| Error::Parse { line, message };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_ascii_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(err(line_no, format!("bad header {line:?}")));
            }
            let vars = parts[2].parse().map_err(|_| err(line_no, "bad variable count".into()))?;
            let count = parts[3].parse().map_err(|_| err(line_no, "bad clause count".into()))?;
            header = Some((vars, count));
            continue;
        }
        if header.is_none() {
            return Err(err(line_no, "clause before header".into()));
        }
        for tok in line.split_ascii_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| err(line_no, format!("bad literal {tok:?}")))?;
            if v == 0 {
                let clause: [Literal; 3] = current
                    .as_slice()
                    .try_into()
                    .map_err(|_| err(line_no, format!("clause has {} literals, expected 3", current.len())))?;
                clauses.push(clause);
                current.clear();
            } else {
                current.push(Literal::from_dimacs(v));
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| err(0, "missing header".into()))?;
    if !current.is_empty() {
        return Err(err(0, "unterminated clause".into()));
    }
    if clauses.len() != count {
        return Err(err(0, format!("header announces {count} clauses, found {}", clauses.len())));
    }
    CnfFormula::new(vars, clauses)
}

/// Exhaustive count of exactly-one-in-three assignments.
pub fn count_one_in_three_assignments(phi: &CnfFormula) -> usize {
    let n = phi.num_vars();
    assert!(n < 32, "exhaustive enumeration limited to 31 variables");
    (0u32..1 << n)
        .filter(|bits| {
            let assignment: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            phi.one_in_three(&assignment)
        })
        .count()
}

/// The gadget matrix: two rows `(a_i, x_i, *, *)`, `(a_i, !x_i, *, *)` per
/// variable, three rows `(b_j, c_j, L, ¬L', ¬L'', C_j)` per clause (one per
/// choice of the true literal `L`), and a last row `(C_1, …, C_m, x)`.
/// Asterisks are fresh elements. Exactly reachable sets containing `x`
/// correspond one-to-one to exactly-one-in-three assignments.
///
/// A literal repeated inside a clause row is kept at its first occurrence.
pub fn reduce_1in3sat(phi: &CnfFormula) -> ConstructionOutput {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for v in 1..=phi.num_vars() {
        for lit in [false, true] {
            let l = Literal { var: v, negated: lit };
            rows.push(vec![format!("a{v}"), l.element(), String::new(), String::new()]);
        }
    }
    for (j, clause) in phi.clauses().iter().enumerate() {
        let j = j + 1;
        for t in 0..3 {
            let mut row = vec![format!("b{j}"), format!("c{j}"), clause[t].element()];
            for (s, lit) in clause.iter().enumerate() {
                if s != t {
                    row.push(lit.complement().element());
                }
            }
            row.push(format!("C{j}"));
            let mut seen = std::collections::HashSet::new();
            row.retain(|e| seen.insert(e.clone()));
            rows.push(row);
        }
    }
    let mut last: Vec<String> = (1..=phi.clauses().len()).map(|j| format!("C{j}")).collect();
    last.push("x".to_string());
    rows.push(last);

    let mut fresh = FreshNames::new(std::iter::empty());
    for row in &rows {
        for e in row.iter().filter(|e| !e.is_empty()) {
            fresh.reserve(e);
        }
    }
    for row in rows.iter_mut() {
        for e in row.iter_mut().filter(|e| e.is_empty()) {
            *e = fresh.next_id().as_str().to_string();
        }
    }
    let matrix = PreferenceMatrix::from_rows(rows).expect("gadget rows are valid");
    ConstructionOutput {
        matrix,
        witnesses: None,
        marked_element: Some(ElementId::new("x").expect("valid token")),
        claimed_value: count_one_in_three_assignments(phi),
    }
}
