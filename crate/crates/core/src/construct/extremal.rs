use std::collections::BTreeSet;

use crate::count::binomial;
use crate::error::{Error, Result};
use crate::greedy::greedy_match;
use crate::model::{ElementId, FreshNames, Permutation, PreferenceMatrix};

use super::ConstructionOutput;

pub const MAX_MK_LEVEL: usize = 6;
pub const MAX_NK_LEVEL: usize = 4;

struct Counter(usize);

impl Counter {
    fn next(&mut self) -> usize {
        self.0 += 1;
        self.0
    }
}

fn to_matrix(rows: &[Vec<usize>]) -> PreferenceMatrix {
    PreferenceMatrix::from_rows(rows.iter().map(|r| r.iter().map(|e| e.to_string())))
        .expect("construction rows are valid")
}

fn mk_rows(k: usize, counter: &mut Counter) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![counter.next()]];
    }
    let half = 1usize << (k - 1);
    let shared: Vec<usize> = (0..half).map(|_| counter.next()).collect();
    let first = mk_rows(k - 1, counter);
    let second = mk_rows(k - 1, counter);
    let mut rows = Vec::with_capacity(2 * half);
    for copy in [first, second] {
        for (t, row) in copy.into_iter().enumerate() {
            let mut r = vec![shared[t]];
            r.extend(row);
            rows.push(r);
        }
    }
    rows
}

/// The recursive `2^k`-row matrix with `(k+2)·2^{k−1}` reachable elements:
/// two disjoint relabelings of the previous level stacked, each prefixed by a
/// shared column `1..2^{k−1}`. Rows are padded to length `m` with row-local
/// fresh elements.
pub fn construct_mk(k: usize) -> Result<ConstructionOutput> {
    if k > MAX_MK_LEVEL {
        return Err(Error::LevelTooLarge {
            level: k,
            max: MAX_MK_LEVEL,
        });
    }
    let rows = mk_rows(k, &mut Counter(0));
    let base = to_matrix(&rows);
    let m = base.m();
    let mut fresh = FreshNames::avoiding(&base);
    let filled: Vec<Vec<ElementId>> = base
        .name_rows()
        .into_iter()
        .map(|mut row| {
            while row.len() < m {
                row.push(fresh.next_id());
            }
            row
        })
        .collect();
    Ok(ConstructionOutput {
        matrix: PreferenceMatrix::from_element_rows(filled)?,
        witnesses: None,
        marked_element: None,
        claimed_value: ((k + 2) << k) / 2,
    })
}

/// Rows and witness orders of one level.
type Level = (Vec<Vec<usize>>, Vec<Vec<usize>>);

fn nk_rows(k: usize, counter: &mut Counter) -> Level {
    if k == 1 {
        return (vec![vec![counter.next()]], vec![vec![0]]);
    }
    // Build level k from k copies of level k-1.
    let prev = k - 1;
    let block: usize = (1..=prev).product();
    let shared: Vec<usize> = (0..block).map(|_| counter.next()).collect();
    let copies: Vec<Level> =
        (0..k).map(|_| nk_rows(prev, counter)).collect();
    let mut rows = Vec::with_capacity(k * block);
    for (sub_rows, _) in &copies {
        for (t, row) in sub_rows.iter().enumerate() {
            let mut r = vec![shared[t]];
            r.extend(row.iter().copied());
            rows.push(r);
        }
    }
    let shifted = |copy: usize, perm: &[usize]| -> Vec<usize> {
        perm.iter().map(|&r| copy * block + r).collect()
    };
    // Permutation i (1-based) takes copy i in natural order, then copies
    // before i with their (i-1)th permutation, then copies after i with their
    // i-th permutation.
    let mut perms = Vec::with_capacity(k);
    for i in 1..=k {
        let mut order: Vec<usize> = ((i - 1) * block..i * block).collect();
        for j in 1..i {
            order.extend(shifted(j - 1, &copies[j - 1].1[i - 2]));
        }
        for j in i + 1..=k {
            order.extend(shifted(j - 1, &copies[j - 1].1[i - 1]));
        }
        perms.push(order);
    }
    (rows, perms)
}

/// The `k!`-row, `k`-column matrix with `k` permutations whose greedy
/// matchings together cover `Σ_{i=1..k} k!/i` elements.
pub fn construct_nk(k: usize) -> Result<ConstructionOutput> {
    if !(1..=MAX_NK_LEVEL).contains(&k) {
        return Err(Error::LevelTooLarge {
            level: k,
            max: MAX_NK_LEVEL,
        });
    }
    let (rows, perms) = nk_rows(k, &mut Counter(0));
    let matrix = to_matrix(&rows);
    let m = matrix.m();
    let witnesses = perms
        .into_iter()
        .map(|p| Permutation::new(p, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConstructionOutput {
        matrix,
        witnesses: Some(witnesses),
        marked_element: None,
        claimed_value: (1..=k).map(|i| m / i).sum(),
    })
}

/// Elements covered by the greedy matchings of `perms`.
pub fn coverage(matrix: &PreferenceMatrix, perms: &[Permutation]) -> Result<BTreeSet<ElementId>> {
    let mut covered = BTreeSet::new();
    for pi in perms {
        covered.extend(greedy_match(matrix, pi)?.image(matrix));
    }
    Ok(covered)
}

/// First `⌊m/2⌋` columns constant (`i`-th column all `i`), then a column of
/// `m` distinct new elements. Its exactly reachable family has
/// `binom(m, ⌈m/2⌉)` members.
pub fn construct_half_constant(m: usize) -> Result<ConstructionOutput> {
    if m == 0 {
        return Err(Error::EmptyMatrix);
    }
    let h = m / 2;
    let rows: Vec<Vec<usize>> = (0..m)
        .map(|r| {
            let mut row: Vec<usize> = (1..=h).collect();
            row.push(h + 1 + r);
            row
        })
        .collect();
    let claimed = binomial(m, m.div_ceil(2));
    Ok(ConstructionOutput {
        matrix: to_matrix(&rows),
        witnesses: None,
        marked_element: None,
        claimed_value: claimed.try_into().unwrap_or(usize::MAX),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_matrix;

    #[test]
    fn mk_base_levels() {
        let m0 = construct_mk(0).unwrap();
        assert_eq!(m0.matrix, parse_matrix("1").unwrap());
        assert_eq!(m0.claimed_value, 1);
        let m1 = construct_mk(1).unwrap();
        assert_eq!(m1.matrix, parse_matrix("1 2\n1 3").unwrap());
        assert_eq!(m1.claimed_value, 3);
        let m2 = construct_mk(2).unwrap();
        assert_eq!(m2.matrix.m(), 4);
        assert!(m2.matrix.is_complete());
        assert_eq!(m2.claimed_value, 8);
        assert!(matches!(construct_mk(7), Err(Error::LevelTooLarge { .. })));
    }

    #[test]
    fn nk_base_levels() {
        let n1 = construct_nk(1).unwrap();
        assert_eq!(n1.matrix, parse_matrix("1").unwrap());
        assert_eq!(n1.claimed_value, 1);
        let n2 = construct_nk(2).unwrap();
        assert_eq!(n2.matrix, parse_matrix("1 2\n1 3").unwrap());
        assert_eq!(n2.claimed_value, 3);
        let n3 = construct_nk(3).unwrap();
        assert_eq!(n3.matrix.m(), 6);
        assert_eq!(n3.matrix.width(), 3);
        assert_eq!(n3.claimed_value, 11);
        let w = n3.witnesses.as_ref().unwrap();
        assert_eq!(coverage(&n3.matrix, w).unwrap().len(), 11);
        assert!(construct_nk(0).is_err());
        assert!(construct_nk(5).is_err());
    }

    #[test]
    fn nk_column_multiplicities() {
        for k in 1..=4 {
            let out = construct_nk(k).unwrap();
            let mx = &out.matrix;
            for j in 0..k {
                let mut counts = std::collections::HashMap::new();
                for r in 0..mx.m() {
                    *counts.entry(mx.row(r).nth(j).unwrap().clone()).or_insert(0) += 1;
                }
                assert!(counts.values().all(|&c| c == k - j), "k={k} column {j}");
            }
        }
    }

    #[test]
    fn half_constant_shape() {
        let out = construct_half_constant(4).unwrap();
        assert_eq!(out.matrix, parse_matrix("1 2 3\n1 2 4\n1 2 5\n1 2 6").unwrap());
        assert_eq!(out.claimed_value, 6);
    }
}
