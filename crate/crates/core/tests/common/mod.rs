//! Brute-force oracles and random instances shared by the integration tests.
//! Nothing here calls the library's algorithms; matrices are read back as
//! plain string rows.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use pomlab_core::{ElementId, PreferenceMatrix};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rows = Vec<Vec<String>>;
pub type Image = BTreeSet<String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rows_of(m: &PreferenceMatrix) -> Rows {
    (0..m.m())
        .map(|r| m.row(r).map(|e| e.as_str().to_string()).collect())
        .collect()
}

pub fn matrix(rows: &Rows) -> PreferenceMatrix {
    PreferenceMatrix::from_rows(rows.clone()).unwrap()
}

pub fn ids(set: &Image) -> BTreeSet<ElementId> {
    set.iter().map(|e| ElementId::new(e.as_str()).unwrap()).collect()
}

pub fn strs(set: &BTreeSet<ElementId>) -> Image {
    set.iter().map(|e| e.as_str().to_string()).collect()
}

pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for r in 0..used.len() {
            if !used[r] {
                used[r] = true;
                prefix.push(r);
                go(prefix, used, out);
                prefix.pop();
                used[r] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

/// Serial dictatorship on string rows: columns picked per row.
pub fn greedy_cols(rows: &Rows, order: &[usize]) -> Vec<Option<usize>> {
    let mut taken: HashSet<&str> = HashSet::new();
    let mut cols = vec![None; rows.len()];
    for &r in order {
        if let Some(c) = rows[r].iter().position(|e| !taken.contains(e.as_str())) {
            taken.insert(&rows[r][c]);
            cols[r] = Some(c);
        }
    }
    cols
}

pub fn image_of(rows: &Rows, cols: &[Option<usize>]) -> Image {
    cols.iter()
        .enumerate()
        .filter_map(|(r, c)| c.map(|c| rows[r][c].clone()))
        .collect()
}

/// Distinct greedy matchings over every permutation.
pub fn all_poms(rows: &Rows) -> BTreeSet<Vec<Option<usize>>> {
    permutations(rows.len())
        .iter()
        .map(|p| greedy_cols(rows, p))
        .collect()
}

/// The exactly reachable family.
pub fn pom_images(rows: &Rows) -> BTreeSet<Image> {
    all_poms(rows).iter().map(|c| image_of(rows, c)).collect()
}

pub fn reachable_union(family: &BTreeSet<Image>) -> Image {
    family.iter().flatten().cloned().collect()
}

/// Per row, the columns some POM selects.
pub fn reachable_cols(rows: &Rows) -> Vec<BTreeSet<usize>> {
    let mut out = vec![BTreeSet::new(); rows.len()];
    for cols in all_poms(rows) {
        for (r, c) in cols.iter().enumerate() {
            if let Some(c) = c {
                out[r].insert(*c);
            }
        }
    }
    out
}

/// Number of sets contained in some member of `family`.
pub fn downward_closure_count(family: &BTreeSet<Image>) -> usize {
    let mut seen: HashSet<Image> = HashSet::new();
    for s in family {
        let items: Vec<&String> = s.iter().collect();
        for mask in 0u32..1 << items.len() {
            let sub: Image = (0..items.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| items[i].clone())
                .collect();
            seen.insert(sub);
        }
    }
    seen.len()
}

/// No nonempty set of rows can each move to a strictly better element using
/// free elements and the elements the set already holds.
pub fn is_pom_by_coalitions(rows: &Rows, cols: &[Option<usize>]) -> bool {
    let m = rows.len();
    let held: Vec<Option<&str>> = cols
        .iter()
        .enumerate()
        .map(|(r, c)| c.map(|c| rows[r][c].as_str()))
        .collect();
    let all_held: HashSet<&str> = held.iter().flatten().copied().collect();
    for mask in 1u32..1 << m {
        let members: Vec<usize> = (0..m).filter(|r| mask >> r & 1 == 1).collect();
        let options: Vec<Vec<&str>> = members
            .iter()
            .map(|&r| {
                let limit = cols[r].unwrap_or(rows[r].len());
                rows[r][..limit]
                    .iter()
                    .map(|e| e.as_str())
                    .filter(|e| !all_held.contains(e) || members.iter().any(|&s| held[s] == Some(*e)))
                    .collect()
            })
            .collect();
        if distinct_choice(&options, 0, &mut Vec::new()) {
            return false;
        }
    }
    true
}

fn distinct_choice<'a>(options: &[Vec<&'a str>], i: usize, used: &mut Vec<&'a str>) -> bool {
    if i == options.len() {
        return true;
    }
    for &e in &options[i] {
        if !used.contains(&e) {
            used.push(e);
            if distinct_choice(options, i + 1, used) {
                return true;
            }
            used.pop();
        }
    }
    false
}

/// Rows over a universe `1..=n`; complete rows have length `m`, ragged ones a
/// random length in `1..=m`.
pub fn random_rows(rng: &mut impl Rng, m: usize, ragged: bool) -> Rows {
    let n = rng.gen_range(m..=m + 3).max(1);
    let mut universe: Vec<String> = (1..=n).map(|e| e.to_string()).collect();
    (0..m)
        .map(|_| {
            let len = if ragged { rng.gen_range(1..=m) } else { m };
            universe.partial_shuffle(rng, len).0.to_vec()
        })
        .collect()
}

pub fn random_matrix(rng: &mut impl Rng, max_m: usize) -> Rows {
    let m = rng.gen_range(1..=max_m);
    let ragged = rng.gen_bool(0.3);
    random_rows(rng, m, ragged)
}

/// Rows of length one or two over a small universe, so components collide.
pub fn random_two_column(rng: &mut impl Rng, max_m: usize) -> Rows {
    let m = rng.gen_range(1..=max_m);
    let n = rng.gen_range(2..=m + 2);
    let universe: Vec<String> = (1..=n).map(|e| e.to_string()).collect();
    (0..m)
        .map(|_| {
            let len = if rng.gen_bool(0.2) { 1 } else { 2 };
            let mut row: Vec<String> = universe.choose_multiple(rng, len).cloned().collect();
            row.shuffle(rng);
            row
        })
        .collect()
}

pub fn seeds(count: u64, salt: u64) -> impl Iterator<Item = u64> {
    (0..count).map(move |i| i.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
}
