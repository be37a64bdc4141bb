//! Maximum bipartite matching (Hopcroft–Karp) with a Hall deficiency witness.

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

/// Left vertices `0..left` with adjacency into right vertices `0..right`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub left: usize,
    pub right: usize,
    pub adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(right: usize, adj: Vec<Vec<usize>>) -> Self {
        debug_assert!(adj.iter().flatten().all(|&v| v < right));
        BipartiteGraph {
            left: adj.len(),
            right,
            adj,
        }
    }

    /// Union of the neighborhoods of `rows`.
    pub fn neighborhood(&self, rows: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.right];
        for &u in rows {
            for &v in &self.adj[u] {
                seen[v] = true;
            }
        }
        (0..self.right).filter(|&v| seen[v]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMatching {
    pub left_to_right: Vec<Option<usize>>,
    pub right_to_left: Vec<Option<usize>>,
    pub size: usize,
}

impl BipartiteMatching {
    pub fn saturates_left(&self) -> bool {
        self.size == self.left_to_right.len()
    }
}

/// Maximum-cardinality matching.
pub fn max_bipartite_matching(graph: &BipartiteGraph) -> BipartiteMatching {
    let (n, m) = (graph.left, graph.right);
    let mut mate_l = vec![NIL; n];
    let mut mate_r = vec![NIL; m];
    let mut dist = vec![0usize; n];
    loop {
        // Layered BFS from free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..n {
            if mate_l[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &graph.adj[u] {
                let w = mate_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut augmented = false;
        for u in 0..n {
            if mate_l[u] == NIL && augment(graph, u, &mut mate_l, &mut mate_r, &mut dist) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }
    let left_to_right: Vec<Option<usize>> =
        mate_l.iter().map(|&v| (v != NIL).then_some(v)).collect();
    let size = left_to_right.iter().flatten().count();
    BipartiteMatching {
        left_to_right,
        right_to_left: mate_r.iter().map(|&u| (u != NIL).then_some(u)).collect(),
        size,
    }
}

fn augment(
    graph: &BipartiteGraph,
    u: usize,
    mate_l: &mut [usize],
    mate_r: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for i in 0..graph.adj[u].len() {
        let v = graph.adj[u][i];
        let w = mate_r[v];
        if w == NIL || (dist[w] == dist[u] + 1 && augment(graph, w, mate_l, mate_r, dist)) {
            mate_l[u] = v;
            mate_r[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// For a maximum matching that leaves some left vertex free: the left
/// vertices reachable by alternating paths from free left vertices. Their
/// neighborhood is smaller than the set by the number of free vertices.
pub fn hall_violator(graph: &BipartiteGraph, matching: &BipartiteMatching) -> Vec<usize> {
    let mut in_set = vec![false; graph.left];
    let mut queue: VecDeque<usize> = (0..graph.left)
        .filter(|&u| matching.left_to_right[u].is_none())
        .collect();
    for &u in &queue {
        in_set[u] = true;
    }
    let mut seen_r = vec![false; graph.right];
    while let Some(u) = queue.pop_front() {
        for &v in &graph.adj[u] {
            if std::mem::replace(&mut seen_r[v], true) {
                continue;
            }
            if let Some(w) = matching.right_to_left[v] {
                if !in_set[w] {
                    in_set[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    (0..graph.left).filter(|&u| in_set[u]).collect()
}
