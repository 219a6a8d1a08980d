//! Directed multigraphs with ordered out-edge lists.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("edge {edge} refers to unknown vertex index {vertex}")]
    UnknownVertex { edge: usize, vertex: usize },
    #[error("graph has no vertices")]
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: usize,
    pub from: usize,
    pub to: usize,
}

/// Sequence of edge ids. The empty path is the trivial path at a vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub edges: Vec<usize>,
}

impl Path {
    pub fn new(edges: Vec<usize>) -> Self {
        Path { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Consecutive edges chain head to tail.
    pub fn is_chained(&self, g: &Digraph) -> bool {
        self.edges.windows(2).all(|w| g.edge(w[0]).to == g.edge(w[1]).from)
    }

    pub fn is_circuit(&self, g: &Digraph) -> bool {
        !self.is_empty() && self.is_chained(g) && g.edge(self.edges[0]).from == g.edge(*self.edges.last().unwrap()).to
    }

    pub fn initial(&self, g: &Digraph) -> Option<usize> {
        self.edges.first().map(|&e| g.edge(e).from)
    }

    pub fn terminal(&self, g: &Digraph) -> Option<usize> {
        self.edges.last().map(|&e| g.edge(e).to)
    }

    /// Initial vertices of every edge followed by the terminal vertex.
    pub fn vertices(&self, g: &Digraph) -> Vec<usize> {
        let mut vs: Vec<usize> = self.edges.iter().map(|&e| g.edge(e).from).collect();
        if let Some(t) = self.terminal(g) {
            vs.push(t);
        }
        vs
    }

    pub fn extended(&self, e: usize) -> Path {
        let mut edges = self.edges.clone();
        edges.push(e);
        Path { edges }
    }

    pub fn label(&self, g: &Digraph) -> String {
        let parts: Vec<String> = self.edges.iter().map(|&e| g.edge_label(e)).collect();
        parts.join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeViolation {
    pub vertex: String,
    pub degree: usize,
}

impl fmt::Display for DegreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vertex {} has out-degree {} (need d_u >= 2)", self.vertex, self.degree)
    }
}

/// Vertices are addressed by index; names are kept for labels and reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    names: Vec<String>,
    edges: Vec<Edge>,
    out_lists: Vec<Vec<usize>>,
}

impl Digraph {
    /// Edges are given as `(from, to)` vertex indices; their order fixes the
    /// out-list order at every vertex.
    pub fn new(names: Vec<String>, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if names.is_empty() {
            return Err(GraphError::Empty);
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(GraphError::DuplicateVertex(n.clone()));
            }
        }
        let mut out_lists = vec![Vec::new(); names.len()];
        let mut es = Vec::with_capacity(edges.len());
        for (id, &(from, to)) in edges.iter().enumerate() {
            for v in [from, to] {
                if v >= names.len() {
                    return Err(GraphError::UnknownVertex { edge: id, vertex: v });
                }
            }
            out_lists[from].push(id);
            es.push(Edge { id, from, to });
        }
        Ok(Digraph { names, edges: es, out_lists })
    }

    /// Convenience constructor with vertices named `1..=n`.
    pub fn numbered(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let names = (1..=n).map(|i| i.to_string()).collect();
        let zero_based: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
        Self::new(names, &zero_based)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_lists[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_lists[v].len()
    }

    /// 1-based position of `e` in its initial vertex's out-list.
    pub fn edge_rank(&self, e: usize) -> usize {
        let from = self.edges[e].from;
        self.out_lists[from].iter().position(|&x| x == e).unwrap() + 1
    }

    /// `e<from>(<rank>)`, e.g. `e2(1)`.
    pub fn edge_label(&self, e: usize) -> String {
        format!("e{}({})", self.names[self.edges[e].from], self.edge_rank(e))
    }

    pub fn validate(&self) -> Vec<DegreeViolation> {
        (0..self.vertex_count())
            .filter(|&v| self.out_degree(v) < 2)
            .map(|v| DegreeViolation { vertex: self.names[v].clone(), degree: self.out_degree(v) })
            .collect()
    }

    /// Vertices reachable from `u` by a path of length ≥ 0.
    pub fn reachable_set(&self, u: usize) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count()];
        seen[u] = true;
        let mut stack = vec![u];
        while let Some(v) = stack.pop() {
            for &e in &self.out_lists[v] {
                let w = self.edges[e].to;
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    pub fn strongly_connected(&self) -> bool {
        if !self.reachable_set(0).iter().all(|&b| b) {
            return false;
        }
        let reversed: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.to, e.from)).collect();
        let rev = Digraph::new(self.names.clone(), &reversed).expect("same vertex set");
        rev.reachable_set(0).iter().all(|&b| b)
    }

    /// Shortest path `u → v`, ties broken by out-list order. `u == v` gives
    /// the empty path.
    pub fn reachable(&self, u: usize, v: usize) -> Option<Path> {
        self.shortest_path(u, v, &vec![true; self.vertex_count()], false)
    }

    /// BFS over vertices allowed by `mask`. With `nonempty`, `u == v` asks for
    /// a shortest circuit through `u`.
    fn shortest_path(&self, u: usize, v: usize, mask: &[bool], nonempty: bool) -> Option<Path> {
        if u == v && !nonempty {
            return Some(Path::default());
        }
        let n = self.vertex_count();
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        if !nonempty {
            seen[u] = true;
        }
        queue.push_back(u);
        let mut first = true;
        while let Some(x) = queue.pop_front() {
            if x == v && !first {
                break;
            }
            first = false;
            for &e in &self.out_lists[x] {
                let w = self.edges[e].to;
                if !mask[w] || seen[w] {
                    continue;
                }
                seen[w] = true;
                via[w] = Some(e);
                if w == v {
                    queue.clear();
                    break;
                }
                queue.push_back(w);
            }
        }
        let mut edges = Vec::new();
        let mut cur = v;
        loop {
            let e = via[cur]?;
            edges.push(e);
            cur = self.edges[e].from;
            if cur == u {
                break;
            }
        }
        edges.reverse();
        Some(Path { edges })
    }

    /// A circuit that never visits `u`: shortest first, then by lowest start
    /// vertex, then out-list order.
    pub fn circuit_avoiding(&self, u: usize) -> Option<Path> {
        self.circuit_avoiding_in(u, &vec![true; self.vertex_count()])
    }

    fn circuit_avoiding_in(&self, u: usize, allowed: &[bool]) -> Option<Path> {
        let mut mask = allowed.to_vec();
        mask[u] = false;
        let mut best: Option<Path> = None;
        for w in (0..self.vertex_count()).filter(|&w| mask[w]) {
            if let Some(c) = self.shortest_path(w, w, &mask, true) {
                if best.as_ref().is_none_or(|b| c.len() < b.len()) {
                    best = Some(c);
                }
            }
        }
        best
    }

    /// Every circuit reachable from `u` passes through `u`.
    pub fn all_circuits_through(&self, u: usize) -> bool {
        self.circuit_avoiding_in(u, &self.reachable_set(u)).is_none()
    }

    /// Circuits `u → u` whose intermediate vertices are distinct and differ
    /// from `u`, in depth-first out-list order.
    pub fn return_circuits(&self, u: usize) -> Vec<Path> {
        let mut out = Vec::new();
        let mut on_path = vec![false; self.vertex_count()];
        on_path[u] = true;
        self.return_dfs(u, u, &mut Path::default(), &mut on_path, &mut out);
        out
    }

    fn return_dfs(&self, u: usize, x: usize, path: &mut Path, on_path: &mut [bool], out: &mut Vec<Path>) {
        for &e in &self.out_lists[x] {
            let w = self.edges[e].to;
            path.edges.push(e);
            if w == u {
                out.push(path.clone());
            } else if !on_path[w] {
                on_path[w] = true;
                self.return_dfs(u, w, path, on_path, out);
                on_path[w] = false;
            }
            path.edges.pop();
        }
    }

    /// All paths of length exactly `m` leaving `u`, lexicographic in out-list order.
    pub fn paths_of_length(&self, u: usize, m: usize) -> Vec<Path> {
        let mut level = vec![Path::default()];
        for _ in 0..m {
            level = self.extend_level(u, &level);
        }
        level
    }

    fn extend_level(&self, u: usize, level: &[Path]) -> Vec<Path> {
        let mut next = Vec::new();
        for p in level {
            let end = p.terminal(self).unwrap_or(u);
            for &e in &self.out_lists[end] {
                next.push(p.extended(e));
            }
        }
        next
    }

    /// Paths of length `1..=max_len` leaving `u`, ordered by length and then
    /// lexicographically by out-list position. Levels are built lazily.
    pub fn paths_from(&self, u: usize, max_len: usize) -> impl Iterator<Item = Path> + '_ {
        std::iter::successors(Some(vec![Path::default()]), move |level| {
            Some(self.extend_level(u, level))
        })
        .skip(1)
        .take(max_len)
        .flatten()
    }

    /// Number of paths of length `m` leaving each vertex, saturating.
    pub fn path_counts(&self, m: usize) -> Vec<u128> {
        let mut counts = vec![1u128; self.vertex_count()];
        for _ in 0..m {
            counts = (0..self.vertex_count())
                .map(|v| {
                    self.out_lists[v]
                        .iter()
                        .fold(0u128, |acc, &e| acc.saturating_add(counts[self.edges[e].to]))
                })
                .collect();
        }
        counts
    }

    /// Every elementary circuit once, written from its lowest vertex, sorted
    /// by length and then discovery order.
    pub fn simple_circuits(&self) -> Vec<Path> {
        let n = self.vertex_count();
        let mut out = Vec::new();
        for s in 0..n {
            let mut on_path = vec![false; n];
            on_path[s] = true;
            self.simple_dfs(s, s, &mut Path::default(), &mut on_path, &mut out);
        }
        out.sort_by_key(|p| p.len());
        out
    }

    fn simple_dfs(&self, s: usize, x: usize, path: &mut Path, on_path: &mut [bool], out: &mut Vec<Path>) {
        for &e in &self.out_lists[x] {
            let w = self.edges[e].to;
            if w < s {
                continue;
            }
            path.edges.push(e);
            if w == s {
                out.push(path.clone());
            } else if !on_path[w] {
                on_path[w] = true;
                self.simple_dfs(s, w, path, on_path, out);
                on_path[w] = false;
            }
            path.edges.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // edge order: e1(1), e1(2), e2(1), e2(2)
    fn two_vertex() -> Digraph {
        Digraph::numbered(2, &[(1, 1), (1, 2), (2, 1), (2, 2)]).unwrap()
    }

    fn three_vertex() -> Digraph {
        Digraph::numbered(3, &[(1, 1), (1, 2), (2, 1), (2, 2), (3, 3), (3, 1), (3, 3)]).unwrap()
    }

    fn funnel() -> Digraph {
        Digraph::numbered(3, &[(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 3), (3, 3)]).unwrap()
    }

    fn cantor() -> Digraph {
        Digraph::numbered(1, &[(1, 1), (1, 1)]).unwrap()
    }

    #[test]
    fn degree_validation() {
        assert!(cantor().validate().is_empty());
        assert!(two_vertex().validate().is_empty());
        let one = Digraph::numbered(1, &[(1, 1)]).unwrap();
        assert_eq!(one.validate(), vec![DegreeViolation { vertex: "1".into(), degree: 1 }]);
    }

    #[test]
    fn bad_construction() {
        assert_eq!(Digraph::new(vec![], &[]), Err(GraphError::Empty));
        let dup = Digraph::new(vec!["a".into(), "a".into()], &[]);
        assert_eq!(dup, Err(GraphError::DuplicateVertex("a".into())));
        let bad = Digraph::new(vec!["a".into()], &[(0, 3)]);
        assert_eq!(bad, Err(GraphError::UnknownVertex { edge: 0, vertex: 3 }));
    }

    #[test]
    fn connectivity() {
        assert!(two_vertex().strongly_connected());
        assert!(!three_vertex().strongly_connected());
        assert!(Digraph::numbered(1, &[(1, 1)]).unwrap().strongly_connected());
    }

    #[test]
    fn reachability() {
        let g = three_vertex();
        let p = g.reachable(2, 0).unwrap();
        assert_eq!(p.label(&g), "e3(2)");
        assert!(funnel().reachable(2, 0).is_none());
        let trivial = g.reachable(1, 1).unwrap();
        assert!(trivial.is_empty());
    }

    #[test]
    fn circuits_avoiding() {
        let g = two_vertex();
        assert_eq!(g.circuit_avoiding(0).unwrap().label(&g), "e2(2)");
        let h = funnel();
        assert_eq!(h.circuit_avoiding(2).unwrap().label(&h), "e1(1)");
        let cyc = Digraph::numbered(2, &[(1, 2), (1, 2), (2, 1), (2, 1)]).unwrap();
        assert!(cyc.circuit_avoiding(0).is_none());
    }

    #[test]
    fn return_circuit_enumeration() {
        let h = funnel();
        let labels: Vec<String> = h.return_circuits(2).iter().map(|p| p.label(&h)).collect();
        assert_eq!(labels, vec!["e3(1)", "e3(2)"]);
        let g = two_vertex();
        let labels: Vec<String> = g.return_circuits(0).iter().map(|p| p.label(&g)).collect();
        assert_eq!(labels, vec!["e1(1)", "e1(2) e2(1)"]);
        let dag = Digraph::numbered(2, &[(1, 2), (1, 2), (2, 2), (2, 2)]).unwrap();
        assert!(dag.return_circuits(0).is_empty());
    }

    #[test]
    fn path_enumeration() {
        assert_eq!(cantor().paths_from(0, 2).count(), 6);
        let g = two_vertex();
        let labels: Vec<String> = g.paths_from(0, 1).map(|p| p.label(&g)).collect();
        assert_eq!(labels, vec!["e1(1)", "e1(2)"]);
        assert_eq!(three_vertex().paths_from(2, 1).count(), 3);
        assert_eq!(three_vertex().path_counts(1)[2], 3);
        assert_eq!(cantor().path_counts(10)[0], 1024);
    }

    #[test]
    fn circuits_through() {
        assert!(funnel().all_circuits_through(2));
        assert!(!two_vertex().all_circuits_through(0));
        assert!(cantor().all_circuits_through(0));
    }

    #[test]
    fn elementary_circuits() {
        let g = three_vertex();
        let labels: Vec<String> = g.simple_circuits().iter().map(|p| p.label(&g)).collect();
        assert_eq!(labels, vec!["e1(1)", "e2(2)", "e3(1)", "e3(3)", "e1(2) e2(1)"]);
    }
}
