//! Graph families the walks run on: open chains, rooted binary trees, and
//! glued binary trees.
//!
//! Nodes are indexed contiguously from 0. For trees the index maps to the
//! heap label `index + 1`, so the root is node 0 and node `k` has children
//! `2k+1` and `2k+2` (heap labels `2i` and `2i+1`). A glued tree stores the
//! full depth-`d` half first, then the mirror half of depth `d-1` whose own
//! root is the bottom node.

use crate::error::{QwError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Chain,
    BinaryTree,
    GluedBinaryTree,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Chain => "chain",
            GraphKind::BinaryTree => "binary-tree",
            GraphKind::GluedBinaryTree => "glued-binary-tree",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Graph {
    kind: GraphKind,
    /// Size parameter the graph was built from: N, g, or d.
    size: usize,
    node_count: usize,
    /// Unordered edges stored as (low, high), sorted, no duplicates.
    edges: Vec<(usize, usize)>,
    /// Layer label per node. Chains: site index. Binary trees: depth from
    /// the root, root in layer 1. Glued trees: head in layer 0, bottom in
    /// layer 2d-2.
    layer_of: Vec<usize>,
}

impl Graph {
    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn layer_of(&self, node: usize) -> usize {
        self.layer_of[node]
    }

    pub fn layers(&self) -> &[usize] {
        &self.layer_of
    }

    pub fn layer_count(&self) -> usize {
        self.layer_of.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Smallest layer label in use (0 for chains and glued trees, 1 for
    /// binary trees).
    pub fn min_layer(&self) -> usize {
        self.layer_of.iter().copied().min().unwrap_or(0)
    }

    pub fn max_layer(&self) -> usize {
        self.layer_of.iter().copied().max().unwrap_or(0)
    }

    /// Spatial coordinate used for wave-packet moments: the site index on a
    /// chain, the heap label on a binary tree, the node index on a glued
    /// tree.
    pub fn coordinate_of(&self, node: usize) -> f64 {
        match self.kind {
            GraphKind::Chain | GraphKind::GluedBinaryTree => node as f64,
            GraphKind::BinaryTree => (node + 1) as f64,
        }
    }

    /// Default starting node for a localized walk: the chain center, the
    /// tree root, or the glued tree's head node.
    pub fn default_initial_node(&self) -> usize {
        match self.kind {
            GraphKind::Chain => self.node_count / 2,
            GraphKind::BinaryTree | GraphKind::GluedBinaryTree => 0,
        }
    }

    /// Single node in the last layer of a glued tree.
    pub fn bottom_node(&self) -> Option<usize> {
        match self.kind {
            GraphKind::GluedBinaryTree => Some((1 << self.size) - 1),
            _ => None,
        }
    }

    fn finish(self) -> Self {
        debug_assert!(self.edges.iter().all(|&(a, b)| a < b && b < self.node_count));
        debug_assert!(self.edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(self.is_connected());
        self
    }

    fn is_connected(&self) -> bool {
        if self.node_count == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); self.node_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.node_count];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    reached += 1;
                    queue.push_back(u);
                }
            }
        }
        reached == self.node_count
    }

    /// Plain text form: one header line `kind size node_count`, then one
    /// edge per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.kind.as_str(), self.size, self.node_count);
        for &(a, b) in &self.edges {
            out.push_str(&format!("{} {}\n", a, b));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Graph> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| QwError::Parse("empty graph text".into()))?;
        let mut parts = header.split_whitespace();
        let kind = parts
            .next()
            .ok_or_else(|| QwError::Parse("missing graph kind".into()))?;
        let size: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| QwError::Parse("bad size in graph header".into()))?;
        let graph = match kind {
            "chain" => build_chain(size)?,
            "binary-tree" => build_binary_tree(size)?,
            "glued-binary-tree" => build_glued_tree(size)?,
            other => return Err(QwError::Parse(format!("unknown graph kind '{other}'"))),
        };
        // Edge lines are included for inspection; verify they match the
        // canonical construction rather than trusting them.
        let listed: Vec<(usize, usize)> = lines
            .map(|l| {
                let mut it = l.split_whitespace();
                let a = it.next().and_then(|s| s.parse().ok());
                let b = it.next().and_then(|s| s.parse().ok());
                match (a, b) {
                    (Some(a), Some(b)) => Ok((a, b)),
                    _ => Err(QwError::Parse(format!("bad edge line '{l}'"))),
                }
            })
            .collect::<Result<_>>()?;
        if listed != graph.edges {
            return Err(QwError::Parse("edge list does not match declared kind/size".into()));
        }
        Ok(graph)
    }
}

/// Open chain of N sites, no wrap-around edge.
pub fn build_chain(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(QwError::InvalidSize(format!("chain needs N >= 2, got {n}")));
    }
    let edges = (0..n - 1).map(|i| (i, i + 1)).collect();
    Ok(Graph {
        kind: GraphKind::Chain,
        size: n,
        node_count: n,
        edges,
        layer_of: (0..n).collect(),
    }
    .finish())
}

/// Rooted binary tree of depth g: 2^g - 1 nodes, heap label i has children
/// 2i and 2i+1. The root sits in layer 1.
pub fn build_binary_tree(g: usize) -> Result<Graph> {
    if g < 1 {
        return Err(QwError::InvalidSize(format!("binary tree needs g >= 1, got {g}")));
    }
    if g > 20 {
        return Err(QwError::InvalidSize(format!("binary tree depth {g} too large")));
    }
    let n = (1usize << g) - 1;
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for label in 1..=n {
        for child in [2 * label, 2 * label + 1] {
            if child <= n {
                edges.push((label - 1, child - 1));
            }
        }
    }
    edges.sort_unstable();
    let layer_of = (1..=n).map(|label| label.ilog2() as usize + 1).collect();
    Ok(Graph {
        kind: GraphKind::BinaryTree,
        size: g,
        node_count: n,
        edges,
        layer_of,
    }
    .finish())
}

/// Two binary trees joined leaf-to-leaf into one graph with 2d-1 layers and
/// palindromic layer sizes (d=4: 1,2,4,8,4,2,1). The halves share the middle
/// layer: the full depth-d half contributes layers 0..d-1 and the mirror
/// half of depth d-1 contributes layers d..2d-2, each mirror node linking to
/// two nodes of the shared layer. Head node = 0, bottom node = 2^d - 1.
pub fn build_glued_tree(d: usize) -> Result<Graph> {
    if d < 2 {
        return Err(QwError::InvalidSize(format!("glued tree needs d >= 2, got {d}")));
    }
    if d > 20 {
        return Err(QwError::InvalidSize(format!("glued tree depth {d} too large")));
    }
    let nl = (1usize << d) - 1; // left half, depth d
    let nr = (1usize << (d - 1)) - 1; // right half, depth d-1
    let n = nl + nr;
    let mut edges = Vec::new();
    for label in 1..=nl {
        for child in [2 * label, 2 * label + 1] {
            if child <= nl {
                edges.push((label - 1, child - 1));
            }
        }
    }
    for label in 1..=nr {
        for child in [2 * label, 2 * label + 1] {
            if child <= nr {
                edges.push((nl + label - 1, nl + child - 1));
            }
        }
    }
    // Glue: right-half leaf r (own heap label 2^(d-2)+r) takes the left
    // leaves 2^(d-1)+2r and 2^(d-1)+2r+1 as its children in the shared layer.
    for r in 0..(1usize << (d - 2)) {
        let right = nl + (1 << (d - 2)) + r - 1;
        let left_base = (1 << (d - 1)) + 2 * r;
        edges.push((left_base - 1, right));
        edges.push((left_base, right));
    }
    edges.sort_unstable();
    let mut layer_of = Vec::with_capacity(n);
    for label in 1..=nl {
        layer_of.push(label.ilog2() as usize);
    }
    for label in 1..=nr {
        layer_of.push(2 * d - 2 - label.ilog2() as usize);
    }
    Ok(Graph {
        kind: GraphKind::GluedBinaryTree,
        size: d,
        node_count: n,
        edges,
        layer_of,
    }
    .finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_structure() {
        let g = build_chain(3).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.layers(), &[0, 1, 2]);

        assert_eq!(build_chain(41).unwrap().edges().len(), 40);
        assert_eq!(build_chain(19).unwrap().edges().len(), 18);
        assert!(build_chain(1).is_err());
    }

    #[test]
    fn binary_tree_structure() {
        let g = build_binary_tree(2).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2)]);
        assert_eq!(g.layers(), &[1, 2, 2]);

        let g5 = build_binary_tree(5).unwrap();
        assert_eq!(g5.node_count(), 31);
        assert_eq!(g5.edges().len(), 30);
        assert_eq!(g5.layer_of(0), 1);
        assert_eq!(g5.max_layer(), 5);

        let g1 = build_binary_tree(1).unwrap();
        assert_eq!(g1.node_count(), 1);
        assert!(g1.edges().is_empty());
        assert!(build_binary_tree(0).is_err());
    }

    #[test]
    fn binary_tree_child_rule() {
        let g = build_binary_tree(4).unwrap();
        for label in 1..=7usize {
            assert!(g.edges().contains(&(label - 1, 2 * label - 1)));
            assert!(g.edges().contains(&(label - 1, 2 * label)));
        }
    }

    #[test]
    fn glued_tree_structure() {
        let g = build_glued_tree(4).unwrap();
        assert_eq!(g.node_count(), 22);
        assert_eq!(g.edges().len(), 28);
        let mut counts = vec![0usize; g.layer_count()];
        for node in 0..g.node_count() {
            counts[g.layer_of(node)] += 1;
        }
        assert_eq!(counts, vec![1, 2, 4, 8, 4, 2, 1]);
        assert_eq!(g.layer_of(0), 0);
        assert_eq!(g.bottom_node(), Some(15));
        assert_eq!(g.layer_of(15), 6);
    }

    #[test]
    fn glued_tree_layer_counts_palindromic() {
        for d in 2..=6 {
            let g = build_glued_tree(d).unwrap();
            let mut counts = vec![0usize; g.layer_count()];
            for node in 0..g.node_count() {
                counts[g.layer_of(node)] += 1;
            }
            assert_eq!(counts.len(), 2 * d - 1);
            let mut rev = counts.clone();
            rev.reverse();
            assert_eq!(counts, rev);
        }
        assert!(build_glued_tree(1).is_err());
    }

    #[test]
    fn degree_bounds() {
        let check = |g: &Graph, cap: usize| {
            let mut deg = vec![0usize; g.node_count()];
            for &(a, b) in g.edges() {
                deg[a] += 1;
                deg[b] += 1;
            }
            assert!(deg.iter().all(|&d| d <= cap));
        };
        check(&build_chain(12).unwrap(), 2);
        check(&build_binary_tree(5).unwrap(), 3);
        check(&build_glued_tree(4).unwrap(), 3);
    }

    #[test]
    fn text_round_trip() {
        for g in [
            build_chain(7).unwrap(),
            build_binary_tree(3).unwrap(),
            build_glued_tree(3).unwrap(),
        ] {
            let text = g.to_text();
            let back = Graph::from_text(&text).unwrap();
            assert_eq!(back.kind(), g.kind());
            assert_eq!(back.edges(), g.edges());
            assert_eq!(back.layers(), g.layers());
        }
        assert!(Graph::from_text("ring 5\n0 1\n").is_err());
    }

    #[test]
    fn coordinates() {
        let chain = build_chain(5).unwrap();
        assert_eq!(chain.coordinate_of(3), 3.0);
        let tree = build_binary_tree(3).unwrap();
        assert_eq!(tree.coordinate_of(0), 1.0);
        assert_eq!(tree.coordinate_of(6), 7.0);
    }
}
