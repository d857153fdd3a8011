//! Dissimilarity maps, ultrametrics and node-weighted rooted trees.
//!
//! Pairs are stored in lexicographic order `(0,1), (0,2), …, (n-2,n-1)`;
//! [`pair_position`] is the single source of that layout.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Number of unordered pairs on `n` items.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of the unordered pair `{i, j}` (0-based, `i != j`) in
/// lexicographic order.
pub fn pair_position(n: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(a != b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// All unordered pairs in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Symmetric, zero-diagonal map on `n` items.
///
/// Equality and hashing look at the values only; labels are carried along
/// for display.
#[derive(Clone, Debug)]
pub struct DissimilarityMap {
    n: usize,
    values: Vec<Rational>,
    labels: Option<Vec<String>>,
}

impl PartialEq for DissimilarityMap {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.values == other.values
    }
}

impl Eq for DissimilarityMap {}

impl std::hash::Hash for DissimilarityMap {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.values.hash(state);
    }
}

impl DissimilarityMap {
    /// Builds a map from its upper-triangle values in lexicographic pair
    /// order. No sign restriction is applied, so this also carries
    /// ultrametrics whose entries were pushed to zero or below.
    pub fn from_pairs(n: usize, values: Vec<Rational>) -> Result<Self> {
        if values.len() != pair_count(n) {
            return Err(Error::DimensionMismatch {
                expected: pair_count(n),
                found: values.len(),
            });
        }
        Ok(DissimilarityMap {
            n,
            values,
            labels: None,
        })
    }

    pub fn from_int_pairs(n: usize, values: &[i64]) -> Result<Self> {
        Self::from_pairs(n, values.iter().map(|&v| rational::int(v)).collect())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Upper-triangle values in lexicographic pair order.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        if i == j {
            Rational::zero()
        } else {
            self.values[pair_position(self.n, i, j)].clone()
        }
    }

    pub(crate) fn get_ref(&self, i: usize, j: usize) -> &Rational {
        &self.values[pair_position(self.n, i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Largest off-diagonal entry, `None` when `n < 2`.
    pub fn max_entry(&self) -> Option<&Rational> {
        self.values.iter().max()
    }

    /// First pair (in lexicographic order) with a nonpositive value.
    pub fn first_nonpositive(&self) -> Option<(usize, usize)> {
        pairs(self.n).find(|&(i, j)| !self.get_ref(i, j).is_positive())
    }
}

impl fmt::Display for DissimilarityMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| rational::fmt(&self.get(i, j)))
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for DissimilarityMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(rational::fmt).collect())
            .collect();
        rows.serialize(s)
    }
}

/// Validates a raw square matrix as a dissimilarity map, reporting the
/// first offending cell in row-major order.
pub fn validate_dissimilarity(rows: &[Vec<Rational>]) -> Result<DissimilarityMap> {
    validate_rows(rows, true)
}

/// Like [`validate_dissimilarity`] but allows zero or negative entries, as
/// needed for candidate ultrametrics.
pub fn validate_symmetric(rows: &[Vec<Rational>]) -> Result<DissimilarityMap> {
    validate_rows(rows, false)
}

fn validate_rows(rows: &[Vec<Rational>], positive: bool) -> Result<DissimilarityMap> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotSquare {
                row: r,
                expected: n,
                found: row.len(),
            });
        }
    }
    for i in 0..n {
        for j in 0..n {
            let x = &rows[i][j];
            if i == j {
                if !x.is_zero() {
                    return Err(Error::NonzeroDiagonal(i, rational::fmt(x)));
                }
                continue;
            }
            if x != &rows[j][i] {
                let (a, b) = (i.min(j), i.max(j));
                return Err(Error::Asymmetric {
                    i: a,
                    j: b,
                    a: rational::fmt(&rows[a][b]),
                    b: rational::fmt(&rows[b][a]),
                });
            }
            if positive && !x.is_positive() {
                return Err(Error::NonPositive {
                    i,
                    j,
                    value: rational::fmt(x),
                });
            }
        }
    }
    let values = pairs(n).map(|(i, j)| rows[i][j].clone()).collect();
    DissimilarityMap::from_pairs(n, values)
}

/// A triple `i < j < k` whose maximum is attained only once, if any.
pub fn ultrametric_violation(d: &DissimilarityMap) -> Option<(usize, usize, usize)> {
    let n = d.n();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (d.get_ref(i, j), d.get_ref(i, k), d.get_ref(j, k));
                let m = a.max(b).max(c);
                let hits = [a, b, c].iter().filter(|&&x| x == m).count();
                if hits < 2 {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

pub fn is_ultrametric(d: &DissimilarityMap) -> bool {
    ultrametric_violation(d).is_none()
}

/// A dissimilarity map known to satisfy `δ_ik ≤ max(δ_ij, δ_jk)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Ultrametric(DissimilarityMap);

impl Ultrametric {
    pub fn new(d: DissimilarityMap) -> Result<Self> {
        match ultrametric_violation(&d) {
            Some((i, j, k)) => Err(Error::NotUltrametric(i, j, k)),
            None => Ok(Ultrametric(d)),
        }
    }

    pub fn from_int_pairs(n: usize, values: &[i64]) -> Result<Self> {
        Self::new(DissimilarityMap::from_int_pairs(n, values)?)
    }

    pub fn map(&self) -> &DissimilarityMap {
        &self.0
    }

    pub fn into_map(self) -> DissimilarityMap {
        self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    pub fn values(&self) -> &[Rational] {
        self.0.values()
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.0.get(i, j)
    }
}

impl fmt::Display for Ultrametric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `max_{i<j} |d1_ij − d2_ij|`
pub fn linf_distance(d1: &DissimilarityMap, d2: &DissimilarityMap) -> Result<Rational> {
    if d1.n() != d2.n() {
        return Err(Error::DimensionMismatch {
            expected: d1.n(),
            found: d2.n(),
        });
    }
    Ok(d1
        .values()
        .iter()
        .zip(d2.values())
        .map(|(a, b)| (a - b).abs())
        .max()
        .unwrap_or_else(Rational::zero))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// `None` for leaves.
    pub weight: Option<Rational>,
}

/// Rooted tree whose leaves are the items `0..n` and whose internal nodes
/// carry weights.
///
/// Node ids `0..n` are the leaves (id `i` is item `i`); internal nodes
/// follow. Weights are non-decreasing toward the root. Trees built by
/// [`tree_from_ultrametric`] are *canonical*: weights strictly increase, so
/// the tree is the unique encoding of its ultrametric. Resolutions relax
/// this to allow equal parent and child weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedRootedTree {
    n: usize,
    nodes: Vec<TreeNode>,
    root: usize,
}

/// Incremental construction of a [`WeightedRootedTree`].
pub struct TreeBuilder {
    n: usize,
    nodes: Vec<TreeNode>,
}

impl TreeBuilder {
    pub fn new(n: usize) -> Self {
        TreeBuilder {
            n,
            nodes: (0..n)
                .map(|_| TreeNode {
                    parent: None,
                    children: Vec::new(),
                    weight: None,
                })
                .collect(),
        }
    }

    /// Adds an internal node over existing nodes and returns its id.
    pub fn internal(&mut self, weight: Rational, children: Vec<usize>) -> usize {
        let id = self.nodes.len();
        for &c in &children {
            if c < self.nodes.len() {
                self.nodes[c].parent = Some(id);
            }
        }
        self.nodes.push(TreeNode {
            parent: None,
            children,
            weight: Some(weight),
        });
        id
    }

    pub fn finish(self, root: usize) -> Result<WeightedRootedTree> {
        let tree = WeightedRootedTree {
            n: self.n,
            nodes: self.nodes,
            root,
        };
        tree.validate()?;
        Ok(tree)
    }
}

impl WeightedRootedTree {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidTree(msg));
        if self.n < 2 {
            return bad(format!("need at least 2 leaves, got {}", self.n));
        }
        if self.root >= self.nodes.len() || self.root < self.n {
            return bad("root must be an internal node".into());
        }
        if self.nodes[self.root].parent.is_some() {
            return bad("root has a parent".into());
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            if seen[v] {
                return bad(format!("node {v} reached twice"));
            }
            seen[v] = true;
            let node = &self.nodes[v];
            if v < self.n {
                if !node.children.is_empty() || node.weight.is_some() {
                    return bad(format!("leaf {} has children or a weight", v + 1));
                }
                continue;
            }
            let Some(w) = &node.weight else {
                return bad(format!("internal node {v} has no weight"));
            };
            if node.children.len() < 2 {
                return bad(format!("internal node {v} has fewer than 2 children"));
            }
            for &c in &node.children {
                if c >= self.nodes.len() {
                    return bad(format!("node {v} has unknown child {c}"));
                }
                if self.nodes[c].parent != Some(v) {
                    return bad(format!("parent link of node {c} is inconsistent"));
                }
                if let Some(cw) = &self.nodes[c].weight {
                    if cw > w {
                        return bad(format!("child {c} outweighs its parent {v}"));
                    }
                }
                stack.push(c);
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return bad(format!("node {v} is not connected to the root"));
        }
        Ok(())
    }

    pub fn n_leaves(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        id < self.n
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = usize> {
        self.n..self.nodes.len()
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.nodes[id].children
    }

    pub fn parent(&self, id: usize) -> Option<usize> {
        self.nodes[id].parent
    }

    pub fn weight(&self, id: usize) -> Option<&Rational> {
        self.nodes[id].weight.as_ref()
    }

    pub(crate) fn set_weight(&mut self, id: usize, w: Rational) {
        debug_assert!(id >= self.n);
        self.nodes[id].weight = Some(w);
    }

    pub fn is_binary(&self) -> bool {
        self.internal_nodes().all(|v| self.children(v).len() == 2)
    }

    /// True when every internal node is strictly lighter than its parent.
    pub fn is_canonical(&self) -> bool {
        self.internal_nodes().all(|v| match self.parent(v) {
            Some(p) => self.weight(v) < self.weight(p),
            None => true,
        })
    }

    /// Sorted leaf items below `id` (the item itself for a leaf).
    pub fn cluster(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(v) = stack.pop() {
            if v < self.n {
                out.push(v);
            } else {
                stack.extend_from_slice(self.children(v));
            }
        }
        out.sort_unstable();
        out
    }

    /// All internal nodes strictly below `id`.
    pub fn internal_descendants(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.children(id).to_vec();
        while let Some(v) = stack.pop() {
            if v >= self.n {
                out.push(v);
                stack.extend_from_slice(self.children(v));
            }
        }
        out
    }

    /// Leaf pairs `(i, j)`, `i < j`, whose lowest common ancestor is `id`.
    pub fn pairs_joined_at(&self, id: usize) -> Vec<(usize, usize)> {
        let clusters: Vec<Vec<usize>> = self.children(id).iter().map(|&c| self.cluster(c)).collect();
        let mut out = Vec::new();
        for (a, ca) in clusters.iter().enumerate() {
            for cb in &clusters[a + 1..] {
                for &i in ca {
                    for &j in cb {
                        out.push((i.min(j), i.max(j)));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Lowest common ancestor of two nodes.
    pub fn lca(&self, a: usize, b: usize) -> usize {
        let mut path = Vec::new();
        let mut v = Some(a);
        while let Some(x) = v {
            path.push(x);
            v = self.parent(x);
        }
        let mut u = b;
        loop {
            if path.contains(&u) {
                return u;
            }
            u = self.parent(u).expect("nodes share a root");
        }
    }

    /// Smallest leaf label under `id`; the sort key for child ordering.
    fn min_leaf(&self, id: usize) -> usize {
        if id < self.n {
            id
        } else {
            self.children(id)
                .iter()
                .map(|&c| self.min_leaf(c))
                .min()
                .expect("internal nodes have children")
        }
    }

    /// Children of `id` ordered by their smallest leaf.
    pub fn sorted_children(&self, id: usize) -> Vec<usize> {
        let mut ch = self.children(id).to_vec();
        ch.sort_by_key(|&c| self.min_leaf(c));
        ch
    }
}

/// Builds the canonical tree of an ultrametric by grouping items at each
/// distinct value: the root carries the largest entry, and its children
/// are the classes of the relation `δ_ij < max`.
pub fn tree_from_ultrametric(delta: &Ultrametric) -> Result<WeightedRootedTree> {
    let n = delta.n();
    if n < 2 {
        return Err(Error::TooFewItems { needed: 2, found: n });
    }
    let d = delta.map();
    let mut b = TreeBuilder::new(n);
    let items: Vec<usize> = (0..n).collect();
    let root = build_cluster(d, &items, &mut b);
    b.finish(root)
}

fn build_cluster(d: &DissimilarityMap, items: &[usize], b: &mut TreeBuilder) -> usize {
    if items.len() == 1 {
        return items[0];
    }
    let mut top = d.get_ref(items[0], items[1]);
    for (x, &i) in items.iter().enumerate() {
        for &j in &items[x + 1..] {
            top = top.max(d.get_ref(i, j));
        }
    }
    let top = top.clone();
    // Classes of `δ_ij < top`; transitive because δ is an ultrametric.
    let mut assigned = vec![false; items.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for s in 0..items.len() {
        if assigned[s] {
            continue;
        }
        assigned[s] = true;
        let mut group = vec![items[s]];
        for t in s + 1..items.len() {
            if !assigned[t] && d.get_ref(items[s], items[t]) < &top {
                assigned[t] = true;
                group.push(items[t]);
            }
        }
        groups.push(group);
    }
    let children = groups.iter().map(|g| build_cluster(d, g, b)).collect();
    b.internal(top, children)
}

/// `δ_ij` = weight of the lowest common ancestor of leaves `i` and `j`.
pub fn ultrametric_from_tree(tree: &WeightedRootedTree) -> Ultrametric {
    let n = tree.n_leaves();
    let mut values = vec![Rational::zero(); pair_count(n)];
    for v in tree.internal_nodes() {
        let w = tree.weight(v).expect("internal nodes are weighted");
        for (i, j) in tree.pairs_joined_at(v) {
            values[pair_position(n, i, j)] = w.clone();
        }
    }
    let map = DissimilarityMap::from_pairs(n, values).expect("pair count matches");
    debug_assert!(is_ultrametric(&map));
    Ultrametric(map)
}

/// Options for [`to_newick_with`].
#[derive(Clone, Debug, Default)]
pub struct NewickOptions<'a> {
    /// Emit `:length` with length `(parent weight − node weight) / 2`,
    /// leaves at height 0.
    pub branch_lengths: bool,
    /// Leaf names; 1-based item numbers when absent.
    pub labels: Option<&'a [String]>,
}

/// Newick text with internal weights as node labels, e.g. `((1,2)4,3)6;`.
pub fn to_newick(tree: &WeightedRootedTree) -> String {
    to_newick_with(tree, &NewickOptions::default())
}

pub fn to_newick_with(tree: &WeightedRootedTree, opts: &NewickOptions<'_>) -> String {
    let mut out = String::new();
    write_newick(tree, tree.root(), opts, &mut out);
    out.push(';');
    out
}

fn write_newick(tree: &WeightedRootedTree, id: usize, opts: &NewickOptions<'_>, out: &mut String) {
    if tree.is_leaf(id) {
        match opts.labels {
            Some(l) => out.push_str(&l[id]),
            None => out.push_str(&(id + 1).to_string()),
        }
    } else {
        out.push('(');
        for (k, c) in tree.sorted_children(id).into_iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            write_newick(tree, c, opts, out);
        }
        out.push(')');
        out.push_str(&rational::fmt_decimal(tree.weight(id).expect("weighted")));
    }
    if opts.branch_lengths {
        if let Some(p) = tree.parent(id) {
            let pw = tree.weight(p).expect("weighted");
            let own = tree.weight(id).cloned().unwrap_or_else(Rational::zero);
            let len = (pw - own) / rational::int(2);
            out.push(':');
            out.push_str(&rational::fmt_decimal(&len));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    fn rows(xs: &[&[i64]]) -> Vec<Vec<Rational>> {
        xs.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    fn fig1_tree() -> WeightedRootedTree {
        let mut b = TreeBuilder::new(3);
        let low = b.internal(int(4), vec![0, 1]);
        let root = b.internal(int(6), vec![low, 2]);
        b.finish(root).unwrap()
    }

    #[test]
    fn pair_layout() {
        assert_eq!(pair_count(8), 28);
        let all: Vec<_> = pairs(4).collect();
        assert_eq!(all, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        for (k, (i, j)) in pairs(7).enumerate() {
            assert_eq!(pair_position(7, i, j), k);
            assert_eq!(pair_position(7, j, i), k);
        }
    }

    #[test]
    fn validate_examples() {
        let d = validate_dissimilarity(&rows(&[&[0, 2, 4], &[2, 0, 8], &[4, 8, 0]])).unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.values(), &[int(2), int(4), int(8)]);

        let err = validate_dissimilarity(&rows(&[&[0, 2], &[3, 0]])).unwrap_err();
        assert_eq!(err.to_string(), "asymmetry at (1, 2): 2 vs 3");

        let one = validate_dissimilarity(&rows(&[&[0]])).unwrap();
        assert_eq!(one.n(), 1);
        assert!(one.values().is_empty());

        assert!(matches!(
            validate_dissimilarity(&rows(&[&[1, 2], &[2, 0]])),
            Err(Error::NonzeroDiagonal(0, _))
        ));
        assert!(matches!(
            validate_dissimilarity(&rows(&[&[0, 0], &[0, 0]])),
            Err(Error::NonPositive { i: 0, j: 1, .. })
        ));
        assert!(matches!(
            validate_dissimilarity(&rows(&[&[0, 1, 2], &[1, 0]])),
            Err(Error::NotSquare { row: 0, expected: 2, found: 3 })
        ));
        assert_eq!(validate_dissimilarity(&[]), Err(Error::EmptyMatrix));
    }

    #[test]
    fn ultrametric_examples() {
        let star = DissimilarityMap::from_int_pairs(3, &[4, 6, 6]).unwrap();
        assert!(is_ultrametric(&star));
        let d = DissimilarityMap::from_int_pairs(3, &[2, 4, 8]).unwrap();
        assert_eq!(ultrametric_violation(&d), Some((0, 1, 2)));
        let flat = DissimilarityMap::from_int_pairs(4, &[5; 6]).unwrap();
        assert!(is_ultrametric(&flat));
        assert!(Ultrametric::new(d).is_err());
    }

    #[test]
    fn tree_examples() {
        let delta = Ultrametric::from_int_pairs(3, &[4, 6, 6]).unwrap();
        let t = tree_from_ultrametric(&delta).unwrap();
        assert_eq!(t, fig1_tree());
        assert!(t.is_canonical());

        let star = Ultrametric::from_int_pairs(4, &[7; 6]).unwrap();
        let t = tree_from_ultrametric(&star).unwrap();
        assert_eq!(t.children(t.root()), &[0, 1, 2, 3]);
        assert_eq!(t.weight(t.root()), Some(&int(7)));

        // δ* of the n = 4 instance: 9 on pair (1,4), 10 elsewhere.
        let d4 = Ultrametric::from_int_pairs(4, &[10, 10, 9, 10, 10, 10]).unwrap();
        let t = tree_from_ultrametric(&d4).unwrap();
        assert_eq!(to_newick(&t), "((1,4)9,2,3)10;");
    }

    #[test]
    fn tree_to_ultrametric_examples() {
        let u = ultrametric_from_tree(&fig1_tree());
        assert_eq!(u.values(), &[int(4), int(6), int(6)]);

        let mut b = TreeBuilder::new(5);
        let r = b.internal(int(3), vec![0, 1, 2, 3, 4]);
        let star = b.finish(r).unwrap();
        assert!(ultrametric_from_tree(&star).values().iter().all(|v| v == &int(3)));
    }

    #[test]
    fn linf_examples() {
        let d = DissimilarityMap::from_int_pairs(3, &[2, 4, 8]).unwrap();
        let s = DissimilarityMap::from_int_pairs(3, &[4, 6, 6]).unwrap();
        assert_eq!(linf_distance(&d, &s).unwrap(), int(2));
        assert_eq!(linf_distance(&d, &d).unwrap(), int(0));
        let other = DissimilarityMap::from_int_pairs(2, &[1]).unwrap();
        assert!(linf_distance(&d, &other).is_err());
    }

    #[test]
    fn newick_examples() {
        assert_eq!(to_newick(&fig1_tree()), "((1,2)4,3)6;");
        let mut b = TreeBuilder::new(3);
        let r = b.internal(int(7), vec![2, 0, 1]);
        assert_eq!(to_newick(&b.finish(r).unwrap()), "(1,2,3)7;");
        let mut b = TreeBuilder::new(2);
        let r = b.internal(rational::frac(5, 2), vec![0, 1]);
        assert_eq!(to_newick(&b.finish(r).unwrap()), "(1,2)2.5;");

        let opts = NewickOptions {
            branch_lengths: true,
            labels: None,
        };
        assert_eq!(to_newick_with(&fig1_tree(), &opts), "((1:2,2:2)4:1,3:3)6;");
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let opts = NewickOptions {
            branch_lengths: false,
            labels: Some(&names),
        };
        assert_eq!(to_newick_with(&fig1_tree(), &opts), "((a,b)4,c)6;");
    }

    #[test]
    fn invalid_trees_rejected() {
        let mut b = TreeBuilder::new(3);
        let low = b.internal(int(8), vec![0, 1]);
        let root = b.internal(int(6), vec![low, 2]);
        assert!(b.finish(root).is_err());

        let mut b = TreeBuilder::new(3);
        let root = b.internal(int(6), vec![0, 1]);
        assert!(b.finish(root).is_err(), "leaf 3 missing");

        let mut b = TreeBuilder::new(2);
        let low = b.internal(int(1), vec![0]);
        let root = b.internal(int(6), vec![low, 1]);
        assert!(b.finish(root).is_err(), "unary node");
    }

    #[test]
    fn lca_and_pairs() {
        let t = fig1_tree();
        assert_eq!(t.lca(0, 1), 3);
        assert_eq!(t.lca(0, 2), 4);
        assert_eq!(t.pairs_joined_at(4), vec![(0, 2), (1, 2)]);
        assert_eq!(t.cluster(3), vec![0, 1]);
    }

    /// Random ultrametric: random canonical tree via random merges.
    fn random_ultrametric(n: usize, merges: &[(usize, usize, i64)]) -> Ultrametric {
        let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut values = vec![int(0); pair_count(n)];
        let mut height = 0i64;
        for &(a, b, step) in merges {
            if clusters.len() < 2 {
                break;
            }
            let a = a % clusters.len();
            let mut b = b % clusters.len();
            if a == b {
                b = (b + 1) % clusters.len();
            }
            height += step;
            let (lo, hi) = (a.min(b), a.max(b));
            let cb = clusters.remove(hi);
            let ca = &mut clusters[lo];
            for &i in ca.iter() {
                for &j in &cb {
                    values[pair_position(n, i, j)] = int(height);
                }
            }
            ca.extend(cb);
        }
        while clusters.len() > 1 {
            height += 1;
            let cb = clusters.pop().unwrap();
            for &i in &clusters[0] {
                for &j in &cb {
                    values[pair_position(n, i, j)] = int(height);
                }
            }
            clusters[0].extend(cb);
        }
        Ultrametric::new(DissimilarityMap::from_pairs(n, values).unwrap()).unwrap()
    }

    /// Direct reading: δ_ik ≤ max(δ_ij, δ_jk) over all ordered triples.
    fn satisfies_inequality(d: &DissimilarityMap) -> bool {
        let n = d.n();
        (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| d.get(i, k) <= d.get(i, j).max(d.get(j, k))))
        })
    }

    proptest! {
        #[test]
        fn round_trip(n in 2usize..8, merges in proptest::collection::vec((0usize..8, 0usize..8, 0i64..3), 0..8)) {
            let u = random_ultrametric(n, &merges);
            let t = tree_from_ultrametric(&u).unwrap();
            prop_assert!(t.is_canonical());
            prop_assert_eq!(ultrametric_from_tree(&t), u);
        }

        #[test]
        fn two_formulations_agree(n in 3usize..6, vals in proptest::collection::vec(1i64..5, 10)) {
            let d = DissimilarityMap::from_int_pairs(n, &vals[..pair_count(n)]).unwrap();
            prop_assert_eq!(is_ultrametric(&d), satisfies_inequality(&d));
        }

        #[test]
        fn linf_is_a_metric(
            a in proptest::collection::vec(-20i64..20, 6),
            b in proptest::collection::vec(-20i64..20, 6),
            c in proptest::collection::vec(-20i64..20, 6),
        ) {
            let (a, b, c) = (
                DissimilarityMap::from_int_pairs(4, &a).unwrap(),
                DissimilarityMap::from_int_pairs(4, &b).unwrap(),
                DissimilarityMap::from_int_pairs(4, &c).unwrap(),
            );
            let ab = linf_distance(&a, &b).unwrap();
            prop_assert_eq!(&ab, &linf_distance(&b, &a).unwrap());
            prop_assert_eq!(linf_distance(&a, &a).unwrap(), int(0));
            prop_assert!(ab.is_zero() == (a == b));
            let ac = linf_distance(&a, &c).unwrap();
            let cb = linf_distance(&c, &b).unwrap();
            prop_assert!(ab <= ac + cb);
        }
    }
}
