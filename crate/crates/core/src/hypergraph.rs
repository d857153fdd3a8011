//! Tangent directed hypergraphs and the greatest-SCC extremality test.

use std::fmt::Write as _;

use serde::Serialize;

use crate::cone::{check_membership, TropicalSystem};
use crate::error::{Error, Result};
use crate::trop::{dot_slices, TropVector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hyperarc {
    pub tail: Vec<usize>,
    pub head: Vec<usize>,
    /// Inequality row that produced the arc, when built from a system.
    pub row: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectedHypergraph {
    nodes: usize,
    arcs: Vec<Hyperarc>,
}

impl DirectedHypergraph {
    pub fn new(nodes: usize) -> Self {
        DirectedHypergraph {
            nodes,
            arcs: Vec::new(),
        }
    }

    /// Adds an arc. Panics on empty or out-of-range endpoints.
    pub fn add_arc(&mut self, mut tail: Vec<usize>, mut head: Vec<usize>, row: Option<usize>) {
        assert!(!tail.is_empty() && !head.is_empty(), "empty hyperarc side");
        assert!(
            tail.iter().chain(&head).all(|&x| x < self.nodes),
            "hyperarc node out of range"
        );
        tail.sort_unstable();
        tail.dedup();
        head.sort_unstable();
        head.dedup();
        self.arcs.push(Hyperarc { tail, head, row });
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn arcs(&self) -> &[Hyperarc] {
        &self.arcs
    }

    pub fn has_multi_tail(&self) -> bool {
        self.arcs.iter().any(|a| a.tail.len() > 1)
    }

    /// Simple-graph view `(from, to)` of arcs with one-node tails, sorted
    /// and deduplicated.
    pub fn simple_edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .arcs
            .iter()
            .filter(|a| a.tail.len() == 1)
            .flat_map(|a| a.head.iter().map(move |&h| (a.tail[0], h)))
            .filter(|(t, h)| t != h)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// One arc `(argmax B_k v, argmax A_k v)` per row with `A_k v = B_k v > −∞`.
pub fn tangent_hypergraph(sys: &TropicalSystem, v: &TropVector) -> Result<DirectedHypergraph> {
    if let Some(r) = check_membership(v, sys)?.violated_row {
        return Err(Error::NotInCone(r));
    }
    let mut h = DirectedHypergraph::new(sys.cols());
    for k in 0..sys.rows() {
        let (lhs, head) = dot_slices(sys.a.row(k), v.entries());
        let (rhs, tail) = dot_slices(sys.b.row(k), v.entries());
        if !lhs.is_bottom() && lhs == rhs {
            h.add_arc(tail, head, Some(k));
        }
    }
    Ok(h)
}

/// Membership mask of the least set containing `u` and closed under
/// "tail inside implies head inside".
fn reach_mask(h: &DirectedHypergraph, u: usize) -> Vec<bool> {
    let mut seen = vec![false; h.nodes];
    seen[u] = true;
    let mut fired = vec![false; h.arcs.len()];
    loop {
        let mut changed = false;
        for (k, arc) in h.arcs.iter().enumerate() {
            if !fired[k] && arc.tail.iter().all(|&t| seen[t]) {
                fired[k] = true;
                for &x in &arc.head {
                    if !seen[x] {
                        seen[x] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return seen;
        }
    }
}

/// Sorted set of nodes reachable from `u` (including `u`).
pub fn reachable_from(h: &DirectedHypergraph, u: usize) -> Vec<usize> {
    reach_mask(h, u)
        .iter()
        .enumerate()
        .filter_map(|(i, &s)| s.then_some(i))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SccDecomposition {
    /// Components sorted by their smallest node; nodes sorted inside.
    pub components: Vec<Vec<usize>>,
    /// Pairs `(a, b)`, `a != b`, with component `a` reaching component `b`.
    pub order: Vec<(usize, usize)>,
    /// Index of the component reached from every other one.
    pub greatest: Option<usize>,
}

impl SccDecomposition {
    pub fn reaches(&self, a: usize, b: usize) -> bool {
        a == b || self.order.binary_search(&(a, b)).is_ok()
    }

    pub fn component_of(&self, node: usize) -> usize {
        self.components
            .iter()
            .position(|c| c.binary_search(&node).is_ok())
            .expect("components cover every node")
    }

    pub fn greatest_component(&self) -> Option<&[usize]> {
        self.greatest.map(|g| self.components[g].as_slice())
    }
}

pub fn scc_decomposition(h: &DirectedHypergraph) -> SccDecomposition {
    let m = h.nodes;
    let reach: Vec<Vec<bool>> = (0..m).map(|u| reach_mask(h, u)).collect();
    let mut comp_of = vec![usize::MAX; m];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for u in 0..m {
        if comp_of[u] != usize::MAX {
            continue;
        }
        let c = components.len();
        let members: Vec<usize> = (u..m).filter(|&w| reach[u][w] && reach[w][u]).collect();
        for &w in &members {
            comp_of[w] = c;
        }
        components.push(members);
    }
    let mut order = Vec::new();
    for (a, ca) in components.iter().enumerate() {
        for (b, cb) in components.iter().enumerate() {
            if a != b && reach[ca[0]][cb[0]] {
                order.push((a, b));
            }
        }
    }
    let greatest = (0..components.len()).find(|&g| {
        components
            .iter()
            .all(|c| reach[c[0]][components[g][0]])
    });
    SccDecomposition {
        components,
        order,
        greatest,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalityCertificate {
    pub extreme: bool,
    pub scc: SccDecomposition,
    pub hypergraph: DirectedHypergraph,
    /// Some active row had a tail with more than one node.
    pub multi_tail: bool,
}

/// Extreme iff the SCCs of the tangent hypergraph have a greatest element.
pub fn is_extreme(sys: &TropicalSystem, v: &TropVector) -> Result<ExtremalityCertificate> {
    let hypergraph = tangent_hypergraph(sys, v)?;
    let scc = scc_decomposition(&hypergraph);
    let multi_tail = hypergraph.has_multi_tail();
    if multi_tail {
        log::info!("tangent hypergraph has a multi-node tail");
    }
    Ok(ExtremalityCertificate {
        extreme: scc.greatest.is_some(),
        scc,
        hypergraph,
        multi_tail,
    })
}

/// Graphviz rendering. Multi-node tails pass through a point-shaped
/// junction; SCCs with more than one node become clusters.
pub fn to_dot(h: &DirectedHypergraph, labels: &[String], scc: Option<&SccDecomposition>) -> String {
    let mut out = String::from("digraph tangent {\n  rankdir=LR;\n");
    let node_line = |out: &mut String, v: usize, indent: &str| {
        let _ = writeln!(out, "{indent}n{v} [label=\"{}\"];", labels[v]);
    };
    let mut placed = vec![false; h.nodes];
    if let Some(scc) = scc {
        for (c, members) in scc.components.iter().enumerate() {
            if members.len() < 2 {
                continue;
            }
            let _ = writeln!(out, "  subgraph cluster_{c} {{");
            if scc.greatest == Some(c) {
                out.push_str("    label=\"greatest\";\n");
            }
            for &v in members {
                node_line(&mut out, v, "    ");
                placed[v] = true;
            }
            out.push_str("  }\n");
        }
    }
    for (v, _) in placed.iter().enumerate().filter(|(_, &p)| !p) {
        node_line(&mut out, v, "  ");
    }
    for (k, arc) in h.arcs.iter().enumerate() {
        if arc.tail.len() == 1 {
            for &x in &arc.head {
                let _ = writeln!(out, "  n{} -> n{x};", arc.tail[0]);
            }
        } else {
            let _ = writeln!(out, "  j{k} [shape=point];");
            for &t in &arc.tail {
                let _ = writeln!(out, "  n{t} -> j{k} [arrowhead=none];");
            }
            for &x in &arc.head {
                let _ = writeln!(out, "  j{k} -> n{x};");
            }
        }
    }
    out.push_str("}\n");
    out
}
