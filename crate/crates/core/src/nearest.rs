//! One ℓ∞-nearest ultrametric via the subdominant (bottleneck) map.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{linf_distance, pair_count, pair_position, pairs, DissimilarityMap, Ultrametric};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MstEdge {
    pub i: usize,
    pub j: usize,
    #[serde(serialize_with = "rational::serde_rat::serialize")]
    pub weight: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NearestResult {
    pub delta_star: Ultrametric,
    #[serde(serialize_with = "rational::serde_rat::serialize")]
    pub q: Rational,
    pub d_star: DissimilarityMap,
    pub mst_edges: Vec<MstEdge>,
}

fn require_pairs(d: &DissimilarityMap) -> Result<()> {
    if d.n() < 2 {
        return Err(Error::TooFewItems {
            needed: 2,
            found: d.n(),
        });
    }
    Ok(())
}

/// Kruskal on the complete graph, ties broken by lexicographic edge.
pub fn min_spanning_tree(d: &DissimilarityMap) -> Result<Vec<MstEdge>> {
    let order: Vec<(usize, usize)> = pairs(d.n()).collect();
    min_spanning_tree_with_order(d, &order)
}

/// Kruskal where equal-weight edges are taken in the order they appear in
/// `order` (a permutation of all pairs).
pub fn min_spanning_tree_with_order(
    d: &DissimilarityMap,
    order: &[(usize, usize)],
) -> Result<Vec<MstEdge>> {
    require_pairs(d)?;
    let n = d.n();
    if order.len() != pair_count(n) {
        return Err(Error::DimensionMismatch {
            expected: pair_count(n),
            found: order.len(),
        });
    }
    let mut edges: Vec<(usize, usize)> = order.to_vec();
    edges.sort_by(|a, b| d.get_ref(a.0, a.1).cmp(d.get_ref(b.0, b.1)));

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut out = Vec::with_capacity(n - 1);
    for (i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            out.push(MstEdge {
                i: i.min(j),
                j: i.max(j),
                weight: d.get(i, j),
            });
            if out.len() == n - 1 {
                break;
            }
        }
    }
    Ok(out)
}

/// Largest edge on each tree path between two items.
fn path_maxima(n: usize, edges: &[MstEdge]) -> DissimilarityMap {
    let mut adj: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); n];
    for e in edges {
        adj[e.i].push((e.j, &e.weight));
        adj[e.j].push((e.i, &e.weight));
    }
    let mut values = vec![Rational::zero(); pair_count(n)];
    for s in 0..n {
        let mut best: Vec<Option<Rational>> = vec![None; n];
        best[s] = Some(Rational::zero());
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            let bu = best[u].clone().expect("visited");
            for &(v, w) in &adj[u] {
                if best[v].is_none() {
                    let m = if v == s || u == s { w.clone() } else { bu.clone().max(w.clone()) };
                    best[v] = Some(m);
                    stack.push(v);
                }
            }
        }
        for t in s + 1..n {
            values[pair_position(n, s, t)] = best[t].clone().expect("tree is spanning");
        }
    }
    DissimilarityMap::from_pairs(n, values).expect("pair count matches")
}

/// The subdominant map `d*`: minimax path weight between every pair.
pub fn bottleneck_map(d: &DissimilarityMap) -> Result<DissimilarityMap> {
    let mst = min_spanning_tree(d)?;
    Ok(path_maxima(d.n(), &mst))
}

/// Bottleneck map computed from an MST built under the given edge order.
pub fn bottleneck_map_with_order(
    d: &DissimilarityMap,
    order: &[(usize, usize)],
) -> Result<DissimilarityMap> {
    let mst = min_spanning_tree_with_order(d, order)?;
    Ok(path_maxima(d.n(), &mst))
}

/// `δ* = d* + q` with `q = ‖d* − d‖∞ / 2`.
pub fn nearest_ultrametric(d: &DissimilarityMap) -> Result<NearestResult> {
    let mst_edges = min_spanning_tree(d)?;
    let d_star = path_maxima(d.n(), &mst_edges);
    let q = linf_distance(&d_star, d)? / rational::int(2);
    let shifted = d_star.values().iter().map(|v| v + &q).collect();
    let mut delta = DissimilarityMap::from_pairs(d.n(), shifted)?;
    if let Some(labels) = d.labels() {
        delta = delta.with_labels(labels.to_vec())?;
    }
    let delta_star = Ultrametric::new(delta)?;
    log::debug!("nearest ultrametric: q = {}", rational::fmt(&q));
    Ok(NearestResult {
        delta_star,
        q,
        d_star,
        mst_edges,
    })
}
