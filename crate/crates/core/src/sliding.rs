//! Candidate generation by sliding mobile internal nodes.
//!
//! Starting from δ*, every internal node of every resolution of the
//! current topology whose weight can drop while staying at distance `q`
//! from `d` is slid to its floor. The closure of these moves is `all`;
//! members with at most one mobile node form the candidate set.
//!
//! For a node `u` with `k ≥ 3` children, a resolution adds nodes of
//! weight `α(u)`. Only the new nodes over exactly two original children
//! (cherries) can be mobile; any other new node sits above another node of
//! weight `α(u)`. Mobility is therefore analysed per node without
//! materialising the full product of resolutions; [`resolutions`] exists
//! for inspection and for testing that shortcut.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::metric::{
    linf_distance, pair_position, to_newick, tree_from_ultrametric, ultrametric_from_tree,
    DissimilarityMap, TreeBuilder, Ultrametric, WeightedRootedTree,
};
use crate::nearest::nearest_ultrametric;
use crate::rational::{self, Rational};

/// How "at most one mobile internal node" is quantified over resolutions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantifier {
    /// Count distinct mobile clusters across all resolutions.
    #[default]
    AllResolutions,
    /// Largest number of mobile nodes inside a single resolution.
    PerResolution,
}

impl FromStr for Quantifier {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "all-resolutions" => Ok(Quantifier::AllResolutions),
            "per-resolution" => Ok(Quantifier::PerResolution),
            other => Err(format!("unknown quantifier `{other}`")),
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::AllResolutions => "all-resolutions",
            Quantifier::PerResolution => "per-resolution",
        })
    }
}

fn one_based<S: Serializer>(v: &[usize], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x + 1))
}

fn newick_of<S: Serializer>(t: &WeightedRootedTree, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&to_newick(t))
}

/// A node that can slide, in some resolution of the canonical tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MobileCluster {
    /// Canonical node that is slid (binary) or refined (non-binary).
    pub node: usize,
    /// The two sides joined at the sliding node; their union is the cluster.
    #[serde(serialize_with = "one_based")]
    pub left: Vec<usize>,
    #[serde(serialize_with = "one_based")]
    pub right: Vec<usize>,
    #[serde(with = "rat")]
    pub weight: Rational,
    #[serde(with = "rat")]
    pub floor: Rational,
    /// True when the node only exists in a resolution.
    pub from_resolution: bool,
}

mod rat {
    pub use crate::rational::serde_rat::serialize;
}

impl MobileCluster {
    pub fn cluster(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.left.iter().chain(&self.right).copied().collect();
        c.sort_unstable();
        c
    }
}

/// One slide on the path from δ* to a candidate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Move {
    #[serde(serialize_with = "one_based")]
    pub cluster: Vec<usize>,
    /// Present when the slid node was created by resolving this canonical node.
    pub resolved: bool,
    #[serde(with = "rat")]
    pub from: Rational,
    #[serde(with = "rat")]
    pub to: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateState {
    pub ultrametric: Ultrametric,
    #[serde(rename = "newick", serialize_with = "newick_of")]
    pub tree: WeightedRootedTree,
    pub mobile: Vec<MobileCluster>,
    /// Distinct mobile clusters across all resolutions.
    pub mobile_all_resolutions: usize,
    /// Most mobile nodes in any single resolution.
    pub mobile_per_resolution: usize,
    pub provenance: Vec<Move>,
    /// Some entry is zero or negative.
    pub nonpositive: bool,
}

impl CandidateState {
    pub fn new(ultrametric: Ultrametric, d: &DissimilarityMap, q: &Rational) -> Result<Self> {
        let tree = tree_from_ultrametric(&ultrametric)?;
        let analysis = analyse(&tree, d, q);
        let nonpositive = ultrametric.values().iter().any(|v| !v.is_positive());
        Ok(CandidateState {
            ultrametric,
            tree,
            mobile: analysis.clusters,
            mobile_all_resolutions: analysis.distinct,
            mobile_per_resolution: analysis.per_resolution,
            provenance: Vec::new(),
            nonpositive,
        })
    }

    pub fn mobile_count(&self, quantifier: Quantifier) -> usize {
        match quantifier {
            Quantifier::AllResolutions => self.mobile_all_resolutions,
            Quantifier::PerResolution => self.mobile_per_resolution,
        }
    }

    pub fn satisfies(&self, quantifier: Quantifier) -> bool {
        self.mobile_count(quantifier) <= 1
    }

    /// The ultrametric after sliding `m` all the way down.
    fn apply(&self, m: &MobileCluster) -> Ultrametric {
        let n = self.ultrametric.n();
        let mut values = self.ultrametric.values().to_vec();
        for &i in &m.left {
            for &j in &m.right {
                values[pair_position(n, i, j)] = m.floor.clone();
            }
        }
        let map = DissimilarityMap::from_pairs(n, values).expect("same size");
        Ultrametric::new(map).expect("a slide keeps the ultrametric condition")
    }
}

struct Analysis {
    clusters: Vec<MobileCluster>,
    distinct: usize,
    per_resolution: usize,
}

fn max_cross(d: &DissimilarityMap, a: &[usize], b: &[usize]) -> Rational {
    a.iter()
        .flat_map(|&i| b.iter().map(move |&j| d.get_ref(i, j)))
        .max()
        .expect("nonempty sides")
        .clone()
}

fn analyse(tree: &WeightedRootedTree, d: &DissimilarityMap, q: &Rational) -> Analysis {
    let mut clusters = Vec::new();
    let mut per_resolution = 0;
    for u in tree.internal_nodes() {
        let w = tree.weight(u).expect("weighted").clone();
        let ch = tree.sorted_children(u);
        let sides: Vec<Vec<usize>> = ch.iter().map(|&c| tree.cluster(c)).collect();
        if ch.len() == 2 {
            let floor = slide_floor(tree, u, d, q).expect("internal");
            if floor < w {
                per_resolution += 1;
                clusters.push(MobileCluster {
                    node: u,
                    left: sides[0].clone(),
                    right: sides[1].clone(),
                    weight: w,
                    floor,
                    from_resolution: false,
                });
            }
            continue;
        }
        let mut edges = Vec::new();
        for a in 0..ch.len() {
            for b in a + 1..ch.len() {
                let mut floor = max_cross(d, &sides[a], &sides[b]) - q;
                for c in [ch[a], ch[b]] {
                    if let Some(cw) = tree.weight(c) {
                        floor = floor.max(cw.clone());
                    }
                }
                if floor < w {
                    edges.push((a, b));
                    clusters.push(MobileCluster {
                        node: u,
                        left: sides[a].clone(),
                        right: sides[b].clone(),
                        weight: w.clone(),
                        floor,
                        from_resolution: true,
                    });
                }
            }
        }
        per_resolution += max_matching(ch.len(), &edges);
    }
    let distinct = clusters.len();
    Analysis {
        clusters,
        distinct,
        per_resolution,
    }
}

/// Size of a maximum matching; any matching of children can be realised as
/// a set of cherries in one binary arrangement.
fn max_matching(k: usize, edges: &[(usize, usize)]) -> usize {
    fn go(mask: u64, adj: &[u64], memo: &mut HashMap<u64, usize>) -> usize {
        if mask == 0 {
            return 0;
        }
        if let Some(&v) = memo.get(&mask) {
            return v;
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut best = go(rest, adj, memo);
        let mut cand = adj[i] & rest;
        while cand != 0 {
            let j = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            best = best.max(1 + go(rest & !(1 << j), adj, memo));
        }
        memo.insert(mask, best);
        best
    }
    if edges.is_empty() {
        return 0;
    }
    assert!(k <= 64, "node degree above 64");
    let mut adj = vec![0u64; k];
    for &(a, b) in edges {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    go(full, &adj, &mut HashMap::new())
}

/// Lowest weight `v` can take with everything else fixed while the tree
/// stays within `q` of `d`.
pub fn slide_floor(
    tree: &WeightedRootedTree,
    v: usize,
    d: &DissimilarityMap,
    q: &Rational,
) -> Result<Rational> {
    if tree.is_leaf(v) || v >= tree.node_count() {
        return Err(Error::NotInternal(v));
    }
    let from_pairs = tree
        .pairs_joined_at(v)
        .into_iter()
        .map(|(i, j)| d.get_ref(i, j) - q)
        .max()
        .expect("internal nodes join at least one pair");
    let from_desc = tree
        .internal_descendants(v)
        .into_iter()
        .filter_map(|y| tree.weight(y).cloned())
        .max();
    Ok(match from_desc {
        Some(x) => x.max(from_pairs),
        None => from_pairs,
    })
}

pub fn is_mobile(
    tree: &WeightedRootedTree,
    v: usize,
    d: &DissimilarityMap,
    q: &Rational,
) -> Result<bool> {
    let floor = slide_floor(tree, v, d, q)?;
    Ok(&floor < tree.weight(v).expect("internal"))
}

/// Sets `α(v)` to its floor in `tree` (any resolution) and returns the
/// canonical tree of the result; nodes that end up with equal weights
/// merge.
pub fn slide_all_the_way_down(
    tree: &WeightedRootedTree,
    v: usize,
    d: &DissimilarityMap,
    q: &Rational,
) -> Result<WeightedRootedTree> {
    let floor = slide_floor(tree, v, d, q)?;
    if &floor >= tree.weight(v).expect("internal") {
        return Err(Error::Immobile {
            node: v,
            floor: rational::fmt(&floor),
        });
    }
    let mut t = tree.clone();
    t.set_weight(v, floor);
    tree_from_ultrametric(&ultrametric_from_tree(&t))
}

/// Binary arrangements of `k` labelled children.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Shape {
    Leaf(usize),
    Join(Box<Shape>, Box<Shape>),
}

fn arrangements(k: usize, memo: &mut HashMap<usize, Vec<Shape>>) -> Vec<Shape> {
    if let Some(v) = memo.get(&k) {
        return v.clone();
    }
    let out = if k == 1 {
        vec![Shape::Leaf(0)]
    } else {
        // Insert child k-1 above every node of every shape on k-1 children.
        fn insert(s: &Shape, x: usize) -> Vec<Shape> {
            let mut out = vec![Shape::Join(Box::new(s.clone()), Box::new(Shape::Leaf(x)))];
            if let Shape::Join(a, b) = s {
                for a2 in insert(a, x) {
                    out.push(Shape::Join(Box::new(a2), b.clone()));
                }
                for b2 in insert(b, x) {
                    out.push(Shape::Join(a.clone(), Box::new(b2)));
                }
            }
            out
        }
        arrangements(k - 1, memo)
            .iter()
            .flat_map(|s| insert(s, k - 1))
            .collect()
    };
    memo.insert(k, out.clone());
    out
}

/// Every binary refinement of `tree`; new nodes carry the weight of the
/// node they refine. A binary tree yields itself.
pub fn resolutions(tree: &WeightedRootedTree) -> Vec<WeightedRootedTree> {
    let mut memo = HashMap::new();
    let internal: Vec<usize> = tree.internal_nodes().collect();
    let choices: Vec<Vec<Shape>> = internal
        .iter()
        .map(|&u| arrangements(tree.children(u).len(), &mut memo))
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; internal.len()];
    loop {
        let chosen: BTreeMap<usize, &Shape> = internal
            .iter()
            .zip(&pick)
            .zip(&choices)
            .map(|((&u, &p), c)| (u, &c[p]))
            .collect();
        out.push(build_resolution(tree, &chosen));
        // Odometer over the per-node choices.
        let mut pos = 0;
        loop {
            if pos == pick.len() {
                return out;
            }
            pick[pos] += 1;
            if pick[pos] < choices[pos].len() {
                break;
            }
            pick[pos] = 0;
            pos += 1;
        }
    }
}

fn build_resolution(tree: &WeightedRootedTree, chosen: &BTreeMap<usize, &Shape>) -> WeightedRootedTree {
    fn emit(
        tree: &WeightedRootedTree,
        chosen: &BTreeMap<usize, &Shape>,
        v: usize,
        b: &mut TreeBuilder,
    ) -> usize {
        if tree.is_leaf(v) {
            return v;
        }
        let ch = tree.sorted_children(v);
        let ids: Vec<usize> = ch.iter().map(|&c| emit(tree, chosen, c, b)).collect();
        let w = tree.weight(v).expect("internal").clone();
        fn place(s: &Shape, ids: &[usize], w: &Rational, b: &mut TreeBuilder) -> usize {
            match s {
                Shape::Leaf(i) => ids[*i],
                Shape::Join(l, r) => {
                    let l = place(l, ids, w, b);
                    let r = place(r, ids, w, b);
                    b.internal(w.clone(), vec![l, r])
                }
            }
        }
        place(chosen[&v], &ids, &w, b)
    }
    let mut b = TreeBuilder::new(tree.n_leaves());
    let root = emit(tree, chosen, tree.root(), &mut b);
    b.finish(root).expect("refinement of a valid tree")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateSet {
    #[serde(with = "rat")]
    pub q: Rational,
    pub quantifier: Quantifier,
    /// Every ultrametric reached by sliding, sorted by entries.
    pub all: Vec<CandidateState>,
    /// Indices into `all` of members passing the mobility filter.
    pub bernstein: Vec<usize>,
    /// Filter sizes under both quantifiers.
    pub count_all_resolutions: usize,
    pub count_per_resolution: usize,
}

impl CandidateSet {
    pub fn bernstein_states(&self) -> impl Iterator<Item = &CandidateState> {
        self.bernstein.iter().map(move |&i| &self.all[i])
    }

    /// Members passing the filter under another quantifier.
    pub fn filtered(&self, quantifier: Quantifier) -> Vec<usize> {
        (0..self.all.len())
            .filter(|&i| self.all[i].satisfies(quantifier))
            .collect()
    }
}

/// Breadth-first closure from δ* over all slides, then the mobility filter.
pub fn bernstein_candidates(d: &DissimilarityMap, quantifier: Quantifier) -> Result<CandidateSet> {
    closure(d, quantifier, None)
}

/// Closure with optionally shuffled move order; the result does not depend
/// on the order.
pub(crate) fn closure(
    d: &DissimilarityMap,
    quantifier: Quantifier,
    shuffle_seed: Option<u64>,
) -> Result<CandidateSet> {
    if d.n() < 3 {
        return Err(Error::TooFewItems {
            needed: 3,
            found: d.n(),
        });
    }
    let nr = nearest_ultrametric(d)?;
    let q = nr.q;
    let start = CandidateState::new(nr.delta_star, d, &q)?;
    let mut seen: HashMap<Ultrametric, CandidateState> = HashMap::new();
    let mut queue = VecDeque::new();
    queue.push_back(start.ultrametric.clone());
    seen.insert(start.ultrametric.clone(), start);
    let mut rng = shuffle_seed.map(<rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64);

    while let Some(u) = queue.pop_front() {
        let state = seen[&u].clone();
        let mut moves = state.mobile.clone();
        if let Some(rng) = rng.as_mut() {
            rand::seq::SliceRandom::shuffle(moves.as_mut_slice(), rng);
        }
        for m in &moves {
            let next = state.apply(m);
            if seen.contains_key(&next) {
                continue;
            }
            let mut ns = CandidateState::new(next.clone(), d, &q)?;
            ns.provenance = state.provenance.clone();
            ns.provenance.push(Move {
                cluster: m.cluster(),
                resolved: m.from_resolution,
                from: m.weight.clone(),
                to: m.floor.clone(),
            });
            debug_assert_eq!(linf_distance(next.map(), d).ok(), Some(q.clone()));
            seen.insert(next.clone(), ns);
            queue.push_back(next);
        }
    }

    let mut all: Vec<CandidateState> = seen.into_values().collect();
    all.sort_by(|a, b| a.ultrametric.values().cmp(b.ultrametric.values()));
    if all.iter().any(|s| s.nonpositive) {
        log::info!("some candidate ultrametrics have nonpositive entries");
    }
    let count = |qf: Quantifier| all.iter().filter(|s| s.satisfies(qf)).count();
    let count_all_resolutions = count(Quantifier::AllResolutions);
    let count_per_resolution = count(Quantifier::PerResolution);
    let bernstein = (0..all.len()).filter(|&i| all[i].satisfies(quantifier)).collect();
    log::debug!(
        "closure: {} states, {} / {} pass the filter (all / per resolution)",
        all.len(),
        count_all_resolutions,
        count_per_resolution
    );
    Ok(CandidateSet {
        q,
        quantifier,
        all,
        bernstein,
        count_all_resolutions,
        count_per_resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use std::collections::BTreeSet;

    fn star(n: usize, w: i64) -> WeightedRootedTree {
        let mut b = TreeBuilder::new(n);
        let r = b.internal(int(w), (0..n).collect());
        b.finish(r).unwrap()
    }

    fn map(n: usize, v: &[i64]) -> DissimilarityMap {
        DissimilarityMap::from_int_pairs(n, v).unwrap()
    }

    fn values(s: &CandidateState) -> Vec<i64> {
        s.ultrametric
            .values()
            .iter()
            .map(|v| v.to_integer().try_into().unwrap())
            .collect()
    }

    #[test]
    fn resolution_counts() {
        let d = map(3, &[4, 6, 6]);
        let binary = tree_from_ultrametric(&Ultrametric::new(d).unwrap()).unwrap();
        assert_eq!(resolutions(&binary), vec![binary.clone()]);
        let r3 = resolutions(&star(3, 5));
        assert_eq!(r3.len(), 3);
        let cherries: BTreeSet<Vec<usize>> = r3
            .iter()
            .map(|t| {
                let low = t.internal_nodes().find(|&v| v != t.root()).unwrap();
                t.cluster(low)
            })
            .collect();
        assert_eq!(cherries.len(), 3);
        let r4 = resolutions(&star(4, 5));
        assert_eq!(r4.len(), 15);
        assert!(r4.iter().all(|t| t.is_binary() && !t.is_canonical()));
        let newicks: BTreeSet<String> = r4.iter().map(to_newick).collect();
        assert_eq!(newicks.len(), 15);
        assert_eq!(resolutions(&star(5, 1)).len(), 105);
    }

    #[test]
    fn floor_examples() {
        let d = map(3, &[2, 4, 8]);
        let delta = Ultrametric::from_int_pairs(3, &[4, 6, 6]).unwrap();
        let t = tree_from_ultrametric(&delta).unwrap();
        let low = t.lca(0, 1);
        assert_eq!(slide_floor(&t, low, &d, &int(2)).unwrap(), int(0));
        assert!(is_mobile(&t, low, &d, &int(2)).unwrap());
        // Root of a Case-1 instance: floor d_13 + q equals its weight.
        assert_eq!(slide_floor(&t, t.root(), &d, &int(2)).unwrap(), int(6));
        assert!(!is_mobile(&t, t.root(), &d, &int(2)).unwrap());
        assert!(slide_floor(&t, 0, &d, &int(2)).is_err());

        let slid = slide_all_the_way_down(&t, low, &d, &int(2)).unwrap();
        assert_eq!(ultrametric_from_tree(&slid).values(), &[int(0), int(6), int(6)]);
        let again = slid.lca(0, 1);
        assert_eq!(slide_floor(&slid, again, &d, &int(2)).unwrap(), int(0));
        assert!(matches!(
            slide_all_the_way_down(&slid, again, &d, &int(2)),
            Err(Error::Immobile { .. })
        ));

        // q = 0: nothing moves.
        let d = map(3, &[3, 5, 5]);
        let t = tree_from_ultrametric(&Ultrametric::new(d.clone()).unwrap()).unwrap();
        for v in t.internal_nodes() {
            assert!(!is_mobile(&t, v, &d, &int(0)).unwrap());
        }
    }

    #[test]
    fn case2_resolution_merging_back() {
        // d_12 = d_13 < d_23: δ* is a star.
        let d = map(3, &[4, 4, 10]);
        let q = int(3);
        let t = star(3, 7);
        for r in resolutions(&t) {
            let low = r.internal_nodes().find(|&v| v != r.root()).unwrap();
            let mobile = is_mobile(&r, low, &d, &q).unwrap();
            assert_eq!(mobile, r.cluster(low) != vec![1, 2], "{}", to_newick(&r));
        }
        let s = CandidateState::new(Ultrametric::from_int_pairs(3, &[7, 7, 7]).unwrap(), &d, &q).unwrap();
        assert_eq!(s.mobile_all_resolutions, 2);
        assert_eq!(s.mobile_per_resolution, 1);
    }

    #[test]
    fn n3_candidates() {
        let c = bernstein_candidates(&map(3, &[2, 4, 8]), Quantifier::AllResolutions).unwrap();
        assert_eq!(c.all.len(), 2);
        assert_eq!(c.bernstein.len(), 2);
        assert_eq!(values(&c.all[0]), vec![0, 6, 6]);
        assert_eq!(values(&c.all[1]), vec![4, 6, 6]);
        assert!(c.all[0].nonpositive);
        assert_eq!(c.all[1].mobile_all_resolutions, 1);
        assert_eq!(c.all[0].mobile_all_resolutions, 0);
        assert_eq!(c.all[0].provenance.len(), 1);
        assert_eq!(c.all[0].provenance[0].cluster, vec![0, 1]);
    }

    #[test]
    fn n4_candidate_counts() {
        let d = map(4, &[6, 6, 5, 14, 12, 9]);
        let c = bernstein_candidates(&d, Quantifier::AllResolutions).unwrap();
        assert_eq!(c.all.len(), 16);
        assert_eq!(c.bernstein.len(), 10);
        assert_eq!(c.count_all_resolutions, 10);
        let p = bernstein_candidates(&d, Quantifier::PerResolution).unwrap();
        assert_eq!(p.bernstein.len(), p.count_per_resolution);
    }

    /// Brute-force mobility over the full product of resolutions.
    fn brute_counts(tree: &WeightedRootedTree, d: &DissimilarityMap, q: &Rational) -> (usize, usize) {
        let mut clusters = BTreeSet::new();
        let mut best = 0;
        for r in resolutions(tree) {
            let mut cnt = 0;
            for v in r.internal_nodes() {
                if is_mobile(&r, v, d, q).unwrap() {
                    cnt += 1;
                    clusters.insert(r.cluster(v));
                }
            }
            best = best.max(cnt);
        }
        (clusters.len(), best)
    }

    #[test]
    fn local_analysis_matches_full_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(3..=5);
            let vals: Vec<i64> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(1..8)).collect();
            let d = map(n, &vals);
            let c = bernstein_candidates(&d, Quantifier::AllResolutions).unwrap();
            for s in &c.all {
                let (distinct, per) = brute_counts(&s.tree, &d, &c.q);
                assert_eq!(s.mobile_all_resolutions, distinct);
                assert_eq!(s.mobile_per_resolution, per);
            }
        }
    }

    #[test]
    fn slide_on_resolution_matches_move() {
        let d = map(4, &[6, 6, 5, 14, 12, 9]);
        let c = bernstein_candidates(&d, Quantifier::AllResolutions).unwrap();
        for s in &c.all {
            let mut via_moves: BTreeSet<Vec<Rational>> = BTreeSet::new();
            for m in &s.mobile {
                via_moves.insert(s.apply(m).values().to_vec());
            }
            let mut via_trees = BTreeSet::new();
            for r in resolutions(&s.tree) {
                for v in r.internal_nodes() {
                    if is_mobile(&r, v, &d, &c.q).unwrap() {
                        let t = slide_all_the_way_down(&r, v, &d, &c.q).unwrap();
                        // Immobile in the resolution it was slid in; after a merge the
                        // canonical node can move again.
                        let mut at_floor = r.clone();
                        at_floor.set_weight(v, slide_floor(&r, v, &d, &c.q).unwrap());
                        assert!(!is_mobile(&at_floor, v, &d, &c.q).unwrap());
                        via_trees.insert(ultrametric_from_tree(&t).values().to_vec());
                    }
                }
            }
            assert_eq!(via_moves, via_trees);
        }
    }

    #[test]
    fn closure_invariants() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for trial in 0..25 {
            let n = rng.gen_range(3..=5);
            let vals: Vec<i64> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(1..12)).collect();
            let d = map(n, &vals);
            let c = bernstein_candidates(&d, Quantifier::AllResolutions).unwrap();
            let nr = nearest_ultrametric(&d).unwrap();
            assert!(c.all.iter().any(|s| s.ultrametric == nr.delta_star));
            let mut grid: BTreeSet<Rational> = nr.delta_star.values().iter().cloned().collect();
            for v in d.values() {
                grid.insert(v + &c.q);
                grid.insert(v - &c.q);
            }
            for s in &c.all {
                assert_eq!(linf_distance(s.ultrametric.map(), &d).unwrap(), c.q);
                assert!(s.ultrametric.values().iter().all(|x| grid.contains(x)));
            }
            let shuffled = closure(&d, Quantifier::AllResolutions, Some(trial)).unwrap();
            let a: Vec<_> = c.all.iter().map(|s| &s.ultrametric).collect();
            let b: Vec<_> = shuffled.all.iter().map(|s| &s.ultrametric).collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn matching_sizes() {
        assert_eq!(max_matching(3, &[(0, 1), (0, 2)]), 1);
        assert_eq!(max_matching(4, &[(0, 1), (2, 3), (1, 2)]), 2);
        assert_eq!(max_matching(5, &[]), 0);
    }

    #[test]
    fn quantifier_parsing() {
        assert_eq!("per-resolution".parse(), Ok(Quantifier::PerResolution));
        assert_eq!(Quantifier::default().to_string(), "all-resolutions");
        assert!("any".parse::<Quantifier>().is_err());
    }
}
