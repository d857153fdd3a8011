//! Growing an instance by one far-away item while keeping the extremality
//! status of a chosen nearest ultrametric.

use num_traits::Signed;
use serde::Serialize;

use crate::datasets::paper_n4;
use crate::enumerate::enumerate_extremes;
use crate::error::{Error, Result};
use crate::metric::{linf_distance, pair_count, pair_position, pairs, DissimilarityMap, Ultrametric};
use crate::nearest::nearest_ultrametric;
use crate::rational::{self, Rational};
use crate::sliding::{bernstein_candidates, Quantifier};
use crate::cone::{build_exterior, homogenize};
use crate::hypergraph::is_extreme;

/// Largest entry of `δ`, the weight of its root.
pub fn root_weight(delta: &Ultrametric) -> Rational {
    delta
        .map()
        .max_entry()
        .cloned()
        .expect("ultrametrics on two or more items have entries")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionResult {
    pub d_ext: DissimilarityMap,
    pub delta_ext: Ultrametric,
    #[serde(serialize_with = "rational::serde_rat::serialize")]
    pub epsilon: Rational,
    #[serde(serialize_with = "rational::serde_rat::serialize")]
    pub r: Rational,
    #[serde(serialize_with = "rational::serde_rat::serialize")]
    pub q: Rational,
    /// Nearest ultrametric of `d_ext`.
    pub delta_star_ext: Ultrametric,
}

/// Appends a copy of `v` on `n` items with every new pair set to `value`.
fn append_item(m: &DissimilarityMap, value: &Rational) -> DissimilarityMap {
    let n = m.n();
    let mut values = vec![Rational::default(); pair_count(n + 1)];
    for (i, j) in pairs(n) {
        values[pair_position(n + 1, i, j)] = m.get(i, j);
    }
    for i in 0..n {
        values[pair_position(n + 1, i, n)] = value.clone();
    }
    DissimilarityMap::from_pairs(n + 1, values).expect("pair count matches")
}

/// New item at distance `r + q + ε` from every old item in `d`, and at
/// `r + ε` in `δ`.
pub fn extend_instance(d: &DissimilarityMap, delta: &Ultrametric, epsilon: &Rational) -> Result<ExtensionResult> {
    if !epsilon.is_positive() {
        return Err(Error::NonPositiveEpsilon(rational::fmt(epsilon)));
    }
    if d.n() != delta.n() {
        return Err(Error::DimensionMismatch {
            expected: d.n(),
            found: delta.n(),
        });
    }
    let q = nearest_ultrametric(d)?.q;
    let dist = linf_distance(delta.map(), d)?;
    if dist != q {
        return Err(Error::NotNearest {
            found: rational::fmt(&dist),
            q: rational::fmt(&q),
        });
    }
    let r = root_weight(delta);
    let d_ext = append_item(d, &(&r + &q + epsilon));
    let delta_ext = Ultrametric::new(append_item(delta.map(), &(&r + epsilon)))?;
    let nearest = nearest_ultrametric(&d_ext)?;
    debug_assert_eq!(nearest.q, q);
    Ok(ExtensionResult {
        d_ext,
        delta_ext,
        epsilon: epsilon.clone(),
        r,
        q: nearest.q,
        delta_star_ext: nearest.delta_star,
    })
}

/// How a witness fares on an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub in_closure: bool,
    pub in_candidates: bool,
    pub extreme: bool,
    pub mobile_count: Option<usize>,
}

impl WitnessCheck {
    /// Passes the filter without being extreme.
    pub fn is_counterexample(&self) -> bool {
        self.in_candidates && !self.extreme
    }
}

pub fn check_witness(d: &DissimilarityMap, witness: &Ultrametric, quantifier: Quantifier) -> Result<WitnessCheck> {
    let set = bernstein_candidates(d, quantifier)?;
    let pos = set.all.iter().position(|s| &s.ultrametric == witness);
    let sys = build_exterior(d, &set.q)?;
    let extreme = is_extreme(&sys, &homogenize(witness))?.extreme;
    Ok(WitnessCheck {
        in_closure: pos.is_some(),
        in_candidates: pos.is_some_and(|p| set.bernstein.binary_search(&p).is_ok()),
        extreme,
        mobile_count: pos.map(|p| set.all[p].mobile_count(quantifier)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub d: DissimilarityMap,
    pub witness: Ultrametric,
    #[serde(serialize_with = "rational::serde_rat::serialize")]
    pub q: Rational,
    pub delta_star: Ultrametric,
    /// One entry per extension applied after the four-item seed.
    pub steps: Vec<ExtensionResult>,
}

/// The four-item seed and its lexicographically smallest non-extreme
/// candidate.
pub fn seed_counterexample(quantifier: Quantifier) -> Result<(DissimilarityMap, Ultrametric)> {
    let d = paper_n4();
    let report = enumerate_extremes(&d, quantifier)?;
    let witness = report
        .satisfying_nonextremes
        .iter()
        .map(|r| r.state.ultrametric.clone())
        .min_by(|a, b| a.values().cmp(b.values()))
        .ok_or_else(|| Error::NoWitness("the four-item seed has no non-extreme candidate".into()))?;
    Ok((d, witness))
}

/// Extends the four-item seed until it has `n_target` items.
pub fn build_counterexample(n_target: usize, epsilon: &Rational, quantifier: Quantifier) -> Result<Counterexample> {
    if n_target < 4 {
        return Err(Error::TooFewItems {
            needed: 4,
            found: n_target,
        });
    }
    if !epsilon.is_positive() {
        return Err(Error::NonPositiveEpsilon(rational::fmt(epsilon)));
    }
    let (mut d, mut witness) = seed_counterexample(quantifier)?;
    let mut steps = Vec::new();
    while d.n() < n_target {
        let step = extend_instance(&d, &witness, epsilon)?;
        d = step.d_ext.clone();
        witness = step.delta_ext.clone();
        steps.push(step);
    }
    let nearest = nearest_ultrametric(&d)?;
    Ok(Counterexample {
        d,
        witness,
        q: nearest.q,
        delta_star: nearest.delta_star,
        steps,
    })
}
