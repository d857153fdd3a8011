//! Extreme rays as the certified-extreme members of the candidate set,
//! checked against the residuation oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cone::{build_exterior, check_membership, homogenize, normalize, TropicalSystem};
use crate::datasets::Published;
use crate::error::{Error, Result};
use crate::hypergraph::{is_extreme, ExtremalityCertificate};
use crate::metric::{is_ultrametric, linf_distance, DissimilarityMap, Ultrametric};
use crate::nearest::{nearest_ultrametric, NearestResult};
use crate::rational::{self, Rational};
use crate::sliding::{bernstein_candidates, CandidateSet, CandidateState, Quantifier};
use crate::trop::{span_membership, trop_combine, TropScalar, TropVector};

/// A candidate with its extremality verdict.
#[derive(Clone, Debug, Serialize)]
pub struct RayReport {
    #[serde(flatten)]
    pub state: CandidateState,
    /// Normalized homogenized vector `(0, δ_12, …)`.
    pub vector: TropVector,
    pub extreme: bool,
    /// SCCs as coordinate labels.
    pub components: Vec<Vec<String>>,
    pub greatest: Option<Vec<String>>,
    /// Published number of this ray, when known.
    pub published: Option<usize>,
    #[serde(skip)]
    pub certificate: ExtremalityCertificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremeReport {
    pub n: usize,
    #[serde(serialize_with = "rational::serde_rat::serialize")]
    pub q: Rational,
    pub delta_star: Ultrametric,
    pub cone_rows: usize,
    pub cone_cols: usize,
    pub quantifier: Quantifier,
    /// Size of the sliding closure.
    pub closure_size: usize,
    pub candidate_count: usize,
    /// Filter sizes under each quantifier.
    pub count_all_resolutions: usize,
    pub count_per_resolution: usize,
    pub extremes: Vec<RayReport>,
    pub satisfying_nonextremes: Vec<RayReport>,
    /// Extremes in the closure that the filter rejected (expected empty).
    pub extremes_outside_candidates: Vec<Ultrametric>,
    /// Some tangent hypergraph had a multi-node tail.
    pub multi_tail: bool,
    pub oracle: Option<OracleSummary>,
    #[serde(skip)]
    pub system: TropicalSystem,
    #[serde(skip)]
    pub nearest: NearestResult,
    #[serde(skip)]
    pub candidates: CandidateSet,
}

impl ExtremeReport {
    pub fn extreme_vectors(&self) -> Vec<TropVector> {
        self.extremes.iter().map(|r| r.vector.clone()).collect()
    }

    /// Candidates in report order: extremes first, then non-extremes.
    pub fn rays(&self) -> impl Iterator<Item = &RayReport> {
        self.extremes.iter().chain(&self.satisfying_nonextremes)
    }
}

fn labelled(sys: &TropicalSystem, nodes: &[usize]) -> Vec<String> {
    nodes.iter().map(|&c| sys.indexer.label(c)).collect()
}

fn certify(sys: &TropicalSystem, state: &CandidateState) -> Result<RayReport> {
    let vector = homogenize(&state.ultrametric);
    let certificate = is_extreme(sys, &vector)?;
    Ok(RayReport {
        state: state.clone(),
        extreme: certificate.extreme,
        components: certificate
            .scc
            .components
            .iter()
            .map(|c| labelled(sys, c))
            .collect(),
        greatest: certificate.scc.greatest_component().map(|c| labelled(sys, c)),
        vector,
        published: None,
        certificate,
    })
}

/// Runs the full pipeline on `d`.
pub fn enumerate_extremes(d: &DissimilarityMap, quantifier: Quantifier) -> Result<ExtremeReport> {
    if d.n() < 3 {
        return Err(Error::TooFewItems {
            needed: 3,
            found: d.n(),
        });
    }
    let nearest = nearest_ultrametric(d)?;
    let system = build_exterior(d, &nearest.q)?;
    let candidates = bernstein_candidates(d, quantifier)?;

    let mut extremes = Vec::new();
    let mut satisfying_nonextremes = Vec::new();
    let mut extremes_outside_candidates = Vec::new();
    let mut multi_tail = false;
    for (i, state) in candidates.all.iter().enumerate() {
        let ray = certify(&system, state)?;
        multi_tail |= ray.certificate.multi_tail;
        let selected = candidates.bernstein.binary_search(&i).is_ok();
        match (selected, ray.extreme) {
            (true, true) => extremes.push(ray),
            (true, false) => satisfying_nonextremes.push(ray),
            (false, true) => extremes_outside_candidates.push(state.ultrametric.clone()),
            (false, false) => {}
        }
    }
    if !extremes_outside_candidates.is_empty() {
        log::warn!(
            "{} extreme rays were rejected by the mobility filter",
            extremes_outside_candidates.len()
        );
    }
    Ok(ExtremeReport {
        n: d.n(),
        q: nearest.q.clone(),
        delta_star: nearest.delta_star.clone(),
        cone_rows: system.rows(),
        cone_cols: system.cols(),
        quantifier,
        closure_size: candidates.all.len(),
        candidate_count: candidates.bernstein.len(),
        count_all_resolutions: candidates.count_all_resolutions,
        count_per_resolution: candidates.count_per_resolution,
        extremes,
        satisfying_nonextremes,
        extremes_outside_candidates,
        multi_tail,
        oracle: None,
        system,
        nearest,
        candidates,
    })
}

/// Tags each extreme with its published number; returns how many
/// published rays were matched.
pub fn annotate_published(report: &mut ExtremeReport, published: &Published) -> usize {
    let mut matched = 0;
    for ray in &mut report.extremes {
        let pos = published
            .rays
            .iter()
            .position(|p| p == ray.state.ultrametric.map());
        ray.published = pos.map(|k| published.ray_numbers[k]);
        matched += usize::from(pos.is_some());
    }
    matched
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCheck {
    /// Position in `extremes` followed by `satisfying_nonextremes`.
    pub index: usize,
    pub extreme: bool,
    /// In the span of the other candidates.
    pub in_span_of_others: bool,
    pub agrees: bool,
    /// For non-extremes: residuated coefficients over the extremes.
    pub witness: Option<Vec<TropScalar>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleSummary {
    pub checks: Vec<OracleCheck>,
    pub disagreements: usize,
}

/// For each vector: extreme ⇔ not in the span of the others.
pub fn oracle_agreement(vectors: &[TropVector], extreme: &[bool]) -> Result<Vec<(bool, bool)>> {
    let mut out = Vec::with_capacity(vectors.len());
    for (i, v) in vectors.iter().enumerate() {
        let others: Vec<TropVector> = vectors
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, w)| w.clone())
            .collect();
        let in_span = if others.is_empty() {
            false
        } else {
            span_membership(v, &others)?.member
        };
        out.push((in_span, extreme[i] != in_span));
    }
    Ok(out)
}

/// Checks every reported candidate against the residuation oracle and
/// stores the summary on the report.
pub fn cross_validate(report: &mut ExtremeReport) -> Result<OracleSummary> {
    let rays: Vec<&RayReport> = report.rays().collect();
    let vectors: Vec<TropVector> = rays.iter().map(|r| r.vector.clone()).collect();
    let flags: Vec<bool> = rays.iter().map(|r| r.extreme).collect();
    let extremes = report.extreme_vectors();
    let agreement = oracle_agreement(&vectors, &flags)?;
    let mut checks = Vec::with_capacity(rays.len());
    for (index, (ray, (in_span, agrees))) in rays.iter().zip(agreement).enumerate() {
        let witness = if ray.extreme || extremes.is_empty() {
            None
        } else {
            Some(span_membership(&ray.vector, &extremes)?.witness)
        };
        checks.push(OracleCheck {
            index,
            extreme: ray.extreme,
            in_span_of_others: in_span,
            agrees,
            witness,
        });
    }
    let disagreements = checks.iter().filter(|c| !c.agrees).count();
    if disagreements > 0 {
        log::error!("{disagreements} certificate/oracle disagreements");
    }
    let summary = OracleSummary {
        checks,
        disagreements,
    };
    report.oracle = Some(summary.clone());
    Ok(summary)
}

/// Normalized tropical combination of the report's extremes.
pub fn combine_extremes(report: &ExtremeReport, coeffs: &[TropScalar]) -> Result<DissimilarityMap> {
    let v = trop_combine(&report.extreme_vectors(), coeffs)?;
    crate::cone::dehomogenize(&v, &report.system.indexer)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeResult {
    pub trials: usize,
    pub seed: u64,
    pub passed: bool,
    /// First failing combination, normalized.
    pub failure: Option<DissimilarityMap>,
}

/// Random combinations of the extremes must land in the polytope: an
/// ultrametric within `q` of `d`, and a member of the cone.
pub fn polytope_probe(
    d: &DissimilarityMap,
    report: &ExtremeReport,
    trials: usize,
    seed: u64,
) -> Result<ProbeResult> {
    if report.extremes.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = report.extremes.len();
    for _ in 0..trials {
        let coeffs: Vec<TropScalar> = (0..k)
            .map(|_| {
                if rng.gen_bool(0.2) {
                    TropScalar::Bottom
                } else {
                    TropScalar::Finite(rational::frac(rng.gen_range(-60..=60), rng.gen_range(1..=4)))
                }
            })
            .collect();
        let coeffs = if coeffs.iter().all(TropScalar::is_bottom) {
            vec![TropScalar::zero(); k]
        } else {
            coeffs
        };
        let v = trop_combine(&report.extreme_vectors(), &coeffs)?;
        let map = crate::cone::dehomogenize(&v, &report.system.indexer)?;
        let ok = is_ultrametric(&map)
            && linf_distance(&map, d)? <= report.q
            && check_membership(&v, &report.system)?.member
            && normalize(&v, &report.system.indexer).is_ok();
        if !ok {
            return Ok(ProbeResult {
                trials,
                seed,
                passed: false,
                failure: Some(map),
            });
        }
    }
    Ok(ProbeResult {
        trials,
        seed,
        passed: true,
        failure: None,
    })
}
