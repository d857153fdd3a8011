//! The homogenized exterior description `A δ̃ ≤ B δ̃` of the polytope of
//! ℓ∞-nearest ultrametrics.
//!
//! Coordinates: column 0 is the homogenizing variable ξ, column `1 + p` is
//! the pair at lexicographic position `p`.

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{pair_count, pair_position, pairs, DissimilarityMap, Ultrametric};
use crate::rational::{self, Rational};
use crate::trop::{dot_slices, TropMatrix, TropScalar, TropVector};

/// Maps unordered pairs to cone columns; column 0 is ξ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairIndexer {
    n: usize,
}

impl PairIndexer {
    pub fn new(n: usize) -> Self {
        PairIndexer { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair_count(&self) -> usize {
        pair_count(self.n)
    }

    /// Number of cone coordinates, ξ included.
    pub fn dim(&self) -> usize {
        self.pair_count() + 1
    }

    /// Column of pair `{i, j}` (0-based items).
    pub fn column(&self, i: usize, j: usize) -> usize {
        1 + pair_position(self.n, i, j)
    }

    /// Pair at column `c >= 1`.
    pub fn pair(&self, c: usize) -> (usize, usize) {
        pairs(self.n).nth(c - 1).expect("column in range")
    }

    /// `xi` for column 0, `d_ij` (1-based) otherwise; items above 9 are
    /// separated by an underscore.
    pub fn label(&self, c: usize) -> String {
        if c == 0 {
            return "xi".to_string();
        }
        let (i, j) = self.pair(c);
        if self.n < 10 {
            format!("d_{}{}", i + 1, j + 1)
        } else {
            format!("d_{}_{}", i + 1, j + 1)
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.dim()).map(|c| self.label(c)).collect()
    }
}

/// Which family an inequality row belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    /// `δ̃_target ≤ max(other two)` for a triple.
    Ultrametric { target: (usize, usize) },
    /// `ξ + d_p ≤ δ̃_p + q`
    Upper { pair: (usize, usize) },
    /// `δ̃_p − q ≤ ξ + d_p`
    Lower { pair: (usize, usize) },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalSystem {
    pub a: TropMatrix,
    pub b: TropMatrix,
    pub indexer: PairIndexer,
    pub q: Rational,
    pub d: DissimilarityMap,
}

impl TropicalSystem {
    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn triple_rows(&self) -> usize {
        let n = self.indexer.n();
        if n < 3 {
            0
        } else {
            n * (n - 1) * (n - 2) / 2
        }
    }

    pub fn row_kind(&self, r: usize) -> RowKind {
        let t = self.triple_rows();
        let p = self.indexer.pair_count();
        if r < t {
            let target = (0..self.a.cols())
                .find(|&c| !self.a.get(r, c).is_bottom())
                .expect("triple rows have one finite A entry");
            RowKind::Ultrametric {
                target: self.indexer.pair(target),
            }
        } else if r < t + p {
            RowKind::Upper {
                pair: self.indexer.pair(r - t + 1),
            }
        } else {
            RowKind::Lower {
                pair: self.indexer.pair(r - t - p + 1),
            }
        }
    }

    /// Human-readable form of row `r`, items 1-based.
    pub fn describe_row(&self, r: usize) -> String {
        let q = rational::fmt(&self.q);
        let lbl = |(i, j): (usize, usize)| self.indexer.label(self.indexer.column(i, j));
        match self.row_kind(r) {
            RowKind::Ultrametric { target } => {
                let others: Vec<String> = (1..self.cols())
                    .filter(|&c| !self.b.get(r, c).is_bottom())
                    .map(|c| self.indexer.label(c))
                    .collect();
                format!("{} <= max({})", lbl(target), others.join(", "))
            }
            RowKind::Upper { pair } => format!(
                "xi + {} <= {} + {}",
                rational::fmt(self.d.get_ref(pair.0, pair.1)),
                lbl(pair),
                q
            ),
            RowKind::Lower { pair } => format!(
                "{} - {} <= xi + {}",
                lbl(pair),
                q,
                rational::fmt(self.d.get_ref(pair.0, pair.1))
            ),
        }
    }
}

/// Builds the exterior description for data `d` and radius `q`.
///
/// Rows: for every triple `i < j < k` three rows with targets `(i,j)`,
/// `(i,k)`, `(j,k)` in that order; then the upper-bound rows per pair; then
/// the lower-bound rows per pair.
pub fn build_exterior(d: &DissimilarityMap, q: &Rational) -> Result<TropicalSystem> {
    let n = d.n();
    if n < 2 {
        return Err(Error::TooFewItems { needed: 2, found: n });
    }
    if q.is_negative() {
        return Err(Error::NegativeQ(rational::fmt(q)));
    }
    if n < 3 {
        log::warn!("n = {n}: no triples, emitting only the distance blocks");
    }
    let ix = PairIndexer::new(n);
    let np = ix.pair_count();
    let triples = if n >= 3 { n * (n - 1) * (n - 2) / 2 } else { 0 };
    let rows = triples + 2 * np;
    let mut a = TropMatrix::bottom(rows, ix.dim());
    let mut b = TropMatrix::bottom(rows, ix.dim());
    let zero = TropScalar::zero();

    let mut r = 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let cols = [ix.column(i, j), ix.column(i, k), ix.column(j, k)];
                for t in 0..3 {
                    a.set(r, cols[t], zero.clone());
                    for (s, &c) in cols.iter().enumerate() {
                        if s != t {
                            b.set(r, c, zero.clone());
                        }
                    }
                    r += 1;
                }
            }
        }
    }
    let qv = TropScalar::Finite(q.clone());
    let minus_q = TropScalar::Finite(-q.clone());
    for (p, (i, j)) in pairs(n).enumerate() {
        let dp = TropScalar::Finite(d.get(i, j));
        a.set(triples + p, 0, dp.clone());
        b.set(triples + p, 1 + p, qv.clone());
        a.set(triples + np + p, 1 + p, minus_q.clone());
        b.set(triples + np + p, 0, dp);
    }
    Ok(TropicalSystem {
        a,
        b,
        indexer: ix,
        q: q.clone(),
        d: d.clone(),
    })
}

/// `(0, δ_12, δ_13, …)`
pub fn homogenize(delta: &Ultrametric) -> TropVector {
    homogenize_map(delta.map())
}

pub fn homogenize_map(d: &DissimilarityMap) -> TropVector {
    let mut v = Vec::with_capacity(d.values().len() + 1);
    v.push(TropScalar::zero());
    v.extend(d.values().iter().cloned().map(TropScalar::Finite));
    TropVector::new(v)
}

/// Shifts `v` so that ξ = 0 and reads the pair coordinates back as a map,
/// without checking the ultrametric condition.
pub fn dehomogenize(v: &TropVector, indexer: &PairIndexer) -> Result<DissimilarityMap> {
    if v.dim() != indexer.dim() {
        return Err(Error::DimensionMismatch {
            expected: indexer.dim(),
            found: v.dim(),
        });
    }
    let xi = v.get(0).finite().ok_or(Error::BottomHomogenizer)?;
    let mut values = Vec::with_capacity(indexer.pair_count());
    for c in 1..v.dim() {
        let x = v.get(c).finite().ok_or(Error::BottomCoordinate(c))?;
        values.push(x - xi);
    }
    DissimilarityMap::from_pairs(indexer.n(), values)
}

/// [`dehomogenize`] followed by the ultrametric check.
pub fn normalize(v: &TropVector, indexer: &PairIndexer) -> Result<Ultrametric> {
    Ultrametric::new(dehomogenize(v, indexer)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// First violated row, 0-based.
    pub violated_row: Option<usize>,
}

/// `A v ≤ B v` row by row.
pub fn check_membership(v: &TropVector, sys: &TropicalSystem) -> Result<Membership> {
    if v.dim() != sys.cols() {
        return Err(Error::DimensionMismatch {
            expected: sys.cols(),
            found: v.dim(),
        });
    }
    for r in 0..sys.rows() {
        let (lhs, _) = dot_slices(sys.a.row(r), v.entries());
        let (rhs, _) = dot_slices(sys.b.row(r), v.entries());
        if lhs > rhs {
            return Ok(Membership {
                member: false,
                violated_row: Some(r),
            });
        }
    }
    Ok(Membership {
        member: true,
        violated_row: None,
    })
}

/// Like [`check_membership`] but fails with [`Error::NotInCone`].
pub fn require_membership(v: &TropVector, sys: &TropicalSystem) -> Result<()> {
    match check_membership(v, sys)?.violated_row {
        Some(r) => Err(Error::NotInCone(r)),
        None => Ok(()),
    }
}

/// CSV with one line per inequality and matrix: `matrix,row,xi,d_12,…`.
pub fn system_to_csv(sys: &TropicalSystem) -> String {
    let mut out = format!("matrix,row,{}\n", sys.indexer.labels().join(","));
    for (name, m) in [("A", &sys.a), ("B", &sys.b)] {
        for (r, row) in m.row_iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("{name},{},{}\n", r + 1, cells.join(",")));
        }
    }
    out
}

#[derive(Serialize)]
struct SystemJson<'a> {
    n: usize,
    rows: usize,
    cols: usize,
    q: String,
    columns: Vec<String>,
    a: Vec<&'a [TropScalar]>,
    b: Vec<&'a [TropScalar]>,
}

pub fn system_to_json(sys: &TropicalSystem) -> serde_json::Value {
    serde_json::to_value(SystemJson {
        n: sys.indexer.n(),
        rows: sys.rows(),
        cols: sys.cols(),
        q: rational::fmt(&sys.q),
        columns: sys.indexer.labels(),
        a: sys.a.row_iter().collect(),
        b: sys.b.row_iter().collect(),
    })
    .expect("system serializes")
}
