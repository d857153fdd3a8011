//! Exact max-plus arithmetic.
//!
//! `⊕` is `max`, `⊙` is `+`, and [`TropScalar::Bottom`] plays the role of
//! −∞: it is the identity of `⊕` and absorbing for `⊙`. Everything here is
//! over exact rationals.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// An element of ℝ ∪ {−∞}.
///
/// Variant order makes the derived `Ord` the natural one: `Bottom` sits
/// below every finite value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TropScalar {
    Bottom,
    Finite(Rational),
}

impl TropScalar {
    pub fn zero() -> Self {
        TropScalar::Finite(rational::zero())
    }

    pub fn int(v: i64) -> Self {
        TropScalar::Finite(rational::int(v))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, TropScalar::Bottom)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            TropScalar::Finite(r) => Some(r),
            TropScalar::Bottom => None,
        }
    }

    /// `self ⊕ other`
    pub fn oplus(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// `self ⊙ other`
    pub fn otimes(&self, other: &Self) -> Self {
        match (self, other) {
            (TropScalar::Finite(a), TropScalar::Finite(b)) => TropScalar::Finite(a + b),
            _ => TropScalar::Bottom,
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("-inf") {
            Some(TropScalar::Bottom)
        } else {
            rational::parse(t).map(TropScalar::Finite)
        }
    }
}

impl From<Rational> for TropScalar {
    fn from(r: Rational) -> Self {
        TropScalar::Finite(r)
    }
}

impl fmt::Display for TropScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropScalar::Bottom => f.write_str("-inf"),
            TropScalar::Finite(r) => f.write_str(&rational::fmt(r)),
        }
    }
}

impl Serialize for TropScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct TropVector(Vec<TropScalar>);

impl TropVector {
    /// Panics on an empty entry list; vectors always have dimension ≥ 1.
    pub fn new(entries: Vec<TropScalar>) -> Self {
        assert!(!entries.is_empty(), "tropical vectors have dimension >= 1");
        TropVector(entries)
    }

    pub fn from_rationals(values: impl IntoIterator<Item = Rational>) -> Self {
        Self::new(values.into_iter().map(TropScalar::Finite).collect())
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self::from_rationals(values.iter().map(|&v| rational::int(v)))
    }

    pub fn bottom(dim: usize) -> Self {
        Self::new(vec![TropScalar::Bottom; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[TropScalar] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &TropScalar {
        &self.0[i]
    }

    pub fn is_all_bottom(&self) -> bool {
        self.0.iter().all(TropScalar::is_bottom)
    }

    /// `λ ⊙ self`
    pub fn scale(&self, lambda: &TropScalar) -> Self {
        TropVector(self.0.iter().map(|x| x.otimes(lambda)).collect())
    }

    /// Entrywise `self ⊕ other`.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(TropVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a.oplus(b)).collect(),
        ))
    }

    /// Entrywise `≤`.
    pub fn le(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for TropVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Row-major max-plus matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<TropScalar>,
}

impl TropMatrix {
    pub fn bottom(rows: usize, cols: usize) -> Self {
        TropMatrix {
            rows,
            cols,
            entries: vec![TropScalar::Bottom; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<TropScalar>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in &rows {
            check_dim(cols, row.len())?;
            entries.extend(row.iter().cloned());
        }
        Ok(TropMatrix {
            rows: rows.len(),
            cols,
            entries,
        })
    }

    /// The tropical identity: 0 on the diagonal, bottom elsewhere.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::bottom(dim, dim);
        for i in 0..dim {
            m.set(i, i, TropScalar::zero());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &TropScalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: TropScalar) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[TropScalar] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[TropScalar]> {
        self.entries.chunks(self.cols.max(1)).take(self.rows)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Tropical inner product of two equal-length slices, with its argmax set.
pub(crate) fn dot_slices(x: &[TropScalar], y: &[TropScalar]) -> (TropScalar, Vec<usize>) {
    let mut best = TropScalar::Bottom;
    let mut argmax = Vec::new();
    for (i, (a, b)) in x.iter().zip(y).enumerate() {
        let s = a.otimes(b);
        if s.is_bottom() {
            continue;
        }
        match s.cmp(&best) {
            Ordering::Greater => {
                best = s;
                argmax.clear();
                argmax.push(i);
            }
            Ordering::Equal => argmax.push(i),
            Ordering::Less => {}
        }
    }
    (best, argmax)
}

/// `max_i (x_i + y_i)` and every index attaining it (0-based). The argmax is
/// empty exactly when the value is bottom.
pub fn trop_dot(x: &TropVector, y: &TropVector) -> Result<(TropScalar, Vec<usize>)> {
    check_dim(x.dim(), y.dim())?;
    Ok(dot_slices(x.entries(), y.entries()))
}

pub fn trop_mat_vec(a: &TropMatrix, x: &TropVector) -> Result<TropVector> {
    check_dim(a.cols(), x.dim())?;
    Ok(TropVector::new(
        a.row_iter().map(|row| dot_slices(row, x.entries()).0).collect(),
    ))
}

/// `⊕_i coeffs_i ⊙ generators_i`
pub fn trop_combine(generators: &[TropVector], coeffs: &[TropScalar]) -> Result<TropVector> {
    let first = generators.first().ok_or(Error::EmptyGenerators)?;
    check_dim(generators.len(), coeffs.len())?;
    let mut acc = TropVector::bottom(first.dim());
    for (g, c) in generators.iter().zip(coeffs) {
        check_dim(first.dim(), g.dim())?;
        acc = acc.oplus(&g.scale(c))?;
    }
    Ok(acc)
}

/// Result of the residuation test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanMembership {
    pub member: bool,
    /// Greatest coefficients whose combination stays below `v`.
    pub witness: Vec<TropScalar>,
}

/// Decides whether `v` lies in the max-plus span of `generators`.
///
/// The witness is the residuated coefficient vector
/// `λ_i = min_j (v_j − u_ij)` over the finite entries of `u_i`; it is the
/// largest `λ` with `⊕ λ_i ⊙ u_i ≤ v`, so `v` is in the span exactly when
/// this particular combination reproduces it.
pub fn span_membership(v: &TropVector, generators: &[TropVector]) -> Result<SpanMembership> {
    if generators.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    if v.is_all_bottom() {
        return Err(Error::AllBottom);
    }
    let mut witness = Vec::with_capacity(generators.len());
    for g in generators {
        check_dim(v.dim(), g.dim())?;
        let mut lambda: Option<TropScalar> = None;
        for (vj, uj) in v.entries().iter().zip(g.entries()) {
            let TropScalar::Finite(u) = uj else { continue };
            let bound = match vj {
                TropScalar::Finite(x) => TropScalar::Finite(x - u),
                TropScalar::Bottom => TropScalar::Bottom,
            };
            lambda = Some(match lambda {
                Some(cur) if cur <= bound => cur,
                _ => bound,
            });
        }
        // An all-bottom generator contributes nothing whatever its coefficient.
        witness.push(lambda.unwrap_or(TropScalar::Bottom));
    }
    let combo = trop_combine(generators, &witness)?;
    Ok(SpanMembership {
        member: &combo == v,
        witness,
    })
}
