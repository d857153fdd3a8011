//! Built-in reference instances and their published extreme rays.

use crate::error::{Error, Result};
use crate::metric::{pairs, validate_dissimilarity, DissimilarityMap};
use crate::rational;

pub const NAMES: [&str; 3] = ["paper-n3", "paper-n4", "paper-n8"];

const N3: [[i64; 3]; 3] = [[0, 2, 4], [2, 0, 8], [4, 8, 0]];

const N4: [[i64; 4]; 4] = [[0, 6, 6, 5], [6, 0, 14, 12], [6, 14, 0, 9], [5, 12, 9, 0]];

const N4_DELTA_STAR: [[i64; 4]; 4] = [
    [0, 10, 10, 9],
    [10, 0, 10, 10],
    [10, 10, 0, 10],
    [9, 10, 10, 0],
];

/// Extreme rays for `paper-n4`, one row per pair, one column per ray.
const N4_RAYS: [[i64; 8]; 6] = [
    [10, 10, 8, 2, 2, 10, 10, 9],
    [5, 2, 10, 10, 10, 9, 2, 10],
    [1, 5, 1, 8, 9, 9, 9, 9],
    [10, 10, 10, 10, 10, 10, 10, 10],
    [10, 10, 8, 8, 9, 10, 10, 8],
    [5, 5, 10, 10, 10, 5, 9, 10],
];

const N5: [[i64; 5]; 5] = [
    [0, 6, 6, 5, 15],
    [6, 0, 14, 12, 15],
    [6, 14, 0, 9, 15],
    [5, 12, 9, 0, 15],
    [15, 15, 15, 15, 0],
];

const N5_DELTA_STAR: [[i64; 5]; 5] = [
    [0, 10, 10, 9, 19],
    [10, 0, 10, 10, 19],
    [10, 10, 0, 10, 19],
    [9, 10, 10, 0, 19],
    [19, 19, 19, 19, 0],
];

/// Immunological distances between dog, bear, raccoon, weasel, seal,
/// sea lion, cat and monkey.
const N8: [[i64; 8]; 8] = [
    [0, 32, 48, 51, 50, 48, 98, 148],
    [32, 0, 26, 34, 29, 33, 84, 136],
    [48, 26, 0, 42, 44, 44, 92, 152],
    [51, 34, 42, 0, 44, 38, 86, 142],
    [50, 29, 44, 44, 0, 24, 89, 142],
    [48, 33, 44, 38, 24, 0, 90, 142],
    [98, 84, 92, 86, 89, 90, 0, 148],
    [148, 136, 152, 142, 142, 142, 148, 0],
];

const N8_LABELS: [&str; 8] = ["D", "B", "R", "W", "S", "SL", "C", "M"];

const N8_DELTA_STAR: [[i64; 8]; 8] = [
    [0, 41, 41, 43, 41, 41, 93, 145],
    [41, 0, 35, 43, 38, 38, 93, 145],
    [41, 35, 0, 43, 38, 38, 93, 145],
    [43, 43, 43, 0, 43, 43, 93, 145],
    [41, 38, 38, 43, 0, 33, 93, 145],
    [41, 38, 38, 43, 33, 0, 93, 145],
    [93, 93, 93, 93, 93, 93, 0, 145],
    [145, 145, 145, 145, 145, 145, 145, 0],
];

/// Extreme rays for `paper-n8`, one row per pair, one column per ray.
const N8_RAYS: [[i64; 16]; 28] = [
    [41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41],
    [41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41],
    [42, 42, 42, 43, 42, 42, 42, 43, 42, 42, 42, 43, 42, 42, 42, 42],
    [41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41],
    [41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41, 41],
    [89, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89],
    [143, 143, 143, 143, 143, 143, 145, 143, 143, 143, 145, 143, 143, 143, 143, 145],
    [35, 35, 17, 35, 35, 35, 35, 35, 35, 35, 35, 17, 17, 17, 17, 17],
    [42, 42, 42, 43, 42, 42, 42, 43, 42, 42, 42, 43, 42, 42, 42, 42],
    [24, 20, 35, 24, 24, 33, 24, 20, 20, 20, 20, 35, 35, 38, 35, 35],
    [24, 24, 35, 24, 24, 24, 24, 24, 24, 33, 24, 35, 35, 38, 35, 35],
    [89, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89],
    [143, 143, 143, 143, 143, 143, 145, 143, 143, 143, 145, 143, 143, 143, 143, 145],
    [42, 42, 42, 43, 42, 42, 42, 43, 42, 42, 42, 43, 42, 42, 42, 42],
    [35, 35, 35, 35, 35, 35, 35, 35, 35, 35, 35, 35, 35, 38, 35, 35],
    [35, 35, 35, 35, 35, 35, 35, 35, 35, 35, 35, 35, 35, 38, 35, 35],
    [89, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89],
    [143, 143, 143, 143, 143, 143, 145, 143, 143, 143, 145, 143, 143, 143, 143, 145],
    [42, 42, 42, 43, 42, 42, 42, 43, 42, 42, 42, 43, 42, 42, 42, 42],
    [42, 42, 42, 43, 42, 42, 42, 43, 42, 42, 42, 43, 42, 42, 42, 42],
    [89, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89],
    [143, 143, 143, 143, 143, 143, 145, 143, 143, 143, 145, 143, 143, 143, 143, 145],
    [15, 24, 15, 15, 15, 33, 15, 24, 24, 33, 24, 15, 15, 15, 33, 15],
    [89, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89],
    [143, 143, 143, 143, 143, 143, 145, 143, 143, 143, 145, 143, 143, 143, 143, 145],
    [89, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89, 93, 89, 89, 89],
    [143, 143, 143, 143, 143, 143, 145, 143, 143, 143, 145, 143, 143, 143, 143, 145],
    [143, 143, 143, 143, 143, 143, 145, 143, 143, 143, 145, 143, 143, 143, 143, 145],
];

/// Figure numbers of the `paper-n8` rays in the earlier catalogue, by column.
const N8_RAY_NUMBERS: [usize; 16] = [1, 3, 4, 5, 6, 7, 8, 11, 12, 13, 14, 15, 17, 18, 19, 20];

/// Catalogue numbers of the `paper-n8` trees that pass the filter without
/// being extreme.
pub const N8_NONEXTREME_NUMBERS: [usize; 4] = [2, 9, 10, 16];

fn square<const N: usize>(rows: &[[i64; N]; N]) -> DissimilarityMap {
    let rows: Vec<Vec<_>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| rational::int(v)).collect())
        .collect();
    validate_dissimilarity(&rows).expect("built-in data is valid")
}

fn columns<const C: usize>(n: usize, rows: &[[i64; C]]) -> Vec<DissimilarityMap> {
    (0..C)
        .map(|c| {
            let vals: Vec<i64> = rows.iter().map(|r| r[c]).collect();
            DissimilarityMap::from_int_pairs(n, &vals).expect("pair count")
        })
        .collect()
}

pub fn paper_n3() -> DissimilarityMap {
    square(&N3)
}

pub fn paper_n4() -> DissimilarityMap {
    square(&N4)
}

pub fn paper_n5() -> DissimilarityMap {
    square(&N5)
}

pub fn paper_n8() -> DissimilarityMap {
    square(&N8)
        .with_labels(N8_LABELS.iter().map(|s| s.to_string()).collect())
        .expect("eight labels")
}

/// Looks up a built-in dataset by name.
pub fn dataset(name: &str) -> Result<DissimilarityMap> {
    match name {
        "paper-n3" => Ok(paper_n3()),
        "paper-n4" => Ok(paper_n4()),
        "paper-n8" => Ok(paper_n8()),
        other => Err(Error::UnknownDataset(other.to_string())),
    }
}

/// Reference values printed alongside a dataset.
#[derive(Clone, Debug)]
pub struct Published {
    pub q: i64,
    pub delta_star: DissimilarityMap,
    /// Extreme rays in published column order.
    pub rays: Vec<DissimilarityMap>,
    /// Published number of each ray (1-based column order unless the
    /// dataset carries its own catalogue numbering).
    pub ray_numbers: Vec<usize>,
    /// Number of non-extreme trees reported as passing the filter.
    pub satisfying_nonextremes: usize,
}

pub fn published(name: &str) -> Option<Published> {
    match name {
        "paper-n3" => Some(Published {
            q: 2,
            delta_star: DissimilarityMap::from_int_pairs(3, &[4, 6, 6]).expect("3 pairs"),
            rays: vec![
                DissimilarityMap::from_int_pairs(3, &[0, 6, 6]).expect("3 pairs"),
                DissimilarityMap::from_int_pairs(3, &[4, 6, 6]).expect("3 pairs"),
            ],
            ray_numbers: vec![1, 2],
            satisfying_nonextremes: 0,
        }),
        "paper-n4" => Some(Published {
            q: 4,
            delta_star: square(&N4_DELTA_STAR),
            rays: columns(4, &N4_RAYS),
            ray_numbers: (1..=8).collect(),
            satisfying_nonextremes: 2,
        }),
        "paper-n8" => Some(Published {
            q: 9,
            delta_star: square(&N8_DELTA_STAR),
            rays: columns(8, &N8_RAYS),
            ray_numbers: N8_RAY_NUMBERS.to_vec(),
            satisfying_nonextremes: N8_NONEXTREME_NUMBERS.len(),
        }),
        _ => None,
    }
}

/// The five-item instance obtained by extending `paper-n4` with ε = 1,
/// and its nearest ultrametric.
pub fn published_n5() -> (DissimilarityMap, DissimilarityMap) {
    (square(&N5), square(&N5_DELTA_STAR))
}

/// Labels `a_b` for pairs, used when a dataset has item names.
pub fn pair_names(d: &DissimilarityMap) -> Vec<String> {
    pairs(d.n())
        .map(|(i, j)| match d.labels() {
            Some(l) => format!("{}-{}", l[i], l[j]),
            None => format!("{}-{}", i + 1, j + 1),
        })
        .collect()
}
