//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p ultrapoly --test acceptance`.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ultrapoly::cone::{build_exterior, check_membership, homogenize};
use ultrapoly::datasets::{self, published, published_n5};
use ultrapoly::enumerate::{annotate_published, cross_validate, enumerate_extremes, polytope_probe};
use ultrapoly::extend::{build_counterexample, check_witness, extend_instance, root_weight};
use ultrapoly::hypergraph::is_extreme;
use ultrapoly::metric::{
    pairs, tree_from_ultrametric, ultrametric_from_tree, DissimilarityMap, Ultrametric,
};
use ultrapoly::nearest::{bottleneck_map, bottleneck_map_with_order, nearest_ultrametric};
use ultrapoly::rational::{frac, int, Rational};
use ultrapoly::sliding::{bernstein_candidates, Quantifier};
use ultrapoly::trop::{TropScalar, TropVector};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, format!("took {took:?}, limit {limit:?}"))
}

fn ultra_set<'a>(it: impl Iterator<Item = &'a Ultrametric>) -> BTreeSet<Vec<Rational>> {
    it.map(|u| u.values().to_vec()).collect()
}

fn map_set<'a>(it: impl Iterator<Item = &'a DissimilarityMap>) -> BTreeSet<Vec<Rational>> {
    it.map(|u| u.values().to_vec()).collect()
}

fn err(e: ultrapoly::Error) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let d = datasets::paper_n3();
    let nr = nearest_ultrametric(&d).map_err(err)?;
    ensure(nr.q == int(2), format!("q = {}", nr.q))?;
    ensure(
        nr.delta_star.values() == [int(4), int(6), int(6)],
        format!("delta* = {:?}", nr.delta_star.values()),
    )?;
    let r = enumerate_extremes(&d, Quantifier::default()).map_err(err)?;
    let got = ultra_set(r.extremes.iter().map(|x| &x.state.ultrametric));
    let want: BTreeSet<Vec<Rational>> = [vec![int(0), int(6), int(6)], vec![int(4), int(6), int(6)]].into();
    ensure(got == want, format!("extremes {got:?}"))?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("q=2, delta*=(4,6,6), rays (0,6,6),(4,6,6) in {:?}", start.elapsed()))
}

fn golden(name: &str, limit: Duration) -> Outcome {
    let start = Instant::now();
    let d = datasets::dataset(name).map_err(err)?;
    let p = published(name).expect("published data");
    let mut r = enumerate_extremes(&d, Quantifier::default()).map_err(err)?;
    let elapsed = start.elapsed();
    let per = enumerate_extremes(&d, Quantifier::PerResolution).map_err(err)?;
    ensure(r.q == int(p.q), format!("q = {}", r.q))?;
    ensure(r.delta_star.map() == &p.delta_star, "delta* differs from the printed matrix")?;
    let n = d.n();
    ensure(
        (r.cone_rows, r.cone_cols) == (n * n * (n - 1) / 2, n * (n - 1) / 2 + 1),
        format!("cone {}x{}", r.cone_rows, r.cone_cols),
    )?;
    let matched = annotate_published(&mut r, &p);
    let got = ultra_set(r.extremes.iter().map(|x| &x.state.ultrametric));
    let want = map_set(p.rays.iter());
    ensure(
        got == want,
        format!("{} extremes, {matched} match the {} published rays", got.len(), want.len()),
    )?;
    let summary = format!(
        "q={}, cone {}x{}, {} extremes = published; satisfying non-extremes: {} ({}), {} (per-resolution); {:?}",
        p.q,
        r.cone_rows,
        r.cone_cols,
        got.len(),
        r.satisfying_nonextremes.len(),
        Quantifier::default(),
        per.satisfying_nonextremes.len(),
        elapsed
    );
    ensure(
        r.satisfying_nonextremes.len() == p.satisfying_nonextremes,
        format!("expected {} satisfying non-extremes; {summary}", p.satisfying_nonextremes),
    )?;
    within(start - (start.elapsed() - elapsed), limit)?;
    Ok(summary)
}

fn criterion_2() -> Outcome {
    golden("paper-n4", Duration::from_secs(5))
}

fn criterion_3() -> Outcome {
    golden("paper-n8", Duration::from_secs(300))
}

/// Random three-item instance of the given shape with relabelled items,
/// together with the expected extreme rays.
fn three_item_case(rng: &mut ChaCha8Rng, case: usize) -> (DissimilarityMap, BTreeSet<Vec<Rational>>) {
    let (a, b, c) = loop {
        let mut v: Vec<i64> = (0..3).map(|_| rng.gen_range(1..=100)).collect();
        v.sort_unstable();
        let (a, b, c) = (v[0], v[1], v[2]);
        let ok = match case {
            0 => a < b && b < c,
            1 => {
                let t = (a, a, c);
                if a < c {
                    break t;
                }
                false
            }
            _ => {
                if rng.gen_bool(0.2) {
                    break (b, b, b);
                }
                break (a, c, c);
            }
        };
        if ok {
            break (a, b, c);
        }
    };
    let canon = [int(a), int(b), int(c)];
    let (a, b, c) = (int(a), int(b), int(c));
    let two = int(2);
    let rays: Vec<[Rational; 3]> = match case {
        0 => {
            let q = (&c - &b) / &two;
            vec![
                [&a + &q, &b + &q, &b + &q],
                [&a - &q, &b + &q, &b + &q],
            ]
        }
        1 => {
            let q = (&c - &a) / &two;
            vec![
                [&a - &q, &a + &q, &a + &q],
                [&a + &q, &a - &q, &a + &q],
            ]
        }
        _ => vec![[a.clone(), b.clone(), c.clone()]],
    };
    let mut perm = [0usize, 1, 2];
    perm.shuffle(rng);
    let place = |vals: &[Rational; 3]| {
        let mut out = vec![int(0); 3];
        for (k, (i, j)) in pairs(3).enumerate() {
            let (x, y) = (perm[i].min(perm[j]), perm[i].max(perm[j]));
            out[ultrapoly::metric::pair_position(3, x, y)] = vals[k].clone();
        }
        out
    };
    let d = DissimilarityMap::from_pairs(3, place(&canon)).expect("three pairs");
    (d, rays.iter().map(place).collect())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let per_case = 400;
    for case in 0..3 {
        for _ in 0..per_case {
            let (d, want) = three_item_case(&mut rng, case);
            let r = enumerate_extremes(&d, Quantifier::default()).map_err(err)?;
            let b = ultra_set(r.rays().map(|x| &x.state.ultrametric));
            let e = ultra_set(r.extremes.iter().map(|x| &x.state.ultrametric));
            ensure(b == e, format!("case {}: bernstein != extremes for {:?}", case + 1, d.values()))?;
            ensure(e == want, format!("case {}: rays {e:?}, expected {want:?}", case + 1))?;
        }
    }
    Ok(format!("{} random instances, {per_case} per case: bernstein = extremes = closed forms", 3 * per_case))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let c = build_counterexample(5, &int(1), Quantifier::default()).map_err(err)?;
    let (d5, star5) = published_n5();
    ensure(c.d == d5, "n=5 matrix differs from the printed one")?;
    ensure(c.delta_star.map() == &star5, "n=5 delta* differs from the printed one")?;
    ensure(root_weight(&c.witness) == int(11), "witness root weight is not 11")?;
    let w = check_witness(&c.d, &c.witness, Quantifier::default()).map_err(err)?;
    ensure(w.is_counterexample(), format!("witness check {w:?}"))?;
    within(start, Duration::from_secs(5))?;
    Ok(format!("printed matrices reproduced, witness root 11 in bernstein, not extreme; {:?}", start.elapsed()))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    for n in 4..=7 {
        let c = build_counterexample(n, &int(1), Quantifier::default()).map_err(err)?;
        let w = check_witness(&c.d, &c.witness, Quantifier::default()).map_err(err)?;
        ensure(w.is_counterexample(), format!("n={n}: {w:?}"))?;
        ensure(w.mobile_count.is_some_and(|m| m <= 1), format!("n={n}: mobile count {:?}", w.mobile_count))?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("n=4..7 witnesses in bernstein \\ extremes; {:?}", start.elapsed()))
}

fn random_map(rng: &mut ChaCha8Rng, n: usize, hi: i64) -> DissimilarityMap {
    let vals: Vec<i64> = (0..n * (n - 1) / 2).map(|_| rng.gen_range(1..=hi)).collect();
    DissimilarityMap::from_int_pairs(n, &vals).expect("pair count")
}

fn criterion_7() -> Outcome {
    let mut checked = 0;
    for name in datasets::NAMES {
        let d = datasets::dataset(name).map_err(err)?;
        let mut r = enumerate_extremes(&d, Quantifier::default()).map_err(err)?;
        let s = cross_validate(&mut r).map_err(err)?;
        ensure(s.disagreements == 0, format!("{name}: {} disagreements", s.disagreements))?;
        checked += s.checks.len();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..200 {
        let n = if k % 2 == 0 { 3 } else { 4 };
        let d = random_map(&mut rng, n, 20);
        let mut r = enumerate_extremes(&d, Quantifier::default()).map_err(err)?;
        let s = cross_validate(&mut r).map_err(err)?;
        ensure(s.disagreements == 0, format!("{:?}: {} disagreements", d.values(), s.disagreements))?;
        checked += s.checks.len();
    }
    Ok(format!("{checked} candidates over 3 golden + 200 random instances, 0 disagreements"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut comparisons = 0;
    for _ in 0..100 {
        let d = random_map(&mut rng, 3, 30);
        let set = bernstein_candidates(&d, Quantifier::default()).map_err(err)?;
        let pick = set.bernstein[rng.gen_range(0..set.bernstein.len())];
        let delta = &set.all[pick].ultrametric;
        let sys = build_exterior(&d, &set.q).map_err(err)?;
        let before = is_extreme(&sys, &homogenize(delta)).map_err(err)?.extreme;
        for eps in [int(1), frac(1, 2)] {
            let e = extend_instance(&d, delta, &eps).map_err(err)?;
            let sys_e = build_exterior(&e.d_ext, &e.q).map_err(err)?;
            let after = is_extreme(&sys_e, &homogenize(&e.delta_ext)).map_err(err)?.extreme;
            ensure(before == after, format!("{:?} with eps {eps}: {before} -> {after}", d.values()))?;
            comparisons += 1;
        }
    }
    Ok(format!("{comparisons} comparisons, 0 violations"))
}

fn scalar(rng: &mut ChaCha8Rng) -> TropScalar {
    if rng.gen_bool(0.15) {
        TropScalar::Bottom
    } else {
        TropScalar::Finite(frac(rng.gen_range(-50..=50), rng.gen_range(1..=3)))
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    // Semiring axioms.
    for _ in 0..500 {
        let (a, b, c) = (scalar(&mut rng), scalar(&mut rng), scalar(&mut rng));
        ensure(a.oplus(&b) == b.oplus(&a) && a.otimes(&b) == b.otimes(&a), "commutativity")?;
        ensure(a.oplus(&b).oplus(&c) == a.oplus(&b.oplus(&c)), "oplus associativity")?;
        ensure(a.otimes(&b).otimes(&c) == a.otimes(&b.otimes(&c)), "otimes associativity")?;
        ensure(a.otimes(&b.oplus(&c)) == a.otimes(&b).oplus(&a.otimes(&c)), "distributivity")?;
        ensure(a.oplus(&TropScalar::Bottom) == a && a.otimes(&TropScalar::zero()) == a, "identities")?;
        ensure(a.otimes(&TropScalar::Bottom).is_bottom() && a.oplus(&a) == a, "absorption/idempotence")?;
    }
    // Round trips: published rays and random closures.
    for name in datasets::NAMES {
        for ray in published(name).expect("published").rays {
            let u = Ultrametric::new(ray).map_err(err)?;
            let t = tree_from_ultrametric(&u).map_err(err)?;
            ensure(t.is_canonical() && ultrametric_from_tree(&t) == u, format!("{name}: round trip"))?;
        }
    }
    for _ in 0..100 {
        let n = rng.gen_range(3..=6);
        let d = random_map(&mut rng, n, 15);
        let u = nearest_ultrametric(&d).map_err(err)?.delta_star;
        let t = tree_from_ultrametric(&u).map_err(err)?;
        ensure(ultrametric_from_tree(&t) == u, "random round trip")?;
    }
    // Tropical scaling of membership.
    let d8 = datasets::paper_n8();
    let sys8 = build_exterior(&d8, &int(9)).map_err(err)?;
    for _ in 0..200 {
        let v = TropVector::new((0..29).map(|_| TropScalar::Finite(int(rng.gen_range(0..150)))).collect());
        let s = scalar(&mut rng);
        if s.is_bottom() {
            continue;
        }
        let a = check_membership(&v, &sys8).map_err(err)?.member;
        let b = check_membership(&v.scale(&s), &sys8).map_err(err)?.member;
        ensure(a == b, "membership not scaling invariant")?;
    }
    let star = homogenize(&nearest_ultrametric(&d8).map_err(err)?.delta_star);
    for shift in [-7, 0, 13] {
        ensure(check_membership(&star.scale(&TropScalar::int(shift)), &sys8).map_err(err)?.member, "delta* scaled")?;
    }
    // MST tie-break independence.
    for _ in 0..100 {
        let n = rng.gen_range(3..=7);
        let d = random_map(&mut rng, n, 3);
        let mut order: Vec<_> = pairs(n).collect();
        order.shuffle(&mut rng);
        ensure(
            bottleneck_map_with_order(&d, &order).map_err(err)? == bottleneck_map(&d).map_err(err)?,
            "bottleneck depends on tie order",
        )?;
    }
    // Polytope probes.
    for name in datasets::NAMES {
        let d = datasets::dataset(name).map_err(err)?;
        let r = enumerate_extremes(&d, Quantifier::default()).map_err(err)?;
        let p = polytope_probe(&d, &r, 100, 9).map_err(err)?;
        ensure(p.passed, format!("{name}: probe failed at {:?}", p.failure))?;
    }
    Ok("semiring axioms, round trips, scaling invariance, tie-break independence, 3x100 probes".into())
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "n=3 golden", criterion_1),
        (2, "n=4 golden", criterion_2),
        (3, "n=8 golden", criterion_3),
        (4, "n=3 sufficiency", criterion_4),
        (5, "n=5 construction", criterion_5),
        (6, "counterexample chain", criterion_6),
        (7, "oracle agreement", criterion_7),
        (8, "extension preserves extremality", criterion_8),
        (9, "structural invariants", criterion_9),
    ];
    let mut failed = 0;
    for (k, name, run) in criteria {
        match run() {
            Ok(detail) => println!("criterion {k} ({name}): PASS - {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {k} ({name}): FAIL - {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
