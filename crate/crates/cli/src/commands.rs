//! One function per subcommand. Each renders its result in the requested
//! format; nothing here depends on time or hash order, so output is a
//! function of the arguments alone.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use ultrapoly::cone::{build_exterior, check_membership, homogenize, system_to_csv, system_to_json, TropicalSystem};
use ultrapoly::datasets::{self, Published, NAMES};
use ultrapoly::enumerate::{annotate_published, cross_validate, enumerate_extremes, polytope_probe, ExtremeReport, ProbeResult};
use ultrapoly::extend::{build_counterexample, check_witness, extend_instance, WitnessCheck};
use ultrapoly::hypergraph::{is_extreme, to_dot, ExtremalityCertificate};
use ultrapoly::io::{matrix_to_csv, parse_candidate, parse_dissimilarity, rays_to_csv};
use ultrapoly::metric::{linf_distance, to_newick_with, tree_from_ultrametric, DissimilarityMap, NewickOptions, Ultrametric};
use ultrapoly::nearest::nearest_ultrametric;
use ultrapoly::rational::{self, Rational};
use ultrapoly::sliding::{bernstein_candidates, Quantifier};

use crate::error::{CliError, CliResult};
use crate::{Cli, Command, Format};

/// Rendered output plus an optional internal disagreement, reported after
/// the body is written.
pub struct Outcome {
    pub body: String,
    pub disagreement: Option<String>,
}

impl From<String> for Outcome {
    fn from(body: String) -> Self {
        Outcome {
            body,
            disagreement: None,
        }
    }
}

pub fn run(cli: &Cli) -> CliResult<Outcome> {
    let quantifier: Quantifier = cli.quantifier.into();
    let f = cli.format;
    match &cli.command {
        Command::Nearest { input } => nearest(&load_input(input)?, f).map(Into::into),
        Command::Cone { input } => cone(&load_input(input)?, f).map(Into::into),
        Command::Candidates { input } => candidates(&load_input(input)?, f, quantifier).map(Into::into),
        Command::Extremes {
            input,
            oracle,
            seed,
            trials,
        } => extremes(&load_input(input)?, f, quantifier, oracle.then_some((*seed, *trials))),
        Command::Check {
            input,
            candidate,
            oracle,
        } => {
            let d = load_input(input)?;
            let c = parse_candidate(&load_text(candidate), d.n())?;
            check(&d, c, f, quantifier, *oracle)
        }
        Command::Extend {
            input,
            candidate,
            epsilon,
        } => {
            let d = load_input(input)?;
            let c = Ultrametric::new(parse_candidate(&load_text(candidate), d.n())?)?;
            extend(&d, &c, &parse_epsilon(epsilon)?, f, quantifier).map(Into::into)
        }
        Command::Counterexample { items, epsilon } => {
            counterexample(*items, &parse_epsilon(epsilon)?, f, quantifier).map(Into::into)
        }
    }
}

/// A readable file, `-` for stdin, or a built-in dataset name.
pub fn load_input(source: &str) -> CliResult<DissimilarityMap> {
    if source == "-" {
        let text = std::io::read_to_string(std::io::stdin()).map_err(|source| CliError::Io {
            path: "stdin".into(),
            source,
        })?;
        return Ok(parse_dissimilarity(&text)?);
    }
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: source.to_string(),
            source: e,
        })?;
        return Ok(parse_dissimilarity(&text)?);
    }
    if NAMES.contains(&source) {
        return Ok(datasets::dataset(source)?);
    }
    Err(CliError::NoInput(source.to_string(), NAMES.join(", ")))
}

/// File contents when `source` names a file, else `source` itself.
fn load_text(source: &str) -> String {
    std::fs::read_to_string(source).unwrap_or_else(|_| source.to_string())
}

fn parse_epsilon(s: &str) -> CliResult<Rational> {
    rational::parse(s).ok_or_else(|| CliError::BadNumber(s.to_string()))
}

/// Reference values for inputs equal to a built-in dataset.
fn published_for(d: &DissimilarityMap) -> Option<(&'static str, Published)> {
    NAMES.iter().find_map(|&name| {
        let known = datasets::dataset(name).ok()?;
        if &known != d {
            return None;
        }
        datasets::published(name).map(|p| (name, p))
    })
}

fn unsupported(command: &'static str, format: Format) -> CliError {
    let format = format!("{format:?}").to_lowercase();
    CliError::Format { command, format }
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn newick(delta: &Ultrametric, labels: Option<&[String]>) -> CliResult<String> {
    let tree = tree_from_ultrametric(delta)?;
    Ok(to_newick_with(
        &tree,
        &NewickOptions {
            branch_lengths: false,
            labels,
        },
    ))
}

fn indent(block: &str) -> String {
    block.lines().map(|l| format!("  {l}\n")).collect()
}

fn nearest(d: &DissimilarityMap, f: Format) -> CliResult<String> {
    let r = nearest_ultrametric(d)?;
    Ok(match f {
        Format::Json => json(&r),
        Format::Csv => matrix_to_csv(r.delta_star.map()),
        Format::Newick => newick(&r.delta_star, d.labels())? + "\n",
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "n: {}", d.n());
            let _ = writeln!(s, "q: {}", rational::fmt(&r.q));
            let _ = writeln!(s, "tree: {}", newick(&r.delta_star, d.labels())?);
            let _ = writeln!(s, "nearest ultrametric:\n{}", indent(&matrix_to_csv(r.delta_star.map())));
            let _ = writeln!(s, "subdominant:\n{}", indent(&matrix_to_csv(&r.d_star)));
            s.push_str("spanning tree:\n");
            for e in &r.mst_edges {
                let _ = writeln!(s, "  {}-{} {}", e.i + 1, e.j + 1, rational::fmt(&e.weight));
            }
            s
        }
        Format::Dot => return Err(unsupported("nearest", f)),
    })
}

fn cone(d: &DissimilarityMap, f: Format) -> CliResult<String> {
    let q = nearest_ultrametric(d)?.q;
    let sys = build_exterior(d, &q)?;
    Ok(match f {
        Format::Csv => system_to_csv(&sys),
        Format::Json => json(&system_to_json(&sys)),
        Format::Text => {
            let mut s = format!(
                "q: {}\nrows: {} ({} triple, {} bound)\ncolumns: {}\n",
                rational::fmt(&q),
                sys.rows(),
                sys.triple_rows(),
                sys.rows() - sys.triple_rows(),
                sys.cols()
            );
            for r in 0..sys.rows() {
                let _ = writeln!(s, "{:>5}  {}", r + 1, sys.describe_row(r));
            }
            s
        }
        Format::Newick | Format::Dot => return Err(unsupported("cone", f)),
    })
}

fn candidates(d: &DissimilarityMap, f: Format, quantifier: Quantifier) -> CliResult<String> {
    let set = bernstein_candidates(d, quantifier)?;
    let passing: Vec<_> = set.bernstein_states().collect();
    Ok(match f {
        Format::Json => json(&set),
        Format::Csv => {
            let maps: Vec<&DissimilarityMap> = passing.iter().map(|s| s.ultrametric.map()).collect();
            let names: Vec<String> = (1..=maps.len()).map(|k| format!("candidate_{k}")).collect();
            rays_to_csv(d.n(), &maps, &names)
        }
        Format::Newick => {
            let mut s = String::new();
            for st in &passing {
                s.push_str(&newick(&st.ultrametric, d.labels())?);
                s.push('\n');
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "q: {}\nclosure: {}\npassing ({quantifier}): {}\n  all-resolutions: {}\n  per-resolution: {}\n",
                rational::fmt(&set.q),
                set.all.len(),
                passing.len(),
                set.count_all_resolutions,
                set.count_per_resolution,
            );
            for (i, st) in set.all.iter().enumerate() {
                let mark = if set.bernstein.binary_search(&i).is_ok() { '*' } else { ' ' };
                let _ = writeln!(
                    s,
                    "{mark} {} mobile {}/{}",
                    newick(&st.ultrametric, d.labels())?,
                    st.mobile_all_resolutions,
                    st.mobile_per_resolution
                );
            }
            s
        }
        Format::Dot => return Err(unsupported("candidates", f)),
    })
}

#[derive(Serialize)]
struct PublishedSummary {
    dataset: &'static str,
    rays_published: usize,
    rays_matched: usize,
    satisfying_nonextremes_published: usize,
    satisfying_nonextremes_found: usize,
}

#[derive(Serialize)]
struct ExtremesOutput<'a> {
    #[serde(flatten)]
    report: &'a ExtremeReport,
    published: Option<PublishedSummary>,
    probe: Option<ProbeResult>,
}

fn dot_of(sys: &TropicalSystem, cert: &ExtremalityCertificate, name: &str) -> String {
    to_dot(&cert.hypergraph, &sys.indexer.labels(), Some(&cert.scc)).replacen("digraph tangent", &format!("digraph {name}"), 1)
}

fn extremes(d: &DissimilarityMap, f: Format, quantifier: Quantifier, oracle: Option<(u64, usize)>) -> CliResult<Outcome> {
    let mut report = enumerate_extremes(d, quantifier)?;
    let published = published_for(d).map(|(dataset, p)| {
        let rays_matched = annotate_published(&mut report, &p);
        PublishedSummary {
            dataset,
            rays_published: p.rays.len(),
            rays_matched,
            satisfying_nonextremes_published: p.satisfying_nonextremes,
            satisfying_nonextremes_found: report.satisfying_nonextremes.len(),
        }
    });
    let mut problems = Vec::new();
    let mut probe = None;
    if let Some((seed, trials)) = oracle {
        let summary = cross_validate(&mut report)?;
        if summary.disagreements > 0 {
            problems.push(format!("{} certificate/oracle disagreements", summary.disagreements));
        }
        let p = polytope_probe(d, &report, trials, seed)?;
        if !p.passed {
            problems.push(format!("random combination left the polytope (seed {seed})"));
        }
        probe = Some(p);
    }
    if !report.extremes_outside_candidates.is_empty() {
        log::warn!("{} extremes were rejected by the filter", report.extremes_outside_candidates.len());
    }

    let labels = d.labels();
    let body = match f {
        Format::Json => json(&ExtremesOutput {
            report: &report,
            published,
            probe,
        }),
        Format::Csv => {
            let maps: Vec<&DissimilarityMap> = report.extremes.iter().map(|r| r.state.ultrametric.map()).collect();
            let names: Vec<String> = (1..=maps.len()).map(|k| format!("ray_{k}")).collect();
            rays_to_csv(d.n(), &maps, &names)
        }
        Format::Newick => {
            let mut s = String::new();
            for r in &report.extremes {
                s.push_str(&newick(&r.state.ultrametric, labels)?);
                s.push('\n');
            }
            s
        }
        Format::Dot => report
            .extremes
            .iter()
            .enumerate()
            .map(|(k, r)| dot_of(&report.system, &r.certificate, &format!("ray_{}", k + 1)))
            .collect(),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "n: {}", report.n);
            let _ = writeln!(s, "q: {}", rational::fmt(&report.q));
            let _ = writeln!(s, "cone: {} x {}", report.cone_rows, report.cone_cols);
            let _ = writeln!(s, "closure: {}", report.closure_size);
            let _ = writeln!(
                s,
                "candidates ({}): {}  [all-resolutions {}, per-resolution {}]",
                report.quantifier, report.candidate_count, report.count_all_resolutions, report.count_per_resolution
            );
            let _ = writeln!(s, "extremes: {}", report.extremes.len());
            for (k, r) in report.extremes.iter().enumerate() {
                let tag = r.published.map(|p| format!(" #{p}")).unwrap_or_default();
                let _ = writeln!(s, "  {:>3}{tag}  {}", k + 1, newick(&r.state.ultrametric, labels)?);
            }
            let _ = writeln!(s, "satisfying non-extremes: {}", report.satisfying_nonextremes.len());
            for r in &report.satisfying_nonextremes {
                let _ = writeln!(s, "       {}", newick(&r.state.ultrametric, labels)?);
            }
            if !report.extremes_outside_candidates.is_empty() {
                let _ = writeln!(s, "extremes rejected by filter: {}", report.extremes_outside_candidates.len());
            }
            if let Some(p) = &published {
                let _ = writeln!(
                    s,
                    "published ({}): {}/{} rays matched; {} non-extremes reported as passing the filter, {} found",
                    p.dataset,
                    p.rays_matched,
                    p.rays_published,
                    p.satisfying_nonextremes_published,
                    p.satisfying_nonextremes_found
                );
            }
            if let Some(o) = &report.oracle {
                let _ = writeln!(s, "oracle: {} checked, {} disagreements", o.checks.len(), o.disagreements);
            }
            if let Some(p) = &probe {
                let verdict = if p.passed { "passed" } else { "FAILED" };
                let _ = writeln!(s, "probe: {} trials, seed {}, {verdict}", p.trials, p.seed);
            }
            s
        }
    };
    Ok(Outcome {
        body,
        disagreement: (!problems.is_empty()).then(|| problems.join("; ")),
    })
}

#[derive(Serialize)]
struct CheckOutput {
    newick: String,
    extreme: bool,
    components: Vec<Vec<String>>,
    greatest: Option<Vec<String>>,
    multi_tail: bool,
    oracle_extreme: Option<bool>,
}

fn check(d: &DissimilarityMap, candidate: DissimilarityMap, f: Format, quantifier: Quantifier, oracle: bool) -> CliResult<Outcome> {
    let q = nearest_ultrametric(d)?.q;
    let delta = Ultrametric::new(candidate)?;
    let dist = linf_distance(delta.map(), d)?;
    if dist != q {
        return Err(ultrapoly::Error::NotNearest {
            found: rational::fmt(&dist),
            q: rational::fmt(&q),
        }
        .into());
    }
    let sys = build_exterior(d, &q)?;
    let v = homogenize(&delta);
    let m = check_membership(&v, &sys)?;
    if let Some(r) = m.violated_row {
        return Err(CliError::Violated(format!("row {}: {}", r + 1, sys.describe_row(r))));
    }
    let cert = is_extreme(&sys, &v)?;
    let names = |c: &[usize]| c.iter().map(|&x| sys.indexer.label(x)).collect::<Vec<_>>();
    let oracle_extreme = if oracle {
        let report = enumerate_extremes(d, quantifier)?;
        Some(report.extremes.iter().any(|r| r.state.ultrametric == delta))
    } else {
        None
    };
    let out = CheckOutput {
        newick: newick(&delta, d.labels())?,
        extreme: cert.extreme,
        components: cert.scc.components.iter().map(|c| names(c)).collect(),
        greatest: cert.scc.greatest_component().map(names),
        multi_tail: cert.multi_tail,
        oracle_extreme,
    };
    let body = match f {
        Format::Json => json(&out),
        Format::Dot => dot_of(&sys, &cert, "tangent"),
        Format::Newick => format!("{}\n", out.newick),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "candidate: {}", out.newick);
            let _ = writeln!(s, "verdict: {}", if out.extreme { "extreme" } else { "not extreme" });
            s.push_str("components:\n");
            for c in &out.components {
                let _ = writeln!(s, "  {{{}}}", c.join(", "));
            }
            match &out.greatest {
                Some(g) => {
                    let _ = writeln!(s, "greatest: {{{}}}", g.join(", "));
                }
                None => s.push_str("greatest: none\n"),
            }
            if let Some(o) = oracle_extreme {
                let _ = writeln!(s, "oracle: {}", if o { "extreme" } else { "not extreme" });
            }
            s
        }
        Format::Csv => return Err(unsupported("check", f)),
    };
    let disagreement = oracle_extreme
        .filter(|&o| o != cert.extreme)
        .map(|o| format!("certificate says extreme={}, enumeration says {o}", cert.extreme));
    Ok(Outcome { body, disagreement })
}

fn transcript(s: &mut String, w: &WitnessCheck) {
    let yn = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(s, "witness in closure: {}", yn(w.in_closure));
    let _ = writeln!(s, "witness passes filter: {}", yn(w.in_candidates));
    let _ = writeln!(s, "witness extreme: {}", yn(w.extreme));
    if let Some(k) = w.mobile_count {
        let _ = writeln!(s, "witness mobile count: {k}");
    }
    let _ = writeln!(s, "counterexample: {}", yn(w.is_counterexample()));
}

#[derive(Serialize)]
struct WithCheck<'a, T: Serialize> {
    #[serde(flatten)]
    result: &'a T,
    check: WitnessCheck,
}

fn extend(d: &DissimilarityMap, delta: &Ultrametric, epsilon: &Rational, f: Format, quantifier: Quantifier) -> CliResult<String> {
    let e = extend_instance(d, delta, epsilon)?;
    Ok(match f {
        Format::Csv => matrix_to_csv(&e.d_ext),
        Format::Newick => format!("{}\n{}\n", newick(&e.delta_ext, None)?, newick(&e.delta_star_ext, None)?),
        Format::Json => json(&WithCheck {
            result: &e,
            check: check_witness(&e.d_ext, &e.delta_ext, quantifier)?,
        }),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "epsilon: {}", rational::fmt(&e.epsilon));
            let _ = writeln!(s, "r: {}", rational::fmt(&e.r));
            let _ = writeln!(s, "q: {}", rational::fmt(&e.q));
            let _ = writeln!(s, "extended instance:\n{}", indent(&matrix_to_csv(&e.d_ext)));
            let _ = writeln!(s, "extended ultrametric: {}", newick(&e.delta_ext, None)?);
            let _ = writeln!(s, "{}", indent(&matrix_to_csv(e.delta_ext.map())));
            let _ = writeln!(s, "nearest ultrametric:\n{}", indent(&matrix_to_csv(e.delta_star_ext.map())));
            transcript(&mut s, &check_witness(&e.d_ext, &e.delta_ext, quantifier)?);
            s
        }
        Format::Dot => return Err(unsupported("extend", f)),
    })
}

fn counterexample(items: usize, epsilon: &Rational, f: Format, quantifier: Quantifier) -> CliResult<String> {
    let c = build_counterexample(items, epsilon, quantifier)?;
    Ok(match f {
        Format::Csv => matrix_to_csv(&c.d),
        Format::Newick => format!("{}\n{}\n", newick(&c.witness, None)?, newick(&c.delta_star, None)?),
        Format::Json => json(&WithCheck {
            result: &c,
            check: check_witness(&c.d, &c.witness, quantifier)?,
        }),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "items: {}", c.d.n());
            let _ = writeln!(s, "epsilon: {}", rational::fmt(epsilon));
            let _ = writeln!(s, "q: {}", rational::fmt(&c.q));
            let _ = writeln!(s, "instance:\n{}", indent(&matrix_to_csv(&c.d)));
            let _ = writeln!(s, "nearest ultrametric:\n{}", indent(&matrix_to_csv(c.delta_star.map())));
            let _ = writeln!(s, "witness: {}", newick(&c.witness, None)?);
            let _ = writeln!(s, "{}", indent(&matrix_to_csv(c.witness.map())));
            transcript(&mut s, &check_witness(&c.d, &c.witness, quantifier)?);
            s
        }
        Format::Dot => return Err(unsupported("counterexample", f)),
    })
}
