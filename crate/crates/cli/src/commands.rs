use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use pomlab_core::avoid::{
    avoiding_pom, exact_reachability_witness, is_avoidable_set, unavoidable_elements,
    MatchingCertificate,
};
use pomlab_core::construct::{
    construct_half_constant, construct_mk, construct_nk, count_independent_sets, coverage,
    flatten_with_blocks, parse_dimacs, parse_edge_list, reduce_1in3sat, reduce_independent_set,
    transform_unavoidable_front, transform_unique_last_reachable, ConstructionOutput,
};
use pomlab_core::count::{
    bound_exact_family, count_exactly_reachable, count_exactly_reachable_supersets,
    count_reachable_2col, count_reachable_bruteforce,
};
use pomlab_core::greedy::{greedy_match, is_one_pom, is_pom, peel, witness_permutation};
use pomlab_core::multi::{
    bound_pomm_coverage, expand, greedy_multimatch, is_avoidable_element_multi,
    parse_degree_list, MultisetPermutation,
};
use pomlab_core::reach::{
    bound_reachable_elements, enumerate_exactly_reachable, is_reachable,
    reach_permutation_2col, ReachFamily,
};
use pomlab_core::{
    parse_element_set, parse_matrix, Budget, ElementId, Error, Matching, Permutation,
    PreferenceMatrix,
};
use serde_json::{json, Value};

use crate::report::{cols_json, perm_json, perm_text, rows_one_based, set_json, set_text, Report};
use crate::{Failed, Failure};

pub type Outcome = Result<Report, Failed>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<PreferenceMatrix, Failure> {
    Ok(parse_matrix(&read(path)?)?)
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Input(format!("missing {flag}")))
}

fn matrix_json(m: &PreferenceMatrix) -> Value {
    serde_json::to_value(m).expect("matrix serializes")
}

fn with_report(report: Report, failure: Failure) -> Failed {
    Failed {
        report: Some(Box::new(report)),
        failure,
    }
}

fn image_lines(report: &mut Report, matrix: &PreferenceMatrix, tau: &Matching) {
    for r in 0..matrix.m() {
        match tau.col(r) {
            Some(c) => report.line(format!(
                "row {}: column {}, element {}",
                r + 1,
                c + 1,
                matrix.row(r).nth(c).unwrap()
            )),
            None => report.line(format!("row {}: unassigned", r + 1)),
        }
    }
    report.line(format!("image: {}", set_text(&tau.image(matrix))));
}

pub fn greedy(path: &Path, perm: &str) -> Outcome {
    let matrix = read_matrix(path)?;
    let pi = if perm.trim() == "identity" {
        Permutation::identity(matrix.m())
    } else {
        Permutation::parse_one_based(perm, matrix.m())?
    };
    let tau = greedy_match(&matrix, &pi)?;
    let mut report = Report::new("greedy");
    report.input("matrix", path.display().to_string());
    report.input("perm", perm_json(&pi));
    report.line(format!("order: {}", perm_text(&pi)));
    image_lines(&mut report, &matrix, &tau);
    report.result("matching", cols_json(tau.cols()));
    report.result("image", set_json(&tau.image(&matrix)));
    Ok(report)
}

pub fn analyze(path: &Path, verify: bool, budget: Budget) -> Outcome {
    let matrix = read_matrix(path)?;
    let m = matrix.m();
    let mut report = Report::new("analyze");
    report.input("matrix", path.display().to_string());
    report.line(format!(
        "rows: {m}, elements: {}, widest row: {}",
        matrix.n(),
        matrix.width()
    ));
    let unavoidable = unavoidable_elements(&matrix);
    report.line(format!("unavoidable: {}", set_text(&unavoidable)));
    report.result("unavoidable", set_json(&unavoidable));
    let reach_bound = bound_reachable_elements(m);
    let family_bound = bound_exact_family(m);
    report.line(format!("bound on reachable elements: {reach_bound}"));
    report.line(format!("bound on exactly reachable sets: {family_bound}"));
    report.result("bound_reachable_elements", reach_bound);
    report.result("bound_exact_family", family_bound.to_string());

    let mut formula = None;
    if matrix.width() <= 2 {
        let (count, comps) = count_reachable_2col(&matrix)?;
        report.line(format!("reachable sets (component formula): {count}"));
        for (i, c) in comps.iter().enumerate() {
            report.line(format!(
                "  component {}: {} rows, {} avoidable, {} unavoidable{}",
                i + 1,
                c.rows,
                c.avoidable_count,
                c.unavoidable_count,
                if c.is_tree { ", tree" } else { "" }
            ));
        }
        report.result("reachable_set_count", count.to_string());
        report.result("components", serde_json::to_value(&comps).unwrap());
        formula = Some(count);
    }

    let family = match enumerate_exactly_reachable(&matrix, budget) {
        Ok(f) => f,
        Err(e @ Error::BudgetExceeded(_)) => {
            report.line("enumeration: budget exceeded, report incomplete");
            report.result("incomplete", true);
            return Err(with_report(report, e.into()));
        }
        Err(e) => return Err(e.into()),
    };
    report.line(format!("reachable elements: {}", set_text(&family.reachable_elements)));
    report.line(format!("exactly reachable sets: {}", family.len()));
    report.result("reachable_elements", set_json(&family.reachable_elements));
    report.result("exactly_reachable_count", family.len());
    report.stat("states_explored", family.states_explored);

    if verify {
        let mut problems = Vec::new();
        let common = family_intersection(&family);
        if common != unavoidable {
            problems.push("unavoidable elements differ from the enumerated family".to_string());
        }
        if family.reachable_elements.len() > reach_bound {
            problems.push("reachable elements exceed the bound".to_string());
        }
        if let Some(count) = &formula {
            let brute = count_reachable_bruteforce(&matrix, budget)?;
            if *count != brute.into() {
                problems.push(format!("formula {count} but enumeration {brute}"));
            }
        }
        return finish_verification(report, problems, formula.is_some());
    }
    Ok(report)
}

fn family_intersection(family: &ReachFamily) -> BTreeSet<ElementId> {
    let mut sets = family.exact_sets.iter();
    let first = sets.next().cloned().unwrap_or_default();
    sets.fold(first, |acc, s| acc.intersection(s).cloned().collect())
}

fn finish_verification(mut report: Report, problems: Vec<String>, by_oracle: bool) -> Outcome {
    if problems.is_empty() {
        let label = if by_oracle { "verified-by-oracle" } else { "verified" };
        report.line(label);
        report.result("verification", label);
        Ok(report)
    } else {
        for p in &problems {
            report.line(format!("verification failed: {p}"));
        }
        report.result("verification", "failed");
        report.result("verification_problems", problems.clone());
        Err(with_report(report, Failure::Verification(problems.join("; "))))
    }
}

pub enum CheckQuery {
    Reachable(String),
    Exact(String),
    Avoidable(String),
    Pom(String),
}

fn parse_set(text: &str, matrix: &PreferenceMatrix) -> Result<BTreeSet<ElementId>, Failure> {
    let set = parse_element_set(text)?;
    for e in &set {
        if !matrix.contains(e) {
            return Err(Error::UnknownElement(e.clone()).into());
        }
    }
    Ok(set)
}

fn permutation_certificate(report: &mut Report, matrix: &PreferenceMatrix, pi: &Permutation) {
    let image = greedy_match(matrix, pi).expect("witness fits matrix").image(matrix);
    report.line(format!("witness order: {}", perm_text(pi)));
    report.line(format!("witness image: {}", set_text(&image)));
    report.certificate("permutation", perm_json(pi));
    report.certificate("image", set_json(&image));
}

pub fn check(path: &Path, query: CheckQuery, budget: Budget) -> Outcome {
    let matrix = read_matrix(path)?;
    let mut report = Report::new("check");
    report.input("matrix", path.display().to_string());
    match query {
        CheckQuery::Reachable(text) => {
            let set = parse_set(&text, &matrix)?;
            report.input("reachable", set_json(&set));
            let yes = is_reachable(&matrix, &set, budget)?;
            report.line(format!("reachable {}: {}", set_text(&set), yes_no(yes)));
            report.result("reachable", yes);
            if yes {
                let pi = if matrix.width() <= 2 {
                    reach_permutation_2col(&matrix, &set)?
                } else {
                    let family = enumerate_exactly_reachable(&matrix, budget)?;
                    let target = family.exact_sets.iter().find(|s| set.is_subset(s));
                    match target {
                        Some(t) => exact_reachability_witness(&matrix, t)?,
                        None => None,
                    }
                };
                if let Some(pi) = pi {
                    permutation_certificate(&mut report, &matrix, &pi);
                }
            }
        }
        CheckQuery::Exact(text) => {
            let set = parse_set(&text, &matrix)?;
            report.input("exact", set_json(&set));
            let pi = exact_reachability_witness(&matrix, &set)?;
            report.line(format!("exactly reachable {}: {}", set_text(&set), yes_no(pi.is_some())));
            report.result("exactly_reachable", pi.is_some());
            if let Some(pi) = pi {
                permutation_certificate(&mut report, &matrix, &pi);
            }
        }
        CheckQuery::Avoidable(text) => {
            let set = parse_set(&text, &matrix)?;
            report.input("avoidable", set_json(&set));
            let ans = is_avoidable_set(&matrix, &set)?;
            report.line(format!("avoidable {}: {}", set_text(&set), yes_no(ans.avoidable)));
            report.result("avoidable", ans.avoidable);
            match &ans.certificate {
                MatchingCertificate::Saturating { matching } => {
                    report.line(format!(
                        "saturating matching (columns): {}",
                        cols_text(matching.cols())
                    ));
                    report.certificate("saturating_matching", cols_json(matching.cols()));
                    if let Some(tau) = avoiding_pom(&matrix, &set)? {
                        report.certificate("avoiding_pom", cols_json(tau.cols()));
                        if let Some(pi) = witness_permutation(&matrix, &tau) {
                            permutation_certificate(&mut report, &matrix, &pi);
                        }
                    }
                }
                MatchingCertificate::Deficient {
                    rows,
                    left_elements,
                } => {
                    let one_based = rows_one_based(rows);
                    report.line(format!(
                        "deficient rows {:?} see only {} to the left",
                        one_based,
                        set_text(left_elements)
                    ));
                    report.certificate("deficient_rows", one_based);
                    report.certificate("left_elements", set_json(left_elements));
                }
            }
        }
        CheckQuery::Pom(text) => {
            let cols = parse_cols(&text)?;
            let tau = Matching::new(&matrix, cols)?;
            report.input("pom", cols_json(tau.cols()));
            let one = is_one_pom(&matrix, &tau);
            let full = is_pom(&matrix, &tau);
            let peeling = peel(&matrix, &tau);
            report.line(format!("1-POM: {}", yes_no(one)));
            report.line(format!("POM: {}", yes_no(full)));
            report.line(format!("peeled rows: {:?}", rows_one_based(&peeling.order)));
            if !peeling.completed() {
                report.line(format!("peeling stuck at rows {:?}", rows_one_based(&peeling.stuck)));
            }
            report.result("one_pom", one);
            report.result("pom", full);
            report.certificate("peeling_order", rows_one_based(&peeling.order));
            report.certificate("peeling_stuck", rows_one_based(&peeling.stuck));
            if full {
                if let Some(pi) = witness_permutation(&matrix, &tau) {
                    permutation_certificate(&mut report, &matrix, &pi);
                }
            }
        }
    }
    Ok(report)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cols_text(cols: &[Option<usize>]) -> String {
    cols.iter()
        .map(|c| c.map_or("-".to_string(), |c| (c + 1).to_string()))
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_cols(text: &str) -> Result<Vec<Option<usize>>, Failure> {
    text.split(|c: char| c == ',' || c.is_ascii_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            if t == "-" {
                return Ok(None);
            }
            match t.parse::<usize>() {
                Ok(c) if c >= 1 => Ok(Some(c - 1)),
                _ => Err(Failure::Input(format!("bad column {t:?}"))),
            }
        })
        .collect()
}

pub fn count(path: &Path, supersets: Option<&str>, verify: bool, budget: Budget) -> Outcome {
    let matrix = read_matrix(path)?;
    let mut report = Report::new("count");
    report.input("matrix", path.display().to_string());
    let mut formula = None;
    if matrix.width() <= 2 {
        let (count, _) = count_reachable_2col(&matrix)?;
        report.line(format!("reachable sets (component formula): {count}"));
        report.result("reachable_set_count", count.to_string());
        formula = Some(count);
    }
    let exact = count_exactly_reachable(&matrix, budget)?;
    report.line(format!("exactly reachable sets: {exact}"));
    report.result("exactly_reachable_count", exact);
    if let Some(text) = supersets {
        let set = parse_set(text, &matrix)?;
        report.input("supersets", set_json(&set));
        let n = count_exactly_reachable_supersets(&matrix, &set, budget)?;
        report.line(format!("exactly reachable supersets of {}: {n}", set_text(&set)));
        report.result("superset_count", n);
    }
    if verify {
        let brute = count_reachable_bruteforce(&matrix, budget)?;
        report.line(format!("reachable sets (enumeration): {brute}"));
        report.result("reachable_set_count_enumerated", brute);
        let problems = match &formula {
            Some(f) if *f != brute.into() => vec![format!("formula {f} but enumeration {brute}")],
            _ => Vec::new(),
        };
        return finish_verification(report, problems, formula.is_some());
    }
    Ok(report)
}

pub enum Construction {
    Mk(Option<usize>),
    Nk(Option<usize>),
    Half(Option<usize>),
    Sat(Option<PathBuf>),
    Indep(Option<PathBuf>),
    Flatten(Option<PathBuf>),
    Transform {
        matrix: Option<PathBuf>,
        unique_last: bool,
        elements: Option<String>,
    },
}

fn matrix_lines(report: &mut Report, matrix: &PreferenceMatrix) {
    for l in matrix.to_text().lines() {
        report.line(l);
    }
    report.result("matrix", matrix_json(matrix));
}

fn output_report(report: &mut Report, out: &ConstructionOutput) {
    matrix_lines(report, &out.matrix);
    report.result("claimed_value", out.claimed_value);
    if let Some(x) = &out.marked_element {
        report.result("marked_element", x.as_str());
        report.line(format!("# marked element: {x}"));
    }
    if let Some(ws) = &out.witnesses {
        let all: Vec<Value> = ws.iter().map(perm_json).collect();
        report.certificate("permutations", all);
        for pi in ws {
            report.line(format!("# witness order: {}", perm_text(pi)));
        }
    }
    report.line(format!("# claimed value: {}", out.claimed_value));
}

fn measured(report: &mut Report, what: &str, got: usize, claimed: usize) -> Vec<String> {
    report.line(format!("# {what}: {got} (claimed {claimed})"));
    report.result("measured_value", got);
    if got == claimed {
        Vec::new()
    } else {
        vec![format!("{what} {got} differs from claimed {claimed}")]
    }
}

fn finish_construction(mut report: Report, problems: Vec<String>) -> Outcome {
    if problems.is_empty() {
        report.line("# verified");
        report.result("verification", "verified");
        Ok(report)
    } else {
        for p in &problems {
            report.line(format!("# verification failed: {p}"));
        }
        report.result("verification", "failed");
        Err(with_report(report, Failure::Verification(problems.join("; "))))
    }
}

pub fn construct(spec: Construction, verify: bool, budget: Budget) -> Outcome {
    let mut report = Report::new("construct");
    let problems = match spec {
        Construction::Mk(k) => {
            let k = require(k, "--k")?;
            report.input("kind", "mk");
            report.input("k", k);
            let out = construct_mk(k)?;
            output_report(&mut report, &out);
            if !verify {
                return Ok(report);
            }
            let got = pomlab_core::reach::reachable_elements(&out.matrix, budget)?.len();
            measured(&mut report, "reachable elements", got, out.claimed_value)
        }
        Construction::Nk(k) => {
            let k = require(k, "--k")?;
            report.input("kind", "nk");
            report.input("k", k);
            let out = construct_nk(k)?;
            output_report(&mut report, &out);
            if !verify {
                return Ok(report);
            }
            let ws = out.witnesses.as_deref().unwrap_or_default();
            let got = coverage(&out.matrix, ws)?.len();
            measured(&mut report, "coverage", got, out.claimed_value)
        }
        Construction::Half(m) => {
            let m = require(m, "--m")?;
            report.input("kind", "half");
            report.input("m", m);
            let out = construct_half_constant(m)?;
            output_report(&mut report, &out);
            if !verify {
                return Ok(report);
            }
            let got = count_exactly_reachable(&out.matrix, budget)?;
            measured(&mut report, "exactly reachable sets", got, out.claimed_value)
        }
        Construction::Sat(path) => {
            let path = require(path, "--cnf")?;
            report.input("kind", "sat");
            report.input("cnf", path.display().to_string());
            let phi = parse_dimacs(&read(&path)?)?;
            let out = reduce_1in3sat(&phi);
            output_report(&mut report, &out);
            if !verify {
                return Ok(report);
            }
            let x: BTreeSet<ElementId> = out.marked_element.iter().cloned().collect();
            let got = count_exactly_reachable_supersets(&out.matrix, &x, budget)?;
            measured(&mut report, "exactly reachable sets containing x", got, out.claimed_value)
        }
        Construction::Indep(path) => {
            let path = require(path, "--graph")?;
            report.input("kind", "indep");
            report.input("graph", path.display().to_string());
            let graph = parse_edge_list(&read(&path)?)?;
            let matrix = reduce_independent_set(&graph)?;
            matrix_lines(&mut report, &matrix);
            let independent = count_independent_sets(&graph) as usize;
            report.line(format!("# independent sets: {independent}"));
            report.result("independent_sets", independent);
            if !verify {
                return Ok(report);
            }
            let everything = matrix.element_universe();
            let all_reachable = exact_reachability_witness(&matrix, &everything)?.is_some();
            let expected = independent - usize::from(!all_reachable);
            report.line(format!(
                "# all elements exactly reachable: {}",
                yes_no(all_reachable)
            ));
            report.result("all_elements_exactly_reachable", all_reachable);
            let got = count_exactly_reachable(&matrix, budget)?;
            measured(&mut report, "exactly reachable sets", got, expected)
        }
        Construction::Flatten(path) => {
            let path = require(path, "--matrix")?;
            report.input("kind", "flatten");
            report.input("matrix", path.display().to_string());
            let matrix = read_matrix(&path)?;
            let flat = flatten_with_blocks(&matrix);
            matrix_lines(&mut report, &flat.matrix);
            if !verify {
                return Ok(report);
            }
            flatten_problems(&mut report, &matrix, &flat.matrix, budget)?
        }
        Construction::Transform {
            matrix: path,
            unique_last,
            elements,
        } => {
            let path = require(path, "--matrix")?;
            report.input("kind", "transform");
            report.input("matrix", path.display().to_string());
            let matrix = read_matrix(&path)?;
            let transformed = if unique_last {
                report.input("mode", "unique-last");
                transform_unique_last_reachable(&matrix, budget)?
            } else {
                let list: Vec<ElementId> = match &elements {
                    Some(text) => parse_element_list(text)?,
                    None => unavoidable_elements(&matrix).into_iter().collect(),
                };
                report.input("mode", "front");
                report.input("elements", list.iter().map(|e| e.as_str()).collect::<Vec<_>>());
                transform_unavoidable_front(&matrix, &list)?
            };
            matrix_lines(&mut report, &transformed);
            if !verify {
                return Ok(report);
            }
            let before = count_exactly_reachable(&matrix, budget)?;
            let after = count_exactly_reachable(&transformed, budget)?;
            report.line(format!("# exactly reachable sets: {before} before, {after} after"));
            report.result("family_before", before);
            report.result("family_after", after);
            if after >= before {
                Vec::new()
            } else {
                vec![format!("family shrank from {before} to {after}")]
            }
        }
    };
    finish_construction(report, problems)
}

fn parse_rows(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(|c: char| c == ',' || c.is_ascii_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(Error::InvalidPermutation(format!("bad row number {t:?}")).into()),
        })
        .collect()
}

/// Keeps the order given on the command line.
fn parse_element_list(text: &str) -> Result<Vec<ElementId>, Failure> {
    text.split(|c: char| c == ',' || c.is_ascii_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| ElementId::new(t).map_err(Failure::from))
        .collect()
}

fn flatten_problems(
    report: &mut Report,
    original: &PreferenceMatrix,
    flat: &PreferenceMatrix,
    budget: Budget,
) -> Result<Vec<String>, Failure> {
    if !original.is_complete() {
        report.line("# bijection check skipped: it needs rows of length at least m");
        report.result("verification_skipped", true);
        return Ok(Vec::new());
    }
    let m = original.m();
    let elements = original.element_universe();
    let family: BTreeSet<BTreeSet<ElementId>> = enumerate_exactly_reachable(original, budget)?
        .exact_sets
        .into_iter()
        .collect();
    let restricted: Vec<BTreeSet<ElementId>> = enumerate_exactly_reachable(flat, budget)?
        .exact_sets
        .iter()
        .map(|s| s.intersection(&elements).cloned().collect::<BTreeSet<_>>())
        .filter(|s| s.len() == m)
        .collect();
    let distinct: BTreeSet<BTreeSet<ElementId>> = restricted.iter().cloned().collect();
    report.line(format!(
        "# original family {}, restricted flattened family {}",
        family.len(),
        distinct.len()
    ));
    let mut problems = Vec::new();
    if distinct.len() != restricted.len() {
        problems.push("two flattened images restrict to the same set".to_string());
    }
    if distinct != family {
        problems.push("restricted family differs from the original".to_string());
    }
    Ok(problems)
}

pub fn multi(
    path: &Path,
    degrees_path: &Path,
    perm: Option<&str>,
    avoidable: Option<&str>,
) -> Outcome {
    let matrix = read_matrix(path)?;
    let degrees = parse_degree_list(&read(degrees_path)?, &matrix)?;
    let mut report = Report::new("multi");
    report.input("matrix", path.display().to_string());
    report.input("degrees", degrees.degrees().to_vec());
    let expansion = expand(&matrix, &degrees)?;
    report.line("expanded matrix:");
    for (i, line) in expansion.matrix.to_text().lines().enumerate() {
        let (a, b) = expansion.labels[i];
        report.line(format!("  ({}, {}) {line}", a + 1, b + 1));
    }
    report.result("expanded", matrix_json(&expansion.matrix));
    let labels: Vec<Value> = expansion
        .labels
        .iter()
        .map(|&(a, b)| json!([a + 1, b + 1]))
        .collect();
    report.result("labels", labels);
    let m = matrix.m();
    let bound = bound_pomm_coverage(m, &degrees, m);
    report.line(format!("coverage bound for any set of POMMs: {bound}"));
    report.result("coverage_bound", bound);

    if let Some(text) = perm {
        let order = parse_rows(text)?;
        let pi = MultisetPermutation::new(order, &degrees)?;
        report.input("perm", rows_one_based(pi.order()));
        let mm = greedy_multimatch(&matrix, &degrees, &pi)?;
        let per_row: Vec<Value> = (0..m).map(|r| set_json(&mm.selected(&matrix, r))).collect();
        for r in 0..m {
            report.line(format!("row {}: {}", r + 1, set_text(&mm.selected(&matrix, r))));
        }
        let image = mm.image(&matrix);
        report.line(format!("image: {}", set_text(&image)));
        report.result("selected", per_row);
        report.result("image", set_json(&image));
        report.certificate("expanded_permutation", perm_json(&expansion.lift(&pi)));
    }
    if let Some(text) = avoidable {
        let x = ElementId::new(text.trim())?;
        let yes = is_avoidable_element_multi(&matrix, &degrees, &x)?;
        report.input("avoidable", x.as_str());
        report.line(format!("avoidable {x}: {}", yes_no(yes)));
        report.result("avoidable", yes);
    }
    Ok(report)
}
