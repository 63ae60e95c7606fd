//! Acceptance suite: runs the eleven acceptance criteria and prints one
//! PASS/FAIL line for each. Pass criterion numbers as arguments to run a subset.
//!
//! The process fails unless every criterion passes, except for documented
//! failures: criterion 8 is known to fail for cyclotomic lines 2 and 3, and it
//! still prints FAIL when exactly those instances fail.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use schurkit::closure::closure_of_sets;
use schurkit::constructions::{
    all_well_defined, ambient, build, build_a_star, check_conditions, cyclotomic_family, table1, witness_set, Family,
    Flavor,
};
use schurkit::enumeration::{
    cyclic_atoms, enumerate_srings, Classifier, ClassifyOptions,
};
use schurkit::group::{abelian_groups_of_order, make_group, Group, GroupMap};
use schurkit::iso::{
    algebraically_isomorphic, find_algebraic_isos, find_inducing_iso, induced_algebraic_iso, is_separable,
    verify_separability_report, AlgIso, Budget, DEFAULT_BUDGET,
};
use schurkit::products::cyclotomic;
use schurkit::wl2::{
    cayley_digraph, compare_partitions, inverse_closed_sets, isomorphism_partition, wl_partition, PairColoring,
};
use schurkit::{Error, SRing};

use common::*;

struct Verdict {
    pass: bool,
    detail: String,
    /// The failure is exactly the documented one.
    documented: bool,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Verdict {
        Verdict { pass, detail: detail.into(), documented: false }
    }
}

type Outcome = Result<Verdict, Error>;

fn node_budget() -> u64 {
    std::env::var("SCHURKIT_BUDGET_NODES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

fn canonical_set(rings: &[SRing]) -> BTreeSet<Partition> {
    rings.iter().map(canonical).collect()
}

fn oracle_equivalence() -> Outcome {
    let mut groups = 0;
    let mut rings = 0;
    let mut mismatches = Vec::new();
    for n in 1..=8 {
        for g in abelian_groups_of_order(n) {
            let expected = oracle_partitions(&g);
            let all = enumerate_srings(&g)?.all;
            let got = canonical_set(&all);
            if got.len() != all.len() || got != expected {
                mismatches.push(format!("{}: {} vs oracle {}", g.spec_string(), all.len(), expected.len()));
            }
            groups += 1;
            rings += expected.len();
        }
    }
    Ok(Verdict::new(
        mismatches.is_empty(),
        format!("{groups} groups, {rings} S-rings from the oracle; mismatches {mismatches:?}"),
    ))
}

fn multiplicative_order(u: usize, p: usize) -> usize {
    let mut x = u % p;
    let mut k = 1;
    while x != 1 {
        x = x * u % p;
        k += 1;
    }
    k
}

fn prime_counts() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (p, expected) in [(5usize, 3usize), (7, 4), (11, 4), (13, 6)] {
        let g = make_group(&[p])?;
        let all = enumerate_srings(&g)?.all;
        let divisors = (1..p).filter(|d| (p - 1) % d == 0).count();
        let mut from_subgroups = BTreeSet::new();
        for d in (1..p).filter(|d| (p - 1) % d == 0) {
            let u = (1..p).find(|&u| multiplicative_order(u, p) == d).expect("cyclic unit group");
            from_subgroups.insert(canonical(&cyclotomic(&g, &[GroupMap::multiplier(&g, u as i64)])?));
        }
        let ok = all.len() == expected && divisors == expected && canonical_set(&all) == from_subgroups;
        pass &= ok;
        lines.push(format!("C{p}: {} (expected {expected})", all.len()));
    }
    Ok(Verdict::new(pass, lines.join(", ")))
}

fn order_eighteen_classification() -> Outcome {
    let options = ClassifyOptions { aut_condition: false, families: false, normal_cyclotomic: false };
    let mut summary = Vec::new();
    let mut exceptions = Vec::new();
    for g in abelian_groups_of_order(18) {
        let classifier = Classifier::new(&g, options)?;
        let all = enumerate_srings(&g)?.all;
        let (mut rank2, mut tensor, mut wreath) = (0, 0, 0);
        for a in &all {
            let tag = classifier.classify(a, &mut Budget::new(node_budget()))?;
            if tag.has_rank2() {
                rank2 += 1;
            } else if tag.has_tensor() {
                tensor += 1;
            } else if tag.has_s_wreath_within(3) {
                wreath += 1;
            } else {
                exceptions.push(format!("{}: {:?}", g.spec_string(), a.classes()));
            }
        }
        summary.push(format!(
            "{}: {} S-rings ({rank2} rank 2, {tensor} tensor, {wreath} S-wreath)",
            g.spec_string(),
            all.len()
        ));
    }
    Ok(Verdict::new(
        exceptions.is_empty(),
        format!("{}; exceptions {}", summary.join(", "), exceptions.len()),
    ))
}

fn separability_at(n: usize) -> Result<(bool, String), Error> {
    let mut subjects: Vec<SRing> = Vec::new();
    for g in abelian_groups_of_order(n) {
        subjects.extend(enumerate_srings(&g)?.representatives().into_iter().cloned());
    }
    let targets = subjects.clone();
    let limit = node_budget();
    let results: Vec<Result<(bool, bool, usize, u64), Error>> = subjects
        .par_iter()
        .map(|a| {
            let mut budget = Budget::new(limit);
            let report = is_separable(a, &targets, &mut budget)?;
            let replayed = verify_separability_report(a, &targets, &report);
            Ok((report.separable, replayed, report.witnesses.len(), report.nodes_used))
        })
        .collect();
    let (mut not_separable, mut replay_failures, mut exhausted, mut isos, mut nodes) = (0, 0, 0, 0, 0);
    for r in results {
        match r {
            Ok((separable, replayed, w, used)) => {
                not_separable += usize::from(!separable);
                replay_failures += usize::from(!replayed);
                isos += w;
                nodes += used;
            }
            Err(Error::BudgetExceeded { .. }) => exhausted += 1,
            Err(e) => return Err(e),
        }
    }
    let pass = not_separable == 0 && replay_failures == 0 && exhausted == 0;
    Ok((
        pass,
        format!(
            "order {n}: {} Cayley-class representatives, {isos} algebraic isomorphisms, \
             {not_separable} without inducing map, {replay_failures} replay failures, {exhausted} budget exhaustions, {nodes} nodes",
            subjects.len()
        ),
    ))
}

fn separability() -> Outcome {
    let (pass18, detail18) = separability_at(18)?;
    let (pass45, detail45) = separability_at(45)?;
    Ok(Verdict::new(pass18 && pass45, format!("{detail18}; {detail45}")))
}

/// Closure of a set of permutations of `E₉` under composition; elements of
/// `E₉` are `3i + j` for `i·a + j·b`.
fn e9_matrix_group(gens: &[[[usize; 2]; 2]]) -> BTreeSet<Vec<usize>> {
    let apply = |m: &[[usize; 2]; 2], x: usize| {
        let (i, j) = (x / 3, x % 3);
        let first = (i * m[0][0] + j * m[1][0]) % 3;
        let second = (i * m[0][1] + j * m[1][1]) % 3;
        3 * first + second
    };
    let tables: Vec<Vec<usize>> = gens.iter().map(|m| (0..9).map(|x| apply(m, x)).collect()).collect();
    let mut group: BTreeSet<Vec<usize>> = BTreeSet::from([(0..9).collect()]);
    let mut frontier: Vec<Vec<usize>> = group.iter().cloned().collect();
    while let Some(t) = frontier.pop() {
        for s in &tables {
            let next: Vec<usize> = t.iter().map(|&x| s[x]).collect();
            if group.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    group
}

fn cyclotomic_line_indices() -> Outcome {
    let printed = [2usize, 2, 3, 3, 6, 2, 2, 4, 2, 4, 8];
    let mut found = Vec::new();
    let mut pass = table1().len() == printed.len();
    for (line, &expected) in table1().iter().zip(&printed) {
        let k = e9_matrix_group(&line.k_gens);
        let k0 = e9_matrix_group(&line.k0_gens);
        let compose = |s: &Vec<usize>, t: &Vec<usize>| -> Vec<usize> { t.iter().map(|&x| s[x]).collect() };
        let inverse = |s: &Vec<usize>| -> Vec<usize> {
            let mut inv = vec![0; 9];
            for (x, &y) in s.iter().enumerate() {
                inv[y] = x;
            }
            inv
        };
        let normal = k0.is_subset(&k)
            && k.iter().all(|s| k0.iter().all(|t| k0.contains(&compose(&compose(&inverse(s), t), s))));
        let index = k.len() / k0.len();
        pass &= normal && k.len() % k0.len() == 0 && index == expected && line.index == expected;
        found.push(index);
    }
    Ok(Verdict::new(pass, format!("indices {found:?}, printed {printed:?}")))
}

/// Extra class sizes by family, with `p` and `k = |M|` substituted.
fn size_row(family: Family, p: usize, k: usize) -> BTreeSet<usize> {
    let q = p - 1;
    let row: Vec<usize> = match family {
        Family::Star(1) => vec![2, 3, q, 3 * q],
        Family::Star(2) => vec![2, 6, q, 6 * q],
        Family::Star(3) => vec![2, 6, q, 3 * q],
        Family::Line(1) => vec![2, k],
        Family::Line(2) => vec![2, 4, 2 * k],
        Family::Line(3) => vec![1, 3, k],
        Family::Line(4) => vec![2, 6, 2 * k],
        Family::Line(5) => vec![2, 6, k],
        Family::Line(6) => vec![4, 2 * k, 4 * k],
        Family::Line(7) => vec![4, 2 * k],
        Family::Line(8) => vec![4, k],
        Family::Line(9) => vec![8, 4 * k],
        Family::Line(10) => vec![8, 2 * k],
        Family::Line(11) => vec![8, k],
        other => panic!("no size row for {other}"),
    };
    row.into_iter().collect()
}

fn nonidentity_sizes(a: &SRing) -> BTreeSet<usize> {
    a.classes().iter().filter(|c| c.as_slice() != [0]).map(|c| c.len()).collect()
}

fn sylow_sizes(a: &SRing, p: usize) -> BTreeSet<usize> {
    let g = a.group();
    a.classes()
        .iter()
        .filter(|c| c.as_slice() != [0] && c.iter().all(|&x| g.element_order(x) == p))
        .map(|c| c.len())
        .collect()
}

fn family_size_signatures() -> Outcome {
    let mut instances: Vec<(Family, usize, Option<Flavor>, Option<usize>)> = Vec::new();
    let lines_at = |lines: &[u8], p: usize, ks: &[usize], out: &mut Vec<_>| {
        for &i in lines {
            let index = table1()[i as usize - 1].index;
            for &k in ks.iter().filter(|&&k| k % index == 0) {
                out.push((Family::Line(i), p, None, Some(k)));
            }
        }
    };
    lines_at(&[1, 2, 6, 7, 8], 5, &[2, 4], &mut instances);
    lines_at(&[3, 4, 5], 7, &[3, 6], &mut instances);
    lines_at(&[9, 10, 11], 17, &[8, 16], &mut instances);
    for i in 1..=3 {
        for flavor in [Flavor::Elementary, Flavor::Cyclic] {
            instances.push((Family::Star(i), 5, Some(flavor), None));
        }
    }
    let mut mismatches = Vec::new();
    for &(family, p, flavor, k) in &instances {
        let inst = build(family, p, flavor, k)?;
        let k = k.unwrap_or(p - 1);
        let expected: BTreeSet<usize> = size_row(family, p, k).union(&sylow_sizes(&inst.sring, p)).copied().collect();
        let got = nonidentity_sizes(&inst.sring);
        if got != expected {
            mismatches.push(format!("{family} p={p} k={k}: {got:?} vs {expected:?}"));
        }
    }
    Ok(Verdict::new(
        mismatches.is_empty(),
        format!("{} instances; mismatches {mismatches:?}", instances.len()),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Label {
    Star(u8, char),
    Line(u8, usize),
}

fn nonisomorphism_matrix() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for (p, lines) in [(13usize, 1..=11u8), (17, 9..=11)] {
        let mut entries: Vec<(Label, SRing)> = Vec::new();
        if p == 13 {
            for i in 1..=3 {
                for flavor in [Flavor::Elementary, Flavor::Cyclic] {
                    entries.push((Label::Star(i, flavor.letter()), build_a_star(i, flavor, p)?));
                }
            }
        }
        for (line, k, a) in all_well_defined(p)? {
            if lines.contains(&line) {
                entries.push((Label::Line(line, k), a));
            }
        }
        let pairs: Vec<(usize, usize)> =
            (0..entries.len()).flat_map(|s| (s..entries.len()).map(move |t| (s, t))).collect();
        let verdicts: Vec<bool> =
            pairs.par_iter().map(|&(s, t)| algebraically_isomorphic(&entries[s].1, &entries[t].1)).collect();
        let (mut violations, mut unconstrained) = (Vec::new(), 0);
        for (&(s, t), &iso) in pairs.iter().zip(&verdicts) {
            let (left, right) = (&entries[s].0, &entries[t].0);
            let required = match (left, right) {
                _ if s == t => Some(true),
                (Label::Star(i, _), Label::Star(j, _)) if i == j => None,
                _ => Some(false),
            };
            match required {
                Some(want) if want != iso => violations.push(format!("{left:?} vs {right:?}")),
                None => unconstrained += 1,
                _ => {}
            }
        }
        pass &= violations.is_empty();
        detail.push(format!(
            "p={p}: {} families, {} pairs, {unconstrained} same-index star pairs over C9 vs E9 unconstrained, violations {violations:?}",
            entries.len(),
            pairs.len()
        ));
    }
    Ok(Verdict::new(pass, detail.join("; ")))
}

fn witness_generation() -> Outcome {
    let mut instances = Vec::new();
    for p in [5usize, 7, 13] {
        for k in (1..p).filter(|k| (p - 1) % k == 0) {
            for line in table1().iter().filter(|l| k % l.index == 0) {
                instances.push((line.line, p, k));
            }
        }
    }
    for k in [2usize, 4, 8, 16] {
        for line in table1().iter().filter(|l| l.line >= 9 && k % l.index == 0) {
            instances.push((line.line, 17, k));
        }
    }
    let outcomes: Vec<Result<(u8, usize, usize, Option<String>), Error>> = instances
        .par_iter()
        .map(|&(line, p, k)| {
            let fam = cyclotomic_family(line, p, k)?;
            let problem = match witness_set(&fam) {
                Err(Error::NoWitnessFound(msg)) => Some(msg),
                Err(e) => return Err(e),
                Ok(x) => {
                    let report = check_conditions(&fam.ambient, &fam.sring, &x, None)?;
                    let closure = closure_of_sets(fam.ambient.group(), &[x.clone()]);
                    match (report.first_four(), closure == fam.sring) {
                        (true, true) => None,
                        (four, generates) => Some(format!("conditions (C1)-(C4) {four}, closure equal {generates}")),
                    }
                }
            };
            Ok((line, p, k, problem))
        })
        .collect();
    let mut failures = Vec::new();
    for o in outcomes {
        let (line, p, k, problem) = o?;
        if let Some(problem) = problem {
            failures.push((line, p, k, problem));
        }
    }
    let failing_lines: BTreeSet<u8> = failures.iter().map(|f| f.0).collect();
    let detail = format!(
        "{} instances, {} failing on lines {:?}: {}",
        instances.len(),
        failures.len(),
        failing_lines,
        failures.iter().map(|f| format!("A{}(p={}, |M|={})", f.0, f.1, f.2)).collect::<Vec<_>>().join(" ")
    );
    Ok(Verdict {
        pass: failures.is_empty(),
        documented: failing_lines == BTreeSet::from([2, 3]),
        detail,
    })
}

/// Class-index maps of `a` onto itself induced by each of `maps`.
fn induced_maps(a: &SRing, maps: &[Vec<usize>]) -> Option<BTreeSet<Vec<usize>>> {
    maps.iter().map(|f| induced_algebraic_iso(f, a, a).map(|phi| phi.class_map)).collect()
}

/// All class permutations that fix `fixed`, keep each pair in `pairs`
/// invariant, and swap pairs in the groups of `linked` together.
fn pair_respecting_maps(rank: usize, fixed: &[usize], pairs: &[[usize; 2]], linked: &[Vec<usize>]) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        let swapped = |i: usize| mask >> i & 1 == 1;
        if linked.iter().any(|group| group.iter().any(|&i| swapped(i) != swapped(group[0]))) {
            continue;
        }
        let mut map: Vec<usize> = (0..rank).collect();
        for (i, &[x, y]) in pairs.iter().enumerate() {
            if swapped(i) {
                map[x] = y;
                map[y] = x;
            }
        }
        let covered = fixed.len() + 2 * pairs.len();
        assert_eq!(covered, rank, "every class is fixed or paired");
        out.insert(map);
    }
    out
}

fn star_case_isomorphisms() -> Outcome {
    let p = 5;
    let amb = ambient(Flavor::Elementary, p)?;
    let g: &Group = amb.group();
    let (a, b, z) = (amb.bottom, amb.top, amb.z);
    let sum = |xs: &[usize], ys: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| g.add(x, y))).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let union = |xs: &[&[usize]]| -> Vec<usize> {
        let mut v: Vec<usize> = xs.concat();
        v.sort_unstable();
        v
    };
    let big_a = vec![0, a, g.mul(a, 2)];
    let (na, nb) = (g.neg(a), g.neg(b));
    let p_hash: Vec<usize> = (1..p as i64).map(|j| g.mul(z, j)).collect();
    let p1: Vec<usize> = [1, 4].iter().map(|&j| g.mul(z, j)).collect();
    let p2: Vec<usize> = [2, 3].iter().map(|&j| g.mul(z, j)).collect();
    let ba = sum(&[b], &big_a);
    let nba = sum(&[nb], &big_a);
    let x0 = vec![0];
    let x1 = union(&[&[a], &[na]]);
    let y0 = p_hash.clone();
    let y1 = union(&[&sum(&[a], &p1), &sum(&[na], &p2)]);
    let y2 = union(&[&sum(&[a], &p2), &sum(&[na], &p1)]);

    // σ_m: x ↦ mx
    let f0 = f0_map(g, a, b, z, p);
    let sigma = |m: i64| -> Vec<usize> { (0..g.order()).map(|x| g.mul(x, m)).collect() };
    let then = |first: &[usize], second: &[usize]| -> Vec<usize> { first.iter().map(|&x| second[x]).collect() };
    let identity: Vec<usize> = (0..g.order()).collect();

    let mut details = Vec::new();
    let mut pass = true;
    for case in 1..=3u8 {
        let star = build_a_star(case, Flavor::Elementary, p)?;
        let idx = |set: &[usize]| -> Result<usize, Error> {
            let c = star.class_of(set[0]);
            if star.class(c) == set {
                Ok(c)
            } else {
                Err(Error::InternalInvariant(format!("A{case}*: {set:?} is not a basic set")))
            }
        };
        let (expected, inducers): (BTreeSet<Vec<usize>>, Vec<Vec<usize>>) = match case {
            1 => {
                let (x2, x3) = (idx(&ba)?, idx(&nba)?);
                let y3 = idx(&sum(&ba, &p_hash))?;
                let y4 = idx(&sum(&nba, &p_hash))?;
                let fixed = [idx(&x0)?, idx(&x1)?, idx(&y0)?];
                let pairs = [[x2, x3], [y3, y4], [idx(&y1)?, idx(&y2)?]];
                let minus = sigma(-1);
                (
                    pair_respecting_maps(star.rank(), &fixed, &pairs, &[vec![0, 1]]),
                    vec![identity.clone(), f0.clone(), minus.clone(), then(&minus, &f0)],
                )
            }
            2 => {
                let x2 = idx(&union(&[&ba, &nba]))?;
                let y3 = idx(&union(&[&sum(&ba, &p_hash), &sum(&nba, &p_hash)]))?;
                let fixed = [idx(&x0)?, idx(&x1)?, x2, idx(&y0)?, y3];
                let pairs = [[idx(&y1)?, idx(&y2)?]];
                (pair_respecting_maps(star.rank(), &fixed, &pairs, &[]), vec![identity.clone(), f0.clone()])
            }
            _ => {
                let x2 = idx(&union(&[&ba, &nba]))?;
                let y3_set = union(&[&sum(&ba, &p1), &sum(&nba, &p2)]);
                let y4_set = union(&[&sum(&ba, &p2), &sum(&nba, &p1)]);
                let (y3, y4) = (idx(&y3_set)?, idx(&y4_set)?);
                let fixed = [idx(&x0)?, idx(&x1)?, x2, idx(&y0)?];
                let pairs = [[idx(&y1)?, idx(&y2)?], [y3, y4]];
                // a multiplier coprime to 9p carrying Y4 onto Y3
                let m = (1..45i64)
                    .filter(|&m| m % 3 != 0 && m % 5 != 0)
                    .find(|&m| {
                        let mut img: Vec<usize> = y4_set.iter().map(|&x| g.mul(x, m)).collect();
                        img.sort_unstable();
                        img == y3_set
                    })
                    .ok_or_else(|| Error::InternalInvariant("no multiplier moves Y4 to Y3".into()))?;
                let sm = sigma(m);
                (
                    pair_respecting_maps(star.rank(), &fixed, &pairs, &[]),
                    vec![identity.clone(), f0.clone(), sm.clone(), then(&sm, &f0)],
                )
            }
        };
        let found: BTreeSet<Vec<usize>> = find_algebraic_isos(&star, &star).into_iter().map(|phi| phi.class_map).collect();
        let induced = induced_maps(&star, &inducers);
        let mut searched = 0;
        for phi in &found {
            let phi = AlgIso { class_map: phi.clone() };
            if let Some(f) = find_inducing_iso(&star, &star, &phi, &mut Budget::new(node_budget()))? {
                if induced_algebraic_iso(&f, &star, &star).as_ref() == Some(&phi) {
                    searched += 1;
                }
            }
        }
        let ok = found == expected && induced.as_ref() == Some(&expected) && searched == found.len();
        pass &= ok;
        details.push(format!(
            "A{case}*: {} algebraic isomorphisms, {} pair-respecting maps, explicit maps induce {}, searched inducing maps {searched}",
            found.len(),
            expected.len(),
            induced.map_or("a non-isomorphism".to_string(), |s| format!("{} of them", s.intersection(&expected).count()))
        ));
    }
    Ok(Verdict::new(pass, details.join("; ")))
}

/// `f₀: a ↦ a⁻¹, b ↦ b, z ↦ z` as a point map on `E₉ × C_p`.
fn f0_map(g: &Group, a: usize, b: usize, z: usize, p: usize) -> Vec<usize> {
    let mut map = vec![usize::MAX; g.order()];
    for i in 0..3i64 {
        for j in 0..3i64 {
            for k in 0..p as i64 {
                let source = g.add(g.add(g.mul(a, i), g.mul(b, j)), g.mul(z, k));
                let image = g.add(g.add(g.mul(a, -i), g.mul(b, j)), g.mul(z, k));
                map[source] = image;
            }
        }
    }
    assert!(!map.contains(&usize::MAX), "a, b, z generate the group");
    map
}

fn property_suites() -> Outcome {
    let orders: Vec<usize> = (1..=27).chain([45]).collect();
    let pool = catalog_pool(&orders);
    let rings: usize = pool.iter().map(|(_, all)| all.len()).sum();
    let cases = 10_000;
    let index = || (any::<usize>(), any::<usize>());
    let constants = sample_failures(1, cases, (index(), any::<usize>(), any::<usize>()), |&((gi, mi), x, y)| {
        check_structure_constants(pick(&pool, gi, mi), x, y)
    });
    let coset = sample_failures(2, cases, (index(), any::<usize>(), any::<usize>()), |&((gi, mi), x, h)| {
        check_coset_intersections(pick(&pool, gi, mi), x, h)
    });
    let multiplier = sample_failures(3, cases, (index(), any::<usize>()), |&((gi, mi), m)| {
        check_multiplier(pick(&pool, gi, mi), m)
    });
    let closure = sample_failures(4, cases, (index(), any::<u64>()), |&((gi, mi), bits)| {
        check_closure_idempotent(pick(&pool, gi, mi), bits)
    });
    let violations = constants.len() + coset.len() + multiplier.len() + closure.len();
    let first: Vec<&String> = constants.iter().chain(&coset).chain(&multiplier).chain(&closure).take(3).collect();
    Ok(Verdict::new(
        violations == 0,
        format!(
            "{} groups of orders 1..=27 and 45, {rings} S-rings; {cases} instances per suite (structure constants, \
             coset intersections, multipliers, closure idempotence); violations {violations} {first:?}",
            pool.len()
        ),
    ))
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (1..n).filter(|_| rng.gen_bool(0.5)).collect()
}

fn random_inverse_closed(rng: &mut ChaCha8Rng, g: &Group) -> Vec<usize> {
    let mut x: Vec<usize> = Vec::new();
    for e in 1..g.order() {
        let inv = g.neg(e);
        if e <= inv && rng.gen_bool(0.5) {
            x.push(e);
            if inv != e {
                x.push(inv);
            }
        }
    }
    x.sort_unstable();
    x
}

fn random_atom_union(rng: &mut ChaCha8Rng, g: &Group) -> Vec<usize> {
    let mut atoms: Vec<Vec<usize>> = cyclic_atoms(g).into_iter().filter(|t| t[0] != 0).collect();
    atoms.shuffle(rng);
    let take = rng.gen_range(1..=atoms.len());
    let mut x: Vec<usize> = atoms[..take].concat();
    x.sort_unstable();
    x
}

fn wl_agreement(label: &str, graphs: &[PairColoring]) -> Result<(bool, String), Error> {
    let (wl, contradictions) = wl_partition(graphs);
    let iso = isomorphism_partition(graphs, true, node_budget())?;
    let agreement = compare_partitions(&wl, &iso);
    Ok((
        agreement.disagreeing_pairs == 0 && contradictions == 0,
        format!(
            "{label}: {} graphs, {} WL classes, {} isomorphism classes, {} disagreeing pairs, {contradictions} certificate contradictions",
            agreement.items, agreement.left_classes, agreement.right_classes, agreement.disagreeing_pairs
        ),
    ))
}

fn wl_versus_isomorphism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0018);
    let mut undirected = Vec::new();
    let mut directed = Vec::new();
    for g in abelian_groups_of_order(18) {
        for x in inverse_closed_sets(&g)? {
            undirected.push(cayley_digraph(&g, &x)?);
        }
        for _ in 0..100 {
            directed.push(cayley_digraph(&g, &random_subset(&mut rng, g.order()))?);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0045);
    let mut sampled = Vec::new();
    for g in abelian_groups_of_order(45) {
        for _ in 0..100 {
            sampled.push(cayley_digraph(&g, &random_inverse_closed(&mut rng, &g))?);
        }
        for _ in 0..100 {
            sampled.push(cayley_digraph(&g, &random_atom_union(&mut rng, &g))?);
        }
    }
    let runs = [
        ("order 18 inverse-closed", undirected),
        ("order 18 sampled digraphs", directed),
        ("order 45 sampled", sampled),
    ];
    let results: Vec<Result<(bool, String), Error>> =
        runs.par_iter().map(|(label, graphs)| wl_agreement(label, graphs)).collect();
    let mut pass = true;
    let mut detail = Vec::new();
    for r in results {
        let (ok, d) = r?;
        pass &= ok;
        detail.push(d);
    }
    Ok(Verdict::new(pass, detail.join("; ")))
}

fn main() {
    let cache = tempfile::tempdir().expect("temporary cache directory");
    std::env::set_var("SCHURKIT_CACHE", cache.path());
    let selected: BTreeSet<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(u8, &str, fn() -> Outcome); 11] = [
        (1, "enumeration matches the axiom oracle for orders <= 8", oracle_equivalence),
        (2, "prime-order counts and cyclotomic cross-check", prime_counts),
        (3, "order-18 S-rings are rank 2, tensor, or S-wreath with |S| <= 3", order_eighteen_classification),
        (4, "separability at orders 18 and 45 with replay", separability),
        (5, "cyclotomic family line indices", cyclotomic_line_indices),
        (6, "class-size signatures of the families", family_size_signatures),
        (7, "algebraic non-isomorphism matrix", nonisomorphism_matrix),
        (8, "witness sets generate A_i(M) and meet (C1)-(C4)", witness_generation),
        (9, "inducing isomorphisms for A1*, A2*, A3* at p = 5", star_case_isomorphisms),
        (10, "randomized property suites", property_suites),
        (11, "2-WL equivalence agrees with isomorphism", wl_versus_isomorphism),
    ];
    let mut unexpected = Vec::new();
    let mut summary = BTreeMap::new();
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let verdict = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => Verdict::new(false, format!("error: {e}")),
            Err(_) => Verdict::new(false, "panicked"),
        };
        let status = if verdict.pass { "PASS" } else { "FAIL" };
        let note = if !verdict.pass && verdict.documented { " [documented failure]" } else { "" };
        println!(
            "criterion {id:>2}: {status}{note}  {name}  ({}; {:.1}s)",
            verdict.detail,
            start.elapsed().as_secs_f64()
        );
        if !verdict.pass && !verdict.documented {
            unexpected.push(id);
        }
        *summary.entry(status).or_insert(0) += 1;
    }
    println!("acceptance: {summary:?}, unexpected failures {unexpected:?}");
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
