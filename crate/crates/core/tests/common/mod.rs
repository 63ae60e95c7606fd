//! Independent oracles and property checks shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use schurkit::closure::{closure_of_partition, closure_of_sets};
use schurkit::enumeration::enumerate_srings;
use schurkit::group::{abelian_groups_of_order, Group};
use schurkit::SRing;

pub type Partition = Vec<Vec<usize>>;

/// Every partition of `G` with `{e}` a class that satisfies the S-ring axioms,
/// found by listing all set partitions of `G#` and testing each one directly.
pub fn oracle_partitions(g: &Group) -> BTreeSet<Partition> {
    let n = g.order();
    let mut out = BTreeSet::new();
    let mut labels = vec![0usize; n];
    fn grow(g: &Group, x: usize, blocks: usize, labels: &mut Vec<usize>, out: &mut BTreeSet<Partition>) {
        let n = g.order();
        if x == n {
            let mut classes: Partition = vec![Vec::new(); blocks];
            for (e, &l) in labels.iter().enumerate() {
                classes[l].push(e);
            }
            if satisfies_axioms(g, &classes, labels) {
                classes.sort();
                out.insert(classes);
            }
            return;
        }
        for l in 1..=blocks {
            labels[x] = l;
            grow(g, x + 1, blocks.max(l + 1), labels, out);
        }
    }
    if n == 1 {
        out.insert(vec![vec![0]]);
        return out;
    }
    labels[0] = 0;
    grow(g, 1, 1, &mut labels, &mut out);
    out
}

/// The three axioms: `{e}` is a class, inverses of classes are classes, and
/// every product of class sums is constant on classes.
pub fn satisfies_axioms(g: &Group, classes: &[Vec<usize>], labels: &[usize]) -> bool {
    let n = g.order();
    if classes.iter().any(|c| c.is_empty()) || classes[labels[0]] != [0] {
        return false;
    }
    for c in classes {
        let l = labels[g.neg(c[0])];
        let mut inv: Vec<usize> = c.iter().map(|&x| g.neg(x)).collect();
        inv.sort_unstable();
        if inv != classes[l] {
            return false;
        }
    }
    for cx in classes {
        for cy in classes {
            let mut counts = vec![0u32; n];
            for &x in cx {
                for &y in cy {
                    counts[g.add(x, y)] += 1;
                }
            }
            if classes.iter().any(|cz| cz.iter().any(|&z| counts[z] != counts[cz[0]])) {
                return false;
            }
        }
    }
    true
}

pub fn canonical(a: &SRing) -> Partition {
    let mut classes = a.classes().to_vec();
    for c in &mut classes {
        c.sort_unstable();
    }
    classes.sort();
    classes
}

/// Catalogs of every abelian group of each listed order.
pub fn catalog_pool(orders: &[usize]) -> Vec<(Arc<Group>, Vec<SRing>)> {
    orders
        .iter()
        .flat_map(|&n| abelian_groups_of_order(n))
        .map(|g| {
            let all = enumerate_srings(&g).expect("enumeration succeeds").all;
            (g, all)
        })
        .collect()
}

pub fn seeded_runner(seed: u8, cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

/// Draws `cases` values from `strategy` with a fixed seed and returns the
/// descriptions of all instances on which `check` fails.
pub fn sample_failures<S: Strategy>(
    seed: u8,
    cases: u32,
    strategy: S,
    mut check: impl FnMut(&S::Value) -> Option<String>,
) -> Vec<String> {
    let mut runner = seeded_runner(seed, cases);
    let mut failures = Vec::new();
    for _ in 0..cases {
        let value = strategy.new_tree(&mut runner).expect("strategy generates").current();
        if let Some(msg) = check(&value) {
            failures.push(msg);
        }
    }
    failures
}

/// A catalog member chosen by (group index, member index), each reduced modulo
/// the available range.
pub fn pick<'a>(pool: &'a [(Arc<Group>, Vec<SRing>)], group: usize, member: usize) -> &'a SRing {
    let (_, all) = &pool[group % pool.len()];
    &all[member % all.len()]
}

/// `Σ_Z c^Z_{X,Y}|Z| = |X||Y|`, `c^e_{X,Y} = δ_{Y,X⁻¹}|X|`, and every stored
/// constant equals a direct count of representations.
pub fn check_structure_constants(a: &SRing, x: usize, y: usize) -> Option<String> {
    let g = a.group();
    let r = a.rank();
    let (x, y) = (x % r, y % r);
    let mut counts = vec![0u32; g.order()];
    for &u in a.class(x) {
        for &v in a.class(y) {
            counts[g.add(u, v)] += 1;
        }
    }
    let mut weighted = 0usize;
    for z in 0..r {
        let c = a.structure_constant(x, y, z);
        if c != counts[a.class(z)[0]] {
            return Some(format!("{:?}: c({x},{y},{z}) = {c}, direct count {}", a.group().factors(), counts[a.class(z)[0]]));
        }
        weighted += c as usize * a.size(z);
    }
    if weighted != a.size(x) * a.size(y) {
        return Some(format!("{:?}: weighted sum {weighted} for classes {x},{y}", g.factors()));
    }
    let identity_class = a.class_of(0);
    let expected = if a.inverse_class(x) == y { a.size(x) as u32 } else { 0 };
    if a.structure_constant(x, y, identity_class) != expected {
        return Some(format!("{:?}: identity coefficient of classes {x},{y}", g.factors()));
    }
    None
}

/// `|X ∩ Hx|` is the same for every `x ∈ X`, for an A-subgroup `H`.
pub fn check_coset_intersections(a: &SRing, class: usize, subgroup: usize) -> Option<String> {
    let g = a.group();
    let subgroups = a.a_subgroups().expect("A-subgroups");
    let h = &subgroups[subgroup % subgroups.len()];
    let x = a.class(class % a.rank());
    let members: BTreeSet<usize> = x.iter().copied().collect();
    let sizes: BTreeSet<usize> = x
        .iter()
        .map(|&e| h.members().iter().filter(|&&t| members.contains(&g.add(t, e))).count())
        .collect();
    (sizes.len() != 1).then(|| format!("{:?}: |X ∩ Hx| takes values {sizes:?}", g.factors()))
}

/// `X^(m)` is a basic set for every basic set `X` and every `m` coprime to `|G|`.
pub fn check_multiplier(a: &SRing, m_seed: usize) -> Option<String> {
    let g = a.group();
    let n = g.order();
    let units: Vec<usize> = (1..=n.max(1)).filter(|&m| gcd(m, n) == 1).collect();
    let m = units[m_seed % units.len()];
    let classes: BTreeSet<Vec<usize>> = canonical(a).into_iter().collect();
    for c in a.classes() {
        let mut image: Vec<usize> = c.iter().map(|&e| g.mul(e, m as i64)).collect();
        image.sort_unstable();
        if !classes.contains(&image) {
            return Some(format!("{:?}: image of {c:?} under x -> {m}x is not a basic set", g.factors()));
        }
    }
    None
}

/// Closing a ring's own partition returns it; closing a random seed set gives
/// a ring in which the seed is a union of classes and which closes to itself.
pub fn check_closure_idempotent(a: &SRing, seed_bits: u64) -> Option<String> {
    let g = a.group();
    let again = closure_of_partition(g, a.classes());
    if &again != a {
        return Some(format!("{:?}: closure of an S-ring's partition differs", g.factors()));
    }
    let seed: Vec<usize> = (1..g.order()).filter(|&e| seed_bits >> (e % 64) & 1 == 1).collect();
    let closed = closure_of_sets(g, &[seed.clone()]);
    if !closed.is_a_set(&seed) {
        return Some(format!("{:?}: seed {seed:?} is not a union of classes of its closure", g.factors()));
    }
    if closure_of_partition(g, closed.classes()) != closed {
        return Some(format!("{:?}: closure of seed {seed:?} is not idempotent", g.factors()));
    }
    None
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
