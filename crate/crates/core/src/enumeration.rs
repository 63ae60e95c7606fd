//! Exhaustive enumeration of S-rings over small abelian groups, reduction
//! up to Cayley isomorphism, and structural classification.
//!
//! The main enumerator works in two stages. Every S-ring over an abelian
//! group is a fission of its rational fusion (classes closed under all power
//! maps `x ↦ mx`, `gcd(m, |G|) = 1`), whose classes are unions of the sets
//! `T_C` of generators of cyclic subgroups `C`. Stage one enumerates the
//! rational S-rings as partitions of those atoms; stage two splits each
//! rational class `R` into pieces permuted transitively by the multiplier
//! group `M`. If `H ≤ M` is the stabilizer of a piece `X`, then `X` meets
//! each atom `T_C ⊆ R` in exactly one `H`-orbit and `H` contains the kernel
//! of `M` on every such `C`. Both stages prune with the Schur–Wielandt
//! closure of the partial partition.

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::closure::Refiner;
use crate::constructions::{all_well_defined, build_a_star, Flavor};
use crate::error::{Error, Result};
use crate::group::{orbits, Group, GroupMap, Section, Subgroup};
use crate::iso::{
    algebraic_invariant, find_automorphism_over, find_combinatorial_iso, first_cayley_iso,
    for_each_cayley_iso_inducing, is_normal_sring, sring_automorphisms, AlgIso, Budget,
};
use crate::json::{read_catalog, write_catalog_atomic};
use crate::sring::{radical, validate_partition, SRing};

/// Largest group order accepted by the enumerators.
pub const ENUMERATION_CAP: usize = 63;
/// Part of the cache key; bump when enumeration output could change.
pub const ENUMERATOR_VERSION: &str = "rational-fission-1";

/// A Cayley-isomorphism class of catalog members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CayleyClass {
    pub representative: usize,
    pub orbit_size: usize,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SRingCatalog {
    pub group: Arc<Group>,
    pub all: Vec<SRing>,
    pub up_to_cayley: Vec<CayleyClass>,
}

impl SRingCatalog {
    pub fn representatives(&self) -> Vec<&SRing> {
        self.up_to_cayley.iter().map(|c| &self.all[c.representative]).collect()
    }
}

fn check_cap(g: &Group) -> Result<()> {
    if g.order() > ENUMERATION_CAP {
        return Err(Error::TooLarge(format!(
            "enumeration is capped at order {ENUMERATION_CAP}, got {}",
            g.order()
        )));
    }
    Ok(())
}

/// Sorted classes, used as an order-independent key for a partition.
pub(crate) fn partition_key(classes: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut key: Vec<Vec<usize>> = classes
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        })
        .collect();
    key.sort();
    key
}

/// The sets of generators of the cyclic subgroups, ordered by smallest member.
pub fn cyclic_atoms(g: &Group) -> Vec<Vec<usize>> {
    let n = g.order();
    let mut seen = vec![false; n];
    let mut atoms = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let ord = g.element_order(x);
        let mut atom: Vec<usize> = (1..=ord.max(1))
            .filter(|&k| crate::arith::gcd(k as u64, ord as u64) == 1)
            .map(|k| g.mul(x, k as i64))
            .collect();
        atom.sort_unstable();
        atom.dedup();
        for &y in &atom {
            seen[y] = true;
        }
        atoms.push(atom);
    }
    atoms
}

/// Checks that every listed class is exactly one class of `stable`.
fn classes_are_stable(stable: &[u32], classes: &[&[usize]], counts: &[usize]) -> bool {
    classes.iter().all(|c| {
        let l = stable[c[0]];
        c.iter().all(|&x| stable[x] == l) && counts[l as usize] == c.len()
    })
}

fn label_counts(stable: &[u32]) -> Vec<usize> {
    let mut counts = vec![0usize; stable.iter().map(|&l| l as usize + 1).max().unwrap_or(0)];
    for &l in stable {
        counts[l as usize] += 1;
    }
    counts
}

// ---------------------------------------------------------------------------
// Multiplier group
// ---------------------------------------------------------------------------

/// The unit group modulo the exponent, with all its subgroups as bitmasks.
struct Multipliers {
    units: Vec<u64>,
    exponent: u64,
    subgroups: Vec<u64>,
}

impl Multipliers {
    fn new(g: &Group) -> Multipliers {
        let exponent = g.exponent().max(1) as u64;
        let units = g.multiplier_units();
        assert!(units.len() <= 64, "multiplier group too large for bitmask subgroups");
        let mut m = Multipliers { units, exponent, subgroups: Vec::new() };
        let mut subgroups: BTreeSet<u64> = BTreeSet::new();
        let trivial = m.generate(&[0]);
        let mut frontier = vec![trivial];
        subgroups.insert(trivial);
        while let Some(h) = frontier.pop() {
            for i in 0..m.units.len() {
                if h >> i & 1 == 1 {
                    continue;
                }
                let bigger = m.generate_from(h, i);
                if subgroups.insert(bigger) {
                    frontier.push(bigger);
                }
            }
        }
        m.subgroups = subgroups.into_iter().collect();
        m
    }

    fn index_of(&self, u: u64) -> usize {
        self.units.binary_search(&u).expect("unit")
    }

    fn mul(&self, i: usize, j: usize) -> usize {
        self.index_of(self.units[i] * self.units[j] % self.exponent)
    }

    fn generate(&self, gens: &[usize]) -> u64 {
        let mut h = 0u64;
        for &i in gens {
            h = self.generate_from(h | 1, i);
        }
        h | 1
    }

    fn generate_from(&self, h: u64, extra: usize) -> u64 {
        let mut mask = h | 1 | (1 << extra);
        loop {
            let mut next = mask;
            for i in 0..self.units.len() {
                if mask >> i & 1 == 0 {
                    continue;
                }
                for j in 0..self.units.len() {
                    if mask >> j & 1 == 1 {
                        next |= 1 << self.mul(i, j);
                    }
                }
            }
            if next == mask {
                return mask;
            }
            mask = next;
        }
    }

    /// Units acting trivially on elements of order `d`.
    fn kernel(&self, d: usize) -> u64 {
        let mut mask = 0u64;
        for (i, &u) in self.units.iter().enumerate() {
            if u % d as u64 == 1 % d as u64 {
                mask |= 1 << i;
            }
        }
        mask
    }

    fn coset_reps(&self, h: u64) -> Vec<usize> {
        let mut covered = 0u64;
        let mut reps = Vec::new();
        for i in 0..self.units.len() {
            if covered >> i & 1 == 1 {
                continue;
            }
            reps.push(i);
            for j in 0..self.units.len() {
                if h >> j & 1 == 1 {
                    covered |= 1 << self.mul(i, j);
                }
            }
        }
        reps
    }
}

/// All ways to split a rational class (given by its atoms) into pieces
/// permuted transitively by the multiplier group.
fn fission_options(g: &Group, mult: &Multipliers, atoms: &[&[usize]]) -> Vec<Vec<Vec<usize>>> {
    let mut kernel_gens = Vec::new();
    for atom in atoms {
        let k = mult.kernel(g.element_order(atom[0]));
        for i in 0..mult.units.len() {
            if k >> i & 1 == 1 {
                kernel_gens.push(i);
            }
        }
    }
    let floor = mult.generate(&kernel_gens);
    let mut out: BTreeSet<Vec<Vec<usize>>> = BTreeSet::new();
    for &h in mult.subgroups.iter().filter(|&&h| h & floor == floor) {
        let reps = mult.coset_reps(h);
        let orbit = |x: usize, r: usize| -> Vec<usize> {
            (0..mult.units.len())
                .filter(|&j| h >> j & 1 == 1)
                .map(|j| g.mul(x, mult.units[mult.mul(r, j)] as i64))
                .collect()
        };
        let k = atoms.len();
        let mut choice = vec![0usize; k];
        loop {
            let mut piece: Vec<usize> = Vec::new();
            for (a, atom) in atoms.iter().enumerate() {
                piece.extend(orbit(atom[0], reps[choice[a]]));
            }
            let mut parts: Vec<Vec<usize>> = reps
                .iter()
                .map(|&r| {
                    let mut p: Vec<usize> = piece.iter().map(|&x| g.mul(x, mult.units[r] as i64)).collect();
                    p.sort_unstable();
                    p.dedup();
                    p
                })
                .collect();
            parts.sort();
            out.insert(parts);
            // odometer over atoms 1..k; atom 0 stays on the trivial coset
            let mut pos = 1;
            while pos < k {
                choice[pos] += 1;
                if choice[pos] < reps.len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos >= k {
                break;
            }
        }
    }
    out.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Stage one: rational S-rings
// ---------------------------------------------------------------------------

fn rational_partitions(g: &Group, atoms: &[Vec<usize>]) -> Result<Vec<Vec<Vec<usize>>>> {
    let n = g.order();
    let k = atoms.len();
    let mut refiner = Refiner::new(g);
    let mut out = Vec::new();
    // atom 0 is {e}
    let mut class_of_atom = vec![u32::MAX; k];
    class_of_atom[0] = 0;
    let mut initial: Vec<u32> = (0..n).map(|x| (x != 0) as u32).collect();
    refiner.stabilize(&mut initial);

    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: &Group,
        atoms: &[Vec<usize>],
        class_of_atom: &mut Vec<u32>,
        next_class: u32,
        stable: &[u32],
        refiner: &mut Refiner,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) -> Result<()> {
        let Some(first) = class_of_atom.iter().position(|&c| c == u32::MAX) else {
            let mut classes = vec![Vec::new(); next_class as usize];
            for (a, atom) in atoms.iter().enumerate() {
                classes[class_of_atom[a] as usize].extend_from_slice(atom);
            }
            out.push(partition_key(&classes));
            return Ok(());
        };
        let home = stable[atoms[first][0]];
        let pool: Vec<usize> = (first + 1..atoms.len())
            .filter(|&a| class_of_atom[a] == u32::MAX && stable[atoms[a][0]] == home)
            .collect();
        if pool.len() > 30 {
            return Err(Error::TooLarge(format!("{} atoms in one closure class", pool.len())));
        }
        let n = g.order();
        for mask in 0u64..(1u64 << pool.len()) {
            class_of_atom[first] = next_class;
            for (bit, &a) in pool.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    class_of_atom[a] = next_class;
                }
            }
            let unassigned = next_class + 1;
            let mut labels = vec![unassigned; n];
            for (a, atom) in atoms.iter().enumerate() {
                if class_of_atom[a] != u32::MAX {
                    for &x in atom {
                        labels[x] = class_of_atom[a];
                    }
                }
            }
            refiner.stabilize(&mut labels);
            let counts = label_counts(&labels);
            let mut done: Vec<Vec<usize>> = vec![Vec::new(); next_class as usize + 1];
            for (a, atom) in atoms.iter().enumerate() {
                if class_of_atom[a] != u32::MAX {
                    done[class_of_atom[a] as usize].extend_from_slice(atom);
                }
            }
            let refs: Vec<&[usize]> = done.iter().map(|c| c.as_slice()).collect();
            if classes_are_stable(&labels, &refs, &counts) {
                rec(g, atoms, class_of_atom, next_class + 1, &labels, refiner, out)?;
            }
            class_of_atom[first] = u32::MAX;
            for &a in &pool {
                class_of_atom[a] = u32::MAX;
            }
        }
        Ok(())
    }

    rec(g, atoms, &mut class_of_atom, 1, &initial, &mut refiner, &mut out)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Stage two: fissions
// ---------------------------------------------------------------------------

fn fissions_of(g: &Group, mult: &Multipliers, atoms: &[Vec<usize>], rational: &[Vec<usize>]) -> Vec<Vec<Vec<usize>>> {
    let n = g.order();
    let atom_of: Vec<usize> = {
        let mut v = vec![0; n];
        for (i, a) in atoms.iter().enumerate() {
            for &x in a {
                v[x] = i;
            }
        }
        v
    };
    // nontrivial rational classes with their split options, fewest options first
    let mut work: Vec<(usize, Vec<Vec<Vec<usize>>>)> = rational
        .iter()
        .enumerate()
        .filter(|(_, c)| c[0] != 0)
        .map(|(i, c)| {
            let mut ids: Vec<usize> = c.iter().map(|&x| atom_of[x]).collect();
            ids.sort_unstable();
            ids.dedup();
            let class_atoms: Vec<&[usize]> = ids.iter().map(|&a| atoms[a].as_slice()).collect();
            (i, fission_options(g, mult, &class_atoms))
        })
        .collect();
    work.sort_by_key(|(i, opts)| (opts.len(), *i));

    let mut refiner = Refiner::new(g);
    let mut labels = vec![0u32; n];
    for (i, c) in rational.iter().enumerate() {
        for &x in c {
            labels[x] = i as u32;
        }
    }
    let mut out = Vec::new();
    let mut decided: Vec<Vec<usize>> = vec![vec![0]];

    #[allow(clippy::too_many_arguments)]
    fn rec(
        depth: usize,
        work: &[(usize, Vec<Vec<Vec<usize>>>)],
        rational: &[Vec<usize>],
        stable: &[u32],
        decided: &mut Vec<Vec<usize>>,
        refiner: &mut Refiner,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if depth == work.len() {
            out.push(partition_key(decided));
            return;
        }
        let n = stable.len();
        for option in &work[depth].1 {
            if !option.iter().all(|p| p.iter().all(|&x| stable[x] == stable[p[0]])) {
                continue;
            }
            let before = decided.len();
            decided.extend(option.iter().cloned());
            // decided pieces get their own labels, the rest keep rational labels
            let mut labels = vec![0u32; n];
            let base = rational.len() as u32;
            for (i, c) in rational.iter().enumerate() {
                for &x in c {
                    labels[x] = i as u32;
                }
            }
            for (j, p) in decided.iter().enumerate() {
                for &x in p {
                    labels[x] = base + j as u32;
                }
            }
            refiner.stabilize(&mut labels);
            let counts = label_counts(&labels);
            let refs: Vec<&[usize]> = decided.iter().map(|c| c.as_slice()).collect();
            if classes_are_stable(&labels, &refs, &counts) {
                rec(depth + 1, work, rational, &labels, decided, refiner, out);
            }
            decided.truncate(before);
        }
    }

    refiner.stabilize(&mut labels);
    rec(0, &work, rational, &labels, &mut decided, &mut refiner, &mut out);
    out
}

/// Every S-ring over `g`, sorted by class list, bypassing the disk cache.
pub fn enumerate_srings_uncached(g: &Arc<Group>) -> Result<Vec<SRing>> {
    check_cap(g)?;
    let atoms = cyclic_atoms(g);
    let mult = Multipliers::new(g);
    let rational = rational_partitions(g, &atoms)?;
    let mut keys: Vec<Vec<Vec<usize>>> = rational
        .par_iter()
        .flat_map_iter(|r| fissions_of(g, &mult, &atoms, r))
        .collect();
    keys.sort();
    keys.dedup();
    let mut rings: Vec<SRing> = keys
        .into_par_iter()
        .map(|k| validate_partition(g, k))
        .collect::<Result<Vec<_>>>()?;
    rings.sort_by(|a, b| a.classes().cmp(b.classes()));
    Ok(rings)
}

/// Depth-first construction of the basic set containing the smallest
/// unassigned element, pruned by power-map compatibility and closure
/// consistency. Exponential in the group order; a cross-check for small groups.
pub fn enumerate_srings_direct(g: &Arc<Group>) -> Result<Vec<SRing>> {
    check_cap(g)?;
    let n = g.order();
    let units = g.multiplier_units();
    let mut refiner = Refiner::new(g);
    let mut class_of = vec![u32::MAX; n];
    class_of[0] = 0;
    let mut stable: Vec<u32> = (0..n).map(|x| (x != 0) as u32).collect();
    refiner.stabilize(&mut stable);
    let mut out = Vec::new();

    fn rec(
        g: &Group,
        units: &[u64],
        class_of: &mut Vec<u32>,
        classes: &mut Vec<Vec<usize>>,
        stable: &[u32],
        refiner: &mut Refiner,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) -> Result<()> {
        let n = g.order();
        let Some(x) = class_of.iter().position(|&c| c == u32::MAX) else {
            out.push(partition_key(classes));
            return Ok(());
        };
        let pool: Vec<usize> = (x + 1..n).filter(|&y| class_of[y] == u32::MAX && stable[y] == stable[x]).collect();
        if pool.len() > 24 {
            return Err(Error::TooLarge(format!("direct enumeration pool of {} elements", pool.len())));
        }
        let label = classes.len() as u32;
        let mut member = vec![false; n];
        'subsets: for mask in 0u64..(1u64 << pool.len()) {
            let mut set = vec![x];
            set.extend(pool.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &y)| y));
            for &y in &set {
                member[y] = true;
            }
            // X^(m) must equal X or avoid it
            let compatible = units.iter().all(|&m| {
                let hits = set.iter().filter(|&&y| member[g.mul(y, m as i64)]).count();
                hits == 0 || hits == set.len()
            });
            if compatible {
                for &y in &set {
                    class_of[y] = label;
                }
                classes.push(set.clone());
                let unassigned = label + 1;
                let mut labels: Vec<u32> = class_of.iter().map(|&c| if c == u32::MAX { unassigned } else { c }).collect();
                refiner.stabilize(&mut labels);
                let counts = label_counts(&labels);
                let refs: Vec<&[usize]> = classes.iter().map(|c| c.as_slice()).collect();
                let ok = classes_are_stable(&labels, &refs, &counts);
                if ok {
                    rec(g, units, class_of, classes, &labels, refiner, out)?;
                }
                classes.pop();
                for &y in &set {
                    class_of[y] = u32::MAX;
                }
            }
            for &y in &set {
                member[y] = false;
            }
            if !compatible {
                continue 'subsets;
            }
        }
        Ok(())
    }

    let mut classes = vec![vec![0usize]];
    rec(g, &units, &mut class_of, &mut classes, &stable, &mut refiner, &mut out)?;
    let mut rings: Vec<SRing> = out.into_iter().map(|k| validate_partition(g, k)).collect::<Result<_>>()?;
    rings.sort_by(|a, b| a.classes().cmp(b.classes()));
    Ok(rings)
}

/// Orbits of `Aut(G)` on the catalog, with the smallest index as representative.
pub fn dedupe_cayley(g: &Arc<Group>, all: &[SRing]) -> Result<Vec<CayleyClass>> {
    let auts = g.automorphisms()?;
    let index: HashMap<Vec<Vec<usize>>, usize> =
        all.iter().enumerate().map(|(i, a)| (partition_key(a.classes()), i)).collect();
    let mut seen = vec![false; all.len()];
    let mut out = Vec::new();
    for i in 0..all.len() {
        if seen[i] {
            continue;
        }
        let mut members = BTreeSet::new();
        for f in &auts {
            let image: Vec<Vec<usize>> = all[i].classes().iter().map(|c| f.image_of_set(c)).collect();
            let j = *index.get(&partition_key(&image)).ok_or_else(|| {
                Error::InternalInvariant("catalog is not closed under group automorphisms".into())
            })?;
            members.insert(j);
        }
        for &j in &members {
            seen[j] = true;
        }
        let members: Vec<usize> = members.into_iter().collect();
        out.push(CayleyClass { representative: members[0], orbit_size: members.len(), members });
    }
    Ok(out)
}

fn cache_path(g: &Group) -> Option<PathBuf> {
    let dir = std::env::var_os("SCHURKIT_CACHE")?;
    let mut hasher = Sha256::new();
    hasher.update(format!("{ENUMERATOR_VERSION}:{}", g.spec_string()));
    Some(PathBuf::from(dir).join(format!("{}.jsonl", hex::encode(hasher.finalize()))))
}

/// The full catalog over `g`, read from or written to `$SCHURKIT_CACHE` when set.
pub fn enumerate_srings(g: &Arc<Group>) -> Result<SRingCatalog> {
    check_cap(g)?;
    let cached = cache_path(g);
    let all = match cached.as_ref().filter(|p| p.exists()) {
        Some(path) => {
            let rings = read_catalog(path)?;
            if rings.iter().any(|a| a.group() != g) {
                return Err(Error::InvalidInput(format!("cache file {} is for another group", path.display())));
            }
            rings
        }
        None => {
            let rings = enumerate_srings_uncached(g)?;
            if let Some(path) = &cached {
                write_catalog_atomic(path, &rings)?;
            }
            rings
        }
    };
    let up_to_cayley = dedupe_cayley(g, &all)?;
    Ok(SRingCatalog { group: g.clone(), all, up_to_cayley })
}

// ---------------------------------------------------------------------------
// Radicals and classification
// ---------------------------------------------------------------------------

/// `p` when `|G| = 9p` with `p ≥ 5` prime.
fn nine_p(g: &Group) -> Option<usize> {
    let n = g.order();
    (n % 9 == 0 && n / 9 >= 5 && crate::arith::is_prime((n / 9) as u64)).then_some(n / 9)
}

/// The radical of an S-ring over a cyclic group (from a basic set containing
/// a generator) or over `E₉ × C_p` (generated by the radicals of the basic
/// sets containing an element of order `3p`).
pub fn radical_of_sring(a: &SRing) -> Result<Subgroup> {
    let g = a.group();
    let target_order = if g.is_cyclic() {
        g.order()
    } else if let Some(p) = nine_p(g) {
        3 * p
    } else {
        return Err(Error::InvalidInput(format!(
            "the radical of an S-ring is defined here for cyclic groups and E9 x C_p, not {}",
            g.spec_string()
        )));
    };
    let qualifying: Vec<usize> = (0..a.rank())
        .filter(|&c| a.class(c).iter().any(|&x| g.element_order(x) == target_order))
        .collect();
    if qualifying.is_empty() {
        return Err(Error::UndefinedRadical(format!("no basic set has an element of order {target_order}")));
    }
    let radicals: Vec<Subgroup> = qualifying.iter().map(|&c| radical(g, a.class(c))).collect::<Result<_>>()?;
    if g.is_cyclic() {
        if radicals.iter().any(|r| r != &radicals[0]) {
            return Err(Error::InternalInvariant("basic sets with generators have different radicals".into()));
        }
        return Ok(radicals[0].clone());
    }
    let gens: Vec<usize> = radicals.iter().flat_map(|r| r.members().iter().copied()).collect();
    Ok(g.subgroup_generated(&gens))
}

/// One satisfied structural statement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum Tag {
    Rank2,
    /// `A = A_{G1} ⊗ A_{G2}` for A-subgroups of the given orders.
    TensorDecomposable { left: usize, right: usize },
    /// A nontrivial S-wreath product over the section `U/L`.
    SWreath {
        upper: Vec<usize>,
        lower: Vec<usize>,
        section_order: usize,
        aut_condition: Option<bool>,
    },
    /// Combinatorially isomorphic to `A_i*`.
    FamilyStar { i: u8 },
    NormalCyclotomicTrivialRadical,
    /// Cayley isomorphic to the cyclotomic family `A_line(M)` with `|M| = m_order`.
    CyclotomicTable1 { line: u8, m_order: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationTag {
    pub tags: Vec<Tag>,
}

impl ClassificationTag {
    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn has_rank2(&self) -> bool {
        self.tags.contains(&Tag::Rank2)
    }

    pub fn has_tensor(&self) -> bool {
        self.tags.iter().any(|t| matches!(t, Tag::TensorDecomposable { .. }))
    }

    /// Some nontrivial S-wreath section with `|S| ≤ bound`.
    pub fn has_s_wreath_within(&self, bound: usize) -> bool {
        self.tags
            .iter()
            .any(|t| matches!(t, Tag::SWreath { section_order, .. } if *section_order <= bound))
    }

    /// An S-wreath section whose automorphism condition was checked and holds.
    pub fn has_s_wreath_with_aut_condition(&self) -> bool {
        self.tags
            .iter()
            .any(|t| matches!(t, Tag::SWreath { aut_condition: Some(true), .. }))
    }

    pub fn has_family_star(&self) -> bool {
        self.tags.iter().any(|t| matches!(t, Tag::FamilyStar { .. }))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    /// Check `Aut(A_U)^S = Aut(A_S)` for every S-wreath section.
    pub aut_condition: bool,
    /// Compare against the order-9p families.
    pub families: bool,
    /// Check normality and cyclotomicity.
    pub normal_cyclotomic: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { aut_condition: true, families: true, normal_cyclotomic: true }
    }
}

/// Reusable classification context; builds the order-9p families once.
pub struct Classifier {
    pub options: ClassifyOptions,
    stars: Vec<(u8, SRing, u64)>,
    table1: Vec<(u8, usize, SRing, u64)>,
}

impl Classifier {
    pub fn new(g: &Group, options: ClassifyOptions) -> Result<Classifier> {
        let mut stars = Vec::new();
        let mut table1 = Vec::new();
        if let (true, Some(p)) = (options.families, nine_p(g)) {
            let flavor = if g.is_cyclic() { Flavor::Cyclic } else { Flavor::Elementary };
            for i in 1..=3u8 {
                let s = build_a_star(i, flavor, p)?;
                let key = algebraic_invariant(&s);
                stars.push((i, s, key));
            }
            if !g.is_cyclic() {
                for (line, k, s) in all_well_defined(p)? {
                    let key = algebraic_invariant(&s);
                    table1.push((line, k, s, key));
                }
            }
        }
        Ok(Classifier { options, stars, table1 })
    }

    pub fn classify(&self, a: &SRing, budget: &mut Budget) -> Result<ClassificationTag> {
        let g = a.group();
        let mut tags = Vec::new();
        if a.rank() == 2 {
            tags.push(Tag::Rank2);
        }
        let subgroups = a.a_subgroups()?;
        let n = g.order();
        for (i, g1) in subgroups.iter().enumerate() {
            for g2 in &subgroups[i + 1..] {
                if g1.order() > 1 && g2.order() > 1 && g1.order() * g2.order() == n && g1.intersect(g2).is_trivial() {
                    if is_tensor_split(a, g1, g2) {
                        tags.push(Tag::TensorDecomposable { left: g1.order(), right: g2.order() });
                    }
                }
            }
        }
        for lower in subgroups.iter().filter(|l| !l.is_trivial()) {
            for upper in subgroups.iter().filter(|u| u.order() < n && lower.is_subgroup_of(u)) {
                if is_s_wreath(a, upper, lower) {
                    let aut_condition = if self.options.aut_condition {
                        Some(section_aut_condition(a, upper, lower, budget)?)
                    } else {
                        None
                    };
                    tags.push(Tag::SWreath {
                        upper: upper.members().to_vec(),
                        lower: lower.members().to_vec(),
                        section_order: upper.order() / lower.order(),
                        aut_condition,
                    });
                }
            }
        }
        if !self.stars.is_empty() || !self.table1.is_empty() {
            let key = algebraic_invariant(a);
            for (i, s, k) in &self.stars {
                if *k == key && combinatorially_isomorphic(a, s, budget)? {
                    tags.push(Tag::FamilyStar { i: *i });
                }
            }
            for (line, m_order, s, k) in &self.table1 {
                if *k == key && first_cayley_iso(a, s).is_some() {
                    tags.push(Tag::CyclotomicTable1 { line: *line, m_order: *m_order });
                }
            }
        }
        if self.options.normal_cyclotomic && a.rank() > 2 && (g.is_cyclic() || nine_p(g).is_some()) {
            let trivial_radical = match radical_of_sring(a) {
                Ok(r) => r.is_trivial(),
                Err(Error::UndefinedRadical(_)) => false,
                Err(e) => return Err(e),
            };
            if trivial_radical && is_cyclotomic(a) && is_normal_sring(a, budget)? {
                tags.push(Tag::NormalCyclotomicTrivialRadical);
            }
        }
        Ok(ClassificationTag { tags })
    }
}

/// Classifies one S-ring with default options.
pub fn classify(a: &SRing, budget: &mut Budget) -> Result<ClassificationTag> {
    Classifier::new(a.group(), ClassifyOptions::default())?.classify(a, budget)
}

fn is_tensor_split(a: &SRing, g1: &Subgroup, g2: &Subgroup) -> bool {
    let g = a.group();
    let left: Vec<usize> = (0..a.rank()).filter(|&c| g1.contains(a.class(c)[0])).collect();
    let right: Vec<usize> = (0..a.rank()).filter(|&c| g2.contains(a.class(c)[0])).collect();
    if left.len() * right.len() != a.rank() {
        return false;
    }
    left.iter().all(|&x| {
        right.iter().all(|&y| {
            let first = a.class_of(g.add(a.class(x)[0], a.class(y)[0]));
            a.size(first) == a.size(x) * a.size(y)
                && a.class(x).iter().all(|&u| a.class(y).iter().all(|&v| a.class_of(g.add(u, v)) == first))
        })
    })
}

/// Every basic set outside `upper` is a union of `lower`-cosets.
fn is_s_wreath(a: &SRing, upper: &Subgroup, lower: &Subgroup) -> bool {
    let g = a.group();
    (0..a.rank()).filter(|&c| !upper.contains(a.class(c)[0])).all(|c| {
        let class = a.class(c);
        lower.members().iter().all(|&l| class.iter().all(|&x| a.class_of(g.add(x, l)) == c))
    })
}

/// `Aut(A_U)^S = Aut(A_S)`: every generator of `Aut(A_S)` lifts to `Aut(A_U)`.
pub fn section_aut_condition(a: &SRing, upper: &Subgroup, lower: &Subgroup, budget: &mut Budget) -> Result<bool> {
    let (a_u, q_u) = a.restriction(upper)?;
    let section = Section::new(upper.clone(), lower.clone())?;
    let (a_s, q_s) = a.section_sring_with_map(&section)?;
    // coarse[u'] = image in U/L of the point u' of U
    let coarse: Vec<usize> = (0..a_u.group().order())
        .map(|u| q_s.proj[q_u.lift[u]].expect("inside U"))
        .collect();
    let aut_s = sring_automorphisms(&a_s, budget)?;
    let translations = a_s.group().generators().len();
    for gamma in aut_s.generators.iter().skip(translations) {
        if find_automorphism_over(&a_u, &coarse, gamma, budget)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Classes are the orbits of the group automorphisms fixing every class.
pub fn is_cyclotomic(a: &SRing) -> bool {
    let mut maps: Vec<GroupMap> = Vec::new();
    for_each_cayley_iso_inducing(a, a, &AlgIso::identity(a.rank()), &mut |f| {
        maps.push(f);
        true
    });
    let domain: Vec<usize> = (0..a.group().order()).collect();
    partition_key(&orbits(a.group(), &maps, &domain)) == partition_key(a.classes())
}

/// Some algebraic isomorphism `a → b` is induced by a point bijection.
pub fn combinatorially_isomorphic(a: &SRing, b: &SRing, budget: &mut Budget) -> Result<bool> {
    Ok(find_combinatorial_iso(a, b, budget)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::closure_of_sets;
    use crate::group::{abelian_groups_of_order, make_group};
    use crate::products::wreath;
    use crate::sring::{group_ring, rank_two};

    /// All partitions of `G` with `{e}` a class that satisfy the S-ring axioms.
    fn oracle(g: &Arc<Group>) -> Vec<Vec<Vec<usize>>> {
        let n = g.order();
        let mut out = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        fn rec(x: usize, n: usize, blocks: &mut Vec<Vec<usize>>, g: &Arc<Group>, out: &mut Vec<Vec<Vec<usize>>>) {
            if x == n {
                let mut classes = vec![vec![0usize]];
                classes.extend(blocks.iter().cloned());
                if validate_partition(g, classes.clone()).is_ok() {
                    out.push(partition_key(&classes));
                }
                return;
            }
            for i in 0..blocks.len() {
                blocks[i].push(x);
                rec(x + 1, n, blocks, g, out);
                blocks[i].pop();
            }
            blocks.push(vec![x]);
            rec(x + 1, n, blocks, g, out);
            blocks.pop();
        }
        rec(1, n, &mut blocks, g, &mut out);
        out.sort();
        out
    }

    fn keys(rings: &[SRing]) -> Vec<Vec<Vec<usize>>> {
        let mut k: Vec<_> = rings.iter().map(|a| partition_key(a.classes())).collect();
        k.sort();
        k
    }

    #[test]
    fn small_counts() {
        for (spec, count) in [(&[4usize][..], 3), (&[2, 2], 5), (&[5], 3), (&[7], 4), (&[2], 1), (&[3], 2)] {
            let g = make_group(spec).unwrap();
            assert_eq!(enumerate_srings_uncached(&g).unwrap().len(), count, "{spec:?}");
        }
    }

    #[test]
    fn matches_oracle_up_to_order_eight() {
        for n in 2..=8 {
            for g in abelian_groups_of_order(n) {
                let expect = oracle(&g);
                assert_eq!(keys(&enumerate_srings_uncached(&g).unwrap()), expect, "{:?}", g.factors());
                assert_eq!(keys(&enumerate_srings_direct(&g).unwrap()), expect, "{:?}", g.factors());
            }
        }
    }

    #[test]
    fn direct_and_rational_agree_beyond_oracle_range() {
        for spec in [&[9usize][..], &[3, 3], &[10], &[12], &[6, 2], &[4, 2, 2], &[16], &[8, 2], &[9, 2], &[3, 3, 2]] {
            let g = make_group(spec).unwrap();
            let fast = enumerate_srings_uncached(&g).unwrap();
            assert_eq!(keys(&fast), keys(&enumerate_srings_direct(&g).unwrap()), "{spec:?}");
        }
    }

    #[test]
    fn order_eighteen_counts() {
        // frozen from the direct enumerator, a different search over the same axioms
        assert_eq!(enumerate_srings_uncached(&make_group(&[18]).unwrap()).unwrap().len(), 42);
        assert_eq!(enumerate_srings_uncached(&make_group(&[3, 3, 2]).unwrap()).unwrap().len(), 297);
    }

    #[test]
    fn catalogs_are_closed_and_contain_extremes() {
        for spec in [&[18usize][..], &[6, 3], &[15], &[2, 2, 2]] {
            let g = make_group(spec).unwrap();
            let all = enumerate_srings_uncached(&g).unwrap();
            assert!(all.contains(&group_ring(&g)));
            assert!(all.contains(&rank_two(&g)));
            let set: BTreeSet<Vec<Vec<usize>>> = all.iter().map(|a| partition_key(a.classes())).collect();
            assert_eq!(set.len(), all.len());
            for a in &all {
                for m in g.multiplier_units() {
                    assert!(set.contains(&partition_key(a.multiplier_image(m as i64).unwrap().classes())));
                }
                assert_eq!(&crate::closure::closure_of_partition(&g, a.classes()), a);
            }
        }
    }

    #[test]
    fn cayley_orbits() {
        let g = make_group(&[5]).unwrap();
        let all = enumerate_srings_uncached(&g).unwrap();
        let classes = dedupe_cayley(&g, &all).unwrap();
        assert!(classes.iter().all(|c| c.orbit_size == 1));
        let g = make_group(&[2, 2]).unwrap();
        let all = enumerate_srings_uncached(&g).unwrap();
        let classes = dedupe_cayley(&g, &all).unwrap();
        let sizes: Vec<usize> = classes.iter().map(|c| c.orbit_size).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 5);
        assert_eq!(classes.len(), 3);
        let zg = all.iter().position(|a| a == &group_ring(&g)).unwrap();
        assert!(classes.iter().any(|c| c.members == vec![zg]));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        std::env::set_var("SCHURKIT_CACHE", dir.path());
        let g = make_group(&[6]).unwrap();
        let first = enumerate_srings(&g).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let second = enumerate_srings(&g).unwrap();
        assert_eq!(first.all, second.all);
        std::env::remove_var("SCHURKIT_CACHE");
    }

    #[test]
    fn radicals() {
        let c15 = make_group(&[15]).unwrap();
        assert!(radical_of_sring(&group_ring(&c15)).unwrap().is_trivial());
        assert!(radical_of_sring(&rank_two(&c15)).unwrap().is_trivial());
        let c3 = make_group(&[3]).unwrap();
        let embed = GroupMap::from_images(&c3, &c15, &[5]).unwrap();
        let section = Section::new(c15.whole(), c15.subgroup_generated(&[5])).unwrap();
        let q = crate::group::quotient_map(&c15, &section);
        assert_eq!(q.quotient.order(), 5);
        let w = wreath(&group_ring(&c3), &embed, &group_ring(&q.quotient), &q).unwrap();
        let rad = radical_of_sring(&w).unwrap();
        assert!(rad.order() >= 3);
        assert!(rad.contains(5));
        let g = make_group(&[4, 2]).unwrap();
        assert!(matches!(radical_of_sring(&group_ring(&g)), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn classify_examples() {
        let mut budget = Budget::default();
        let g = make_group(&[9, 5]).unwrap();
        let t = classify(&rank_two(&g), &mut budget).unwrap();
        assert!(t.has_rank2());
        let z = classify(&group_ring(&g), &mut budget).unwrap();
        assert!(z.tags.contains(&Tag::TensorDecomposable { left: 5, right: 9 }) || z.tags.contains(&Tag::TensorDecomposable { left: 9, right: 5 }));
        let star = build_a_star(1, Flavor::Elementary, 5).unwrap();
        let s = classify(&star, &mut budget).unwrap();
        assert!(s.has_family_star());
        assert!(!s.has_s_wreath_with_aut_condition());
        assert!(!s.has_rank2() && !s.has_tensor());
    }

    #[test]
    fn prime_order_cyclotomic_rings_are_normal() {
        let mut budget = Budget::default();
        let g = make_group(&[7]).unwrap();
        let a = closure_of_sets(&g, &[vec![1, 6]]);
        assert!(is_cyclotomic(&a));
        let t = classify(&a, &mut budget).unwrap();
        assert!(t.tags.contains(&Tag::NormalCyclotomicTrivialRadical));
        assert!(is_cyclotomic(&rank_two(&make_group(&[2, 2, 2]).unwrap())));
        assert!(!is_cyclotomic(&rank_two(&make_group(&[4]).unwrap())));
    }
}
