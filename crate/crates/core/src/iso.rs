//! Isomorphism searches between S-rings: algebraic isomorphisms (class
//! bijections preserving structure constants), combinatorial isomorphisms
//! (point bijections preserving basic relations), Cayley isomorphisms,
//! automorphism groups, normality and separability.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashSet};
use std::hash::{Hash, Hasher};
use std::time::Instant;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::group::{isomorphisms_filtered, GroupMap};
use crate::sring::SRing;

/// Default node budget for backtracking searches.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// A shared node counter for backtracking searches, with an optional
/// wall-clock deadline.
#[derive(Clone, Debug)]
pub struct Budget {
    pub limit: u64,
    pub used: u64,
    pub deadline: Option<Instant>,
}

impl Budget {
    pub fn new(limit: u64) -> Budget {
        Budget { limit, used: 0, deadline: None }
    }

    pub fn with_deadline(limit: u64, deadline: Option<Instant>) -> Budget {
        Budget { limit, used: 0, deadline }
    }

    fn tick(&mut self, context: &str) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::BudgetExceeded {
                budget: self.limit,
                progress: context.to_string(),
            });
        }
        if self.used % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Error::BudgetExceeded {
                budget: self.limit,
                progress: format!("wall-clock deadline reached after {} nodes: {context}", self.used),
            });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

// ---------------------------------------------------------------------------
// Point-map search over color matrices
// ---------------------------------------------------------------------------

/// A coloring of ordered pairs on `n` points, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorMatrix {
    pub n: usize,
    pub colors: Vec<u32>,
}

impl ColorMatrix {
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.colors[u * self.n + v]
    }

    pub fn num_colors(&self) -> usize {
        self.colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }
}

/// Pair colors of an S-ring: `(u, v)` gets the class of `v − u`.
pub fn sring_colors(a: &SRing) -> ColorMatrix {
    let g = a.group();
    let n = g.order();
    let mut colors = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            colors.push(a.class_of(g.sub(v, u)) as u32);
        }
    }
    ColorMatrix { n, colors }
}

/// Per-point bitsets of a target coloring: which `v` have a given out/in color.
pub(crate) struct TargetIndex {
    n: usize,
    words: usize,
    num_colors: usize,
    out_sets: Vec<u64>,
    in_sets: Vec<u64>,
}

impl TargetIndex {
    pub(crate) fn new(m: &ColorMatrix) -> TargetIndex {
        let n = m.n;
        let words = n.div_ceil(64).max(1);
        let num_colors = m.num_colors().max(1);
        let mut out_sets = vec![0u64; n * num_colors * words];
        let mut in_sets = vec![0u64; n * num_colors * words];
        for u in 0..n {
            for v in 0..n {
                let c = m.get(u, v) as usize;
                out_sets[(u * num_colors + c) * words + v / 64] |= 1 << (v % 64);
                in_sets[(v * num_colors + c) * words + u / 64] |= 1 << (u % 64);
            }
        }
        TargetIndex { n, words, num_colors, out_sets, in_sets }
    }

    fn out_set(&self, u: usize, c: usize) -> &[u64] {
        let s = (u * self.num_colors + c) * self.words;
        &self.out_sets[s..s + self.words]
    }

    fn in_set(&self, u: usize, c: usize) -> &[u64] {
        let s = (u * self.num_colors + c) * self.words;
        &self.in_sets[s..s + self.words]
    }
}

/// Backtracking search for bijections `f` with
/// `tgt(f(u), f(v)) = color_map[src(u, v)]` for all ordered pairs.
struct PointSearch<'a> {
    src: &'a ColorMatrix,
    tgt: &'a TargetIndex,
    color_map: &'a [u32],
    words: usize,
    image: Vec<usize>,
    context: &'a str,
}

const UNSET: usize = usize::MAX;

impl<'a> PointSearch<'a> {
    fn new(src: &'a ColorMatrix, tgt: &'a TargetIndex, color_map: &'a [u32], context: &'a str) -> Self {
        PointSearch {
            src,
            tgt,
            color_map,
            words: tgt.words,
            image: vec![UNSET; src.n],
            context,
        }
    }

    /// Restricts the domains of unassigned points after `u ↦ t`; false on a wipe-out.
    fn propagate(&self, domains: &mut [u64], u: usize, t: usize) -> bool {
        let w = self.words;
        for v in 0..self.src.n {
            if self.image[v] != UNSET {
                continue;
            }
            let out_c = self.color_map[self.src.get(u, v) as usize];
            let in_c = self.color_map[self.src.get(v, u) as usize];
            if out_c as usize >= self.tgt.num_colors || in_c as usize >= self.tgt.num_colors {
                return false;
            }
            let os = self.tgt.out_set(t, out_c as usize);
            let is = self.tgt.in_set(t, in_c as usize);
            let d = &mut domains[v * w..(v + 1) * w];
            let mut any = 0u64;
            for i in 0..w {
                d[i] &= os[i] & is[i];
                d[i] &= !(if i == t / 64 { 1u64 << (t % 64) } else { 0 });
                any |= d[i];
            }
            if any == 0 {
                return false;
            }
        }
        true
    }

    fn assign(&mut self, domains: &mut [u64], u: usize, t: usize) -> bool {
        let w = self.words;
        // t must be available for u
        if domains[u * w + t / 64] >> (t % 64) & 1 == 0 {
            return false;
        }
        self.image[u] = t;
        let d = &mut domains[u * w..(u + 1) * w];
        d.iter_mut().for_each(|x| *x = 0);
        d[t / 64] = 1 << (t % 64);
        self.propagate(domains, u, t)
    }

    fn pick(&self, domains: &[u64]) -> Option<usize> {
        let w = self.words;
        let mut best = None;
        let mut best_count = u32::MAX;
        for v in 0..self.src.n {
            if self.image[v] != UNSET {
                continue;
            }
            let count: u32 = domains[v * w..(v + 1) * w].iter().map(|x| x.count_ones()).sum();
            if count < best_count {
                best_count = count;
                best = Some(v);
            }
        }
        best
    }

    fn run(
        &mut self,
        domains: &mut Vec<u64>,
        budget: &mut Budget,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Result<bool> {
        let Some(v) = self.pick(domains) else {
            return Ok(visit(&self.image));
        };
        let w = self.words;
        let candidates: Vec<usize> = (0..self.tgt.n)
            .filter(|&t| domains[v * w + t / 64] >> (t % 64) & 1 == 1)
            .collect();
        for t in candidates {
            budget.tick(self.context)?;
            let mut saved = domains.clone();
            if self.assign(&mut saved, v, t) && !self.run(&mut saved, budget, visit)? {
                self.image[v] = UNSET;
                return Ok(false);
            }
            self.image[v] = UNSET;
        }
        Ok(true)
    }
}

/// Visits every color-preserving bijection extending `fixed`; `visit`
/// returns false to stop. Returns false if stopped early.
pub(crate) fn search_point_maps(
    src: &ColorMatrix,
    tgt: &TargetIndex,
    color_map: &[u32],
    fixed: &[(usize, usize)],
    allowed: Option<&dyn Fn(usize, usize) -> bool>,
    budget: &mut Budget,
    context: &str,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> Result<bool> {
    if src.n != tgt.n {
        return Ok(true);
    }
    let w = tgt.words;
    let mut domains = vec![0u64; src.n * w];
    for v in 0..src.n {
        for t in 0..tgt.n {
            if allowed.map_or(true, |ok| ok(v, t)) {
                domains[v * w + t / 64] |= 1 << (t % 64);
            }
        }
    }
    let mut search = PointSearch::new(src, tgt, color_map, context);
    for &(u, t) in fixed {
        if !search.assign(&mut domains, u, t) {
            return Ok(true);
        }
    }
    search.run(&mut domains, budget, visit)
}

/// The first color-preserving bijection extending `fixed`, if any.
pub fn find_color_isomorphism(
    src: &ColorMatrix,
    tgt: &ColorMatrix,
    color_map: &[u32],
    fixed: &[(usize, usize)],
    budget: &mut Budget,
) -> Result<Option<Vec<usize>>> {
    let index = TargetIndex::new(tgt);
    let mut found = None;
    search_point_maps(src, &index, color_map, fixed, None, budget, "point-map search", &mut |f| {
        found = Some(f.to_vec());
        false
    })?;
    Ok(found)
}

// ---------------------------------------------------------------------------
// Algebraic isomorphisms
// ---------------------------------------------------------------------------

/// A bijection of class indices `X ↦ Xφ` between two S-rings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgIso {
    pub class_map: Vec<usize>,
}

impl AlgIso {
    pub fn identity(rank: usize) -> AlgIso {
        AlgIso { class_map: (0..rank).collect() }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.class_map[x]
    }

    pub fn inverse(&self) -> AlgIso {
        let mut inv = vec![0; self.class_map.len()];
        for (x, &y) in self.class_map.iter().enumerate() {
            inv[y] = x;
        }
        AlgIso { class_map: inv }
    }

    /// `self` followed by `then`.
    pub fn then(&self, then: &AlgIso) -> AlgIso {
        AlgIso { class_map: self.class_map.iter().map(|&y| then.class_map[y]).collect() }
    }

    /// Checks bijectivity, sizes, `e ↦ e` and every structure constant.
    pub fn is_valid(&self, a: &SRing, b: &SRing) -> bool {
        let r = a.rank();
        if b.rank() != r || self.class_map.len() != r || a.group().order() != b.group().order() {
            return false;
        }
        let mut seen = vec![false; r];
        for &y in &self.class_map {
            if y >= r || seen[y] {
                return false;
            }
            seen[y] = true;
        }
        if self.class_map[0] != 0 {
            return false;
        }
        if (0..r).any(|x| a.size(x) != b.size(self.apply(x))) {
            return false;
        }
        for x in 0..r {
            for y in 0..r {
                let mut row_b: Vec<(u32, u32)> = a
                    .constants()
                    .row(x, y)
                    .iter()
                    .map(|&(z, c)| (self.apply(z as usize) as u32, c))
                    .collect();
                row_b.sort_unstable();
                if row_b.as_slice() != b.constants().row(self.apply(x), self.apply(y)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Stable joint colors of the classes of two S-rings, refined through the
/// structure constants. Returns `None` if the color multisets differ.
fn joint_class_colors(a: &SRing, b: &SRing) -> Option<(Vec<u32>, Vec<u32>)> {
    fn initial(s: &SRing) -> Vec<(usize, bool)> {
        (0..s.rank()).map(|x| (s.size(x), s.inverse_class(x) == x)).collect()
    }
    // ids follow sorted key order so colors do not depend on class labels
    let mut ids: BTreeMap<(usize, bool), u32> = initial(a).into_iter().chain(initial(b)).map(|k| (k, 0)).collect();
    for (next, id) in ids.values_mut().enumerate() {
        *id = next as u32;
    }
    let mut ca: Vec<u32> = initial(a).iter().map(|k| ids[k]).collect();
    let mut cb: Vec<u32> = initial(b).iter().map(|k| ids[k]).collect();
    let mut count = ids.len();
    loop {
        let sig = |s: &SRing, col: &[u32], x: usize| -> (u32, Vec<(u32, u32, u32)>) {
            let mut entries = Vec::new();
            for y in 0..s.rank() {
                for &(z, c) in s.constants().row(x, y) {
                    entries.push((col[y], col[z as usize], c));
                }
            }
            entries.sort_unstable();
            (col[x], entries)
        };
        let sa: Vec<_> = (0..a.rank()).map(|x| sig(a, &ca, x)).collect();
        let sb: Vec<_> = (0..b.rank()).map(|x| sig(b, &cb, x)).collect();
        let mut ids: BTreeMap<&(u32, Vec<(u32, u32, u32)>), u32> = sa.iter().chain(sb.iter()).map(|s| (s, 0)).collect();
        for (next, id) in ids.values_mut().enumerate() {
            *id = next as u32;
        }
        let na: Vec<u32> = sa.iter().map(|s| ids[s]).collect();
        let nb: Vec<u32> = sb.iter().map(|s| ids[s]).collect();
        let new_count = ids.len();
        ca = na;
        cb = nb;
        let mut ma = ca.clone();
        let mut mb = cb.clone();
        ma.sort_unstable();
        mb.sort_unstable();
        if ma != mb {
            return None;
        }
        if new_count == count {
            return Some((ca, cb));
        }
        count = new_count;
    }
}

/// An isomorphism-invariant hash of an S-ring's structure constants, used to
/// bucket catalogs before pairwise searches.
pub fn algebraic_invariant(a: &SRing) -> u64 {
    let (colors, _) = joint_class_colors(a, a).expect("an S-ring matches itself");
    let mut per_class: Vec<(usize, bool, Vec<(u32, u32, u32)>)> = (0..a.rank())
        .map(|x| {
            let mut entries: Vec<(u32, u32, u32)> = (0..a.rank())
                .flat_map(|y| {
                    let colors = &colors;
                    a.constants().row(x, y).iter().map(move |&(z, c)| (colors[y], colors[z as usize], c))
                })
                .collect();
            entries.sort_unstable();
            (a.size(x), a.inverse_class(x) == x, entries)
        })
        .collect();
    per_class.sort();
    let mut h = DefaultHasher::new();
    a.group().order().hash(&mut h);
    per_class.hash(&mut h);
    h.finish()
}

/// Visits every algebraic isomorphism `a → b`; `visit` returns false to stop.
pub fn for_each_algebraic_iso(a: &SRing, b: &SRing, visit: &mut dyn FnMut(&AlgIso) -> bool) {
    let r = a.rank();
    if b.rank() != r || a.group().order() != b.group().order() {
        return;
    }
    let Some((ca, cb)) = joint_class_colors(a, b) else {
        return;
    };
    let da = a.constants().dense();
    let db = b.constants().dense();
    let candidates: Vec<Vec<usize>> = (0..r).map(|x| (0..r).filter(|&y| cb[y] == ca[x]).collect()).collect();
    // inverse pairs are assigned together; order representatives by branching
    let mut order: Vec<usize> = (1..r).filter(|&x| a.inverse_class(x) >= x).collect();
    order.sort_by_key(|&x| (candidates[x].len(), x));

    struct State<'s> {
        a: &'s SRing,
        b: &'s SRing,
        r: usize,
        da: Vec<u32>,
        db: Vec<u32>,
        map: Vec<usize>,
        used: Vec<bool>,
        assigned: Vec<usize>,
    }

    impl State<'_> {
        fn consistent(&self, fresh: &[usize]) -> bool {
            let r = self.r;
            for &x in fresh {
                let fx = self.map[x];
                for &y in &self.assigned {
                    let fy = self.map[y];
                    for &z in &self.assigned {
                        let fz = self.map[z];
                        if self.da[(x * r + y) * r + z] != self.db[(fx * r + fy) * r + fz] {
                            return false;
                        }
                        if self.da[(y * r + z) * r + x] != self.db[(fy * r + fz) * r + fx] {
                            return false;
                        }
                    }
                }
            }
            true
        }

        fn rec(&mut self, order: &[usize], cands: &[Vec<usize>], visit: &mut dyn FnMut(&AlgIso) -> bool) -> bool {
            let Some((&x, rest)) = order.split_first() else {
                return visit(&AlgIso { class_map: self.map.clone() });
            };
            let xi = self.a.inverse_class(x);
            for &y in &cands[x] {
                if self.used[y] {
                    continue;
                }
                let yi = self.b.inverse_class(y);
                if (xi == x) != (yi == y) || (xi != x && self.used[yi]) {
                    continue;
                }
                let mut fresh = vec![x];
                self.map[x] = y;
                self.used[y] = true;
                self.assigned.push(x);
                if xi != x {
                    self.map[xi] = yi;
                    self.used[yi] = true;
                    self.assigned.push(xi);
                    fresh.push(xi);
                }
                let keep_going = if self.consistent(&fresh) { self.rec(rest, cands, visit) } else { true };
                for &f in &fresh {
                    self.used[self.map[f]] = false;
                    self.map[f] = usize::MAX;
                    self.assigned.pop();
                }
                if !keep_going {
                    return false;
                }
            }
            true
        }
    }

    let mut state = State {
        a,
        b,
        r,
        da,
        db,
        map: vec![usize::MAX; r],
        used: vec![false; r],
        assigned: vec![0],
    };
    state.map[0] = 0;
    state.used[0] = true;
    if !state.consistent(&[0]) {
        return;
    }
    state.rec(&order, &candidates, visit);
}

/// All algebraic isomorphisms `a → b`, sorted.
pub fn find_algebraic_isos(a: &SRing, b: &SRing) -> Vec<AlgIso> {
    let mut out = Vec::new();
    for_each_algebraic_iso(a, b, &mut |phi| {
        out.push(phi.clone());
        true
    });
    out.sort();
    out
}

pub fn algebraically_isomorphic(a: &SRing, b: &SRing) -> bool {
    let mut found = false;
    for_each_algebraic_iso(a, b, &mut |_| {
        found = true;
        false
    });
    found
}

// ---------------------------------------------------------------------------
// Combinatorial and Cayley isomorphisms
// ---------------------------------------------------------------------------

/// `φ_f` for a point bijection `f`, or `None` if `f` is not a combinatorial
/// isomorphism (some basic relation is not mapped onto a basic relation).
pub fn induced_algebraic_iso(f: &[usize], a: &SRing, b: &SRing) -> Option<AlgIso> {
    let ga = a.group();
    let gb = b.group();
    let n = ga.order();
    if f.len() != n || gb.order() != n || a.rank() != b.rank() {
        return None;
    }
    let mut seen = vec![false; n];
    for &y in f {
        if y >= n || seen[y] {
            return None;
        }
        seen[y] = true;
    }
    let mut map = vec![usize::MAX; a.rank()];
    for u in 0..n {
        for v in 0..n {
            let x = a.class_of(ga.sub(v, u));
            let y = b.class_of(gb.sub(f[v], f[u]));
            if map[x] == usize::MAX {
                map[x] = y;
            } else if map[x] != y {
                return None;
            }
        }
    }
    let phi = AlgIso { class_map: map };
    let mut hit = vec![false; a.rank()];
    for x in 0..a.rank() {
        if hit[phi.apply(x)] || a.size(x) != b.size(phi.apply(x)) {
            return None;
        }
        hit[phi.apply(x)] = true;
    }
    Some(phi)
}

/// Visits group isomorphisms `f` with `class'(f(x)) = φ(class(x))` when `phi`
/// is given, or mapping every class onto some class otherwise.
fn for_each_cayley_iso(a: &SRing, b: &SRing, phi: Option<&AlgIso>, visit: &mut dyn FnMut(GroupMap) -> bool) {
    let ga = a.group();
    let gb = b.group();
    if ga.order() != gb.order() || a.rank() != b.rank() {
        return;
    }
    let units: Vec<usize> = (0..ga.factors().len()).map(|i| ga.unit(i)).collect();
    let mut allow = |i: usize, y: usize| {
        let x = units[i];
        match phi {
            Some(phi) => b.class_of(y) == phi.apply(a.class_of(x)),
            None => b.size(b.class_of(y)) == a.size(a.class_of(x)),
        }
    };
    let mut check = |f: GroupMap| {
        let ok = match phi {
            Some(phi) => (0..ga.order()).all(|x| b.class_of(f.apply(x)) == phi.apply(a.class_of(x))),
            None => {
                let mut map = vec![usize::MAX; a.rank()];
                (0..ga.order()).all(|x| {
                    let (cx, cy) = (a.class_of(x), b.class_of(f.apply(x)));
                    if map[cx] == usize::MAX {
                        map[cx] = cy;
                    }
                    map[cx] == cy
                }) && (0..a.rank()).all(|x| a.size(x) == b.size(map[x]))
            }
        };
        if ok {
            visit(f)
        } else {
            true
        }
    };
    isomorphisms_filtered(ga, gb, &mut allow, &mut check);
}

/// Cayley isomorphisms inducing exactly `phi`; `visit` returns false to stop.
pub fn for_each_cayley_iso_inducing(a: &SRing, b: &SRing, phi: &AlgIso, visit: &mut dyn FnMut(GroupMap) -> bool) {
    for_each_cayley_iso(a, b, Some(phi), visit);
}

/// Automorphisms of `a` lifting each permutation `lift_of(u)` of a coarser
/// point set: the first automorphism `f` with `coarse[f(u)] == target[coarse[u]]`.
pub(crate) fn find_automorphism_over(
    a: &SRing,
    coarse: &[usize],
    target: &[usize],
    budget: &mut Budget,
) -> Result<Option<Vec<usize>>> {
    let colors = sring_colors(a);
    let index = TargetIndex::new(&colors);
    let identity_colors: Vec<u32> = (0..a.rank() as u32).collect();
    let allowed = |u: usize, t: usize| coarse[t] == target[coarse[u]];
    let mut found = None;
    search_point_maps(
        &colors,
        &index,
        &identity_colors,
        &[],
        Some(&allowed),
        budget,
        "section automorphism lift",
        &mut |f| {
            found = Some(f.to_vec());
            false
        },
    )?;
    Ok(found)
}

/// All Cayley isomorphisms `a → b`: group isomorphisms mapping classes onto classes.
pub fn find_cayley_isos(a: &SRing, b: &SRing) -> Vec<GroupMap> {
    let mut out = Vec::new();
    for_each_cayley_iso(a, b, None, &mut |f| {
        out.push(f);
        true
    });
    out
}

pub fn first_cayley_iso(a: &SRing, b: &SRing) -> Option<GroupMap> {
    let mut out = None;
    for_each_cayley_iso(a, b, None, &mut |f| {
        out = Some(f);
        false
    });
    out
}

pub fn cayley_isomorphic(a: &SRing, b: &SRing) -> bool {
    first_cayley_iso(a, b).is_some()
}

/// A point bijection `f` with `R(X)^f = R(Xφ)` for every class, trying
/// Cayley isomorphisms before the general search.
pub fn find_inducing_iso(a: &SRing, b: &SRing, phi: &AlgIso, budget: &mut Budget) -> Result<Option<Vec<usize>>> {
    if a.group().order() != b.group().order() || !phi.is_valid(a, b) {
        return Ok(None);
    }
    let mut cayley = None;
    for_each_cayley_iso(a, b, Some(phi), &mut |f| {
        cayley = Some(f.table().to_vec());
        false
    });
    if cayley.is_some() {
        return Ok(cayley);
    }
    let src = sring_colors(a);
    let tgt = sring_colors(b);
    let color_map: Vec<u32> = phi.class_map.iter().map(|&y| y as u32).collect();
    find_color_isomorphism(&src, &tgt, &color_map, &[(0, 0)], budget)
}

/// A combinatorial isomorphism `a → b` with the algebraic isomorphism it
/// induces, trying Cayley isomorphisms first.
pub fn find_combinatorial_iso(a: &SRing, b: &SRing, budget: &mut Budget) -> Result<Option<(AlgIso, Vec<usize>)>> {
    if let Some(f) = first_cayley_iso(a, b) {
        let phi = induced_algebraic_iso(f.table(), a, b).expect("Cayley isomorphisms induce algebraic ones");
        return Ok(Some((phi, f.table().to_vec())));
    }
    for phi in find_algebraic_isos(a, b) {
        if let Some(f) = find_inducing_iso(a, b, &phi, budget)? {
            return Ok(Some((phi, f)));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Automorphism groups and normality
// ---------------------------------------------------------------------------

/// `Aut(A)` as generators (right translations first) and its order.
#[derive(Clone, Debug)]
pub struct AutGroup {
    pub generators: Vec<Vec<usize>>,
    pub order: BigUint,
    /// Orbit lengths along the base, starting with the orbit of `e` (all of G).
    pub orbit_lengths: Vec<usize>,
}

fn orbit_of(point: usize, gens: &[Vec<usize>]) -> Vec<bool> {
    let n = gens.first().map(|g| g.len()).unwrap_or(point + 1);
    let mut seen = vec![false; n];
    seen[point] = true;
    let mut stack = vec![point];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g[x];
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// The automorphism group of the basic-relation coloring of `a`.
pub fn sring_automorphisms(a: &SRing, budget: &mut Budget) -> Result<AutGroup> {
    let g = a.group();
    let n = g.order();
    let colors = sring_colors(a);
    let index = TargetIndex::new(&colors);
    let identity_colors: Vec<u32> = (0..a.rank() as u32).collect();

    // base: fix points greedily until every domain is a singleton
    let w = index.words;
    let mut base = vec![0usize];
    {
        let mut domains = vec![0u64; n * w];
        for v in 0..n {
            for t in 0..n {
                domains[v * w + t / 64] |= 1 << (t % 64);
            }
        }
        let mut search = PointSearch::new(&colors, &index, &identity_colors, "automorphism base");
        let ok = search.assign(&mut domains, 0, 0);
        debug_assert!(ok);
        loop {
            let mut best: Option<(u32, usize)> = None;
            for v in 0..n {
                if search.image[v] != UNSET {
                    continue;
                }
                let count: u32 = domains[v * w..(v + 1) * w].iter().map(|x| x.count_ones()).sum();
                if count > 1 && best.map_or(true, |(c, _)| count < c) {
                    best = Some((count, v));
                }
            }
            let Some((_, v)) = best else { break };
            let ok = search.assign(&mut domains, v, v);
            debug_assert!(ok);
            base.push(v);
        }
    }

    let mut stabilizer_gens: Vec<Vec<usize>> = Vec::new();
    let mut orbit_lengths = vec![0usize; base.len()];
    for level in (1..base.len()).rev() {
        let point = base[level];
        let fixed: Vec<(usize, usize)> = base[..level].iter().map(|&b| (b, b)).collect();
        let mut orbit = orbit_of(point, &stabilizer_gens);
        if orbit.len() < n {
            orbit.resize(n, false);
        }
        for target in 0..n {
            if orbit[target] || a.class_of(target) != a.class_of(point) {
                continue;
            }
            let mut pairs = fixed.clone();
            pairs.push((point, target));
            let mut found = None;
            search_point_maps(&colors, &index, &identity_colors, &pairs, None, budget, "automorphism search", &mut |f| {
                found = Some(f.to_vec());
                false
            })?;
            if let Some(f) = found {
                stabilizer_gens.push(f);
                orbit = orbit_of(point, &stabilizer_gens);
            }
        }
        orbit_lengths[level] = orbit.iter().filter(|&&x| x).count();
    }
    orbit_lengths[0] = n;
    let mut generators: Vec<Vec<usize>> = g
        .generators()
        .into_iter()
        .map(|t| (0..n).map(|x| g.add(x, t)).collect())
        .collect();
    generators.extend(stabilizer_gens);
    let order = orbit_lengths.iter().fold(BigUint::from(1u32), |acc, &l| acc * BigUint::from(l));
    Ok(AutGroup { generators, order, orbit_lengths })
}

/// True iff the right translations form a normal subgroup of `Aut(A)`.
pub fn is_normal_sring(a: &SRing, budget: &mut Budget) -> Result<bool> {
    let aut = sring_automorphisms(a, budget)?;
    let g = a.group();
    let n = g.order();
    for gamma in &aut.generators {
        let mut inv = vec![0usize; n];
        for (x, &y) in gamma.iter().enumerate() {
            inv[y] = x;
        }
        for t in g.generators() {
            // γ⁻¹ t γ as x ↦ γ(t(γ⁻¹(x)))
            let shift = g.sub(gamma[g.add(inv[0], t)], 0);
            if (0..n).any(|x| gamma[g.add(inv[x], t)] != g.add(x, shift)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Separability
// ---------------------------------------------------------------------------

/// One algebraic isomorphism from the subject and its inducing map, if found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness {
    pub target: usize,
    pub class_map: Vec<usize>,
    pub point_map: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparabilityReport {
    pub separable: bool,
    pub witnesses: Vec<IsoWitness>,
    pub nodes_used: u64,
}

/// Checks every algebraic isomorphism from `a` to each of `targets` for an
/// inducing combinatorial isomorphism.
pub fn is_separable(a: &SRing, targets: &[SRing], budget: &mut Budget) -> Result<SeparabilityReport> {
    let start = budget.used;
    let key = algebraic_invariant(a);
    let mut witnesses = Vec::new();
    for (t, b) in targets.iter().enumerate() {
        if b.rank() != a.rank() || b.group().order() != a.group().order() || algebraic_invariant(b) != key {
            continue;
        }
        for phi in find_algebraic_isos(a, b) {
            let point_map = find_inducing_iso(a, b, &phi, budget)?;
            witnesses.push(IsoWitness { target: t, class_map: phi.class_map, point_map });
        }
    }
    let separable = witnesses.iter().all(|w| w.point_map.is_some());
    Ok(SeparabilityReport { separable, witnesses, nodes_used: budget.used - start })
}

/// Replays a report: every witness map must induce exactly its algebraic
/// isomorphism, and the set of algebraic isomorphisms must be complete.
pub fn verify_separability_report(a: &SRing, targets: &[SRing], report: &SeparabilityReport) -> bool {
    let mut listed: HashSet<(usize, Vec<usize>)> = HashSet::new();
    for w in &report.witnesses {
        let Some(b) = targets.get(w.target) else { return false };
        let phi = AlgIso { class_map: w.class_map.clone() };
        if !phi.is_valid(a, b) {
            return false;
        }
        if let Some(f) = &w.point_map {
            if induced_algebraic_iso(f, a, b).as_ref() != Some(&phi) {
                return false;
            }
        }
        listed.insert((w.target, w.class_map.clone()));
    }
    for (t, b) in targets.iter().enumerate() {
        for phi in find_algebraic_isos(a, b) {
            if !listed.contains(&(t, phi.class_map)) {
                return false;
            }
        }
    }
    report.separable == report.witnesses.iter().all(|w| w.point_map.is_some())
}
