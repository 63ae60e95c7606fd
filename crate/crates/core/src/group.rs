//! Finite abelian groups given as products of cyclic factors.
//!
//! Elements are mixed-radix indices: the first coordinate is the most
//! significant digit, so index order is lexicographic order on tuples and the
//! identity is index 0.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::arith::{gcd, lcm};
use crate::error::{Error, Result};

/// Largest order for which the addition table is materialized.
const TABLE_LIMIT: usize = 1024;

/// Default bound for subgroup and automorphism enumeration.
pub const DEFAULT_GROUP_BOUND: usize = 200;

#[derive(Clone)]
pub struct Group {
    factors: Vec<usize>,
    strides: Vec<usize>,
    order: usize,
    add_table: Vec<u32>,
    neg_table: Vec<u32>,
    order_table: Vec<u32>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.factors == other.factors
    }
}

impl Eq for Group {}

impl Hash for Group {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.factors.hash(state);
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.spec_string())
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

/// Builds a group from a list of cyclic orders, sorted descending.
pub fn make_group(spec: &[usize]) -> Result<Arc<Group>> {
    Group::new(spec).map(Arc::new)
}

impl Group {
    pub fn new(spec: &[usize]) -> Result<Group> {
        if spec.is_empty() {
            return Err(Error::InvalidSpec("empty factor list".into()));
        }
        if let Some(bad) = spec.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidSpec(format!("cyclic order {bad} is below 2")));
        }
        let mut factors = spec.to_vec();
        factors.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Group::from_sorted_factors(factors))
    }

    /// The trivial group (no factors). Only arises as a quotient.
    pub fn trivial() -> Group {
        Group::from_sorted_factors(Vec::new())
    }

    pub(crate) fn from_sorted_factors(factors: Vec<usize>) -> Group {
        let order: usize = factors.iter().product();
        let mut strides = vec![1; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1];
        }
        let mut g = Group {
            factors,
            strides,
            order,
            add_table: Vec::new(),
            neg_table: Vec::new(),
            order_table: Vec::new(),
        };
        g.neg_table = (0..order).map(|x| g.neg_slow(x) as u32).collect();
        g.order_table = (0..order).map(|x| g.order_slow(x) as u32).collect();
        if order <= TABLE_LIMIT {
            let mut table = vec![0u32; order * order];
            for x in 0..order {
                for y in 0..order {
                    table[x * order + y] = g.add_slow(x, y) as u32;
                }
            }
            g.add_table = table;
        }
        g
    }

    /// Parses a spec string such as `"3x3x5"`.
    pub fn parse(spec: &str) -> Result<Group> {
        let parts: std::result::Result<Vec<usize>, _> =
            spec.trim().split('x').map(|s| s.trim().parse::<usize>()).collect();
        match parts {
            Ok(p) => Group::new(&p),
            Err(_) => Err(Error::InvalidSpec(format!("cannot parse group spec {spec:?}"))),
        }
    }

    pub fn spec_string(&self) -> String {
        if self.factors.is_empty() {
            return "1".into();
        }
        self.factors
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join("x")
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn exponent(&self) -> usize {
        self.factors.iter().fold(1u64, |acc, &n| lcm(acc, n as u64)) as usize
    }

    pub fn is_cyclic(&self) -> bool {
        self.exponent() == self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn coords(&self, x: usize) -> Vec<usize> {
        self.factors
            .iter()
            .zip(&self.strides)
            .map(|(&n, &s)| (x / s) % n)
            .collect()
    }

    pub fn coord(&self, x: usize, i: usize) -> usize {
        (x / self.strides[i]) % self.factors[i]
    }

    pub fn index_of(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.factors.len() {
            return Err(Error::InvalidInput(format!(
                "element has {} coordinates, group {} needs {}",
                coords.len(),
                self,
                self.factors.len()
            )));
        }
        let mut idx = 0;
        for ((&c, &n), &s) in coords.iter().zip(&self.factors).zip(&self.strides) {
            if c >= n {
                return Err(Error::InvalidInput(format!("coordinate {c} out of range 0..{n}")));
            }
            idx += c * s;
        }
        Ok(idx)
    }

    /// Element with coordinate 1 in factor `i` and 0 elsewhere.
    pub fn unit(&self, i: usize) -> usize {
        self.strides[i]
    }

    pub fn generators(&self) -> Vec<usize> {
        (0..self.factors.len()).map(|i| self.unit(i)).collect()
    }

    #[inline]
    pub fn add(&self, x: usize, y: usize) -> usize {
        if self.add_table.is_empty() {
            self.add_slow(x, y)
        } else {
            self.add_table[x * self.order + y] as usize
        }
    }

    #[inline]
    pub fn neg(&self, x: usize) -> usize {
        self.neg_table[x] as usize
    }

    #[inline]
    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg(y))
    }

    /// The `m`-th power of `x` (written additively, `m·x`).
    pub fn mul(&self, x: usize, m: i64) -> usize {
        let mut idx = 0;
        for (&n, &s) in self.factors.iter().zip(&self.strides) {
            let c = ((x / s) % n) as i64;
            idx += ((c * m).rem_euclid(n as i64) as usize) * s;
        }
        idx
    }

    #[inline]
    pub fn element_order(&self, x: usize) -> usize {
        self.order_table[x] as usize
    }

    fn add_slow(&self, x: usize, y: usize) -> usize {
        let mut idx = 0;
        for (&n, &s) in self.factors.iter().zip(&self.strides) {
            idx += (((x / s) % n + (y / s) % n) % n) * s;
        }
        idx
    }

    fn neg_slow(&self, x: usize) -> usize {
        let mut idx = 0;
        for (&n, &s) in self.factors.iter().zip(&self.strides) {
            idx += ((n - (x / s) % n) % n) * s;
        }
        idx
    }

    fn order_slow(&self, x: usize) -> usize {
        let mut o = 1u64;
        for (&n, &s) in self.factors.iter().zip(&self.strides) {
            let c = (x / s) % n;
            o = lcm(o, (n / gcd(c as u64, n as u64) as usize) as u64);
        }
        o as usize
    }

    /// Parses an element literal such as `"(1,0,4)"`.
    pub fn parse_element(&self, s: &str) -> Result<usize> {
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidInput(format!("element literal {s:?} lacks parentheses")))?;
        let coords: std::result::Result<Vec<usize>, _> = if inner.trim().is_empty() {
            Ok(Vec::new())
        } else {
            inner.split(',').map(|c| c.trim().parse::<usize>()).collect()
        };
        let coords = coords.map_err(|_| Error::InvalidInput(format!("bad element literal {s:?}")))?;
        self.index_of(&coords)
    }

    pub fn format_element(&self, x: usize) -> String {
        let parts: Vec<String> = self.coords(x).iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }

    /// Smallest subgroup containing `gens`.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Subgroup {
        let mut inside = vec![false; self.order];
        inside[0] = true;
        let mut members = vec![0usize];
        for &g in gens {
            if inside[g] {
                continue;
            }
            // Adjoin g: the new subgroup is the union of cosets k·g + H.
            let base = members.clone();
            let mut step = g;
            while !inside[step] {
                for &h in &base {
                    let y = self.add(step, h);
                    inside[y] = true;
                    members.push(y);
                }
                step = self.add(step, g);
            }
        }
        members.sort_unstable();
        Subgroup { members }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            members: (0..self.order).collect(),
        }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { members: vec![0] }
    }

    /// Every subgroup exactly once, sorted by order then members.
    pub fn all_subgroups(&self) -> Result<Vec<Subgroup>> {
        self.all_subgroups_bounded(DEFAULT_GROUP_BOUND)
    }

    pub fn all_subgroups_bounded(&self, bound: usize) -> Result<Vec<Subgroup>> {
        if self.order > bound {
            return Err(Error::TooLarge(format!(
                "subgroup enumeration of order {} exceeds bound {bound}",
                self.order
            )));
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut queue: VecDeque<Subgroup> = VecDeque::new();
        let trivial = self.trivial_subgroup();
        seen.insert(trivial.members.clone());
        queue.push_back(trivial);
        let mut out = Vec::new();
        while let Some(h) = queue.pop_front() {
            let mask = h.mask(self.order);
            for x in 0..self.order {
                if mask[x] {
                    continue;
                }
                let mut gens: Vec<usize> = h.members.clone();
                gens.push(x);
                let bigger = self.subgroup_generated(&gens);
                if seen.insert(bigger.members.clone()) {
                    queue.push_back(bigger);
                }
            }
            out.push(h);
        }
        out.sort_by(|a, b| (a.order(), &a.members).cmp(&(b.order(), &b.members)));
        Ok(out)
    }

    /// Automorphisms of the group, in lexicographic order of generator images.
    pub fn automorphisms(self: &Arc<Self>) -> Result<Vec<GroupMap>> {
        isomorphisms(self, self)
    }

    /// Multiplier units modulo the exponent, i.e. the distinct power maps
    /// `x ↦ m·x` that are automorphisms.
    pub fn multiplier_units(&self) -> Vec<u64> {
        crate::arith::units(self.exponent() as u64)
    }
}

/// A subgroup, stored as its sorted member list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    members: Vec<usize>,
}

impl Subgroup {
    /// Wraps a member list; the caller guarantees closure.
    pub(crate) fn from_sorted_members(members: Vec<usize>) -> Subgroup {
        Subgroup { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn mask(&self, group_order: usize) -> Vec<bool> {
        let mut m = vec![false; group_order];
        for &x in &self.members {
            m[x] = true;
        }
        m
    }

    /// Internal sum `self + other`.
    pub fn join(&self, group: &Group, other: &Subgroup) -> Subgroup {
        let mut gens = self.members.clone();
        gens.extend_from_slice(&other.members);
        group.subgroup_generated(&gens)
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup {
            members: self
                .members
                .iter()
                .copied()
                .filter(|&x| other.contains(x))
                .collect(),
        }
    }
}

/// A section `U/L` with `L ≤ U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub upper: Subgroup,
    pub lower: Subgroup,
}

impl Section {
    pub fn new(upper: Subgroup, lower: Subgroup) -> Result<Section> {
        if !lower.is_subgroup_of(&upper) {
            return Err(Error::InvalidInput("lower subgroup is not contained in upper".into()));
        }
        Ok(Section { upper, lower })
    }

    pub fn order(&self) -> usize {
        self.upper.order() / self.lower.order()
    }

    /// L-cosets inside U, each sorted, ordered by smallest member.
    pub fn cosets(&self, group: &Group) -> Vec<Vec<usize>> {
        let mut seen = vec![false; group.order()];
        let mut out = Vec::new();
        for &u in &self.upper.members {
            if seen[u] {
                continue;
            }
            let mut coset: Vec<usize> = self.lower.members.iter().map(|&l| group.add(u, l)).collect();
            coset.sort_unstable();
            for &c in &coset {
                seen[c] = true;
            }
            out.push(coset);
        }
        out
    }
}

/// The canonical projection `π: U → U/L` together with a concrete quotient group.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    pub quotient: Arc<Group>,
    /// `proj[x]` is `π(x)` for `x ∈ U` and `None` outside `U`.
    pub proj: Vec<Option<usize>>,
    /// One preimage per quotient element.
    pub lift: Vec<usize>,
}

impl QuotientMap {
    pub fn project(&self, x: usize) -> Option<usize> {
        self.proj[x]
    }

    /// Full preimage of a set of quotient elements, sorted.
    pub fn preimage(&self, ys: &[usize]) -> Vec<usize> {
        let mut want = vec![false; self.quotient.order()];
        for &y in ys {
            want[y] = true;
        }
        self.proj
            .iter()
            .enumerate()
            .filter_map(|(x, p)| p.filter(|&q| want[q]).map(|_| x))
            .collect()
    }
}

/// Builds the quotient `U/L` with its projection.
///
/// For `U = G`, `L = {e}` the group itself is returned with the identity
/// projection. Otherwise the quotient is decomposed greedily: repeatedly pick
/// a coset of maximal order modulo the span so far and a representative of
/// the same order; the chosen orders become the cyclic factors.
pub fn quotient_map(group: &Arc<Group>, section: &Section) -> QuotientMap {
    let n = group.order();
    if section.lower.is_trivial() && section.upper.order() == n {
        return QuotientMap {
            quotient: group.clone(),
            proj: (0..n).map(Some).collect(),
            lift: (0..n).collect(),
        };
    }
    // coset representative = smallest member of the coset
    let mut rep = vec![usize::MAX; n];
    for coset in section.cosets(group) {
        let r = coset[0];
        for &c in &coset {
            rep[c] = r;
        }
    }
    let reps: Vec<usize> = section.cosets(group).iter().map(|c| c[0]).collect();
    let q_order = reps.len();
    let in_span = |span: &[bool], x: usize| span[rep[x]];
    let mut span = vec![false; n];
    span[rep[0]] = true;
    let mut span_members = vec![rep[0]];
    let mut gens: Vec<(usize, usize)> = Vec::new();
    while span_members.len() < q_order {
        // coset of maximal order modulo the span
        let mut best: Option<(usize, usize)> = None;
        for &c in &reps {
            let mut k = 1;
            let mut y = c;
            while !in_span(&span, y) {
                y = group.add(y, c);
                k += 1;
            }
            if best.map_or(true, |(_, bk)| k > bk) {
                best = Some((c, k));
            }
        }
        let (c, m) = best.expect("nonempty quotient");
        // representative of c + span whose order in U/L is exactly m
        let mut chosen = None;
        let mut candidates: Vec<usize> = span_members.iter().map(|&s| rep[group.add(c, s)]).collect();
        candidates.sort_unstable();
        candidates.dedup();
        for d in candidates {
            let mut k = 1;
            let mut y = d;
            while rep[y] != rep[0] {
                y = group.add(y, d);
                k += 1;
            }
            if k == m {
                chosen = Some(d);
                break;
            }
        }
        let d = chosen.expect("abelian quotient has a representative of maximal order");
        gens.push((d, m));
        let base = span_members.clone();
        let mut step = d;
        for _ in 1..m {
            for &s in &base {
                let y = rep[group.add(step, s)];
                if !span[y] {
                    span[y] = true;
                    span_members.push(y);
                }
            }
            step = group.add(step, d);
        }
    }
    let factors: Vec<usize> = gens.iter().map(|&(_, m)| m).collect();
    let quotient = Arc::new(Group::from_sorted_factors(factors));
    let mut lift = vec![0usize; q_order];
    let mut rep_to_q = vec![usize::MAX; n];
    for (qi, slot) in lift.iter_mut().enumerate() {
        let coords = quotient.coords(qi);
        let mut x = 0;
        for (&(d, _), &c) in gens.iter().zip(&coords) {
            x = group.add(x, group.mul(d, c as i64));
        }
        *slot = rep[x];
        rep_to_q[rep[x]] = qi;
    }
    let mut proj = vec![None; n];
    for &u in section.upper.members() {
        proj[u] = Some(rep_to_q[rep[u]]);
    }
    QuotientMap { quotient, proj, lift }
}

/// A homomorphism between groups, given by generator images and tabulated.
#[derive(Clone)]
pub struct GroupMap {
    source: Arc<Group>,
    target: Arc<Group>,
    table: Vec<usize>,
}

impl PartialEq for GroupMap {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.table == other.table
    }
}

impl Eq for GroupMap {}

impl Hash for GroupMap {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.table.hash(state);
    }
}

impl fmt::Debug for GroupMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupMap({} -> {}, images {:?})", self.source, self.target, self.images())
    }
}

impl GroupMap {
    /// The homomorphism sending the i-th generator of `source` to `images[i]`.
    pub fn from_images(source: &Arc<Group>, target: &Arc<Group>, images: &[usize]) -> Result<GroupMap> {
        if images.len() != source.factors().len() {
            return Err(Error::InvalidInput(format!(
                "expected {} generator images, got {}",
                source.factors().len(),
                images.len()
            )));
        }
        for (i, (&img, &n)) in images.iter().zip(source.factors()).enumerate() {
            if img >= target.order() {
                return Err(Error::InvalidInput(format!("image {img} is not an element of {target}")));
            }
            if n % target.element_order(img) != 0 {
                return Err(Error::InvalidInput(format!(
                    "image of generator {i} has order {} not dividing {n}",
                    target.element_order(img)
                )));
            }
        }
        let mut table = vec![0usize; source.order()];
        for (x, slot) in table.iter_mut().enumerate() {
            let mut y = 0;
            for (i, &img) in images.iter().enumerate() {
                y = target.add(y, target.mul(img, source.coord(x, i) as i64));
            }
            *slot = y;
        }
        Ok(GroupMap {
            source: source.clone(),
            target: target.clone(),
            table,
        })
    }

    pub(crate) fn from_table_unchecked(source: &Arc<Group>, target: &Arc<Group>, table: Vec<usize>) -> GroupMap {
        GroupMap {
            source: source.clone(),
            target: target.clone(),
            table,
        }
    }

    pub fn identity(group: &Arc<Group>) -> GroupMap {
        GroupMap::from_table_unchecked(group, group, (0..group.order()).collect())
    }

    /// The power map `σ_m: x ↦ m·x`.
    pub fn multiplier(group: &Arc<Group>, m: i64) -> GroupMap {
        GroupMap::from_table_unchecked(group, group, (0..group.order()).map(|x| group.mul(x, m)).collect())
    }

    pub fn source(&self) -> &Arc<Group> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Group> {
        &self.target
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn images(&self) -> Vec<usize> {
        self.source.generators().iter().map(|&g| self.table[g]).collect()
    }

    pub fn is_bijective(&self) -> bool {
        if self.source.order() != self.target.order() {
            return false;
        }
        let mut hit = vec![false; self.target.order()];
        for &y in &self.table {
            if hit[y] {
                return false;
            }
            hit[y] = true;
        }
        true
    }

    pub fn is_automorphism(&self) -> bool {
        self.source == self.target && self.is_bijective()
    }

    /// `x ↦ then(self(x))`.
    pub fn then(&self, then: &GroupMap) -> GroupMap {
        GroupMap {
            source: self.source.clone(),
            target: then.target.clone(),
            table: self.table.iter().map(|&y| then.table[y]).collect(),
        }
    }

    pub fn inverse(&self) -> Option<GroupMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0usize; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y] = x;
        }
        Some(GroupMap {
            source: self.target.clone(),
            target: self.source.clone(),
            table: inv,
        })
    }

    pub fn image_of_set(&self, xs: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = xs.iter().map(|&x| self.table[x]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// All isomorphisms `g → h`, in lexicographic order of generator images.
pub fn isomorphisms(g: &Arc<Group>, h: &Arc<Group>) -> Result<Vec<GroupMap>> {
    if g.order() > DEFAULT_GROUP_BOUND || h.order() > DEFAULT_GROUP_BOUND {
        return Err(Error::TooLarge(format!(
            "isomorphism enumeration beyond order {DEFAULT_GROUP_BOUND}"
        )));
    }
    let mut out = Vec::new();
    if g.order() != h.order() {
        return Ok(out);
    }
    isomorphisms_filtered(g, h, &mut |_, _| true, &mut |m| {
        out.push(m);
        true
    });
    Ok(out)
}

/// Depth-first generation of isomorphisms `g → h`.
///
/// `allow(i, y)` may veto `y` as the image of generator `i`; `visit` receives
/// each complete isomorphism and returns `false` to stop early.
pub(crate) fn isomorphisms_filtered(
    g: &Arc<Group>,
    h: &Arc<Group>,
    allow: &mut dyn FnMut(usize, usize) -> bool,
    visit: &mut dyn FnMut(GroupMap) -> bool,
) {
    if g.order() != h.order() {
        return;
    }
    let k = g.factors().len();
    let mut images = Vec::with_capacity(k);
    let mut span = vec![false; h.order()];
    span[0] = true;
    let mut span_members = vec![0usize];
    fn rec(
        g: &Arc<Group>,
        h: &Arc<Group>,
        images: &mut Vec<usize>,
        span: &mut Vec<bool>,
        span_members: &mut Vec<usize>,
        allow: &mut dyn FnMut(usize, usize) -> bool,
        visit: &mut dyn FnMut(GroupMap) -> bool,
    ) -> bool {
        let i = images.len();
        if i == g.factors().len() {
            let map = GroupMap::from_images(g, h, images).expect("orders checked");
            return visit(map);
        }
        let n = g.factors()[i];
        for y in 0..h.order() {
            if h.element_order(y) != n || !allow(i, y) {
                continue;
            }
            // ⟨y⟩ must meet the current span trivially
            let mut ok = true;
            let mut step = y;
            for _ in 1..n {
                if span[step] {
                    ok = false;
                    break;
                }
                step = h.add(step, y);
            }
            if !ok {
                continue;
            }
            let base_len = span_members.len();
            let mut step = y;
            for _ in 1..n {
                for j in 0..base_len {
                    let z = h.add(step, span_members[j]);
                    span[z] = true;
                    span_members.push(z);
                }
                step = h.add(step, y);
            }
            images.push(y);
            let cont = rec(g, h, images, span, span_members, allow, visit);
            images.pop();
            for &z in &span_members[base_len..] {
                span[z] = false;
            }
            span_members.truncate(base_len);
            if !cont {
                return false;
            }
        }
        true
    }
    rec(g, h, &mut images, &mut span, &mut span_members, allow, visit);
}

/// Orbit partition of `domain` under the group generated by `maps`.
///
/// Orbits are computed in the whole group and then restricted to `domain`;
/// each orbit is sorted and orbits are ordered by smallest member.
pub fn orbits(group: &Group, maps: &[GroupMap], domain: &[usize]) -> Vec<Vec<usize>> {
    let n = group.order();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for m in maps {
        for x in 0..n {
            let a = find(&mut parent, x);
            let b = find(&mut parent, m.apply(x));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut buckets: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    let mut sorted_domain = domain.to_vec();
    sorted_domain.sort_unstable();
    sorted_domain.dedup();
    for x in sorted_domain {
        let r = find(&mut parent, x);
        buckets.entry(r).or_default().push(x);
    }
    let mut out: Vec<Vec<usize>> = buckets.into_values().collect();
    out.sort_by_key(|o| o[0]);
    out
}

/// An external direct product together with its embeddings and projections.
#[derive(Clone, Debug)]
pub struct DirectProduct {
    pub group: Arc<Group>,
    pub embed_left: Vec<usize>,
    pub embed_right: Vec<usize>,
    pub proj_left: Vec<usize>,
    pub proj_right: Vec<usize>,
}

impl DirectProduct {
    /// The product element with components `x` (left) and `y` (right).
    pub fn pair(&self, x: usize, y: usize) -> usize {
        self.group.add(self.embed_left[x], self.embed_right[y])
    }
}

/// `left × right`, with factors concatenated and stably sorted descending.
pub fn direct_product(left: &Group, right: &Group) -> DirectProduct {
    let mut tagged: Vec<(usize, usize)> = left
        .factors()
        .iter()
        .chain(right.factors())
        .copied()
        .enumerate()
        .map(|(i, n)| (n, i))
        .collect();
    tagged.sort_by(|a, b| b.0.cmp(&a.0));
    let factors: Vec<usize> = tagged.iter().map(|t| t.0).collect();
    // position of original coordinate i in the product
    let mut pos = vec![0usize; tagged.len()];
    for (p, &(_, i)) in tagged.iter().enumerate() {
        pos[i] = p;
    }
    let group = Arc::new(Group::from_sorted_factors(factors));
    let kl = left.factors().len();
    let embed = |src: &Group, offset: usize| -> Vec<usize> {
        (0..src.order())
            .map(|x| {
                let mut c = vec![0usize; group.factors().len()];
                for (i, v) in src.coords(x).into_iter().enumerate() {
                    c[pos[offset + i]] = v;
                }
                group.index_of(&c).expect("coordinates in range")
            })
            .collect()
    };
    let embed_left = embed(left, 0);
    let embed_right = embed(right, kl);
    let mut proj_left = vec![0usize; group.order()];
    let mut proj_right = vec![0usize; group.order()];
    for x in 0..left.order() {
        for y in 0..right.order() {
            let z = group.add(embed_left[x], embed_right[y]);
            proj_left[z] = x;
            proj_right[z] = y;
        }
    }
    DirectProduct {
        group,
        embed_left,
        embed_right,
        proj_left,
        proj_right,
    }
}

/// All abelian groups of order `n` in elementary-divisor form.
pub fn abelian_groups_of_order(n: usize) -> Vec<Arc<Group>> {
    match n {
        0 => return Vec::new(),
        1 => return vec![Arc::new(Group::trivial())],
        _ => {}
    }
    let mut choices: Vec<Vec<Vec<usize>>> = Vec::new();
    for (q, e) in crate::arith::prime_factors(n as u64) {
        let per_prime: Vec<Vec<usize>> = crate::arith::integer_partitions(e)
            .into_iter()
            .map(|parts| parts.iter().map(|&k| (q as usize).pow(k)).collect())
            .collect();
        choices.push(per_prime);
    }
    let mut specs: Vec<Vec<usize>> = vec![Vec::new()];
    for per_prime in choices {
        let mut next = Vec::new();
        for s in &specs {
            for p in &per_prime {
                let mut t = s.clone();
                t.extend_from_slice(p);
                next.push(t);
            }
        }
        specs = next;
    }
    let mut groups: Vec<Arc<Group>> = specs.iter().map(|s| make_group(s).expect("valid")).collect();
    groups.sort_by(|a, b| a.factors().len().cmp(&b.factors().len()).then(b.factors().cmp(a.factors())));
    groups
}
