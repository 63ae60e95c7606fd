//! The S-ring data structure: validation, structure constants, A-sets,
//! radicals, sections and the multiplier action.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::group::{quotient_map, Group, QuotientMap, Section, Subgroup};

/// Structure constants `c^Z_{X,Y}`, stored sparsely per ordered pair `(X, Y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    rank: usize,
    rows: Vec<Vec<(u32, u32)>>,
}

impl StructureConstants {
    /// Nonzero `(Z, c^Z_{X,Y})` entries, sorted by `Z`.
    pub fn row(&self, x: usize, y: usize) -> &[(u32, u32)] {
        &self.rows[x * self.rank + y]
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> u32 {
        let row = self.row(x, y);
        match row.binary_search_by_key(&(z as u32), |e| e.0) {
            Ok(i) => row[i].1,
            Err(_) => 0,
        }
    }

    /// All nonzero constants as `[X, Y, Z, c]` quadruples.
    pub fn triples(&self) -> Vec<[u32; 4]> {
        let mut out = Vec::new();
        for x in 0..self.rank {
            for y in 0..self.rank {
                for &(z, c) in self.row(x, y) {
                    out.push([x as u32, y as u32, z, c]);
                }
            }
        }
        out
    }

    /// Dense `rank³` table indexed `[(x * rank + y) * rank + z]`.
    pub fn dense(&self) -> Vec<u32> {
        let r = self.rank;
        let mut out = vec![0u32; r * r * r];
        for x in 0..r {
            for y in 0..r {
                for &(z, c) in self.row(x, y) {
                    out[(x * r + y) * r + z as usize] = c;
                }
            }
        }
        out
    }
}

/// An S-ring over a finite abelian group, with canonically ordered classes:
/// class 0 is `{e}`, the rest sorted by (size, smallest element).
#[derive(Clone)]
pub struct SRing {
    group: Arc<Group>,
    class_of: Vec<u32>,
    classes: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    constants: StructureConstants,
}

impl PartialEq for SRing {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.class_of == other.class_of
    }
}

impl Eq for SRing {}

impl std::hash::Hash for SRing {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.group.hash(state);
        self.class_of.hash(state);
    }
}

impl fmt::Debug for SRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SRing({}, {:?})", self.group, self.classes)
    }
}

/// Sorts classes into canonical order; fails if `{e}` is not a class.
fn canonical_classes(group: &Group, mut classes: Vec<Vec<usize>>) -> Result<Vec<Vec<usize>>> {
    let n = group.order();
    let mut seen = vec![false; n];
    for class in classes.iter_mut() {
        if class.is_empty() {
            return Err(Error::InvalidPartition("empty class".into()));
        }
        class.sort_unstable();
        for &x in class.iter() {
            if x >= n {
                return Err(Error::InvalidPartition(format!("element {x} is outside the group")));
            }
            if seen[x] {
                return Err(Error::InvalidPartition(format!("element {x} occurs twice")));
            }
            seen[x] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::InvalidPartition(format!("element {missing} is not covered")));
    }
    let id_class = classes.iter().find(|c| c[0] == 0).expect("identity covered");
    if id_class.len() != 1 {
        return Err(Error::MissingIdentityClass(id_class.clone()));
    }
    classes.sort_by(|a, b| {
        let ka = (a[0] != 0, a.len(), a[0]);
        let kb = (b[0] != 0, b.len(), b[0]);
        ka.cmp(&kb)
    });
    Ok(classes)
}

/// Fills `buf` with the coefficients of the product of the class sums of `xs` and `ys`.
pub(crate) fn convolve(group: &Group, xs: &[usize], ys: &[usize], buf: &mut [u32]) {
    buf.iter_mut().for_each(|v| *v = 0);
    for &a in xs {
        for &b in ys {
            buf[group.add(a, b)] += 1;
        }
    }
}

/// Checks the S-ring axioms for a partition and computes structure constants.
pub fn validate_partition(group: &Arc<Group>, classes: Vec<Vec<usize>>) -> Result<SRing> {
    let classes = canonical_classes(group, classes)?;
    let n = group.order();
    let rank = classes.len();
    let mut class_of = vec![0u32; n];
    for (i, class) in classes.iter().enumerate() {
        for &x in class {
            class_of[x] = i as u32;
        }
    }
    let mut inverse = vec![0usize; rank];
    for (i, class) in classes.iter().enumerate() {
        let j = class_of[group.neg(class[0])] as usize;
        let ok = classes[j].len() == class.len()
            && class.iter().all(|&x| class_of[group.neg(x)] as usize == j);
        if !ok {
            return Err(Error::NotInverseClosed {
                class: i,
                members: class.clone(),
            });
        }
        inverse[i] = j;
    }
    let mut rows = vec![Vec::new(); rank * rank];
    let mut buf = vec![0u32; n];
    for x in 0..rank {
        for y in x..rank {
            convolve(group, &classes[x], &classes[y], &mut buf);
            let mut row = Vec::new();
            for (z, class) in classes.iter().enumerate() {
                let c = buf[class[0]];
                if let Some(&w) = class.iter().find(|&&w| buf[w] != c) {
                    return Err(Error::NotMultiplicativelyClosed {
                        x,
                        y,
                        z,
                        first: class[0],
                        first_coeff: c,
                        second: w,
                        second_coeff: buf[w],
                    });
                }
                if c > 0 {
                    row.push((z as u32, c));
                }
            }
            rows[y * rank + x] = row.clone();
            rows[x * rank + y] = row;
        }
    }
    Ok(SRing {
        group: group.clone(),
        class_of,
        classes,
        inverse,
        constants: StructureConstants { rank, rows },
    })
}

/// Builds an S-ring from per-element labels (equal labels = same class).
pub fn from_labels(group: &Arc<Group>, labels: &[u32]) -> Result<SRing> {
    validate_partition(group, classes_from_labels(labels))
}

pub(crate) fn classes_from_labels(labels: &[u32]) -> Vec<Vec<usize>> {
    let k = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
    let mut classes = vec![Vec::new(); k];
    for (x, &l) in labels.iter().enumerate() {
        classes[l as usize].push(x);
    }
    classes.retain(|c| !c.is_empty());
    classes
}

impl SRing {
    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class(&self, i: usize) -> &[usize] {
        &self.classes[i]
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x] as usize
    }

    /// Per-element class labels; equal for equal S-rings.
    pub fn labels(&self) -> &[u32] {
        &self.class_of
    }

    pub fn size(&self, i: usize) -> usize {
        self.classes[i].len()
    }

    /// Index of the class `X⁻¹` for class `X = i`.
    pub fn inverse_class(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn constants(&self) -> &StructureConstants {
        &self.constants
    }

    pub fn structure_constant(&self, x: usize, y: usize, z: usize) -> u32 {
        self.constants.get(x, y, z)
    }

    /// `N(A)`: sizes of the nonidentity classes.
    pub fn size_profile(&self) -> BTreeSet<usize> {
        self.classes[1..].iter().map(|c| c.len()).collect()
    }

    /// True iff `set` is a union of classes.
    pub fn is_a_set(&self, set: &[usize]) -> bool {
        let mut mask = vec![false; self.group.order()];
        let mut hit = vec![false; self.rank()];
        let mut distinct = 0;
        for &x in set {
            if !mask[x] {
                mask[x] = true;
                distinct += 1;
                hit[self.class_of(x)] = true;
            }
        }
        let covered: usize = (0..self.rank()).filter(|&i| hit[i]).map(|i| self.size(i)).sum();
        covered == distinct
    }

    /// `self ≤ other`: every class of `self` is a union of classes of `other`.
    pub fn is_subring_of(&self, other: &SRing) -> bool {
        self.group == other.group && self.classes.iter().all(|c| other.is_a_set(c))
    }

    /// The classes contained in an A-set, in index order.
    pub fn classes_in(&self, set: &[usize]) -> Vec<usize> {
        let mut ids: Vec<usize> = set.iter().map(|&x| self.class_of(x)).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn a_subgroups(&self) -> Result<Vec<Subgroup>> {
        Ok(self
            .group
            .all_subgroups()?
            .into_iter()
            .filter(|h| self.is_a_set(h.members()))
            .collect())
    }

    /// The S-ring with classes `X^(m)`; equal to `self` for every valid `m`.
    pub fn multiplier_image(&self, m: i64) -> Result<SRing> {
        let order = self.group.order();
        if gcd(m.unsigned_abs(), order as u64) != 1 {
            return Err(Error::InvalidMultiplier { m, order });
        }
        let classes: Vec<Vec<usize>> = self
            .classes
            .iter()
            .map(|c| power_set(&self.group, c, m))
            .collect();
        validate_partition(&self.group, classes)
    }

    /// `A_S` for an A-section `S = U/L`, with the projection used.
    pub fn section_sring_with_map(&self, section: &Section) -> Result<(SRing, QuotientMap)> {
        if !self.is_a_set(section.upper.members()) {
            return Err(Error::NotASection("upper subgroup is not an A-set".into()));
        }
        if !self.is_a_set(section.lower.members()) {
            return Err(Error::NotASection("lower subgroup is not an A-set".into()));
        }
        let q = quotient_map(&self.group, section);
        let mut images: Vec<Vec<usize>> = Vec::new();
        for class in &self.classes {
            if !section.upper.contains(class[0]) {
                continue;
            }
            let mut img: Vec<usize> = class.iter().map(|&x| q.proj[x].expect("inside U")).collect();
            img.sort_unstable();
            img.dedup();
            images.push(img);
        }
        images.sort();
        images.dedup();
        let sr = validate_partition(&q.quotient, images).map_err(|e| {
            Error::InternalInvariant(format!("section images do not form an S-ring: {e}"))
        })?;
        Ok((sr, q))
    }

    pub fn section_sring(&self, section: &Section) -> Result<SRing> {
        self.section_sring_with_map(section).map(|(s, _)| s)
    }

    /// The restriction `A_H` to an A-subgroup, as an S-ring over `H` (via `H/{e}`).
    pub fn restriction(&self, h: &Subgroup) -> Result<(SRing, QuotientMap)> {
        let s = Section::new(h.clone(), self.group.trivial_subgroup())?;
        self.section_sring_with_map(&s)
    }

    /// The constant `|X ∩ Hx|` over `x ∈ X`, verifying constancy.
    pub fn intersection_profile(&self, h: &Subgroup, class: usize) -> Result<usize> {
        let x_set = &self.classes[class];
        let mut mask = vec![false; self.group.order()];
        for &x in x_set {
            mask[x] = true;
        }
        let mut value = None;
        for &x in x_set {
            let count = h.members().iter().filter(|&&g| mask[self.group.add(g, x)]).count();
            match value {
                None => value = Some(count),
                Some(v) if v != count => {
                    return Err(Error::InternalInvariant(format!(
                        "|X ∩ Hx| varies over class {class}: {v} vs {count}"
                    )))
                }
                _ => {}
            }
        }
        Ok(value.unwrap_or(0))
    }
}

/// `rad(X) = {g : g + X = X}`.
pub fn radical(group: &Group, set: &[usize]) -> Result<Subgroup> {
    if set.is_empty() {
        return Err(Error::InvalidInput("radical of the empty set".into()));
    }
    let mut mask = vec![false; group.order()];
    for &x in set {
        mask[x] = true;
    }
    let x0 = set[0];
    let mut members: Vec<usize> = set
        .iter()
        .map(|&y| group.sub(y, x0))
        .filter(|&g| set.iter().all(|&x| mask[group.add(g, x)]))
        .collect();
    members.sort_unstable();
    members.dedup();
    Ok(Subgroup::from_sorted_members(members))
}

/// `X^(m) = {m·x : x ∈ X}`, sorted.
pub fn power_set(group: &Group, set: &[usize], m: i64) -> Vec<usize> {
    let mut out: Vec<usize> = set.iter().map(|&x| group.mul(x, m)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn generated_subgroup(group: &Group, set: &[usize]) -> Subgroup {
    group.subgroup_generated(set)
}

/// Trivial S-ring `τ(G)` with classes `{e}` and `G#`.
pub fn rank_two(group: &Arc<Group>) -> SRing {
    let mut classes = vec![vec![0]];
    if group.order() > 1 {
        classes.push((1..group.order()).collect());
    }
    validate_partition(group, classes).expect("rank two partition is an S-ring")
}

/// The group ring `ℤG`, all singletons.
pub fn group_ring(group: &Arc<Group>) -> SRing {
    validate_partition(group, (0..group.order()).map(|x| vec![x]).collect())
        .expect("discrete partition is an S-ring")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;

    fn c(n: usize) -> Arc<Group> {
        make_group(&[n]).unwrap()
    }

    fn pentagon() -> SRing {
        validate_partition(&c(5), vec![vec![0], vec![1, 4], vec![2, 3]]).unwrap()
    }

    fn a0_c15() -> SRing {
        validate_partition(
            &c(15),
            vec![vec![0], vec![1, 2, 4, 8], vec![7, 11, 13, 14], vec![3, 6, 9, 12], vec![5, 10]],
        )
        .unwrap()
    }

    #[test]
    fn group_ring_of_c5() {
        let z = group_ring(&c(5));
        assert_eq!(z.rank(), 5);
    }

    #[test]
    fn c4_fusion() {
        let c4 = c(4);
        let a = validate_partition(&c4, vec![vec![0], vec![2], vec![1, 3]]).unwrap();
        assert_eq!(a.rank(), 3);
        // (g + g³)² = 2e + 2g²
        let x = a.class_of(1);
        assert_eq!(a.structure_constant(x, x, 0), 2);
        assert_eq!(a.structure_constant(x, x, a.class_of(2)), 2);
        assert_eq!(a.structure_constant(x, x, x), 0);
    }

    #[test]
    fn c4_not_inverse_closed() {
        let err = validate_partition(&c(4), vec![vec![0], vec![1], vec![2, 3]]).unwrap_err();
        assert!(matches!(err, Error::NotInverseClosed { .. }));
    }

    #[test]
    fn other_validation_errors() {
        let err = validate_partition(&c(4), vec![vec![0, 2], vec![1, 3]]).unwrap_err();
        assert!(matches!(err, Error::MissingIdentityClass(_)));
        let err = validate_partition(&c(5), vec![vec![0], vec![1, 4], vec![2]]).unwrap_err();
        assert!(matches!(err, Error::InvalidPartition(_)));
        // {1,2},{3,4} over C5 is not inverse closed; {1,4},{2,3} fine; C6 example of a
        // non-closed product: {e},{3},{1,5},{2,4} is an S-ring, {e},{1,5},{2,3,4} is not.
        let err = validate_partition(&c(6), vec![vec![0], vec![1, 5], vec![2, 3, 4]]).unwrap_err();
        assert!(matches!(err, Error::NotMultiplicativelyClosed { .. }));
    }

    #[test]
    fn structure_constant_examples() {
        let t = rank_two(&c(9));
        assert_eq!(t.structure_constant(1, 1, 1), 7);
        let p = pentagon();
        let (x, y) = (p.class_of(1), p.class_of(2));
        assert_eq!(p.structure_constant(x, x, y), 1);
        for a in [pentagon(), a0_c15(), rank_two(&c(9))] {
            for i in 0..a.rank() {
                assert_eq!(a.structure_constant(i, a.inverse_class(i), 0) as usize, a.size(i));
            }
        }
    }

    #[test]
    fn a_sets_and_subgroups() {
        let p = pentagon();
        assert!(p.is_a_set(&[1, 4]));
        assert!(p.is_a_set(&[0, 1, 2, 3, 4]));
        assert!(p.is_a_set(&[0]));
        assert!(!p.is_a_set(&[1, 2]));
        let orders: Vec<usize> = a0_c15().a_subgroups().unwrap().iter().map(|h| h.order()).collect();
        assert_eq!(orders, vec![1, 3, 5, 15]);
        let t = rank_two(&c(12));
        assert_eq!(t.a_subgroups().unwrap().len(), 2);
        assert_eq!(group_ring(&c(12)).a_subgroups().unwrap().len(), 6);
    }

    #[test]
    fn radicals() {
        let g = c(15);
        let all_but_e: Vec<usize> = (1..15).collect();
        assert!(radical(&g, &all_but_e).unwrap().is_trivial());
        assert!(radical(&g, &[3, 6, 9, 12]).unwrap().is_trivial());
        assert_eq!(radical(&g, &[1, 6, 11, 2, 7, 12]).unwrap().members(), &[0, 5, 10]);
        assert!(matches!(radical(&g, &[]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn power_sets() {
        let g = c(15);
        assert_eq!(power_set(&g, &[1, 2, 4, 8], 2), vec![1, 2, 4, 8]);
        assert_eq!(power_set(&g, &[7, 3], 1), vec![3, 7]);
        assert_eq!(generated_subgroup(&g, &[5, 10]).members(), &[0, 5, 10]);
    }

    #[test]
    fn multipliers_fix_the_partition() {
        let a = a0_c15();
        for m in [1i64, 2, 4, 7, 8, 11, 13, 14, -1] {
            assert_eq!(a.multiplier_image(m).unwrap(), a);
        }
        assert!(matches!(a.multiplier_image(3), Err(Error::InvalidMultiplier { .. })));
    }

    #[test]
    fn sections_of_a0() {
        let a = a0_c15();
        let g = a.group().clone();
        let c5 = g.subgroup_generated(&[3]);
        let c3 = g.subgroup_generated(&[5]);
        let on_c5 = a.section_sring(&Section::new(c5, g.trivial_subgroup()).unwrap()).unwrap();
        assert_eq!(on_c5.rank(), 2);
        let mod_c5 = a.section_sring(&Section::new(g.whole(), g.subgroup_generated(&[3])).unwrap()).unwrap();
        assert_eq!(mod_c5.rank(), 2);
        let mod_c3 = a.section_sring(&Section::new(g.whole(), c3.clone()).unwrap()).unwrap();
        assert_eq!(mod_c3.rank(), 2);
        let whole = Section::new(g.whole(), g.trivial_subgroup()).unwrap();
        assert_eq!(group_ring(&g).section_sring(&whole).unwrap(), group_ring(&g));
        let t = rank_two(&g);
        assert!(matches!(
            t.section_sring(&Section::new(g.whole(), c3).unwrap()),
            Err(Error::NotASection(_))
        ));
    }

    #[test]
    fn intersection_profiles() {
        let a = a0_c15();
        let g = a.group().clone();
        let h = g.subgroup_generated(&[5]);
        let x = a.class_of(1);
        let v = a.intersection_profile(&h, x).unwrap();
        assert!(v == 1 || v == 2);
        assert_eq!(a.intersection_profile(&g.trivial_subgroup(), x).unwrap(), 1);
        let inside = a.class_of(5);
        assert_eq!(a.intersection_profile(&h, inside).unwrap(), 2);
    }

    #[test]
    fn constants_export() {
        let p = pentagon();
        let triples = p.constants().triples();
        let total: u32 = triples
            .iter()
            .filter(|t| t[0] == 1 && t[1] == 1)
            .map(|t| t[3] * p.size(t[2] as usize) as u32)
            .sum();
        assert_eq!(total, 4);
    }
}
