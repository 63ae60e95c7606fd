//! Tensor, wreath and S-wreath products, cyclotomic S-rings and subdirect
//! products of automorphism groups.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{direct_product, orbits, DirectProduct, Group, GroupMap, QuotientMap};
use crate::sring::{validate_partition, SRing};

/// `A1 ⊗ A2` over the external direct product of the two groups.
pub fn tensor(a1: &SRing, a2: &SRing) -> SRing {
    tensor_with_product(a1, a2).0
}

/// Like [`tensor`], also returning the product group with its embeddings.
pub fn tensor_with_product(a1: &SRing, a2: &SRing) -> (SRing, DirectProduct) {
    let dp = direct_product(a1.group(), a2.group());
    let left: Vec<Vec<usize>> = a1
        .classes()
        .iter()
        .map(|c| c.iter().map(|&x| dp.embed_left[x]).collect())
        .collect();
    let right: Vec<Vec<usize>> = a2
        .classes()
        .iter()
        .map(|c| c.iter().map(|&x| dp.embed_right[x]).collect())
        .collect();
    let sr = internal_tensor(&dp.group, &left, &right).expect("tensor of S-rings is an S-ring");
    (sr, dp)
}

/// Tensor product inside one group: classes `X1 + X2` for partitions of two
/// subgroups meeting trivially whose sum is the whole group.
pub fn internal_tensor(group: &Arc<Group>, left: &[Vec<usize>], right: &[Vec<usize>]) -> Result<SRing> {
    let mut classes = Vec::with_capacity(left.len() * right.len());
    for x in left {
        for y in right {
            let mut c: Vec<usize> = x
                .iter()
                .flat_map(|&a| y.iter().map(move |&b| group.add(a, b)))
                .collect();
            c.sort_unstable();
            classes.push(c);
        }
    }
    validate_partition(group, classes)
}

/// Wreath product `A_L ≀ A_Q`: the S-wreath product with `U = L`.
pub fn wreath(a_l: &SRing, embed_l: &GroupMap, a_q: &SRing, quotient: &QuotientMap) -> Result<SRing> {
    s_wreath(a_l, embed_l, a_q, quotient)
}

/// S-wreath product `A_U ≀_{U/L} A_Q` over the target group of `embed_u`.
///
/// `embed_u` is an injective homomorphism onto `U`; `quotient` is the
/// projection `G → G/L` (its kernel is `L`), and `a_q` lives on
/// `quotient.quotient`. Classes inside `U` come from `A_U`, classes outside
/// `U` are preimages of the `A_Q`-classes outside `S = U/L`.
pub fn s_wreath(a_u: &SRing, embed_u: &GroupMap, a_q: &SRing, quotient: &QuotientMap) -> Result<SRing> {
    let g = embed_u.target().clone();
    if embed_u.source() != a_u.group() {
        return Err(Error::InvalidInput("embedding source differs from the group of A_U".into()));
    }
    if quotient.proj.len() != g.order() || quotient.proj.iter().any(|p| p.is_none()) {
        return Err(Error::QuotientMismatch("projection must be defined on the whole group".into()));
    }
    if a_q.group() != &quotient.quotient {
        return Err(Error::QuotientMismatch(format!(
            "A_Q lives on {} but the quotient is {}",
            a_q.group(),
            quotient.quotient
        )));
    }
    let u_members = embed_u.image_of_set(&(0..a_u.group().order()).collect::<Vec<_>>());
    if u_members.len() != a_u.group().order() {
        return Err(Error::InvalidInput("embedding of U is not injective".into()));
    }
    let mut in_u = vec![false; g.order()];
    for &x in &u_members {
        in_u[x] = true;
    }
    let pi = |x: usize| quotient.proj[x].expect("checked total");
    if let Some(l) = (0..g.order()).find(|&x| pi(x) == 0 && !in_u[x]) {
        return Err(Error::IncompatibleSection(format!(
            "element {l} of L lies outside U"
        )));
    }
    let s_set: BTreeSet<usize> = u_members.iter().map(|&x| pi(x)).collect();
    let s_vec: Vec<usize> = s_set.iter().copied().collect();
    if !a_q.is_a_set(&s_vec) {
        return Err(Error::IncompatibleSection("U/L is not an A_Q-subgroup".into()));
    }
    let mut from_u: Vec<Vec<usize>> = a_u
        .classes()
        .iter()
        .map(|c| {
            let img: BTreeSet<usize> = c.iter().map(|&x| pi(embed_u.apply(x))).collect();
            img.into_iter().collect()
        })
        .collect();
    from_u.sort();
    from_u.dedup();
    let mut from_q: Vec<Vec<usize>> = a_q
        .classes()
        .iter()
        .filter(|c| s_set.contains(&c[0]))
        .cloned()
        .collect();
    from_q.sort();
    if from_u != from_q {
        return Err(Error::IncompatibleSection(format!(
            "(A_U)_S has classes {from_u:?} but (A_Q)_S has {from_q:?}"
        )));
    }
    let mut classes: Vec<Vec<usize>> = a_u
        .classes()
        .iter()
        .map(|c| embed_u.image_of_set(c))
        .collect();
    for c in a_q.classes() {
        if !s_set.contains(&c[0]) {
            classes.push(quotient.preimage(c));
        }
    }
    validate_partition(&g, classes)
}

/// `cyc(K, G)`: the orbits of the group generated by `maps`.
pub fn cyclotomic(group: &Arc<Group>, maps: &[GroupMap]) -> Result<SRing> {
    for (i, m) in maps.iter().enumerate() {
        if m.source() != group || !m.is_automorphism() {
            return Err(Error::NotAutomorphism(format!("map {i} is not an automorphism of {group}")));
        }
    }
    let all: Vec<usize> = (0..group.order()).collect();
    validate_partition(group, orbits(group, maps, &all))
}

/// Data for the subdirect product `W(K, K₀, M, M₀, ψ)` inside `Aut(H) × Aut(P)`.
///
/// `K`, `K₀`, `M`, `M₀` are given by generators. `ψ` is given by one element
/// `psi_source ∈ K` whose coset generates `K/K₀` and the element
/// `psi_image ∈ M` whose coset is its image.
#[derive(Clone, Debug)]
pub struct SubdirectSpec {
    pub left: Arc<Group>,
    pub right: Arc<Group>,
    pub k: Vec<GroupMap>,
    pub k0: Vec<GroupMap>,
    pub m: Vec<GroupMap>,
    pub m0: Vec<GroupMap>,
    pub psi_source: GroupMap,
    pub psi_image: GroupMap,
}

/// The subdirect product as automorphisms of `H × P`.
#[derive(Clone, Debug)]
pub struct Subdirect {
    pub product: DirectProduct,
    pub maps: Vec<GroupMap>,
}

/// Closure of a set of permutations (as tables) under composition.
pub(crate) fn generate_tables(identity_len: usize, gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let id: Vec<usize> = (0..identity_len).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(t) = queue.pop_front() {
        for g in gens {
            let next: Vec<usize> = t.iter().map(|&y| g[y]).collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = seen.into_iter().collect();
    out.sort();
    out
}

fn compose(first: &[usize], then: &[usize]) -> Vec<usize> {
    first.iter().map(|&y| then[y]).collect()
}

fn invert(t: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; t.len()];
    for (x, &y) in t.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

struct MapGroup {
    all: Vec<Vec<usize>>,
    normal: Vec<Vec<usize>>,
}

fn build_pair(group: &Arc<Group>, gens: &[GroupMap], normal_gens: &[GroupMap], what: &str) -> Result<MapGroup> {
    for m in gens.iter().chain(normal_gens) {
        if m.source() != group || !m.is_automorphism() {
            return Err(Error::NotAutomorphism(format!("{what}: generator is not an automorphism of {group}")));
        }
    }
    let n = group.order();
    let all = generate_tables(n, &gens.iter().map(|m| m.table().to_vec()).collect::<Vec<_>>());
    let normal = generate_tables(n, &normal_gens.iter().map(|m| m.table().to_vec()).collect::<Vec<_>>());
    let all_set: HashSet<&Vec<usize>> = all.iter().collect();
    let normal_set: HashSet<&Vec<usize>> = normal.iter().collect();
    if !normal.iter().all(|t| all_set.contains(t)) {
        return Err(Error::InvalidSpec(format!("{what}: normal subgroup is not contained in the group")));
    }
    for a in &all {
        let a_inv = invert(a);
        for k in &normal {
            let conj = compose(&compose(&a_inv, k), a);
            if !normal_set.contains(&conj) {
                return Err(Error::InvalidSpec(format!("{what}: subgroup is not normal")));
            }
        }
    }
    Ok(MapGroup { all, normal })
}

/// Order of the coset of `t` in `all / normal`, or `None` if `t ∉ all`.
fn coset_order(group: &MapGroup, t: &[usize]) -> Option<usize> {
    if group.all.binary_search_by(|x| x.as_slice().cmp(t)).is_err() {
        return None;
    }
    let normal: HashSet<&Vec<usize>> = group.normal.iter().collect();
    let mut power = t.to_vec();
    let mut k = 1;
    while !normal.contains(&power) {
        power = compose(&power, t);
        k += 1;
    }
    Some(k)
}

/// `W(K, K₀, M, M₀, ψ) = {(α, β) : ψ(αK₀) = βM₀}` acting on `H × P`.
pub fn subdirect(spec: &SubdirectSpec) -> Result<Subdirect> {
    let kg = build_pair(&spec.left, &spec.k, &spec.k0, "K")?;
    let mg = build_pair(&spec.right, &spec.m, &spec.m0, "M")?;
    if kg.all.len() % kg.normal.len() != 0 || mg.all.len() % mg.normal.len() != 0 {
        return Err(Error::InvalidSpec("normal subgroup order does not divide group order".into()));
    }
    let index = kg.all.len() / kg.normal.len();
    let m_index = mg.all.len() / mg.normal.len();
    if index != m_index {
        return Err(Error::InvalidSpec(format!("|K:K0| = {index} differs from |M:M0| = {m_index}")));
    }
    let ko = coset_order(&kg, spec.psi_source.table())
        .ok_or_else(|| Error::InvalidSpec("ψ source is not in K".into()))?;
    let mo = coset_order(&mg, spec.psi_image.table())
        .ok_or_else(|| Error::InvalidSpec("ψ image is not in M".into()))?;
    if ko != index || mo != index {
        return Err(Error::InvalidSpec(format!(
            "ψ must map a generator of the cyclic quotient K/K0 (coset orders {ko}, {mo}, index {index})"
        )));
    }
    let product = direct_product(&spec.left, &spec.right);
    let pg = product.group.clone();
    let mut maps = Vec::with_capacity(kg.normal.len() * mg.all.len());
    let mut kappa: Vec<usize> = (0..spec.left.order()).collect();
    let mut mu: Vec<usize> = (0..spec.right.order()).collect();
    for _ in 0..index {
        for k0 in &kg.normal {
            let alpha = compose(k0, &kappa);
            for m0 in &mg.normal {
                let beta = compose(m0, &mu);
                let table: Vec<usize> = (0..pg.order())
                    .map(|z| product.pair(alpha[product.proj_left[z]], beta[product.proj_right[z]]))
                    .collect();
                maps.push(GroupMap::from_table_unchecked(&pg, &pg, table));
            }
        }
        kappa = compose(&kappa, spec.psi_source.table());
        mu = compose(&mu, spec.psi_image.table());
    }
    maps.sort_by(|a, b| a.table().cmp(b.table()));
    maps.dedup();
    Ok(Subdirect { product, maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_group, quotient_map, Section};
    use crate::sring::{group_ring, radical, rank_two};

    #[test]
    fn tensor_examples() {
        let c3 = make_group(&[3]).unwrap();
        let c5 = make_group(&[5]).unwrap();
        let t = tensor(&group_ring(&c3), &group_ring(&c5));
        assert_eq!(t.rank(), 15);
        let t = tensor(&rank_two(&c3), &rank_two(&c5));
        assert_eq!(t.rank(), 4);
        assert_eq!(t.size_profile().into_iter().collect::<Vec<_>>(), vec![2, 4, 8]);
        let t = tensor(&rank_two(&c3), &group_ring(&c5));
        assert_eq!(t.rank(), 10);
    }

    fn c9_wreath(a_l: &SRing, a_q_of: impl Fn(&Arc<Group>) -> SRing) -> SRing {
        let c9 = make_group(&[9]).unwrap();
        let l = c9.subgroup_generated(&[3]);
        let q = quotient_map(&c9, &Section::new(c9.whole(), l).unwrap());
        let emb = GroupMap::from_images(a_l.group(), &c9, &[3]).unwrap();
        wreath(a_l, &emb, &a_q_of(&q.quotient), &q).unwrap()
    }

    #[test]
    fn wreath_examples() {
        let c3 = make_group(&[3]).unwrap();
        let w = c9_wreath(&group_ring(&c3), |q| group_ring(q));
        assert_eq!(w.rank(), 5);
        let sizes: Vec<usize> = w.classes().iter().map(|c| c.len()).collect();
        assert_eq!(sizes, vec![1, 1, 1, 3, 3]);
        let w = c9_wreath(&rank_two(&c3), |q| rank_two(q));
        assert_eq!(w.classes(), &[vec![0], vec![3, 6], vec![1, 2, 4, 5, 7, 8]]);
        for class in w.classes().iter().skip(2) {
            assert!(radical(w.group(), class).unwrap().order() >= 3);
        }
    }

    #[test]
    fn wreath_over_trivial_quotient() {
        let c6 = make_group(&[6]).unwrap();
        let a = crate::closure::closure_of_sets(&c6, &[vec![1, 5]]);
        let q = quotient_map(&c6, &Section::new(c6.whole(), c6.whole()).unwrap());
        let t = rank_two(&q.quotient);
        let w = wreath(&a, &GroupMap::identity(&c6), &t, &q).unwrap();
        assert_eq!(w, a);
    }

    #[test]
    fn incompatible_s_wreath() {
        // A_U = τ(C_15) restricted on S = C_15/C_3 is rank 2, A_Q = ℤ(C_45/C_3) is discrete.
        let c45 = make_group(&[45]).unwrap();
        let c15 = make_group(&[15]).unwrap();
        let emb = GroupMap::from_images(&c15, &c45, &[3]).unwrap();
        let l = c45.subgroup_generated(&[15]);
        let q = quotient_map(&c45, &Section::new(c45.whole(), l).unwrap());
        let err = s_wreath(&rank_two(&c15), &emb, &group_ring(&q.quotient), &q).unwrap_err();
        assert!(matches!(err, Error::IncompatibleSection(_)));
    }

    #[test]
    fn cyclotomic_examples() {
        let c5 = make_group(&[5]).unwrap();
        assert_eq!(cyclotomic(&c5, &[]).unwrap(), group_ring(&c5));
        let auts = c5.automorphisms().unwrap();
        assert_eq!(cyclotomic(&c5, &auts).unwrap(), rank_two(&c5));
        let c15 = make_group(&[15]).unwrap();
        let a0 = cyclotomic(&c15, &[GroupMap::multiplier(&c15, 2)]).unwrap();
        assert_eq!(
            a0.classes(),
            &[vec![0], vec![5, 10], vec![1, 2, 4, 8], vec![3, 6, 9, 12], vec![7, 11, 13, 14]]
        );
        let not_aut = GroupMap::multiplier(&c15, 3);
        assert!(matches!(cyclotomic(&c15, &[not_aut]), Err(Error::NotAutomorphism(_))));
    }

    fn w0_spec(p: usize, m_index_two: bool) -> SubdirectSpec {
        let c3 = make_group(&[3]).unwrap();
        let cp = make_group(&[p]).unwrap();
        let root = crate::arith::primitive_root(p as u64) as i64;
        let neg = GroupMap::multiplier(&c3, -1);
        let gen = GroupMap::multiplier(&cp, root);
        SubdirectSpec {
            left: c3.clone(),
            right: cp.clone(),
            k: vec![neg.clone()],
            k0: vec![],
            m: vec![gen.clone()],
            m0: if m_index_two {
                vec![GroupMap::multiplier(&cp, root * root)]
            } else {
                vec![gen.clone()]
            },
            psi_source: neg,
            psi_image: gen,
        }
    }

    #[test]
    fn subdirect_w0() {
        let w = subdirect(&w0_spec(5, true)).unwrap();
        assert_eq!(w.maps.len(), 4);
        let mismatch = subdirect(&w0_spec(5, false)).unwrap_err();
        assert!(matches!(mismatch, Error::InvalidSpec(_)));
    }

    #[test]
    fn subdirect_full_product() {
        let c3 = make_group(&[3]).unwrap();
        let c5 = make_group(&[5]).unwrap();
        let neg = GroupMap::multiplier(&c3, -1);
        let two = GroupMap::multiplier(&c5, 2);
        let spec = SubdirectSpec {
            left: c3.clone(),
            right: c5.clone(),
            k: vec![neg.clone()],
            k0: vec![neg.clone()],
            m: vec![two.clone()],
            m0: vec![two],
            psi_source: GroupMap::identity(&c3),
            psi_image: GroupMap::identity(&c5),
        };
        let w = subdirect(&spec).unwrap();
        assert_eq!(w.maps.len(), 8);
        let tables: HashSet<Vec<usize>> = w.maps.iter().map(|m| m.table().to_vec()).collect();
        for a in &w.maps {
            for b in &w.maps {
                assert!(tables.contains(a.then(b).table()));
            }
        }
    }
}
