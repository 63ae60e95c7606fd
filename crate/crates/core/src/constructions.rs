//! Named S-ring families over groups of order `3p` and `9p`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::arith::{is_prime, pow_mod, primitive_root};
use crate::error::{Error, Result};
use crate::group::{
    direct_product, make_group, quotient_map, DirectProduct, Group, GroupMap, Section, Subgroup,
};
use crate::products::{cyclotomic, internal_tensor, s_wreath, subdirect, SubdirectSpec};
use crate::sring::{validate_partition, SRing};

/// Which order-9 group sits below `P`: cyclic `C₉` or elementary `E₉`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Cyclic,
    Elementary,
}

impl Flavor {
    pub fn letter(self) -> char {
        match self {
            Flavor::Cyclic => 'C',
            Flavor::Elementary => 'E',
        }
    }
}

impl FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Flavor> {
        match s {
            "C" | "c" => Ok(Flavor::Cyclic),
            "E" | "e" => Ok(Flavor::Elementary),
            _ => Err(Error::InvalidInput(format!("flavor must be C or E, got {s:?}"))),
        }
    }
}

/// A named family: `A0`, `A1*`..`A3*`, or the cyclotomic lines `A1`..`A11`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A0,
    Star(u8),
    Line(u8),
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A0 => write!(f, "A0"),
            Family::Star(i) => write!(f, "A{i}*"),
            Family::Line(i) => write!(f, "A{i}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        let bad = || Error::InvalidInput(format!("unknown family {s:?}"));
        let rest = s.strip_prefix('A').ok_or_else(bad)?;
        if rest == "0" {
            return Ok(Family::A0);
        }
        let (digits, star) = match rest.strip_suffix('*') {
            Some(d) => (d, true),
            None => (rest, false),
        };
        let i: u8 = digits.parse().map_err(|_| bad())?;
        match (star, i) {
            (true, 1..=3) => Ok(Family::Star(i)),
            (false, 1..=11) => Ok(Family::Line(i)),
            _ => Err(bad()),
        }
    }
}

/// `G = H × P` with the named elements `a`, `b` (for `E₉`) or `c` (for `C₉`) and `z`.
#[derive(Clone, Debug)]
pub struct Ambient {
    pub flavor: Flavor,
    pub p: usize,
    pub product: DirectProduct,
    pub z: usize,
    /// `a` and `b` for `E₉`; `c` and `c³` for `C₉`.
    pub top: usize,
    pub bottom: usize,
}

impl Ambient {
    pub fn group(&self) -> &Arc<Group> {
        &self.product.group
    }

    /// The Sylow-`p` subgroup `P = ⟨z⟩`.
    pub fn p_part(&self) -> Subgroup {
        self.group().subgroup_generated(&[self.z])
    }

    /// The order-9 subgroup `H`.
    pub fn h_part(&self) -> Subgroup {
        self.group().subgroup_generated(&[self.top, self.bottom])
    }
}

fn check_prime(p: usize) -> Result<()> {
    if p < 5 || !is_prime(p as u64) {
        return Err(Error::OutOfRange(format!("p must be a prime at least 5, got {p}")));
    }
    Ok(())
}

pub fn ambient(flavor: Flavor, p: usize) -> Result<Ambient> {
    check_prime(p)?;
    let cp = make_group(&[p])?;
    match flavor {
        Flavor::Elementary => {
            let e9 = make_group(&[3, 3])?;
            let product = direct_product(&e9, &cp);
            let a = product.embed_left[e9.unit(0)];
            let b = product.embed_left[e9.unit(1)];
            let z = product.embed_right[1];
            Ok(Ambient { flavor, p, product, z, top: b, bottom: a })
        }
        Flavor::Cyclic => {
            let c9 = make_group(&[9])?;
            let product = direct_product(&c9, &cp);
            let c = product.embed_left[1];
            let z = product.embed_right[1];
            let c0 = product.group.mul(c, 3);
            Ok(Ambient { flavor, p, product, z, top: c, bottom: c0 })
        }
    }
}

/// The multiplier generating `W₀` on `C_{3p}`: `−1 mod 3` and a primitive root mod `p`.
pub fn a0_multiplier(p: usize) -> i64 {
    let g = primitive_root(p as u64) as usize;
    (0..3 * p).find(|m| m % 3 == 2 && m % p == g).expect("CRT solution exists") as i64
}

/// `A₀ = cyc(W₀, C_{3p})`.
pub fn build_a0(p: usize) -> Result<SRing> {
    check_prime(p)?;
    let c3p = make_group(&[3 * p])?;
    cyclotomic(&c3p, &[GroupMap::multiplier(&c3p, a0_multiplier(p))])
}

/// `A_i* = A₀ ≀_{C_{3p}/C₃} A_Q` over `H × P`.
pub fn build_a_star(i: u8, flavor: Flavor, p: usize) -> Result<SRing> {
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidInput(format!("A_i* needs i in 1..=3, got {i}")));
    }
    let amb = ambient(flavor, p)?;
    let g = amb.group().clone();
    let a0 = build_a0(p)?;
    let c3p = a0.group().clone();
    let x3_plus_z = g.add(amb.bottom, amb.z);
    let embed_u = GroupMap::from_images(&c3p, &g, &[x3_plus_z])?;
    let lower = g.subgroup_generated(&[amb.bottom]);
    let quot = quotient_map(&g, &Section::new(g.whole(), lower)?);
    let q = quot.quotient.clone();
    let tb = quot.project(amb.top).expect("total projection");
    let tz = quot.project(amb.z).expect("total projection");
    let top_sub: Vec<usize> = (0..3).map(|j| q.mul(tb, j)).collect();
    let p_sub: Vec<usize> = (1..p).map(|j| q.mul(tz, j as i64)).collect();
    let a_q = match i {
        1 => {
            let singles: Vec<Vec<usize>> = top_sub.iter().map(|&x| vec![x]).collect();
            internal_tensor(&q, &singles, &[vec![0], p_sub])?
        }
        2 => internal_tensor(&q, &[vec![0], top_sub[1..].to_vec()], &[vec![0], p_sub])?,
        _ => {
            let to_q = GroupMap::from_images(&c3p, &q, &[q.add(tb, tz)])?;
            let classes: Vec<Vec<usize>> = a0.classes().iter().map(|c| to_q.image_of_set(c)).collect();
            validate_partition(&q, classes)?
        }
    };
    s_wreath(&a0, &embed_u, &a_q, &quot)
}

/// One row of the table of pairs `K₀ ⊴ K ≤ Aut(E₉)`.
///
/// Automorphisms are written as images of `(a, b)` in exponent pairs, so
/// `[[1, 1], [2, 1]]` is `(a, b) ↦ (ab, a²b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table1Line {
    pub line: u8,
    pub k_gens: Vec<[[usize; 2]; 2]>,
    pub k0_gens: Vec<[[usize; 2]; 2]>,
    pub k_order: usize,
    pub k0_order: usize,
    pub index: usize,
}

const SIGMA0: [[usize; 2]; 2] = [[2, 0], [0, 2]];
const ROT: [[usize; 2]; 2] = [[0, 2], [1, 0]];
const ORDER8: [[usize; 2]; 2] = [[1, 1], [2, 1]];
const ORDER6: [[usize; 2]; 2] = [[2, 0], [1, 2]];

pub fn table1() -> Vec<Table1Line> {
    let row = |line, k: &[[[usize; 2]; 2]], k0: &[[[usize; 2]; 2]], k_order, k0_order, index| Table1Line {
        line,
        k_gens: k.to_vec(),
        k0_gens: k0.to_vec(),
        k_order,
        k0_order,
        index,
    };
    vec![
        row(1, &[SIGMA0], &[], 2, 1, 2),
        row(2, &[[[2, 0], [0, 1]], [[1, 0], [0, 2]]], &[SIGMA0], 4, 2, 2),
        row(3, &[[[1, 0], [1, 1]]], &[], 3, 1, 3),
        row(4, &[ORDER6], &[SIGMA0], 6, 2, 3),
        row(5, &[ORDER6], &[], 6, 1, 6),
        row(6, &[ROT, [[0, 1], [1, 0]]], &[SIGMA0, [[2, 0], [0, 1]]], 8, 4, 2),
        row(7, &[ROT], &[SIGMA0], 4, 2, 2),
        row(8, &[ROT], &[], 4, 1, 4),
        row(9, &[ORDER8], &[ROT], 8, 4, 2),
        row(10, &[ORDER8], &[SIGMA0], 8, 2, 4),
        row(11, &[ORDER8], &[], 8, 1, 8),
    ]
}

pub fn table1_line(i: u8) -> Result<Table1Line> {
    table1()
        .into_iter()
        .find(|l| l.line == i)
        .ok_or_else(|| Error::InvalidInput(format!("table line must be in 1..=11, got {i}")))
}

/// The automorphism of `E₉ = [3,3]` sending `a ↦ images[0]`, `b ↦ images[1]`.
pub fn e9_automorphism(e9: &Arc<Group>, images: [[usize; 2]; 2]) -> Result<GroupMap> {
    let a = e9.index_of(&images[0])?;
    let b = e9.index_of(&images[1])?;
    let map = GroupMap::from_images(e9, e9, &[a, b])?;
    if !map.is_bijective() {
        return Err(Error::NotAutomorphism(format!("{images:?} is not invertible")));
    }
    Ok(map)
}

/// Everything needed to rebuild `A_i(M)`: the subdirect group and its ambient.
#[derive(Clone, Debug)]
pub struct CyclotomicFamily {
    pub line: u8,
    pub m_order: usize,
    pub ambient: Ambient,
    pub maps: Vec<GroupMap>,
    pub sring: SRing,
    /// Generator `μ` of `M` as a multiplier mod `p`.
    pub mu: u64,
    pub m0_order: usize,
}

/// `A_i(M) = cyc(W(K, K₀, M, M₀, ψ₀), E₉ × C_p)` with `|M| = m_order`.
pub fn build_a_im(i: u8, p: usize, m_order: usize) -> Result<SRing> {
    cyclotomic_family(i, p, m_order).map(|f| f.sring)
}

pub fn cyclotomic_family(i: u8, p: usize, m_order: usize) -> Result<CyclotomicFamily> {
    check_prime(p)?;
    let line = table1_line(i)?;
    if m_order == 0 || (p - 1) % m_order != 0 {
        return Err(Error::InvalidInput(format!("|M| = {m_order} does not divide p - 1 = {}", p - 1)));
    }
    if m_order % line.index != 0 {
        return Err(Error::NotWellDefined(format!(
            "line {i} has index {} which does not divide |M| = {m_order}",
            line.index
        )));
    }
    let e9 = make_group(&[3, 3])?;
    let cp = make_group(&[p])?;
    let k: Vec<GroupMap> = line.k_gens.iter().map(|&m| e9_automorphism(&e9, m)).collect::<Result<_>>()?;
    let k0: Vec<GroupMap> = line.k0_gens.iter().map(|&m| e9_automorphism(&e9, m)).collect::<Result<_>>()?;
    let g = primitive_root(p as u64);
    let mu = pow_mod(g, ((p - 1) / m_order) as u64, p as u64);
    let mu0 = pow_mod(mu, line.index as u64, p as u64);
    let mu_map = GroupMap::multiplier(&cp, mu as i64);
    let k0_set = crate::products::generate_tables(9, &k0.iter().map(|m| m.table().to_vec()).collect::<Vec<_>>());
    // the first K generator whose coset has full order in K/K₀
    let psi_source = k
        .iter()
        .find(|gen| {
            let mut power = gen.table().to_vec();
            let mut order = 1;
            while k0_set.binary_search(&power).is_err() {
                power = power.iter().map(|&y| gen.apply(y)).collect();
                order += 1;
            }
            order == line.index
        })
        .cloned()
        .ok_or_else(|| Error::InternalInvariant(format!("line {i}: no generator spans K/K0")))?;
    let spec = SubdirectSpec {
        left: e9.clone(),
        right: cp.clone(),
        k,
        k0,
        m: vec![mu_map.clone()],
        m0: vec![GroupMap::multiplier(&cp, mu0 as i64)],
        psi_source,
        psi_image: mu_map,
    };
    let w = subdirect(&spec)?;
    let ambient = ambient(Flavor::Elementary, p)?;
    let sring = cyclotomic(&w.product.group, &w.maps)?;
    Ok(CyclotomicFamily {
        line: i,
        m_order,
        ambient,
        maps: w.maps,
        sring,
        mu,
        m0_order: m_order / line.index,
    })
}

/// A built member of one of the named families.
#[derive(Clone, Debug)]
pub struct FamilyInstance {
    pub family: Family,
    pub p: usize,
    pub flavor: Option<Flavor>,
    pub m_order: Option<usize>,
    pub sring: SRing,
}

pub fn build(family: Family, p: usize, flavor: Option<Flavor>, m_order: Option<usize>) -> Result<FamilyInstance> {
    let (sring, flavor, m_order) = match family {
        Family::A0 => (build_a0(p)?, None, None),
        Family::Star(i) => {
            let h = flavor.unwrap_or(Flavor::Elementary);
            (build_a_star(i, h, p)?, Some(h), Some(p - 1))
        }
        Family::Line(i) => {
            if flavor == Some(Flavor::Cyclic) {
                return Err(Error::InvalidInput("the A_i(M) families live over E9 x C_p".into()));
            }
            let k = m_order.ok_or_else(|| Error::InvalidInput("A_i(M) needs |M|".into()))?;
            (build_a_im(i, p, k)?, Some(Flavor::Elementary), Some(k))
        }
    };
    Ok(FamilyInstance { family, p, flavor, m_order, sring })
}

/// The expected extra class sizes of a family, with `p` and `k = |M|` substituted.
pub fn table2_row(family: Family, p: usize, k: usize) -> Option<BTreeSet<usize>> {
    let q = p - 1;
    let row: Vec<usize> = match family {
        Family::A0 => return None,
        Family::Star(1) => vec![2, 3, q, 3 * q],
        Family::Star(2) => vec![2, 6, q, 6 * q],
        Family::Star(3) => vec![2, 6, q, 3 * q],
        Family::Star(_) => return None,
        Family::Line(i) => match i {
            1 => vec![2, k],
            2 => vec![2, 4, 2 * k],
            3 => vec![1, 3, k],
            4 => vec![2, 6, 2 * k],
            5 => vec![2, 6, k],
            6 => vec![4, 2 * k, 4 * k],
            7 => vec![4, 2 * k],
            8 => vec![4, k],
            9 => vec![8, 4 * k],
            10 => vec![8, 2 * k],
            11 => vec![8, k],
            _ => return None,
        },
    };
    Some(row.into_iter().collect())
}

/// Class sizes of `A_P` on the Sylow-`p` subgroup of order `p`.
pub fn p_part_profile(sring: &SRing, p: usize) -> Result<BTreeSet<usize>> {
    let g = sring.group();
    let z = (0..g.order())
        .find(|&x| g.element_order(x) == p)
        .ok_or_else(|| Error::InvalidInput(format!("no element of order {p}")))?;
    let (sub, _) = sring.restriction(&g.subgroup_generated(&[z]))?;
    Ok(sub.size_profile())
}

/// `N(A) = row ∪ N(A_P)` for the instance's row of the size table.
pub fn table2_check(inst: &FamilyInstance) -> bool {
    let k = inst.m_order.unwrap_or(inst.p - 1);
    let Some(row) = table2_row(inst.family, inst.p, k) else {
        return false;
    };
    let Ok(p_part) = p_part_profile(&inst.sring, inst.p) else {
        return false;
    };
    let expected: BTreeSet<usize> = row.union(&p_part).copied().collect();
    inst.sring.size_profile() == expected
}

/// Which of the conditions (C1)..(C5) a candidate set meets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub generates: bool,
    pub proper: bool,
    pub not_a_product: bool,
    pub radical_free: bool,
    /// `None` when the fifth condition was not evaluated.
    pub forces_finer: Option<bool>,
}

impl ConditionReport {
    pub fn first_four(&self) -> bool {
        self.generates && self.proper && self.not_a_product && self.radical_free
    }

    pub fn all(&self) -> bool {
        self.first_four() && self.forces_finer == Some(true)
    }
}

/// True iff `x = x_U + x_V` (as a product set) for some nontrivial
/// decomposition `G = U × V`.
pub fn is_product_set(group: &Arc<Group>, x: &[usize]) -> Result<bool> {
    let n = group.order();
    let subs = group.all_subgroups_bounded(4096)?;
    for u in &subs {
        if u.order() == 1 || u.order() == n {
            continue;
        }
        for v in &subs {
            if u.order() * v.order() != n || !u.intersect(v).is_trivial() {
                continue;
            }
            let mut parts = vec![(0usize, 0usize); n];
            for &a in u.members() {
                for &b in v.members() {
                    parts[group.add(a, b)] = (a, b);
                }
            }
            let us: BTreeSet<usize> = x.iter().map(|&e| parts[e].0).collect();
            let vs: BTreeSet<usize> = x.iter().map(|&e| parts[e].1).collect();
            if us.len() * vs.len() == x.len() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// True iff no nonempty subset of `x` has a nontrivial radical, i.e. `x`
/// contains no coset of a subgroup of prime order.
pub fn all_subsets_radical_free(group: &Group, x: &[usize]) -> bool {
    let mut mask = vec![false; group.order()];
    for &e in x {
        mask[e] = true;
    }
    let prime_order: Vec<usize> = (1..group.order())
        .filter(|&g| is_prime(group.element_order(g) as u64))
        .collect();
    !x.iter().any(|&e| {
        prime_order.iter().any(|&g| {
            let ord = group.element_order(g);
            (1..ord).all(|j| mask[group.add(e, group.mul(g, j as i64))])
        })
    })
}

/// `Aut(E₉ × C_p) = Aut(E₉) × Aut(C_p)` as maps on the ambient group.
fn ambient_automorphisms(amb: &Ambient) -> Result<Vec<GroupMap>> {
    let g = amb.group();
    let e9 = make_group(&[3, 3])?;
    let cp = make_group(&[amb.p])?;
    let pr = &amb.product;
    let mut out = Vec::new();
    for alpha in e9.automorphisms()? {
        for m in 1..amb.p {
            let table: Vec<usize> = (0..g.order())
                .map(|x| pr.pair(alpha.apply(pr.proj_left[x]), cp.mul(pr.proj_right[x], m as i64)))
                .collect();
            out.push(GroupMap::from_table_unchecked(g, g, table));
        }
    }
    Ok(out)
}

/// All well-defined `A_j(M)` for the given `p` and `|M|`.
pub fn well_defined_lines(p: usize, m_order: usize) -> Result<Vec<(u8, SRing)>> {
    let mut out = Vec::new();
    for line in table1() {
        if m_order % line.index == 0 {
            out.push((line.line, build_a_im(line.line, p, m_order)?));
        }
    }
    Ok(out)
}

/// Evaluates (C1)..(C4), and (C5) when `others` is given.
///
/// `others` lists the well-defined `A_j(M)` with the same `M`.
pub fn check_conditions(
    amb: &Ambient,
    sring: &SRing,
    x: &[usize],
    others: Option<&[(u8, SRing)]>,
) -> Result<ConditionReport> {
    let g = amb.group();
    let mut report = ConditionReport {
        generates: g.subgroup_generated(x).order() == g.order(),
        proper: x.len() != g.order() - 1,
        not_a_product: !is_product_set(g, x)?,
        radical_free: all_subsets_radical_free(g, x),
        forces_finer: None,
    };
    if let Some(others) = others {
        let mut ok = true;
        'auts: for f in ambient_automorphisms(amb)? {
            let y = f.image_of_set(x);
            if !sring.is_a_set(&y) {
                continue;
            }
            for (_, other) in others {
                if other.is_a_set(&y) && !sring.is_subring_of(other) {
                    ok = false;
                    break 'auts;
                }
            }
        }
        report.forces_finer = Some(ok);
    }
    Ok(report)
}

fn translate(g: &Group, shifts: &[usize], set: &[usize]) -> Vec<usize> {
    shifts.iter().flat_map(|&t| set.iter().map(move |&s| g.add(t, s))).collect()
}

/// The printed witness `X₀ ∪ X₁ ∪ X₂` for lines 1 and 7, as three basic sets.
pub fn printed_witness_parts(fam: &CyclotomicFamily) -> Result<[Vec<usize>; 3]> {
    let amb = &fam.ambient;
    let g = amb.group();
    let p = amb.p as u64;
    let mut z_orbit = Vec::new();
    let mut z1 = Vec::new();
    let mut power = 1u64;
    for j in 0..fam.m_order {
        let e = g.mul(amb.z, power as i64);
        z_orbit.push(e);
        if j % 2 == 0 {
            z1.push(e);
        }
        power = power * fam.mu % p;
    }
    let z2: Vec<usize> = z_orbit.iter().copied().filter(|e| !z1.contains(e)).collect();
    let (a, b) = (amb.bottom, amb.top);
    let na = g.neg(a);
    let nb = g.neg(b);
    let parts = match fam.line {
        1 => [
            vec![a, na],
            [translate(g, &[a], &z1), translate(g, &[na], &z2)].concat(),
            [translate(g, &[b], &z1), translate(g, &[nb], &z2)].concat(),
        ],
        7 => {
            let ab = g.add(a, b);
            let a_minus_b = g.sub(a, b);
            [
                vec![a, na, b, nb],
                [translate(g, &[a, na], &z1), translate(g, &[b, nb], &z2)].concat(),
                [translate(g, &[ab, g.neg(ab)], &z1), translate(g, &[a_minus_b, g.neg(a_minus_b)], &z2)].concat(),
            ]
        }
        other => {
            return Err(Error::InvalidInput(format!("no printed witness for line {other}")));
        }
    };
    let parts = parts.map(|mut s| {
        s.sort_unstable();
        s
    });
    for s in &parts {
        if fam.sring.classes_in(s).len() != 1 || !fam.sring.is_a_set(s) {
            return Err(Error::InternalInvariant(format!(
                "line {}: printed set {s:?} is not a basic set",
                fam.line
            )));
        }
    }
    Ok(parts)
}

/// A witness set for `A_i(M)`: the printed union for lines 1 and 7.
/// Otherwise the first basic set meeting (C1)..(C5), falling back to the
/// first one meeting (C1)..(C4).
pub fn witness_set(fam: &CyclotomicFamily) -> Result<Vec<usize>> {
    if fam.line == 1 || fam.line == 7 {
        let mut x = printed_witness_parts(fam)?.concat();
        x.sort_unstable();
        return Ok(x);
    }
    let others = well_defined_lines(fam.ambient.p, fam.m_order)?;
    let mut fallback = None;
    for class in fam.sring.classes() {
        let report = check_conditions(&fam.ambient, &fam.sring, class, Some(&others))?;
        if report.all() {
            return Ok(class.clone());
        }
        if report.first_four() && fallback.is_none() {
            fallback = Some(class.clone());
        }
    }
    fallback.ok_or_else(|| {
        Error::NoWitnessFound(format!(
            "no basic set of A{}(M) with p = {}, |M| = {} meets (C1)..(C4)",
            fam.line, fam.ambient.p, fam.m_order
        ))
    })
}

/// The family catalog used to recognise `A_i(M)` up to Cayley isomorphism.
pub fn all_well_defined(p: usize) -> Result<Vec<(u8, usize, SRing)>> {
    let mut out = Vec::new();
    for k in crate::arith::divisors((p - 1) as u64) {
        for (line, sr) in well_defined_lines(p, k as usize)? {
            out.push((line, k as usize, sr));
        }
    }
    Ok(out)
}
