//! Cayley digraphs and two-dimensional Weisfeiler–Leman refinement.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::closure::closure_of_sets;
use crate::error::{Error, Result};
use crate::group::{make_group, Group};
use crate::iso::{find_color_isomorphism, Budget, ColorMatrix};

/// A coloring of the ordered pairs of `n` points; `palette` is indexed by color id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairColoring {
    pub n: usize,
    pub colors: Vec<u32>,
    pub palette: Vec<ColorInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColorInfo {
    pub diagonal: bool,
    pub pairs: usize,
}

impl PairColoring {
    /// Keeps the ids as given, so equal ids mean the same color across
    /// colorings; rejects a color used both on and off the diagonal.
    pub fn from_colors(n: usize, colors: Vec<u32>) -> Result<PairColoring> {
        if colors.len() != n * n {
            return Err(Error::InvalidInput(format!("expected {} pair colors, got {}", n * n, colors.len())));
        }
        let len = colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut palette = vec![ColorInfo { diagonal: false, pairs: 0 }; len];
        let mut seen_off = vec![false; len];
        for u in 0..n {
            for v in 0..n {
                let c = colors[u * n + v] as usize;
                palette[c].pairs += 1;
                if u == v {
                    palette[c].diagonal = true;
                } else {
                    seen_off[c] = true;
                }
            }
        }
        if let Some(c) = (0..len).find(|&c| palette[c].diagonal && seen_off[c]) {
            return Err(Error::InvalidInput(format!("color {c} occurs on and off the diagonal")));
        }
        Ok(PairColoring { n, colors, palette })
    }

    /// Diagonal 0, arcs 1, non-arcs 2.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<PairColoring> {
        let mut colors = vec![2u32; n * n];
        for &(u, v) in arcs {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!("arc ({u}, {v}) leaves {n} vertices")));
            }
            if u == v {
                return Err(Error::InvalidConnectionSet(format!("loop at vertex {u}")));
            }
            colors[u * n + v] = 1;
        }
        for u in 0..n {
            colors[u * n + u] = 0;
        }
        PairColoring::from_colors(n, colors)
    }

    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.colors[u * self.n + v]
    }

    /// Number of colors in use.
    pub fn num_colors(&self) -> usize {
        self.palette.iter().filter(|c| c.pairs > 0).count()
    }

    /// Color multiset as counts indexed by color id, without trailing unused ids.
    pub fn color_counts(&self) -> Vec<usize> {
        let mut counts: Vec<usize> = self.palette.iter().map(|c| c.pairs).collect();
        while counts.last() == Some(&0) {
            counts.pop();
        }
        counts
    }

    pub fn as_matrix(&self) -> ColorMatrix {
        ColorMatrix { n: self.n, colors: self.colors.clone() }
    }

    /// True iff every pair's color is determined by a color of `finer`.
    pub fn is_refined_by(&self, finer: &PairColoring) -> bool {
        if self.n != finer.n {
            return false;
        }
        let mut image = vec![u32::MAX; finer.palette.len()];
        self.colors.iter().zip(&finer.colors).all(|(&c, &f)| {
            let slot = &mut image[f as usize];
            if *slot == u32::MAX {
                *slot = c;
            }
            *slot == c
        })
    }

    /// Same partition of pairs, ignoring color ids.
    pub fn same_partition(&self, other: &PairColoring) -> bool {
        self.is_refined_by(other) && other.is_refined_by(self)
    }
}

/// The initial coloring of `Cay(G, X)`: diagonal, arcs `(u, u + x)`, non-arcs.
pub fn cayley_digraph(g: &Group, x: &[usize]) -> Result<PairColoring> {
    let n = g.order();
    let mut member = vec![false; n];
    for &s in x {
        if s >= n {
            return Err(Error::InvalidConnectionSet(format!("element {s} is outside the group")));
        }
        if s == 0 {
            return Err(Error::InvalidConnectionSet("the identity is in the connection set".into()));
        }
        member[s] = true;
    }
    let mut colors = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            let d = g.sub(v, u);
            colors.push(if d == 0 { 0 } else if member[d] { 1 } else { 2 });
        }
    }
    PairColoring::from_colors(n, colors)
}

type Signature = (u32, Vec<(u32, u32)>);

/// Signature of every pair: its color and the counts of `(c(u,w), c(w,v))`.
fn signatures(c: &PairColoring) -> Vec<Signature> {
    let n = c.n;
    let k = c.palette.len() as u32;
    let mut buf: Vec<u32> = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n * n);
    for u in 0..n {
        let row = &c.colors[u * n..(u + 1) * n];
        for v in 0..n {
            buf.clear();
            for w in 0..n {
                buf.push(row[w] * k + c.colors[w * n + v]);
            }
            buf.sort_unstable();
            let mut counts: Vec<(u32, u32)> = Vec::new();
            for &code in &buf {
                match counts.last_mut() {
                    Some((last, m)) if *last == code => *m += 1,
                    _ => counts.push((code, 1)),
                }
            }
            out.push((row[v], counts));
        }
    }
    out
}

/// One round: new ids are ranks of the sorted distinct signatures. Returns
/// the coloring and the sorted `(signature, multiplicity)` table.
fn refine_round(c: &PairColoring) -> (PairColoring, Vec<(Signature, usize)>) {
    let sigs = signatures(c);
    let mut table: BTreeMap<&Signature, usize> = BTreeMap::new();
    for s in &sigs {
        *table.entry(s).or_insert(0) += 1;
    }
    let ids: BTreeMap<&Signature, u32> = table.keys().enumerate().map(|(i, s)| (*s, i as u32)).collect();
    let colors: Vec<u32> = sigs.iter().map(|s| ids[s]).collect();
    let summary: Vec<(Signature, usize)> = table.into_iter().map(|(s, m)| (s.clone(), m)).collect();
    let next = PairColoring::from_colors(c.n, colors).expect("refinement keeps the diagonal separate");
    (next, summary)
}

/// The coarsest stable refinement of `init`.
pub fn wl2_stabilize(init: &PairColoring) -> PairColoring {
    wl2_run(init).0
}

/// Canonical record of a refinement run: the signature table of every round.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Wl2Certificate {
    pub initial_counts: Vec<(bool, usize)>,
    pub rounds: Vec<Vec<(Signature, usize)>>,
}

fn wl2_run(init: &PairColoring) -> (PairColoring, Wl2Certificate) {
    let mut current = init.clone();
    let initial_counts = current.palette.iter().map(|c| (c.diagonal, c.pairs)).collect();
    let mut rounds = Vec::new();
    loop {
        let (next, summary) = refine_round(&current);
        rounds.push(summary);
        if next.num_colors() == current.num_colors() {
            return (next, Wl2Certificate { initial_counts, rounds });
        }
        current = next;
    }
}

/// Equal certificates mean the stable colorings have the same color multisets
/// under a common palette.
pub fn wl2_certificate(init: &PairColoring) -> Wl2Certificate {
    wl2_run(init).1
}

/// Stabilizes the disjoint union with a shared palette and compares the
/// stable color multisets of the two halves.
pub fn wl2_equivalent(first: &PairColoring, second: &PairColoring) -> bool {
    if first.n != second.n {
        return false;
    }
    let n = first.n;
    let total = 2 * n;
    let (a, b) = (first, second);
    // both halves keep their ids; cross pairs get a color of their own
    let cross = a.palette.len().max(b.palette.len()) as u32;
    let mut colors = vec![cross; total * total];
    for u in 0..n {
        for v in 0..n {
            colors[u * total + v] = a.get(u, v);
            colors[(n + u) * total + (n + v)] = b.get(u, v);
        }
    }
    let joint = wl2_stabilize(&PairColoring::from_colors(total, colors).expect("separated"));
    let mut left = vec![0usize; joint.palette.len()];
    let mut right = vec![0usize; joint.palette.len()];
    for u in 0..n {
        for v in 0..n {
            left[joint.get(u, v) as usize] += 1;
            right[joint.get(n + u, n + v) as usize] += 1;
        }
    }
    left == right
}

/// Full recount of the stability predicate.
pub fn is_stable(c: &PairColoring) -> bool {
    let sigs = signatures(c);
    let mut by_color: Vec<Option<&Vec<(u32, u32)>>> = vec![None; c.palette.len()];
    sigs.iter().all(|(color, counts)| match by_color[*color as usize] {
        None => {
            by_color[*color as usize] = Some(counts);
            true
        }
        Some(prev) => prev == counts,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureComparison {
    pub wl_colors: usize,
    pub closure_rank: usize,
    /// Every stable color is a union of basic relations `R(Y)`.
    pub wl_is_union_of_relations: bool,
    pub partitions_equal: bool,
}

/// Compares the stable coloring of `Cay(G, X)` with the basic relations of
/// the Schur–Wielandt closure of `X`.
pub fn wl_closure_vs_sring(g: &Arc<Group>, x: &[usize]) -> Result<ClosureComparison> {
    let stable = wl2_stabilize(&cayley_digraph(g, x)?);
    let closure = closure_of_sets(g, &[x.to_vec()]);
    let n = g.order();
    let relations: Vec<u32> = (0..n * n).map(|i| closure.class_of(g.sub(i % n, i / n)) as u32).collect();
    let relations = PairColoring::from_colors(n, relations)?;
    Ok(ClosureComparison {
        wl_colors: stable.num_colors(),
        closure_rank: closure.rank(),
        wl_is_union_of_relations: stable.is_refined_by(&relations),
        partitions_equal: stable.same_partition(&relations),
    })
}

/// Isomorphism of initial colorings by backtracking, preserving each color.
/// Both inputs must use the same palette; `vertex_transitive` lets the search
/// pin `0 ↦ 0`.
pub fn colorings_isomorphic(
    first: &PairColoring,
    second: &PairColoring,
    vertex_transitive: bool,
    budget: &mut Budget,
) -> Result<bool> {
    if first.n != second.n || first.color_counts() != second.color_counts() {
        return Ok(false);
    }
    let identity: Vec<u32> = (0..first.palette.len().max(second.palette.len()) as u32).collect();
    let fixed: &[(usize, usize)] = if vertex_transitive && first.n > 0 { &[(0, 0)] } else { &[] };
    Ok(find_color_isomorphism(&first.as_matrix(), &second.as_matrix(), &identity, fixed, budget)?.is_some())
}

/// How far two partitions of the same items agree; each side is one class id
/// per item.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionAgreement {
    pub items: usize,
    pub left_classes: usize,
    pub right_classes: usize,
    /// Pairs in one class on exactly one side.
    pub disagreeing_pairs: u64,
}

pub fn compare_partitions(left: &[usize], right: &[usize]) -> PartitionAgreement {
    fn same_pairs<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> (usize, u64) {
        let mut sizes: HashMap<K, u64> = HashMap::new();
        for k in keys {
            *sizes.entry(k).or_default() += 1;
        }
        (sizes.len(), sizes.values().map(|s| s * (s - 1) / 2).sum())
    }
    let (left_classes, same_left) = same_pairs(left.iter());
    let (right_classes, same_right) = same_pairs(right.iter());
    let (_, same_both) = same_pairs(left.iter().zip(right));
    PartitionAgreement {
        items: left.len(),
        left_classes,
        right_classes,
        disagreeing_pairs: same_left + same_right - 2 * same_both,
    }
}

/// WL-equivalence classes. Certificates propose the classes; each member is
/// confirmed against its class representative by a joint run, and
/// representatives with equal initial color counts are confirmed distinct.
/// Returns class ids and the number of joint runs contradicting a certificate.
pub fn wl_partition(graphs: &[PairColoring]) -> (Vec<usize>, usize) {
    let certificates: Vec<Wl2Certificate> = graphs.iter().map(wl2_certificate).collect();
    let mut ids: HashMap<&Wl2Certificate, usize> = HashMap::new();
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of = Vec::with_capacity(graphs.len());
    for (i, c) in certificates.iter().enumerate() {
        let id = *ids.entry(c).or_insert_with(|| {
            reps.push(i);
            reps.len() - 1
        });
        class_of.push(id);
    }
    let mut contradictions = 0;
    for (i, &id) in class_of.iter().enumerate() {
        if reps[id] != i && !wl2_equivalent(&graphs[reps[id]], &graphs[i]) {
            contradictions += 1;
        }
    }
    for (s, &r) in reps.iter().enumerate() {
        for &t in &reps[s + 1..] {
            if graphs[r].color_counts() == graphs[t].color_counts() && wl2_equivalent(&graphs[r], &graphs[t]) {
                contradictions += 1;
            }
        }
    }
    (class_of, contradictions)
}

/// Isomorphism classes by backtracking against class representatives with
/// matching invariants. With `vertex_transitive`, the invariants include color
/// counts in the first row and of triangles through point 0, and the search
/// pins `0 ↦ 0`. Each comparison gets a fresh budget of `node_limit` nodes.
pub fn isomorphism_partition(graphs: &[PairColoring], vertex_transitive: bool, node_limit: u64) -> Result<Vec<usize>> {
    let key = |c: &PairColoring| -> (Vec<usize>, Vec<usize>, Vec<(u32, u32, u32, usize)>) {
        if !vertex_transitive || c.n == 0 {
            return (c.color_counts(), Vec::new(), Vec::new());
        }
        let mut row = vec![0usize; c.palette.len()];
        let mut triangles: BTreeMap<(u32, u32, u32), usize> = BTreeMap::new();
        for v in 0..c.n {
            row[c.get(0, v) as usize] += 1;
            for w in 0..c.n {
                *triangles.entry((c.get(0, v), c.get(v, w), c.get(w, 0))).or_default() += 1;
            }
        }
        let triangles = triangles.into_iter().map(|((x, y, z), k)| (x, y, z, k)).collect();
        (c.color_counts(), row, triangles)
    };
    let mut reps: HashMap<_, Vec<(usize, usize)>> = HashMap::new();
    let mut class_of = Vec::with_capacity(graphs.len());
    let mut next = 0;
    for (i, graph) in graphs.iter().enumerate() {
        let bucket = reps.entry(key(graph)).or_default();
        let mut found = None;
        for &(r, id) in bucket.iter() {
            if colorings_isomorphic(&graphs[r], graph, vertex_transitive, &mut Budget::new(node_limit))? {
                found = Some(id);
                break;
            }
        }
        let id = found.unwrap_or_else(|| {
            bucket.push((i, next));
            next += 1;
            next - 1
        });
        class_of.push(id);
    }
    Ok(class_of)
}

/// Graph input: explicit arcs or a group with a connection set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphJson {
    Arcs { n: usize, arcs: Vec<(usize, usize)> },
    Cayley { group: Vec<usize>, connection_set: Vec<usize> },
}

impl GraphJson {
    pub fn to_coloring(&self) -> Result<PairColoring> {
        match self {
            GraphJson::Arcs { n, arcs } => PairColoring::from_arcs(*n, arcs),
            GraphJson::Cayley { group, connection_set } => cayley_digraph(&*make_group(group)?, connection_set),
        }
    }
}

/// All inverse-closed subsets of `G#`, as sorted element lists.
pub fn inverse_closed_sets(g: &Group) -> Result<Vec<Vec<usize>>> {
    let n = g.order();
    let mut units: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; n];
    seen[0] = true;
    for x in 1..n {
        if !seen[x] {
            let y = g.neg(x);
            seen[x] = true;
            seen[y] = true;
            units.push(if x == y { vec![x] } else { vec![x, y] });
        }
    }
    if units.len() > 24 {
        return Err(Error::TooLarge(format!("2^{} inverse-closed sets", units.len())));
    }
    Ok((0u64..1 << units.len())
        .map(|mask| {
            let mut s: Vec<usize> = units
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, u)| u.iter().copied())
                .collect();
            s.sort_unstable();
            s
        })
        .collect())
}
