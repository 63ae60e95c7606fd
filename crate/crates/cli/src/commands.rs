use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{ArgGroup, Args};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use schurkit::arith::is_prime;
use schurkit::constructions::{
    all_well_defined, build, build_a_star, p_part_profile, table2_row, Family, Flavor,
};
use schurkit::enumeration::{
    enumerate_srings, enumerate_srings_direct, enumerate_srings_uncached, Classifier, ClassifyOptions,
};
use schurkit::group::{abelian_groups_of_order, make_group, Group};
use schurkit::iso::{
    find_algebraic_isos, find_cayley_isos, find_combinatorial_iso, first_cayley_iso, is_separable,
    verify_separability_report, Budget, IsoWitness, SeparabilityReport,
};
use schurkit::json::{read_catalog, read_sring_file, write_catalog_atomic, SRingJson};
use schurkit::wl2::{
    cayley_digraph, colorings_isomorphic, compare_partitions, inverse_closed_sets, isomorphism_partition,
    wl2_equivalent, wl2_stabilize, wl_closure_vs_sring, wl_partition, GraphJson,
};
use schurkit::{Error, Result, SRing};

/// How a command ended, mapped onto the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
    BudgetExhausted,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violation => 1,
            Status::BudgetExhausted => 3,
        }
    }
}

/// Search limits applied to every backtracking search of a run.
pub struct Limits {
    pub nodes: u64,
    pub deadline: Option<Instant>,
    /// Whether the user chose the limits rather than taking the defaults.
    pub explicit: bool,
}

impl Limits {
    fn budget(&self) -> Budget {
        Budget::with_deadline(self.nodes, self.deadline)
    }
}

/// Result rows, a summary for the manifest, and the status.
pub struct Outcome {
    pub rows: Vec<Value>,
    pub summary: Value,
    pub status: Status,
}

impl Outcome {
    fn ok(rows: Vec<Value>, summary: Value) -> Outcome {
        Outcome { rows, summary, status: Status::Ok }
    }

    fn violation_if(rows: Vec<Value>, summary: Value, violated: bool) -> Outcome {
        let status = if violated { Status::Violation } else { Status::Ok };
        Outcome { rows, summary, status }
    }
}

fn parse_group(spec: &str) -> Result<Arc<Group>> {
    let g = Group::parse(spec)?;
    make_group(g.factors())
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("plain data serializes")
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

#[derive(Args, Debug, Serialize)]
pub struct ConstructArgs {
    /// Family name: A0, A1*, A2*, A3*, or A1..A11.
    pub family: String,
    /// The prime p (at least 5).
    #[arg(long)]
    pub p: usize,
    /// Order-9 subgroup for the starred families: C (cyclic) or E (elementary).
    #[arg(long)]
    pub h: Option<String>,
    /// |M| for the A_i(M) families; must divide p - 1.
    #[arg(long = "m-order")]
    pub m_order: Option<usize>,
}

pub fn construct(args: &ConstructArgs) -> Result<Outcome> {
    let family: Family = args.family.parse()?;
    let flavor = args.h.as_deref().map(str::parse::<Flavor>).transpose()?;
    let inst = build(family, args.p, flavor, args.m_order)?;
    let a = &inst.sring;
    let sizes = a.size_profile();
    let p_part = p_part_profile(a, args.p)?;
    let k = inst.m_order.unwrap_or(args.p - 1);
    let row = table2_row(family, args.p, k);
    let table2_match = row.as_ref().map(|r| r.union(&p_part).copied().collect::<BTreeSet<usize>>() == sizes);
    let signature = json!({
        "kind": "signature",
        "family": family.to_string(),
        "p": args.p,
        "flavor": inst.flavor.map(|f| f.letter().to_string()),
        "m_order": inst.m_order,
        "group": a.group().spec_string(),
        "rank": a.rank(),
        "sizes": sizes,
        "p_part_sizes": p_part,
        "table2_row": row,
        "table2_match": table2_match,
    });
    let mut sring = to_json(&SRingJson::from_sring(a));
    sring["kind"] = json!("sring");
    let summary = json!({ "rank": a.rank(), "table2_match": table2_match });
    Ok(Outcome::violation_if(vec![sring, signature], summary, table2_match == Some(false)))
}

// ---------------------------------------------------------------------------
// enumerate / classify
// ---------------------------------------------------------------------------

#[derive(Args, Debug, Serialize)]
pub struct EnumerateArgs {
    /// Group as factor orders, e.g. 9x5 or 3x3x2.
    #[arg(long)]
    pub group: String,
    /// Write the catalog (one S-ring per line) here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Use the direct basic-set search instead of the default enumerator.
    #[arg(long)]
    pub direct: bool,
}

pub fn enumerate(args: &EnumerateArgs) -> Result<Outcome> {
    let g = parse_group(&args.group)?;
    let (all, cayley_classes) = if args.direct {
        (enumerate_srings_direct(&g)?, None)
    } else {
        let catalog = enumerate_srings(&g)?;
        (catalog.all, Some(catalog.up_to_cayley.len()))
    };
    let summary = json!({ "group": g.spec_string(), "count": all.len(), "cayley_classes": cayley_classes });
    let rows = match &args.out {
        Some(path) => {
            write_catalog_atomic(path, &all)?;
            vec![json!({ "kind": "catalog", "path": path, "count": all.len(), "cayley_classes": cayley_classes })]
        }
        None => all.iter().map(|a| to_json(&SRingJson::from_sring(a))).collect(),
    };
    Ok(Outcome::ok(rows, summary))
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["catalog", "group"])))]
pub struct ClassifyArgs {
    /// Catalog file, one S-ring per line.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Enumerate and classify every S-ring over this group.
    #[arg(long)]
    pub group: Option<String>,
    /// Skip the automorphism condition on S-wreath sections.
    #[arg(long)]
    pub skip_aut_condition: bool,
}

pub fn classify(args: &ClassifyArgs, limits: &Limits) -> Result<Outcome> {
    let rings = match (&args.catalog, &args.group) {
        (Some(path), _) => read_catalog(path)?,
        (None, Some(spec)) => enumerate_srings_uncached(&parse_group(spec)?)?,
        (None, None) => return Err(usage("pass --catalog or --group")),
    };
    let Some(first) = rings.first() else {
        return Ok(Outcome::ok(Vec::new(), json!({ "count": 0 })));
    };
    if rings.iter().any(|a| a.group().factors() != first.group().factors()) {
        return Err(usage("a catalog must hold S-rings over one group"));
    }
    let options = ClassifyOptions { aut_condition: !args.skip_aut_condition, ..ClassifyOptions::default() };
    let classifier = Classifier::new(first.group(), options)?;
    let tags: Vec<Result<Value>> = rings
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let tag = classifier.classify(a, &mut limits.budget())?;
            Ok(json!({ "kind": "classification", "index": i, "rank": a.rank(), "tags": tag.tags }))
        })
        .collect();
    let mut rows = Vec::with_capacity(tags.len());
    let mut untagged = 0;
    for t in tags {
        let row = t?;
        untagged += usize::from(row["tags"].as_array().is_some_and(|t| t.is_empty()));
        rows.push(row);
    }
    let summary = json!({ "group": first.group().spec_string(), "count": rings.len(), "untagged": untagged });
    Ok(Outcome::ok(rows, summary))
}

// ---------------------------------------------------------------------------
// iso
// ---------------------------------------------------------------------------

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("mode").required(true).args(["alg", "comb", "cayley"])))]
pub struct IsoArgs {
    /// All algebraic isomorphisms, as class-index maps.
    #[arg(long)]
    pub alg: bool,
    /// One combinatorial isomorphism, as a point map.
    #[arg(long)]
    pub comb: bool,
    /// Cayley isomorphisms (group isomorphisms), as point maps.
    #[arg(long)]
    pub cayley: bool,
    /// With --cayley, list every Cayley isomorphism instead of the first.
    #[arg(long)]
    pub all: bool,
    pub first: PathBuf,
    pub second: PathBuf,
}

pub fn iso(args: &IsoArgs, limits: &Limits) -> Result<Outcome> {
    let a = read_sring_file(&args.first)?;
    let b = read_sring_file(&args.second)?;
    let rows: Vec<Value> = if args.alg {
        find_algebraic_isos(&a, &b)
            .into_iter()
            .map(|phi| json!({ "kind": "algebraic-isomorphism", "class_map": phi.class_map }))
            .collect()
    } else if args.comb {
        find_combinatorial_iso(&a, &b, &mut limits.budget())?
            .into_iter()
            .map(|(phi, f)| json!({ "kind": "combinatorial-isomorphism", "point_map": f, "class_map": phi.class_map }))
            .collect()
    } else {
        let maps = if args.all { find_cayley_isos(&a, &b) } else { first_cayley_iso(&a, &b).into_iter().collect() };
        maps.into_iter().map(|f| json!({ "kind": "cayley-isomorphism", "point_map": f.table() })).collect()
    };
    let summary = json!({ "isomorphic": !rows.is_empty(), "count": rows.len() });
    Ok(Outcome::ok(rows, summary))
}

// ---------------------------------------------------------------------------
// separability
// ---------------------------------------------------------------------------

/// A self-contained separability report that can be replayed.
#[derive(Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub subject: SRingJson,
    pub targets: Vec<SRingJson>,
    pub separable: bool,
    pub witnesses: Vec<WitnessJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WitnessJson {
    pub target: usize,
    pub class_map: Vec<usize>,
    pub point_map: Option<Vec<usize>>,
}

impl WitnessJson {
    fn from_witness(w: &IsoWitness) -> WitnessJson {
        WitnessJson { target: w.target, class_map: w.class_map.clone(), point_map: w.point_map.clone() }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SeparabilityArgs {
    /// The S-ring to test (JSON). Not needed with --verify.
    #[arg(required_unless_present = "verify")]
    pub subject: Option<PathBuf>,
    /// Target catalogs, one S-ring per line.
    #[arg(long)]
    pub targets: Vec<PathBuf>,
    /// `auto`: every Cayley class over every abelian group of the subject's order.
    #[arg(long = "order-targets")]
    pub order_targets: Option<String>,
    /// Write the replayable report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replay a saved report instead of searching.
    #[arg(long, conflicts_with_all = ["subject", "targets", "order_targets", "out"])]
    pub verify: Option<PathBuf>,
}

/// Cayley-class representatives of every abelian group of order `n`, with
/// their group spec and catalog index.
fn order_representatives(n: usize) -> Result<Vec<(String, usize, SRing)>> {
    let mut out = Vec::new();
    for g in abelian_groups_of_order(n) {
        let catalog = enumerate_srings(&g)?;
        for class in &catalog.up_to_cayley {
            out.push((g.spec_string(), class.representative, catalog.all[class.representative].clone()));
        }
    }
    Ok(out)
}

fn witness_rows(report: &SeparabilityReport) -> Vec<Value> {
    report
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "kind": "witness",
                "target": w.target,
                "class_map": w.class_map,
                "point_map": w.point_map,
                "induced": w.point_map.is_some(),
            })
        })
        .collect()
}

pub fn separability(args: &SeparabilityArgs, limits: &Limits) -> Result<Outcome> {
    if let Some(path) = &args.verify {
        return verify_report(path);
    }
    let subject_path = args.subject.as_ref().ok_or_else(|| usage("missing subject"))?;
    let a = read_sring_file(subject_path)?;
    let mut targets = Vec::new();
    for path in &args.targets {
        targets.extend(read_catalog(path)?);
    }
    match args.order_targets.as_deref() {
        Some("auto") => targets.extend(order_representatives(a.group().order())?.into_iter().map(|t| t.2)),
        Some(other) => return Err(usage(format!("--order-targets accepts only `auto`, got {other:?}"))),
        None if args.targets.is_empty() => {
            targets.extend(order_representatives(a.group().order())?.into_iter().map(|t| t.2))
        }
        None => {}
    }
    let report = match is_separable(&a, &targets, &mut limits.budget()) {
        Ok(r) => r,
        Err(e @ Error::BudgetExceeded { .. }) => {
            let row = json!({ "kind": "budget-exhausted", "error": e.to_string() });
            return Ok(Outcome { rows: vec![row], summary: json!({ "complete": false }), status: Status::BudgetExhausted });
        }
        Err(e) => return Err(e),
    };
    if let Some(out) = &args.out {
        let file = ReportFile {
            subject: SRingJson::from_sring(&a),
            targets: targets.iter().map(SRingJson::from_sring).collect(),
            separable: report.separable,
            witnesses: report.witnesses.iter().map(WitnessJson::from_witness).collect(),
        };
        std::fs::write(out, serde_json::to_string(&file)? + "\n")?;
    }
    let summary = json!({
        "separable": report.separable,
        "targets": targets.len(),
        "algebraic_isomorphisms": report.witnesses.len(),
        "nodes": report.nodes_used,
    });
    Ok(Outcome::violation_if(witness_rows(&report), summary, !report.separable))
}

fn verify_report(path: &Path) -> Result<Outcome> {
    let file: ReportFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let a = file.subject.to_sring()?;
    let targets: Vec<SRing> = file.targets.iter().map(SRingJson::to_sring).collect::<Result<_>>()?;
    let report = SeparabilityReport {
        separable: file.separable,
        witnesses: file
            .witnesses
            .iter()
            .map(|w| IsoWitness { target: w.target, class_map: w.class_map.clone(), point_map: w.point_map.clone() })
            .collect(),
        nodes_used: 0,
    };
    let replayed = verify_separability_report(&a, &targets, &report);
    let row = json!({ "kind": "replay", "valid": replayed, "separable": report.separable, "witnesses": report.witnesses.len() });
    let summary = json!({ "replay_valid": replayed, "separable": report.separable });
    Ok(Outcome::violation_if(vec![row], summary, !replayed || !report.separable))
}

// ---------------------------------------------------------------------------
// verify-main-theorem
// ---------------------------------------------------------------------------

#[derive(Args, Debug, Serialize)]
pub struct MainTheoremArgs {
    /// The prime p; groups of order 9p are checked.
    #[arg(long)]
    pub p: usize,
    /// Completed subjects are read from and written to this file, so an
    /// exhausted run can be resumed.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SubjectRow {
    kind: String,
    group: String,
    index: usize,
    rank: usize,
    separable: bool,
    algebraic_isomorphisms: usize,
    witnesses: Vec<TargetWitness>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct TargetWitness {
    target_group: String,
    target_index: usize,
    class_map: Vec<usize>,
    point_map: Option<Vec<usize>>,
}

pub fn verify_main_theorem(args: &MainTheoremArgs, limits: &Limits) -> Result<Outcome> {
    let p = args.p;
    if !is_prime(p as u64) {
        return Err(usage(format!("p must be prime, got {p}")));
    }
    if p != 2 && p != 5 && !limits.explicit {
        return Err(usage(format!("p = {p} needs an explicit --budget-nodes or --time-limit-secs (defaults cover p = 2 and p = 5)")));
    }
    let reps = order_representatives(9 * p)?;
    let targets: Vec<SRing> = reps.iter().map(|r| r.2.clone()).collect();
    let mut done: BTreeMap<(String, usize), SubjectRow> = BTreeMap::new();
    if let Some(path) = args.checkpoint.as_ref().filter(|p| p.exists()) {
        for line in std::fs::read_to_string(path)?.lines().filter(|l| !l.trim().is_empty()) {
            let row: SubjectRow = serde_json::from_str(line)?;
            done.insert((row.group.clone(), row.index), row);
        }
    }
    let pending: Vec<usize> = (0..reps.len()).filter(|&i| !done.contains_key(&(reps[i].0.clone(), reps[i].1))).collect();
    let results: Vec<(usize, Result<SeparabilityReport>)> = pending
        .par_iter()
        .map(|&i| (i, is_separable(&reps[i].2, &targets, &mut limits.budget())))
        .collect();
    let mut exhausted = Vec::new();
    for (i, result) in results {
        let (group, index, a) = &reps[i];
        match result {
            Ok(report) => {
                let witnesses = report
                    .witnesses
                    .iter()
                    .map(|w| TargetWitness {
                        target_group: reps[w.target].0.clone(),
                        target_index: reps[w.target].1,
                        class_map: w.class_map.clone(),
                        point_map: w.point_map.clone(),
                    })
                    .collect();
                let row = SubjectRow {
                    kind: "subject".into(),
                    group: group.clone(),
                    index: *index,
                    rank: a.rank(),
                    separable: report.separable,
                    algebraic_isomorphisms: report.witnesses.len(),
                    witnesses,
                };
                done.insert((group.clone(), *index), row);
            }
            Err(Error::BudgetExceeded { .. }) => exhausted.push((group.clone(), *index)),
            Err(e) => return Err(e),
        }
    }
    if let Some(path) = &args.checkpoint {
        let mut text = String::new();
        for row in done.values() {
            text.push_str(&serde_json::to_string(row)?);
            text.push('\n');
        }
        let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        std::io::Write::write_all(&mut tmp, text.as_bytes())?;
        tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    }
    let failures = done.values().filter(|r| !r.separable).count();
    let mut rows: Vec<Value> = done.values().map(to_json).collect();
    rows.extend(exhausted.iter().map(|(g, i)| json!({ "kind": "budget-exhausted", "group": g, "index": i })));
    let summary = json!({
        "order": 9 * p,
        "subjects": reps.len(),
        "completed": done.len(),
        "not_separable": failures,
        "budget_exhausted": exhausted.len(),
    });
    let status = if !exhausted.is_empty() {
        Status::BudgetExhausted
    } else if failures > 0 {
        Status::Violation
    } else {
        Status::Ok
    };
    Ok(Outcome { rows, summary, status })
}

// ---------------------------------------------------------------------------
// nonisom-matrix
// ---------------------------------------------------------------------------

#[derive(Args, Debug, Serialize)]
pub struct NonisomArgs {
    /// The prime p (at least 5).
    #[arg(long)]
    pub p: usize,
}

pub fn nonisom_matrix(args: &NonisomArgs) -> Result<Outcome> {
    let p = args.p;
    let mut entries: Vec<(Value, Option<u8>, SRing)> = Vec::new();
    for i in 1..=3u8 {
        for flavor in [Flavor::Elementary, Flavor::Cyclic] {
            let label = json!({ "family": format!("A{i}*"), "h": flavor.letter().to_string() });
            entries.push((label, Some(i), build_a_star(i, flavor, p)?));
        }
    }
    for (line, k, a) in all_well_defined(p)? {
        entries.push((json!({ "family": format!("A{line}"), "m_order": k }), None, a));
    }
    let pairs: Vec<(usize, usize)> = (0..entries.len()).flat_map(|s| (s + 1..entries.len()).map(move |t| (s, t))).collect();
    let verdicts: Vec<bool> = pairs
        .par_iter()
        .map(|&(s, t)| schurkit::iso::algebraically_isomorphic(&entries[s].2, &entries[t].2))
        .collect();
    let mut rows = Vec::with_capacity(pairs.len());
    let mut violations = 0;
    for (&(s, t), &iso) in pairs.iter().zip(&verdicts) {
        // same-index stars over C9 and E9 are not covered by the statements
        let constrained = !matches!((entries[s].1, entries[t].1), (Some(i), Some(j)) if i == j);
        let violated = constrained && iso;
        violations += usize::from(violated);
        rows.push(json!({
            "kind": "pair",
            "left": entries[s].0,
            "right": entries[t].0,
            "algebraically_isomorphic": iso,
            "required_nonisomorphic": constrained,
            "violation": violated,
        }));
    }
    let summary = json!({ "p": p, "families": entries.len(), "pairs": pairs.len(), "violations": violations });
    Ok(Outcome::violation_if(rows, summary, violations > 0))
}

// ---------------------------------------------------------------------------
// wl-check / wl-pair
// ---------------------------------------------------------------------------

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("sets").required(true).args(["all_inverse_closed", "connection_set", "sample"])))]
pub struct WlCheckArgs {
    /// Group as factor orders, e.g. 9x2.
    #[arg(long)]
    pub group: String,
    /// Every inverse-closed subset of the non-identity elements.
    #[arg(long)]
    pub all_inverse_closed: bool,
    /// One connection set, as element indices separated by commas or spaces.
    #[arg(long)]
    pub connection_set: Option<String>,
    /// This many random inverse-closed sets.
    #[arg(long)]
    pub sample: Option<usize>,
    /// Seed for --sample.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also compare WL equivalence with backtracking isomorphism over the sets.
    #[arg(long)]
    pub iso_oracle: bool,
}

fn parse_connection_set(g: &Group, text: &str) -> Result<Vec<usize>> {
    let mut x = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let e: usize = t.parse().map_err(|_| usage(format!("bad element index {t:?}")))?;
            if e >= g.order() {
                return Err(usage(format!("element {e} is outside a group of order {}", g.order())));
            }
            Ok(e)
        })
        .collect::<Result<Vec<usize>>>()?;
    x.sort_unstable();
    x.dedup();
    Ok(x)
}

fn random_inverse_closed(rng: &mut ChaCha8Rng, g: &Group) -> Vec<usize> {
    let mut x = Vec::new();
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

pub fn wl_check(args: &WlCheckArgs, limits: &Limits) -> Result<Outcome> {
    let g = parse_group(&args.group)?;
    let sets: Vec<Vec<usize>> = if args.all_inverse_closed {
        inverse_closed_sets(&g)?
    } else if let Some(text) = &args.connection_set {
        vec![parse_connection_set(&g, text)?]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        (0..args.sample.unwrap_or(0)).map(|_| random_inverse_closed(&mut rng, &g)).collect()
    };
    let comparisons: Vec<Result<Value>> = sets
        .par_iter()
        .map(|x| {
            let c = wl_closure_vs_sring(&g, x)?;
            let mut row = to_json(&c);
            row["kind"] = json!("wl-closure");
            row["connection_set"] = json!(x);
            Ok(row)
        })
        .collect();
    let mut rows = Vec::with_capacity(sets.len());
    let (mut equal, mut not_union) = (0, 0);
    for c in comparisons {
        let row = c?;
        equal += usize::from(row["partitions_equal"] == json!(true));
        not_union += usize::from(row["wl_is_union_of_relations"] != json!(true));
        rows.push(row);
    }
    let mut summary = json!({
        "group": g.spec_string(),
        "sets": sets.len(),
        "partitions_equal": equal,
        "wl_not_union_of_relations": not_union,
    });
    let mut violated = not_union > 0;
    if args.iso_oracle {
        let graphs = sets.iter().map(|x| cayley_digraph(&g, x)).collect::<Result<Vec<_>>>()?;
        let (wl, contradictions) = wl_partition(&graphs);
        let iso = isomorphism_partition(&graphs, true, limits.nodes)?;
        let agreement = compare_partitions(&wl, &iso);
        violated |= agreement.disagreeing_pairs > 0 || contradictions > 0;
        summary["wl_classes"] = json!(agreement.left_classes);
        summary["isomorphism_classes"] = json!(agreement.right_classes);
        summary["disagreeing_pairs"] = json!(agreement.disagreeing_pairs);
        summary["certificate_contradictions"] = json!(contradictions);
    }
    Ok(Outcome::violation_if(rows, summary, violated))
}

#[derive(Args, Debug, Serialize)]
pub struct WlPairArgs {
    /// Graph JSON: {"n", "arcs"} or {"group", "connection_set"}.
    pub first: PathBuf,
    pub second: PathBuf,
}

pub fn wl_pair(args: &WlPairArgs, limits: &Limits) -> Result<Outcome> {
    let read = |path: &Path| -> Result<GraphJson> { Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?) };
    let (first, second) = (read(&args.first)?, read(&args.second)?);
    let cayley = matches!(
        (&first, &second),
        (GraphJson::Cayley { .. }, GraphJson::Cayley { .. })
    );
    let (x, y) = (first.to_coloring()?, second.to_coloring()?);
    let equivalent = wl2_equivalent(&x, &y);
    let isomorphic = colorings_isomorphic(&x, &y, cayley, &mut limits.budget())?;
    let row = json!({
        "kind": "wl-pair",
        "vertices": [x.n, y.n],
        "stable_colors": [wl2_stabilize(&x).num_colors(), wl2_stabilize(&y).num_colors()],
        "wl_equivalent": equivalent,
        "isomorphic": isomorphic,
    });
    let summary = json!({ "wl_equivalent": equivalent, "isomorphic": isomorphic });
    // isomorphic graphs are always WL-equivalent
    Ok(Outcome::violation_if(vec![row], summary, isomorphic && !equivalent))
}

/// Writes one JSON object per line to standard output.
pub fn write_rows(rows: &[Value]) -> std::io::Result<()> {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        writeln!(out)?;
    }
    out.flush()
}
