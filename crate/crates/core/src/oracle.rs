//! Brute-force certification from the definitions.
//!
//! The oracles here decide `x ∈ cl S` and `x ∈ Int cl S` for concrete
//! rational points by probing an explicit neighbourhood of `x` against the
//! raw member faces of `S`. They never use the dilations, cell bitsets or
//! Boolean operations of the canonical representation.
//!
//! Probing is exact: with `r_j` half the gap from `x_j` to the nearest other
//! cut, the points `x + Σ_j δ_j e_j` with `δ_j ∈ {−r_j, 0, r_j}` meet every
//! face whose closure contains `x`, and every small enough neighbourhood of
//! `x` meets only those faces. Along an axis where `x_j` is not a cut every
//! offset stays in the same interval, so only `δ_j = 0` is tried there.
//! The probes of a probe point lie on the same grid, so each grid point is
//! located once, and the probe coordinates around each cut are computed once
//! per arrangement.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arrangement::Arrangement;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::regular::{frontier, ro_join, ro_subset, RegularOpenSet};
use crate::report::{Check, Report};
use crate::resolution::{enumerate_chains, sweep_tower};
use crate::stone::{two_power_bound_check, FiniteBooleanAlgebra};
use crate::sweep::{Hit, Sink, Sweep};
use crate::tiling::BaseFamily;
use crate::tower::Tower;

/// Sample points per face: the centroid, then seeded points of the face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplePlan {
    pub per_face: usize,
    pub seed: u64,
}

/// Denominator of the perturbation grid inside an interval.
const GRID: i64 = 1 << 10;

impl SamplePlan {
    pub fn new(per_face: usize, seed: u64) -> Result<Self> {
        if per_face == 0 {
            return Err(Error::Precondition("at least one sample per face".into()));
        }
        Ok(SamplePlan { per_face, seed })
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// Samples of face `index`: its centroid, then points with every
    /// interval coordinate drawn from a grid strictly inside the interval.
    pub fn samples(&self, arr: &Arrangement, index: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Rational>> {
        let pos: Vec<usize> = (0..arr.dim()).map(|j| arr.pos_of(index, j)).collect();
        let mut out = vec![pos.iter().enumerate().map(|(j, &p)| arr.coordinate(j, p)).collect()];
        for _ in 1..self.per_face {
            let x = (0..arr.dim())
                .map(|j| {
                    let (lo, hi) = arr.extent(j, pos[j]);
                    if lo == hi {
                        lo.clone()
                    } else {
                        Rational::between(lo, hi, rng.gen_range(1..GRID), GRID)
                    }
                })
                .collect();
            out.push(x);
        }
        out
    }
}

fn axis_position(cuts: &[Rational], v: &Rational) -> usize {
    match cuts.binary_search(v) {
        Ok(i) => 2 * i,
        Err(i) => 2 * i - 1,
    }
}

fn face_of(arr: &Arrangement, x: &[Rational]) -> Result<usize> {
    if x.len() != arr.dim() {
        return Err(Error::DimensionMismatch { expected: arr.dim(), found: x.len() });
    }
    let mut index = 0;
    for (j, v) in x.iter().enumerate() {
        if v.is_negative() || *v > Rational::one() {
            return Err(Error::CoordinateOutOfRange(v.to_string()));
        }
        index += axis_position(arr.cuts(j), v) * arr.stride(j);
    }
    Ok(index)
}

/// Probe coordinates around every cut of an arrangement, located on their
/// axis: `cuts[j][i]` lists `(offset, position)` for the cut `i` of axis `j`,
/// offsets in increasing order.
struct ProbeTable {
    cuts: Vec<Vec<Vec<(i8, usize)>>>,
}

impl ProbeTable {
    fn new(arr: &Arrangement) -> Self {
        let cuts = (0..arr.dim())
            .map(|j| {
                let cuts = arr.cuts(j);
                (0..cuts.len())
                    .map(|i| {
                        let v = &cuts[i];
                        // the nearer neighbouring cut w fixes r = |w − v| / 2
                        let w = match (i.checked_sub(1).map(|k| &cuts[k]), cuts.get(i + 1)) {
                            (Some(a), Some(b)) => {
                                if *v <= a.midpoint(b) {
                                    a
                                } else {
                                    b
                                }
                            }
                            (Some(a), None) => a,
                            (None, Some(b)) => b,
                            (None, None) => unreachable!("0 and 1 are always cuts"),
                        };
                        let towards = Rational::between(v, w, 1, 2);
                        let away = Rational::between(v, w, -1, 2);
                        let (down, up) = if w < v { (towards, away) } else { (away, towards) };
                        let mut out = Vec::with_capacity(3);
                        if i > 0 {
                            out.push((-1, axis_position(cuts, &down)));
                        }
                        out.push((0, axis_position(cuts, v)));
                        if i + 1 < cuts.len() {
                            out.push((1, axis_position(cuts, &up)));
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        ProbeTable { cuts }
    }
}

/// Probe offsets and located positions along one axis.
#[derive(Clone, Copy)]
struct AxisProbes {
    len: usize,
    offset: [i8; 3],
    position: [usize; 3],
}

/// The probe grid around `x`: per axis the offsets tried (`-1`, `0`, `1`),
/// and whether the probe point at each grid position lies in `S`.
struct Probes {
    axes: Vec<AxisProbes>,
    member: Vec<bool>,
}

impl Probes {
    /// `x` must lie in the cube.
    fn new(x: &[Rational], s: &RegularOpenSet, table: &ProbeTable) -> Self {
        let arr = s.arrangement();
        let axes: Vec<AxisProbes> = x
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let stride = arr.stride(j);
                let mut a = AxisProbes { len: 0, offset: [0; 3], position: [0; 3] };
                match arr.cuts(j).binary_search(v) {
                    Ok(i) => {
                        for &(o, p) in &table.cuts[j][i] {
                            a.offset[a.len] = o;
                            a.position[a.len] = p * stride;
                            a.len += 1;
                        }
                    }
                    Err(i) => {
                        a.position[0] = (2 * i - 1) * stride;
                        a.len = 1;
                    }
                }
                a
            })
            .collect();
        // a probe point's face is the product of its coordinates' positions
        let total: usize = axes.iter().map(|a| a.len).product();
        let mut member = Vec::with_capacity(total);
        for g in 0..total {
            let mut rest = g;
            let mut index = 0;
            for a in axes.iter().rev() {
                index += a.position[rest % a.len];
                rest /= a.len;
            }
            member.push(s.member_bits().contains(index));
        }
        Probes { axes, member }
    }

    /// Some probe lies in `S`.
    fn closure(&self) -> bool {
        self.member.iter().any(|&m| m)
    }

    /// Every probe `p` lies in `cl S`, i.e. one of `p`'s own probes lies in
    /// `S`. The probes of `p` are the grid points agreeing with `p` on every
    /// axis where `p` is off its cut, so they are already on the grid; the
    /// existential is evaluated one axis at a time.
    fn interior_of_closure(&self) -> bool {
        let mut near = self.member.clone();
        let mut stride = near.len();
        for axis in &self.axes {
            let k = axis.len;
            stride /= k;
            if k == 1 {
                continue;
            }
            let zero = axis.offset[..k].iter().position(|&o| o == 0).expect("the point itself is probed");
            for block in (0..near.len()).step_by(stride * k) {
                for r in 0..stride {
                    let any = (0..k).any(|t| near[block + t * stride + r]);
                    near[block + zero * stride + r] = any;
                }
            }
        }
        near.iter().all(|&m| m)
    }
}

/// `x ∈ cl S`: some point of every small neighbourhood of `x` lies in `S`.
pub fn oracle_closure(x: &[Rational], s: &RegularOpenSet) -> Result<bool> {
    face_of(s.arrangement(), x)?;
    Ok(Probes::new(x, s, &ProbeTable::new(s.arrangement())).closure())
}

/// `x ∈ Int cl S`: some neighbourhood of `x` lies inside `cl S`.
pub fn oracle_membership(x: &[Rational], s: &RegularOpenSet) -> Result<bool> {
    face_of(s.arrangement(), x)?;
    Ok(Probes::new(x, s, &ProbeTable::new(s.arrangement())).interior_of_closure())
}

/// Disagreements between the canonical verdicts of one object and the
/// oracles, over all faces of its arrangement and all planned samples.
#[derive(Clone, Debug, Default)]
pub struct Agreement {
    pub faces: u64,
    pub samples: u64,
    pub outside: Option<String>,
    pub membership: Option<String>,
    pub closure: Option<String>,
    pub frontier: Option<String>,
}

impl Agreement {
    pub fn passed(&self) -> bool {
        self.outside.is_none() && self.membership.is_none() && self.closure.is_none() && self.frontier.is_none()
    }

    fn merge(&mut self, later: Agreement) {
        self.faces += later.faces;
        self.samples += later.samples;
        for (a, b) in [
            (&mut self.outside, later.outside),
            (&mut self.membership, later.membership),
            (&mut self.closure, later.closure),
            (&mut self.frontier, later.frontier),
        ] {
            if a.is_none() {
                *a = b;
            }
        }
    }
}

fn show(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Checks `S`'s canonical membership, closure and frontier against the
/// oracles at every sample of every face of `S`'s arrangement.
pub fn object_agreement(s: &RegularOpenSet, plan: &SamplePlan, salt: u64, label: &str) -> Result<Agreement> {
    let arr = s.arrangement();
    let fr = frontier(s);
    let table = ProbeTable::new(arr);
    let mut rng = plan.rng(salt);
    let mut out = Agreement::default();
    for index in 0..arr.face_count() {
        out.faces += 1;
        for x in plan.samples(arr, index, &mut rng) {
            out.samples += 1;
            let note = |slot: &mut Option<String>, what: &str| {
                if slot.is_none() {
                    *slot = Some(format!("{label}: {what} at {}", show(&x)));
                }
            };
            if face_of(arr, &x)? != index {
                note(&mut out.outside, "sample outside its face");
                continue;
            }
            let probes = Probes::new(&x, s, &table);
            let m = probes.interior_of_closure();
            let c = probes.closure();
            let f = arr.locate(&x)?;
            if s.contains_face(&f) != m {
                note(&mut out.membership, if m { "missing interior point" } else { "member outside Int cl" });
            }
            if s.closure_contains_face(&f) != c {
                note(&mut out.closure, "closure disagrees");
            }
            if fr.contains(&f) != (c && !m) {
                note(&mut out.frontier, "frontier disagrees");
            }
        }
    }
    Ok(out)
}

/// Oracle agreement over many labelled objects, in parallel; one check per
/// verdict kind, witnesses from the first failing object in list order.
pub fn agreement_checks(prefix: &str, objects: &[(String, RegularOpenSet)], plan: &SamplePlan) -> Result<Vec<Check>> {
    let parts: Vec<Agreement> = objects
        .par_iter()
        .enumerate()
        .map(|(i, (label, s))| object_agreement(s, plan, i as u64, label))
        .collect::<Result<_>>()?;
    let mut all = Agreement::default();
    for p in parts {
        all.merge(p);
    }
    let n = all.samples;
    Ok(vec![
        Check::from_witness(format!("{prefix}_samples_in_face"), n, all.outside),
        Check::from_witness(format!("{prefix}_regular"), n, all.membership),
        Check::from_witness(format!("{prefix}_closure"), n, all.closure),
        Check::from_witness(format!("{prefix}_frontier"), n, all.frontier),
    ])
}

/// Every invariant of a tower, exhaustively: oracle agreement of all tiles
/// and all spent base elements, the global face sweep, nesting, diameters,
/// fresh indices, chains, and the per-split sweeps of [`lemma_sweeps`].
pub fn verify_tower(tower: &Tower, base: &BaseFamily, plan: &SamplePlan) -> Result<Report> {
    let mut report = Report::default();

    let mut tiles = Vec::new();
    for (k, level) in tower.levels.iter().enumerate() {
        for (i, t) in level.tiles.iter().enumerate() {
            tiles.push((format!("level {k} tile {i}"), t.clone()));
        }
    }
    report.checks.extend(agreement_checks("tiles", &tiles, plan)?);
    let spent: BTreeSet<usize> = tower.levels.iter().flat_map(|l| l.budget.iter().copied()).collect();
    let mut elements = Vec::new();
    for &i in &spent {
        let e = base
            .elements
            .get(i)
            .ok_or_else(|| Error::Precondition(format!("budget names missing element {i}")))?;
        elements.push((format!("base element {i}"), e.clone()));
    }
    report.checks.extend(agreement_checks("base", &elements, plan)?);

    let sweep = sweep_tower(tower, base)?;
    report.checks.extend(sweep.checks);

    let mut nested = None;
    let mut diam = None;
    let mut pairs = 0;
    for k in 1..tower.levels.len() {
        for (i, t) in tower.levels[k].tiles.iter().enumerate() {
            pairs += 1;
            let p = tower.parents[k].get(i).and_then(|&p| tower.levels[k - 1].tiles.get(p));
            let ok = match p {
                Some(p) => ro_subset(t, p)?,
                None => false,
            };
            if !ok && nested.is_none() {
                nested = Some(format!("level {k} tile {i}"));
            }
            if t.diameter() >= tower.schedule[k] && diam.is_none() {
                diam = Some(format!("level {k} tile {i} has diameter {}", t.diameter()));
            }
        }
    }
    report.push(Check::from_witness("nested_in_parent", pairs, nested));
    report.push(Check::from_witness("diameter_schedule", pairs, diam));

    let mut seen = BTreeSet::new();
    let mut fresh = None;
    let mut spent_steps = 0;
    for (k, steps) in tower.steps.iter().enumerate() {
        for s in steps {
            for &i in &s.indices {
                spent_steps += 1;
                if !seen.insert(i) && fresh.is_none() {
                    fresh = Some(format!("base element {i} reused at level {k}"));
                }
            }
        }
        if k > 0 {
            let expected: BTreeSet<usize> = tower.levels[k - 1]
                .budget
                .iter()
                .copied()
                .chain(steps.iter().flat_map(|s| s.indices.iter().copied()))
                .collect();
            if expected != tower.levels[k].budget && fresh.is_none() {
                fresh = Some(format!("level {k} budget differs from the indices spent"));
            }
        }
    }
    report.push(Check::from_witness("fresh_indices", spent_steps, fresh));

    let chains = enumerate_chains(tower);
    let leaves = tower.levels[tower.depth()].tiles.len();
    let chain_witness = (chains.len() != leaves).then(|| format!("{} chains for {leaves} leaves", chains.len()));
    report.push(Check::from_witness("chains", chains.len() as u64, chain_witness));

    report.extend(lemma_sweeps(tower, base)?);
    Ok(report)
}

struct StepSink {
    /// Object layout: 0 is the parent tile, then `covers` covers, then pieces.
    covers: usize,
    /// Cover position of each piece.
    piece_pos: Vec<usize>,
    faces: u64,
    cover: Option<usize>,
    disjoint: Option<usize>,
    partition: Option<usize>,
    maximal: Option<usize>,
    budget: Option<usize>,
    incidences: Vec<(usize, Vec<usize>, Vec<usize>)>,
}

impl Sink for StepSink {
    fn visit(&mut self, face: usize, hits: &[Hit]) {
        let mut in_t = false;
        let mut in_cover = false;
        let mut fronts: Vec<usize> = Vec::new();
        let mut pieces: Vec<usize> = Vec::new();
        let mut members = 0;
        for h in hits {
            let o = h.object as usize;
            if o == 0 {
                in_t = true;
            } else if o <= self.covers {
                in_cover |= h.member;
                if !h.member {
                    fronts.push(o - 1);
                }
            } else {
                pieces.push(self.piece_pos[o - 1 - self.covers]);
                members += h.member as usize;
            }
        }
        if !in_t {
            // pieces lie inside T, so nothing else is checked off cl T
            if !pieces.is_empty() && self.partition.is_none() {
                self.partition = Some(face);
            }
            return;
        }
        self.faces += 1;
        let note = |slot: &mut Option<usize>, bad: bool| {
            if bad && slot.is_none() {
                *slot = Some(face);
            }
        };
        note(&mut self.cover, !in_cover);
        note(&mut self.disjoint, members > 1);
        note(&mut self.partition, pieces.is_empty());
        pieces.sort_unstable();
        if let Some((&top, rest)) = pieces.split_last() {
            note(&mut self.maximal, rest.iter().any(|i| !fronts.contains(i)));
            let _ = top;
        }
        note(&mut self.budget, pieces.len() > fronts.len() + 1);
        if pieces.len() >= 2 {
            self.incidences.push((face, pieces, fronts));
        }
    }

    fn merge(&mut self, later: Self) {
        self.faces += later.faces;
        for (a, b) in [
            (&mut self.cover, later.cover),
            (&mut self.disjoint, later.disjoint),
            (&mut self.partition, later.partition),
            (&mut self.maximal, later.maximal),
            (&mut self.budget, later.budget),
        ] {
            if a.is_none() {
                *a = b;
            }
        }
        self.incidences.extend(later.incidences);
    }
}

/// Re-sweeps the local arrangement of every recorded split. At every face
/// of `cl T`: the covers cover it, the pieces are disjoint and their
/// closures cover it, every piece but the last one whose closure contains
/// it has the face on its cover's frontier, and the number of such pieces
/// exceeds the number of cover frontiers through it by at most one. The
/// recorded incidences must equal the recomputed ones.
pub fn lemma_sweeps(tower: &Tower, base: &BaseFamily) -> Result<Report> {
    let mut jobs = Vec::new();
    for (k, steps) in tower.steps.iter().enumerate() {
        for s in steps {
            jobs.push((k, s));
        }
    }
    let results: Vec<(u64, [Option<String>; 6])> = jobs
        .par_iter()
        .map(|&(k, s)| {
            let parent = tower.tile(k - 1, s.parent)?;
            let mut objects = vec![parent.clone()];
            for &i in &s.indices {
                objects.push(
                    base.elements
                        .get(i)
                        .cloned()
                        .ok_or_else(|| Error::Precondition(format!("step names missing element {i}")))?,
                );
            }
            let mut piece_pos = Vec::new();
            for &(b, t) in &s.produced {
                let pos = s
                    .indices
                    .iter()
                    .position(|&i| i == b)
                    .ok_or_else(|| Error::Invariant(format!("piece from unlisted element {b}")))?;
                piece_pos.push(pos);
                objects.push(tower.tile(k, t)?.clone());
            }
            // a tampered tile may have cuts the split never made
            if let Some(o) = objects.iter().position(|o| !s.arrangement.refines(o.arrangement())) {
                let what = if o == 0 { "the parent".to_string() } else { format!("object {o}") };
                let msg = format!("level {k} split of tile {}: {what} is not cut by the split's arrangement", s.parent);
                return Ok((0, [None, None, None, None, None, Some(msg)]));
            }
            let sweep = Sweep::with_arrangement(s.arrangement.clone(), &objects)?;
            let window = sweep.object_range(0).map(|r| r.to_vec());
            let covers = s.indices.len();
            let out = sweep.run(window.as_deref(), || StepSink {
                covers,
                piece_pos: piece_pos.clone(),
                faces: 0,
                cover: None,
                disjoint: None,
                partition: None,
                maximal: None,
                budget: None,
                incidences: Vec::new(),
            });
            let arr = &s.arrangement;
            let name = |f: Option<usize>| f.map(|i| format!("level {k} split of tile {}: {}", s.parent, arr.describe_index(i)));
            let recorded: Vec<(usize, Vec<usize>, Vec<usize>)> =
                s.records.iter().map(|r| (r.face, r.pieces.clone(), r.frontiers.clone())).collect();
            let records = (recorded != out.incidences).then(|| {
                let bad = recorded
                    .iter()
                    .zip(&out.incidences)
                    .find(|(a, b)| a != b)
                    .map(|(a, _)| a.0)
                    .or_else(|| out.incidences.get(recorded.len()).map(|x| x.0))
                    .or_else(|| recorded.get(out.incidences.len()).map(|x| x.0))
                    .unwrap_or(0);
                format!("level {k} split of tile {}: record at {}", s.parent, arr.describe_index(bad))
            });
            Ok((
                out.faces,
                [
                    name(out.cover),
                    name(out.disjoint),
                    name(out.partition),
                    name(out.maximal),
                    name(out.budget),
                    records,
                ],
            ))
        })
        .collect::<Result<_>>()?;
    let names = [
        "split_covered",
        "split_pieces_disjoint",
        "split_pieces_cover",
        "split_non_maximal_on_frontier",
        "split_frontier_budget",
        "split_records",
    ];
    let faces: u64 = results.iter().map(|r| r.0).sum();
    let mut report = Report::default();
    for (c, name) in names.iter().enumerate() {
        let w = results.iter().find_map(|r| r.1[c].clone());
        report.push(Check::from_witness(*name, faces, w));
    }
    Ok(report)
}

/// Structure of a generated subalgebra: the face sweep of
/// [`two_power_bound_check`], unique signatures, the atom count, each
/// generator as the join of the atoms under it, and oracle agreement of all
/// atoms and generators.
pub fn verify_algebra(n: usize, algebra: &FiniteBooleanAlgebra, plan: &SamplePlan) -> Result<Report> {
    let mut report = Report::default();
    let stone = two_power_bound_check(n, algebra)?;
    report.checks.extend(stone.checks);

    let mut sigs = BTreeSet::new();
    let dup = algebra
        .atoms
        .iter()
        .find(|a| !sigs.insert(a.signature))
        .map(|a| format!("signature {:b} repeated", a.signature));
    report.push(Check::from_witness("signatures_unique", algebra.atoms.len() as u64, dup));

    let g = algebra.generators.len();
    let count = algebra.atoms.len();
    let too_many = (g < 32 && count > 1usize << g).then(|| format!("{count} atoms from {g} generators"));
    let empty = algebra.atoms.iter().find(|a| a.set.is_empty()).map(|a| format!("empty atom {:b}", a.signature));
    report.push(Check::from_witness("atom_count", count as u64, too_many.or(empty)));

    let mut joins = None;
    for (alpha, gen) in algebra.generators.iter().enumerate() {
        let mut j = RegularOpenSet::empty(algebra.arrangement.clone());
        for a in algebra.atoms.iter().filter(|a| a.signature >> alpha & 1 == 1) {
            j = ro_join(&j, &a.set)?;
        }
        if !crate::regular::ro_equal(&j, gen) {
            joins = Some(format!("generator {alpha}"));
            break;
        }
    }
    report.push(Check::from_witness("generators_are_joins", g as u64, joins));

    let mut objects: Vec<(String, RegularOpenSet)> =
        algebra.atoms.iter().map(|a| (format!("atom {:b}", a.signature), a.set.clone())).collect();
    objects.extend(algebra.generators.iter().enumerate().map(|(i, s)| (format!("generator {i}"), s.clone())));
    report.checks.extend(agreement_checks("algebra", &objects, plan)?);
    Ok(report)
}
