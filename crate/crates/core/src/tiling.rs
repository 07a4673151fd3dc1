//! Bases, tilings and the two refinement lemmas.

use std::collections::BTreeSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arrangement::{Arrangement, Face};
use crate::error::{Error, Result};
use crate::geometry::OpenBox;
use crate::rational::Rational;
use crate::regular::RegularOpenSet;
use crate::sweep::{Hit, Sink, Sweep};

/// A finite indexed family of regular open sets, standing in for a base of
/// the cube, together with the dimension bound `n` of its frontier property.
#[derive(Clone, Debug)]
pub struct BaseFamily {
    pub dim: usize,
    pub n: usize,
    pub elements: Vec<RegularOpenSet>,
    diameters: Vec<Rational>,
    centres: Vec<Vec<Rational>>,
    bboxes: Vec<Option<OpenBox>>,
}

impl BaseFamily {
    pub fn from_sets(dim: usize, n: usize, elements: Vec<RegularOpenSet>) -> Result<Self> {
        let mut diameters = Vec::with_capacity(elements.len());
        let mut centres = Vec::with_capacity(elements.len());
        let mut bboxes = Vec::with_capacity(elements.len());
        for e in &elements {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.dim() });
            }
            let bb = e.bounding_box();
            diameters.push(bb.as_ref().map(OpenBox::diameter).unwrap_or_else(Rational::zero));
            centres.push(bb.as_ref().map(OpenBox::center).unwrap_or_else(|| vec![Rational::zero(); dim]));
            bboxes.push(bb);
        }
        Ok(BaseFamily { dim, n, elements, diameters, centres, bboxes })
    }

    /// A base of boxes, with `n = d`.
    pub fn from_boxes(dim: usize, boxes: &[OpenBox]) -> Result<Self> {
        Self::from_sets(dim, dim, boxes.iter().map(RegularOpenSet::from_box).collect())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn diameter(&self, i: usize) -> &Rational {
        &self.diameters[i]
    }

    /// Closed bounding box; `None` for an empty element.
    pub fn bounding_box(&self, i: usize) -> Option<&OpenBox> {
        self.bboxes[i].as_ref()
    }

    /// Centre of the element's bounding box.
    pub fn centre(&self, i: usize) -> &[Rational] {
        &self.centres[i]
    }
}

const JITTER_Q: i64 = 997;

struct GridLevel {
    cells: usize,
    width: Rational,
    band_lo: Rational,
    band_width: Rational,
}

/// Jittered grids: one box per grid cell, each cell widened on every side by
/// a margin drawn from the level's band. Margins on a common grid line are
/// distinct whenever the two boxes' closures can meet (same line, same side,
/// neighbouring cells on the other axes, told apart by index parity), so no
/// point lies on more than `d` frontiers.
fn jittered_grids(d: usize, levels: &[GridLevel], seed: u64) -> Vec<OpenBox> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes = 1usize << (d - 1);
    let mut out = Vec::new();
    for lvl in levels {
        let m = lvl.cells;
        // margins[axis][line][side][class]
        let mut margins = vec![vec![[Vec::new(), Vec::new()]; m + 1]; d];
        for axis_margins in margins.iter_mut() {
            for line in axis_margins.iter_mut() {
                for side in line.iter_mut() {
                    *side = index::sample(&mut rng, (JITTER_Q - 1) as usize, classes)
                        .into_iter()
                        .map(|u| {
                            let t = Rational::new(u as i64 + 1, JITTER_Q);
                            &lvl.band_lo + &(&lvl.band_width * &t)
                        })
                        .collect();
                }
            }
        }
        let total = m.pow(d as u32);
        for c in 0..total {
            let mut idx = vec![0usize; d];
            let mut rem = c;
            for j in (0..d).rev() {
                idx[j] = rem % m;
                rem /= m;
            }
            let iv = (0..d)
                .map(|j| {
                    let mut class = 0;
                    let mut bit = 0;
                    for (i, &a) in idx.iter().enumerate() {
                        if i != j {
                            class |= (a % 2) << bit;
                            bit += 1;
                        }
                    }
                    let a = idx[j];
                    let lo = if a == 0 {
                        Rational::zero()
                    } else {
                        &(&lvl.width * &Rational::from_integer(a as i64)) - &margins[j][a][0][class]
                    };
                    let hi = if a + 1 == m {
                        Rational::one()
                    } else {
                        &(&lvl.width * &Rational::from_integer(a as i64 + 1)) + &margins[j][a + 1][1][class]
                    };
                    (lo, hi)
                })
                .collect();
            out.push(OpenBox::new(iv).expect("margins are smaller than a cell"));
        }
    }
    out
}

/// Cells per axis needed for `1/m < max_diam`.
fn min_cells(max_diam: &Rational) -> usize {
    // floor(1/max_diam) + 1
    let inv = &Rational::one() / max_diam;
    let mut m = 1usize;
    while Rational::from_integer(m as i64) <= inv {
        m += 1;
    }
    m
}

fn margin_budget(m: usize, max_diam: &Rational) -> Rational {
    let width = Rational::new(1, m as i64);
    let slack = max_diam - &width;
    let half_slack = &slack * &Rational::new(1, 2);
    let quarter = &width * &Rational::new(1, 4);
    half_slack.min(quarter)
}

/// A base of at most `count` boxes of diameter `< max_diam` covering the
/// cube: the finest jittered grid with `m^d ≤ count` cells.
pub fn make_base(d: usize, count: usize, max_diam: &Rational, seed: u64) -> Result<BaseFamily> {
    if d == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    if count == 0 {
        return Err(Error::Precondition("count must be at least 1".into()));
    }
    if !(max_diam > &Rational::zero() && max_diam <= &Rational::one()) {
        return Err(Error::Precondition(format!("max_diam {max_diam} outside (0,1]")));
    }
    let mut m = 1usize;
    while (m + 1).checked_pow(d as u32).is_some_and(|c| c <= count) {
        m += 1;
    }
    let need = min_cells(max_diam);
    if m < need {
        return Err(Error::Infeasible(format!(
            "{count} boxes of diameter < {max_diam} cannot cover [0,1]^{d}: need {} boxes",
            need.pow(d as u32)
        )));
    }
    let eps = &margin_budget(m, max_diam) * &Rational::new(1, 3);
    let level = GridLevel { cells: m, width: Rational::new(1, m as i64), band_lo: eps.clone(), band_width: eps };
    BaseFamily::from_boxes(d, &jittered_grids(d, &[level], seed))
}

/// Grid sizes for a schedule: each level subdivides the previous grid into
/// the fewest equal parts with cell width below the level's bound.
pub fn nested_grid_sizes(schedule: &[Rational]) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut prev = 1usize;
    for bound in schedule.iter().skip(1) {
        let need = min_cells(bound);
        let t = need.div_ceil(prev).max(1);
        prev *= t;
        sizes.push(prev);
    }
    sizes
}

/// A layered base for a tower with the given schedule: level `k` is a
/// jittered grid of boxes of diameter `< schedule[k]`, nested in level `k-1`,
/// with margin bands that grow with `k`.
///
/// Level-`k` tiles then stay within `2kε` of their grid cell, and the boxes
/// of the next level reach further than that, so a tile is always covered by
/// the boxes of its own sub-cells.
pub fn make_tower_base(d: usize, schedule: &[Rational], seed: u64) -> Result<BaseFamily> {
    if d == 0 {
        return Err(Error::Precondition("dimension must be positive".into()));
    }
    let sizes = nested_grid_sizes(schedule);
    let depth = sizes.len();
    if depth == 0 {
        return BaseFamily::from_boxes(d, &[]);
    }
    let mut s: Option<Rational> = None;
    for (k, &m) in sizes.iter().enumerate() {
        let b = margin_budget(m, &schedule[k + 1]);
        if !b.is_negative() && !b.is_zero() {
            s = Some(match s {
                Some(x) => x.min(b),
                None => b,
            });
        } else {
            return Err(Error::Infeasible(format!("no room for margins at level {}", k + 1)));
        }
    }
    let eps = &s.expect("depth > 0") * &Rational::new(1, 2 * depth as i64 + 1);
    let levels: Vec<GridLevel> = sizes
        .iter()
        .enumerate()
        .map(|(k, &m)| GridLevel {
            cells: m,
            width: Rational::new(1, m as i64),
            band_lo: &eps * &Rational::from_integer(2 * k as i64 + 1),
            band_width: eps.clone(),
        })
        .collect();
    BaseFamily::from_boxes(d, &jittered_grids(d, &levels, seed))
}

/// `2^{-k}` for `k = 0..=depth`.
pub fn dyadic_schedule(depth: usize) -> Vec<Rational> {
    (0..=depth).map(|k| Rational::pow2_neg(k as u32)).collect()
}

/// Outcome of the frontier-intersection check on a base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BaseCheck {
    Ok { faces: usize },
    Violation { face: String, point: Vec<Rational>, indices: Vec<usize> },
}

impl BaseCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, BaseCheck::Ok { .. })
    }
}

struct FrontierOrderSink {
    limit: usize,
    faces: usize,
    first: Option<(usize, Vec<usize>)>,
}

impl Sink for FrontierOrderSink {
    fn visit(&mut self, face: usize, hits: &[Hit]) {
        self.faces += 1;
        if self.first.is_some() {
            return;
        }
        let on: Vec<usize> = hits.iter().filter(|h| !h.member).map(|h| h.object as usize).collect();
        if on.len() > self.limit {
            self.first = Some((face, on));
        }
    }
    fn merge(&mut self, later: Self) {
        self.faces += later.faces;
        if self.first.is_none() {
            self.first = later.first;
        }
    }
}

/// Sweeps every face of the base's arrangement and reports the first face
/// lying on more than `n` frontiers.
pub fn check_base_property(base: &BaseFamily) -> BaseCheck {
    let sweep = Sweep::new(base.dim, &base.elements).expect("base elements share a dimension");
    let out = sweep.run(None, || FrontierOrderSink { limit: base.n, faces: 0, first: None });
    match out.first {
        None => BaseCheck::Ok { faces: out.faces },
        Some((face, indices)) => {
            let arr = sweep.arrangement();
            let f = arr.face(face);
            BaseCheck::Violation { face: arr.describe(&f), point: arr.centroid(&f), indices }
        }
    }
}

/// Incidence at one face of a split: the pieces whose closure contains it
/// (`F_x`) and the covers whose frontier contains it (`G_x`), both given as
/// positions in the cover list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Incidence {
    pub face: usize,
    pub pieces: Vec<usize>,
    pub frontiers: Vec<usize>,
}

/// Result of splitting one set along an ordered cover.
#[derive(Clone, Debug)]
pub struct Split {
    /// Common refinement of the set and its covers.
    pub arrangement: Arc<Arrangement>,
    /// Nonempty pieces with the position of the cover they came from.
    pub pieces: Vec<(usize, RegularOpenSet)>,
    /// Incidences at faces of `cl T` met by at least two piece closures.
    pub records: Vec<Incidence>,
}

fn uncovered(arr: &Arrangement, bits: &FixedBitSet) -> Error {
    let best = bits
        .ones()
        .max_by_key(|&i| (arr.face(i).dim(), std::cmp::Reverse(i)))
        .expect("nonempty");
    let f = arr.face(best);
    Error::Uncovered {
        face: arr.describe(&f),
        point: format!("{:?}", arr.centroid(&f)),
    }
}

/// Splits `t` along `covers`: `C_i = T ∩ (B_i ∖ ⋃_{j<i} cl B_j)`.
///
/// Each `C_i` is a meet of regular open sets and hence already regular; the
/// frontier of every piece is nevertheless checked to lie in
/// `Fr T ∪ ⋃_j Fr B_j`.
pub fn lemma1_split(t: &RegularOpenSet, covers: &[RegularOpenSet]) -> Result<Split> {
    let d = t.dim();
    let mut values: Vec<Vec<Rational>> = (0..d).map(|j| t.arrangement().cuts(j).to_vec()).collect();
    for c in covers {
        if c.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: c.dim() });
        }
        for (j, v) in values.iter_mut().enumerate() {
            v.extend_from_slice(c.arrangement().cuts(j));
        }
    }
    let arr = Arc::new(Arrangement::from_values(values)?);
    let tt = t.on(&arr)?;
    let cs: Vec<RegularOpenSet> = covers.iter().map(|c| c.on(&arr)).collect::<Result<_>>()?;

    let mut union = FixedBitSet::with_capacity(arr.face_count());
    for c in &cs {
        union.union_with(c.member_bits());
    }
    let mut missing = tt.closure_bits().clone();
    missing.difference_with(&union);
    if !missing.is_clear() {
        return Err(uncovered(&arr, &missing));
    }

    let mut frontiers = tt.closure_bits().clone();
    frontiers.difference_with(tt.member_bits());
    for c in &cs {
        let mut f = c.closure_bits().clone();
        f.difference_with(c.member_bits());
        frontiers.union_with(&f);
    }

    let mut earlier = FixedBitSet::with_capacity(arr.cell_count());
    let mut fine_pieces = Vec::new();
    for (i, c) in cs.iter().enumerate() {
        let mut cells = tt.cells().clone();
        cells.intersect_with(c.cells());
        cells.difference_with(&earlier);
        earlier.union_with(c.cells());
        if cells.is_clear() {
            continue;
        }
        let piece = RegularOpenSet::from_cells(arr.clone(), cells);
        let mut fr = piece.closure_bits().clone();
        fr.difference_with(piece.member_bits());
        if !fr.is_subset(&frontiers) {
            let bad: FixedBitSet = fr.difference(&frontiers).collect();
            return Err(Error::Invariant(format!(
                "piece {i} has frontier outside the frontiers of its inputs at {}",
                arr.describe_index(bad.ones().next().expect("nonempty"))
            )));
        }
        fine_pieces.push((i, piece));
    }

    let mut records = Vec::new();
    for f in tt.closure_bits().ones() {
        let pieces: Vec<usize> = fine_pieces
            .iter()
            .filter(|(_, p)| p.closure_bits().contains(f))
            .map(|(i, _)| *i)
            .collect();
        if pieces.len() >= 2 {
            let frontiers = cs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.closure_bits().contains(f) && !c.member_bits().contains(f))
                .map(|(i, _)| i)
                .collect();
            records.push(Incidence { face: f, pieces, frontiers });
        }
    }
    let pieces = fine_pieces.into_iter().map(|(i, p)| (i, p.minimized())).collect();
    Ok(Split { arrangement: arr, pieces, records })
}

/// A finite family of pairwise disjoint regular open sets whose closures
/// cover the cube, with the set of base indices spent producing it.
#[derive(Clone, Debug)]
pub struct Tiling {
    pub tiles: Vec<RegularOpenSet>,
    pub budget: BTreeSet<usize>,
}

impl Tiling {
    /// The one-tile tiling `{X}`.
    pub fn trivial(dim: usize) -> Self {
        Tiling { tiles: vec![RegularOpenSet::top(dim)], budget: BTreeSet::new() }
    }
}

/// Record of one tile being split during a refinement.
#[derive(Clone, Debug)]
pub struct RefinementStep {
    /// Index of the split tile in the coarser tiling.
    pub parent: usize,
    /// The chosen base indices `F_T`, increasing.
    pub indices: Vec<usize>,
    /// For each produced tile: the base index it came from and its index in
    /// the finer tiling.
    pub produced: Vec<(usize, usize)>,
    /// Local arrangement of the split and its incidence records; positions
    /// in the records refer to `indices`.
    pub arrangement: Arc<Arrangement>,
    pub records: Vec<Incidence>,
}

/// Splits tile `tile` of `tiling` along the base elements `indices` (fresh
/// with respect to the budget), replacing it in place by the nonempty pieces.
pub fn lemma2_refine(
    tiling: &Tiling,
    tile: usize,
    base: &BaseFamily,
    indices: &[usize],
) -> Result<(Tiling, RefinementStep)> {
    let t = tiling.tiles.get(tile).ok_or(Error::NoSuchTile(tile))?;
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for &i in &sorted {
        if i >= base.len() {
            return Err(Error::Precondition(format!("base has no element {i}")));
        }
        if tiling.budget.contains(&i) {
            return Err(Error::IndexCollision(i));
        }
    }
    let covers: Vec<RegularOpenSet> = sorted.iter().map(|&i| base.elements[i].clone()).collect();
    let split = lemma1_split(t, &covers)?;
    let mut tiles = Vec::with_capacity(tiling.tiles.len() + split.pieces.len());
    tiles.extend_from_slice(&tiling.tiles[..tile]);
    let mut produced = Vec::new();
    for (pos, piece) in &split.pieces {
        produced.push((sorted[*pos], tiles.len()));
        tiles.push(piece.clone());
    }
    tiles.extend_from_slice(&tiling.tiles[tile + 1..]);
    let mut budget = tiling.budget.clone();
    budget.extend(sorted.iter().copied());
    let step = RefinementStep {
        parent: tile,
        indices: sorted,
        produced,
        arrangement: split.arrangement,
        records: split.records,
    };
    Ok((Tiling { tiles, budget }, step))
}

/// First violations of the tiling invariants on the common arrangement of
/// the tiles and the budget elements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TilingCheck {
    pub faces: usize,
    pub overlap: Option<String>,
    pub uncovered: Option<String>,
    pub budget: Option<String>,
    pub irregular: Option<usize>,
    pub max_order: usize,
}

impl TilingCheck {
    pub fn is_ok(&self) -> bool {
        self.overlap.is_none() && self.uncovered.is_none() && self.budget.is_none() && self.irregular.is_none()
    }
}

struct TilingSink {
    tiles: usize,
    faces: usize,
    max_order: usize,
    overlap: Option<usize>,
    uncovered: Option<usize>,
    budget: Option<usize>,
}

impl Sink for TilingSink {
    fn visit(&mut self, face: usize, hits: &[Hit]) {
        self.faces += 1;
        let mut order = 0;
        let mut members = 0;
        let mut frontiers = 0;
        for h in hits {
            if (h.object as usize) < self.tiles {
                order += 1;
                members += h.member as usize;
            } else if !h.member {
                frontiers += 1;
            }
        }
        self.max_order = self.max_order.max(order);
        if members > 1 && self.overlap.is_none() {
            self.overlap = Some(face);
        }
        if order == 0 && self.uncovered.is_none() {
            self.uncovered = Some(face);
        }
        if order > frontiers + 1 && self.budget.is_none() {
            self.budget = Some(face);
        }
    }
    fn merge(&mut self, later: Self) {
        self.faces += later.faces;
        self.max_order = self.max_order.max(later.max_order);
        self.overlap = self.overlap.or(later.overlap);
        self.uncovered = self.uncovered.or(later.uncovered);
        self.budget = self.budget.or(later.budget);
    }
}

/// Checks disjointness, closure cover, regularity, and the frontier-budget
/// inequality `order − 1 ≤ #{i ∈ budget : f ⊆ Fr B_i}` at every face.
pub fn check_tiling(tiling: &Tiling, base: &BaseFamily) -> Result<TilingCheck> {
    let mut sets = tiling.tiles.clone();
    for &i in &tiling.budget {
        sets.push(base.elements.get(i).ok_or(Error::Precondition(format!("no base element {i}")))?.clone());
    }
    let dim = sets.first().map(|s| s.dim()).unwrap_or(base.dim);
    let sweep = Sweep::new(dim, &sets)?;
    let out = sweep.run(None, || TilingSink {
        tiles: tiling.tiles.len(),
        faces: 0,
        max_order: 0,
        overlap: None,
        uncovered: None,
        budget: None,
    });
    let arr = sweep.arrangement();
    let describe = |f: Option<usize>| f.map(|i| arr.describe_index(i));
    Ok(TilingCheck {
        faces: out.faces,
        overlap: describe(out.overlap),
        uncovered: describe(out.uncovered),
        budget: describe(out.budget),
        irregular: tiling.tiles.iter().position(|t| !t.is_canonical()),
        max_order: out.max_order,
    })
}

/// Face of `arr` containing `x`, for callers holding points.
pub fn face_at(arr: &Arrangement, x: &[Rational]) -> Result<Face> {
    arr.locate(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regular::{ro_disjoint, ro_equal};

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn iv(a: (i64, i64), b: (i64, i64)) -> RegularOpenSet {
        RegularOpenSet::from_box(&OpenBox::new(vec![(r(a.0, a.1), r(b.0, b.1))]).unwrap())
    }

    #[test]
    fn make_base_examples() {
        let b = make_base(1, 8, &r(1, 2), 7).unwrap();
        assert!(check_base_property(&b).is_ok());
        assert!(b.elements.iter().all(|e| e.diameter() < r(1, 2)));
        assert!(matches!(make_base(1, 1, &r(1, 4), 0), Err(Error::Infeasible(_))));
        let x = make_base(2, 30, &r(1, 3), 99).unwrap();
        let y = make_base(2, 30, &r(1, 3), 99).unwrap();
        assert_eq!(x.len(), 25);
        for (a, b) in x.elements.iter().zip(&y.elements) {
            assert_eq!(a.arrangement().all_cuts(), b.arrangement().all_cuts());
        }
        let z = make_base(2, 30, &r(1, 3), 100).unwrap();
        assert!(x.elements.iter().zip(&z.elements).any(|(a, b)| !ro_equal(a, b)));
    }

    #[test]
    fn base_check_examples() {
        let shared = BaseFamily::from_sets(1, 1, vec![iv((0, 1), (1, 2)), iv((1, 2), (1, 1))]).unwrap();
        match check_base_property(&shared) {
            BaseCheck::Violation { face, indices, .. } => {
                assert_eq!(face, "{1/2}");
                assert_eq!(indices, vec![0, 1]);
            }
            other => panic!("expected violation, got {other:?}"),
        }
        let empty = BaseFamily::from_sets(1, 1, vec![]).unwrap();
        assert!(check_base_property(&empty).is_ok());
    }

    #[test]
    fn tower_bases_have_the_frontier_property() {
        for d in 1..=2 {
            for seed in 0..3 {
                let base = make_tower_base(d, &dyadic_schedule(3), seed).unwrap();
                assert!(check_base_property(&base).is_ok(), "d={d} seed={seed}");
                let sizes = nested_grid_sizes(&dyadic_schedule(3));
                assert_eq!(sizes, vec![3, 6, 12]);
                assert_eq!(base.len(), sizes.iter().map(|m| m.pow(d as u32)).sum::<usize>());
                let mut offset = 0;
                for (k, m) in sizes.iter().enumerate() {
                    for i in offset..offset + m.pow(d as u32) {
                        assert!(base.diameter(i) < &Rational::pow2_neg(k as u32 + 1));
                    }
                    offset += m.pow(d as u32);
                }
            }
        }
    }

    #[test]
    fn split_worked_example() {
        let t = RegularOpenSet::top(1);
        let covers = vec![iv((0, 1), (2, 3)), iv((1, 3), (1, 1))];
        let split = lemma1_split(&t, &covers).unwrap();
        assert_eq!(split.pieces.len(), 2);
        assert!(ro_equal(&split.pieces[0].1, &iv((0, 1), (2, 3))));
        assert!(ro_equal(&split.pieces[1].1, &iv((2, 3), (1, 1))));
        let arr = &split.arrangement;
        assert_eq!(split.records.len(), 1);
        let rec = &split.records[0];
        assert_eq!(arr.describe_index(rec.face), "{2/3}");
        assert_eq!(rec.pieces, vec![0, 1]);
        // the non-maximal index 0 has {2/3} on its frontier
        assert_eq!(rec.frontiers, vec![0]);
    }

    #[test]
    fn split_single_cover_and_errors() {
        let t = RegularOpenSet::top(1);
        let split = lemma1_split(&t, &[iv((0, 1), (1, 1))]).unwrap();
        assert_eq!(split.pieces.len(), 1);
        assert!(ro_equal(&split.pieces[0].1, &t));
        match lemma1_split(&t, &[iv((0, 1), (1, 3)), iv((1, 2), (1, 1))]) {
            Err(Error::Uncovered { face, .. }) => assert_eq!(face, "(1/3,1/2)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn split_drops_empty_pieces() {
        let t = iv((0, 1), (1, 3));
        let split = lemma1_split(&t, &[iv((0, 1), (1, 2)), iv((1, 4), (1, 1))]).unwrap();
        assert_eq!(split.pieces.len(), 1);
        assert_eq!(split.pieces[0].0, 0);
    }

    #[test]
    fn refine_examples() {
        let base = BaseFamily::from_sets(1, 1, vec![iv((0, 1), (5, 9)), iv((4, 9), (1, 1)), iv((0, 1), (1, 1))])
            .unwrap();
        let start = Tiling::trivial(1);
        let (two, step) = lemma2_refine(&start, 0, &base, &[1, 0]).unwrap();
        assert_eq!(two.tiles.len(), 2);
        assert_eq!(step.indices, vec![0, 1]);
        assert!(ro_disjoint(&two.tiles[0], &two.tiles[1]).unwrap());
        let check = check_tiling(&two, &base).unwrap();
        assert!(check.is_ok(), "{check:?}");
        assert_eq!(check.max_order, 2);

        let (same, _) = lemma2_refine(&start, 0, &base, &[2]).unwrap();
        assert_eq!(same.tiles.len(), 1);
        assert!(ro_equal(&same.tiles[0], &start.tiles[0]));
        assert_eq!(same.budget.len(), 1);

        assert_eq!(lemma2_refine(&two, 0, &base, &[0]).unwrap_err(), Error::IndexCollision(0));
        assert_eq!(lemma2_refine(&two, 5, &base, &[2]).unwrap_err(), Error::NoSuchTile(5));
    }

    #[test]
    fn tiling_check_sees_missing_budget() {
        let base = BaseFamily::from_sets(1, 1, vec![iv((0, 1), (5, 9)), iv((4, 9), (1, 1))]).unwrap();
        let (two, _) = lemma2_refine(&Tiling::trivial(1), 0, &base, &[0, 1]).unwrap();
        let mut tampered = two.clone();
        tampered.budget.clear();
        let check = check_tiling(&tampered, &base).unwrap();
        assert_eq!(check.budget.as_deref(), Some("{5/9}"));
    }
}
