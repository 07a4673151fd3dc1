//! Cell arrangements of the unit cube induced by axis-parallel cuts.
//!
//! Each axis carries a sorted cut list `0 = c_0 < … < c_{m-1} = 1`. A position
//! `p` on that axis is either the cut `c_{p/2}` (even `p`) or the open interval
//! `(c_{(p-1)/2}, c_{(p+1)/2})` (odd `p`). A face is one position per axis, and
//! faces are numbered row-major with axis 0 outermost.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::geometry::OpenBox;
use crate::rational::Rational;

/// Per-axis tag of a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisTag {
    /// A single cut value, by cut index.
    Cut(usize),
    /// The open interval between cut `i` and cut `i + 1`.
    Interval(usize),
}

/// A face given by one position per axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face(pub Vec<u32>);

impl Face {
    pub fn dim(&self) -> usize {
        self.0.iter().filter(|&&p| p % 2 == 1).count()
    }

    pub fn tag(&self, axis: usize) -> AxisTag {
        let p = self.0[axis] as usize;
        if p % 2 == 0 {
            AxisTag::Cut(p / 2)
        } else {
            AxisTag::Interval(p / 2)
        }
    }

    pub fn from_tags(tags: &[AxisTag]) -> Face {
        Face(
            tags.iter()
                .map(|t| match *t {
                    AxisTag::Cut(i) => 2 * i as u32,
                    AxisTag::Interval(i) => 2 * i as u32 + 1,
                })
                .collect(),
        )
    }
}

/// `g` lies in the closure of `h` iff per axis the positions agree, or `h`
/// is an interval and `g` one of its endpoints.
pub fn face_le(g: &Face, h: &Face) -> bool {
    g.0.iter()
        .zip(&h.0)
        .all(|(&a, &b)| a == b || (b % 2 == 1 && a.abs_diff(b) == 1))
}

#[derive(Clone, PartialEq, Eq)]
pub struct Arrangement {
    cuts: Vec<Vec<Rational>>,
    npos: Vec<usize>,
    stride: Vec<usize>,
    cell_stride: Vec<usize>,
    faces: usize,
    cells: usize,
}

impl fmt::Debug for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Arrangement")
            .field("cuts", &self.cuts)
            .field("faces", &self.faces)
            .finish()
    }
}

impl Arrangement {
    /// Validates that every axis is strictly increasing from 0 to 1.
    pub fn new(cuts: Vec<Vec<Rational>>) -> Result<Self> {
        if cuts.is_empty() {
            return Err(Error::InvalidCuts("no axes".into()));
        }
        for (j, axis) in cuts.iter().enumerate() {
            if axis.len() < 2 || !axis[0].is_zero() || axis[axis.len() - 1] != Rational::one() {
                return Err(Error::InvalidCuts(format!("axis {j} must run from 0 to 1")));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidCuts(format!("axis {j} is not strictly increasing")));
            }
        }
        let d = cuts.len();
        let npos: Vec<usize> = cuts.iter().map(|c| 2 * c.len() - 1).collect();
        let mut stride = vec![1usize; d];
        let mut cell_stride = vec![1usize; d];
        for j in (0..d - 1).rev() {
            stride[j] = stride[j + 1] * npos[j + 1];
            cell_stride[j] = cell_stride[j + 1] * (cuts[j + 1].len() - 1);
        }
        let faces = stride[0] * npos[0];
        let cells = cell_stride[0] * (cuts[0].len() - 1);
        Ok(Arrangement { cuts, npos, stride, cell_stride, faces, cells })
    }

    /// Sorts and deduplicates arbitrary cut values, adding 0 and 1.
    pub fn from_values(values: Vec<Vec<Rational>>) -> Result<Self> {
        let mut cuts = Vec::with_capacity(values.len());
        for mut axis in values {
            for v in &axis {
                if v.is_negative() || *v > Rational::one() {
                    return Err(Error::CoordinateOutOfRange(v.to_string()));
                }
            }
            axis.push(Rational::zero());
            axis.push(Rational::one());
            axis.sort();
            axis.dedup();
            cuts.push(axis);
        }
        Self::new(cuts)
    }

    /// The trivial arrangement with cuts `{0, 1}` on each axis.
    pub fn unit(dim: usize) -> Self {
        Self::new(vec![vec![Rational::zero(), Rational::one()]; dim]).expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.cuts.len()
    }

    pub fn cuts(&self, axis: usize) -> &[Rational] {
        &self.cuts[axis]
    }

    pub fn all_cuts(&self) -> &[Vec<Rational>] {
        &self.cuts
    }

    /// Number of positions `2·#cuts − 1` on an axis.
    pub fn positions(&self, axis: usize) -> usize {
        self.npos[axis]
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.stride[axis]
    }

    pub fn face_count(&self) -> usize {
        self.faces
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }

    pub fn face_index(&self, f: &Face) -> usize {
        f.0.iter().zip(&self.stride).map(|(&p, &s)| p as usize * s).sum()
    }

    pub fn face(&self, mut index: usize) -> Face {
        let mut pos = vec![0u32; self.dim()];
        for j in 0..self.dim() {
            pos[j] = (index / self.stride[j]) as u32;
            index %= self.stride[j];
        }
        Face(pos)
    }

    #[inline]
    pub fn pos_of(&self, index: usize, axis: usize) -> usize {
        (index / self.stride[axis]) % self.npos[axis]
    }

    pub fn check_face(&self, f: &Face) -> Result<()> {
        if f.0.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: f.0.len() });
        }
        if f.0.iter().zip(&self.npos).any(|(&p, &n)| p as usize >= n) {
            return Err(Error::ArrangementMismatch);
        }
        Ok(())
    }

    /// Face index of the full-dimensional cell with the given flat cell index.
    #[inline]
    pub fn cell_face(&self, mut cell: usize) -> usize {
        let mut idx = 0;
        for j in 0..self.dim() {
            let iv = cell / self.cell_stride[j];
            cell %= self.cell_stride[j];
            idx += (2 * iv + 1) * self.stride[j];
        }
        idx
    }

    /// Flat cell index of a full-dimensional face, or `None` for lower faces.
    pub fn face_cell(&self, index: usize) -> Option<usize> {
        let mut cell = 0;
        for j in 0..self.dim() {
            let p = self.pos_of(index, j);
            if p % 2 == 0 {
                return None;
            }
            cell += (p / 2) * self.cell_stride[j];
        }
        Some(cell)
    }

    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        (0..self.faces).map(move |i| self.face(i))
    }

    /// A representative point of a face: cut values and interval midpoints.
    pub fn centroid(&self, f: &Face) -> Vec<Rational> {
        (0..self.dim()).map(|j| self.coordinate(j, f.0[j] as usize)).collect()
    }

    /// Centroid coordinate of a single axis position.
    pub fn coordinate(&self, axis: usize, pos: usize) -> Rational {
        let c = &self.cuts[axis];
        if pos % 2 == 0 {
            c[pos / 2].clone()
        } else {
            c[pos / 2].midpoint(&c[pos / 2 + 1])
        }
    }

    /// Exact bounds `(lo, hi)` of a position; equal for cuts.
    pub fn extent(&self, axis: usize, pos: usize) -> (&Rational, &Rational) {
        let c = &self.cuts[axis];
        if pos % 2 == 0 {
            (&c[pos / 2], &c[pos / 2])
        } else {
            (&c[pos / 2], &c[pos / 2 + 1])
        }
    }

    /// Position on one axis containing the coordinate `v`.
    pub fn locate_coord(&self, axis: usize, v: &Rational) -> Result<usize> {
        let c = &self.cuts[axis];
        if v.is_negative() || *v > Rational::one() {
            return Err(Error::CoordinateOutOfRange(v.to_string()));
        }
        Ok(match c.binary_search(v) {
            Ok(i) => 2 * i,
            Err(i) => 2 * i - 1,
        })
    }

    /// The face containing a point of `[0,1]^d`.
    pub fn locate(&self, x: &[Rational]) -> Result<Face> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        let mut pos = Vec::with_capacity(x.len());
        for (j, v) in x.iter().enumerate() {
            pos.push(self.locate_coord(j, v)? as u32);
        }
        Ok(Face(pos))
    }

    /// Human-readable rendering such as `(1/3,2/3)×{1/2}`.
    pub fn describe(&self, f: &Face) -> String {
        let parts: Vec<String> = (0..self.dim())
            .map(|j| match f.tag(j) {
                AxisTag::Cut(i) => format!("{{{}}}", short(&self.cuts[j][i])),
                AxisTag::Interval(i) => {
                    format!("({},{})", short(&self.cuts[j][i]), short(&self.cuts[j][i + 1]))
                }
            })
            .collect();
        parts.join("×")
    }

    pub fn describe_index(&self, index: usize) -> String {
        self.describe(&self.face(index))
    }

    /// The arrangement whose cuts are the union of both.
    pub fn common_refinement(&self, other: &Arrangement) -> Result<Arrangement> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let cuts = self
            .cuts
            .iter()
            .zip(&other.cuts)
            .map(|(a, b)| merge_sorted(a, b))
            .collect();
        Arrangement::new(cuts)
    }

    pub fn refines(&self, coarse: &Arrangement) -> bool {
        self.dim() == coarse.dim()
            && self
                .cuts
                .iter()
                .zip(&coarse.cuts)
                .all(|(f, c)| c.iter().all(|v| f.binary_search(v).is_ok()))
    }

    /// For each axis, the map from positions of `fine` to positions of
    /// `self`. Requires `fine` to refine `self`.
    pub fn position_maps(&self, fine: &Arrangement) -> Result<Vec<Vec<u32>>> {
        if !fine.refines(self) {
            return Err(Error::ArrangementMismatch);
        }
        Ok((0..self.dim())
            .map(|j| position_map(&self.cuts[j], &fine.cuts[j]))
            .collect())
    }

    /// Positions on `axis` adjacent to `pos` together with `pos` itself: the
    /// star of a cut contains its two neighbouring intervals.
    pub fn star_positions(&self, axis: usize, pos: usize) -> impl Iterator<Item = usize> {
        let n = self.npos[axis];
        let (lo, hi) = if pos % 2 == 0 {
            (pos.saturating_sub(1), (pos + 1).min(n - 1))
        } else {
            (pos, pos)
        };
        lo..=hi
    }

    /// Positions on `axis` in the closure of `pos`.
    pub fn closure_positions(&self, axis: usize, pos: usize) -> impl Iterator<Item = usize> {
        let _ = axis;
        if pos % 2 == 1 {
            (pos - 1)..=(pos + 1)
        } else {
            pos..=pos
        }
    }
}

/// `p/q`, or just `p` for integers.
pub(crate) fn short(v: &Rational) -> String {
    let s = v.to_string();
    s.strip_suffix("/1").map(str::to_owned).unwrap_or(s)
}

fn merge_sorted(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut k) = (0, 0);
    while i < a.len() || k < b.len() {
        if k == b.len() || (i < a.len() && a[i] < b[k]) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[k] < a[i] {
            out.push(b[k].clone());
            k += 1;
        } else {
            out.push(a[i].clone());
            i += 1;
            k += 1;
        }
    }
    out
}

/// Position map from a fine cut list to a coarse one it refines.
pub(crate) fn position_map(coarse: &[Rational], fine: &[Rational]) -> Vec<u32> {
    let mut map = Vec::with_capacity(2 * fine.len() - 1);
    let mut c = 0usize;
    for (i, v) in fine.iter().enumerate() {
        while coarse[c] < *v {
            c += 1;
        }
        // coarse[c] >= v
        if coarse[c] == *v {
            map.push(2 * c as u32);
        } else {
            map.push(2 * c as u32 - 1);
        }
        if i + 1 < fine.len() {
            // open interval (v, next): inside coarse interval unless it starts at a coarse cut
            let p = if coarse[c] == *v { 2 * c as u32 + 1 } else { 2 * c as u32 - 1 };
            map.push(p);
        }
    }
    map
}

/// Applies the star/closure dilation: every face becomes set when a face in
/// its closure-star (a face it bounds, or itself) is set.
///
/// After the passes, bit `g` is the OR of the input over all faces `h` with
/// `g ⊆ cl h`.
pub(crate) fn dilate(arr: &Arrangement, bits: &mut FixedBitSet) {
    for j in 0..arr.dim() {
        let s = arr.stride[j];
        let n = arr.npos[j];
        let block = n * s;
        let outer = arr.faces / block;
        for o in 0..outer {
            let base = o * block;
            for p in (0..n).step_by(2) {
                let row = base + p * s;
                for r in 0..s {
                    let idx = row + r;
                    if bits.contains(idx) {
                        continue;
                    }
                    let v = (p > 0 && bits.contains(idx - s)) || (p + 1 < n && bits.contains(idx + s));
                    if v {
                        bits.insert(idx);
                    }
                }
            }
        }
    }
}

/// Lifts a cell bitset to the face bitset containing exactly those cells.
pub(crate) fn cells_to_faces(arr: &Arrangement, cells: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(arr.faces);
    for c in cells.ones() {
        out.insert(arr.cell_face(c));
    }
    out
}

/// Members of the regular open set with the given cells: the faces all of
/// whose adjacent cells are included.
pub(crate) fn interior_of_cells(arr: &Arrangement, cells: &FixedBitSet) -> FixedBitSet {
    let mut outside = cells.clone();
    outside.toggle_range(..);
    let mut bad = cells_to_faces(arr, &outside);
    dilate(arr, &mut bad);
    bad.toggle_range(..);
    bad
}

/// Transports a cell bitset to a refining arrangement.
pub(crate) fn transport_cells(
    coarse: &Arrangement,
    fine: &Arrangement,
    cells: &FixedBitSet,
) -> Result<FixedBitSet> {
    if coarse == fine {
        return Ok(cells.clone());
    }
    let maps = coarse.position_maps(fine)?;
    let d = fine.dim();
    // per-axis: fine interval index -> coarse interval index
    let imaps: Vec<Vec<usize>> = maps
        .iter()
        .map(|m| (0..m.len() / 2).map(|i| (m[2 * i + 1] / 2) as usize).collect())
        .collect();
    let mut out = FixedBitSet::with_capacity(fine.cells);
    let mut idx = vec![0usize; d];
    for c in 0..fine.cells {
        let mut rem = c;
        let mut coarse_cell = 0;
        for j in 0..d {
            idx[j] = rem / fine.cell_stride[j];
            rem %= fine.cell_stride[j];
            coarse_cell += imaps[j][idx[j]] * coarse.cell_stride[j];
        }
        if cells.contains(coarse_cell) {
            out.insert(c);
        }
    }
    Ok(out)
}

/// A set of faces on a fixed arrangement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceSet {
    arrangement: Arc<Arrangement>,
    bits: FixedBitSet,
}

impl FaceSet {
    pub fn empty(arrangement: Arc<Arrangement>) -> Self {
        let bits = FixedBitSet::with_capacity(arrangement.face_count());
        FaceSet { arrangement, bits }
    }

    pub fn from_faces<'a>(
        arrangement: Arc<Arrangement>,
        faces: impl IntoIterator<Item = &'a Face>,
    ) -> Result<Self> {
        let mut s = Self::empty(arrangement);
        for f in faces {
            s.arrangement.check_face(f)?;
            let i = s.arrangement.face_index(f);
            s.bits.insert(i);
        }
        Ok(s)
    }

    pub fn from_bits(arrangement: Arc<Arrangement>, bits: FixedBitSet) -> Self {
        assert_eq!(bits.len(), arrangement.face_count());
        FaceSet { arrangement, bits }
    }

    pub fn arrangement(&self) -> &Arc<Arrangement> {
        &self.arrangement
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn into_bits(self) -> FixedBitSet {
        self.bits
    }

    pub fn contains(&self, f: &Face) -> bool {
        self.bits.contains(self.arrangement.face_index(f))
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn insert(&mut self, f: &Face) {
        let i = self.arrangement.face_index(f);
        self.bits.insert(i);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn faces(&self) -> impl Iterator<Item = Face> + '_ {
        self.bits.ones().map(move |i| self.arrangement.face(i))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    /// Full-dimensional member faces, as a cell bitset.
    pub fn cells(&self) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.arrangement.cell_count());
        for i in self.bits.ones() {
            if let Some(c) = self.arrangement.face_cell(i) {
                out.insert(c);
            }
        }
        out
    }

    /// The closure of the union of the faces.
    pub fn closure(&self) -> FaceSet {
        let mut bits = self.bits.clone();
        dilate(&self.arrangement, &mut bits);
        FaceSet { arrangement: self.arrangement.clone(), bits }
    }

    fn same(&self, other: &FaceSet) -> Result<()> {
        if Arc::ptr_eq(&self.arrangement, &other.arrangement) || self.arrangement == other.arrangement {
            Ok(())
        } else {
            Err(Error::ArrangementMismatch)
        }
    }

    pub fn union(&self, other: &FaceSet) -> Result<FaceSet> {
        self.same(other)?;
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Ok(FaceSet { arrangement: self.arrangement.clone(), bits })
    }

    pub fn intersection(&self, other: &FaceSet) -> Result<FaceSet> {
        self.same(other)?;
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Ok(FaceSet { arrangement: self.arrangement.clone(), bits })
    }

    pub fn difference(&self, other: &FaceSet) -> Result<FaceSet> {
        self.same(other)?;
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Ok(FaceSet { arrangement: self.arrangement.clone(), bits })
    }

    pub fn is_subset(&self, other: &FaceSet) -> Result<bool> {
        self.same(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    /// Moves the set to a refining arrangement; each fine face inherits the
    /// membership of the coarse face containing it.
    pub fn transport(&self, fine: &Arc<Arrangement>) -> Result<FaceSet> {
        if Arc::ptr_eq(&self.arrangement, fine) || *self.arrangement == **fine {
            return Ok(FaceSet { arrangement: fine.clone(), bits: self.bits.clone() });
        }
        let maps = self.arrangement.position_maps(fine)?;
        let mut bits = FixedBitSet::with_capacity(fine.face_count());
        let d = fine.dim();
        for i in 0..fine.face_count() {
            let mut ci = 0;
            for (j, m) in maps.iter().enumerate().take(d) {
                ci += m[fine.pos_of(i, j)] as usize * self.arrangement.stride(j);
            }
            if self.bits.contains(ci) {
                bits.insert(i);
            }
        }
        Ok(FaceSet { arrangement: fine.clone(), bits })
    }
}

/// Decides whether `f` lies in the closure of the union of `s`.
pub fn face_in_closure(f: &Face, s: &FaceSet) -> Result<bool> {
    let arr = s.arrangement();
    arr.check_face(f)?;
    let mut found = false;
    let mut probe = f.clone();
    star_walk(arr, f, 0, &mut probe, &mut |h| {
        if s.contains(h) {
            found = true;
        }
    });
    Ok(found)
}

fn star_walk(arr: &Arrangement, f: &Face, axis: usize, cur: &mut Face, visit: &mut impl FnMut(&Face)) {
    if axis == arr.dim() {
        visit(cur);
        return;
    }
    for p in arr.star_positions(axis, f.0[axis] as usize) {
        cur.0[axis] = p as u32;
        star_walk(arr, f, axis + 1, cur, visit);
    }
    cur.0[axis] = f.0[axis];
}

/// An arrangement together with the cell sets of the boxes that induced it.
#[derive(Clone, Debug)]
pub struct BoxArrangement {
    pub arrangement: Arc<Arrangement>,
    pub box_cells: Vec<FaceSet>,
}

/// Builds the arrangement of all facet coordinates of `boxes` and records,
/// for each box, the full-dimensional faces it covers.
pub fn build_arrangement(boxes: &[OpenBox], d: usize) -> Result<BoxArrangement> {
    if d == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let mut values = vec![Vec::new(); d];
    for b in boxes {
        if b.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: b.dim() });
        }
        for (j, (lo, hi)) in b.intervals().iter().enumerate() {
            values[j].push(lo.clone());
            values[j].push(hi.clone());
        }
    }
    let arrangement = Arc::new(Arrangement::from_values(values)?);
    let box_cells = boxes.iter().map(|b| box_face_set(&arrangement, b)).collect::<Result<_>>()?;
    Ok(BoxArrangement { arrangement, box_cells })
}

/// Position ranges `[lo_pos, hi_pos]` (odd positions) a box spans per axis.
pub(crate) fn box_position_ranges(arr: &Arrangement, b: &OpenBox) -> Result<Vec<(usize, usize)>> {
    if b.dim() != arr.dim() {
        return Err(Error::DimensionMismatch { expected: arr.dim(), found: b.dim() });
    }
    (0..arr.dim())
        .map(|j| {
            let c = arr.cuts(j);
            let lo = c.binary_search(b.lo(j)).map_err(|_| Error::ArrangementMismatch)?;
            let hi = c.binary_search(b.hi(j)).map_err(|_| Error::ArrangementMismatch)?;
            Ok((2 * lo + 1, 2 * hi - 1))
        })
        .collect()
}

/// Cells of a box whose facets are cuts of `arr`, as a face set.
pub fn box_face_set(arr: &Arc<Arrangement>, b: &OpenBox) -> Result<FaceSet> {
    let ranges = box_position_ranges(arr, b)?;
    let mut set = FaceSet::empty(arr.clone());
    let mut cur = Face(ranges.iter().map(|r| r.0 as u32).collect());
    fill_cells(&ranges, 0, &mut cur, &mut |f| set.insert(f));
    Ok(set)
}

fn fill_cells(ranges: &[(usize, usize)], axis: usize, cur: &mut Face, visit: &mut impl FnMut(&Face)) {
    if axis == ranges.len() {
        visit(cur);
        return;
    }
    let (lo, hi) = ranges[axis];
    for p in (lo..=hi).step_by(2) {
        cur.0[axis] = p as u32;
        fill_cells(ranges, axis + 1, cur, visit);
    }
}
