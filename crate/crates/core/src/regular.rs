//! The Boolean algebra of regular open subsets of the cube.
//!
//! A canonical set is determined by its full-dimensional cells: a face of
//! lower dimension belongs to it exactly when every cell adjacent to the face
//! does. That is `Int cl` of the union of the cells, so canonical sets are
//! regular open by construction.

use std::fmt;
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arrangement::{
    box_face_set, cells_to_faces, dilate, interior_of_cells, transport_cells, Arrangement, Face, FaceSet,
};
use crate::error::{Error, Result};
use crate::geometry::OpenBox;
use crate::rational::Rational;

struct Inner {
    arrangement: Arc<Arrangement>,
    cells: FixedBitSet,
    members: FixedBitSet,
    closure: OnceLock<FixedBitSet>,
    canonical: bool,
}

/// A regular open subset of `X = [0,1]^d` on an arrangement.
///
/// Cloning is cheap; the payload is shared.
#[derive(Clone)]
pub struct RegularOpenSet {
    inner: Arc<Inner>,
}

impl fmt::Debug for RegularOpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.minimized();
        f.debug_struct("RegularOpenSet")
            .field("cuts", &m.arrangement().all_cuts())
            .field("cells", &m.inner.cells.ones().collect::<Vec<_>>())
            .field("canonical", &self.inner.canonical)
            .finish()
    }
}

impl Serialize for RegularOpenSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RegularOpenSet", 2)?;
        st.serialize_field("cuts", self.arrangement().all_cuts())?;
        st.serialize_field("members", &self.inner.members.ones().collect::<Vec<_>>())?;
        st.end()
    }
}

impl RegularOpenSet {
    /// The canonical set whose cells are `cells`.
    pub fn from_cells(arrangement: Arc<Arrangement>, cells: FixedBitSet) -> Self {
        assert_eq!(cells.len(), arrangement.cell_count());
        let members = interior_of_cells(&arrangement, &cells);
        RegularOpenSet {
            inner: Arc::new(Inner {
                arrangement,
                cells,
                members,
                closure: OnceLock::new(),
                canonical: true,
            }),
        }
    }

    /// A set with arbitrary member faces, not necessarily regular open. Only
    /// useful to exercise the checkers.
    pub fn raw(members: FaceSet) -> Self {
        let cells = members.cells();
        let arrangement = members.arrangement().clone();
        let members = members.into_bits();
        let canonical = members == interior_of_cells(&arrangement, &cells);
        RegularOpenSet {
            inner: Arc::new(Inner { arrangement, cells, members, closure: OnceLock::new(), canonical }),
        }
    }

    pub fn empty(arrangement: Arc<Arrangement>) -> Self {
        let n = arrangement.cell_count();
        Self::from_cells(arrangement, FixedBitSet::with_capacity(n))
    }

    pub fn full(arrangement: Arc<Arrangement>) -> Self {
        let n = arrangement.cell_count();
        let mut cells = FixedBitSet::with_capacity(n);
        cells.insert_range(..);
        Self::from_cells(arrangement, cells)
    }

    /// The whole cube on the trivial arrangement.
    pub fn top(dim: usize) -> Self {
        Self::full(Arc::new(Arrangement::unit(dim)))
    }

    pub fn bottom(dim: usize) -> Self {
        Self::empty(Arc::new(Arrangement::unit(dim)))
    }

    /// The regular open set denoted by a box, on the box's own cuts.
    pub fn from_box(b: &OpenBox) -> Self {
        let values = b.intervals().iter().map(|(lo, hi)| vec![lo.clone(), hi.clone()]).collect();
        let arr = Arc::new(Arrangement::from_values(values).expect("box coordinates are valid"));
        Self::from_box_on(&arr, b).expect("box facets are cuts")
    }

    /// The regular open set denoted by a box whose facets are cuts of `arr`.
    pub fn from_box_on(arr: &Arc<Arrangement>, b: &OpenBox) -> Result<Self> {
        let faces = box_face_set(arr, b)?;
        Ok(Self::from_cells(arr.clone(), faces.cells()))
    }

    pub fn arrangement(&self) -> &Arc<Arrangement> {
        &self.inner.arrangement
    }

    pub fn dim(&self) -> usize {
        self.inner.arrangement.dim()
    }

    /// Whether the member faces are exactly `Int cl` of the cells.
    pub fn is_canonical(&self) -> bool {
        self.inner.canonical
    }

    pub fn cells(&self) -> &FixedBitSet {
        &self.inner.cells
    }

    pub fn member_bits(&self) -> &FixedBitSet {
        &self.inner.members
    }

    pub fn members(&self) -> FaceSet {
        FaceSet::from_bits(self.arrangement().clone(), self.inner.members.clone())
    }

    pub fn closure_bits(&self) -> &FixedBitSet {
        self.inner.closure.get_or_init(|| {
            let mut b = self.inner.members.clone();
            dilate(&self.inner.arrangement, &mut b);
            b
        })
    }

    pub fn closure(&self) -> FaceSet {
        FaceSet::from_bits(self.arrangement().clone(), self.closure_bits().clone())
    }

    pub fn contains_face(&self, f: &Face) -> bool {
        self.inner.members.contains(self.arrangement().face_index(f))
    }

    pub fn closure_contains_face(&self, f: &Face) -> bool {
        self.closure_bits().contains(self.arrangement().face_index(f))
    }

    pub fn contains_point(&self, x: &[Rational]) -> Result<bool> {
        let f = self.arrangement().locate(x)?;
        Ok(self.contains_face(&f))
    }

    pub fn closure_contains_point(&self, x: &[Rational]) -> Result<bool> {
        let f = self.arrangement().locate(x)?;
        Ok(self.closure_contains_face(&f))
    }

    pub fn is_empty(&self) -> bool {
        self.inner.cells.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.inner.cells.is_full()
    }

    /// Moves the set to a refining arrangement.
    pub fn on(&self, fine: &Arc<Arrangement>) -> Result<RegularOpenSet> {
        if Arc::ptr_eq(self.arrangement(), fine) {
            return Ok(self.clone());
        }
        if !self.inner.canonical {
            let members = self.members().transport(fine)?;
            return Ok(Self::raw(members));
        }
        let cells = transport_cells(self.arrangement(), fine, &self.inner.cells)?;
        Ok(Self::from_cells(fine.clone(), cells))
    }

    /// Per-axis inclusive position range of the closure, or `None` if empty.
    pub fn bounding_positions(&self) -> Option<Vec<(usize, usize)>> {
        let arr = self.arrangement();
        let d = arr.dim();
        let mut lo = vec![usize::MAX; d];
        let mut hi = vec![0usize; d];
        let mut any = false;
        for c in self.inner.cells.ones() {
            any = true;
            let f = arr.cell_face(c);
            for j in 0..d {
                let p = arr.pos_of(f, j);
                lo[j] = lo[j].min(p - 1);
                hi[j] = hi[j].max(p + 1);
            }
        }
        any.then(|| lo.into_iter().zip(hi).collect())
    }

    /// The smallest closed box containing the set.
    pub fn bounding_box(&self) -> Option<OpenBox> {
        let arr = self.arrangement();
        let pos = self.bounding_positions()?;
        let iv = pos
            .iter()
            .enumerate()
            .map(|(j, &(lo, hi))| (arr.cuts(j)[lo / 2].clone(), arr.cuts(j)[hi / 2].clone()))
            .collect();
        Some(OpenBox::new(iv).expect("nonempty set has a proper bounding box"))
    }

    /// ℓ∞ diameter; zero for the empty set.
    pub fn diameter(&self) -> Rational {
        match self.bounding_box() {
            Some(b) => b.diameter(),
            None => Rational::zero(),
        }
    }

    /// The same set on the coarsest arrangement that represents it.
    pub fn minimized(&self) -> RegularOpenSet {
        let (arr, cells) = minimize(self.arrangement(), &self.inner.cells);
        if arr.all_cuts() == self.arrangement().all_cuts() {
            return self.clone();
        }
        Self::from_cells(Arc::new(arr), cells)
    }

    /// The cells as disjoint closed boxes, merged into maximal runs along the
    /// last axis. Intended for rendering.
    pub fn cell_boxes(&self) -> Vec<OpenBox> {
        let m = self.minimized();
        let arr = m.arrangement();
        let d = arr.dim();
        let last = arr.cuts(d - 1).len() - 1;
        let mut out = Vec::new();
        let cells = m.cells();
        let mut c = 0;
        while c < arr.cell_count() {
            if !cells.contains(c) {
                c += 1;
                continue;
            }
            let start = c;
            while c + 1 < arr.cell_count() && cells.contains(c + 1) && (c + 1) % last != 0 {
                c += 1;
            }
            let f0 = arr.face(arr.cell_face(start));
            let f1 = arr.face(arr.cell_face(c));
            let iv = (0..d)
                .map(|j| {
                    let lo = arr.extent(j, f0.0[j] as usize).0.clone();
                    let hi = arr.extent(j, f1.0[j] as usize).1.clone();
                    (lo, hi)
                })
                .collect();
            out.push(OpenBox::new(iv).expect("cells are proper"));
            c += 1;
        }
        out
    }
}

/// Removes every interior cut across which the cell pattern does not change.
pub(crate) fn minimize(arr: &Arrangement, cells: &FixedBitSet) -> (Arrangement, FixedBitSet) {
    let d = arr.dim();
    let ncells: Vec<usize> = (0..d).map(|j| arr.cuts(j).len() - 1).collect();
    let mut cstride = vec![1usize; d];
    for j in (0..d - 1).rev() {
        cstride[j] = cstride[j + 1] * ncells[j + 1];
    }
    // needed[j][i]: cut i on axis j separates different cell patterns
    let mut needed: Vec<Vec<bool>> = ncells.iter().map(|&n| vec![false; n + 1]).collect();
    for j in 0..d {
        needed[j][0] = true;
        needed[j][ncells[j]] = true;
    }
    for c in 0..arr.cell_count() {
        let here = cells.contains(c);
        for j in 0..d {
            let iv = (c / cstride[j]) % ncells[j];
            if iv > 0 && !needed[j][iv] && cells.contains(c - cstride[j]) != here {
                needed[j][iv] = true;
            }
        }
    }
    let kept: Vec<Vec<Rational>> = (0..d)
        .map(|j| {
            arr.cuts(j)
                .iter()
                .zip(&needed[j])
                .filter(|(_, &k)| k)
                .map(|(v, _)| v.clone())
                .collect()
        })
        .collect();
    let small = Arrangement::new(kept).expect("subset of valid cuts");
    // each kept interval is represented by its first fine interval
    let reps: Vec<Vec<usize>> = (0..d)
        .map(|j| (0..ncells[j]).filter(|&i| needed[j][i]).collect())
        .collect();
    let mut out = FixedBitSet::with_capacity(small.cell_count());
    let sc: Vec<usize> = (0..d).map(|j| reps[j].len()).collect();
    let total = small.cell_count();
    for s in 0..total {
        let mut rem = s;
        let mut fine = 0;
        for j in (0..d).rev() {
            let i = rem % sc[j];
            rem /= sc[j];
            fine += reps[j][i] * cstride[j];
        }
        if cells.contains(fine) {
            out.insert(s);
        }
    }
    (small, out)
}

fn aligned(u: &RegularOpenSet, v: &RegularOpenSet) -> Result<(Arc<Arrangement>, FixedBitSet, FixedBitSet)> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: v.dim() });
    }
    if Arc::ptr_eq(u.arrangement(), v.arrangement()) || u.arrangement() == v.arrangement() {
        return Ok((u.arrangement().clone(), u.cells().clone(), v.cells().clone()));
    }
    let common = Arc::new(u.arrangement().common_refinement(v.arrangement())?);
    let cu = transport_cells(u.arrangement(), &common, u.cells())?;
    let cv = transport_cells(v.arrangement(), &common, v.cells())?;
    Ok((common, cu, cv))
}

fn finish(arr: Arc<Arrangement>, cells: FixedBitSet, minimize_result: bool) -> RegularOpenSet {
    if minimize_result {
        let (small, c) = minimize(&arr, &cells);
        if small.all_cuts() != arr.all_cuts() {
            return RegularOpenSet::from_cells(Arc::new(small), c);
        }
    }
    RegularOpenSet::from_cells(arr, cells)
}

/// `Int cl` of a union of faces, on the same arrangement.
pub fn regularize(open_faces: &FaceSet) -> RegularOpenSet {
    RegularOpenSet::from_cells(open_faces.arrangement().clone(), open_faces.cells())
}

/// `Int cl(U ∪ V)`. Operands on different arrangements are first moved to
/// their common refinement; the result is minimized.
pub fn ro_join(u: &RegularOpenSet, v: &RegularOpenSet) -> Result<RegularOpenSet> {
    let same = Arc::ptr_eq(u.arrangement(), v.arrangement());
    let (arr, mut a, b) = aligned(u, v)?;
    a.union_with(&b);
    Ok(finish(arr, a, !same))
}

/// `U ∩ V`.
pub fn ro_meet(u: &RegularOpenSet, v: &RegularOpenSet) -> Result<RegularOpenSet> {
    let same = Arc::ptr_eq(u.arrangement(), v.arrangement());
    let (arr, mut a, b) = aligned(u, v)?;
    a.intersect_with(&b);
    Ok(finish(arr, a, !same))
}

/// `X ∖ cl U`.
pub fn ro_complement(u: &RegularOpenSet) -> RegularOpenSet {
    let mut cells = u.cells().clone();
    cells.toggle_range(..);
    RegularOpenSet::from_cells(u.arrangement().clone(), cells)
}

/// `U ∧ V′`, i.e. `U ∖ cl V`.
pub fn ro_difference(u: &RegularOpenSet, v: &RegularOpenSet) -> Result<RegularOpenSet> {
    let same = Arc::ptr_eq(u.arrangement(), v.arrangement());
    let (arr, mut a, b) = aligned(u, v)?;
    a.difference_with(&b);
    Ok(finish(arr, a, !same))
}

/// `cl U ∖ U` as a set of faces.
pub fn frontier(u: &RegularOpenSet) -> FaceSet {
    let mut b = u.closure_bits().clone();
    b.difference_with(u.member_bits());
    FaceSet::from_bits(u.arrangement().clone(), b)
}

/// Equality of the denoted sets.
pub fn ro_equal(u: &RegularOpenSet, v: &RegularOpenSet) -> bool {
    match aligned(u, v) {
        Ok((_, a, b)) => a == b,
        Err(_) => false,
    }
}

/// `U ⊆ V`.
pub fn ro_subset(u: &RegularOpenSet, v: &RegularOpenSet) -> Result<bool> {
    let (_, a, b) = aligned(u, v)?;
    Ok(a.is_subset(&b))
}

/// Whether `U ∩ V = ∅`.
pub fn ro_disjoint(u: &RegularOpenSet, v: &RegularOpenSet) -> Result<bool> {
    let (_, a, b) = aligned(u, v)?;
    Ok(a.is_disjoint(&b))
}

/// The full-dimensional cells of `U` as a face set.
pub fn cells_face_set(u: &RegularOpenSet) -> FaceSet {
    FaceSet::from_bits(u.arrangement().clone(), cells_to_faces(u.arrangement(), u.cells()))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::arrangement::build_arrangement;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn iv(a: (i64, i64), b: (i64, i64)) -> RegularOpenSet {
        RegularOpenSet::from_box(&OpenBox::new(vec![(r(a.0, a.1), r(b.0, b.1))]).unwrap())
    }

    fn describe(s: &FaceSet) -> Vec<String> {
        s.faces().map(|f| s.arrangement().describe(&f)).collect()
    }

    #[test]
    fn regularize_heals_interior_point() {
        let a = Arc::new(Arrangement::from_values(vec![vec![r(1, 2)]]).unwrap());
        let s = FaceSet::from_faces(a.clone(), &[Face(vec![1]), Face(vec![3])]).unwrap();
        let u = regularize(&s);
        assert!(u.is_full());
        assert!(ro_equal(&u, &RegularOpenSet::top(1)));
        assert_eq!(u.members().len(), a.face_count());
    }

    #[test]
    fn regularize_keeps_regular_interval() {
        let u = iv((1, 3), (2, 3));
        let again = regularize(&u.members());
        assert!(ro_equal(&u, &again));
        assert_eq!(describe(&u.members()), vec!["(1/3,2/3)"]);
    }

    #[test]
    fn adjacent_squares_gain_shared_edge() {
        let left = OpenBox::from_fractions(&[(0, 1, 1, 2), (1, 4, 3, 4)]).unwrap();
        let right = OpenBox::from_fractions(&[(1, 2, 1, 1), (1, 4, 3, 4)]).unwrap();
        let ba = build_arrangement(&[left, right], 2).unwrap();
        let raw = ba.box_cells[0].union(&ba.box_cells[1]).unwrap();
        let u = regularize(&raw);
        // adjacency rule: the open edge {1/2}×(1/4,3/4) has both neighbours inside
        let edge = ba.arrangement.locate(&[r(1, 2), r(1, 2)]).unwrap();
        assert!(!raw.contains(&edge));
        assert!(u.contains_face(&edge));
        // the other gained faces lie on the boundary of the cube, where the set is relatively open
        let extra: Vec<String> =
            u.members().difference(&raw).unwrap().faces().map(|f| ba.arrangement.describe(&f)).collect();
        assert_eq!(extra, vec!["{0}×(1/4,3/4)", "{1/2}×(1/4,3/4)", "{1}×(1/4,3/4)"]);
    }

    #[test]
    fn operation_examples() {
        let a = iv((0, 1), (1, 2));
        let b = iv((1, 2), (1, 1));
        assert!(ro_equal(&ro_join(&a, &b).unwrap(), &RegularOpenSet::top(1)));
        let m = ro_meet(&iv((0, 1), (2, 3)), &iv((1, 3), (1, 1))).unwrap();
        assert!(ro_equal(&m, &iv((1, 3), (2, 3))));
        let c = ro_complement(&a);
        assert!(ro_equal(&c, &b));
        assert!(c.contains_point(&[Rational::one()]).unwrap());
        assert!(!c.contains_point(&[r(1, 2)]).unwrap());
    }

    #[test]
    fn frontier_examples() {
        assert_eq!(describe(&frontier(&iv((1, 3), (2, 3)))), vec!["{1/3}", "{2/3}"]);
        assert_eq!(describe(&frontier(&iv((0, 1), (1, 2)))), vec!["{1/2}"]);
        assert!(frontier(&RegularOpenSet::bottom(2)).is_empty());
        assert!(frontier(&RegularOpenSet::top(3)).is_empty());
    }

    #[test]
    fn equality_examples() {
        let u = iv((1, 5), (3, 5));
        assert!(ro_equal(&u, &regularize(&u.members())));
        let a = Arc::new(Arrangement::from_values(vec![vec![r(1, 2)]]).unwrap());
        let s = FaceSet::from_faces(a, &[Face(vec![1]), Face(vec![3])]).unwrap();
        assert!(!ro_equal(&iv((0, 1), (1, 2)), &regularize(&s)));
        let j = ro_join(&u, &RegularOpenSet::bottom(1)).unwrap();
        assert!(ro_equal(&j, &u));
        assert!(!ro_equal(&u, &RegularOpenSet::bottom(2)));
    }

    #[test]
    fn raw_sets_report_non_canonical() {
        let u = iv((0, 1), (1, 1));
        let a = Arc::new(Arrangement::from_values(vec![vec![r(1, 2)]]).unwrap());
        let raw = RegularOpenSet::raw(FaceSet::from_faces(a, &[Face(vec![1]), Face(vec![3])]).unwrap());
        assert!(!raw.is_canonical());
        assert!(u.is_canonical());
        assert!(ro_equal(&raw, &u));
    }

    #[test]
    fn minimize_drops_redundant_cuts() {
        let fine = Arc::new(Arrangement::from_values(vec![vec![r(1, 4), r(1, 2), r(3, 4)]]).unwrap());
        let u = iv((1, 4), (3, 4)).on(&fine).unwrap();
        let m = u.minimized();
        assert_eq!(m.arrangement().cuts(0), &[r(0, 1), r(1, 4), r(3, 4), r(1, 1)]);
        assert!(ro_equal(&m, &u));
        assert_eq!(u.diameter(), r(1, 2));
    }

    #[test]
    fn cell_boxes_cover_set() {
        let a = RegularOpenSet::from_box(&OpenBox::from_fractions(&[(0, 1, 1, 2), (0, 1, 1, 2)]).unwrap());
        let b = RegularOpenSet::from_box(&OpenBox::from_fractions(&[(1, 4, 1, 1), (1, 4, 3, 4)]).unwrap());
        let u = ro_join(&a, &b).unwrap();
        let mut back = RegularOpenSet::bottom(2);
        for bx in u.cell_boxes() {
            back = ro_join(&back, &RegularOpenSet::from_box(&bx)).unwrap();
        }
        assert!(ro_equal(&back, &u));
    }

    pub(crate) fn random_set(rng: &mut ChaCha8Rng, d: usize) -> RegularOpenSet {
        let values = (0..d)
            .map(|_| {
                let k = rng.gen_range(0..4);
                (0..k).map(|_| r(rng.gen_range(1..16), 16)).collect()
            })
            .collect();
        let arr = Arc::new(Arrangement::from_values(values).unwrap());
        let mut cells = FixedBitSet::with_capacity(arr.cell_count());
        for c in 0..arr.cell_count() {
            if rng.gen_bool(0.5) {
                cells.insert(c);
            }
        }
        RegularOpenSet::from_cells(arr, cells)
    }

    fn sets() -> impl Strategy<Value = (RegularOpenSet, RegularOpenSet, RegularOpenSet)> {
        (any::<u64>(), 1usize..=2).prop_map(|(seed, d)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (random_set(&mut rng, d), random_set(&mut rng, d), random_set(&mut rng, d))
        })
    }

    proptest! {
        #[test]
        fn boolean_laws((u, v, w) in sets()) {
            let j = |a: &RegularOpenSet, b: &RegularOpenSet| ro_join(a, b).unwrap();
            let m = |a: &RegularOpenSet, b: &RegularOpenSet| ro_meet(a, b).unwrap();
            let d = u.dim();
            prop_assert!(ro_equal(&j(&u, &v), &j(&v, &u)));
            prop_assert!(ro_equal(&m(&u, &v), &m(&v, &u)));
            prop_assert!(ro_equal(&j(&j(&u, &v), &w), &j(&u, &j(&v, &w))));
            prop_assert!(ro_equal(&m(&m(&u, &v), &w), &m(&u, &m(&v, &w))));
            prop_assert!(ro_equal(&m(&u, &j(&v, &w)), &j(&m(&u, &v), &m(&u, &w))));
            prop_assert!(ro_equal(&j(&u, &m(&v, &w)), &m(&j(&u, &v), &j(&u, &w))));
            prop_assert!(ro_equal(&j(&u, &m(&u, &v)), &u));
            prop_assert!(ro_equal(&m(&u, &j(&u, &v)), &u));
            prop_assert!(ro_equal(&j(&u, &ro_complement(&u)), &RegularOpenSet::top(d)));
            prop_assert!(ro_equal(&m(&u, &ro_complement(&u)), &RegularOpenSet::bottom(d)));
            prop_assert!(ro_equal(&ro_complement(&ro_complement(&u)), &u));
            prop_assert_eq!(frontier(&u).into_bits(), frontier(&ro_complement(&u)).into_bits());
        }

        #[test]
        fn members_are_interior_of_closure(seed in any::<u64>(), d in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_set(&mut rng, d);
            let arr = u.arrangement().clone();
            let cl = u.closure();
            for f in arr.faces() {
                // interior of the closure: every face having f in its closure is in cl U
                let mut all = true;
                for h in arr.faces() {
                    if crate::arrangement::face_le(&f, &h) && !cl.contains(&h) {
                        all = false;
                    }
                }
                prop_assert_eq!(u.contains_face(&f), all);
            }
            prop_assert!(ro_equal(&regularize(&u.members()), &u));
        }

        #[test]
        fn minimized_form_is_unique(seed in any::<u64>(), d in 1usize..=2) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_set(&mut rng, d);
            let v = random_set(&mut rng, d);
            let fine = Arc::new(u.arrangement().common_refinement(v.arrangement()).unwrap());
            let a = u.minimized();
            let b = u.on(&fine).unwrap().minimized();
            prop_assert_eq!(a.arrangement().all_cuts(), b.arrangement().all_cuts());
            prop_assert_eq!(a.cells(), b.cells());
        }
    }
}
