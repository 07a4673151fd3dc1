//! Towers of tilings: `𝒯_0 = {X}`, each level splitting every tile of the
//! previous one along fresh, smaller base elements.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use log::debug;
use rayon::prelude::*;

use crate::arrangement::{Arrangement, FaceSet};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::regular::RegularOpenSet;
use crate::tiling::{check_base_property, lemma1_split, BaseCheck, BaseFamily, RefinementStep, Tiling};

#[derive(Clone, Debug)]
pub struct Tower {
    pub dim: usize,
    /// Frontier bound of the base the tower was built from.
    pub n: usize,
    /// `schedule[k]` bounds the diameters of level-`k` tiles for `k ≥ 1`.
    pub schedule: Vec<Rational>,
    pub levels: Vec<Tiling>,
    /// `parents[k][i]`: the level-`(k-1)` tile containing tile `i` of level
    /// `k`. Empty for level 0.
    pub parents: Vec<Vec<usize>>,
    /// Base index each tile was cut from; `None` for `X`.
    pub sources: Vec<Vec<Option<usize>>>,
    /// `steps[k]`: the splits that produced level `k`. Empty for level 0.
    pub steps: Vec<Vec<RefinementStep>>,
}

impl Tower {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Common refinement of all tiles of all levels.
    pub fn arrangement(&self) -> Result<Arc<Arrangement>> {
        let mut values: Vec<Vec<Rational>> = vec![Vec::new(); self.dim];
        for level in &self.levels {
            for t in &level.tiles {
                for (j, v) in values.iter_mut().enumerate() {
                    v.extend_from_slice(t.arrangement().cuts(j));
                }
            }
        }
        Ok(Arc::new(Arrangement::from_values(values)?))
    }

    pub fn tile(&self, level: usize, index: usize) -> Result<&RegularOpenSet> {
        self.levels
            .get(level)
            .and_then(|l| l.tiles.get(index))
            .ok_or(Error::NoSuchTile(index))
    }
}

/// The closed set still to be covered, as faces of a growing arrangement.
struct Remainder {
    arrangement: Arc<Arrangement>,
    bits: FixedBitSet,
}

impl Remainder {
    fn new(t: &RegularOpenSet) -> Self {
        Remainder { arrangement: t.arrangement().clone(), bits: t.closure_bits().clone() }
    }

    fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    fn align(&self, b: &RegularOpenSet) -> Result<(Arc<Arrangement>, FixedBitSet, FixedBitSet)> {
        let common = if b.arrangement().refines(&self.arrangement) && self.arrangement.refines(b.arrangement()) {
            self.arrangement.clone()
        } else {
            Arc::new(self.arrangement.common_refinement(b.arrangement())?)
        };
        let here = FaceSet::from_bits(self.arrangement.clone(), self.bits.clone()).transport(&common)?;
        let members = b.on(&common)?.member_bits().clone();
        Ok((common, here.into_bits(), members))
    }

    fn meets(&self, b: &RegularOpenSet) -> Result<bool> {
        let (_, here, members) = self.align(b)?;
        Ok(!here.is_disjoint(&members))
    }

    fn subtract(&mut self, b: &RegularOpenSet) -> Result<()> {
        let (common, mut here, members) = self.align(b)?;
        here.difference_with(&members);
        self.arrangement = common;
        self.bits = here;
        Ok(())
    }

    fn witness(&self) -> String {
        let arr = &self.arrangement;
        let best = self
            .bits
            .ones()
            .max_by_key(|&i| (arr.face(i).dim(), std::cmp::Reverse(i)))
            .expect("nonempty");
        let f = arr.face(best);
        format!("{} at {:?}", arr.describe(&f), arr.centroid(&f))
    }
}

/// Greedy choice of `F_T`: first the unused eligible elements centred in
/// `cl T`, in index order, until `cl T` is covered; then any unused eligible
/// element meeting what is left, again in index order. The result is sorted.
pub fn select_cover(
    t: &RegularOpenSet,
    base: &BaseFamily,
    eligible: &[usize],
    used: &FixedBitSet,
    level: usize,
    tile: usize,
) -> Result<Vec<usize>> {
    let bbox = t.bounding_box().ok_or_else(|| Error::Precondition(format!("tile {tile} is empty")))?;
    let candidates: Vec<usize> = eligible
        .iter()
        .copied()
        .filter(|&i| !used.contains(i))
        .filter(|&i| base.bounding_box(i).is_some_and(|b| b.closures_meet(&bbox)))
        .collect();
    let mut rem = Remainder::new(t);
    let mut chosen = Vec::new();
    for &i in &candidates {
        if rem.is_empty() {
            break;
        }
        if t.closure_contains_point(base.centre(i))? {
            rem.subtract(&base.elements[i])?;
            chosen.push(i);
        }
    }
    for &i in &candidates {
        if rem.is_empty() {
            break;
        }
        if !chosen.contains(&i) && rem.meets(&base.elements[i])? {
            rem.subtract(&base.elements[i])?;
            chosen.push(i);
        }
    }
    if !rem.is_empty() {
        return Err(Error::BaseExhausted { level, tile, point: rem.witness() });
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Builds `𝒯_0, …, 𝒯_K` after checking the base's frontier property.
pub fn build_tower(base: &BaseFamily, depth: usize, schedule: &[Rational]) -> Result<Tower> {
    if let BaseCheck::Violation { point, indices, .. } = check_base_property(base) {
        return Err(Error::BaseProperty { point: format!("{point:?}"), indices });
    }
    build_tower_trusted(base, depth, schedule)
}

/// As [`build_tower`], without re-checking the base.
pub fn build_tower_trusted(base: &BaseFamily, depth: usize, schedule: &[Rational]) -> Result<Tower> {
    if schedule.len() < depth + 1 {
        return Err(Error::Precondition(format!(
            "schedule has {} entries, depth {depth} needs {}",
            schedule.len(),
            depth + 1
        )));
    }
    let d = base.dim;
    let mut levels = vec![Tiling::trivial(d)];
    let mut parents = vec![Vec::new()];
    let mut sources = vec![vec![None]];
    let mut steps = vec![Vec::new()];
    let mut used = FixedBitSet::with_capacity(base.len());
    for k in 1..=depth {
        let bound = &schedule[k];
        let eligible: Vec<usize> = (0..base.len()).filter(|&i| base.diameter(i) < bound).collect();
        let prev = &levels[k - 1];
        // index allocation is sequential; the splits themselves are independent
        let mut choices = Vec::with_capacity(prev.tiles.len());
        for (ti, t) in prev.tiles.iter().enumerate() {
            let f = select_cover(t, base, &eligible, &used, k, ti)?;
            for &i in &f {
                used.insert(i);
            }
            choices.push(f);
        }
        let splits: Vec<_> = prev
            .tiles
            .par_iter()
            .zip(choices.par_iter())
            .map(|(t, f)| {
                let covers: Vec<RegularOpenSet> = f.iter().map(|&i| base.elements[i].clone()).collect();
                lemma1_split(t, &covers)
            })
            .collect::<Result<_>>()?;
        let mut tiles = Vec::new();
        let mut par = Vec::new();
        let mut src = Vec::new();
        let mut level_steps = Vec::new();
        let mut budget = prev.budget.clone();
        for (ti, (split, f)) in splits.into_iter().zip(choices).enumerate() {
            let mut produced = Vec::new();
            for (pos, piece) in split.pieces {
                produced.push((f[pos], tiles.len()));
                tiles.push(piece);
                par.push(ti);
                src.push(Some(f[pos]));
            }
            budget.extend(f.iter().copied());
            level_steps.push(RefinementStep {
                parent: ti,
                indices: f,
                produced,
                arrangement: split.arrangement,
                records: split.records,
            });
        }
        debug!("level {k}: {} tiles, budget {}", tiles.len(), budget.len());
        levels.push(Tiling { tiles, budget });
        parents.push(par);
        sources.push(src);
        steps.push(level_steps);
    }
    Ok(Tower { dim: d, n: base.n, schedule: schedule[..=depth].to_vec(), levels, parents, sources, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::OpenBox;
    use crate::regular::{ro_disjoint, ro_subset};
    use crate::tiling::{check_tiling, dyadic_schedule, make_tower_base};

    #[test]
    fn depth_zero_is_the_cube() {
        let base = make_tower_base(2, &dyadic_schedule(2), 1).unwrap();
        let t = build_tower(&base, 0, &dyadic_schedule(0)).unwrap();
        assert_eq!(t.levels.len(), 1);
        assert_eq!(t.levels[0].tiles.len(), 1);
        assert!(t.levels[0].tiles[0].is_full());
    }

    #[test]
    fn one_dimensional_tower() {
        let schedule = dyadic_schedule(3);
        let base = make_tower_base(1, &schedule, 3).unwrap();
        let t = build_tower(&base, 3, &schedule).unwrap();
        assert_eq!(t.levels.len(), 4);
        let counts: Vec<usize> = t.levels.iter().map(|l| l.tiles.len()).collect();
        assert_eq!(counts, vec![1, 3, 6, 12]);
        for k in 1..=3 {
            for (i, tile) in t.levels[k].tiles.iter().enumerate() {
                assert!(tile.diameter() < schedule[k]);
                let parent = &t.levels[k - 1].tiles[t.parents[k][i]];
                assert!(ro_subset(tile, parent).unwrap());
            }
            let check = check_tiling(&t.levels[k], &base).unwrap();
            assert!(check.is_ok(), "{check:?}");
            assert!(check.max_order <= 2);
        }
        // fresh indices are pairwise disjoint across all steps
        let mut seen = std::collections::BTreeSet::new();
        for level in &t.steps {
            for s in level {
                for &i in &s.indices {
                    assert!(seen.insert(i));
                }
            }
        }
    }

    #[test]
    fn two_dimensional_levels_are_tilings() {
        let schedule = dyadic_schedule(2);
        let base = make_tower_base(2, &schedule, 5).unwrap();
        let t = build_tower(&base, 2, &schedule).unwrap();
        assert_eq!(t.levels[2].tiles.len(), 36);
        let tiles = &t.levels[2].tiles;
        for i in 0..tiles.len() {
            for j in i + 1..tiles.len() {
                assert!(ro_disjoint(&tiles[i], &tiles[j]).unwrap());
            }
        }
        let check = check_tiling(&t.levels[2], &base).unwrap();
        assert!(check.is_ok() && check.max_order <= 3, "{check:?}");
    }

    #[test]
    fn bad_base_is_rejected_before_construction() {
        let halves = [
            OpenBox::from_fractions(&[(0, 1, 1, 2)]).unwrap(),
            OpenBox::from_fractions(&[(1, 2, 1, 1)]).unwrap(),
        ];
        let base = BaseFamily::from_sets(1, 0, halves.iter().map(RegularOpenSet::from_box).collect()).unwrap();
        assert!(matches!(build_tower(&base, 1, &dyadic_schedule(1)), Err(Error::BaseProperty { .. })));
    }

    #[test]
    fn small_base_is_exhausted() {
        let schedule = dyadic_schedule(3);
        let base = make_tower_base(1, &schedule[..3], 0).unwrap();
        match build_tower(&base, 3, &schedule) {
            Err(Error::BaseExhausted { level, tile, .. }) => {
                assert_eq!(level, 3);
                assert_eq!(tile, 0);
            }
            other => panic!("{other:?}"),
        }
    }
}
