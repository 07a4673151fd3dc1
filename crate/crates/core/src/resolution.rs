//! The depth-`K` preimage: chains of nested tiles, the map to the cube, and
//! fibers over faces.
//!
//! Two points of one face lie in exactly the same tile closures, so fibers
//! computed per face of the tower's arrangement cover every point.

use std::sync::Arc;

use serde::Serialize;

use crate::arrangement::{Arrangement, Face};
use crate::error::{Error, Result};
use crate::geometry::OpenBox;
use crate::rational::Rational;
use crate::regular::RegularOpenSet;
use crate::report::Check;
use crate::sweep::{Hit, Sink, Sweep};
use crate::tiling::BaseFamily;
use crate::tower::Tower;

/// One tile per level, `T_{k+1} ⊆ T_k`, by tile index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Chain {
    pub tiles: Vec<usize>,
}

/// All root-to-leaf paths of the parent forest, ordered by leaf.
pub fn enumerate_chains(tower: &Tower) -> Vec<Chain> {
    let depth = tower.depth();
    (0..tower.levels[depth].tiles.len())
        .map(|leaf| {
            let mut tiles = vec![0; depth + 1];
            tiles[depth] = leaf;
            for k in (1..=depth).rev() {
                tiles[k - 1] = tower.parents[k][tiles[k]];
            }
            Chain { tiles }
        })
        .collect()
}

fn check_chain(tower: &Tower, c: &Chain) -> Result<()> {
    if c.tiles.len() != tower.levels.len() {
        return Err(Error::Precondition(format!(
            "chain has {} tiles, tower has {} levels",
            c.tiles.len(),
            tower.levels.len()
        )));
    }
    for (k, &t) in c.tiles.iter().enumerate() {
        tower.tile(k, t)?;
        if k > 0 && tower.parents[k].get(t) != Some(&c.tiles[k - 1]) {
            return Err(Error::Precondition(format!("tile {t} of level {k} is not a child of {}", c.tiles[k - 1])));
        }
    }
    Ok(())
}

/// The depth-`K` localization of a chain: the closed bounding box of `T_K`.
pub fn resolve_chain(tower: &Tower, c: &Chain) -> Result<OpenBox> {
    check_chain(tower, c)?;
    let k = tower.depth();
    tower.levels[k].tiles[c.tiles[k]]
        .bounding_box()
        .ok_or_else(|| Error::Invariant("empty tile".into()))
}

/// Incidence pattern of one face across the levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub face: String,
    /// `counts[k] = |{T ∈ 𝒯_k : f ⊆ cl T}|`.
    pub counts: Vec<usize>,
    /// First level from which the counts stay constant.
    pub k0: usize,
    /// Number of chains every tile of which has `f` in its closure.
    pub fiber: usize,
    pub chains: Vec<Chain>,
}

/// First `k` with `counts[k] = counts[k+1] = … = counts[K]`.
pub fn stabilization_level(counts: &[usize]) -> usize {
    let last = counts.len() - 1;
    let mut k = last;
    while k > 0 && counts[k - 1] == counts[last] {
        k -= 1;
    }
    k
}

fn tile_closure_contains(t: &RegularOpenSet, x: &[Rational]) -> Result<bool> {
    t.closure_contains_point(x)
}

/// Fiber over a face of `arrangement`, which must refine every tile of the
/// tower (such as [`Tower::arrangement`]).
pub fn fiber_of_face_on(f: &Face, tower: &Tower, arrangement: &Arrangement) -> Result<FiberReport> {
    arrangement.check_face(f)?;
    let x = arrangement.centroid(f);
    let mut counts = Vec::with_capacity(tower.levels.len());
    let mut inside: Vec<Vec<bool>> = Vec::with_capacity(tower.levels.len());
    for level in &tower.levels {
        let flags = level
            .tiles
            .iter()
            .map(|t| tile_closure_contains(t, &x))
            .collect::<Result<Vec<bool>>>()?;
        counts.push(flags.iter().filter(|&&b| b).count());
        inside.push(flags);
    }
    let chains: Vec<Chain> = enumerate_chains(tower)
        .into_iter()
        .filter(|c| c.tiles.iter().enumerate().all(|(k, &t)| inside[k][t]))
        .collect();
    Ok(FiberReport {
        face: arrangement.describe(f),
        k0: stabilization_level(&counts),
        fiber: chains.len(),
        counts,
        chains,
    })
}

/// Fiber over a face of the tower's own arrangement.
pub fn fiber_of_face(f: &Face, tower: &Tower) -> Result<FiberReport> {
    let arr = tower.arrangement()?;
    fiber_of_face_on(f, tower, &arr)
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Tile(usize),
    /// Bit `k` set when the element belongs to the level-`k` budget.
    Budget(u64),
}

/// First witnesses (face indices) of each invariant, per level where it
/// applies.
#[derive(Clone, Debug, Default)]
struct Witnesses {
    overlap: Vec<Option<usize>>,
    uncovered: Vec<Option<usize>>,
    order: Vec<Option<usize>>,
    monotone: Vec<Option<usize>>,
    budget: Vec<Option<usize>>,
    base_frontier: Option<usize>,
    stabilization: Option<usize>,
}

fn first(a: &mut Option<usize>, b: Option<usize>) {
    if a.is_none() {
        *a = b;
    }
}

struct TowerSink {
    kinds: Arc<Vec<Kind>>,
    levels: usize,
    n: usize,
    faces: u64,
    max_order: Vec<usize>,
    histogram: Vec<u64>,
    fibers: Vec<u64>,
    max_fiber_face: Option<(usize, usize)>,
    w: Witnesses,
    counts: Vec<usize>,
    members: Vec<usize>,
    frontiers: Vec<usize>,
}

impl TowerSink {
    fn new(kinds: Arc<Vec<Kind>>, levels: usize, n: usize) -> Self {
        TowerSink {
            kinds,
            levels,
            n,
            faces: 0,
            max_order: vec![0; levels],
            histogram: vec![0; levels],
            fibers: vec![0; n + 3],
            max_fiber_face: None,
            w: Witnesses {
                overlap: vec![None; levels],
                uncovered: vec![None; levels],
                order: vec![None; levels],
                monotone: vec![None; levels],
                budget: vec![None; levels],
                base_frontier: None,
                stabilization: None,
            },
            counts: vec![0; levels],
            members: vec![0; levels],
            frontiers: vec![0; levels],
        }
    }
}

impl Sink for TowerSink {
    fn visit(&mut self, face: usize, hits: &[Hit]) {
        self.faces += 1;
        let l = self.levels;
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.members.iter_mut().for_each(|c| *c = 0);
        self.frontiers.iter_mut().for_each(|c| *c = 0);
        let mut on_frontiers = 0;
        for h in hits {
            match self.kinds[h.object as usize] {
                Kind::Tile(k) => {
                    self.counts[k] += 1;
                    self.members[k] += h.member as usize;
                }
                Kind::Budget(mask) => {
                    if !h.member {
                        on_frontiers += 1;
                        for k in 0..l {
                            if mask >> k & 1 == 1 {
                                self.frontiers[k] += 1;
                            }
                        }
                    }
                }
            }
        }
        let w = &mut self.w;
        for k in 0..l {
            let c = self.counts[k];
            self.max_order[k] = self.max_order[k].max(c);
            if self.members[k] > 1 && w.overlap[k].is_none() {
                w.overlap[k] = Some(face);
            }
            if c == 0 && w.uncovered[k].is_none() {
                w.uncovered[k] = Some(face);
            }
            if c > self.n + 1 && w.order[k].is_none() {
                w.order[k] = Some(face);
            }
            if k + 1 < l && c > self.counts[k + 1] && w.monotone[k].is_none() {
                w.monotone[k] = Some(face);
            }
            if c > self.frontiers[k] + 1 && w.budget[k].is_none() {
                w.budget[k] = Some(face);
            }
        }
        if on_frontiers > self.n && w.base_frontier.is_none() {
            w.base_frontier = Some(face);
        }
        let k0 = stabilization_level(&self.counts);
        self.histogram[k0] += 1;
        let fiber = self.counts[l - 1];
        if fiber < self.fibers.len() {
            self.fibers[fiber] += 1;
        } else {
            *self.fibers.last_mut().expect("nonempty") += 1;
        }
        if self.max_fiber_face.is_none_or(|(m, _)| fiber > m) {
            self.max_fiber_face = Some((fiber, face));
        }
    }

    fn merge(&mut self, later: Self) {
        self.faces += later.faces;
        for k in 0..self.levels {
            self.max_order[k] = self.max_order[k].max(later.max_order[k]);
            self.histogram[k] += later.histogram[k];
            first(&mut self.w.overlap[k], later.w.overlap[k]);
            first(&mut self.w.uncovered[k], later.w.uncovered[k]);
            first(&mut self.w.order[k], later.w.order[k]);
            first(&mut self.w.monotone[k], later.w.monotone[k]);
            first(&mut self.w.budget[k], later.w.budget[k]);
        }
        first(&mut self.w.base_frontier, later.w.base_frontier);
        first(&mut self.w.stabilization, later.w.stabilization);
        for (a, b) in self.fibers.iter_mut().zip(&later.fibers) {
            *a += b;
        }
        if let Some((m, f)) = later.max_fiber_face {
            if self.max_fiber_face.is_none_or(|(mm, _)| m > mm) {
                self.max_fiber_face = Some((m, f));
            }
        }
    }
}

/// Results of one exhaustive sweep over the faces of the common refinement
/// of all tiles and all budget elements.
#[derive(Clone, Debug)]
pub struct TowerSweep {
    pub arrangement: Arc<Arrangement>,
    pub faces: u64,
    /// Largest `|𝒯_{k,f}|` per level.
    pub max_order: Vec<usize>,
    pub max_fiber: usize,
    /// A face realizing `max_fiber`.
    pub max_fiber_face: Option<Face>,
    /// Faces per stabilization level `k0`.
    pub histogram: Vec<u64>,
    /// Faces per fiber size; the last bucket collects everything above `n+1`.
    pub fiber_sizes: Vec<u64>,
    pub n: usize,
    pub checks: Vec<Check>,
}

impl TowerSweep {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Sweeps every face once and evaluates the tiling invariants at every
/// level: disjointness, closure cover, order `≤ n+1`, monotonicity of the
/// order in `k`, the frontier-budget inequality, and the frontier property of
/// the elements spent. The fiber over a face is the order of the last level,
/// since closures of nested tiles are nested.
pub fn sweep_tower(tower: &Tower, base: &BaseFamily) -> Result<TowerSweep> {
    let levels = tower.levels.len();
    if levels > 64 {
        return Err(Error::Precondition("at most 64 levels".into()));
    }
    let mut sets = Vec::new();
    let mut kinds = Vec::new();
    for (k, level) in tower.levels.iter().enumerate() {
        for t in &level.tiles {
            sets.push(t.clone());
            kinds.push(Kind::Tile(k));
        }
    }
    let mut masks = std::collections::BTreeMap::<usize, u64>::new();
    for (k, level) in tower.levels.iter().enumerate() {
        for &i in &level.budget {
            *masks.entry(i).or_default() |= 1 << k;
        }
    }
    for (&i, &mask) in &masks {
        let e = base
            .elements
            .get(i)
            .ok_or_else(|| Error::Precondition(format!("budget names missing element {i}")))?;
        sets.push(e.clone());
        kinds.push(Kind::Budget(mask));
    }
    let sweep = Sweep::new(tower.dim, &sets)?;
    let kinds = Arc::new(kinds);
    let n = tower.n;
    let out = sweep.run(None, || TowerSink::new(kinds.clone(), levels, n));
    let arr = sweep.arrangement().clone();
    let name = |f: Option<usize>| f.map(|i| arr.describe_index(i));
    let faces = out.faces;
    let mut checks = Vec::new();
    let per_level = |label: &str, ws: &[Option<usize>], checks: &mut Vec<Check>| {
        let hit = ws.iter().enumerate().find_map(|(k, w)| w.map(|f| format!("level {k}: {}", arr.describe_index(f))));
        checks.push(Check::from_witness(label, faces, hit));
    };
    per_level("tiles_disjoint", &out.w.overlap, &mut checks);
    per_level("closures_cover", &out.w.uncovered, &mut checks);
    per_level("order_bound", &out.w.order, &mut checks);
    per_level("order_monotone", &out.w.monotone, &mut checks);
    per_level("frontier_budget", &out.w.budget, &mut checks);
    checks.push(Check::from_witness("budget_frontier_property", faces, name(out.w.base_frontier)));
    checks.push(Check::from_witness(
        "surjective",
        faces,
        out.w.uncovered[levels - 1].map(|f| format!("empty fiber at {}", arr.describe_index(f))),
    ));
    let (max_fiber, face) = out.max_fiber_face.unwrap_or((0, 0));
    Ok(TowerSweep {
        max_fiber,
        max_fiber_face: out.max_fiber_face.map(|_| arr.face(face)),
        arrangement: arr.clone(),
        faces,
        max_order: out.max_order,
        histogram: out.histogram,
        fiber_sizes: out.fibers,
        n,
        checks,
    })
}

/// Every face of the tower's arrangement has a nonempty fiber.
pub fn surjectivity_check(tower: &Tower) -> Result<Check> {
    let k = tower.depth();
    let sweep = Sweep::new(tower.dim, &tower.levels[k].tiles)?;
    struct Empty {
        faces: u64,
        first: Option<usize>,
    }
    impl Sink for Empty {
        fn visit(&mut self, face: usize, hits: &[Hit]) {
            self.faces += 1;
            if hits.is_empty() && self.first.is_none() {
                self.first = Some(face);
            }
        }
        fn merge(&mut self, later: Self) {
            self.faces += later.faces;
            first(&mut self.first, later.first);
        }
    }
    let out = sweep.run(None, || Empty { faces: 0, first: None });
    let arr = sweep.arrangement();
    Ok(Check::from_witness(
        "surjective",
        out.faces,
        out.first.map(|f| format!("empty fiber at {}", arr.describe_index(f))),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regular::ro_disjoint;
    use crate::tiling::{dyadic_schedule, make_tower_base};
    use crate::tower::build_tower;

    fn tower(d: usize, k: usize, seed: u64) -> (Tower, BaseFamily) {
        let s = dyadic_schedule(k);
        let base = make_tower_base(d, &s, seed).unwrap();
        (build_tower(&base, k, &s).unwrap(), base)
    }

    #[test]
    fn depth_zero_chains_and_fibers() {
        let (t, base) = tower(2, 0, 0);
        let chains = enumerate_chains(&t);
        assert_eq!(chains, vec![Chain { tiles: vec![0] }]);
        let b = resolve_chain(&t, &chains[0]).unwrap();
        assert_eq!(b, OpenBox::unit(2));
        assert!(surjectivity_check(&t).unwrap().passed);
        let s = sweep_tower(&t, &base).unwrap();
        assert!(s.passed());
        assert_eq!(s.max_fiber, 1);
    }

    #[test]
    fn chains_match_leaves() {
        let (t, _) = tower(1, 3, 2);
        let chains = enumerate_chains(&t);
        assert_eq!(chains.len(), t.levels[3].tiles.len());
        for c in &chains {
            // strictly shrinking boxes along the chain
            for k in 1..=3 {
                let a = t.levels[k].tiles[c.tiles[k]].diameter();
                let b = t.levels[k - 1].tiles[c.tiles[k - 1]].diameter();
                assert!(a < b);
            }
            let b = resolve_chain(&t, c).unwrap();
            assert!(b.diameter() < Rational::pow2_neg(3));
        }
        // chains sharing a level-k tile resolve inside the closure of that tile
        for c in &chains {
            for k in 0..=3 {
                let anc = t.levels[k].tiles[c.tiles[k]].bounding_box().unwrap();
                assert!(anc.contains_box(&resolve_chain(&t, c).unwrap()));
            }
        }
        let leaves = &t.levels[3].tiles;
        assert!(ro_disjoint(&leaves[0], &leaves[1]).unwrap());
        let bogus = Chain { tiles: vec![0, 1, 0, 0] };
        assert!(resolve_chain(&t, &bogus).is_err());
    }

    #[test]
    fn fibers_in_one_dimension() {
        let (t, base) = tower(1, 2, 4);
        let arr = t.arrangement().unwrap();
        // interior face of a single tile
        let inside = arr.locate(&[Rational::new(1, 1000)]).unwrap();
        let r = fiber_of_face_on(&inside, &t, &arr).unwrap();
        assert_eq!(r.fiber, 1);
        assert_eq!(r.k0, 0);
        // a cut that persists from level 1 to level 2
        let s = sweep_tower(&t, &base).unwrap();
        assert!(s.passed(), "{:?}", s.checks);
        assert_eq!(s.max_fiber, 2);
        let f = s.max_fiber_face.clone().unwrap();
        let r = fiber_of_face_on(&f, &t, &s.arrangement).unwrap();
        assert_eq!(r.fiber, 2);
        assert_eq!(r.chains.len(), 2);
        assert_eq!(*r.counts.last().unwrap(), 2);
        assert!(fiber_of_face_on(&Face(vec![10_000]), &t, &arr).is_err());
    }

    #[test]
    fn two_dimensional_fibers_are_bounded() {
        let (t, base) = tower(2, 2, 7);
        let s = sweep_tower(&t, &base).unwrap();
        assert!(s.passed(), "{:?}", s.checks);
        assert!(s.max_fiber <= 3);
        assert_eq!(s.histogram.iter().sum::<u64>(), s.faces);
        let arr = &s.arrangement;
        for i in (0..arr.face_count()).step_by(37) {
            let r = fiber_of_face_on(&arr.face(i), &t, arr).unwrap();
            assert!(r.fiber <= 3);
            assert_eq!(r.fiber, r.counts[r.k0]);
            assert!(r.counts.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn stabilization_levels() {
        assert_eq!(stabilization_level(&[1]), 0);
        assert_eq!(stabilization_level(&[1, 1, 2]), 2);
        assert_eq!(stabilization_level(&[1, 2, 2]), 1);
        assert_eq!(stabilization_level(&[1, 1, 1]), 0);
    }
}
