//! Exhaustive face sweeps over the common refinement of many sets.
//!
//! Every face of the global arrangement is visited once, together with the
//! list of objects whose closure contains it. Objects live on their own
//! (small) arrangements; the sweep maps global positions to local ones and
//! never materializes per-face state for the whole arrangement, so sweeps of
//! tens of millions of faces stay cheap in memory.

use std::sync::Arc;

use rayon::prelude::*;

use crate::arrangement::{position_map, Arrangement};
use crate::error::{Error, Result};
use crate::regular::RegularOpenSet;

/// An object whose closure contains the visited face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hit {
    pub object: u32,
    /// Whether the face also lies in the object itself (not just its closure).
    pub member: bool,
}

/// Accumulates per-face observations. Sinks for disjoint slabs are merged in
/// slab order, so `merge` sees `later` faces after its own.
pub trait Sink: Send + Sized {
    fn visit(&mut self, face: usize, hits: &[Hit]);
    fn merge(&mut self, later: Self);
}

struct Prepared {
    set: RegularOpenSet,
    /// Inclusive global position range of the closure, per axis.
    range: Vec<(usize, usize)>,
    /// Global position (offset by the range start) to local position.
    maps: Vec<Vec<u32>>,
}

pub struct Sweep {
    arrangement: Arc<Arrangement>,
    objects: Vec<Option<Prepared>>,
}

impl Sweep {
    /// Sweeps the common refinement of all the sets.
    pub fn new(dim: usize, sets: &[RegularOpenSet]) -> Result<Self> {
        let mut values: Vec<Vec<_>> = vec![Vec::new(); dim];
        for s in sets {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: s.dim() });
            }
            for (j, v) in values.iter_mut().enumerate() {
                v.extend_from_slice(s.arrangement().cuts(j));
            }
        }
        let arr = Arc::new(Arrangement::from_values(values)?);
        Self::with_arrangement(arr, sets)
    }

    /// Sweeps a given arrangement, which must refine every set's arrangement.
    pub fn with_arrangement(arrangement: Arc<Arrangement>, sets: &[RegularOpenSet]) -> Result<Self> {
        let objects = sets
            .iter()
            .map(|s| prepare(&arrangement, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Sweep { arrangement, objects })
    }

    pub fn arrangement(&self) -> &Arc<Arrangement> {
        &self.arrangement
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    /// Global position range of an object's closure, or `None` if empty.
    pub fn object_range(&self, object: usize) -> Option<&[(usize, usize)]> {
        self.objects[object].as_ref().map(|p| p.range.as_slice())
    }

    /// Visits every face (inside `window`, if given) in increasing index order.
    pub fn run<S: Sink>(&self, window: Option<&[(usize, usize)]>, make: impl Fn() -> S + Sync) -> S {
        let arr = &*self.arrangement;
        let d = arr.dim();
        let win: Vec<(usize, usize)> = match window {
            Some(w) => w.to_vec(),
            None => (0..d).map(|j| (0, arr.positions(j) - 1)).collect(),
        };
        let all: Vec<u32> = (0..self.objects.len() as u32)
            .filter(|&i| self.objects[i as usize].is_some())
            .collect();
        if d == 1 {
            let mut sink = make();
            let mut scratch = Scratch::new(win[0].1 - win[0].0 + 1);
            let cands: Vec<(u32, usize)> = all.iter().map(|&o| (o, 0)).collect();
            self.scatter(&win, &cands, 0, &mut scratch, &mut sink);
            return sink;
        }
        let first: Vec<usize> = (win[0].0..=win[0].1).collect();
        let chunk = (first.len() / (rayon::current_num_threads() * 4)).max(1);
        let sinks: Vec<S> = first
            .par_chunks(chunk)
            .map(|ps| {
                let mut sink = make();
                let mut scratch = Scratch::new(win[d - 1].1 - win[d - 1].0 + 1);
                let mut cands = Vec::new();
                for &p in ps {
                    cands.clear();
                    for &o in &all {
                        let ob = self.objects[o as usize].as_ref().expect("filtered");
                        let (lo, hi) = ob.range[0];
                        if lo <= p && p <= hi {
                            let local = ob.maps[0][p - lo] as usize * ob.set.arrangement().stride(0);
                            cands.push((o, local));
                        }
                    }
                    self.descend(&win, 1, &cands, p * arr.stride(0), &mut scratch, &mut sink);
                }
                sink
            })
            .collect();
        let mut it = sinks.into_iter();
        let mut out = it.next().unwrap_or_else(&make);
        for s in it {
            out.merge(s);
        }
        out
    }

    fn descend<S: Sink>(
        &self,
        win: &[(usize, usize)],
        axis: usize,
        cands: &[(u32, usize)],
        base: usize,
        scratch: &mut Scratch,
        sink: &mut S,
    ) {
        let d = win.len();
        if axis == d - 1 {
            self.scatter(win, cands, base, scratch, sink);
            return;
        }
        let stride = self.arrangement.stride(axis);
        let mut next = Vec::with_capacity(cands.len());
        for p in win[axis].0..=win[axis].1 {
            next.clear();
            for &(o, partial) in cands {
                let ob = self.objects[o as usize].as_ref().expect("filtered");
                let (lo, hi) = ob.range[axis];
                if lo <= p && p <= hi {
                    let local = ob.maps[axis][p - lo] as usize * ob.set.arrangement().stride(axis);
                    next.push((o, partial + local));
                }
            }
            self.descend(win, axis + 1, &next, base + p * stride, scratch, sink);
        }
    }

    fn scatter<S: Sink>(&self, win: &[(usize, usize)], cands: &[(u32, usize)], base: usize, scratch: &mut Scratch, sink: &mut S) {
        let last = win.len() - 1;
        let (wlo, whi) = win[last];
        for &(o, partial) in cands {
            let ob = self.objects[o as usize].as_ref().expect("filtered");
            let (lo, hi) = ob.range[last];
            let from = lo.max(wlo);
            let to = hi.min(whi);
            if from > to {
                continue;
            }
            let closure = ob.set.closure_bits();
            let members = ob.set.member_bits();
            let map = &ob.maps[last];
            for p in from..=to {
                let li = partial + map[p - lo] as usize;
                if closure.contains(li) {
                    scratch.rows[p - wlo].push(Hit { object: o, member: members.contains(li) });
                }
            }
        }
        for p in wlo..=whi {
            let row = &mut scratch.rows[p - wlo];
            sink.visit(base + p, row);
            row.clear();
        }
    }
}

struct Scratch {
    rows: Vec<Vec<Hit>>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { rows: vec![Vec::new(); n] }
    }
}

fn prepare(global: &Arrangement, set: &RegularOpenSet) -> Result<Option<Prepared>> {
    let local = set.arrangement();
    if local.dim() != global.dim() {
        return Err(Error::DimensionMismatch { expected: global.dim(), found: local.dim() });
    }
    if !global.refines(local) {
        return Err(Error::ArrangementMismatch);
    }
    // a raw set may have lower-dimensional members without cells; use the closure
    let closure = set.closure_bits();
    if closure.is_clear() {
        return Ok(None);
    }
    let d = local.dim();
    let mut lo = vec![usize::MAX; d];
    let mut hi = vec![0usize; d];
    for f in closure.ones() {
        for j in 0..d {
            let p = local.pos_of(f, j);
            lo[j] = lo[j].min(p);
            hi[j] = hi[j].max(p);
        }
    }
    let mut range = Vec::with_capacity(d);
    let mut maps = Vec::with_capacity(d);
    for j in 0..d {
        let full = position_map(local.cuts(j), global.cuts(j));
        // closures always end on cuts
        debug_assert!(lo[j] % 2 == 0 && hi[j] % 2 == 0);
        let g = |p: usize| 2 * global.cuts(j).binary_search(&local.cuts(j)[p / 2]).expect("refines");
        let (glo, ghi) = (g(lo[j]), g(hi[j]));
        range.push((glo, ghi));
        maps.push(full[glo..=ghi].to_vec());
    }
    Ok(Some(Prepared { set: set.clone(), range, maps }))
}

/// A sink that records, per face, the sorted object lists of closure and
/// member hits. Meant for tests and small arrangements.
#[derive(Default, Debug, Clone)]
pub struct Collect {
    pub faces: Vec<(usize, Vec<Hit>)>,
}

impl Sink for Collect {
    fn visit(&mut self, face: usize, hits: &[Hit]) {
        self.faces.push((face, hits.to_vec()));
    }
    fn merge(&mut self, later: Self) {
        self.faces.extend(later.faces);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use fixedbitset::FixedBitSet;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_set(rng: &mut ChaCha8Rng, d: usize) -> RegularOpenSet {
        let values = (0..d)
            .map(|_| {
                let k = rng.gen_range(0..4);
                (0..k).map(|_| Rational::new(rng.gen_range(1..12), 12)).collect()
            })
            .collect();
        let arr = Arc::new(Arrangement::from_values(values).unwrap());
        let mut cells = FixedBitSet::with_capacity(arr.cell_count());
        for c in 0..arr.cell_count() {
            if rng.gen_bool(0.3) {
                cells.insert(c);
            }
        }
        RegularOpenSet::from_cells(arr, cells)
    }

    proptest! {
        #[test]
        fn sweep_matches_transported_sets(seed in any::<u64>(), d in 1usize..=3, n in 0usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sets: Vec<RegularOpenSet> = (0..n).map(|_| random_set(&mut rng, d)).collect();
            let sweep = Sweep::new(d, &sets).unwrap();
            let arr = sweep.arrangement().clone();
            let out = sweep.run(None, Collect::default);
            prop_assert_eq!(out.faces.len(), arr.face_count());
            let fine: Vec<RegularOpenSet> = sets.iter().map(|s| s.on(&arr).unwrap()).collect();
            for (k, (face, hits)) in out.faces.iter().enumerate() {
                prop_assert_eq!(k, *face);
                let expected: Vec<Hit> = fine
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.closure_bits().contains(*face))
                    .map(|(i, s)| Hit { object: i as u32, member: s.member_bits().contains(*face) })
                    .collect();
                prop_assert_eq!(hits, &expected);
            }
        }

        #[test]
        fn windowed_sweep_is_a_restriction(seed in any::<u64>(), d in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sets: Vec<RegularOpenSet> = (0..3).map(|_| random_set(&mut rng, d)).collect();
            let sweep = Sweep::new(d, &sets).unwrap();
            let arr = sweep.arrangement().clone();
            let win: Vec<(usize, usize)> = (0..d)
                .map(|j| {
                    let n = arr.positions(j);
                    let a = rng.gen_range(0..n);
                    let b = rng.gen_range(a..n);
                    (a, b)
                })
                .collect();
            let all = sweep.run(None, Collect::default);
            let part = sweep.run(Some(&win), Collect::default);
            let expected: Vec<(usize, Vec<Hit>)> = all
                .faces
                .into_iter()
                .filter(|(f, _)| (0..d).all(|j| {
                    let p = arr.pos_of(*f, j);
                    win[j].0 <= p && p <= win[j].1
                }))
                .collect();
            prop_assert_eq!(part.faces, expected);
        }
    }
}
