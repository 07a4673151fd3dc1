//! Finite Boolean subalgebras of regular open sets, their atoms, and the
//! `2^n` bound on how many atoms can meet at a point.
//!
//! The ultrafilters of a finite Boolean algebra are its atoms, so the Stone
//! space here is the discrete set of atoms, each labelled by the signature of
//! generators it lies under.

use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::arrangement::{Arrangement, Face};
use crate::error::{Error, Result};
use crate::regular::{ro_complement, ro_meet, RegularOpenSet};
use crate::report::Check;
use crate::sweep::{Hit, Sink, Sweep};

/// Most generators a subalgebra may be built from.
pub const GENERATOR_LIMIT: usize = 20;

/// Bit `α` set iff the atom lies under generator `α` (rather than its
/// complement).
pub type Signature = u32;

#[derive(Clone, Debug)]
pub struct Atom {
    pub signature: Signature,
    pub set: RegularOpenSet,
}

#[derive(Clone, Debug)]
pub struct FiniteBooleanAlgebra {
    /// Generators, moved onto the common arrangement.
    pub generators: Vec<RegularOpenSet>,
    pub arrangement: Arc<Arrangement>,
    /// Nonempty atoms in increasing signature order.
    pub atoms: Vec<Atom>,
}

impl FiniteBooleanAlgebra {
    pub fn dim(&self) -> usize {
        self.arrangement.dim()
    }
}

/// Enumerates the meets `⋀_α B_α^{ε(α)}` depth-first, dropping a branch as
/// soon as its partial meet is empty.
pub fn generate_subalgebra(dim: usize, gens: &[RegularOpenSet]) -> Result<FiniteBooleanAlgebra> {
    if gens.len() > GENERATOR_LIMIT {
        return Err(Error::GuardExceeded { count: gens.len(), limit: GENERATOR_LIMIT });
    }
    let mut values: Vec<Vec<_>> = vec![Vec::new(); dim];
    for g in gens {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
        }
        for (j, v) in values.iter_mut().enumerate() {
            v.extend_from_slice(g.arrangement().cuts(j));
        }
    }
    let arr = Arc::new(Arrangement::from_values(values)?);
    let generators = gens.iter().map(|g| g.on(&arr)).collect::<Result<Vec<_>>>()?;
    let complements: Vec<RegularOpenSet> = generators.iter().map(ro_complement).collect();
    let mut atoms = Vec::new();
    let mut stack = vec![(0usize, 0 as Signature, RegularOpenSet::full(arr.clone()))];
    while let Some((alpha, sig, meet)) = stack.pop() {
        if alpha == generators.len() {
            atoms.push(Atom { signature: sig, set: meet });
            continue;
        }
        // push the complement branch first so the element branch pops first;
        // the final sort makes the order irrelevant anyway
        let out = ro_meet(&meet, &complements[alpha])?;
        if !out.is_empty() {
            stack.push((alpha + 1, sig, out));
        }
        let inside = ro_meet(&meet, &generators[alpha])?;
        if !inside.is_empty() {
            stack.push((alpha + 1, sig | 1 << alpha, inside));
        }
    }
    atoms.sort_by_key(|a| a.signature);
    Ok(FiniteBooleanAlgebra { generators, arrangement: arr, atoms })
}

/// Signatures of the atoms whose closure contains `f`.
pub fn stone_fiber(f: &Face, algebra: &FiniteBooleanAlgebra) -> Result<Vec<Signature>> {
    algebra.arrangement.check_face(f)?;
    Ok(algebra
        .atoms
        .iter()
        .filter(|a| a.set.closure_contains_face(f))
        .map(|a| a.signature)
        .collect())
}

/// `F = {α : f ⊆ Fr B_α}`.
pub fn frontier_indices(f: &Face, algebra: &FiniteBooleanAlgebra) -> Result<Vec<usize>> {
    algebra.arrangement.check_face(f)?;
    Ok(algebra
        .generators
        .iter()
        .enumerate()
        .filter(|(_, g)| g.closure_contains_face(f) && !g.contains_face(f))
        .map(|(i, _)| i)
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct StoneCheck {
    pub faces: u64,
    pub max_fiber: usize,
    /// Largest `|F|` seen at any face.
    pub max_frontiers: usize,
    pub checks: Vec<Check>,
}

impl StoneCheck {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Default)]
struct StoneSink {
    atoms: usize,
    n: usize,
    sigs: Arc<Vec<Signature>>,
    faces: u64,
    max_fiber: usize,
    max_frontiers: usize,
    bound: Option<usize>,
    exponent: Option<usize>,
    agree: Option<usize>,
    disjoint: Option<usize>,
    cover: Option<usize>,
}

impl Sink for StoneSink {
    fn visit(&mut self, face: usize, hits: &[Hit]) {
        self.faces += 1;
        let mut fiber = 0usize;
        let mut members = 0usize;
        let mut front: Signature = 0;
        let mut first_sig = None;
        // atoms come first among the objects
        for h in hits {
            let o = h.object as usize;
            if o < self.atoms {
                fiber += 1;
                members += h.member as usize;
                first_sig.get_or_insert(self.sigs[o]);
            } else if !h.member {
                front |= 1 << (o - self.atoms);
            }
        }
        let agree = first_sig.is_none_or(|s| {
            hits.iter()
                .filter(|h| (h.object as usize) < self.atoms)
                .all(|h| (self.sigs[h.object as usize] ^ s) & !front == 0)
        });
        let k = front.count_ones() as usize;
        self.max_fiber = self.max_fiber.max(fiber);
        self.max_frontiers = self.max_frontiers.max(k);
        let note = |slot: &mut Option<usize>, bad: bool| {
            if bad && slot.is_none() {
                *slot = Some(face);
            }
        };
        note(&mut self.bound, fiber > 1usize << k.min(self.n));
        note(&mut self.exponent, fiber > 1usize << k);
        note(&mut self.agree, !agree);
        note(&mut self.disjoint, members > 1);
        note(&mut self.cover, fiber == 0);
    }

    fn merge(&mut self, later: Self) {
        self.faces += later.faces;
        self.max_fiber = self.max_fiber.max(later.max_fiber);
        self.max_frontiers = self.max_frontiers.max(later.max_frontiers);
        for (a, b) in [
            (&mut self.bound, later.bound),
            (&mut self.exponent, later.exponent),
            (&mut self.agree, later.agree),
            (&mut self.disjoint, later.disjoint),
            (&mut self.cover, later.cover),
        ] {
            if a.is_none() {
                *a = b;
            }
        }
    }
}

/// Sweeps every face of the algebra's arrangement and checks
/// `|stone_fiber| ≤ 2^{min(|F|, n)}`, that distinct signatures in one fiber
/// agree off `F`, and that the atoms partition the cube.
pub fn two_power_bound_check(n: usize, algebra: &FiniteBooleanAlgebra) -> Result<StoneCheck> {
    let mut objects: Vec<RegularOpenSet> = algebra.atoms.iter().map(|a| a.set.clone()).collect();
    objects.extend(algebra.generators.iter().cloned());
    let sweep = Sweep::with_arrangement(algebra.arrangement.clone(), &objects)?;
    let sigs = Arc::new(algebra.atoms.iter().map(|a| a.signature).collect::<Vec<_>>());
    let atoms = algebra.atoms.len();
    let out = sweep.run(None, || StoneSink { atoms, n, sigs: sigs.clone(), ..Default::default() });
    let arr = &algebra.arrangement;
    let w = |f: Option<usize>| f.map(|i| arr.describe_index(i));
    let faces = out.faces;
    Ok(StoneCheck {
        faces,
        max_fiber: out.max_fiber,
        max_frontiers: out.max_frontiers,
        checks: vec![
            Check::from_witness("stone_fiber_bound", faces, w(out.bound)),
            Check::from_witness("stone_fiber_frontier_bound", faces, w(out.exponent)),
            Check::from_witness("signatures_agree_off_frontier", faces, w(out.agree)),
            Check::from_witness("atoms_disjoint", faces, w(out.disjoint)),
            Check::from_witness("atoms_cover", faces, w(out.cover)),
        ],
    })
}

/// For `Σ(m_i − 1) ≤ n`, whether `∏ m_i ≤ 2^n`. Always true; a `false` is a
/// failure of the arithmetic.
pub fn product_bound_check(m: &[u64], n: u64) -> Result<bool> {
    if m.contains(&0) {
        return Err(Error::Precondition("factors must be positive".into()));
    }
    let excess: u128 = m.iter().map(|&x| (x - 1) as u128).sum();
    if excess > n as u128 {
        return Err(Error::Precondition(format!("sum of (m_i - 1) is {excess} > {n}")));
    }
    let product: BigUint = m.iter().map(|&x| BigUint::from(x)).product();
    Ok(product <= BigUint::from(1u8) << n)
}

/// Calls `f` on every ordered tuple of integers `≥ 2` whose product is at
/// most `limit`, including the empty tuple.
pub fn for_each_product_tuple(limit: u64, mut f: impl FnMut(&[u64])) {
    fn go(limit: u64, prefix: &mut Vec<u64>, product: u64, f: &mut impl FnMut(&[u64])) {
        f(prefix);
        let mut m = 2;
        while product * m <= limit {
            prefix.push(m);
            go(limit, prefix, product * m, f);
            prefix.pop();
            m += 1;
        }
    }
    go(limit, &mut Vec::new(), 1, &mut f);
}
