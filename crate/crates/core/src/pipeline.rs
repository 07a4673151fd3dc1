//! End-to-end runs: base → tower → fibers, the Stone algebra of the base,
//! and the fixed-shape statistics record.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{verify_algebra, verify_tower, SamplePlan};
use crate::rational::Rational;
use crate::report::Report;
use crate::resolution::{sweep_tower, TowerSweep};
use crate::stone::{generate_subalgebra, two_power_bound_check, FiniteBooleanAlgebra, StoneCheck, GENERATOR_LIMIT};
use crate::tiling::{dyadic_schedule, make_tower_base, BaseFamily};
use crate::tower::{build_tower, Tower};

/// Largest tower depth accepted.
pub const MAX_DEPTH: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunParams {
    pub dim: usize,
    pub depth: usize,
    pub seed: u64,
    /// `schedule[k]` bounds level-`k` diameters; `schedule[0] = 1`.
    pub schedule: Vec<Rational>,
    pub stone_generators: usize,
    pub samples_per_face: usize,
}

impl RunParams {
    /// Dyadic schedule, 12 Stone generators, 10 samples per face.
    pub fn new(dim: usize, depth: usize, seed: u64) -> Self {
        RunParams { dim, depth, seed, schedule: dyadic_schedule(depth), stone_generators: 12, samples_per_face: 10 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::Precondition(format!("dim must be 1, 2 or 3, got {}", self.dim)));
        }
        if self.depth > MAX_DEPTH {
            return Err(Error::Precondition(format!("depth must be at most {MAX_DEPTH}, got {}", self.depth)));
        }
        if self.schedule.len() != self.depth + 1 || self.schedule[0] != Rational::one() {
            return Err(Error::Precondition("schedule must be 1 followed by one bound per level".into()));
        }
        for w in self.schedule.windows(2) {
            if !(w[1] > Rational::zero() && w[1] < w[0]) {
                return Err(Error::Precondition(format!("diameter bounds must decrease and stay positive: {}", w[1])));
            }
        }
        if self.stone_generators > GENERATOR_LIMIT {
            return Err(Error::GuardExceeded { count: self.stone_generators, limit: GENERATOR_LIMIT });
        }
        if self.samples_per_face == 0 {
            return Err(Error::Precondition("samples_per_face must be positive".into()));
        }
        Ok(())
    }

    pub fn plan(&self) -> SamplePlan {
        SamplePlan { per_face: self.samples_per_face, seed: self.seed }
    }
}

pub struct TowerRun {
    pub base: BaseFamily,
    pub tower: Tower,
    pub sweep: TowerSweep,
}

/// The layered base for the schedule, the tower over it, and the global
/// face sweep.
pub fn run_tower(p: &RunParams) -> Result<TowerRun> {
    p.validate()?;
    let base = make_tower_base(p.dim, &p.schedule, p.seed)?;
    let tower = build_tower(&base, p.depth, &p.schedule)?;
    let sweep = sweep_tower(&tower, &base)?;
    Ok(TowerRun { base, tower, sweep })
}

pub struct StoneRun {
    pub n: usize,
    pub algebra: FiniteBooleanAlgebra,
    pub check: StoneCheck,
}

/// The subalgebra generated by the first `stone_generators` elements of the
/// base.
pub fn run_stone(p: &RunParams, base: &BaseFamily) -> Result<StoneRun> {
    p.validate()?;
    let gens: Vec<_> = base.elements.iter().take(p.stone_generators).cloned().collect();
    let algebra = generate_subalgebra(p.dim, &gens)?;
    let check = two_power_bound_check(base.n, &algebra)?;
    Ok(StoneRun { n: base.n, algebra, check })
}

/// Base for a Stone-only run: the tower base of the schedule.
pub fn stone_base(p: &RunParams) -> Result<BaseFamily> {
    p.validate()?;
    make_tower_base(p.dim, &p.schedule, p.seed)
}

/// Every check of a full verification: the tower report and the algebra
/// report.
pub fn run_verify(p: &RunParams, tower: &TowerRun, stone: &StoneRun) -> Result<Report> {
    let plan = p.plan();
    let mut report = verify_tower(&tower.tower, &tower.base, &plan)?;
    report.extend(verify_algebra(stone.n, &stone.algebra, &plan)?);
    Ok(report)
}

/// The statistics record. Tower fields are `null` when no tower was built.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub levels: Option<usize>,
    pub tiles_per_level: Option<Vec<usize>>,
    pub max_order: Option<usize>,
    pub max_fiber: Option<usize>,
    /// Largest tile diameter per level, exact.
    pub max_diam: Option<Vec<Rational>>,
    pub stone_max_fiber: Option<usize>,
    /// Faces of the tower arrangement per stabilization level.
    pub stabilization_histogram: Option<Vec<u64>>,
    pub seed: u64,
    pub config_echo: serde_json::Value,
}

pub fn stats(seed: u64, tower: Option<&TowerRun>, stone: Option<&StoneRun>, config_echo: serde_json::Value) -> Stats {
    Stats {
        levels: tower.map(|t| t.tower.levels.len()),
        tiles_per_level: tower.map(|t| t.tower.levels.iter().map(|l| l.tiles.len()).collect()),
        max_order: tower.map(|t| t.sweep.max_order.iter().copied().max().unwrap_or(0)),
        max_fiber: tower.map(|t| t.sweep.max_fiber),
        max_diam: tower.map(|t| {
            t.tower
                .levels
                .iter()
                .map(|l| l.tiles.iter().map(|x| x.diameter()).max().unwrap_or_else(Rational::zero))
                .collect()
        }),
        stone_max_fiber: stone.map(|s| s.check.max_fiber),
        stabilization_histogram: tower.map(|t| t.sweep.histogram.clone()),
        seed,
        config_echo,
    }
}

impl Stats {
    /// Pretty JSON with a trailing newline; identical runs give identical
    /// bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_are_validated() {
        assert!(RunParams::new(1, 3, 0).validate().is_ok());
        assert!(RunParams::new(4, 1, 0).validate().is_err());
        assert!(RunParams::new(0, 1, 0).validate().is_err());
        assert!(RunParams::new(1, 7, 0).validate().is_err());
        let mut p = RunParams::new(1, 2, 0);
        p.schedule[2] = Rational::new(3, 4);
        assert!(p.validate().is_err());
        p = RunParams::new(1, 2, 0);
        p.stone_generators = 21;
        assert!(p.validate().is_err());
    }

    #[test]
    fn one_dimensional_run() {
        let p = RunParams::new(1, 3, 1);
        let t = run_tower(&p).unwrap();
        assert!(t.sweep.passed());
        let s = run_stone(&p, &t.base).unwrap();
        assert!(s.check.passed());
        let st = stats(1, Some(&t), Some(&s), serde_json::json!({"dim": 1}));
        assert!(st.max_order.unwrap() <= 2);
        assert!(st.max_fiber.unwrap() <= 2);
        assert!(st.stone_max_fiber.unwrap() <= 2);
        assert_eq!(st.tiles_per_level.as_deref(), Some(&[1, 3, 6, 12][..]));
        let json: serde_json::Value = serde_json::from_str(&st.to_json()).unwrap();
        let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 9);
        assert_eq!(json["max_diam"][0], "1/1");
        let rep = run_verify(&p, &t, &s).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
    }
}
