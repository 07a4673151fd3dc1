//! Axis-aligned open boxes in the unit cube.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// An axis-aligned box `∏ (lo_j, hi_j)` with `0 ≤ lo_j < hi_j ≤ 1`.
///
/// The box denotes a relatively open subset of `X = [0,1]^d`: a side sitting
/// on the boundary of the cube is absorbed, so `(0, 1/2)` in `d = 1` stands for
/// `[0, 1/2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(Rational, Rational)>", into = "Vec<(Rational, Rational)>")]
pub struct OpenBox {
    intervals: Vec<(Rational, Rational)>,
}

impl OpenBox {
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let zero = Rational::zero();
        let one = Rational::one();
        for (lo, hi) in &intervals {
            for c in [lo, hi] {
                if *c < zero || *c > one {
                    return Err(Error::CoordinateOutOfRange(c.to_string()));
                }
            }
            if lo >= hi {
                return Err(Error::EmptyInterval { lo: lo.to_string(), hi: hi.to_string() });
            }
        }
        Ok(OpenBox { intervals })
    }

    /// Convenience constructor from `(p_lo, q_lo, p_hi, q_hi)` tuples.
    pub fn from_fractions(sides: &[(i64, i64, i64, i64)]) -> Result<Self> {
        Self::new(
            sides
                .iter()
                .map(|&(a, b, c, d)| (Rational::new(a, b), Rational::new(c, d)))
                .collect(),
        )
    }

    /// The whole cube `[0,1]^d`.
    pub fn unit(dim: usize) -> Self {
        OpenBox { intervals: vec![(Rational::zero(), Rational::one()); dim] }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn lo(&self, axis: usize) -> &Rational {
        &self.intervals[axis].0
    }

    pub fn hi(&self, axis: usize) -> &Rational {
        &self.intervals[axis].1
    }

    /// ℓ∞ diameter: the longest side.
    pub fn diameter(&self) -> Rational {
        self.intervals
            .iter()
            .map(|(lo, hi)| hi - lo)
            .max()
            .expect("boxes have at least one axis")
    }

    pub fn center(&self) -> Vec<Rational> {
        self.intervals.iter().map(|(lo, hi)| lo.midpoint(hi)).collect()
    }

    /// Coordinate-wise inclusion of `other` in `self`.
    pub fn contains_box(&self, other: &OpenBox) -> bool {
        self.dim() == other.dim()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|((a, b), (c, d))| a <= c && d <= b)
    }

    /// Whether the closed boxes `cl self` and `cl other` intersect.
    pub fn closures_meet(&self, other: &OpenBox) -> bool {
        self.intervals
            .iter()
            .zip(&other.intervals)
            .all(|((a, b), (c, d))| a <= d && c <= b)
    }

    /// Membership of `x` in the relatively open set the box denotes.
    pub fn contains_point(&self, x: &[Rational]) -> bool {
        let zero = Rational::zero();
        let one = Rational::one();
        self.intervals.iter().zip(x).all(|((lo, hi), v)| {
            let above = lo < v || (*lo == zero && *v == zero);
            let below = v < hi || (*hi == one && *v == one);
            above && below
        })
    }

    pub fn closure_contains_point(&self, x: &[Rational]) -> bool {
        self.intervals.iter().zip(x).all(|((lo, hi), v)| lo <= v && v <= hi)
    }
}

impl TryFrom<Vec<(Rational, Rational)>> for OpenBox {
    type Error = Error;
    fn try_from(v: Vec<(Rational, Rational)>) -> Result<Self> {
        OpenBox::new(v)
    }
}

impl From<OpenBox> for Vec<(Rational, Rational)> {
    fn from(b: OpenBox) -> Self {
        b.intervals
    }
}

/// ℓ∞ diameter of a box.
pub fn diameter(b: &OpenBox) -> Rational {
    b.diameter()
}
