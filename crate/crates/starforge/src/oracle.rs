//! Brute-force box oracle for staircase operations.
//!
//! The oracle evaluates the *defining set* of each staircase operation by
//! direct quantifier evaluation over the points of a finite box, using only
//! staircase membership as a primitive. It shares no code with the staircase
//! algorithms it validates, which is the point: every algebraic shortcut in
//! `staircase` is checked against this module on random instances.
//!
//! Results are point sets restricted to the box. The comparisons are exact
//! set equalities within the box, provided the operand generators lie inside
//! the box (the binding constraints of every quantifier sit at generators,
//! so restricting quantification to box points loses nothing).

use std::collections::BTreeSet;

use thiserror::Error;

use crate::staircase::{Staircase, StaircaseError};
use crate::values::{self, ValueVector};

/// Default per-axis radius for oracle boxes.
pub const DEFAULT_BOX_RADIUS: i64 = 8;

/// Default cap on the number of box points.
pub const DEFAULT_BOX_CAP: u64 = 1_000_000;

/// Environment variable overriding the box point cap.
pub const BOX_CAP_ENV: &str = "STARFORGE_BOX_CAP";

/// A finite integer box, one `(lower, upper)` bound pair per axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Box {
    bounds: Vec<(i64, i64)>,
}

/// Errors raised by the oracle.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("box bound has lower > upper on axis {0}")]
    BadBounds(usize),
    #[error("box contains {points} points, exceeding the cap of {cap}")]
    BoxTooLarge { points: u64, cap: u64 },
    #[error(transparent)]
    Staircase(#[from] StaircaseError),
}

impl Box {
    /// Build a box from explicit per-axis bounds.
    pub fn new(bounds: Vec<(i64, i64)>) -> Result<Self, OracleError> {
        for (i, (lo, hi)) in bounds.iter().enumerate() {
            if lo > hi {
                return Err(OracleError::BadBounds(i));
            }
        }
        Ok(Box { bounds })
    }

    /// The symmetric box `[-r, r]^arity`.
    #[must_use]
    pub fn radius(arity: usize, r: i64) -> Self {
        Box {
            bounds: vec![(-r, r); arity.max(1)],
        }
    }

    /// Number of points in the box.
    #[must_use]
    pub fn point_count(&self) -> u64 {
        self.bounds
            .iter()
            .map(|(lo, hi)| (hi - lo + 1) as u64)
            .fold(1u64, u64::saturating_mul)
    }

    /// All points of the box in lexicographic order.
    pub fn points(&self, cap: u64) -> Result<Vec<ValueVector>, OracleError> {
        let n = self.point_count();
        if n > cap {
            return Err(OracleError::BoxTooLarge { points: n, cap });
        }
        let mut out = Vec::with_capacity(n as usize);
        let mut cur: ValueVector = self.bounds.iter().map(|(lo, _)| *lo).collect();
        loop {
            out.push(cur.clone());
            let mut axis = self.bounds.len();
            loop {
                if axis == 0 {
                    return Ok(out);
                }
                axis -= 1;
                if cur[axis] < self.bounds[axis].1 {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = self.bounds[axis].0;
            }
        }
    }

    /// The smallest box containing both this box and its reflection through
    /// the origin. Inverse witnesses live in the negative region, so the
    /// closure oracles quantify over this hull even when asked about a
    /// nonnegative box.
    #[must_use]
    pub fn symmetric_hull(&self) -> Box {
        Box {
            bounds: self
                .bounds
                .iter()
                .map(|(lo, hi)| ((*lo).min(-hi), (*hi).max(-lo)))
                .collect(),
        }
    }

    /// Whether a point lies inside the box.
    #[must_use]
    pub fn contains(&self, v: &ValueVector) -> bool {
        v.len() == self.bounds.len()
            && v.iter()
                .zip(self.bounds.iter())
                .all(|(c, (lo, hi))| lo <= c && c <= hi)
    }
}

/// The box point cap, honoring the `STARFORGE_BOX_CAP` override.
#[must_use]
pub fn effective_cap() -> u64 {
    std::env::var(BOX_CAP_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_BOX_CAP)
}

/// Box points belonging to a staircase (membership is already primitive;
/// this is the base case the other oracles build on).
pub fn members_in_box(
    s: &Staircase,
    bx: &Box,
    cap: u64,
) -> Result<BTreeSet<ValueVector>, OracleError> {
    let mut out = BTreeSet::new();
    for p in bx.points(cap)? {
        if s.member(&p)? {
            out.insert(p);
        }
    }
    Ok(out)
}

/// Oracle for the intersection: points in both operands.
pub fn intersect_in_box(
    a: &Staircase,
    b: &Staircase,
    bx: &Box,
    cap: u64,
) -> Result<BTreeSet<ValueVector>, OracleError> {
    let mut out = BTreeSet::new();
    for p in bx.points(cap)? {
        if a.member(&p)? && b.member(&p)? {
            out.insert(p);
        }
    }
    Ok(out)
}

/// Oracle for the fractional colon `(a : b)`: points `v` such that
/// `v + b'` lies in `a` for every box point `b'` of `b`.
pub fn colon_in_box(
    a: &Staircase,
    b: &Staircase,
    bx: &Box,
    cap: u64,
) -> Result<BTreeSet<ValueVector>, OracleError> {
    let b_points = members_in_box(b, bx, cap)?;
    let mut out = BTreeSet::new();
    'point: for v in bx.points(cap)? {
        for bp in &b_points {
            let w = values::add(&v, bp, a.group()).map_err(StaircaseError::Value)?;
            if !a.member(&w)? {
                continue 'point;
            }
        }
        out.insert(v);
    }
    Ok(out)
}

/// Oracle for the fractional inverse `(ring : a)`.
pub fn inverse_in_box(
    a: &Staircase,
    bx: &Box,
    cap: u64,
) -> Result<BTreeSet<ValueVector>, OracleError> {
    let ring = Staircase::ring(a.group().clone());
    colon_in_box(&ring, a, bx, cap)
}

/// Oracle for the divisorial closure: points `x` such that `x + w` lies in
/// the ring for every box point `w` of the inverse.
pub fn v_closure_in_box(
    a: &Staircase,
    bx: &Box,
    cap: u64,
) -> Result<BTreeSet<ValueVector>, OracleError> {
    let hull = bx.symmetric_hull();
    let inv = inverse_in_box(a, &hull, cap)?;
    let ring = Staircase::ring(a.group().clone());
    let mut out = BTreeSet::new();
    'point: for x in bx.points(cap)? {
        for w in &inv {
            let s = values::add(&x, w, a.group()).map_err(StaircaseError::Value)?;
            if !ring.member(&s)? {
                continue 'point;
            }
        }
        out.insert(x);
    }
    Ok(out)
}

/// Compare a computed staircase against an oracle point set: exact equality
/// of membership over every box point. Returns the first disagreeing point.
pub fn agree_on_box(
    computed: &Staircase,
    oracle_points: &BTreeSet<ValueVector>,
    bx: &Box,
    cap: u64,
) -> Result<Option<ValueVector>, OracleError> {
    for p in bx.points(cap)? {
        let alg = computed.member(&p)?;
        let orc = oracle_points.contains(&p);
        if alg != orc {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::values::ValueGroupDesc;

    fn sc(g: ValueGroupDesc, gens: &[&[i64]]) -> Staircase {
        Staircase::new(g, gens.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    #[test]
    fn box_points_and_cap() {
        let bx = Box::new(vec![(-1, 1), (0, 2)]).unwrap();
        assert_eq!(bx.point_count(), 9);
        assert_eq!(bx.points(100).unwrap().len(), 9);
        assert!(matches!(
            bx.points(5),
            Err(OracleError::BoxTooLarge { points: 9, cap: 5 })
        ));
    }

    #[test]
    fn colon_matches_on_documented_example_box() {
        let g = ValueGroupDesc::componentwise_n(2);
        let m = sc(g.clone(), &[&[1, 0], &[0, 1]]);
        let x = sc(g, &[&[1, 0]]);
        let bx = Box::new(vec![(-3, 3), (-3, 3)]).unwrap();
        let oracle = colon_in_box(&m, &x, &bx, DEFAULT_BOX_CAP).unwrap();
        let computed = m.colon(&x, true).unwrap();
        assert_eq!(
            agree_on_box(&computed, &oracle, &bx, DEFAULT_BOX_CAP).unwrap(),
            None
        );
    }

    #[test]
    fn intersect_matches_on_box() {
        let g = ValueGroupDesc::componentwise_n(2);
        let a = sc(g.clone(), &[&[1, 0]]);
        let b = sc(g, &[&[0, 1]]);
        let bx = Box::new(vec![(0, 8), (0, 8)]).unwrap();
        let oracle = intersect_in_box(&a, &b, &bx, DEFAULT_BOX_CAP).unwrap();
        let computed = a.intersect(&b).unwrap();
        assert_eq!(
            agree_on_box(&computed, &oracle, &bx, DEFAULT_BOX_CAP).unwrap(),
            None
        );
    }

    #[test]
    fn semigroup_inverse_matches_on_box() {
        let g = ValueGroupDesc::numerical_semigroup(vec![2, 3]).unwrap();
        let max_ideal = sc(g, &[&[2], &[3]]);
        let bx = Box::new(vec![(-5, 10)]).unwrap();
        let oracle = inverse_in_box(&max_ideal, &bx, DEFAULT_BOX_CAP).unwrap();
        let computed = max_ideal.inverse().unwrap();
        assert_eq!(
            agree_on_box(&computed, &oracle, &bx, DEFAULT_BOX_CAP).unwrap(),
            None
        );
    }

    #[test]
    fn v_closure_principal_is_fixed() {
        let g = ValueGroupDesc::componentwise_n(2);
        let p = sc(g, &[&[2, 3]]);
        let bx = Box::new(vec![(0, 8), (0, 8)]).unwrap();
        let oracle = v_closure_in_box(&p, &bx, DEFAULT_BOX_CAP).unwrap();
        assert_eq!(
            agree_on_box(&p, &oracle, &bx, DEFAULT_BOX_CAP).unwrap(),
            None
        );
    }
}
