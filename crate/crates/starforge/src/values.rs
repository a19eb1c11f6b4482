//! Value groups and monoids underlying the atoms of a domain model.
//!
//! Four kinds are supported, and deliberately nothing else:
//!
//! * `LexZ(n)` — the lexicographically ordered group `Z^n` (first coordinate
//!   dominates). This is the value group of a rank-`n` discrete valuation.
//! * `RationalSubgroup(dens)` — the subgroup of `Q` generated by `1/d` for
//!   `d` in a finite denominator set. Totally ordered of rank 1. Elements are
//!   stored as integer multiples of `1/lcm(dens)`, so all arithmetic stays in
//!   `i64`.
//! * `ComponentwiseN(n)` — the monoid `N^n` under the componentwise partial
//!   order; the value monoid of an `n`-variable monomial atom.
//! * `NumericalSemigroup(gens)` — a numerical semigroup with coprime
//!   generators (gcd 1), ordered as integers but with monoid structure used
//!   for staircase closure.
//!
//! All arithmetic is exact; there is no floating point anywhere in this crate.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An element of a value group or monoid: a coordinate tuple.
///
/// Scalar kinds use arity 1. For `RationalSubgroup` the single coordinate is
/// the numerator over the fixed common denominator. Fractional staircase
/// contexts allow negative coordinates even for monoid kinds (the vector then
/// lives in the enveloping group).
pub type ValueVector = Vec<i64>;

/// Description of a value group or monoid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValueGroupDesc {
    /// `Z^n` under lexicographic order.
    LexZ { n: usize },
    /// Finitely generated subgroup of `Q` given by a denominator set.
    RationalSubgroup { denominators: Vec<u64> },
    /// `N^n` under componentwise order.
    ComponentwiseN { n: usize },
    /// Numerical semigroup with the given coprime generators.
    NumericalSemigroup { generators: Vec<u64> },
}

/// Result of comparing two value vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueOrdering {
    Less,
    Equal,
    Greater,
    /// Only possible for partially ordered kinds (`ComponentwiseN`).
    Incomparable,
}

impl ValueOrdering {
    /// `true` when `self` is `Less` or `Equal` (i.e. a ≤ b was established).
    #[must_use]
    pub fn le(self) -> bool {
        matches!(self, ValueOrdering::Less | ValueOrdering::Equal)
    }

    /// `true` when `self` is `Greater` or `Equal`.
    #[must_use]
    pub fn ge(self) -> bool {
        matches!(self, ValueOrdering::Greater | ValueOrdering::Equal)
    }
}

impl From<Ordering> for ValueOrdering {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => ValueOrdering::Less,
            Ordering::Equal => ValueOrdering::Equal,
            Ordering::Greater => ValueOrdering::Greater,
        }
    }
}

/// Errors raised by value arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValueError {
    #[error("value vector has arity {got}, group expects {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("negate is not defined on a monoid kind without the fractional flag")]
    NegateOnMonoid,
    #[error("min_total is only defined for totally ordered kinds")]
    MinOnPartialOrder,
    #[error("min_total of an empty set")]
    EmptySet,
    #[error("index {0} is not a member of the convex-subgroup chain")]
    NotInConvexChain(usize),
    #[error("quotient_by_convex requires a totally ordered group")]
    QuotientOnPartialOrder,
    #[error("numerical semigroup generators must be nonzero with gcd 1")]
    BadSemigroupGenerators,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ValueGroupDesc {
    /// Convenience constructor for `LexZ`.
    #[must_use]
    pub fn lex_z(n: usize) -> Self {
        ValueGroupDesc::LexZ { n }
    }

    /// Convenience constructor for `ComponentwiseN`.
    #[must_use]
    pub fn componentwise_n(n: usize) -> Self {
        ValueGroupDesc::ComponentwiseN { n }
    }

    /// Convenience constructor for a numerical semigroup; validates gcd 1.
    pub fn numerical_semigroup(generators: Vec<u64>) -> Result<Self, ValueError> {
        if generators.is_empty() || generators.contains(&0) {
            return Err(ValueError::BadSemigroupGenerators);
        }
        let g = generators.iter().copied().fold(0, gcd);
        if g != 1 {
            return Err(ValueError::BadSemigroupGenerators);
        }
        Ok(ValueGroupDesc::NumericalSemigroup { generators })
    }

    /// Number of coordinates of a conforming `ValueVector`.
    #[must_use]
    pub fn arity(&self) -> usize {
        match self {
            ValueGroupDesc::LexZ { n } | ValueGroupDesc::ComponentwiseN { n } => *n,
            ValueGroupDesc::RationalSubgroup { .. } | ValueGroupDesc::NumericalSemigroup { .. } => {
                1
            }
        }
    }

    /// Whether the order is total.
    #[must_use]
    pub fn is_totally_ordered(&self) -> bool {
        !matches!(self, ValueGroupDesc::ComponentwiseN { .. })
    }

    /// Whether this kind is a monoid (no negatives without the fractional flag).
    #[must_use]
    pub fn is_monoid(&self) -> bool {
        matches!(
            self,
            ValueGroupDesc::ComponentwiseN { .. } | ValueGroupDesc::NumericalSemigroup { .. }
        )
    }

    /// Rank: the length of the convex-subgroup chain minus one. This is the
    /// Krull dimension contributed by a valuation atom with this value group.
    #[must_use]
    pub fn rank(&self) -> usize {
        match self {
            ValueGroupDesc::LexZ { n } => *n,
            _ => 1,
        }
    }

    fn check_arity(&self, v: &ValueVector) -> Result<(), ValueError> {
        if v.len() != self.arity() {
            return Err(ValueError::ArityMismatch {
                expected: self.arity(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// The fixed common denominator for `RationalSubgroup`; 1 otherwise.
    #[must_use]
    pub fn common_denominator(&self) -> u64 {
        match self {
            ValueGroupDesc::RationalSubgroup { denominators } => denominators
                .iter()
                .copied()
                .fold(1u64, |l, d| l / gcd(l, d.max(1)) * d.max(1)),
            _ => 1,
        }
    }

    /// Generators of a `NumericalSemigroup`, if this is one.
    #[must_use]
    pub fn semigroup_generators(&self) -> Option<&[u64]> {
        match self {
            ValueGroupDesc::NumericalSemigroup { generators } => Some(generators),
            _ => None,
        }
    }

    /// Membership of a nonnegative integer in the numerical semigroup.
    /// Panics if called on another kind.
    #[must_use]
    pub fn semigroup_contains(&self, v: i64) -> bool {
        let gens = self
            .semigroup_generators()
            .expect("semigroup_contains on non-semigroup kind");
        if v < 0 {
            return false;
        }
        if v == 0 {
            return true;
        }
        let v = v as usize;
        let mut reach = vec![false; v + 1];
        reach[0] = true;
        for i in 1..=v {
            for &g in gens {
                let g = g as usize;
                if g <= i && reach[i - g] {
                    reach[i] = true;
                    break;
                }
            }
        }
        reach[v]
    }

    /// Smallest integer `c` such that every integer `>= c` lies in the
    /// numerical semigroup (the conductor; Frobenius number + 1).
    #[must_use]
    pub fn semigroup_conductor(&self) -> i64 {
        let gens = self
            .semigroup_generators()
            .expect("semigroup_conductor on non-semigroup kind");
        let bound = gens.iter().map(|&g| g as i64).min().unwrap_or(1)
            * gens.iter().map(|&g| g as i64).max().unwrap_or(1);
        let mut c = 0;
        for v in 0..=bound {
            if !self.semigroup_contains(v) {
                c = v + 1;
            }
        }
        c
    }
}

/// Compare two conforming vectors under the group's order.
pub fn compare(
    a: &ValueVector,
    b: &ValueVector,
    g: &ValueGroupDesc,
) -> Result<ValueOrdering, ValueError> {
    g.check_arity(a)?;
    g.check_arity(b)?;
    match g {
        ValueGroupDesc::LexZ { .. } => Ok(a.cmp(b).into()),
        ValueGroupDesc::RationalSubgroup { .. } | ValueGroupDesc::NumericalSemigroup { .. } => {
            Ok(a[0].cmp(&b[0]).into())
        }
        ValueGroupDesc::ComponentwiseN { .. } => {
            let mut le = true;
            let mut ge = true;
            for (x, y) in a.iter().zip(b.iter()) {
                if x > y {
                    le = false;
                }
                if x < y {
                    ge = false;
                }
            }
            Ok(match (le, ge) {
                (true, true) => ValueOrdering::Equal,
                (true, false) => ValueOrdering::Less,
                (false, true) => ValueOrdering::Greater,
                (false, false) => ValueOrdering::Incomparable,
            })
        }
    }
}

/// Componentwise sum.
pub fn add(a: &ValueVector, b: &ValueVector, g: &ValueGroupDesc) -> Result<ValueVector, ValueError> {
    g.check_arity(a)?;
    g.check_arity(b)?;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x + y).collect())
}

/// Componentwise negation. For monoid kinds this is only legal in a
/// fractional context (the result lives in the enveloping group).
pub fn negate(
    a: &ValueVector,
    g: &ValueGroupDesc,
    fractional: bool,
) -> Result<ValueVector, ValueError> {
    g.check_arity(a)?;
    if g.is_monoid() && !fractional {
        return Err(ValueError::NegateOnMonoid);
    }
    Ok(a.iter().map(|x| -x).collect())
}

/// Order-minimum of a nonempty set; totally ordered kinds only.
pub fn min_total(
    set: &[ValueVector],
    g: &ValueGroupDesc,
) -> Result<ValueVector, ValueError> {
    if !g.is_totally_ordered() {
        return Err(ValueError::MinOnPartialOrder);
    }
    let mut best: Option<&ValueVector> = None;
    for v in set {
        g.check_arity(v)?;
        best = Some(match best {
            None => v,
            Some(b) => {
                if compare(v, b, g)? == ValueOrdering::Less {
                    v
                } else {
                    b
                }
            }
        });
    }
    best.cloned().ok_or(ValueError::EmptySet)
}

/// The convex-subgroup chain of a totally ordered group, from the trivial
/// subgroup up to the whole group. For `LexZ(n)` the member of rank `k` is
/// the suffix subgroup `{0}^(n-k) x Z^k`; the chain has exactly `n + 1`
/// members. Scalar kinds have the two-member chain `0 < G`.
///
/// Members are identified by their rank (0 ..= rank(G)).
#[must_use]
pub fn convex_chain_len(g: &ValueGroupDesc) -> usize {
    g.rank() + 1
}

/// Quotient of a totally ordered group by the convex-chain member of rank
/// `h`, with the induced order. `rank(result) = rank(g) - h`.
pub fn quotient_by_convex(g: &ValueGroupDesc, h: usize) -> Result<ValueGroupDesc, ValueError> {
    if !g.is_totally_ordered() {
        return Err(ValueError::QuotientOnPartialOrder);
    }
    if h > g.rank() {
        return Err(ValueError::NotInConvexChain(h));
    }
    match g {
        ValueGroupDesc::LexZ { n } => Ok(ValueGroupDesc::LexZ { n: n - h }),
        // Scalar kinds: quotient by the trivial subgroup is the identity,
        // quotient by the whole group is the zero group (LexZ(0)).
        _ => {
            if h == 0 {
                Ok(g.clone())
            } else {
                Ok(ValueGroupDesc::LexZ { n: 0 })
            }
        }
    }
}

/// Project a vector of `LexZ(n)` to the quotient by the rank-`h` convex
/// member (drops the last `h` coordinates).
pub fn project_to_quotient(
    v: &ValueVector,
    g: &ValueGroupDesc,
    h: usize,
) -> Result<ValueVector, ValueError> {
    g.check_arity(v)?;
    if h > g.rank() {
        return Err(ValueError::NotInConvexChain(h));
    }
    match g {
        ValueGroupDesc::LexZ { n } => Ok(v[..n - h].to_vec()),
        _ => {
            if h == 0 {
                Ok(v.clone())
            } else {
                Ok(vec![])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_first_coordinate_dominates() {
        let g = ValueGroupDesc::lex_z(2);
        assert_eq!(
            compare(&vec![1, 0], &vec![0, 5], &g).unwrap(),
            ValueOrdering::Greater
        );
        assert_eq!(
            compare(&vec![0, 3], &vec![0, 5], &g).unwrap(),
            ValueOrdering::Less
        );
    }

    #[test]
    fn componentwise_incomparable() {
        let g = ValueGroupDesc::componentwise_n(2);
        assert_eq!(
            compare(&vec![1, 0], &vec![0, 1], &g).unwrap(),
            ValueOrdering::Incomparable
        );
    }

    #[test]
    fn add_and_min() {
        let g = ValueGroupDesc::lex_z(2);
        assert_eq!(add(&vec![1, 2], &vec![0, 3], &g).unwrap(), vec![1, 5]);
        assert_eq!(
            min_total(&[vec![1, 0], vec![0, 5]], &g).unwrap(),
            vec![0, 5]
        );
    }

    #[test]
    fn negate_needs_fractional_flag_on_monoids() {
        let g = ValueGroupDesc::numerical_semigroup(vec![2, 3]).unwrap();
        assert_eq!(negate(&vec![3], &g, false), Err(ValueError::NegateOnMonoid));
        assert_eq!(negate(&vec![3], &g, true).unwrap(), vec![-3]);
    }

    #[test]
    fn lex_quotients() {
        let g2 = ValueGroupDesc::lex_z(2);
        let g3 = ValueGroupDesc::lex_z(3);
        assert_eq!(quotient_by_convex(&g2, 1).unwrap(), ValueGroupDesc::lex_z(1));
        assert_eq!(quotient_by_convex(&g3, 2).unwrap(), ValueGroupDesc::lex_z(1));
        assert_eq!(quotient_by_convex(&g2, 0).unwrap(), g2);
        assert_eq!(convex_chain_len(&g2), 3);
    }

    #[test]
    fn semigroup_membership_and_conductor() {
        let s = ValueGroupDesc::numerical_semigroup(vec![2, 3]).unwrap();
        assert!(s.semigroup_contains(0));
        assert!(!s.semigroup_contains(1));
        assert!(s.semigroup_contains(5));
        assert_eq!(s.semigroup_conductor(), 2);
        let s = ValueGroupDesc::numerical_semigroup(vec![3, 5]).unwrap();
        assert!(!s.semigroup_contains(7));
        assert_eq!(s.semigroup_conductor(), 8);
    }

    #[test]
    fn bad_semigroup_rejected() {
        assert!(ValueGroupDesc::numerical_semigroup(vec![2, 4]).is_err());
        assert!(ValueGroupDesc::numerical_semigroup(vec![]).is_err());
    }

    #[test]
    fn rank_additivity_over_convex_chain() {
        for n in 1..=4 {
            let g = ValueGroupDesc::lex_z(n);
            for h in 0..=n {
                let q = quotient_by_convex(&g, h).unwrap();
                assert_eq!(h + q.rank(), n);
            }
        }
    }
}
