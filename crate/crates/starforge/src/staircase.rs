//! Staircases: finitely generated upward-closed value sets.
//!
//! A staircase is the computational model of a monomial (fractional) ideal:
//! the set of values dominated by at least one generator, where "dominates"
//! means the group order for totally ordered kinds, the componentwise order
//! for `ComponentwiseN`, and translated semigroup membership for
//! `NumericalSemigroup` (`v` is in `up(g)` iff `v - g` lies in the
//! semigroup).
//!
//! Generators are kept in normal form: a lexicographically sorted antichain
//! of minimal elements. Fractional staircases may have negative coordinates;
//! they live in the enveloping group of the monoid. The zero ideal is not
//! representable by design — every operation here preserves nonemptiness.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::values::{self, ValueGroupDesc, ValueOrdering, ValueVector};

/// Errors raised by staircase arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum StaircaseError {
    #[error("staircase must have at least one generator (the zero ideal is not representable)")]
    Empty,
    #[error("operands belong to different value groups")]
    GroupMismatch,
    #[error(transparent)]
    Value(#[from] values::ValueError),
}

/// A finitely generated upward-closed value set in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Staircase {
    group: ValueGroupDesc,
    generators: Vec<ValueVector>,
}

impl Staircase {
    /// Build a staircase from any nonempty generator list; normalizes.
    pub fn new(group: ValueGroupDesc, gens: Vec<ValueVector>) -> Result<Self, StaircaseError> {
        if gens.is_empty() {
            return Err(StaircaseError::Empty);
        }
        for g in &gens {
            if g.len() != group.arity() {
                return Err(StaircaseError::Value(values::ValueError::ArityMismatch {
                    expected: group.arity(),
                    got: g.len(),
                }));
            }
        }
        let mut s = Staircase {
            group,
            generators: gens,
        };
        s.normalize();
        Ok(s)
    }

    /// The staircase of the ring itself: generated by the zero vector.
    #[must_use]
    pub fn ring(group: ValueGroupDesc) -> Self {
        let z = vec![0; group.arity()];
        Staircase {
            group,
            generators: vec![z],
        }
    }

    /// A principal staircase.
    pub fn principal(group: ValueGroupDesc, gen: ValueVector) -> Result<Self, StaircaseError> {
        Staircase::new(group, vec![gen])
    }

    #[must_use]
    pub fn group(&self) -> &ValueGroupDesc {
        &self.group
    }

    /// The unique minimal generator antichain, sorted lexicographically.
    #[must_use]
    pub fn minimal_generators(&self) -> &[ValueVector] {
        &self.generators
    }

    /// Whether the staircase is principal (a single generator).
    #[must_use]
    pub fn is_principal(&self) -> bool {
        self.generators.len() == 1
    }

    /// Whether this is exactly the ring staircase.
    #[must_use]
    pub fn is_ring(&self) -> bool {
        self.generators.len() == 1 && self.generators[0].iter().all(|&c| c == 0)
    }

    /// Does `g`'s upward set contain `v`?
    fn dominates(&self, g: &ValueVector, v: &ValueVector) -> bool {
        match &self.group {
            ValueGroupDesc::NumericalSemigroup { .. } => self.group.semigroup_contains(v[0] - g[0]),
            _ => values::compare(v, g, &self.group)
                .map(ValueOrdering::ge)
                .unwrap_or(false),
        }
    }

    /// Ideal membership: `v` is dominated by some generator.
    pub fn member(&self, v: &ValueVector) -> Result<bool, StaircaseError> {
        if v.len() != self.group.arity() {
            return Err(StaircaseError::Value(values::ValueError::ArityMismatch {
                expected: self.group.arity(),
                got: v.len(),
            }));
        }
        Ok(self.generators.iter().any(|g| self.dominates(g, v)))
    }

    /// Subset test: every generator of `self` lies in `other`.
    pub fn subset_of(&self, other: &Staircase) -> Result<bool, StaircaseError> {
        if self.group != other.group {
            return Err(StaircaseError::GroupMismatch);
        }
        for g in &self.generators {
            if !other.member(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn normalize(&mut self) {
        let mut keep: Vec<ValueVector> = Vec::new();
        // Sorting first makes the dominance sweep deterministic and gives the
        // canonical lexicographic generator order for free.
        self.generators.sort();
        self.generators.dedup();
        for g in std::mem::take(&mut self.generators) {
            if keep.iter().any(|k| self.dominates_in(&k.clone(), &g)) {
                continue;
            }
            keep.retain(|k| !self.dominates_in(&g, k));
            keep.push(g);
        }
        keep.sort();
        self.generators = keep;
    }

    // Same as `dominates` but callable during normalize (no self-borrow issue).
    fn dominates_in(&self, g: &ValueVector, v: &ValueVector) -> bool {
        match &self.group {
            ValueGroupDesc::NumericalSemigroup { .. } => self.group.semigroup_contains(v[0] - g[0]),
            _ => values::compare(v, g, &self.group)
                .map(ValueOrdering::ge)
                .unwrap_or(false),
        }
    }

    fn same_group(&self, other: &Staircase) -> Result<(), StaircaseError> {
        if self.group != other.group {
            return Err(StaircaseError::GroupMismatch);
        }
        Ok(())
    }

    /// Ideal sum: union of generators.
    pub fn sum(&self, other: &Staircase) -> Result<Staircase, StaircaseError> {
        self.same_group(other)?;
        let gens = self
            .generators
            .iter()
            .chain(other.generators.iter())
            .cloned()
            .collect();
        Staircase::new(self.group.clone(), gens)
    }

    /// Ideal product: pairwise generator sums.
    pub fn product(&self, other: &Staircase) -> Result<Staircase, StaircaseError> {
        self.same_group(other)?;
        let mut gens = Vec::new();
        for a in &self.generators {
            for b in &other.generators {
                gens.push(values::add(a, b, &self.group)?);
            }
        }
        Staircase::new(self.group.clone(), gens)
    }

    /// Translate by `t` (multiply the monomial ideal by one monomial).
    pub fn translate(&self, t: &ValueVector) -> Result<Staircase, StaircaseError> {
        let gens = self
            .generators
            .iter()
            .map(|g| values::add(g, t, &self.group))
            .collect::<Result<Vec<_>, _>>()?;
        Staircase::new(self.group.clone(), gens)
    }

    /// Ideal intersection.
    pub fn intersect(&self, other: &Staircase) -> Result<Staircase, StaircaseError> {
        self.same_group(other)?;
        match &self.group {
            ValueGroupDesc::ComponentwiseN { .. } => {
                let mut gens = Vec::new();
                for a in &self.generators {
                    for b in &other.generators {
                        gens.push(a.iter().zip(b.iter()).map(|(x, y)| *x.max(y)).collect());
                    }
                }
                Staircase::new(self.group.clone(), gens)
            }
            ValueGroupDesc::NumericalSemigroup { .. } => {
                let sg = self.group.clone();
                self.sweep_predicate_1d(|v| {
                    Ok(self.member(&vec![v])? && other.member(&vec![v])?)
                }, {
                    // Everything at or above both staircases' guaranteed-full
                    // thresholds is a member of the intersection.
                    let c = sg.semigroup_conductor();
                    let hi_a = self.generators.iter().map(|g| g[0]).max().unwrap();
                    let hi_b = other.generators.iter().map(|g| g[0]).max().unwrap();
                    hi_a.max(hi_b) + c
                }, {
                    let lo_a = self.generators.iter().map(|g| g[0]).min().unwrap();
                    let lo_b = other.generators.iter().map(|g| g[0]).min().unwrap();
                    lo_a.max(lo_b)
                })
            }
            // Totally ordered group kinds: both sides are principal after
            // normalization; the intersection is the larger generator.
            _ => {
                let a = &self.generators[0];
                let b = &other.generators[0];
                let g = if values::compare(a, b, &self.group)?.ge() {
                    a.clone()
                } else {
                    b.clone()
                };
                Staircase::principal(self.group.clone(), g)
            }
        }
    }

    /// Colon ideal `(self : other) = { v | v + other ⊆ self }`.
    ///
    /// With `fractional` set the result lives in the enveloping group;
    /// without it the result is intersected with the ring staircase.
    pub fn colon(&self, other: &Staircase, fractional: bool) -> Result<Staircase, StaircaseError> {
        self.same_group(other)?;
        let res = match &self.group {
            ValueGroupDesc::ComponentwiseN { .. } => {
                // Intersection over the translates A - b for b in gens(B).
                let mut acc: Option<Staircase> = None;
                for b in &other.generators {
                    let neg = values::negate(b, &self.group, true)?;
                    let t = self.translate(&neg)?;
                    acc = Some(match acc {
                        None => t,
                        Some(a) => a.intersect(&t)?,
                    });
                }
                acc.expect("other has generators")
            }
            ValueGroupDesc::NumericalSemigroup { .. } => {
                let c = self.group.semigroup_conductor();
                let hi_a = self.generators.iter().map(|g| g[0]).max().unwrap();
                let lo_a = self.generators.iter().map(|g| g[0]).min().unwrap();
                let bs: Vec<i64> = other.generators.iter().map(|g| g[0]).collect();
                let b_min = *bs.iter().min().unwrap();
                let b_max = *bs.iter().max().unwrap();
                self.sweep_predicate_1d(
                    |v| {
                        for &b in &bs {
                            if !self.member(&vec![v + b])? {
                                return Ok(false);
                            }
                        }
                        Ok(true)
                    },
                    hi_a + c - b_min,
                    lo_a - b_max,
                )?
            }
            // Totally ordered group kinds: principal minus principal.
            _ => {
                let a = &self.generators[0];
                let b = &other.generators[0];
                let g: ValueVector = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
                Staircase::principal(self.group.clone(), g)?
            }
        };
        if fractional {
            Ok(res)
        } else {
            res.clip_to_ring()
        }
    }

    /// Intersect with the ring staircase (drop the fractional part).
    fn clip_to_ring(&self) -> Result<Staircase, StaircaseError> {
        match &self.group {
            ValueGroupDesc::ComponentwiseN { .. } => {
                let gens = self
                    .generators
                    .iter()
                    .map(|g| g.iter().map(|&c| c.max(0)).collect())
                    .collect();
                Staircase::new(self.group.clone(), gens)
            }
            ValueGroupDesc::NumericalSemigroup { .. } => {
                let c = self.group.semigroup_conductor();
                let hi = self.generators.iter().map(|g| g[0]).max().unwrap();
                self.sweep_predicate_1d(
                    |v| Ok(self.member(&vec![v])? && self.group.semigroup_contains(v)),
                    hi.max(0) + c,
                    0,
                )
            }
            _ => {
                let g = self.generators[0].iter().map(|&c| c.max(0)).collect();
                Staircase::principal(self.group.clone(), g)
            }
        }
    }

    /// Fractional inverse `(ring : self)`.
    pub fn inverse(&self) -> Result<Staircase, StaircaseError> {
        Staircase::ring(self.group.clone()).colon(self, true)
    }

    /// Divisorial closure: double inverse.
    pub fn v_closure(&self) -> Result<Staircase, StaircaseError> {
        self.inverse()?.inverse()
    }

    /// Extract the minimal generators of an upward-closed 1-dimensional set
    /// given by a predicate, for numerical-semigroup staircases.
    ///
    /// `full_from` must be a bound such that every `v >= full_from` satisfies
    /// the predicate; `lo` a bound below which nothing does. A greedy
    /// ascending sweep up to `full_from + conductor` then finds every minimal
    /// generator: any later member is a chosen generator plus a semigroup
    /// element.
    fn sweep_predicate_1d<F>(
        &self,
        pred: F,
        full_from: i64,
        lo: i64,
    ) -> Result<Staircase, StaircaseError>
    where
        F: Fn(i64) -> Result<bool, StaircaseError>,
    {
        let c = self.group.semigroup_conductor();
        let mut chosen: Vec<i64> = Vec::new();
        for v in lo..=(full_from + c) {
            if !pred(v)? {
                continue;
            }
            let dominated = chosen
                .iter()
                .any(|&g| self.group.semigroup_contains(v - g));
            if !dominated {
                chosen.push(v);
            }
        }
        Staircase::new(
            self.group.clone(),
            chosen.into_iter().map(|v| vec![v]).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nn(n: usize) -> ValueGroupDesc {
        ValueGroupDesc::componentwise_n(n)
    }

    fn sc(g: ValueGroupDesc, gens: &[&[i64]]) -> Staircase {
        Staircase::new(g, gens.iter().map(|g| g.to_vec()).collect()).unwrap()
    }

    #[test]
    fn membership_basics() {
        let s = sc(nn(2), &[&[1, 0], &[0, 1]]);
        assert!(s.member(&vec![2, 0]).unwrap());
        assert!(!s.member(&vec![0, 0]).unwrap());
    }

    #[test]
    fn semigroup_membership() {
        let g = ValueGroupDesc::numerical_semigroup(vec![2, 3]).unwrap();
        let s = sc(g, &[&[2]]);
        assert!(s.member(&vec![5]).unwrap()); // 5 = 2 + 3
        assert!(!s.member(&vec![3]).unwrap()); // 3 - 2 = 1 not in <2,3>
    }

    #[test]
    fn normal_form_drops_dominated() {
        let s = sc(nn(2), &[&[1, 0], &[2, 0], &[0, 1]]);
        assert_eq!(s.minimal_generators(), &[vec![0, 1], vec![1, 0]]);
        let g = ValueGroupDesc::lex_z(1);
        let s = sc(g, &[&[3], &[5]]);
        assert_eq!(s.minimal_generators(), &[vec![3]]);
        let g = ValueGroupDesc::numerical_semigroup(vec![2, 3]).unwrap();
        let s = sc(g, &[&[2], &[3]]);
        assert_eq!(s.minimal_generators(), &[vec![2], vec![3]]);
    }

    #[test]
    fn products_and_intersections() {
        let a = sc(nn(2), &[&[1, 0]]);
        let b = sc(nn(2), &[&[0, 1]]);
        assert_eq!(a.product(&b).unwrap().minimal_generators(), &[vec![1, 1]]);
        assert_eq!(a.intersect(&b).unwrap().minimal_generators(), &[vec![1, 1]]);
        let g = ValueGroupDesc::lex_z(1);
        let a = sc(g.clone(), &[&[3]]);
        let b = sc(g, &[&[5]]);
        assert_eq!(a.intersect(&b).unwrap().minimal_generators(), &[vec![5]]);
    }

    #[test]
    fn colon_examples() {
        let m = sc(nn(2), &[&[1, 0], &[0, 1]]);
        let x = sc(nn(2), &[&[1, 0]]);
        let q = m.colon(&x, true).unwrap();
        assert_eq!(q.minimal_generators(), &[vec![-1, 1], vec![0, 0]]);
        let g = ValueGroupDesc::lex_z(1);
        let a = sc(g.clone(), &[&[3]]);
        let b = sc(g, &[&[1]]);
        assert_eq!(
            a.colon(&b, true).unwrap().minimal_generators(),
            &[vec![2]]
        );
    }

    #[test]
    fn semigroup_colon_and_inverse() {
        let g = ValueGroupDesc::numerical_semigroup(vec![2, 3]).unwrap();
        let two = sc(g.clone(), &[&[2]]);
        let max_ideal = sc(g.clone(), &[&[2], &[3]]);
        // v + b must land in 2 + S for every b in the maximal ideal; v = 0
        // fails because 0 + 3 = 3 has no decomposition 2 + s with s in S.
        let q = two.colon(&max_ideal, true).unwrap();
        assert_eq!(q.minimal_generators(), &[vec![2], vec![3]]);
        let inv = max_ideal.inverse().unwrap();
        assert_eq!(inv.minimal_generators(), &[vec![0], vec![1]]);
        // The maximal ideal of a 1-dimensional local model is divisorial.
        let v = max_ideal.v_closure().unwrap();
        assert_eq!(v, max_ideal);
    }

    #[test]
    fn inverse_and_v_closure_in_n2() {
        let m = sc(nn(2), &[&[1, 0], &[0, 1]]);
        assert!(m.inverse().unwrap().is_ring());
        assert!(m.v_closure().unwrap().is_ring());
        let p = sc(nn(2), &[&[2, 3]]);
        assert_eq!(p.inverse().unwrap().minimal_generators(), &[vec![-2, -3]]);
        assert_eq!(p.v_closure().unwrap(), p);
    }

    #[test]
    fn zero_ideal_unrepresentable() {
        assert_eq!(
            Staircase::new(nn(2), vec![]).unwrap_err(),
            StaircaseError::Empty
        );
    }
}
