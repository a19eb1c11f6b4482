//! Exact computer algebra for a decidable fragment of fractional ideals:
//! staircase arithmetic over value monoids, compositional domain models
//! (valuation atoms, monomial atoms, pullbacks, towers), the d/v/t/w star
//! operations, and a citation-tagged classifier for ring-theoretic
//! properties, all validated against a brute-force box oracle.

pub mod classify;
pub mod domain;
pub mod fragment;
pub mod localize;
pub mod oracle;
pub mod staircase;
pub mod star;
pub mod values;
pub mod verdict;
