//! Compositional domain models.
//!
//! A domain description is an abstract syntax tree of atoms (labelled
//! fields, valuation atoms with a value group, monomial atoms) and
//! constructors (pullbacks/towers, the polynomial extension of a valuation
//! atom by a prime, localizations, Nagata rings). Building a description
//! validates it, flattens pullback chains into a tower of "stories" (top
//! story first), and synthesizes the spectrum poset, dimension, and
//! conductor bookkeeping.
//!
//! Fields are labels with a declared subfield lattice: no field arithmetic
//! is ever performed, every check needs only containment and properness of
//! residue-field subrings.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::staircase::Staircase;
use crate::values::{ValueGroupDesc, ValueVector};
use crate::verdict::Truth;

/// The monomial atom kinds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "monomial", rename_all = "snake_case")]
pub enum MonomialKind {
    /// `F[[X_1..X_n]]`.
    PowerSeries { vars: usize },
    /// `F[X_1..X_n]` localized at the irrelevant maximal ideal.
    LocalizedPolynomial { vars: usize },
    /// The semigroup ring `F[[S]]` of a numerical semigroup `S`.
    NumericalSemigroup { generators: Vec<u64> },
}

impl MonomialKind {
    #[must_use]
    pub fn dim(&self) -> usize {
        match self {
            MonomialKind::PowerSeries { vars } | MonomialKind::LocalizedPolynomial { vars } => {
                *vars
            }
            MonomialKind::NumericalSemigroup { .. } => 1,
        }
    }

    /// The value monoid of the atom's monomial fragment.
    pub fn staircase_group(&self) -> Result<ValueGroupDesc, BuildError> {
        match self {
            MonomialKind::PowerSeries { vars } | MonomialKind::LocalizedPolynomial { vars } => {
                Ok(ValueGroupDesc::componentwise_n(*vars))
            }
            MonomialKind::NumericalSemigroup { generators } => {
                ValueGroupDesc::numerical_semigroup(generators.clone())
                    .map_err(|_| BuildError::BadSemigroup)
            }
        }
    }

    /// Variable names for coordinate primes.
    #[must_use]
    pub fn var_names(&self) -> Vec<&'static str> {
        const NAMES: [&str; 4] = ["X", "Y", "Z", "W"];
        match self {
            MonomialKind::PowerSeries { vars } | MonomialKind::LocalizedPolynomial { vars } => {
                NAMES[..(*vars).min(4)].to_vec()
            }
            MonomialKind::NumericalSemigroup { .. } => vec![],
        }
    }
}

/// Abstract syntax of a domain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainDesc {
    /// A field, as an opaque label plus declared relations.
    Field {
        label: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        subfield_of: Vec<String>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        algebraically_closed: bool,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        real_closed: bool,
    },
    /// A valuation atom with the given value group.
    Valuation {
        group: ValueGroupDesc,
        residue_field: String,
        fraction_field: String,
    },
    /// A monomial atom over a coefficient field.
    Monomial {
        atom: MonomialKind,
        coefficient_field: String,
    },
    /// `D = preimage of R under the residue projection of the local ring T`.
    Pullback {
        t: Box<DomainDesc>,
        r: Box<DomainDesc>,
    },
    /// Sugar for an iterated pullback; stories are listed top first.
    Tower { stories: Vec<DomainDesc> },
    /// `V + X V_P[X]` for a valuation atom `V` and a nonzero nonmaximal
    /// prime `P` of height `prime_height`.
    PolyExt {
        group: ValueGroupDesc,
        prime_height: usize,
        residue_field: String,
        fraction_field: String,
    },
    /// Localization of a built model at a named prime (resolved at build
    /// time through rewrite rules).
    Localization {
        base: Box<DomainDesc>,
        prime: String,
    },
    /// The localization of `V_P[X]` at the extension of the distinguished
    /// prime; produced by localizing a `PolyExt` and usable directly.
    PolyExtLocal {
        group: ValueGroupDesc,
        prime_height: usize,
    },
    /// The Nagata ring of the base with respect to `d` or `v` contents.
    Nagata {
        base: Box<DomainDesc>,
        star: NagataStar,
    },
}

/// Which content condition the Nagata ring localizes by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NagataStar {
    D,
    V,
}

/// Build-time validation errors, with a node path for diagnostics.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("{path}: pullback base must be a local domain with a proper maximal ideal, not a field")]
    PullbackOverField { path: String },
    #[error("{path}: fraction field {sub} of the top part is not a declared subfield of the residue field {of}")]
    NotASubfield { path: String, sub: String, of: String },
    #[error("{path}: a field story must be a proper subfield of the residue field below it ({label} equals {residue})")]
    ImproperFieldStory {
        path: String,
        label: String,
        residue: String,
    },
    #[error("{path}: polynomial extension requires a valuation atom of rank >= 2 and a nonzero nonmaximal prime (rank {rank}, height {height})")]
    BadPolyExtPrime {
        path: String,
        rank: usize,
        height: usize,
    },
    #[error("numerical semigroup generators must be nonzero with gcd 1")]
    BadSemigroup,
    #[error("{path}: only one multivariate monomial story per tower is supported")]
    MultipleWideMonomialStories { path: String },
    #[error("{path}: value group kind not usable for a valuation atom")]
    BadValuationGroup { path: String },
    #[error("unknown prime {0} in localization")]
    UnknownPrime(String),
    #[error("prime {0} is a symbolic family; name a representative to localize there")]
    SymbolicFamily(String),
    #[error("localization at {0} is outside the supported rewrite rules")]
    UnsupportedLocalization(String),
    #[error("named ideal {name}: {reason}")]
    BadNamedIdeal { name: String, reason: String },
}

/// Subfield lattice over opaque field labels.
#[derive(Clone, Debug, Default)]
pub struct FieldTable {
    edges: BTreeSet<(String, String)>,
    algebraically_closed: BTreeSet<String>,
}

impl FieldTable {
    /// The built-in lattice: `Q < R < C`, `Q < Qbar < C`.
    #[must_use]
    pub fn with_builtins() -> Self {
        let mut t = FieldTable::default();
        for (a, b) in [
            ("Q", "R"),
            ("R", "C"),
            ("Q", "Qbar"),
            ("Qbar", "C"),
            ("Q", "C"),
        ] {
            t.add_edge(a, b);
        }
        t.algebraically_closed.insert("C".into());
        t.algebraically_closed.insert("Qbar".into());
        t
    }

    pub fn add_edge(&mut self, sub: &str, sup: &str) {
        self.edges.insert((sub.to_string(), sup.to_string()));
    }

    pub fn mark_algebraically_closed(&mut self, label: &str) {
        self.algebraically_closed.insert(label.to_string());
    }

    #[must_use]
    pub fn is_algebraically_closed(&self, label: &str) -> bool {
        self.algebraically_closed.contains(label)
    }

    /// Reflexive-transitive subfield check.
    #[must_use]
    pub fn is_subfield(&self, sub: &str, sup: &str) -> bool {
        if sub == sup {
            return true;
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![sub.to_string()];
        while let Some(cur) = stack.pop() {
            if cur == sup {
                return true;
            }
            if !seen.insert(cur.clone()) {
                continue;
            }
            for (a, b) in &self.edges {
                if *a == cur {
                    stack.push(b.clone());
                }
            }
        }
        false
    }

    #[must_use]
    pub fn is_proper_subfield(&self, sub: &str, sup: &str) -> bool {
        sub != sup && self.is_subfield(sub, sup)
    }
}

/// One story of a flattened tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Field {
        label: String,
        algebraically_closed: bool,
        real_closed: bool,
    },
    Valuation {
        group: ValueGroupDesc,
        residue: String,
        fraction: String,
    },
    Monomial {
        kind: MonomialKind,
        coeff: String,
    },
}

impl Atom {
    #[must_use]
    pub fn dim(&self) -> usize {
        match self {
            Atom::Field { .. } => 0,
            Atom::Valuation { group, .. } => group.rank(),
            Atom::Monomial { kind, .. } => kind.dim(),
        }
    }

    /// The value structure of the atom's monomial fragment, if any.
    #[must_use]
    pub fn staircase_group(&self) -> Option<ValueGroupDesc> {
        match self {
            Atom::Field { .. } => None,
            Atom::Valuation { group, .. } => Some(group.clone()),
            Atom::Monomial { kind, .. } => kind.staircase_group().ok(),
        }
    }

    /// Generators of the atom's maximal-ideal staircase.
    #[must_use]
    pub fn max_ideal_staircase(&self) -> Option<Staircase> {
        let g = self.staircase_group()?;
        let gens: Vec<ValueVector> = match &g {
            ValueGroupDesc::ComponentwiseN { n } => (0..*n)
                .map(|i| {
                    let mut v = vec![0; *n];
                    v[i] = 1;
                    v
                })
                .collect(),
            ValueGroupDesc::NumericalSemigroup { generators } => {
                generators.iter().map(|&x| vec![x as i64]).collect()
            }
            ValueGroupDesc::LexZ { n } => {
                let mut v = vec![0; *n];
                if *n > 0 {
                    v[*n - 1] = 1;
                }
                vec![v]
            }
            ValueGroupDesc::RationalSubgroup { .. } => vec![vec![1]],
        };
        Staircase::new(g, gens).ok()
    }

    /// Residue field label (the quotient by the atom's maximal ideal).
    #[must_use]
    pub fn residue_label(&self) -> String {
        match self {
            Atom::Field { label, .. } => label.clone(),
            Atom::Valuation { residue, .. } => residue.clone(),
            Atom::Monomial { coeff, .. } => coeff.clone(),
        }
    }

    /// Fraction field label.
    #[must_use]
    pub fn fraction_label(&self) -> String {
        match self {
            Atom::Field { label, .. } => label.clone(),
            Atom::Valuation { fraction, .. } => fraction.clone(),
            Atom::Monomial { kind, coeff } => match kind {
                MonomialKind::PowerSeries { vars } | MonomialKind::LocalizedPolynomial { vars } => {
                    format!("{coeff}(({}))", MonomialKind::PowerSeries { vars: *vars }.var_names()[..*vars.min(&4)].join(","))
                }
                MonomialKind::NumericalSemigroup { .. } => format!("{coeff}((X))"),
            },
        }
    }

    #[must_use]
    pub fn is_field(&self) -> bool {
        matches!(self, Atom::Field { .. })
    }

    #[must_use]
    pub fn is_valuation(&self) -> bool {
        matches!(self, Atom::Valuation { .. })
    }
}

/// A story: an atom plus the name of the conductor prime gluing it to the
/// story above (None for the top story).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Story {
    pub atom: Atom,
    /// Name of the spectrum node for this story's maximal ideal, when it has
    /// positive dimension.
    pub top_prime: Option<String>,
}

/// Cardinality of a symbolic prime family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cardinality {
    Finite(u64),
    CountablyInfinite,
    Uncountable,
}

/// A symbolic family of pairwise-incomparable primes at one height.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub cardinality: Cardinality,
    pub description: String,
}

/// Where a prime node came from; drives localization rewrites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeOrigin {
    Zero,
    /// A prime of the atom at `story`, of the given height within that
    /// atom's own spectrum, together with everything in deeper stories.
    /// `coord` identifies a coordinate prime of a monomial atom.
    Story {
        story: usize,
        height_within: usize,
        coord: Option<usize>,
    },
    /// Shape-specific primes (polynomial-extension models).
    Special(&'static str),
}

/// A node of the spectrum poset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeNode {
    pub name: String,
    pub height: usize,
    pub family: Option<Family>,
    pub origin: PrimeOrigin,
}

/// The spectrum: named primes, symbolic families, and a comparability
/// skeleton (edges lower -> upper, transitively closed by reachability).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpectrumPoset {
    pub nodes: Vec<PrimeNode>,
    pub covers: Vec<(usize, usize)>,
}

impl SpectrumPoset {
    #[must_use]
    pub fn by_name(&self, name: &str) -> Option<(usize, &PrimeNode)> {
        self.nodes
            .iter()
            .enumerate()
            .find(|(_, n)| n.name == name)
    }

    /// Longest chain length = maximal height present.
    #[must_use]
    pub fn dim(&self) -> usize {
        self.nodes.iter().map(|n| n.height).max().unwrap_or(0)
    }

    #[must_use]
    fn reachable(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(cur) = stack.pop() {
            if cur == to {
                return true;
            }
            if !seen.insert(cur) {
                continue;
            }
            for &(lo, hi) in &self.covers {
                if lo == cur {
                    stack.push(hi);
                }
            }
        }
        false
    }

    /// Two nodes are comparable when one reaches the other.
    #[must_use]
    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.reachable(a, b) || self.reachable(b, a)
    }

    /// Linearly ordered: no symbolic family bundles more than one prime, and
    /// all named nodes are pairwise comparable.
    #[must_use]
    pub fn is_linearly_ordered(&self) -> bool {
        for n in &self.nodes {
            if let Some(f) = &n.family {
                if !matches!(f.cardinality, Cardinality::Finite(1)) {
                    return false;
                }
            }
        }
        for i in 0..self.nodes.len() {
            for j in (i + 1)..self.nodes.len() {
                if !self.comparable(i, j) {
                    return false;
                }
            }
        }
        true
    }

    /// Treed: incomparable primes never share an upper bound. In a local
    /// model any incomparable pair sits below the maximal ideal, so a local
    /// spectrum is treed exactly when it is linearly ordered above each
    /// branch point; the shapes built here reduce that to linearity.
    #[must_use]
    pub fn is_treed_local(&self) -> bool {
        self.is_linearly_ordered()
    }

    /// The unique maximal node (local models).
    #[must_use]
    pub fn maximal(&self) -> Option<&PrimeNode> {
        let d = self.dim();
        let mut at_top = self.nodes.iter().filter(|n| n.height == d);
        let first = at_top.next()?;
        if at_top.next().is_some() {
            return None;
        }
        Some(first)
    }
}

/// A fact declared by a fixture rather than derived by the engine.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeclaredFact {
    pub value: Truth,
    pub source: String,
}

/// The computational skeleton of a built model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelShape {
    /// A flattened pullback tower (single atoms are one-story towers).
    Tower(Vec<Story>),
    /// `V + X V_P[X]`.
    PolyExt {
        group: ValueGroupDesc,
        prime_height: usize,
        residue: String,
        fraction: String,
    },
    /// `(V_P[X])` localized at the extension of the distinguished prime.
    /// Its monomial fragment is indexed by (content value, degree) pairs
    /// under the componentwise order.
    PolyExtLocal {
        group: ValueGroupDesc,
        prime_height: usize,
    },
    /// Nagata ring over a built base.
    Nagata {
        base: std::boxed::Box<DomainModel>,
        star: NagataStar,
    },
}

/// A validated, built domain model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainModel {
    pub desc: DomainDesc,
    pub shape: ModelShape,
    pub spectrum: SpectrumPoset,
    pub local: bool,
    pub dim: usize,
    pub fields: FieldTableShared,
    /// Declared facts injected from a fixture: flag name -> fact.
    pub declared: BTreeMap<String, DeclaredFact>,
    /// Named fragment ideals injected from a fixture.
    pub named_ideals: BTreeMap<String, crate::fragment::FragmentIdeal>,
}

/// Field tables are cheap; a cloneable wrapper keeps `DomainModel: Eq`
/// simple by comparing nothing (lattices are build-derived, not identity).
#[derive(Clone, Debug, Default)]
pub struct FieldTableShared(pub FieldTable);

impl PartialEq for FieldTableShared {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl Eq for FieldTableShared {}

impl DomainModel {
    /// The tower stories, when the shape is a tower.
    #[must_use]
    pub fn stories(&self) -> Option<&[Story]> {
        match &self.shape {
            ModelShape::Tower(s) => Some(s),
            _ => None,
        }
    }

    /// Staircase group of layer `k` of the fragment. For towers this is the
    /// atom group of story `k`; the localized polynomial-extension shape has
    /// a single layer indexed by (content value, degree) pairs under the
    /// componentwise order.
    #[must_use]
    pub fn story_group(&self, k: usize) -> Option<ValueGroupDesc> {
        match &self.shape {
            ModelShape::Tower(stories) => stories.get(k)?.atom.staircase_group(),
            ModelShape::PolyExtLocal { .. } if k == 0 => {
                Some(ValueGroupDesc::componentwise_n(2))
            }
            _ => None,
        }
    }

    /// The largest staircase `S` with `Layered(k, S)` contained in the
    /// model: the atom's maximal-ideal staircase when a proper ring sits
    /// above story `k`, the ring staircase when `k` is the top story.
    #[must_use]
    pub fn cap_staircase(&self, k: usize) -> Option<Staircase> {
        match &self.shape {
            ModelShape::Tower(stories) => {
                let atom = &stories.get(k)?.atom;
                if k == 0 {
                    Some(Staircase::ring(atom.staircase_group()?))
                } else {
                    atom.max_ideal_staircase()
                }
            }
            ModelShape::PolyExtLocal { .. } if k == 0 => {
                Some(Staircase::ring(self.story_group(0)?))
            }
            _ => None,
        }
    }

    /// Index of the topmost layer with positive dimension.
    #[must_use]
    pub fn top_positive_story(&self) -> Option<usize> {
        match &self.shape {
            ModelShape::Tower(stories) => stories.iter().position(|s| s.atom.dim() > 0),
            ModelShape::PolyExtLocal { .. } => Some(0),
            _ => None,
        }
    }

    /// Whether a declared flag is present; returns (value, source).
    #[must_use]
    pub fn declared_flag(&self, flag: &str) -> Option<&DeclaredFact> {
        self.declared.get(flag)
    }
}

fn path_join(path: &str, seg: &str) -> String {
    if path.is_empty() {
        seg.to_string()
    } else {
        format!("{path}.{seg}")
    }
}

/// Flatten a description into tower stories (top first), registering field
/// relations along the way. Only pullback/tower/atom nodes may appear here.
fn flatten(
    desc: &DomainDesc,
    path: &str,
    fields: &mut FieldTable,
    out: &mut Vec<Atom>,
) -> Result<(), BuildError> {
    match desc {
        DomainDesc::Field {
            label,
            subfield_of,
            algebraically_closed,
            real_closed,
        } => {
            for sup in subfield_of {
                fields.add_edge(label, sup);
            }
            if *algebraically_closed {
                fields.mark_algebraically_closed(label);
            }
            out.push(Atom::Field {
                label: label.clone(),
                algebraically_closed: *algebraically_closed,
                real_closed: *real_closed,
            });
            Ok(())
        }
        DomainDesc::Valuation {
            group,
            residue_field,
            fraction_field,
        } => {
            if !group.is_totally_ordered() {
                return Err(BuildError::BadValuationGroup {
                    path: path.to_string(),
                });
            }
            out.push(Atom::Valuation {
                group: group.clone(),
                residue: residue_field.clone(),
                fraction: fraction_field.clone(),
            });
            Ok(())
        }
        DomainDesc::Monomial {
            atom,
            coefficient_field,
        } => {
            atom.staircase_group()?;
            let a = Atom::Monomial {
                kind: atom.clone(),
                coeff: coefficient_field.clone(),
            };
            fields.add_edge(coefficient_field, &a.fraction_label());
            out.push(a);
            Ok(())
        }
        DomainDesc::Pullback { t, r } => {
            flatten(r, &path_join(path, "r"), fields, out)?;
            flatten(t, &path_join(path, "t"), fields, out)
        }
        DomainDesc::Tower { stories } => {
            for (i, s) in stories.iter().enumerate() {
                flatten(s, &path_join(path, &format!("stories[{i}]")), fields, out)?;
            }
            Ok(())
        }
        _ => Err(BuildError::UnsupportedLocalization(format!(
            "{path}: nested non-tower constructor"
        ))),
    }
}

/// Validate adjacency of flattened stories and assemble `Story` records.
fn validate_tower(
    atoms: Vec<Atom>,
    path: &str,
    fields: &FieldTable,
) -> Result<Vec<Atom>, BuildError> {
    // A field can only be the top story: anything pulled back over must be a
    // local domain with a proper maximal ideal.
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 && a.is_field() {
            return Err(BuildError::PullbackOverField {
                path: format!("{path}[{i}]"),
            });
        }
    }
    let wide = atoms
        .iter()
        .filter(|a| matches!(a, Atom::Monomial { kind, .. } if kind.dim() >= 2))
        .count();
    if wide > 1 {
        return Err(BuildError::MultipleWideMonomialStories {
            path: path.to_string(),
        });
    }
    for i in 0..atoms.len().saturating_sub(1) {
        let upper = &atoms[i];
        let lower = &atoms[i + 1];
        let sub = upper.fraction_label();
        let of = lower.residue_label();
        if !fields.is_subfield(&sub, &of) {
            return Err(BuildError::NotASubfield {
                path: format!("{path}[{i}]"),
                sub,
                of,
            });
        }
        if upper.is_field() && sub == of {
            return Err(BuildError::ImproperFieldStory {
                path: format!("{path}[{i}]"),
                label: sub,
                residue: of,
            });
        }
    }
    Ok(atoms)
}

/// Spectrum synthesis for a tower.
fn tower_spectrum(atoms: &[Atom]) -> (SpectrumPoset, Vec<Story>) {
    let dims: Vec<usize> = atoms.iter().map(Atom::dim).collect();
    let total: usize = dims.iter().sum();
    let deeper = |k: usize| -> usize { dims[k + 1..].iter().sum() };

    let mut sp = SpectrumPoset::default();
    sp.nodes.push(PrimeNode {
        name: "0".into(),
        height: 0,
        family: None,
        origin: PrimeOrigin::Zero,
    });

    // Conductor naming: the first conductor strictly below the maximal gets
    // "Q"; deeper ones get "N{story+1}" in tower numbering.
    let mut first_conductor_below_max_seen = false;
    let mut stories: Vec<Story> = atoms
        .iter()
        .map(|a| Story {
            atom: a.clone(),
            top_prime: None,
        })
        .collect();

    // Walk stories from top to bottom so "first conductor below M" is easy.
    let mut taken: BTreeSet<String> = sp.nodes.iter().map(|n| n.name.clone()).collect();
    let fresh = |base: String, taken: &mut BTreeSet<String>| -> String {
        let mut name = base.clone();
        let mut i = 2;
        while taken.contains(&name) {
            name = format!("{base}{i}");
            i += 1;
        }
        taken.insert(name.clone());
        name
    };

    for k in 0..atoms.len() {
        let d_k = dims[k];
        if d_k == 0 {
            continue;
        }
        let dp = deeper(k);
        for h in 1..=d_k {
            let height = dp + h;
            if h == d_k {
                // The story's maximal ideal (a conductor unless this is the
                // model's maximal ideal).
                let name = if height == total {
                    fresh("M".into(), &mut taken)
                } else if !first_conductor_below_max_seen {
                    first_conductor_below_max_seen = true;
                    fresh("Q".into(), &mut taken)
                } else {
                    fresh(format!("N{}", k + 1), &mut taken)
                };
                stories[k].top_prime = Some(name.clone());
                sp.nodes.push(PrimeNode {
                    name,
                    height,
                    family: None,
                    origin: PrimeOrigin::Story {
                        story: k,
                        height_within: h,
                        coord: None,
                    },
                });
            } else {
                match &atoms[k] {
                    Atom::Valuation { .. } => {
                        let name = fresh(format!("P{h}"), &mut taken);
                        sp.nodes.push(PrimeNode {
                            name,
                            height,
                            family: None,
                            origin: PrimeOrigin::Story {
                                story: k,
                                height_within: h,
                                coord: None,
                            },
                        });
                    }
                    Atom::Monomial { kind, .. } => {
                        if h == 1 {
                            for (i, v) in kind.var_names().into_iter().enumerate() {
                                let name = fresh(v.to_string(), &mut taken);
                                sp.nodes.push(PrimeNode {
                                    name,
                                    height,
                                    family: None,
                                    origin: PrimeOrigin::Story {
                                        story: k,
                                        height_within: 1,
                                        coord: Some(i),
                                    },
                                });
                            }
                        }
                        let name = fresh(format!("H{h}"), &mut taken);
                        sp.nodes.push(PrimeNode {
                            name,
                            height,
                            family: Some(Family {
                                cardinality: Cardinality::Uncountable,
                                description: format!(
                                    "height-{height} primes of the monomial story not named above"
                                ),
                            }),
                            origin: PrimeOrigin::Story {
                                story: k,
                                height_within: h,
                                coord: None,
                            },
                        });
                    }
                    Atom::Field { .. } => {}
                }
            }
        }
    }

    // Comparability skeleton: zero below everything; within a story, every
    // node of height-within h sits below the story's top node; the top node
    // of story k+1 sits below every height-within-1 node of story k; chains
    // inside valuation stories.
    let idx_of = |sp: &SpectrumPoset, pred: &dyn Fn(&PrimeNode) -> bool| -> Vec<usize> {
        sp.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| pred(n))
            .map(|(i, _)| i)
            .collect()
    };
    let story_of = |n: &PrimeNode| -> Option<(usize, usize)> {
        match n.origin {
            PrimeOrigin::Story {
                story,
                height_within,
                ..
            } => Some((story, height_within)),
            _ => None,
        }
    };
    let mut covers = Vec::new();
    for k in 0..atoms.len() {
        let d_k = dims[k];
        if d_k == 0 {
            continue;
        }
        // The node directly below this story's bottom: the top node of the
        // next positive story, or the zero prime.
        let below: usize = {
            let mut found = 0usize; // zero node index
            for (j, &d_j) in dims.iter().enumerate().skip(k + 1) {
                if d_j > 0 {
                    let tops = idx_of(&sp, &|n| story_of(n) == Some((j, d_j)));
                    found = tops[0];
                    break;
                }
            }
            found
        };
        let h1 = idx_of(&sp, &|n| matches!(story_of(n), Some((s, 1)) if s == k));
        for &i in &h1 {
            covers.push((below, i));
        }
        let top = idx_of(&sp, &|n| story_of(n) == Some((k, d_k)));
        for h in 1..d_k {
            let level = idx_of(&sp, &|n| matches!(story_of(n), Some((s, hh)) if s == k && hh == h));
            for &i in &level {
                covers.push((i, top[0]));
                // Valuation stories are chains: link successive heights.
                if matches!(atoms[k], Atom::Valuation { .. }) && h + 1 < d_k {
                    let next = idx_of(
                        &sp,
                        &|n| matches!(story_of(n), Some((s, hh)) if s == k && hh == h + 1),
                    );
                    for &j in &next {
                        covers.push((i, j));
                    }
                }
            }
        }
    }
    sp.covers = covers;
    (sp, stories)
}

/// Build a validated model from a description.
pub fn build(desc: &DomainDesc) -> Result<DomainModel, BuildError> {
    let mut fields = FieldTable::with_builtins();
    build_with_fields(desc, &mut fields)
}

/// Build against an existing field lattice (used when rebuilding derived
/// descriptions whose labels were declared by the original input).
pub fn build_with_fields(
    desc: &DomainDesc,
    fields: &mut FieldTable,
) -> Result<DomainModel, BuildError> {
    match desc {
        DomainDesc::PolyExt {
            group,
            prime_height,
            residue_field,
            fraction_field,
        } => {
            let rank = group.rank();
            if !group.is_totally_ordered() || rank < 2 || *prime_height == 0 || *prime_height >= rank
            {
                return Err(BuildError::BadPolyExtPrime {
                    path: String::new(),
                    rank,
                    height: *prime_height,
                });
            }
            let mut sp = SpectrumPoset::default();
            sp.nodes.push(PrimeNode {
                name: "0".into(),
                height: 0,
                family: None,
                origin: PrimeOrigin::Zero,
            });
            sp.nodes.push(PrimeNode {
                name: "F".into(),
                height: 1,
                family: Some(Family {
                    cardinality: Cardinality::CountablyInfinite,
                    description: "principal primes fD for polynomials f with unit constant term"
                        .into(),
                }),
                origin: PrimeOrigin::Special("unit-content-principal"),
            });
            sp.nodes.push(PrimeNode {
                name: "PP".into(),
                height: 1 + *prime_height,
                family: None,
                origin: PrimeOrigin::Special("extended-prime"),
            });
            sp.nodes.push(PrimeNode {
                name: "N".into(),
                height: 1 + rank,
                family: None,
                origin: PrimeOrigin::Special("extended-maximal"),
            });
            let pp = sp.by_name("PP").unwrap().0;
            let n = sp.by_name("N").unwrap().0;
            let f = sp.by_name("F").unwrap().0;
            sp.covers = vec![(0, f), (0, pp), (pp, n)];
            let dim = sp.dim();
            Ok(DomainModel {
                desc: desc.clone(),
                shape: ModelShape::PolyExt {
                    group: group.clone(),
                    prime_height: *prime_height,
                    residue: residue_field.clone(),
                    fraction: fraction_field.clone(),
                },
                spectrum: sp,
                local: false,
                dim,
                fields: FieldTableShared(fields.clone()),
                declared: BTreeMap::new(),
                named_ideals: BTreeMap::new(),
            })
        }
        DomainDesc::PolyExtLocal {
            group,
            prime_height,
        } => {
            let mut sp = SpectrumPoset::default();
            sp.nodes.push(PrimeNode {
                name: "0".into(),
                height: 0,
                family: None,
                origin: PrimeOrigin::Zero,
            });
            sp.nodes.push(PrimeNode {
                name: "PV".into(),
                height: 1,
                family: None,
                origin: PrimeOrigin::Special("content-prime"),
            });
            sp.nodes.push(PrimeNode {
                name: "M".into(),
                height: 2,
                family: None,
                origin: PrimeOrigin::Special("extended-maximal"),
            });
            sp.covers = vec![(0, 1), (1, 2)];
            Ok(DomainModel {
                desc: desc.clone(),
                shape: ModelShape::PolyExtLocal {
                    group: group.clone(),
                    prime_height: *prime_height,
                },
                spectrum: sp,
                local: true,
                dim: 2,
                fields: FieldTableShared(fields.clone()),
                declared: BTreeMap::new(),
                named_ideals: BTreeMap::new(),
            })
        }
        DomainDesc::Nagata { base, star } => {
            let base_model = build_with_fields(base, fields)?;
            let dim = base_model.dim;
            Ok(DomainModel {
                desc: desc.clone(),
                shape: ModelShape::Nagata {
                    base: std::boxed::Box::new(base_model),
                    star: *star,
                },
                spectrum: SpectrumPoset::default(),
                local: false,
                dim,
                fields: FieldTableShared(fields.clone()),
                declared: BTreeMap::new(),
                named_ideals: BTreeMap::new(),
            })
        }
        DomainDesc::Localization { base, prime } => {
            let base_model = build_with_fields(base, fields)?;
            let localized = crate::localize::localize(&base_model, prime)?;
            build_with_fields(&localized, fields)
        }
        _ => {
            let mut atoms = Vec::new();
            flatten(desc, "", fields, &mut atoms)?;
            let atoms = validate_tower(atoms, "", fields)?;
            let (spectrum, stories) = tower_spectrum(&atoms);
            let dim = spectrum.dim();
            Ok(DomainModel {
                desc: desc.clone(),
                shape: ModelShape::Tower(stories),
                spectrum,
                local: true,
                dim,
                fields: FieldTableShared(fields.clone()),
                declared: BTreeMap::new(),
                named_ideals: BTreeMap::new(),
            })
        }
    }
}

/// Conductor data for the pullback gluing story `k-1` over story `k`:
/// the conductor prime name, whether `D = (M:M)` at the model's maximal
/// ideal, and what `(M:M)` is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConductorData {
    /// Name of the conductor prime in the spectrum.
    pub conductor: String,
    /// Whether the model equals `(M:M)` for its own maximal ideal.
    pub d_equals_mm: bool,
    /// Human-readable identification of `(M:M)`.
    pub mm_description: String,
}

impl DomainModel {
    /// Conductor data at the model's maximal ideal.
    ///
    /// For a tower whose maximal ideal is the top conductor (field-topped
    /// pullbacks), `(M:M)` is the overring `T` below the field story, and
    /// `D != (M:M)`. For a tower topped by a positive-dimensional story
    /// (so `M` lives in the top atom), `(M:M) = D` when that atom's maximal
    /// ideal is principal or the atom is a valuation atom with principal
    /// maximal.
    #[must_use]
    pub fn conductor_data(&self) -> Option<ConductorData> {
        let stories = self.stories()?;
        let max = self.spectrum.maximal()?;
        match max.origin {
            PrimeOrigin::Story { story, .. } if stories[story].atom.is_field() => None,
            PrimeOrigin::Story { story, .. } => {
                if story > 0 || stories[0].atom.is_field() {
                    // Maximal is a conductor: (M:M) contains the overring T.
                    Some(ConductorData {
                        conductor: max.name.clone(),
                        d_equals_mm: false,
                        mm_description: format!(
                            "the overring below the top story (stories {story}..)"
                        ),
                    })
                } else {
                    // Maximal lives in the top atom. For valuation atoms and
                    // regular monomial atoms (M:M) = D: any z with zM in M
                    // has nonnegative value / lies in the integral closure,
                    // which is the ring itself. A numerical semigroup atom
                    // has gap monomials multiplying M into M, so (M:M) is
                    // strictly larger.
                    let d_eq = match &stories[0].atom {
                        Atom::Valuation { .. } => true,
                        Atom::Monomial { kind, .. } => !matches!(
                            kind,
                            MonomialKind::NumericalSemigroup { .. }
                        ),
                        Atom::Field { .. } => false,
                    };
                    Some(ConductorData {
                        conductor: max.name.clone(),
                        d_equals_mm: d_eq,
                        mm_description: if d_eq {
                            "the model itself".into()
                        } else {
                            "an overring properly containing the model (gap monomials multiply M into M)".into()
                        },
                    })
                }
            }
            _ => None,
        }
    }
}
