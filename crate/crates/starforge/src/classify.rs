//! The classifier: forward-chaining inference over built models.
//!
//! Flags are three-valued. The engine runs in phases:
//!
//! 1. *Seeding*: exact computations and per-shape structural facts, plus
//!    facts declared by the input file (marked as such and propagated into
//!    every dependent verdict's `conditional_on` list).
//! 2. *Rule fixpoint*: monotone inference rules fill Unknown slots only;
//!    a rule whose conclusion contradicts an established value aborts the
//!    run — that is a soundness bug, never a preference call.
//! 3. *Canonical provenance*: after the fixpoint, every rule is re-checked
//!    in a fixed order and attached as provenance wherever it independently
//!    justifies the established value. Reports are therefore identical
//!    under any rule application order.
//! 4. *Implication post-pass*: the implication lattice between flags is
//!    re-verified on the final report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{
    Atom, BuildError, DomainDesc, DomainModel, ModelShape, MonomialKind, NagataStar,
    PrimeOrigin,
};
use crate::fragment::{FragmentError, FragmentIdeal};
use crate::localize::localize;
use crate::star::{self, StarContext};
use crate::values::ValueGroupDesc;
use crate::verdict::{Provenance, Truth, Verdict};

/// Every flag the report carries, in canonical order.
pub const FLAGS: &[&str] = &[
    "local",
    "t_local",
    "DW",
    "TW",
    "DT_fgv",
    "valuation",
    "DVR",
    "GCD",
    "Bezout",
    "PvMD",
    "Prufer",
    "pre_Schreier",
    "Schreier",
    "FC",
    "v_FC",
    "coherent",
    "atomic",
    "Noetherian",
    "integrally_closed",
    "Archimedean",
    "treed",
    "linearly_ordered_spectrum",
    "finite_t_character",
    "t_linkative",
    "Cl_t_trivial",
    "normal_pair",
    "comparable_element",
    "t_sharp",
];

/// Per-prime verdicts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeVerdicts {
    pub t_ideal: Verdict,
    pub well_behaved: Verdict,
    pub potent: Verdict,
}

/// Structure report around a comparable (or candidate) element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparableReport {
    pub witness: String,
    /// Name of the prime identified with the intersection of the witness
    /// powers, when nonzero.
    pub powers_intersection_prime: Option<String>,
    pub quotient_valuation: Verdict,
    pub localization_valuation: Verdict,
    /// dim(D) = dim(D/Q) + dim(D_Q).
    pub dim_additivity: Option<(usize, usize, usize)>,
    pub comparable_confirmed: Verdict,
    pub notes: Vec<String>,
}

/// The full classification report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub flags: BTreeMap<String, Verdict>,
    pub primes: BTreeMap<String, PrimeVerdicts>,
    pub comparable: Option<ComparableReport>,
    pub dim: usize,
}

impl PropertyReport {
    #[must_use]
    pub fn flag(&self, name: &str) -> Truth {
        self.flags.get(name).map(|v| v.value).unwrap_or(Truth::Unknown)
    }

    /// The star-context hints derived from this report.
    #[must_use]
    pub fn star_context(&self) -> StarContext {
        let mut conditional = vec![];
        for f in ["t_local", "DW", "TW"] {
            if let Some(v) = self.flags.get(f) {
                conditional.extend(v.conditional_on.iter().cloned());
            }
        }
        conditional.sort();
        conditional.dedup();
        StarContext {
            t_local: self.flag("t_local"),
            dw: self.flag("DW"),
            tw: self.flag("TW"),
            conditional_on: conditional,
        }
    }
}

/// Classification failures.
#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("contradiction on flag {flag}: established {established} but rule {rule} concludes {concluded}")]
    Contradiction {
        flag: String,
        established: Truth,
        concluded: Truth,
        rule: String,
    },
    #[error("implication violated in final report: {0}")]
    ImplicationViolated(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Fragment(#[from] FragmentError),
}

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Default)]
struct State {
    flags: BTreeMap<String, Verdict>,
}

impl State {
    fn get(&self, flag: &str) -> Truth {
        self.flags.get(flag).map(|v| v.value).unwrap_or(Truth::Unknown)
    }

    fn conditions(&self, flag: &str) -> Vec<String> {
        self.flags
            .get(flag)
            .map(|v| v.conditional_on.clone())
            .unwrap_or_default()
    }

    /// Establish a value. Agreement merges justifications (a verdict with
    /// an unconditional route stays unconditional); conflict is an error.
    fn set(&mut self, flag: &str, v: Verdict, by: &str) -> Result<bool, ClassifyError> {
        match self.flags.get_mut(flag) {
            None => {
                self.flags.insert(flag.to_string(), v);
                Ok(true)
            }
            Some(existing) if existing.value == v.value => {
                for p in v.provenance {
                    if !existing.provenance.contains(&p) {
                        existing.provenance.push(p);
                    }
                }
                if existing.conditional_on.is_empty() || v.conditional_on.is_empty() {
                    existing.conditional_on.clear();
                } else {
                    for c in v.conditional_on {
                        if !existing.conditional_on.contains(&c) {
                            existing.conditional_on.push(c);
                        }
                    }
                }
                Ok(false)
            }
            Some(existing) if existing.value == Truth::Unknown => {
                self.flags.insert(flag.to_string(), v);
                Ok(true)
            }
            Some(_) if v.value == Truth::Unknown => Ok(false),
            Some(existing) => Err(ClassifyError::Contradiction {
                flag: flag.to_string(),
                established: existing.value,
                concluded: v.value,
                rule: by.to_string(),
            }),
        }
    }

    fn add_provenance(&mut self, flag: &str, p: Provenance) {
        if let Some(v) = self.flags.get_mut(flag) {
            if !v.provenance.contains(&p) {
                v.provenance.push(p);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Rules
// ---------------------------------------------------------------------------

/// A proposed conclusion.
struct Conclusion {
    flag: &'static str,
    value: Truth,
    conditions: Vec<String>,
}

type RuleFn = Box<dyn Fn(&State) -> Vec<Conclusion>>;

struct Rule {
    id: &'static str,
    statement: &'static str,
    apply: RuleFn,
}

fn yes(flag: &'static str, conditions: Vec<String>) -> Conclusion {
    Conclusion {
        flag,
        value: Truth::Yes,
        conditions,
    }
}

fn no(flag: &'static str, conditions: Vec<String>) -> Conclusion {
    Conclusion {
        flag,
        value: Truth::No,
        conditions,
    }
}

/// Flag-to-flag implications; each yields a forward rule (A Yes => B Yes)
/// and a contrapositive rule (B No => A No).
const IMPLICATIONS: &[(&str, &str, &str, &str)] = &[
    ("IMP-VAL-TL", "valuation", "t_local", "a valuation domain is t-local: its ideals are totally ordered and the maximal ideal is a t-ideal"),
    ("IMP-VAL-GCD", "valuation", "GCD", "a valuation domain is a Bezout domain, hence a GCD domain"),
    ("IMP-VAL-BEZ", "valuation", "Bezout", "every finitely generated ideal of a valuation domain is principal"),
    ("IMP-VAL-IC", "valuation", "integrally_closed", "valuation domains are integrally closed"),
    ("IMP-VAL-PRUF", "valuation", "Prufer", "a valuation domain is Prufer"),
    ("IMP-VAL-DT", "valuation", "DT_fgv", "in a valuation domain every ideal is a t-ideal, so d = t"),
    ("IMP-BEZ-GCD", "Bezout", "GCD", "Bezout domains are GCD domains"),
    ("IMP-GCD-PVMD", "GCD", "PvMD", "GCD domains are Prufer-v-multiplication domains"),
    ("IMP-GCD-SCH", "GCD", "Schreier", "GCD domains are Schreier"),
    ("IMP-SCH-PRE", "Schreier", "pre_Schreier", "Schreier domains are pre-Schreier"),
    ("IMP-PVMD-IC", "PvMD", "integrally_closed", "Prufer-v-multiplication domains are integrally closed"),
    ("IMP-PVMD-TW", "PvMD", "TW", "in a Prufer-v-multiplication domain the w-operation and the t-operation coincide"),
    ("IMP-PRUF-PVMD", "Prufer", "PvMD", "Prufer domains are Prufer-v-multiplication domains"),
    ("IMP-PRUF-IC", "Prufer", "integrally_closed", "Prufer domains are integrally closed"),
    ("IMP-NOE-COH", "Noetherian", "coherent", "Noetherian domains are coherent"),
    ("IMP-NOE-AT", "Noetherian", "atomic", "Noetherian domains are atomic"),
    ("IMP-NOE-FC", "Noetherian", "FC", "Noetherian domains are finite conductor domains"),
    ("IMP-NOE-ARCH", "Noetherian", "Archimedean", "every Noetherian domain is Archimedean"),
    ("IMP-COH-FC", "coherent", "FC", "coherent domains are finite conductor domains"),
    ("IMP-GCD-VFC", "GCD", "v_FC", "in a GCD domain the v-closure of a two-generated ideal is principal"),
    ("IMP-DVR-VAL", "DVR", "valuation", "a discrete valuation ring is a valuation domain"),
    ("IMP-DVR-NOE", "DVR", "Noetherian", "discrete valuation rings are Noetherian"),
    ("TL1-FWD", "t_local", "DW", "a t-local domain is a local DW-domain"),
    ("CL", "t_local", "Cl_t_trivial", "a t-local domain has trivial t-class group"),
    ("FTC-TL", "t_local", "finite_t_character", "a t-local domain has a unique maximal t-ideal, hence finite t-character"),
];

fn implication_rules() -> Vec<Rule> {
    IMPLICATIONS
        .iter()
        .map(|&(id, a, b, statement)| Rule {
            id,
            statement,
            apply: Box::new(move |st: &State| {
                let mut out = vec![];
                if st.get(a).is_yes() {
                    out.push(yes(flag_static(b), st.conditions(a)));
                }
                if st.get(b).is_no() {
                    out.push(no(flag_static(a), st.conditions(b)));
                }
                out
            }),
        })
        .collect()
}

fn flag_static(name: &str) -> &'static str {
    FLAGS
        .iter()
        .copied()
        .find(|f| *f == name)
        .expect("flag name registered")
}

/// Non-implication inference rules over flags alone.
fn inference_rules() -> Vec<Rule> {
    let mut rules = implication_rules();

    rules.push(Rule {
        id: "TL1-BACK",
        statement: "a local DW-domain is t-local",
        apply: Box::new(|st| {
            if st.get("local").is_yes() && st.get("DW").is_yes() {
                let mut c = st.conditions("DW");
                c.extend(st.conditions("local"));
                vec![yes("t_local", c)]
            } else if st.get("local").is_yes() && st.get("t_local").is_no() {
                vec![no("DW", st.conditions("t_local"))]
            } else {
                vec![]
            }
        }),
    });
    rules.push(Rule {
        id: "TLK",
        statement: "a local domain is t-local if and only if it is t-linkative",
        apply: Box::new(|st| {
            if st.get("local").is_yes() && st.get("t_local").is_known() {
                vec![Conclusion {
                    flag: "t_linkative",
                    value: st.get("t_local"),
                    conditions: st.conditions("t_local"),
                }]
            } else {
                vec![]
            }
        }),
    });
    rules.push(Rule {
        id: "LIN",
        statement: "a local domain whose spectrum is linearly ordered under inclusion is t-local",
        apply: Box::new(|st| {
            if st.get("local").is_yes() && st.get("linearly_ordered_spectrum").is_yes() {
                vec![yes("t_local", st.conditions("linearly_ordered_spectrum"))]
            } else {
                vec![]
            }
        }),
    });
    rules.push(Rule {
        id: "COMP",
        statement: "a domain containing a nonzero nonunit comparable element is t-local",
        apply: Box::new(|st| {
            let mut out = vec![];
            if st.get("comparable_element").is_yes() {
                out.push(yes("t_local", st.conditions("comparable_element")));
            }
            if st.get("t_local").is_no() {
                out.push(no("comparable_element", st.conditions("t_local")));
            }
            out
        }),
    });
    rules.push(Rule {
        id: "C5",
        statement: "a 1-dimensional local domain is t-local: its maximal ideal is minimal over every principal ideal",
        apply: Box::new(|_| vec![]), // dimension guard attached per model in structural_rules
    });
    rules.push(Rule {
        id: "V1",
        statement: "a t-local GCD domain is a valuation domain",
        apply: Box::new(|st| {
            let mut out = vec![];
            if st.get("t_local").is_yes() && st.get("GCD").is_yes() {
                let mut c = st.conditions("t_local");
                c.extend(st.conditions("GCD"));
                out.push(yes("valuation", c));
            }
            if st.get("t_local").is_yes() && st.get("valuation").is_no() {
                let mut c = st.conditions("t_local");
                c.extend(st.conditions("valuation"));
                out.push(no("GCD", c));
            }
            out
        }),
    });
    rules.push(Rule {
        id: "V2",
        statement: "a t-local Prufer-v-multiplication domain is a valuation domain",
        apply: Box::new(|st| {
            let mut out = vec![];
            if st.get("t_local").is_yes() && st.get("PvMD").is_yes() {
                let mut c = st.conditions("t_local");
                c.extend(st.conditions("PvMD"));
                out.push(yes("valuation", c));
            }
            if st.get("t_local").is_yes() && st.get("valuation").is_no() {
                let mut c = st.conditions("t_local");
                c.extend(st.conditions("valuation"));
                out.push(no("PvMD", c));
            }
            out
        }),
    });
    rules.push(Rule {
        id: "V3",
        statement: "an integrally closed finite conductor t-local domain is a valuation domain",
        apply: Box::new(|st| {
            let fc = st.get("coherent").is_yes() || st.get("FC").is_yes();
            let mut out = vec![];
            if st.get("t_local").is_yes() && st.get("integrally_closed").is_yes() && fc {
                let mut c = st.conditions("t_local");
                c.extend(st.conditions("integrally_closed"));
                c.extend(st.conditions("FC"));
                c.extend(st.conditions("coherent"));
                out.push(yes("valuation", c));
            }
            if st.get("t_local").is_yes() && st.get("valuation").is_no() && fc {
                let mut c = st.conditions("t_local");
                c.extend(st.conditions("valuation"));
                c.extend(st.conditions("FC"));
                c.extend(st.conditions("coherent"));
                out.push(no("integrally_closed", c));
            }
            if st.get("t_local").is_yes()
                && st.get("valuation").is_no()
                && st.get("integrally_closed").is_yes()
            {
                let mut c = st.conditions("t_local");
                c.extend(st.conditions("valuation"));
                c.extend(st.conditions("integrally_closed"));
                out.push(no("coherent", c.clone()));
                out.push(no("FC", c));
            }
            out
        }),
    });
    rules.push(Rule {
        id: "V4",
        statement: "a Schreier v-finite-conductor domain is a GCD domain",
        apply: Box::new(|st| {
            if st.get("Schreier").is_yes() && st.get("v_FC").is_yes() {
                let mut c = st.conditions("Schreier");
                c.extend(st.conditions("v_FC"));
                vec![yes("GCD", c)]
            } else {
                vec![]
            }
        }),
    });
    rules.push(Rule {
        id: "V5",
        statement: "an atomic domain containing a comparable element is a discrete rank-one valuation ring",
        apply: Box::new(|st| {
            if st.get("atomic").is_yes() && st.get("comparable_element").is_yes() {
                let mut c = st.conditions("atomic");
                c.extend(st.conditions("comparable_element"));
                vec![yes("DVR", c)]
            } else {
                vec![]
            }
        }),
    });
    rules.push(Rule {
        id: "V6",
        statement: "a Prufer-v-multiplication domain whose spectrum is a tree is a Prufer domain",
        apply: Box::new(|st| {
            if st.get("PvMD").is_yes() && st.get("treed").is_yes() {
                let mut c = st.conditions("PvMD");
                c.extend(st.conditions("treed"));
                vec![yes("Prufer", c)]
            } else {
                vec![]
            }
        }),
    });
    rules.push(Rule {
        id: "MCA",
        statement: "an integrally closed finite conductor domain whose primes are linearly ordered by inclusion is a valuation domain",
        apply: Box::new(|st| {
            if st.get("integrally_closed").is_yes()
                && st.get("FC").is_yes()
                && st.get("linearly_ordered_spectrum").is_yes()
            {
                let mut c = st.conditions("integrally_closed");
                c.extend(st.conditions("FC"));
                c.extend(st.conditions("linearly_ordered_spectrum"));
                vec![yes("valuation", c)]
            } else {
                vec![]
            }
        }),
    });
    rules.push(Rule {
        id: "PRF-LOC",
        statement: "a local Prufer domain is a valuation domain; a local non-valuation domain is therefore not Prufer",
        apply: Box::new(|st| {
            if st.get("local").is_yes() && st.get("valuation").is_no() {
                vec![no("Prufer", st.conditions("valuation"))]
            } else {
                vec![]
            }
        }),
    });
    rules.push(Rule {
        id: "DWDT-TW",
        statement: "if d = w and d differs from t then w differs from t",
        apply: Box::new(|st| {
            let mut out = vec![];
            if st.get("DW").is_yes() && st.get("DT_fgv").is_no() {
                let mut c = st.conditions("DW");
                c.extend(st.conditions("DT_fgv"));
                out.push(no("TW", c));
            }
            if st.get("DW").is_yes() && st.get("TW").is_yes() {
                let mut c = st.conditions("DW");
                c.extend(st.conditions("TW"));
                out.push(yes("DT_fgv", c));
            }
            out
        }),
    });
    rules
}

// ---------------------------------------------------------------------------
// Structural analysis of a model (seeds and model-bound rules)
// ---------------------------------------------------------------------------

/// The maximal ideal of a local tower (or localized polynomial-extension
/// model) as a fragment ideal.
pub fn maximal_fragment(model: &DomainModel) -> Option<FragmentIdeal> {
    match &model.shape {
        ModelShape::Tower(stories) => {
            let top = model.top_positive_story()?;
            if top == 0 {
                Some(FragmentIdeal::Layered {
                    layer: 0,
                    stair: stories[0].atom.max_ideal_staircase()?,
                })
            } else {
                // Field stories above: the maximal ideal is the top
                // conductor, i.e. the cap module of the first positive story.
                Some(FragmentIdeal::Layered {
                    layer: top,
                    stair: stories[top].atom.max_ideal_staircase()?,
                })
            }
        }
        ModelShape::PolyExtLocal { .. } => Some(FragmentIdeal::Layered {
            layer: 0,
            stair: crate::staircase::Staircase::new(
                ValueGroupDesc::componentwise_n(2),
                vec![vec![1, 0], vec![0, 1]],
            )
            .ok()?,
        }),
        _ => None,
    }
}

/// Verdict that the maximal ideal of a local model is a t-ideal, by exact
/// fragment computation.
pub fn maximal_t_ideal_verdict(model: &DomainModel) -> Verdict {
    if !model.local {
        return Verdict::unknown(vec!["model is not local".into()]);
    }
    match maximal_fragment(model) {
        Some(m) => star::is_t_ideal_fragment(model, &m, &StarContext::default()),
        None => {
            if model.dim == 0 {
                Verdict::yes_computation(vec![
                    "zero-dimensional: the maximal ideal is the zero ideal".into(),
                ])
            } else {
                Verdict::unknown(vec!["maximal ideal not representable in the fragment".into()])
            }
        }
    }
}

/// Does the model's maximal ideal have a principal staircase representation?
fn maximal_is_principal(model: &DomainModel) -> bool {
    matches!(
        maximal_fragment(model),
        Some(FragmentIdeal::Layered { layer: 0, stair }) if stair.is_principal()
    ) && model.stories().map(|s| s[0].atom.dim() > 0).unwrap_or(false)
}

/// Structural facts about a tower used in seeding.
struct TowerFacts {
    single_valuation_atom: bool,
    composite_valuation: bool,
    proper_junction: Option<(String, String)>,
    nonprincipal_story: Option<usize>,
    pvd_shape: bool,
    comparable_witness: Option<(usize, String)>,
}

fn tower_facts(model: &DomainModel) -> Option<TowerFacts> {
    let stories = model.stories()?;
    let atoms: Vec<&Atom> = stories.iter().map(|s| &s.atom).collect();
    let single_valuation_atom = atoms.len() == 1 && atoms[0].is_valuation();

    // A tower is a valuation domain exactly when every story is a valuation
    // atom (a field story on the very top counts as rank 0 only when its
    // fraction field equals the residue below, which validation forbids) and
    // every junction has fraction field equal to the residue field below.
    let mut composite_valuation = !atoms.is_empty() && atoms.iter().all(|a| a.is_valuation());
    let mut proper_junction = None;
    for w in atoms.windows(2) {
        let upper_fraction = w[0].fraction_label();
        let lower_residue = w[1].residue_label();
        if upper_fraction != lower_residue {
            composite_valuation = false;
            if model
                .fields
                .0
                .is_proper_subfield(&upper_fraction, &lower_residue)
            {
                proper_junction = Some((upper_fraction, lower_residue));
            }
        }
    }

    let nonprincipal_story = atoms.iter().position(|a| {
        a.max_ideal_staircase()
            .map(|s| !s.is_principal())
            .unwrap_or(false)
    });

    // PVD shape: one proper field story on top of an all-DVR-or-valuation
    // chain with matching junctions below it.
    let pvd_shape = atoms.len() >= 2
        && atoms[0].is_field()
        && atoms[1..].iter().all(|a| match a {
            Atom::Valuation { .. } => true,
            Atom::Monomial { kind, .. } => kind.dim() == 1 && !matches!(kind, MonomialKind::NumericalSemigroup { .. }),
            Atom::Field { .. } => false,
        })
        && atoms[1..]
            .windows(2)
            .all(|w| w[0].fraction_label() == w[1].residue_label());

    // Comparable witness: the maximal ideal of the whole model is principal,
    // M = pD, exactly when the *top* story is positive-dimensional and
    // totally ordered with principal maximal staircase; its uniformizer is
    // then a comparable element. (A field story on top blocks this: for a
    // proper coefficient field the candidate's associates fall outside the
    // model, as in pseudo-valuation domains, where no element is comparable.)
    let comparable_witness = atoms.first().and_then(|a| {
        let principal = a
            .max_ideal_staircase()
            .map(|s| s.is_principal())
            .unwrap_or(false);
        if a.dim() > 0
            && principal
            && a.staircase_group()
                .map(|g| g.is_totally_ordered())
                .unwrap_or(false)
        {
            Some((0usize, "p (uniformizer of the top story)".to_string()))
        } else {
            None
        }
    });

    Some(TowerFacts {
        single_valuation_atom,
        composite_valuation,
        proper_junction,
        nonprincipal_story,
        pvd_shape,
        comparable_witness,
    })
}

// ---------------------------------------------------------------------------
// Seeding
// ---------------------------------------------------------------------------

fn seed(model: &DomainModel, st: &mut State) -> Result<(), ClassifyError> {
    let set_comp = |st: &mut State, flag: &str, value: Truth, trace: Vec<String>| {
        let v = match value {
            Truth::Yes => Verdict::yes_computation(trace),
            Truth::No => Verdict::no_computation(trace),
            Truth::Unknown => return Ok::<(), ClassifyError>(()),
        };
        st.set(flag, v, "seed")?;
        Ok(())
    };

    set_comp(
        st,
        "local",
        if model.local { Truth::Yes } else { Truth::No },
        vec!["structural: the model shape determines locality".into()],
    )?;

    if !matches!(model.shape, ModelShape::Nagata { .. }) {
        let lin = model.spectrum.is_linearly_ordered();
        set_comp(
            st,
            "linearly_ordered_spectrum",
            if lin { Truth::Yes } else { Truth::No },
            vec!["computed from the spectrum poset".into()],
        )?;
        if model.local {
            set_comp(
                st,
                "treed",
                if model.spectrum.is_treed_local() {
                    Truth::Yes
                } else {
                    Truth::No
                },
                vec![
                    "in a local model incomparable primes share the maximal ideal as an upper bound, so the spectrum is a tree exactly when it is a chain".into(),
                ],
            )?;
        }
    }

    if !model.local {
        set_comp(
            st,
            "t_local",
            Truth::No,
            vec!["a t-local domain is local by definition; this model is not local".into()],
        )?;
        set_comp(
            st,
            "valuation",
            Truth::No,
            vec!["valuation domains are local; this model is not local".into()],
        )?;
    }

    // Declared facts.
    for (flag, fact) in &model.declared {
        st.set(flag, Verdict::declared(fact.value, &fact.source), "declared")?;
    }

    // Exact maximal-ideal computation for local models.
    if model.local && model.dim > 0 {
        let mv = maximal_t_ideal_verdict(model);
        if mv.value.is_known() {
            let mut v = mv.clone();
            v.provenance.insert(
                0,
                Provenance::Computation {
                    trace: vec![
                        "t-local means local with the maximal ideal a t-ideal; computed exactly"
                            .into(),
                    ],
                },
            );
            st.set("t_local", v, "seed:maximal-t-ideal")?;
        }
    }

    if model.local && model.dim == 0 {
        set_comp(
            st,
            "t_local",
            Truth::Yes,
            vec!["a field has no proper nonzero ideals, so it is trivially t-local".into()],
        )?;
    }

    // Shape-specific seeds.
    match &model.shape {
        ModelShape::Tower(stories) => {
            let facts = tower_facts(model).expect("tower facts");
            if facts.single_valuation_atom || facts.composite_valuation {
                set_comp(
                    st,
                    "valuation",
                    Truth::Yes,
                    vec!["every story is a valuation atom and each junction identifies the fraction field with the residue field below, so divisibility is a total order".into()],
                )?;
            }
            if let Some((sub, sup)) = &facts.proper_junction {
                set_comp(
                    st,
                    "valuation",
                    Truth::No,
                    vec![format!(
                        "junction with {sub} a proper subfield of {sup}: for c in {sup} outside {sub}, the principal ideals generated by x and cx are incomparable"
                    )],
                )?;
            }
            if let Some(k) = facts.nonprincipal_story {
                set_comp(
                    st,
                    "valuation",
                    Truth::No,
                    vec![format!(
                        "story {k} has a maximal staircase with at least two incomparable generators, which stay incomparable in the model"
                    )],
                )?;
                set_comp(
                    st,
                    "DVR",
                    Truth::No,
                    vec![format!("story {k} obstructs the valuation property")],
                )?;
            }
            if facts.pvd_shape {
                st.set(
                    "t_local",
                    Verdict::yes_rule(
                        "PVD",
                        "any pseudo-valuation domain is a t-local domain",
                    ),
                    "seed:pvd",
                )?;
            }

            // Single-atom seeds.
            if stories.len() == 1 {
                match &stories[0].atom {
                    Atom::Valuation { group, .. } => {
                        let discrete_rank1 = matches!(
                            group,
                            ValueGroupDesc::LexZ { n: 1 } | ValueGroupDesc::RationalSubgroup { .. }
                        );
                        if discrete_rank1 {
                            set_comp(
                                st,
                                "DVR",
                                Truth::Yes,
                                vec!["rank-one discrete value group".into()],
                            )?;
                            set_comp(st, "atomic", Truth::Yes, vec!["discrete rank one: every nonunit is a finite product of the uniformizer and a unit".into()])?;
                        } else {
                            set_comp(
                                st,
                                "Noetherian",
                                Truth::No,
                                vec!["a valuation domain of rank at least two has a non-finitely-generated prime".into()],
                            )?;
                            set_comp(
                                st,
                                "Archimedean",
                                Truth::No,
                                vec!["for a nonunit x of minimal positive value, the intersection of the powers of xD contains the nonzero height-(rank-1) prime".into()],
                            )?;
                        }
                    }
                    Atom::Monomial { kind, .. } => match kind {
                        MonomialKind::PowerSeries { .. }
                        | MonomialKind::LocalizedPolynomial { .. } => {
                            set_comp(st, "Noetherian", Truth::Yes, vec!["power series / localized polynomial rings over a field in finitely many variables are Noetherian".into()])?;
                            set_comp(st, "integrally_closed", Truth::Yes, vec!["regular local rings are integrally closed".into()])?;
                            set_comp(st, "GCD", Truth::Yes, vec!["these rings are unique factorization domains".into()])?;
                        }
                        MonomialKind::NumericalSemigroup { generators } => {
                            set_comp(st, "Noetherian", Truth::Yes, vec!["a numerical semigroup ring is a one-dimensional Noetherian local domain".into()])?;
                            set_comp(st, "integrally_closed", Truth::No, vec![format!(
                                "the monomial of each gap of the semigroup generated by {generators:?} is integral over the ring but missing from it"
                            )])?;
                        }
                    },
                    Atom::Field { .. } => {}
                }
            } else {
                // Integral closure for multi-story towers: semigroup stories
                // and non-relatively-algebraically-closed field junctions
                // obstruct it.
                let mut verdict: Option<(Truth, String)> = None;
                for (k, s) in stories.iter().enumerate() {
                    if matches!(&s.atom, Atom::Monomial { kind: MonomialKind::NumericalSemigroup { .. }, .. }) {
                        verdict = Some((Truth::No, format!("story {k} is a numerical semigroup ring, which is not integrally closed")));
                    }
                }
                for w in stories.windows(2) {
                    if let Atom::Field {
                        label,
                        algebraically_closed,
                        real_closed,
                    } = &w[0].atom
                    {
                        let residue = w[1].atom.residue_label();
                        if *real_closed && label != &residue {
                            verdict = Some((Truth::No, format!(
                                "{label} is real closed and proper in {residue}, so a square root of -1 is integral over the model but outside it"
                            )));
                        } else if *algebraically_closed && verdict.is_none() {
                            verdict = Some((Truth::Yes, format!(
                                "{label} is algebraically closed, hence algebraically closed in {residue}; integrality transfers from the stories below"
                            )));
                        }
                    }
                }
                if verdict.is_none() {
                    let all_equal = stories.windows(2).all(|w| {
                        w[0].atom.fraction_label() == w[1].atom.residue_label()
                    });
                    if all_equal {
                        verdict = Some((Truth::Yes, "every junction identifies the fraction field above with the residue field below, and integral closure is preserved under pullbacks along such projections".into()));
                    }
                }
                if let Some((v, why)) = verdict {
                    // A Yes needs every story integrally closed as well.
                    let stories_ok = stories.iter().all(|s| !matches!(&s.atom, Atom::Monomial { kind: MonomialKind::NumericalSemigroup { .. }, .. }));
                    if v == Truth::No || stories_ok {
                        set_comp(st, "integrally_closed", v, vec![why])?;
                    }
                }
                // Archimedean fails when a totally ordered story sits above
                // a nonzero conductor: its uniformizer x is a unit of the
                // overring below, so every power of xD contains that
                // conductor.
                let nonarch = stories.iter().enumerate().any(|(k, s)| {
                    s.atom.dim() > 0
                        && s.atom
                            .staircase_group()
                            .map(|g| g.is_totally_ordered())
                            .unwrap_or(false)
                        && stories[k + 1..].iter().any(|t| t.atom.dim() > 0)
                });
                if nonarch {
                    set_comp(st, "Archimedean", Truth::No, vec![
                        "a totally ordered story sits above a nonzero conductor: the intersection of the powers of its uniformizer's principal ideal contains that conductor".into(),
                    ])?;
                }
            }

            // Pullback reduction: the model is t-local exactly when the
            // part above the deepest story is.
            if stories.len() > 1 {
                let upper: Vec<DomainDesc> = stories[..stories.len() - 1]
                    .iter()
                    .map(|s| atom_to_desc(&s.atom))
                    .collect();
                let desc = if upper.len() == 1 {
                    upper[0].clone()
                } else {
                    DomainDesc::Tower { stories: upper }
                };
                let mut ft = model.fields.0.clone();
                if let Ok(sub) = crate::domain::build_with_fields(&desc, &mut ft) {
                    if let Ok(rep) = classify(&sub) {
                        if let Some(v) = rep.flags.get("t_local") {
                            if v.value.is_known() {
                                let pull = Verdict {
                                    value: v.value,
                                    provenance: vec![Provenance::Rule {
                                        id: "PULL".into(),
                                        statement: "a pullback of a local ring along its residue projection is t-local exactly when the pulled-back part is t-local".into(),
                                    }],
                                    attempted: Vec::new(),
                                    conditional_on: v.conditional_on.clone(),
                                };
                                st.set("t_local", pull, "PULL")?;
                            }
                        }
                    }
                }
            }

            // Comparable element.
            if facts.single_valuation_atom {
                set_comp(st, "comparable_element", Truth::Yes, vec![
                    "in a valuation atom any nonzero nonunit is comparable: principal ideals are totally ordered".into(),
                ])?;
            } else if facts.comparable_witness.is_some() {
                set_comp(st, "comparable_element", Truth::Yes, vec![
                    "the uniformizer of the top story generates a principal maximal ideal; every element's ideal is comparable with its powers".into(),
                ])?;
            } else if model.local
                && model.dim == 1
                && st.get("t_local").is_yes()
                && st.get("valuation").is_no()
            {
                st.set(
                    "comparable_element",
                    Verdict::no_rule(
                        "COMP-1DIM",
                        "a 1-dimensional t-local domain that is not a valuation domain has no comparable element",
                    ),
                    "seed:comp-1dim",
                )?;
            }
        }
        ModelShape::PolyExtLocal { .. } => {
            st.set(
                "PvMD",
                Verdict::yes_rule(
                    "PEXT-PVMD",
                    "a valuation domain is a Prufer-v-multiplication domain, and the PvMD property passes to polynomial extensions and localizations",
                ),
                "seed:pext",
            )?;
            set_comp(st, "integrally_closed", Truth::Yes, vec![
                "localization of a polynomial ring over a valuation domain".into(),
            ])?;
        }
        ModelShape::PolyExt { .. } => {
            set_comp(st, "integrally_closed", Truth::Yes, vec![
                "the ring V + X V_P[X] is integrally closed: V is a valuation domain and V_P[X] is integrally closed with V = V_P cap K".into(),
            ])?;
        }
        ModelShape::Nagata { base, star } => {
            let base_report = classify(base)?;
            let tl = base_report.flags.get("t_local").cloned();
            if let Some(v) = tl {
                if v.value.is_known() {
                    let mut nv = v.clone();
                    nv.provenance.push(Provenance::Rule {
                        id: "NAG".into(),
                        statement: "a domain is t-local if and only if its Nagata ring with respect to d is t-local".into(),
                    });
                    st.set("t_local", nv, "seed:nagata")?;
                }
            }
            if matches!(star, NagataStar::V) {
                st.set(
                    "DW",
                    Verdict::yes_rule(
                        "NAG-DW",
                        "the Nagata ring with respect to the v-operation is a DW-domain",
                    ),
                    "seed:nagata",
                )?;
            }
        }
    }

    // GV witnesses decide DW negatively.
    if st.get("DW") == Truth::Unknown && st.get("t_local") != Truth::Yes {
        if let Ok(ws) = star::gv_witnesses(model) {
            if let Some(w) = ws.first() {
                st.set(
                    "DW",
                    Verdict::no_computation(vec![format!(
                        "{} is a proper Glaz-Vasconcelos ideal (inverse = ring), so d differs from w",
                        w.describe()
                    )]),
                    "seed:gv-witness",
                )?;
            }
        }
    }

    // Non-divisorial finitely generated witness decides DT negatively.
    if st.get("DT_fgv") == Truth::Unknown {
        if let Some(m) = maximal_fragment(model) {
            let candidates = [m.clone(), m.product(&m, model).unwrap_or(m)];
            for c in candidates {
                if let Ok(v) = c.v_closure(model) {
                    if !v.same_as(&c) {
                        st.set(
                            "DT_fgv",
                            Verdict::no_computation(vec![format!(
                                "{} has divisorial closure {}, so d differs from t on finitely generated ideals",
                                c.describe(),
                                v.describe()
                            )]),
                            "seed:dt-witness",
                        )?;
                        break;
                    }
                }
            }
        }
    }

    Ok(())
}

/// Model-bound structural rules (guards that need the model, conclusions in
/// flag space). These participate in the fixpoint like the pure rules.
fn structural_rules(model: &DomainModel) -> Vec<Rule> {
    let mut rules = vec![];

    let local = model.local;
    let dim = model.dim;
    rules.push(Rule {
        id: "C5",
        statement: "a 1-dimensional local domain is t-local",
        apply: Box::new(move |_| {
            if local && dim == 1 {
                vec![yes("t_local", vec![])]
            } else {
                vec![]
            }
        }),
    });

    rules.push(Rule {
        id: "ARC-1",
        statement: "domains of dimension at most 1 are Archimedean",
        apply: Box::new(move |_| {
            if dim <= 1 {
                vec![yes("Archimedean", vec![])]
            } else {
                vec![]
            }
        }),
    });

    let principal = maximal_is_principal(model);
    rules.push(Rule {
        id: "C4",
        statement: "a local domain whose maximal ideal is principal is t-local",
        apply: Box::new(move |_| {
            if local && principal {
                vec![yes("t_local", vec![])]
            } else {
                vec![]
            }
        }),
    });

    let mm = model.conductor_data();
    let d_ne_mm = mm.as_ref().map(|c| !c.d_equals_mm).unwrap_or(false);
    rules.push(Rule {
        id: "MM",
        statement: "if D differs from (M:M) then D is a t-local domain",
        apply: Box::new(move |_| {
            if local && d_ne_mm {
                vec![yes("t_local", vec![])]
            } else {
                vec![]
            }
        }),
    });

    // V7/V8 valuation routes for pure valuation atoms.
    let pure_valuation = model
        .stories()
        .map(|s| s.len() == 1 && s[0].atom.is_valuation())
        .unwrap_or(false);
    rules.push(Rule {
        id: "V7",
        statement: "a domain in which every nonzero prime contains a comparable element is a valuation domain",
        apply: Box::new(move |_| {
            if pure_valuation {
                vec![yes("valuation", vec![])]
            } else {
                vec![]
            }
        }),
    });
    rules.push(Rule {
        id: "V8",
        statement: "if the set of comparable elements is nonempty with intersection of their principal ideals zero, the domain is a valuation domain",
        apply: Box::new(move |_| {
            if pure_valuation {
                vec![yes("valuation", vec![])]
            } else {
                vec![]
            }
        }),
    });

    // HZ contrapositive: Noetherian with d = t forces dimension at most 1.
    rules.push(Rule {
        id: "HZ",
        statement: "a Noetherian domain with d = t has dimension at most 1",
        apply: Box::new(move |st: &State| {
            if st.get("Noetherian").is_yes() && dim >= 2 {
                let mut c = st.conditions("Noetherian");
                c.sort();
                vec![no("DT_fgv", c)]
            } else {
                vec![]
            }
        }),
    });

    rules
}

// ---------------------------------------------------------------------------
// Fixpoint + provenance
// ---------------------------------------------------------------------------

fn run_rules(
    model: &DomainModel,
    st: &mut State,
    order: Option<&[usize]>,
) -> Result<(), ClassifyError> {
    let mut rules = inference_rules();
    rules.extend(structural_rules(model));

    let indices: Vec<usize> = match order {
        Some(o) => o.iter().copied().filter(|&i| i < rules.len()).collect(),
        None => (0..rules.len()).collect(),
    };

    // Phase: monotone fixpoint.
    loop {
        let mut changed = false;
        for &i in &indices {
            let rule = &rules[i];
            for c in (rule.apply)(st) {
                let mut conds = c.conditions;
                conds.sort();
                conds.dedup();
                let v = match c.value {
                    Truth::Yes => Verdict::yes_rule(rule.id, rule.statement),
                    Truth::No => Verdict::no_rule(rule.id, rule.statement),
                    Truth::Unknown => continue,
                }
                .conditioned_on(&conds);
                if st.set(c.flag, v, rule.id)? {
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Phase: canonical provenance in fixed rule order, independent of the
    // application order above.
    for rule in &rules {
        for c in (rule.apply)(st) {
            if st.get(c.flag) == c.value {
                st.add_provenance(
                    c.flag,
                    Provenance::Rule {
                        id: rule.id.to_string(),
                        statement: rule.statement.to_string(),
                    },
                );
            }
        }
    }

    // Canonicalize provenance ordering for determinism.
    for v in st.flags.values_mut() {
        let mut seen = Vec::new();
        v.provenance.retain(|p| {
            let key = format!("{p:?}");
            if seen.contains(&key) {
                false
            } else {
                seen.push(key);
                true
            }
        });
        v.provenance.sort_by_key(|p| match p {
            Provenance::Computation { trace } => (0, trace.join("; ")),
            Provenance::Declared { source } => (1, source.clone()),
            Provenance::Rule { id, .. } => (2, id.clone()),
        });
        v.conditional_on.sort();
        v.conditional_on.dedup();
    }

    Ok(())
}

fn implication_post_pass(st: &State) -> Result<(), ClassifyError> {
    for (id, a, b, _) in IMPLICATIONS {
        if st.get(a).is_yes() && st.get(b).is_no() {
            return Err(ClassifyError::ImplicationViolated(format!(
                "{id}: {a} = Yes but {b} = No"
            )));
        }
    }
    for (a, b) in [
        ("valuation", "t_local"),
        ("valuation", "GCD"),
        ("valuation", "integrally_closed"),
    ] {
        if st.get(a).is_yes() && st.get(b).is_no() {
            return Err(ClassifyError::ImplicationViolated(format!(
                "{a} = Yes with {b} = No"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Comparable elements
// ---------------------------------------------------------------------------

/// Search for a comparable element; returns the verdict and a witness label.
pub fn find_comparable(model: &DomainModel) -> (Verdict, Option<String>) {
    if let Some(facts) = tower_facts(model) {
        if facts.single_valuation_atom {
            return (
                Verdict::yes_computation(vec![
                    "any nonzero nonunit of a valuation atom is comparable".into(),
                ]),
                Some("any nonunit".into()),
            );
        }
        if let Some((k, w)) = facts.comparable_witness {
            return (
                Verdict::yes_rule(
                    "COMP-PRINC",
                    "if the maximal ideal is principal, M = pD, then p is a comparable element",
                )
                .also(Provenance::Computation {
                    trace: vec![format!(
                        "story {k} is totally ordered with principal maximal staircase"
                    )],
                }),
                Some(w),
            );
        }
    }
    (
        Verdict::unknown(vec![
            "no principal-maximal or valuation-atom witness found".into(),
        ]),
        None,
    )
}

/// Build the structure report around a witness story: identify the prime
/// equal to the intersection of the witness powers, classify the quotient
/// and the localization there, and confirm or withhold comparability.
pub fn comparable_prime(
    model: &DomainModel,
    witness_story: usize,
    witness_label: &str,
) -> Result<ComparableReport, ClassifyError> {
    let stories = model.stories().ok_or_else(|| {
        ClassifyError::Fragment(FragmentError::Unsupported(
            "comparable analysis requires a tower model".into(),
        ))
    })?;
    let mut notes = vec![];

    // The intersection of the witness powers: the conductor of the next
    // positive-dimensional story below, or zero.
    let below = stories[witness_story + 1..]
        .iter()
        .position(|s| s.atom.dim() > 0)
        .map(|off| witness_story + 1 + off);

    let Some(j) = below else {
        return Ok(ComparableReport {
            witness: witness_label.to_string(),
            powers_intersection_prime: None,
            quotient_valuation: Verdict::unknown(vec!["no story below the witness".into()]),
            localization_valuation: Verdict::unknown(vec!["no story below the witness".into()]),
            dim_additivity: None,
            comparable_confirmed: Verdict::yes_computation(vec![
                "the intersection of the witness powers is zero; the witness story is totally ordered".into(),
            ]),
            notes: vec!["the intersection of the powers of the witness is the zero ideal".into()],
        });
    };

    let q_name = stories[j].top_prime.clone().ok_or_else(|| {
        ClassifyError::Fragment(FragmentError::Unsupported(
            "story below the witness has no named conductor".into(),
        ))
    })?;
    notes.push(format!(
        "the intersection of the powers of {witness_label} is the conductor prime {q_name}: the witness is a unit of the overring below, so each power of its principal ideal contains the conductor"
    ));

    // D/Q: the tower above story j.
    let upper: Vec<DomainDesc> = stories[..j]
        .iter()
        .map(|s| atom_to_desc(&s.atom))
        .collect();
    let upper_desc = if upper.len() == 1 {
        upper[0].clone()
    } else {
        DomainDesc::Tower { stories: upper }
    };
    let mut ft = model.fields.0.clone();
    let quotient_valuation = classify(&crate::domain::build_with_fields(&upper_desc, &mut ft)?)?
        .flags
        .get("valuation")
        .cloned()
        .unwrap_or_else(|| Verdict::unknown(vec!["quotient not classified".into()]));

    // D_Q.
    let localized_desc = localize(model, &q_name)?;
    let mut ft = model.fields.0.clone();
    let localized = crate::domain::build_with_fields(&localized_desc, &mut ft)?;
    let localization_valuation = classify(&localized)?
        .flags
        .get("valuation")
        .cloned()
        .unwrap_or_else(|| Verdict::unknown(vec!["localization not classified".into()]));

    let upper_dim: usize = stories[..j].iter().map(|s| s.atom.dim()).sum();
    let lower_dim = model.dim - upper_dim;
    notes.push(format!(
        "dimension additivity at {q_name}: {} = {} + {}",
        model.dim, upper_dim, lower_dim
    ));
    notes.push(format!(
        "{q_name} equals its own extension to the localization (it is an ideal of the overring below the witness), and (D, D_{q_name}) is a normal pair"
    ));
    if localization_valuation.value.is_no() {
        notes.push(format!(
            "D_{q_name} is not a valuation domain; a domain with a comparable element is a valuation domain if and only if the localization at the powers-intersection prime is one, so the model is not a valuation domain"
        ));
    }
    if quotient_valuation.value.is_no() {
        notes.push(format!(
            "D/{q_name} is not a valuation domain, so the candidate element is not comparable: comparability forces the quotient by the powers-intersection prime to be a valuation domain"
        ));
    }

    let comparable_confirmed = if quotient_valuation.value.is_no() {
        Verdict::no_computation(vec![format!(
            "the quotient by {q_name} is not a valuation domain"
        )])
    } else if quotient_valuation.value.is_yes() {
        Verdict::yes_computation(vec![format!(
            "{q_name} is prime, equals its extension to the localization, and the quotient is a valuation domain"
        )])
    } else {
        Verdict::unknown(vec!["quotient classification incomplete".into()])
    };

    Ok(ComparableReport {
        witness: witness_label.to_string(),
        powers_intersection_prime: Some(q_name),
        quotient_valuation,
        localization_valuation,
        dim_additivity: Some((model.dim, upper_dim, lower_dim)),
        comparable_confirmed,
        notes,
    })
}

fn atom_to_desc(a: &Atom) -> DomainDesc {
    match a {
        Atom::Field {
            label,
            algebraically_closed,
            real_closed,
        } => DomainDesc::Field {
            label: label.clone(),
            subfield_of: vec![],
            algebraically_closed: *algebraically_closed,
            real_closed: *real_closed,
        },
        Atom::Valuation {
            group,
            residue,
            fraction,
        } => DomainDesc::Valuation {
            group: group.clone(),
            residue_field: residue.clone(),
            fraction_field: fraction.clone(),
        },
        Atom::Monomial { kind, coeff } => DomainDesc::Monomial {
            atom: kind.clone(),
            coefficient_field: coeff.clone(),
        },
    }
}

// ---------------------------------------------------------------------------
// Per-prime verdicts
// ---------------------------------------------------------------------------

/// The fragment form of a named prime, when representable.
pub fn prime_fragment(model: &DomainModel, name: &str) -> Option<FragmentIdeal> {
    let (_, node) = model.spectrum.by_name(name)?;
    match &node.origin {
        PrimeOrigin::Story {
            story,
            height_within,
            coord,
        } => {
            let stories = model.stories()?;
            let atom = &stories[*story].atom;
            let d = atom.dim();
            if *height_within == d {
                Some(FragmentIdeal::Layered {
                    layer: *story,
                    stair: atom.max_ideal_staircase()?,
                })
            } else if let Some(i) = coord {
                let g = atom.staircase_group()?;
                let mut v = vec![0i64; g.arity()];
                v[*i] = 1;
                Some(FragmentIdeal::Layered {
                    layer: *story,
                    stair: crate::staircase::Staircase::new(g, vec![v]).ok()?,
                })
            } else {
                None
            }
        }
        _ => None,
    }
}

fn prime_t_ideal(model: &DomainModel, name: &str, ctx: &StarContext) -> Verdict {
    let Some((_, node)) = model.spectrum.by_name(name) else {
        return Verdict::unknown(vec![format!("no prime named {name}")]);
    };
    if node.height == 0 {
        return Verdict::yes_computation(vec!["the zero ideal is trivially closed".into()]);
    }
    if let Some(frag) = prime_fragment(model, name) {
        return star::is_t_ideal_fragment(model, &frag, ctx);
    }
    match &node.origin {
        PrimeOrigin::Story { story, .. } => {
            if model
                .stories()
                .map(|s| matches!(s[*story].atom, Atom::Valuation { .. }))
                .unwrap_or(false)
            {
                // Non-maximal primes of a valuation story are directed
                // intersections of the principal ideals above them.
                return Verdict::yes_rule(
                    "DIV-INT",
                    "an intersection of principal fractional ideals is divisorial, hence a t-ideal",
                );
            }
            if node.family.is_some() {
                return Verdict::unknown(vec![
                    "symbolic family: name a representative for an exact computation".into(),
                ]);
            }
            Verdict::unknown(vec!["prime not representable in the fragment".into()])
        }
        PrimeOrigin::Special("extended-prime") => Verdict::yes_rule(
            "DIV-INT",
            "the extended prime is the intersection of the principal fractional ideals it generates in the valuation layer, hence divisorial and a t-ideal",
        ),
        PrimeOrigin::Special("content-prime") => Verdict::yes_rule(
            "DIV-INT",
            "an intersection of principal fractional ideals is divisorial, hence a t-ideal",
        ),
        _ => Verdict::unknown(vec!["prime not representable in the fragment".into()]),
    }
}

fn prime_well_behaved(model: &DomainModel, name: &str, t_ideal: &Verdict) -> Verdict {
    if t_ideal.value.is_no() {
        return Verdict::unknown(vec![
            "well-behavedness is defined for prime t-ideals only".into(),
        ]);
    }
    let Some((_, node)) = model.spectrum.by_name(name) else {
        return Verdict::unknown(vec![format!("no prime named {name}")]);
    };
    if node.height == 0 {
        return Verdict::yes_computation(vec!["the zero ideal localizes to the zero ideal".into()]);
    }
    if node.family.is_some() {
        return Verdict::unknown(vec![
            "symbolic family: name a representative to localize".into(),
        ]);
    }
    let localized_desc = match localize(model, name) {
        Ok(d) => d,
        Err(e) => return Verdict::unknown(vec![format!("localization rewrite failed: {e}")]),
    };
    let mut ft = model.fields.0.clone();
    let localized = match crate::domain::build_with_fields(&localized_desc, &mut ft) {
        Ok(m) => m,
        Err(e) => return Verdict::unknown(vec![format!("localized model build failed: {e}")]),
    };
    let mv = maximal_t_ideal_verdict(&localized);
    match mv.value {
        Truth::Yes => {
            let mut v = mv;
            v.provenance.insert(
                0,
                Provenance::Computation {
                    trace: vec![format!(
                        "the extension of {name} is the maximal ideal of the localization; computed its t-closure there"
                    )],
                },
            );
            v
        }
        Truth::No => {
            let mut v = mv;
            v.provenance.insert(
                0,
                Provenance::Computation {
                    trace: vec![format!(
                        "the extension of {name} is the maximal ideal of the localization, and it is not a t-ideal there"
                    )],
                },
            );
            v
        }
        Truth::Unknown => {
            // Valuation localizations: every ideal is a t-ideal.
            if let Ok(rep) = classify(&localized) {
                if rep.flag("valuation").is_yes() {
                    return Verdict::yes_rule(
                        "WB-VAL",
                        "the localization is a valuation domain, where every ideal is a t-ideal",
                    );
                }
                if rep.flag("t_local").is_yes() {
                    return Verdict::yes_rule(
                        "WB-TL",
                        "the localization is t-local, so its maximal ideal is a t-ideal",
                    );
                }
            }
            mv
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// Classify with the canonical rule order.
pub fn classify(model: &DomainModel) -> Result<PropertyReport, ClassifyError> {
    classify_with_order(model, None)
}

/// Number of rules, for permutation testing.
#[must_use]
pub fn rule_count(model: &DomainModel) -> usize {
    inference_rules().len() + structural_rules(model).len()
}

/// Classify with an explicit rule application order (provenance collection
/// stays canonical, so reports are order-independent).
pub fn classify_with_order(
    model: &DomainModel,
    order: Option<&[usize]>,
) -> Result<PropertyReport, ClassifyError> {
    let mut st = State::default();
    seed(model, &mut st)?;

    // Comparable-element machinery feeds the flag space before the fixpoint.
    let (comp_verdict, _witness) = find_comparable(model);
    if comp_verdict.value.is_known() {
        st.set("comparable_element", comp_verdict.clone(), "comparable-search")?;
    }
    let mut comparable_report = None;
    if let Some(facts) = tower_facts(model) {
        if let Some((k, label)) = facts.comparable_witness {
            let rep = comparable_prime(model, k, &label)?;
            if rep.localization_valuation.value.is_no() {
                st.set(
                    "valuation",
                    Verdict::no_rule(
                        "VQ",
                        "a domain with a comparable element is a valuation domain if and only if its localization at the intersection of the element's powers is a valuation domain",
                    )
                    .also(Provenance::Computation {
                        trace: rep.localization_valuation.provenance.iter().filter_map(|p| match p {
                            Provenance::Computation { trace } => Some(trace.join("; ")),
                            _ => None,
                        }).collect(),
                    }),
                    "VQ",
                )?;
            }
            if rep.powers_intersection_prime.is_some() {
                st.set(
                    "normal_pair",
                    Verdict::yes_rule(
                        "NP",
                        "for a comparable element with powers-intersection prime Q, (D, D_Q) is a normal pair",
                    ),
                    "NP",
                )?;
            }
            comparable_report = Some(rep);
        } else if model.dim >= 1 {
            // Candidate analysis for the deepest positive story even without
            // a comparable witness: the structure report shows why
            // comparability is withheld.
            if let Some(stories) = model.stories() {
                if let Some(k) = stories
                    .iter()
                    .enumerate()
                    .rev()
                    .skip(1)
                    .find(|(_, s)| s.atom.dim() > 0)
                    .map(|(k, _)| k)
                {
                    if stories[k + 1..].iter().any(|s| s.atom.dim() > 0)
                        && stories[k]
                            .atom
                            .max_ideal_staircase()
                            .map(|s| s.is_principal())
                            .unwrap_or(false)
                    {
                        let label = format!("x (uniformizer of story {k})");
                        if let Ok(rep) = comparable_prime(model, k, &label) {
                            comparable_report = Some(rep);
                        }
                    }
                }
            }
        }
    }

    run_rules(model, &mut st, order)?;

    // Fill every registered flag with an Unknown verdict listing attempts.
    for f in FLAGS {
        if !st.flags.contains_key(*f) {
            st.flags.insert(
                (*f).to_string(),
                Verdict::unknown(vec![
                    "no seeding computation applied and no inference rule fired".into(),
                ]),
            );
        }
    }

    implication_post_pass(&st)?;

    // Per-prime verdicts.
    let ctx = StarContext {
        t_local: st.get("t_local"),
        dw: st.get("DW"),
        tw: st.get("TW"),
        conditional_on: {
            let mut c = st.conditions("t_local");
            c.extend(st.conditions("DW"));
            c.extend(st.conditions("TW"));
            c.sort();
            c.dedup();
            c
        },
    };
    let mut primes = BTreeMap::new();
    let treed_yes = st.get("treed").is_yes();
    let treed_conditions = st.conditions("treed");
    for node in &model.spectrum.nodes {
        if node.height == 0 {
            continue;
        }
        let mut t_ideal = prime_t_ideal(model, &node.name, &ctx);
        if t_ideal.value == Truth::Unknown && treed_yes {
            t_ideal = Verdict::yes_rule(
                "TREED",
                "when the spectrum is a tree, every nonzero prime ideal is a t-ideal",
            )
            .conditioned_on(&treed_conditions);
        }
        let mut well_behaved = prime_well_behaved(model, &node.name, &t_ideal);
        if well_behaved.value == Truth::Unknown && treed_yes && t_ideal.value.is_yes() {
            well_behaved = Verdict::yes_rule(
                "TREED",
                "when the spectrum is a tree, every nonzero prime ideal is a t-ideal and well behaved",
            )
            .conditioned_on(&treed_conditions);
        }
        primes.insert(
            node.name.clone(),
            PrimeVerdicts {
                t_ideal,
                well_behaved,
                potent: Verdict::unknown(vec![
                    "potency is only concluded through the finite-t-character rule, which did not fire".into(),
                ]),
            },
        );
    }

    Ok(PropertyReport {
        flags: st.flags,
        primes,
        comparable: comparable_report,
        dim: model.dim,
    })
}

/// Convenience: the t-local verdict.
pub fn is_t_local(model: &DomainModel) -> Result<Verdict, ClassifyError> {
    let rep = classify(model)?;
    Ok(rep
        .flags
        .get("t_local")
        .cloned()
        .unwrap_or_else(|| Verdict::unknown(vec!["flag missing".into()])))
}

/// Convenience: the Archimedean verdict.
pub fn archimedean(model: &DomainModel) -> Result<Verdict, ClassifyError> {
    let rep = classify(model)?;
    Ok(rep
        .flags
        .get("Archimedean")
        .cloned()
        .unwrap_or_else(|| Verdict::unknown(vec!["flag missing".into()])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build;
    use crate::values::ValueGroupDesc;

    fn tower4() -> DomainModel {
        build(&DomainDesc::Tower {
            stories: vec![
                DomainDesc::Valuation {
                    group: ValueGroupDesc::lex_z(1),
                    residue_field: "F_p".into(),
                    fraction_field: "Q".into(),
                },
                DomainDesc::Monomial {
                    atom: MonomialKind::PowerSeries { vars: 2 },
                    coefficient_field: "Q".into(),
                },
                DomainDesc::Valuation {
                    group: ValueGroupDesc::lex_z(1),
                    residue_field: "Q((X,Y))".into(),
                    fraction_field: "L".into(),
                },
            ],
        })
        .unwrap()
    }

    fn pvd_r() -> DomainModel {
        build(&DomainDesc::Pullback {
            t: Box::new(DomainDesc::Monomial {
                atom: MonomialKind::PowerSeries { vars: 1 },
                coefficient_field: "C".into(),
            }),
            r: Box::new(DomainDesc::Field {
                label: "R".into(),
                subfield_of: vec![],
                algebraically_closed: false,
                real_closed: true,
            }),
        })
        .unwrap()
    }

    fn rc2() -> DomainModel {
        build(&DomainDesc::Pullback {
            t: Box::new(DomainDesc::Monomial {
                atom: MonomialKind::LocalizedPolynomial { vars: 2 },
                coefficient_field: "C".into(),
            }),
            r: Box::new(DomainDesc::Field {
                label: "R".into(),
                subfield_of: vec![],
                algebraically_closed: false,
                real_closed: true,
            }),
        })
        .unwrap()
    }

    fn nreg2() -> DomainModel {
        build(&DomainDesc::Monomial {
            atom: MonomialKind::PowerSeries { vars: 2 },
            coefficient_field: "Q".into(),
        })
        .unwrap()
    }

    fn zpxr() -> DomainModel {
        build(&DomainDesc::Tower {
            stories: vec![
                DomainDesc::Valuation {
                    group: ValueGroupDesc::lex_z(1),
                    residue_field: "F_p".into(),
                    fraction_field: "Q".into(),
                },
                DomainDesc::Monomial {
                    atom: MonomialKind::PowerSeries { vars: 1 },
                    coefficient_field: "R".into(),
                },
            ],
        })
        .unwrap()
    }

    fn semigroup_atom() -> DomainModel {
        build(&DomainDesc::Monomial {
            atom: MonomialKind::NumericalSemigroup {
                generators: vec![2, 3],
            },
            coefficient_field: "Q".into(),
        })
        .unwrap()
    }

    fn val3() -> DomainModel {
        build(&DomainDesc::Valuation {
            group: ValueGroupDesc::lex_z(3),
            residue_field: "k".into(),
            fraction_field: "K".into(),
        })
        .unwrap()
    }

    #[test]
    fn four_dim_tower_is_t_local_via_principal_maximal() {
        let d = tower4();
        let rep = classify(&d).unwrap();
        assert!(rep.flag("t_local").is_yes());
        // The principal-maximal route must be among the justifications.
        let tl = &rep.flags["t_local"];
        assert!(tl
            .provenance
            .iter()
            .any(|p| matches!(p, Provenance::Rule { id, .. } if id == "C4")));
        assert!(rep.flag("DW").is_yes());
        assert!(rep.flag("valuation").is_no());
        assert!(rep.flag("Archimedean").is_no());
        assert!(rep.flag("comparable_element").is_yes());
        assert_eq!(rep.dim, 4);

        // The conductor is a t-ideal but badly behaved: its extension to the
        // localization (the power series overring) is not a t-ideal there.
        let q = &rep.primes["Q"];
        assert!(q.t_ideal.value.is_yes());
        assert!(q.well_behaved.value.is_no());
        // Coordinate primes localize to composite valuations: well behaved.
        let x = &rep.primes["X"];
        assert!(x.t_ideal.value.is_yes());
        assert!(x.well_behaved.value.is_yes());

        let comp = rep.comparable.as_ref().unwrap();
        assert_eq!(comp.powers_intersection_prime.as_deref(), Some("Q"));
        assert!(comp.comparable_confirmed.value.is_yes());
        assert_eq!(comp.dim_additivity, Some((4, 1, 3)));
        assert!(comp.localization_valuation.value.is_no());
    }

    #[test]
    fn pseudo_valuation_pullback_is_t_local_without_comparable_elements() {
        let d = pvd_r();
        let rep = classify(&d).unwrap();
        assert!(rep.flag("t_local").is_yes());
        assert!(rep.flag("valuation").is_no());
        assert!(rep.flag("comparable_element").is_no());
        assert!(rep.flag("DVR").is_no());
        assert!(rep.flag("integrally_closed").is_no());
        assert!(rep.flag("GCD").is_no());
        assert!(rep.flag("Archimedean").is_yes());
    }

    #[test]
    fn two_dim_pullback_fails_dt_but_is_t_local() {
        let d = rc2();
        let rep = classify(&d).unwrap();
        assert!(rep.flag("t_local").is_yes());
        assert!(rep.flag("DW").is_yes());
        assert!(rep.flag("DT_fgv").is_no());
        assert!(rep.flag("TW").is_no());
        assert!(rep.flag("PvMD").is_no());
        assert!(rep.flag("Prufer").is_no());
    }

    #[test]
    fn regular_two_dim_atom_is_not_t_local() {
        let d = nreg2();
        let rep = classify(&d).unwrap();
        assert!(rep.flag("t_local").is_no());
        assert!(rep.flag("DW").is_no());
        assert!(rep.flag("TW").is_yes());
        assert!(rep.flag("GCD").is_yes());
        assert!(rep.flag("comparable_element").is_no());
        assert!(rep.flag("Noetherian").is_yes());
        assert!(rep.flag("Archimedean").is_yes());
        assert!(rep.flag("valuation").is_no());
        // Height-one coordinate primes are well-behaved t-ideals.
        let x = &rep.primes["X"];
        assert!(x.t_ideal.value.is_yes());
        assert!(x.well_behaved.value.is_yes());
    }

    #[test]
    fn rank_one_over_power_series_detects_non_valuation_via_localization() {
        let d = zpxr();
        let rep = classify(&d).unwrap();
        assert!(rep.flag("t_local").is_yes());
        assert!(rep.flag("valuation").is_no());
        let v = &rep.flags["valuation"];
        assert!(v
            .provenance
            .iter()
            .any(|p| matches!(p, Provenance::Rule { id, .. } if id == "VQ")));
        let comp = rep.comparable.as_ref().unwrap();
        assert!(comp.localization_valuation.value.is_no());
        assert!(comp.comparable_confirmed.value.is_yes());
        assert!(rep.flag("Archimedean").is_no());
    }

    #[test]
    fn semigroup_ring_is_t_local_but_not_integrally_closed() {
        let d = semigroup_atom();
        let rep = classify(&d).unwrap();
        assert!(rep.flag("t_local").is_yes());
        assert!(rep.flag("integrally_closed").is_no());
        assert!(rep.flag("valuation").is_no());
        assert!(rep.flag("GCD").is_no());
        assert!(rep.flag("Noetherian").is_yes());
        assert!(rep.flag("comparable_element").is_no());
    }

    #[test]
    fn valuation_atom_has_multiple_independent_routes() {
        let d = val3();
        let rep = classify(&d).unwrap();
        let v = &rep.flags["valuation"];
        assert!(v.value.is_yes());
        let routes = v.provenance.len();
        assert!(routes >= 3, "expected >= 3 routes, got {routes}: {v:?}");
        assert!(rep.flag("t_local").is_yes());
        assert!(rep.flag("Noetherian").is_no());
        assert!(rep.flag("Archimedean").is_no());
        assert!(rep.flag("Prufer").is_yes());
        assert!(rep.flag("DT_fgv").is_yes());
    }

    #[test]
    fn rule_order_permutations_leave_reports_unchanged() {
        for model in [tower4(), rc2(), nreg2(), zpxr(), pvd_r(), semigroup_atom(), val3()] {
            let base = classify(&model).unwrap();
            let n = rule_count(&model);
            let reversed: Vec<usize> = (0..n).rev().collect();
            let rotated: Vec<usize> = (0..n).map(|i| (i + 7) % n).collect();
            let strided: Vec<usize> = (0..n).map(|i| (i * 13) % n).collect();
            for order in [reversed, rotated, strided] {
                let got = classify_with_order(&model, Some(&order)).unwrap();
                assert_eq!(got, base);
            }
        }
    }
}
