//! Three-valued verdicts with provenance.
//!
//! Every question the engine answers comes back as Yes, No, or Unknown.
//! Yes/No always carry at least one provenance entry: either a computation
//! trace ending in an ideal equality/inequality witness, or a named inference
//! rule together with the mathematical statement it applies. Unknown carries
//! the list of rules that were attempted. Verdicts depending on facts
//! declared in a fixture file (rather than derived) list those facts in
//! `conditional_on`.

use serde::{Deserialize, Serialize};

/// The three truth values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Truth {
    Yes,
    No,
    #[default]
    Unknown,
}

impl Truth {
    #[must_use]
    pub fn is_yes(self) -> bool {
        self == Truth::Yes
    }

    #[must_use]
    pub fn is_no(self) -> bool {
        self == Truth::No
    }

    #[must_use]
    pub fn is_known(self) -> bool {
        self != Truth::Unknown
    }
}

impl std::fmt::Display for Truth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Truth::Yes => "Yes",
            Truth::No => "No",
            Truth::Unknown => "Unknown",
        };
        write!(f, "{s}")
    }
}

/// Why a verdict holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// An exact computation; the trace lists the steps and ends in the
    /// witnessing equality or inequality.
    Computation { trace: Vec<String> },
    /// An inference rule; `statement` is the mathematical fact the rule
    /// encodes, quoted so reports are self-contained.
    Rule { id: String, statement: String },
    /// A fact declared in the fixture file, with its source note.
    Declared { source: String },
}

/// A three-valued answer with its justification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: Truth,
    pub provenance: Vec<Provenance>,
    /// Rules tried without success; nonempty whenever `value` is Unknown.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attempted: Vec<String>,
    /// Declared facts this verdict depends on.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditional_on: Vec<String>,
}

impl Verdict {
    #[must_use]
    pub fn yes_computation(trace: Vec<String>) -> Self {
        Verdict {
            value: Truth::Yes,
            provenance: vec![Provenance::Computation { trace }],
            attempted: Vec::new(),
            conditional_on: Vec::new(),
        }
    }

    #[must_use]
    pub fn no_computation(trace: Vec<String>) -> Self {
        Verdict {
            value: Truth::No,
            provenance: vec![Provenance::Computation { trace }],
            attempted: Vec::new(),
            conditional_on: Vec::new(),
        }
    }

    #[must_use]
    pub fn yes_rule(id: &str, statement: &str) -> Self {
        Verdict {
            value: Truth::Yes,
            provenance: vec![Provenance::Rule {
                id: id.to_string(),
                statement: statement.to_string(),
            }],
            attempted: Vec::new(),
            conditional_on: Vec::new(),
        }
    }

    #[must_use]
    pub fn no_rule(id: &str, statement: &str) -> Self {
        Verdict {
            value: Truth::No,
            provenance: vec![Provenance::Rule {
                id: id.to_string(),
                statement: statement.to_string(),
            }],
            attempted: Vec::new(),
            conditional_on: Vec::new(),
        }
    }

    #[must_use]
    pub fn declared(value: Truth, source: &str) -> Self {
        Verdict {
            value,
            provenance: vec![Provenance::Declared {
                source: source.to_string(),
            }],
            attempted: Vec::new(),
            conditional_on: vec![source.to_string()],
        }
    }

    #[must_use]
    pub fn unknown(attempted: Vec<String>) -> Self {
        debug_assert!(!attempted.is_empty());
        Verdict {
            value: Truth::Unknown,
            provenance: Vec::new(),
            attempted,
        conditional_on: Vec::new(),
        }
    }

    /// Add a further independent justification (same truth value).
    #[must_use]
    pub fn also(mut self, p: Provenance) -> Self {
        self.provenance.push(p);
        self
    }

    /// Propagate a dependency on declared facts.
    #[must_use]
    pub fn conditioned_on(mut self, sources: &[String]) -> Self {
        for s in sources {
            if !self.conditional_on.contains(s) {
                self.conditional_on.push(s.clone());
            }
        }
        self
    }
}
