//! The on-disk domain file format and its canonical JSON form.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use starforge::classify::FLAGS;
use starforge::domain::{build, DeclaredFact, DomainDesc, DomainModel};
use starforge::fragment::FragmentSpec;

use crate::CliError;

/// A domain description file: constructor tree plus fixture metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    pub name: String,
    /// Free-text description of the ring the file encodes.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub desc: DomainDesc,
    /// Named fragment ideals usable in queries.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub named_ideals: BTreeMap<String, FragmentSpec>,
    /// Facts declared rather than derived; each must cite a source string.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub declared: BTreeMap<String, DeclaredFact>,
    /// Expected query answers (fixtures only).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expect: BTreeMap<String, serde_json::Value>,
}

/// Canonical JSON: keys sorted (serde_json's default map is ordered),
/// two-space indentation, trailing newline, LF endings.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value)
        .map_err(|e| CliError::Schema(format!("serialization failed: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v)
        .map_err(|e| CliError::Schema(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Load and schema-validate a domain file.
pub fn parse_domain(path: &Path) -> Result<DomainFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: DomainFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    validate(&file).map_err(|e| match e {
        CliError::Schema(msg) => CliError::Schema(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    Ok(file)
}

fn validate(file: &DomainFile) -> Result<(), CliError> {
    if file.name.is_empty() {
        return Err(CliError::Schema("name must be nonempty".into()));
    }
    for (flag, fact) in &file.declared {
        if !FLAGS.contains(&flag.as_str()) {
            return Err(CliError::Schema(format!(
                "declared flag {flag:?} is not a recognized property flag"
            )));
        }
        if fact.source.trim().is_empty() {
            return Err(CliError::Schema(format!(
                "declared flag {flag:?} carries an empty source anchor"
            )));
        }
    }
    Ok(())
}

/// Build the model a file describes, injecting declared facts and resolving
/// named ideals.
pub fn build_model(file: &DomainFile) -> Result<DomainModel, CliError> {
    let mut model = build(&file.desc).map_err(|e| CliError::Build(e.to_string()))?;
    model.declared = file.declared.clone();
    for (name, spec) in &file.named_ideals {
        let ideal = spec
            .resolve(&model)
            .map_err(|e| CliError::Build(format!("named ideal {name}: {e}")))?;
        model.named_ideals.insert(name.clone(), ideal);
    }
    Ok(model)
}
