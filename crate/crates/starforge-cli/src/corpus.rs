//! Corpus runner: evaluate every fixture's expectation block.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::Value;

use crate::report::{expectation_answer, run_query};
use crate::{domfile, CliError};

struct FixtureOutcome {
    lines: Vec<String>,
    failures: usize,
    error: Option<CliError>,
}

/// Run every `*.json` fixture under `dir`; print one PASS/FAIL line per
/// (fixture, query) in a deterministic order. Exit 0 iff all pass.
pub fn run(dir: &Path, parallel: bool) -> Result<u8, CliError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Usage(format!(
            "no *.json fixtures under {}",
            dir.display()
        )));
    }

    let outcomes: Vec<FixtureOutcome> = if parallel {
        files.par_iter().map(|p| evaluate_fixture(p)).collect()
    } else {
        files.iter().map(|p| evaluate_fixture(p)).collect()
    };

    let mut checked = 0usize;
    let mut failures = 0usize;
    for outcome in &outcomes {
        for line in &outcome.lines {
            println!("{line}");
        }
        checked += outcome.lines.len();
        failures += outcome.failures;
        if let Some(e) = &outcome.error {
            // Fixtures must parse and build; surface the first hard error.
            return Err(e.clone());
        }
    }
    println!(
        "corpus: {} expectations checked across {} fixtures, {} failed",
        checked,
        outcomes.len(),
        failures
    );
    Ok(if failures == 0 { 0 } else { 1 })
}

fn evaluate_fixture(path: &Path) -> FixtureOutcome {
    let mut out = FixtureOutcome {
        lines: vec![],
        failures: 0,
        error: None,
    };
    let file = match domfile::parse_domain(path) {
        Ok(f) => f,
        Err(e) => {
            out.error = Some(e);
            return out;
        }
    };
    let model = match domfile::build_model(&file) {
        Ok(m) => m,
        Err(e) => {
            out.error = Some(e);
            return out;
        }
    };
    // BTreeMap iteration gives a deterministic per-fixture query order.
    for (query, expected) in &file.expect {
        match run_query(&model, query) {
            Ok(rep) => {
                let got = expectation_answer(&rep);
                if &got == expected {
                    out.lines
                        .push(format!("PASS {} {} = {}", file.name, query, render(&got)));
                } else {
                    out.failures += 1;
                    let provenance = serde_json::to_string(&rep.verdict)
                        .unwrap_or_else(|_| "<unserializable verdict>".into());
                    out.lines.push(format!(
                        "FAIL {} {} expected {} got {} — verdict: {}",
                        file.name,
                        query,
                        render(expected),
                        render(&got),
                        provenance
                    ));
                }
            }
            Err(e) => {
                out.failures += 1;
                out.lines
                    .push(format!("FAIL {} {} query error: {e}", file.name, query));
            }
        }
    }
    out
}

fn render(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
