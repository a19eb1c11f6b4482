//! Query dispatch and the machine-readable report format.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};
use starforge::classify::{classify, PropertyReport};
use starforge::domain::DomainModel;
use starforge::star::{self, StarOp};
use starforge::verdict::{Provenance, Truth, Verdict};

use crate::CliError;

/// A query report.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub query: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    /// Wall-clock timings; excluded from determinism comparisons.
    pub timings: Timings,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub total_ms: u128,
}

/// The queries the CLI understands.
pub const QUERIES: &[&str] = &[
    "t-local",
    "classify",
    "closure:<ideal>:<op>",
    "t-ideal:<prime>",
    "well-behaved:<prime>",
    "gv:<ideal>",
    "comparable",
    "dim",
    "spectrum",
];

fn classified(model: &DomainModel) -> Result<PropertyReport, CliError> {
    classify(model).map_err(|e| CliError::Build(format!("classification aborted: {e}")))
}

fn named_ideal<'m>(
    model: &'m DomainModel,
    name: &str,
) -> Result<&'m starforge::fragment::FragmentIdeal, CliError> {
    model
        .named_ideals
        .get(name)
        .ok_or_else(|| CliError::Usage(format!("unknown ideal name {name:?}")))
}

/// Run one query against a built model.
pub fn run_query(model: &DomainModel, query: &str) -> Result<Report, CliError> {
    let start = Instant::now();
    let (verdict, result) = dispatch(model, query)?;
    Ok(Report {
        query: query.to_string(),
        verdict,
        result,
        timings: Timings {
            total_ms: start.elapsed().as_millis(),
        },
    })
}

fn dispatch(model: &DomainModel, query: &str) -> Result<(Verdict, Option<Value>), CliError> {
    match query {
        "t-local" => {
            let rep = classified(model)?;
            Ok((flag_verdict(&rep, "t_local"), None))
        }
        "classify" => {
            let rep = classified(model)?;
            let decided = rep.flags.values().filter(|v| v.value.is_known()).count();
            let v = Verdict::yes_computation(vec![format!(
                "classification completed: {decided} of {} flags decided",
                rep.flags.len()
            )]);
            let result = serde_json::to_value(&rep)
                .map_err(|e| CliError::Build(format!("report serialization failed: {e}")))?;
            Ok((v, Some(result)))
        }
        "comparable" => {
            let rep = classified(model)?;
            let result = rep
                .comparable
                .as_ref()
                .map(serde_json::to_value)
                .transpose()
                .map_err(|e| CliError::Build(format!("report serialization failed: {e}")))?;
            Ok((flag_verdict(&rep, "comparable_element"), result))
        }
        "dim" => Ok((
            Verdict::yes_computation(vec![format!(
                "dimension computed from the spectrum: {}",
                model.dim
            )]),
            Some(json!(model.dim)),
        )),
        "spectrum" => {
            let mut nodes: Vec<Value> = model
                .spectrum
                .nodes
                .iter()
                .map(|n| {
                    let mut o = json!({ "name": n.name, "height": n.height });
                    if let Some(f) = &n.family {
                        o["family"] = json!({
                            "cardinality": f.cardinality,
                            "description": f.description,
                        });
                    }
                    o
                })
                .collect();
            nodes.sort_by_key(|v| {
                (
                    v["height"].as_u64().unwrap_or(0),
                    v["name"].as_str().unwrap_or("").to_string(),
                )
            });
            Ok((
                Verdict::yes_computation(vec![format!(
                    "spectrum has {} named nodes/families",
                    nodes.len()
                )]),
                Some(Value::Array(nodes)),
            ))
        }
        q if q.starts_with("closure:") => closure_query(model, q),
        q if q.starts_with("t-ideal:") => {
            let name = &q["t-ideal:".len()..];
            if let Ok(ideal) = named_ideal(model, name) {
                let rep = classified(model)?;
                let v = star::is_t_ideal_fragment(model, ideal, &rep.star_context());
                return Ok((v, None));
            }
            let rep = classified(model)?;
            let pv = rep
                .primes
                .get(name)
                .ok_or_else(|| CliError::Usage(format!("unknown ideal or prime name {name:?}")))?;
            Ok((pv.t_ideal.clone(), None))
        }
        q if q.starts_with("well-behaved:") => {
            let name = &q["well-behaved:".len()..];
            let rep = classified(model)?;
            let pv = rep
                .primes
                .get(name)
                .ok_or_else(|| CliError::Usage(format!("unknown prime name {name:?}")))?;
            Ok((pv.well_behaved.clone(), None))
        }
        q if q.starts_with("gv:") => {
            let name = &q["gv:".len()..];
            let ideal = named_ideal(model, name)?.clone();
            let rep = classified(model)?;
            Ok((star::is_gv(model, &ideal, &rep.star_context()), None))
        }
        other => Err(CliError::Usage(format!(
            "unknown query {other:?}; supported: {}",
            QUERIES.join(", ")
        ))),
    }
}

/// `closure:<ideal>:<op>` asks whether the named ideal is already closed
/// under the operation; the report carries the computed closure itself.
fn closure_query(model: &DomainModel, query: &str) -> Result<(Verdict, Option<Value>), CliError> {
    let rest = &query["closure:".len()..];
    let (name, op_str) = rest
        .rsplit_once(':')
        .ok_or_else(|| CliError::Usage(format!("malformed closure query {query:?}")))?;
    let op: StarOp = op_str
        .parse()
        .map_err(|e: String| CliError::Usage(e))?;
    let ideal = named_ideal(model, name)?.clone();
    let rep = classified(model)?;
    let ctx = rep.star_context();
    let c = star::closure(model, &ideal, op, &ctx)
        .map_err(|e| CliError::Build(format!("closure failed: {e}")))?;
    let closed = c.result.same_as(&ideal);
    let mut trace = c.trace.clone();
    let verdict = if closed {
        trace.push(format!("{} is already {op}-closed", ideal.describe()));
        Verdict::yes_computation(trace).conditioned_on(&c.conditional_on)
    } else if c.exact {
        trace.push(format!(
            "{op}-closure of {} is {}, a strictly larger ideal",
            ideal.describe(),
            c.result.describe()
        ));
        Verdict::no_computation(trace).conditioned_on(&c.conditional_on)
    } else {
        trace.push(
            "the witness search gives only a lower bound, so closedness is undetermined".into(),
        );
        Verdict::unknown(trace)
    };
    let result = json!({
        "closure": c.result.describe(),
        "exact": c.exact,
        "trace": c.trace,
    });
    Ok((verdict, Some(result)))
}

fn flag_verdict(rep: &PropertyReport, flag: &str) -> Verdict {
    rep.flags
        .get(flag)
        .cloned()
        .unwrap_or_else(|| Verdict::unknown(vec![format!("flag {flag} missing from report")]))
}

/// Render a report for humans.
pub fn render_text(report: &Report) -> String {
    let mut out = format!("{}: {}\n", report.query, report.verdict.value);
    for p in &report.verdict.provenance {
        match p {
            Provenance::Computation { trace } => {
                out.push_str("  computation:\n");
                for line in trace {
                    out.push_str(&format!("    {line}\n"));
                }
            }
            Provenance::Rule { id, statement } => {
                out.push_str(&format!("  rule {id}: {statement}\n"));
            }
            Provenance::Declared { source } => {
                out.push_str(&format!("  declared: {source}\n"));
            }
        }
    }
    if report.verdict.value == Truth::Unknown && !report.verdict.attempted.is_empty() {
        out.push_str("  attempted:\n");
        for a in &report.verdict.attempted {
            out.push_str(&format!("    {a}\n"));
        }
    }
    if !report.verdict.conditional_on.is_empty() {
        out.push_str("  conditional on:\n");
        for c in &report.verdict.conditional_on {
            out.push_str(&format!("    {c}\n"));
        }
    }
    if let Some(r) = &report.result {
        out.push_str(&format!(
            "  result: {}\n",
            serde_json::to_string(r).unwrap_or_default()
        ));
    }
    out
}

/// The answer a corpus expectation is compared against: the verdict value
/// for most queries, the numeric result for `dim`.
pub fn expectation_answer(report: &Report) -> Value {
    if report.query == "dim" {
        report.result.clone().unwrap_or(Value::Null)
    } else {
        json!(report.verdict.value.to_string())
    }
}
