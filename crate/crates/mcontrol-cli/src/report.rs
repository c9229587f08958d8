//! Human and JSON renderings of answers, actions and profiles.

use mcontrol::election::members;
use mcontrol::oracle::{OracleOutcome, Trace, TraceKind};
use mcontrol::solvers::DirectOutcome;
use mcontrol::{Action, Ballot, Instance};
use serde_json::{json, Value};

/// Document-style reference to a voter: `voters[i]` for registered voters,
/// `control.unregistered_voters[i]` for the pool.
pub fn voter_ref(inst: &Instance, v: usize) -> String {
    let nreg = inst.registered().count();
    if v < nreg {
        format!("voters[{v}]")
    } else {
        format!("control.unregistered_voters[{}]", v - nreg)
    }
}

fn names(inst: &Instance, set: u64) -> Vec<String> {
    members(set).map(|c| inst.name(c).to_string()).collect()
}

pub fn ballot_json(inst: &Instance, b: &Ballot) -> Value {
    match b {
        Ballot::Order(o) => json!(o.iter().map(|&c| inst.name(c)).collect::<Vec<_>>()),
        Ballot::Approval(a) => json!(names(inst, *a)),
        Ballot::Blank => Value::Null,
    }
}

pub fn action_json(inst: &Instance, a: &Action) -> Value {
    let refs = |vs: &[usize]| vs.iter().map(|&v| voter_ref(inst, v)).collect::<Vec<_>>();
    match a {
        Action::AddVoters(v) => json!({ "add_voters": refs(v) }),
        Action::DeleteVoters(v) => json!({ "delete_voters": refs(v) }),
        Action::AddCandidates(s) => json!({ "add_candidates": names(inst, *s) }),
        Action::DeleteCandidates(s) => json!({ "delete_candidates": names(inst, *s) }),
        Action::PartitionVoters(v) => {
            let rest: Vec<usize> = inst.registered().filter(|x| !v.contains(x)).collect();
            json!({ "partition_voters": [refs(v), refs(&rest)] })
        }
        Action::PartitionCandidates(s) => {
            json!({ "partition_candidates": [names(inst, *s), names(inst, inst.candidates & !s)] })
        }
    }
}

/// Profile entries keyed by the manipulator's voter reference.
pub fn profile_json(inst: &Instance, profile: &[Ballot]) -> Value {
    let manips = inst.manipulators();
    Value::Array(
        manips
            .iter()
            .zip(profile)
            .map(|(&v, b)| json!({ "voter": voter_ref(inst, v), "ballot": ballot_json(inst, b) }))
            .collect(),
    )
}

pub fn trace_json(inst: &Instance, kind: Option<TraceKind>, t: &Trace) -> Value {
    let mut out = serde_json::Map::new();
    if let Some(k) = kind {
        let k = match k {
            TraceKind::Witness => "witness",
            TraceKind::Counterexample => "counterexample",
        };
        out.insert("kind".into(), json!(k));
    }
    if let Some(a) = &t.action {
        out.insert("action".into(), action_json(inst, a));
    }
    if let Some(p) = &t.profile {
        out.insert("profile".into(), profile_json(inst, p));
    }
    if let Some(r) = &t.revote {
        out.insert("revote".into(), profile_json(inst, r));
    }
    Value::Object(out)
}

pub fn oracle_json(inst: &Instance, o: &OracleOutcome) -> Value {
    json!({
        "answer": o.answer,
        "states": o.states.to_string(),
        "trace": o.trace.as_ref().map(|(k, t)| trace_json(inst, Some(*k), t)),
    })
}

pub fn direct_json(inst: &Instance, o: &DirectOutcome) -> Value {
    json!({
        "answer": o.answer,
        "trace": o.trace.as_ref().map(|t| trace_json(inst, Some(TraceKind::Witness), t)),
    })
}

/// One-line-per-fact text form of a JSON report.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    write_text(v, "", &mut out);
    out
}

fn write_text(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                write_text(x, &key, out);
            }
        }
        Value::Null => {}
        _ => {
            let shown = match v {
                Value::String(s) => s.clone(),
                Value::Bool(true) => "yes".into(),
                Value::Bool(false) => "no".into(),
                other => other.to_string(),
            };
            out.push_str(&format!("{prefix}: {shown}\n"));
        }
    }
}
