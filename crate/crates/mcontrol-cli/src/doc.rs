//! Versioned JSON instance documents.

use mcontrol::control::Kind;
use mcontrol::election::{bit, members, BallotKind};
use mcontrol::{Ballot, ControlType, Error, Goal, Instance, Mode, Result, Rule, Scenario, Voter};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub format_version: u32,
    pub system: String,
    pub candidates: Vec<String>,
    pub distinguished: String,
    pub control: ControlDoc,
    pub scenario: ScenarioDoc,
    pub voters: Vec<VoterDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlDoc {
    #[serde(rename = "type")]
    pub ctype: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unregistered_voters: Vec<VoterDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spoiler_candidates: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub goal: String,
    pub mode: String,
    #[serde(default)]
    pub revoting: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoterDoc {
    /// Ranked names for order rules, approved names for approval, null for
    /// a manipulator.
    pub ballot: Option<Vec<String>>,
    #[serde(default = "one")]
    pub weight: u64,
    #[serde(default)]
    pub registered: Option<bool>,
    #[serde(default)]
    pub manipulator: bool,
}

fn one() -> u64 {
    1
}

fn err<T>(path: &str, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::Malformed(format!("{path}: {msg}")))
}

pub fn goal_id(goal: Goal) -> &'static str {
    match goal {
        Goal::Constructive => "constructive",
        Goal::Destructive => "destructive",
    }
}

/// Parses and validates a document. Syntax errors carry line and column,
/// validation errors the path of the offending field.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text)
        .map_err(|e| Error::Malformed(format!("line {} column {}: {e}", e.line(), e.column())))?;
    doc_to_instance(&doc)
}

pub fn doc_to_instance(doc: &InstanceDoc) -> Result<Instance> {
    if doc.format_version != FORMAT_VERSION {
        return err("format_version", format!("expected {FORMAT_VERSION}, got {}", doc.format_version));
    }
    let rule = Rule::parse(&doc.system).or_else(|e| err("system", e))?;
    let ctype = ControlType::parse(&doc.control.ctype).or_else(|e| err("control.type", e))?;
    let goal = match doc.scenario.goal.as_str() {
        "constructive" => Goal::Constructive,
        "destructive" => Goal::Destructive,
        g => return err("scenario.goal", format!("unknown goal {g:?}")),
    };
    if goal != ctype.goal {
        return err("scenario.goal", format!("{} does not match control type {}", doc.scenario.goal, ctype.code()));
    }
    let mode = Mode::parse(&doc.scenario.mode).or_else(|e| err("scenario.mode", e))?;
    let scenario = Scenario { mode, revoting: doc.scenario.revoting };
    let limit = match (ctype.has_limit(), doc.control.limit) {
        (true, Some(k)) => k,
        (true, None) => return err("control.limit", format!("{} needs a limit", ctype.code())),
        (false, None) => 0,
        (false, Some(_)) => return err("control.limit", "partition types take no limit"),
    };

    let mut names: Vec<String> = doc.candidates.iter().chain(&doc.control.spoiler_candidates).cloned().collect();
    names.sort();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return err("candidates", format!("duplicate candidate {:?}", w[0]));
    }
    let index = |name: &str| names.binary_search_by(|n| n.as_str().cmp(name)).ok().map(|i| i as u8);
    let set_of = |list: &[String]| list.iter().fold(0u64, |acc, n| acc | bit(index(n).unwrap()));
    let candidates = set_of(&doc.candidates);
    let spoilers = set_of(&doc.control.spoiler_candidates);
    let Some(p) = index(&doc.distinguished).filter(|&c| candidates >> c & 1 == 1) else {
        return err("distinguished", format!("{:?} is not a registered candidate", doc.distinguished));
    };

    let mut voters = Vec::new();
    for (list, path, registered) in
        [(&doc.voters, "voters", true), (&doc.control.unregistered_voters, "control.unregistered_voters", false)]
    {
        for (i, v) in list.iter().enumerate() {
            let path = format!("{path}[{i}]");
            if v.registered.is_some_and(|r| r != registered) {
                return err(&format!("{path}.registered"), format!("must be {registered} in this list"));
            }
            if v.weight == 0 {
                return err(&format!("{path}.weight"), "must be positive");
            }
            let ballot = match (&v.ballot, v.manipulator) {
                (None, true) => Ballot::Blank,
                (Some(_), true) => return err(&format!("{path}.ballot"), "manipulator ballots must be null"),
                (None, false) => return err(&format!("{path}.ballot"), "missing ballot for a non-manipulator"),
                (Some(b), false) => {
                    let mut cands = Vec::with_capacity(b.len());
                    for (j, n) in b.iter().enumerate() {
                        match index(n) {
                            Some(c) => cands.push(c),
                            None => return err(&format!("{path}.ballot[{j}]"), format!("unknown candidate {n:?}")),
                        }
                    }
                    match rule.ballot_kind() {
                        BallotKind::Order => Ballot::Order(cands),
                        BallotKind::Approval => {
                            let set = cands.iter().fold(0u64, |a, &c| a | bit(c));
                            if set.count_ones() as usize != cands.len() {
                                return err(&format!("{path}.ballot"), "repeated candidate");
                            }
                            Ballot::Approval(set)
                        }
                    }
                }
            };
            voters.push(Voter { ballot, weight: v.weight, manipulator: v.manipulator, registered });
        }
    }
    let inst = Instance { rule, names, candidates, spoilers, p, ctype, limit, voters, scenario };
    inst.validate()?;
    Ok(inst)
}

fn voter_doc(inst: &Instance, v: &Voter) -> VoterDoc {
    let ballot = match &v.ballot {
        Ballot::Blank => None,
        Ballot::Order(o) => Some(o.iter().map(|&c| inst.name(c).to_string()).collect()),
        Ballot::Approval(a) => Some(members(*a).map(|c| inst.name(c).to_string()).collect()),
    };
    VoterDoc { ballot, weight: v.weight, registered: Some(v.registered), manipulator: v.manipulator }
}

pub fn instance_to_doc(inst: &Instance) -> InstanceDoc {
    let names = |set: u64| members(set).map(|c| inst.name(c).to_string()).collect::<Vec<_>>();
    let pick = |registered: bool| {
        inst.voters.iter().filter(|v| v.registered == registered).map(|v| voter_doc(inst, v)).collect::<Vec<_>>()
    };
    InstanceDoc {
        format_version: FORMAT_VERSION,
        system: inst.rule.id().to_string(),
        candidates: names(inst.candidates),
        distinguished: inst.name(inst.p).to_string(),
        control: ControlDoc {
            ctype: inst.ctype.code(),
            limit: inst.ctype.has_limit().then_some(inst.limit),
            unregistered_voters: if inst.ctype.kind == Kind::AddVoters { pick(false) } else { Vec::new() },
            spoiler_candidates: names(inst.spoilers),
        },
        scenario: ScenarioDoc {
            goal: goal_id(inst.goal()).to_string(),
            mode: inst.scenario.mode.id().to_string(),
            revoting: inst.scenario.revoting,
        },
        voters: pick(true),
    }
}

pub fn serialize_instance(inst: &Instance) -> String {
    serde_json::to_string_pretty(&instance_to_doc(inst)).expect("documents always serialize")
}
