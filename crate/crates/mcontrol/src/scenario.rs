//! Problem instances, move orders and the goal predicate.

use crate::control::{self, Action, ControlType, Goal, Kind};
use crate::election::{bit, contains, members, valid_name, Ballot, BallotKind, Cand, CandSet, Rule, Voter, MAX_CANDIDATES};
use crate::error::{malformed, Error, Result};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Chair and manipulators cooperate.
    MPlus,
    /// Chair moves first, manipulators answer.
    CF,
    /// Manipulators commit first, chair answers.
    MF,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::MPlus, Mode::CF, Mode::MF];

    pub fn id(self) -> &'static str {
        match self {
            Mode::MPlus => "M+",
            Mode::CF => "CF",
            Mode::MF => "MF",
        }
    }

    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "M+" | "Mplus" | "MPlus" | "mplus" => Ok(Mode::MPlus),
            "CF" | "cf" => Ok(Mode::CF),
            "MF" | "mf" => Ok(Mode::MF),
            _ => malformed(format!("unknown mode {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scenario {
    pub mode: Mode,
    pub revoting: bool,
}

impl Scenario {
    pub fn new(mode: Mode) -> Scenario {
        Scenario { mode, revoting: false }
    }

    pub fn revoting(mode: Mode) -> Scenario {
        Scenario { mode, revoting: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Action,
    Profile,
    Revote,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prefix(pub Vec<(Quantifier, Block)>);

impl fmt::Display for Prefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, _) in &self.0 {
            f.write_str(match q {
                Quantifier::Exists => "∃",
                Quantifier::Forall => "∀",
            })?;
        }
        Ok(())
    }
}

pub fn quantifier_prefix(scenario: Scenario, ctype: ControlType) -> Result<Prefix> {
    use Block::*;
    use Quantifier::*;
    if scenario.revoting && !ctype.is_partition() {
        return Err(Error::InvalidScenario(format!("revoting needs a partition type, got {}", ctype.code())));
    }
    let mut v = match scenario.mode {
        Mode::MPlus => vec![(Exists, Action), (Exists, Profile)],
        Mode::CF => vec![(Exists, Action), (Forall, Profile)],
        Mode::MF => vec![(Forall, Profile), (Exists, Action)],
    };
    if scenario.revoting {
        v.push((if scenario.mode == Mode::MPlus { Exists } else { Forall }, Revote));
    }
    Ok(Prefix(v))
}

/// A control-plus-manipulation question.
///
/// `names` lists every candidate the instance mentions (registered ones and
/// spoilers) in byte order; ballots refer to positions in it. Registered
/// voters come first in `voters`, followed by the unregistered pool.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub rule: Rule,
    pub names: Vec<String>,
    pub candidates: CandSet,
    pub spoilers: CandSet,
    pub p: Cand,
    pub ctype: ControlType,
    pub limit: usize,
    pub voters: Vec<Voter>,
    pub scenario: Scenario,
}

impl Instance {
    pub fn goal(&self) -> Goal {
        self.ctype.goal
    }

    /// Candidates that ballots range over.
    pub fn domain(&self) -> CandSet {
        self.candidates | self.spoilers
    }

    pub fn registered(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.voters.len()).filter(|&i| self.voters[i].registered)
    }

    pub fn pool(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.voters.len()).filter(|&i| !self.voters[i].registered)
    }

    pub fn manipulators(&self) -> Vec<usize> {
        (0..self.voters.len()).filter(|&i| self.voters[i].manipulator).collect()
    }

    pub fn index(&self, name: &str) -> Option<Cand> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok().map(|i| i as Cand)
    }

    pub fn name(&self, c: Cand) -> &str {
        &self.names[c as usize]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.names.len();
        if n == 0 || n > MAX_CANDIDATES {
            return malformed(format!("candidate count must be in 1..={MAX_CANDIDATES}"));
        }
        if let Some(bad) = self.names.iter().find(|s| !valid_name(s)) {
            return malformed(format!("invalid candidate name {bad:?}"));
        }
        if self.names.windows(2).any(|w| w[0] >= w[1]) {
            return malformed("candidate names must be unique and sorted");
        }
        let all = crate::election::full_set(n);
        if self.candidates & self.spoilers != 0 || (self.candidates | self.spoilers) != all {
            return malformed("candidates and spoilers must partition the name list");
        }
        if self.candidates == 0 {
            return malformed("no registered candidates");
        }
        if self.spoilers != 0 && self.ctype.kind != Kind::AddCandidates {
            return malformed("spoiler candidates are only allowed for AC control");
        }
        if !contains(self.candidates, self.p) {
            return malformed("distinguished candidate must be a registered candidate");
        }
        if self.scenario.revoting && !self.ctype.is_partition() {
            return Err(Error::InvalidScenario("revoting needs a partition control type".into()));
        }
        let dom = self.domain();
        let mut seen_pool = false;
        for (i, v) in self.voters.iter().enumerate() {
            if v.weight == 0 {
                return malformed(format!("voters[{i}]: weight must be positive"));
            }
            if v.registered && seen_pool {
                return malformed(format!("voters[{i}]: registered voters must precede unregistered ones"));
            }
            if !v.registered {
                seen_pool = true;
                if self.ctype.kind != Kind::AddVoters {
                    return malformed(format!("voters[{i}]: unregistered voters are only allowed for AV control"));
                }
            }
            if v.manipulator {
                if !v.ballot.is_blank() {
                    return malformed(format!("voters[{i}]: manipulator ballots must be blank"));
                }
                continue;
            }
            check_ballot(self.rule, dom, &v.ballot).map_err(|e| Error::Malformed(format!("voters[{i}]: {e}")))?;
        }
        Ok(())
    }
}

pub(crate) fn check_ballot(rule: Rule, dom: CandSet, b: &Ballot) -> std::result::Result<(), String> {
    match (rule.ballot_kind(), b) {
        (_, Ballot::Blank) => Err("blank ballot for a non-manipulator".into()),
        (BallotKind::Order, Ballot::Order(o)) => {
            let mut seen = 0u64;
            for &c in o {
                if !contains(dom, c) || contains(seen, c) {
                    return Err("ballot is not a permutation of the candidates".into());
                }
                seen |= bit(c);
            }
            if seen != dom {
                return Err("ballot is not a permutation of the candidates".into());
            }
            Ok(())
        }
        (BallotKind::Approval, Ballot::Approval(a)) => {
            if a & !dom != 0 {
                Err("ballot approves a non-candidate".into())
            } else {
                Ok(())
            }
        }
        _ => Err(format!("wrong ballot kind for rule {}", rule.id())),
    }
}

/// Goal predicate for one complete play.
pub fn goal_holds(inst: &Instance, action: &Action, profile: &[Ballot], revote: Option<&[Ballot]>) -> Result<bool> {
    let w = control::evaluate(inst, action, profile, revote)?;
    Ok(holds(inst.goal(), w, inst.p))
}

pub(crate) fn holds(goal: Goal, winners: CandSet, p: Cand) -> bool {
    contains(winners, p) == (goal == Goal::Constructive)
}

/// Names of the members of a set.
pub fn names_of(inst: &Instance, set: CandSet) -> Vec<String> {
    members(set).map(|c| inst.names[c as usize].clone()).collect()
}
