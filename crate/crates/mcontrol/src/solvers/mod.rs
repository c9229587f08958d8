//! Direct algorithms and the registry that dispatches to them.

mod approval;
mod condorcet;
mod plurality;
mod weighted;

use crate::control::{ControlType, Goal, Kind};
use crate::election::{members, Ballot, Cand, CandSet, Rule};
use crate::error::{Error, Result};
use crate::oracle::Trace;
use crate::scenario::{Instance, Mode, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tag {
    Polynomial,
    /// Exponential search with a polynomial-time check per candidate move.
    NpSearch,
    Unsupported,
}

impl Tag {
    pub fn id(self) -> &'static str {
        match self {
            Tag::Polynomial => "polynomial",
            Tag::NpSearch => "np-search",
            Tag::Unsupported => "unsupported",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectOutcome {
    pub answer: bool,
    pub trace: Option<Trace>,
}

impl DirectOutcome {
    fn plain(answer: bool) -> Result<DirectOutcome> {
        Ok(DirectOutcome { answer, trace: None })
    }
}

const PLURALITY_TYPES: [&str; 6] = ["CCAV", "CCDV", "CCPV-TE", "DCAV", "DCDV", "DCPV-TE"];

const APPROVAL_TYPES: [&str; 16] = [
    "CCAC", "CCDC", "CCPC-TE", "CCPC-TP", "CCRPC-TE", "CCRPC-TP", "DCAC", "DCDC", "DCPC-TE", "DCPC-TP",
    "DCRPC-TE", "DCRPC-TP", "DCAV", "DCDV", "DCPV-TE", "DCPV-TP",
];

const CONDORCET_TYPES: [&str; 16] = [
    "CCAC", "DCDC", "DCPC-TE", "DCPC-TP", "DCRPC-TE", "DCRPC-TP", "CCDC", "CCPC-TE", "CCPC-TP", "CCRPC-TE",
    "CCRPC-TP", "DCAC", "DCAV", "DCDV", "DCPV-TE", "DCPV-TP",
];

/// The tag of the direct solver for a case.
pub fn lookup(rule: Rule, ctype: ControlType, scenario: Scenario) -> Tag {
    if scenario.revoting {
        return Tag::Unsupported;
    }
    let code = ctype.code();
    let listed = |list: &[&str]| list.contains(&code.as_str());
    let mode = scenario.mode;
    match rule {
        Rule::Plurality if listed(&PLURALITY_TYPES) => Tag::Polynomial,
        Rule::Approval if listed(&APPROVAL_TYPES) => Tag::Polynomial,
        Rule::Condorcet if listed(&CONDORCET_TYPES) => {
            let cc_partition = ctype.goal == Goal::Constructive
                && matches!(ctype.kind, Kind::PartitionCandidates(_) | Kind::RunoffPartitionCandidates(_));
            if cc_partition && mode == Mode::MPlus {
                Tag::NpSearch
            } else {
                Tag::Polynomial
            }
        }
        Rule::Veto if (code == "CCAV" || code == "CCDV") && mode != Mode::MPlus => Tag::Polynomial,
        Rule::Borda if (code == "CCAV" || code == "CCDV") && mode == Mode::CF => Tag::NpSearch,
        _ => Tag::Unsupported,
    }
}

/// Every supported (rule, type, scenario) with its tag.
pub fn registry() -> Vec<(Rule, ControlType, Scenario, Tag)> {
    let mut out = Vec::new();
    for rule in Rule::ALL {
        for ctype in ControlType::ALL {
            for mode in Mode::ALL {
                let sc = Scenario::new(mode);
                let tag = lookup(rule, ctype, sc);
                if tag != Tag::Unsupported {
                    out.push((rule, ctype, sc, tag));
                }
            }
        }
    }
    out
}

/// Dispatches to the direct solver for the instance's case.
pub fn solve_direct(inst: &Instance) -> Result<DirectOutcome> {
    inst.validate()?;
    let tag = lookup(inst.rule, inst.ctype, inst.scenario);
    if tag == Tag::Unsupported {
        return Err(unsupported(inst));
    }
    match inst.rule {
        Rule::Veto => weighted::solve_veto3w(inst),
        Rule::Borda => weighted::solve_borda3w_cf(inst),
        _ => {
            if inst.voters.iter().any(|v| v.weight != 1) {
                return Err(Error::Unsupported(format!("{} solvers need unit weights", inst.rule.id())));
            }
            match inst.rule {
                Rule::Plurality => plurality::solve(inst),
                Rule::Approval => approval::solve(inst),
                Rule::Condorcet => condorcet::solve(inst),
                _ => Err(unsupported(inst)),
            }
        }
    }
}

pub fn solve_plurality(inst: &Instance) -> Result<DirectOutcome> {
    expect_rule(inst, Rule::Plurality)?;
    solve_direct(inst)
}

pub fn solve_approval(inst: &Instance) -> Result<DirectOutcome> {
    expect_rule(inst, Rule::Approval)?;
    solve_direct(inst)
}

pub fn solve_condorcet(inst: &Instance) -> Result<DirectOutcome> {
    expect_rule(inst, Rule::Condorcet)?;
    solve_direct(inst)
}

pub fn solve_veto3w(inst: &Instance) -> Result<DirectOutcome> {
    expect_rule(inst, Rule::Veto)?;
    solve_direct(inst)
}

pub fn solve_borda3w_cf(inst: &Instance) -> Result<DirectOutcome> {
    expect_rule(inst, Rule::Borda)?;
    solve_direct(inst)
}

/// Manipulator-free control decision.
pub fn base_control(inst: &Instance) -> Result<DirectOutcome> {
    if inst.voters.iter().any(|v| v.manipulator) {
        return Err(Error::Unsupported("base control takes no manipulators".into()));
    }
    let mut plain = inst.clone();
    plain.scenario = Scenario::new(Mode::MPlus);
    if lookup(plain.rule, plain.ctype, plain.scenario) == Tag::Unsupported {
        plain.scenario = Scenario::new(Mode::CF);
    }
    solve_direct(&plain)
}

fn expect_rule(inst: &Instance, rule: Rule) -> Result<()> {
    if inst.rule == rule {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("expected rule {}, got {}", rule.id(), inst.rule.id())))
    }
}

fn unsupported(inst: &Instance) -> Error {
    Error::Unsupported(format!(
        "no direct solver for {} {} {}{}",
        inst.rule.id(),
        inst.ctype.code(),
        inst.scenario.mode.id(),
        if inst.scenario.revoting { " with revoting" } else { "" }
    ))
}

/// Read-only facts shared by the unit-weight solvers.
pub(crate) struct View<'a> {
    pub inst: &'a Instance,
    pub p: Cand,
    pub rivals: Vec<Cand>,
    /// Non-manipulator registered ballots.
    pub fixed: Vec<&'a Ballot>,
    /// Non-manipulator unregistered ballots.
    pub pool: Vec<&'a Ballot>,
    pub m_reg: usize,
    pub m_pool: usize,
}

impl<'a> View<'a> {
    pub fn new(inst: &'a Instance) -> View<'a> {
        let p = inst.p;
        let rivals = members(inst.candidates).filter(|&c| c != p).collect();
        let mut v = View { inst, p, rivals, fixed: Vec::new(), pool: Vec::new(), m_reg: 0, m_pool: 0 };
        for voter in &inst.voters {
            match (voter.registered, voter.manipulator) {
                (true, true) => v.m_reg += 1,
                (false, true) => v.m_pool += 1,
                (true, false) => v.fixed.push(&voter.ballot),
                (false, false) => v.pool.push(&voter.ballot),
            }
        }
        v
    }

    pub fn goal(&self) -> Goal {
        self.inst.goal()
    }

    pub fn mode(&self) -> Mode {
        self.inst.scenario.mode
    }

    pub fn limit(&self) -> usize {
        self.inst.limit
    }

    /// Registered ballots in voter order with every manipulator casting `m`.
    pub fn registered_with(&self, m: &Ballot) -> (Vec<usize>, Vec<Ballot>) {
        let inst = self.inst;
        let idx: Vec<usize> = inst.registered().collect();
        let ballots = idx
            .iter()
            .map(|&v| if inst.voters[v].manipulator { m.clone() } else { inst.voters[v].ballot.clone() })
            .collect();
        (idx, ballots)
    }
}

/// An order over `set` with `first` on top, `last` at the bottom and the
/// rest in lexicographic order.
pub(crate) fn order_with(set: CandSet, first: Option<Cand>, last: Option<Cand>) -> Ballot {
    let mut v: Vec<Cand> = Vec::new();
    v.extend(first);
    v.extend(members(set).filter(|&c| Some(c) != first && Some(c) != last));
    v.extend(last.filter(|&l| Some(l) != first));
    Ballot::Order(v)
}

/// Whether voters, each contributing `a` on the first side and `b` on the
/// second (values in -1..=1), can be split so that the first side sums to
/// at least `ta` and the second to at least `tb`.
pub(crate) fn split_feasible(pairs: &[(i64, i64)], ta: i64, tb: i64) -> bool {
    let (mut sa, mut sb, mut both_pos, mut both_neg) = (0i64, 0i64, 0i64, 0i64);
    for &(a, b) in pairs {
        match (a, b) {
            (1, 1) => both_pos += 1,
            (-1, -1) => both_neg += 1,
            _ if a >= b && !(a == 0 && b == 0) => sa += a,
            _ if a < b => sb += b,
            _ => {}
        }
    }
    (0..=both_pos).any(|x| (0..=both_neg).any(|y| sa + x - y >= ta && sb + (both_pos - x) - (both_neg - y) >= tb))
}
