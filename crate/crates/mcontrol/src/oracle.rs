//! Exhaustive evaluation of the quantifier prefix.
//!
//! Inner profile quantifiers only range over ballots on the candidates the
//! deciding election actually sees, and over the manipulators an action
//! actually counts. Projection makes this exact: every ballot on the full
//! domain projects onto one of the enumerated ones and every enumerated
//! ballot is such a projection.

use crate::control::{legal_actions, Action, Ctx, Kind};
use crate::election::{members, Ballot, BallotKind, Cand, CandSet, Rule};
use crate::error::{Error, Result};
use crate::scenario::{holds, Instance, Mode};
use rayon::prelude::*;
use std::collections::HashMap;

pub const DEFAULT_BUDGET: u128 = 2_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceKind {
    /// A choice for the outermost existential block.
    Witness,
    /// A choice for a universal block that defeats the other side.
    Counterexample,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Trace {
    pub action: Option<Action>,
    pub profile: Option<Vec<Ballot>>,
    pub revote: Option<Vec<Ballot>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub answer: bool,
    pub trace: Option<(TraceKind, Trace)>,
    /// Upper bound on plays, as checked against the budget.
    pub states: u128,
}

/// Every ballot over `dom`: orders in lexicographic order, approval sets
/// by increasing bitmask.
pub fn ballot_space(rule: Rule, dom: CandSet) -> Vec<Ballot> {
    match rule.ballot_kind() {
        BallotKind::Approval => {
            let mut out = Vec::with_capacity(1 << dom.count_ones());
            let mut s: CandSet = 0;
            loop {
                out.push(Ballot::Approval(s));
                if s == dom {
                    break;
                }
                s = s.wrapping_sub(dom) & dom;
            }
            out
        }
        BallotKind::Order => {
            let mut perm: Vec<Cand> = members(dom).collect();
            let mut out = vec![Ballot::Order(perm.clone())];
            while next_permutation(&mut perm) {
                out.push(Ballot::Order(perm.clone()));
            }
            out
        }
    }
}

fn next_permutation(v: &mut [Cand]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub fn ballot_count(rule: Rule, dom: CandSet) -> u128 {
    let n = dom.count_ones() as u128;
    match rule.ballot_kind() {
        BallotKind::Approval => 1u128 << n,
        BallotKind::Order => (1..=n).fold(1u128, |a, i| a.saturating_mul(i)),
    }
}

fn spow(base: u128, e: usize) -> u128 {
    (0..e).fold(1u128, |a, _| a.saturating_mul(base))
}

/// All manipulator profiles over the full ballot domain.
#[derive(Clone, Debug)]
pub struct ProfileSpace {
    pub ballots: Vec<Ballot>,
    pub manipulators: usize,
}

impl ProfileSpace {
    pub fn len(&self) -> u128 {
        spow(self.ballots.len() as u128, self.manipulators)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The profile with lexicographic index `i`; the first manipulator is
    /// the most significant position.
    pub fn get(&self, mut i: u128) -> Vec<Ballot> {
        let b = self.ballots.len() as u128;
        let mut out = vec![Ballot::Blank; self.manipulators];
        for slot in out.iter_mut().rev() {
            *slot = self.ballots[(i % b) as usize].clone();
            i /= b;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<Ballot>> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }
}

pub fn enumerate_profiles(inst: &Instance, budget: u128) -> Result<ProfileSpace> {
    let dom = inst.domain();
    let m = inst.manipulators().len();
    let states = spow(ballot_count(inst.rule, dom), m);
    if states > budget {
        return Err(Error::Budget { states, budget });
    }
    Ok(ProfileSpace { ballots: ballot_space(inst.rule, dom), manipulators: m })
}

/// Registered voters grouped into interchangeable classes: equal ballots
/// and weights. Manipulators are singletons.
fn voter_classes(inst: &Instance) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut key: HashMap<(&Ballot, u64), usize> = HashMap::new();
    for v in inst.registered() {
        let voter = &inst.voters[v];
        if voter.manipulator {
            classes.push(vec![v]);
            continue;
        }
        let k = (&voter.ballot, voter.weight);
        match key.get(&k) {
            Some(&c) => classes[c].push(v),
            None => {
                key.insert(k, classes.len());
                classes.push(vec![v]);
            }
        }
    }
    classes
}

fn compressed_count(classes: &[Vec<usize>]) -> u128 {
    classes.iter().skip(1).fold(classes[0].len() as u128, |a, c| a.saturating_mul(c.len() as u128 + 1))
}

/// Partition-of-voters actions are enumerated up to swapping identical
/// voters: only how many of each class go to the first side matters. The
/// plain listing is used when that is not larger.
fn use_compressed(inst: &Instance) -> Option<Vec<Vec<usize>>> {
    if !matches!(inst.ctype.kind, Kind::PartitionVoters(_)) || inst.registered().next().is_none() {
        return None;
    }
    let classes = voter_classes(inst);
    (compressed_count(&classes) < crate::control::count_action_space(inst)).then_some(classes)
}

fn oracle_action_count(inst: &Instance) -> u128 {
    match use_compressed(inst) {
        Some(classes) => compressed_count(&classes),
        None => crate::control::count_action_space(inst),
    }
}

fn oracle_actions(inst: &Instance) -> Vec<Action> {
    let Some(classes) = use_compressed(inst) else {
        return legal_actions(inst);
    };
    let mut counts = vec![0usize; classes.len()];
    counts[0] = 1;
    let mut out = Vec::new();
    loop {
        let mut side: Vec<usize> = classes.iter().zip(&counts).flat_map(|(c, &n)| c[..n].iter().copied()).collect();
        side.sort();
        out.push(Action::PartitionVoters(side));
        let mut i = classes.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if counts[i] < classes[i].len() {
                counts[i] += 1;
                break;
            }
            counts[i] = if i == 0 { 1 } else { 0 };
        }
    }
}

fn count_states_for(inst: &Instance, actions: u128) -> u128 {
    let m = inst.manipulators().len();
    let mreg = inst.voters.iter().filter(|v| v.manipulator && v.registered).count();
    let mut s = actions.saturating_mul(spow(ballot_count(inst.rule, inst.domain()), m));
    if inst.scenario.revoting {
        s = s.saturating_mul(spow(ballot_count(inst.rule, inst.candidates), mreg));
    }
    s
}

/// The quantity checked against the budget.
pub fn count_states(inst: &Instance) -> u128 {
    count_states_for(inst, oracle_action_count(inst))
}

/// Appends the missing domain candidates in lexicographic order.
fn complete(b: &Ballot, dom: CandSet) -> Ballot {
    match b {
        Ballot::Order(o) => {
            let mut v = o.clone();
            v.extend(members(dom).filter(|c| !o.contains(c)));
            Ballot::Order(v)
        }
        other => other.clone(),
    }
}

struct Solver<'a> {
    ctx: Ctx<'a>,
    inst: &'a Instance,
    m: usize,
    default: Ballot,
    reg_manips: Vec<usize>,
}

/// Odometer over `digits` positions with `base` values each.
fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

impl<'a> Solver<'a> {
    fn new(inst: &'a Instance) -> Solver<'a> {
        let ctx = Ctx::new(inst);
        let m = inst.manipulators().len();
        let default = ballot_space(inst.rule, inst.domain()).swap_remove(0);
        let reg_manips = (0..inst.voters.len())
            .filter(|&v| inst.voters[v].manipulator && inst.voters[v].registered)
            .map(|v| ctx.manip_ord[v])
            .collect();
        Solver { ctx, inst, m, default, reg_manips }
    }

    fn revote_exists(&self) -> bool {
        self.inst.scenario.mode == Mode::MPlus
    }

    /// Decides the play after the first-round profile is fixed, including
    /// the revote block. Returns the outcome and, when the revote block is
    /// decisive, the revote profile that decided it.
    fn after_profile(&self, action: &Action, prof: &[&Ballot]) -> (bool, Option<Vec<Ballot>>) {
        let goal = self.inst.goal();
        let p = self.inst.p;
        let (_, fset) = self.ctx.round_one(action, prof);
        if !self.inst.scenario.revoting || self.reg_manips.is_empty() || fset == 0 {
            return (holds(goal, self.ctx.final_round(action, fset, prof), p), None);
        }
        let exists = self.revote_exists();
        let space = ballot_space(self.inst.rule, fset);
        let mut digits = vec![0usize; self.reg_manips.len()];
        let mut rprof: Vec<&Ballot> = prof.to_vec();
        loop {
            for (k, &ord) in self.reg_manips.iter().enumerate() {
                rprof[ord] = &space[digits[k]];
            }
            let g = holds(goal, self.ctx.final_round(action, fset, &rprof), p);
            if g == exists {
                let dom = self.inst.candidates;
                let r = rprof.iter().map(|b| complete(b, dom)).collect();
                return (g, Some(r));
            }
            if !odometer(&mut digits, space.len()) {
                return (!exists, None);
            }
        }
    }

    /// Inner profile block for a fixed action (M+ and CF). Returns the
    /// block's truth value and the deciding profile, if any.
    #[allow(clippy::type_complexity)]
    fn over_profiles(&self, action: &Action, exists: bool) -> (bool, Option<(Vec<Ballot>, Option<Vec<Ballot>>)>) {
        let parts = self.ctx.participants(action);
        let dom = if self.inst.ctype.is_partition() { self.inst.candidates } else { self.ctx.evaluated_set(action) };
        let full = self.inst.domain();
        let space = if dom == 0 { vec![self.default.clone()] } else { ballot_space(self.inst.rule, dom) };
        let mut digits = vec![0usize; parts.len()];
        let mut prof: Vec<&Ballot> = vec![&self.default; self.m];
        loop {
            for (k, &ord) in parts.iter().enumerate() {
                prof[ord] = &space[digits[k]];
            }
            let (g, rev) = self.after_profile(action, &prof);
            if g == exists {
                let p = prof.iter().map(|b| complete(b, full)).collect();
                return (g, Some((p, rev)));
            }
            if !odometer(&mut digits, space.len()) {
                return (!exists, None);
            }
        }
    }

    fn solve(&self, actions: &[Action], states: u128) -> OracleOutcome {
        match self.inst.scenario.mode {
            Mode::MPlus => {
                let hit = actions.par_iter().find_first(|a| self.over_profiles(a, true).0);
                match hit {
                    Some(a) => {
                        let (_, w) = self.over_profiles(a, true);
                        let (p, r) = w.unwrap();
                        let trace = Trace { action: Some(a.clone()), profile: Some(p), revote: r };
                        OracleOutcome { answer: true, trace: Some((TraceKind::Witness, trace)), states }
                    }
                    None => OracleOutcome { answer: false, trace: None, states },
                }
            }
            Mode::CF => {
                let hit = actions.par_iter().find_first(|a| self.over_profiles(a, false).0);
                match hit {
                    Some(a) => {
                        let trace = Trace { action: Some(a.clone()), ..Trace::default() };
                        OracleOutcome { answer: true, trace: Some((TraceKind::Witness, trace)), states }
                    }
                    None => {
                        let (_, c) = self.over_profiles(&actions[0], false);
                        let trace = c.map(|(p, r)| {
                            (TraceKind::Counterexample, Trace { action: Some(actions[0].clone()), profile: Some(p), revote: r })
                        });
                        OracleOutcome { answer: false, trace, states }
                    }
                }
            }
            Mode::MF => {
                let space = ballot_space(self.inst.rule, self.inst.domain());
                let b = space.len() as u64;
                let total = (0..self.m).fold(1u64, |a, _| a.saturating_mul(b));
                let decode = |mut i: u64| {
                    let mut prof: Vec<&Ballot> = vec![&self.default; self.m];
                    for slot in prof.iter_mut().rev() {
                        *slot = &space[(i % b) as usize];
                        i /= b;
                    }
                    prof
                };
                let chair_wins = |i: u64| {
                    let prof = decode(i);
                    actions.iter().any(|a| self.after_profile(a, &prof).0)
                };
                let hit = (0..total).into_par_iter().find_first(|&i| !chair_wins(i));
                match hit {
                    None => OracleOutcome { answer: true, trace: None, states },
                    Some(i) => {
                        let profile = decode(i).into_iter().cloned().collect();
                        let trace = Trace { profile: Some(profile), ..Trace::default() };
                        OracleOutcome { answer: false, trace: Some((TraceKind::Counterexample, trace)), states }
                    }
                }
            }
        }
    }
}

pub fn solve_oracle(inst: &Instance, budget: u128) -> Result<OracleOutcome> {
    inst.validate()?;
    let states = count_states(inst);
    if states > budget {
        return Err(Error::Budget { states, budget });
    }
    let actions = oracle_actions(inst);
    Ok(Solver::new(inst).solve(&actions, states))
}
