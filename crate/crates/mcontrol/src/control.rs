//! Control types, legal chair moves and (two-round) evaluation.

use crate::election::{bit, contains, members, winners_raw, Ballot, CandSet, Weighted};
use crate::error::{malformed, Error, Result};
use crate::scenario::{check_ballot, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Goal {
    Constructive,
    Destructive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tie {
    /// Only a unique first-round winner moves on.
    TE,
    /// Every first-round winner moves on.
    TP,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    AddVoters,
    DeleteVoters,
    AddCandidates,
    DeleteCandidates,
    PartitionVoters(Tie),
    PartitionCandidates(Tie),
    RunoffPartitionCandidates(Tie),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ControlType {
    pub goal: Goal,
    pub kind: Kind,
}

impl ControlType {
    pub const ALL: [ControlType; 20] = {
        use Goal::*;
        use Kind::*;
        use Tie::*;
        const fn t(goal: Goal, kind: Kind) -> ControlType {
            ControlType { goal, kind }
        }
        [
            t(Constructive, AddVoters),
            t(Destructive, AddVoters),
            t(Constructive, DeleteVoters),
            t(Destructive, DeleteVoters),
            t(Constructive, AddCandidates),
            t(Destructive, AddCandidates),
            t(Constructive, DeleteCandidates),
            t(Destructive, DeleteCandidates),
            t(Constructive, PartitionVoters(TE)),
            t(Constructive, PartitionVoters(TP)),
            t(Destructive, PartitionVoters(TE)),
            t(Destructive, PartitionVoters(TP)),
            t(Constructive, PartitionCandidates(TE)),
            t(Constructive, PartitionCandidates(TP)),
            t(Destructive, PartitionCandidates(TE)),
            t(Destructive, PartitionCandidates(TP)),
            t(Constructive, RunoffPartitionCandidates(TE)),
            t(Constructive, RunoffPartitionCandidates(TP)),
            t(Destructive, RunoffPartitionCandidates(TE)),
            t(Destructive, RunoffPartitionCandidates(TP)),
        ]
    };

    pub fn code(self) -> String {
        let g = match self.goal {
            Goal::Constructive => "CC",
            Goal::Destructive => "DC",
        };
        let tie = |t: Tie| match t {
            Tie::TE => "TE",
            Tie::TP => "TP",
        };
        match self.kind {
            Kind::AddVoters => format!("{g}AV"),
            Kind::DeleteVoters => format!("{g}DV"),
            Kind::AddCandidates => format!("{g}AC"),
            Kind::DeleteCandidates => format!("{g}DC"),
            Kind::PartitionVoters(t) => format!("{g}PV-{}", tie(t)),
            Kind::PartitionCandidates(t) => format!("{g}PC-{}", tie(t)),
            Kind::RunoffPartitionCandidates(t) => format!("{g}RPC-{}", tie(t)),
        }
    }

    pub fn parse(s: &str) -> Result<ControlType> {
        ControlType::ALL
            .into_iter()
            .find(|t| t.code() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown control type {s:?}")))
    }

    pub fn is_partition(self) -> bool {
        matches!(
            self.kind,
            Kind::PartitionVoters(_) | Kind::PartitionCandidates(_) | Kind::RunoffPartitionCandidates(_)
        )
    }

    pub fn has_limit(self) -> bool {
        !self.is_partition()
    }

    pub fn tie(self) -> Option<Tie> {
        match self.kind {
            Kind::PartitionVoters(t) | Kind::PartitionCandidates(t) | Kind::RunoffPartitionCandidates(t) => Some(t),
            _ => None,
        }
    }
}

/// A concrete chair move. Voter sets hold indices into `Instance::voters`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    AddVoters(Vec<usize>),
    DeleteVoters(Vec<usize>),
    AddCandidates(CandSet),
    DeleteCandidates(CandSet),
    /// The first side; the second side is the rest of the registered voters.
    PartitionVoters(Vec<usize>),
    /// C1; C2 is the rest of the registered candidates.
    PartitionCandidates(CandSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoRoundOutcome {
    /// Candidates promoted from each first-round subelection.
    pub round1_survivors: Vec<CandSet>,
    pub final_candidates: CandSet,
    pub final_winners: CandSet,
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    r
}

fn subsets_up_to(n: usize, k: usize) -> u128 {
    (0..=k.min(n)).fold(0u128, |acc, j| acc.saturating_add(binom(n, j)))
}

fn pow2(n: usize) -> u128 {
    if n >= 127 {
        u128::MAX
    } else {
        1u128 << n
    }
}

pub fn count_action_space(inst: &Instance) -> u128 {
    let nreg = inst.registered().count();
    let ncand = inst.candidates.count_ones() as usize;
    match inst.ctype.kind {
        Kind::AddVoters => subsets_up_to(inst.pool().count(), inst.limit),
        Kind::DeleteVoters => subsets_up_to(nreg, inst.limit),
        Kind::AddCandidates => subsets_up_to(inst.spoilers.count_ones() as usize, inst.limit),
        Kind::DeleteCandidates => {
            let pool = if inst.goal() == Goal::Destructive { ncand - 1 } else { ncand };
            subsets_up_to(pool, inst.limit)
        }
        Kind::PartitionVoters(_) => pow2(nreg.saturating_sub(1)),
        Kind::PartitionCandidates(_) => pow2(ncand),
        Kind::RunoffPartitionCandidates(_) => pow2(ncand - 1),
    }
}

/// All size-≤k subsets of `items`, smaller sizes first, each size in
/// lexicographic order of positions.
fn combinations<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for size in 0..=k.min(items.len()) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            let mut found = false;
            let mut i = size;
            while i > 0 {
                i -= 1;
                if idx[i] < items.len() - size + i {
                    idx[i] += 1;
                    for j in i + 1..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    found = true;
                    break;
                }
            }
            if !found {
                break;
            }
        }
    }
    out
}

/// Every legal action exactly once. Partitions of voters are unordered and
/// listed with the first registered voter on the first side; runoff
/// partitions of candidates likewise keep the least candidate in C1.
/// Partition of candidates is asymmetric (C2 skips the first round), so
/// both orientations are listed. Callers bound `count_action_space` first;
/// more than 64 registered voters under PV cannot be listed.
pub fn legal_actions(inst: &Instance) -> Vec<Action> {
    let reg: Vec<usize> = inst.registered().collect();
    let cands: Vec<_> = members(inst.candidates).collect();
    let to_set = |v: Vec<crate::election::Cand>| v.into_iter().fold(0u64, |a, c| a | bit(c));
    match inst.ctype.kind {
        Kind::AddVoters => {
            let pool: Vec<usize> = inst.pool().collect();
            combinations(&pool, inst.limit).into_iter().map(Action::AddVoters).collect()
        }
        Kind::DeleteVoters => combinations(&reg, inst.limit).into_iter().map(Action::DeleteVoters).collect(),
        Kind::AddCandidates => {
            let sp: Vec<_> = members(inst.spoilers).collect();
            combinations(&sp, inst.limit).into_iter().map(|v| Action::AddCandidates(to_set(v))).collect()
        }
        Kind::DeleteCandidates => {
            let pool: Vec<_> = if inst.goal() == Goal::Destructive {
                cands.iter().copied().filter(|&c| c != inst.p).collect()
            } else {
                cands.clone()
            };
            combinations(&pool, inst.limit).into_iter().map(|v| Action::DeleteCandidates(to_set(v))).collect()
        }
        Kind::PartitionVoters(_) => {
            if reg.is_empty() {
                return vec![Action::PartitionVoters(vec![])];
            }
            let rest = reg.len() - 1;
            assert!(rest < 64, "too many registered voters to list partitions");
            (0u64..1 << rest)
                .map(|mask| {
                    let mut side = vec![reg[0]];
                    side.extend((0..rest).filter(|i| mask >> i & 1 == 1).map(|i| reg[i + 1]));
                    Action::PartitionVoters(side)
                })
                .collect()
        }
        Kind::PartitionCandidates(_) => {
            assert!(cands.len() < 64, "too many candidates to list partitions");
            (0u64..1 << cands.len()).map(|mask| Action::PartitionCandidates(scatter(mask, &cands))).collect()
        }
        Kind::RunoffPartitionCandidates(_) => {
            let rest = cands.len() - 1;
            (0u64..1 << rest)
                .map(|mask| Action::PartitionCandidates(bit(cands[0]) | scatter(mask, &cands[1..])))
                .collect()
        }
    }
}

fn scatter(mask: u64, cands: &[crate::election::Cand]) -> CandSet {
    cands.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0, |a, (_, &c)| a | bit(c))
}

/// Checks that an action is legal for the instance.
pub fn check_action(inst: &Instance, action: &Action) -> Result<()> {
    let n = inst.voters.len();
    let distinct = |v: &[usize]| {
        let mut s = v.to_vec();
        s.sort();
        s.windows(2).all(|w| w[0] != w[1])
    };
    let ok = match (inst.ctype.kind, action) {
        (Kind::AddVoters, Action::AddVoters(v)) => {
            v.len() <= inst.limit && distinct(v) && v.iter().all(|&i| i < n && !inst.voters[i].registered)
        }
        (Kind::DeleteVoters, Action::DeleteVoters(v)) => {
            v.len() <= inst.limit && distinct(v) && v.iter().all(|&i| i < n && inst.voters[i].registered)
        }
        (Kind::AddCandidates, Action::AddCandidates(s)) => {
            s & !inst.spoilers == 0 && s.count_ones() as usize <= inst.limit
        }
        (Kind::DeleteCandidates, Action::DeleteCandidates(s)) => {
            s & !inst.candidates == 0
                && s.count_ones() as usize <= inst.limit
                && !(inst.goal() == Goal::Destructive && contains(*s, inst.p))
        }
        (Kind::PartitionVoters(_), Action::PartitionVoters(v)) => {
            distinct(v) && v.iter().all(|&i| i < n && inst.voters[i].registered)
        }
        (Kind::PartitionCandidates(_) | Kind::RunoffPartitionCandidates(_), Action::PartitionCandidates(s)) => {
            s & !inst.candidates == 0
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        malformed(format!("action {action:?} is not legal for {}", inst.ctype.code()))
    }
}

/// Evaluation context: precomputed lookups shared by the oracle and the
/// public entry points. Profiles are indexed by manipulator ordinal.
pub(crate) struct Ctx<'a> {
    pub inst: &'a Instance,
    pub manip_ord: Vec<usize>,
}

impl<'a> Ctx<'a> {
    pub fn new(inst: &'a Instance) -> Ctx<'a> {
        let mut ord = 0;
        let manip_ord = inst
            .voters
            .iter()
            .map(|v| {
                if v.manipulator {
                    ord += 1;
                    ord - 1
                } else {
                    usize::MAX
                }
            })
            .collect();
        Ctx { inst, manip_ord }
    }

    fn ballot<'b>(&'b self, v: usize, profile: &[&'b Ballot]) -> Weighted<'b> {
        let voter = &self.inst.voters[v];
        if voter.manipulator {
            (profile[self.manip_ord[v]], voter.weight)
        } else {
            (&voter.ballot, voter.weight)
        }
    }

    fn stage(&self, set: CandSet, voters: impl Iterator<Item = usize>, profile: &[&Ballot]) -> CandSet {
        if set == 0 {
            return 0;
        }
        let ballots: Vec<Weighted> = voters.map(|v| self.ballot(v, profile)).collect();
        winners_raw(self.inst.rule, &self.inst.names, set, &ballots)
    }

    fn promote(&self, w: CandSet) -> CandSet {
        match self.inst.ctype.tie() {
            Some(Tie::TE) if w.count_ones() != 1 => 0,
            _ => w,
        }
    }

    /// Manipulators whose ballots can influence the outcome of `action`.
    pub fn participants(&self, action: &Action) -> Vec<usize> {
        let inst = self.inst;
        let mut out = Vec::new();
        for (v, voter) in inst.voters.iter().enumerate() {
            if !voter.manipulator {
                continue;
            }
            let counted = match action {
                Action::AddVoters(add) => voter.registered || add.contains(&v),
                Action::DeleteVoters(del) => !del.contains(&v),
                _ => voter.registered,
            };
            if counted {
                out.push(self.manip_ord[v]);
            }
        }
        out
    }

    /// Candidate set evaluated by a one-round action; for partitions the
    /// registered candidates.
    pub fn evaluated_set(&self, action: &Action) -> CandSet {
        match action {
            Action::AddCandidates(s) => self.inst.candidates | s,
            Action::DeleteCandidates(s) => self.inst.candidates & !s,
            _ => self.inst.candidates,
        }
    }

    /// First round: per-subelection survivors and the final candidate set.
    pub fn round_one(&self, action: &Action, profile: &[&Ballot]) -> (Vec<CandSet>, CandSet) {
        let inst = self.inst;
        let c = inst.candidates;
        match action {
            Action::PartitionVoters(side) => {
                let mut in1 = vec![false; inst.voters.len()];
                for &v in side {
                    in1[v] = true;
                }
                let w1 = self.stage(c, inst.registered().filter(|&v| in1[v]), profile);
                let w2 = self.stage(c, inst.registered().filter(|&v| !in1[v]), profile);
                let s = vec![self.promote(w1), self.promote(w2)];
                let f = s[0] | s[1];
                (s, f)
            }
            Action::PartitionCandidates(c1) => {
                let c1 = *c1 & c;
                let c2 = c & !c1;
                let s1 = self.promote(self.stage(c1, inst.registered(), profile));
                if matches!(inst.ctype.kind, Kind::RunoffPartitionCandidates(_)) {
                    let s2 = self.promote(self.stage(c2, inst.registered(), profile));
                    (vec![s1, s2], s1 | s2)
                } else {
                    (vec![s1], s1 | c2)
                }
            }
            _ => (Vec::new(), self.evaluated_set(action)),
        }
    }

    /// Winners of the deciding election over `set`.
    pub fn final_round(&self, action: &Action, set: CandSet, profile: &[&Ballot]) -> CandSet {
        let inst = self.inst;
        match action {
            Action::AddVoters(add) => self.stage(set, inst.registered().chain(add.iter().copied()), profile),
            Action::DeleteVoters(del) => self.stage(set, inst.registered().filter(|v| !del.contains(v)), profile),
            _ => self.stage(set, inst.registered(), profile),
        }
    }
}

fn check_profile(inst: &Instance, ctx: &Ctx, action: &Action, profile: &[Ballot], revote: bool) -> Result<()> {
    let m = ctx.manip_ord.iter().filter(|&&o| o != usize::MAX).count();
    if profile.len() != m {
        return malformed(format!("profile has {} ballots for {m} manipulators", profile.len()));
    }
    let dom = inst.domain();
    let needed = if revote {
        (0..inst.voters.len()).filter(|&v| inst.voters[v].manipulator && inst.voters[v].registered).map(|v| ctx.manip_ord[v]).collect()
    } else {
        ctx.participants(action)
    };
    for ord in needed {
        let b = &profile[ord];
        if b.is_blank() {
            let v = ctx.manip_ord.iter().position(|&o| o == ord).unwrap();
            return Err(Error::UnresolvedManipulator(v));
        }
        check_ballot(inst.rule, dom, b).map_err(|e| Error::Malformed(format!("manipulator {ord}: {e}")))?;
    }
    Ok(())
}

/// Full two-round (or one-round) evaluation.
pub fn evaluate_detailed(
    inst: &Instance,
    action: &Action,
    profile: &[Ballot],
    revote: Option<&[Ballot]>,
) -> Result<TwoRoundOutcome> {
    check_action(inst, action)?;
    if revote.is_some() && !inst.ctype.is_partition() {
        return Err(Error::InvalidScenario("revote profile supplied for a one-round control type".into()));
    }
    let ctx = Ctx::new(inst);
    check_profile(inst, &ctx, action, profile, false)?;
    if let Some(r) = revote {
        check_profile(inst, &ctx, action, r, true)?;
    }
    let first: Vec<&Ballot> = profile.iter().collect();
    let (round1_survivors, final_candidates) = ctx.round_one(action, &first);
    let second: Vec<&Ballot> = revote.unwrap_or(profile).iter().collect();
    let final_winners = ctx.final_round(action, final_candidates, &second);
    Ok(TwoRoundOutcome { round1_survivors, final_candidates, final_winners })
}

/// Winner set of the final-stage election.
pub fn evaluate(inst: &Instance, action: &Action, profile: &[Ballot], revote: Option<&[Ballot]>) -> Result<CandSet> {
    Ok(evaluate_detailed(inst, action, profile, revote)?.final_winners)
}
