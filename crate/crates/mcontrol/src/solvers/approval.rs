use super::{split_feasible, DirectOutcome, View};
use crate::control::{Goal, Kind, Tie};
use crate::election::{bit, contains, members, Ballot, Cand, CandSet};
use crate::error::Result;
use crate::scenario::{Instance, Mode};

fn approves(b: &Ballot, c: Cand) -> bool {
    matches!(b, Ballot::Approval(a) if contains(*a, c))
}

fn count<'a>(ballots: impl IntoIterator<Item = &'a &'a Ballot>, f: impl Fn(&Ballot) -> bool) -> i64 {
    ballots.into_iter().filter(|b| f(b)).count() as i64
}

pub(super) fn solve(inst: &Instance) -> Result<DirectOutcome> {
    let v = View::new(inst);
    let p = v.p;
    let goal = v.goal();
    let k = v.limit() as i64;
    let m = v.m_reg as i64;
    let mu = v.m_pool as i64;
    let adv = v.mode() != Mode::MPlus;
    let s = |c: Cand| count(&v.fixed, |b| approves(b, c));
    let sp = s(p);
    let rivals = &v.rivals;
    let mut sorted: Vec<i64> = rivals.iter().map(|&c| s(c)).collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let top = sorted.first().copied();

    let answer = match (goal, inst.ctype.kind) {
        (Goal::Constructive, _) if rivals.is_empty() => true,
        (Goal::Destructive, kind) if rivals.is_empty() && kind != Kind::AddCandidates => false,
        (Goal::Constructive, Kind::AddCandidates) => {
            let d = top.unwrap();
            if adv { sp >= d + m } else { sp + m >= d }
        }
        (Goal::Constructive, Kind::DeleteCandidates) => {
            let over = |c: &Cand| if adv { s(*c) + m > sp } else { s(*c) > sp + m };
            rivals.iter().filter(|c| over(c)).count() as i64 <= k
        }
        (Goal::Constructive, Kind::PartitionCandidates(tie) | Kind::RunoffPartitionCandidates(tie)) => {
            let d = top.unwrap();
            let second = sorted.get(1).copied();
            match (tie, adv) {
                (Tie::TP, false) => sp + m >= d,
                (Tie::TP, true) => sp >= d + m,
                (Tie::TE, false) => sp + m >= d || second.is_some_and(|e| e + m >= d),
                (Tie::TE, true) if m > 0 => sp >= d + m,
                (Tie::TE, true) => sp >= d || second == Some(d),
            }
        }
        (Goal::Destructive, Kind::AddCandidates) => {
            let spoilers = if k >= 1 { inst.spoilers } else { 0 };
            let mut pool = rivals.clone();
            pool.extend(members(spoilers));
            if adv {
                pool.iter().any(|&c| s(c) > sp + m)
            } else {
                pool.iter().any(|&c| s(c) + m > sp)
            }
        }
        (Goal::Destructive, Kind::DeleteCandidates) => {
            let d = top.unwrap();
            if adv { d > sp + m } else { d + m > sp }
        }
        (Goal::Destructive, Kind::PartitionCandidates(tie) | Kind::RunoffPartitionCandidates(tie)) => {
            let d = top.unwrap();
            let gap = if adv { d - sp - m } else { d + m - sp };
            match tie {
                Tie::TE => gap >= 0,
                Tie::TP => gap > 0,
            }
        }
        (Goal::Destructive, Kind::AddVoters) => rivals.iter().any(|&c| {
            let gain = count(&v.pool, |b| approves(b, c) && !approves(b, p));
            if adv {
                s(c) - sp - m + k.min(gain) > 0
            } else {
                s(c) - sp + m + k.min(gain + mu) > 0
            }
        }),
        (Goal::Destructive, Kind::DeleteVoters) => rivals.iter().any(|&c| {
            let gain = count(&v.fixed, |b| approves(b, p) && !approves(b, c));
            if adv {
                s(c) - sp - m + k.min(gain + m) > 0
            } else {
                s(c) + m - sp + k.min(gain) > 0
            }
        }),
        (Goal::Destructive, Kind::PartitionVoters(tie)) => {
            let set = inst.candidates;
            let mb = if adv { bit(p) } else { set & !bit(p) };
            let (_, ballots) = v.registered_with(&Ballot::Approval(mb));
            dcpv_base(set, p, &ballots, tie)
        }
        _ => unreachable!("registry admits no other approval case"),
    };
    DirectOutcome::plain(answer)
}

fn dcpv_base(set: CandSet, p: Cand, ballots: &[Ballot], tie: Tie) -> bool {
    let delta = |b: &Ballot, c: Cand| approves(b, c) as i64 - approves(b, p) as i64;
    let rivals: Vec<Cand> = members(set).filter(|&c| c != p).collect();
    let need = match tie {
        Tie::TE => 0,
        Tie::TP => 1,
    };
    if rivals.iter().any(|&c| ballots.iter().map(|b| delta(b, c)).sum::<i64>() >= need) {
        return true;
    }
    rivals.iter().any(|&c| {
        rivals.iter().any(|&d| {
            let pairs: Vec<(i64, i64)> = ballots.iter().map(|b| (delta(b, c), delta(b, d))).collect();
            split_feasible(&pairs, need, need)
        })
    })
}
