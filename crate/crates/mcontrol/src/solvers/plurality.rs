use super::{order_with, DirectOutcome, View};
use crate::control::{Action, Goal, Kind};
use crate::election::{members, Ballot, Cand, CandSet, MAX_CANDIDATES};
use crate::error::Result;
use crate::oracle::Trace;
use crate::scenario::Mode;

type Counts = [usize; MAX_CANDIDATES];

fn tops<'a>(set: CandSet, ballots: impl IntoIterator<Item = &'a Ballot>) -> Counts {
    let mut n = [0; MAX_CANDIDATES];
    for b in ballots {
        if let Some(t) = b.top_in(set) {
            n[t as usize] += 1;
        }
    }
    n
}

/// Candidates that beat `p` head to head in `ballots`, with `extra` more
/// voters ranking everyone above `p`.
fn beating(set: CandSet, p: Cand, ballots: &[&Ballot], extra: usize) -> CandSet {
    let mut r = 0;
    for q in members(set).filter(|&q| q != p) {
        let above = ballots.iter().filter(|b| b.prefers(q, p)).count() + extra;
        let below = ballots.iter().filter(|b| b.prefers(p, q)).count();
        if above > below {
            r |= crate::election::bit(q);
        }
    }
    r
}

pub(super) fn solve(inst: &crate::scenario::Instance) -> Result<DirectOutcome> {
    let v = View::new(inst);
    let set = inst.candidates;
    let p = v.p;
    let goal = v.goal();
    if v.rivals.is_empty() {
        return DirectOutcome::plain(goal == Goal::Constructive);
    }
    let k = v.limit();
    let (m, mu) = (v.m_reg, v.m_pool);
    let s = tops(set, v.fixed.iter().copied());
    let u = tops(set, v.pool.iter().copied());
    let sp = s[p as usize];
    let adv = v.mode() != Mode::MPlus;
    let max_rival = |f: &dyn Fn(usize) -> usize| v.rivals.iter().map(|&r| f(r as usize)).max().unwrap_or(0);
    let any_rival = |f: &dyn Fn(usize) -> bool| v.rivals.iter().any(|&r| f(r as usize));

    let answer = match (goal, inst.ctype.kind) {
        (Goal::Constructive, Kind::AddVoters) => {
            if adv {
                sp + k.min(u[p as usize]) >= max_rival(&|r| s[r]) + m
            } else {
                sp + m + k.min(u[p as usize] + mu) >= max_rival(&|r| s[r])
            }
        }
        (Goal::Constructive, Kind::DeleteVoters) => match v.mode() {
            Mode::MPlus => v.rivals.iter().map(|&r| s[r as usize].saturating_sub(sp + m)).sum::<usize>() <= k,
            Mode::MF => {
                let top = max_rival(&|r| s[r]);
                let mut extra_used = false;
                let cost: usize = v
                    .rivals
                    .iter()
                    .map(|&r| {
                        let mut x = s[r as usize];
                        if !extra_used && x == top {
                            extra_used = true;
                            x += m;
                        }
                        x.saturating_sub(sp)
                    })
                    .sum();
                cost <= k
            }
            Mode::CF => (0..=m.min(k)).any(|j| {
                let left = m - j;
                if left > sp {
                    return false;
                }
                let t = sp - left;
                j + v.rivals.iter().map(|&r| s[r as usize].saturating_sub(t)).sum::<usize>() <= k
            }),
        },
        (Goal::Destructive, Kind::AddVoters) => {
            if adv {
                any_rival(&|r| s[r] + k.min(u[r]) > sp + m)
            } else {
                any_rival(&|r| s[r] + m + k.min(u[r] + mu) > sp)
            }
        }
        (Goal::Destructive, Kind::DeleteVoters) => {
            if adv {
                any_rival(&|r| s[r] + k.min(sp + m) > sp + m)
            } else {
                any_rival(&|r| s[r] + m + k.min(sp) > sp)
            }
        }
        (Goal::Constructive, Kind::PartitionVoters(_)) => return solve_ccpv(&v),
        (Goal::Destructive, Kind::PartitionVoters(_)) => {
            if adv {
                let (_, ballots) = v.registered_with(&order_with(set, Some(p), None));
                dcpv_te_base(set, p, &ballots)
            } else {
                v.rivals.iter().any(|&q| {
                    let (_, ballots) = v.registered_with(&order_with(set, Some(q), Some(p)));
                    dcpv_te_base(set, p, &ballots)
                })
            }
        }
        _ => unreachable!("registry admits no other plurality case"),
    };
    DirectOutcome::plain(answer)
}

fn solve_ccpv(v: &View) -> Result<DirectOutcome> {
    let set = v.inst.candidates;
    let p = v.p;
    match v.mode() {
        Mode::MPlus => {
            let mb = order_with(set, Some(p), None);
            let (idx, ballots) = v.registered_with(&mb);
            let Some(side_b) = ccpv_te_base(set, p, &ballots) else {
                return DirectOutcome::plain(false);
            };
            let mut first: Vec<usize> = idx.iter().zip(&side_b).filter(|(_, &b)| !b).map(|(&i, _)| i).collect();
            if idx.first().is_some_and(|i| !first.contains(i)) {
                first = idx.iter().zip(&side_b).filter(|(_, &b)| b).map(|(&i, _)| i).collect();
            }
            let trace = Trace {
                action: Some(Action::PartitionVoters(first)),
                profile: Some(vec![mb; v.m_reg]),
                revote: None,
            };
            Ok(DirectOutcome { answer: true, trace: Some(trace) })
        }
        Mode::MF => {
            let danger = beating(set, p, &v.fixed, v.m_reg);
            let n = tops(set, v.fixed.iter().copied());
            let r = members(danger)
                .max_by_key(|&d| (n[d as usize], std::cmp::Reverse(d)))
                .unwrap_or(v.rivals[0]);
            let (_, ballots) = v.registered_with(&order_with(set, Some(r), Some(p)));
            DirectOutcome::plain(ccpv_te_base(set, p, &ballots).is_some())
        }
        Mode::CF => DirectOutcome::plain(ccpv_te_cf(v)),
    }
}

/// Chair-first plurality CCPV-TE: manipulators split k1 / k2 between the
/// sides and then vote against `p` as well as they can.
fn ccpv_te_cf(v: &View) -> bool {
    let set = v.inst.candidates;
    let p = v.p;
    let m = v.m_reg;
    let n = tops(set, v.fixed.iter().copied());
    let danger = beating(set, p, &v.fixed, m);
    let np = n[p as usize];
    for k1 in 0..=m {
        let k2 = m - k1;
        for ap in (k1 + 1)..=np {
            let cap = ap - k1 - 1;
            let (u_nd, t) = spread(v, &n, danger, ap, cap);
            let ok = if danger == 0 {
                true
            } else if k2 == 0 {
                u_nd >= t || members(danger).filter(|&d| n[d as usize] >= t).count() >= 2
            } else {
                u_nd >= t + k2
            };
            if ok {
                return true;
            }
        }
    }
    false
}

/// Largest safe score on the second side and the level the dangerous
/// candidates are forced to there, when the first side keeps `ap` votes
/// for `p` and at most `cap` for each rival.
fn spread(v: &View, n: &Counts, danger: CandSet, ap: usize, cap: usize) -> (usize, usize) {
    let p = v.p;
    let mut u_nd = n[p as usize] - ap;
    let mut t = 0;
    for &c in &v.rivals {
        let nc = n[c as usize];
        if crate::election::contains(danger, c) {
            t = t.max(nc.saturating_sub(cap));
        } else {
            u_nd = u_nd.max(nc);
        }
    }
    (u_nd, t)
}

/// Plurality CCPV-TE with every ballot fixed. Returns which voters go to
/// the second side.
pub(crate) fn ccpv_te_base(set: CandSet, p: Cand, ballots: &[Ballot]) -> Option<Vec<bool>> {
    let rivals: Vec<Cand> = members(set).filter(|&c| c != p).collect();
    if rivals.is_empty() {
        return Some(vec![false; ballots.len()]);
    }
    let refs: Vec<&Ballot> = ballots.iter().collect();
    let n = tops(set, ballots);
    let danger = beating(set, p, &refs, 0);
    let np = n[p as usize];
    let dangerous = |c: Cand| crate::election::contains(danger, c);
    for ap in 1..=np {
        let low = |c: Cand| n[c as usize].saturating_sub(ap - 1);
        let bp = np - ap;
        let u_nd = rivals.iter().filter(|&&c| !dangerous(c)).map(|&c| n[c as usize]).max().unwrap_or(0).max(bp);
        let t = rivals.iter().filter(|&&c| dangerous(c)).map(|&c| low(c)).max().unwrap_or(0);
        let mut quota = [0usize; MAX_CANDIDATES];
        quota[p as usize] = bp;
        if u_nd >= t {
            for &c in &rivals {
                quota[c as usize] = if dangerous(c) { low(c) } else { n[c as usize] };
            }
        } else {
            let tied: Vec<Cand> = rivals.iter().copied().filter(|&c| dangerous(c) && n[c as usize] >= t).collect();
            if tied.len() < 2 {
                continue;
            }
            for &c in &rivals {
                quota[c as usize] = if dangerous(c) { low(c) } else { n[c as usize] };
            }
            for &c in &tied[..2] {
                quota[c as usize] = t;
            }
        }
        let side_b = ballots
            .iter()
            .map(|b| match b.top_in(set) {
                Some(c) if quota[c as usize] > 0 => {
                    quota[c as usize] -= 1;
                    true
                }
                _ => false,
            })
            .collect();
        return Some(side_b);
    }
    None
}

/// Plurality DCPV-TE with every ballot fixed.
fn dcpv_te_base(set: CandSet, p: Cand, ballots: &[Ballot]) -> bool {
    let refs: Vec<&Ballot> = ballots.iter().collect();
    let n = tops(set, ballots);
    let np = n[p as usize];
    let mut rival_counts: Vec<usize> = members(set).filter(|&c| c != p).map(|c| n[c as usize]).collect();
    if rival_counts.is_empty() {
        return false;
    }
    rival_counts.sort_unstable_by(|a, b| b.cmp(a));
    if np <= rival_counts[0] + rival_counts.get(1).copied().unwrap_or(0) {
        return true;
    }
    // p alone on one side, a candidate that beats it wins the other
    let danger = beating(set, p, &refs, 0);
    members(danger).any(|q| {
        let nq = n[q as usize];
        nq > 0
            && members(set)
                .filter(|&c| c != p && c != q)
                .all(|c| nq > (n[c as usize] + 1).saturating_sub(np))
    })
}
