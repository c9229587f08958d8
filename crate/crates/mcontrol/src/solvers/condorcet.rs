use super::{order_with, split_feasible, DirectOutcome, View};
use crate::control::{Goal, Kind};
use crate::election::{members, Ballot, Cand, CandSet};
use crate::error::{Error, Result};
use crate::scenario::{Instance, Mode};

/// Multisets of manipulator orders tried before giving up.
const SEARCH_LIMIT: u128 = 50_000_000;

fn delta(b: &Ballot, c: Cand, d: Cand) -> i64 {
    if b.prefers(c, d) {
        1
    } else {
        -1
    }
}

pub(super) fn solve(inst: &Instance) -> Result<DirectOutcome> {
    let v = View::new(inst);
    let p = v.p;
    let k = v.limit() as i64;
    let m = v.m_reg as i64;
    let n = v.fixed.len() as i64;
    let adv = v.mode() != Mode::MPlus;
    let m0 = |c: Cand, d: Cand| v.fixed.iter().map(|b| delta(b, c, d)).sum::<i64>();
    let rivals = &v.rivals;
    // margin of p over c once the manipulators rank p first (+) or last (-)
    let lead = |c: Cand, favour: bool| m0(p, c) + if favour { m } else { -m };
    let is_cw = |favour: bool| n + m > 0 && rivals.iter().all(|&c| lead(c, favour) > 0);

    let answer = match (v.goal(), inst.ctype.kind) {
        (Goal::Constructive, Kind::AddCandidates) => is_cw(!adv),
        (Goal::Destructive, Kind::DeleteCandidates)
        | (Goal::Destructive, Kind::PartitionCandidates(_))
        | (Goal::Destructive, Kind::RunoffPartitionCandidates(_)) => !is_cw(adv),
        (Goal::Constructive, Kind::DeleteCandidates) => {
            n + m > 0 && rivals.iter().filter(|&&c| lead(c, !adv) <= 0).count() as i64 <= k
        }
        (Goal::Constructive, Kind::PartitionCandidates(_) | Kind::RunoffPartitionCandidates(_)) => {
            if n + m == 0 {
                false
            } else if adv {
                !rivals.iter().any(|&r| {
                    lead(r, false) <= 0 && rivals.iter().all(|&c| c == r || m0(r, c) + m > 0)
                })
            } else {
                cc_partition_search(&v, &m0)?
            }
        }
        (Goal::Destructive, Kind::AddCandidates) => {
            let mut pool = rivals.clone();
            if k >= 1 {
                pool.extend(members(inst.spoilers));
            }
            n + m == 0 || pool.iter().any(|&c| m0(c, p) + if adv { -m } else { m } >= 0)
        }
        (Goal::Destructive, Kind::AddVoters) => {
            let mu = v.m_pool as i64;
            n + m == 0
                || rivals.iter().any(|&c| {
                    let gain = v.pool.iter().filter(|b| b.prefers(c, p)).count() as i64;
                    if adv {
                        m0(c, p) - m + k.min(gain) >= 0
                    } else {
                        m0(c, p) + m + k.min(gain + mu) >= 0
                    }
                })
        }
        (Goal::Destructive, Kind::DeleteVoters) => {
            n + m <= k
                || rivals.iter().any(|&c| {
                    let gain = v.fixed.iter().filter(|b| b.prefers(p, c)).count() as i64;
                    if adv {
                        m0(c, p) - m + k.min(gain + m) >= 0
                    } else {
                        m0(c, p) + m + k.min(gain) >= 0
                    }
                })
        }
        (Goal::Destructive, Kind::PartitionVoters(_)) => {
            let set = inst.candidates;
            let mb = if adv { order_with(set, Some(p), None) } else { order_with(set, None, Some(p)) };
            let (_, ballots) = v.registered_with(&mb);
            dcpv_base(set, p, &ballots)
        }
        _ => unreachable!("registry admits no other condorcet case"),
    };
    DirectOutcome::plain(answer)
}

fn dcpv_base(set: CandSet, p: Cand, ballots: &[Ballot]) -> bool {
    let rivals: Vec<Cand> = members(set).filter(|&c| c != p).collect();
    if ballots.is_empty() {
        return true;
    }
    let total = |c: Cand| ballots.iter().map(|b| delta(b, c, p)).sum::<i64>();
    if rivals.iter().any(|&c| total(c) >= 0) {
        return true;
    }
    rivals.iter().any(|&c| {
        rivals.iter().any(|&d| {
            let pairs: Vec<(i64, i64)> = ballots.iter().map(|b| (delta(b, c, p), delta(b, d, p))).collect();
            split_feasible(&pairs, 0, 0)
        })
    })
}

/// Cooperative CCPC / CCRPC: the manipulators rank p first and try every
/// multiset of orders over the rest, looking for one where the Condorcet
/// winner among the rivals (if any) loses to p.
fn cc_partition_search(v: &View, m0: &dyn Fn(Cand, Cand) -> i64) -> Result<bool> {
    let p = v.p;
    let m = v.m_reg;
    let rivals = &v.rivals;
    let r = rivals.len();
    let danger: Vec<bool> = rivals.iter().map(|&c| m0(p, c) + m as i64 <= 0).collect();
    if !danger.iter().any(|&d| d) {
        return Ok(true);
    }
    let orders = permutations(r);
    let states = multisets(orders.len() as u128, m as u128);
    if states > SEARCH_LIMIT {
        return Err(Error::Budget { states, budget: SEARCH_LIMIT });
    }
    let mut base = vec![0i64; r * r];
    for i in 0..r {
        for j in 0..r {
            if i != j {
                base[i * r + j] = m0(rivals[i], rivals[j]);
            }
        }
    }
    let electorate = v.fixed.len() + m;
    let ok = |mat: &[i64]| {
        let cw = (0..r).find(|&a| electorate > 0 && (0..r).all(|b| b == a || mat[a * r + b] > 0));
        cw.map_or(true, |a| !danger[a])
    };
    Ok(search(&orders, 0, m, r, &mut base, &ok))
}

fn search(orders: &[Vec<usize>], from: usize, left: usize, r: usize, mat: &mut Vec<i64>, ok: &dyn Fn(&[i64]) -> bool) -> bool {
    if left == 0 {
        return ok(mat);
    }
    for o in from..orders.len() {
        apply(&orders[o], r, mat, 1);
        let found = search(orders, o, left - 1, r, mat, ok);
        apply(&orders[o], r, mat, -1);
        if found {
            return true;
        }
    }
    false
}

fn apply(order: &[usize], r: usize, mat: &mut [i64], sign: i64) {
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            mat[order[i] * r + order[j]] += sign;
            mat[order[j] * r + order[i]] -= sign;
        }
    }
}

fn permutations(r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..r).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

fn multisets(kinds: u128, size: u128) -> u128 {
    // C(kinds + size - 1, size), saturating
    let mut acc: u128 = 1;
    for i in 0..size {
        acc = acc.saturating_mul(kinds + i) / (i + 1);
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}
