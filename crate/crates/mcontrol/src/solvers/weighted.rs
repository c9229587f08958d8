//! Weighted three-candidate cases.

use super::{order_with, DirectOutcome};
use crate::control::{self, Goal, Kind};
use crate::election::{members, Ballot, Cand};
use crate::error::{Error, Result};
use crate::oracle::Trace;
use crate::scenario::{holds, Instance};

fn three(inst: &Instance) -> Result<(Cand, Cand, Cand)> {
    let c: Vec<Cand> = members(inst.candidates).collect();
    if c.len() != 3 {
        return Err(Error::Unsupported(format!("{} solver needs exactly 3 candidates", inst.rule.id())));
    }
    let p = inst.p;
    let rest: Vec<Cand> = c.into_iter().filter(|&x| x != p).collect();
    Ok((p, rest[0], rest[1]))
}

fn last(b: &Ballot) -> Option<Cand> {
    match b {
        Ballot::Order(o) => o.last().copied(),
        _ => None,
    }
}

/// Fewest of `weights` (heaviest first) reaching `need`, if any.
fn fewest(mut weights: Vec<u64>, need: u64) -> Option<usize> {
    if need == 0 {
        return Some(0);
    }
    weights.sort_unstable_by(|a, b| b.cmp(a));
    let mut acc = 0u64;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if acc >= need {
            return Some(i + 1);
        }
    }
    None
}

/// Competitive veto CCAV / CCDV. Manipulators veto p, which is their best
/// reply to any chair move.
pub(super) fn solve_veto3w(inst: &Instance) -> Result<DirectOutcome> {
    let (p, a, b) = three(inst)?;
    let mut veto = [0u64; 64];
    for v in inst.voters.iter().filter(|v| v.registered) {
        let target = if v.manipulator { Some(p) } else { last(&v.ballot) };
        if let Some(t) = target {
            veto[t as usize] += v.weight;
        }
    }
    let (vp, va, vb) = (veto[p as usize], veto[a as usize], veto[b as usize]);
    let answer = match inst.ctype.kind {
        Kind::AddVoters => {
            let pool = |t: Cand| -> Vec<u64> {
                inst.voters
                    .iter()
                    .filter(|v| !v.registered && !v.manipulator && last(&v.ballot) == Some(t))
                    .map(|v| v.weight)
                    .collect()
            };
            match (fewest(pool(a), vp.saturating_sub(va)), fewest(pool(b), vp.saturating_sub(vb))) {
                (Some(x), Some(y)) => x + y <= inst.limit,
                _ => false,
            }
        }
        Kind::DeleteVoters => {
            let p_vetoers: Vec<u64> = inst
                .voters
                .iter()
                .filter(|v| v.registered && (v.manipulator || last(&v.ballot) == Some(p)))
                .map(|v| v.weight)
                .collect();
            fewest(p_vetoers, vp.saturating_sub(va.min(vb))).is_some_and(|x| x <= inst.limit)
        }
        _ => return Err(Error::Unsupported("veto solver covers CCAV and CCDV".into())),
    };
    DirectOutcome::plain(answer)
}

/// Chair-first Borda CCAV / CCDV on three candidates: a chair move is safe
/// iff p wins when every manipulator votes a > b > p and when every one
/// votes b > a > p.
pub(super) fn solve_borda3w_cf(inst: &Instance) -> Result<DirectOutcome> {
    let (p, a, b) = three(inst)?;
    if inst.goal() != Goal::Constructive {
        return Err(Error::Unsupported("borda solver covers constructive control".into()));
    }
    let m = inst.manipulators().len();
    let dom = inst.domain();
    let ab = vec![order_with(dom, Some(a), Some(p)); m];
    let ba = vec![order_with(dom, Some(b), Some(p)); m];
    for action in control::legal_actions(inst) {
        let wins = |prof: &[Ballot]| -> Result<bool> {
            Ok(holds(Goal::Constructive, control::evaluate(inst, &action, prof, None)?, p))
        };
        if wins(&ab)? && wins(&ba)? {
            let trace = Trace { action: Some(action), profile: None, revote: None };
            return Ok(DirectOutcome { answer: true, trace: Some(trace) });
        }
    }
    DirectOutcome::plain(false)
}
