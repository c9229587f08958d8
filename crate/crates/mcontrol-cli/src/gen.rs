//! Instance generation: exhaustive enumeration up to voter anonymity, and
//! impartial-culture sampling.

use mcontrol::election::bit;
use mcontrol::oracle::ballot_space;
use mcontrol::{Ballot, ControlType, Error, Instance, Kind, Mode, Result, Rule, Scenario, Voter};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Candidates in the domain, spoilers included.
    pub candidates: usize,
    /// Voters in total: registered, unregistered and manipulators.
    pub voters: usize,
    pub manipulators: usize,
    /// Optional separate cap on voters with fixed ballots.
    pub nonmanipulators: Option<usize>,
    pub weight: u64,
}

impl Default for Bounds {
    fn default() -> Bounds {
        Bounds { candidates: 3, voters: 4, manipulators: 2, nonmanipulators: None, weight: 1 }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c={},v={},m={},w={}", self.candidates, self.voters, self.manipulators, self.weight)?;
        match self.nonmanipulators {
            Some(n) => write!(f, ",n={n}"),
            None => Ok(()),
        }
    }
}

impl FromStr for Bounds {
    type Err = Error;

    /// `c=3,v=4,m=2,w=1` plus an optional `n=`; omitted keys keep their
    /// defaults.
    fn from_str(s: &str) -> Result<Bounds> {
        let mut b = Bounds::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::Malformed(format!("bad bound {part:?}, expected key=value"));
            let (k, v) = part.split_once('=').ok_or_else(bad)?;
            let n: u64 = v.trim().parse().map_err(|_| bad())?;
            match k.trim() {
                "c" | "candidates" => b.candidates = n as usize,
                "v" | "voters" => b.voters = n as usize,
                "m" | "manipulators" => b.manipulators = n as usize,
                "w" | "weight" => b.weight = n,
                "n" | "nonmanipulators" => b.nonmanipulators = Some(n as usize),
                _ => return Err(bad()),
            }
        }
        if b.candidates > 8 {
            return Err(Error::Malformed("at most 8 candidates can be enumerated".into()));
        }
        Ok(b)
    }
}

impl Bounds {
    fn fixed_cap(&self, nman: usize) -> usize {
        let left = self.voters - nman;
        self.nonmanipulators.map_or(left, |n| n.min(left))
    }
}

fn weighted_rule(rule: Rule) -> bool {
    matches!(rule, Rule::Veto | Rule::Borda)
}

/// Registered-candidate and spoiler counts to try.
fn shapes(rule: Rule, ctype: ControlType, bounds: &Bounds) -> Vec<(usize, usize)> {
    if weighted_rule(rule) {
        return if bounds.candidates >= 3 { vec![(3, 0)] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for total in 1..=bounds.candidates {
        if ctype.kind == Kind::AddCandidates {
            out.extend((1..=total).map(|n| (n, total - n)));
        } else {
            out.push((total, 0));
        }
    }
    out
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// Non-decreasing index sequences of length `len` over `0..k`.
fn multisets(k: usize, len: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, len: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in from..k {
            cur.push(i);
            go(k, len, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, len, 0, &mut Vec::new(), &mut out);
    out
}

fn limit_cap(ctype: ControlType, ncand: usize, nspoil: usize, nreg: usize, npool: usize) -> usize {
    match ctype.kind {
        Kind::AddVoters => npool,
        Kind::DeleteVoters => nreg,
        Kind::AddCandidates => nspoil,
        Kind::DeleteCandidates => ncand,
        _ => 0,
    }
}

/// Calls `f` on every instance of the case within `bounds`, up to voter
/// order. Candidate `a` is always distinguished; spoilers take the last
/// names. Limits range up to the number of objects the chair could touch.
pub fn for_each_exhaustive(rule: Rule, ctype: ControlType, mode: Mode, bounds: &Bounds, f: &mut dyn FnMut(Instance)) {
    let av = ctype.kind == Kind::AddVoters;
    let weights: Vec<u64> = if weighted_rule(rule) { (1..=bounds.weight.max(1)).collect() } else { vec![1] };
    for (ncand, nspoil) in shapes(rule, ctype, bounds) {
        let all = names(ncand + nspoil);
        let candidates = (0..ncand as u8).fold(0, |a, c| a | bit(c));
        let spoilers = (ncand as u8..(ncand + nspoil) as u8).fold(0, |a, c| a | bit(c));
        let space = ballot_space(rule, candidates | spoilers);
        let types: Vec<(&Ballot, u64)> = space.iter().flat_map(|b| weights.iter().map(move |&w| (b, w))).collect();
        for nman in 0..=bounds.manipulators.min(bounds.voters) {
            for man_pool in 0..=if av { nman } else { 0 } {
                for man_w in multisets(weights.len(), nman - man_pool) {
                    for pool_w in multisets(weights.len(), man_pool) {
                        let left = bounds.fixed_cap(nman);
                        for nreg in 0..=left {
                            for npool in 0..=if av { left - nreg } else { 0 } {
                                for reg in multisets(types.len(), nreg) {
                                    for pool in multisets(types.len(), npool) {
                                        let mut voters: Vec<Voter> =
                                            reg.iter().map(|&i| Voter::fixed(types[i].0.clone()).weighted(types[i].1)).collect();
                                        voters.extend(man_w.iter().map(|&i| Voter::manipulator().weighted(weights[i])));
                                        voters.extend(
                                            pool.iter()
                                                .map(|&i| Voter::fixed(types[i].0.clone()).weighted(types[i].1).unregistered()),
                                        );
                                        voters.extend(
                                            pool_w.iter().map(|&i| Voter::manipulator().weighted(weights[i]).unregistered()),
                                        );
                                        let reg_total = nreg + man_w.len();
                                        let cap = limit_cap(ctype, ncand, nspoil, reg_total, npool + man_pool);
                                        for limit in 0..=cap {
                                            f(Instance {
                                                rule,
                                                names: all.clone(),
                                                candidates,
                                                spoilers,
                                                p: 0,
                                                ctype,
                                                limit,
                                                voters: voters.clone(),
                                                scenario: Scenario::new(mode),
                                            });
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// One impartial-culture instance: uniform sizes within bounds, uniform
/// ballots over the domain, uniform weights and limit.
pub fn random_instance<R: Rng>(rng: &mut R, rule: Rule, ctype: ControlType, mode: Mode, bounds: &Bounds) -> Option<Instance> {
    let shapes = shapes(rule, ctype, bounds);
    let &(ncand, nspoil) = shapes.choose(rng)?;
    let all = names(ncand + nspoil);
    let mut idx: Vec<u8> = (0..(ncand + nspoil) as u8).collect();
    idx.shuffle(rng);
    let candidates = idx[..ncand].iter().fold(0, |a, &c| a | bit(c));
    let spoilers = idx[ncand..].iter().fold(0, |a, &c| a | bit(c));
    let p = idx[rng.gen_range(0..ncand)];
    let space = ballot_space(rule, candidates | spoilers);
    let wmax = if weighted_rule(rule) { bounds.weight.max(1) } else { 1 };
    let av = ctype.kind == Kind::AddVoters;

    let nman = rng.gen_range(0..=bounds.manipulators.min(bounds.voters));
    let nfixed = rng.gen_range(0..=bounds.fixed_cap(nman));
    let mut reg = Vec::new();
    let mut pool = Vec::new();
    for _ in 0..nfixed {
        let v = Voter::fixed(space.choose(rng).unwrap().clone()).weighted(rng.gen_range(1..=wmax));
        if av && rng.gen_bool(0.5) {
            pool.push(v.unregistered());
        } else {
            reg.push(v);
        }
    }
    for _ in 0..nman {
        let v = Voter::manipulator().weighted(rng.gen_range(1..=wmax));
        if av && rng.gen_bool(0.3) {
            pool.push(v.unregistered());
        } else {
            let at = rng.gen_range(0..=reg.len());
            reg.insert(at, v);
        }
    }
    let cap = limit_cap(ctype, ncand, nspoil, reg.len(), pool.len());
    reg.extend(pool);
    Some(Instance {
        rule,
        names: all,
        candidates,
        spoilers,
        p,
        ctype,
        limit: rng.gen_range(0..=cap),
        voters: reg,
        scenario: Scenario::new(mode),
    })
}
