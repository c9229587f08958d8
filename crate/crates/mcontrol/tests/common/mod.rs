#![allow(dead_code)]

use mcontrol::oracle::ballot_space;
use mcontrol::{Ballot, ControlType, Instance, Kind, Mode, Rule, Scenario, Voter};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// A small random instance of the given case. Weighted rules get weights
/// up to 4 and exactly three registered candidates.
pub fn random_instance<R: Rng>(rng: &mut R, rule: Rule, ctype: ControlType, mode: Mode) -> Instance {
    let weighted = matches!(rule, Rule::Veto | Rule::Borda);
    let ncand = if weighted { 3 } else { rng.gen_range(1..=4) };
    let nspoil = if ctype.kind == Kind::AddCandidates { rng.gen_range(0..=2) } else { 0 };
    let total = ncand + nspoil;
    let names = names(total);
    let mut idx: Vec<u8> = (0..total as u8).collect();
    idx.shuffle(rng);
    let candidates = idx[..ncand].iter().fold(0u64, |a, &c| a | 1 << c);
    let spoilers = idx[ncand..].iter().fold(0u64, |a, &c| a | 1 << c);
    let p = idx[rng.gen_range(0..ncand)];
    let dom = candidates | spoilers;
    let space = ballot_space(rule, dom);
    let weight = |rng: &mut R| if weighted { rng.gen_range(1..=4) } else { 1 };
    let mut voters = Vec::new();
    let nreg = rng.gen_range(0..=5);
    for _ in 0..nreg {
        let w = weight(rng);
        voters.push(Voter::fixed(space.choose(rng).unwrap().clone()).weighted(w));
    }
    let nman = rng.gen_range(0..=2);
    for _ in 0..nman {
        let w = weight(rng);
        let pos = rng.gen_range(0..=voters.len());
        voters.insert(pos, Voter::manipulator().weighted(w));
    }
    if ctype.kind == Kind::AddVoters {
        for _ in 0..rng.gen_range(0..=3) {
            let w = weight(rng);
            voters.push(Voter::fixed(space.choose(rng).unwrap().clone()).weighted(w).unregistered());
        }
        if rng.gen_bool(0.3) {
            let w = weight(rng);
            voters.push(Voter::manipulator().weighted(w).unregistered());
        }
    }
    Instance {
        rule,
        names,
        candidates,
        spoilers,
        p,
        ctype,
        limit: rng.gen_range(0..=3),
        voters,
        scenario: Scenario::new(mode),
    }
}

pub fn order(names: &[&str], all: &[String]) -> Ballot {
    Ballot::Order(names.iter().map(|n| all.iter().position(|x| x == n).unwrap() as u8).collect())
}
