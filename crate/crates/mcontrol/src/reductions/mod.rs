//! Instance transformers from source problems (quantified formulas, number
//! partition, plain manipulation) into control-plus-manipulation instances.

use crate::artificial::{
    ac_anchor_name, ac_formula_name, ac_pair_name, perm_unrank, pv_dummy_name, pv_formula_name, rev_coding_name,
    rev_dummy_name, rev_q_name, PV_BLOCK, PV_EPS, REV_EPS, REV_EPS2,
};
use crate::control::{ControlType, Goal, Kind, Tie};
use crate::election::{bit, full_set, members, winners, Ballot, Cand, CandSet, Rule, Voter};
use crate::error::{malformed, Error, Result};
use crate::formula::{pad_blocks, swap_blocks, Formula};
use crate::oracle::ballot_space;
use crate::scenario::{holds, Instance, Mode, Scenario};

/// Control types with a quantified-formula image over formula-ac.
pub const NONPARTITION_TYPES: [&str; 8] = ["CCAC", "DCAC", "CCDC", "DCDC", "CCAV", "DCAV", "CCDV", "DCDV"];

/// Sorts names and maps each original position to its index in the result.
fn sorted_names(names: Vec<String>) -> Result<(Vec<String>, Vec<Cand>)> {
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| names[a].cmp(&names[b]));
    let sorted: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return malformed("generated candidate names collide");
    }
    let mut pos = vec![0 as Cand; names.len()];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new as Cand;
    }
    Ok((sorted, pos))
}

fn set_of(cands: &[Cand]) -> CandSet {
    cands.iter().fold(0, |a, &c| a | bit(c))
}

fn competitive(mode: Mode) -> Result<()> {
    if mode == Mode::MPlus {
        Err(Error::Unsupported("formula images are built for CF and MF".into()))
    } else {
        Ok(())
    }
}

/// Pads a two-block formula to equal widths and, for MF, swaps the blocks
/// so that the chair's block always comes first.
fn two_block(formula: &Formula, widths: &[usize], mode: Mode) -> Result<(Formula, usize)> {
    if widths.len() != 2 {
        return malformed("a two-block formula needs exactly two block widths");
    }
    let (psi, w) = pad_blocks(formula, widths)?;
    Ok(if mode == Mode::MF { (swap_blocks(&psi, w), w) } else { (psi, w) })
}

/// Image of a two-block formula (∃∀ for CF, ∀∃ for MF) under one of the
/// eight add/delete control types, over the formula-ac rule. The chair's
/// block is read from which member of each candidate (or voter) pair
/// survives; the manipulator's block from which anchors it ranks above the
/// formula candidate.
pub fn qbf2_to_nonpartition(formula: &Formula, widths: &[usize], ctype: ControlType, mode: Mode) -> Result<Instance> {
    competitive(mode)?;
    let code = ctype.code();
    if !NONPARTITION_TYPES.contains(&code.as_str()) {
        return Err(Error::Unsupported(format!("no formula image for {code}")));
    }
    let (psi, l) = two_block(formula, widths, mode)?;
    let constructive = ctype.goal == Goal::Constructive;
    let voter_coded = matches!(ctype.kind, Kind::AddVoters | Kind::DeleteVoters);
    let fname = ac_formula_name(constructive, voter_coded, &psi);
    let mut raw = vec![fname.clone()];
    raw.extend((1..=l).map(|j| ac_anchor_name(&fname, j, l)));
    let n_core = raw.len();
    if !voter_coded {
        for i in 1..=l {
            for b in [false, true] {
                raw.push(ac_pair_name(&fname, i, b, l));
            }
        }
    }
    let (names, pos) = sorted_names(raw)?;
    let core = set_of(&pos[..n_core]);
    let pairs = set_of(&pos[n_core..]);
    let all = full_set(names.len());
    let p = pos[0];
    let (candidates, spoilers) = match ctype.kind {
        Kind::AddCandidates => (core, pairs),
        _ => (all, 0),
    };
    let mut voters = Vec::new();
    match ctype.kind {
        Kind::AddVoters | Kind::DeleteVoters => {
            voters.push(Voter::manipulator().weighted(2));
            let sorted: Vec<Cand> = members(all).collect();
            for r in 0..2 * l {
                let v = Voter::fixed(Ballot::Order(perm_unrank(r as u128, &sorted)));
                voters.push(if ctype.kind == Kind::AddVoters { v.unregistered() } else { v });
            }
        }
        _ => voters.push(Voter::manipulator()),
    }
    let inst = Instance {
        rule: Rule::FormulaAc,
        names,
        candidates,
        spoilers,
        p,
        ctype,
        limit: l,
        voters,
        scenario: Scenario::new(mode),
    };
    inst.validate()?;
    Ok(inst)
}

/// Image of a two-block formula under CCPV (either tie rule) over the
/// formula-pv rule: 4k nonmanipulators (two copies of each of the first 2k
/// orders) and one manipulator.
pub fn qbf2_to_ccpv(formula: &Formula, widths: &[usize], tie: Tie, mode: Mode) -> Result<Instance> {
    competitive(mode)?;
    let (psi, k) = two_block(formula, widths, mode)?;
    let mut raw = vec![PV_EPS.to_string(), pv_formula_name(&psi), PV_BLOCK.to_string()];
    raw.extend((1..=k).map(pv_dummy_name));
    let (names, pos) = sorted_names(raw)?;
    let all = full_set(names.len());
    let sorted: Vec<Cand> = members(all).collect();
    let mut voters = Vec::new();
    for r in 0..2 * k {
        let b = Ballot::Order(perm_unrank(r as u128, &sorted));
        voters.push(Voter::fixed(b.clone()));
        voters.push(Voter::fixed(b));
    }
    voters.push(Voter::manipulator());
    let inst = Instance {
        rule: Rule::FormulaPv,
        names,
        candidates: all,
        spoilers: 0,
        p: pos[1],
        ctype: ControlType { goal: Goal::Constructive, kind: Kind::PartitionVoters(tie) },
        limit: 0,
        voters,
        scenario: Scenario::new(mode),
    };
    inst.validate()?;
    Ok(inst)
}

/// Image of a three-block ∀∃∀ formula with equal block widths under
/// CCPV-TP, manipulators first, with revoting, over the formula-rev rule.
pub fn qbf3_to_ccpv_tp_mf_revoting(formula: &Formula, widths: &[usize]) -> Result<Instance> {
    if widths.len() != 3 {
        return malformed("a three-block formula needs exactly three block widths");
    }
    let (psi, k) = pad_blocks(formula, widths)?;
    let mut raw = vec![REV_EPS.to_string(), REV_EPS2.to_string(), rev_coding_name(&psi)];
    raw.extend((1..k).map(rev_dummy_name));
    for round in [1u8, 2] {
        for i in 1..=k {
            for b in [false, true] {
                raw.push(rev_q_name(round, i, b));
            }
        }
    }
    let n_a = k + 1;
    let (names, pos) = sorted_names(raw)?;
    let all = full_set(names.len());
    // A is ε′, the coding candidate and the dummies
    let mut a: Vec<Cand> = pos[1..1 + n_a].to_vec();
    a.sort();
    let rest: Vec<Cand> = members(all & !set_of(&a)).collect();
    let mut voters = Vec::new();
    for r in 0..2 * k {
        let mut order = perm_unrank(r as u128, &a);
        order.extend(&rest);
        let b = Ballot::Order(order);
        voters.push(Voter::fixed(b.clone()));
        voters.push(Voter::fixed(b));
    }
    voters.push(Voter::manipulator());
    let inst = Instance {
        rule: Rule::FormulaRev,
        names,
        candidates: all,
        spoilers: 0,
        p: pos[2],
        ctype: ControlType { goal: Goal::Constructive, kind: Kind::PartitionVoters(Tie::TP) },
        limit: 0,
        voters,
        scenario: Scenario::revoting(Mode::MF),
    };
    inst.validate()?;
    Ok(inst)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionInstance {
    pub weights: Vec<u64>,
}

impl PartitionInstance {
    pub fn new(weights: Vec<u64>) -> Result<PartitionInstance> {
        if weights.is_empty() || weights.contains(&0) {
            return malformed("partition weights must be a nonempty list of positive integers");
        }
        Ok(PartitionInstance { weights })
    }

    pub fn total(&self) -> u64 {
        self.weights.iter().sum()
    }
}

/// Whether some subsequence sums to half the total, by enumeration.
pub fn has_partition(inst: &PartitionInstance) -> Result<bool> {
    let t = inst.weights.len();
    if t > 30 {
        return malformed("too many weights for enumeration");
    }
    let total = inst.total();
    if total % 2 == 1 {
        return Ok(false);
    }
    Ok((0u64..1 << t).any(|mask| {
        let s: u64 = (0..t).filter(|i| mask >> i & 1 == 1).map(|i| inst.weights[i]).sum();
        2 * s == total
    }))
}

/// Weighted Borda CCAV-MF on {a, b, p}: the weights become registered
/// manipulators, and the chair may add one of two voters of weight 3K−1.
/// The answer is the complement of the partition question.
pub fn partition_to_borda_ccav_mf(inst: &PartitionInstance) -> Result<Instance> {
    let total = inst.total();
    if inst.weights.is_empty() || inst.weights.contains(&0) {
        return malformed("partition weights must be a nonempty list of positive integers");
    }
    if total % 2 == 1 {
        return malformed(format!("weights sum to {total}, which is odd"));
    }
    let half = total / 2;
    let names: Vec<String> = ["a", "b", "p"].iter().map(|s| s.to_string()).collect();
    let (a, b, p) = (0, 1, 2);
    let mut voters: Vec<Voter> = inst.weights.iter().map(|&w| Voter::manipulator().weighted(w)).collect();
    voters.push(Voter::fixed(Ballot::Order(vec![p, a, b])).weighted(3 * half - 1).unregistered());
    voters.push(Voter::fixed(Ballot::Order(vec![p, b, a])).weighted(3 * half - 1).unregistered());
    let out = Instance {
        rule: Rule::Borda,
        names,
        candidates: 0b111,
        spoilers: 0,
        p,
        ctype: ControlType { goal: Goal::Constructive, kind: Kind::AddVoters },
        limit: 1,
        voters,
        scenario: Scenario::new(Mode::MF),
    };
    out.validate()?;
    Ok(out)
}

/// Control instance wrapped in a move order; without manipulators the
/// answer does not depend on it.
pub fn pad_zero_manipulators(inst: &Instance, mode: Mode) -> Result<Instance> {
    if inst.voters.iter().any(|v| v.manipulator) {
        return malformed("control instance must not have manipulators");
    }
    let mut out = inst.clone();
    out.scenario = Scenario::new(mode);
    out.validate()?;
    Ok(out)
}

/// Coalitional manipulation: can the manipulators make `p` win (or lose)?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manipulation {
    pub rule: Rule,
    pub names: Vec<String>,
    pub p: Cand,
    pub goal: Goal,
    pub voters: Vec<Voter>,
}

/// Exhaustive answer to a manipulation question.
pub fn manipulation_answer(m: &Manipulation) -> Result<bool> {
    let all = full_set(m.names.len());
    let space = ballot_space(m.rule, all);
    let slots: Vec<usize> = (0..m.voters.len()).filter(|&i| m.voters[i].manipulator).collect();
    let mut ballots: Vec<Ballot> = m.voters.iter().map(|v| v.ballot.clone()).collect();
    let mut idx = vec![0usize; slots.len()];
    loop {
        for (s, &i) in slots.iter().zip(&idx) {
            ballots[*s] = space[i].clone();
        }
        let weighted: Vec<(&Ballot, u64)> = ballots.iter().zip(&m.voters).map(|(b, v)| (b, v.weight)).collect();
        if holds(m.goal, winners(m.rule, &m.names, all, &weighted)?, m.p) {
            return Ok(true);
        }
        let mut j = 0;
        loop {
            if j == idx.len() {
                return Ok(false);
            }
            idx[j] += 1;
            if idx[j] < space.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Embeds a manipulation question into a control type with the control
/// dimension switched off (no spoilers, no unregistered voters, limit 0).
/// With the same goal the cooperative mode answers it directly; with the
/// opposite goal a competitive mode answers its complement, returned as
/// the flag.
pub fn embed_manipulation(m: &Manipulation, target: ControlType, mode: Mode) -> Result<(Instance, bool)> {
    if target.is_partition() {
        return Err(Error::Unsupported("partition types have no control dimension to switch off".into()));
    }
    let complement = match (target.goal == m.goal, mode) {
        (true, Mode::MPlus) => false,
        (false, Mode::CF | Mode::MF) => true,
        _ => {
            return Err(Error::Unsupported(format!(
                "{} {} does not inherit this manipulation problem",
                target.code(),
                mode.id()
            )))
        }
    };
    let inst = Instance {
        rule: m.rule,
        names: m.names.clone(),
        candidates: full_set(m.names.len()),
        spoilers: 0,
        p: m.p,
        ctype: target,
        limit: 0,
        voters: m.voters.iter().filter(|v| v.registered).cloned().collect(),
        scenario: Scenario::new(mode),
    };
    inst.validate()?;
    Ok((inst, complement))
}
