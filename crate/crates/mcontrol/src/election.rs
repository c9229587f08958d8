//! Candidates, ballots, voters and winner determination.
//!
//! Candidates are addressed by their index in a name list sorted by byte
//! order, so index order is lexicographic order. Sets of candidates are
//! bitmasks, which caps an election at 64 candidates.

use crate::artificial;
use crate::error::{malformed, Error, Result};

pub type Cand = u8;
pub type CandSet = u64;

pub const MAX_CANDIDATES: usize = 64;

pub fn bit(c: Cand) -> CandSet {
    1u64 << c
}

pub fn contains(set: CandSet, c: Cand) -> bool {
    set >> c & 1 == 1
}

pub fn members(set: CandSet) -> impl Iterator<Item = Cand> + Clone {
    let mut rest = set;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let c = rest.trailing_zeros() as Cand;
            rest &= rest - 1;
            Some(c)
        }
    })
}

pub fn full_set(n: usize) -> CandSet {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'<' | b'>' | b','))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ballot {
    /// Most preferred first.
    Order(Vec<Cand>),
    Approval(CandSet),
    /// A manipulator whose vote has not been chosen yet.
    Blank,
}

impl Ballot {
    /// Erasure for orders, intersection for approval sets.
    pub fn project(&self, set: CandSet) -> Ballot {
        match self {
            Ballot::Order(o) => Ballot::Order(o.iter().copied().filter(|&c| contains(set, c)).collect()),
            Ballot::Approval(a) => Ballot::Approval(a & set),
            Ballot::Blank => Ballot::Blank,
        }
    }

    /// True when `c` is ranked above `d` (orders) or approved while `d` is not.
    pub fn prefers(&self, c: Cand, d: Cand) -> bool {
        match self {
            Ballot::Order(o) => {
                for &x in o {
                    if x == c {
                        return true;
                    }
                    if x == d {
                        return false;
                    }
                }
                false
            }
            Ballot::Approval(a) => contains(*a, c) && !contains(*a, d),
            Ballot::Blank => false,
        }
    }

    pub fn top_in(&self, set: CandSet) -> Option<Cand> {
        match self {
            Ballot::Order(o) => o.iter().copied().find(|&c| contains(set, c)),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Ballot::Blank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Voter {
    pub ballot: Ballot,
    pub weight: u64,
    pub manipulator: bool,
    pub registered: bool,
}

impl Voter {
    pub fn fixed(ballot: Ballot) -> Voter {
        Voter { ballot, weight: 1, manipulator: false, registered: true }
    }

    pub fn manipulator() -> Voter {
        Voter { ballot: Ballot::Blank, weight: 1, manipulator: true, registered: true }
    }

    pub fn weighted(mut self, weight: u64) -> Voter {
        self.weight = weight;
        self
    }

    pub fn unregistered(mut self) -> Voter {
        self.registered = false;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Plurality,
    Approval,
    Veto,
    Borda,
    Condorcet,
    FormulaAc,
    FormulaPv,
    FormulaRev,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallotKind {
    Order,
    Approval,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::Plurality,
        Rule::Approval,
        Rule::Veto,
        Rule::Borda,
        Rule::Condorcet,
        Rule::FormulaAc,
        Rule::FormulaPv,
        Rule::FormulaRev,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Rule::Plurality => "plurality",
            Rule::Approval => "approval",
            Rule::Veto => "veto",
            Rule::Borda => "borda",
            Rule::Condorcet => "condorcet",
            Rule::FormulaAc => "formula-ac",
            Rule::FormulaPv => "formula-pv",
            Rule::FormulaRev => "formula-rev",
        }
    }

    pub fn parse(s: &str) -> Result<Rule> {
        Rule::ALL
            .into_iter()
            .find(|r| r.id() == s)
            .ok_or_else(|| Error::UnsupportedRule(s.to_string()))
    }

    pub fn ballot_kind(self) -> BallotKind {
        if self == Rule::Approval {
            BallotKind::Approval
        } else {
            BallotKind::Order
        }
    }

    pub fn is_score_rule(self) -> bool {
        matches!(self, Rule::Plurality | Rule::Approval | Rule::Veto | Rule::Borda)
    }
}

pub type Weighted<'a> = (&'a Ballot, u64);

/// Checks that every ballot is a complete ballot over exactly `set`.
pub fn check_ballots(rule: Rule, set: CandSet, ballots: &[Weighted]) -> Result<()> {
    for (i, (b, w)) in ballots.iter().enumerate() {
        if *w == 0 {
            return malformed(format!("ballot {i} has weight 0"));
        }
        match (rule.ballot_kind(), b) {
            (_, Ballot::Blank) => return Err(Error::UnresolvedManipulator(i)),
            (BallotKind::Order, Ballot::Order(o)) => {
                let mut seen = 0u64;
                for &c in o {
                    if !contains(set, c) || contains(seen, c) {
                        return malformed(format!("ballot {i} is not a permutation of the candidates"));
                    }
                    seen |= bit(c);
                }
                if seen != set {
                    return malformed(format!("ballot {i} is not a permutation of the candidates"));
                }
            }
            (BallotKind::Approval, Ballot::Approval(a)) => {
                if a & !set != 0 {
                    return malformed(format!("ballot {i} approves a non-candidate"));
                }
            }
            _ => return malformed(format!("ballot {i} has the wrong kind for rule {}", rule.id())),
        }
    }
    Ok(())
}

/// Winner set of `rule` over the candidates in `set`.
pub fn winners(rule: Rule, names: &[String], set: CandSet, ballots: &[Weighted]) -> Result<CandSet> {
    if set == 0 {
        return malformed("empty candidate set");
    }
    check_ballots(rule, set, ballots)?;
    Ok(winners_raw(rule, names, set, ballots))
}

/// As [`winners`] but without validation. Ballots may mention candidates
/// outside `set`; they are projected on the fly.
pub(crate) fn winners_raw(rule: Rule, names: &[String], set: CandSet, ballots: &[Weighted]) -> CandSet {
    if set == 0 {
        return 0;
    }
    match rule {
        Rule::Condorcet => condorcet_raw(set, ballots),
        Rule::FormulaAc | Rule::FormulaPv | Rule::FormulaRev => {
            let projected: Vec<(Vec<Cand>, u64)> = ballots
                .iter()
                .map(|(b, w)| match b {
                    Ballot::Order(o) => (o.iter().copied().filter(|&c| contains(set, c)).collect(), *w),
                    _ => (Vec::new(), *w),
                })
                .collect();
            artificial::winners(rule, names, set, &projected)
        }
        _ => {
            if ballots.is_empty() {
                return set;
            }
            let s = scores_raw(rule, set, ballots);
            argmax(set, &s)
        }
    }
}

fn argmax(set: CandSet, s: &[u64; MAX_CANDIDATES]) -> CandSet {
    let best = members(set).map(|c| s[c as usize]).max().unwrap_or(0);
    members(set).filter(|&c| s[c as usize] == best).fold(0, |acc, c| acc | bit(c))
}

pub(crate) fn scores_raw(rule: Rule, set: CandSet, ballots: &[Weighted]) -> [u64; MAX_CANDIDATES] {
    let mut s = [0u64; MAX_CANDIDATES];
    match rule {
        Rule::Plurality => {
            for (b, w) in ballots {
                if let Some(c) = b.top_in(set) {
                    s[c as usize] += w;
                }
            }
        }
        Rule::Approval => {
            for (b, w) in ballots {
                if let Ballot::Approval(a) = b {
                    for c in members(a & set) {
                        s[c as usize] += w;
                    }
                }
            }
        }
        Rule::Veto => {
            let mut total = 0;
            let mut veto = [0u64; MAX_CANDIDATES];
            for (b, w) in ballots {
                if let Ballot::Order(o) = b {
                    if let Some(&c) = o.iter().rev().find(|&&c| contains(set, c)) {
                        veto[c as usize] += w;
                        total += w;
                    }
                }
            }
            for c in members(set) {
                s[c as usize] = total - veto[c as usize];
            }
        }
        Rule::Borda => {
            let n = set.count_ones() as u64;
            for (b, w) in ballots {
                if let Ballot::Order(o) = b {
                    let mut pos = 0;
                    for &c in o {
                        if contains(set, c) {
                            s[c as usize] += (n - 1 - pos) * w;
                            pos += 1;
                        }
                    }
                }
            }
        }
        _ => {}
    }
    s
}

/// Pairwise margins among the members of `set`: returns the members in
/// order and a row-major matrix indexed by position in that list.
pub(crate) fn margins_raw(set: CandSet, ballots: &[Weighted]) -> (Vec<Cand>, Vec<i64>) {
    let list: Vec<Cand> = members(set).collect();
    let n = list.len();
    let mut pos = [usize::MAX; MAX_CANDIDATES];
    for (i, &c) in list.iter().enumerate() {
        pos[c as usize] = i;
    }
    let mut m = vec![0i64; n * n];
    let mut seq = Vec::with_capacity(n);
    for (b, w) in ballots {
        if let Ballot::Order(o) = b {
            seq.clear();
            seq.extend(o.iter().map(|&c| pos[c as usize]).filter(|&i| i != usize::MAX));
            let w = *w as i64;
            for i in 0..seq.len() {
                for j in i + 1..seq.len() {
                    m[seq[i] * n + seq[j]] += w;
                    m[seq[j] * n + seq[i]] -= w;
                }
            }
        }
    }
    (list, m)
}

fn condorcet_raw(set: CandSet, ballots: &[Weighted]) -> CandSet {
    if ballots.is_empty() {
        return 0;
    }
    if set.count_ones() == 1 {
        return set;
    }
    let (list, m) = margins_raw(set, ballots);
    let n = list.len();
    for a in 0..n {
        if (0..n).all(|b| b == a || m[a * n + b] > 0) {
            return bit(list[a]);
        }
    }
    0
}

pub fn score(rule: Rule, set: CandSet, ballots: &[Weighted], c: Cand) -> Result<u64> {
    if !rule.is_score_rule() {
        return Err(Error::UnsupportedRule(format!("{} has no score", rule.id())));
    }
    if !contains(set, c) {
        return malformed("candidate not in the election");
    }
    check_ballots(rule, set, ballots)?;
    Ok(scores_raw(rule, set, ballots)[c as usize])
}

pub fn pairwise_margin(set: CandSet, ballots: &[Weighted], c: Cand, d: Cand) -> Result<i64> {
    if c == d || !contains(set, c) || !contains(set, d) {
        return malformed("margin needs two distinct candidates");
    }
    let mut m = 0i64;
    for (i, (b, w)) in ballots.iter().enumerate() {
        match b {
            Ballot::Order(_) => {
                if b.prefers(c, d) {
                    m += *w as i64;
                } else {
                    m -= *w as i64;
                }
            }
            Ballot::Approval(_) => return Err(Error::UnsupportedRule("margin of approval ballots".into())),
            Ballot::Blank => return Err(Error::UnresolvedManipulator(i)),
        }
    }
    Ok(m)
}

/// A sorted, validated candidate name list with name-based helpers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidates {
    names: Vec<String>,
}

impl Candidates {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Candidates> {
        let mut v: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        if v.len() > MAX_CANDIDATES {
            return malformed(format!("at most {MAX_CANDIDATES} candidates are supported"));
        }
        if let Some(bad) = v.iter().find(|n| !valid_name(n)) {
            return malformed(format!("invalid candidate name {bad:?}"));
        }
        v.sort();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return malformed("duplicate candidate name");
        }
        Ok(Candidates { names: v })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn all(&self) -> CandSet {
        full_set(self.names.len())
    }

    pub fn index(&self, name: &str) -> Result<Cand> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .map(|i| i as Cand)
            .or_else(|_| malformed(format!("unknown candidate {name:?}")))
    }

    pub fn set(&self, names: &[&str]) -> Result<CandSet> {
        names.iter().try_fold(0, |acc, n| Ok(acc | bit(self.index(n)?)))
    }

    pub fn order(&self, names: &[&str]) -> Result<Ballot> {
        Ok(Ballot::Order(names.iter().map(|n| self.index(n)).collect::<Result<_>>()?))
    }

    pub fn approval(&self, names: &[&str]) -> Result<Ballot> {
        Ok(Ballot::Approval(self.set(names)?))
    }

    pub fn name_list(&self, set: CandSet) -> Vec<&str> {
        members(set).map(|c| self.names[c as usize].as_str()).collect()
    }
}
