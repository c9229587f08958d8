//! Winner rules that read a boolean formula out of a candidate name and
//! use the shape of the election to pick a truth assignment.
//!
//! Every input outside the expected pattern gets a fixed fallback answer,
//! so the rules are total.

use crate::election::{bit, contains, members, Cand, CandSet, Rule};
use crate::formula::Formula;
use std::collections::BTreeMap;

pub const LEAD: &str = ",";
pub const PV_EPS: &str = ",";
pub const PV_BLOCK: &str = "z";
pub const REV_EPS: &str = "eps";
pub const REV_EPS2: &str = "eps2";

type Projected = (Vec<Cand>, u64);

pub(crate) fn winners(rule: Rule, names: &[String], set: CandSet, ballots: &[Projected]) -> CandSet {
    match rule {
        Rule::FormulaAc => formula_ac(names, set, ballots),
        Rule::FormulaPv => formula_pv(names, set, ballots),
        Rule::FormulaRev => formula_rev(names, set, ballots),
        _ => 0,
    }
}

pub fn bin(value: usize, width: usize) -> String {
    (0..width).rev().map(|i| if value >> i & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn bit_width(n: usize) -> usize {
    (usize::BITS - n.leading_zeros()).max(1) as usize
}

pub fn ac_formula_name(constructive: bool, voter_coded: bool, f: &Formula) -> String {
    format!(
        "{LEAD}{}{}{}",
        if constructive { 'C' } else { 'D' },
        if voter_coded { 'V' } else { 'C' },
        f.encode()
    )
}

pub fn ac_anchor_name(fname: &str, j: usize, l: usize) -> String {
    format!("{fname}a{}", bin(j, bit_width(l)))
}

pub fn ac_pair_name(fname: &str, i: usize, b: bool, l: usize) -> String {
    format!("{fname}{}{}", bin(i, bit_width(l)), b as u8)
}

pub fn pv_formula_name(f: &Formula) -> String {
    format!("{LEAD}P{}", f.encode())
}

pub fn pv_dummy_name(j: usize) -> String {
    format!("d{j}")
}

pub fn rev_coding_name(f: &Formula) -> String {
    format!("<coding,{}>", f.encode())
}

pub fn rev_dummy_name(j: usize) -> String {
    format!("<dummy,{j}>")
}

pub fn rev_q_name(round: u8, i: usize, b: bool) -> String {
    format!("<q{round},{i},{}>", b as u8)
}

/// Lexicographic rank of `seq` among the permutations of `sorted`, or None
/// when `seq` is not such a permutation. Saturates for huge ranks.
pub fn perm_rank(seq: &[Cand], sorted: &[Cand]) -> Option<u128> {
    if seq.len() != sorted.len() {
        return None;
    }
    let mut remaining: Vec<Cand> = sorted.to_vec();
    let mut rank: u128 = 0;
    for &c in seq {
        let i = remaining.iter().position(|&x| x == c)?;
        rank = rank.saturating_mul(remaining.len() as u128).saturating_add(i as u128);
        remaining.remove(i);
    }
    Some(rank)
}

/// The permutation of `sorted` with lexicographic rank `r`.
pub fn perm_unrank(mut r: u128, sorted: &[Cand]) -> Vec<Cand> {
    let n = sorted.len();
    let mut fact = vec![1u128; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1].saturating_mul(i as u128);
    }
    let mut remaining = sorted.to_vec();
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let idx = (r / fact[i]).min(remaining.len() as u128 - 1) as usize;
        r -= idx as u128 * fact[i];
        out.push(remaining.remove(idx));
    }
    out
}

fn lookup(names: &[String], name: &str) -> Option<Cand> {
    names.binary_search_by(|n| n.as_str().cmp(name)).ok().map(|i| i as Cand)
}

fn position(ballot: &[Cand], c: Cand) -> usize {
    ballot.iter().position(|&x| x == c).unwrap_or(usize::MAX)
}

fn even_split_vars(f: &Formula, parts: u32) -> Option<usize> {
    let z = f.max_var();
    (f.contiguous_vars() && z % parts == 0).then_some((z / parts) as usize)
}

fn formula_ac(names: &[String], set: CandSet, ballots: &[Projected]) -> CandSet {
    let list: Vec<Cand> = members(set).collect();
    let f = list[0];
    let fname = names[f as usize].as_str();
    let fb = fname.as_bytes();
    if fb.len() < 4 || fb[0] != b',' {
        return 0;
    }
    let constructive = match fb[1] {
        b'C' => true,
        b'D' => false,
        _ => return 0,
    };
    let voter_coded = match fb[2] {
        b'C' => false,
        b'V' => true,
        _ => return 0,
    };
    let Some(psi) = Formula::decode(&fname[3..]) else {
        return 0;
    };
    let (accept, reject) = if constructive { (set, 0) } else { (0, set) };
    let Some(l) = even_split_vars(&psi, 2) else {
        return reject;
    };
    let w = bit_width(l);
    let mut anchors = vec![None; l + 1];
    let mut pairs: Vec<Option<bool>> = vec![None; l + 1];
    for &c in &list[1..] {
        let Some(suffix) = names[c as usize].strip_prefix(fname) else {
            return reject;
        };
        let sb = suffix.as_bytes();
        if let Some(digits) = suffix.strip_prefix('a') {
            if digits.len() != w || !digits.bytes().all(|d| d == b'0' || d == b'1') {
                return reject;
            }
            let j = usize::from_str_radix(digits, 2).unwrap_or(0);
            if j == 0 || j > l || anchors[j].is_some() {
                return reject;
            }
            anchors[j] = Some(c);
        } else {
            if sb.len() != w + 1 || !sb.iter().all(|&d| d == b'0' || d == b'1') {
                return reject;
            }
            let i = usize::from_str_radix(&suffix[..w], 2).unwrap_or(0);
            if i == 0 || i > l || pairs[i].is_some() {
                return reject;
            }
            pairs[i] = Some(sb[w] == b'1');
        }
    }
    if anchors[1..].iter().any(Option::is_none) {
        return reject;
    }
    let mut x = vec![false; 2 * l];
    let manip: &[Cand] = if voter_coded {
        if pairs[1..].iter().any(Option::is_some) {
            return reject;
        }
        let heavy: Vec<&Projected> = ballots.iter().filter(|(_, w)| *w == 2).collect();
        let light: Vec<&Projected> = ballots.iter().filter(|(_, w)| *w == 1).collect();
        if heavy.len() != 1 || light.len() != l || heavy.len() + light.len() != ballots.len() {
            return reject;
        }
        let mut seen = vec![false; l + 1];
        for (b, _) in light {
            let Some(r) = perm_rank(b, &list) else {
                return reject;
            };
            if r >= 2 * l as u128 {
                return reject;
            }
            let i = (r / 2) as usize + 1;
            if seen[i] {
                return reject;
            }
            seen[i] = true;
            x[i - 1] = r % 2 == 1;
        }
        &heavy[0].0
    } else {
        if pairs[1..].iter().any(Option::is_none) || ballots.len() != 1 {
            return reject;
        }
        for i in 1..=l {
            x[i - 1] = pairs[i] == Some(true);
        }
        &ballots[0].0
    };
    let fpos = position(manip, f);
    for j in 1..=l {
        x[l + j - 1] = position(manip, anchors[j].unwrap()) < fpos;
    }
    if psi.eval(&x) {
        accept
    } else {
        reject
    }
}

/// Splits a ballot multiset into the values that occur at least twice and
/// the single value that occurs an odd number of times. Requires every
/// count to be 1, 2 or 3 and exactly one odd count.
fn doubled_and_extra(ballots: &[Projected]) -> Option<(Vec<Vec<Cand>>, Vec<Cand>)> {
    let mut groups: BTreeMap<&[Cand], usize> = BTreeMap::new();
    for (b, _) in ballots {
        *groups.entry(b.as_slice()).or_default() += 1;
    }
    let odd: Vec<&[Cand]> = groups.iter().filter(|(_, &n)| n % 2 == 1).map(|(b, _)| *b).collect();
    if odd.len() != 1 || groups.values().any(|&n| n > 3) {
        return None;
    }
    let doubled = groups.iter().filter(|(_, &n)| n >= 2).map(|(b, _)| b.to_vec()).collect();
    Some((doubled, odd[0].to_vec()))
}

fn has_odd_group(ballots: &[Projected]) -> bool {
    let mut groups: BTreeMap<&[Cand], usize> = BTreeMap::new();
    for (b, _) in ballots {
        *groups.entry(b.as_slice()).or_default() += 1;
    }
    groups.values().any(|n| n % 2 == 1)
}

/// Reads one bit per pair index from doubled canonical votes.
fn pair_bits(doubled: &[Vec<Cand>], k: usize, rank: impl Fn(&[Cand]) -> Option<u128>) -> Option<Vec<bool>> {
    if doubled.len() != k {
        return None;
    }
    let mut bits = vec![None; k];
    for b in doubled {
        let r = rank(b)?;
        if r >= 2 * k as u128 {
            return None;
        }
        let i = (r / 2) as usize;
        if bits[i].is_some() {
            return None;
        }
        bits[i] = Some(r % 2 == 1);
    }
    bits.into_iter().collect()
}

fn formula_pv(names: &[String], set: CandSet, ballots: &[Projected]) -> CandSet {
    let eps = lookup(names, PV_EPS).filter(|&c| contains(set, c));
    let block = lookup(names, PV_BLOCK).filter(|&c| contains(set, c));
    let Some(eps) = eps else {
        return match block {
            Some(z) => bit(z),
            None => set,
        };
    };
    let list: Vec<Cand> = members(set).collect();
    if list.len() < 2 {
        return 0;
    }
    let f = list[1];
    let Some(psi) = names[f as usize].strip_prefix(",P").and_then(Formula::decode) else {
        return 0;
    };
    let Some(k) = even_split_vars(&psi, 2) else {
        return 0;
    };
    let Some(z) = block else {
        return 0;
    };
    let mut dummies = Vec::with_capacity(k);
    for j in 1..=k {
        match lookup(names, &pv_dummy_name(j)).filter(|&c| contains(set, c)) {
            Some(d) => dummies.push(d),
            None => return 0,
        }
    }
    if list.len() != k + 3 {
        return 0;
    }
    let n = ballots.len();
    if n == 2 * k + 1 {
        let Some((doubled, extra)) = doubled_and_extra(ballots) else {
            return 0;
        };
        let Some(mut x) = pair_bits(&doubled, k, |b| perm_rank(b, &list)) else {
            return 0;
        };
        let epos = position(&extra, eps);
        x.extend(dummies.iter().map(|&d| position(&extra, d) < epos));
        if psi.eval(&x) {
            bit(f)
        } else {
            0
        }
    } else if n == 2 * k && has_odd_group(ballots) {
        bit(z)
    } else {
        0
    }
}

struct RevLayout {
    psi: Formula,
    k: usize,
    coding: Cand,
    eps2: Cand,
    /// ε′, the coding candidate and the dummies, sorted.
    a: Vec<Cand>,
    /// `a` without ε′.
    a_bits: Vec<Cand>,
    q: [Vec<[Option<Cand>; 2]>; 2],
}

fn rev_layout(names: &[String], set: CandSet) -> Option<RevLayout> {
    let mut coding = None;
    for c in members(set) {
        if names[c as usize].starts_with("<coding,") {
            if coding.is_some() {
                return None;
            }
            coding = Some(c);
        }
    }
    let coding = coding?;
    let body = names[coding as usize].strip_prefix("<coding,")?.strip_suffix('>')?;
    let psi = Formula::decode(body)?;
    let k = even_split_vars(&psi, 3)?;
    let eps2 = lookup(names, REV_EPS2)?;
    let mut a = vec![eps2, coding];
    for j in 1..k {
        a.push(lookup(names, &rev_dummy_name(j))?);
    }
    a.sort();
    let a_bits: Vec<Cand> = a.iter().copied().filter(|&c| c != eps2).collect();
    let q = [1u8, 2].map(|round| {
        (1..=k)
            .map(|i| [false, true].map(|b| lookup(names, &rev_q_name(round, i, b))))
            .collect::<Vec<_>>()
    });
    Some(RevLayout { psi, k, coding, eps2, a, a_bits, q })
}

impl RevLayout {
    fn a_set(&self) -> CandSet {
        self.a.iter().fold(0, |acc, &c| acc | bit(c))
    }

    /// Rank r when the ballot is perm_r(A) followed by the rest in order.
    fn canonical_rank(&self, ballot: &[Cand]) -> Option<u128> {
        let n = self.a.len();
        if ballot.len() < n || !ballot[n..].windows(2).all(|w| w[0] < w[1]) {
            return None;
        }
        perm_rank(&ballot[..n], &self.a)
    }

    fn extra_bits(&self, extra: &[Cand]) -> Vec<bool> {
        let epos = position(extra, self.eps2);
        self.a_bits.iter().take(self.k).map(|&c| position(extra, c) < epos).collect()
    }
}

fn formula_rev(names: &[String], set: CandSet, ballots: &[Projected]) -> CandSet {
    let Some(lay) = rev_layout(names, set) else {
        return 0;
    };
    let k = lay.k;
    let has_e = lookup(names, REV_EPS).is_some_and(|c| contains(set, c));
    let has_e2 = contains(set, lay.eps2);
    let a_set = lay.a_set();
    if a_set & set != a_set {
        return 0;
    }
    if has_e && has_e2 {
        let mut full = a_set | bit(lookup(names, REV_EPS).unwrap());
        for round in &lay.q {
            for pair in round {
                for c in pair {
                    match c {
                        Some(c) => full |= bit(*c),
                        None => return 0,
                    }
                }
            }
        }
        if full != set {
            return 0;
        }
        let n = ballots.len();
        if n == 2 * k + 1 {
            let Some((doubled, extra)) = doubled_and_extra(ballots) else {
                return 0;
            };
            let Some(second) = pair_bits(&doubled, k, |b| lay.canonical_rank(b)) else {
                return 0;
            };
            let first = lay.extra_bits(&extra);
            let mut out = a_set;
            for i in 0..k {
                out |= bit(lay.q[0][i][first[i] as usize].unwrap());
                out |= bit(lay.q[1][i][second[i] as usize].unwrap());
            }
            out
        } else if n == 2 * k && has_odd_group(ballots) {
            set
        } else {
            0
        }
    } else if !has_e && has_e2 {
        let mut rest = set & !a_set;
        let mut x = vec![false; 3 * k];
        for (round, pairs) in lay.q.iter().enumerate() {
            for (i, pair) in pairs.iter().enumerate() {
                let present: Vec<usize> = (0..2).filter(|&b| pair[b].is_some_and(|c| contains(set, c))).collect();
                if present.len() != 1 {
                    return 0;
                }
                x[round * k + i] = present[0] == 1;
                rest &= !bit(pair[present[0]].unwrap());
            }
        }
        if rest != 0 || ballots.len() != 4 * k + 1 {
            return 0;
        }
        let mut counts = vec![0usize; 2 * k];
        let mut others = Vec::new();
        for (b, _) in ballots {
            match lay.canonical_rank(b) {
                Some(r) if r < 2 * k as u128 => counts[r as usize] += 1,
                _ => others.push(b),
            }
        }
        if counts.iter().any(|&c| !(2..=3).contains(&c)) {
            return 0;
        }
        let triples: Vec<usize> = (0..2 * k).filter(|&r| counts[r] == 3).collect();
        let extra: Vec<Cand> = match (triples.len(), others.len()) {
            (0, 1) => others[0].clone(),
            (1, 0) => ballots.iter().find(|(b, _)| lay.canonical_rank(b) == Some(triples[0] as u128)).unwrap().0.clone(),
            _ => return 0,
        };
        for (i, v) in lay.extra_bits(&extra).into_iter().enumerate() {
            x[2 * k + i] = v;
        }
        if lay.psi.eval(&x) {
            bit(lay.coding)
        } else {
            0
        }
    } else {
        0
    }
}
