use mcontrol::election::{pairwise_margin, score, winners, Candidates};
use mcontrol::oracle::ballot_space;
use mcontrol::{Ballot, Error, Rule};
use proptest::prelude::*;

fn abp() -> Candidates {
    Candidates::new(&["a", "b", "p"]).unwrap()
}

fn names(c: &Candidates, set: u64) -> Vec<&str> {
    c.name_list(set)
}

#[test]
fn single_plurality_voter_decides() {
    let c = abp();
    let b = c.order(&["p", "a", "b"]).unwrap();
    let w = winners(Rule::Plurality, c.names(), c.all(), &[(&b, 1)]).unwrap();
    assert_eq!(names(&c, w), ["p"]);
}

#[test]
fn borda_two_voters_tie_the_rivals() {
    let c = abp();
    let x = c.order(&["a", "b", "p"]).unwrap();
    let y = c.order(&["b", "a", "p"]).unwrap();
    let ballots = [(&x, 1), (&y, 1)];
    let s = |n| score(Rule::Borda, c.all(), &ballots, c.index(n).unwrap()).unwrap();
    assert_eq!((s("p"), s("a"), s("b")), (0, 3, 3));
    let w = winners(Rule::Borda, c.names(), c.all(), &ballots).unwrap();
    assert_eq!(names(&c, w), ["a", "b"]);
}

#[test]
fn condorcet_cycle_has_no_winner() {
    let c = Candidates::new(&["a", "b", "c"]).unwrap();
    let bs: Vec<Ballot> =
        [["a", "b", "c"], ["b", "c", "a"], ["c", "a", "b"]].iter().map(|o| c.order(o).unwrap()).collect();
    let ballots: Vec<(&Ballot, u64)> = bs.iter().map(|b| (b, 1)).collect();
    assert_eq!(winners(Rule::Condorcet, c.names(), c.all(), &ballots).unwrap(), 0);
    let (a, b) = (c.index("a").unwrap(), c.index("b").unwrap());
    assert_eq!(pairwise_margin(c.all(), &ballots, a, b).unwrap(), 1);
}

#[test]
fn empty_electorates() {
    let c = abp();
    for rule in [Rule::Plurality, Rule::Approval, Rule::Veto, Rule::Borda] {
        assert_eq!(winners(rule, c.names(), c.all(), &[]).unwrap(), c.all(), "{}", rule.id());
    }
    assert_eq!(winners(Rule::Condorcet, c.names(), c.all(), &[]).unwrap(), 0);
}

#[test]
fn veto_approval_and_weighted_borda_scores() {
    let c = abp();
    let v = c.order(&["a", "b", "p"]).unwrap();
    let s = |rule, ballots: &[(&Ballot, u64)], n| score(rule, c.all(), ballots, c.index(n).unwrap()).unwrap();
    assert_eq!((s(Rule::Veto, &[(&v, 2)], "a"), s(Rule::Veto, &[(&v, 2)], "b"), s(Rule::Veto, &[(&v, 2)], "p")), (2, 2, 0));

    let x = c.approval(&["p", "a"]).unwrap();
    let y = c.approval(&["p"]).unwrap();
    let ap = [(&x, 1), (&y, 1)];
    assert_eq!((s(Rule::Approval, &ap, "p"), s(Rule::Approval, &ap, "a"), s(Rule::Approval, &ap, "b")), (2, 1, 0));

    // A p>a>b voter of weight 3K-1 at K=1.
    let bo = c.order(&["p", "a", "b"]).unwrap();
    let bw = [(&bo, 2)];
    assert_eq!((s(Rule::Borda, &bw, "p"), s(Rule::Borda, &bw, "a"), s(Rule::Borda, &bw, "b")), (4, 2, 0));
}

#[test]
fn pairwise_margins() {
    let c = Candidates::new(&["b", "p"]).unwrap();
    let pb = c.order(&["p", "b"]).unwrap();
    let bp = c.order(&["b", "p"]).unwrap();
    let (p, b) = (c.index("p").unwrap(), c.index("b").unwrap());
    assert_eq!(pairwise_margin(c.all(), &[(&pb, 1), (&pb, 1), (&pb, 1)], p, b).unwrap(), 3);
    assert_eq!(pairwise_margin(c.all(), &[(&pb, 1), (&bp, 1)], p, b).unwrap(), 0);
    let ap = Ballot::Approval(c.all());
    assert!(pairwise_margin(c.all(), &[(&ap, 1)], p, b).is_err());
}

#[test]
fn errors() {
    let c = abp();
    assert!(matches!(Rule::parse("copeland"), Err(Error::UnsupportedRule(_))));
    let short = c.order(&["p", "a"]).unwrap();
    assert!(matches!(winners(Rule::Plurality, c.names(), c.all(), &[(&short, 1)]), Err(Error::Malformed(_))));
    let ok = c.order(&["p", "a", "b"]).unwrap();
    assert!(matches!(score(Rule::Condorcet, c.all(), &[(&ok, 1)], 0), Err(Error::UnsupportedRule(_))));
    assert!(Candidates::new(&["a", "a"]).is_err());
    assert!(Candidates::new(&["a b"]).is_err());
}

const STANDARD: [Rule; 5] = [Rule::Plurality, Rule::Approval, Rule::Veto, Rule::Borda, Rule::Condorcet];

fn election_of(rules: &'static [Rule]) -> impl Strategy<Value = (Rule, usize, Vec<(usize, u64)>)> {
    (0..rules.len(), 1..=4usize).prop_flat_map(move |(r, n)| {
        let rule = rules[r];
        let k = ballot_space(rule, (1u64 << n) - 1).len();
        (Just(rule), Just(n), prop::collection::vec((0..k, 1..=3u64), 0..6))
    })
}

fn election() -> impl Strategy<Value = (Rule, usize, Vec<(usize, u64)>)> {
    election_of(&STANDARD)
}

fn materialize(rule: Rule, n: usize, picks: &[(usize, u64)]) -> (Candidates, Vec<(Ballot, u64)>) {
    let c = Candidates::new(&["a", "b", "c", "d"][..n]).unwrap();
    let space = ballot_space(rule, c.all());
    (c, picks.iter().map(|&(i, w)| (space[i].clone(), w)).collect())
}

fn refs(v: &[(Ballot, u64)]) -> Vec<(&Ballot, u64)> {
    v.iter().map(|(b, w)| (b, *w)).collect()
}

proptest! {
    #[test]
    fn score_winners_are_the_argmax((rule, n, picks) in election_of(&STANDARD[..4])) {
        let (c, bs) = materialize(rule, n, &picks);
        let r = refs(&bs);
        let w = winners(rule, c.names(), c.all(), &r).unwrap();
        let scores: Vec<u64> = (0..n as u8).map(|x| score(rule, c.all(), &r, x).unwrap()).collect();
        let max = *scores.iter().max().unwrap();
        let want = (0..n).filter(|&i| scores[i] == max).fold(0u64, |a, i| a | 1 << i);
        prop_assert_eq!(w, want);
        prop_assert!(w != 0);
    }

    #[test]
    fn condorcet_winner_beats_everyone((_, n, picks) in election_of(&[Rule::Condorcet])) {
        let (c, bs) = materialize(Rule::Condorcet, n, &picks);
        let r = refs(&bs);
        let w = winners(Rule::Condorcet, c.names(), c.all(), &r).unwrap();
        prop_assert!(w.count_ones() <= 1);
        if w != 0 {
            let x = w.trailing_zeros() as u8;
            for y in (0..n as u8).filter(|&y| y != x) {
                prop_assert!(pairwise_margin(c.all(), &r, x, y).unwrap() > 0);
            }
        }
    }

    #[test]
    fn anonymity_weight_splitting_and_duplication((rule, n, picks) in election(), rot in 0..6usize) {
        let (c, bs) = materialize(rule, n, &picks);
        let base = winners(rule, c.names(), c.all(), &refs(&bs)).unwrap();

        let mut turned = bs.clone();
        if !turned.is_empty() {
            let k = rot % turned.len();
            turned.rotate_left(k);
            turned.reverse();
        }
        prop_assert_eq!(winners(rule, c.names(), c.all(), &refs(&turned)).unwrap(), base);

        let split: Vec<(Ballot, u64)> =
            bs.iter().flat_map(|(b, w)| std::iter::repeat((b.clone(), 1)).take(*w as usize)).collect();
        prop_assert_eq!(winners(rule, c.names(), c.all(), &refs(&split)).unwrap(), base);

        let doubled: Vec<(Ballot, u64)> = bs.iter().chain(bs.iter()).cloned().collect();
        prop_assert_eq!(winners(rule, c.names(), c.all(), &refs(&doubled)).unwrap(), base);
    }
}
