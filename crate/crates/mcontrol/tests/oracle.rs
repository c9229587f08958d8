mod common;

use mcontrol::control::legal_actions;
use mcontrol::oracle::{ballot_space, count_states, enumerate_profiles, solve_oracle, DEFAULT_BUDGET};
use mcontrol::reductions::{has_partition, partition_to_borda_ccav_mf, PartitionInstance};
use mcontrol::scenario::goal_holds;
use mcontrol::{Ballot, ControlType, Error, Instance, Mode, Rule, Scenario, Voter};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn with_manipulators(rule: Rule, n: usize, m: usize) -> Instance {
    let names = common::names(n);
    let all = (1u64 << n) - 1;
    let mut voters = vec![Voter::fixed(ballot_space(rule, all)[0].clone())];
    voters.extend((0..m).map(|_| Voter::manipulator()));
    Instance {
        rule,
        names,
        candidates: all,
        spoilers: 0,
        p: 0,
        ctype: ControlType::parse("CCDV").unwrap(),
        limit: 0,
        voters,
        scenario: Scenario::new(Mode::MPlus),
    }
}

#[test]
fn profile_space_sizes() {
    let len = |rule, n, m| enumerate_profiles(&with_manipulators(rule, n, m), DEFAULT_BUDGET).unwrap().len();
    assert_eq!(len(Rule::Plurality, 3, 1), 6);
    assert_eq!(len(Rule::Approval, 2, 2), 16);
    assert_eq!(len(Rule::Plurality, 3, 2), 36);
    assert_eq!(len(Rule::Borda, 3, 0), 1);
}

#[test]
fn budget_error_reports_the_count() {
    let i = with_manipulators(Rule::Plurality, 3, 2);
    let states = count_states(&i);
    assert!(solve_oracle(&i, states).is_ok());
    assert_eq!(solve_oracle(&i, states - 1), Err(Error::Budget { states, budget: states - 1 }));
}

#[test]
fn borda_partition_images() {
    for (w, want) in [(vec![1, 3], true), (vec![1, 1, 2], false), (vec![1, 1], false)] {
        let src = PartitionInstance::new(w.clone()).unwrap();
        assert_eq!(has_partition(&src).unwrap(), !want);
        let img = partition_to_borda_ccav_mf(&src).unwrap();
        assert_eq!(solve_oracle(&img, DEFAULT_BUDGET).unwrap().answer, want, "{w:?}");
    }
}

#[test]
fn zero_manipulator_ccdv_is_plain_control() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let mut i = common::random_instance(&mut rng, Rule::Plurality, ControlType::parse("CCDV").unwrap(), Mode::CF);
        i.voters.retain(|v| !v.manipulator);
        let plain = legal_actions(&i).iter().any(|a| goal_holds(&i, a, &[], None).unwrap());
        for mode in Mode::ALL {
            i.scenario = Scenario::new(mode);
            assert_eq!(solve_oracle(&i, DEFAULT_BUDGET).unwrap().answer, plain);
        }
    }
}

const RULES: [Rule; 5] = [Rule::Plurality, Rule::Approval, Rule::Veto, Rule::Borda, Rule::Condorcet];

fn case() -> impl Strategy<Value = (u64, Rule, ControlType)> {
    (any::<u64>(), prop::sample::select(RULES.to_vec()), prop::sample::select(ControlType::ALL.to_vec()))
}

/// Applies `perm` to candidate indices everywhere in the instance.
fn relabel(i: &Instance, perm: &[u8]) -> Instance {
    let set = |s: u64| (0..64u8).filter(|&c| s >> c & 1 == 1).fold(0u64, |a, c| a | 1 << perm[c as usize]);
    let mut out = i.clone();
    out.candidates = set(i.candidates);
    out.spoilers = set(i.spoilers);
    out.p = perm[i.p as usize];
    for v in &mut out.voters {
        v.ballot = match &v.ballot {
            Ballot::Order(o) => Ballot::Order(o.iter().map(|&c| perm[c as usize]).collect()),
            Ballot::Approval(s) => Ballot::Approval(set(*s)),
            Ballot::Blank => Ballot::Blank,
        };
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn robust_answers_imply_cooperative_ones((seed, rule, ctype) in case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut i = common::random_instance(&mut rng, rule, ctype, Mode::MPlus);
        let plus = solve_oracle(&i, DEFAULT_BUDGET).unwrap().answer;
        for mode in [Mode::CF, Mode::MF] {
            i.scenario = Scenario::new(mode);
            prop_assert!(!solve_oracle(&i, DEFAULT_BUDGET).unwrap().answer || plus);
        }
    }

    #[test]
    fn answers_ignore_the_labels_of_rivals((seed, rule, ctype) in case(), mode in prop::sample::select(Mode::ALL.to_vec())) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = common::random_instance(&mut rng, rule, ctype, mode);
        let n = i.names.len() as u8;
        let mut perm: Vec<u8> = (0..n).collect();
        perm.rotate_left(1 % n as usize);
        // Keep p in place: swap it back to where it started.
        let at = perm.iter().position(|&c| c == i.p).unwrap();
        perm.swap(at, i.p as usize);
        let j = relabel(&i, &perm);
        prop_assert_eq!(
            solve_oracle(&i, DEFAULT_BUDGET).unwrap().answer,
            solve_oracle(&j, DEFAULT_BUDGET).unwrap().answer
        );
    }

    #[test]
    fn revoting_the_same_ballots_changes_nothing((seed, rule) in (any::<u64>(), prop::sample::select(RULES.to_vec())), k in 0..12usize) {
        let parts: Vec<ControlType> = ControlType::ALL.into_iter().filter(|t| t.is_partition()).collect();
        let ctype = parts[k % parts.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = common::random_instance(&mut rng, rule, ctype, Mode::MPlus);
        let mut r = i.clone();
        r.scenario = Scenario::revoting(Mode::MPlus);
        let space = ballot_space(rule, i.domain());
        let profile: Vec<Ballot> = i.manipulators().iter().map(|&v| space[(seed as usize).wrapping_add(v) % space.len()].clone()).collect();
        for a in legal_actions(&i) {
            prop_assert_eq!(
                goal_holds(&i, &a, &profile, None).unwrap(),
                goal_holds(&r, &a, &profile, Some(&profile)).unwrap()
            );
        }
    }
}
