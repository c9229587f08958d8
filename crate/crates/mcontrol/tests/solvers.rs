mod common;

use mcontrol::oracle::{solve_oracle, DEFAULT_BUDGET};
use mcontrol::solvers::{registry, solve_direct, Tag};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn differential(cases_per_entry: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for (rule, ctype, sc, _) in registry() {
        for _ in 0..cases_per_entry {
            let inst = common::random_instance(&mut rng, rule, ctype, sc.mode);
            let direct = solve_direct(&inst).expect("direct solver");
            let oracle = solve_oracle(&inst, DEFAULT_BUDGET).expect("oracle");
            if direct.answer != oracle.answer {
                failures.push(format!(
                    "{} {} {}: direct {} oracle {}\n{:?}",
                    rule.id(),
                    ctype.code(),
                    sc.mode.id(),
                    direct.answer,
                    oracle.answer,
                    inst
                ));
                break;
            }
        }
    }
    assert!(failures.is_empty(), "{} mismatches:\n{}", failures.len(), failures.join("\n"));
}

#[test]
fn direct_solvers_agree_with_oracle() {
    differential(400, 7);
}

#[test]
fn registry_tags() {
    let reg = registry();
    assert!(reg.iter().any(|e| e.3 == Tag::NpSearch));
    assert!(reg.iter().all(|e| !e.2.revoting));
}

#[test]
fn plurality_partition_witnesses_replay() {
    use mcontrol::scenario::goal_holds;
    use mcontrol::{ControlType, Mode, Rule};
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ctype = ControlType::parse("CCPV-TE").unwrap();
    let mut seen = 0;
    for _ in 0..500 {
        let inst = common::random_instance(&mut rng, Rule::Plurality, ctype, Mode::MPlus);
        let out = solve_direct(&inst).unwrap();
        if let Some(t) = out.trace {
            assert!(out.answer);
            let profile = t.profile.unwrap();
            assert!(goal_holds(&inst, &t.action.unwrap(), &profile, None).unwrap());
            seen += 1;
        }
    }
    assert!(seen > 50);
}

mod fixtures {
    use super::common::order;
    use mcontrol::oracle::{solve_oracle, DEFAULT_BUDGET};
    use mcontrol::solvers::{base_control, solve_direct};
    use mcontrol::{Ballot, ControlType, Instance, Mode, Rule, Scenario, Voter};

    const NAMES: [&str; 3] = ["a", "b", "p"];

    fn names() -> Vec<String> {
        NAMES.iter().map(|s| s.to_string()).collect()
    }

    fn inst(rule: Rule, code: &str, mode: Mode, limit: usize, voters: Vec<Voter>) -> Instance {
        Instance {
            rule,
            names: names(),
            candidates: 0b111,
            spoilers: 0,
            p: 2,
            ctype: ControlType::parse(code).unwrap(),
            limit,
            voters,
            scenario: Scenario::new(mode),
        }
    }

    fn approve(who: &[&str]) -> Voter {
        let set = who.iter().fold(0u64, |s, n| s | 1 << NAMES.iter().position(|x| x == n).unwrap());
        Voter::fixed(Ballot::Approval(set))
    }

    fn ranks(o: &[&str]) -> Voter {
        Voter::fixed(order(o, &names()))
    }

    fn times(n: usize, v: Voter) -> Vec<Voter> {
        vec![v; n]
    }

    /// Checks the direct answer (when the case has a solver) and the oracle.
    fn expect(i: &Instance, want: bool) {
        if let Ok(d) = solve_direct(i) {
            assert_eq!(d.answer, want, "direct");
        }
        assert_eq!(solve_oracle(i, DEFAULT_BUDGET).unwrap().answer, want, "oracle");
    }

    fn approval_ccac(p: usize, b: usize, m: usize, mode: Mode) -> Instance {
        // a is a spoiler nobody approves.
        let mut voters = times(p, approve(&["p"]));
        voters.extend(times(b, approve(&["b"])));
        voters.extend(times(m, Voter::manipulator()));
        let mut i = inst(Rule::Approval, "CCAC", mode, 1, voters);
        i.candidates = 0b110;
        i.spoilers = 0b001;
        i
    }

    #[test]
    fn approval_add_candidates() {
        expect(&approval_ccac(3, 5, 2, Mode::MPlus), true);
        expect(&approval_ccac(3, 5, 1, Mode::MPlus), false);
        // Manipulators can lift b past p and no added candidate hurts b.
        expect(&approval_ccac(5, 3, 3, Mode::CF), false);
        expect(&approval_ccac(5, 3, 2, Mode::CF), true);
    }

    #[test]
    fn condorcet_deletions() {
        let pb = || times(3, ranks(&["p", "b", "a"]));
        expect(&inst(Rule::Condorcet, "DCDV", Mode::CF, 3, pb()), true);
        expect(&inst(Rule::Condorcet, "DCDV", Mode::CF, 1, pb()), false);
        // A Condorcet winner stays one in every subset containing it.
        expect(&inst(Rule::Condorcet, "DCDC", Mode::MPlus, 1, pb()), false);
    }

    #[test]
    fn heavy_veto_manipulator() {
        let voters = vec![ranks(&["p", "a", "b"]), Voter::manipulator().weighted(10)];
        expect(&inst(Rule::Veto, "CCDV", Mode::CF, 0, voters.clone()), false);
        expect(&inst(Rule::Veto, "CCDV", Mode::MF, 0, voters.clone()), false);
        expect(&inst(Rule::Veto, "CCDV", Mode::MPlus, 0, voters), true);
    }

    #[test]
    fn base_control_cases() {
        let mut v = times(2, ranks(&["a", "b", "p"]));
        v.push(ranks(&["p", "a", "b"]));
        let i = inst(Rule::Plurality, "CCDV", Mode::MPlus, 1, v);
        assert!(base_control(&i).unwrap().answer);

        let mut v = times(2, ranks(&["p", "b", "a"]));
        v.push(ranks(&["b", "p", "a"]).unregistered());
        let i = inst(Rule::Condorcet, "DCAV", Mode::MPlus, 1, v);
        assert!(!base_control(&i).unwrap().answer);

        let mut v = times(2, approve(&["p"]));
        v.extend(times(3, approve(&["b"])));
        let i = inst(Rule::Approval, "CCDC", Mode::MPlus, 1, v);
        assert!(base_control(&i).unwrap().answer);
        let i = inst(Rule::Approval, "CCDC", Mode::MPlus, 0, i.voters.clone());
        assert!(!base_control(&i).unwrap().answer);
    }

    #[test]
    fn borda_cf_adversary_breaks_ties() {
        // Adding the p>b>a voter ties all three; the manipulator then lifts a rival.
        let v = vec![
            ranks(&["a", "b", "p"]).weighted(2),
            Voter::manipulator(),
            ranks(&["p", "b", "a"]).weighted(2).unregistered(),
        ];
        expect(&inst(Rule::Borda, "CCAV", Mode::CF, 1, v.clone()), false);
        expect(&inst(Rule::Borda, "CCAV", Mode::MPlus, 1, v), true);
    }
}
