use mcontrol::formula::{qbf_eval, three_block_family, two_block_family, Shape};
use mcontrol::oracle::{solve_oracle, DEFAULT_BUDGET};
use mcontrol::reductions::*;
use mcontrol::{ControlType, Mode, Tie};

fn shape(mode: Mode) -> Shape {
    if mode == Mode::CF {
        Shape::EA
    } else {
        Shape::AE
    }
}

#[test]
fn nonpartition_images_are_sound() {
    for f in two_block_family() {
        for code in NONPARTITION_TYPES {
            for mode in [Mode::CF, Mode::MF] {
                let inst = qbf2_to_nonpartition(&f, &[2, 2], ControlType::parse(code).unwrap(), mode).unwrap();
                let want = qbf_eval(&f, shape(mode), &[2, 2]).unwrap();
                let got = solve_oracle(&inst, DEFAULT_BUDGET).unwrap().answer;
                assert_eq!(got, want, "{code} {} {}", mode.id(), f.to_sexpr());
            }
        }
    }
}

#[test]
fn ccpv_images_are_sound() {
    for f in two_block_family() {
        for tie in [Tie::TE, Tie::TP] {
            for mode in [Mode::CF, Mode::MF] {
                let inst = qbf2_to_ccpv(&f, &[2, 2], tie, mode).unwrap();
                let want = qbf_eval(&f, shape(mode), &[2, 2]).unwrap();
                let got = solve_oracle(&inst, DEFAULT_BUDGET).unwrap().answer;
                assert_eq!(got, want, "{tie:?} {} {}", mode.id(), f.to_sexpr());
            }
        }
    }
}

#[test]
fn revoting_images_are_sound() {
    for f in three_block_family().into_iter().step_by(3) {
        let inst = qbf3_to_ccpv_tp_mf_revoting(&f, &[1, 1, 1]).unwrap();
        let want = qbf_eval(&f, Shape::AEA, &[1, 1, 1]).unwrap();
        let got = solve_oracle(&inst, DEFAULT_BUDGET).unwrap().answer;
        assert_eq!(got, want, "{}", f.to_sexpr());
    }
}

#[test]
fn partition_images_are_sound() {
    for t in 1..=3usize {
        let mut w = vec![1u64; t];
        loop {
            let src = PartitionInstance::new(w.clone()).unwrap();
            if src.total() % 2 == 0 {
                let inst = partition_to_borda_ccav_mf(&src).unwrap();
                let got = solve_oracle(&inst, DEFAULT_BUDGET).unwrap().answer;
                assert_eq!(got, !has_partition(&src).unwrap(), "{w:?}");
            }
            let Some(i) = w.iter().position(|&x| x < 4) else { break };
            w[i] += 1;
            for x in &mut w[..i] {
                *x = 1;
            }
        }
    }
}
