mod common;

use common::{partition_oracle, random_euf, rng};
use qsel::ground::{solve_ground, CcResult, CongruenceState, GroundConfig, GroundOutcome};
use qsel::term::Kind;
use rand::seq::SliceRandom;

#[test]
fn solve_ground_matches_partition_oracle() {
    let mut r = rng(0x5eed_0001);
    let cfg = GroundConfig {
        decision_budget: u64::MAX,
        minimize_lemmas: false,
    };
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..600 {
        let mut inst = random_euf(&mut r, 8, 9, 12, false);
        let expected = partition_oracle(&inst);
        let clauses = inst.ground_clauses();
        let got = solve_ground(&inst.store, &clauses, &cfg);
        match got {
            GroundOutcome::Sat(_) => sat += 1,
            GroundOutcome::Unsat { .. } => unsat += 1,
            GroundOutcome::Unknown => panic!("instance {i}: unknown"),
        }
        assert_eq!(got.is_sat(), expected, "instance {i}");
    }
    assert!(sat > 50 && unsat > 50, "degenerate sample: {sat} sat / {unsat} unsat");
}

#[test]
fn cc_verdict_is_order_independent_and_explanations_sound() {
    let mut r = rng(0x5eed_0002);
    let mut conflicts = 0;
    for _ in 0..400 {
        let mut inst = random_euf(&mut r, 6, 9, 10, true);
        let lits = inst.literals();
        let atoms: Vec<_> = lits
            .iter()
            .map(|&(a, b, p)| (inst.store.mk_term(Kind::Equal, None, &[a, b]).unwrap(), p))
            .collect();
        let run = |order: &[usize]| {
            let mut cc = CongruenceState::new(&inst.store);
            let mut res = CcResult::Ok;
            for &i in order {
                res = cc.assert_literal(&inst.store, atoms[i].0, atoms[i].1, i);
            }
            res
        };
        let mut order: Vec<usize> = (0..atoms.len()).collect();
        let base = run(&order);
        for _ in 0..3 {
            order.shuffle(&mut r);
            assert_eq!(
                matches!(run(&order), CcResult::Conflict(_)),
                matches!(base, CcResult::Conflict(_))
            );
        }
        if let CcResult::Conflict(expl) = base {
            conflicts += 1;
            assert!(
                matches!(run(&expl), CcResult::Conflict(_)),
                "explanation {expl:?} not a conflict"
            );
        }
    }
    assert!(conflicts > 40);
}
