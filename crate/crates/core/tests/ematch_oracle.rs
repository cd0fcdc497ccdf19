mod common;

use common::ematch::check_random_case;
use common::rng;

#[test]
fn ematch_agrees_with_naive_matcher() {
    let mut r = rng(0xe3a7);
    let nonempty = (0..300).filter(|_| check_random_case(&mut r)).count();
    assert!(nonempty > 60, "only {nonempty} instances had matches");
}
