use kbundle_core::monodromy::loop_divisors;
use kbundle_core::tracker::{MonodromyContext, TrackerOptions};
use kbundle_core::BundleSpec;

/// Loop permutations read at `u = −T` do not change under `T → T + 4`, and
/// halving the initial step changes none of them.
#[test]
fn loop_permutations_are_stable() {
    for (s, a) in [(1, vec![1]), (2, vec![1]), (2, vec![0, 2]), (3, vec![1, 2]), (2, vec![0])] {
        let spec = BundleSpec::new(s, &a).unwrap();
        let opts = TrackerOptions::default();
        let half = TrackerOptions { initial_step: opts.initial_step / 2.0, ..opts.clone() };
        let near = MonodromyContext::new(&spec, 12.0, &opts).unwrap();
        let far = MonodromyContext::new(&spec, 16.0, &opts).unwrap();
        let fine = MonodromyContext::new(&spec, 12.0, &half).unwrap();
        for d in loop_divisors(&spec) {
            let p = near.permutation(&d).unwrap();
            assert_eq!(p, far.permutation(&d).unwrap(), "{spec} {d}: T -> T+4");
            assert_eq!(p, fine.permutation(&d).unwrap(), "{spec} {d}: half step");
        }
    }
}
