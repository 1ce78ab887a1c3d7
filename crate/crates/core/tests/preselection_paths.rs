use std::f64::consts::FRAC_PI_4;

use macroqubit::amplifier::macroqubit_state;
use macroqubit::analysis::preselect_sums;
use macroqubit::filters::{double_of_pass, of_dichotomic};
use macroqubit::splitter::{three_way_split_in, DEFAULT_PRUNE_BUDGET};

#[test]
fn pass_operators_match_enumerated_outcomes() {
    let (g, tau, eps) = (0.5, 0.9, 1e-13);
    let ks = [0, 1, 2];
    for (alpha, meas) in [(0.0, FRAC_PI_4 / 2.0), (0.7, 0.0), (2.1, 1.3)] {
        let sums = preselect_sums(alpha, meas, FRAC_PI_4, &ks, g, tau, eps).unwrap();
        let state = macroqubit_state(alpha, g, eps).unwrap();
        let outcomes = three_way_split_in(&state, tau, meas, 0.0, FRAC_PI_4, DEFAULT_PRUNE_BUDGET).unwrap();
        for (s, &k) in sums.iter().zip(&ks) {
            let (mut plus, mut minus) = (0.0, 0.0);
            for o in outcomes.iter().filter(|o| double_of_pass(o, k)) {
                let (wp, wm) = of_dichotomic(o.trans, 0).weights();
                plus += wp * o.probability;
                minus += wm * o.probability;
            }
            let (sp, sm) = (s.plus + s.tie / 2.0, s.minus + s.tie / 2.0);
            assert!((sp - plus).abs() < 1e-10, "alpha {alpha}, k {k}: {sp} vs {plus}");
            assert!((sm - minus).abs() < 1e-10, "alpha {alpha}, k {k}: {sm} vs {minus}");
        }
    }
}
