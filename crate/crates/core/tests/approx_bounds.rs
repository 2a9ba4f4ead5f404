mod common;

use common::{floyd, metric_mst, small};
use proptest::prelude::*;
use steiner_core::exact::optimum;
use steiner_core::finish::Finisher;
use steiner_core::mst::{aux_mst_weight, mst_plus, mst_terminals};
use steiner_core::zelikovsky::{zelikovsky, zelikovsky_minus, zelikovsky_plus};
use steiner_core::WorkingGraph;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn heuristics_within_twice_optimum(seed in any::<u64>()) {
        let inst = small(seed, 12, 5);
        let opt = optimum(&inst).unwrap();
        let g = WorkingGraph::from_instance(&inst);
        for f in Finisher::ALL {
            let w = f.solve(&g).unwrap().weight;
            prop_assert!(opt <= w && w <= 2 * opt, "{} gave {} with optimum {}", f, w, opt);
        }
    }

    #[test]
    fn improvements_never_hurt(seed in any::<u64>()) {
        let inst = small(seed, 30, 10);
        let g = WorkingGraph::from_instance(&inst);
        let terminals: Vec<_> = g.terminals().collect();
        let mst = mst_terminals(&g, &terminals).unwrap();
        let plus = mst_plus(&g, &terminals).unwrap();
        prop_assert!(plus.weight <= mst.weight);
        prop_assert!(mst.weight <= aux_mst_weight(&g, &terminals).unwrap());
        prop_assert_eq!(
            aux_mst_weight(&g, &terminals).unwrap(),
            metric_mst(&floyd(&g), &terminals).unwrap()
        );
        let minus = zelikovsky_minus(&g).unwrap();
        prop_assert!(zelikovsky_plus(&g).unwrap().tree.weight <= minus.tree.weight);
    }

    #[test]
    fn zelikovsky_rounds_are_bounded_and_winning(seed in any::<u64>()) {
        let inst = small(seed, 20, 9);
        let g = WorkingGraph::from_instance(&inst);
        let k = inst.terminals().len();
        for result in [zelikovsky(&g).unwrap(), zelikovsky_minus(&g).unwrap()] {
            prop_assert!(result.rounds.len() <= (k - 1).div_ceil(2));
            for r in &result.rounds {
                prop_assert!(r.win > 0);
                prop_assert_eq!(r.win + r.cost, r.gain);
            }
        }
    }
}
