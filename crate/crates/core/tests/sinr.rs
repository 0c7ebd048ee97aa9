use minergy::model::NetworkInstance;
use minergy::sinr::{capacity, plan, Gain, RadioParams};
use minergy::solver::{solve_twoterm, SolveOptions};
use proptest::prelude::*;

proptest! {
    #[test]
    fn more_interferers_never_raise_capacity(
        a in 0.5f64..4.0,
        p0 in 0.1f64..10.0,
        n0 in 0.1f64..10.0,
        pairs in prop::collection::vec((1.0f64..20.0, 0.1f64..5.0), 1..5),
    ) {
        let params = RadioParams::new(p0, n0, Gain::PowerLaw { a }).unwrap();
        let interferers: Vec<(f64, f64)> = pairs.iter().map(|&(x, d)| (x + 2.0, x + 2.0 + d)).collect();
        let mut prev = capacity(&params, 1.0, 0.0, &[]).unwrap();
        for k in 1..=interferers.len() {
            let c = capacity(&params, 1.0, 0.0, &interferers[..k]).unwrap();
            prop_assert!(c < prev);
            prev = c;
        }
    }
}

#[test]
fn two_term_gain_plan_matches_flow_problem() {
    let inst = NetworkInstance::new(vec![0.5, 1.25, 2.0, 3.5], vec![1.0, 0.5, 2.0, 1.0]).unwrap();
    let params = RadioParams::new(1.5, 0.25, Gain::TwoTerm { a: 2.0, b: 0.5, lambda: 0.3 }).unwrap();
    let out = plan(&inst, &params, &SolveOptions::default()).unwrap();
    out.schedule.validate(&inst, &params).unwrap();
    let flow = solve_twoterm(&inst, 2.0, 0.5, 0.3).unwrap();
    assert_eq!(out.solution.graph, flow.graph);
    let expect = params.p0 / params.c0() * flow.energy;
    assert!((out.schedule.total_energy - expect).abs() <= 1e-9 * expect);
    let carried: f64 = out.schedule.slots.iter().filter(|s| s.receiver == 0).map(|s| s.amount).sum();
    assert!((carried - inst.total_data()).abs() < 1e-12);
}
