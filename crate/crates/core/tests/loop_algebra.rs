use proptest::prelude::*;

use testrig_core::grasp::{grasp_simulate, ContactPlant, Feedback, FuzzySystem, PidGains, SetpointSource, SimOptions};

fn final_error(kp: f64, ki: f64, force: f64) -> f64 {
    let opts = SimOptions {
        duration: 1.0,
        feedback: Feedback::Direct,
        ..SimOptions::default()
    };
    let trace = grasp_simulate(
        &ContactPlant::default(),
        &FuzzySystem::default(),
        &PidGains::new(kp, ki, 0.0).unwrap(),
        &SetpointSource::Constant { force },
        &opts,
    )
    .unwrap();
    trace.last().unwrap().error
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn proportional_error_follows_loop_gain(kp in 0.1f64..2.0, force in 1.0f64..20.0) {
        let g = ContactPlant::default().actuator_gain();
        let expected = force / (1.0 + kp * g);
        // Saturated cases fall outside the linear algebra.
        prop_assume!(kp * expected <= 24.0);
        let e = final_error(kp, 0.0, force);
        prop_assert!(((e - expected) / expected).abs() < 1e-2, "{} vs {}", e, expected);
    }

    #[test]
    fn integral_action_removes_offset(force in 1.0f64..30.0) {
        let e = final_error(0.5, 20.0, force);
        prop_assert!(e.abs() < 1e-3 * force, "{}", e);
    }
}
