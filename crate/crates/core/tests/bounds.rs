mod common;

use rand::Rng;
use stepcover::distribution::default_epsilon;
use stepcover::rational::{int, pow2, ratio};
use stepcover::solvers::SolverConfig;
use stepcover::{
    branch_and_bound_step_cover, build_extremal, certify_upper_bound, fringe_mass, max_density,
    merge_reduce, pipeline, reverse, uniform_density, verify_lower_bound, Rational, RulerInstance,
};

#[test]
fn extremal_census_up_to_six() {
    for m in 1..=6 {
        let ext = build_extremal(m).unwrap();
        let report = verify_lower_bound(&ext, &SolverConfig::default()).unwrap();
        assert!(report.holds, "m = {m}");
        assert_eq!(report.step_cover, ext.target());
        assert_eq!(report.below_bound, 0);
        assert_eq!(report.total_foldings, 1 << (4 * m - 1));
        assert!(report.count_at_min >= 2, "alternating folding and its mirror");
        assert!(report.non_alternating_min.as_ref().is_some_and(|r| *r >= ext.target()));
        assert_eq!(reverse(&ext.instance), ext.instance);
    }
}

#[test]
fn extremal_report_serializes() {
    let ext = build_extremal(2).unwrap();
    let report = verify_lower_bound(&ext, &SolverConfig::default()).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["step_cover"], "9/5");
    assert_eq!(json["delta"], "1/5");
    assert_eq!(json["holds"], true);
}

#[test]
fn certificate_for_padded_extremal_instance() {
    let ext = build_extremal(4).unwrap();
    let mut lengths = ext.instance.lengths().to_vec();
    lengths.push(int(1));
    let a = merge_reduce(&RulerInstance::new(lengths).unwrap());
    assert_eq!(a.len(), 16);
    let cert = certify_upper_bound(&a, None).unwrap();
    assert_eq!(cert.m, 4);
    assert_eq!(cert.epsilon, ratio(1, 121));
    assert_eq!(cert.fringe_masses.len(), 17);
    assert!(cert.holds);
    let f = branch_and_bound_step_cover(&a).value;
    assert!(f <= int(2) - &cert.epsilon);
    let json = serde_json::to_value(&cert).unwrap();
    assert_eq!(json["epsilon"], "1/121");
    assert_eq!(json["r"].as_array().unwrap().len(), 17);
}

/// Peak density at distance k from the centre is at most 2^ceil(k/2) / 2, and
/// each fringe mass is at most peak * epsilon.
#[test]
fn pipeline_concentration_bounds() {
    let mut rng = common::rng(31);
    for i in 0..60 {
        let m = 1 + i % 6;
        let a = merge_reduce(&common::random_instance(&mut rng, 4 * m, 16));
        let qs = pipeline(&a).unwrap();
        let eps = default_epsilon(m);
        let centre = 2 * m;
        for (idx, q) in qs.iter().enumerate() {
            assert!(q.is_probability());
            let k = idx.abs_diff(centre) as u32;
            let cap = pow2(k.div_ceil(2)) / int(2);
            assert!(max_density(q) <= cap, "index {idx} of {a}");
            assert!(fringe_mass(q, &eps).unwrap() <= max_density(q) * &eps);
        }
    }
}

#[test]
fn certificate_soundness_at_desk_scale() {
    let mut rng = common::rng(32);
    for _ in 0..40 {
        let m = rng.random_range(1..=5usize);
        let a = merge_reduce(&common::random_instance(&mut rng, 4 * m, 20));
        let cert = certify_upper_bound(&a, None).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.total, cert.fringe_masses.iter().sum::<Rational>());
        assert!(cert.fringe_masses.iter().all(|r| *r >= int(0)));
        assert!(branch_and_bound_step_cover(&a).value <= int(2) - &cert.epsilon);
    }
}

#[test]
fn all_unit_steps_keep_uniform() {
    let a = RulerInstance::from_ratios(&[(1, 1); 4]).unwrap();
    assert!(pipeline(&a).unwrap().iter().all(|q| *q == uniform_density()));
}
