use qtunnel::stats::{stratified_sample, SamplingPolicy};
use qtunnel::*;

fn run(name: &str, t_final: f64) -> Trajectory<f64> {
    let mut c = load_config(format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
    c.stepping.t_final = t_final;
    evolve::<f64>(&c).unwrap()
}

#[test]
fn sample_respects_density_floor() {
    let t = run("case1.cfg", 1.0);
    let policy = SamplingPolicy {
        n_total: 20_000,
        ..SamplingPolicy::default()
    };
    let s = stratified_sample(&t, &policy, "case1").unwrap();
    assert_eq!(s.amplitudes.len(), 20_000);
    assert!(s.amplitudes.iter().all(|z| z.norm_sqr() > policy.density_floor));
    assert_eq!(s.provenance.run_id, "case1");
}

#[test]
fn self_comparison_is_null() {
    let t = run("case2.cfg", 1.0);
    let policy = SamplingPolicy {
        n_total: 10_000,
        ..SamplingPolicy::default()
    };
    let r = compare_runs((&t, "x"), (&t, "x"), &policy, 64).unwrap();
    let c = &r.comparison;
    assert_eq!(c.js_bits, 0.0);
    assert!(c.kl_ab_bits.abs() < 1e-12 && c.kl_ba_bits.abs() < 1e-12);
    assert_eq!(c.cliffs_delta, 0.0);
    assert_eq!(c.tests[0].statistic, 0.0);
    assert_eq!(r.phase_space_a, r.phase_space_b);
}

#[test]
fn analysis_is_deterministic_per_seed() {
    let t = run("case1.cfg", 0.5);
    let p = SamplingPolicy {
        n_total: 5_000,
        ..SamplingPolicy::default()
    };
    let a = analyze_run(&t, &p, 32, "r").unwrap();
    assert_eq!(a, analyze_run(&t, &p, 32, "r").unwrap());
    let other = analyze_run(&t, &SamplingPolicy { seed: 1, ..p }, 32, "r").unwrap();
    assert_ne!(a, other);
    assert!(a.phase_space.circular_variance >= 0.0 && a.phase_space.circular_variance <= 1.0);
    assert!(a.phase_space.hull_area > 0.0);
}
