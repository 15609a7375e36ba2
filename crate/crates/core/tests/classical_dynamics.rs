use bh_core::classical::{
    ensemble_evolve, integrate, lyapunov_max, monodromy, periodic_solution, sample_husimi_bec, ClassicalField,
    IntegrateOptions, Stability,
};
use bh_core::stream_rng;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

// three-site field with condensate weight 1 − w, the rest split over k = 1, 2
fn three_site(w: f64, lambda: f64) -> ClassicalField {
    let c = [
        Complex64::new((1.0 - w).sqrt(), 0.0),
        Complex64::from_polar((w / 2.0).sqrt(), 0.3),
        Complex64::from_polar((w / 2.0).sqrt(), 1.1),
    ];
    let psi: Vec<Complex64> = (0..3)
        .map(|s| {
            c.iter()
                .enumerate()
                .map(|(k, ck)| ck * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k * s) as f64 / 3.0))
                .sum::<Complex64>()
                / 3f64.sqrt()
        })
        .collect();
    let nrm = psi.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    ClassicalField::new(psi.into_iter().map(|x| x / nrm).collect(), lambda).unwrap()
}

fn random_field(l: usize, lambda: f64, seed: u64) -> ClassicalField {
    let mut rng = stream_rng(seed, 7);
    let v: Vec<Complex64> = (0..l).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let nrm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    ClassicalField::new(v.into_iter().map(|x| x / nrm).collect(), lambda).unwrap()
}

#[test]
fn trimer_lyapunov_separates_islands_from_the_chaotic_band() {
    let t_max = 2000.0;
    let linear = lyapunov_max(&three_site(0.7, 0.0), 1.0, 0.0, t_max).unwrap();
    assert!(linear < 1e-3, "{linear}");
    let regular = lyapunov_max(&three_site(0.01, 3.0), 1.0, 0.0, t_max).unwrap();
    assert!(regular < 1e-2, "{regular}");
    let chaotic = lyapunov_max(&three_site(0.7, 3.0), 1.0, 0.0, t_max).unwrap();
    let floor = linear.max(regular);
    assert!(chaotic > 5.0 * floor && chaotic > 0.05, "chaotic {chaotic}, floor {floor}");
}

#[test]
fn condensate_weight_matches_rejection_oracle() {
    // uniform points on the sphere in C^3, accepted with probability w^5
    let (n, l) = (5u32, 3usize);
    let mut rng = stream_rng(2024, 0);
    let mut oracle = Vec::with_capacity(100_000);
    while oracle.len() < 100_000 {
        let v: Vec<Complex64> = (0..l).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let nrm2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        let w = (v.iter().sum::<Complex64>()).norm_sqr() / (l as f64 * nrm2);
        if rng.random::<f64>() < w.powi(n as i32) {
            oracle.push(w);
        }
    }
    let mut sampled = sample_husimi_bec(n, l, 10_000, 11).unwrap().condensate_weights();
    oracle.sort_by(f64::total_cmp);
    sampled.sort_by(f64::total_cmp);
    let cdf = |xs: &[f64], x: f64| xs.partition_point(|v| *v <= x) as f64 / xs.len() as f64;
    let ks = sampled.iter().chain(&oracle).map(|&x| (cdf(&sampled, x) - cdf(&oracle, x)).abs()).fold(0.0, f64::max);
    assert!(ks < 0.02, "two-sample KS {ks}");
}

#[test]
fn member_fluctuations_shrink_as_inverse_root_n() {
    let ns = [5u32, 15, 45, 135];
    let l = 5;
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| {
            let e = sample_husimi_bec(n, l, 4000, u64::from(n)).unwrap();
            let re: Vec<f64> = e.phase_referenced().iter().flat_map(|m| m.iter().map(|c| c.re).collect::<Vec<_>>()).collect();
            let mean = re.iter().sum::<f64>() / re.len() as f64;
            let sd = (re.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (re.len() - 1) as f64).sqrt();
            (f64::from(n).ln(), sd.ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 4.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 4.0;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() <= 0.1, "slope {slope}");
}

#[test]
fn ensemble_mean_does_not_depend_on_thread_count() {
    let e = sample_husimi_bec(15, 5, 150, 5).unwrap().with_lambda(0.5);
    let opts = IntegrateOptions::new(0.01).sample_every(20);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| ensemble_evolve(&e, 1.0, 0.1, 20.0, opts).unwrap())
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a.p_mean, b.p_mean);
    assert_eq!(a.p_stderr, b.p_stderr);
}

#[test]
fn strong_field_orbit_is_stable_and_weak_field_orbit_is_not() {
    let g = 0.1;
    assert_eq!(monodromy(1.0, g, 0.1, 32).unwrap().classification, Stability::Unstable);
    assert_eq!(monodromy(1.0, g, 10.0, 32).unwrap().classification, Stability::Stable);
    // the integrator follows the analytic orbit it linearizes about
    let (j, f, l) = (1.0, 10.0, 32);
    let start = periodic_solution(0.0, j, f, g, l).unwrap();
    let run = integrate(&start, j, f, 2.0, IntegrateOptions::new(1e-3).sample_every(500).keep_fields()).unwrap();
    for (t, field) in run.times.iter().zip(run.fields.unwrap()) {
        let exact = periodic_solution(*t, j, f, g, l).unwrap();
        let err = field.iter().zip(&exact.psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8, "t={t}: {err}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn multipliers_pair_symplectically(g in 0.0f64..0.5, f in 0.3f64..4.0, l in 3usize..=7) {
        let r = monodromy(1.0, g, f, l).unwrap();
        prop_assert!(r.pairing_error < 1e-6, "{}", r.pairing_error);
        prop_assert!((r.determinant - 1.0).abs() < 1e-6);
        prop_assert_eq!(r.multipliers.len(), 2 * l);
    }

    #[test]
    fn global_phase_leaves_observables_unchanged(seed in any::<u64>(), phase in -3.2f64..3.2, lambda in 0.0f64..3.0, f in 0.0f64..1.0) {
        let a = random_field(4, lambda, seed);
        let opts = IntegrateOptions::new(0.01).sample_every(50).keep_fields();
        let ra = integrate(&a, 1.0, f, 20.0, opts).unwrap();
        let rb = integrate(&a.with_global_phase(phase), 1.0, f, 20.0, opts).unwrap();
        for (x, y) in ra.momentum.iter().zip(&rb.momentum) {
            prop_assert!((x - y).abs() < 1e-9);
        }
        for (fa, fb) in ra.fields.unwrap().iter().zip(rb.fields.unwrap().iter()) {
            for (p, q) in fa.iter().zip(fb) {
                prop_assert!((p.norm() - q.norm()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn norm_is_structural(seed in any::<u64>(), lambda in 0.0f64..5.0, f in 0.0f64..2.0, l in 2usize..8) {
        let r = integrate(&random_field(l, lambda, seed), 1.0, f, 50.0, IntegrateOptions::new(0.01)).unwrap();
        prop_assert!(r.norm_drift < 1e-9);
    }
}
