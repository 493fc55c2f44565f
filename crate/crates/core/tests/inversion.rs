use spde_inverse::inversion::exact_psi;
use spde_inverse::{
    reconstruct_potential, uniqueness_probe, FilterSpec, Grid1D, InitialCondition, Potential,
    RunConfig, Sampler,
};

fn config(paths: usize, seed: u64) -> RunConfig {
    RunConfig {
        grid: Grid1D::new(1.0, 1.0, 50, 128).unwrap(),
        potential: Potential::Sine { amplitude: 1.0 },
        initial_condition: InitialCondition::Gaussian { sharpness: 16.0 },
        observation_index: 0,
        paths,
        epsilon: 0.0,
        filter: FilterSpec::Tikhonov { mu: 0.03 },
        base_seed: seed,
    }
}

#[test]
fn uniqueness_probe_cases() {
    let paths = 100_000;
    let cfg = config(paths, 77);
    let sine = Potential::Sine { amplitude: 1.0 };
    assert_eq!(uniqueness_probe(&sine, &sine, &cfg).unwrap(), 0.0);

    // only q^2 enters the data: the difference is 2 mean(int q dB)
    let d = uniqueness_probe(&sine, &sine.negated(), &cfg).unwrap();
    assert!(d <= 3.0 / (paths as f64).sqrt(), "distance {d}");

    // ||t / 2||_{L2(0,1)} = 1 / (2 sqrt 3)
    let d = uniqueness_probe(&Potential::Constant(1.0), &Potential::Constant(0.0), &cfg).unwrap();
    let want = 1.0 / (2.0 * 3f64.sqrt());
    assert!(
        (d - want).abs() <= 3.0 / (2.0 * paths as f64).sqrt(),
        "distance {d}"
    );
}

#[test]
fn uniqueness_probe_rejects_bad_config() {
    let mut cfg = config(10, 1);
    cfg.observation_index = 50;
    assert!(uniqueness_probe(&Potential::Constant(1.0), &Potential::Constant(0.0), &cfg).is_err());
}

#[test]
fn sign_flip_agrees_in_distribution() {
    let paths = 50_000;
    let q = Potential::PiecewiseRoot;
    let a = config(paths, 5);
    let b = config(paths, 6);
    let pa = exact_psi(&a, &q).unwrap();
    let pb = exact_psi(&b, &q.negated()).unwrap();
    let tau = a.grid.tau();
    let mut int_q2 = 0.0;
    for n in 0..=128 {
        if n % 32 == 0 && n > 0 {
            let band = 3.0 * (2.0 * int_q2 / paths as f64).sqrt();
            assert!((pa.values()[n] - pb.values()[n]).abs() <= band, "n = {n}");
        }
        int_q2 += q.eval_squared(n as f64 * tau) * tau;
    }
}

#[test]
fn error_shrinks_with_more_paths() {
    let mut means = Vec::new();
    for paths in [1_000usize, 10_000, 100_000] {
        let errs: Vec<f64> = (0..5)
            .map(|seed| {
                let out =
                    reconstruct_potential(&config(paths, 1000 + seed), Sampler::ExactExponential)
                        .unwrap();
                out.result.rel_l2_error_trimmed.unwrap()
            })
            .collect();
        means.push(errs.iter().sum::<f64>() / errs.len() as f64);
    }
    assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
}

#[test]
fn clamped_root_is_consistent() {
    let out = reconstruct_potential(&config(2_000, 3), Sampler::ExactExponential).unwrap();
    let r = out.result;
    for (q, q2) in r.q_nonneg.values().iter().zip(r.q_squared.values()) {
        assert!(*q >= 0.0 && q * q <= q2.max(0.0) + 1e-12);
    }
    assert_eq!(r.q_squared.len(), 129);
}
