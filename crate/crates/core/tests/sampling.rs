use chainstat::ensemble::{self, Ensemble, EnsembleParams};
use chainstat::montecarlo::{
    empirical_stats, harmonic_spread_experiment, ks_critical_one_sample, ks_one_sample_numeric,
    sample_chain, sample_replicas, stream_rng, InverseCdfSampler, SpacingSampler, TailModel,
};
use chainstat::potentials::Potential;

fn lj(wall: f64) -> Potential {
    Potential::lennard_jones(1.0, wall).unwrap()
}

fn lj_default() -> Potential {
    lj(10.0 * 2f64.powf(1.0 / 6.0))
}

#[test]
fn gaussian_moments() {
    let p = Potential::quadratic(5.0, 1.0, 50.0).unwrap();
    let e = EnsembleParams::new(100.0, 0.0).unwrap();
    let ens = Ensemble::new(&p, e).unwrap();
    let sampler = InverseCdfSampler::new(&ens).unwrap();
    let mut rng = stream_rng(7, 0);
    let xs: Vec<f64> = (0..100_000).map(|_| sampler.sample(&mut rng)).collect();
    let s = empirical_stats(&xs).unwrap();
    let var = 0.01 / 2.0;
    assert!((s.stderr - (var / 1e5f64).sqrt()).abs() < 1e-5);
    assert!((s.mean - 5.0).abs() < 3.0 * s.stderr, "{s:?}");
    assert!((s.variance / var - 1.0).abs() < 0.05, "{s:?}");
}

#[test]
fn lj_spacings_pass_ks() {
    let p = lj_default();
    let e = EnsembleParams::new(100.0, 0.0).unwrap();
    let chain = sample_chain(&p, e, 10_000, 11).unwrap();
    let d = ks_one_sample_numeric(&Ensemble::new(&p, e).unwrap(), &chain.spacings).unwrap();
    assert!(d < ks_critical_one_sample(10_000), "D = {d}");
}

#[test]
fn chains_are_reproducible() {
    let p = lj_default();
    let e = EnsembleParams::new(100.0, 0.0).unwrap();
    let a = sample_replicas(&p, e, 500, 4, 3).unwrap();
    let b = sample_replicas(&p, e, 500, 4, 3).unwrap();
    assert_eq!(a, b);
    // replica r is stream r, whatever the thread pool did
    let ens = Ensemble::new(&p, e).unwrap();
    let sampler = InverseCdfSampler::new(&ens).unwrap();
    let mut rng = stream_rng(3, 2);
    let mut x = 0.0;
    let mut direct = vec![0.0];
    for _ in 0..500 {
        x += sampler.sample(&mut rng);
        direct.push(x);
    }
    assert_eq!(a[2].positions, direct);
    assert_eq!(sample_chain(&p, e, 500, 3).unwrap().spacings, a[0].spacings);
    let c = sample_replicas(&p, e, 500, 4, 4).unwrap();
    assert_ne!(a[0].spacings, c[0].spacings);
}

#[test]
fn single_particle_chain() {
    let p = lj_default();
    let e = EnsembleParams::new(100.0, 0.0).unwrap();
    let c = sample_chain(&p, e, 1, 5).unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(c.total_length(), c.spacings[0]);
}

#[test]
fn mean_spacing_does_not_depend_on_position_or_length() {
    let p = lj_default();
    let e = EnsembleParams::new(100.0, 0.0).unwrap();
    let m = ensemble::moment(&p, e, 1).unwrap();
    let chains = sample_replicas(&p, e, 20_000, 8, 21).unwrap();
    let mut first = Vec::new();
    let mut second = Vec::new();
    for c in &chains {
        let (h1, h2) = c.spacings.split_at(c.len() / 2);
        first.extend_from_slice(h1);
        second.extend_from_slice(h2);
    }
    let s1 = empirical_stats(&first).unwrap();
    let s2 = empirical_stats(&second).unwrap();
    let pooled = (s1.stderr.powi(2) + s2.stderr.powi(2)).sqrt();
    assert!((s1.mean - s2.mean).abs() < 3.0 * pooled);
    for s in [s1, s2] {
        assert!((s.mean - m).abs() < 3.0 * s.stderr);
    }

    // per-spacing mean from short and long chains
    for n in [100usize, 10_000] {
        let chains = sample_replicas(&p, e, n, 20, 33).unwrap();
        let per: Vec<f64> = chains.iter().map(|c| c.total_length() / n as f64).collect();
        let s = empirical_stats(&per).unwrap();
        assert!((s.mean - m).abs() < 3.0 * s.stderr, "N = {n}: {s:?} vs {m}");
    }
}

#[test]
fn hundred_chains_match_quadrature_length() {
    let p = lj_default();
    let e = EnsembleParams::new(100.0, 0.0).unwrap();
    let n = 10_000;
    let lengths: Vec<f64> = sample_replicas(&p, e, n, 100, 1)
        .unwrap()
        .iter()
        .map(|c| c.total_length())
        .collect();
    let s = empirical_stats(&lengths).unwrap();
    let expected = ensemble::chain_length(&p, 0.01, 0.0, n as u64).unwrap();
    assert!(
        (s.mean - expected).abs() < 3.0 * s.stderr,
        "{s:?} vs {expected}"
    );
}

// A wall at 2.5 sigma keeps the tilted dissociation plateau out of the
// linear regime at F = 0.01.
#[test]
fn force_stretches_chain_by_linear_response() {
    let p = lj(2.5);
    let n = 10_000;
    let f = 1e-2;
    let lengths = |force: f64, seed: u64| -> Vec<f64> {
        let e = EnsembleParams::new(100.0, force).unwrap();
        sample_replicas(&p, e, n, 100, seed)
            .unwrap()
            .iter()
            .map(|c| c.total_length())
            .collect()
    };
    let s0 = empirical_stats(&lengths(0.0, 41)).unwrap();
    let s1 = empirical_stats(&lengths(f, 42)).unwrap();
    let diff = s1.mean - s0.mean;
    let stderr = (s0.stderr.powi(2) + s1.stderr.powi(2)).sqrt();
    let r = ensemble::elastic_modulus(&p, 0.01).unwrap();
    let expected = n as f64 * r * f;
    let slack = 3.0 * stderr + 0.1 * expected;
    assert!(
        (diff - expected).abs() < slack,
        "diff {diff}, expected {expected} +- {slack}"
    );
}

#[test]
fn pareto_tails_break_the_spread_bound() {
    let exceed = (0..100u64)
        .filter(|s| {
            harmonic_spread_experiment(
                TailModel::Pareto { alpha: 0.8 },
                1.0,
                10_000,
                &mut stream_rng(*s, 0),
            )
            .unwrap()
            .ratio
                > 1.05
        })
        .count();
    assert!(exceed > 0);
}

#[test]
fn bounded_tails_stay_within_two_m() {
    for s in 0..20 {
        let r = harmonic_spread_experiment(
            TailModel::Bounded { m: 1.0 },
            1.0,
            10_000,
            &mut stream_rng(s, 0),
        )
        .unwrap();
        assert!((r.ratio - 1.0).abs() <= 2e-4);
    }
}
