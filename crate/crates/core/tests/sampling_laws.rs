//! Distributional checks of the samplers against their exact laws.
//! Every test runs on a fixed seed, so the suite is deterministic.

use deposim::limits::inverse_moment_t;
use deposim::sampling::{
    exp_partial_sums, order_stats_representation, sample_pareto, sample_sphere_centered,
    sample_uniform_torus, sample_vy_distance_direct, SphereMode,
};
use deposim::stats::{ks_one_sample, ks_two_sample};
use deposim::torus::{torus_distance, TorusPoint};
use deposim::RngStream;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn pareto_tail_mass() {
    // P(Z > 2) = 2^-(beta-1) = 1/4 for beta = 3
    let mut rng = RngStream::new(101, 0);
    let n = 1_000_000;
    let mut hits = 0u64;
    for _ in 0..n {
        if sample_pareto(&mut rng, 3.0).unwrap() > 2.0 {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    let se = (0.25 * 0.75 / n as f64).sqrt();
    assert!((p - 0.25).abs() < 3.0 * se, "p = {p}");
}

#[test]
fn partial_sum_mean_is_one() {
    let mut rng = RngStream::new(102, 0);
    let n = 20usize;
    let reps = 10_000;
    let samples: Vec<f64> = (0..reps)
        .map(|_| exp_partial_sums(&mut rng, n).values()[n - 1] / n as f64)
        .collect();
    let (mean, se) = mean_and_se(&samples);
    assert!((mean - 1.0).abs() < 3.0 * se, "mean = {mean}, se = {se}");
}

#[test]
fn inverse_second_sum_has_unit_mean() {
    // E[1/T_2] = Gamma(1)/Gamma(2) = 1
    let mut rng = RngStream::new(103, 0);
    let samples: Vec<f64> = (0..1_000_000)
        .map(|_| 1.0 / exp_partial_sums(&mut rng, 2).values()[1])
        .collect();
    let (mean, se) = mean_and_se(&samples);
    assert!((mean - 1.0).abs() < 3.0 * se, "mean = {mean}, se = {se}");
}

#[test]
fn gamma_moment_formula() {
    // Monte Carlo E[T_i^-v] against Gamma(i-v)/Gamma(i)
    let mut rng = RngStream::new(104, 0);
    for &(i, v) in &[(3u64, 1.0f64), (5, 2.0)] {
        let exact = inverse_moment_t(i, v);
        let samples: Vec<f64> = (0..200_000)
            .map(|_| {
                exp_partial_sums(&mut rng, i as usize).values()[i as usize - 1].powf(-v)
            })
            .collect();
        let (mean, se) = mean_and_se(&samples);
        assert!(
            (mean - exact).abs() < 3.0 * se,
            "(i,v)=({i},{v}): mean {mean} vs {exact} (se {se})"
        );
    }
}

#[test]
fn representation_matches_single_pareto() {
    // N = 1: the representation value is one Pareto(beta - 1) draw
    let beta = 2.0;
    let mut rng = RngStream::new(105, 0);
    let n = 10_000;
    let repr: Vec<f64> = (0..n)
        .map(|_| order_stats_representation(&mut rng, 1, beta).unwrap()[0])
        .collect();
    let direct: Vec<f64> = (0..n).map(|_| sample_pareto(&mut rng, beta).unwrap()).collect();
    let r = ks_two_sample(&repr, &direct, 0.02).unwrap();
    assert!(r.pass, "ks = {}", r.statistic);
}

#[test]
fn representation_matches_sorted_draws_top_three_and_min() {
    // top-3 order statistics and the minimum, against brute-force sorting
    let beta = 2.5;
    let n = 50usize;
    let reps = 10_000;
    let mut rng = RngStream::new(106, 0);
    let mut repr: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(reps)).collect();
    let mut repr_min = Vec::with_capacity(reps);
    for _ in 0..reps {
        let v = order_stats_representation(&mut rng, n, beta).unwrap();
        for k in 0..3 {
            repr[k].push(v[k]);
        }
        repr_min.push(v[n - 1]);
    }
    let mut direct: Vec<Vec<f64>> = (0..3).map(|_| Vec::with_capacity(reps)).collect();
    let mut direct_min = Vec::with_capacity(reps);
    for _ in 0..reps {
        let mut draws: Vec<f64> = (0..n)
            .map(|_| sample_pareto(&mut rng, beta).unwrap())
            .collect();
        draws.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for k in 0..3 {
            direct[k].push(draws[k]);
        }
        direct_min.push(draws[n - 1]);
    }
    for k in 0..3 {
        let r = ks_two_sample(&repr[k], &direct[k], 0.02).unwrap();
        assert!(r.pass, "order statistic {k}: ks = {}", r.statistic);
    }
    let r = ks_two_sample(&repr_min, &direct_min, 0.02).unwrap();
    assert!(r.pass, "minimum: ks = {}", r.statistic);
}

#[test]
fn uniform_torus_moments() {
    let mut rng = RngStream::new(107, 0);
    let domain = 60.0;
    let n = 100_000;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let p = sample_uniform_torus(&mut rng, domain, 2);
        xs.push(p.coord(0));
        ys.push(p.coord(1));
    }
    let (mx, sex) = mean_and_se(&xs);
    assert!((mx - domain / 2.0).abs() < 3.0 * sex);

    // coordinates uncorrelated
    let my = ys.iter().sum::<f64>() / n as f64;
    let mut num = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    let corr = num / (vx.sqrt() * vy.sqrt());
    assert!(corr.abs() < 3.0 / (n as f64).sqrt(), "corr = {corr}");
}

#[test]
fn distance_to_uniform_center_is_uniform_in_1d() {
    let mut rng = RngStream::new(108, 0);
    let domain = 60.0;
    let s = TorusPoint::new(&[13.7], domain);
    let sample: Vec<f64> = (0..10_000)
        .map(|_| torus_distance(&sample_uniform_torus(&mut rng, domain, 1), &s, domain))
        .collect();
    let r = ks_one_sample(&sample, |x| (x / (domain / 2.0)).clamp(0.0, 1.0), 0.02).unwrap();
    assert!(r.pass, "ks = {}", r.statistic);
}

#[test]
fn hemisphere_mean_is_centered() {
    let mut rng = RngStream::new(109, 0);
    let n = 1_000_000;
    let mut zs = Vec::with_capacity(n);
    for _ in 0..n {
        let t = sample_sphere_centered(&mut rng, SphereMode::UpperHemisphere);
        zs.push(t[2]);
    }
    let (mean, se) = mean_and_se(&zs);
    assert!(mean.abs() < 3.0 * se, "mean z = {mean}");
}

#[test]
fn sphere_covariance_entries_finite_and_bounded() {
    let mut rng = RngStream::new(110, 0);
    for mode in [SphereMode::UniformSphere, SphereMode::UpperHemisphere] {
        let mut acc = [[0.0f64; 3]; 3];
        let n = 10_000;
        for _ in 0..n {
            let t = sample_sphere_centered(&mut rng, mode);
            for i in 0..3 {
                for j in 0..3 {
                    acc[i][j] += t[i] * t[j];
                }
            }
        }
        for row in &acc {
            for &e in row {
                let c = e / n as f64;
                assert!(c.is_finite() && c.abs() <= 1.0);
            }
        }
    }
}

#[test]
fn direct_distance_sampler_1d_mean() {
    let mut rng = RngStream::new(111, 0);
    let domain = 60.0;
    let xs: Vec<f64> = (0..100_000)
        .map(|_| sample_vy_distance_direct(&mut rng, domain, 1).unwrap())
        .collect();
    let (mean, se) = mean_and_se(&xs);
    assert!((mean - domain / 4.0).abs() < 3.0 * se);
}

#[test]
fn direct_distance_sampler_2d_matches_construction() {
    let mut rng = RngStream::new(112, 0);
    let domain = 10.0;
    let s = TorusPoint::new(&[3.0, 8.0], domain);
    let direct: Vec<f64> = (0..10_000)
        .map(|_| sample_vy_distance_direct(&mut rng, domain, 2).unwrap())
        .collect();
    let constructed: Vec<f64> = (0..10_000)
        .map(|_| torus_distance(&sample_uniform_torus(&mut rng, domain, 2), &s, domain))
        .collect();
    let r = ks_two_sample(&direct, &constructed, 0.02).unwrap();
    assert!(r.pass, "ks = {}", r.statistic);
}

#[test]
fn triangular_density_peak() {
    // density of the 2-d distance at u = D/2 is 2/D
    let mut rng = RngStream::new(113, 0);
    let domain = 10.0;
    let n = 1_000_000;
    let half_width = 0.01 * domain;
    let mut count = 0u64;
    for _ in 0..n {
        let v = sample_vy_distance_direct(&mut rng, domain, 2).unwrap();
        if (v - domain / 2.0).abs() < half_width {
            count += 1;
        }
    }
    let density = count as f64 / n as f64 / (2.0 * half_width);
    let expected = 2.0 / domain;
    assert!(
        (density - expected).abs() < 0.05 * expected,
        "density = {density}, expected = {expected}"
    );
}

#[test]
fn streams_reproduce_entire_operation_sequences() {
    let a: Vec<f64> = {
        let mut rng = RngStream::new(114, 9);
        order_stats_representation(&mut rng, 100, 2.0).unwrap()
    };
    let b: Vec<f64> = {
        let mut rng = RngStream::new(114, 9);
        order_stats_representation(&mut rng, 100, 2.0).unwrap()
    };
    assert_eq!(a, b);
}
