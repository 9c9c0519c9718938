use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use sag_core::arrival::coverage_coefficient;

#[test]
fn kappa_matches_monte_carlo_at_rate_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let poisson = Poisson::new(2.0).unwrap();
    let n = 1_000_000;
    let sum: f64 = (0..n)
        .map(|_| {
            let d: f64 = poisson.sample(&mut rng);
            if d >= 1.0 {
                1.0 / d
            } else {
                0.0
            }
        })
        .sum();
    let mc = sum / n as f64;
    let exact = coverage_coefficient(2.0, 1.0);
    assert!((exact - mc).abs() < 1e-3, "series {exact}, sampled {mc}");
}

/// Coverage per unit budget first grows with the rate (an alert becomes
/// likely) and then falls like `1 / lambda`; the peak sits near 1.5.
#[test]
fn kappa_is_unimodal() {
    let at = |lambda: f64| coverage_coefficient(lambda, 1.0);
    let rising: Vec<f64> = (1..=14).map(|k| at(k as f64 * 0.1)).collect();
    assert!(rising.windows(2).all(|w| w[0] < w[1]));
    let falling: Vec<f64> = (0..=400).map(|k| at(1.6 + k as f64 * 0.5)).collect();
    assert!(falling.windows(2).all(|w| w[0] > w[1]));
    assert!(falling.iter().chain(&rising).all(|&k| k > 0.0 && k <= 1.0));
}

#[test]
fn kappa_approaches_reciprocal_rate() {
    let k = coverage_coefficient(500.0, 2.0);
    assert!((k * 500.0 * 2.0 - 1.0).abs() < 5e-3);
}
