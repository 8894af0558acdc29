use std::f64::consts::{PI, SQRT_2};

use krylov_sqrt::bounds::*;
use krylov_sqrt::linalg::{hessenberg_eigenvalues, DenseMatrix, HessenbergRows, RitzSpectrum, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// ln Γ by shifting the argument above 30 and summing the Stirling series.
fn ln_gamma_stirling(x: f64) -> f64 {
    let mut z = x;
    let mut shift = 0.0;
    while z < 30.0 {
        shift += z.ln();
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
        - 1.0 / (1680.0 * z * z2 * z2 * z2)
        + 1.0 / (1188.0 * z * z2 * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

fn gamma_oracle(x: f64) -> f64 {
    ln_gamma_stirling(x).exp()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn gamma_matches_stirling_oracle() {
    assert!(rel(gamma_fn(0.75).unwrap(), 1.225_416_702_465_178) <= 1e-12);
    assert!(rel(gamma_oracle(0.75), 1.225_416_702_465_178) <= 1e-13);
    for i in 1..=500 {
        let x = i as f64 * 0.1;
        let g = gamma_fn(x).unwrap();
        assert!(rel(g, gamma_oracle(x)) <= 1e-12, "x = {x}: {g} vs {}", gamma_oracle(x));
        assert!((ln_gamma(x).unwrap() - ln_gamma_stirling(x)).abs() <= 1e-12 * ln_gamma_stirling(x).abs().max(1.0));
    }
}

#[test]
fn beta_matches_definition() {
    let b = beta_fn(0.75, 1.25).unwrap();
    let expect = gamma_oracle(0.75) * gamma_oracle(1.25) / gamma_oracle(2.0);
    assert!(rel(b, expect) <= 1e-12);
}

#[test]
fn quadrature_closed_forms() {
    let r = quad_semi_infinite(|x| x.sqrt() / (1.0 + x).powi(2), &cfg()).unwrap();
    assert!(rel(r.value, PI / 2.0) <= 1e-6);
    let r = quad_semi_infinite(|x| x.sqrt() / (1.0 + x * x), &cfg()).unwrap();
    assert!(rel(r.value, PI / SQRT_2) <= 1e-6);
    for (sigma, k) in [(1.0f64, 4i32), (2.0, 4), (5.0, 7)] {
        let r = quad_semi_infinite(
            |x| x.sqrt() * sigma.powi(k) / (sigma * sigma + x * x).powf(k as f64 / 2.0),
            &cfg(),
        )
        .unwrap();
        let b = gamma_oracle(0.75) * gamma_oracle((2.0 * k as f64 - 3.0) / 4.0)
            / gamma_oracle(0.75 + (2.0 * k as f64 - 3.0) / 4.0);
        let expect = sigma.powf(1.5) / 2.0 * b;
        assert!(rel(r.value, expect) <= 1e-6, "sigma {sigma} k {k}");
    }
}

#[test]
fn posterior_closed_forms() {
    let ones = RitzSpectrum::from_real(&[1.0, 1.0]);
    assert!(rel(bound_posterior_ritz(&ones, 1.0, &cfg()).unwrap(), 0.5) <= 1e-8);
    let fours = RitzSpectrum::from_real(&[4.0, 4.0]);
    assert!(rel(bound_posterior_ritz(&fours, 1.0, &cfg()).unwrap(), 4.0) <= 1e-8);
    let m = bound_posterior_modulus(&ones, 1.0, &cfg()).unwrap();
    assert!(rel(m, 1.0 / SQRT_2) <= 1e-8);
    let rotated = RitzSpectrum::new(vec![C64::new(0.0, 3.0), C64::new(0.0, -3.0)]);
    let plain = RitzSpectrum::from_real(&[3.0, 3.0]);
    assert_eq!(
        bound_posterior_modulus(&rotated, 1.0, &cfg()).unwrap(),
        bound_posterior_modulus(&plain, 1.0, &cfg()).unwrap()
    );
}

#[test]
fn closed_form_constants() {
    let g34 = gamma_oracle(0.75);
    let g14 = gamma_oracle(0.25);
    let k2 = g34 / (2f64.powf(0.25) * PI) * 4.0 * 2f64.powf(-0.75);
    assert!(rel(bound_apriori_sqrt(1.0, 2, 1.0).unwrap(), k2) <= 1e-12);
    assert!((k2 - 0.7801).abs() < 1e-4);
    assert!(rel(bound_hermitian_loose(1.0, 1, 1.0).unwrap(), 1.0 / PI.sqrt()) <= 1e-14);
    assert!(rel(bound_hermitian_jensen(4.0, 1, 1.0).unwrap(), 8.0 / PI.sqrt()) <= 1e-14);
    assert!((bound_hermitian_jensen(4.0, 1, 1.0).unwrap() - 4.514).abs() < 1e-3);
    let inv = g14 / (2f64.powf(0.75) * PI) * 2.0;
    assert!(rel(bound_apriori_invsqrt(1.0, 1, 1.0).unwrap(), inv) <= 1e-12);
    assert!((inv - 1.3724).abs() < 1e-4);
    let st = 2f64.powf(0.25) * PI / g34 * 0.25;
    assert!(rel(scaling_term(1.0, 1.0, 2).unwrap(), st) <= 1e-12);
    assert!((st - 0.7622).abs() < 1e-4);
    // invsqrt Hermitian bound at k = 1, λ̄ = 1
    assert!(
        rel(
            bound_hermitian_invsqrt(1.0, 1, 1.0).unwrap(),
            4.0 / 3.0 / PI.sqrt() / SQRT_2
        ) <= 1e-14
    );
}

#[test]
fn homogeneity_and_inversion() {
    let a = bound_apriori_sqrt(3.0, 7, 0.2).unwrap();
    let b = bound_apriori_sqrt(6.0, 7, 0.2).unwrap();
    assert!(rel(b / a, 2f64.powf(1.5)) <= 1e-13);
    let l1 = bound_hermitian_loose(5.0, 9, 1.0).unwrap();
    let l2 = bound_hermitian_loose(20.0, 9, 1.0).unwrap();
    assert!(rel(l2 / l1, 8.0) <= 1e-13);
    let i1 = bound_apriori_invsqrt(2.0, 4, 1.0).unwrap();
    let i2 = bound_apriori_invsqrt(8.0, 4, 1.0).unwrap();
    assert!(rel(i2 / i1, 2.0) <= 1e-13);
    // scaling term undoes the a priori constant
    for k in [2usize, 5, 40] {
        let sigma: f64 = 7.5;
        let e = bound_apriori_sqrt(sigma, k, 1.0).unwrap();
        let st = scaling_term(e, 1.0, k).unwrap();
        assert!(rel(st, sigma.powf(1.5) * (k as f64).powf(-0.75)) <= 1e-12);
    }
}

#[test]
fn lambda_bar_arithmetic() {
    assert_eq!(lambda_bar(&[1000.0, 10.0, 10.0], 1000.0, 3).unwrap(), 505.0);
    assert_eq!(lambda_bar(&[2.5, 2.5], 2.5, 2).unwrap(), 2.5);
}

#[test]
fn perturbed_reduces_and_adds() {
    let p0 = PerturbationData {
        sigma_max: 3.0,
        mu1: 1.0,
        mu2: 1.0,
        eps: 0.0,
        b_norm: 1.0,
    };
    assert_eq!(
        bound_perturbed(&p0, 5, 0.3).unwrap(),
        bound_apriori_sqrt(3.0, 5, 0.3).unwrap()
    );
    let p = PerturbationData {
        sigma_max: 100.0,
        mu1: 1.0,
        mu2: 1.0,
        eps: 0.01,
        b_norm: 1.0,
    };
    let second = 1.01f64.powf(1.5) * bound_apriori_sqrt(100.0, 4, 0.1).unwrap();
    assert!(rel(bound_perturbed(&p, 4, 0.1).unwrap(), 0.5 + second) <= 1e-14);
}

#[test]
fn large_k_products_stay_finite() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let vals: Vec<C64> = (0..500)
        .map(|_| C64::from_polar(1e3, rng.random_range(-1.2..1.2)))
        .collect();
    let r = RitzSpectrum::new(vals);
    let b = bound_posterior_ritz(&r, 1.0, &cfg()).unwrap();
    assert!(b.is_finite() && b > 0.0);
    let m = bound_posterior_modulus(&r, 1.0, &cfg()).unwrap();
    assert!(m.is_finite() && m >= b);
}

fn random_hessenberg(k: usize, seed: u64) -> DenseMatrix {
    // diagonally shifted so the Ritz values sit in the right half-plane
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(k, k, |i, j| {
        if i > j + 1 {
            C64::new(0.0, 0.0)
        } else if i == j {
            C64::new(3.0 * k as f64 + rng.random_range(0.0..5.0), 0.0)
        } else {
            C64::new(rng.random_range(-1.0..1.0), 0.0)
        }
    })
}

#[test]
fn determinant_route_matches_ritz_route() {
    for (k, seed) in [(2, 1), (5, 2), (12, 3), (30, 4)] {
        let h = random_hessenberg(k, seed);
        let ritz = hessenberg_eigenvalues(&h).unwrap();
        let a = bound_posterior_ritz(&ritz, 1.0, &cfg()).unwrap();
        let b = bound_posterior_determinant(&HessenbergRows::new(&h), 1.0, &cfg()).unwrap();
        assert!(rel(a, b) <= 1e-7, "k {k}: {a} vs {b}");
    }
}

fn spectrum() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.01f64..100.0, -1.4f64..1.4), 2..30)
}

fn conj_closed(raw: &[(f64, f64)]) -> RitzSpectrum {
    let mut v = Vec::new();
    for &(r, a) in raw {
        v.push(C64::from_polar(r, a));
    }
    RitzSpectrum::new(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn chain_ritz_modulus_apriori(raw in spectrum(), xi in 0.001f64..10.0, inflate in 1.0f64..3.0) {
        let r = conj_closed(&raw);
        let k = r.k();
        let sigma = r.max_modulus() * inflate;
        let a = bound_posterior_ritz(&r, xi, &cfg()).unwrap();
        let b = bound_posterior_modulus(&r, xi, &cfg()).unwrap();
        let c = bound_apriori_sqrt(sigma, k, xi).unwrap();
        prop_assert!(a <= b + 1e-8 * b.max(1.0));
        prop_assert!(b <= c + 1e-8 * c.max(1.0));
    }

    #[test]
    fn scale_covariance(raw in spectrum(), c in 0.1f64..20.0) {
        let r = conj_closed(&raw);
        let scaled = RitzSpectrum::new(r.values().iter().map(|z| z * c).collect());
        let a = bound_posterior_ritz(&r, 1.0, &cfg()).unwrap();
        let b = bound_posterior_ritz(&scaled, 1.0, &cfg()).unwrap();
        prop_assert!(rel(b, c.powf(1.5) * a) <= 1e-7);
    }

    #[test]
    fn jensen_never_exceeds_loose(mut eigs in prop::collection::vec(0.01f64..1e3, 1..40), k_frac in 0.0f64..1.0) {
        eigs.sort_by(|a, b| b.total_cmp(a));
        let lmax = eigs[0];
        let k = 1 + ((eigs.len() - 1) as f64 * k_frac) as usize;
        let lb = lambda_bar(&eigs[..k], lmax, k).unwrap();
        prop_assert!(lb <= lmax);
        prop_assert!(bound_hermitian_jensen(lb, k, 1.0).unwrap() <= bound_hermitian_loose(lmax, k, 1.0).unwrap());
    }
}
