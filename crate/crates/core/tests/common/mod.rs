#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use weaklevy::levy_core::{
    validate_wvag, BrownianSpec, GammaRay, JumpAtom, SubordinatorSpec, WVaGParams,
};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// `L·Lᵀ + 0.1·I` with entries of `L` uniform on (−1, 1).
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let l = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    &l * l.transpose() + DMatrix::identity(n, n) * 0.1
}

pub fn random_vec<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn random_brownian<R: Rng>(rng: &mut R, n: usize) -> BrownianSpec {
    let mu = random_vec(rng, n, -1.0, 1.0);
    BrownianSpec::new(mu, random_spd(rng, n)).unwrap()
}

pub fn random_wvag<R: Rng>(rng: &mut R, n: usize) -> WVaGParams {
    let a = rng.random_range(0.2..3.0);
    let alpha = random_vec(rng, n, 0.2, 3.0);
    let amax = alpha.iter().cloned().fold(0.0, f64::max);
    let b = a * amax * rng.random_range(1.05..3.0);
    let mu = random_vec(rng, n, -1.0, 1.0);
    validate_wvag(a, b, alpha, mu, random_spd(rng, n)).unwrap()
}

/// Nonnegative direction with at least one positive coordinate; some
/// coordinates are zeroed so that rays land on lower-dimensional faces.
pub fn random_direction<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..n)
            .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.1..2.0) })
            .collect();
        if u.iter().any(|x| *x > 0.0) {
            return u;
        }
    }
}

pub fn random_rays<R: Rng>(rng: &mut R, n: usize, count: usize) -> Vec<GammaRay> {
    (0..count)
        .map(|_| {
            GammaRay::new(random_direction(rng, n), rng.random_range(0.2..3.0), rng.random_range(0.5..5.0)).unwrap()
        })
        .collect()
}

/// Drift, rays and atoms, all optional in the draw.
pub fn random_subordinator<R: Rng>(rng: &mut R, n: usize) -> SubordinatorSpec {
    let drift = if rng.random_bool(0.5) { random_vec(rng, n, 0.0, 1.0) } else { vec![0.0; n] };
    let n_rays = rng.random_range(1..=4);
    let rays = random_rays(rng, n, n_rays);
    let n_atoms = rng.random_range(0..=2);
    let atoms = (0..n_atoms)
        .map(|_| JumpAtom::new(random_direction(rng, n), rng.random_range(0.1..2.0)).unwrap())
        .collect();
    SubordinatorSpec::new(drift, rays, atoms).unwrap()
}

pub fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!((got - want).abs() <= tol, "{what}: got {got}, want {want}, diff {}", (got - want).abs());
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}
