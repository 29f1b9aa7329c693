//! Characteristic exponents `Ψ` with `E exp(i⟨θ, X(t)⟩) = exp(t·Ψ(θ))`.

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::levy_core::{
    spacings, time_product_cov, time_product_drift, BrownianSpec, SubordinatorSpec,
    ThorinAtomicMeasure, VGParams, WVaGParams,
};
use crate::linalg;
use crate::quad::{self, QuadOptions};
use crate::special::exp_integral_e1;

/// Complex exponent value; serialized externally as an `(re, im)` pair.
pub type ComplexValue = Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Principal logarithm, refusing arguments off the right half-plane.
pub(crate) fn ln_right_half_plane(z: Complex64) -> Result<Complex64> {
    if z.re > 0.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(z.ln())
    } else {
        Err(Error::Branch { re: z.re, im: z.im })
    }
}

/// `i⟨μ,θ⟩ − ½ θΣθᵀ`.
pub fn bm_exponent(theta: &[f64], bm: &BrownianSpec) -> Result<ComplexValue> {
    check_dim(bm.dim(), theta.len())?;
    let drift = linalg::dot(bm.mu(), theta);
    let quad = linalg::bilinear(theta, bm.sigma(), theta);
    Ok(Complex64::new(-0.5 * quad, drift))
}

/// Exponent of `(B_1(t_1), …, B_n(t_n))`: `i⟨t⊙μ, θ⟩ − ½ θ(t⊙Σ)θᵀ`.
pub fn multitime_exponent(t: &[f64], theta: &[f64], bm: &BrownianSpec) -> Result<ComplexValue> {
    check_dim(bm.dim(), theta.len())?;
    let drift = time_product_drift(t, bm.mu())?;
    let cov = time_product_cov(t, bm.sigma())?;
    Ok(Complex64::new(-0.5 * linalg::bilinear(theta, &cov, theta), linalg::dot(&drift, theta)))
}

/// The same exponent through the spacing sum `Σ_k Δt_(k)·Ψ(π_{(k),…,(n)}(θ))`.
pub fn multitime_exponent_by_spacings(
    t: &[f64],
    theta: &[f64],
    bm: &BrownianSpec,
) -> Result<ComplexValue> {
    check_dim(bm.dim(), theta.len())?;
    check_dim(bm.dim(), t.len())?;
    if t.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::invalid("time vector must be componentwise nonnegative"));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for s in spacings(t) {
        let mut proj = vec![0.0; theta.len()];
        for &i in &s.active {
            proj[i] = theta[i];
        }
        acc += s.delta * bm_exponent(&proj, bm)?;
    }
    Ok(acc)
}

/// `−b·ln{(b − i⟨μ,θ⟩ + ½‖θ‖²_Σ)/b}`.
pub fn vg_exponent(theta: &[f64], p: &VGParams) -> Result<ComplexValue> {
    let bm = p.brownian();
    check_dim(bm.dim(), theta.len())?;
    let b = p.b();
    let arg = Complex64::new(
        b + 0.5 * linalg::bilinear(theta, bm.sigma(), theta),
        -linalg::dot(bm.mu(), theta),
    ) / b;
    Ok(-b * ln_right_half_plane(arg)?)
}

/// Closed-form WVαG exponent: one common VG term along `α` plus one
/// univariate VG term per coordinate.
pub fn wvag_exponent(theta: &[f64], p: &WVaGParams) -> Result<ComplexValue> {
    let bm = p.brownian();
    check_dim(p.dim(), theta.len())?;
    let (a, b, alpha) = (p.a(), p.b(), p.alpha());
    let mu = bm.mu();
    let sigma = bm.sigma();
    let mut am_theta = 0.0;
    let mut quad = 0.0;
    for k in 0..theta.len() {
        am_theta += alpha[k] * mu[k] * theta[k];
        for l in 0..theta.len() {
            quad += theta[k] * sigma[(k, l)] * alpha[k].min(alpha[l]) * theta[l];
        }
    }
    let common = Complex64::new(b + 0.5 * quad, -am_theta) / b;
    let mut psi = -a * ln_right_half_plane(common)?;
    for k in 0..theta.len() {
        let arg = Complex64::new(
            b + 0.5 * alpha[k] * theta[k] * theta[k] * sigma[(k, k)],
            -alpha[k] * mu[k] * theta[k],
        ) / b;
        psi -= p.beta()[k] * ln_right_half_plane(arg)?;
    }
    Ok(psi)
}

/// VGGC exponent for a finitely supported Thorin measure.
pub fn vggc_exponent(
    theta: &[f64],
    drift: &[f64],
    bm: &BrownianSpec,
    thorin: &ThorinAtomicMeasure,
) -> Result<ComplexValue> {
    check_dim(bm.dim(), theta.len())?;
    check_dim(bm.dim(), thorin.dim())?;
    let mut psi = multitime_exponent(drift, theta, bm)?;
    for atom in thorin.atoms() {
        let u = atom.location();
        let norm_sq = atom.norm_sq();
        let drift_u = time_product_drift(u, bm.mu())?;
        let cov_u = time_product_cov(u, bm.sigma())?;
        let arg = Complex64::new(
            norm_sq + 0.5 * linalg::bilinear(theta, &cov_u, theta),
            -linalg::dot(&drift_u, theta),
        ) / norm_sq;
        psi -= atom.weight() * ln_right_half_plane(arg)?;
    }
    Ok(psi)
}

/// Laplace exponent `⟨d,λ⟩ + Σ w·ln{(‖u‖² + ⟨λ,u⟩)/‖u‖²}` of a Thorin subordinator.
pub fn thorin_laplace(lambda: &[f64], drift: &[f64], thorin: &ThorinAtomicMeasure) -> Result<f64> {
    check_dim(thorin.dim(), lambda.len())?;
    check_dim(thorin.dim(), drift.len())?;
    if lambda.iter().any(|l| !(*l >= 0.0)) {
        return Err(Error::invalid("Laplace argument must be componentwise nonnegative"));
    }
    let mut acc = linalg::dot(drift, lambda);
    for atom in thorin.atoms() {
        let norm_sq = atom.norm_sq();
        acc += atom.weight() * ((norm_sq + linalg::dot(lambda, atom.location())) / norm_sq).ln();
    }
    Ok(acc)
}

/// Laplace exponent of a ray/atom subordinator: `⟨d,λ⟩ + Σ a·ln((b+⟨λ,u⟩)/b) + Σ ν(1 − e^{−⟨λ,t⟩})`.
pub fn subordinator_laplace(lambda: &[f64], sub: &SubordinatorSpec) -> Result<f64> {
    check_dim(sub.dim(), lambda.len())?;
    if lambda.iter().any(|l| !(*l >= 0.0)) {
        return Err(Error::invalid("Laplace argument must be componentwise nonnegative"));
    }
    let mut acc = linalg::dot(sub.drift(), lambda);
    for r in sub.rays() {
        acc += r.shape() * ((r.rate() + linalg::dot(lambda, r.direction())) / r.rate()).ln();
    }
    for a in sub.atoms() {
        acc += a.intensity() * (1.0 - (-linalg::dot(lambda, a.point())).exp());
    }
    Ok(acc)
}

/// Characteristic exponent of the subordinator alone.
pub fn subordinator_exponent(theta: &[f64], sub: &SubordinatorSpec) -> Result<ComplexValue> {
    check_dim(sub.dim(), theta.len())?;
    let mut psi = I * linalg::dot(sub.drift(), theta);
    for r in sub.rays() {
        let arg = Complex64::new(r.rate(), -linalg::dot(theta, r.direction())) / r.rate();
        psi -= r.shape() * ln_right_half_plane(arg)?;
    }
    for a in sub.atoms() {
        psi += a.intensity() * ((I * linalg::dot(theta, a.point())).exp() - 1.0);
    }
    Ok(psi)
}

/// How the per-ray integral of the weak-pair exponent is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Frullani closed form `−a·ln((b+z)/b)`.
    #[default]
    Closed,
    /// Adaptive quadrature of `(Φ_{(gu, B(gu))}(θ) − 1)·a e^{−bg}/g`.
    Quadrature,
}

/// Relative tolerance of the per-ray quadrature.
pub const QUADRATURE_REL_TOL: f64 = 1e-10;

/// `z(u) = −i⟨θ1,u⟩ − i⟨u⊙μ,θ2⟩ + ½‖θ2‖²_{u⊙Σ}`, so that the pair's
/// characteristic function at a jump `g·u` is `exp(−g·z)`.
pub(crate) fn ray_z(theta1: &[f64], theta2: &[f64], u: &[f64], bm: &BrownianSpec) -> Result<Complex64> {
    let cov = time_product_cov(u, bm.sigma())?;
    let drift = time_product_drift(u, bm.mu())?;
    Ok(Complex64::new(
        0.5 * linalg::bilinear(theta2, &cov, theta2),
        -linalg::dot(theta1, u) - linalg::dot(&drift, theta2),
    ))
}

/// Exponent of the weak pair `(T, B⊙T)` at `θ = (θ1, θ2)`.
pub fn weak_pair_exponent(
    theta1: &[f64],
    theta2: &[f64],
    sub: &SubordinatorSpec,
    bm: &BrownianSpec,
    method: Method,
) -> Result<ComplexValue> {
    let n = sub.dim();
    check_dim(n, bm.dim())?;
    check_dim(n, theta1.len())?;
    check_dim(n, theta2.len())?;
    let mut psi = I * linalg::dot(sub.drift(), theta1) + multitime_exponent(sub.drift(), theta2, bm)?;
    for r in sub.rays() {
        psi += match method {
            Method::Closed => {
                let z = ray_z(theta1, theta2, r.direction(), bm)?;
                -r.shape() * ln_right_half_plane((r.rate() + z) / r.rate())?
            }
            Method::Quadrature => ray_integral_by_quadrature(theta1, theta2, r.direction(), r.shape(), r.rate(), bm)?,
        };
    }
    for a in sub.atoms() {
        let t = a.point();
        let phi = (I * linalg::dot(theta1, t) + multitime_exponent(t, theta2, bm)?).exp();
        psi += a.intensity() * (phi - 1.0);
    }
    Ok(psi)
}

fn ray_integral_by_quadrature(
    theta1: &[f64],
    theta2: &[f64],
    u: &[f64],
    shape: f64,
    rate: f64,
    bm: &BrownianSpec,
) -> Result<Complex64> {
    // truncate where shape·e^{−rate·g} < 1e-16·rate; the dropped "−1" tail is added back exactly
    let cutoff = ((shape / (1e-16 * rate)).ln() / rate).max(1.0 / rate);
    let n = u.len();
    let integrand = |g: f64| -> Complex64 {
        let t: Vec<f64> = u.iter().map(|x| g * x).collect();
        let inner = multitime_exponent(&t, theta2, bm).expect("dimensions checked by caller");
        let phi = (I * linalg::dot(theta1, &t) + inner).exp();
        debug_assert_eq!(t.len(), n);
        (phi - 1.0) * (shape * (-rate * g).exp() / g)
    };
    let opts = QuadOptions { rel_tol: QUADRATURE_REL_TOL, abs_tol: 1e-15, max_intervals: 5000 };
    let body = quad::integrate(integrand, 0.0, cutoff, opts)?;
    Ok(body.value - shape * exp_integral_e1(rate * cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_core::{validate_wvag, GammaRay, ThorinAtom};
    use nalgebra::DMatrix;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn brownian_examples() {
        let bm = BrownianSpec::standard(2);
        assert_eq!(bm_exponent(&[0.0, 0.0], &bm).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(bm_exponent(&[1.0, 1.0], &bm).unwrap(), Complex64::new(-1.0, 0.0));
        let bm = BrownianSpec::from_rows(vec![0.3, -1.0], &[vec![2.0, 0.4], vec![0.4, 1.0]]).unwrap();
        let a = bm_exponent(&[0.7, -0.2], &bm).unwrap();
        let b = bm_exponent(&[-0.7, 0.2], &bm).unwrap();
        assert_eq!(a, b.conj());
    }

    #[test]
    fn multitime_examples() {
        let rho = 0.3;
        let bm = BrownianSpec::from_rows(vec![0.0, 0.0], &[vec![1.0, rho], vec![rho, 1.0]]).unwrap();
        let got = multitime_exponent(&[1.0, 3.0], &[1.0, 1.0], &bm).unwrap();
        assert!(close(got, Complex64::new(-2.0 - rho, 0.0), 1e-15));
        let by_spacing = multitime_exponent_by_spacings(&[1.0, 3.0], &[1.0, 1.0], &bm).unwrap();
        assert!(close(got, by_spacing, 1e-12));
        assert_eq!(multitime_exponent(&[0.0, 0.0], &[1.0, 2.0], &bm).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn multitime_diagonal_is_sum_of_univariate() {
        let bm = BrownianSpec::from_rows(vec![0.5, -1.0], &[vec![2.0, 0.0], vec![0.0, 0.5]]).unwrap();
        let t = [0.7, 2.0];
        let th = [1.3, -0.4];
        let got = multitime_exponent(&t, &th, &bm).unwrap();
        let want: Complex64 = (0..2)
            .map(|k| t[k] * Complex64::new(-0.5 * bm.sigma()[(k, k)] * th[k] * th[k], bm.mu()[k] * th[k]))
            .sum();
        assert!(close(got, want, 1e-14));
    }

    #[test]
    fn vg_univariate_value() {
        let p = VGParams::univariate(1.0, 0.0, 1.0).unwrap();
        let got = vg_exponent(&[1.0], &p).unwrap();
        assert!((got.re + 1.5f64.ln()).abs() < 1e-15 && got.im == 0.0);
        assert!((got.re - -0.405465).abs() < 1e-6);
    }

    #[test]
    fn wvag_value() {
        let p = validate_wvag(1.0, 2.0, vec![1.0, 1.0], vec![0.0; 2], DMatrix::identity(2, 2)).unwrap();
        let got = wvag_exponent(&[1.0, 1.0], &p).unwrap();
        let want = -(1.5f64.ln()) - 2.0 * 1.25f64.ln();
        assert!((got.re - want).abs() < 1e-15);
        assert_eq!(wvag_exponent(&[0.0, 0.0], &p).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn vggc_single_atom() {
        let u = ThorinAtomicMeasure::new(2, vec![ThorinAtom::new(vec![1.0, 1.0], 1.0).unwrap()]).unwrap();
        let got = vggc_exponent(&[1.0, 0.0], &[0.0, 0.0], &BrownianSpec::standard(2), &u).unwrap();
        assert!((got.re + 1.25f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn thorin_laplace_examples() {
        let u = ThorinAtomicMeasure::new(2, vec![ThorinAtom::new(vec![1.0, 1.0], 1.0).unwrap()]).unwrap();
        assert_eq!(thorin_laplace(&[0.0, 0.0], &[0.0, 0.0], &u).unwrap(), 0.0);
        let v = thorin_laplace(&[1.0, 1.0], &[0.0, 0.0], &u).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-15);
        assert!(thorin_laplace(&[-1.0, 0.0], &[0.0, 0.0], &u).is_err());
    }

    #[test]
    fn pair_exponent_vanishes_at_origin_and_matches_subordinator() {
        let sub = SubordinatorSpec::new(
            vec![0.2, 0.0],
            vec![GammaRay::new(vec![1.0, 0.5], 1.5, 2.0).unwrap()],
            vec![crate::levy_core::JumpAtom::new(vec![0.0, 1.0], 0.7).unwrap()],
        )
        .unwrap();
        let bm = BrownianSpec::from_rows(vec![0.1, -0.3], &[vec![1.0, 0.2], vec![0.2, 2.0]]).unwrap();
        let zero = weak_pair_exponent(&[0.0; 2], &[0.0; 2], &sub, &bm, Method::Closed).unwrap();
        assert_eq!(zero, Complex64::new(0.0, 0.0));
        let th1 = [0.8, -1.1];
        let got = weak_pair_exponent(&th1, &[0.0; 2], &sub, &bm, Method::Closed).unwrap();
        assert!(close(got, subordinator_exponent(&th1, &sub).unwrap(), 1e-14));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let sub = SubordinatorSpec::new(
            vec![0.0, 0.0],
            vec![GammaRay::new(vec![1.0, 0.5], 1.5, 2.0).unwrap()],
            vec![],
        )
        .unwrap();
        let bm = BrownianSpec::from_rows(vec![0.1, -0.3], &[vec![1.0, 0.2], vec![0.2, 2.0]]).unwrap();
        let (t1, t2) = ([0.3, -2.0], [1.5, 0.4]);
        let c = weak_pair_exponent(&t1, &t2, &sub, &bm, Method::Closed).unwrap();
        let q = weak_pair_exponent(&t1, &t2, &sub, &bm, Method::Quadrature).unwrap();
        assert!((c - q).norm() <= 1e-8 * c.norm(), "{c} vs {q}");
    }

    #[test]
    fn branch_guard() {
        assert!(matches!(
            ln_right_half_plane(Complex64::new(0.0, 1.0)),
            Err(Error::Branch { .. })
        ));
    }
}
