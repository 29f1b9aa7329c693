//! Lévy measures of VG, WVαG and VGGC processes, the Thorin-to-ray
//! transform, and path-variation classification.

mod bessel;

use std::cell::RefCell;
use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use bessel::{bessel_k, bessel_k_scaled, ln_scaled_bessel_cal, scaled_bessel_cal, Order, SEAM};

use crate::error::{check_dim, Error, Result};
use crate::levy_core::{
    time_product_cov, time_product_drift, BrownianSpec, GammaRay, IndexSet, SubordinatorSpec,
    ThorinAtom, ThorinAtomicMeasure, VGParams, WVaGParams,
};
use crate::linalg;
use crate::quad::{self, QuadOptions};

/// Density `scale·e^{⟨y,m⟩_{S⁻¹}}·𝒦_{d/2}(‖y‖_{S⁻¹}·√(c + ‖m‖²_{S⁻¹})) / ((2π)^{d/2}|S|^{1/2}‖y‖^d_{S⁻¹})`,
/// the common shape of every Brownian-over-gamma Lévy density here.
#[derive(Debug, Clone)]
struct BesselKernel {
    ln_scale: f64,
    inv: DMatrix<f64>,
    inv_m: DVector<f64>,
    radial_rate: f64,
    ln_norm: f64,
    dim: usize,
}

impl BesselKernel {
    fn new(scale: f64, m: &[f64], s: &DMatrix<f64>, c: f64) -> Result<Self> {
        let dim = m.len();
        let (inv, det) = linalg::spd_inverse(s)?;
        let inv_m = &inv * linalg::to_dvector(m);
        let m_norm_sq = linalg::dot(m, inv_m.as_slice());
        Ok(BesselKernel {
            ln_scale: scale.ln(),
            inv,
            inv_m,
            radial_rate: (c + m_norm_sq).sqrt(),
            ln_norm: 0.5 * dim as f64 * TAU.ln() + 0.5 * det.ln(),
            dim,
        })
    }

    fn ln_eval(&self, y: &[f64]) -> f64 {
        let q = linalg::bilinear(y, &self.inv, y).sqrt();
        let rho = 0.5 * self.dim as f64;
        let ln_k = ln_scaled_bessel_cal(rho, q * self.radial_rate).expect("half-integer order, positive argument");
        self.ln_scale + linalg::dot(y, self.inv_m.as_slice()) - self.ln_norm - self.dim as f64 * q.ln() + ln_k
    }

    fn eval(&self, y: &[f64]) -> f64 {
        self.ln_eval(y).exp()
    }
}

fn require_nonzero(y: &[f64]) -> Result<()> {
    if y.iter().all(|v| *v == 0.0) {
        Err(Error::invalid("Lévy densities are not defined at the origin"))
    } else if y.iter().any(|v| !v.is_finite()) {
        Err(Error::invalid("non-finite evaluation point"))
    } else {
        Ok(())
    }
}

/// Lévy density of `VG^n(b, μ, Σ)` at `v ≠ 0`.
pub fn vg_levy_density(v: &[f64], p: &VGParams) -> Result<f64> {
    let bm = p.brownian();
    check_dim(bm.dim(), v.len())?;
    require_nonzero(v)?;
    let kernel = BesselKernel::new(2.0 * p.b(), bm.mu(), bm.sigma(), 2.0 * p.b())?;
    Ok(kernel.eval(v))
}

/// The α-gamma subordinator as rays: `(α, a, b)` followed by `(e_k, β_k, b/α_k)`.
pub fn alpha_gamma_rays(p: &WVaGParams) -> SubordinatorSpec {
    let n = p.dim();
    let mut rays = Vec::with_capacity(n + 1);
    rays.push(GammaRay::new(p.alpha().to_vec(), p.a(), p.b()).expect("validated parameters"));
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        rays.push(GammaRay::new(e, p.beta()[k], p.b() / p.alpha()[k]).expect("validated parameters"));
    }
    SubordinatorSpec::new(vec![0.0; n], rays, vec![]).expect("validated parameters")
}

/// Thorin atom `(u, w)` becomes the ray `(u, w, ‖u‖²)`; the drift passes through.
pub fn thorin_to_rays(drift: &[f64], thorin: &ThorinAtomicMeasure) -> Result<SubordinatorSpec> {
    check_dim(thorin.dim(), drift.len())?;
    let rays = thorin
        .atoms()
        .iter()
        .map(|a| GammaRay::new(a.location().to_vec(), a.weight(), a.norm_sq()))
        .collect::<Result<Vec<_>>>()?;
    SubordinatorSpec::new(drift.to_vec(), rays, vec![])
}

/// Inverse of [`thorin_to_rays`]: the ray `(u, a, b)` equals `(cu, a, bc)` in law,
/// and `c = b/‖u‖²` makes the rate match `‖cu‖²`.
pub fn rays_to_thorin(sub: &SubordinatorSpec) -> Result<(Vec<f64>, ThorinAtomicMeasure)> {
    if !sub.atoms().is_empty() {
        return Err(Error::invalid("jump atoms have no Thorin representation"));
    }
    let atoms = sub
        .rays()
        .iter()
        .map(|r| {
            let c = r.rate() / linalg::dot(r.direction(), r.direction());
            ThorinAtom::new(r.direction().iter().map(|x| c * x).collect(), r.shape())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sub.drift().to_vec(), ThorinAtomicMeasure::new(sub.dim(), atoms)?))
}

/// Lévy measure of a WVαG process split into its full-support density `f0`
/// and one density `f_k` per coordinate axis.
#[derive(Debug, Clone)]
pub struct WvagLevyDecomposition {
    full: BesselKernel,
    axis: Vec<AxisDensity>,
}

#[derive(Debug, Clone, Copy)]
struct AxisDensity {
    beta: f64,
    alpha: f64,
    mu: f64,
    sigma: f64,
    b: f64,
}

impl AxisDensity {
    fn eval(&self, y: f64) -> f64 {
        let sa = self.alpha.sqrt();
        let num = sa * self.mu * y - y.abs() * (2.0 * self.b * self.sigma + self.alpha * self.mu * self.mu).sqrt();
        self.beta / y.abs() * (num / (sa * self.sigma)).exp()
    }
}

impl WvagLevyDecomposition {
    pub fn dim(&self) -> usize {
        self.axis.len()
    }

    /// `f0(y)` for `y ∈ R^n \ {0}`.
    pub fn full_support_density(&self, y: &[f64]) -> Result<f64> {
        check_dim(self.dim(), y.len())?;
        require_nonzero(y)?;
        Ok(self.full.eval(y))
    }

    /// `f_k(y)` for `y ≠ 0`, `k` zero-based.
    pub fn axis_density(&self, k: usize, y: f64) -> Result<f64> {
        let d = self
            .axis
            .get(k)
            .ok_or_else(|| Error::invalid(format!("axis {k} out of range for dimension {}", self.dim())))?;
        require_nonzero(&[y])?;
        Ok(d.eval(y))
    }
}

/// Decomposes the WVαG Lévy measure; needs `α⊙Σ` invertible.
pub fn wvag_levy_density(p: &WVaGParams) -> Result<WvagLevyDecomposition> {
    let bm = p.brownian();
    let alpha = p.alpha();
    let a_mu = time_product_drift(alpha, bm.mu())?;
    let a_sigma = time_product_cov(alpha, bm.sigma())?;
    let full = BesselKernel::new(2.0 * p.a(), &a_mu, &a_sigma, 2.0 * p.b())?;
    let mut axis = Vec::with_capacity(p.dim());
    for k in 0..p.dim() {
        let sigma = bm.sigma()[(k, k)];
        if !(sigma > 0.0) {
            return Err(Error::Singular { condition: f64::INFINITY });
        }
        axis.push(AxisDensity { beta: p.beta()[k], alpha: alpha[k], mu: bm.mu()[k], sigma, b: p.b() });
    }
    Ok(WvagLevyDecomposition { full, axis })
}

/// Density `v_J(y)` of the VGGC Lévy measure on the face indexed by `J`.
///
/// Only the coordinates of `y` in `J` are read. An atom `u` contributes when
/// its support is exactly `J`.
pub fn vggc_levy_density(
    y: &[f64],
    j: &IndexSet,
    bm: &BrownianSpec,
    thorin: &ThorinAtomicMeasure,
) -> Result<f64> {
    let n = bm.dim();
    check_dim(n, y.len())?;
    check_dim(n, thorin.dim())?;
    let idx = j.indices();
    if idx.iter().any(|&i| i >= n) {
        return Err(Error::invalid("index set exceeds dimension"));
    }
    if idx.iter().any(|&i| y[i] == 0.0 || !y[i].is_finite()) {
        return Err(Error::invalid("evaluation point has a zero coordinate inside J"));
    }
    linalg::spd_inverse(bm.sigma())?;
    let yj: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut total = 0.0;
    for atom in thorin.atoms() {
        let u = atom.location();
        let support_is_j = (0..n).all(|i| (u[i] > 0.0) == j.contains(i));
        if !support_is_j {
            continue;
        }
        let cov = linalg::submatrix(&time_product_cov(u, bm.sigma())?, idx);
        let drift_full = time_product_drift(u, bm.mu())?;
        let drift: Vec<f64> = idx.iter().map(|&i| drift_full[i]).collect();
        let kernel = BesselKernel::new(2.0 * atom.weight(), &drift, &cov, 2.0 * atom.norm_sq())?;
        total += kernel.eval(&yj);
    }
    Ok(total)
}

/// Path-variation class of a VGGC process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variation {
    FvDriftless,
    NotFv,
    FvUnknown,
}

impl Variation {
    pub fn label(self) -> &'static str {
        match self {
            Variation::FvDriftless => "FV-driftless",
            Variation::NotFv => "notFV",
            Variation::FvUnknown => "FV-unknown",
        }
    }
}

/// For finitely supported `U` the integrability condition always holds,
/// so only the drift and the invertibility of `Σ` matter.
pub fn classify_variation(drift: &[f64], thorin: &ThorinAtomicMeasure, sigma_invertible: bool) -> Variation {
    debug_assert_eq!(drift.len(), thorin.dim());
    if drift.iter().all(|d| *d == 0.0) {
        Variation::FvDriftless
    } else if sigma_invertible {
        Variation::NotFv
    } else {
        Variation::FvUnknown
    }
}

/// `∫ h(y) 𝒴(dy)` over the WVαG Lévy measure for `n = 2`: polar coordinates
/// for the `f0` part, two half-lines per axis for the `f_k` parts. Radial
/// integrals are split at `r = 1`.
pub fn integrate_wvag_levy_measure<H>(p: &WVaGParams, h: H, rel_tol: f64) -> Result<Complex64>
where
    H: Fn(&[f64]) -> Complex64,
{
    if p.dim() != 2 {
        return Err(Error::invalid("Lévy-measure quadrature is implemented for n = 2"));
    }
    let dec = wvag_levy_density(p)?;
    let inner_opts = QuadOptions { rel_tol: rel_tol * 1e-2, abs_tol: 1e-14, max_intervals: 4000 };
    let outer_opts = QuadOptions { rel_tol, abs_tol: 1e-13, max_intervals: 4000 };
    let failure: RefCell<Option<Error>> = RefCell::new(None);

    let radial = |f: &dyn Fn(f64) -> Complex64| -> Complex64 {
        let near = quad::integrate(f, 0.0, 1.0, inner_opts);
        let far = quad::integrate_to_infinity(f, 1.0, inner_opts);
        match (near, far) {
            (Ok(a), Ok(b)) => a.value + b.value,
            (Err(e), _) | (_, Err(e)) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };

    let angular = |phi: f64| -> Complex64 {
        let (s, c) = phi.sin_cos();
        radial(&|r: f64| {
            let y = [r * c, r * s];
            h(&y) * dec.full.eval(&y) * r
        })
    };
    let mut total = quad::integrate(angular, 0.0, TAU, outer_opts)?.value;
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }

    for k in 0..2 {
        let axis = dec.axis[k];
        total += radial(&|r: f64| {
            let mut plus = [0.0; 2];
            let mut minus = [0.0; 2];
            plus[k] = r;
            minus[k] = -r;
            h(&plus) * axis.eval(r) + h(&minus) * axis.eval(-r)
        });
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
    }
    Ok(total)
}

/// `∫(e^{i⟨θ,y⟩} − 1) 𝒴(dy)` by quadrature against the density decomposition.
pub fn wvag_exponent_from_density(p: &WVaGParams, theta: &[f64]) -> Result<Complex64> {
    check_dim(p.dim(), theta.len())?;
    integrate_wvag_levy_measure(
        p,
        |y| Complex64::new(0.0, linalg::dot(theta, y)).exp() - 1.0,
        1e-8,
    )
}
