use nalgebra::DMatrix;

use crate::error::{check_dim, Error, Result};
use crate::linalg;

fn check_finite(name: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} has non-finite entries")))
    }
}

fn check_nonneg_nonzero(name: &str, xs: &[f64]) -> Result<()> {
    check_finite(name, xs)?;
    if xs.iter().any(|x| *x < 0.0) {
        return Err(Error::invalid(format!("{name} must be componentwise nonnegative")));
    }
    if xs.iter().all(|x| *x == 0.0) {
        return Err(Error::invalid(format!("{name} must not be the zero vector")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

/// Drift and covariance (per unit time) of an n-dimensional Brownian motion.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianSpec {
    mu: Vec<f64>,
    sigma: DMatrix<f64>,
}

impl BrownianSpec {
    pub fn new(mu: Vec<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::invalid("Brownian motion needs dimension >= 1"));
        }
        check_dim(mu.len(), sigma.nrows())?;
        check_dim(mu.len(), sigma.ncols())?;
        check_finite("mu", &mu)?;
        check_finite("sigma", sigma.as_slice())?;
        linalg::check_psd(&sigma)?;
        Ok(BrownianSpec { mu, sigma })
    }

    /// Driftless Brownian motion with identity covariance.
    pub fn standard(dim: usize) -> Self {
        BrownianSpec { mu: vec![0.0; dim], sigma: DMatrix::identity(dim, dim) }
    }

    pub fn from_rows(mu: Vec<f64>, sigma_rows: &[Vec<f64>]) -> Result<Self> {
        let n = mu.len();
        if sigma_rows.len() != n || sigma_rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: sigma_rows.iter().map(|r| r.len()).find(|l| *l != n).unwrap_or(sigma_rows.len()),
            });
        }
        let sigma = DMatrix::from_fn(n, n, |r, c| sigma_rows[r][c]);
        Self::new(mu, sigma)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn sigma_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|r| self.sigma.row(r).iter().cloned().collect()).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|c| r == c || self.sigma[(r, c)] == 0.0))
    }
}

/// Gamma jumps travelling along a fixed direction: jumps `g·u` where `g`
/// has Lévy density `shape·exp(-rate·g)/g` on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaRay {
    direction: Vec<f64>,
    shape: f64,
    rate: f64,
}

impl GammaRay {
    pub fn new(direction: Vec<f64>, shape: f64, rate: f64) -> Result<Self> {
        check_nonneg_nonzero("ray direction", &direction)?;
        check_positive("ray shape", shape)?;
        check_positive("ray rate", rate)?;
        Ok(GammaRay { direction, shape, rate })
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// The same jump law with a unit-norm direction: `(u, a, b) ≡ (u/‖u‖, a, b/‖u‖)`.
    pub fn normalized(&self) -> GammaRay {
        let len = linalg::norm(&self.direction);
        GammaRay {
            direction: self.direction.iter().map(|x| x / len).collect(),
            shape: self.shape,
            rate: self.rate / len,
        }
    }
}

/// Fixed-size jumps arriving as a Poisson stream.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpAtom {
    point: Vec<f64>,
    intensity: f64,
}

impl JumpAtom {
    pub fn new(point: Vec<f64>, intensity: f64) -> Result<Self> {
        check_nonneg_nonzero("atom point", &point)?;
        check_positive("atom intensity", intensity)?;
        Ok(JumpAtom { point, intensity })
    }

    pub fn point(&self) -> &[f64] {
        &self.point
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }
}

/// Lévy data of an n-dimensional subordinator: drift plus a superposition
/// of gamma rays and jump atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatorSpec {
    drift: Vec<f64>,
    rays: Vec<GammaRay>,
    atoms: Vec<JumpAtom>,
}

impl SubordinatorSpec {
    pub fn new(drift: Vec<f64>, rays: Vec<GammaRay>, atoms: Vec<JumpAtom>) -> Result<Self> {
        let n = drift.len();
        if n == 0 {
            return Err(Error::invalid("subordinator needs dimension >= 1"));
        }
        check_finite("drift", &drift)?;
        if drift.iter().any(|d| *d < 0.0) {
            return Err(Error::invalid("drift must be componentwise nonnegative"));
        }
        for r in &rays {
            check_dim(n, r.direction.len())?;
        }
        for a in &atoms {
            check_dim(n, a.point.len())?;
        }
        Ok(SubordinatorSpec { drift, rays, atoms })
    }

    /// Pure-drift subordinator `t ↦ t·d`.
    pub fn deterministic(drift: Vec<f64>) -> Result<Self> {
        Self::new(drift, Vec::new(), Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.drift.len()
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn rays(&self) -> &[GammaRay] {
        &self.rays
    }

    pub fn atoms(&self) -> &[JumpAtom] {
        &self.atoms
    }

    pub fn has_drift(&self) -> bool {
        self.drift.iter().any(|d| *d != 0.0)
    }

    /// Equivalent spec with unit-norm ray directions and rays of equal
    /// direction and rate merged (their shapes add).
    pub fn canonical(&self) -> SubordinatorSpec {
        let mut merged: Vec<GammaRay> = Vec::new();
        for ray in self.rays.iter().map(GammaRay::normalized) {
            let same = merged.iter_mut().find(|m| {
                (m.rate - ray.rate).abs() <= 1e-12 * m.rate
                    && m.direction.iter().zip(&ray.direction).all(|(x, y)| (x - y).abs() <= 1e-12)
            });
            match same {
                Some(m) => m.shape += ray.shape,
                None => merged.push(ray),
            }
        }
        SubordinatorSpec { drift: self.drift.clone(), rays: merged, atoms: self.atoms.clone() }
    }

    /// Union of the jump parts of two specs with the drifts added.
    pub fn superpose(&self, other: &SubordinatorSpec) -> Result<SubordinatorSpec> {
        check_dim(self.dim(), other.dim())?;
        let drift = self.drift.iter().zip(&other.drift).map(|(a, b)| a + b).collect();
        let rays = self.rays.iter().chain(&other.rays).cloned().collect();
        let atoms = self.atoms.iter().chain(&other.atoms).cloned().collect();
        SubordinatorSpec::new(drift, rays, atoms)
    }
}

/// One point mass of a finitely supported Thorin measure.
#[derive(Debug, Clone, PartialEq)]
pub struct ThorinAtom {
    location: Vec<f64>,
    weight: f64,
}

impl ThorinAtom {
    pub fn new(location: Vec<f64>, weight: f64) -> Result<Self> {
        check_nonneg_nonzero("Thorin atom location", &location)?;
        check_positive("Thorin atom weight", weight)?;
        Ok(ThorinAtom { location, weight })
    }

    pub fn location(&self) -> &[f64] {
        &self.location
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn norm_sq(&self) -> f64 {
        linalg::dot(&self.location, &self.location)
    }
}

/// Finitely supported Thorin measure on `[0, ∞)^n \ {0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThorinAtomicMeasure {
    dim: usize,
    atoms: Vec<ThorinAtom>,
}

impl ThorinAtomicMeasure {
    pub fn new(dim: usize, atoms: Vec<ThorinAtom>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("Thorin measure needs dimension >= 1"));
        }
        for a in &atoms {
            check_dim(dim, a.location.len())?;
        }
        Ok(ThorinAtomicMeasure { dim, atoms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[ThorinAtom] {
        &self.atoms
    }

    /// The Thorin measure of the α-gamma subordinator:
    /// `a·δ_{bα/‖α‖²} + Σ_k β_k·δ_{b e_k/α_k}`.
    pub fn alpha_gamma(p: &WVaGParams) -> ThorinAtomicMeasure {
        let n = p.dim();
        let alpha_sq = linalg::dot(&p.alpha, &p.alpha);
        let mut atoms = vec![ThorinAtom {
            location: p.alpha.iter().map(|a| p.b * a / alpha_sq).collect(),
            weight: p.a,
        }];
        for k in 0..n {
            let mut loc = vec![0.0; n];
            loc[k] = p.b / p.alpha[k];
            atoms.push(ThorinAtom { location: loc, weight: p.beta[k] });
        }
        ThorinAtomicMeasure { dim: n, atoms }
    }
}

/// Parameters of a weak variance-α-gamma process.
#[derive(Debug, Clone, PartialEq)]
pub struct WVaGParams {
    a: f64,
    b: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    brownian: BrownianSpec,
}

impl WVaGParams {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Idiosyncratic shapes `β_k = (b − a·α_k)/α_k`.
    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn brownian(&self) -> &BrownianSpec {
        &self.brownian
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }
}

/// Checks `b > a·α_k` for all `k`, `n >= 2` and the Brownian invariants, and
/// computes the idiosyncratic shapes `β_k`.
pub fn validate_wvag(
    a: f64,
    b: f64,
    alpha: Vec<f64>,
    mu: Vec<f64>,
    sigma: DMatrix<f64>,
) -> Result<WVaGParams> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    if alpha.len() < 2 {
        return Err(Error::invalid("WVaG requires dimension n >= 2"));
    }
    for (k, ak) in alpha.iter().enumerate() {
        check_positive(&format!("alpha[{k}]"), *ak)?;
        if b <= a * ak {
            return Err(Error::invalid(format!(
                "b = {b} must exceed a*alpha[{k}] = {}",
                a * ak
            )));
        }
    }
    check_dim(alpha.len(), mu.len())?;
    let brownian = BrownianSpec::new(mu, sigma)?;
    let beta = alpha.iter().map(|ak| (b - a * ak) / ak).collect();
    Ok(WVaGParams { a, b, alpha, beta, brownian })
}

/// Parameters of a variance-gamma process `B∘(G·e)` with `G` standard gamma of rate `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct VGParams {
    b: f64,
    brownian: BrownianSpec,
}

impl VGParams {
    pub fn new(b: f64, brownian: BrownianSpec) -> Result<Self> {
        check_positive("b", b)?;
        Ok(VGParams { b, brownian })
    }

    /// Univariate convenience constructor.
    pub fn univariate(b: f64, mu: f64, sigma_sq: f64) -> Result<Self> {
        Self::new(b, BrownianSpec::new(vec![mu], DMatrix::from_element(1, 1, sigma_sq))?)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn brownian(&self) -> &BrownianSpec {
        &self.brownian
    }

    pub fn dim(&self) -> usize {
        self.brownian.dim()
    }
}

/// Point mass of a finite Lévy measure on `R^n \ {0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMass {
    pub point: Vec<f64>,
    pub mass: f64,
}

/// Finite atomic Lévy measure.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteAtomicMeasure {
    dim: usize,
    atoms: Vec<PointMass>,
}

impl FiniteAtomicMeasure {
    pub fn new(dim: usize, atoms: Vec<PointMass>) -> Result<Self> {
        for a in &atoms {
            check_dim(dim, a.point.len())?;
            check_finite("atom point", &a.point)?;
            if a.point.iter().all(|x| *x == 0.0) {
                return Err(Error::invalid("Lévy measure may not charge the origin"));
            }
            check_positive("atom mass", a.mass)?;
        }
        Ok(FiniteAtomicMeasure { dim, atoms })
    }

    pub fn empty(dim: usize) -> Self {
        FiniteAtomicMeasure { dim, atoms: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[PointMass] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Merges coincident atoms and sorts them lexicographically.
    pub fn canonical(&self) -> FiniteAtomicMeasure {
        let mut atoms = self.atoms.clone();
        atoms.sort_by(|x, y| {
            x.point
                .iter()
                .zip(&y.point)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut out: Vec<PointMass> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match out.last_mut() {
                Some(last) if last.point == a.point => last.mass += a.mass,
                _ => out.push(a),
            }
        }
        FiniteAtomicMeasure { dim: self.dim, atoms: out }
    }
}

/// Description of the jump measure of a weak pair `(T, X⊙T)` with a
/// Brownian subordinate: jumps of `T` marked by `N(t⊙μ, t⊙Σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureDescription {
    pub rays: Vec<GammaRay>,
    pub atoms: Vec<JumpAtom>,
    pub marking_kernel: &'static str,
}

/// Characteristics of the 2n-dimensional weak pair.
///
/// `m1` and `m2` are drifts relative to the zero truncation function: the
/// jump part of a ray/atom pair always has finite variation, so the pair
/// is `d`-drift plus uncompensated jumps plus the Gaussian block `d⊙Σ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakPairCharacteristics {
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    pub theta: DMatrix<f64>,
    pub measure: MeasureDescription,
}

pub fn weak_pair_characteristics(
    sub: &SubordinatorSpec,
    bm: &BrownianSpec,
) -> Result<WeakPairCharacteristics> {
    check_dim(sub.dim(), bm.dim())?;
    let n = sub.dim();
    let m1 = sub.drift().to_vec();
    let m2 = super::time_product_drift(sub.drift(), bm.mu())?;
    let block = super::time_product_cov(sub.drift(), bm.sigma())?;
    let mut theta = DMatrix::zeros(2 * n, 2 * n);
    theta.view_mut((n, n), (n, n)).copy_from(&block);
    Ok(WeakPairCharacteristics {
        m1,
        m2,
        theta,
        measure: MeasureDescription {
            rays: sub.rays().to_vec(),
            atoms: sub.atoms().to_vec(),
            marking_kernel: "gaussian(t*mu, t*Sigma)",
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eye(n: usize) -> DMatrix<f64> {
        DMatrix::identity(n, n)
    }

    #[test]
    fn beta_from_validation() {
        let p = validate_wvag(1.0, 2.0, vec![1.0, 1.0], vec![0.0; 2], eye(2)).unwrap();
        assert_eq!(p.beta(), &[1.0, 1.0]);
        let p = validate_wvag(2.0, 3.0, vec![1.0, 0.5], vec![0.0; 2], eye(2)).unwrap();
        assert_eq!(p.beta(), &[1.0, 4.0]);
    }

    #[test]
    fn boundary_and_dimension_violations() {
        assert!(validate_wvag(1.0, 1.0, vec![1.0, 1.0], vec![0.0; 2], eye(2)).is_err());
        assert!(validate_wvag(1.0, 2.0, vec![1.0], vec![0.0], eye(1)).is_err());
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            validate_wvag(1.0, 2.0, vec![1.0, 1.0], vec![0.0; 2], bad),
            Err(Error::NotPsd)
        ));
    }

    #[test]
    fn ray_and_atom_invariants() {
        assert!(GammaRay::new(vec![0.0, 0.0], 1.0, 1.0).is_err());
        assert!(GammaRay::new(vec![-1.0, 1.0], 1.0, 1.0).is_err());
        assert!(GammaRay::new(vec![1.0, 0.0], 0.0, 1.0).is_err());
        assert!(JumpAtom::new(vec![1.0, 0.0], -1.0).is_err());
        assert!(SubordinatorSpec::deterministic(vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn thorin_measure_of_alpha_gamma() {
        let p = validate_wvag(2.0, 3.0, vec![1.0, 0.5], vec![0.0; 2], eye(2)).unwrap();
        let u = ThorinAtomicMeasure::alpha_gamma(&p);
        assert_eq!(u.atoms().len(), 3);
        assert_eq!(u.atoms()[0].location(), &[3.0 / 1.25, 1.5 / 1.25]);
        assert_eq!(u.atoms()[2].location(), &[0.0, 6.0]);
        assert_eq!(u.atoms()[2].weight(), 4.0);
    }

    #[test]
    fn pair_characteristics_blocks() {
        let sub = SubordinatorSpec::deterministic(vec![1.0, 2.0]).unwrap();
        let bm = BrownianSpec::new(vec![1.0, 1.0], DMatrix::from_element(2, 2, 1.0)).unwrap();
        let ch = weak_pair_characteristics(&sub, &bm).unwrap();
        assert_eq!(ch.m2, vec![1.0, 2.0]);
        assert_eq!(ch.theta[(2, 3)], 1.0);
        assert_eq!(ch.theta[(3, 3)], 2.0);
        assert_eq!(ch.theta.view((0, 0), (2, 4)).abs().max(), 0.0);
    }
}
