//! JSON model documents (`"version": "weaklevy/1"`) and the models they resolve to.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charfn::{self, Method};
use crate::error::{Error, Result};
use crate::levy_core::{
    validate_wvag, BrownianSpec, GammaRay, JumpAtom, SubordinatorSpec, ThorinAtom, ThorinAtomicMeasure,
    WVaGParams,
};
use crate::levy_measure::{alpha_gamma_rays, classify_variation, rays_to_thorin, thorin_to_rays, Variation};
use crate::linalg;
use crate::moments::{self, MomentReport};

pub const SCHEMA_VERSION: &str = "weaklevy/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelSpecDocument {
    Wvag(WvagDocument),
    Vggc(VggcDocument),
    Custom(CustomDocument),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct WvagDocument {
    pub version: String,
    pub a: f64,
    pub b: f64,
    pub alpha: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ThorinAtomDocument {
    pub location: Vec<f64>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct VggcDocument {
    pub version: String,
    pub drift: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
    pub thorin_atoms: Vec<ThorinAtomDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RayDocument {
    pub direction: Vec<f64>,
    pub shape: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AtomDocument {
    pub point: Vec<f64>,
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CustomDocument {
    pub version: String,
    pub drift: Vec<f64>,
    #[serde(default)]
    pub rays: Vec<RayDocument>,
    #[serde(default)]
    pub atoms: Vec<AtomDocument>,
    pub mu: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
}

impl ModelSpecDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    fn version(&self) -> &str {
        match self {
            ModelSpecDocument::Wvag(d) => &d.version,
            ModelSpecDocument::Vggc(d) => &d.version,
            ModelSpecDocument::Custom(d) => &d.version,
        }
    }

    /// Validates the document and builds the model it describes.
    pub fn resolve(&self) -> Result<Model> {
        if self.version() != SCHEMA_VERSION {
            return Err(Error::Document(format!(
                "unsupported schema version {:?}, expected {SCHEMA_VERSION:?}",
                self.version()
            )));
        }
        match self {
            ModelSpecDocument::Wvag(d) => {
                let n = d.alpha.len();
                let sigma = matrix(&d.sigma, n)?;
                Ok(Model::Wvag(validate_wvag(d.a, d.b, d.alpha.clone(), d.mu.clone(), sigma)?))
            }
            ModelSpecDocument::Vggc(d) => {
                let n = d.mu.len();
                let bm = BrownianSpec::new(d.mu.clone(), matrix(&d.sigma, n)?)?;
                let atoms = d
                    .thorin_atoms
                    .iter()
                    .map(|a| ThorinAtom::new(a.location.clone(), a.weight))
                    .collect::<Result<Vec<_>>>()?;
                let thorin = ThorinAtomicMeasure::new(n, atoms)?;
                // validates the drift
                thorin_to_rays(&d.drift, &thorin)?;
                Ok(Model::Vggc { drift: d.drift.clone(), bm, thorin })
            }
            ModelSpecDocument::Custom(d) => {
                let n = d.mu.len();
                let bm = BrownianSpec::new(d.mu.clone(), matrix(&d.sigma, n)?)?;
                let rays = d
                    .rays
                    .iter()
                    .map(|r| GammaRay::new(r.direction.clone(), r.shape, r.rate))
                    .collect::<Result<Vec<_>>>()?;
                let atoms = d
                    .atoms
                    .iter()
                    .map(|a| JumpAtom::new(a.point.clone(), a.intensity))
                    .collect::<Result<Vec<_>>>()?;
                let sub = SubordinatorSpec::new(d.drift.clone(), rays, atoms)?;
                if sub.dim() != n {
                    return Err(Error::Dimension { expected: n, got: sub.dim() });
                }
                Ok(Model::Custom { sub, bm })
            }
        }
    }
}

fn matrix(rows: &[Vec<f64>], n: usize) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Document(format!("sigma must be a {n}x{n} array of rows")));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

/// A validated model.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Wvag(WVaGParams),
    Vggc { drift: Vec<f64>, bm: BrownianSpec, thorin: ThorinAtomicMeasure },
    Custom { sub: SubordinatorSpec, bm: BrownianSpec },
}

impl Model {
    pub fn from_json(text: &str) -> Result<Self> {
        ModelSpecDocument::from_json(text)?.resolve()
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Wvag(_) => "wvag",
            Model::Vggc { .. } => "vggc",
            Model::Custom { .. } => "custom",
        }
    }

    pub fn dim(&self) -> usize {
        self.brownian().dim()
    }

    pub fn brownian(&self) -> &BrownianSpec {
        match self {
            Model::Wvag(p) => p.brownian(),
            Model::Vggc { bm, .. } | Model::Custom { bm, .. } => bm,
        }
    }

    /// The subordinator as drift, rays and atoms.
    pub fn subordinator(&self) -> SubordinatorSpec {
        match self {
            Model::Wvag(p) => alpha_gamma_rays(p),
            Model::Vggc { drift, thorin, .. } => thorin_to_rays(drift, thorin).expect("validated at resolve"),
            Model::Custom { sub, .. } => sub.clone(),
        }
    }

    /// Drift and Thorin measure, when the subordinator has no jump atoms.
    pub fn thorin(&self) -> Option<(Vec<f64>, ThorinAtomicMeasure)> {
        match self {
            Model::Wvag(p) => Some((vec![0.0; p.dim()], ThorinAtomicMeasure::alpha_gamma(p))),
            Model::Vggc { drift, thorin, .. } => Some((drift.clone(), thorin.clone())),
            Model::Custom { sub, .. } => rays_to_thorin(sub).ok(),
        }
    }

    /// Exponent of `Y = B⊙T` through the closed form of the model's kind.
    pub fn exponent(&self, theta: &[f64]) -> Result<Complex64> {
        match self {
            Model::Wvag(p) => charfn::wvag_exponent(theta, p),
            Model::Vggc { drift, bm, thorin } => charfn::vggc_exponent(theta, drift, bm, thorin),
            Model::Custom { sub, bm } => {
                charfn::weak_pair_exponent(&vec![0.0; sub.dim()], theta, sub, bm, Method::Closed)
            }
        }
    }

    /// Exponent of the pair `(T, Y)` at `θ = (θ1, θ2)` of length `2n`.
    pub fn joint_exponent(&self, theta: &[f64], method: Method) -> Result<Complex64> {
        let n = self.dim();
        crate::error::check_dim(2 * n, theta.len())?;
        charfn::weak_pair_exponent(&theta[..n], &theta[n..], &self.subordinator(), self.brownian(), method)
    }

    pub fn moments(&self) -> Result<MomentReport> {
        match self {
            Model::Wvag(p) => Ok(moments::wvag_moments(p)),
            _ => moments::weak_bm_moments(&self.subordinator(), self.brownian()),
        }
    }

    /// Path-variation class; jump atoms are of finite activity and do not
    /// affect it.
    pub fn classify(&self) -> Variation {
        let sigma_invertible = linalg::spd_inverse(self.brownian().sigma()).is_ok();
        let (drift, thorin) = match self.thorin() {
            Some(x) => x,
            None => {
                let sub = self.subordinator();
                let rays_only = SubordinatorSpec::new(sub.drift().to_vec(), sub.rays().to_vec(), vec![])
                    .expect("subset of a valid spec");
                rays_to_thorin(&rays_only).expect("rays only")
            }
        };
        classify_variation(&drift, &thorin, sigma_invertible)
    }
}
