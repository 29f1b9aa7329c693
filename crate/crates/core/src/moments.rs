//! First and second moments per unit time of `T` and `B⊙T`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::levy_core::{BrownianSpec, SubordinatorSpec, WVaGParams};

/// Means and covariances at `t = 1`; matrices are stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MomentReport {
    pub mean_t: Vec<f64>,
    pub cov_t: Vec<Vec<f64>>,
    pub mean_y: Vec<f64>,
    pub cov_y: Vec<Vec<f64>>,
    /// Entry `(k, l)` is `Cov(Y_k(1), T_l(1))`.
    #[serde(rename = "covYT")]
    pub cov_yt: Vec<Vec<f64>>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

impl MomentReport {
    pub fn dim(&self) -> usize {
        self.mean_t.len()
    }

    pub fn cov_t_matrix(&self) -> DMatrix<f64> {
        from_rows(&self.cov_t)
    }

    pub fn cov_y_matrix(&self) -> DMatrix<f64> {
        from_rows(&self.cov_y)
    }

    pub fn cov_yt_matrix(&self) -> DMatrix<f64> {
        from_rows(&self.cov_yt)
    }

    /// Largest absolute entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &MomentReport) -> f64 {
        let vec_diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let mat_diff = |a: &[Vec<f64>], b: &[Vec<f64>]| a.iter().zip(b).map(|(x, y)| vec_diff(x, y)).fold(0.0, f64::max);
        [
            vec_diff(&self.mean_t, &other.mean_t),
            vec_diff(&self.mean_y, &other.mean_y),
            mat_diff(&self.cov_t, &other.cov_t),
            mat_diff(&self.cov_y, &other.cov_y),
            mat_diff(&self.cov_yt, &other.cov_yt),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn from_rows(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |r, c| rows[r][c])
}

/// `E T(1) = d + Σ (a/b)u + Σ λt` and `Cov T(1) = Σ (a/b²)uᵀu + Σ λ tᵀt`.
pub fn subordinator_moments(sub: &SubordinatorSpec) -> (Vec<f64>, DMatrix<f64>) {
    let n = sub.dim();
    let mut mean = sub.drift().to_vec();
    let mut cov = DMatrix::zeros(n, n);
    let mut add = |point: &[f64], first: f64, second: f64| {
        for k in 0..n {
            mean[k] += first * point[k];
            for l in 0..n {
                cov[(k, l)] += second * point[k] * point[l];
            }
        }
    };
    for r in sub.rays() {
        add(r.direction(), r.shape() / r.rate(), r.shape() / (r.rate() * r.rate()));
    }
    for a in sub.atoms() {
        add(a.point(), a.intensity(), a.intensity());
    }
    (mean, cov)
}

/// Moments of the weak subordinate `B⊙T` together with those of `T`.
pub fn weak_bm_moments(sub: &SubordinatorSpec, bm: &BrownianSpec) -> Result<MomentReport> {
    let n = sub.dim();
    check_dim(n, bm.dim())?;
    let (mean_t, cov_t) = subordinator_moments(sub);
    let mu = bm.mu();
    let sigma = bm.sigma();

    // ∫ (t_k ∧ t_l) over the Lévy measure plus the drift part
    let mut min_time = DMatrix::from_fn(n, n, |k, l| sub.drift()[k].min(sub.drift()[l]));
    for r in sub.rays() {
        let u = r.direction();
        let w = r.shape() / r.rate();
        for k in 0..n {
            for l in 0..n {
                min_time[(k, l)] += w * u[k].min(u[l]);
            }
        }
    }
    for a in sub.atoms() {
        let t = a.point();
        for k in 0..n {
            for l in 0..n {
                min_time[(k, l)] += a.intensity() * t[k].min(t[l]);
            }
        }
    }

    let mean_y: Vec<f64> = (0..n).map(|k| mu[k] * mean_t[k]).collect();
    let cov_y = DMatrix::from_fn(n, n, |k, l| mu[k] * mu[l] * cov_t[(k, l)] + sigma[(k, l)] * min_time[(k, l)]);
    let cov_yt = DMatrix::from_fn(n, n, |k, l| mu[k] * cov_t[(k, l)]);
    Ok(MomentReport { mean_t, cov_t: rows(&cov_t), mean_y, cov_y: rows(&cov_y), cov_yt: rows(&cov_yt) })
}

/// Closed-form WVαG moments.
pub fn wvag_moments(p: &WVaGParams) -> MomentReport {
    let n = p.dim();
    let (a, b, alpha) = (p.a(), p.b(), p.alpha());
    let mu = p.brownian().mu();
    let sigma = p.brownian().sigma();
    let cov_t = DMatrix::from_fn(n, n, |k, l| {
        if k == l {
            alpha[k] / b
        } else {
            a * alpha[k] * alpha[l] / (b * b)
        }
    });
    let cov_y = DMatrix::from_fn(n, n, |k, l| {
        if k == l {
            (b * sigma[(k, k)] + mu[k] * mu[k] * alpha[k]) / b
        } else {
            (a * b * alpha[k].min(alpha[l]) * sigma[(k, l)] + a * alpha[k] * alpha[l] * mu[k] * mu[l]) / (b * b)
        }
    });
    let cov_yt = DMatrix::from_fn(n, n, |k, l| mu[k] * cov_t[(k, l)]);
    MomentReport {
        mean_t: vec![1.0; n],
        cov_t: rows(&cov_t),
        mean_y: mu.to_vec(),
        cov_y: rows(&cov_y),
        cov_yt: rows(&cov_yt),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_core::{validate_wvag, GammaRay};
    use crate::levy_measure::alpha_gamma_rays;

    #[test]
    fn deterministic_subordinator() {
        let sub = SubordinatorSpec::deterministic(vec![1.0, 2.0]).unwrap();
        let (m, c) = subordinator_moments(&sub);
        assert_eq!(m, vec![1.0, 2.0]);
        assert_eq!(c, DMatrix::zeros(2, 2));
        let rho = 0.4;
        let bm = BrownianSpec::from_rows(vec![0.0; 2], &[vec![1.0, rho], vec![rho, 1.0]]).unwrap();
        let r = weak_bm_moments(&sub, &bm).unwrap();
        assert_eq!(r.cov_y, vec![vec![1.0, rho], vec![rho, 2.0]]);
        assert_eq!(r.mean_y, vec![0.0, 0.0]);
    }

    #[test]
    fn single_axis_ray() {
        let sub = SubordinatorSpec::new(vec![0.0; 2], vec![GammaRay::new(vec![1.0, 0.0], 3.0, 2.0).unwrap()], vec![]).unwrap();
        let (m, c) = subordinator_moments(&sub);
        assert_eq!(m, vec![1.5, 0.0]);
        assert_eq!(c, DMatrix::from_row_slice(2, 2, &[0.75, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn single_ray_covariance() {
        let (a, b) = (1.5, 2.5);
        let alpha = [0.5, 2.0];
        let bm = BrownianSpec::from_rows(vec![0.3, -1.0], &[vec![2.0, 0.7], vec![0.7, 1.0]]).unwrap();
        let sub = SubordinatorSpec::new(vec![0.0; 2], vec![GammaRay::new(alpha.to_vec(), a, b).unwrap()], vec![]).unwrap();
        let r = weak_bm_moments(&sub, &bm).unwrap();
        let mu = bm.mu();
        let want = mu[0] * mu[1] * alpha[0] * alpha[1] * a / (b * b) + 0.7 * alpha[0].min(alpha[1]) * a / b;
        assert!((r.cov_y[0][1] - want).abs() < 1e-15);
    }

    #[test]
    fn alpha_gamma_subordinator_moments() {
        let p = validate_wvag(2.0, 3.0, vec![1.0, 0.5], vec![0.0; 2], DMatrix::identity(2, 2)).unwrap();
        let (m, c) = subordinator_moments(&alpha_gamma_rays(&p));
        for k in 0..2 {
            assert!((m[k] - 1.0).abs() < 1e-15);
            assert!((c[(k, k)] - p.alpha()[k] / p.b()).abs() < 1e-15);
        }
        assert!((c[(0, 1)] - 0.5 * 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn wvag_examples() {
        let p = validate_wvag(1.0, 2.0, vec![1.0, 1.0], vec![1.0, -1.0], DMatrix::identity(2, 2)).unwrap();
        let r = wvag_moments(&p);
        assert_eq!(r.mean_y, vec![1.0, -1.0]);
        assert_eq!(r.cov_y[0][0], 1.5);
        assert_eq!(r.cov_y[1][1], 1.5);
        assert_eq!(r.cov_y[0][1], -0.25);
        let via_rays = weak_bm_moments(&alpha_gamma_rays(&p), p.brownian()).unwrap();
        assert!(r.max_abs_diff(&via_rays) < 1e-12);

        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]);
        let p = validate_wvag(1.0, 2.0, vec![1.0, 1.0], vec![1.0, -1.0], s).unwrap();
        assert_eq!(wvag_moments(&p).cov_y[0][1], 0.0);

        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]);
        let p = validate_wvag(1.0, 2.0, vec![0.5, 1.5], vec![0.0; 2], s).unwrap();
        assert_eq!(wvag_moments(&p).cov_y[0][1], 0.0);
    }

    #[test]
    fn report_round_trips_through_json() {
        let p = validate_wvag(1.0, 2.0, vec![1.0, 1.0], vec![1.0, -1.0], DMatrix::identity(2, 2)).unwrap();
        let r = wvag_moments(&p);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"covY\""));
        assert_eq!(serde_json::from_str::<MomentReport>(&s).unwrap(), r);
    }
}
