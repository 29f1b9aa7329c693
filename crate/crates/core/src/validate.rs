//! Empirical characteristic functions and moment tests for samples of
//! `(T, Y)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charfn::vg_exponent;
use crate::error::{Error, Result};
use crate::levy_core::VGParams;
use crate::linalg;
use crate::moments::MomentReport;

pub const DEFAULT_THRESHOLD: f64 = 4.0;

const GRID_VALUES: [f64; 5] = [-3.0, -1.5, 0.5, 1.5, 3.0];
// rows per partial sum of the ECF
const CHUNK: usize = 4096;

fn check_samples(samples: &[Vec<f64>], width: usize) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::invalid("empty sample set"));
    }
    if let Some(row) = samples.iter().find(|r| r.len() != width) {
        return Err(Error::Dimension { expected: width, got: row.len() });
    }
    Ok(())
}

/// `(1/N) Σ exp(i⟨θ, x⟩)`.
pub fn ecf(samples: &[Vec<f64>], theta: &[f64]) -> Result<Complex64> {
    check_samples(samples, theta.len())?;
    let partial: Vec<Complex64> = samples
        .par_chunks(CHUNK)
        .map(|c| c.iter().map(|x| Complex64::from_polar(1.0, linalg::dot(theta, x))).sum())
        .collect();
    Ok(partial.into_iter().sum::<Complex64>() / samples.len() as f64)
}

/// Comparison of an ECF against a reference on a grid of frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ECFReport {
    pub theta_grid: Vec<Vec<f64>>,
    pub ecf: Vec<Complex64>,
    /// Analytic characteristic function, or the second sample's ECF in a two-sample test.
    pub analytic: Vec<Complex64>,
    pub studentized: Vec<f64>,
    pub max_studentized: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl ECFReport {
    fn assemble(theta_grid: Vec<Vec<f64>>, ecf: Vec<Complex64>, analytic: Vec<Complex64>, studentized: Vec<f64>, threshold: f64) -> Self {
        let max_studentized = studentized.iter().cloned().fold(0.0, f64::max);
        ECFReport { theta_grid, ecf, analytic, studentized, max_studentized, threshold, pass: max_studentized <= threshold }
    }
}

/// CLT standard error of an ECF at a point where the true value is `phi`,
/// floored at `1/√N`.
fn ecf_standard_error(phi: Complex64, n: usize) -> f64 {
    let n = n as f64;
    ((1.0 - phi.norm_sqr()).max(0.0) / n).sqrt().max(1.0 / n.sqrt())
}

/// Tests `ecf(θ)` against `exp(t·Ψ(θ))` at every grid point.
pub fn ecf_test<F>(samples: &[Vec<f64>], exponent: F, t: f64, grid: &[Vec<f64>], threshold: f64) -> Result<ECFReport>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let mut ecfs = Vec::with_capacity(grid.len());
    let mut analytic = Vec::with_capacity(grid.len());
    let mut stud = Vec::with_capacity(grid.len());
    for theta in grid {
        let e = ecf(samples, theta)?;
        let phi = (t * exponent(theta)?).exp();
        stud.push((e - phi).norm() / ecf_standard_error(phi, samples.len()));
        ecfs.push(e);
        analytic.push(phi);
    }
    Ok(ECFReport::assemble(grid.to_vec(), ecfs, analytic, stud, threshold))
}

/// Compares the ECFs of two independent samples; the standard error of the
/// difference combines both per-sample errors.
pub fn two_sample_ecf_test(a: &[Vec<f64>], b: &[Vec<f64>], grid: &[Vec<f64>], threshold: f64) -> Result<ECFReport> {
    let mut ea = Vec::with_capacity(grid.len());
    let mut eb = Vec::with_capacity(grid.len());
    let mut stud = Vec::with_capacity(grid.len());
    for theta in grid {
        let x = ecf(a, theta)?;
        let y = ecf(b, theta)?;
        let pooled = 0.5 * (x + y);
        let se = ecf_standard_error(pooled, a.len()).hypot(ecf_standard_error(pooled, b.len()));
        stud.push((x - y).norm() / se);
        ea.push(x);
        eb.push(y);
    }
    Ok(ECFReport::assemble(grid.to_vec(), ea, eb, stud, threshold))
}

/// One studentized entry of a moment test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MomentCheck {
    pub name: String,
    pub sample: f64,
    pub analytic: f64,
    pub standard_error: f64,
    pub studentized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MomentTestReport {
    pub checks: Vec<MomentCheck>,
    pub max_studentized: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn studentize(diff: f64, se: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else if se == 0.0 {
        f64::INFINITY
    } else {
        diff.abs() / se
    }
}

/// Tests sample means and covariances against `t` times the analytic values.
///
/// Samples of width `n` are compared with the moments of `Y`; samples of
/// width `2n` are read as rows `(T, Y)` and compared with the joint moments.
/// Mean errors use the sample variance; covariance errors use the delta-method
/// variance of the centred cross products.
pub fn moment_test(samples: &[Vec<f64>], report: &MomentReport, t: f64, threshold: f64) -> Result<MomentTestReport> {
    let n = report.dim();
    let (mean, cov, names) = if samples.first().map(|r| r.len()) == Some(2 * n) {
        let mut mean = report.mean_t.clone();
        mean.extend_from_slice(&report.mean_y);
        let (ct, cy, cyt) = (report.cov_t_matrix(), report.cov_y_matrix(), report.cov_yt_matrix());
        let cov = DMatrix::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
            (true, true) => ct[(r, c)],
            (false, false) => cy[(r - n, c - n)],
            (false, true) => cyt[(r - n, c)],
            (true, false) => cyt[(c - n, r)],
        });
        let names: Vec<String> = (1..=n).map(|k| format!("T{k}")).chain((1..=n).map(|k| format!("Y{k}"))).collect();
        (mean, cov, names)
    } else {
        (report.mean_y.clone(), report.cov_y_matrix(), (1..=n).map(|k| format!("Y{k}")).collect())
    };
    let m = mean.len();
    check_samples(samples, m)?;
    if samples.len() < 2 {
        return Err(Error::invalid("moment test needs at least two samples"));
    }
    let nn = samples.len() as f64;
    let xbar: Vec<f64> = (0..m).map(|k| samples.iter().map(|x| x[k]).sum::<f64>() / nn).collect();
    let mut checks = Vec::new();
    let mut s = DMatrix::zeros(m, m);
    for k in 0..m {
        for l in k..m {
            let v = samples.iter().map(|x| (x[k] - xbar[k]) * (x[l] - xbar[l])).sum::<f64>() / (nn - 1.0);
            s[(k, l)] = v;
            s[(l, k)] = v;
        }
    }
    for k in 0..m {
        let se = (s[(k, k)].max(0.0) / nn).sqrt();
        let target = t * mean[k];
        checks.push(MomentCheck {
            name: format!("mean {}", names[k]),
            sample: xbar[k],
            analytic: target,
            standard_error: se,
            studentized: studentize(xbar[k] - target, se),
        });
    }
    for k in 0..m {
        for l in k..m {
            let skl = s[(k, l)];
            let var = samples
                .iter()
                .map(|x| {
                    let d = (x[k] - xbar[k]) * (x[l] - xbar[l]) - skl;
                    d * d
                })
                .sum::<f64>()
                / (nn - 1.0);
            let se = (var / nn).sqrt();
            let target = t * cov[(k, l)];
            checks.push(MomentCheck {
                name: format!("cov {},{}", names[k], names[l]),
                sample: skl,
                analytic: target,
                standard_error: se,
                studentized: studentize(skl - target, se),
            });
        }
    }
    let max_studentized = checks.iter().map(|c| c.studentized).fold(0.0, f64::max);
    Ok(MomentTestReport { checks, max_studentized, threshold, pass: max_studentized <= threshold })
}

/// ECF test of coordinate `k` against a univariate VG law.
pub fn marginal_vg_test(samples: &[Vec<f64>], k: usize, p: &VGParams, t: f64, grid: &[f64], threshold: f64) -> Result<ECFReport> {
    if p.dim() != 1 {
        return Err(Error::invalid("marginal test needs univariate VG parameters"));
    }
    let width = samples.first().map(|r| r.len()).unwrap_or(0);
    if k >= width {
        return Err(Error::invalid(format!("coordinate {k} out of range for width {width}")));
    }
    let column: Vec<Vec<f64>> = samples.iter().map(|x| vec![x[k]]).collect();
    let grid: Vec<Vec<f64>> = grid.iter().map(|v| vec![*v]).collect();
    ecf_test(&column, |th| vg_exponent(th, p), t, &grid, threshold)
}

/// `{−3, −1.5, 0.5, 1.5, 3}` on the first `min(m, 2)` coordinates as a tensor
/// grid, plus the same values on every coordinate axis.
pub fn standard_grid(m: usize) -> Vec<Vec<f64>> {
    let mut grid = Vec::new();
    match m {
        0 => return grid,
        1 => grid.extend(GRID_VALUES.iter().map(|v| vec![*v])),
        _ => {
            for a in GRID_VALUES {
                for b in GRID_VALUES {
                    let mut th = vec![0.0; m];
                    th[0] = a;
                    th[1] = b;
                    grid.push(th);
                }
            }
        }
    }
    for k in 0..m {
        for v in GRID_VALUES {
            let mut th = vec![0.0; m];
            th[k] = v;
            if !grid.contains(&th) {
                grid.push(th);
            }
        }
    }
    grid
}

/// Grid for rows `(T, Y)` of width `2n`: the standard grid in the `Y` block,
/// axis points in the `T` block, and paired points `(v·e_k, v·e_k)`.
pub fn joint_grid(n: usize) -> Vec<Vec<f64>> {
    let mut grid: Vec<Vec<f64>> = standard_grid(n)
        .into_iter()
        .map(|th| {
            let mut row = vec![0.0; n];
            row.extend(th);
            row
        })
        .collect();
    for k in 0..n {
        for v in GRID_VALUES {
            let mut row = vec![0.0; 2 * n];
            row[k] = v;
            grid.push(row.clone());
            row[n + k] = v;
            grid.push(row);
        }
    }
    grid
}
