//! Path samplers for `(T, B⊙T)` on a time grid.
//!
//! Every path draws from its own ChaCha stream keyed by `(seed, path index)`,
//! so output is bit-identical for any number of worker threads.

mod gamma;
mod io;
mod jumps;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

pub use gamma::sample_gamma;
pub use io::{params_hash, read_binary, sidecar_path, BinaryHeader, BINARY_FORMAT, CSV_FORMAT};
pub use jumps::{ray_truncated_mass, TruncatedGammaJumps};

use crate::error::{check_dim, Error, Result};
use crate::levy_core::{time_product_cov, time_product_drift, BrownianSpec, SubordinatorSpec, WVaGParams};
use crate::levy_measure::alpha_gamma_rays;
use crate::linalg;
use crate::moments::subordinator_moments;

/// Default relative bias target for the marked scheme.
pub const DEFAULT_RELATIVE_BIAS: f64 = 1e-6;

/// Random stream of one path.
pub fn path_rng(seed: u64, path: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// Grid `0 = t_0 < t_1 < … < t_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 || points[0] != 0.0 {
            return Err(Error::invalid("time grid must start at 0 and have at least one step"));
        }
        if points.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::invalid("time grid must be strictly increasing and finite"));
        }
        Ok(TimeGrid(points))
    }

    pub fn uniform(t_max: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(t_max > 0.0) {
            return Err(Error::invalid("uniform grid needs t_max > 0 and steps >= 1"));
        }
        Self::new((0..=steps).map(|i| t_max * i as f64 / steps as f64).collect())
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn steps(&self) -> usize {
        self.0.len() - 1
    }

    fn increments(&self) -> Vec<f64> {
        self.0.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    Superposition,
    /// Marked point process with one jump cutoff per ray.
    Marked { epsilon: Vec<f64> },
    Strong,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Superposition => "superposition",
            Scheme::Marked { .. } => "marked",
            Scheme::Strong => "strong",
        }
    }
}

/// Simulated skeletons of `T` and `Y = B⊙T` at the grid points after 0.
///
/// `t_paths` and `y_paths` are flat arrays indexed `[path][step][coordinate]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub time_grid: Vec<f64>,
    pub n_paths: usize,
    pub dim: usize,
    pub t_paths: Vec<f64>,
    pub y_paths: Vec<f64>,
    pub seed: u64,
    pub scheme: Scheme,
    pub bias_report: Vec<f64>,
}

impl PathSample {
    pub fn steps(&self) -> usize {
        self.time_grid.len() - 1
    }

    fn offset(&self, path: usize, step: usize) -> usize {
        (path * self.steps() + step) * self.dim
    }

    /// `T` on `path` at grid point `step + 1`.
    pub fn t_at(&self, path: usize, step: usize) -> &[f64] {
        let o = self.offset(path, step);
        &self.t_paths[o..o + self.dim]
    }

    pub fn y_at(&self, path: usize, step: usize) -> &[f64] {
        let o = self.offset(path, step);
        &self.y_paths[o..o + self.dim]
    }

    /// `Y` at the final grid point, one row per path.
    pub fn terminal_y(&self) -> Vec<Vec<f64>> {
        (0..self.n_paths).map(|p| self.y_at(p, self.steps() - 1).to_vec()).collect()
    }

    pub fn terminal_t(&self) -> Vec<Vec<f64>> {
        (0..self.n_paths).map(|p| self.t_at(p, self.steps() - 1).to_vec()).collect()
    }

    /// `(T, Y)` at the final grid point, one row of length `2n` per path.
    pub fn terminal_joint(&self) -> Vec<Vec<f64>> {
        let last = self.steps() - 1;
        (0..self.n_paths)
            .map(|p| {
                let mut row = self.t_at(p, last).to_vec();
                row.extend_from_slice(self.y_at(p, last));
                row
            })
            .collect()
    }
}

/// Gaussian `N(g·m, g·LLᵀ)` added to `y`; the shared step of every scheme.
#[derive(Debug, Clone)]
struct GaussianMark {
    mean: Vec<f64>,
    factor: DMatrix<f64>,
    // Some(k) when the mark lives on coordinate k only
    axis: Option<usize>,
}

impl GaussianMark {
    fn new(direction: &[f64], bm: &BrownianSpec) -> Result<Self> {
        let mean = time_product_drift(direction, bm.mu())?;
        let cov = time_product_cov(direction, bm.sigma())?;
        let support: Vec<usize> = (0..direction.len()).filter(|&k| direction[k] != 0.0).collect();
        let axis = if support.len() == 1 { Some(support[0]) } else { None };
        Ok(GaussianMark { mean, factor: linalg::psd_factor(&cov)?, axis })
    }

    fn add<R: rand::Rng + ?Sized>(&self, rng: &mut R, g: f64, y: &mut [f64], z: &mut [f64]) {
        if g == 0.0 {
            return;
        }
        let s = g.sqrt();
        if let Some(k) = self.axis {
            let e: f64 = StandardNormal.sample(rng);
            y[k] += g * self.mean[k] + s * self.factor[(k, k)] * e;
            return;
        }
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(rng);
        }
        for (yi, mi) in y.iter_mut().zip(&self.mean) {
            *yi += g * mi;
        }
        linalg::add_lower_mul(y, &self.factor, z, s);
    }
}

fn check_inputs(sub: &SubordinatorSpec, bm: &BrownianSpec, n_paths: usize) -> Result<()> {
    check_dim(sub.dim(), bm.dim())?;
    if n_paths == 0 {
        return Err(Error::invalid("number of paths must be positive"));
    }
    Ok(())
}

/// Runs `step` for every path and grid interval; `step` adds the increment
/// over `dt` into the `(t, y)` slices it is given.
fn run_paths<F>(grid: &TimeGrid, dim: usize, n_paths: usize, seed: u64, step: F) -> (Vec<f64>, Vec<f64>)
where
    F: Fn(&mut ChaCha20Rng, f64, &mut [f64], &mut [f64], &mut [f64]) + Sync,
{
    let steps = grid.steps();
    let dts = grid.increments();
    let slab = steps * dim;
    let mut t_paths = vec![0.0; n_paths * slab];
    let mut y_paths = vec![0.0; n_paths * slab];
    t_paths
        .par_chunks_mut(slab)
        .zip(y_paths.par_chunks_mut(slab))
        .enumerate()
        .for_each(|(p, (tc, yc))| {
            let mut rng = path_rng(seed, p as u64);
            let mut t = vec![0.0; dim];
            let mut y = vec![0.0; dim];
            let mut z = vec![0.0; dim];
            for (s, &dt) in dts.iter().enumerate() {
                step(&mut rng, dt, &mut t, &mut y, &mut z);
                tc[s * dim..(s + 1) * dim].copy_from_slice(&t);
                yc[s * dim..(s + 1) * dim].copy_from_slice(&y);
            }
        });
    (t_paths, y_paths)
}

struct DriftPart {
    drift: Vec<f64>,
    mark: GaussianMark,
}

impl DriftPart {
    fn new(sub: &SubordinatorSpec, bm: &BrownianSpec) -> Result<Option<Self>> {
        if !sub.has_drift() {
            return Ok(None);
        }
        Ok(Some(DriftPart { drift: sub.drift().to_vec(), mark: GaussianMark::new(sub.drift(), bm)? }))
    }

    fn add(&self, rng: &mut ChaCha20Rng, dt: f64, t: &mut [f64], y: &mut [f64], z: &mut [f64]) {
        for (ti, di) in t.iter_mut().zip(&self.drift) {
            *ti += di * dt;
        }
        self.mark.add(rng, dt, y, z);
    }
}

fn poisson_count(rng: &mut ChaCha20Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
}

/// Exact sampler for any ray-and-atom subordinator: per interval each ray
/// contributes `G·u` with `G ~ Gamma(aΔt, b)` and a Gaussian mark
/// `N(G·u⊙μ, G·u⊙Σ)`; each atom a Poisson number of copies of its point.
pub fn sample_superposition(
    sub: &SubordinatorSpec,
    bm: &BrownianSpec,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<PathSample> {
    check_inputs(sub, bm, n_paths)?;
    let dim = sub.dim();
    let rays = sub
        .rays()
        .iter()
        .map(|r| Ok((r.shape(), r.rate(), r.direction().to_vec(), GaussianMark::new(r.direction(), bm)?)))
        .collect::<Result<Vec<_>>>()?;
    let atoms = sub
        .atoms()
        .iter()
        .map(|a| Ok((a.intensity(), a.point().to_vec(), GaussianMark::new(a.point(), bm)?)))
        .collect::<Result<Vec<_>>>()?;
    let drift = DriftPart::new(sub, bm)?;
    let (t_paths, y_paths) = run_paths(grid, dim, n_paths, seed, |rng, dt, t, y, z| {
        if let Some(d) = &drift {
            d.add(rng, dt, t, y, z);
        }
        for (shape, rate, u, mark) in &rays {
            let g = sample_gamma(rng, shape * dt, *rate);
            for (ti, ui) in t.iter_mut().zip(u) {
                *ti += g * ui;
            }
            mark.add(rng, g, y, z);
        }
        for (intensity, point, mark) in &atoms {
            let k = poisson_count(rng, intensity * dt) as f64;
            for (ti, pi) in t.iter_mut().zip(point) {
                *ti += k * pi;
            }
            mark.add(rng, k, y, z);
        }
    });
    Ok(PathSample {
        time_grid: grid.points().to_vec(),
        n_paths,
        dim,
        t_paths,
        y_paths,
        seed,
        scheme: Scheme::Superposition,
        bias_report: vec![0.0; dim],
    })
}

/// Exact WVαG sampler: the superposition scheme on the α-gamma rays, common ray first.
pub fn sample_wvag(p: &WVaGParams, grid: &TimeGrid, n_paths: usize, seed: u64) -> Result<PathSample> {
    sample_superposition(&alpha_gamma_rays(p), p.brownian(), grid, n_paths, seed)
}

/// Expected per-unit-time mass of omitted jumps, `Σ u·a(1 − e^{−bε})/b`.
pub fn truncation_bias(sub: &SubordinatorSpec, epsilon: f64) -> Result<Vec<f64>> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    Ok(bias_with_cutoffs(sub, &vec![epsilon; sub.rays().len()]))
}

fn bias_with_cutoffs(sub: &SubordinatorSpec, eps: &[f64]) -> Vec<f64> {
    let mut bias = vec![0.0; sub.dim()];
    for (r, e) in sub.rays().iter().zip(eps) {
        let m = ray_truncated_mass(r.shape(), r.rate(), *e);
        for (bi, ui) in bias.iter_mut().zip(r.direction()) {
            *bi += m * ui;
        }
    }
    bias
}

/// Per-ray cutoffs keeping `‖u‖·a(1 − e^{−bε})/b ≤ 1e-6·‖E T(1)‖`.
pub fn default_epsilons(sub: &SubordinatorSpec) -> Vec<f64> {
    let mean_norm = linalg::norm(&subordinator_moments(sub).0);
    sub.rays()
        .iter()
        .map(|r| {
            let target = DEFAULT_RELATIVE_BIAS * mean_norm * r.rate() / (r.shape() * linalg::norm(r.direction()));
            // the truncated mass a(1 − e^{−bε})/b is bounded by a/b
            let q = target.min(0.5);
            -(-q).ln_1p() / r.rate()
        })
        .collect()
}

/// Marked point-process sampler: ray jumps above `ε` arrive at rate
/// `a·E1(bε)` and each carries an independent Gaussian mark. `epsilon = None`
/// picks per-ray cutoffs via [`default_epsilons`].
pub fn sample_weak_marked(
    sub: &SubordinatorSpec,
    bm: &BrownianSpec,
    grid: &TimeGrid,
    n_paths: usize,
    epsilon: Option<f64>,
    seed: u64,
) -> Result<PathSample> {
    check_inputs(sub, bm, n_paths)?;
    let eps = match epsilon {
        Some(e) if e > 0.0 && e.is_finite() => vec![e; sub.rays().len()],
        Some(e) => return Err(Error::invalid(format!("epsilon must be positive, got {e}"))),
        None => default_epsilons(sub),
    };
    let dim = sub.dim();
    let rays = sub
        .rays()
        .iter()
        .zip(&eps)
        .map(|(r, e)| {
            Ok((
                TruncatedGammaJumps::new(r.shape(), r.rate(), *e),
                r.direction().to_vec(),
                GaussianMark::new(r.direction(), bm)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let atoms = sub
        .atoms()
        .iter()
        .map(|a| Ok((a.intensity(), a.point().to_vec(), GaussianMark::new(a.point(), bm)?)))
        .collect::<Result<Vec<_>>>()?;
    let drift = DriftPart::new(sub, bm)?;
    let (t_paths, y_paths) = run_paths(grid, dim, n_paths, seed, |rng, dt, t, y, z| {
        if let Some(d) = &drift {
            d.add(rng, dt, t, y, z);
        }
        for (jumps, u, mark) in &rays {
            let count = poisson_count(rng, jumps.intensity() * dt);
            for _ in 0..count {
                let g = jumps.sample(rng);
                for (ti, ui) in t.iter_mut().zip(u) {
                    *ti += g * ui;
                }
                mark.add(rng, g, y, z);
            }
        }
        for (intensity, point, mark) in &atoms {
            for _ in 0..poisson_count(rng, intensity * dt) {
                for (ti, pi) in t.iter_mut().zip(point) {
                    *ti += pi;
                }
                mark.add(rng, 1.0, y, z);
            }
        }
    });
    Ok(PathSample {
        time_grid: grid.points().to_vec(),
        n_paths,
        dim,
        t_paths,
        y_paths,
        seed,
        bias_report: bias_with_cutoffs(sub, &eps),
        scheme: Scheme::Marked { epsilon: eps },
    })
}

/// The two classical regimes covered by strong subordination.
#[derive(Debug, Clone, PartialEq)]
pub enum StrongRegime {
    /// Every jump direction and the drift are multiples of `e`; `T = τ·e`.
    CommonRay { e: Vec<f64> },
    /// Every jump is axis-aligned and `Σ` is diagonal.
    Axis,
}

fn multiple_of(v: &[f64], e: &[f64]) -> Option<f64> {
    let c = linalg::dot(v, e) / linalg::dot(e, e);
    let scale = linalg::norm(v).max(f64::MIN_POSITIVE);
    let ok = v.iter().zip(e).all(|(vi, ei)| (vi - c * ei).abs() <= 1e-12 * scale);
    ok.then_some(c)
}

/// Detects which strong regime, if any, a spec falls into.
pub fn strong_regime(sub: &SubordinatorSpec, bm: &BrownianSpec) -> Result<StrongRegime> {
    check_dim(sub.dim(), bm.dim())?;
    let mut dirs: Vec<&[f64]> = sub.rays().iter().map(|r| r.direction()).collect();
    dirs.extend(sub.atoms().iter().map(|a| a.point()));
    if sub.has_drift() {
        dirs.push(sub.drift());
    }
    if let Some(first) = dirs.first() {
        let e = first.to_vec();
        if dirs.iter().all(|d| multiple_of(d, &e).is_some()) {
            return Ok(StrongRegime::CommonRay { e });
        }
    }
    let jumps_on_axes = sub
        .rays()
        .iter()
        .map(|r| r.direction())
        .chain(sub.atoms().iter().map(|a| a.point()))
        .all(|d| d.iter().filter(|x| **x != 0.0).count() == 1);
    if jumps_on_axes && bm.is_diagonal() {
        return Ok(StrongRegime::Axis);
    }
    if dirs.is_empty() {
        return Ok(StrongRegime::Axis);
    }
    Err(Error::invalid(
        "strong subordination needs all jumps along one ray, or axis jumps with diagonal covariance",
    ))
}

/// Traditional subordination `B∘T`: draws `T` increments, then evaluates
/// each Brownian coordinate at its own accumulated time.
pub fn sample_strong(
    sub: &SubordinatorSpec,
    bm: &BrownianSpec,
    grid: &TimeGrid,
    n_paths: usize,
    seed: u64,
) -> Result<PathSample> {
    check_inputs(sub, bm, n_paths)?;
    let dim = sub.dim();
    let regime = strong_regime(sub, bm)?;
    let (t_paths, y_paths) = match regime {
        StrongRegime::CommonRay { e } => {
            let ray_scales: Vec<(f64, f64, f64)> = sub
                .rays()
                .iter()
                .map(|r| (r.shape(), r.rate(), multiple_of(r.direction(), &e).unwrap()))
                .collect();
            let atom_scales: Vec<(f64, f64)> =
                sub.atoms().iter().map(|a| (a.intensity(), multiple_of(a.point(), &e).unwrap())).collect();
            let drift_scale = multiple_of(sub.drift(), &e).unwrap_or(0.0);
            let mark = GaussianMark::new(&e, bm)?;
            run_paths(grid, dim, n_paths, seed, |rng, dt, t, y, z| {
                let mut tau = drift_scale * dt;
                for (shape, rate, c) in &ray_scales {
                    tau += c * sample_gamma(rng, shape * dt, *rate);
                }
                for (intensity, c) in &atom_scales {
                    tau += c * poisson_count(rng, intensity * dt) as f64;
                }
                for (ti, ei) in t.iter_mut().zip(&e) {
                    *ti += tau * ei;
                }
                mark.add(rng, tau, y, z);
            })
        }
        StrongRegime::Axis => {
            let mu = bm.mu().to_vec();
            let sd: Vec<f64> = (0..dim).map(|k| bm.sigma()[(k, k)].sqrt()).collect();
            let drift = sub.drift().to_vec();
            run_paths(grid, dim, n_paths, seed, |rng, dt, t, y, z| {
                for (dk, d) in z.iter_mut().zip(&drift) {
                    *dk = d * dt;
                }
                for r in sub.rays() {
                    let g = sample_gamma(rng, r.shape() * dt, r.rate());
                    for (dk, u) in z.iter_mut().zip(r.direction()) {
                        *dk += g * u;
                    }
                }
                for a in sub.atoms() {
                    let k = poisson_count(rng, a.intensity() * dt) as f64;
                    for (dk, p) in z.iter_mut().zip(a.point()) {
                        *dk += k * p;
                    }
                }
                for k in 0..dim {
                    let dtk = z[k];
                    t[k] += dtk;
                    if dtk > 0.0 {
                        let e: f64 = StandardNormal.sample(rng);
                        y[k] += mu[k] * dtk + sd[k] * dtk.sqrt() * e;
                    }
                }
            })
        }
    };
    Ok(PathSample {
        time_grid: grid.points().to_vec(),
        n_paths,
        dim,
        t_paths,
        y_paths,
        seed,
        scheme: Scheme::Strong,
        bias_report: vec![0.0; dim],
    })
}
