//! Jump sizes above a cutoff for a gamma Lévy density `a·e^{−bg}/g`.
//!
//! With `x = b·g` the survival function on `(x₀, ∞)` is `E1(x)/E1(x₀)`.
//! The inverse is read off a monotone cubic Hermite table of `ln x` against
//! `ln E1(x)` and polished by Newton steps on `ln E1`.

use rand::Rng;

use crate::special::{exp_integral_e1, exp_integral_e1_scaled, ln_exp_integral_e1};

const TABLE_NODES: usize = 400;
const X_MAX: f64 = 720.0;
const NEWTON_TOL: f64 = 1e-13;

/// Sampler for jumps of one ray above the cutoff `epsilon`.
#[derive(Debug, Clone)]
pub struct TruncatedGammaJumps {
    rate: f64,
    x0: f64,
    ln_e1_x0: f64,
    intensity: f64,
    // table abscissa: ln E1(x), decreasing; ordinate: ln x
    ys: Vec<f64>,
    ln_xs: Vec<f64>,
    slopes: Vec<f64>,
}

impl TruncatedGammaJumps {
    pub fn new(shape: f64, rate: f64, epsilon: f64) -> Self {
        let x0 = rate * epsilon;
        let lo = x0.ln();
        let hi = X_MAX.max(2.0 * x0).ln();
        let ln_xs: Vec<f64> = (0..TABLE_NODES)
            .map(|i| lo + (hi - lo) * i as f64 / (TABLE_NODES - 1) as f64)
            .collect();
        let ys: Vec<f64> = ln_xs.iter().map(|lx| ln_exp_integral_e1(lx.exp())).collect();
        // d(ln x)/d(ln E1) = −e^x·E1(x)
        let derivs: Vec<f64> = ln_xs.iter().map(|lx| -exp_integral_e1_scaled(lx.exp())).collect();
        let slopes = fritsch_carlson(&ys, &ln_xs, &derivs);
        TruncatedGammaJumps {
            rate,
            x0,
            ln_e1_x0: ys[0],
            intensity: shape * exp_integral_e1(x0),
            ys,
            ln_xs,
            slopes,
        }
    }

    /// Expected number of jumps above the cutoff per unit time, `a·E1(bε)`.
    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    /// Jump size `g` with survival probability `s ∈ (0, 1]`.
    pub fn quantile(&self, s: f64) -> f64 {
        self.solve(self.ln_e1_x0 + s.ln()) / self.rate
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // 1 − U lies in (0, 1]
        let s = 1.0 - rng.random::<f64>();
        self.quantile(s)
    }

    /// `x` with `ln E1(x) = target`.
    fn solve(&self, target: f64) -> f64 {
        if target >= self.ln_e1_x0 {
            return self.x0;
        }
        let mut x = self.interpolate(target).exp();
        for _ in 0..8 {
            let f = ln_exp_integral_e1(x) - target;
            let df = -1.0 / (x * exp_integral_e1_scaled(x));
            let next = (x - f / df).max(self.x0);
            let done = ((next - x) / x).abs() < NEWTON_TOL;
            x = next;
            if done {
                break;
            }
        }
        x
    }

    fn interpolate(&self, y: f64) -> f64 {
        let last = self.ys.len() - 1;
        if y <= self.ys[last] {
            return self.ln_xs[last] + self.slopes[last] * (y - self.ys[last]);
        }
        // ys is decreasing
        let i = self.ys.partition_point(|v| *v > y).clamp(1, last) - 1;
        let h = self.ys[i + 1] - self.ys[i];
        let t = (y - self.ys[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ln_xs[i] + h10 * h * self.slopes[i] + h01 * self.ln_xs[i + 1] + h11 * h * self.slopes[i + 1]
    }

    /// Worst relative error of the raw table (before Newton polishing)
    /// against the exact quantile, on a probe grid.
    pub fn table_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.ys.len() - 1 {
            let mid = 0.5 * (self.ys[i] + self.ys[i + 1]);
            let approx = self.interpolate(mid).exp();
            let exact = self.solve(mid);
            worst = worst.max(((approx - exact) / exact).abs());
        }
        worst
    }
}

/// Monotone cubic Hermite slopes: exact derivatives, limited where they
/// would break monotonicity.
fn fritsch_carlson(xs: &[f64], ys: &[f64], derivs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut m = derivs.to_vec();
    for i in 0..n - 1 {
        let delta = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        if delta == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / delta;
        let b = m[i + 1] / delta;
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * a * delta;
            m[i + 1] = tau * b * delta;
        }
    }
    m
}

/// Per-unit-time expected mass `a(1 − e^{−bε})/b` of jumps below `ε` for one ray.
pub fn ray_truncated_mass(shape: f64, rate: f64, epsilon: f64) -> f64 {
    -shape * (-rate * epsilon).exp_m1() / rate
}
