//! Modified Bessel functions of the second kind `K_ρ` for integer and
//! half-integer orders.
//!
//! Half-integer orders start from `K_{1/2}(r) = √(π/(2r))·e^{−r}` and recur
//! upward. Integer orders start from `K_0`, `K_1`, evaluated by Temme's
//! series for `r ≤ 2` and Steed's continued fraction for `r > 2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Crossover between the small- and large-argument branches for integer orders.
pub const SEAM: f64 = 2.0;

/// Order of a Bessel function: a nonnegative multiple of 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    Integer(u32),
    /// `HalfInteger(m)` is the order `m + 1/2`.
    HalfInteger(u32),
}

impl Order {
    /// Interprets `rho` (negative orders fold onto `|rho|`).
    pub fn from_f64(rho: f64) -> Result<Self> {
        let rho = rho.abs();
        let twice = 2.0 * rho;
        if !twice.is_finite() || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(Error::invalid(format!("Bessel order {rho} is not a multiple of 1/2")));
        }
        let twice = twice as u32;
        Ok(if twice % 2 == 0 {
            Order::Integer(twice / 2)
        } else {
            Order::HalfInteger(twice / 2)
        })
    }

    pub fn value(self) -> f64 {
        match self {
            Order::Integer(m) => m as f64,
            Order::HalfInteger(m) => m as f64 + 0.5,
        }
    }
}

/// `K_ρ(r)`.
pub fn bessel_k(rho: f64, r: f64) -> Result<f64> {
    Ok(bessel_k_scaled(rho, r)? * (-r).exp())
}

/// `e^r·K_ρ(r)`.
pub fn bessel_k_scaled(rho: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("Bessel argument must be positive, got {r}")));
    }
    let order = Order::from_f64(rho)?;
    let (mut k_prev, mut k_cur, start, steps) = match order {
        Order::HalfInteger(m) => {
            let k = (PI / (2.0 * r)).sqrt();
            // K_{-1/2} = K_{1/2}
            (k, k, 0.5, m)
        }
        Order::Integer(m) => {
            let (k0, k1) = k0_k1_scaled(r);
            if m == 0 {
                return Ok(k0);
            }
            (k0, k1, 1.0, m - 1)
        }
    };
    let mut nu = start;
    for _ in 0..steps {
        let next = k_prev + 2.0 * nu / r * k_cur;
        k_prev = k_cur;
        k_cur = next;
        nu += 1.0;
    }
    Ok(k_cur)
}

/// `𝒦_ρ(r) = r^ρ·K_ρ(r)`.
pub fn scaled_bessel_cal(rho: f64, r: f64) -> Result<f64> {
    Ok(ln_scaled_bessel_cal(rho, r)?.exp())
}

/// `ln 𝒦_ρ(r)`.
pub fn ln_scaled_bessel_cal(rho: f64, r: f64) -> Result<f64> {
    let k = bessel_k_scaled(rho, r)?;
    Ok(rho.abs() * r.ln() + k.ln() - r)
}

/// Scaled `(e^r K_0(r), e^r K_1(r))`.
fn k0_k1_scaled(r: f64) -> (f64, f64) {
    if r <= SEAM {
        let (k0, k1) = k0_k1_series(r);
        (k0 * r.exp(), k1 * r.exp())
    } else {
        k0_k1_continued_fraction(r)
    }
}

/// Temme's series at order zero, unscaled.
pub(crate) fn k0_k1_series(r: f64) -> (f64, f64) {
    let half = 0.5 * r;
    let mut ff = -EULER_GAMMA - half.ln();
    let mut sum = ff;
    let mut p = 0.5;
    let mut q = 0.5;
    let mut c = 1.0;
    let d = half * half;
    let mut sum1 = p;
    for i in 1..500 {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi);
        c *= d / fi;
        p /= fi;
        q /= fi;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    (sum, sum1 * 2.0 / r)
}

/// Steed's continued fraction at order zero, scaled by `e^r`.
pub(crate) fn k0_k1_continued_fraction(r: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + r);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * r)).sqrt() / s;
    let k1 = k0 * (r + 0.5 - h) / r;
    (k0, k1)
}
