//! Exponential integral `E1`.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `E1(x) = ∫_x^∞ e^{-s}/s ds` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    if x <= 1.0 {
        e1_series(x)
    } else {
        (-x).exp() * e1_scaled_cf(x)
    }
}

/// `e^x·E1(x)`, finite for large `x`.
pub fn exp_integral_e1_scaled(x: f64) -> f64 {
    if x <= 1.0 {
        x.exp() * e1_series(x)
    } else {
        e1_scaled_cf(x)
    }
}

/// `ln E1(x)`, accurate where `E1` itself underflows.
pub fn ln_exp_integral_e1(x: f64) -> f64 {
    if x <= 1.0 {
        e1_series(x).ln()
    } else {
        e1_scaled_cf(x).ln() - x
    }
}

fn e1_series(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        let k = k as f64;
        term *= -x / k;
        let del = -term / k;
        sum += del;
        if del.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum
}

// modified Lentz evaluation of the continued fraction for e^x E1(x)
fn e1_scaled_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}
