//! Adaptive Gauss–Kronrod (7/15) quadrature for complex-valued integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Integral estimate with its absolute error estimate.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-10, abs_tol: 1e-14, max_intervals: 2000 }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kronrod += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let value = kronrod * h;
    let error = ((kronrod - gauss) * h).norm();
    Panel { a, b, value, error }
}

/// Integrates `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0 });
    }
    let mut panels = vec![gk15(&f, a, b)];
    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= target {
            return Ok(QuadResult { value, error });
        }
        if panels.len() >= opts.max_intervals {
            return Err(Error::Quadrature { estimate: error, target });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval can no longer be split in floating point
            return Err(Error::Quadrature { estimate: error, target });
        }
        panels.push(gk15(&f, p.a, mid));
        panels.push(gk15(&f, mid, p.b));
    }
}

/// Integrates `f` over `[a, ∞)` through the map `x = a + s/(1−s)`.
pub fn integrate_to_infinity<F: Fn(f64) -> Complex64>(f: F, a: f64, opts: QuadOptions) -> Result<QuadResult> {
    integrate(
        |s| {
            let w = 1.0 - s;
            let x = a + s / w;
            let fx = f(x);
            if fx == Complex64::new(0.0, 0.0) {
                fx
            } else {
                fx / (w * w)
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<(f64, f64)> {
    let r = integrate(|x| Complex64::new(f(x), 0.0), a, b, opts)?;
    Ok((r.value.re, r.error))
}
