//! Evaluating a Lévy process at a multivariate time point `t = (t_1, …, t_n)`.
//!
//! With the components of `t` sorted as `t_(1) ≤ … ≤ t_(n)` and spacings
//! `Δt_(k) = t_(k) − t_(k−1)`, the vector `X(t)` is infinitely divisible with
//! drift `t⊙μ + c`, covariance `t⊙Σ` and Lévy measure `t⊙𝒳`.

use nalgebra::DMatrix;

use super::types::{FiniteAtomicMeasure, PointMass};
use crate::error::{check_dim, Error, Result};
use crate::linalg;

fn check_times(t: &[f64]) -> Result<()> {
    if t.iter().all(|x| *x >= 0.0 && x.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid("time vector must be finite and componentwise nonnegative"))
    }
}

/// One spacing of the ordered time vector: `delta` applies to the
/// coordinates in `active` (those with `t_k ≥ t_(k)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Spacing {
    pub delta: f64,
    pub active: Vec<usize>,
}

/// Stable ascending sort of `t` (ties broken by index) and its spacings.
/// Zero spacings are dropped.
pub fn spacings(t: &[f64]) -> Vec<Spacing> {
    spacings_with_order(t, sorted_order(t))
}

pub(crate) fn sorted_order(t: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&i, &j| t[i].total_cmp(&t[j]).then(i.cmp(&j)));
    order
}

pub(crate) fn spacings_with_order(t: &[f64], order: Vec<usize>) -> Vec<Spacing> {
    let mut out = Vec::new();
    let mut prev = 0.0;
    for (k, &idx) in order.iter().enumerate() {
        let delta = t[idx] - prev;
        prev = t[idx];
        if delta > 0.0 {
            let mut active = order[k..].to_vec();
            active.sort_unstable();
            out.push(Spacing { delta, active });
        }
    }
    out
}

fn project_onto(x: &[f64], active: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for &i in active {
        out[i] = x[i];
    }
    out
}

/// `t⊙μ = (t_1 μ_1, …, t_n μ_n)`.
pub fn time_product_drift(t: &[f64], mu: &[f64]) -> Result<Vec<f64>> {
    check_dim(t.len(), mu.len())?;
    check_times(t)?;
    Ok(t.iter().zip(mu).map(|(a, b)| a * b).collect())
}

/// `(t⊙Σ)_{kl} = Σ_{kl}·min(t_k, t_l)`, the covariance of `(B_1(t_1), …, B_n(t_n))`.
pub fn time_product_cov(t: &[f64], sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_dim(t.len(), sigma.nrows())?;
    linalg::check_symmetric(sigma)?;
    check_times(t)?;
    let n = t.len();
    Ok(DMatrix::from_fn(n, n, |k, l| sigma[(k, l)] * t[k].min(t[l])))
}

/// `t⊙𝒳 = Σ_k Δt_(k)·𝒳 projected onto the coordinates {(k), …, (n)}`.
///
/// Atoms projected onto the origin are dropped; the result is canonical
/// (coincident atoms merged, lexicographically sorted).
pub fn time_product_measure(t: &[f64], x: &FiniteAtomicMeasure) -> Result<FiniteAtomicMeasure> {
    check_dim(t.len(), x.dim())?;
    check_times(t)?;
    Ok(measure_from_spacings(&spacings(t), x))
}

pub(crate) fn measure_from_spacings(sp: &[Spacing], x: &FiniteAtomicMeasure) -> FiniteAtomicMeasure {
    let mut atoms = Vec::new();
    for s in sp {
        for a in x.atoms() {
            let p = project_onto(&a.point, &s.active);
            if p.iter().any(|v| *v != 0.0) {
                atoms.push(PointMass { point: p, mass: s.delta * a.mass });
            }
        }
    }
    FiniteAtomicMeasure::new(x.dim(), atoms)
        .expect("projected atoms inherit validity")
        .canonical()
}

/// Compensation vector `c(t, 𝒳)`: for every spacing beyond the first, the
/// mass of atoms outside the closed unit ball whose projection falls inside it.
pub fn compensation_vector(t: &[f64], x: &FiniteAtomicMeasure) -> Result<Vec<f64>> {
    check_dim(t.len(), x.dim())?;
    check_times(t)?;
    Ok(compensation_from_order(t, sorted_order(t), x))
}

pub(crate) fn compensation_from_order(t: &[f64], order: Vec<usize>, x: &FiniteAtomicMeasure) -> Vec<f64> {
    let n = t.len();
    let mut c = vec![0.0; n];
    let mut prev = 0.0;
    for (k, &idx) in order.iter().enumerate() {
        let delta = t[idx] - prev;
        prev = t[idx];
        if k == 0 || delta == 0.0 {
            continue;
        }
        let active = &order[k..];
        for a in x.atoms() {
            if linalg::norm(&a.point) <= 1.0 {
                continue;
            }
            let p = project_onto(&a.point, active);
            if linalg::norm(&p) <= 1.0 {
                for i in 0..n {
                    c[i] += delta * a.mass * p[i];
                }
            }
        }
    }
    c
}


#[cfg(test)]
mod tie_break {
    use super::*;
    use proptest::prelude::*;

    fn reversed_tie_order(t: &[f64]) -> Vec<usize> {
        let mut order: Vec<usize> = (0..t.len()).collect();
        order.sort_by(|&i, &j| t[i].total_cmp(&t[j]).then(j.cmp(&i)));
        order
    }

    fn measure_strategy(n: usize) -> impl Strategy<Value = FiniteAtomicMeasure> {
        prop::collection::vec((prop::collection::vec(-4i32..=4, n), 1u32..5), 1..4).prop_filter_map(
            "atoms at the origin",
            move |raw| {
                let atoms: Vec<PointMass> = raw
                    .into_iter()
                    .map(|(p, m)| PointMass { point: p.iter().map(|v| *v as f64 * 0.5).collect(), mass: m as f64 })
                    .collect();
                FiniteAtomicMeasure::new(n, atoms).ok()
            },
        )
    }

    fn close(a: &FiniteAtomicMeasure, b: &FiniteAtomicMeasure) -> bool {
        a.atoms().len() == b.atoms().len()
            && a.atoms().iter().zip(b.atoms()).all(|(x, y)| x.point == y.point && (x.mass - y.mass).abs() < 1e-12)
    }

    proptest! {
        #[test]
        fn results_do_not_depend_on_tie_breaking(
            (t, x) in (1usize..5).prop_flat_map(|n| (prop::collection::vec(0u8..3, n), measure_strategy(n)))
        ) {
            let t: Vec<f64> = t.iter().map(|v| *v as f64).collect();
            let asc = sorted_order(&t);
            let desc = reversed_tie_order(&t);
            let m1 = measure_from_spacings(&spacings_with_order(&t, asc.clone()), &x);
            let m2 = measure_from_spacings(&spacings_with_order(&t, desc.clone()), &x);
            prop_assert!(close(&m1, &m2));
            let c1 = compensation_from_order(&t, asc, &x);
            let c2 = compensation_from_order(&t, desc, &x);
            prop_assert!(c1.iter().zip(&c2).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }
}
