mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use weaklevy::charfn::{
    multitime_exponent, subordinator_exponent, subordinator_laplace, vg_exponent, vggc_exponent, weak_pair_exponent,
    wvag_exponent, Method,
};
use weaklevy::levy_core::{
    compensation_vector, project_spec, time_product_cov, time_product_measure, FiniteAtomicMeasure, IndexSet,
    PointMass, SubordinatorSpec, ThorinAtomicMeasure, VGParams,
};
use weaklevy::levy_measure::{
    alpha_gamma_rays, rays_to_thorin, thorin_to_rays, vggc_levy_density, wvag_levy_density,
};
use weaklevy::moments::{subordinator_moments, weak_bm_moments, wvag_moments};

const EXACT: f64 = 1e-12;

fn cases() -> ProptestConfig {
    ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) }
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn exponents_vanish_at_zero(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let p = random_wvag(&mut r, n);
        let sub = random_subordinator(&mut r, n);
        let bm = random_brownian(&mut r, n);
        let zero = vec![0.0; n];
        prop_assert_eq!(wvag_exponent(&zero, &p).unwrap().norm(), 0.0);
        prop_assert_eq!(weak_pair_exponent(&zero, &zero, &sub, &bm, Method::Closed).unwrap().norm(), 0.0);
        prop_assert_eq!(subordinator_exponent(&zero, &sub).unwrap().norm(), 0.0);
    }

    #[test]
    fn real_parts_are_nonpositive_and_conjugation_flips_sign(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let sub = random_subordinator(&mut r, n);
        let bm = random_brownian(&mut r, n);
        let t1 = random_vec(&mut r, n, -3.0, 3.0);
        let t2 = random_vec(&mut r, n, -3.0, 3.0);
        let psi = weak_pair_exponent(&t1, &t2, &sub, &bm, Method::Closed).unwrap();
        prop_assert!(psi.re <= 1e-14);
        let neg1: Vec<f64> = t1.iter().map(|x| -x).collect();
        let neg2: Vec<f64> = t2.iter().map(|x| -x).collect();
        let flipped = weak_pair_exponent(&neg1, &neg2, &sub, &bm, Method::Closed).unwrap();
        prop_assert!((flipped - psi.conj()).norm() <= EXACT * (1.0 + psi.norm()));
    }

    #[test]
    fn wvag_matches_thorin_form_and_vg_margins(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let p = random_wvag(&mut r, n);
        let u = ThorinAtomicMeasure::alpha_gamma(&p);
        let theta = random_vec(&mut r, n, -3.0, 3.0);
        let w = wvag_exponent(&theta, &p).unwrap();
        let v = vggc_exponent(&theta, &vec![0.0; n], p.brownian(), &u).unwrap();
        prop_assert!((w - v).norm() <= EXACT);
        let rays = weak_pair_exponent(&vec![0.0; n], &theta, &alpha_gamma_rays(&p), p.brownian(), Method::Closed).unwrap();
        prop_assert!((w - rays).norm() <= EXACT);
        for k in 0..n {
            let mut axis = vec![0.0; n];
            axis[k] = theta[k];
            let vg = VGParams::univariate(p.b() / p.alpha()[k], p.brownian().mu()[k], p.brownian().sigma()[(k, k)]).unwrap();
            let lhs = wvag_exponent(&axis, &p).unwrap();
            let rhs = vg_exponent(&[theta[k]], &vg).unwrap();
            prop_assert!((lhs - rhs).norm() <= EXACT, "k={} {} vs {}", k, lhs, rhs);
        }
    }

    #[test]
    fn thorin_and_ray_forms_round_trip(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let bm = random_brownian(&mut r, n);
        let rays = random_rays(&mut r, n, 3);
        let drift = random_vec(&mut r, n, 0.0, 1.0);
        let sub = SubordinatorSpec::new(drift.clone(), rays, vec![]).unwrap();
        let (d, u) = rays_to_thorin(&sub).unwrap();
        prop_assert_eq!(&d, &drift);
        let back = thorin_to_rays(&d, &u).unwrap();
        let theta = random_vec(&mut r, n, -2.0, 2.0);
        let a = weak_pair_exponent(&vec![0.0; n], &theta, &sub, &bm, Method::Closed).unwrap();
        let b = weak_pair_exponent(&vec![0.0; n], &theta, &back, &bm, Method::Closed).unwrap();
        let c = vggc_exponent(&theta, &d, &bm, &u).unwrap();
        prop_assert!((a - b).norm() <= EXACT * (1.0 + a.norm()));
        prop_assert!((a - c).norm() <= EXACT * (1.0 + a.norm()));
    }

    #[test]
    fn time_zero_slice_is_the_subordinator(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let sub = random_subordinator(&mut r, n);
        let bm = random_brownian(&mut r, n);
        let t1 = random_vec(&mut r, n, -3.0, 3.0);
        let a = weak_pair_exponent(&t1, &vec![0.0; n], &sub, &bm, Method::Closed).unwrap();
        let b = subordinator_exponent(&t1, &sub).unwrap();
        prop_assert!((a - b).norm() <= EXACT);
    }

    #[test]
    fn projections_commute_with_the_exponent(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let sub = random_subordinator(&mut r, n);
        let bm = random_brownian(&mut r, n);
        let t1 = random_vec(&mut r, n, -3.0, 3.0);
        let t2 = random_vec(&mut r, n, -3.0, 3.0);
        for j in IndexSet::all_nonempty(n) {
            let lhs = weak_pair_exponent(&j.project(&t1), &j.project(&t2), &sub, &bm, Method::Closed).unwrap();
            let psub = project_spec(&j, &sub).unwrap();
            let pbm = project_spec(&j, &bm).unwrap();
            let rhs = weak_pair_exponent(&t1, &t2, &psub, &pbm, Method::Closed).unwrap();
            prop_assert!((lhs - rhs).norm() <= EXACT, "J={:?}", j.indices());
        }
    }

    #[test]
    fn projections_compose(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let sub = random_subordinator(&mut r, n);
        let sets = IndexSet::all_nonempty(n);
        let j = &sets[r.random_range(0..sets.len())];
        let k = &sets[r.random_range(0..sets.len())];
        let twice = project_spec(k, &project_spec(j, &sub).unwrap()).unwrap();
        match j.intersect(k) {
            Some(jk) => {
                let once = project_spec(&jk, &sub).unwrap();
                prop_assert_eq!(twice.canonical(), once.canonical());
            }
            None => {
                prop_assert!(twice.rays().is_empty() && twice.atoms().is_empty() && !twice.has_drift());
            }
        }
    }

    #[test]
    fn superposition_adds_exponents(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let s1 = random_subordinator(&mut r, n);
        let s2 = random_subordinator(&mut r, n);
        let bm = random_brownian(&mut r, n);
        let t1 = random_vec(&mut r, n, -2.0, 2.0);
        let t2 = random_vec(&mut r, n, -2.0, 2.0);
        let drift = random_vec(&mut r, n, 0.0, 1.0);
        let jumps_only = |s: &SubordinatorSpec| SubordinatorSpec::new(vec![0.0; n], s.rays().to_vec(), s.atoms().to_vec()).unwrap();
        let (j1, j2) = (jumps_only(&s1), jumps_only(&s2));
        let both = SubordinatorSpec::deterministic(drift.clone()).unwrap().superpose(&j1.superpose(&j2).unwrap()).unwrap();
        let pure_drift = SubordinatorSpec::deterministic(drift).unwrap();
        let sum = weak_pair_exponent(&t1, &t2, &j1, &bm, Method::Closed).unwrap()
            + weak_pair_exponent(&t1, &t2, &j2, &bm, Method::Closed).unwrap()
            + weak_pair_exponent(&t1, &t2, &pure_drift, &bm, Method::Closed).unwrap();
        let joint = weak_pair_exponent(&t1, &t2, &both, &bm, Method::Closed).unwrap();
        prop_assert!((sum - joint).norm() <= EXACT * (1.0 + sum.norm()));
    }

    #[test]
    fn laplace_exponent_is_nonnegative_and_increasing(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let sub = random_subordinator(&mut r, n);
        let lam = random_vec(&mut r, n, 0.0, 3.0);
        let more: Vec<f64> = lam.iter().map(|x| x + r.random_range(0.0..1.0)).collect();
        let a = subordinator_laplace(&lam, &sub).unwrap();
        let b = subordinator_laplace(&more, &sub).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!(b >= a - 1e-14);
    }

    #[test]
    fn time_product_cov_is_psd_and_monotone(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let sigma = random_spd(&mut r, n);
        let t = random_vec(&mut r, n, 0.0, 3.0);
        // a common shift adds shift·Σ
        let shift = r.random_range(0.0..1.0);
        let s: Vec<f64> = t.iter().map(|x| x + shift).collect();
        let ct = time_product_cov(&t, &sigma).unwrap();
        let cs = time_product_cov(&s, &sigma).unwrap();
        prop_assert!(min_eigenvalue(&ct) >= -1e-12);
        prop_assert!(min_eigenvalue(&(cs - &ct)) >= -1e-12);
    }

    #[test]
    fn multitime_exponent_on_the_diagonal_is_scaled(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let bm = random_brownian(&mut r, n);
        let theta = random_vec(&mut r, n, -2.0, 2.0);
        let s = r.random_range(0.0..3.0);
        let a = multitime_exponent(&vec![s; n], &theta, &bm).unwrap();
        let b = multitime_exponent(&vec![1.0; n], &theta, &bm).unwrap() * s;
        prop_assert!((a - b).norm() <= EXACT * (1.0 + b.norm()));
    }

    #[test]
    fn equal_times_need_no_compensation(seed in any::<u64>(), n in 1usize..=4) {
        let mut r = rng(seed);
        let atoms = (0..3)
            .map(|_| PointMass { point: random_vec(&mut r, n, -1.0, 1.0), mass: r.random_range(0.1..2.0) })
            .collect();
        let x = FiniteAtomicMeasure::new(n, atoms).unwrap();
        let s = r.random_range(0.1..3.0);
        let c = compensation_vector(&vec![s; n], &x).unwrap();
        prop_assert!(c.iter().all(|v| v.abs() <= EXACT));
        let m = time_product_measure(&vec![s; n], &x).unwrap();
        prop_assert!((m.total_mass() - s * x.total_mass()).abs() <= EXACT * (1.0 + m.total_mass()));
    }

    #[test]
    fn moments_are_consistent(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let p = random_wvag(&mut r, n);
        let direct = wvag_moments(&p);
        let via_rays = weak_bm_moments(&alpha_gamma_rays(&p), p.brownian()).unwrap();
        prop_assert!(direct.max_abs_diff(&via_rays) <= EXACT * 10.0);
        prop_assert!(min_eigenvalue(&direct.cov_y_matrix()) >= -1e-10);
        prop_assert!(min_eigenvalue(&direct.cov_t_matrix()) >= -1e-10);
        // the (T, Y) covariance is PSD as a whole
        let mut joint = DMatrix::zeros(2 * n, 2 * n);
        joint.view_mut((0, 0), (n, n)).copy_from(&direct.cov_t_matrix());
        joint.view_mut((n, n), (n, n)).copy_from(&direct.cov_y_matrix());
        joint.view_mut((0, n), (n, n)).copy_from(&direct.cov_yt_matrix().transpose());
        joint.view_mut((n, 0), (n, n)).copy_from(&direct.cov_yt_matrix());
        prop_assert!(min_eigenvalue(&joint) >= -1e-10);
    }

    #[test]
    fn moments_project_coordinatewise(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let sub = random_subordinator(&mut r, n);
        let bm = random_brownian(&mut r, n);
        let full = weak_bm_moments(&sub, &bm).unwrap();
        let (mean_t, _) = subordinator_moments(&sub);
        for k in 0..n {
            prop_assert!((full.mean_t[k] - mean_t[k]).abs() <= EXACT);
            prop_assert!((full.mean_y[k] - bm.mu()[k] * mean_t[k]).abs() <= EXACT * (1.0 + full.mean_y[k].abs()));
        }
        for j in IndexSet::all_nonempty(n) {
            let proj = weak_bm_moments(&project_spec(&j, &sub).unwrap(), &project_spec(&j, &bm).unwrap()).unwrap();
            for &k in j.indices() {
                for &l in j.indices() {
                    prop_assert!((proj.cov_y[k][l] - full.cov_y[k][l]).abs() <= EXACT * (1.0 + full.cov_y[k][l].abs()));
                }
            }
        }
    }

    #[test]
    fn densities_are_nonnegative_and_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_wvag(&mut r, 2);
        let dec = wvag_levy_density(&p).unwrap();
        let u = ThorinAtomicMeasure::alpha_gamma(&p);
        let y = random_vec(&mut r, 2, -2.0, 2.0);
        let full = dec.full_support_density(&y).unwrap();
        prop_assert!(full >= 0.0 && full.is_finite());
        let via_faces = vggc_levy_density(&y, &IndexSet::full(2), p.brownian(), &u).unwrap();
        prop_assert!((full - via_faces).abs() <= 1e-10 * (1.0 + full));
        let axis = dec.axis_density(0, y[0]).unwrap();
        let face = vggc_levy_density(&[y[0], 0.0], &IndexSet::new(vec![0], 2).unwrap(), p.brownian(), &u).unwrap();
        prop_assert!(axis >= 0.0);
        prop_assert!((axis - face).abs() <= 1e-10 * (1.0 + axis));
    }
}

#[test]
fn quadrature_agrees_with_closed_form_on_a_fixed_spec() {
    let mut r = rng(7);
    for n in 1..=3 {
        let sub = random_subordinator(&mut r, n);
        let bm = random_brownian(&mut r, n);
        let t1 = random_vec(&mut r, n, -2.0, 2.0);
        let t2 = random_vec(&mut r, n, -2.0, 2.0);
        let c = weak_pair_exponent(&t1, &t2, &sub, &bm, Method::Closed).unwrap();
        let q = weak_pair_exponent(&t1, &t2, &sub, &bm, Method::Quadrature).unwrap();
        assert!((c - q).norm() <= 1e-8 * c.norm(), "n={n}: {c} vs {q}");
    }
}
