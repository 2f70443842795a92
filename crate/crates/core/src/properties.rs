//! Property tests for the invariants each module promises.

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use crate::analytic::{BoundaryGrid, BoundaryMeasure, TaylorSeries};
use crate::bloch::{fourier_bound_report, DiskGrid, FOURIER_BOUND};
use crate::experiments::output::Cell;
use crate::innerouter::{clark_b_from_mu, outer_from_log_modulus, RieszProductSpec};
use crate::majorants::Majorant;
use crate::modelspace::{model_space_basis, FiniteBlaschke};
use crate::orlicz::{conjugate_at, orlicz_norm, YoungFunction};
use crate::saconstruct::{
    build_f, l1w_bound_check, l1w_norm, lift_power, ratio, ArcSet, WeightSequence,
};
use crate::C64;

fn young() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.05f64..6.0).prop_map(|p| YoungFunction::power(p).unwrap()),
        (1.05f64..4.0, 0.2f64..5.0).prop_map(|(p, c)| YoungFunction::scaled_power(p, c).unwrap()),
        (1.5f64..4.0, 0.0f64..2.0).prop_map(|(p, q)| YoungFunction::power_log(p, q).unwrap()),
    ]
}

fn complex_vec(max_len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(
        (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(a, b)| C64::new(a, b)),
        1..max_len,
    )
}

/// Arcs with endpoints on a `1/q` lattice, possibly wrapping through 0.
fn arc_set() -> impl Strategy<Value = ArcSet> {
    prop::collection::vec((0i64..64, 0i64..40), 0..5).prop_map(|pieces| {
        let q = 64;
        let mut out = ArcSet::empty();
        for (s, len) in pieces {
            let c = ratio(2 * s + len, 2 * q);
            let one = ArcSet::centered(&c, &ratio(len, q)).unwrap();
            out = out.union(&one);
        }
        out
    })
}

fn zero_in_disk() -> impl Strategy<Value = C64> {
    (0.0f64..0.9, 0.0f64..1.0).prop_map(|(r, t)| C64::from_polar(r, std::f64::consts::TAU * t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arc_measure_is_inclusion_exclusion(a in arc_set(), b in arc_set()) {
        let i = a.intersect(&b);
        let u = a.union(&b);
        prop_assert_eq!(u.measure() + i.measure(), a.measure() + b.measure());
        prop_assert!(i.measure() <= a.measure().min(b.measure()));
        prop_assert_eq!(a.intersect(&b), b.intersect(&a));
    }

    #[test]
    fn arc_membership_matches_intersection(a in arc_set(), b in arc_set(), num in 0i64..1024) {
        let theta = ratio(num, 1024);
        prop_assert_eq!(a.intersect(&b).contains(&theta), a.contains(&theta) && b.contains(&theta));
        prop_assert_eq!(a.union(&b).contains(&theta), a.contains(&theta) || b.contains(&theta));
    }

    #[test]
    fn arc_sets_stay_sorted_and_disjoint(a in arc_set(), b in arc_set()) {
        for s in [a.intersect(&b), a.union(&b)] {
            let arcs = s.arcs();
            for (lo, hi) in arcs {
                prop_assert!(lo <= hi && *lo >= BigRational::zero() && *hi <= ratio(1, 1));
            }
            for w in arcs.windows(2) {
                prop_assert!(w[0].1 < w[1].0);
            }
        }
    }

    #[test]
    fn power_preimage_keeps_measure(num in 0i64..100, len in 1i64..99, m in 1u64..40) {
        let c = ratio(num, 100);
        let l = ratio(len, 100);
        let pre = ArcSet::preimage_under_power(&c, &l, m).unwrap();
        prop_assert_eq!(pre.measure(), l);
        prop_assert!(pre.len() <= m as usize + 1);
    }

    #[test]
    fn orlicz_norm_is_a_norm(phi in young(), a in complex_vec(24), b in complex_vec(24), c in -5.0f64..5.0) {
        let na = orlicz_norm(&a, &phi);
        let scaled: Vec<C64> = a.iter().map(|z| z * c).collect();
        let tol = 1e-8;
        prop_assert!((orlicz_norm(&scaled, &phi) - c.abs() * na).abs() <= tol * (1.0 + c.abs() * na));
        let len = a.len().max(b.len());
        let sum: Vec<C64> = (0..len)
            .map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default())
            .collect();
        let nb = orlicz_norm(&b, &phi);
        prop_assert!(orlicz_norm(&sum, &phi) <= (na + nb) * (1.0 + tol));
        // Unit ball: the modular at the norm is at most 1.
        let modular: f64 = a.iter().map(|z| phi.value(z.norm() / na)).sum();
        prop_assert!(modular <= 1.0 + 1e-9);
    }

    #[test]
    fn young_inequality_holds(phi in young(), x in 0.0f64..3.0, y in 0.0f64..3.0) {
        let conj = conjugate_at(&phi, y).unwrap();
        prop_assert!(x * y <= phi.value(x) + conj + 1e-9 * (1.0 + x * y));
    }

    #[test]
    fn conjugate_is_convex_and_increasing(phi in young(), x in 0.01f64..2.0, h in 0.001f64..0.5) {
        let f = |t| conjugate_at(&phi, t).unwrap();
        let (a, b, c) = (f(x), f(x + h), f(x + 2.0 * h));
        prop_assert!(b >= a - 1e-9);
        prop_assert!(a + c >= 2.0 * b - 1e-8 * (1.0 + b));
    }

    #[test]
    fn blaschke_has_unimodular_boundary(zeros in prop::collection::vec(zero_in_disk(), 1..5)) {
        let b = FiniteBlaschke::new(zeros.clone()).unwrap();
        prop_assert!(b.boundary_modulus_error(512) < 1e-12);
        for z in &zeros {
            prop_assert!(b.eval(*z).norm() < 1e-12);
        }
    }

    #[test]
    fn model_space_basis_is_orthonormal(zeros in prop::collection::vec(zero_in_disk(), 1..4)) {
        let theta = FiniteBlaschke::new(zeros).unwrap();
        let basis = model_space_basis(&theta, 256).unwrap();
        prop_assert_eq!(basis.basis.len(), theta.degree());
        prop_assert!(basis.gram_residual < 1e-9, "{}", basis.gram_residual);
        prop_assert!(basis.orthogonality_residual < 1e-6, "{}", basis.orthogonality_residual);
    }

    #[test]
    fn riesz_products_have_unit_mass(depth in 1usize..7, amp in prop::collection::vec(0.0f64..1.0, 7)) {
        let frequencies: Vec<u64> = (1..=depth as u32).map(|k| 4u64.pow(k)).collect();
        let spec = RieszProductSpec { frequencies, amplitudes: amp[..depth].to_vec(), grid_m: 1 << 16 };
        let (mu, _) = crate::innerouter::riesz_product_measure(&spec).unwrap();
        prop_assert!((mu.total_mass().re - 1.0).abs() < 1e-10);
        prop_assert!(mu.density().unwrap().iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn csv_floats_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO) {
        let Cell::Num(v) = Cell::from(x) else { unreachable!() };
        let mut t = crate::experiments::Table::new(&["v"]);
        t.push(vec![Cell::Num(v)]);
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        let back: f64 = csv.lines().nth(1).unwrap().parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn clark_b_is_a_self_map(
        thetas in prop::collection::vec(0.0f64..1.0, 1..4),
        masses in prop::collection::vec(0.1f64..2.0, 4),
    ) {
        let atoms = thetas.iter().zip(&masses).map(|(&t, &m)| crate::analytic::Atom::new(t, m)).collect();
        let mu = BoundaryMeasure::from_atoms(atoms).unwrap();
        let pair = clark_b_from_mu(&mu, 0.0, 128).unwrap();
        for k in 0..8 {
            let z = C64::from_polar(0.8, k as f64 * 0.7);
            prop_assert!(pair.b_at(z).unwrap().norm() < 1.0);
        }
        let mass = mu.total_mass().re;
        prop_assert!((pair.b.coeff(0).re - (mass - 1.0) / (mass + 1.0)).abs() < 1e-10);
    }

    #[test]
    fn outer_modulus_matches_smooth_data(a in prop::collection::vec(-0.5f64..0.5, 4)) {
        let m = 1024;
        let psi: Vec<f64> = (0..m)
            .map(|j| {
                let t = std::f64::consts::TAU * j as f64 / m as f64;
                a.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * t).cos()).sum()
            })
            .collect();
        let out = outer_from_log_modulus(&BoundaryGrid::from_real(psi.clone()).unwrap(), 128).unwrap();
        let vals = out.series.eval_on_circle(1.0, m);
        let err = vals.iter().zip(&psi).map(|(v, p)| (v.norm() - p.exp()).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn lifts_are_sparse_and_l1w_estimate_holds(
        gamma in 0.2f64..0.9,
        delta in 0.1f64..0.5,
        m in 1usize..40,
    ) {
        let f = build_f(gamma, delta, delta / 8.0, 1 << 12, 1 << 11).unwrap();
        let lift = lift_power(&f.series, m, delta, 1 << 20).unwrap();
        for (n, c) in lift.series.coeffs().iter().enumerate() {
            if n % m != 0 {
                prop_assert!(c.norm() == 0.0);
            } else {
                prop_assert_eq!(*c, f.series.coeff(n / m));
            }
        }
        let w = WeightSequence::power(2.0, 0.25, 1 << 20).unwrap();
        let norm = l1w_norm(&lift.series, &w).unwrap();
        let check = l1w_bound_check(norm, m, f.n_value, &w).unwrap();
        prop_assert!(check.slack >= 0.0, "{check:?}");
        prop_assert_eq!(lift.arcs.measure(), ratio(1, 1) - ratio_of(delta));
    }

    #[test]
    fn fourier_bound_constant_holds(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..64),
        a in prop_oneof![Just(None), Just(Some(0.25)), Just(Some(0.5))],
    ) {
        let f = TaylorSeries::new(coeffs.into_iter().map(|(x, y)| C64::new(x, y)).collect()).unwrap();
        let w = match a {
            None => Majorant::constant(1.0, 24).unwrap(),
            Some(a) => Majorant::power(a, 24).unwrap(),
        };
        let r = fourier_bound_report(&f, &w, &DiskGrid::refined(10, 2, 128));
        prop_assert!(r.trivial || r.max_ratio <= FOURIER_BOUND, "{}", r.max_ratio);
    }
}

fn ratio_of(x: f64) -> BigRational {
    crate::saconstruct::ratio_from_f64(x).unwrap()
}
