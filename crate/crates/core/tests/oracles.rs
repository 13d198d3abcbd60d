//! Frozen hand-computed values, checked through the public API.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use quasicheese::geometry::{AbstractSwissCheese, Disk};
use quasicheese::jets::{sup_jet_on_circle, RationalFunction};
use quasicheese::paths::{check_F_derivative, check_pathwise_derivative_bound, contour_integral, Path};
use quasicheese::sequences::{
    f_analytic_statistic, is_algebra_sequence, is_log_convex, log_convex_minorant, Family, NormSequence,
    PositiveSequence,
};
use quasicheese::Error;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unit_with(holes: Vec<Disk>, tail: f64) -> AbstractSwissCheese {
    AbstractSwissCheese::new(Disk::new(c64(0.0, 0.0), 1.0), holes, tail).unwrap()
}

#[test]
fn cheese_values() {
    assert_eq!(unit_with(vec![], 0.0).rho(), 0.0);
    let two = vec![Disk::new(c64(0.5, 0.0), 0.2), Disk::new(c64(-0.5, 0.0), 0.1)];
    assert!((unit_with(two.clone(), 0.0).rho() - 0.3).abs() < 1e-15);
    assert!((unit_with(two, 0.05).rho() - 0.35).abs() < 1e-15);

    let one = unit_with(vec![Disk::new(c64(0.5, 0.0), 0.2)], 0.0);
    let rep = one.is_classical(0.0);
    assert!(rep.is_classical);
    assert!((rep.worst_containment_margin - 0.3).abs() < 1e-15);
    assert!(one.contains_point(c64(0.0, 0.0)));
    assert!(!one.contains_point(c64(0.5, 0.0)));
    assert!(one.contains_point(c64(0.7, 0.0)));

    let tangent = unit_with(vec![Disk::new(c64(-0.3, 0.0), 0.1), Disk::new(c64(-0.1, 0.0), 0.1)], 0.0);
    assert!(!tangent.is_classical(0.0).is_classical);

    let with_point = unit_with(vec![Disk::new(c64(0.5, 0.0), 0.2), Disk::new(c64(-0.2, 0.3), 0.0)], 0.0);
    assert!(with_point.is_classical(0.0).is_classical);

    assert!(unit_with(vec![], 0.0).circle_in_cheese(c64(0.0, 0.0), 0.5));
    assert!(!unit_with(vec![Disk::new(c64(0.5, 0.0), 0.1)], 0.0).circle_in_cheese(c64(0.0, 0.0), 0.5));
    assert!(unit_with(vec![Disk::new(c64(0.7, 0.0), 0.1)], 0.0).circle_in_cheese(c64(0.0, 0.0), 0.5));
}

#[test]
fn path_values() {
    assert!((Path::segment(c64(0.0, 0.0), c64(1.0, 0.0)).unwrap().length() - 1.0).abs() < 1e-15);
    assert!((Path::circle(c64(0.0, 0.0), 2.0).unwrap().length() - 4.0 * PI).abs() < 1e-12);
    assert!((Path::polyline(vec![c64(0.0, 0.0), c64(3.0, 4.0)]).unwrap().length() - 5.0).abs() < 1e-15);
    assert!(matches!(
        Path::segment(c64(1.0, 1.0), c64(1.0, 1.0)).and_then(|p| p.arclength_parametrize()),
        Err(Error::ConstantPath)
    ));

    let seg = Path::segment(c64(0.0, 0.0), c64(2.0, 0.0)).unwrap();
    let unit = seg.arclength_parametrize().unwrap();
    assert_eq!(unit.interval(), (0.0, 2.0));
    assert!((unit.point(1.0) - c64(1.0, 0.0)).norm() < 1e-15);

    let sq = check_F_derivative(|z| z * z, |z| 2.0 * z, std::slice::from_ref(&seg), 1e-12).unwrap();
    assert!(sq.max_residual < 1e-10);
    let vertical = Path::segment(c64(0.0, 0.0), c64(0.0, 1.0)).unwrap();
    let conj = check_F_derivative(|z: Complex64| z.conj(), |_| c64(1.0, 0.0), &[vertical], 1e-12).unwrap();
    assert!((conj.max_residual - 2.0).abs() < 1e-12);

    let unit_seg = Path::segment(c64(0.0, 0.0), c64(1.0, 0.0)).unwrap();
    let b = check_pathwise_derivative_bound(|z| z * z, |z| 2.0 * z, &unit_seg, 64).unwrap();
    assert!((b.lhs - 1.0).abs() < 1e-15 && (b.rhs - 2.0).abs() < 1e-12);

    let back = contour_integral(|z| z, &unit_seg.reverse(), 1e-12).unwrap().value;
    assert!((back + c64(0.5, 0.0)).norm() < 1e-14);
}

#[test]
fn jet_values() {
    let f = RationalFunction::simple_pole(c64(2.0, 0.0));
    let jet = f.eval_jet(c64(0.0, 0.0), 2).unwrap();
    for (k, want) in [-0.5, -0.25, -0.25].into_iter().enumerate() {
        assert!((jet.derivative(k) - c64(want, 0.0)).norm() < 1e-15);
    }
    let sq = RationalFunction::polynomial(vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
    let jet = sq.eval_jet(c64(1.0, 0.0), 3).unwrap();
    assert_eq!(jet.values, vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(2.0, 0.0), c64(0.0, 0.0)]);
    let inv = RationalFunction::simple_pole(c64(0.0, 0.0));
    assert!(matches!(inv.eval(c64(0.0, 0.0)), Err(Error::PoleAtPoint(_))));

    let z = RationalFunction::polynomial(vec![c64(0.0, 0.0), c64(1.0, 0.0)]);
    let sups = sup_jet_on_circle(&z, c64(0.0, 0.0), 1.0, 3, 1e-12).unwrap().sups;
    assert!((sups[0] - 1.0).abs() < 1e-12 && (sups[1] - 1.0).abs() < 1e-12);
    assert_eq!(&sups[2..], &[0.0, 0.0]);
}

#[test]
fn sequence_values() {
    let fact = Family::Factorial.generate(20).unwrap();
    assert!(is_algebra_sequence(&fact).holds);
    let ones = Family::Constant(1.0).generate(20).unwrap();
    assert_eq!(is_algebra_sequence(&ones).first_violation, Some((1, 1)));
    assert!(is_log_convex(&fact).holds);
    assert!(!is_log_convex(&PositiveSequence::from_values(&[1.0, 4.0, 8.0]).unwrap()).holds);

    let m = log_convex_minorant(&PositiveSequence::from_values(&[1.0, 4.0, 8.0]).unwrap());
    assert_eq!(m.principal_indices, vec![0, 2]);
    assert!((m.minorant.value(1) - 8f64.sqrt()).abs() < 1e-14);
    let m = log_convex_minorant(&PositiveSequence::from_values(&[1.0, 10.0, 2.0]).unwrap());
    assert_eq!(m.principal_indices, vec![0, 2]);
    assert!((m.minorant.value(1) - 2f64.sqrt()).abs() < 1e-14);

    let norms = NormSequence::from_logs(fact.logs().to_vec()).unwrap();
    let stat = f_analytic_statistic(&norms);
    assert!(stat.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
}

proptest! {
    #[test]
    fn minorant_is_below_and_log_convex(logs in prop::collection::vec(-20.0f64..20.0, 2..40)) {
        let m = PositiveSequence::from_logs(logs.clone()).unwrap();
        let res = log_convex_minorant(&m);
        let scale = logs.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
        for (n, l) in res.minorant.logs().iter().enumerate() {
            prop_assert!(*l <= logs[n] + 1e-12 * scale);
        }
        prop_assert!(is_log_convex(&res.minorant).holds);
        prop_assert_eq!(res.principal_indices.first(), Some(&0));
        prop_assert_eq!(res.principal_indices.last(), Some(&(logs.len() - 1)));
    }

    #[test]
    fn integral_over_reversed_path_changes_sign(
        a in (-2.0f64..2.0, -2.0f64..2.0),
        b in (-2.0f64..2.0, -2.0f64..2.0),
    ) {
        prop_assume!((a.0 - b.0).hypot(a.1 - b.1) > 1e-3);
        let p = Path::segment(c64(a.0, a.1), c64(b.0, b.1)).unwrap();
        let f = |z: Complex64| z.exp() * z;
        let fwd = contour_integral(f, &p, 1e-12).unwrap().value;
        let rev = contour_integral(f, &p.reverse(), 1e-12).unwrap().value;
        prop_assert!((fwd + rev).norm() < 1e-9);
    }
}
