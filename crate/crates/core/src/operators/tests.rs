use super::*;
use crate::complexfn::{coefficients_of, verify_self_map, ExtractionOptions};
use crate::kernels::{SupSettings, SupVerdict};
use crate::norms::beta_int;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn verified_poly(coeffs: &[f64]) -> Symbol {
    verify_self_map(&Symbol::polynomial_real(coeffs), 1024, 1e-9)
        .unwrap()
        .symbol
}

fn small_bound_settings() -> BoundCheckSettings {
    BoundCheckSettings {
        double: QuadratureSettings {
            radial_count: 8,
            angular_count: 32,
            ..QuadratureSettings::double_integral()
        },
        ..BoundCheckSettings::default()
    }
}

#[test]
fn composition_with_identity_function_is_symbol() {
    let s = Symbol::mobius(c(0.3, -0.2), 0.7).unwrap();
    let g = apply_composition(TruncatedPowerSeries::monomial(1), &s).unwrap();
    for z in [c(0.1, 0.2), c(-0.6, 0.3), c(0.0, 0.0)] {
        assert!((g.value(z).unwrap() - s.eval(z).unwrap()).norm() < 1e-15);
        assert!((g.derivative(z).unwrap() - s.eval_deriv(z).unwrap()).norm() < 1e-15);
    }
}

#[test]
fn square_after_cube_is_sixth_power() {
    let s = Symbol::monomial(3).unwrap();
    let g = apply_composition(TruncatedPowerSeries::monomial(2), &s).unwrap();
    for z in [c(0.4, 0.2), c(-0.7, 0.1)] {
        assert!((g.value(z).unwrap() - z.powu(6)).norm() < 1e-15);
        assert!((g.derivative(z).unwrap() - 6.0 * z.powu(5)).norm() < 1e-14);
    }
}

#[test]
fn mobius_composition_coefficients() {
    let s = Symbol::mobius(c(0.5, 0.0), 0.0).unwrap();
    let g = apply_composition(TruncatedPowerSeries::monomial(1), &s).unwrap();
    let ex = coefficients_of(&g, 20, ExtractionOptions::default()).unwrap();
    // (1/2 - z)/(1 - z/2) = 1/2 - (3/4) sum_{n>=1} 2^{1-n} z^n
    let coeffs = ex.series.coeffs();
    assert!((coeffs[0] - c(0.5, 0.0)).norm() < 1e-10);
    for (n, a) in coeffs.iter().enumerate().skip(1) {
        let expect = -0.75 * 0.5f64.powi(n as i32 - 1);
        assert!((a - c(expect, 0.0)).norm() < 1e-10, "n = {n}");
    }
}

#[test]
fn composition_rejects_unverified_symbol() {
    let s = Symbol::polynomial_real(&[0.1, 0.5]);
    let err = apply_composition(TruncatedPowerSeries::monomial(1), &s).unwrap_err();
    assert_eq!(err.code(), "E_SYMBOL");
}

#[test]
fn diagonal_symbol_jacobian() {
    let phi = DiagonalBidiscSymbol::new(Symbol::monomial(2).unwrap()).unwrap();
    let (z1, z2) = (c(0.3, 0.4), c(-0.5, 0.1));
    let (a, b) = phi.eval(z1, z2);
    assert!((a - z1 * z1).norm() < 1e-15 && (b - z2 * z2).norm() < 1e-15);
    let j = phi.jacobian(z1, z2);
    assert_eq!(j[0][1], c(0.0, 0.0));
    assert_eq!(j[1][0], c(0.0, 0.0));
    assert!((phi.jacobian_det(z1, z2) - 4.0 * z1 * z2).norm() < 1e-15);
    assert!(DiagonalBidiscSymbol::new(Symbol::polynomial_real(&[0.0, 0.5])).is_err());
}

#[test]
fn lift_params_must_be_positive() {
    assert!(LiftParams::new(1.0, 1.0).is_ok());
    for (p, g) in [(0.0, 1.0), (1.0, -2.0), (f64::NAN, 1.0)] {
        assert_eq!(LiftParams::new(p, g).unwrap_err().code(), "E_PARAM");
    }
    assert_eq!(LiftParams::new(5.0, 2.0).unwrap().exponent(), 2.5);
}

#[test]
fn lift_examples() {
    let konst = lift(
        TruncatedPowerSeries::constant(c(0.7, 0.2)),
        LiftParams::new(1.0, 1.0).unwrap(),
    );
    assert_eq!(konst.modulus(c(0.2, 0.1), c(-0.4, 0.3)).unwrap(), 0.0);

    let id = lift(
        TruncatedPowerSeries::monomial(1),
        LiftParams::new(1.0, 1.0).unwrap(),
    );
    for w in [c(0.3, 0.4), c(-0.9, 0.0), c(0.0, 0.2)] {
        assert!((id.modulus(c(0.0, 0.0), w).unwrap() - w.norm()).abs() < 1e-15);
    }
    let (z, w) = (c(0.5, 0.1), c(-0.2, 0.6));
    let rho = (z - w).norm() / (1.0 - z * w.conj()).norm();
    assert!((id.modulus(z, w).unwrap() - rho).abs() < 1e-15);

    let l = lift(
        TruncatedPowerSeries::monomial(1),
        LiftParams::new(5.0, 2.0).unwrap(),
    );
    assert_eq!(l.modulus(c(0.3, -0.2), c(0.3, -0.2)).unwrap(), 0.0);

    let on_diag = l.modulus(c(1.0, 0.0), c(1.0, 0.0)).unwrap_err();
    assert_eq!(on_diag.code(), "E_SINGULAR");
}

#[test]
fn lift_norm_of_constant_vanishes() {
    let s = QuadratureSettings {
        radial_count: 8,
        angular_count: 32,
        ..QuadratureSettings::double_integral()
    };
    let r = lift_norm_check(&TruncatedPowerSeries::constant(c(2.0, 0.0)), 1.0, 0.5, &s).unwrap();
    assert_eq!(r.lift_norm_sq.value_sq, 0.0);
    assert_eq!(r.dirichlet.value_sq, 0.0);
}

#[test]
fn lift_norm_routes_agree() {
    // both routes run on the same nodes, so convergence is beside the point
    let s = QuadratureSettings {
        radial_count: 8,
        angular_count: 32,
        target_rel_tol: 0.1,
        ..QuadratureSettings::double_integral()
    };
    for n in [1, 3] {
        let r = lift_norm_check(&TruncatedPowerSeries::monomial(n), 1.0, 0.5, &s).unwrap();
        assert!(r.route_gap() < 1e-8, "n = {n}: gap {}", r.route_gap());
        assert!((r.dirichlet.value_sq - n as f64 * n as f64 * beta_int(n, 2.0)).abs() < 1e-15);
    }
    let r = lift_norm_check(&TruncatedPowerSeries::monomial(1), 1.0, 0.5, &s).unwrap();
    assert!((r.dirichlet.value_sq - 0.5).abs() < 1e-15);
}

#[test]
fn lift_norm_check_validates_window() {
    let s = QuadratureSettings::double_integral();
    let err = lift_norm_check(&TruncatedPowerSeries::monomial(1), 1.0, 1.0, &s).unwrap_err();
    assert_eq!(err.code(), "E_PARAM");
}

#[test]
fn rank_monomial_full_circle() {
    for k in [2u32, 3] {
        let r = rank_sufficiency_check(&Symbol::monomial(k).unwrap(), &RankSettings::default())
            .unwrap();
        assert_eq!(r.contact.kind, ContactKind::FullCircle);
        assert!((r.min_deriv_modulus - k as f64).abs() < 1e-12);
        assert_eq!(r.verdict, RankVerdict::Pass);
    }
}

#[test]
fn rank_half_plus_half_z() {
    let r = rank_sufficiency_check(&verified_poly(&[0.5, 0.5]), &RankSettings::default()).unwrap();
    match &r.contact.kind {
        ContactKind::Points(ps) => {
            assert_eq!(ps.len(), 1);
            let t = ps[0].point.angle();
            assert!(t.min(std::f64::consts::TAU - t) < 1e-6);
            assert!((ps[0].deriv_modulus - 0.5).abs() < 1e-12);
            let ang = ps[0].angular_derivative.unwrap();
            assert!((ang - 0.5).abs() < 1e-6, "{ang}");
        }
        other => panic!("unexpected contact set {other:?}"),
    }
    assert!(r.contact.exhaustive);
    assert!((r.min_deriv_modulus - 0.5).abs() < 1e-12);
    assert_eq!(r.verdict, RankVerdict::Pass);
}

#[test]
fn rank_constant_is_vacuous() {
    let r = rank_sufficiency_check(&verified_poly(&[0.3]), &RankSettings::default()).unwrap();
    assert!(r.contact.is_empty());
    assert_eq!(r.verdict, RankVerdict::Vacuous);
}

#[test]
fn rank_mobius_minimum() {
    for a in [0.0, 0.5, 0.8] {
        let s = Symbol::mobius(c(a * 0.6, a * 0.8), 1.1).unwrap();
        let r = rank_sufficiency_check(&s, &RankSettings::default()).unwrap();
        assert_eq!(r.contact.kind, ContactKind::FullCircle);
        let expect = (1.0 - a) / (1.0 + a);
        assert!((r.min_deriv_modulus - expect).abs() < 1e-10, "a = {a}");
        assert_eq!(r.verdict, RankVerdict::Pass);
    }
}

#[test]
fn rank_critical_contact_fails() {
    // |phi'| = 2 everywhere on the circle, below the threshold
    let s = Symbol::monomial(2).unwrap();
    let settings = RankSettings {
        deriv_tol: 3.0,
        ..RankSettings::default()
    };
    let r = rank_sufficiency_check(&s, &settings).unwrap();
    assert_eq!(r.verdict, RankVerdict::Fail);
    assert!(r.note.is_some());
}

#[test]
fn bound_check_identity_ratio_is_one() {
    let family: Vec<_> = (1..=4).map(TruncatedPowerSeries::monomial).collect();
    let r = bound_check(
        &family,
        &Symbol::Identity,
        1.0,
        0.5,
        &small_bound_settings(),
    )
    .unwrap();
    assert_eq!(r.sup.verdict, SupVerdict::Bounded);
    for row in &r.rows {
        assert!((row.ratio - 1.0).abs() < 1e-8, "{}", row.ratio);
        assert_eq!(row.pointwise_violations, 0);
        assert!((row.composed_functional - row.pulled_back_functional).abs() < 1e-14);
    }
}

#[test]
fn bound_check_square_matches_beta_oracle() {
    let family: Vec<_> = (1..=8).map(TruncatedPowerSeries::monomial).collect();
    let s = Symbol::monomial(2).unwrap();
    let r = bound_check(&family, &s, 1.0, 0.5, &small_bound_settings()).unwrap();
    assert!((r.sup.value - 2.0).abs() < 1e-3);
    assert_eq!(r.params.q_exponent, 5.0);
    assert_eq!(r.rows.len(), 8);
    for (i, row) in r.rows.iter().enumerate() {
        let n = i + 1;
        assert_eq!(row.index, i);
        let composed = 4.0 * (n * n) as f64 * beta_int(2 * n, 2.0);
        let plain = (n * n) as f64 * beta_int(n, 2.0);
        assert!((row.composed_norm_sq.value_sq - composed).abs() < 1e-8 * composed);
        assert!((row.norm_sq.value_sq - plain).abs() < 1e-14);
        let expect = composed / (r.sup_power * plain);
        assert!((row.ratio - expect).abs() < 1e-6 * expect);
        assert!(row.ratio.is_finite() && row.ratio > 0.0);
        assert_eq!(row.pointwise_violations, 0);
        assert!(
            row.composed_functional <= r.sup_power * row.pulled_back_functional * (1.0 + 1e-12)
        );
    }
    assert_eq!(r.total_violations(), 0);
    assert!(r.rows[0].nodes_checked >= 10_000);
}

#[test]
fn bound_check_rejects_unbounded_kernel() {
    let settings = BoundCheckSettings {
        sup: SupSettings {
            interior_samples: 0,
            ..SupSettings::default()
        },
        ..small_bound_settings()
    };
    let err = bound_check(
        &[TruncatedPowerSeries::monomial(1)],
        &verified_poly(&[0.3]),
        1.0,
        0.5,
        &settings,
    )
    .unwrap_err();
    assert_eq!(err.code(), "E_PARAM");
}

#[test]
fn bound_check_validates_window() {
    let family = [TruncatedPowerSeries::monomial(1)];
    for (sigma, beta) in [(0.0, -0.5), (1.0, 1.0), (1.0, -0.6)] {
        let err = bound_check(
            &family,
            &Symbol::Identity,
            sigma,
            beta,
            &small_bound_settings(),
        )
        .unwrap_err();
        assert_eq!(err.code(), "E_PARAM");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn composition_is_linear(
        a in prop::collection::vec(-1.0f64..1.0, 1..6),
        b in prop::collection::vec(-1.0f64..1.0, 1..6),
        s in -2.0f64..2.0,
        zr in 0.0f64..0.95,
        zt in 0.0f64..std::f64::consts::TAU,
        ar in 0.0f64..0.9,
    ) {
        let phi = Symbol::mobius(Complex64::from_polar(ar, 1.0), 0.3).unwrap();
        let f = TruncatedPowerSeries::from_real(&a);
        let g = TruncatedPowerSeries::from_real(&b);
        let len = a.len().max(b.len());
        let comb: Vec<Complex64> = (0..len)
            .map(|k| c(s * a.get(k).copied().unwrap_or(0.0) + b.get(k).copied().unwrap_or(0.0), 0.0))
            .collect();
        let h = TruncatedPowerSeries::new(comb);
        let z = Complex64::from_polar(zr, zt);
        let lhs = apply_composition(&h, &phi).unwrap().value(z).unwrap();
        let rhs = s * apply_composition(&f, &phi).unwrap().value(z).unwrap()
            + apply_composition(&g, &phi).unwrap().value(z).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }
}
