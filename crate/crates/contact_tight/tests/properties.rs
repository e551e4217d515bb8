use std::f64::consts::PI;

use proptest::prelude::*;

use contact_tight::curvature::{tau_ac, tau_ac_quadrature};
use contact_tight::flow::{initial_variation, integrate_variational, symplectic_pairing};
use contact_tight::jacobi::{check_initial_jet, jacobi_trace, schwarzian_of, TraceConfig};
use contact_tight::ode::IntegratorConfig;
use contact_tight::scalar::Series;
use contact_tight::structures::StructureSpec;
use contact_tight::sturm::{r_star, singular_first_zero, sturm_interlace_check, SingularPotential};

fn coarse() -> TraceConfig {
    TraceConfig { samples_per_unit: 64, ..TraceConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn schwarzian_mobius_invariant(
        c in prop::array::uniform4(-2.0f64..2.0),
        m in prop::array::uniform4(-2.0f64..2.0),
        r in 0.1f64..3.0,
    ) {
        let v = Series::<4> { c: [c[0], 1.0 + c[1].abs(), c[2], c[3]] };
        let den = v.c[0] * m[2] + m[3];
        prop_assume!((m[0] * m[3] - m[1] * m[2]).abs() > 0.2 && den.abs() > 0.2);
        let w = (v * m[0] + m[1]) / (v * m[2] + m[3]);
        let s0 = schwarzian_of(&v, r).unwrap();
        let s1 = schwarzian_of(&w, r).unwrap();
        prop_assert!((s1 - s0).abs() <= 1e-8 * (1.0 + s0.abs()), "{s0} vs {s1}");
    }

    #[test]
    fn tau_closed_form_matches_quadrature(a in 0.05f64..4.0, c in 0.05f64..4.0) {
        let (t, q) = (tau_ac(a, c), tau_ac_quadrature(a, c));
        prop_assert!((t - q).abs() <= 1e-8 * (1.0 + q), "tau({a},{c}) = {t} vs {q}");
    }

    #[test]
    fn tau_decreasing(a in 0.1f64..3.0, c in 0.1f64..3.0, d in 0.01f64..1.0) {
        let t = tau_ac(a, c);
        prop_assert!(tau_ac(a + d, c) < t);
        prop_assert!(tau_ac(a, c + d) < t);
    }

    #[test]
    fn r_star_bounds_first_zero(k1 in 0.0f64..2.0, k2 in 0.0f64..2.0) {
        prop_assume!(k1 > 0.05 || k2 > 0.05);
        let rs = r_star(k1, k2);
        let z = singular_first_zero(&SingularPotential::comparison(k1, k2), rs + 20.0).unwrap().value().unwrap();
        prop_assert!(z >= rs - 1e-6, "first zero {z} below r* {rs}");
        if k1 == 0.0 || k2 == 0.0 {
            prop_assert!((z - rs).abs() <= 1e-6);
        }
    }

    #[test]
    fn r_star_pure_quadratic_scaling(k2 in 0.01f64..10.0) {
        let want = (2.0 * PI).sqrt() / k2.powf(0.25);
        prop_assert!((r_star(0.0, k2) - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn sturm_picone_interlacing(k1 in -1.0f64..2.0, k2 in 0.0f64..3.0, d1 in 0.0f64..1.5, d2 in 0.0f64..1.5) {
        let q = SingularPotential::comparison(k1, k2);
        let qbar = SingularPotential::comparison(k1 + d1, k2 + d2);
        let rep = sturm_interlace_check(&q, &qbar, (0.0, 5.0)).unwrap();
        prop_assert!(rep.dominated);
        prop_assert!(rep.holds, "{:?}", rep.counterexample);
    }

    #[test]
    fn heisenberg_quotient_is_half_square(z in -1.0f64..1.0, theta in 0.0f64..(2.0 * PI)) {
        let s = StructureSpec::heisenberg();
        let t = jacobi_trace(&s, &s.orbit, z, theta, 3.0, &coarse()).unwrap();
        for k in 1..t.r.len() {
            let r = t.r[k];
            let v = t.w_theta[k] / t.w_z[k];
            prop_assert!((v - r * r / 2.0).abs() <= 1e-8 * r * r);
        }
    }

    #[test]
    fn kcontact_initial_jet_and_pairing(kappa in -2.0f64..2.0, z in -0.7f64..0.7, theta in 0.0f64..(2.0 * PI)) {
        let s = StructureSpec::kcontact(kappa).unwrap();
        let t = jacobi_trace(&s, &s.orbit, z, theta, 0.5, &coarse()).unwrap();
        prop_assert!(check_initial_jet(&t).max_deviation <= 1e-6);
        let v0 = initial_variation(&s, &s.orbit, z, theta).unwrap();
        let tr = integrate_variational(&s, &v0, 2.0, &IntegratorConfig::default()).unwrap();
        let w0 = symplectic_pairing(&v0.v_theta, &v0.v_z);
        for k in 0..=20 {
            let st = tr.state(0.1 * k as f64);
            prop_assert!((symplectic_pairing(&st.v_theta, &st.v_z) - w0).abs() <= 1e-8);
        }
    }
}
