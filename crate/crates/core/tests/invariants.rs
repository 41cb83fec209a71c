use proptest::prelude::*;

use twoneuron::lienard::{hopf_manifold, taylor_coeffs_at};
use twoneuron::lyapunov::{generic_scale, lyapunov_closed, lyapunov_generic};
use twoneuron::model::{equilibrium_residual, reflect_state};
use twoneuron::{
    equilibria, reduce_original, sigmoid, symmetry_conjugate, vector_field, EquilibriumKind, OriginalParams, Params,
    State,
};

fn params() -> impl Strategy<Value = Params> {
    (0.1f64..40.0, 0.1f64..60.0, -30.0f64..60.0).prop_map(|(a, b, c)| Params::new(a, b, c).unwrap())
}

proptest! {
    #[test]
    fn sigmoid_is_point_symmetric(u in -40.0f64..40.0) {
        prop_assert!((sigmoid(u) + sigmoid(-u) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equilibria_are_ordered_roots(p in params()) {
        let eqs = equilibria(&p, 1e-13);
        prop_assert!((1..=3).contains(&eqs.len()));
        for w in eqs.windows(2) {
            prop_assert!(w[0].u0 < w[1].u0);
        }
        for eq in &eqs {
            prop_assert!(equilibrium_residual(&p, eq.u0).abs() < 1e-9 * (1.0 + p.c().abs() + p.d().abs()));
            prop_assert_eq!(eq.v0, sigmoid(eq.u0));
        }
        if eqs.len() == 3 {
            prop_assert_eq!(eqs[1].kind, EquilibriumKind::Saddle);
        }
    }

    #[test]
    fn reflection_is_an_involution(p in params()) {
        let q = symmetry_conjugate(&symmetry_conjugate(&p));
        prop_assert_eq!(q, p);
        prop_assert!((symmetry_conjugate(&p).c() - (p.b() - p.a() - p.c())).abs() < 1e-12 * (1.0 + p.b()));
    }

    #[test]
    fn reflection_conjugates_the_field(p in params(), u in -10.0f64..10.0, v in 0.0f64..1.0) {
        let s = State::new(u, v);
        let f = vector_field(&p, s);
        let g = vector_field(&symmetry_conjugate(&p), reflect_state(s));
        let scale = 1.0 + p.a() + p.b() + p.c().abs() + u.abs();
        prop_assert!((f.u + g.u).abs() < 1e-12 * scale);
        prop_assert!((f.v + g.v).abs() < 1e-14);
    }

    #[test]
    fn reduction_maps_equilibria(q11 in 0.1f64..20.0, q12 in 0.1f64..5.0, q21 in 0.1f64..5.0, e1 in -5.0f64..5.0, e2 in -5.0f64..5.0) {
        let (p, map) = reduce_original(&OriginalParams::new(q11, q12, q21, e1, e2).unwrap());
        for eq in equilibria(&p, 1e-13) {
            let (u1, u2) = map.invert(eq.state());
            // original network: u1' = -u1 + q11 phi(u1) - q12 u2 + e1, u2' = -u2 + q21 phi(u1) + e2
            let r1 = -u1 + q11 * sigmoid(u1) - q12 * u2 + e1;
            let r2 = -u2 + q21 * sigmoid(u1) + e2;
            prop_assert!(r1.abs() < 1e-8 * (1.0 + q11 + q12 * u2.abs() + e1.abs()), "{r1}");
            prop_assert!(r2.abs() < 1e-12 * (1.0 + q21 + e2.abs()), "{r2}");
            let back = map.apply(u1, u2);
            prop_assert!((back.v - eq.v0).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_and_closed_forms_scale_consistently(u0 in -1.2f64..1.2, frac in -4.0f64..0.49) {
        let a = 1.0 + (4.0 * u0).cosh();
        let d = frac * a;
        let h = hopf_manifold(u0, a - d).unwrap();
        let p = h.params().unwrap();
        let generic = lyapunov_generic(&taylor_coeffs_at(&p, u0)).unwrap();
        let closed = lyapunov_closed(h.theta, d).unwrap();
        let k = generic_scale(h.theta);
        let rel = |g: f64, c: f64, k: f64| (g - k * c).abs() / (k * c.abs()).max(1e-300);
        prop_assume!(closed.l1.abs() > 1e-6);
        prop_assert!(rel(generic.l1, closed.l1, k[0]) < 1e-6);
    }
}
