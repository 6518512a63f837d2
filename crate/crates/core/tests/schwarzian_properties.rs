use num_complex::Complex64 as C;
use proptest::prelude::*;
use unidisc::geometry::{phi, phi_prime, phi_second};
use unidisc::schwarzian::{pre_schwarzian, quotient_jet, schwarzian, LogBranch, QuotientMap};
use unidisc::{parse_expr, SolutionBasis, SolverConfig};

fn quotient(a: &str) -> QuotientMap<f64> {
    QuotientMap::new(SolutionBasis::for_quotient(parse_expr(a).unwrap(), SolverConfig::default()).unwrap()).unwrap()
}

fn point() -> impl Strategy<Value = C> {
    (0.0f64..0.85, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| C::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schwarzian_is_twice_the_coefficient(k in 0usize..4, z in point()) {
        let a = ["1", "2", "1/(1-z)", "0.5*z^2-0.5*i"][k];
        let q = quotient(a);
        let two_a = parse_expr::<f64>(a).unwrap().eval(z).unwrap() * 2.0;
        let s = q.schwarzian(z).unwrap();
        prop_assert!((s - two_a).norm() <= 1e-7 * two_a.norm().max(1.0));
    }

    #[test]
    fn schwarzian_ignores_post_composed_mobius(z in point(), a in (-2.0f64..2.0, -2.0f64..2.0), c in (-2.0f64..2.0, -2.0f64..2.0)) {
        let q = quotient("3/(1-z)");
        let w = q.jet(z).unwrap();
        let (a, b, c, d) = (C::new(a.0, a.1), C::new(0.5, -1.0), C::new(c.0, c.1), C::new(1.5, 0.25));
        prop_assume!((a * d - b * c).norm() > 0.1);
        let lift = |s: C, t: C| -> Vec<C> { w.iter().enumerate().map(|(k, x)| s * x + if k == 0 { t } else { C::new(0.0, 0.0) }).collect() };
        let den = lift(c, d);
        prop_assume!(den[0].norm() > 1e-3);
        let m = quotient_jet(&lift(a, b), &den).unwrap();
        let (s0, s1) = (schwarzian(&w).unwrap(), schwarzian(&m).unwrap());
        prop_assert!((s0 - s1).norm() <= 1e-7 * s0.norm().max(1.0));
    }

    #[test]
    fn transferred_log_identities(zeta in point(), z in point()) {
        let q = quotient("1/(1-z)^2");
        let x = phi(zeta, z);
        let (p1, p2) = (phi_prime(zeta, z), phi_second(zeta, z));
        let w = q.jet(x).unwrap();
        // h = log w'∘φ: h' = w''/w'·φ', h'' from the jet of w'∘φ.
        let (v, v1, v2) = (w[1], w[2] * p1, w[3] * p1 * p1 + w[2] * p2);
        let h1 = v1 / v;
        let h2 = v2 / v - h1 * h1;
        let pre = pre_schwarzian(&w).unwrap();
        prop_assert!((h1 - pre * p1).norm() <= 1e-9 * h1.norm().max(1.0));
        let rhs = schwarzian(&w).unwrap() * p1 * p1 + pre * p2;
        prop_assert!((h2 - h1 * h1 * 0.5 - rhs).norm() <= 1e-8 * rhs.norm().max(1.0));
    }

    #[test]
    fn log_branch_inverts_exp(z in point(), k in 1i32..6) {
        let f = parse_expr::<f64>(&format!("exp({k}*i*z)*(z-1.5)^2")).unwrap();
        let b = LogBranch::new(|z| f.eval(z), C::new(0.0, 0.0)).unwrap();
        let l = b.value(z).unwrap();
        let v = f.eval(z).unwrap();
        prop_assert!((l.exp() - v).norm() <= 1e-10 * v.norm());
    }
}
