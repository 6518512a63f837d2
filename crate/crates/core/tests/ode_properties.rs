use num_complex::Complex64 as C;
use proptest::prelude::*;
use unidisc::geometry::phi;
use unidisc::zeros::find_zeros;
use unidisc::{parse_expr, MobiusTransfer, SolutionBasis, SolverConfig, Which};

fn coefficient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> String {
    format!("({}+{}*i) + ({}+{}*i)*z + ({}+{}*i)/(1.2-z)", a.0, a.1, b.0, b.1, c.0, c.1)
}

fn pair() -> impl Strategy<Value = (f64, f64)> {
    (-5.0f64..5.0, -5.0f64..5.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn residual_and_wronskian(a in pair(), b in pair(), c in pair(), r in 0.0f64..0.9, t in 0.0f64..std::f64::consts::TAU) {
        let e = parse_expr::<f64>(&coefficient(a, b, c)).unwrap();
        let basis = SolutionBasis::standard(e.clone(), SolverConfig::default()).unwrap();
        let z = C::from_polar(r, t);
        let az = e.eval(z).unwrap();
        for which in [Which::F1, Which::F2] {
            let j = basis.jet(which, z, 2).unwrap();
            let bound = 1e-8 * (1.0 + j[0].norm()) * az.norm().max(1.0);
            prop_assert!((j[2] + az * j[0]).norm() <= bound);
        }
        let [u, v] = basis.jets(z, 1).unwrap();
        let scale = (u[0] * v[1]).norm() + (u[1] * v[0]).norm();
        let w = basis.wronskian(z).unwrap();
        prop_assert!((w - 1.0).norm() <= 1e-9 * scale.max(1.0));
    }

    #[test]
    fn combination_is_linear(alpha in pair(), beta in pair(), r in 0.0f64..0.95, t in 0.0f64..std::f64::consts::TAU) {
        let basis = SolutionBasis::standard(parse_expr::<f64>("3/(1-z)^2").unwrap(), SolverConfig::default()).unwrap();
        let (al, be) = (C::new(alpha.0, alpha.1), C::new(beta.0, beta.1));
        let z = C::from_polar(r, t);
        let f = basis.combination(al, be, z, 1).unwrap();
        let [u, v] = basis.jets(z, 1).unwrap();
        prop_assert!((f[0] - (al * u[0] + be * v[0])).norm() <= 1e-12 * (f[0].norm() + 1.0));
        prop_assert!((f[1] - (al * u[1] + be * v[1])).norm() <= 1e-12 * (f[1].norm() + 1.0));
    }
}

// Zeros of the transferred solution are the images of the original zeros under φ_κ.
#[test]
fn mobius_covariance_of_zero_sets() {
    let a = parse_expr::<f64>("36").unwrap();
    let basis = SolutionBasis::standard(a.clone(), SolverConfig::default()).unwrap();
    let f = |z: C| {
        let v = basis.jet(Which::F2, z, 1)?;
        Ok((v[0], v[1]))
    };
    let outer = find_zeros(f, 0.97).unwrap().expanded();
    for kappa in [C::new(0.3, 0.2), C::new(-0.45, 0.1), C::new(0.0, -0.5)] {
        let mt = MobiusTransfer::new(&a, kappa).unwrap();
        let g = |zeta: C| {
            let j = mt.g_jet(&basis, Which::F2, zeta)?;
            Ok((j[0], j[1]))
        };
        let k = kappa.norm();
        let rho = (0.97 - k) / (1.0 - 0.97 * k);
        let gz = find_zeros(g, rho * 0.98).unwrap();
        let images: Vec<C> = outer.iter().map(|&z| phi(kappa, z)).filter(|w| w.norm() < gz.capture_radius).collect();
        assert_eq!(images.len(), gz.count());
        for w in gz.expanded() {
            let d = images.iter().map(|e| (e - w).norm()).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-7, "κ = {kappa}: image distance {d}");
        }
    }
}
