//! End-to-end runs across modules on coefficients with closed-form solutions.

use num_complex::Complex64 as C;
use unidisc::functionals::{growth_norm, hardy_profile, normality_sigma, SupGrid};
use unidisc::schwarzian::{factorize, QuotientMap};
use unidisc::stopping::{generation_floor, quotient_modulus, StoppingForest};
use unidisc::zeros::{find_zeros, jensen_check, log_product_sup, separation_delta, transferred_blaschke_sup, uniform_separation};
use unidisc::{parse_expr, SolutionBasis, SolverConfig, Which};

#[test]
fn sine_zero_sequence() {
    // A = 49: f2 = sin(7z)/7, zeros kπ/7.
    let b = SolutionBasis::standard(parse_expr("49").unwrap(), SolverConfig::default()).unwrap();
    let f = |z: C| {
        let j = b.jet(Which::F2, z, 1)?;
        Ok((j[0], j[1]))
    };
    let zs = find_zeros(f, 0.95).unwrap();
    assert_eq!(zs.count(), 5);
    let pts = zs.expanded();
    let step = std::f64::consts::PI / 7.0;
    let delta = separation_delta(&pts).unwrap();
    // ρ(x, x + h) = h/(1 - x(x + h)) is smallest for the pair at the origin.
    assert!((delta - step).abs() < 1e-9, "{delta}");
    let t = transferred_blaschke_sup(&pts);
    assert!(log_product_sup(&pts) <= t / delta);
    assert!(uniform_separation(&pts).unwrap() > 0.0);
    // The zero at the origin is carried by the log r term.
    let nonzero: Vec<C> = pts.iter().copied().filter(|z| z.norm() > 1e-8).collect();
    let j = jensen_check(|z| b.value(Which::F2, z), &nonzero, 0.9).unwrap();
    assert!(j.passes(), "gap {}", j.gap);
}

#[test]
fn inner_function_solution() {
    // A = -4z/(1-z)^4 is solved by exp(-(1+z)/(1-z)), zero-free and bounded.
    let a = parse_expr::<f64>("-4*z/(1-z)^4").unwrap();
    let e = (-1.0f64).exp();
    let zero = C::new(0.0, 0.0);
    let b = SolutionBasis::new(a.clone(), (zero, C::new(1.0 / e, 0.0)), (C::new(e, 0.0), C::new(-2.0 * e, 0.0)), SolverConfig::default())
        .unwrap();
    let exact = |z: C| (-(C::new(1.0, 0.0) + z) / (C::new(1.0, 0.0) - z)).exp();
    for z in [C::new(0.3, 0.2), C::new(-0.5, 0.1), C::new(0.1, -0.45)] {
        assert!((b.value(Which::F2, z).unwrap() - exact(z)).norm() < 1e-8);
    }
    let g = growth_norm(|z| a.eval(z), 2.0, &SupGrid::boundary(8, 0.99)).unwrap();
    assert!(g.diverging);
    let p = hardy_profile(|z| b.value(Which::F2, z), &[0.3, 0.6, 0.9], 2.0).unwrap();
    assert!(p.monotone);
    let sigma = normality_sigma(
        |z| {
            let j = b.jet(Which::F2, z, 1)?;
            Ok((j[0], j[1]))
        },
        &SupGrid::boundary(6, 0.9),
    )
    .unwrap();
    assert!(sigma.value.is_finite());
}

#[test]
fn factorization_and_stopping_on_one_coefficient() {
    let a = parse_expr::<f64>("0.2/(1-z)^2").unwrap();
    let basis = SolutionBasis::for_quotient(a, SolverConfig::default()).unwrap();
    let fac = factorize(basis.clone(), C::new(1.0, 0.0), C::new(0.5, 0.0), 0.95).unwrap();
    for z in [C::new(0.5, 0.5), C::new(-0.9, 0.0), C::new(0.0, 0.93)] {
        assert!(fac.residual(z).unwrap() <= 1e-8 * fac.f(z).unwrap().norm().max(1.0));
        assert!(fac.branch_defect(z).unwrap() <= 1e-8);
    }
    let q = QuotientMap::new(basis).unwrap();
    let w = quotient_modulus(&q);
    let forest = StoppingForest::build(&w, 2.0, 0.125, generation_floor(0.999), 5).unwrap();
    forest.check_invariants().unwrap();
    assert_eq!(forest.l, 512.0);
    assert_eq!(forest.m, 16.0);
}
