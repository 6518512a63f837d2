//! The generic core instantiated at `f32`.

use unidisc::functionals::{circle_mean, growth_norm, SupGrid};
use unidisc::geometry::{phi, rho_p};
use unidisc::schwarzian::QuotientMap;
use unidisc::zeros::find_zeros;
use unidisc::{parse_expr, Basis32, Complex32, Expr32, SolutionBasis, SolverConfig, Which};

fn c(re: f32, im: f32) -> Complex32 {
    Complex32::new(re, im)
}

#[test]
fn trig_basis() {
    let a: Expr32 = parse_expr("1").unwrap();
    let b: Basis32 = SolutionBasis::standard(a, SolverConfig::default()).unwrap();
    for z in [c(0.3, 0.4), c(-0.8, 0.1), c(0.0, -0.9)] {
        let f1 = b.value(Which::F1, z).unwrap();
        let f2 = b.value(Which::F2, z).unwrap();
        assert!((f1 - z.cos()).norm() < 1e-5, "{z}");
        assert!((f2 - z.sin()).norm() < 1e-5, "{z}");
        assert!((b.wronskian(z).unwrap() - 1.0).norm() < 1e-5);
    }
}

#[test]
fn zeros_and_geometry() {
    let b: Basis32 = SolutionBasis::standard(parse_expr("100").unwrap(), SolverConfig::default()).unwrap();
    let zs = find_zeros(
        |z| {
            let j = b.jet(Which::F2, z, 1)?;
            Ok((j[0], j[1]))
        },
        0.95f32,
    )
    .unwrap();
    assert_eq!(zs.count(), 7);
    for z in zs.expanded() {
        let k = (z.re * 10.0 / std::f32::consts::PI).round();
        assert!((z - c(k * std::f32::consts::PI / 10.0, 0.0)).norm() < 1e-4);
    }
    let (a, z) = (c(0.3, -0.2), c(-0.5, 0.6));
    assert!((phi(a, phi(a, z)) - z).norm() < 1e-5);
    assert!((rho_p(phi(a, z), phi(a, c(0.0, 0.0))) - rho_p(z, c(0.0, 0.0))).abs() < 1e-5);
}

#[test]
fn functionals_and_quotients() {
    let e: Expr32 = parse_expr("1/(1-z)^2").unwrap();
    let g = growth_norm(|z| e.eval(z), 2.0f32, &SupGrid::boundary(8, 0.99)).unwrap();
    // (1-r²)²/(1-r)² = (1+r)² at the real point r.
    assert!((g.value - 1.99f32 * 1.99).abs() < 1e-3);
    let m = circle_mean(|z: Complex32| Ok(z * z + 1.0), 0.5f32, 2.0, 256).unwrap();
    assert!((m - (1.0 + 0.0625)).abs() < 1e-5);
    let q = QuotientMap::new(SolutionBasis::for_quotient(parse_expr("0.5").unwrap(), SolverConfig::default()).unwrap())
        .unwrap();
    let s = q.schwarzian(c(0.2, 0.3)).unwrap();
    assert!((s - 1.0).norm() < 1e-3);
}
