//! Closed-form analytic coefficients: parsing, printing and Taylor propagation.

mod parser;

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, to_pair, Cx, Real};
use crate::series::{default_tol, estimate_trust, kernel, PowerSeries};

pub use parser::parse_expr;

/// Highest derivative order served by [`ExprAst::eval_jet`].
pub const MAX_JET_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node<T: Real> {
    Const(Cx<T>),
    Var,
    Neg(Box<Node<T>>),
    Add(Box<Node<T>>, Box<Node<T>>),
    Sub(Box<Node<T>>, Box<Node<T>>),
    Mul(Box<Node<T>>, Box<Node<T>>),
    Div(Box<Node<T>>, Box<Node<T>>),
    Pow(Box<Node<T>>, i32),
    Call(Func, Box<Node<T>>),
}

impl<T: Real> Node<T> {
    pub fn contains_var(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var => true,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.contains_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.contains_var() || b.contains_var()
            }
        }
    }

    /// Replaces every occurrence of `z` with `with`.
    pub fn substitute(&self, with: &Node<T>) -> Node<T> {
        let s = |n: &Node<T>| Box::new(n.substitute(with));
        match self {
            Node::Const(c) => Node::Const(*c),
            Node::Var => with.clone(),
            Node::Neg(a) => Node::Neg(s(a)),
            Node::Add(a, b) => Node::Add(s(a), s(b)),
            Node::Sub(a, b) => Node::Sub(s(a), s(b)),
            Node::Mul(a, b) => Node::Mul(s(a), s(b)),
            Node::Div(a, b) => Node::Div(s(a), s(b)),
            Node::Pow(a, m) => Node::Pow(s(a), *m),
            Node::Call(f, a) => Node::Call(*f, s(a)),
        }
    }

    /// Truncated Taylor coefficients at `c` together with a radius inside
    /// which no principal branch cut of a `log`/`sqrt` node is crossed.
    fn taylor(&self, c: Cx<T>, n: usize) -> Result<(Vec<Cx<T>>, T)> {
        let inf = T::infinity();
        let constant = |v: Cx<T>| {
            let mut out = vec![Cx::<T>::zero(); n];
            out[0] = v;
            out
        };
        let (coeffs, guard) = match self {
            Node::Const(v) => (constant(*v), inf),
            Node::Var => {
                let mut out = constant(c);
                if n > 1 {
                    out[1] = Cx::<T>::one();
                }
                (out, inf)
            }
            Node::Neg(a) => {
                let (x, g) = a.taylor(c, n)?;
                (kernel::neg(&x), g)
            }
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                let (x, gx) = a.taylor(c, n)?;
                let (y, gy) = b.taylor(c, n)?;
                let g = gx.min(gy);
                let out = match self {
                    Node::Add(..) => kernel::add(&x, &y),
                    Node::Sub(..) => kernel::sub(&x, &y),
                    Node::Mul(..) => kernel::mul(&x, &y),
                    _ => kernel::div(&x, &y)
                        .ok_or(Error::Domain { z: to_pair(c), what: "pole of a quotient" })?,
                };
                (out, g)
            }
            Node::Pow(a, m) => {
                let (x, g) = a.taylor(c, n)?;
                let out = kernel::powi(&x, *m)
                    .ok_or(Error::Domain { z: to_pair(c), what: "pole of a negative power" })?;
                (out, g)
            }
            Node::Call(f, a) => {
                let (x, g) = a.taylor(c, n)?;
                match f {
                    Func::Exp => (kernel::exp(&x), g),
                    Func::Sin => (kernel::sin_cos(&x).0, g),
                    Func::Cos => (kernel::sin_cos(&x).1, g),
                    Func::Log | Func::Sqrt => {
                        let out = if *f == Func::Log { kernel::log(&x) } else { kernel::sqrt(&x) };
                        let out = out.ok_or(Error::Domain {
                            z: to_pair(c),
                            what: "principal branch cut or branch point",
                        })?;
                        (out, g.min(cut_guard(&x)))
                    }
                }
            }
        };
        if coeffs.iter().any(|v| !is_finite(*v)) {
            return Err(Error::Domain { z: to_pair(c), what: "non-finite value" });
        }
        Ok((coeffs, guard))
    }
}

/// Radius inside which the argument series provably stays off `(-inf, 0]`.
fn cut_guard<T: Real>(x: &[Cx<T>]) -> T {
    let a0 = x[0];
    let dist = if a0.re >= T::zero() { a0.norm() } else { a0.im.abs() };
    let reach = |r: T| -> T {
        let mut p = T::one();
        let mut s = T::zero();
        for c in &x[1..] {
            p *= r;
            s += c.norm() * p;
        }
        s
    };
    if x.len() < 2 || x[1..].iter().all(|c| c.is_zero()) {
        return T::infinity();
    }
    let half = dist * T::lit(0.5);
    let mut hi = T::one();
    while reach(hi) < half && hi < T::lit(1e12) {
        hi *= T::lit(2.0);
    }
    let mut lo = T::zero();
    for _ in 0..60 {
        let mid = (lo + hi) * T::lit(0.5);
        if reach(mid) < half {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A parsed coefficient function `A(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprAst<T: Real> {
    pub root: Node<T>,
}

impl<T: Real> ExprAst<T> {
    pub fn new(root: Node<T>) -> Self {
        ExprAst { root }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_expr(text)
    }

    pub fn is_zero_constant(&self) -> bool {
        matches!(self.root, Node::Const(c) if c.is_zero())
    }

    /// Value at `z`.
    pub fn eval(&self, z: Cx<T>) -> Result<Cx<T>> {
        Ok(self.root.taylor(z, 1)?.0[0])
    }

    /// `(f(z), f'(z), ..., f^(order)(z))` by forward jet propagation.
    pub fn eval_jet(&self, z: Cx<T>, order: usize) -> Result<Vec<Cx<T>>> {
        if order > MAX_JET_ORDER {
            return Err(Error::InvalidArgument(format!(
                "jet order {order} exceeds {MAX_JET_ORDER}"
            )));
        }
        let (mut c, _) = self.root.taylor(z, order + 1)?;
        let mut fact = T::one();
        for (k, v) in c.iter_mut().enumerate().skip(1) {
            fact *= T::from_usize_lossy(k);
            *v *= fact;
        }
        Ok(c)
    }

    /// Taylor expansion of degree `degree` about `center` with a trust radius.
    pub fn taylor_at(&self, center: Cx<T>, degree: usize) -> Result<PowerSeries<T>> {
        self.taylor_at_tol(center, degree, crate::series::MAX_DEGREE, default_tol())
    }

    pub fn taylor_at_tol(
        &self,
        center: Cx<T>,
        degree: usize,
        max_degree: usize,
        tol: T,
    ) -> Result<PowerSeries<T>> {
        if degree > max_degree {
            return Err(Error::DegreeTooLarge { degree, max: max_degree });
        }
        let (coeffs, guard) = self.root.taylor(center, degree + 1)?;
        let est = estimate_trust(&coeffs, tol);
        Ok(PowerSeries::with_trust(center, coeffs, est.trust.min(guard)))
    }

    /// `A(φ(ζ))` as a new expression, with `φ` given as an expression in `z`.
    pub fn compose(&self, inner: &ExprAst<T>) -> ExprAst<T> {
        ExprAst::new(self.root.substitute(&inner.root))
    }
}

impl<T: Real> fmt::Display for ExprAst<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

impl<T: Real> fmt::Display for Node<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(c) => {
                if c.im.is_zero() {
                    write!(f, "({})", c.re)
                } else {
                    write!(f, "(({})+({})*i)", c.re, c.im)
                }
            }
            Node::Var => write!(f, "z"),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Add(a, b) => write!(f, "({a}+{b})"),
            Node::Sub(a, b) => write!(f, "({a}-{b})"),
            Node::Mul(a, b) => write!(f, "({a}*{b})"),
            Node::Div(a, b) => write!(f, "({a}/{b})"),
            Node::Pow(a, m) => write!(f, "({a}^({m}))"),
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn p(s: &str) -> ExprAst<f64> {
        parse_expr(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("0").eval(C::new(0.3, 0.2)).unwrap(), C::zero());
        let a = p("-4*z/(1-z)^4").eval(C::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(a.re, -32.0, max_relative = 1e-15);
        let e = p("exp(-(1+z)/(1-z))").eval(C::zero()).unwrap();
        assert_relative_eq!(e.re, (-1.0f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn jet_examples() {
        let j = p("z^2").eval_jet(C::new(3.0, 0.0), 2).unwrap();
        assert_eq!(j, vec![C::new(9.0, 0.0), C::new(6.0, 0.0), C::new(2.0, 0.0)]);
        let j = p("-4*z/(1-z)^4").eval_jet(C::zero(), 1).unwrap();
        assert!((j[0]).norm() < 1e-15 && (j[1] - C::new(-4.0, 0.0)).norm() < 1e-14);
        let j = p("exp(z)").eval_jet(C::zero(), 3).unwrap();
        assert!(j.iter().all(|v| (v - C::one()).norm() < 1e-15));
        assert!(p("z").eval_jet(C::zero(), 5).is_err());
    }

    #[test]
    fn taylor_examples() {
        let s = p("1/(1-z)").taylor_at(C::zero(), 3).unwrap();
        assert!(s.coeffs.iter().all(|c| (c - C::one()).norm() < 1e-15));
        let s = p("-4*z/(1-z)^4").taylor_at(C::zero(), 2).unwrap();
        let want = [0.0, -4.0, -16.0];
        for (c, w) in s.coeffs.iter().zip(want) {
            assert!((c - C::new(w, 0.0)).norm() < 1e-13);
        }
        let s = p("0").taylor_at(C::new(0.2, 0.1), 5).unwrap();
        assert_eq!(s.coeffs.len(), 6);
        assert!(s.coeffs.iter().all(|c| c.is_zero()));
        assert!(p("1/(1-z)").taylor_at(C::one(), 4).is_err());
        assert!(matches!(
            p("z").taylor_at(C::zero(), 10_000),
            Err(Error::DegreeTooLarge { .. })
        ));
    }

    #[test]
    fn domain_errors_carry_the_point() {
        match p("log(z)").eval(C::new(-0.5, 0.0)) {
            Err(Error::Domain { z, .. }) => assert_eq!(z, (-0.5, 0.0)),
            other => panic!("{other:?}"),
        }
        assert!(p("sqrt(z)").eval(C::zero()).is_err());
        assert!(p("1/z").eval(C::zero()).is_err());
        assert!(p("log(z)").eval(C::new(-0.5, 1e-3)).is_ok());
    }

    #[test]
    fn branch_cut_limits_trust() {
        let s = p("sqrt(z)").taylor_at(C::new(-1.0, 0.05), 64).unwrap();
        assert!(s.trust_radius <= 0.05);
        let z = C::new(-1.0, 0.05 + 0.5 * s.trust_radius);
        let direct = p("sqrt(z)").eval(z).unwrap();
        assert!((s.evaluate(z).unwrap() - direct).norm() < 1e-10);
    }

    #[test]
    fn composition_substitutes() {
        let a = p("z^2+1");
        let inner = p("(0.5-z)/(1-0.5*z)");
        let b = a.compose(&inner);
        let z = C::new(0.1, -0.3);
        let phi = (C::new(0.5, 0.0) - z) / (C::one() - z * 0.5);
        assert!((b.eval(z).unwrap() - (phi * phi + 1.0)).norm() < 1e-14);
    }

    #[test]
    fn single_precision_evaluation() {
        let a: ExprAst<f32> = parse_expr("-4*z/(1-z)^4").unwrap();
        let v = a.eval(Complex::new(0.5f32, 0.0)).unwrap();
        assert!((v.re + 32.0).abs() < 1e-4);
    }

    fn sample_exprs() -> Vec<&'static str> {
        vec![
            "-4*z/(1-z)^4",
            "exp(-(1+z)/(1-z))",
            "sin(3*z)*cos(z)+z^3",
            "sqrt(1+z)/(2-z)",
            "log(1+z/2)*exp(i*z)",
            "1/(1-z)^2 + (1+2*i)*z^-1*z",
            "cos(z)^-2",
        ]
    }

    proptest! {
        #[test]
        fn derivative_matches_central_difference(
            idx in 0usize..7, x in -0.5f64..0.5, y in -0.5f64..0.5,
        ) {
            let a = p(sample_exprs()[idx]);
            let z = C::new(x, y);
            let h = 1e-5;
            let j = a.eval_jet(z, 1).unwrap();
            let fd = (a.eval(z + h).unwrap() - a.eval(z - h).unwrap()) / (2.0 * h);
            prop_assert!((j[1] - fd).norm() <= 1e-6 * j[1].norm().max(1.0));
        }

        #[test]
        fn parse_print_round_trip(idx in 0usize..7, x in -0.6f64..0.6, y in -0.6f64..0.6) {
            let a = p(sample_exprs()[idx]);
            let b = p(&a.to_string());
            let z = C::new(x, y);
            prop_assert_eq!(a.eval(z).unwrap(), b.eval(z).unwrap());
        }

        #[test]
        fn taylor_converges_inside_half_trust(
            idx in 0usize..7, r in 0.0f64..0.45, t in 0.0f64..std::f64::consts::TAU,
        ) {
            let a = p(sample_exprs()[idx]);
            let c = C::new(0.1, -0.05);
            let s = a.taylor_at(c, 128).unwrap();
            let z = c + C::from_polar(r * s.trust_radius.min(1.0), t);
            let direct = a.eval(z).unwrap();
            prop_assert!((s.evaluate(z).unwrap() - direct).norm() <= 1e-10 * direct.norm().max(1.0));
        }
    }
}
