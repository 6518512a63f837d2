//! Numerical toolkit for the linear equation `f'' + A f = 0` in the unit disc.
//!
//! The building blocks are a small coefficient language with exact Taylor
//! propagation ([`expr`]), truncated power series ([`series`]), and a cached
//! analytic-continuation solver ([`ode`]). On top of these sit disc geometry,
//! integral functionals, zero location, Schwarzian tools and the dyadic
//! stopping-time construction.
//!
//! Everything is generic over a [`Real`] scalar (`f32` or `f64`); the `*64`
//! aliases below fix double precision, which is what the tolerances quoted in
//! the tests assume.

// Guards written as `!(x > 0)` reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod error;
pub mod expr;
pub mod functionals;
pub mod geometry;
pub mod ode;
pub mod quadrature;
pub mod scalar;
pub mod schwarzian;
pub mod series;
pub mod stopping;
pub mod zeros;

pub use error::{Error, Result};
pub use expr::{parse_expr, ExprAst};
pub use scalar::{Cx, Real};
pub use ode::{MobiusTransfer, SolutionBasis, SolverConfig, Which};
pub use series::PowerSeries;

pub type Complex64 = num_complex::Complex<f64>;
pub type Expr64 = ExprAst<f64>;
pub type Series64 = PowerSeries<f64>;
pub type Basis64 = SolutionBasis<f64>;

pub type Complex32 = num_complex::Complex<f32>;
pub type Expr32 = ExprAst<f32>;
pub type Series32 = PowerSeries<f32>;
pub type Basis32 = SolutionBasis<f32>;
