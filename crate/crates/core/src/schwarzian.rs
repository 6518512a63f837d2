//! Schwarzian calculus on solution quotients, logarithm branches, the
//! `f = gW` factorization and the rational map `R(z) = z + 1/(2z²)`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{SolutionBasis, Which};
use crate::quadrature::{pairwise_sum, PolarQuadrature};
use crate::scalar::{cis, real, to_pair, Cx, Real};
use crate::zeros::{find_zeros, ZeroSequence};
use crate::geometry::rho_p;

/// `S_w = w'''/w' - (3/2)(w''/w')²` from the jet `[w, w', w'', w''']`.
pub fn schwarzian<T: Real>(jet: &[Cx<T>]) -> Result<Cx<T>> {
    if jet.len() < 4 {
        return Err(Error::InvalidArgument("Schwarzian needs a jet of order 3".into()));
    }
    if jet[1].is_zero() {
        return Err(Error::Degenerate("w' vanishes".into()));
    }
    let p = jet[2] / jet[1];
    Ok(jet[3] / jet[1] - p * p * T::lit(1.5))
}

/// `w''/w'` from a jet of order 2.
pub fn pre_schwarzian<T: Real>(jet: &[Cx<T>]) -> Result<Cx<T>> {
    if jet[1].is_zero() {
        return Err(Error::Degenerate("w' vanishes".into()));
    }
    Ok(jet[2] / jet[1])
}

/// Jet of `u/v` from jets of `u` and `v` (Leibniz rule solved for the quotient).
pub fn quotient_jet<T: Real>(u: &[Cx<T>], v: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
    if v[0].is_zero() {
        return Err(Error::Degenerate("denominator vanishes".into()));
    }
    let n = u.len().min(v.len());
    let mut q: Vec<Cx<T>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut s = u[k];
        let mut binom = T::one();
        for j in (0..k).rev() {
            // binom = C(k, j) built downward from C(k, k) = 1.
            binom = binom * T::from_usize_lossy(j + 1) / T::from_usize_lossy(k - j);
            s -= q[j] * v[k - j] * binom;
        }
        q.push(s / v[0]);
    }
    Ok(q)
}

/// `w = f1/f2` for a basis with `W(f1, f2) = -1`, so that `w' = f2^{-2}`.
#[derive(Debug, Clone)]
pub struct QuotientMap<T: Real> {
    pub basis: SolutionBasis<T>,
    /// Zeros of `f2` with exclusion radii, once located.
    pub poles: Vec<(Cx<T>, T)>,
}

impl<T: Real> QuotientMap<T> {
    pub fn new(basis: SolutionBasis<T>) -> Result<Self> {
        let w = basis.wronskian_target();
        if (w + Cx::<T>::one()).norm() > T::lit(1e-12) {
            return Err(Error::InvalidArgument(format!("quotient maps need W = -1, got {w}")));
        }
        Ok(QuotientMap { basis, poles: Vec::new() })
    }

    /// Locates the poles in `|z| < r` and attaches exclusion radii of twice
    /// the local Newton basin estimate `|f2'| / |f2''|`, capped by the distance to the circle.
    pub fn with_poles(mut self, r: T) -> Result<Self> {
        let zs = self.pole_sequence(r)?;
        self.poles = zs
            .points
            .iter()
            .map(|&p| {
                let j = self.basis.jet(Which::F2, p, 2)?;
                let basin = if j[2].is_zero() { T::one() } else { j[1].norm() / j[2].norm() * T::lit(0.5) };
                Ok((p, (basin * T::lit(2.0)).min((T::one() - p.norm()) * T::lit(0.5))))
            })
            .collect::<Result<_>>()?;
        Ok(self)
    }

    /// Zeros of `f2` in `|z| < r`.
    pub fn pole_sequence(&self, r: T) -> Result<ZeroSequence<T>> {
        let b = &self.basis;
        find_zeros(
            |z| {
                let j = b.jet(Which::F2, z, 1)?;
                Ok((j[0], j[1]))
            },
            r,
        )
    }

    pub fn excluded(&self, z: Cx<T>) -> bool {
        self.poles.iter().any(|&(p, e)| (z - p).norm() < e)
    }

    /// `[w, w', w'', w''']` by jet division.
    pub fn jet(&self, z: Cx<T>) -> Result<Vec<Cx<T>>> {
        let [u, v] = self.basis.jets(z, 3)?;
        quotient_jet(&u, &v)
    }

    /// `w' = f2^{-2}`, computed from `f2` directly.
    pub fn w_prime(&self, z: Cx<T>) -> Result<Cx<T>> {
        let v = self.basis.value(Which::F2, z)?;
        if v.is_zero() {
            return Err(Error::Domain { z: to_pair(z), what: "pole of w" });
        }
        Ok((v * v).inv())
    }

    /// `w''/w' = -2 f2'/f2`.
    pub fn pre_schwarzian(&self, z: Cx<T>) -> Result<Cx<T>> {
        let j = self.basis.jet(Which::F2, z, 1)?;
        if j[0].is_zero() {
            return Err(Error::Domain { z: to_pair(z), what: "pole of w" });
        }
        Ok(j[1] / j[0] * T::lit(-2.0))
    }

    /// `S_w` from the quotient jet.
    pub fn schwarzian(&self, z: Cx<T>) -> Result<Cx<T>> {
        schwarzian(&self.jet(z)?)
    }
}

/// Outcome of a pointwise inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck<T> {
    pub value: T,
    pub bound: T,
    pub pass: bool,
}

/// `(1-|a|²)|w''(a)/w'(a)|` against `6/min{η, s}`, given `ρ(a, poles) ≥ s`.
pub fn pre_schwarzian_bound_check<T, P>(pre: P, eta: T, s: T, a: Cx<T>, poles: &[Cx<T>]) -> Result<BoundCheck<T>>
where
    T: Real,
    P: Fn(Cx<T>) -> Result<Cx<T>>,
{
    if !(eta > T::zero() && eta <= T::one()) || !(s > T::zero() && s <= T::one()) {
        return Err(Error::InvalidArgument(format!("eta = {eta}, s = {s} outside (0, 1]")));
    }
    if let Some(p) = poles.iter().find(|&&p| rho_p(a, p) < s) {
        return Err(Error::HypothesisViolated(format!(
            "rho(a, pole {:?}) = {} below s = {s}",
            to_pair(*p),
            rho_p(a, *p)
        )));
    }
    let value = (T::one() - a.norm_sqr()) * pre(a)?.norm();
    let bound = T::lit(6.0) / eta.min(s);
    Ok(BoundCheck { value, bound, pass: value <= bound + T::lit(1e-9) })
}

/// `K(t) = 3 log((1+u)/(1-u))` with `u = 2t/(1+t²)`, and `e^{K(t)}`.
pub fn def_c_constant<T: Real>(t: T) -> Result<(T, T)> {
    if !(t > T::zero() && t < T::one()) {
        return Err(Error::InvalidArgument(format!("t = {t} outside (0, 1)")));
    }
    let u = T::lit(2.0) * t / (T::one() + t * t);
    let k = T::lit(3.0) * ((T::one() + u) / (T::one() - u)).ln();
    Ok((k, k.exp()))
}

/// Logarithm of a nonvanishing function continued along straight segments
/// from a base point by phase unwrapping.
pub struct LogBranch<T: Real, F> {
    f: F,
    base: Cx<T>,
    base_value: Cx<T>,
}

/// Largest phase change accepted on one step.
const MAX_PHASE_STEP: f64 = std::f64::consts::FRAC_PI_4;

impl<T, F> LogBranch<T, F>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>>,
{
    /// Principal logarithm at `base`.
    pub fn new(f: F, base: Cx<T>) -> Result<Self> {
        let v = f(base)?;
        if v.is_zero() {
            return Err(Error::Domain { z: to_pair(base), what: "zero at the base point" });
        }
        Ok(LogBranch { f, base, base_value: v.ln() })
    }

    pub fn base_value(&self) -> Cx<T> {
        self.base_value
    }

    /// Continues from `(from, log_from)` to `to`.
    pub fn continue_segment(&self, from: Cx<T>, log_from: Cx<T>, to: Cx<T>) -> Result<Cx<T>> {
        let mut phase = log_from.im;
        let mut prev = (self.f)(from)?;
        let steps = 16usize;
        for k in 1..=steps {
            let z0 = from + (to - from) * (T::from_usize_lossy(k - 1) / T::from_usize_lossy(steps));
            let z1 = from + (to - from) * (T::from_usize_lossy(k) / T::from_usize_lossy(steps));
            let (d, v) = self.phase_change(z0, prev, z1, 0)?;
            phase += d;
            prev = v;
        }
        Ok(Cx::new(prev.norm().ln(), phase))
    }

    fn phase_change(&self, z0: Cx<T>, v0: Cx<T>, z1: Cx<T>, depth: u32) -> Result<(T, Cx<T>)> {
        let v1 = (self.f)(z1)?;
        if v1.is_zero() {
            return Err(Error::Domain { z: to_pair(z1), what: "zero on the continuation path" });
        }
        let d = (v1 / v0).arg();
        if d.abs() < T::lit(MAX_PHASE_STEP) {
            return Ok((d, v1));
        }
        if depth > 48 {
            return Err(Error::Domain { z: to_pair(z1), what: "phase could not be resolved" });
        }
        let zm = (z0 + z1) * T::lit(0.5);
        let (d0, vm) = self.phase_change(z0, v0, zm, depth + 1)?;
        let (d1, v1) = self.phase_change(zm, vm, z1, depth + 1)?;
        Ok((d0 + d1, v1))
    }

    /// `log f(z)` along the segment from the base point.
    pub fn value(&self, z: Cx<T>) -> Result<Cx<T>> {
        self.continue_segment(self.base, self.base_value, z)
    }

    /// `log f` at `n` equispaced points of `|z| = r`, reached radially at angle 0
    /// and then continued around the circle.
    pub fn on_circle(&self, r: T, n: usize) -> Result<Vec<Cx<T>>> {
        let pt = |m: usize| cis(T::TAU() * T::from_usize_lossy(m) / T::from_usize_lossy(n)) * r;
        let mut out = Vec::with_capacity(n);
        let mut cur = self.value(pt(0))?;
        out.push(cur);
        for m in 1..n {
            let v0 = (self.f)(pt(m - 1))?;
            let (d, v1) = self.phase_change(pt(m - 1), v0, pt(m), 0)?;
            cur = Cx::new(v1.norm().ln(), cur.im + d);
            out.push(cur);
        }
        Ok(out)
    }
}

/// `f = α f1 + β f2 = g W` with `g = f2` and `W = α w + β`.
#[derive(Debug, Clone)]
pub struct Factorization<T: Real> {
    pub quotient: QuotientMap<T>,
    pub alpha: Cx<T>,
    pub beta: Cx<T>,
    /// Radius within which `f2` was checked to be zero-free.
    pub radius: T,
}

/// Builds the factorization of `α f1 + β f2`, checking that `f2` has no zeros in `|z| < r`.
pub fn factorize<T: Real>(basis: SolutionBasis<T>, alpha: Cx<T>, beta: Cx<T>, r: T) -> Result<Factorization<T>> {
    if alpha.is_zero() && beta.is_zero() {
        return Err(Error::InvalidArgument("the trivial solution has no factorization".into()));
    }
    let quotient = QuotientMap::new(basis)?;
    let poles = quotient.pole_sequence(r)?;
    if !poles.is_empty() {
        return Err(Error::HypothesisViolated(format!(
            "f2 vanishes at {:?} inside |z| < {r}",
            to_pair(poles.points[0])
        )));
    }
    Ok(Factorization { quotient, alpha, beta, radius: r })
}

impl<T: Real> Factorization<T> {
    fn basis(&self) -> &SolutionBasis<T> {
        &self.quotient.basis
    }

    /// `f(z) = α f1(z) + β f2(z)`.
    pub fn f(&self, z: Cx<T>) -> Result<Cx<T>> {
        let [u, v] = self.basis().jets(z, 0)?;
        Ok(self.alpha * u[0] + self.beta * v[0])
    }

    pub fn g(&self, z: Cx<T>) -> Result<Cx<T>> {
        self.basis().value(Which::F2, z)
    }

    /// `W(z) = α w(z) + β`, or the constant `β` when `α = 0`.
    pub fn w_factor(&self, z: Cx<T>) -> Result<Cx<T>> {
        if self.alpha.is_zero() {
            return Ok(self.beta);
        }
        Ok(self.alpha * self.quotient.jet(z)?[0] + self.beta)
    }

    /// `None` when `W` is constant.
    pub fn is_constant(&self) -> bool {
        self.alpha.is_zero()
    }

    /// Branch of `log g` from the principal value at 0.
    pub fn log_g(&self) -> Result<LogBranch<T, impl Fn(Cx<T>) -> Result<Cx<T>> + '_>> {
        LogBranch::new(move |z| self.g(z), Cx::zero())
    }

    /// `log W' = log α + log w'` with `log w' = -2 log g`; `None` for constant `W`.
    pub fn log_w_prime(&self, z: Cx<T>) -> Result<Option<Cx<T>>> {
        if self.alpha.is_zero() {
            return Ok(None);
        }
        let lg = self.log_g()?.value(z)?;
        Ok(Some(self.alpha.ln() - lg * T::lit(2.0)))
    }

    /// `|g W - f|` at `z`.
    pub fn residual(&self, z: Cx<T>) -> Result<T> {
        Ok((self.g(z)? * self.w_factor(z)? - self.f(z)?).norm())
    }

    /// `|exp(log g)² w' - 1|` with `w'` from the quotient jet.
    pub fn branch_defect(&self, z: Cx<T>) -> Result<T> {
        let lg = self.log_g()?.value(z)?;
        let wp = self.quotient.jet(z)?[1];
        Ok(((lg * T::lit(2.0)).exp() * wp - Cx::<T>::one()).norm())
    }
}

/// Terms of the circle-mean estimate for `log f` of a nonvanishing solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BjestReport<T> {
    pub lhs: T,
    /// `r² |f'(0)/f(0)|²`.
    pub rhs_first: T,
    /// `r² ∫_{|z|<r} |A|² (1-|z|²)³ dm`.
    pub rhs_second: T,
    /// `lhs / rhs_first` (0 when both vanish).
    pub ratio_first: T,
    /// `lhs / (rhs_first + rhs_second)` (0 when both vanish).
    pub ratio_total: T,
}

/// `(1/2π)∫|log(f(re^{iθ})/f(0))|² dθ` against its two comparison terms.
pub fn bjest_check<T, F, A>(f: F, a: A, r: T) -> Result<BjestReport<T>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<(Cx<T>, Cx<T>)> + Sync,
    A: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::InvalidArgument(format!("radius {r} outside (0, 1)")));
    }
    let zs = find_zeros(&f, r)?;
    if !zs.is_empty() {
        return Err(Error::HypothesisViolated(format!("f vanishes at {:?}", to_pair(zs.points[0]))));
    }
    let (f0, df0) = f(Cx::zero())?;
    let branch = LogBranch::new(|z| Ok(f(z)?.0), Cx::zero())?;
    let l0 = branch.base_value();
    let mut n = 256usize;
    let mut prev = T::nan();
    let lhs = loop {
        let vals: Vec<T> = branch.on_circle(r, n)?.into_iter().map(|l| (l - l0).norm_sqr()).collect();
        let cur = pairwise_sum(&vals) / T::from_usize_lossy(n);
        if (cur - prev).abs() <= T::lit(1e-10) * cur.abs() || n >= 1 << 16 || cur == T::zero() {
            break cur;
        }
        prev = cur;
        n *= 2;
    };
    let r2 = r * r;
    let rhs_first = r2 * (df0 / f0).norm_sqr();
    let quad = PolarQuadrature::new(r);
    let rows = quad.sample(|z| Ok::<T, Error>(a(z)?.norm_sqr() * (T::one() - z.norm_sqr()).powi(3)));
    let mut per_ring = Vec::with_capacity(rows.len());
    for (ring, row) in quad.rings.iter().zip(rows) {
        let row: Vec<T> = row.into_iter().collect::<Result<_>>()?;
        per_ring.push(pairwise_sum(&row) * ring.node_weight());
    }
    let rhs_second = r2 * pairwise_sum(&per_ring);
    let ratio = |den: T| if den == T::zero() { T::zero() } else { lhs / den };
    Ok(BjestReport { lhs, rhs_first, rhs_second, ratio_first: ratio(rhs_first), ratio_total: ratio(rhs_first + rhs_second) })
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpherePoint<T> {
    Finite(Cx<T>),
    Infinity,
}

/// `R(z) = z + 1/(2z²)`.
pub fn roth_map<T: Real>(z: Cx<T>) -> SpherePoint<T> {
    if z.is_zero() {
        return SpherePoint::Infinity;
    }
    SpherePoint::Finite(z + (z * z * T::lit(2.0)).inv())
}

/// `R'(z) = 1 - z^{-3}`.
pub fn roth_derivative<T: Real>(z: Cx<T>) -> Cx<T> {
    Cx::<T>::one() - (z * z * z).inv()
}

/// Critical points of `R`: the cube roots of unity.
pub fn roth_critical_points<T: Real>() -> [Cx<T>; 3] {
    let third = T::TAU() / T::lit(3.0);
    [Cx::one(), cis(third), cis(third * T::lit(2.0))]
}


/// Roots of `2z³ - 2wz² + 1 = 0` in `C \ {0, 1, e^{±2πi/3}}`, with multiplicity;
/// `w = ∞` has the single preimage `∞` once `0` is excluded.
pub fn roth_value_map<T: Real>(w: SpherePoint<T>) -> Vec<SpherePoint<T>> {
    let w = match w {
        SpherePoint::Infinity => return vec![SpherePoint::Infinity],
        SpherePoint::Finite(w) => w,
    };
    // R(c) = 3c/2 at each critical point c, where c is a double root; the
    // computed pair is only accurate to the square root of the rounding error.
    let mut roots = cubic_roots(w);
    let tol = T::lit(1e-10) * w.norm().max(T::one());
    for c in roth_critical_points::<T>() {
        if (w - c * T::lit(1.5)).norm() <= tol {
            roots.sort_by(|a, b| (a - c).norm().partial_cmp(&(b - c).norm()).unwrap_or(std::cmp::Ordering::Equal));
            roots.drain(..2);
        }
    }
    roots.into_iter().map(SpherePoint::Finite).collect()
}

/// Roots of `z³ - w z² + 1/2` by Cardano, each polished by Newton.
fn cubic_roots<T: Real>(w: Cx<T>) -> Vec<Cx<T>> {
    let three = T::lit(3.0);
    let shift = w / three;
    let p = -(w * w) / three;
    let q = -(w * w * w) * T::lit(2.0) / T::lit(27.0) + real(T::lit(0.5));
    let disc = (q * q / T::lit(4.0) + p * p * p / T::lit(27.0)).sqrt();
    let (a, b) = (-q / T::lit(2.0) + disc, -q / T::lit(2.0) - disc);
    let s = if a.norm() >= b.norm() { a } else { b };
    let c = if s.is_zero() { Cx::zero() } else { s.powf(T::one() / three) };
    let units = roth_critical_points::<T>();
    let poly = |z: Cx<T>| z * z * z - w * z * z + real(T::lit(0.5));
    let dpoly = |z: Cx<T>| z * z * three - w * z * T::lit(2.0);
    units
        .iter()
        .map(|u| {
            let cu = c * u;
            let y = if cu.is_zero() { Cx::zero() } else { cu - p / (cu * three) };
            let mut z = y + shift;
            for _ in 0..8 {
                let d = dpoly(z);
                if d.is_zero() {
                    break;
                }
                let step = poly(z) / d;
                if !(step.norm().is_finite()) {
                    break;
                }
                z -= step;
                if step.norm() <= T::epsilon() * z.norm() {
                    break;
                }
            }
            z
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::geometry::phi;
    use crate::ode::SolverConfig;
    use approx::assert_relative_eq;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn jet(s: &str, z: C) -> Vec<C> {
        parse_expr::<f64>(s).unwrap().eval_jet(z, 3).unwrap()
    }

    #[test]
    fn schwarzian_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let z = C::new(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6));
            let m = jet("(2*z+i)/(0.5*z-3)", z);
            assert!(schwarzian(&m).unwrap().norm() < 1e-10);
            let k = jet("z/(1-z)^2", z);
            let want = C::new(-6.0, 0.0) / ((C::new(1.0, 0.0) - z * z) * (C::new(1.0, 0.0) - z * z));
            assert!((schwarzian(&k).unwrap() - want).norm() < 1e-9 * want.norm());
        }
        assert!((schwarzian(&jet("z/(1-z)^2", C::new(0.0, 0.0))).unwrap() + 6.0).norm() < 1e-12);
        let q = QuotientMap::new(SolutionBasis::for_quotient(parse_expr("1").unwrap(), SolverConfig::default()).unwrap())
            .unwrap();
        assert!((q.schwarzian(C::new(0.3, 0.2)).unwrap() - 2.0).norm() < 1e-8);
        assert!(schwarzian(&[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn quotient_invariants() {
        for a in ["-4*z/(1-z)^4", "1/(1-z)", "25"] {
            let q = QuotientMap::new(SolutionBasis::for_quotient(parse_expr(a).unwrap(), SolverConfig::default()).unwrap())
                .unwrap()
                .with_poles(0.9)
                .unwrap();
            let ae = parse_expr::<f64>(a).unwrap();
            for k in 0..40 {
                let z = C::from_polar(0.1 + 0.02 * k as f64, 0.7 * k as f64);
                if q.excluded(z) {
                    continue;
                }
                let s = q.schwarzian(z).unwrap();
                let two_a = ae.eval(z).unwrap() * 2.0;
                assert!((s - two_a).norm() <= 1e-7 * two_a.norm().max(1.0), "{a} {z} {s} {two_a}");
                let v = q.basis.value(Which::F2, z).unwrap();
                assert!((q.jet(z).unwrap()[1] * v * v - 1.0).norm() < 1e-8);
            }
        }
        assert!(QuotientMap::new(SolutionBasis::standard(parse_expr::<f64>("1").unwrap(), SolverConfig::default()).unwrap()).is_err());
    }

    #[test]
    fn schwarzian_is_mobius_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = QuotientMap::new(SolutionBasis::for_quotient(parse_expr("1/(1-z)").unwrap(), SolverConfig::default()).unwrap())
            .unwrap();
        let (a, b, c, d) = (C::new(1.0, 2.0), C::new(-0.5, 0.0), C::new(0.3, -0.1), C::new(2.0, 0.5));
        for _ in 0..20 {
            let z = C::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..std::f64::consts::TAU));
            let w = q.jet(z).unwrap();
            // M(w) = (a w + b)/(c w + d), jet via quotient_jet of linear jets.
            let num: Vec<C> = w.iter().enumerate().map(|(k, x)| a * x + if k == 0 { b } else { C::new(0.0, 0.0) }).collect();
            let den: Vec<C> = w.iter().enumerate().map(|(k, x)| c * x + if k == 0 { d } else { C::new(0.0, 0.0) }).collect();
            let m = quotient_jet(&num, &den).unwrap();
            let (s0, s1) = (schwarzian(&w).unwrap(), schwarzian(&m).unwrap());
            assert!((s0 - s1).norm() < 1e-8 * s0.norm().max(1.0));
        }
    }

    #[test]
    fn transferred_log_cocycle() {
        // S(w∘φ) = S(w)(φ)φ'^2, and for h = log w'∘φ: h' = P(φ)φ', h'' - h'^2/2 = S(φ)φ'^2 + P(φ)φ''.
        let q = QuotientMap::new(SolutionBasis::for_quotient(parse_expr("1/(1-z)").unwrap(), SolverConfig::default()).unwrap())
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let zeta = C::from_polar(rng.gen_range(0.0..0.6), rng.gen_range(0.0..std::f64::consts::TAU));
            let z = C::from_polar(rng.gen_range(0.0..0.6), rng.gen_range(0.0..std::f64::consts::TAU));
            let x = phi(zeta, z);
            let (p1, p2, p3) = (
                crate::geometry::phi_prime(zeta, z),
                crate::geometry::phi_second(zeta, z),
                C::new(6.0, 0.0) * zeta.conj() * zeta.conj() * (zeta.norm_sqr() - 1.0)
                    / (C::new(1.0, 0.0) - zeta.conj() * z).powi(4),
            );
            let w = q.jet(x).unwrap();
            // Jet of u = w∘φ up to order 3 by Faà di Bruno.
            let u = [w[0], w[1] * p1, w[2] * p1 * p1 + w[1] * p2, w[3] * p1 * p1 * p1 + w[2] * p1 * p2 * 3.0 + w[1] * p3];
            let h1 = u[2] / u[1];
            let h2 = u[3] / u[1] - h1 * h1;
            let pre = w[2] / w[1];
            assert!((h1 - pre * p1 - p2 / p1).norm() < 1e-9 * h1.norm().max(1.0));
            let lhs = h2 - h1 * h1 * 0.5;
            let rhs = schwarzian(&w).unwrap() * p1 * p1;
            assert!((lhs - rhs).norm() < 1e-8 * lhs.norm().max(1.0));
            let (v, v1, v2) = (w[1], w[2] * p1, w[3] * p1 * p1 + w[2] * p2);
            let h1 = v1 / v;
            let h2 = v2 / v - h1 * h1;
            assert!((h1 - pre * p1).norm() < 1e-9 * h1.norm().max(1.0));
            let rhs = schwarzian(&w).unwrap() * p1 * p1 + pre * p2;
            assert!((h2 - h1 * h1 * 0.5 - rhs).norm() < 1e-8 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn pre_schwarzian_examples() {
        let koebe = |a: C| pre_schwarzian(&jet("z/(1-z)^2", a));
        let mut best: f64 = 0.0;
        for k in 0..200 {
            let a = C::from_polar(0.995 * k as f64 / 200.0, 0.0);
            let c = pre_schwarzian_bound_check(koebe, 1.0, 1.0, a, &[]).unwrap();
            assert!(c.pass && c.bound == 6.0);
            best = best.max(c.value);
        }
        assert!(best > 0.99 * 6.0);
        let a = C::new(0.3, 0.4);
        let m = pre_schwarzian_bound_check(|z| pre_schwarzian(&jet("(0.5-z)/(1-0.5*z)", z)), 1.0, 0.5, a, &[]).unwrap();
        assert!(m.pass && m.value <= 2.0 * 0.5 + 1e-12);
        let id = pre_schwarzian_bound_check(|z| pre_schwarzian(&jet("z", z)), 1.0, 0.5, a, &[]).unwrap();
        assert_eq!(id.value, 0.0);
        assert!(pre_schwarzian_bound_check(|z| pre_schwarzian(&jet("z", z)), 1.0, 0.5, a, &[C::new(0.3, 0.41)]).is_err());
    }

    #[test]
    fn def_c_examples() {
        assert!(def_c_constant(1e-9f64).unwrap().0 < 1e-7);
        assert_relative_eq!(def_c_constant(0.5f64).unwrap().0, 3.0 * 9f64.ln(), max_relative = 1e-14);
        let mut prev = 0.0;
        for k in 1..100 {
            let (v, e) = def_c_constant(k as f64 / 100.0).unwrap();
            assert!(v > prev && (e - v.exp()).abs() <= 1e-12 * e);
            prev = v;
        }
        assert!(def_c_constant(1.0f64).is_err());
    }

    #[test]
    fn log_branch_tracks_winding() {
        let f = parse_expr::<f64>("exp(3*i*z)*(z+2)").unwrap();
        let b = LogBranch::new(|z| f.eval(z), C::new(0.0, 0.0)).unwrap();
        let circle = b.on_circle(0.9, 512).unwrap();
        for (m, l) in circle.iter().enumerate().step_by(17) {
            let z = C::from_polar(0.9, std::f64::consts::TAU * m as f64 / 512.0);
            assert!((l.exp() - f.eval(z).unwrap()).norm() < 1e-9 * f.eval(z).unwrap().norm());
            let direct = 3.0 * C::new(0.0, 1.0) * z + (z + 2.0).ln();
            assert!((l - direct).norm() < 1e-9);
        }
    }

    #[test]
    fn factorization_examples() {
        let b = SolutionBasis::new(
            parse_expr("0").unwrap(),
            (C::new(0.0, 0.0), C::new(1.0, 0.0)),
            (C::new(1.0, 0.0), C::new(0.0, 0.0)),
            SolverConfig::default(),
        )
        .unwrap();
        let fac = factorize(b.clone(), C::new(0.0, 0.0), C::new(2.0, 0.0), 0.99).unwrap();
        assert!(fac.is_constant());
        assert_eq!(fac.w_factor(C::new(0.3, 0.0)).unwrap(), C::new(2.0, 0.0));
        let fac = factorize(b, C::new(1.0, 0.0), C::new(0.0, 0.0), 0.99).unwrap();
        for k in 0..16 {
            let z = C::from_polar(0.9, k as f64 * 0.4);
            assert!((fac.w_factor(z).unwrap() - z).norm() < 1e-14);
            assert!(fac.residual(z).unwrap() < 1e-12);
            assert!(fac.branch_defect(z).unwrap() < 1e-12);
        }
        let sin = SolutionBasis::for_quotient(parse_expr("1").unwrap(), SolverConfig::default()).unwrap();
        assert!(factorize(sin, C::new(1.0, 0.0), C::new(0.0, 0.0), 0.9).is_ok());
        let bad = SolutionBasis::new(
            parse_expr("25").unwrap(),
            (C::new(1.0, 0.0), C::new(0.0, 0.0)),
            (C::new(0.0, 0.0), C::new(-1.0, 0.0)),
            SolverConfig::default(),
        )
        .unwrap();
        assert!(matches!(
            factorize(bad, C::new(1.0, 0.0), C::new(1.0, 0.0), 0.9),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn bjest_examples() {
        let zero = |_z: C| Ok(C::new(0.0, 0.0));
        let one = bjest_check(|_z: C| Ok((C::new(1.0, 0.0), C::new(0.0, 0.0))), zero, 0.7).unwrap();
        assert_eq!((one.lhs, one.rhs_first, one.rhs_second, one.ratio_total), (0.0, 0.0, 0.0, 0.0));
        let r = 0.8;
        let e = bjest_check(|z: C| Ok((z.exp(), z.exp())), |_z: C| Ok(C::new(-1.0, 0.0)), r).unwrap();
        assert_relative_eq!(e.lhs, r * r, max_relative = 1e-9);
        assert_relative_eq!(e.ratio_first, 1.0, max_relative = 1e-9);
        let closed = 1.0 / (1.0 + std::f64::consts::FRAC_PI_4 * (1.0 - (1.0 - r * r).powi(4)));
        assert_relative_eq!(e.ratio_total, closed, max_relative = 1e-9);
    }

    #[test]
    fn roth_examples() {
        let crit = roth_critical_points::<f64>();
        assert!((crit[0] - 1.0).norm() < 1e-15);
        for c in crit {
            assert!((c * c * c - 1.0).norm() < 1e-12);
            assert!(roth_derivative(c).norm() < 1e-12);
        }
        assert_eq!(roth_map(C::new(1.0, 0.0)), SpherePoint::Finite(C::new(1.5, 0.0)));
        let pre = roth_value_map(SpherePoint::Finite(C::new(0.0, 0.0)));
        assert_eq!(pre.len(), 3);
        let mut args: Vec<f64> = pre
            .iter()
            .map(|p| match p {
                SpherePoint::Finite(z) => {
                    assert_relative_eq!(z.norm(), 0.5f64.powf(1.0 / 3.0), max_relative = 1e-12);
                    let a = z.arg();
                    if a < 0.0 { a + std::f64::consts::TAU } else { a }
                }
                SpherePoint::Infinity => panic!(),
            })
            .collect();
        args.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pi = std::f64::consts::PI;
        for (a, w) in args.iter().zip([pi / 3.0, pi, 5.0 * pi / 3.0]) {
            assert!((a - w).abs() < 1e-12);
        }
        assert_eq!(roth_value_map::<f64>(SpherePoint::Infinity), vec![SpherePoint::Infinity]);
        // w = R(1) = 3/2 has the double root 1 excluded and one root in Ω.
        assert_eq!(roth_value_map(SpherePoint::Finite(C::new(1.5, 0.0))).len(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let w = C::from_polar(rng.gen_range(0.0..50.0), rng.gen_range(0.0..std::f64::consts::TAU));
            let zs = roth_value_map(SpherePoint::Finite(w));
            assert!(!zs.is_empty());
            for z in zs {
                let SpherePoint::Finite(z) = z else { panic!() };
                let SpherePoint::Finite(v) = roth_map(z) else { panic!() };
                assert!((v - w).norm() < 1e-9 * w.norm().max(1.0));
            }
        }
    }
}
