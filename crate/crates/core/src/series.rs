//! Truncated power series about a center, with a certified trust radius.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, to_pair, Cx, Real};

/// Default truncation degree.
pub const DEFAULT_DEGREE: usize = 64;
/// Upper bound for adaptive degree doubling.
pub const MAX_DEGREE: usize = 512;
/// Safety factor applied to the ratio-test radius.
pub const SAFETY: f64 = 0.75;
/// Number of trailing coefficients inspected by the ratio test.
const WINDOW: usize = 8;

/// Relative truncation tolerance used when none is supplied.
pub fn default_tol<T: Real>() -> T {
    T::epsilon() * T::lit(100.0)
}

/// Arithmetic on truncated Taylor coefficient slices. All inputs share one
/// length and outputs keep it.
pub mod kernel {
    use super::*;

    pub fn add<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Vec<Cx<T>> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Vec<Cx<T>> {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn neg<T: Real>(a: &[Cx<T>]) -> Vec<Cx<T>> {
        a.iter().map(|x| -x).collect()
    }

    pub fn scale<T: Real>(a: &[Cx<T>], s: Cx<T>) -> Vec<Cx<T>> {
        a.iter().map(|x| x * s).collect()
    }

    /// Cauchy product truncated to the input length.
    pub fn mul<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = a.len().min(b.len());
        let mut out = vec![Cx::<T>::zero(); n];
        for (i, ai) in a.iter().enumerate().take(n) {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate().take(n - i) {
                out[i + j] += ai * bj;
            }
        }
        out
    }

    /// `a / b`; `None` when `b` vanishes at the center.
    pub fn div<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Option<Vec<Cx<T>>> {
        let n = a.len();
        let b0 = b[0];
        if b0.is_zero() {
            return None;
        }
        let inv = b0.inv();
        let mut c: Vec<Cx<T>> = Vec::with_capacity(n);
        for k in 0..n {
            let mut s = a[k];
            for j in 1..=k {
                s -= b[j] * c[k - j];
            }
            c.push(s * inv);
        }
        Some(c)
    }

    pub fn exp<T: Real>(a: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = a.len();
        let mut e: Vec<Cx<T>> = Vec::with_capacity(n);
        e.push(a[0].exp());
        for k in 1..n {
            let mut s = Cx::<T>::zero();
            for j in 1..=k {
                s += a[j] * e[k - j] * T::from_usize_lossy(j);
            }
            e.push(s / T::from_usize_lossy(k));
        }
        e
    }

    /// Principal logarithm; `None` when the constant term is zero or on the cut.
    pub fn log<T: Real>(a: &[Cx<T>]) -> Option<Vec<Cx<T>>> {
        let a0 = a[0];
        if on_cut(a0) {
            return None;
        }
        let n = a.len();
        let mut l: Vec<Cx<T>> = Vec::with_capacity(n);
        l.push(a0.ln());
        let inv = a0.inv();
        for k in 1..n {
            let mut s = a[k] * T::from_usize_lossy(k);
            for j in 1..k {
                s -= l[j] * a[k - j] * T::from_usize_lossy(j);
            }
            l.push(s * inv / T::from_usize_lossy(k));
        }
        Some(l)
    }

    /// Principal square root; `None` when the constant term is zero or on the cut.
    pub fn sqrt<T: Real>(a: &[Cx<T>]) -> Option<Vec<Cx<T>>> {
        let a0 = a[0];
        if on_cut(a0) {
            return None;
        }
        let n = a.len();
        let mut s: Vec<Cx<T>> = Vec::with_capacity(n);
        s.push(a0.sqrt());
        let inv2 = (s[0] * T::lit(2.0)).inv();
        for k in 1..n {
            let mut t = a[k];
            for j in 1..k {
                t -= s[j] * s[k - j];
            }
            s.push(t * inv2);
        }
        Some(s)
    }

    /// `(sin a, cos a)` propagated together.
    pub fn sin_cos<T: Real>(a: &[Cx<T>]) -> (Vec<Cx<T>>, Vec<Cx<T>>) {
        let n = a.len();
        let mut s: Vec<Cx<T>> = Vec::with_capacity(n);
        let mut c: Vec<Cx<T>> = Vec::with_capacity(n);
        s.push(a[0].sin());
        c.push(a[0].cos());
        for k in 1..n {
            let mut ss = Cx::<T>::zero();
            let mut cc = Cx::<T>::zero();
            for j in 1..=k {
                let ja = a[j] * T::from_usize_lossy(j);
                ss += ja * c[k - j];
                cc -= ja * s[k - j];
            }
            let kk = T::from_usize_lossy(k);
            s.push(ss / kk);
            c.push(cc / kk);
        }
        (s, c)
    }

    /// Integer power; negative exponents need a nonzero constant term.
    pub fn powi<T: Real>(a: &[Cx<T>], m: i32) -> Option<Vec<Cx<T>>> {
        let n = a.len();
        let mut base = a.to_vec();
        let mut acc = vec![Cx::<T>::zero(); n];
        acc[0] = Cx::<T>::one();
        let mut e = m.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = mul(&base, &base);
            }
        }
        if m < 0 {
            let mut one = vec![Cx::<T>::zero(); n];
            one[0] = Cx::<T>::one();
            div(&one, &acc)
        } else {
            Some(acc)
        }
    }

    pub(crate) fn on_cut<T: Real>(a0: Cx<T>) -> bool {
        a0.is_zero() || (a0.im == T::zero() && a0.re < T::zero())
    }
}

/// Ratio-test radius and the tolerance-limited trust radius of a coefficient list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustEstimate<T> {
    /// Estimated radius of convergence (infinite for exhausted tails).
    pub rho: T,
    /// Largest radius at which the extrapolated tail stays below tolerance,
    /// never more than `SAFETY * rho`.
    pub trust: T,
}

/// Estimates convergence and trust radii from the trailing coefficients.
///
/// The tail `Σ_{k>N} a_k r^k` is extrapolated geometrically from the last
/// eight coefficients and compared against `tol` times the largest term.
pub fn estimate_trust<T: Real>(coeffs: &[Cx<T>], tol: T) -> TrustEstimate<T> {
    let inf = T::infinity();
    let n = coeffs.len();
    if n < 2 {
        return TrustEstimate { rho: inf, trust: inf };
    }
    let k = WINDOW.min(n);
    let h = k / 2;
    let last = n - 1;
    let first_lo = n - k;
    let max_in = |lo: usize, hi: usize| -> T {
        coeffs[lo..=hi].iter().map(|c| c.norm()).fold(T::zero(), T::max)
    };
    let m1 = max_in(first_lo, last - h);
    let m2 = max_in(last - h + 1, last);
    let scale = coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max);
    if scale.is_zero() || m2 <= scale * T::epsilon() * T::epsilon() || m1.is_zero() {
        return TrustEstimate { rho: inf, trust: inf };
    }
    let rho = (m1 / m2).powf(T::one() / T::from_usize_lossy(k - h));
    if !rho.is_finite() {
        return TrustEstimate { rho: inf, trust: inf };
    }
    let ln_rho = rho.ln();
    let ln_m = (first_lo..=last)
        .filter(|&j| !coeffs[j].is_zero())
        .map(|j| coeffs[j].norm().ln() + ln_rho * T::from_usize_lossy(j))
        .fold(T::neg_infinity(), T::max);
    let ln_tol = tol.ln();
    let np1 = T::from_usize_lossy(n);
    let ok = |r: T| -> bool {
        let q = r / rho;
        if q >= T::one() {
            return false;
        }
        let ln_tail = ln_m + np1 * q.ln() - (T::one() - q).ln();
        let ln_r = r.ln();
        let ln_s = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| c.norm().ln() + ln_r * T::from_usize_lossy(j))
            .fold(T::neg_infinity(), T::max)
            .max(T::zero());
        ln_tail <= ln_tol + ln_s
    };
    let safe = rho * T::lit(SAFETY);
    let trust = if ok(safe) {
        safe
    } else {
        let (mut lo, mut hi) = (T::zero(), safe);
        for _ in 0..60 {
            let mid = (lo + hi) * T::lit(0.5);
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    TrustEstimate { rho, trust }
}

/// Truncated Taylor expansion `Σ a_k (z - center)^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries<T: Real> {
    pub center: Cx<T>,
    pub coeffs: Vec<Cx<T>>,
    pub trust_radius: T,
}

impl<T: Real> PowerSeries<T> {
    /// Builds a series and estimates its trust radius with the default tolerance.
    pub fn new(center: Cx<T>, coeffs: Vec<Cx<T>>) -> Self {
        let est = estimate_trust(&coeffs, default_tol());
        PowerSeries { center, coeffs, trust_radius: est.trust }
    }

    pub fn with_trust(center: Cx<T>, coeffs: Vec<Cx<T>>, trust_radius: T) -> Self {
        PowerSeries { center, coeffs, trust_radius }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation, rejecting points beyond the trust radius.
    pub fn evaluate(&self, z: Cx<T>) -> Result<Cx<T>> {
        self.check(z)?;
        Ok(self.evaluate_unchecked(z))
    }

    pub fn evaluate_unchecked(&self, z: Cx<T>) -> Cx<T> {
        let h = z - self.center;
        self.coeffs.iter().rev().fold(Cx::<T>::zero(), |acc, c| acc * h + c)
    }

    /// Value and the first `order` derivatives at `z`.
    pub fn jet(&self, z: Cx<T>, order: usize) -> Result<Vec<Cx<T>>> {
        self.check(z)?;
        Ok(self.jet_unchecked(z, order))
    }

    pub fn jet_unchecked(&self, z: Cx<T>, order: usize) -> Vec<Cx<T>> {
        let h = z - self.center;
        let n = self.coeffs.len();
        let mut out = vec![Cx::<T>::zero(); order + 1];
        // Horner on the derivative chain: out[d] accumulates Σ k!/(k-d)! a_k h^{k-d}.
        for k in (0..n).rev() {
            for d in (1..=order).rev() {
                out[d] = out[d] * h + out[d - 1];
            }
            out[0] = out[0] * h + self.coeffs[k];
        }
        let mut fact = T::one();
        for (d, v) in out.iter_mut().enumerate().skip(1) {
            fact *= T::from_usize_lossy(d);
            *v *= fact;
        }
        out
    }

    fn check(&self, z: Cx<T>) -> Result<()> {
        let d = (z - self.center).norm();
        if d > self.trust_radius * (T::one() + T::lit(1e-12)) {
            return Err(Error::OutsideTrustRadius {
                distance: d.as_f64(),
                radius: self.trust_radius.as_f64(),
            });
        }
        Ok(())
    }

    pub fn differentiate(&self) -> Self {
        let coeffs: Vec<Cx<T>> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * T::from_usize_lossy(k))
            .collect();
        let coeffs = if coeffs.is_empty() { vec![Cx::<T>::zero()] } else { coeffs };
        PowerSeries { center: self.center, coeffs, trust_radius: self.trust_radius }
    }

    /// Cauchy product truncated at the common degree. Both factors must share a center.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.center != other.center {
            return Err(Error::InvalidArgument("series centers differ".into()));
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = kernel::mul(&self.coeffs[..n], &other.coeffs[..n]);
        let est = estimate_trust(&coeffs, default_tol());
        let trust = self.trust_radius.min(other.trust_radius).min(est.trust);
        Ok(PowerSeries { center: self.center, coeffs, trust_radius: trust })
    }

    /// Taylor shift to `new_center`; the trust radius shrinks by the shift length.
    pub fn recenter(&self, new_center: Cx<T>) -> Result<Self> {
        let h = new_center - self.center;
        let d = h.norm();
        if d >= self.trust_radius {
            return Err(Error::OutsideTrustRadius {
                distance: d.as_f64(),
                radius: self.trust_radius.as_f64(),
            });
        }
        let mut b = self.coeffs.clone();
        let n = b.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                let t = b[k + 1] * h;
                b[k] += t;
            }
        }
        let trust = if self.trust_radius.is_finite() {
            self.trust_radius - d
        } else {
            estimate_trust(&b, default_tol()).trust
        };
        if b.iter().any(|c| !is_finite(*c)) {
            return Err(Error::Domain { z: to_pair(new_center), what: "non-finite recentred coefficients" });
        }
        Ok(PowerSeries { center: new_center, coeffs: b, trust_radius: trust })
    }

    /// Geometric extrapolation of the truncation tail at radius `r`.
    pub fn tail_estimate(&self, r: T) -> T {
        let est = estimate_trust(&self.coeffs, default_tol());
        if !est.rho.is_finite() {
            return T::zero();
        }
        let q = r / est.rho;
        if q >= T::one() {
            return T::infinity();
        }
        let n = self.coeffs.len();
        let lo = n.saturating_sub(WINDOW);
        let m = (lo..n)
            .map(|j| self.coeffs[j].norm() * est.rho.powi(j as i32))
            .fold(T::zero(), T::max);
        m * q.powi(n as i32) / (T::one() - q)
    }
}
