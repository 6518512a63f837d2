//! Disc automorphisms, the pseudo-hyperbolic metric, Carleson squares and Stolz angles.

use num_complex::Complex;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, Cx, Real};

/// Default deepest generation of the dyadic tree.
pub const DEFAULT_MAX_GENERATION: u32 = 24;

/// `φ_a(z) = (a - z) / (1 - ā z)`.
pub fn phi<T: Real>(a: Cx<T>, z: Cx<T>) -> Cx<T> {
    (a - z) / (Cx::<T>::one() - a.conj() * z)
}

/// `φ_a'(z) = (|a|² - 1) / (1 - ā z)²`.
pub fn phi_prime<T: Real>(a: Cx<T>, z: Cx<T>) -> Cx<T> {
    let d = Cx::<T>::one() - a.conj() * z;
    Complex::new(a.norm_sqr() - T::one(), T::zero()) / (d * d)
}

/// `φ_a''(z) = 2 ā (|a|² - 1) / (1 - ā z)³`.
pub fn phi_second<T: Real>(a: Cx<T>, z: Cx<T>) -> Cx<T> {
    let d = Cx::<T>::one() - a.conj() * z;
    a.conj() * (a.norm_sqr() - T::one()) * T::lit(2.0) / (d * d * d)
}

/// Pseudo-hyperbolic distance `|z1 - z2| / |1 - z̄1 z2|`.
pub fn rho_p<T: Real>(z1: Cx<T>, z2: Cx<T>) -> T {
    let den = (Cx::<T>::one() - z1.conj() * z2).norm();
    if den == T::zero() {
        return T::one();
    }
    ((z1 - z2).norm() / den).min(T::one())
}

/// `1 - |φ_a(z)|² = (1-|a|²)(1-|z|²)/|1-āz|²`, evaluated without cancellation.
pub fn one_minus_phi_sq<T: Real>(a: Cx<T>, z: Cx<T>) -> T {
    let d = (Cx::<T>::one() - a.conj() * z).norm_sqr();
    (T::one() - a.norm_sqr()) * (T::one() - z.norm_sqr()) / d
}

/// Dyadic Carleson square of generation `generation ≥ 1` and index
/// `0 ≤ index < 2^{generation-1}`. Generation 1 is the whole disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CarlesonSquare {
    pub generation: u32,
    pub index: u64,
}

impl CarlesonSquare {
    pub fn root() -> Self {
        CarlesonSquare { generation: 1, index: 0 }
    }

    pub fn new(generation: u32, index: u64) -> Result<Self> {
        if generation == 0 || generation > 62 || index >= Self::count(generation) {
            return Err(Error::InvalidArgument(format!(
                "no dyadic square ({generation}, {index})"
            )));
        }
        Ok(CarlesonSquare { generation, index })
    }

    /// Number of squares in a generation, `2^{n-1}`.
    pub fn count(generation: u32) -> u64 {
        1u64 << (generation - 1)
    }

    pub fn generation_squares(generation: u32) -> impl Iterator<Item = CarlesonSquare> {
        (0..Self::count(generation)).map(move |index| CarlesonSquare { generation, index })
    }

    /// Arc `[θ_lo, θ_hi]` as exact dyadic fractions of a full turn.
    pub fn arc<T: Real>(&self) -> (T, T) {
        let n = Self::count(self.generation) as f64;
        let tau = T::TAU();
        (
            tau * T::lit(self.index as f64 / n),
            tau * T::lit((self.index + 1) as f64 / n),
        )
    }

    /// Arc length `ℓ(Q) = 2π / 2^{n-1}`.
    pub fn ell<T: Real>(&self) -> T {
        T::TAU() / T::lit(Self::count(self.generation) as f64)
    }

    /// `1 - ℓ(Q)/(2π) = 1 - 2^{1-n}`.
    pub fn inner_radius<T: Real>(&self) -> T {
        T::one() - T::lit(1.0 / Self::count(self.generation) as f64)
    }

    pub fn children(&self) -> [CarlesonSquare; 2] {
        let g = self.generation + 1;
        [
            CarlesonSquare { generation: g, index: 2 * self.index },
            CarlesonSquare { generation: g, index: 2 * self.index + 1 },
        ]
    }

    pub fn parent(&self) -> Option<CarlesonSquare> {
        (self.generation > 1)
            .then(|| CarlesonSquare { generation: self.generation - 1, index: self.index / 2 })
    }

    /// True when `self` is `other` or lies inside it.
    pub fn is_within(&self, other: &CarlesonSquare) -> bool {
        self.generation >= other.generation
            && (self.index >> (self.generation - other.generation)) == other.index
    }

    pub fn contains<T: Real>(&self, z: Cx<T>) -> bool {
        let r = z.norm();
        if r >= T::one() || r < self.inner_radius() {
            return false;
        }
        self.generation == 1 || angle_in(self.arc(), z.arg())
    }

    /// Center of the top half: `(1 - 3ℓ/(8π)) e^{iθ_mid}`.
    pub fn top_half_center<T: Real>(&self) -> Result<Cx<T>> {
        if self.generation < 2 {
            return Err(Error::InvalidArgument("generation-1 square has no top half".into()));
        }
        let (lo, hi) = self.arc::<T>();
        let r = T::one() - T::lit(3.0) * self.ell::<T>() / (T::lit(8.0) * T::PI());
        Ok(cis((lo + hi) * T::lit(0.5)) * r)
    }

    /// Membership in `T(Q) = {1-ℓ/(2π) ≤ |z| ≤ 1-ℓ/(4π), arg z ∈ I}`.
    pub fn in_top_half<T: Real>(&self, z: Cx<T>) -> bool {
        let r = z.norm();
        let ell = self.ell::<T>();
        let lo = T::one() - ell / T::TAU();
        let hi = T::one() - ell / (T::lit(2.0) * T::TAU());
        r >= lo && r <= hi && (self.generation == 1 || angle_in(self.arc(), z.arg()))
    }

    /// Corners, edge midpoints and center of `T(Q)`.
    pub fn top_half_stencil<T: Real>(&self) -> Result<[Cx<T>; 9]> {
        let (lo, hi) = self.arc::<T>();
        let ell = self.ell::<T>();
        let r0 = T::one() - ell / T::TAU();
        let r1 = T::one() - ell / (T::lit(2.0) * T::TAU());
        let rm = (r0 + r1) * T::lit(0.5);
        let tm = (lo + hi) * T::lit(0.5);
        if self.generation < 2 {
            return Err(Error::InvalidArgument("generation-1 square has no top half".into()));
        }
        let p = |r: T, t: T| cis(t) * r;
        Ok([
            p(r0, lo),
            p(r0, tm),
            p(r0, hi),
            p(rm, lo),
            p(rm, tm),
            p(rm, hi),
            p(r1, lo),
            p(r1, tm),
            p(r1, hi),
        ])
    }
}

fn angle_in<T: Real>((lo, hi): (T, T), arg: T) -> bool {
    let t = if arg < T::zero() { arg + T::TAU() } else { arg };
    t >= lo && t <= hi
}

/// `λ(s) = (9/10 + s) / (1 + 9s/10)` for `0 < s < 1`.
pub fn lambda_threshold<T: Real>(s: T) -> Result<T> {
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::InvalidArgument(format!("s = {s} outside (0, 1)")));
    }
    let nine = T::lit(0.9);
    Ok((nine + s) / (T::one() + nine * s))
}

/// Membership in the Stolz angle `|z - e^{iθ}| ≤ α(1 - |z|)`.
pub fn stolz_contains<T: Real>(theta: T, alpha: T, z: Cx<T>) -> Result<bool> {
    if !(alpha > T::one()) {
        return Err(Error::InvalidArgument(format!("aperture {alpha} must exceed 1")));
    }
    Ok((z - cis(theta)).norm() <= alpha * (T::one() - z.norm()))
}

/// Half-width of the angular window of a Stolz angle on the circle `|z| = r`.
pub fn stolz_half_width<T: Real>(alpha: T, r: T) -> T {
    if r <= T::zero() {
        return T::PI();
    }
    let s = (T::one() - r) * (alpha * alpha - T::one()).sqrt() / (T::lit(2.0) * r.sqrt());
    if s >= T::one() {
        T::PI()
    } else {
        T::lit(2.0) * s.asin()
    }
}
