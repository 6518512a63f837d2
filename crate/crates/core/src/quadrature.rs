//! Gauss-Legendre rules and polar product quadrature on dyadic annuli.

use rayon::prelude::*;

use crate::scalar::{cis, Cx, Real};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    if n <= 1 {
        let (x, w) = if n == 1 { (vec![0.0], vec![2.0]) } else { (vec![], vec![]) };
        return (x.into_iter().map(T::lit).collect(), w.into_iter().map(T::lit).collect());
    }
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, t);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x.into_iter().map(T::lit).collect(), w.into_iter().map(T::lit).collect())
}

/// One circle of a polar product rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring<T> {
    pub radius: T,
    /// Radial weight times the Jacobian `r`.
    pub weight: T,
    pub n_angles: usize,
    /// Index of the dyadic annulus the ring belongs to.
    pub annulus: usize,
}

impl<T: Real> Ring<T> {
    pub fn angle(&self, m: usize) -> T {
        T::TAU() * T::from_usize_lossy(m) / T::from_usize_lossy(self.n_angles)
    }

    pub fn point(&self, m: usize) -> Cx<T> {
        cis(self.angle(m)) * self.radius
    }

    /// Area weight of each node on this ring.
    pub fn node_weight(&self) -> T {
        self.weight * T::TAU() / T::from_usize_lossy(self.n_angles)
    }
}

/// Gauss-Legendre in radius on dyadic annuli `[1-2^{-k}, 1-2^{-k-1}]`,
/// trapezoid in angle, truncated at `r_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarQuadrature<T> {
    pub rings: Vec<Ring<T>>,
    pub r_max: T,
    /// Annulus bounds, one pair per annulus index.
    pub annuli: Vec<(T, T)>,
}

pub const DEFAULT_RADIAL_NODES: usize = 64;

pub fn default_angles(k: usize) -> usize {
    64usize.max(1usize << (k + 5).min(40))
}

impl<T: Real> PolarQuadrature<T> {
    pub fn new(r_max: T) -> Self {
        Self::with_rule(r_max, DEFAULT_RADIAL_NODES, default_angles)
    }

    /// Same annuli with twice the angular resolution.
    pub fn refined(r_max: T) -> Self {
        Self::with_rule(r_max, DEFAULT_RADIAL_NODES, |k| 2 * default_angles(k))
    }

    pub fn with_rule(r_max: T, radial: usize, angles: impl Fn(usize) -> usize) -> Self {
        let (x, w) = gauss_legendre::<T>(radial);
        let mut rings = Vec::new();
        let mut annuli = Vec::new();
        let half = T::lit(0.5);
        for k in 0..60usize {
            let a = T::one() - T::lit(0.5f64.powi(k as i32));
            if a >= r_max {
                break;
            }
            let b = (T::one() - T::lit(0.5f64.powi(k as i32 + 1))).min(r_max);
            annuli.push((a, b));
            let (mid, hw) = ((a + b) * half, (b - a) * half);
            for (xi, wi) in x.iter().zip(&w) {
                let r = mid + hw * *xi;
                rings.push(Ring { radius: r, weight: *wi * hw * r, n_angles: angles(k), annulus: k });
            }
        }
        PolarQuadrature { rings, r_max, annuli }
    }

    /// Same rings with twice the angular nodes each; old nodes are kept.
    pub fn doubled(&self) -> Self {
        let rings = self.rings.iter().map(|r| Ring { n_angles: 2 * r.n_angles, ..*r }).collect();
        PolarQuadrature { rings, r_max: self.r_max, annuli: self.annuli.clone() }
    }

    pub fn node_count(&self) -> usize {
        self.rings.iter().map(|r| r.n_angles).sum()
    }

    /// `∫ f dm` over `|z| ≤ r_max`. Rings are reduced in a fixed order.
    pub fn integrate<F>(&self, f: F) -> T
    where
        F: Fn(Cx<T>) -> T + Sync,
    {
        let per_ring: Vec<T> = self
            .rings
            .par_iter()
            .map(|ring| {
                let s: T = (0..ring.n_angles).map(|m| f(ring.point(m))).sum();
                s * ring.node_weight()
            })
            .collect();
        pairwise_sum(&per_ring)
    }

    /// Node values of `f`, one vector per ring.
    pub fn sample<F, V>(&self, f: F) -> Vec<Vec<V>>
    where
        F: Fn(Cx<T>) -> V + Sync,
        V: Send,
    {
        self.rings
            .par_iter()
            .map(|ring| (0..ring.n_angles).map(|m| f(ring.point(m))).collect())
            .collect()
    }
}

/// Deterministic pairwise reduction.
pub fn pairwise_sum<T: Real>(v: &[T]) -> T {
    match v.len() {
        0 => T::zero(),
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Equispaced points on `|z| = r` starting at angle 0.
pub fn circle_points<T: Real>(r: T, n: usize) -> impl Iterator<Item = Cx<T>> {
    let step = T::TAU() / T::from_usize_lossy(n);
    (0..n).map(move |m| cis(step * T::from_usize_lossy(m)) * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_rules_are_exact_on_polynomials() {
        for n in [1usize, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre::<f64>(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-13);
            let deg = 2 * n - 1;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let want = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((s - want).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn polar_area_and_moment() {
        let q = PolarQuadrature::<f64>::new(0.999);
        let area = q.integrate(|_| 1.0);
        assert_relative_eq!(area, std::f64::consts::PI * 0.999f64.powi(2), max_relative = 1e-13);
        let full = PolarQuadrature::<f64>::with_rule(1.0 - 1e-15, 16, |_| 64);
        let m = full.integrate(|z| 1.0 - z.norm_sqr());
        assert_relative_eq!(m, std::f64::consts::FRAC_PI_2, max_relative = 1e-12);
    }

    #[test]
    fn annuli_are_dyadic_and_clipped() {
        let q = PolarQuadrature::<f64>::with_rule(0.9, 4, |_| 8);
        assert_eq!(q.annuli, vec![(0.0, 0.5), (0.5, 0.75), (0.75, 0.875), (0.875, 0.9)]);
    }
}
