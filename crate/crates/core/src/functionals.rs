//! Means, norms and measure conditions evaluated numerically.
//!
//! Every "sup over the disc" is a lower bound obtained on a finite grid or
//! net; reports carry per-radius maxima or a refinement delta so divergence
//! toward the boundary is visible instead of hidden.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::ExprAst;
use crate::geometry::CarlesonSquare;
use crate::quadrature::{pairwise_sum, PolarQuadrature};
use crate::scalar::{cis, to_pair, Cx, Real};

/// Relative tolerance of adaptive circle quadrature.
pub const CIRCLE_TOL: f64 = 1e-8;
const MAX_CIRCLE_POINTS: usize = 1 << 22;

/// Adapter turning an expression into an evaluator closure.
pub fn expr_evaluator<T: Real>(e: &ExprAst<T>) -> impl Fn(Cx<T>) -> Result<Cx<T>> + Sync + '_ {
    move |z| e.eval(z)
}

/// Trapezoid mean of a real integrand on `|z| = r`, doubling `n` until the
/// relative change drops below `tol`.
pub fn adaptive_circle<T, F>(r: T, n_points: usize, tol: T, integrand: F) -> Result<T>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<T> + Sync,
{
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::InvalidArgument(format!("radius {r} outside (0, 1)")));
    }
    if n_points < 64 || !n_points.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("{n_points} points: need a power of two ≥ 64")));
    }
    let sweep = |n: usize, offset: usize, stride: usize| -> Result<T> {
        let vals: Vec<T> = (0..n / stride)
            .into_par_iter()
            .map(|m| {
                let t = T::TAU() * T::from_usize_lossy(m * stride + offset) / T::from_usize_lossy(n);
                integrand(cis(t) * r)
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&vals))
    };
    let mut n = n_points;
    let mut sum = sweep(n, 0, 1)?;
    let mut prev = sum / T::from_usize_lossy(n);
    while 2 * n <= MAX_CIRCLE_POINTS {
        sum += sweep(2 * n, 1, 2)?;
        n *= 2;
        let cur = sum / T::from_usize_lossy(n);
        if (cur - prev).abs() <= tol * cur.abs() || (cur == prev) {
            return Ok(cur);
        }
        prev = cur;
    }
    Ok(prev)
}

/// `(1/2π) ∫ |f(re^{iθ})|^p dθ`.
pub fn circle_mean<T, F>(f: F, r: T, p: T, n_points: usize) -> Result<T>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    if !(p > T::zero()) {
        return Err(Error::InvalidArgument(format!("exponent {p} must be positive")));
    }
    adaptive_circle(r, n_points, T::lit(CIRCLE_TOL), |z| Ok(f(z)?.norm().powf(p)))
}

/// `m(r, f) = (1/2π) ∫ log⁺|f(re^{iθ})| dθ`.
pub fn nevanlinna_m<T, F>(f: F, r: T) -> Result<T>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    adaptive_circle(r, 256, T::lit(CIRCLE_TOL), |z| Ok(f(z)?.norm().ln().max(T::zero())))
}

/// Circle means at increasing radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile<T> {
    pub radii: Vec<T>,
    pub values: Vec<T>,
    /// Values are nondecreasing up to relative rounding.
    pub monotone: bool,
}

pub fn hardy_profile<T, F>(f: F, radii: &[T], p: T) -> Result<RadialProfile<T>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
    }
    let values: Vec<T> = radii.iter().map(|&r| circle_mean(&f, r, p, 64)).collect::<Result<_>>()?;
    let slack = T::lit(1e-9);
    let monotone = values.windows(2).all(|w| w[1] >= w[0] * (T::one() - slack));
    Ok(RadialProfile { radii: radii.to_vec(), values, monotone })
}

/// Radial-angular sampling grid for suprema.
#[derive(Debug, Clone, PartialEq)]
pub struct SupGrid<T> {
    pub radii: Vec<T>,
    pub angles: Vec<usize>,
}

impl<T: Real> SupGrid<T> {
    /// Power of two ≥ max(64, 16π/(1-r)); nested under radius refinement.
    pub fn angles_for(r: T) -> usize {
        let need = (16.0 * std::f64::consts::PI / (1.0 - r.as_f64())).ceil() as usize;
        need.max(64).next_power_of_two()
    }

    /// Radii `0` and `1 - 2^{-k/2}` for `k ≤ 2 depth`, clipped to `r_max`
    /// (which is itself added when it falls inside the range).
    pub fn boundary(depth: u32, r_max: T) -> Self {
        let mut radii = vec![T::zero()];
        for k in 1..=2 * depth {
            let r = T::one() - T::lit(2f64.powf(-(k as f64) / 2.0));
            if r < r_max {
                radii.push(r);
            }
        }
        if r_max < T::one() - T::lit(2f64.powi(-(depth as i32))) && r_max > *radii.last().unwrap() {
            radii.push(r_max);
        }
        Self::from_radii(radii)
    }

    pub fn from_radii(radii: Vec<T>) -> Self {
        let angles = radii.iter().map(|&r| Self::angles_for(r)).collect();
        SupGrid { radii, angles }
    }

    /// Twice the angles on every circle.
    pub fn doubled(&self) -> Self {
        SupGrid { radii: self.radii.clone(), angles: self.angles.iter().map(|n| 2 * n).collect() }
    }

    pub fn point_count(&self) -> usize {
        self.angles.iter().sum()
    }
}

/// Grid supremum with per-radius maxima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupReport<T> {
    pub value: T,
    pub argmax: Cx<T>,
    pub per_radius: Vec<(T, T)>,
    /// Per-radius maximum more than doubled between the radius whose
    /// boundary distance is four times larger and the outermost one.
    pub diverging: bool,
}

/// `sup g` over a grid; `g` must be nonnegative.
pub fn grid_sup<T, G>(grid: &SupGrid<T>, g: G) -> Result<SupReport<T>>
where
    T: Real,
    G: Fn(Cx<T>) -> Result<T> + Sync,
{
    let rows: Vec<(T, Cx<T>)> = grid
        .radii
        .par_iter()
        .zip(grid.angles.par_iter())
        .map(|(&r, &n)| {
            let mut best = (T::neg_infinity(), Cx::new(r, T::zero()));
            for m in 0..n {
                let z = cis(T::TAU() * T::from_usize_lossy(m) / T::from_usize_lossy(n)) * r;
                let v = g(z)?;
                if v > best.0 {
                    best = (v, z);
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let mut value = T::neg_infinity();
    let mut argmax = Cx::new(T::zero(), T::zero());
    for &(v, z) in &rows {
        if v > value {
            value = v;
            argmax = z;
        }
    }
    let per_radius: Vec<(T, T)> = grid.radii.iter().zip(&rows).map(|(&r, &(v, _))| (r, v)).collect();
    let diverging = match per_radius.last() {
        Some(&(rl, vl)) if rl > T::zero() => {
            let far = T::lit(4.0) * (T::one() - rl);
            per_radius
                .iter()
                .rev()
                .find(|(r, _)| T::one() - *r >= far)
                .is_some_and(|&(_, v)| vl > T::lit(2.0) * v)
        }
        _ => false,
    };
    Ok(SupReport { value, argmax, per_radius, diverging })
}

/// `sup (1-|z|²)^α |A(z)|` as a grid lower bound.
pub fn growth_norm<T, F>(a: F, alpha: T, grid: &SupGrid<T>) -> Result<SupReport<T>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    if !(alpha >= T::zero()) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be nonnegative")));
    }
    grid_sup(grid, |z| Ok((T::one() - z.norm_sqr()).powf(alpha) * a(z)?.norm()))
}

/// `sup (1-|z|²)|f'(z)|`.
pub fn bloch_seminorm<T, F>(fprime: F, grid: &SupGrid<T>) -> Result<SupReport<T>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    growth_norm(fprime, T::one(), grid)
}

/// `sup (1-|z|²)|f'|/(1+|f|²)` from an evaluator of `(f, f')`.
pub fn normality_sigma<T, F>(f: F, grid: &SupGrid<T>) -> Result<SupReport<T>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<(Cx<T>, Cx<T>)> + Sync,
{
    grid_sup(grid, |z| {
        let (v, d) = f(z)?;
        Ok((T::one() - z.norm_sqr()) * d.norm() / (T::one() + v.norm_sqr()))
    })
}

/// Spherical-derivative supremum of `u/v` from jets `[u, u', v, v']`,
/// written as `|u'v - uv'| / (|u|² + |v|²)` so poles of `u/v` need no chart switch.
pub fn normality_sigma_quotient<T, F>(jets: F, grid: &SupGrid<T>) -> Result<SupReport<T>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<[Cx<T>; 4]> + Sync,
{
    grid_sup(grid, |z| {
        let [u, du, v, dv] = jets(z)?;
        let den = u.norm_sqr() + v.norm_sqr();
        if den == T::zero() {
            return Err(Error::Degenerate("numerator and denominator vanish together".into()));
        }
        Ok((T::one() - z.norm_sqr()) * (du * v - u * dv).norm() / den)
    })
}

/// Net of centers `a` for Möbius-sup functionals: rings `(radius, count)`
/// with angles starting at 0, plus loose points.
#[derive(Debug, Clone, PartialEq)]
pub struct Net<T> {
    pub rings: Vec<(T, usize)>,
    pub extra: Vec<Cx<T>>,
}

impl<T: Real> Net<T> {
    /// `r_j = 1 - 2^{-j}` with `2^{j+3}` angles for `1 ≤ j ≤ j_max`, plus the origin.
    pub fn dyadic(j_max: u32) -> Self {
        let mut rings = vec![(T::zero(), 1)];
        for j in 1..=j_max {
            rings.push((T::one() - T::lit(0.5f64.powi(j as i32)), 1usize << (j + 3)));
        }
        Net { rings, extra: Vec::new() }
    }

    pub fn from_points(points: Vec<Cx<T>>) -> Self {
        Net { rings: Vec::new(), extra: points }
    }

    pub fn with_points(mut self, points: impl IntoIterator<Item = Cx<T>>) -> Self {
        self.extra.extend(points);
        self
    }

    pub fn len(&self) -> usize {
        self.rings.iter().map(|r| r.1).sum::<usize>() + self.extra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in the order used by [`KernelSweep::values`].
    pub fn points(&self) -> Vec<Cx<T>> {
        let mut out = Vec::with_capacity(self.len());
        for &(rho, n) in &self.rings {
            for l in 0..n {
                out.push(cis(T::TAU() * T::from_usize_lossy(l) / T::from_usize_lossy(n)) * rho);
            }
        }
        out.extend(self.extra.iter().copied());
        out
    }
}

impl<T: Real> Default for Net<T> {
    fn default() -> Self {
        Self::dyadic(10)
    }
}

/// Values of `∫ h(z) (1-|a|²)/|1-āz|² dm(z)` at every net point.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSweep<T> {
    pub values: Vec<(Cx<T>, T)>,
}

impl<T: Real> KernelSweep<T> {
    pub fn max(&self) -> (T, Cx<T>) {
        let mut best = (T::neg_infinity(), Cx::new(T::zero(), T::zero()));
        for &(a, v) in &self.values {
            if v > best.0 {
                best = (v, a);
            }
        }
        best
    }
}

/// Möbius-kernel integrals of a density over the quadrature, for every net point.
///
/// `(1-|a|²)/|1-āz|²` with `a = ρe^{iα}`, `z = re^{iβ}` is a multiple of the
/// Poisson kernel `P_{ρr}(β-α)`, whose Fourier coefficients are `(ρr)^{|k|}`.
/// Each ring is transformed once; for each net ring the aliased kernel
/// weights are applied in frequency space and one transform per angle count
/// returns the values at all its points.
pub fn kernel_sweep<T, H>(quad: &PolarQuadrature<T>, h: H, net: &Net<T>) -> Result<KernelSweep<T>>
where
    T: Real,
    H: Fn(Cx<T>) -> Result<T> + Sync,
{
    if net.is_empty() {
        return Err(Error::InvalidArgument("empty net".into()));
    }
    let weighted: Vec<Vec<f64>> = quad
        .rings
        .par_iter()
        .map(|ring| {
            let w = ring.node_weight().as_f64();
            (0..ring.n_angles).map(|m| Ok(h(ring.point(m))?.as_f64() * w)).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    if weighted.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("density is not finite on the quadrature nodes".into()));
    }
    let spectra: Vec<Option<Vec<Complex<f64>>>> = quad
        .rings
        .par_iter()
        .zip(weighted.par_iter())
        .map(|(ring, g)| {
            if !ring.n_angles.is_power_of_two() {
                return None;
            }
            let mut buf: Vec<Complex<f64>> = g.iter().map(|&v| Complex::new(v, 0.0)).collect();
            FftPlanner::<f64>::new().plan_fft_forward(buf.len()).process(&mut buf);
            Some(buf)
        })
        .collect();
    let radii: Vec<f64> = quad.rings.iter().map(|r| r.radius.as_f64()).collect();

    let direct = |a: Complex<f64>| -> f64 {
        let one_a = 1.0 - a.norm_sqr();
        let parts: Vec<f64> = quad
            .rings
            .iter()
            .zip(&weighted)
            .map(|(ring, g)| {
                let r = ring.radius.as_f64();
                (0..ring.n_angles)
                    .map(|m| {
                        let t = std::f64::consts::TAU * m as f64 / ring.n_angles as f64;
                        let z = Complex::from_polar(r, t);
                        g[m] * one_a / (1.0 - a.conj() * z).norm_sqr()
                    })
                    .sum()
            })
            .collect();
        pairwise_sum(&parts)
    };

    let ring_values: Vec<Vec<f64>> = net
        .rings
        .par_iter()
        .map(|&(rho, n_a)| {
            let rho = rho.as_f64();
            let fft_ok = n_a.is_power_of_two() && spectra.iter().all(|s| s.is_some());
            if !fft_ok {
                return (0..n_a)
                    .map(|l| direct(Complex::from_polar(rho, std::f64::consts::TAU * l as f64 / n_a as f64)))
                    .collect();
            }
            let mut acc: HashMap<usize, Vec<Complex<f64>>> = HashMap::new();
            for (k, spec) in spectra.iter().enumerate() {
                let spec = spec.as_ref().unwrap();
                let nz = spec.len();
                let n = nz.max(n_a);
                let s = rho * radii[k];
                let c = (1.0 - rho * rho) / (1.0 - s * s);
                let sn = s.powi(n as i32);
                let h = acc.entry(n).or_insert_with(|| vec![Complex::new(0.0, 0.0); n]);
                let mut sj = 1.0;
                for (j, hj) in h.iter_mut().enumerate() {
                    let w = if s == 0.0 {
                        if j == 0 { 1.0 } else { 0.0 }
                    } else {
                        (sj + s.powi((n - j) as i32)) / (1.0 - sn)
                    };
                    *hj += spec[j % nz].conj() * (c * w);
                    sj *= s;
                }
            }
            let mut keys: Vec<usize> = acc.keys().copied().collect();
            keys.sort_unstable();
            let mut out = vec![0.0; n_a];
            let mut planner = FftPlanner::<f64>::new();
            for n in keys {
                let mut h = acc.remove(&n).unwrap();
                planner.plan_fft_forward(n).process(&mut h);
                let step = n / n_a;
                for (l, o) in out.iter_mut().enumerate() {
                    *o += h[l * step].re;
                }
            }
            out
        })
        .collect();

    let extra: Vec<f64> = net
        .extra
        .par_iter()
        .map(|a| direct(Complex::new(a.re.as_f64(), a.im.as_f64())))
        .collect();
    let values = net
        .points()
        .into_iter()
        .zip(ring_values.into_iter().flatten().chain(extra))
        .map(|(a, v)| (a, T::lit(v)))
        .collect();
    Ok(KernelSweep { values })
}

/// Result of a net supremum computed twice, the second time with doubled angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetSupReport<T> {
    /// Reported quantity (a root of `integral` where the functional has one).
    pub value: T,
    /// Largest kernel integral on the net.
    pub integral: T,
    pub argmax: Cx<T>,
    /// `|integral(doubled) - integral|`.
    pub refinement_delta: T,
}

fn net_sup<T, H>(quad: &PolarQuadrature<T>, h: H, net: &Net<T>, root: T) -> Result<NetSupReport<T>>
where
    T: Real,
    H: Fn(Cx<T>) -> Result<T> + Sync,
{
    let (integral, argmax) = kernel_sweep(quad, &h, net)?.max();
    let (fine, _) = kernel_sweep(&quad.doubled(), &h, net)?.max();
    Ok(NetSupReport {
        value: integral.max(T::zero()).powf(T::one() / root),
        integral,
        argmax,
        refinement_delta: (fine - integral).abs(),
    })
}

/// `‖A‖_{F^p}`: sup over the net of `∫ |A|^p (1-|z|²)^{2p-2} (1-|φ_a(z)|²) dm`, to the power `1/p`.
pub fn fp_norm<T, F>(a: F, p: T, net: &Net<T>, quad: &PolarQuadrature<T>) -> Result<NetSupReport<T>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    if !(p > T::zero()) {
        return Err(Error::InvalidArgument(format!("exponent {p} must be positive")));
    }
    let density = fp_density(a, p);
    net_sup(quad, density, net, p)
}

/// `|A|^p (1-|z|²)^{2p-1}`, the measure tested in the `F^p` condition.
pub fn fp_density<T, F>(a: F, p: T) -> impl Fn(Cx<T>) -> Result<T> + Sync
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    move |z| {
        let w = T::one() - z.norm_sqr();
        Ok(a(z)?.norm().powf(p) * w.powf(T::lit(2.0) * p - T::one()))
    }
}

/// `sup_a ∫ (1-|a|²)/|1-āz|² dμ` for `dμ = density · dm`.
pub fn carleson_embedding_constant<T, H>(
    density: H,
    net: &Net<T>,
    quad: &PolarQuadrature<T>,
) -> Result<NetSupReport<T>>
where
    T: Real,
    H: Fn(Cx<T>) -> Result<T> + Sync,
{
    net_sup(quad, density, net, T::one())
}

/// `(sup_a ∫ |f'|² (1-|φ_a|²) dm)^{1/2}`.
pub fn bmoa_seminorm<T, F>(fprime: F, net: &Net<T>, quad: &PolarQuadrature<T>) -> Result<NetSupReport<T>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    net_sup(quad, |z| Ok(fprime(z)?.norm_sqr() * (T::one() - z.norm_sqr())), net, T::lit(2.0))
}

/// Largest `μ(Q)/ℓ(Q)` over dyadic squares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport<T> {
    pub value: T,
    pub argmax: CarlesonSquare,
    /// Largest ratio within each generation, starting at generation 1.
    pub per_generation: Vec<T>,
}

/// Quadrature suited to [`carleson_constant`] up to `max_generation`:
/// annuli reach the top halves of the deepest squares.
pub fn carleson_quadrature<T: Real>(max_generation: u32) -> PolarQuadrature<T> {
    let r_max = T::one() - T::lit(0.5f64.powi(max_generation as i32 + 1));
    PolarQuadrature::with_rule(r_max, 16, crate::quadrature::default_angles)
}

/// `max μ(Q)/ℓ(Q)` over all dyadic squares of generation `≤ max_generation`.
/// Mass outside `quad.r_max` is not seen.
pub fn carleson_constant<T, H>(density: H, max_generation: u32, quad: &PolarQuadrature<T>) -> Result<CarlesonReport<T>>
where
    T: Real,
    H: Fn(Cx<T>) -> Result<T> + Sync,
{
    if max_generation == 0 || max_generation > 40 {
        return Err(Error::InvalidArgument(format!("max_generation {max_generation} outside 1..=40")));
    }
    let n_annuli = quad.annuli.len();
    let mut width = vec![0usize; n_annuli];
    for ring in &quad.rings {
        if width[ring.annulus] == 0 {
            width[ring.annulus] = ring.n_angles;
        } else if width[ring.annulus] != ring.n_angles {
            return Err(Error::InvalidArgument("rings of one annulus must share angle counts".into()));
        }
    }
    let sampled: Vec<Vec<T>> = quad
        .rings
        .par_iter()
        .map(|ring| {
            let w = ring.node_weight();
            (0..ring.n_angles).map(|m| Ok(h_checked(&density, ring.point(m))? * w)).collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    let mut mass: Vec<Vec<T>> = width.iter().map(|&n| vec![T::zero(); n]).collect();
    for (ring, row) in quad.rings.iter().zip(&sampled) {
        for (acc, v) in mass[ring.annulus].iter_mut().zip(row) {
            *acc += *v;
        }
    }
    let prefix: Vec<Vec<T>> = mass
        .iter()
        .map(|row| {
            let mut p = Vec::with_capacity(row.len() + 1);
            p.push(T::zero());
            let mut s = T::zero();
            for v in row {
                s += *v;
                p.push(s);
            }
            p
        })
        .collect();
    let half = T::lit(0.5);
    let mut best = (T::neg_infinity(), CarlesonSquare::root());
    let mut per_generation = Vec::new();
    for g in 1..=max_generation {
        let count = CarlesonSquare::count(g) as usize;
        let ell = T::TAU() / T::from_usize_lossy(count);
        let mut gen_best = T::zero();
        let mut gen_arg = CarlesonSquare::root();
        let first_annulus = (g - 1) as usize;
        for j in 0..count {
            let mut mu = T::zero();
            for k in first_annulus..n_annuli {
                let n = width[k];
                if n == 0 {
                    continue;
                }
                if !n.is_multiple_of(count) {
                    return Err(Error::InvalidArgument(format!(
                        "annulus {k} has {n} angles, not a multiple of {count}"
                    )));
                }
                let s = n / count;
                let (lo, hi) = (j * s, (j + 1) * s);
                mu += prefix[k][hi] - prefix[k][lo] - half * mass[k][lo] + half * mass[k][hi % n];
            }
            let ratio = mu / ell;
            if ratio > gen_best || j == 0 {
                gen_best = ratio;
                gen_arg = CarlesonSquare { generation: g, index: j as u64 };
            }
        }
        per_generation.push(gen_best);
        if gen_best > best.0 {
            best = (gen_best, gen_arg);
        }
    }
    Ok(CarlesonReport { value: best.0, argmax: best.1, per_generation })
}

fn h_checked<T: Real, H: Fn(Cx<T>) -> Result<T>>(h: &H, z: Cx<T>) -> Result<T> {
    let v = h(z)?;
    if !(v >= T::zero()) || !v.is_finite() {
        return Err(Error::Domain { z: to_pair(z), what: "density must be finite and nonnegative" });
    }
    Ok(v)
}

/// `∫_{|z|≤r_max} |A|^p (1-|z|²)^β dm`.
pub fn weighted_area_integral<T, F>(a: F, p: T, beta: T, quad: &PolarQuadrature<T>) -> Result<T>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    if !(p > T::zero()) {
        return Err(Error::InvalidArgument(format!("exponent {p} must be positive")));
    }
    let rows = quad.sample(|z| Ok::<T, Error>(a(z)?.norm().powf(p) * (T::one() - z.norm_sqr()).powf(beta)));
    let per_ring: Vec<T> = quad
        .rings
        .iter()
        .zip(rows)
        .map(|(ring, row)| Ok(pairwise_sum(&row.into_iter().collect::<Result<Vec<T>>>()?) * ring.node_weight()))
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&per_ring))
}

/// Radii at which limits `r → 1⁻` are sampled.
pub const TREND_RADII: [f64; 3] = [0.9, 0.99, 0.999];

/// Serializable summary of one functional evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub value: f64,
    pub refinement_trend: Vec<f64>,
    pub argmax: Option<(f64, f64)>,
}

impl FunctionalReport {
    pub fn new(name: &str, value: f64) -> Self {
        FunctionalReport {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            value,
            refinement_trend: Vec::new(),
            argmax: None,
        }
    }

    pub fn param(mut self, key: &str, v: f64) -> Self {
        self.parameters.insert(key.to_string(), v);
        self
    }

    pub fn from_sup<T: Real>(name: &str, rep: &SupReport<T>) -> Self {
        FunctionalReport {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            value: rep.value.as_f64(),
            refinement_trend: rep.per_radius.iter().map(|p| p.1.as_f64()).collect(),
            argmax: Some(to_pair(rep.argmax)),
        }
    }

    pub fn from_net<T: Real>(name: &str, rep: &NetSupReport<T>) -> Self {
        FunctionalReport {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            value: rep.value.as_f64(),
            refinement_trend: vec![rep.integral.as_f64(), rep.refinement_delta.as_f64()],
            argmax: Some(to_pair(rep.argmax)),
        }
    }
}

/// [`weighted_area_integral`] at each of [`TREND_RADII`]; the value is the last.
pub fn weighted_area_trend<T, F>(a: F, p: T, beta: T) -> Result<FunctionalReport>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    let trend: Vec<f64> = TREND_RADII
        .iter()
        .map(|&r| Ok(weighted_area_integral(&a, p, beta, &PolarQuadrature::new(T::lit(r)))?.as_f64()))
        .collect::<Result<_>>()?;
    let mut rep = FunctionalReport::new("weighted_area_integral", *trend.last().unwrap())
        .param("p", p.as_f64())
        .param("beta", beta.as_f64());
    rep.refinement_trend = trend;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    type C = Complex<f64>;

    fn ev(s: &str) -> ExprAst<f64> {
        parse_expr(s).unwrap()
    }

    #[test]
    fn circle_mean_examples() {
        let c = ev("3-4*i");
        assert_relative_eq!(circle_mean(expr_evaluator(&c), 0.5, 1.5, 64).unwrap(), 125f64.sqrt(), max_relative = 1e-12);
        let z = ev("z");
        assert_relative_eq!(circle_mean(expr_evaluator(&z), 0.5, 2.0, 64).unwrap(), 0.25, max_relative = 1e-12);
        let k = ev("1/(1-z)");
        assert_relative_eq!(circle_mean(expr_evaluator(&k), 0.5, 2.0, 64).unwrap(), 4.0 / 3.0, max_relative = 1e-10);
        assert!(circle_mean(expr_evaluator(&k), 0.5, 2.0, 100).is_err());
        assert!(circle_mean(expr_evaluator(&k), 1.0, 2.0, 64).is_err());
    }

    #[test]
    fn nevanlinna_examples() {
        assert_eq!(nevanlinna_m(expr_evaluator(&ev("0.7*i")), 0.5).unwrap(), 0.0);
        assert_relative_eq!(nevanlinna_m(expr_evaluator(&ev("e")), 0.5).unwrap(), 1.0, max_relative = 1e-12);
        let k = ev("1/(1-z)");
        let m = nevanlinna_m(expr_evaluator(&k), 0.9).unwrap();
        let n = 1_000_000;
        let brute: f64 = (0..n)
            .map(|j| {
                let z = C::from_polar(0.9, std::f64::consts::TAU * (j as f64 + 0.5) / n as f64);
                (1.0 / (1.0 - z)).norm().ln().max(0.0)
            })
            .sum::<f64>()
            / n as f64;
        assert!(m > 0.0 && m <= 10f64.ln());
        assert!((m - brute).abs() < 1e-6, "{m} {brute}");
    }

    #[test]
    fn hardy_profile_is_monotone() {
        let f = ev("exp(3*z)/(1.2-z)");
        let prof = hardy_profile(expr_evaluator(&f), &[0.1, 0.4, 0.7, 0.9], 1.5).unwrap();
        assert!(prof.monotone);
        assert!(hardy_profile(expr_evaluator(&f), &[0.4, 0.4], 1.5).is_err());
    }

    #[test]
    fn growth_examples() {
        let grid = SupGrid::boundary(5, 0.99);
        let zero = growth_norm(expr_evaluator(&ev("0")), 2.0, &grid).unwrap();
        assert_eq!(zero.value, 0.0);
        let one = growth_norm(expr_evaluator(&ev("1")), 2.0, &grid).unwrap();
        assert_eq!(one.value, 1.0);
        assert_eq!(one.argmax, C::new(0.0, 0.0));
        assert!(!one.diverging);

        let a = ev("-4*z/(1-z)^4");
        let rep = growth_norm(expr_evaluator(&a), 2.0, &SupGrid::from_radii(vec![0.5, 0.9, 0.99])).unwrap();
        let at = |r: f64| rep.per_radius.iter().find(|p| p.0 == r).unwrap().1;
        assert_relative_eq!(at(0.99), 4.0 * 0.99 * 1.99f64.powi(2) / 0.01f64.powi(2), max_relative = 1e-9);
        assert!(at(0.99) / at(0.9) >= 50.0);
        assert!(rep.diverging);
    }

    #[test]
    fn sup_grid_refinement_is_nested() {
        let a = SupGrid::<f64>::boundary(4, 0.999);
        let b = SupGrid::<f64>::boundary(5, 0.999);
        assert!(a.radii.iter().all(|r| b.radii.contains(r)));
        let f = ev("1/(1-z)^2");
        let ra = growth_norm(expr_evaluator(&f), 2.0, &a).unwrap();
        let rb = growth_norm(expr_evaluator(&f), 2.0, &b).unwrap();
        let rc = growth_norm(expr_evaluator(&f), 2.0, &b.doubled()).unwrap();
        assert!(ra.value <= rb.value && rb.value <= rc.value);
    }

    #[test]
    fn bloch_and_normality_examples() {
        let grid = SupGrid::boundary(12, 0.9999);
        let b = bloch_seminorm(expr_evaluator(&ev("1/(1-z)")), &grid).unwrap();
        assert!(b.value >= 1.99 && b.value < 2.0);
        let small = SupGrid::boundary(4, 0.99);
        assert_eq!(bloch_seminorm(expr_evaluator(&ev("0")), &small).unwrap().value, 0.0);
        assert_eq!(bloch_seminorm(expr_evaluator(&ev("1")), &small).unwrap().value, 1.0);

        let id = normality_sigma(|z: C| Ok((z, C::new(1.0, 0.0))), &small).unwrap();
        assert_eq!(id.value, 1.0);
        assert_eq!(id.argmax, C::new(0.0, 0.0));
        let c = normality_sigma(|_z: C| Ok((C::new(2.0, 0.0), C::new(0.0, 0.0))), &small).unwrap();
        assert_eq!(c.value, 0.0);

        let inner = ev("exp(-(1+z)/(1-z))");
        let deep = SupGrid::boundary(8, 0.999);
        let s = normality_sigma(|z| Ok((inner.eval(z)?, inner.eval_jet(z, 1)?[1])), &deep).unwrap();
        assert!(s.per_radius.iter().all(|p| p.1 <= 2.0));
    }

    #[test]
    fn sigma_of_reciprocal_matches() {
        let f = ev("exp(2*z)*(2-z)");
        let grid = SupGrid::boundary(5, 0.99);
        let jet = |z: C| f.eval_jet(z, 1);
        let direct = normality_sigma_quotient(
            |z| {
                let j = jet(z)?;
                Ok([j[0], j[1], C::new(1.0, 0.0), C::new(0.0, 0.0)])
            },
            &grid,
        )
        .unwrap();
        let recip = normality_sigma_quotient(
            |z| {
                let j = jet(z)?;
                Ok([C::new(1.0, 0.0), C::new(0.0, 0.0), j[0], j[1]])
            },
            &grid,
        )
        .unwrap();
        assert!((direct.value - recip.value).abs() < 1e-8);
    }

    fn small_quad(r_max: f64) -> PolarQuadrature<f64> {
        PolarQuadrature::with_rule(r_max, 16, |k| 64usize.max(1 << (k + 5)))
    }

    #[test]
    fn kernel_sweep_matches_direct_sum() {
        let quad = small_quad(0.97);
        let f = ev("1/(1.1-z)^2");
        let h = |z: C| Ok(f.eval(z)?.norm() * (1.0 - z.norm_sqr()));
        let net = Net::dyadic(4).with_points([C::new(0.3, -0.5)]);
        let sweep = kernel_sweep(&quad, h, &net).unwrap();
        for (a, v) in sweep.values.iter().step_by(7) {
            let brute = quad.integrate(|z| h(z).unwrap() * (1.0 - a.norm_sqr()) / (1.0 - a.conj() * z).norm_sqr());
            assert!((v - brute).abs() <= 1e-11 * brute.abs().max(1.0), "{a} {v} {brute}");
        }
    }

    #[test]
    fn fp_examples() {
        let quad = PolarQuadrature::with_rule(1.0 - 1e-12, 24, |_| 64);
        let net = Net::from_points(vec![C::new(0.0, 0.0)]);
        let zero = fp_norm(expr_evaluator(&ev("0")), 1.0, &net, &quad).unwrap();
        assert_eq!(zero.value, 0.0);
        let one = fp_norm(expr_evaluator(&ev("1")), 1.0, &net, &quad).unwrap();
        assert_relative_eq!(one.value, FRAC_PI_2, max_relative = 1e-9);

        let quad = small_quad(0.99);
        let a = ev("0.3/(1-z)^2");
        let small = fp_norm(expr_evaluator(&a), 1.0, &Net::dyadic(3), &quad).unwrap();
        let big = fp_norm(expr_evaluator(&a), 1.0, &Net::dyadic(5), &quad).unwrap();
        assert!(big.value >= small.value);
        assert!(small.refinement_delta < 1e-6 * small.integral, "{small:?}");
    }

    #[test]
    fn embedding_agrees_with_fp() {
        let quad = small_quad(0.99);
        let a = ev("z/(1.05-z)");
        let net = Net::dyadic(4);
        for p in [1.0, 2.0] {
            let fp = fp_norm(expr_evaluator(&a), p, &net, &quad).unwrap();
            let emb = carleson_embedding_constant(fp_density(expr_evaluator(&a), p), &net, &quad).unwrap();
            assert_relative_eq!(fp.value.powf(p), emb.value, max_relative = 1e-12);
        }
    }

    #[test]
    fn carleson_examples() {
        let g = 8;
        let quad = carleson_quadrature::<f64>(g);
        let area = carleson_constant(|_z: C| Ok(1.0), g, &quad).unwrap();
        assert_relative_eq!(area.value, quad.r_max * quad.r_max / 2.0, max_relative = 1e-10);
        assert_eq!(area.argmax, CarlesonSquare::root());
        for (n, v) in area.per_generation.iter().enumerate().skip(1) {
            let h = 0.5f64.powi(n as i32);
            let r_max = quad.r_max;
            let exact = (r_max * r_max - (1.0 - h) * (1.0 - h)) / 2.0;
            assert_relative_eq!(*v, exact, max_relative = 1e-9);
        }
        assert_eq!(carleson_constant(|_z: C| Ok(0.0), 5, &quad).unwrap().value, 0.0);

        let sing = |z: C| Ok((1.0 - z.norm_sqr()).powf(-0.5));
        let c6 = carleson_constant(sing, 6, &carleson_quadrature(6)).unwrap();
        let c9 = carleson_constant(sing, 9, &carleson_quadrature(9)).unwrap();
        // Mass up to radius R is 1 - sqrt(1 - R²), attained at the root square.
        for (c, g) in [(&c6, 6), (&c9, 9)] {
            let r = 1.0 - 0.5f64.powi(g + 1);
            assert_relative_eq!(c.value, 1.0 - (1.0 - r * r).sqrt(), max_relative = 1e-6);
        }
        assert!(c6.value <= c9.value && c9.value < 1.0);
        let emb = carleson_embedding_constant(|_z: C| Ok(1.0), &Net::dyadic(3), &small_quad(0.999)).unwrap();
        assert!(emb.value.is_finite() && emb.value < PI);
    }

    #[test]
    fn bmoa_examples() {
        let quad = small_quad(0.99);
        let net = Net::dyadic(3);
        assert_eq!(bmoa_seminorm(expr_evaluator(&ev("0")), &net, &quad).unwrap().value, 0.0);
        let id = bmoa_seminorm(expr_evaluator(&ev("1")), &net, &quad).unwrap();
        assert!(id.value > 0.0 && id.value < 2.0);
    }

    #[test]
    fn weighted_area_examples() {
        let quad = PolarQuadrature::with_rule(1.0 - 1e-12, 24, |_| 64);
        assert_eq!(weighted_area_integral(expr_evaluator(&ev("0")), 1.0, 1.0, &quad).unwrap(), 0.0);
        assert_relative_eq!(
            weighted_area_integral(expr_evaluator(&ev("1")), 1.0, 1.0, &quad).unwrap(),
            FRAC_PI_2,
            max_relative = 1e-10
        );
        let rep = weighted_area_trend(expr_evaluator(&ev("1")), 1.0, 1.0).unwrap();
        assert_eq!(rep.refinement_trend.len(), 3);
        assert!(rep.refinement_trend.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(rep.name, "weighted_area_integral");
    }
}
