//! Dyadic stopping-time construction on `|w'|`, the non-tangential maximal
//! function of `1/|w'|` and weak-`L^p` fits of its distribution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rho_p, stolz_half_width, CarlesonSquare};
use crate::ode::Which;
use crate::schwarzian::QuotientMap;
use crate::scalar::{cis, Cx, Real};

pub const DEFAULT_C0: f64 = 2.0;
pub const DEFAULT_EPS0: f64 = 0.125;
pub const DEFAULT_STOP_GENERATION: u32 = 20;

/// A modulus `z ↦ |w'(z)|` sampled at top-half centers.
pub trait ModulusField<T: Real>: Sync {
    fn modulus(&self, z: Cx<T>) -> Result<T>;
}

impl<T: Real, F> ModulusField<T> for F
where
    F: Fn(Cx<T>) -> Result<T> + Sync,
{
    fn modulus(&self, z: Cx<T>) -> Result<T> {
        self(z)
    }
}

/// `|w'| = |f2|^{-2}` for a quotient map; zeros of `f2` give `+∞`.
pub fn quotient_modulus<T: Real>(q: &QuotientMap<T>) -> impl Fn(Cx<T>) -> Result<T> + Sync + '_ {
    move |z| {
        let v = q.basis.value(Which::F2, z)?;
        Ok(T::one() / v.norm_sqr())
    }
}

/// Deepest generation whose top-half centers `(1 - 1.5·2^{-n}) e^{iθ}` lie in `|z| ≤ r`.
pub fn generation_floor<T: Real>(r: T) -> u32 {
    let mut n = 1;
    while n < 62 && T::one() - T::lit(1.5 * 0.5f64.powi(n as i32 + 1)) <= r {
        n += 1;
    }
    n
}

/// Selected square with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingSquare<T> {
    pub square: CarlesonSquare,
    /// `|w'(z_Q)|`.
    pub modulus: T,
    pub parent: Option<CarlesonSquare>,
    /// `Σ ℓ(S) ≤ ℓ(Q)/2` over the children selected in the next generation;
    /// `None` until that generation is built.
    pub decay_pass: Option<bool>,
    /// Total length of the next-generation squares inside this one.
    pub children_length: Option<T>,
    /// Some descent from this square reached the generation floor unresolved.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generation<T> {
    pub squares: Vec<StoppingSquare<T>>,
    pub length_sum: T,
    /// Length of floor squares whose stopping test never fired.
    pub unresolved_length: T,
    pub unresolved_count: u64,
}

/// Nested generations `G_0, G_1, …` for constants `C0 > 1`, `0 < ε0 < min{1/4, 1/C0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingForest<T> {
    pub c0: T,
    pub eps0: T,
    /// `C0^{1 + 1/ε0}`.
    pub l: T,
    /// `C0 / ε0`.
    pub m: T,
    pub max_generation: u32,
    pub generations: Vec<Generation<T>>,
}

/// One line of a forest dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestRecord {
    pub generation: usize,
    pub square: CarlesonSquare,
    pub modulus: f64,
    pub parent: Option<CarlesonSquare>,
    pub decay_pass: Option<bool>,
}

/// Selected squares below a root plus unresolved floor mass.
struct Descent<T> {
    found: Vec<(CarlesonSquare, T)>,
    unresolved_count: u64,
    unresolved_length: T,
}

impl<T: Real> Descent<T> {
    fn empty() -> Self {
        Descent { found: Vec::new(), unresolved_count: 0, unresolved_length: T::zero() }
    }

    fn merge(mut self, other: Self) -> Self {
        self.found.extend(other.found);
        self.unresolved_count += other.unresolved_count;
        self.unresolved_length += other.unresolved_length;
        self
    }
}

/// Depth-first search for the maximal squares at or below `q` with `|w'(z_Q)| ≤ threshold`.
fn descend<T: Real, W: ModulusField<T>>(w: &W, q: CarlesonSquare, threshold: T, floor: u32) -> Result<Descent<T>> {
    let v = w.modulus(q.top_half_center()?)?;
    if v <= threshold {
        return Ok(Descent { found: vec![(q, v)], ..Descent::empty() });
    }
    if q.generation >= floor {
        return Ok(Descent { unresolved_count: 1, unresolved_length: q.ell(), ..Descent::empty() });
    }
    let [a, b] = q.children();
    let (ra, rb) = if q.generation < 12 {
        rayon::join(|| descend(w, a, threshold, floor), || descend(w, b, threshold, floor))
    } else {
        (descend(w, a, threshold, floor), descend(w, b, threshold, floor))
    };
    Ok(ra?.merge(rb?))
}

fn validate<T: Real>(c0: T, eps0: T, max_generation: u32) -> Result<()> {
    if !(c0 > T::one()) {
        return Err(Error::InvalidArgument(format!("C0 = {c0} must exceed 1")));
    }
    let cap = T::lit(0.25).min(T::one() / c0);
    if !(eps0 > T::zero() && eps0 < cap) {
        return Err(Error::InvalidArgument(format!("eps0 = {eps0} outside (0, {cap})")));
    }
    if !(2..=62).contains(&max_generation) {
        return Err(Error::InvalidArgument(format!("max generation {max_generation} outside [2, 62]")));
    }
    Ok(())
}

/// Generation 0: maximal squares of generation at least 2 with `|w'(z_Q)| ≤ C0^{-1/ε0}`.
pub fn build_g0<T: Real, W: ModulusField<T>>(wprime: &W, c0: T, eps0: T, max_generation: u32) -> Result<StoppingForest<T>> {
    validate(c0, eps0, max_generation)?;
    let threshold = c0.powf(-T::one() / eps0);
    if !(threshold >= T::min_positive_value()) {
        return Err(Error::Underflow((-eps0.recip() * c0.ln()).as_f64()));
    }
    let [a, b] = CarlesonSquare::root().children();
    let d = descend(wprime, a, threshold, max_generation)?.merge(descend(wprime, b, threshold, max_generation)?);
    let squares = d
        .found
        .into_iter()
        .map(|(square, modulus)| StoppingSquare {
            square,
            modulus,
            parent: None,
            decay_pass: None,
            children_length: None,
            truncated: false,
        })
        .collect();
    let mut forest = StoppingForest {
        c0,
        eps0,
        l: c0.powf(T::one() + T::one() / eps0),
        m: c0 / eps0,
        max_generation,
        generations: Vec::new(),
    };
    forest.generations.push(Generation::new(squares, d.unresolved_count, d.unresolved_length));
    Ok(forest)
}

impl<T: Real> Generation<T> {
    fn new(squares: Vec<StoppingSquare<T>>, unresolved_count: u64, unresolved_length: T) -> Self {
        let lengths: Vec<T> = squares.iter().map(|s| s.square.ell()).collect();
        Generation { length_sum: crate::quadrature::pairwise_sum(&lengths), squares, unresolved_count, unresolved_length }
    }
}

/// Builds generation `n + 1` from generation `n`, which must be the last one built.
pub fn refine_generation<T: Real, W: ModulusField<T>>(forest: &mut StoppingForest<T>, n: usize, wprime: &W) -> Result<()> {
    if n + 1 != forest.generations.len() {
        return Err(Error::InvalidArgument(format!(
            "generation {n} is not the last built ({} present)",
            forest.generations.len()
        )));
    }
    let floor = forest.max_generation;
    let eps0 = forest.eps0;
    let parents = &forest.generations[n].squares;
    let results: Vec<Result<Descent<T>>> = parents
        .par_iter()
        .map(|p| {
            if p.square.generation >= floor {
                return Ok(Descent { unresolved_count: 0, ..Descent::empty() });
            }
            let t = eps0 * p.modulus;
            let [a, b] = p.square.children();
            Ok(descend(wprime, a, t, floor)?.merge(descend(wprime, b, t, floor)?))
        })
        .collect();
    let mut squares = Vec::new();
    let (mut count, mut unresolved) = (0u64, T::zero());
    let mut updated = Vec::with_capacity(parents.len());
    for (p, r) in parents.iter().zip(results) {
        let d = r?;
        let lengths: Vec<T> = d.found.iter().map(|(s, _)| s.ell()).collect();
        let total = crate::quadrature::pairwise_sum(&lengths);
        let mut p = p.clone();
        p.children_length = Some(total);
        p.decay_pass = Some(total <= p.square.ell::<T>() * T::lit(0.5));
        p.truncated = d.unresolved_count > 0 || p.square.generation >= floor;
        count += d.unresolved_count;
        unresolved += d.unresolved_length;
        squares.extend(d.found.into_iter().map(|(square, modulus)| StoppingSquare {
            square,
            modulus,
            parent: Some(p.square),
            decay_pass: None,
            children_length: None,
            truncated: false,
        }));
        updated.push(p);
    }
    forest.generations[n].squares = updated;
    forest.generations.push(Generation::new(squares, count, unresolved));
    Ok(())
}

impl<T: Real> StoppingForest<T> {
    /// `G_0` followed by `generations` refinements.
    pub fn build<W: ModulusField<T>>(wprime: &W, c0: T, eps0: T, max_generation: u32, generations: usize) -> Result<Self> {
        let mut f = build_g0(wprime, c0, eps0, max_generation)?;
        for n in 0..generations {
            refine_generation(&mut f, n, wprime)?;
        }
        Ok(f)
    }

    pub fn length_sums(&self) -> Vec<T> {
        self.generations.iter().map(|g| g.length_sum).collect()
    }

    /// Nesting of every square in exactly one parent of the previous
    /// generation and disjointness within each generation.
    pub fn check_invariants(&self) -> Result<()> {
        for (n, g) in self.generations.iter().enumerate() {
            let mut sorted: Vec<CarlesonSquare> = g.squares.iter().map(|s| s.square).collect();
            sorted.sort_by_key(dyadic_key);
            for w in sorted.windows(2) {
                if w[1].is_within(&w[0]) || w[0].is_within(&w[1]) {
                    return Err(Error::Degenerate(format!("generation {n}: {:?} and {:?} overlap", w[0], w[1])));
                }
            }
            if n == 0 {
                continue;
            }
            let prev = &self.generations[n - 1].squares;
            for s in &g.squares {
                let owners: Vec<&StoppingSquare<T>> =
                    prev.iter().filter(|p| s.square.is_within(&p.square) && s.square != p.square).collect();
                if owners.len() != 1 || Some(owners[0].square) != s.parent {
                    return Err(Error::Degenerate(format!(
                        "generation {n}: {:?} has {} strict ancestors in generation {}",
                        s.square,
                        owners.len(),
                        n - 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// When every square of generations `0..n` passed its decay test, whether
    /// `Σ_{G_n} ℓ ≤ 2^{-n} Σ_{G_0} ℓ`; `None` if some square failed or is unrefined.
    pub fn decay_consequence(&self, n: usize) -> Option<bool> {
        if n >= self.generations.len() {
            return None;
        }
        let all = self.generations[..n].iter().flat_map(|g| &g.squares).all(|s| s.decay_pass == Some(true));
        if !all {
            return None;
        }
        let bound = self.generations[0].length_sum * T::lit(0.5f64.powi(n as i32));
        Some(self.generations[n].length_sum <= bound * (T::one() + T::lit(16.0) * T::epsilon()))
    }

    pub fn records(&self) -> Vec<ForestRecord> {
        self.generations
            .iter()
            .enumerate()
            .flat_map(|(n, g)| {
                g.squares.iter().map(move |s| ForestRecord {
                    generation: n,
                    square: s.square,
                    modulus: s.modulus.as_f64(),
                    parent: s.parent,
                    decay_pass: s.decay_pass,
                })
            })
            .collect()
    }

    /// Forest dump, one JSON object per line.
    pub fn json_lines(&self) -> String {
        let mut out = String::new();
        for r in self.records() {
            out.push_str(&serde_json_line(&r));
            out.push('\n');
        }
        out
    }
}

/// Position of a square on the boundary as the left end of its arc in units
/// of `2^{-62}` turns, then by generation.
fn dyadic_key(s: &CarlesonSquare) -> (u64, u32) {
    (s.index << (62 - s.generation), s.generation)
}

fn serde_json_line(r: &ForestRecord) -> String {
    let sq = |s: &CarlesonSquare| format!("{{\"generation\":{},\"index\":{}}}", s.generation, s.index);
    format!(
        "{{\"generation\":{},\"square\":{},\"modulus\":{},\"parent\":{},\"decay_pass\":{}}}",
        r.generation,
        sq(&r.square),
        json_number(r.modulus),
        r.parent.as_ref().map_or("null".to_string(), sq),
        r.decay_pass.map_or("null".to_string(), |b| b.to_string())
    )
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        "null".into()
    }
}

/// Smallest pseudo-hyperbolic distance from the nine-point stencil of `T(Q)` to `points`.
pub fn top_half_distance<T: Real>(q: &CarlesonSquare, points: &[Cx<T>]) -> Result<T> {
    let stencil = q.top_half_stencil::<T>()?;
    Ok(stencil
        .iter()
        .flat_map(|z| points.iter().map(move |p| rho_p(*z, *p)))
        .fold(T::one(), |a, b| a.min(b)))
}

/// `1 / log2(C0/ε0)`.
pub fn predicted_p<T: Real>(c0: T, eps0: T) -> Result<T> {
    if !(c0 > T::one() && eps0 > T::zero() && eps0 < T::one()) {
        return Err(Error::InvalidArgument(format!("C0 = {c0}, eps0 = {eps0}")));
    }
    Ok(T::one() / (c0 / eps0).log2())
}

/// Samples of `θ ↦ sup_{Γ_α(e^{iθ}), |z| ≤ r_max} 1/|w'(z)|` on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalSamples<T> {
    pub thetas: Vec<T>,
    pub values: Vec<T>,
    pub alpha: T,
    pub r_max: T,
    pub radii: Vec<T>,
}

/// Radii `1 - 2^{-k/2}` below `r_max`, then `r_max`.
fn stolz_radii<T: Real>(r_max: T) -> Vec<T> {
    let mut radii = Vec::new();
    for k in 0.. {
        let r = T::one() - T::lit(0.5f64.powf(k as f64 / 2.0));
        if r >= r_max {
            break;
        }
        radii.push(r);
    }
    radii.push(r_max);
    radii
}

/// Non-tangential maximal function of `1/|w'|` over a quasi-uniform sample of
/// each Stolz angle: the radial point at every sampled radius plus all ring
/// nodes inside the angular window, with ring spacing about `(1-r)/8`.
pub fn nontangential_max_inv<T: Real, W: ModulusField<T>>(wprime: &W, alpha: T, n_theta: usize, r_max: T) -> Result<MaximalSamples<T>> {
    if !(alpha > T::one()) {
        return Err(Error::InvalidArgument(format!("aperture {alpha} must exceed 1")));
    }
    if !(r_max > T::zero() && r_max < T::one()) || n_theta == 0 {
        return Err(Error::InvalidArgument(format!("r_max = {r_max}, {n_theta} angles")));
    }
    let radii = stolz_radii(r_max);
    let thetas: Vec<T> = (0..n_theta).map(|j| T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(n_theta)).collect();
    let mut values = vec![T::zero(); n_theta];
    let inv = |z: Cx<T>| -> Result<T> { Ok(T::one() / wprime.modulus(z)?) };
    for &r in &radii {
        let radial: Vec<T> = thetas.par_iter().map(|&t| inv(cis(t) * r)).collect::<Result<_>>()?;
        let hw = stolz_half_width(alpha, r);
        let target = (T::lit(16.0) * T::PI() / (T::one() - r)).to_usize().unwrap_or(usize::MAX);
        let n_ring = target.max(64).checked_next_power_of_two().ok_or_else(|| Error::InvalidArgument("ring too fine".into()))?;
        let step = T::TAU() / T::from_usize_lossy(n_ring);
        let ring: Vec<T> = (0..n_ring)
            .into_par_iter()
            .map(|m| inv(cis(step * T::from_usize_lossy(m)) * r))
            .collect::<Result<_>>()?;
        let full = hw >= T::PI();
        let ring_max = ring.iter().fold(T::zero(), |a, &b| a.max(b));
        for (j, &t) in thetas.iter().enumerate() {
            let mut best = radial[j];
            if full {
                best = best.max(ring_max);
            } else {
                let lo = ((t - hw) / step).ceil().to_i64().unwrap_or(0);
                let hi = ((t + hw) / step).floor().to_i64().unwrap_or(-1);
                for m in lo..=hi {
                    best = best.max(ring[m.rem_euclid(n_ring as i64) as usize]);
                }
            }
            values[j] = values[j].max(best);
        }
    }
    Ok(MaximalSamples { thetas, values, alpha, r_max, radii })
}

/// Least-squares fit of `|{θ : F(θ) > λ}| ≈ C λ^{-p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakLpFit<T> {
    pub p: T,
    pub constant: T,
    /// `(λ, |{F > λ}|)` over the fitted range, including zero-measure points.
    pub distribution: Vec<(T, T)>,
    pub lambda_range: (T, T),
    pub points_used: usize,
}

pub const MIN_FIT_SAMPLES: usize = 256;
pub const LAMBDA_PER_DECADE: usize = 64;

/// Fits the distribution of samples taken on a uniform grid of the circle,
/// over the top two decades of the sample range (or the whole range if narrower).
pub fn weak_lp_fit<T: Real>(samples: &[T]) -> Result<WeakLpFit<T>> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "{} samples, at least {MIN_FIT_SAMPLES} needed",
            samples.len()
        )));
    }
    if samples.iter().any(|s| !s.is_finite() || *s < T::zero()) {
        return Err(Error::InvalidArgument("samples must be finite and nonnegative".into()));
    }
    let hi = samples.iter().fold(T::zero(), |a, &b| a.max(b));
    let min = samples.iter().fold(T::infinity(), |a, &b| a.min(b));
    let lo = (hi / T::lit(100.0)).max(min);
    if !(hi > T::zero()) || hi - lo <= T::lit(1e-9) * hi {
        return Err(Error::Degenerate("samples are constant".into()));
    }
    let decades = (hi / lo).log10();
    let n_lambda = ((decades * T::from_usize_lossy(LAMBDA_PER_DECADE)).ceil().to_usize().unwrap_or(1)).max(1);
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = T::from_usize_lossy(samples.len());
    let measure = |lam: T| {
        let above = sorted.len() - sorted.partition_point(|&s| s <= lam);
        T::TAU() * T::from_usize_lossy(above) / n
    };
    let distribution: Vec<(T, T)> = (0..=n_lambda)
        .map(|k| {
            let lam = lo * (hi / lo).powf(T::from_usize_lossy(k) / T::from_usize_lossy(n_lambda));
            (lam, measure(lam))
        })
        .collect();
    let pts: Vec<(T, T)> = distribution.iter().filter(|(_, m)| *m > T::zero()).map(|&(l, m)| (l.ln(), m.ln())).collect();
    if pts.len() < 2 {
        return Err(Error::Degenerate("fewer than two levels with positive measure".into()));
    }
    let k = T::from_usize_lossy(pts.len());
    let (mx, my) = pts.iter().fold((T::zero(), T::zero()), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (mx / k, my / k);
    let (sxy, sxx) = pts
        .iter()
        .fold((T::zero(), T::zero()), |(a, b), &(x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    if sxx == T::zero() {
        return Err(Error::Degenerate("levels coincide".into()));
    }
    let slope = sxy / sxx;
    Ok(WeakLpFit {
        p: -slope,
        constant: (my - slope * mx).exp(),
        distribution,
        lambda_range: (lo, hi),
        points_used: pts.len(),
    })
}
