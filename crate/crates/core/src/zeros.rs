//! Zeros of analytic functions in discs, and separation quantities of point sequences.
//!
//! Zeros are counted with the argument principle on `|z| = r` and localized
//! by subdividing polar cells (a central disc and annular sectors) with
//! winding-number tests, then polished with Newton's method.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::adaptive_circle;
use crate::geometry::rho_p;
use crate::scalar::{cis, to_pair, Cx, Real};

/// Split fractions tried in turn when a cut passes too close to a zero.
const SPLITS: [f64; 5] = [0.5, 0.45, 0.55, 0.4, 0.6];
const MAX_DEPTH: u32 = 60;
/// Capture-radius perturbation step.
const R_STEP: f64 = 1e-4;
const NEWTON_TOL: f64 = 1e-12;

/// Zeros in `|z| < capture_radius`, sorted by `(|z|, arg z)` with `arg ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSequence<T> {
    pub points: Vec<Cx<T>>,
    pub multiplicities: Vec<usize>,
    pub capture_radius: T,
}

impl<T: Real> ZeroSequence<T> {
    pub fn from_points(points: Vec<Cx<T>>, capture_radius: T) -> Self {
        let multiplicities = vec![1; points.len()];
        ZeroSequence { points, multiplicities, capture_radius }
    }

    /// Zeros counted with multiplicity.
    pub fn count(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Cx<T>> {
        self.points
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&z, &m)| std::iter::repeat_n(z, m))
            .collect()
    }

    /// `re,im,multiplicity` lines under a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im,multiplicity\n");
        for (z, m) in self.points.iter().zip(&self.multiplicities) {
            s.push_str(&format!("{:.15e},{:.15e},{}\n", z.re.as_f64(), z.im.as_f64(), m));
        }
        s
    }
}

fn arg_key<T: Real>(z: Cx<T>) -> (f64, f64) {
    let mut a = z.arg().as_f64();
    if a < 0.0 {
        a += std::f64::consts::TAU;
    }
    (z.norm().as_f64(), a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Cell<T> {
    Disc(T),
    Sector { r0: T, r1: T, t0: T, t1: T },
}

impl<T: Real> Cell<T> {
    fn center(&self) -> Cx<T> {
        match *self {
            Cell::Disc(_) => Cx::zero(),
            Cell::Sector { r0, r1, t0, t1 } => cis((t0 + t1) * T::lit(0.5)) * ((r0 + r1) * T::lit(0.5)),
        }
    }

    fn diameter(&self) -> T {
        match *self {
            Cell::Disc(r) => r * T::lit(2.0),
            Cell::Sector { r0, r1, t0, t1 } => (r1 - r0) + r1 * (t1 - t0),
        }
    }

    fn contains(&self, z: Cx<T>, slack: T) -> bool {
        match *self {
            Cell::Disc(r) => z.norm() <= r + slack,
            Cell::Sector { r0, r1, t0, t1 } => {
                let r = z.norm();
                if r < r0 - slack || r > r1 + slack {
                    return false;
                }
                let mut t = z.arg();
                if t < t0 - T::lit(1e-12) {
                    t += T::TAU();
                }
                let ts = slack / r.max(T::lit(1e-300));
                t >= t0 - ts && t <= t1 + ts
            }
        }
    }

    fn describe(&self) -> (f64, f64, f64, f64) {
        match *self {
            Cell::Disc(r) => (0.0, r.as_f64(), 0.0, std::f64::consts::TAU),
            Cell::Sector { r0, r1, t0, t1 } => (r0.as_f64(), r1.as_f64(), t0.as_f64(), t1.as_f64()),
        }
    }

    fn split(&self, frac: T) -> Vec<Cell<T>> {
        match *self {
            Cell::Disc(r) => {
                let rc = r * frac;
                let q = T::FRAC_PI_2();
                // Keep the cuts off the coordinate axes, where real-symmetric zeros sit.
                let off = (frac - T::lit(0.5)) * T::lit(0.7) + T::lit(0.1234);
                let mut out = vec![Cell::Disc(rc)];
                for j in 0..4 {
                    let t0 = q * (T::from_usize_lossy(j) + off);
                    out.push(Cell::Sector { r0: rc, r1: r, t0, t1: t0 + q });
                }
                out
            }
            Cell::Sector { r0, r1, t0, t1 } => {
                let rm = r0 + (r1 - r0) * frac;
                let tm = t0 + (t1 - t0) * frac;
                vec![
                    Cell::Sector { r0, r1: rm, t0, t1: tm },
                    Cell::Sector { r0, r1: rm, t0: tm, t1 },
                    Cell::Sector { r0: rm, r1, t0, t1: tm },
                    Cell::Sector { r0: rm, r1, t0: tm, t1 },
                ]
            }
        }
    }
}

/// Winding number of `f` around a cell boundary, or `None` if the
/// quadrature of `f'/f` does not settle on an integer.
fn winding<T, F>(f: &F, cell: &Cell<T>) -> Result<Option<i64>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<(Cx<T>, Cx<T>)> + Sync,
{
    let mut prev: Option<i64> = None;
    let mut n = 64usize;
    while n <= 1 << 15 {
        let est = match *cell {
            Cell::Disc(r) => circle_log_derivative(f, r, n)?,
            Cell::Sector { r0, r1, t0, t1 } => sector_log_derivative(f, r0, r1, t0, t1, n)?,
        };
        let Some(est) = est else { return Ok(None) };
        let k = est.round();
        let near = (est - k).abs() < 0.25;
        if near && prev == Some(k as i64) {
            return Ok(Some(k as i64));
        }
        prev = if near { Some(k as i64) } else { None };
        n *= 2;
    }
    Ok(None)
}

/// `(1/2πi) ∮ f'/f dz` on `|z| = r` by the periodic trapezoid rule.
fn circle_log_derivative<T, F>(f: &F, r: T, n: usize) -> Result<Option<f64>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<(Cx<T>, Cx<T>)> + Sync,
{
    let vals: Vec<Option<f64>> = (0..n)
        .into_par_iter()
        .map(|m| {
            let z = cis(T::TAU() * T::from_usize_lossy(m) / T::from_usize_lossy(n)) * r;
            let (v, d) = f(z)?;
            if v.is_zero() {
                return Ok(None);
            }
            Ok(Some((z * d / v).re.as_f64()))
        })
        .collect::<Result<_>>()?;
    let mut s = 0.0;
    for v in vals {
        match v {
            Some(x) if x.is_finite() => s += x,
            _ => return Ok(None),
        }
    }
    Ok(Some(s / n as f64))
}

/// Same integral over the boundary of a polar sector, composite trapezoid on each edge.
fn sector_log_derivative<T, F>(f: &F, r0: T, r1: T, t0: T, t1: T, n: usize) -> Result<Option<f64>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<(Cx<T>, Cx<T>)> + Sync,
{
    // Edge parametrizations z(s), z'(s) for s in [0, 1], oriented counterclockwise.
    let dt = t1 - t0;
    let dr = r1 - r0;
    let i = Cx::new(T::zero(), T::one());
    let edges: [Box<dyn Fn(T) -> (Cx<T>, Cx<T>) + Sync>; 4] = [
        Box::new(move |s| (cis(t0) * (r0 + dr * s), cis(t0) * dr)),
        Box::new(move |s| {
            let z = cis(t0 + dt * s) * r1;
            (z, z * i * dt)
        }),
        Box::new(move |s| (cis(t1) * (r1 - dr * s), -cis(t1) * dr)),
        Box::new(move |s| {
            let z = cis(t1 - dt * s) * r0;
            (z, -z * i * dt)
        }),
    ];
    let mut total = Cx::<f64>::new(0.0, 0.0);
    for (e, edge) in edges.iter().enumerate() {
        if e == 3 && r0 == T::zero() {
            continue;
        }
        let vals: Vec<Option<Cx<f64>>> = (0..=n)
            .into_par_iter()
            .map(|m| {
                let s = T::from_usize_lossy(m) / T::from_usize_lossy(n);
                let (z, dz) = edge(s);
                let (v, d) = f(z)?;
                if v.is_zero() {
                    return Ok(None);
                }
                let w = d / v * dz;
                let wt = if m == 0 || m == n { 0.5 } else { 1.0 };
                Ok(Some(Cx::new(w.re.as_f64() * wt, w.im.as_f64() * wt)))
            })
            .collect::<Result<_>>()?;
        for v in vals {
            match v {
                Some(x) if x.re.is_finite() && x.im.is_finite() => total += x / n as f64,
                _ => return Ok(None),
            }
        }
    }
    Ok(Some(total.im / std::f64::consts::TAU))
}

/// `NEWTON_TOL`, widened for scalars too coarse to reach it.
fn newton_tol<T: Real>() -> T {
    T::lit(NEWTON_TOL).max(T::epsilon() * T::lit(4e3))
}

fn newton<T, F>(f: &F, z0: Cx<T>) -> Result<Option<Cx<T>>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<(Cx<T>, Cx<T>)> + Sync,
{
    let mut z = z0;
    for _ in 0..80 {
        let (v, d) = f(z)?;
        if v.is_zero() {
            return Ok(Some(z));
        }
        if d.is_zero() {
            return Ok(None);
        }
        let step = v / d;
        z -= step;
        if !(z.norm() < T::one()) {
            return Ok(None);
        }
        if step.norm() <= newton_tol::<T>() * T::lit(1e-3) {
            return Ok(Some(z));
        }
    }
    // Accept a stalled iteration only if its last step is below tolerance.
    let (v, d) = f(z)?;
    if !d.is_zero() && (v / d).norm() <= newton_tol::<T>() {
        Ok(Some(z))
    } else {
        Ok(None)
    }
}

fn locate<T, F>(f: &F, cell: Cell<T>, count: i64, depth: u32, r: T) -> Result<Vec<(Cx<T>, usize)>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<(Cx<T>, Cx<T>)> + Sync,
{
    if count == 0 {
        return Ok(Vec::new());
    }
    if count < 0 {
        return Err(mismatch(cell, count, "negative winding number"));
    }
    let slack = cell.diameter() * T::lit(1e-9);
    if count == 1 {
        if let Some(z) = newton(f, cell.center())? {
            if cell.contains(z, slack) && z.norm() < r {
                return Ok(vec![(z, 1)]);
            }
        }
    }
    if depth >= MAX_DEPTH || cell.diameter() < T::lit(1e-10) {
        if let Some(z) = newton(f, cell.center())? {
            if cell.contains(z, cell.diameter()) {
                return Ok(vec![(z, count as usize)]);
            }
        }
        return Err(mismatch(cell, count, "subdivision depth exhausted"));
    }
    for frac in SPLITS {
        let children = cell.split(T::lit(frac));
        let counts: Vec<Option<i64>> =
            children.par_iter().map(|c| winding(f, c)).collect::<Result<_>>()?;
        if counts.iter().any(|c| c.is_none()) {
            continue;
        }
        let counts: Vec<i64> = counts.into_iter().map(|c| c.unwrap()).collect();
        if counts.iter().sum::<i64>() != count {
            continue;
        }
        let found: Vec<Vec<(Cx<T>, usize)>> = children
            .par_iter()
            .zip(counts.par_iter())
            .map(|(c, &k)| locate(f, *c, k, depth + 1, r))
            .collect::<Result<_>>()?;
        return Ok(found.into_iter().flatten().collect());
    }
    Err(mismatch(cell, count, "no split gave consistent winding numbers"))
}

fn mismatch<T: Real>(cell: Cell<T>, count: i64, detail: &str) -> Error {
    let (r0, r1, t0, t1) = cell.describe();
    Error::WindingMismatch { r0, r1, t0, t1, detail: format!("{detail} (expected {count})") }
}

/// All zeros of `f` in `|z| < r`, from an evaluator of `(f, f')`.
///
/// If the circle `|z| = r` passes too close to a zero (the count does not
/// settle or the cells below it disagree), the capture radius is reduced in
/// steps of `1e-4`.
pub fn find_zeros<T, F>(f: F, r: T) -> Result<ZeroSequence<T>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<(Cx<T>, Cx<T>)> + Sync,
{
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::InvalidArgument(format!("radius {r} outside (0, 1)")));
    }
    let mut cap = r;
    let mut settled = None;
    let mut last_err = None;
    for _ in 0..10 {
        if let Some(n) = winding(&f, &Cell::Disc(cap))? {
            match locate(&f, Cell::Disc(cap), n, 0, cap) {
                Ok(found) => {
                    settled = Some((n, found));
                    break;
                }
                Err(e @ Error::WindingMismatch { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        cap -= T::lit(R_STEP);
    }
    let Some((total, mut found)) = settled else {
        return Err(last_err.unwrap_or(Error::WindingMismatch {
            r0: 0.0,
            r1: r.as_f64(),
            t0: 0.0,
            t1: std::f64::consts::TAU,
            detail: "argument principle on the capture circle did not settle".into(),
        }));
    };
    found.sort_by(|a, b| arg_key(a.0).partial_cmp(&arg_key(b.0)).unwrap_or(std::cmp::Ordering::Equal));
    let located: usize = found.iter().map(|p| p.1).sum();
    if located as i64 != total {
        return Err(Error::WindingMismatch {
            r0: 0.0,
            r1: cap.as_f64(),
            t0: 0.0,
            t1: std::f64::consts::TAU,
            detail: format!("located {located} zeros, argument principle counts {total}"),
        });
    }
    for w in found.windows(2) {
        if (w[0].0 - w[1].0).norm() < T::lit(1e-10) {
            return Err(Error::Degenerate(format!("zero at {:?} found twice", to_pair(w[0].0))));
        }
    }
    Ok(ZeroSequence {
        points: found.iter().map(|p| p.0).collect(),
        multiplicities: found.iter().map(|p| p.1).collect(),
        capture_radius: cap,
    })
}

/// `Σ (1 - |z_n|)`.
pub fn blaschke_sum<T: Real>(zs: &[Cx<T>]) -> T {
    zs.iter().map(|z| T::one() - z.norm()).sum()
}

/// `sup_k Σ_{n≠k} (1 - ρ(z_n, z_k))`.
pub fn transferred_blaschke_sup<T: Real>(zs: &[Cx<T>]) -> T {
    sup_over_k(zs, |d| T::one() - d)
}

/// `sup_k Σ_{n≠k} -log ρ(z_n, z_k)`.
pub fn log_product_sup<T: Real>(zs: &[Cx<T>]) -> T {
    sup_over_k(zs, |d| -d.ln())
}

fn sup_over_k<T: Real>(zs: &[Cx<T>], term: impl Fn(T) -> T + Sync) -> T {
    let per_k: Vec<T> = (0..zs.len())
        .into_par_iter()
        .map(|k| {
            (0..zs.len()).filter(|&n| n != k).map(|n| term(rho_p(zs[n], zs[k]))).sum()
        })
        .collect();
    per_k.into_iter().fold(T::zero(), T::max)
}

fn check_distinct<T: Real>(zs: &[Cx<T>]) -> Result<()> {
    for i in 0..zs.len() {
        for j in i + 1..zs.len() {
            if zs[i] == zs[j] {
                return Err(Error::DuplicatePoints(i, j));
            }
        }
    }
    Ok(())
}

/// `inf_k Π_{n≠k} ρ(z_n, z_k)`; 1 for fewer than two points.
pub fn uniform_separation<T: Real>(zs: &[Cx<T>]) -> Result<T> {
    check_distinct(zs)?;
    let per_k: Vec<T> = (0..zs.len())
        .into_par_iter()
        .map(|k| {
            (0..zs.len()).filter(|&n| n != k).fold(T::one(), |acc, n| acc * rho_p(zs[n], zs[k]))
        })
        .collect();
    Ok(per_k.into_iter().fold(T::one(), T::min))
}

/// `min_{n≠k} ρ(z_n, z_k)`; 1 for fewer than two points.
pub fn separation_delta<T: Real>(zs: &[Cx<T>]) -> Result<T> {
    check_distinct(zs)?;
    let mut d = T::one();
    for i in 0..zs.len() {
        for j in i + 1..zs.len() {
            d = d.min(rho_p(zs[i], zs[j]));
        }
    }
    Ok(d)
}

/// Both sides of the circle-mean identity for `z ↦ g(z)/z` with `g(0) = 0`, `g'(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JensenReport<T> {
    pub lhs: T,
    pub rhs: T,
    pub gap: T,
}

impl<T: Real> JensenReport<T> {
    pub fn passes(&self) -> bool {
        self.gap.abs() <= T::lit(1e-6)
    }
}

/// `(1/2π)∫ log|g(re^{iθ})| dθ` against `Σ_{0<|ζ|<r} log(r/|ζ|) + log r`.
pub fn jensen_check<T, F>(g: F, zeros: &[Cx<T>], r: T) -> Result<JensenReport<T>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<Cx<T>> + Sync,
{
    let lhs = adaptive_circle(r, 256, T::lit(1e-12), |z| {
        let v = g(z)?;
        if v.is_zero() {
            return Err(Error::Domain { z: to_pair(z), what: "zero on the integration circle" });
        }
        Ok(v.norm().ln())
    })?;
    let rhs = zeros
        .iter()
        .filter(|z| z.norm() > T::zero() && z.norm() < r)
        .map(|z| (r / z.norm()).ln())
        .sum::<T>()
        + r.ln();
    Ok(JensenReport { lhs, rhs, gap: lhs - rhs })
}

/// Located `a`-points and their separation constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport<T> {
    pub points: ZeroSequence<T>,
    pub uniform_separation: T,
    pub delta: T,
}

/// Zeros of `(W - a, W')` in `|z| < r`, then their separation constants.
pub fn a_point_separation<T, F>(w: F, a: Cx<T>, r: T) -> Result<SeparationReport<T>>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<(Cx<T>, Cx<T>)> + Sync,
{
    let points = find_zeros(|z| w(z).map(|(v, d)| (v - a, d)), r)?;
    separation_report(points)
}

/// Separation constants of an already located sequence.
pub fn separation_report<T: Real>(points: ZeroSequence<T>) -> Result<SeparationReport<T>> {
    let pts = points.expanded();
    Ok(SeparationReport { uniform_separation: uniform_separation(&pts)?, delta: separation_delta(&pts)?, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::geometry::phi;
    use approx::assert_relative_eq;
    use num_complex::Complex;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn jet_of(s: &str) -> impl Fn(C) -> Result<(C, C)> + Sync {
        let e = parse_expr::<f64>(s).unwrap();
        move |z| {
            let j = e.eval_jet(z, 1)?;
            Ok((j[0], j[1]))
        }
    }

    #[test]
    fn find_zeros_examples() {
        let z = find_zeros(jet_of("z"), 0.5).unwrap();
        assert_eq!(z.points.len(), 1);
        assert!(z.points[0].norm() < 1e-12);
        assert!(find_zeros(jet_of("exp(z)"), 0.9).unwrap().is_empty());

        let s = find_zeros(jet_of("sin(10*z)/10"), 0.95).unwrap();
        assert_eq!(s.count(), 7);
        let mut want: Vec<f64> = (-3..=3).map(|m| m as f64 * std::f64::consts::PI / 10.0).collect();
        want.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap().then(b.partial_cmp(a).unwrap()));
        for (got, w) in s.points.iter().zip(&want) {
            assert!((got - C::new(*w, 0.0)).norm() < 1e-12, "{got} {w}");
        }
        assert!(s.to_csv().lines().count() == 8);
    }

    #[test]
    fn finds_clustered_and_multiple_zeros() {
        let s = find_zeros(jet_of("(z-0.3)*(z-0.3001)*(z+0.5*i)^2"), 0.9).unwrap();
        assert_eq!(s.count(), 4);
        assert_eq!(s.points.len(), 3);
        let m: Vec<usize> = s.multiplicities.clone();
        assert_eq!(m, vec![1, 1, 2]);
    }

    #[test]
    fn zero_on_circle_shrinks_capture_radius() {
        let s = find_zeros(jet_of("z-0.5"), 0.5).unwrap();
        assert!(s.capture_radius < 0.5 && s.is_empty());
    }

    #[test]
    fn sum_examples() {
        assert_eq!(blaschke_sum::<f64>(&[]), 0.0);
        let two = [C::new(0.0, 0.0), C::new(0.5, 0.0)];
        assert_relative_eq!(blaschke_sum(&two), 1.5);
        assert_relative_eq!(transferred_blaschke_sup(&two), 0.5);
        let ring: Vec<C> = (0..8).map(|j| C::from_polar(0.9, std::f64::consts::PI * j as f64 / 4.0)).collect();
        assert_relative_eq!(blaschke_sum(&ring), 0.8, max_relative = 1e-14);
        let mut brute: f64 = 0.0;
        for k in 0..8 {
            let mut s = 0.0;
            for n in 0..8 {
                if n != k {
                    let d = (ring[n] - ring[k]).norm() / (C::new(1.0, 0.0) - ring[n].conj() * ring[k]).norm();
                    s += 1.0 - d;
                }
            }
            brute = brute.max(s);
        }
        assert_relative_eq!(transferred_blaschke_sup(&ring), brute, max_relative = 1e-14);
    }

    #[test]
    fn separation_examples() {
        let one = [C::new(0.2, 0.1)];
        assert_eq!(uniform_separation(&one).unwrap(), 1.0);
        assert_eq!(separation_delta(&one).unwrap(), 1.0);
        let two = [C::new(0.0, 0.0), C::new(0.5, 0.0)];
        assert_relative_eq!(uniform_separation(&two).unwrap(), 0.5);
        assert_relative_eq!(separation_delta(&two).unwrap(), 0.5);
        let three = [C::new(0.0, 0.0), C::new(0.5, 0.0), C::new(-0.5, 0.0)];
        assert_relative_eq!(separation_delta(&three).unwrap(), 0.5);
        assert_relative_eq!(uniform_separation(&three).unwrap(), 0.25, max_relative = 1e-14);
        assert!(matches!(uniform_separation(&[two[1], two[1]]), Err(Error::DuplicatePoints(0, 1))));
    }

    #[test]
    fn jensen_examples() {
        let z = parse_expr::<f64>("z").unwrap();
        let rep = jensen_check(|w| z.eval(w), &[], 0.9).unwrap();
        assert!(rep.gap.abs() < 1e-12);
        assert_relative_eq!(rep.rhs, 0.9f64.ln());
        let g = parse_expr::<f64>("z*(0.5-z)*2").unwrap();
        let rep = jensen_check(|w| g.eval(w), &[C::new(0.5, 0.0)], 0.9).unwrap();
        assert_relative_eq!(rep.rhs, 1.62f64.ln(), max_relative = 1e-14);
        assert!(rep.gap.abs() < 1e-8);
        let s = parse_expr::<f64>("sin(10*z)/10").unwrap();
        let zs = find_zeros(jet_of("sin(10*z)/10"), 0.95).unwrap();
        let rep = jensen_check(|w| s.eval(w), &zs.points, 0.95).unwrap();
        assert!(rep.passes(), "{rep:?}");
        assert!(jensen_check(|w| g.eval(w), &[], 0.5).is_err());
    }

    #[test]
    fn a_point_examples() {
        let rep = a_point_separation(jet_of("z"), C::new(0.0, 0.0), 0.9).unwrap();
        assert_eq!(rep.points.count(), 1);
        assert_eq!(rep.uniform_separation, 1.0);
        let none = a_point_separation(jet_of("z"), C::new(3.0, 0.0), 0.9).unwrap();
        assert!(none.points.is_empty());
        // w = tan for A = 1; a = 1 gives sin z - cos z = 0.
        let rep = a_point_separation(jet_of("sin(z)/cos(z)"), C::new(1.0, 0.0), 0.9).unwrap();
        assert_eq!(rep.points.count(), 1);
        assert!((rep.points.points[0] - C::new(std::f64::consts::FRAC_PI_4, 0.0)).norm() < 1e-12);
    }

    fn sequence() -> impl Strategy<Value = Vec<C>> {
        prop::collection::vec((0.0f64..0.95, 0.0f64..std::f64::consts::TAU), 2..8)
            .prop_map(|v| v.into_iter().map(|(r, t)| C::from_polar(r, t)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn separation_is_mobius_invariant(zs in sequence(), ar in 0.0f64..0.9, at in 0.0f64..std::f64::consts::TAU) {
            let a = C::from_polar(ar, at);
            let moved: Vec<C> = zs.iter().map(|&z| phi(a, z)).collect();
            let (u0, u1) = (uniform_separation(&zs).unwrap(), uniform_separation(&moved).unwrap());
            prop_assert!((u0 - u1).abs() <= 1e-9);
        }

        #[test]
        fn log_products_are_dominated(zs in sequence()) {
            let delta = separation_delta(&zs).unwrap();
            prop_assume!(delta > 1e-6);
            let lhs = log_product_sup(&zs);
            prop_assert!(lhs <= transferred_blaschke_sup(&zs) / delta + 1e-9);
        }
    }
}
