//! Taylor-recurrence solver for `f'' + A f = 0` with cached analytic continuation.
//!
//! A [`SolutionBasis`] answers point queries by walking a fixed tree of polar
//! cells from the origin. Each cell stores expansions of both solutions about
//! its center; a missing cell is built from its parent by stepping along the
//! segment between their centers, each step half the local trust radius.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::{ExprAst, Node};
use crate::geometry::{phi, phi_prime, phi_second};
use crate::scalar::{to_pair, Cx, Real};
use crate::series::{default_tol, estimate_trust, PowerSeries, DEFAULT_DEGREE, MAX_DEGREE, SAFETY};

/// Continuation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    /// Queries beyond this modulus are rejected.
    pub r_max: T,
    pub degree: usize,
    pub max_degree: usize,
    /// Relative truncation tolerance for trust radii.
    pub tol: T,
    /// Largest step ever taken, regardless of trust.
    pub max_step: T,
    /// Quadtree depth limit below a polar cell.
    pub max_subdepth: u8,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        SolverConfig {
            r_max: T::lit(0.999),
            degree: DEFAULT_DEGREE,
            max_degree: MAX_DEGREE,
            tol: default_tol(),
            max_step: T::lit(0.5),
            max_subdepth: 24,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn with_r_max(mut self, r_max: T) -> Self {
        self.r_max = r_max;
        self
    }
}

/// Series of the solution with `f(z0) = f0`, `f'(z0) = df0`, via
/// `c_{n+2} = -Σ_{k≤n} a_k c_{n-k} / ((n+2)(n+1))`.
pub fn solve_ivp<T: Real>(
    a: &ExprAst<T>,
    z0: Cx<T>,
    f0: Cx<T>,
    df0: Cx<T>,
    degree: usize,
) -> Result<PowerSeries<T>> {
    if degree < 2 {
        return Err(Error::InvalidArgument("degree must be at least 2".into()));
    }
    let aser = a.taylor_at(z0, degree)?;
    let c = recurrence(&aser.coeffs, f0, df0, degree);
    let trust = estimate_trust(&c, default_tol()).trust.min(aser.trust_radius);
    Ok(PowerSeries::with_trust(z0, c, trust))
}

fn recurrence<T: Real>(a: &[Cx<T>], f0: Cx<T>, df0: Cx<T>, degree: usize) -> Vec<Cx<T>> {
    let mut c = Vec::with_capacity(degree + 1);
    c.push(f0);
    c.push(df0);
    for n in 0..degree - 1 {
        let mut s = Cx::<T>::zero();
        for k in 0..=n {
            s += a[k] * c[n - k];
        }
        let den = T::from_usize_lossy((n + 2) * (n + 1));
        c.push(-s / den);
    }
    c
}

/// One of the two basis elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    F1,
    F2,
}

#[derive(Debug)]
struct Expansion<T: Real> {
    center: Cx<T>,
    f: [PowerSeries<T>; 2],
    reach: T,
}

impl<T: Real> Expansion<T> {
    fn values(&self, z: Cx<T>) -> [[Cx<T>; 2]; 2] {
        let j0 = self.f[0].jet_unchecked(z, 1);
        let j1 = self.f[1].jet_unchecked(z, 1);
        [[j0[0], j0[1]], [j1[0], j1[1]]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum CellKey {
    Root,
    Cell { level: u32, bin: u64, sub: u8, a: u32, b: u32 },
}

/// Polar coordinates of a cell: radial and angular intervals.
fn cell_box<T: Real>(level: u32, bin: u64, sub: u8, a: u32, b: u32) -> (T, T, T, T) {
    let r0 = 1.0 - 0.5f64.powi(level as i32);
    let r1 = 1.0 - 0.5f64.powi(level as i32 + 1);
    let bins = (1u64 << (level + 3)) as f64;
    let t0 = std::f64::consts::TAU * bin as f64 / bins;
    let dt = std::f64::consts::TAU / bins;
    let parts = (1u64 << sub) as f64;
    let dr = (r1 - r0) / parts;
    let dts = dt / parts;
    (
        T::lit(r0 + dr * a as f64),
        T::lit(r0 + dr * (a as f64 + 1.0)),
        T::lit(t0 + dts * b as f64),
        T::lit(t0 + dts * (b as f64 + 1.0)),
    )
}

fn cell_center<T: Real>(key: CellKey) -> Cx<T> {
    match key {
        CellKey::Root => Cx::<T>::zero(),
        CellKey::Cell { level, bin, sub, a, b } => {
            let (r0, r1, t0, t1) = cell_box::<T>(level, bin, sub, a, b);
            let half = T::lit(0.5);
            Cx::from_polar((r0 + r1) * half, (t0 + t1) * half)
        }
    }
}

/// Cell at polar level `level` (and quadtree depth `sub`) containing `z`.
fn cell_of<T: Real>(z: Cx<T>, level: u32, sub: u8) -> CellKey {
    let r = z.norm().as_f64();
    let mut t = z.arg().as_f64();
    if t < 0.0 {
        t += std::f64::consts::TAU;
    }
    let bins = 1u64 << (level + 3);
    let bin = ((t / std::f64::consts::TAU * bins as f64) as u64).min(bins - 1);
    if sub == 0 {
        return CellKey::Cell { level, bin, sub: 0, a: 0, b: 0 };
    }
    let (r0, r1, t0, t1) = cell_box::<f64>(level, bin, 0, 0, 0);
    let parts = 1u64 << sub;
    let fa = ((r - r0) / (r1 - r0)).clamp(0.0, 1.0);
    let fb = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
    let a = ((fa * parts as f64) as u64).min(parts - 1) as u32;
    let b = ((fb * parts as f64) as u64).min(parts - 1) as u32;
    CellKey::Cell { level, bin, sub, a, b }
}

fn level_of<T: Real>(z: Cx<T>) -> u32 {
    let d = 1.0 - z.norm().as_f64();
    if d >= 1.0 {
        return 0;
    }
    (-d.log2()).floor().max(0.0) as u32
}

struct Inner<T: Real> {
    coefficient: ExprAst<T>,
    init: [[Cx<T>; 2]; 2],
    wronskian_target: Cx<T>,
    config: SolverConfig<T>,
    cache: RwLock<HashMap<CellKey, Arc<Expansion<T>>>>,
}

/// Fundamental pair `(f1, f2)` of `f'' + A f = 0`, evaluable anywhere in
/// `|z| ≤ r_max`. Cloning shares the continuation cache.
#[derive(Clone)]
pub struct SolutionBasis<T: Real> {
    inner: Arc<Inner<T>>,
}

impl<T: Real> std::fmt::Debug for SolutionBasis<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolutionBasis")
            .field("coefficient", &self.inner.coefficient.to_string())
            .field("wronskian_target", &self.inner.wronskian_target)
            .field("cached_cells", &self.cached_cells())
            .finish()
    }
}

impl<T: Real> SolutionBasis<T> {
    /// Basis from initial data `(f(0), f'(0))` of each element.
    pub fn new(
        coefficient: ExprAst<T>,
        f1: (Cx<T>, Cx<T>),
        f2: (Cx<T>, Cx<T>),
        config: SolverConfig<T>,
    ) -> Result<Self> {
        let w = f1.0 * f2.1 - f1.1 * f2.0;
        if w.is_zero() {
            return Err(Error::InvalidArgument("initial data are linearly dependent".into()));
        }
        if !(config.r_max > T::zero() && config.r_max < T::one()) {
            return Err(Error::InvalidArgument(format!("r_max = {} outside (0, 1)", config.r_max)));
        }
        let basis = SolutionBasis {
            inner: Arc::new(Inner {
                coefficient,
                init: [[f1.0, f1.1], [f2.0, f2.1]],
                wronskian_target: w,
                config,
                cache: RwLock::new(HashMap::new()),
            }),
        };
        basis.node(CellKey::Root)?;
        Ok(basis)
    }

    /// `f1(0)=1, f1'(0)=0, f2(0)=0, f2'(0)=1`, so `W(f1, f2) = 1`.
    pub fn standard(coefficient: ExprAst<T>, config: SolverConfig<T>) -> Result<Self> {
        let (o, z) = (Cx::<T>::one(), Cx::<T>::zero());
        Self::new(coefficient, (o, z), (z, o), config)
    }

    /// `f1(0)=0, f1'(0)=1, f2(0)=1, f2'(0)=0`, so `W(f1, f2) = -1` and
    /// `w = f1/f2` has `w' = 1/f2²`.
    pub fn for_quotient(coefficient: ExprAst<T>, config: SolverConfig<T>) -> Result<Self> {
        let (o, z) = (Cx::<T>::one(), Cx::<T>::zero());
        Self::new(coefficient, (z, o), (o, z), config)
    }

    pub fn coefficient(&self) -> &ExprAst<T> {
        &self.inner.coefficient
    }

    pub fn wronskian_target(&self) -> Cx<T> {
        self.inner.wronskian_target
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.inner.config
    }

    /// Initial data `(f(0), f'(0))` of one element.
    pub fn initial(&self, which: Which) -> (Cx<T>, Cx<T>) {
        let v = self.inner.init[which as usize];
        (v[0], v[1])
    }

    pub fn cached_cells(&self) -> usize {
        self.inner.cache.read().map(|c| c.len()).unwrap_or(0)
    }

    /// Value and derivatives up to `order ≤ 3` of one element.
    pub fn jet(&self, which: Which, z: Cx<T>, order: usize) -> Result<Vec<Cx<T>>> {
        if order > 3 {
            return Err(Error::InvalidArgument("solution jets are served up to order 3".into()));
        }
        let e = self.locate(z)?;
        Ok(e.f[which as usize].jet_unchecked(z, order))
    }

    /// Jets of both elements at `z` from the same expansion.
    pub fn jets(&self, z: Cx<T>, order: usize) -> Result<[Vec<Cx<T>>; 2]> {
        if order > 3 {
            return Err(Error::InvalidArgument("solution jets are served up to order 3".into()));
        }
        let e = self.locate(z)?;
        Ok([e.f[0].jet_unchecked(z, order), e.f[1].jet_unchecked(z, order)])
    }

    pub fn value(&self, which: Which, z: Cx<T>) -> Result<Cx<T>> {
        Ok(self.jet(which, z, 0)?[0])
    }

    /// `f1 f2' - f1' f2` at `z`.
    pub fn wronskian(&self, z: Cx<T>) -> Result<Cx<T>> {
        let [a, b] = self.jets(z, 1)?;
        Ok(a[0] * b[1] - a[1] * b[0])
    }

    /// Jet of `alpha f1 + beta f2`.
    pub fn combination(&self, alpha: Cx<T>, beta: Cx<T>, z: Cx<T>, order: usize) -> Result<Vec<Cx<T>>> {
        let [a, b] = self.jets(z, order)?;
        Ok(a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect())
    }

    fn locate(&self, z: Cx<T>) -> Result<Arc<Expansion<T>>> {
        let cfg = &self.inner.config;
        if !(z.norm() <= cfg.r_max * (T::one() + T::epsilon() * T::lit(4.0))) {
            return Err(Error::Domain { z: to_pair(z), what: "point beyond r_max" });
        }
        let mut node = self.node(CellKey::Root)?;
        if (z - node.center).norm() <= node.reach {
            return Ok(node);
        }
        let top = level_of(z);
        for level in 0..=top {
            node = self.node(cell_of(z, level, 0))?;
            if (z - node.center).norm() <= node.reach {
                return Ok(node);
            }
        }
        for sub in 1..=cfg.max_subdepth {
            node = self.node(cell_of(z, top, sub))?;
            if (z - node.center).norm() <= node.reach {
                return Ok(node);
            }
        }
        Err(Error::ContinuationFailure { z: to_pair(z), reason: "cell depth exhausted" })
    }

    fn parent(key: CellKey) -> CellKey {
        match key {
            CellKey::Root => CellKey::Root,
            CellKey::Cell { level: 0, sub: 0, .. } => CellKey::Root,
            CellKey::Cell { level, bin, sub: 0, .. } => {
                CellKey::Cell { level: level - 1, bin: bin >> 1, sub: 0, a: 0, b: 0 }
            }
            CellKey::Cell { level, bin, sub, a, b } => {
                CellKey::Cell { level, bin, sub: sub - 1, a: a >> 1, b: b >> 1 }
            }
        }
    }

    fn node(&self, key: CellKey) -> Result<Arc<Expansion<T>>> {
        if let Some(e) = self.inner.cache.read().ok().and_then(|c| c.get(&key).cloned()) {
            return Ok(e);
        }
        let built = if key == CellKey::Root {
            self.expand(Cx::<T>::zero(), self.inner.init)?
        } else {
            let parent = self.node(Self::parent(key))?;
            self.walk(&parent, cell_center(key))?
        };
        let mut cache = self
            .inner
            .cache
            .write()
            .map_err(|_| Error::ContinuationFailure { z: (0.0, 0.0), reason: "cache poisoned" })?;
        Ok(cache.entry(key).or_insert_with(|| Arc::new(built)).clone())
    }

    /// Continues from `from` to `target` along the straight segment.
    fn walk(&self, from: &Expansion<T>, target: Cx<T>) -> Result<Expansion<T>> {
        let mut cur: Option<Expansion<T>> = None;
        for _ in 0..100_000 {
            let e = cur.as_ref().unwrap_or(from);
            let d = target - e.center;
            let dist = d.norm();
            let next = if dist <= e.reach { target } else { e.center + d * (e.reach / dist) };
            let vals = e.values(next);
            let fresh = self.expand(next, vals)?;
            if next == target {
                return Ok(fresh);
            }
            cur = Some(fresh);
        }
        Err(Error::ContinuationFailure { z: to_pair(target), reason: "step budget exhausted" })
    }

    /// Expansions of both solutions about `center` with adaptive degree.
    fn expand(&self, center: Cx<T>, init: [[Cx<T>; 2]; 2]) -> Result<Expansion<T>> {
        let cfg = &self.inner.config;
        let mut degree = cfg.degree.max(8);
        loop {
            let aser = self
                .inner
                .coefficient
                .taylor_at_tol(center, degree, cfg.max_degree.max(degree), cfg.tol)
                .map_err(|e| match e {
                    Error::Domain { z, what } => Error::ContinuationFailure { z, reason: what },
                    other => other,
                })?;
            let rho_a = estimate_trust(&aser.coeffs, cfg.tol).rho;
            let c1 = recurrence(&aser.coeffs, init[0][0], init[0][1], degree);
            let c2 = recurrence(&aser.coeffs, init[1][0], init[1][1], degree);
            let t1 = estimate_trust(&c1, cfg.tol);
            let t2 = estimate_trust(&c2, cfg.tol);
            let rho = rho_a.min(t1.rho).min(t2.rho);
            let trust = aser.trust_radius.min(t1.trust).min(t2.trust);
            let good = trust >= (T::lit(SAFETY) * rho * T::lit(0.5)).min(cfg.max_step * T::lit(2.0));
            if good || degree * 2 > cfg.max_degree {
                let reach = (trust * T::lit(0.5)).min(cfg.max_step);
                if !(reach > T::epsilon() * T::lit(16.0)) {
                    return Err(Error::ContinuationFailure {
                        z: to_pair(center),
                        reason: "trust radius collapsed",
                    });
                }
                return Ok(Expansion {
                    center,
                    f: [
                        PowerSeries::with_trust(center, c1, trust),
                        PowerSeries::with_trust(center, c2, trust),
                    ],
                    reach,
                });
            }
            degree *= 2;
        }
    }
}

/// The equation transferred by `φ_κ`: coefficient `B_κ = A(φ_κ) φ_κ'²` and
/// solutions `g = γ f(φ_κ) (φ_κ')^{-1/2}`.
#[derive(Debug, Clone)]
pub struct MobiusTransfer<T: Real> {
    pub kappa: Cx<T>,
    pub coefficient: ExprAst<T>,
    /// `(φ_κ')^{-1/2} = c (1 - κ̄ ζ)` with `c` the principal value at `ζ = 0`.
    pub root_scale: Cx<T>,
}

impl<T: Real> MobiusTransfer<T> {
    pub fn new(a: &ExprAst<T>, kappa: Cx<T>) -> Result<Self> {
        if !(kappa.norm() < T::one()) {
            return Err(Error::InvalidArgument(format!("|kappa| = {} is not below 1", kappa.norm())));
        }
        let one = Cx::<T>::one();
        let k = Box::new(Node::Const(kappa));
        let kbar = Box::new(Node::Const(kappa.conj()));
        let den = Box::new(Node::Sub(
            Box::new(Node::Const(one)),
            Box::new(Node::Mul(kbar, Box::new(Node::Var))),
        ));
        let phi_node = Node::Div(Box::new(Node::Sub(k, Box::new(Node::Var))), den.clone());
        let m = kappa.norm_sqr() - T::one();
        let dphi_sq = Node::Div(Box::new(Node::Const(Cx::new(m * m, T::zero()))), Box::new(Node::Pow(den, 4)));
        let composed = a.root.substitute(&phi_node);
        let coefficient = if a.is_zero_constant() {
            ExprAst::new(Node::Const(Cx::<T>::zero()))
        } else {
            ExprAst::new(Node::Mul(Box::new(composed), Box::new(dphi_sq)))
        };
        let root_scale = Cx::new(m, T::zero()).sqrt().inv();
        Ok(MobiusTransfer { kappa, coefficient, root_scale })
    }

    pub fn phi(&self, zeta: Cx<T>) -> Cx<T> {
        phi(self.kappa, zeta)
    }

    /// Jet `(g, g', g'')` at `ζ` from the jet `(f, f', f'')` at `φ_κ(ζ)`.
    pub fn transfer_jet(&self, zeta: Cx<T>, f: &[Cx<T>]) -> [Cx<T>; 3] {
        let p1 = phi_prime(self.kappa, zeta);
        let p2 = phi_second(self.kappa, zeta);
        let h0 = f[0];
        let h1 = f[1] * p1;
        let h2 = f[2] * p1 * p1 + f[1] * p2;
        let q0 = self.root_scale * (Cx::<T>::one() - self.kappa.conj() * zeta);
        let q1 = -self.root_scale * self.kappa.conj();
        [h0 * q0, h1 * q0 + h0 * q1, h2 * q0 + h1 * q1 * T::lit(2.0)]
    }

    /// Jet of `g` built from one element of a basis for the original equation.
    pub fn g_jet(&self, basis: &SolutionBasis<T>, which: Which, zeta: Cx<T>) -> Result<[Cx<T>; 3]> {
        let f = basis.jet(which, self.phi(zeta), 2)?;
        Ok(self.transfer_jet(zeta, &f))
    }
}
