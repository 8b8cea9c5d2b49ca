//! Restarted subgradient ascent for ratios of norm-like functionals.
//!
//! Every sup-type quantity in the crate has the form
//! `sup N(X)/D(X)` over Hermitian `X` in a real subspace, with `N` and `D`
//! positively homogeneous of degree one. Both are built from operator norms of
//! linear images of `X` (or a linear functional), so a subgradient is available
//! from the top singular pair. The ratio is scale invariant, so iterates live on
//! the unit sphere of the coordinate space.
//!
//! Steps are normalized (`x += η g/|g|`), which makes two runs with the same seed
//! follow identical trajectories whenever their objectives differ by a positive
//! factor. Matched estimators rely on this.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{jacobi, ComplexMatrix, C64};
use crate::sampling::Rng;

/// Budget and seed of one ascent run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AscentConfig {
    pub restarts: usize,
    pub iterations: usize,
    /// Initial step length on the unit sphere; decays as `step/√t`.
    pub step: f64,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig { restarts: 200, iterations: 500, step: 0.1, seed: 0 }
    }
}

impl AscentConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// A small budget for inner loops and iterated estimates.
    pub fn light(seed: u64) -> Self {
        AscentConfig { restarts: 24, iterations: 200, step: 0.1, seed }
    }

    /// Budget for dual evaluations nested inside an outer search.
    pub fn inner(seed: u64) -> Self {
        AscentConfig { restarts: 6, iterations: 60, step: 0.1, seed }
    }
}

/// Relative spread under which all random starting ratios count as equal.
pub const FLAT_TOL: f64 = 1e-12;
/// Ratios below this count as zero in the flatness test.
pub const FLAT_ABS: f64 = 1e-13;
/// Number of trailing non-improving restarts that tightens the gap.
pub const STAGNATION_WINDOW: usize = 50;
pub const STAGNATION_REL: f64 = 1e-6;
pub const GAP_STAGNANT: f64 = 1e-4;
pub const GAP_DEFAULT: f64 = 1e-2;

/// Caps the rayon pool at `QOT_THREADS` workers, once per process.
pub fn init_threads() {
    static INIT: OnceLock<()> = OnceLock::new();
    INIT.get_or_init(|| {
        if let Some(n) = std::env::var("QOT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
            // fails harmlessly if a global pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    });
}

/// Images `A_k = F(B_k)` of the domain basis under a linear map `F`, so that
/// `F(Σ x_k B_k) = Σ x_k A_k`.
#[derive(Clone, Debug)]
pub struct Family {
    images: Vec<ComplexMatrix>,
    hermitian: bool,
}

impl Family {
    /// Anti-Hermitian families are rotated by `−i` so the Hermitian path applies.
    pub fn new(images: Vec<ComplexMatrix>) -> Self {
        let tol = 1e-12;
        let scale = images.iter().map(|a| a.max_abs()).fold(0.0, f64::max).max(1.0);
        let square = images.iter().all(|a| a.is_square());
        if square && images.iter().all(|a| a.hermiticity_defect() <= tol * scale) {
            let images = images.iter().map(|a| a.hermitian_part()).collect();
            return Family { images, hermitian: true };
        }
        let rot = C64::new(0.0, -1.0);
        let rotated: Vec<ComplexMatrix> = images.iter().map(|a| a.scale(rot)).collect();
        if square && rotated.iter().all(|a| a.hermiticity_defect() <= tol * scale) {
            let images = rotated.iter().map(|a| a.hermitian_part()).collect();
            return Family { images, hermitian: true };
        }
        Family { images, hermitian: false }
    }

    /// Images of `basis` under `f`.
    pub fn from_map(basis: &[ComplexMatrix], f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        Self::new(basis.iter().map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    fn combine(&self, x: &[f64]) -> ComplexMatrix {
        let a0 = &self.images[0];
        let mut m = ComplexMatrix::zeros(a0.rows(), a0.cols());
        for (xk, a) in x.iter().zip(&self.images) {
            if *xk != 0.0 {
                m.axpy_real(*xk, a);
            }
        }
        m
    }

    /// `‖Σ x_k A_k‖` and its subgradient.
    fn op_norm(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let m = self.combine(x);
        if self.hermitian {
            let e = jacobi(&m).expect("Jacobi converges on Hermitian input");
            let (lo, hi) = (e.min_eigenvalue(), e.max_eigenvalue());
            let (k, sign) = if hi.abs() >= lo.abs() { (e.dim() - 1, 1.0) } else { (0, -1.0) };
            let w = e.vector(k);
            let grad = self.images.iter().map(|a| sign * quad(&w, a, &w)).collect();
            (sign * e.eigenvalues[k], grad)
        } else {
            let g = &m.adjoint() * &m;
            let e = jacobi(&g).expect("Jacobi converges on a Gram matrix");
            let sigma = e.max_eigenvalue().max(0.0).sqrt();
            if sigma == 0.0 {
                return (0.0, vec![0.0; x.len()]);
            }
            let v = e.vector(e.dim() - 1);
            let u: Vec<C64> = m.matvec(&v).into_iter().map(|z| z / sigma).collect();
            let grad = self.images.iter().map(|a| quad(&u, a, &v)).collect();
            (sigma, grad)
        }
    }
}

/// `Re(u† A v)`.
fn quad(u: &[C64], a: &ComplexMatrix, v: &[C64]) -> f64 {
    let av = a.matvec(v);
    u.iter().zip(&av).map(|(p, q)| (p.conj() * q).re).sum()
}

/// A positively homogeneous functional of the coordinates.
#[derive(Clone, Debug)]
pub enum Objective {
    /// `‖F(X)‖`.
    OpNorm(Family),
    /// `max_s ‖F_s(X)‖`.
    MaxOpNorm(Vec<Family>),
    /// `√λ_max(Σ_s F_s(X)† F_s(X))`.
    GramRoot(Vec<Family>),
    /// `|Σ f_k x_k|`.
    Linear(Vec<f64>),
}

impl Objective {
    pub fn value(&self, x: &[f64]) -> f64 {
        self.eval(x).0
    }

    /// Value and a subgradient.
    pub fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        match self {
            Objective::OpNorm(f) => f.op_norm(x),
            Objective::MaxOpNorm(fs) => {
                let mut best = (f64::NEG_INFINITY, Vec::new());
                for f in fs {
                    let r = f.op_norm(x);
                    if r.0 > best.0 {
                        best = r;
                    }
                }
                best
            }
            Objective::GramRoot(fs) => gram_root(fs, x),
            Objective::Linear(f) => {
                let s: f64 = f.iter().zip(x).map(|(a, b)| a * b).sum();
                let sign = if s < 0.0 { -1.0 } else { 1.0 };
                (s.abs(), f.iter().map(|a| sign * a).collect())
            }
        }
    }
}

fn gram_root(fs: &[Family], x: &[f64]) -> (f64, Vec<f64>) {
    let ms: Vec<ComplexMatrix> = fs.iter().map(|f| f.combine(x)).collect();
    let n = ms[0].cols();
    let mut g = ComplexMatrix::zeros(n, n);
    for m in &ms {
        g = &g + &(&m.adjoint() * m);
    }
    let e = jacobi(&g).expect("Jacobi converges on a Gram matrix");
    let sigma = e.max_eigenvalue().max(0.0).sqrt();
    if sigma == 0.0 {
        return (0.0, vec![0.0; x.len()]);
    }
    let v = e.vector(e.dim() - 1);
    let mut grad = vec![0.0; x.len()];
    for (f, m) in fs.iter().zip(&ms) {
        let mv = m.matvec(&v);
        for (gk, a) in grad.iter_mut().zip(&f.images) {
            *gk += quad(&mv, a, &v);
        }
    }
    for gk in &mut grad {
        *gk /= sigma;
    }
    (sigma, grad)
}

/// `sup N(x)/D(x)` over `x ∈ ℝ^dim \ {0}`.
#[derive(Clone, Debug)]
pub struct RatioProblem {
    pub dim: usize,
    pub num: Objective,
    pub den: Objective,
}

impl RatioProblem {
    /// Ratio and its subgradient; zero where the denominator vanishes.
    pub fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let (d, gd) = self.den.eval(x);
        if d <= 1e-300 {
            return (0.0, vec![0.0; x.len()]);
        }
        let (n, gn) = self.num.eval(x);
        let r = n / d;
        let g = gn.iter().zip(&gd).map(|(a, b)| (a - r * b) / d).collect();
        (r, g)
    }

    pub fn ratio(&self, x: &[f64]) -> f64 {
        let d = self.den.value(x);
        if d <= 1e-300 {
            0.0
        } else {
            self.num.value(x) / d
        }
    }
}

/// Outcome of [`maximize`].
#[derive(Clone, Debug)]
pub struct AscentResult {
    pub value: f64,
    /// Best point, scaled so that `D(x) = 1`.
    pub x: Vec<f64>,
    pub gap: f64,
    /// All random starting ratios agreed within [`FLAT_TOL`].
    pub flat: bool,
    pub best_restart: usize,
    pub per_restart: Vec<f64>,
}

fn normalize(x: &mut [f64]) -> bool {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= n);
    true
}

struct Run {
    best: f64,
    x: Vec<f64>,
}

fn single_run(p: &RatioProblem, cfg: &AscentConfig, start: Vec<f64>) -> Run {
    let mut x = start;
    let start_ratio = p.ratio(&x);
    let mut best = start_ratio;
    let mut best_x = x.clone();
    let phases = [(cfg.iterations, cfg.step), (cfg.iterations / 2, cfg.step * 0.05)];
    for (phase, &(iters, step0)) in phases.iter().enumerate() {
        if phase == 1 {
            x = best_x.clone();
        }
        for t in 1..=iters {
            let (r, g) = p.eval(&x);
            if r > best {
                best = r;
                best_x.copy_from_slice(&x);
            }
            let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gn <= 1e-300 || !gn.is_finite() {
                break;
            }
            let eta = step0 / (t as f64).sqrt();
            for (xi, gi) in x.iter_mut().zip(&g) {
                *xi += eta * gi / gn;
            }
            if !normalize(&mut x) {
                break;
            }
        }
        let r = p.ratio(&x);
        if r > best {
            best = r;
            best_x.copy_from_slice(&x);
        }
    }
    Run { best, x: best_x }
}

/// Maximizes the ratio with `cfg.restarts` seeded restarts run in parallel.
///
/// Restart `i` starts from `hints[i]` when given, else from a Gaussian direction
/// drawn from the generator derived from `(cfg.seed, i)`. Results are merged by
/// a deterministic max (lowest index wins ties), so the outcome does not depend on
/// the thread count.
pub fn maximize(p: &RatioProblem, cfg: &AscentConfig, hints: &[Vec<f64>]) -> AscentResult {
    init_threads();
    if p.dim == 0 {
        return AscentResult {
            value: 0.0,
            x: Vec::new(),
            gap: 0.0,
            flat: true,
            best_restart: 0,
            per_restart: Vec::new(),
        };
    }
    let restarts = cfg.restarts.max(1);
    let starts: Vec<Vec<f64>> = (0..restarts)
        .map(|i| {
            let mut rng = Rng::derived(cfg.seed, i as u64);
            let mut x = match hints.get(i) {
                Some(h) if h.len() == p.dim => h.clone(),
                _ => rng.gauss_vec(p.dim),
            };
            while !normalize(&mut x) {
                x = rng.gauss_vec(p.dim);
            }
            x
        })
        .collect();
    let start_ratios: Vec<f64> = starts.par_iter().map(|x| p.ratio(x)).collect();
    let random_starts = &start_ratios[hints.len().min(restarts)..];
    let flat = flat_starts(random_starts);

    // a constant ratio needs no iterations
    let runs: Vec<Run> = if flat {
        starts
            .into_iter()
            .zip(&start_ratios)
            .map(|(x, &r)| Run { best: r, x })
            .collect()
    } else {
        starts.into_par_iter().map(|x| single_run(p, cfg, x)).collect()
    };

    let mut best_restart = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.best > runs[best_restart].best {
            best_restart = i;
        }
    }
    let value = runs[best_restart].best;
    let gap = if flat { 0.0 } else { stagnation_gap(&runs.iter().map(|r| r.best).collect::<Vec<_>>()) };

    let mut x = runs[best_restart].x.clone();
    let d = p.den.value(&x);
    if d > 0.0 {
        x.iter_mut().for_each(|v| *v /= d);
    }
    AscentResult {
        value,
        x,
        gap,
        flat,
        best_restart,
        per_restart: runs.iter().map(|r| r.best).collect(),
    }
}

fn flat_starts(starts: &[f64]) -> bool {
    if starts.len() < 2 {
        return false;
    }
    let hi = starts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = starts.iter().cloned().fold(f64::INFINITY, f64::min);
    hi - lo <= FLAT_TOL * hi.abs() || hi.abs() <= FLAT_ABS
}

/// Heuristic relative gap from the running best in restart order.
pub fn stagnation_gap(bests: &[f64]) -> f64 {
    let mut running = f64::NEG_INFINITY;
    let mut last_improvement = 0;
    for (i, &b) in bests.iter().enumerate() {
        if b > running + STAGNATION_REL * running.abs() {
            last_improvement = i;
        }
        running = running.max(b);
    }
    if bests.len() - 1 - last_improvement >= STAGNATION_WINDOW {
        GAP_STAGNANT
    } else {
        GAP_DEFAULT
    }
}

/// `Σ x_k B_k`.
pub fn combine(basis: &[ComplexMatrix], x: &[f64]) -> ComplexMatrix {
    let a0 = &basis[0];
    let mut m = ComplexMatrix::zeros(a0.rows(), a0.cols());
    for (xk, b) in x.iter().zip(basis) {
        m.axpy_real(*xk, b);
    }
    m
}

/// (1+1) evolution strategy with the one-fifth success rule; maximizes `f`.
pub fn one_plus_one(
    f: impl Fn(&[f64]) -> f64,
    x0: Vec<f64>,
    sigma0: f64,
    steps: usize,
    rng: &mut Rng,
) -> (f64, Vec<f64>) {
    let mut x = x0;
    let mut fx = f(&x);
    let mut sigma = sigma0;
    for _ in 0..steps {
        let y: Vec<f64> = x.iter().map(|v| v + sigma * rng.gauss()).collect();
        let fy = f(&y);
        if fy > fx {
            x = y;
            fx = fy;
            sigma *= 1.5;
        } else {
            sigma *= 0.9;
        }
        if sigma < 1e-9 {
            break;
        }
    }
    (fx, x)
}
