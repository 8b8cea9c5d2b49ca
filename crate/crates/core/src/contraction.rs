//! Lipschitz constants `Lip_S(Φ) = sup |||Φ(X)|||/|||X|||`, their dual reading as
//! Wasserstein contraction, and the entropy side: BKM geometry, `λ₂`, relative
//! entropy, LogLip and the sampled entropy contraction coefficient.
//!
//! In the entropy functions `Φ` acts on states (Schrödinger) and `Φ*` is its
//! Heisenberg dual. Lipschitz functions take the Heisenberg action.

use rayon::prelude::*;
use serde::Serialize;

use crate::ascent::{maximize, one_plus_one, AscentConfig, RatioProblem};
use crate::channel::{ConditionalExpectation, QuantumChannel, SuperOperator};
use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, hermitian_basis, jacobi, mat_log, op_norm, psd_sqrt, trace_norm, ComplexMatrix, DensityMatrix,
    EigenDecomposition, HermitianMatrix, C64,
};
use crate::report::{CostReport, Method};
use crate::sampling::{derive_seed, haar_pure_state, haar_vector, random_full_rank_state, Rng};
use crate::seminorm::{ascent_report, seminorm, SeminormKind, SeminormSpec};
use crate::transport::{expected_length, pure, DualEval, FIX_TOL, REFINE_TOP};

/// Eigenvalue floor below which a state counts as rank deficient.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Pairs with `W_L(ρ,σ)` below this are skipped.
pub const DEGENERATE_PAIR: f64 = 1e-10;
/// Relative entropies below this are skipped as denominators.
pub const ENTROPY_FLOOR: f64 = 1e-14;
/// Relative tolerance on the BKM symmetry defect before the `λ₂` eigensolve.
pub const BKM_SYM_TOL: f64 = 1e-9;
/// Default number of sampled state pairs in [`contraction_via_states`].
pub const DEFAULT_PAIRS: usize = 128;
const REFINE_STEPS: usize = 60;

/// `Φ∘E = E` within [`FIX_TOL`] at amplification 1.
pub fn fixes_efix(phi: &SuperOperator, e: &ConditionalExpectation) -> bool {
    let es = e.superoperator();
    phi.compose(es).matrix().max_abs_diff(es.matrix()) <= FIX_TOL
}

/// `2 sup‖s‖` for LINF, `2(Σ‖s‖²)^{1/2}` for L2: the constant in `|||Φx||| ≤ c‖x − Ex‖`.
pub fn commutator_constant(spec: &SeminormSpec) -> f64 {
    let norms: Vec<f64> = spec.resource.elements().iter().map(op_norm).collect();
    match spec.kind {
        SeminormKind::Linf => 2.0 * norms.iter().cloned().fold(0.0, f64::max),
        SeminormKind::L2 => 2.0 * norms.iter().map(|v| v * v).sum::<f64>().sqrt(),
    }
}

/// `Lip_S` of a linear map on 𝕄_d given as a superoperator.
///
/// The upper bound is the flat-ratio value when the ratio is constant, else the
/// universal bound `c_S·κ(S)` when `Φ∘E_fix = E_fix`, else `+∞`.
pub fn lip_super(phi: &SuperOperator, spec: &SeminormSpec, cfg: &AscentConfig) -> Result<CostReport> {
    let d = spec.resource.dim();
    if phi.dim() != d {
        return Err(Error::DimensionMismatch { context: "channel dim vs resource dim", expected: d, got: phi.dim() });
    }
    let phi_n = phi.amplify(spec.amplification);
    let domain = spec.domain();
    let images: Vec<ComplexMatrix> = domain.iter().map(|b| phi_n.apply(b)).collect();
    let problem = RatioProblem { dim: domain.len(), num: spec.objective(&images), den: spec.objective(&domain) };
    let res = maximize(&problem, cfg, &[]);
    let flat = res.flat;
    let mut report = ascent_report(res, &domain, cfg, spec.amplification);

    let leak = spec
        .kernel_basis()
        .iter()
        .map(|k| seminorm(spec, &phi_n.apply(k)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if leak > FIX_TOL {
        report.upper = f64::INFINITY;
        report.upper_method = Method::TheoryUpper;
        report.diagnostics.push(format!("kernel not preserved (leak {leak:.3e}): Lip is infinite"));
        return Ok(report);
    }
    if flat {
        return Ok(report);
    }
    let e = ConditionalExpectation::onto_commutant(&spec.resource);
    if fixes_efix(phi, &e) {
        let kappa = expected_length(spec, cfg)?;
        report.upper = commutator_constant(spec) * kappa.heuristic_upper();
        report.upper_method = Method::TheoryUpper;
        report.diagnostics.push(format!("upper = c_S * kappa_upper {:.6}", kappa.heuristic_upper()));
    } else {
        report.upper = f64::INFINITY;
        report.upper_method = Method::TheoryUpper;
        report.diagnostics.push("Phi o E_fix != E_fix: no universal upper bound".into());
    }
    Ok(report)
}

/// `Lip_S(Φ)` for the Heisenberg action of a channel.
pub fn lip(phi: &QuantumChannel, spec: &SeminormSpec, cfg: &AscentConfig) -> Result<CostReport> {
    lip_super(&phi.heisenberg_super(), spec, cfg)
}

/// Lower bound on `Lip_S(Φ)` from `W_L(Φ_*ρ, Φ_*σ)/W_L(ρ, σ)` over sampled pure
/// pairs, refined by an evolution strategy over the direction `ρ − σ`.
///
/// Numerator and denominator share a seed, so a map that scales every direction
/// by the same factor yields exactly that factor.
pub fn contraction_via_states(
    phi: &QuantumChannel,
    spec: &SeminormSpec,
    n_pairs: usize,
    cfg: &AscentConfig,
) -> Result<CostReport> {
    let heis = phi.heisenberg_super();
    if heis.dim() != spec.resource.dim() {
        return Err(Error::DimensionMismatch {
            context: "channel dim vs resource dim",
            expected: spec.resource.dim(),
            got: heis.dim(),
        });
    }
    let schro = heis.amplify(spec.amplification).adjoint();
    let n = spec.dim();
    let eval = DualEval::new(spec);
    let inner = AscentConfig::inner(cfg.seed);
    let ratio = |f: &ComplexMatrix, c: &AscentConfig| -> Option<f64> {
        let den = eval.eval(f, c).0;
        if !den.is_finite() || den < DEGENERATE_PAIR {
            return None;
        }
        let num = eval.eval(&schro.apply(f).hermitian_part(), c).0;
        Some(num / den)
    };

    let mut rng = Rng::seeded(derive_seed(cfg.seed, 2));
    let dirs: Vec<ComplexMatrix> = (0..n_pairs.max(1))
        .map(|_| {
            let a = pure(&haar_vector(n, &mut rng));
            let b = pure(&haar_vector(n, &mut rng));
            (&a - &b).hermitian_part()
        })
        .collect();
    let scores: Vec<Option<f64>> = dirs.par_iter().map(|f| ratio(f, &inner)).collect();
    let skipped = scores.iter().filter(|s| s.is_none()).count();
    let mut order: Vec<usize> = (0..dirs.len()).filter(|&i| scores[i].is_some()).collect();
    if order.is_empty() {
        let mut r = CostReport::exact(0.0, Method::SampleMax);
        r.upper = f64::INFINITY;
        r.diagnostics.push(format!("all {skipped} pairs degenerate"));
        return Ok(r);
    }
    order.sort_by(|&a, &b| scores[b].unwrap().total_cmp(&scores[a].unwrap()).then(a.cmp(&b)));

    let domain = &eval.domain;
    let top: Vec<usize> = order.iter().take(REFINE_TOP).cloned().collect();
    let refined: Vec<(f64, Vec<f64>)> = top
        .par_iter()
        .map(|&i| {
            let y0: Vec<f64> = domain.iter().map(|b| b.hs_inner(&dirs[i]).re).collect();
            let mut es_rng = Rng::derived(cfg.seed, 2000 + i as u64);
            let f = |y: &[f64]| ratio(&crate::ascent::combine(domain, y), &inner).unwrap_or(0.0);
            one_plus_one(f, y0, 0.1, REFINE_STEPS, &mut es_rng)
        })
        .collect();
    let mut best = &refined[0];
    for r in &refined[1..] {
        if r.0 > best.0 {
            best = r;
        }
    }
    let dir = crate::ascent::combine(domain, &best.1);
    let full = ratio(&dir, cfg).unwrap_or(0.0);
    let lower = full.max(best.0).max(scores[order[0]].unwrap());

    let mut r = CostReport::exact(lower, Method::AscentLower);
    r.upper = f64::INFINITY;
    r.upper_method = Method::TheoryUpper;
    r.gap = f64::INFINITY;
    r.witness = Some(dir);
    r.seed = cfg.seed;
    r.restarts = cfg.restarts;
    r.iterations = cfg.iterations;
    r.amplification = spec.amplification;
    r.diagnostics = vec![
        format!("{} pairs, {skipped} degenerate, top {REFINE_TOP} refined", dirs.len()),
        "witness is the direction rho - sigma".into(),
        "lower bound only".into(),
    ];
    Ok(r)
}

/// Logarithmic mean `(a−b)/(log a − log b)`, `a` on the diagonal.
fn log_mean(a: f64, b: f64) -> f64 {
    if (a - b).abs() <= 1e-12 * a.max(b) {
        0.5 * (a + b)
    } else {
        (a - b) / (a.ln() - b.ln())
    }
}

/// `Γ_σ(Y) = ∫₀¹ σ^s Y σ^{1−s} ds` and its inverse, in `σ`'s eigenbasis.
#[derive(Clone, Debug)]
pub struct BkmOperator {
    sigma: DensityMatrix,
    eig: EigenDecomposition,
    /// `Γ_σ` as a superoperator.
    pub gamma: SuperOperator,
    /// `⟨B_k, Γ_σ(B_l)⟩` in the Hermitian basis; real symmetric positive definite.
    pub gram: ComplexMatrix,
}

impl BkmOperator {
    pub fn new(sigma: &DensityMatrix) -> Result<Self> {
        let eig = eig_hermitian(sigma.hermitian())?;
        let lo = eig.min_eigenvalue();
        if lo <= SUPPORT_TOL {
            return Err(Error::RankDeficient(lo));
        }
        let d = sigma.dim();
        let mut op = BkmOperator {
            sigma: sigma.clone(),
            eig,
            gamma: SuperOperator::identity(d),
            gram: ComplexMatrix::zeros(d * d, d * d),
        };
        op.gamma = SuperOperator::from_map(d, |y| op.gamma(y));
        let basis = hermitian_basis(d);
        op.gram = ComplexMatrix::from_fn(d * d, d * d, |k, l| C64::new(basis[k].hs_inner(&op.gamma(&basis[l])).re, 0.0));
        Ok(op)
    }

    pub fn sigma(&self) -> &DensityMatrix {
        &self.sigma
    }

    fn scaled(&self, y: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eig.eigenvectors;
        let lam = &self.eig.eigenvalues;
        let mut t = &(&v.adjoint() * y) * v;
        let d = lam.len();
        for i in 0..d {
            for j in 0..d {
                t[(i, j)] *= f(log_mean(lam[i], lam[j]));
            }
        }
        &(v * &t) * &v.adjoint()
    }

    pub fn gamma(&self, y: &ComplexMatrix) -> ComplexMatrix {
        self.scaled(y, |k| k)
    }

    pub fn gamma_inverse(&self, y: &ComplexMatrix) -> ComplexMatrix {
        self.scaled(y, |k| 1.0 / k)
    }

    /// `⟨X, Y⟩_BKM = ⟨X, Γ_σ(Y)⟩`.
    pub fn inner(&self, x: &ComplexMatrix, y: &ComplexMatrix) -> C64 {
        x.hs_inner(&self.gamma(y))
    }

    /// `Φ^{*,BKM} = Γ_σ⁻¹ ∘ Φ ∘ Γ_σ` with `Φ` the Schrödinger action.
    pub fn bkm_dual(&self, phi: &QuantumChannel) -> SuperOperator {
        let d = self.sigma.dim();
        let schro = phi.schrodinger_super();
        SuperOperator::from_map(d, |y| self.gamma_inverse(&schro.apply(&self.gamma(y))))
    }

    /// `Φ* ∘ Φ^{*,BKM}`.
    pub fn composite(&self, phi: &QuantumChannel) -> SuperOperator {
        phi.heisenberg_super().compose(&self.bkm_dual(phi))
    }
}

pub fn gamma_sigma(sigma: &DensityMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(BkmOperator::new(sigma)?.gamma(y))
}

pub fn gamma_sigma_inverse(sigma: &DensityMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(BkmOperator::new(sigma)?.gamma_inverse(y))
}

/// Spectrum of `Φ*∘Φ^{*,BKM}` in decreasing order, from the symmetric form
/// `G^{1/2} M G^{−1/2}` in the Hermitian basis.
pub fn bkm_spectrum(phi: &QuantumChannel) -> Result<Vec<f64>> {
    let sigma = phi.fixed_state()?;
    let bkm = BkmOperator::new(&sigma)?;
    let d = phi.dim();
    let basis = hermitian_basis(d);
    let m = bkm.composite(phi);
    let mm = ComplexMatrix::from_fn(d * d, d * d, |k, l| C64::new(basis[k].hs_inner(&m.apply(&basis[l])).re, 0.0));
    let ge = jacobi(&bkm.gram)?;
    let root = ge.reconstruct_with(f64::sqrt);
    let inv_root = ge.reconstruct_with(|x| 1.0 / x.sqrt());
    let s = &(&root * &mm) * &inv_root;
    let defect = s.max_abs_diff(&s.adjoint());
    if defect > BKM_SYM_TOL * s.max_abs().max(1.0) {
        return Err(Error::Assumption(format!("BKM symmetry defect {defect:.3e}")));
    }
    let mut spec = jacobi(&s.hermitian_part())?.eigenvalues;
    spec.reverse();
    Ok(spec)
}

/// Second-largest eigenvalue of `Φ*∘Φ^{*,BKM}` for a primitive channel.
pub fn bkm_lambda2(phi: &QuantumChannel) -> Result<f64> {
    let s = bkm_spectrum(phi)?;
    Ok(s.get(1).cloned().unwrap_or(0.0))
}

/// `D(ρ‖σ) = tr ρ(log ρ − log σ)`; `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { context: "state dims", expected: sigma.dim(), got: rho.dim() });
    }
    let es = eig_hermitian(sigma.hermitian())?;
    let er = eig_hermitian(rho.hermitian())?;
    let mut cross = 0.0;
    for k in 0..es.dim() {
        let v = es.vector(k);
        let w: f64 = v.iter().zip(rho.matrix().matvec(&v)).map(|(a, b)| (a.conj() * b).re).sum();
        let lam = es.eigenvalues[k];
        if lam <= SUPPORT_TOL {
            if w > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
        } else {
            cross += w * lam.ln();
        }
    }
    let neg_entropy: f64 = er.eigenvalues.iter().filter(|&&l| l > 0.0).map(|&l| l * l.ln()).sum();
    Ok((neg_entropy - cross).max(0.0))
}

/// `tr(dρ (log ρ − log σ))`, the derivative of `t ↦ D(ρ + t dρ ‖ σ)` at 0.
pub fn entropy_derivative(rho: &DensityMatrix, drho: &HermitianMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let tr = drho.trace();
    if tr.abs() > 1e-10 {
        return Err(Error::OutOfRange(format!("perturbation must be traceless, trace is {tr:.3e}")));
    }
    let g = &mat_log(rho.hermitian())?.into_matrix() - mat_log(sigma.hermitian())?.matrix();
    Ok(drho.matrix().hs_inner(&g).re)
}

/// `⟨X, Γ_σ⁻¹(X)⟩`, the curvature of `D(·‖σ)` at `σ`.
pub fn bkm_quadratic(sigma: &DensityMatrix, x: &HermitianMatrix) -> Result<f64> {
    Ok(x.matrix().hs_inner(&gamma_sigma_inverse(sigma, x.matrix())?).re)
}

/// `|D(σ + εX ‖ σ) − (ε²/2)⟨X, Γ_σ⁻¹X⟩|`.
pub fn second_order_error(sigma: &DensityMatrix, x: &HermitianMatrix, eps: f64) -> Result<f64> {
    let mut m = sigma.matrix().clone();
    m.axpy_real(eps, x.matrix());
    let rho = DensityMatrix::from_matrix(m)?;
    let d = relative_entropy(&rho, sigma)?;
    Ok((d - 0.5 * eps * eps * bkm_quadratic(sigma, x)?).abs())
}

/// `(½‖ρ−σ‖₁², D(ρ‖σ), (λ_max(ρ)/λ_min(σ))‖ρ−σ‖₁)`.
pub fn pinsker_sandwich(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<(f64, f64, f64)> {
    let t = trace_norm(&(rho.matrix() - sigma.matrix()));
    let d = relative_entropy(rho, sigma)?;
    let hi = eig_hermitian(rho.hermitian())?.max_eigenvalue() / eig_hermitian(sigma.hermitian())?.min_eigenvalue();
    Ok((0.5 * t * t, d, hi * t))
}

/// Outcome of a sampled supremum over states.
#[derive(Clone, Debug, Serialize)]
pub struct StateSample {
    pub max_ratio: f64,
    pub argmax: Option<ComplexMatrix>,
    pub samples: usize,
    pub skipped: usize,
    pub seed: u64,
}

fn sample_max(n: usize, seed: u64, f: impl Fn(usize) -> Result<Option<(f64, ComplexMatrix)>> + Sync) -> Result<StateSample> {
    let vals: Vec<Option<(f64, ComplexMatrix)>> = (0..n).into_par_iter().map(&f).collect::<Result<_>>()?;
    let skipped = vals.iter().filter(|v| v.is_none()).count();
    let mut best: Option<&(f64, ComplexMatrix)> = None;
    for v in vals.iter().flatten() {
        if best.is_none_or(|b| v.0 > b.0) {
            best = Some(v);
        }
    }
    Ok(StateSample {
        max_ratio: best.map_or(0.0, |b| b.0),
        argmax: best.map(|b| b.1.clone()),
        samples: n,
        skipped,
        seed,
    })
}

fn check_full_rank(sigma: &DensityMatrix) -> Result<()> {
    let lo = eig_hermitian(sigma.hermitian())?.min_eigenvalue();
    if lo <= SUPPORT_TOL {
        return Err(Error::RankDeficient(lo));
    }
    Ok(())
}

/// `max D(Φρ‖σ)/D(ρ‖σ)` over seeded full-rank states; a lower bound on `η^D`.
pub fn entropy_contraction_sample(phi: &QuantumChannel, sigma: &DensityMatrix, n_states: usize, seed: u64) -> Result<StateSample> {
    check_full_rank(sigma)?;
    let d = phi.dim();
    sample_max(n_states, seed, |i| {
        let rho = random_full_rank_state(d, &mut Rng::derived(seed, i as u64));
        let den = relative_entropy(&rho, sigma)?;
        if den < ENTROPY_FLOOR {
            return Ok(None);
        }
        let num = relative_entropy(&phi.apply_state(&rho)?, sigma)?;
        Ok(Some((num / den, rho.matrix().clone())))
    })
}

fn state_from_reals(x: &[f64], d: usize) -> Option<DensityMatrix> {
    let a = ComplexMatrix::from_fn(d, d, |i, j| {
        let k = 2 * (i * d + j);
        C64::new(x[k], x[k + 1])
    });
    let m = &a * &a.adjoint();
    let tr = m.trace().re;
    if tr <= 0.0 || !tr.is_finite() {
        return None;
    }
    DensityMatrix::from_matrix(m.scale_real(1.0 / tr)).ok()
}

/// Local (1+1)-ES ascent of the entropy ratio from `rho0`, over `ρ = AA†/tr`.
/// Returns the ratio and the state reached.
pub fn refine_entropy_ratio(
    phi: &QuantumChannel,
    sigma: &DensityMatrix,
    rho0: &DensityMatrix,
    steps: usize,
    seed: u64,
) -> Result<(f64, DensityMatrix)> {
    let d = phi.dim();
    let a0 = psd_sqrt(rho0.hermitian())?;
    let x0: Vec<f64> = a0.matrix().data().iter().flat_map(|z| [z.re, z.im]).collect();
    let ratio = |x: &[f64]| -> f64 {
        let Some(rho) = state_from_reals(x, d) else { return 0.0 };
        let den = match relative_entropy(&rho, sigma) {
            Ok(v) if v >= 1e-10 => v,
            _ => return 0.0,
        };
        match phi.apply_state(&rho).and_then(|out| relative_entropy(&out, sigma)) {
            Ok(num) => num / den,
            Err(_) => 0.0,
        }
    };
    let (v, x) = one_plus_one(ratio, x0, 0.05, steps, &mut Rng::seeded(seed));
    let rho = state_from_reals(&x, d).ok_or(Error::NonFinite)?;
    Ok((v, rho))
}

/// `‖Φ*(log Φρ − log σ) − η(log ρ − log σ)‖`.
pub fn optimizer_residual(phi: &QuantumChannel, sigma: &DensityMatrix, rho: &DensityMatrix, eta: f64) -> Result<f64> {
    let ls = mat_log(sigma.hermitian())?.into_matrix();
    let out = phi.apply_state(rho)?;
    let lhs = phi.heisenberg(&(&mat_log(out.hermitian())?.into_matrix() - &ls))?;
    let rhs = (&mat_log(rho.hermitian())?.into_matrix() - &ls).scale_real(eta);
    Ok(op_norm(&(&lhs - &rhs)))
}

/// `max |||log Φρ − log σ||| / |||log ρ − log σ|||` over seeded full-rank states.
/// States whose image is rank deficient are skipped.
pub fn loglip_sample(
    phi: &QuantumChannel,
    sigma: &DensityMatrix,
    spec: &SeminormSpec,
    n_states: usize,
    seed: u64,
) -> Result<StateSample> {
    check_full_rank(sigma)?;
    let d = phi.dim();
    if spec.dim() != d {
        return Err(Error::DimensionMismatch { context: "seminorm size vs channel dim", expected: d, got: spec.dim() });
    }
    let ls = mat_log(sigma.hermitian())?.into_matrix();
    sample_max(n_states, seed, |i| {
        let rho = random_full_rank_state(d, &mut Rng::derived(seed, i as u64));
        let out = phi.apply_state(&rho)?;
        let Ok(lo) = mat_log(out.hermitian()) else { return Ok(None) };
        let den = seminorm(spec, &(&mat_log(rho.hermitian())?.into_matrix() - &ls))?;
        if den < 1e-12 {
            return Ok(None);
        }
        let num = seminorm(spec, &(&lo.into_matrix() - &ls))?;
        Ok(Some((num / den, rho.matrix().clone())))
    })
}

/// `|log(1+2(1−p)x) − log(1−2(1−p)x)| / |log(1+2x) − log(1−2x)|`.
pub fn f_p(p: f64, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p must lie in [0,1], got {p}")));
    }
    if x.abs() >= 0.5 || x == 0.0 {
        return Err(Error::OutOfRange(format!("x must satisfy 0 < |x| < 1/2, got {x}")));
    }
    let q = 1.0 - p;
    // atanh keeps precision near 0: log(1+2y) − log(1−2y) = 2 atanh(2y)
    Ok(((2.0 * q * x).atanh() / (2.0 * x).atanh()).abs())
}

/// `(1−ε)Φ + εR_σ` with `R_σ(ρ) = tr(ρ)σ`; strictly positive when `σ` is full rank.
pub fn lazy_channel(phi: &QuantumChannel, sigma: &DensityMatrix, eps: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange(format!("mixing weight must lie in [0,1], got {eps}")));
    }
    let d = phi.dim();
    let e = eig_hermitian(sigma.hermitian())?;
    let mut kraus: Vec<ComplexMatrix> = phi.kraus().iter().map(|k| k.scale_real((1.0 - eps).sqrt())).collect();
    for k in 0..d {
        let lam = e.eigenvalues[k].max(0.0);
        if lam == 0.0 {
            continue;
        }
        let v = e.vector(k);
        for j in 0..d {
            let mut ej = vec![C64::new(0.0, 0.0); d];
            ej[j] = C64::new(1.0, 0.0);
            kraus.push(ComplexMatrix::outer(&v, &ej).scale_real((eps * lam).sqrt()));
        }
    }
    QuantumChannel::new(kraus)
}

/// Both sides of `η^D ≤ max{Lip(Φ*∘Φ^{*,BKM}), Lip(Φ*)·LogLip}`.
#[derive(Clone, Debug, Serialize)]
pub struct EntropyUpperReport {
    pub lhs: f64,
    pub lip_heisenberg: f64,
    pub lip_composite: f64,
    pub loglip: f64,
    pub rhs: f64,
    pub margin: f64,
    pub slack: f64,
    pub passed: bool,
    pub samples: usize,
    pub seed: u64,
}

/// Images of this many pure states are checked for full rank.
pub const POSITIVITY_PROBES: usize = 100;

/// Estimates both sides and compares them with the given slack. All Lipschitz
/// quantities are ascent or sample lower bounds.
pub fn entropy_upper_check(
    phi: &QuantumChannel,
    spec: &SeminormSpec,
    n_states: usize,
    slack: f64,
    cfg: &AscentConfig,
) -> Result<EntropyUpperReport> {
    let d = phi.dim();
    let mut rng = Rng::seeded(derive_seed(cfg.seed, 3));
    for _ in 0..POSITIVITY_PROBES {
        let out = phi.apply_state(&haar_pure_state(d, &mut rng))?;
        let lo = eig_hermitian(out.hermitian())?.min_eigenvalue();
        if lo <= SUPPORT_TOL {
            return Err(Error::Assumption(format!(
                "channel is not strictly positive (output eigenvalue {lo:.3e}); use lazy_channel((1-eps)Phi + eps R_sigma)"
            )));
        }
    }
    let sigma = phi.fixed_state()?;
    let bkm = BkmOperator::new(&sigma)?;
    let lip_h = lip(phi, spec, cfg)?.lower;
    let lip_c = lip_super(&bkm.composite(phi), spec, cfg)?.lower;
    let ll = loglip_sample(phi, &sigma, spec, n_states, cfg.seed)?.max_ratio;
    let lhs = entropy_contraction_sample(phi, &sigma, n_states, cfg.seed)?.max_ratio;
    let rhs = lip_c.max(lip_h * ll);
    Ok(EntropyUpperReport {
        lhs,
        lip_heisenberg: lip_h,
        lip_composite: lip_c,
        loglip: ll,
        rhs,
        margin: rhs - lhs,
        slack,
        passed: lhs <= rhs + slack,
        samples: n_states,
        seed: cfg.seed,
    })
}
