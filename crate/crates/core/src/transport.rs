//! Transportation cost `Cost_S(Φ) = sup{‖Φ(X) − X‖ : X = X†, |||X||| ≤ 1}`, the
//! expected length `κ(S) = Cost_S(E_fix)`, the Wasserstein L-metric and the
//! pointwise inequalities behind subadditivity, the universal bound and convexity.
//!
//! Channels enter in the Heisenberg picture. Amplification `n` replaces `Φ` by
//! `id_n ⊗ Φ` and `S` by `{𝟏_n ⊗ s}`.

use rayon::prelude::*;
use serde::Serialize;

use crate::ascent::{maximize, one_plus_one, AscentConfig, Family, Objective, RatioProblem};
use crate::channel::{ConditionalExpectation, QuantumChannel, SuperOperator};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_basis, op_norm, real_coords, tensor, ComplexMatrix, DensityMatrix, HermitianMatrix, C64};
use crate::report::{CostReport, Method};
use crate::sampling::{derive_seed, haar_vector, random_hermitian, Rng};
use crate::seminorm::{ascent_report, dual_seminorm, seminorm, SeminormKind, SeminormSpec, DUAL_KERNEL_TOL};

/// Largest `‖Φ(K) − K‖_F` on the kernel basis for which `Φ` counts as fixing it.
pub const FIX_TOL: f64 = 1e-8;
/// Default number of Haar pure states in [`cost_via_states`].
pub const DEFAULT_STATES: usize = 256;
/// States refined by the evolution strategy in [`cost_via_states`].
pub const REFINE_TOP: usize = 4;
const REFINE_STEPS: usize = 60;

fn check_dim(phi: &SuperOperator, spec: &SeminormSpec) -> Result<()> {
    let d = spec.resource.dim();
    if phi.dim() != d {
        return Err(Error::DimensionMismatch { context: "channel dim vs resource dim", expected: d, got: phi.dim() });
    }
    Ok(())
}

/// `max ‖Φ_n(K) − K‖_F` over the kernel `𝕄_n ⊗ S′`.
pub fn commutant_defect(phi: &SuperOperator, spec: &SeminormSpec) -> f64 {
    phi.amplify(spec.amplification).fixed_defect(&spec.kernel_basis())
}

/// Ascent lower bound only. The upper field is the optimizer's heuristic
/// `lower·(1+gap)`, or `+∞` when the commutant is not fixed.
pub fn cost_ascent(phi: &SuperOperator, spec: &SeminormSpec, cfg: &AscentConfig) -> Result<CostReport> {
    cost_ascent_hinted(phi, spec, cfg, &[])
}

/// [`cost_ascent`] with the first restarts started from given witnesses,
/// expressed in coordinates of `spec.domain()`.
pub fn cost_ascent_hinted(
    phi: &SuperOperator,
    spec: &SeminormSpec,
    cfg: &AscentConfig,
    hints: &[Vec<f64>],
) -> Result<CostReport> {
    check_dim(phi, spec)?;
    let phi_n = phi.amplify(spec.amplification);
    let domain = spec.domain();
    let num = Objective::OpNorm(Family::from_map(&domain, |b| &phi_n.apply(b) - b));
    let problem = RatioProblem { dim: domain.len(), num, den: spec.objective(&domain) };
    let res = maximize(&problem, cfg, hints);
    let mut report = ascent_report(res, &domain, cfg, spec.amplification);
    let defect = phi_n.fixed_defect(&spec.kernel_basis());
    if defect > FIX_TOL {
        report.upper = f64::INFINITY;
        report.upper_method = Method::TheoryUpper;
        report.diagnostics.push(format!("commutant not fixed (defect {defect:.3e}): cost is infinite"));
    }
    Ok(report)
}

/// `sup ‖Φ(X) − X‖/‖X‖` over Hermitian `X` at amplification 1, by ascent.
pub fn distance_to_identity(phi: &SuperOperator, cfg: &AscentConfig) -> f64 {
    let basis = hermitian_basis(phi.dim());
    let num = Objective::OpNorm(Family::from_map(&basis, |b| &phi.apply(b) - b));
    let den = Objective::OpNorm(Family::new(basis.clone()));
    maximize(&RatioProblem { dim: basis.len(), num, den }, cfg, &[]).value
}

/// Bound on `‖Φ − id‖` for a unital CP map: twice the Hermitian estimate, capped by
/// the exact `‖Φ‖_cb + 1 = 2`.
pub fn distance_to_identity_bound(phi: &SuperOperator, cfg: &AscentConfig) -> f64 {
    (2.0 * distance_to_identity(phi, &AscentConfig::light(cfg.seed))).min(2.0)
}

/// Cost with the universal upper bound `κ(S)·‖Φ − id‖` attached when `Φ` fixes
/// the commutant. `phi` must be unital and completely positive for that bound.
pub fn cost_super(phi: &SuperOperator, spec: &SeminormSpec, cfg: &AscentConfig) -> Result<CostReport> {
    let mut report = cost_ascent(phi, spec, cfg)?;
    if report.upper.is_finite() && report.gap > 0.0 {
        let kappa = expected_length(spec, cfg)?;
        let norm = distance_to_identity_bound(phi, cfg);
        report.upper = kappa.heuristic_upper() * norm;
        report.upper_method = Method::TheoryUpper;
        report.diagnostics.push(format!(
            "upper = kappa_upper {:.6} * min(2*||Phi-id||_est, 2) {:.6}",
            kappa.heuristic_upper(),
            norm
        ));
    }
    Ok(report)
}

/// `Cost_S(Φ)` for a channel given by its Heisenberg action.
pub fn cost(phi: &QuantumChannel, spec: &SeminormSpec, cfg: &AscentConfig) -> Result<CostReport> {
    cost_super(&phi.heisenberg_super(), spec, cfg)
}

/// `κ(S)` at the spec's amplification, a lower estimate of the cb value.
pub fn expected_length(spec: &SeminormSpec, cfg: &AscentConfig) -> Result<CostReport> {
    let e = ConditionalExpectation::onto_commutant(&spec.resource);
    let mut r = cost_ascent(e.superoperator(), spec, cfg)?;
    r.diagnostics.push(format!("lower bound on the cb value (amplification {})", spec.amplification));
    Ok(r)
}

/// `W_L(ρ, σ)`, the dual seminorm of `ρ − σ`.
pub fn wasserstein(rho: &DensityMatrix, sigma: &DensityMatrix, spec: &SeminormSpec, cfg: &AscentConfig) -> Result<CostReport> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { context: "state dims", expected: rho.dim(), got: sigma.dim() });
    }
    let diff = HermitianMatrix::from_hermitian_part(&(rho.matrix() - sigma.matrix()));
    dual_seminorm(spec, &diff, cfg)
}

/// Reusable `W_L` evaluator: the domain and seminorm objective built once.
pub(crate) struct DualEval {
    pub(crate) domain: Vec<ComplexMatrix>,
    kernel: Vec<ComplexMatrix>,
    den: Objective,
}

impl DualEval {
    pub(crate) fn new(spec: &SeminormSpec) -> Self {
        let domain = spec.domain();
        let den = spec.objective(&domain);
        DualEval { domain, kernel: spec.kernel_basis(), den }
    }

    /// `(value, maximizing X)` for a traceless Hermitian functional.
    pub(crate) fn eval(&self, f: &ComplexMatrix, cfg: &AscentConfig) -> (f64, Option<Vec<f64>>) {
        let overlap = self.kernel.iter().map(|k| k.hs_inner(f).norm()).fold(0.0, f64::max);
        if overlap > DUAL_KERNEL_TOL {
            return (f64::INFINITY, None);
        }
        let coeffs = real_coords(f, &self.domain);
        let p = RatioProblem { dim: self.domain.len(), num: Objective::Linear(coeffs), den: self.den.clone() };
        let r = maximize(&p, cfg, &[]);
        (r.value, Some(r.x))
    }
}

pub(crate) fn pure(psi: &[C64]) -> ComplexMatrix {
    let n = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<C64> = psi.iter().map(|z| z / n).collect();
    ComplexMatrix::outer(&v, &v)
}

pub(crate) fn from_reals(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

/// Lower bound on the cost from `sup_ρ W_L(ρ, Φ_*ρ)` over sampled pure states.
///
/// A cheap inner dual evaluation screens `n_states` Haar states; the best few are
/// refined by a (1+1) evolution strategy on the state vector and re-evaluated
/// with the full budget. The witness is the best state.
pub fn cost_via_states(
    phi: &QuantumChannel,
    spec: &SeminormSpec,
    n_states: usize,
    cfg: &AscentConfig,
) -> Result<CostReport> {
    let heis = phi.heisenberg_super();
    check_dim(&heis, spec)?;
    let schro = heis.amplify(spec.amplification).adjoint();
    let n = spec.dim();
    let eval = DualEval::new(spec);
    let inner = AscentConfig::inner(cfg.seed);
    let w = |rho: &ComplexMatrix, c: &AscentConfig| {
        let f = (rho - &schro.apply(rho)).hermitian_part();
        eval.eval(&f, c).0
    };

    let mut rng = Rng::seeded(derive_seed(cfg.seed, 1));
    let states: Vec<Vec<C64>> = (0..n_states.max(1)).map(|_| haar_vector(n, &mut rng)).collect();
    let scores: Vec<f64> = states.par_iter().map(|psi| w(&pure(psi), &inner)).collect();
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    if scores[order[0]].is_infinite() {
        let mut r = CostReport::exact(f64::INFINITY, Method::SampleMax);
        r.diagnostics.push("commutant not fixed: W_L is unbounded".into());
        return Ok(r);
    }

    let top: Vec<usize> = order.iter().take(REFINE_TOP).cloned().collect();
    let refined: Vec<(f64, Vec<f64>)> = top
        .par_iter()
        .map(|&i| {
            let x0: Vec<f64> = states[i].iter().flat_map(|z| [z.re, z.im]).collect();
            let mut es_rng = Rng::derived(cfg.seed, 1000 + i as u64);
            one_plus_one(|x| w(&pure(&from_reals(x)), &inner), x0, 0.1, REFINE_STEPS, &mut es_rng)
        })
        .collect();
    let mut best = &refined[0];
    for r in &refined[1..] {
        if r.0 > best.0 {
            best = r;
        }
    }
    let rho = pure(&from_reals(&best.1));
    let full = w(&rho, cfg);
    let lower = full.max(best.0).max(scores[order[0]]);

    let mut r = CostReport::exact(lower, Method::AscentLower);
    r.upper = f64::INFINITY;
    r.upper_method = Method::TheoryUpper;
    r.gap = f64::INFINITY;
    r.witness = Some(rho);
    r.seed = cfg.seed;
    r.restarts = cfg.restarts;
    r.iterations = cfg.iterations;
    r.amplification = spec.amplification;
    r.diagnostics = vec![
        format!("{} Haar states, top {REFINE_TOP} refined", states.len()),
        "witness is the state rho maximizing W_L(rho, Phi_* rho)".into(),
        "lower bound only".into(),
    ];
    Ok(r)
}

/// `F = f₁ ⊗ 𝟏 + 𝟏 ⊗ f₂`.
pub fn tensor_witness(f1: &HermitianMatrix, f2: &HermitianMatrix) -> HermitianMatrix {
    let (d1, d2) = (f1.dim(), f2.dim());
    let m = &tensor(f1.matrix(), &ComplexMatrix::identity(d2)) + &tensor(&ComplexMatrix::identity(d1), f2.matrix());
    HermitianMatrix::from_hermitian_part(&m)
}

/// Joint displacement `‖(Φ₁⊗Φ₂)(F) − F‖` for the tensor witness built from local
/// witnesses, with signs chosen so the top eigenvalues of the local displacements
/// add up. Returns `(F, value)`.
pub fn superadditivity_lower(
    phi1: &QuantumChannel,
    w1: &ComplexMatrix,
    phi2: &QuantumChannel,
    w2: &ComplexMatrix,
) -> Result<(HermitianMatrix, f64)> {
    let orient = |phi: &QuantumChannel, w: &ComplexMatrix| -> Result<HermitianMatrix> {
        let y = (&phi.heisenberg(w)? - w).hermitian_part();
        let e = crate::linalg::jacobi(&y)?;
        let h = HermitianMatrix::from_hermitian_part(w);
        Ok(if e.max_eigenvalue() >= -e.min_eigenvalue() { h } else { h.scale(-1.0) })
    };
    let f = tensor_witness(&orient(phi1, w1)?, &orient(phi2, w2)?);
    let joint = phi1.tensor(phi2);
    let v = op_norm(&(&joint.heisenberg(f.matrix())? - f.matrix()));
    Ok((f, v))
}

/// One pointwise inequality checked over many instances.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub instances: usize,
    /// `min(rhs − lhs)`; negative beyond the slack means a violation.
    pub worst_margin: f64,
    pub slack: f64,
    pub passed: bool,
    pub note: Option<String>,
}

impl Check {
    fn new(name: &str, slack: f64) -> Self {
        Check { name: name.into(), instances: 0, worst_margin: f64::INFINITY, slack, passed: true, note: None }
    }

    fn record(&mut self, lhs: f64, rhs: f64) {
        self.instances += 1;
        let m = rhs - lhs;
        if m < self.worst_margin {
            self.worst_margin = m;
        }
        self.passed = self.worst_margin >= -self.slack;
    }

    fn skip(&mut self, why: String) {
        self.note = Some(why);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnessReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl HarnessReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Slack on the exact pointwise inequalities.
pub const POINTWISE_SLACK: f64 = 1e-10;

/// Pointwise checks over `samples` random Hermitian `x` cycling through channel pairs:
///
/// - composition: `‖ΦΨx − x‖ ≤ ‖ΦΨx − Ψx‖ + ‖Ψx − x‖`
/// - universal: `‖Φx − x‖ ≤ ‖(Φ−id)(x − Ex)‖ ≤ b_Φ·‖x − Ex‖` with `b_Φ` from
///   [`distance_to_identity_bound`]
/// - convexity: `‖(tΦ+(1−t)Ψ)x − x‖ ≤ t‖Φx − x‖ + (1−t)‖Ψx − x‖`
/// - lip bound: `|||Φx||| ≤ c_S·‖x − Ex‖`, `c_S = 2 sup‖s‖` (`2(Σ‖s‖²)^{1/2}` for L2)
///
/// The universal and lip checks need `Φ∘E = E`; channels failing that are noted.
pub fn property_harness_cost(
    channels: &[QuantumChannel],
    spec: &SeminormSpec,
    samples: usize,
    seed: u64,
) -> Result<HarnessReport> {
    if channels.is_empty() {
        return Err(Error::OutOfRange("harness needs at least one channel".into()));
    }
    let d = spec.resource.dim();
    let supers: Vec<SuperOperator> = channels.iter().map(|c| c.heisenberg_super()).collect();
    for s in &supers {
        check_dim(s, spec)?;
    }
    let local = SeminormSpec { amplification: 1, ..spec.clone() };
    let e = ConditionalExpectation::onto_commutant(&spec.resource);
    let es = e.superoperator();
    let fixes: Vec<bool> = supers
        .iter()
        .map(|s| s.compose(es).matrix().max_abs_diff(es.matrix()) <= FIX_TOL)
        .collect();
    let bounds: Vec<f64> = supers.iter().map(|s| distance_to_identity_bound(s, &AscentConfig::light(seed))).collect();
    let norms: Vec<f64> = spec.resource.elements().iter().map(op_norm).collect();
    let c_s = match spec.kind {
        SeminormKind::Linf => 2.0 * norms.iter().cloned().fold(0.0, f64::max),
        SeminormKind::L2 => 2.0 * norms.iter().map(|v| v * v).sum::<f64>().sqrt(),
    };

    let mut composition = Check::new("composition", POINTWISE_SLACK);
    let mut universal = Check::new("universal", POINTWISE_SLACK);
    let mut universal_norm = Check::new("universal-norm", POINTWISE_SLACK);
    let mut convexity = Check::new("convexity", POINTWISE_SLACK);
    let mut lip_bound = Check::new("lip-bound", POINTWISE_SLACK);
    let skipped: Vec<usize> = (0..supers.len()).filter(|&i| !fixes[i]).collect();
    if !skipped.is_empty() {
        let why = format!("channels {skipped:?} do not satisfy Phi o E = E; excluded");
        universal.skip(why.clone());
        universal_norm.skip(why.clone());
        lip_bound.skip(why);
    }

    let m = supers.len();
    let mut rng = Rng::seeded(seed);
    for k in 0..samples {
        let (i, j) = (k % m, (k / m) % m);
        let (phi, psi) = (&supers[i], &supers[j]);
        let x = random_hermitian(d, &mut rng).into_matrix();
        let t = rng.uniform();

        let px = phi.apply(&x);
        let qx = psi.apply(&x);
        let pqx = phi.apply(&qx);
        composition.record(op_norm(&(&pqx - &x)), op_norm(&(&pqx - &qx)) + op_norm(&(&qx - &x)));

        let mix = &px.scale_real(t) + &qx.scale_real(1.0 - t);
        convexity.record(op_norm(&(&mix - &x)), t * op_norm(&(&px - &x)) + (1.0 - t) * op_norm(&(&qx - &x)));

        if fixes[i] {
            let y = &x - &e.apply(&x);
            let moved = op_norm(&(&phi.apply(&y) - &y));
            universal.record(op_norm(&(&px - &x)), moved);
            universal_norm.record(moved, bounds[i] * op_norm(&y));
            lip_bound.record(seminorm(&local, &px)?, c_s * op_norm(&y));
        }
    }
    Ok(HarnessReport { seed, checks: vec![composition, universal, universal_norm, convexity, lip_bound] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seminorm::ResourceSet;

    const KAPPA_PAULI: f64 = 0.612_372_435_695_794_5; // √6/4

    fn pauli_spec() -> SeminormSpec {
        SeminormSpec::linf(ResourceSet::pauli())
    }

    #[test]
    fn identity_costs_nothing() {
        let r = cost(&QuantumChannel::identity(2), &pauli_spec(), &AscentConfig::light(0)).unwrap();
        assert_eq!(r.lower, 0.0);
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn depolarizing_cost_matches_oracle() {
        let cfg = AscentConfig { restarts: 64, iterations: 300, ..Default::default() };
        let spec = pauli_spec();
        let k = expected_length(&spec, &cfg).unwrap();
        assert!((k.lower - KAPPA_PAULI).abs() < 1e-6 * KAPPA_PAULI, "{}", k.lower);
        let r = cost(&QuantumChannel::depolarizing(2, 0.5).unwrap(), &spec, &cfg).unwrap();
        assert!((r.lower - 0.5 * KAPPA_PAULI).abs() < 1e-6, "{}", r.lower);
        assert!(r.upper >= r.lower && r.upper.is_finite());
        let w = r.witness.unwrap();
        assert!((seminorm(&spec, &w).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn unfixed_commutant_reports_infinite_upper() {
        // Pauli-xy commutes with no non-scalar, so use a single Z: commutant is diagonal
        let spec = SeminormSpec::linf(ResourceSet::single(crate::linalg::pauli(crate::linalg::Pauli::Z)).unwrap());
        let h = ComplexMatrix::from_fn(2, 2, |_, _| C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        let mut h = h;
        h[(1, 1)] = -h[(1, 1)];
        let r = cost(&QuantumChannel::unitary(h).unwrap(), &spec, &AscentConfig::light(0)).unwrap();
        assert!(r.upper.is_infinite());
        assert!(r.diagnostics.iter().any(|s| s.contains("infinite")));
    }

    #[test]
    fn wasserstein_examples() {
        let spec = pauli_spec();
        let cfg = AscentConfig::light(0);
        let (a, b) = (DensityMatrix::basis(2, 0), DensityMatrix::basis(2, 1));
        assert_eq!(wasserstein(&a, &a, &spec, &cfg).unwrap().lower, 0.0);
        let w = wasserstein(&a, &b, &spec, &cfg).unwrap().lower;
        assert!((w - 1.0).abs() < 1e-6, "{w}");
        let w2 = wasserstein(&b, &a, &spec, &cfg).unwrap().lower;
        assert!((w - w2).abs() < 1e-6);
    }

    #[test]
    fn states_route_agrees() {
        let cfg = AscentConfig::light(0);
        let spec = pauli_spec();
        let r = cost_via_states(&QuantumChannel::depolarizing(2, 0.5).unwrap(), &spec, 64, &cfg).unwrap();
        assert!((r.lower / (0.5 * KAPPA_PAULI) - 1.0).abs() < 0.02, "{}", r.lower);
        let id = cost_via_states(&QuantumChannel::identity(2), &spec, 16, &cfg).unwrap();
        assert_eq!(id.lower, 0.0);
    }

    #[test]
    fn tensor_witness_reduces_and_adds() {
        let mut rng = Rng::seeded(3);
        let f1 = random_hermitian(2, &mut rng);
        let f = tensor_witness(&f1, &HermitianMatrix::zeros(2));
        assert!(f.matrix().max_abs_diff(&tensor(f1.matrix(), &ComplexMatrix::identity(2))) == 0.0);
        let joint = SeminormSpec::linf(ResourceSet::pauli().join(&ResourceSet::pauli()));
        let f2 = random_hermitian(2, &mut rng);
        let both = tensor_witness(&f1, &f2);
        let s1 = seminorm(&pauli_spec(), f1.matrix()).unwrap();
        let s2 = seminorm(&pauli_spec(), f2.matrix()).unwrap();
        assert!((seminorm(&joint, both.matrix()).unwrap() - s1.max(s2)).abs() < 1e-10);
    }

    #[test]
    fn harness_on_depolarizing_and_random() {
        let mut chans: Vec<QuantumChannel> = [0.1, 0.5, 0.9].iter().map(|&p| QuantumChannel::depolarizing(2, p).unwrap()).collect();
        let mut rng = Rng::seeded(9);
        chans.push(crate::sampling::random_unital_channel(2, 3, &mut rng));
        let r = property_harness_cost(&chans, &pauli_spec(), 200, 0).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.checks.iter().all(|c| c.instances > 0));
    }
}
