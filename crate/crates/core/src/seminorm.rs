//! Commutator Lipschitz seminorms and their duals.
//!
//! For a resource set `S` and amplification `n` the two seminorms on `𝕄_n ⊗ 𝕄_d` are
//!
//! - `LINF`: `max_s ‖[𝟏_n ⊗ s, X]‖`,
//! - `L2`:   `‖Σ_s [𝟏_n ⊗ s, X]† [𝟏_n ⊗ s, X]‖^{1/2}`.
//!
//! Both vanish exactly on `𝕄_n ⊗ S′`; optimization happens on the
//! Hilbert–Schmidt complement of that kernel.

use serde::{Deserialize, Serialize};

use crate::ascent::{combine, maximize, AscentConfig, Family, Objective, RatioProblem};
use crate::channel::{commutant_of, orthogonal_complement};
use crate::error::{Error, Result};
use crate::linalg::{c, gell_mann, hermitian_basis, jacobi, op_norm, pauli, tensor, ComplexMatrix, HermitianMatrix, Pauli};
use crate::report::{CostReport, Method};

/// Resource-set file format `{"dim": d, "elements": [matrix, ...], "labels": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResourceJson {
    pub dim: usize,
    pub elements: Vec<ComplexMatrix>,
    #[serde(default)]
    pub labels: Vec<String>,
}

/// Finite list of `d×d` matrices defining commutator seminorms.
#[derive(Clone, Debug, PartialEq)]
pub struct ResourceSet {
    dim: usize,
    elements: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

impl ResourceSet {
    pub fn new(elements: Vec<ComplexMatrix>, labels: Option<Vec<String>>) -> Result<Self> {
        let first = elements.first().ok_or_else(|| Error::InvalidResource("resource set is empty".into()))?;
        let d = first.rows();
        for (i, s) in elements.iter().enumerate() {
            if !s.is_square() || s.rows() != d {
                return Err(Error::InvalidResource(format!("element {i} is {}x{}, expected {d}x{d}", s.rows(), s.cols())));
            }
        }
        let labels = match labels {
            Some(l) if l.len() == elements.len() => l,
            Some(l) if !l.is_empty() => {
                return Err(Error::InvalidResource(format!("{} labels for {} elements", l.len(), elements.len())))
            }
            _ => (0..elements.len()).map(|i| format!("s{i}")).collect(),
        };
        Ok(ResourceSet { dim: d, elements, labels })
    }

    pub fn from_json(j: ResourceJson) -> Result<Self> {
        let labels = if j.labels.is_empty() { None } else { Some(j.labels) };
        let s = Self::new(j.elements, labels)?;
        if s.dim != j.dim {
            return Err(Error::InvalidResource(format!("\"dim\" is {} but elements are {}x{}", j.dim, s.dim, s.dim)));
        }
        Ok(s)
    }

    pub fn to_json(&self) -> ResourceJson {
        ResourceJson { dim: self.dim, elements: self.elements.clone(), labels: self.labels.clone() }
    }

    /// `{σ_x, σ_y, σ_z}`.
    pub fn pauli() -> Self {
        let els = vec![pauli(Pauli::X), pauli(Pauli::Y), pauli(Pauli::Z)];
        Self::new(els, Some(vec!["X".into(), "Y".into(), "Z".into()])).expect("valid")
    }

    /// `{σ_x, σ_y}`.
    pub fn pauli_xy() -> Self {
        Self::new(vec![pauli(Pauli::X), pauli(Pauli::Y)], Some(vec!["X".into(), "Y".into()])).expect("valid")
    }

    /// Generalized Gell-Mann matrices of 𝕄_d.
    pub fn gell_mann(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidResource("Gell-Mann set needs d ≥ 2".into()));
        }
        Self::new(gell_mann(d), None)
    }

    pub fn single(m: ComplexMatrix) -> Result<Self> {
        Self::new(vec![m], None)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Every element multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        ResourceSet {
            dim: self.dim,
            elements: self.elements.iter().map(|s| s.scale_real(c)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// `sup_s ‖s‖`.
    pub fn max_norm(&self) -> f64 {
        self.elements.iter().map(op_norm).fold(0.0, f64::max)
    }

    /// `S₁ ∨ S₂ = {s ⊗ 𝟏} ∪ {𝟏 ⊗ t}` on the joint system.
    pub fn join(&self, other: &Self) -> Self {
        let i1 = ComplexMatrix::identity(self.dim);
        let i2 = ComplexMatrix::identity(other.dim);
        let mut elements: Vec<ComplexMatrix> = self.elements.iter().map(|s| tensor(s, &i2)).collect();
        elements.extend(other.elements.iter().map(|t| tensor(&i1, t)));
        let mut labels: Vec<String> = self.labels.iter().map(|l| format!("{l}⊗1")).collect();
        labels.extend(other.labels.iter().map(|l| format!("1⊗{l}")));
        ResourceSet { dim: self.dim * other.dim, elements, labels }
    }

    /// `{𝟏_n ⊗ s}`.
    pub fn amplified(&self, n: usize) -> Vec<ComplexMatrix> {
        if n == 1 {
            return self.elements.clone();
        }
        let id = ComplexMatrix::identity(n);
        self.elements.iter().map(|s| tensor(&id, s)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeminormKind {
    Linf,
    L2,
}

/// A commutator seminorm at a fixed amplification level.
#[derive(Clone, Debug)]
pub struct SeminormSpec {
    pub resource: ResourceSet,
    pub kind: SeminormKind,
    pub amplification: usize,
}

impl SeminormSpec {
    pub fn new(resource: ResourceSet, kind: SeminormKind, amplification: usize) -> Result<Self> {
        if amplification == 0 {
            return Err(Error::OutOfRange("amplification must be ≥ 1".into()));
        }
        Ok(SeminormSpec { resource, kind, amplification })
    }

    pub fn linf(resource: ResourceSet) -> Self {
        SeminormSpec { resource, kind: SeminormKind::Linf, amplification: 1 }
    }

    pub fn l2(resource: ResourceSet) -> Self {
        SeminormSpec { resource, kind: SeminormKind::L2, amplification: 1 }
    }

    pub fn with_amplification(mut self, n: usize) -> Self {
        self.amplification = n.max(1);
        self
    }

    /// Matrix size `n·d` the seminorm acts on.
    pub fn dim(&self) -> usize {
        self.amplification * self.resource.dim()
    }

    /// Orthonormal Hermitian basis of the kernel `𝕄_n ⊗ S′`.
    pub fn kernel_basis(&self) -> Vec<ComplexMatrix> {
        let comm = commutant_of(self.resource.elements(), self.resource.dim());
        lift(&hermitian_basis(self.amplification), &comm)
    }

    /// Orthonormal Hermitian basis of the complement of the kernel.
    pub fn domain(&self) -> Vec<ComplexMatrix> {
        let d = self.resource.dim();
        let comm = commutant_of(self.resource.elements(), d);
        let compl = orthogonal_complement(&comm, d);
        lift(&hermitian_basis(self.amplification), &compl)
    }

    /// The seminorm as an [`Objective`] on coordinates in `basis`.
    pub fn objective(&self, basis: &[ComplexMatrix]) -> Objective {
        let fams: Vec<Family> = self
            .resource
            .amplified(self.amplification)
            .iter()
            .map(|s| Family::from_map(basis, |b| s.commutator(b)))
            .collect();
        match self.kind {
            SeminormKind::Linf => Objective::MaxOpNorm(fams),
            SeminormKind::L2 => Objective::GramRoot(fams),
        }
    }

    /// The seminorm of a matrix of size `n·d`.
    pub fn evaluate(&self, x: &ComplexMatrix) -> Result<f64> {
        seminorm(self, x)
    }
}

fn lift(outer: &[ComplexMatrix], inner: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    if outer.len() == 1 && outer[0].rows() == 1 {
        return inner.to_vec();
    }
    outer.iter().flat_map(|a| inner.iter().map(move |b| tensor(a, b))).collect()
}

/// Direct evaluation of the seminorm.
pub fn seminorm(spec: &SeminormSpec, x: &ComplexMatrix) -> Result<f64> {
    let n = spec.dim();
    if !x.is_square() || x.rows() != n {
        return Err(Error::DimensionMismatch { context: "seminorm input size vs n*d", expected: n, got: x.rows() });
    }
    let comms: Vec<ComplexMatrix> = spec.resource.amplified(spec.amplification).iter().map(|s| s.commutator(x)).collect();
    Ok(match spec.kind {
        SeminormKind::Linf => comms.iter().map(op_norm).fold(0.0, f64::max),
        SeminormKind::L2 => {
            let mut g = ComplexMatrix::zeros(n, n);
            for m in &comms {
                g = &g + &(&m.adjoint() * m);
            }
            jacobi(&g)?.max_eigenvalue().max(0.0).sqrt()
        }
    })
}

/// Tolerance on `tr f` and on the overlap of `f` with the seminorm kernel.
pub const DUAL_TRACE_TOL: f64 = 1e-10;
pub const DUAL_KERNEL_TOL: f64 = 1e-9;

/// `sup{|tr(fX)| : X = X†, |||X||| ≤ 1}`, by ratio ascent over the kernel complement.
///
/// The upper bound is `lower·(1+gap)` from the stagnation heuristic, not a proof.
pub fn dual_seminorm(spec: &SeminormSpec, f: &HermitianMatrix, cfg: &AscentConfig) -> Result<CostReport> {
    let n = spec.dim();
    if f.dim() != n {
        return Err(Error::DimensionMismatch { context: "functional size vs n*d", expected: n, got: f.dim() });
    }
    let tr = f.trace();
    if tr.abs() > DUAL_TRACE_TOL {
        return Err(Error::OutOfRange(format!("functional must be traceless, trace is {tr:.3e}")));
    }
    let overlap = spec
        .kernel_basis()
        .iter()
        .map(|k| k.hs_inner(f.matrix()).norm())
        .fold(0.0, f64::max);
    if overlap > DUAL_KERNEL_TOL {
        return Err(Error::Unbounded(overlap));
    }
    let domain = spec.domain();
    let coeffs: Vec<f64> = domain.iter().map(|b| b.hs_inner(f.matrix()).re).collect();
    let problem = RatioProblem { dim: domain.len(), num: Objective::Linear(coeffs), den: spec.objective(&domain) };
    let res = maximize(&problem, cfg, &[]);
    Ok(ascent_report(res, &domain, cfg, spec.amplification))
}

/// Packs an ascent outcome into a report with a heuristic upper bound.
pub(crate) fn ascent_report(
    res: crate::ascent::AscentResult,
    domain: &[ComplexMatrix],
    cfg: &AscentConfig,
    amplification: usize,
) -> CostReport {
    let witness = if domain.is_empty() { None } else { Some(combine(domain, &res.x).hermitian_part()) };
    let mut diagnostics = vec![format!("best restart {}", res.best_restart)];
    if res.flat {
        diagnostics.push("flat ratio: all random starts agree".into());
    } else {
        diagnostics.push("upper = lower*(1+gap), stagnation heuristic".into());
    }
    CostReport {
        lower: res.value,
        lower_method: Method::AscentLower,
        upper: res.value * (1.0 + res.gap),
        upper_method: Method::AscentLower,
        gap: res.gap,
        witness,
        seed: cfg.seed,
        restarts: cfg.restarts,
        iterations: cfg.iterations,
        amplification,
        diagnostics,
    }
}

/// `2·max{√(v₁²+v₂²), √(v₂²+v₃²), √(v₁²+v₃²)}` for `X = v₀𝟏 + v·σ`.
pub fn pauli_closed_form(v: [f64; 4]) -> f64 {
    let (a, b, d) = (v[1], v[2], v[3]);
    2.0 * (a * a + b * b).max(b * b + d * d).max(a * a + d * d).sqrt()
}

/// Matrix of `i·s` for each element, as used by representation seminorms.
pub fn times_i(s: &ResourceSet) -> ResourceSet {
    ResourceSet {
        dim: s.dim,
        elements: s.elements.iter().map(|m| m.scale(c(0.0, 1.0))).collect(),
        labels: s.labels.iter().map(|l| format!("i{l}")).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli_decompose;
    use crate::sampling::{random_hermitian, Rng};

    #[test]
    fn examples() {
        let spec = SeminormSpec::linf(ResourceSet::pauli());
        assert_eq!(seminorm(&spec, &ComplexMatrix::identity(2)).unwrap(), 0.0);
        let x_only = SeminormSpec::linf(ResourceSet::single(pauli(Pauli::X)).unwrap());
        assert!((seminorm(&x_only, &pauli(Pauli::Z)).unwrap() - 2.0).abs() < 1e-14);
        assert!(seminorm(&spec, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn pauli_closed_form_matches() {
        let spec = SeminormSpec::linf(ResourceSet::pauli());
        let mut rng = Rng::seeded(1);
        for _ in 0..200 {
            let x = random_hermitian(2, &mut rng);
            let v = pauli_decompose(&x).unwrap();
            assert!((seminorm(&spec, x.matrix()).unwrap() - pauli_closed_form(v)).abs() < 1e-10);
        }
    }

    #[test]
    fn empty_and_mismatched_resources_are_rejected() {
        assert!(ResourceSet::new(vec![], None).is_err());
        assert!(ResourceSet::new(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)], None).is_err());
        let j = ResourceJson { dim: 3, elements: vec![ComplexMatrix::identity(2)], labels: vec![] };
        assert!(ResourceSet::from_json(j).is_err());
    }

    #[test]
    fn domain_and_kernel_split_the_space() {
        for (s, n) in [(ResourceSet::pauli(), 1), (ResourceSet::pauli(), 2), (ResourceSet::single(pauli(Pauli::Z)).unwrap(), 2)] {
            let spec = SeminormSpec::linf(s).with_amplification(n);
            let (k, dom) = (spec.kernel_basis(), spec.domain());
            assert_eq!(k.len() + dom.len(), spec.dim() * spec.dim());
            for a in &k {
                assert!(seminorm(&spec, a).unwrap() < 1e-10);
                for b in &dom {
                    assert!(a.hs_inner(b).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dual_rejects_bad_functionals() {
        let spec = SeminormSpec::linf(ResourceSet::single(pauli(Pauli::Z)).unwrap());
        let cfg = AscentConfig::light(0);
        let traced = HermitianMatrix::identity(2);
        assert!(matches!(dual_seminorm(&spec, &traced, &cfg), Err(Error::OutOfRange(_))));
        // σ_z commutes with σ_z, so pairing with it is unbounded
        let z = HermitianMatrix::new(pauli(Pauli::Z)).unwrap();
        assert!(matches!(dual_seminorm(&spec, &z, &cfg), Err(Error::Unbounded(_))));
    }
}
