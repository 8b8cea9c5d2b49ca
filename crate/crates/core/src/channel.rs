//! Quantum channels, superoperators, commutants and conditional expectations.
//!
//! Conventions: a [`QuantumChannel`] is a Kraus bundle `{K_i}` with Heisenberg
//! action `X ↦ Σ K_i† X K_i` and Schrödinger action `ρ ↦ Σ K_i ρ K_i†`. Analysis
//! code works with [`SuperOperator`]s, the `d²×d²` matrices of a linear map on
//! row-major `vec(X)`; iterated channels, conditional expectations and
//! BKM-composed maps all live there.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, eig_hermitian, hermitian_basis, jacobi, tensor, ComplexMatrix, DensityMatrix,
    HermitianMatrix, C64,
};
use crate::sampling::{random_matrix, Rng};
use crate::seminorm::ResourceSet;

/// Tolerance on `Σ K†K = 𝟏` and `Σ KK† = 𝟏`.
pub const CHANNEL_TOL: f64 = 1e-10;
/// Smallest Choi eigenvalue accepted by the CP-order test.
pub const CP_ORDER_TOL: f64 = 1e-9;
/// Relative cutoff on Gram eigenvalues for the commutant nullspace.
pub const COMMUTANT_NULL_REL: f64 = 1e-10;
/// Relative cutoff on Gram eigenvalues of `S − I` for fixed points.
pub const FIXED_NULL_REL: f64 = 1e-12;

/// A linear map on 𝕄_d as a `d²×d²` matrix acting on row-major `vec(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    d: usize,
    mat: ComplexMatrix,
}

impl SuperOperator {
    /// Tabulates `f` on the matrix units `E_ij`.
    pub fn from_map(d: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let n = d * d;
        let mut mat = ComplexMatrix::zeros(n, n);
        for i in 0..d {
            for j in 0..d {
                let mut e = ComplexMatrix::zeros(d, d);
                e[(i, j)] = c(1.0, 0.0);
                let y = f(&e);
                let col = i * d + j;
                for (r, z) in y.data().iter().enumerate() {
                    mat[(r, col)] = *z;
                }
            }
        }
        SuperOperator { d, mat }
    }

    pub fn from_matrix(d: usize, mat: ComplexMatrix) -> Result<Self> {
        if mat.rows() != d * d || mat.cols() != d * d {
            return Err(Error::DimensionMismatch {
                context: "superoperator matrix size vs d^2",
                expected: d * d,
                got: mat.rows(),
            });
        }
        Ok(SuperOperator { d, mat })
    }

    pub fn identity(d: usize) -> Self {
        SuperOperator { d, mat: ComplexMatrix::identity(d * d) }
    }

    pub fn zero(d: usize) -> Self {
        SuperOperator { d, mat: ComplexMatrix::zeros(d * d, d * d) }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// # Panics
    /// If `x` is not `d×d`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert!(x.rows() == self.d && x.cols() == self.d, "superoperator input has wrong size");
        let y = self.mat.matvec(x.data());
        ComplexMatrix::from_raw(self.d, self.d, y)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        debug_assert_eq!(self.d, other.d);
        SuperOperator { d: self.d, mat: &self.mat * &other.mat }
    }

    /// Hilbert–Schmidt adjoint; turns a Heisenberg map into its Schrödinger dual.
    pub fn adjoint(&self) -> Self {
        SuperOperator { d: self.d, mat: self.mat.adjoint() }
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut result = Self::identity(self.d);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.compose(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base);
            }
        }
        result
    }

    pub fn add(&self, other: &Self) -> Self {
        SuperOperator { d: self.d, mat: &self.mat + &other.mat }
    }

    pub fn sub(&self, other: &Self) -> Self {
        SuperOperator { d: self.d, mat: &self.mat - &other.mat }
    }

    pub fn scale(&self, s: f64) -> Self {
        SuperOperator { d: self.d, mat: self.mat.scale_real(s) }
    }

    /// `id_{𝕄_n} ⊗ Φ`, acting blockwise on `n×n` block matrices.
    pub fn amplify(&self, n: usize) -> Self {
        if n == 1 {
            return self.clone();
        }
        let d = self.d;
        SuperOperator::from_map(n * d, |x| {
            let mut y = ComplexMatrix::zeros(n * d, n * d);
            for a in 0..n {
                for b in 0..n {
                    let blk = x.block(a * d, b * d, d, d);
                    if blk.max_abs() != 0.0 {
                        y.set_block(a * d, b * d, &self.apply(&blk));
                    }
                }
            }
            y
        })
    }

    /// `Φ ⊗ Ψ` on `𝕄_{d₁} ⊗ 𝕄_{d₂}`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (d1, d2) = (self.d, other.d);
        let d = d1 * d2;
        SuperOperator::from_map(d, |e| {
            // e is a matrix unit E_{(a,c),(b,f)} = E_ab ⊗ E_cf
            let idx = e.data().iter().position(|z| z.re != 0.0).expect("matrix unit");
            let (row, col) = (idx / d, idx % d);
            let mut ea = ComplexMatrix::zeros(d1, d1);
            ea[(row / d2, col / d2)] = c(1.0, 0.0);
            let mut eb = ComplexMatrix::zeros(d2, d2);
            eb[(row % d2, col % d2)] = c(1.0, 0.0);
            tensor(&self.apply(&ea), &other.apply(&eb))
        })
    }

    /// Choi matrix `Σ E_ij ⊗ Φ(E_ij)`.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.d;
        let mut ch = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        ch[(i * d + k, j * d + l)] = self.mat[(k * d + l, i * d + j)];
                    }
                }
            }
        }
        ch
    }

    /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let e = jacobi(&self.choi().hermitian_part()).expect("Jacobi converges on Choi matrix");
        e.min_eigenvalue()
    }

    pub fn is_cp(&self) -> bool {
        self.choi_min_eigenvalue() >= -CP_ORDER_TOL
    }

    /// Largest `‖Φ(B) − B‖_F` over the given matrices.
    pub fn fixed_defect(&self, xs: &[ComplexMatrix]) -> f64 {
        xs.iter().map(|x| (&self.apply(x) - x).frobenius_norm()).fold(0.0, f64::max)
    }

    /// Kraus operators `{K}` with `Φ(X) = Σ K† X K`, from the Choi spectrum.
    ///
    /// Fails when the Choi matrix is not PSD within [`CP_ORDER_TOL`].
    pub fn heisenberg_kraus(&self) -> Result<Vec<ComplexMatrix>> {
        let d = self.d;
        let ch = self.choi().hermitian_part();
        let e = jacobi(&ch)?;
        if e.min_eigenvalue() < -CP_ORDER_TOL {
            return Err(Error::Assumption(format!(
                "map is not completely positive (Choi eigenvalue {:.3e})",
                e.min_eigenvalue()
            )));
        }
        let cutoff = 1e-14 * e.max_eigenvalue().abs().max(1.0);
        let mut out = Vec::new();
        for (k, &lam) in e.eigenvalues.iter().enumerate() {
            if lam <= cutoff {
                continue;
            }
            let w = e.vector(k);
            let s = lam.sqrt();
            // Φ(X) = Σ A X A† with A[r,i] = √λ w[i·d + r]; K = A†
            let a = ComplexMatrix::from_fn(d, d, |r, i| w[i * d + r] * s);
            out.push(a.adjoint());
        }
        Ok(out)
    }
}

/// Channel file format `{"dim": d, "kraus": [matrix, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim: usize,
    pub kraus: Vec<ComplexMatrix>,
}

/// Kraus representation with both pictures.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    unital: bool,
    trace_preserving: bool,
}

impl QuantumChannel {
    /// Validates shapes and records which of unitality and trace preservation hold.
    /// At least one of them is required.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::OutOfRange("empty Kraus list".into()))?;
        let d = first.rows();
        for k in &kraus {
            if !k.is_square() || k.rows() != d {
                return Err(Error::DimensionMismatch {
                    context: "Kraus operator size",
                    expected: d,
                    got: if k.rows() != d { k.rows() } else { k.cols() },
                });
            }
        }
        let mut tp = ComplexMatrix::zeros(d, d);
        let mut un = ComplexMatrix::zeros(d, d);
        for k in &kraus {
            tp = &tp + &(&k.adjoint() * k);
            un = &un + &(k * &k.adjoint());
        }
        let id = ComplexMatrix::identity(d);
        let trace_preserving = tp.max_abs_diff(&id) <= CHANNEL_TOL;
        let unital = un.max_abs_diff(&id) <= CHANNEL_TOL;
        if !trace_preserving && !unital {
            return Err(Error::Assumption(
                "Kraus operators are neither trace preserving nor unital".into(),
            ));
        }
        Ok(QuantumChannel { dim: d, kraus, unital, trace_preserving })
    }

    pub fn from_json(j: ChannelJson) -> Result<Self> {
        let ch = Self::new(j.kraus)?;
        if ch.dim != j.dim {
            return Err(Error::DimensionMismatch {
                context: "channel \"dim\" vs Kraus size",
                expected: j.dim,
                got: ch.dim,
            });
        }
        Ok(ch)
    }

    pub fn to_json(&self) -> ChannelJson {
        ChannelJson { dim: self.dim, kraus: self.kraus.clone() }
    }

    pub fn identity(d: usize) -> Self {
        QuantumChannel {
            dim: d,
            kraus: vec![ComplexMatrix::identity(d)],
            unital: true,
            trace_preserving: true,
        }
    }

    /// `ρ ↦ (1−p)ρ + p·tr(ρ)𝟏/d`, via the Weyl twirl.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || d == 0 {
            return Err(Error::OutOfRange(format!("depolarizing needs d ≥ 1 and p ∈ [0,1], got d={d}, p={p}")));
        }
        let d2 = (d * d) as f64;
        let mut kraus = vec![ComplexMatrix::identity(d).scale_real((1.0 - p + p / d2).sqrt())];
        if p > 0.0 {
            let w = (p / d2).sqrt();
            for a in 0..d {
                for b in 0..d {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    kraus.push(weyl(d, a, b).scale_real(w));
                }
            }
        }
        Ok(QuantumChannel { dim: d, kraus, unital: true, trace_preserving: true })
    }

    /// Conjugation channel: Heisenberg `X ↦ U†XU`, Schrödinger `ρ ↦ UρU†`.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch { context: "unitary must be square", expected: u.rows(), got: u.cols() });
        }
        let defect = (&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(u.rows()));
        if defect > CHANNEL_TOL {
            return Err(Error::OutOfRange(format!("matrix is not unitary (defect {defect:.3e})")));
        }
        Ok(QuantumChannel { dim: u.rows(), kraus: vec![u], unital: true, trace_preserving: true })
    }

    /// `ρ ↦ tr(ρ)σ`.
    pub fn replacer(sigma: &DensityMatrix) -> Result<Self> {
        let d = sigma.dim();
        let e = eig_hermitian(sigma.hermitian())?;
        let mut kraus = Vec::new();
        for (i, &lam) in e.eigenvalues.iter().enumerate() {
            if lam <= 0.0 {
                continue;
            }
            let v = e.vector(i);
            for j in 0..d {
                let mut ej = vec![C64::new(0.0, 0.0); d];
                ej[j] = c(1.0, 0.0);
                kraus.push(ComplexMatrix::outer(&v, &ej).scale_real(lam.sqrt()));
            }
        }
        Self::new(kraus)
    }

    /// Qubit Pauli channel `ρ ↦ (1−Σp)ρ + p_x XρX + p_y YρY + p_z ZρZ`.
    pub fn pauli(px: f64, py: f64, pz: f64) -> Result<Self> {
        use crate::linalg::{pauli, Pauli};
        let total = px + py + pz;
        if px < 0.0 || py < 0.0 || pz < 0.0 || total > 1.0 + 1e-12 {
            return Err(Error::OutOfRange(format!("Pauli probabilities ({px}, {py}, {pz}) must be ≥ 0 with sum ≤ 1")));
        }
        let mut kraus = vec![ComplexMatrix::identity(2).scale_real((1.0 - total).max(0.0).sqrt())];
        for (w, m) in [(px, Pauli::X), (py, Pauli::Y), (pz, Pauli::Z)] {
            if w > 0.0 {
                kraus.push(pauli(m).scale_real(w.sqrt()));
            }
        }
        Ok(QuantumChannel { dim: 2, kraus, unital: true, trace_preserving: true })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    fn check_dim(&self, x: &ComplexMatrix) -> Result<()> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                context: "channel input size",
                expected: self.dim,
                got: if x.rows() != self.dim { x.rows() } else { x.cols() },
            });
        }
        Ok(())
    }

    /// `Σ K† X K`.
    pub fn heisenberg(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(x)?;
        let mut y = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            y = &y + &(&(&k.adjoint() * x) * k);
        }
        Ok(y)
    }

    /// `Σ K ρ K†`.
    pub fn schrodinger(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(rho)?;
        let mut y = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            y = &y + &(&(k * rho) * &k.adjoint());
        }
        Ok(y)
    }

    /// Output state of the Schrödinger action on a state.
    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_channel_output(&self.schrodinger(rho.matrix())?))
    }

    /// Heisenberg composition `Φ∘Ψ`: `X ↦ Φ(Ψ(X))`, Kraus `{K_Ψ K_Φ}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { context: "composed channel dims", expected: self.dim, got: other.dim });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for kphi in &self.kraus {
            for kpsi in &other.kraus {
                kraus.push(kpsi * kphi);
            }
        }
        Ok(QuantumChannel {
            dim: self.dim,
            kraus,
            unital: self.unital && other.unital,
            trace_preserving: self.trace_preserving && other.trace_preserving,
        })
    }

    /// `Φ ⊗ Ψ` with Kraus `{K ⊗ L}`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(tensor(a, b));
            }
        }
        QuantumChannel {
            dim: self.dim * other.dim,
            kraus,
            unital: self.unital && other.unital,
            trace_preserving: self.trace_preserving && other.trace_preserving,
        }
    }

    /// `id_{𝕄_n} ⊗ Φ`.
    pub fn amplify(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("amplification must be ≥ 1".into()));
        }
        Ok(Self::identity(n).tensor(self))
    }

    pub fn heisenberg_super(&self) -> SuperOperator {
        SuperOperator::from_map(self.dim, |x| self.heisenberg(x).expect("matching dims"))
    }

    pub fn schrodinger_super(&self) -> SuperOperator {
        SuperOperator::from_map(self.dim, |x| self.schrodinger(x).expect("matching dims"))
    }

    /// Dimension of the eigenvalue-1 eigenspace of the Schrödinger action.
    pub fn fixed_point_dimension(&self) -> usize {
        fixed_nullspace(&self.schrodinger_super()).0
    }

    /// The unique fixed state; [`Error::NotPrimitive`] when the fixed space is larger.
    pub fn fixed_state(&self) -> Result<DensityMatrix> {
        let (k, v) = fixed_nullspace(&self.schrodinger_super());
        if k != 1 {
            return Err(Error::NotPrimitive(k));
        }
        let d = self.dim;
        let m = ComplexMatrix::from_raw(d, d, v);
        let tr = m.trace();
        if tr.norm() < 1e-12 {
            return Err(Error::Assumption("fixed vector has zero trace".into()));
        }
        Ok(DensityMatrix::from_channel_output(&m.scale(tr.inv())))
    }
}

/// Nullity of `S − I` and a null vector of smallest Gram eigenvalue.
fn fixed_nullspace(s: &SuperOperator) -> (usize, Vec<C64>) {
    let m = &s.mat - &ComplexMatrix::identity(s.mat.rows());
    let g = &m.adjoint() * &m;
    let e = jacobi(&g).expect("Jacobi converges on a Gram matrix");
    let top = e.max_eigenvalue();
    let k = if top <= 0.0 {
        e.dim()
    } else {
        e.eigenvalues.iter().filter(|&&l| l <= FIXED_NULL_REL * top).count()
    };
    (k, e.vector(0))
}

/// Weyl operator `X^a Z^b` with `X|j⟩ = |j+1⟩`, `Z|j⟩ = ω^j|j⟩`.
fn weyl(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == (j + a) % d {
            C64::from_polar(1.0, omega * ((b * j) % d) as f64)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Hilbert–Schmidt-orthonormal Hermitian basis of `{X : [s, X] = 0 ∀ s}`,
/// starting with `𝟏/√d`.
pub fn commutant_of(elements: &[ComplexMatrix], d: usize) -> Vec<ComplexMatrix> {
    let basis = hermitian_basis(d);
    let m = basis.len();
    // columns of the real-linear map x ↦ ([s, Σ x_k B_k])_s
    let cols: Vec<Vec<C64>> = basis
        .iter()
        .map(|b| elements.iter().flat_map(|s| s.commutator(b).into_data()).collect())
        .collect();
    let gram = ComplexMatrix::from_fn(m, m, |k, l| {
        let ip: f64 = cols[k].iter().zip(&cols[l]).map(|(a, b)| (a.conj() * b).re).sum();
        c(ip, 0.0)
    });
    let e = jacobi(&gram).expect("Jacobi converges on a Gram matrix");
    let top = e.max_eigenvalue();
    let null: Vec<usize> = (0..m).filter(|&k| top <= 0.0 || e.eigenvalues[k] <= COMMUTANT_NULL_REL * top).collect();

    let mut out = vec![ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt())];
    for &k in &null {
        if out.len() == null.len() {
            break;
        }
        let v = e.vector(k);
        let mut x = ComplexMatrix::zeros(d, d);
        for (vk, b) in v.iter().zip(&basis) {
            x.axpy_real(vk.re, b);
        }
        for q in &out {
            let ip = q.hs_inner(&x).re;
            x.axpy_real(-ip, q);
        }
        let n = x.frobenius_norm();
        if n > 1e-6 {
            out.push(x.hermitian_part().scale_real(1.0 / n));
        }
    }
    out
}

/// Commutant of a resource set.
pub fn commutant(s: &ResourceSet) -> Vec<ComplexMatrix> {
    commutant_of(s.elements(), s.dim())
}

/// Orthonormal Hermitian basis of the Hilbert–Schmidt orthogonal complement of
/// the span of `sub` (orthonormal Hermitian) inside Hermitian 𝕄_d.
pub fn orthogonal_complement(sub: &[ComplexMatrix], d: usize) -> Vec<ComplexMatrix> {
    let basis = hermitian_basis(d);
    let m = basis.len();
    let coords: Vec<Vec<f64>> = sub.iter().map(|q| basis.iter().map(|b| b.hs_inner(q).re).collect()).collect();
    let proj = ComplexMatrix::from_fn(m, m, |k, l| {
        let delta = if k == l { 1.0 } else { 0.0 };
        c(delta - coords.iter().map(|v| v[k] * v[l]).sum::<f64>(), 0.0)
    });
    let e = jacobi(&proj).expect("Jacobi converges on a projector");
    let mut out = Vec::new();
    for k in 0..m {
        if e.eigenvalues[k] > 0.5 {
            let v = e.vector(k);
            let mut x = ComplexMatrix::zeros(d, d);
            for (vk, b) in v.iter().zip(&basis) {
                x.axpy_real(vk.re, b);
            }
            out.push(x);
        }
    }
    out
}

/// The trace-preserving conditional expectation onto a *-subalgebra, as the
/// Hilbert–Schmidt projection `E(X) = Σ ⟨B_k, X⟩ B_k`.
#[derive(Clone, Debug)]
pub struct ConditionalExpectation {
    dim: usize,
    basis: Vec<ComplexMatrix>,
    sup: SuperOperator,
}

impl ConditionalExpectation {
    /// `basis` must be a Hilbert–Schmidt-orthonormal Hermitian basis of a unital *-subalgebra.
    pub fn new(dim: usize, basis: Vec<ComplexMatrix>) -> Result<Self> {
        for (i, a) in basis.iter().enumerate() {
            if a.rows() != dim || !a.is_square() {
                return Err(Error::DimensionMismatch { context: "subalgebra basis element size", expected: dim, got: a.rows() });
            }
            for (j, b) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (a.hs_inner(b) - c(want, 0.0)).norm() > 1e-8 {
                    return Err(Error::Assumption("subalgebra basis is not orthonormal".into()));
                }
            }
        }
        let proj = |x: &ComplexMatrix| {
            let mut y = ComplexMatrix::zeros(dim, dim);
            for b in &basis {
                y.axpy(b.hs_inner(x), b);
            }
            y
        };
        let sup = SuperOperator::from_map(dim, proj);
        Ok(ConditionalExpectation { dim, basis, sup })
    }

    /// Onto the commutant of `s`.
    pub fn onto_commutant(s: &ResourceSet) -> Self {
        Self::new(s.dim(), commutant(s)).expect("commutant basis is orthonormal")
    }

    /// Onto the scalars `ℂ𝟏`.
    pub fn onto_scalars(d: usize) -> Self {
        Self::new(d, vec![ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt())]).expect("unit vector")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn superoperator(&self) -> &SuperOperator {
        &self.sup
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.sup.apply(x)
    }

    /// As a channel (CP, unital and trace preserving).
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        QuantumChannel::new(self.sup.heisenberg_kraus()?)
    }
}

/// Index values of a conditional expectation.
#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    /// `Σ min{d_H, d_K}·d_K`, when a block structure is supplied.
    pub formula: Option<f64>,
    /// `Σ d_K²`.
    pub formula_cb: Option<f64>,
    /// Largest sampled `λ_max(E(x†x)^{-1/2} x†x E(x†x)^{-1/2})`.
    pub numeric_lower: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Default number of sampled `x` in [`index`].
pub const INDEX_SAMPLES: usize = 2000;

/// Pimsner–Popa index. `blocks` lists `(d_{H_i}, d_{K_i})` for
/// `𝓝_fix = ⊕ B(H_i) ⊗ 𝟏_{K_i}`.
pub fn index(
    e: &ConditionalExpectation,
    blocks: Option<&[(usize, usize)]>,
    samples: usize,
    seed: u64,
) -> Result<IndexReport> {
    let d = e.dim();
    let (formula, formula_cb) = match blocks {
        Some(bs) => {
            let total: usize = bs.iter().map(|(h, k)| h * k).sum();
            if total != d {
                return Err(Error::DimensionMismatch { context: "sum of block dims d_H*d_K vs ambient dim", expected: d, got: total });
            }
            let f = bs.iter().map(|&(h, k)| (h.min(k) * k) as f64).sum();
            let fcb = bs.iter().map(|&(_, k)| (k * k) as f64).sum();
            (Some(f), Some(fcb))
        }
        None => (None, None),
    };
    let mut best: f64 = 0.0;
    let mut rng = Rng::seeded(seed);
    for i in 0..samples {
        let x = if i % 2 == 0 {
            let u: Vec<C64> = (0..d).map(|_| rng.complex_gauss()).collect();
            let v: Vec<C64> = (0..d).map(|_| rng.complex_gauss()).collect();
            ComplexMatrix::outer(&u, &v)
        } else {
            random_matrix(d, &mut rng)
        };
        best = best.max(pimsner_popa_ratio(e, &x));
    }
    Ok(IndexReport { formula, formula_cb, numeric_lower: best, samples, seed })
}

/// Smallest `c` with `x†x ≤ c·E(x†x)` for one `x`.
pub fn pimsner_popa_ratio(e: &ConditionalExpectation, x: &ComplexMatrix) -> f64 {
    let b = &x.adjoint() * x;
    let a = HermitianMatrix::from_hermitian_part(&e.apply(&b));
    let ea = eig_hermitian(&a).expect("Jacobi converges");
    let cutoff = 1e-12 * ea.max_eigenvalue().max(0.0);
    let inv_sqrt = ea.reconstruct_with(|l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 });
    let m = &(&inv_sqrt * &b) * &inv_sqrt;
    let em = jacobi(&m.hermitian_part()).expect("Jacobi converges");
    em.max_eigenvalue()
}

/// `Φ ≤_cp Ψ`: the Choi matrix of `Ψ − Φ` is PSD within [`CP_ORDER_TOL`].
pub fn is_cp_order(phi: &SuperOperator, psi: &SuperOperator) -> bool {
    psi.sub(phi).is_cp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, Pauli};
    use crate::sampling::{random_full_rank_state, random_hermitian, random_unital_channel};

    fn assert_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        let diff = a.max_abs_diff(b);
        assert!(diff <= tol, "difference {diff:.3e}\n{a:?}\n{b:?}");
    }

    #[test]
    fn identity_channel_is_identity() {
        let mut rng = Rng::seeded(1);
        let id = QuantumChannel::identity(3);
        let x = random_matrix(3, &mut rng);
        assert_close(&id.heisenberg(&x).unwrap(), &x, 0.0);
        assert_close(&id.schrodinger(&x).unwrap(), &x, 0.0);
    }

    #[test]
    fn depolarizing_action() {
        let mut rng = Rng::seeded(2);
        for d in [2, 3] {
            for p in [0.0, 0.3, 1.0] {
                let ch = QuantumChannel::depolarizing(d, p).unwrap();
                assert!(ch.is_unital() && ch.is_trace_preserving());
                let rho = random_full_rank_state(d, &mut rng);
                let mut want = rho.matrix().scale_real(1.0 - p);
                want.axpy_real(p / d as f64, &ComplexMatrix::identity(d));
                assert_close(&ch.schrodinger(rho.matrix()).unwrap(), &want, 1e-14);
            }
        }
        assert!(QuantumChannel::depolarizing(2, 1.5).is_err());
    }

    #[test]
    fn replacer_outputs_sigma() {
        let mut rng = Rng::seeded(3);
        let sigma = random_full_rank_state(3, &mut rng);
        let ch = QuantumChannel::replacer(&sigma).unwrap();
        assert!(ch.is_trace_preserving() && !ch.is_unital());
        for _ in 0..5 {
            let rho = random_full_rank_state(3, &mut rng);
            assert_close(&ch.schrodinger(rho.matrix()).unwrap(), sigma.matrix(), 1e-13);
        }
        let mixed = QuantumChannel::replacer(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert!(mixed.is_unital());
    }

    #[test]
    fn hadamard_swaps_x_and_z() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap();
        let ch = QuantumChannel::unitary(h).unwrap();
        assert_close(&ch.heisenberg(&pauli(Pauli::X)).unwrap(), &pauli(Pauli::Z), 1e-15);
        let bad = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(QuantumChannel::unitary(bad).is_err());
    }

    #[test]
    fn depolarizing_composition_is_depolarizing() {
        let (p, q) = (0.3, 0.45);
        let a = QuantumChannel::depolarizing(2, p).unwrap();
        let b = QuantumChannel::depolarizing(2, q).unwrap();
        let ab = a.compose(&b).unwrap();
        let want = QuantumChannel::depolarizing(2, 1.0 - (1.0 - p) * (1.0 - q)).unwrap();
        let mut rng = Rng::seeded(4);
        for _ in 0..10 {
            let rho = random_full_rank_state(2, &mut rng);
            assert_close(&ab.schrodinger(rho.matrix()).unwrap(), &want.schrodinger(rho.matrix()).unwrap(), 1e-14);
        }
    }

    #[test]
    fn compose_with_identity_and_amplify_one() {
        let mut rng = Rng::seeded(5);
        let ch = random_unital_channel(2, 3, &mut rng);
        let with_id = ch.compose(&QuantumChannel::identity(2)).unwrap();
        assert!(with_id.heisenberg_super().matrix().max_abs_diff(ch.heisenberg_super().matrix()) < 1e-14);
        let amp = ch.amplify(1).unwrap();
        assert!(amp.heisenberg_super().matrix().max_abs_diff(ch.heisenberg_super().matrix()) < 1e-14);
    }

    #[test]
    fn superoperator_amplify_matches_kraus_amplify() {
        let mut rng = Rng::seeded(6);
        let ch = random_unital_channel(2, 2, &mut rng);
        let a = ch.heisenberg_super().amplify(2);
        let b = ch.amplify(2).unwrap().heisenberg_super();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-13);
        let t = ch.heisenberg_super().tensor(&ch.heisenberg_super());
        let tk = ch.tensor(&ch).heisenberg_super();
        assert!(t.matrix().max_abs_diff(tk.matrix()) < 1e-13);
    }

    #[test]
    fn heisenberg_kraus_round_trip() {
        let mut rng = Rng::seeded(7);
        let ch = random_unital_channel(3, 2, &mut rng);
        let sup = ch.heisenberg_super();
        let rebuilt = QuantumChannel::new(sup.heisenberg_kraus().unwrap()).unwrap();
        assert!(rebuilt.heisenberg_super().matrix().max_abs_diff(sup.matrix()) < 1e-12);
    }

    #[test]
    fn commutant_examples() {
        let paulis = ResourceSet::pauli();
        assert_eq!(commutant(&paulis).len(), 1);
        let id = ResourceSet::new(vec![ComplexMatrix::identity(3)], None).unwrap();
        assert_eq!(commutant(&id).len(), 9);
        let z = ResourceSet::new(vec![pauli(Pauli::Z)], None).unwrap();
        let cz = commutant(&z);
        assert_eq!(cz.len(), 2);
        for x in &cz {
            assert!(x[(0, 1)].norm() < 1e-12 && x[(1, 0)].norm() < 1e-12);
        }
    }

    #[test]
    fn conditional_expectation_examples() {
        let mut rng = Rng::seeded(8);
        let x = random_matrix(2, &mut rng);
        let e = ConditionalExpectation::onto_commutant(&ResourceSet::pauli());
        assert_close(&e.apply(&x), &ComplexMatrix::identity(2).scale(x.trace() * 0.5), 1e-14);
        let z = ResourceSet::new(vec![pauli(Pauli::Z)], None).unwrap();
        let ez = ConditionalExpectation::onto_commutant(&z);
        let mut diag = x.clone();
        diag[(0, 1)] = c(0.0, 0.0);
        diag[(1, 0)] = c(0.0, 0.0);
        assert_close(&ez.apply(&x), &diag, 1e-14);
        for e in [&e, &ez] {
            assert_close(&e.apply(&ComplexMatrix::identity(2)), &ComplexMatrix::identity(2), 1e-14);
            assert!(e.superoperator().is_cp());
            let ee = e.superoperator().compose(e.superoperator());
            assert!(ee.matrix().max_abs_diff(e.superoperator().matrix()) < 1e-14);
        }
    }

    #[test]
    fn index_examples() {
        let scalars = ConditionalExpectation::onto_scalars(3);
        let r = index(&scalars, Some(&[(1, 3)]), 200, 0).unwrap();
        assert_eq!((r.formula, r.formula_cb), (Some(3.0), Some(9.0)));
        assert!(r.numeric_lower <= 3.0 + 1e-8 && r.numeric_lower > 2.99);

        let id = ConditionalExpectation::new(2, hermitian_basis(2)).unwrap();
        let r = index(&id, Some(&[(2, 1)]), 200, 0).unwrap();
        assert_eq!(r.formula, Some(1.0));
        assert!((r.numeric_lower - 1.0).abs() < 1e-9);

        let z = ResourceSet::new(vec![pauli(Pauli::Z)], None).unwrap();
        let diag = ConditionalExpectation::onto_commutant(&z);
        let r = index(&diag, Some(&[(1, 1), (1, 1)]), 200, 0).unwrap();
        assert_eq!(r.formula, Some(2.0));
        assert!(r.numeric_lower <= 2.0 + 1e-8);

        assert!(index(&diag, Some(&[(1, 1)]), 10, 0).is_err());
    }

    #[test]
    fn cp_order_examples() {
        let ch = QuantumChannel::depolarizing(2, 0.3).unwrap().heisenberg_super();
        assert!(is_cp_order(&SuperOperator::zero(2), &ch));
        let id = SuperOperator::identity(2);
        assert!(is_cp_order(&id, &id.scale(1.2)));
        assert!(!is_cp_order(&id.scale(1.2), &id));
    }

    #[test]
    fn fixed_state_of_primitive_and_non_primitive_channels() {
        let mut rng = Rng::seeded(9);
        let sigma = random_full_rank_state(2, &mut rng);
        let rep = QuantumChannel::replacer(&sigma).unwrap();
        assert_close(rep.fixed_state().unwrap().matrix(), sigma.matrix(), 1e-10);
        let dep = QuantumChannel::depolarizing(3, 0.2).unwrap();
        assert_close(dep.fixed_state().unwrap().matrix(), DensityMatrix::maximally_mixed(3).matrix(), 1e-10);
        assert_eq!(QuantumChannel::identity(2).fixed_point_dimension(), 4);
        let dephase = QuantumChannel::pauli(0.0, 0.0, 0.5).unwrap();
        assert!(matches!(dephase.fixed_state(), Err(Error::NotPrimitive(2))));
    }

    #[test]
    fn unital_channels_contract_operator_norm() {
        let mut rng = Rng::seeded(10);
        for _ in 0..20 {
            let ch = random_unital_channel(3, 3, &mut rng);
            let x = random_hermitian(3, &mut rng);
            let y = ch.heisenberg(x.matrix()).unwrap();
            assert!(crate::linalg::op_norm(&y) <= crate::linalg::op_norm(x.matrix()) * (1.0 + 1e-12));
        }
    }
}
