use super::eig::jacobi;
use super::{eig_hermitian, ComplexMatrix, HermitianMatrix, C64};
use crate::error::{Error, Result};

/// Smallest eigenvalue accepted by [`mat_log`].
pub const LOG_FLOOR: f64 = 1e-12;

/// Largest singular value, `√λ_max(M†M)`.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.data().iter().all(|z| z.re == 0.0 && z.im == 0.0) {
        return 0.0;
    }
    if m.is_square() && m.hermiticity_defect() == 0.0 {
        let e = jacobi(m).expect("Jacobi converges on Hermitian input");
        return e.eigenvalues[0].abs().max(e.max_eigenvalue().abs());
    }
    let gram = &m.adjoint() * m;
    let e = jacobi(&gram).expect("Jacobi converges on a Gram matrix");
    e.max_eigenvalue().max(0.0).sqrt()
}

/// Top singular triple `(σ, u, v)` with `M v = σ u`.
pub fn top_singular(m: &ComplexMatrix) -> (f64, Vec<C64>, Vec<C64>) {
    let gram = &m.adjoint() * m;
    let e = jacobi(&gram).expect("Jacobi converges on a Gram matrix");
    let k = e.dim() - 1;
    let sigma = e.eigenvalues[k].max(0.0).sqrt();
    let v = e.vector(k);
    let mv = m.matvec(&v);
    let u = if sigma > 0.0 {
        mv.iter().map(|z| z / sigma).collect()
    } else {
        let mut u = vec![C64::new(0.0, 0.0); m.rows()];
        u[0] = C64::new(1.0, 0.0);
        u
    };
    (sigma, u, v)
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_square() && m.hermiticity_defect() == 0.0 {
        let e = jacobi(m).expect("Jacobi converges on Hermitian input");
        return e.eigenvalues.iter().map(|l| l.abs()).sum();
    }
    let gram = &m.adjoint() * m;
    let e = jacobi(&gram).expect("Jacobi converges on a Gram matrix");
    e.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).sum()
}

/// Kronecker product `A ⊗ B`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Which tensor factor [`partial_trace`] removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Partial trace over the subsystem named by `side` on `H_A ⊗ H_B`.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), side: Side) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if !m.is_square() || m.rows() != da * db {
        return Err(Error::DimensionMismatch {
            context: "partial trace input size vs dA*dB",
            expected: da * db,
            got: m.rows(),
        });
    }
    Ok(match side {
        Side::B => ComplexMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum()
        }),
        Side::A => ComplexMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum()
        }),
    })
}

/// Functional calculus `f(A)` through the eigendecomposition.
pub fn apply_fn(a: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let e = eig_hermitian(a)?;
    Ok(HermitianMatrix::from_hermitian_part(&e.reconstruct_with(f)))
}

/// Principal logarithm of a strictly positive Hermitian matrix.
pub fn mat_log(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let e = eig_hermitian(a)?;
    let lo = e.min_eigenvalue();
    if lo <= LOG_FLOOR {
        return Err(Error::LogDomain(lo));
    }
    Ok(HermitianMatrix::from_hermitian_part(&e.reconstruct_with(f64::ln)))
}

pub fn mat_exp(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    apply_fn(a, f64::exp)
}

/// Square root of a positive semidefinite matrix; negative rounding noise is clipped.
pub fn psd_sqrt(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    apply_fn(a, |x| x.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, pauli, Pauli};
    use crate::sampling::{random_full_rank_state, random_hermitian, random_matrix, random_unitary, Rng};

    #[test]
    fn op_norm_examples() {
        assert_eq!(op_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
        assert!((op_norm(&pauli(Pauli::Y)) - 1.0).abs() < 1e-15);
        // [[0,2],[0,0]]: M†M = diag(0,4)
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        assert!((op_norm(&m) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn trace_norm_examples() {
        let pure = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        assert!((trace_norm(&(&pure - &mixed)) - 1.0).abs() < 1e-15);
        assert_eq!(trace_norm(&(&pure - &pure)), 0.0);
        let a = ComplexMatrix::from_real_diag(&[0.75, 0.25]);
        assert!((trace_norm(&(&a - &mixed)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tensor_examples() {
        let mut rng = Rng::seeded(3);
        let a = random_matrix(3, &mut rng);
        assert_eq!(tensor(&a, &ComplexMatrix::identity(1)), a);
        let xx = tensor(&pauli(Pauli::X), &pauli(Pauli::X));
        assert!((op_norm(&xx) - 1.0).abs() < 1e-14);
        for _ in 0..20 {
            let a = random_matrix(2, &mut rng);
            let b = random_matrix(3, &mut rng);
            let lhs = tensor(&a, &b).trace();
            let rhs = a.trace() * b.trace();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_examples() {
        let mut rng = Rng::seeded(5);
        let rho = random_full_rank_state(2, &mut rng);
        let tau = random_full_rank_state(3, &mut rng);
        let joint = tensor(rho.matrix(), tau.matrix());
        let back = partial_trace(&joint, (2, 3), Side::B).unwrap();
        assert!(back.max_abs_diff(rho.matrix()) < 1e-14);

        let b = random_matrix(3, &mut rng);
        let lifted = tensor(&ComplexMatrix::identity(2), &b);
        let out = partial_trace(&lifted, (2, 3), Side::A).unwrap();
        assert!(out.max_abs_diff(&b.scale_real(2.0)) < 1e-14);

        // (|00> + |11>)/√2
        let s = 1.0 / 2f64.sqrt();
        let psi = [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
        let bell = ComplexMatrix::outer(&psi, &psi);
        let red = partial_trace(&bell, (2, 2), Side::B).unwrap();
        assert!(red.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);

        assert!(partial_trace(&bell, (3, 2), Side::B).is_err());
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let mut rng = Rng::seeded(11);
        for _ in 0..50 {
            let m = random_matrix(6, &mut rng);
            for side in [Side::A, Side::B] {
                let r = partial_trace(&m, (2, 3), side).unwrap();
                assert!((r.trace() - m.trace()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn log_exp_examples() {
        let zero = mat_log(&HermitianMatrix::identity(3)).unwrap();
        assert!(zero.matrix().max_abs() < 1e-15);
        let e = std::f64::consts::E;
        let l = mat_log(&HermitianMatrix::from_real_diag(&[e, e * e])).unwrap();
        assert!(l.matrix().max_abs_diff(&ComplexMatrix::from_real_diag(&[1.0, 2.0])) < 1e-14);
        let mut rng = Rng::seeded(1);
        for d in [2, 3, 4] {
            for _ in 0..20 {
                let rho = random_full_rank_state(d, &mut rng);
                let back = mat_exp(&mat_log(rho.hermitian()).unwrap()).unwrap();
                assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-9);
            }
        }
    }

    #[test]
    fn log_rejects_singular_input() {
        let err = mat_log(&HermitianMatrix::from_real_diag(&[1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::LogDomain(v) if v.abs() < 1e-15));
    }

    #[test]
    fn op_norm_submultiplicative_and_unitarily_invariant() {
        let mut rng = Rng::seeded(17);
        for _ in 0..1000 {
            let a = random_matrix(3, &mut rng);
            let b = random_matrix(3, &mut rng);
            assert!(op_norm(&(&a * &b)) <= op_norm(&a) * op_norm(&b) * (1.0 + 1e-12));
        }
        for _ in 0..100 {
            let a = random_matrix(3, &mut rng);
            let u = random_unitary(3, &mut rng);
            let v = random_unitary(3, &mut rng);
            let uav = &(&u * &a) * &v;
            assert!((op_norm(&uav) - op_norm(&a)).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_norm_vs_op_norm() {
        let mut rng = Rng::seeded(19);
        for d in [2usize, 3, 5] {
            for _ in 0..100 {
                let a = random_matrix(d, &mut rng);
                let (t, o) = (trace_norm(&a), op_norm(&a));
                assert!(t >= o * (1.0 - 1e-12));
                assert!(t <= d as f64 * o * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn hermitian_op_norm_is_max_abs_eigenvalue() {
        let mut rng = Rng::seeded(23);
        for _ in 0..50 {
            let h = random_hermitian(4, &mut rng);
            let e = eig_hermitian(&h).unwrap();
            let expected = e.eigenvalues[0].abs().max(e.max_eigenvalue().abs());
            assert!((op_norm(h.matrix()) - expected).abs() < 1e-12);
        }
    }
}
