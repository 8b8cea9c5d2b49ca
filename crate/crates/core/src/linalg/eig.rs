//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use super::{ComplexMatrix, HermitianMatrix, C64};
use crate::error::{Error, Result};

pub const JACOBI_MAX_SWEEPS: usize = 100;
const REL_OFF_TOL: f64 = 1e-14;

/// `A = U diag(λ) U†` with ascending eigenvalues and orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    /// `U diag(f(λ)) U†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let u = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += u[(i, k)] * fl[k] * u[(j, k)].conj();
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

fn off_norm(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a validated Hermitian matrix.
pub fn eig_hermitian(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    jacobi(a.matrix())
}

/// Jacobi on a matrix the caller guarantees to be Hermitian (up to rounding);
/// only the upper triangle's conjugate symmetry is assumed.
pub(crate) fn jacobi(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = m.rows();
    debug_assert!(m.is_square());
    let mut a: Vec<C64> = m.data().to_vec();
    // exact Hermitian part so rounding asymmetry does not leak into the sweep
    for i in 0..n {
        a[i * n + i].im = 0.0;
        for j in (i + 1)..n {
            let z = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = z;
            a[j * n + i] = z.conj();
        }
    }
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = REL_OFF_TOL * scale;

    let mut converged = off_norm(&a, n) <= target;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let phase = apq / mag; // e^{iφ}
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // U on the (p,q) plane: [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let conj_phase = phase.conj();
                let u_pp = C64::new(cs, 0.0);
                let u_pq = C64::new(sn, 0.0);
                let u_qp = -conj_phase * sn;
                let u_qq = conj_phase * cs;
                // A <- A U (columns p, q)
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * u_pp + akq * u_qp;
                    a[k * n + q] = akp * u_pq + akq * u_qq;
                }
                // A <- U† A (rows p, q)
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[q * n + k] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                // V <- V U
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * u_pp + vkq * u_qp;
                    v[k * n + q] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
        converged = off_norm(&a, n) <= target;
    }
    if !converged {
        return Err(Error::NoConvergence(off_norm(&a, n)));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let eigenvalues = order.iter().map(|&i| a[i * n + i].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| v[i * n + order[k]]);
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, pauli, Pauli};
    use crate::sampling::{random_hermitian, Rng};

    #[test]
    fn identity_spectrum() {
        let e = eig_hermitian(&HermitianMatrix::identity(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let e = eig_hermitian(&HermitianMatrix::new(pauli(Pauli::X)).unwrap()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_converges_immediately() {
        let e = eig_hermitian(&HermitianMatrix::zeros(4)).unwrap();
        assert!(e.eigenvalues.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [-i, 1]] has spectrum {0, 2}
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)])
            .unwrap();
        let e = eig_hermitian(&HermitianMatrix::new(m).unwrap()).unwrap();
        assert!(e.eigenvalues[0].abs() < 1e-15);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        let mut rng = Rng::seeded(7);
        for d in [2usize, 3, 4, 6, 9, 16] {
            for _ in 0..20 {
                let h = random_hermitian(d, &mut rng);
                let e = eig_hermitian(&h).unwrap();
                let resid = (&e.reconstruct() - h.matrix()).frobenius_norm();
                assert!(resid < 1e-10, "d={d} residual {resid}");
                let u = &e.eigenvectors;
                let gram = &u.adjoint() * u;
                assert!(gram.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-10);
                assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }
}
