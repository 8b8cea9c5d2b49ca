//! Operator bases: Paulis, generalized Gell-Mann matrices and a Hilbert–Schmidt
//! orthonormal Hermitian basis of 𝕄_d used as real coordinates everywhere.

use super::{c, ComplexMatrix, HermitianMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

pub fn pauli(p: Pauli) -> ComplexMatrix {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let data = match p {
        Pauli::I => vec![one, z, z, one],
        Pauli::X => vec![z, one, one, z],
        Pauli::Y => vec![z, c(0.0, -1.0), c(0.0, 1.0), z],
        Pauli::Z => vec![one, z, z, -one],
    };
    ComplexMatrix::from_raw(2, 2, data)
}

/// `X = v0·𝟏 + v1σx + v2σy + v3σz`.
pub fn pauli_decompose(x: &HermitianMatrix) -> Result<[f64; 4]> {
    if x.dim() != 2 {
        return Err(Error::DimensionMismatch {
            context: "Pauli decomposition needs a qubit operator",
            expected: 2,
            got: x.dim(),
        });
    }
    let m = x.matrix();
    Ok([
        0.5 * (m[(0, 0)].re + m[(1, 1)].re),
        m[(0, 1)].re,
        -m[(0, 1)].im,
        0.5 * (m[(0, 0)].re - m[(1, 1)].re),
    ])
}

pub fn pauli_compose(v: [f64; 4]) -> HermitianMatrix {
    let m = ComplexMatrix::from_raw(
        2,
        2,
        vec![c(v[0] + v[3], 0.0), c(v[1], -v[2]), c(v[1], v[2]), c(v[0] - v[3], 0.0)],
    );
    HermitianMatrix { matrix: m }
}

/// Hilbert–Schmidt orthonormal Hermitian basis of 𝕄_d, `d²` elements:
/// `E_jj`, then `(E_jk + E_kj)/√2` and `i(E_jk − E_kj)/√2` for `j < k`.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, j)] = c(1.0, 0.0);
        out.push(m);
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(j, k)] = c(r, 0.0);
            s[(k, j)] = c(r, 0.0);
            out.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(j, k)] = c(0.0, r);
            a[(k, j)] = c(0.0, -r);
            out.push(a);
        }
    }
    out
}

/// Real coordinates `tr(B_k X)` of `X` in a Hermitian basis. Only the real part is
/// kept, so for non-Hermitian `X` this is the coordinate vector of its Hermitian part.
pub fn real_coords(x: &ComplexMatrix, basis: &[ComplexMatrix]) -> Vec<f64> {
    basis.iter().map(|b| b.hs_inner(x).re).collect()
}

/// Generalized Gell-Mann matrices, `d² − 1` traceless Hermitian with `tr(λ_a λ_b) = 2δ_ab`.
pub fn gell_mann(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut s = ComplexMatrix::zeros(d, d);
            s[(j, k)] = c(1.0, 0.0);
            s[(k, j)] = c(1.0, 0.0);
            out.push(s);
            let mut a = ComplexMatrix::zeros(d, d);
            a[(j, k)] = c(0.0, -1.0);
            a[(k, j)] = c(0.0, 1.0);
            out.push(a);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for x in diag.iter_mut().take(l) {
            *x = norm;
        }
        diag[l] = -(l as f64) * norm;
        out.push(ComplexMatrix::from_real_diag(&diag));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_decompose_examples() {
        let z = HermitianMatrix::new(pauli(Pauli::Z)).unwrap();
        assert_eq!(pauli_decompose(&z).unwrap(), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(pauli_decompose(&HermitianMatrix::identity(2)).unwrap(), [1.0, 0.0, 0.0, 0.0]);
        let d = HermitianMatrix::from_real_diag(&[0.75, 0.25]);
        assert_eq!(pauli_decompose(&d).unwrap(), [0.5, 0.0, 0.0, 0.25]);
        let y = HermitianMatrix::new(pauli(Pauli::Y)).unwrap();
        assert_eq!(pauli_decompose(&y).unwrap(), [0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn pauli_round_trip() {
        let v = [0.3, -1.2, 0.7, 2.5];
        let back = pauli_decompose(&pauli_compose(v)).unwrap();
        assert!(back.iter().zip(v).all(|(a, b)| (a - b).abs() < 1e-15));
        assert!(pauli_decompose(&HermitianMatrix::identity(3)).is_err());
    }

    fn check_orthonormal(b: &[ComplexMatrix], norm: f64) {
        for (i, x) in b.iter().enumerate() {
            assert!(x.hermiticity_defect() == 0.0);
            for (j, y) in b.iter().enumerate() {
                let ip = x.hs_inner(y);
                let want = if i == j { norm } else { 0.0 };
                assert!((ip.re - want).abs() < 1e-14 && ip.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bases_are_orthonormal() {
        for d in 1..5 {
            let b = hermitian_basis(d);
            assert_eq!(b.len(), d * d);
            check_orthonormal(&b, 1.0);
        }
        for d in 2..5 {
            let g = gell_mann(d);
            assert_eq!(g.len(), d * d - 1);
            check_orthonormal(&g, 2.0);
            assert!(g.iter().all(|m| m.trace().norm() < 1e-14));
        }
    }
}
