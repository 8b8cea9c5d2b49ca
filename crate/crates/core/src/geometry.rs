//! Bi-invariant Carnot–Carathéodory distance on SU(2) with the full Lie algebra
//! as horizontal space, and the bound `Cost(ad_g) ≤ d(g, e)`.
//!
//! The frame `{iσ_x, iσ_y, iσ_z}` is declared orthonormal. With that scale
//! `g = exp(iθ n·σ)` sits at distance `θ ∈ [0, π]` from the identity.

use rayon::prelude::*;
use serde::Serialize;

use crate::ascent::AscentConfig;
use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, C64};
use crate::sampling::Rng;
use crate::seminorm::{seminorm, times_i, ResourceSet, SeminormSpec};
use crate::transport::cost_ascent;

pub const SU2_TOL: f64 = 1e-10;
/// Allowed excess of the cost estimate over the distance.
pub const CC_SLACK: f64 = 1e-6;
/// Frame label carried by every report.
pub const FRAME: &str = "orthonormal {i sigma_x, i sigma_y, i sigma_z}";

/// A 2×2 unitary with determinant one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SU2Element {
    matrix: ComplexMatrix,
}

impl SU2Element {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != 2 || matrix.cols() != 2 {
            return Err(Error::DimensionMismatch { context: "SU(2) element size", expected: 2, got: matrix.rows() });
        }
        let defect = (&matrix.adjoint() * &matrix).max_abs_diff(&ComplexMatrix::identity(2));
        if defect > SU2_TOL {
            return Err(Error::OutOfRange(format!("not unitary (defect {defect:.3e})")));
        }
        let m = matrix.data();
        let det = m[0] * m[3] - m[1] * m[2];
        if (det - c(1.0, 0.0)).norm() > SU2_TOL {
            return Err(Error::OutOfRange(format!("determinant {det} is not 1")));
        }
        Ok(SU2Element { matrix })
    }

    pub fn identity() -> Self {
        SU2Element { matrix: ComplexMatrix::identity(2) }
    }

    /// `[[a + ib, c + id], [−c + id, a − ib]]` for a unit quaternion.
    pub fn from_quaternion(q: [f64; 4]) -> Result<Self> {
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::OutOfRange("zero quaternion".into()));
        }
        let [a, b, cc, d] = q.map(|v| v / n);
        let m = ComplexMatrix::new(2, 2, vec![c(a, b), c(cc, d), c(-cc, d), c(a, -b)])?;
        Ok(SU2Element { matrix: m })
    }

    /// `exp(iθ n·σ) = cos θ·𝟏 + i sin θ·n·σ`; `axis` is normalized.
    pub fn exp(theta: f64, axis: [f64; 3]) -> Result<Self> {
        let n = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n > 0.0) {
            return Err(Error::OutOfRange("zero rotation axis".into()));
        }
        let s = theta.sin() / n;
        Self::from_quaternion([theta.cos(), s * axis[2], s * axis[1], s * axis[0]])
    }

    /// Haar measure, via a uniform point on the 3-sphere.
    pub fn haar(rng: &mut Rng) -> Self {
        loop {
            let q = [rng.gauss(), rng.gauss(), rng.gauss(), rng.gauss()];
            if let Ok(g) = Self::from_quaternion(q) {
                return g;
            }
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> Self {
        SU2Element { matrix: self.matrix.adjoint() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        SU2Element { matrix: &self.matrix * &other.matrix }
    }
}

/// `d(g, e) = θ` where `g = exp(iθ n·σ)`, `θ ∈ [0, π]`.
pub fn cc_distance_su2(g: &SU2Element) -> f64 {
    let m = g.matrix.data();
    let (a, b): (C64, C64) = (m[0], m[1]);
    (a.im * a.im + b.norm_sqr()).sqrt().atan2(a.re)
}

/// `d(g, h) = d(g⁻¹h, e)`.
pub fn cc_distance_between(g: &SU2Element, h: &SU2Element) -> f64 {
    cc_distance_su2(&g.inverse().mul(h))
}

/// ℓ2 commutator seminorm for the fundamental representation.
pub fn rep_spec() -> SeminormSpec {
    SeminormSpec::l2(times_i(&ResourceSet::pauli()))
}

pub fn rep_lipschitz_seminorm(x: &ComplexMatrix) -> Result<f64> {
    seminorm(&rep_spec(), x)
}

/// `sin θ/√2`: the exact cost of `ad_g` in this frame.
pub fn conjugation_cost_closed_form(g: &SU2Element) -> f64 {
    cc_distance_su2(g).sin() / std::f64::consts::SQRT_2
}

#[derive(Clone, Debug, Serialize)]
pub struct CcReport {
    pub distance: f64,
    pub cost_lower: f64,
    pub cost_closed_form: f64,
    /// `distance − cost_lower`.
    pub margin: f64,
    pub passed: bool,
    pub frame: &'static str,
    pub seed: u64,
}

/// Estimates `Cost(ad_g)` by ascent and checks it against `d(g, e)`.
pub fn verify_cc_bound(g: &SU2Element, cfg: &AscentConfig) -> Result<CcReport> {
    let ad = QuantumChannel::unitary(g.matrix.clone())?;
    let r = cost_ascent(&ad.heisenberg_super(), &rep_spec(), cfg)?;
    let distance = cc_distance_su2(g);
    Ok(CcReport {
        distance,
        cost_lower: r.lower,
        cost_closed_form: conjugation_cost_closed_form(g),
        margin: distance - r.lower,
        passed: r.lower <= distance + CC_SLACK,
        frame: FRAME,
        seed: cfg.seed,
    })
}

/// The bound on `samples` Haar elements; sample `i` uses `Rng::derived(seed, i)`.
pub fn cc_suite(samples: usize, seed: u64) -> Result<Vec<CcReport>> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let g = SU2Element::haar(&mut Rng::derived(seed, i as u64));
            verify_cc_bound(&g, &AscentConfig::light(crate::sampling::derive_seed(seed, i as u64)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, Pauli};

    #[test]
    fn distance_examples() {
        assert_eq!(cc_distance_su2(&SU2Element::identity()), 0.0);
        for &t in &[0.1, 1.0, 2.0, 3.0] {
            let g = SU2Element::new(ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
                (0, 0) => C64::from_polar(1.0, t),
                (1, 1) => C64::from_polar(1.0, -t),
                _ => c(0.0, 0.0),
            }))
            .unwrap();
            assert!((cc_distance_su2(&g) - t).abs() < 1e-12);
        }
        let minus = SU2Element::new(ComplexMatrix::identity(2).scale_real(-1.0)).unwrap();
        assert!((cc_distance_su2(&minus) - std::f64::consts::PI).abs() < 1e-15);
        let g = SU2Element::exp(0.7, [1.0, 2.0, -0.5]).unwrap();
        assert!((cc_distance_su2(&g) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_su2() {
        let not_det1 = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        assert!(SU2Element::new(not_det1).is_err());
        assert!(SU2Element::new(ComplexMatrix::identity(2).scale_real(1.1)).is_err());
    }

    #[test]
    fn rep_seminorm_examples() {
        assert!(rep_lipschitz_seminorm(&ComplexMatrix::identity(2)).unwrap() < 1e-14);
        let v = rep_lipschitz_seminorm(&pauli(Pauli::Z)).unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let mut rng = Rng::seeded(3);
        let x = crate::sampling::random_hermitian(2, &mut rng);
        let g = SU2Element::haar(&mut rng);
        let y = &(g.matrix() * x.matrix()) * &g.matrix().adjoint();
        let (a, b) = (rep_lipschitz_seminorm(x.matrix()).unwrap(), rep_lipschitz_seminorm(&y).unwrap());
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn metric_axioms() {
        let mut rng = Rng::seeded(11);
        for _ in 0..200 {
            let (g, h) = (SU2Element::haar(&mut rng), SU2Element::haar(&mut rng));
            assert!((cc_distance_su2(&g) - cc_distance_su2(&g.inverse())).abs() < 1e-10);
            assert!(cc_distance_su2(&g.mul(&h)) <= cc_distance_su2(&g) + cc_distance_su2(&h) + 1e-9);
        }
    }

    #[test]
    fn cost_matches_closed_form() {
        for (i, &t) in [0.0, 0.01, 0.5, 1.5, 2.5].iter().enumerate() {
            let g = SU2Element::exp(t, [0.3, -0.4, 1.0]).unwrap();
            let r = verify_cc_bound(&g, &AscentConfig::light(i as u64)).unwrap();
            assert!(r.passed, "{r:?}");
            assert!((r.cost_lower - r.cost_closed_form).abs() <= 1e-6 * (1.0 + r.cost_closed_form), "{r:?}");
        }
    }
}
