use proptest::prelude::*;

use qot_core::channel::{commutant, ConditionalExpectation};
use qot_core::contraction::{f_p, pinsker_sandwich, relative_entropy, BkmOperator};
use qot_core::geometry::{cc_distance_su2, SU2Element};
use qot_core::groups::{group_seminorm, word_lengths, embed_commutative};
use qot_core::linalg::{
    eig_hermitian, hermitian_basis, op_norm, partial_trace, pauli, trace_norm, Pauli, Side,
};
use qot_core::sampling::{
    random_full_rank_state, random_hermitian, random_matrix, random_mixed_state, random_unital_channel,
    random_unitary, Rng,
};
use qot_core::seminorm::seminorm;
use qot_core::transport::cost_ascent;
use qot_core::{AscentConfig, ComplexMatrix, DensityMatrix, FiniteGroupTable, QuantumChannel, ResourceSet, SeminormSpec};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn herm(d: usize, rng: &mut Rng) -> ComplexMatrix {
    random_hermitian(d, rng).into_matrix()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn op_norm_submultiplicative_and_unitarily_invariant(seed in any::<u64>(), d in 1usize..5) {
        let mut rng = Rng::seeded(seed);
        let (a, b) = (random_matrix(d, &mut rng), random_matrix(d, &mut rng));
        prop_assert!(op_norm(&(&a * &b)) <= op_norm(&a) * op_norm(&b) * (1.0 + 1e-12));
        let (u, v) = (random_unitary(d, &mut rng), random_unitary(d, &mut rng));
        prop_assert!(close(op_norm(&(&(&u * &a) * &v)), op_norm(&a), 1e-10));
        let (t, o) = (trace_norm(&a), op_norm(&a));
        prop_assert!(t >= o * (1.0 - 1e-12) && t <= d as f64 * o * (1.0 + 1e-12));
    }

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), d in 1usize..6) {
        let x = random_hermitian(d, &mut Rng::seeded(seed));
        let e = eig_hermitian(&x).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(x.matrix()) < 1e-10);
        let v = &e.eigenvectors;
        prop_assert!((&v.adjoint() * v).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-10);
    }

    #[test]
    fn partial_trace_keeps_trace(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let m = random_matrix(da * db, &mut Rng::seeded(seed));
        for side in [Side::A, Side::B] {
            let r = partial_trace(&m, (da, db), side).unwrap();
            prop_assert!((r.trace() - m.trace()).norm() < 1e-10);
        }
    }

    #[test]
    fn picture_duality(seed in any::<u64>(), d in 2usize..4, k in 1usize..4) {
        let mut rng = Rng::seeded(seed);
        let phi = random_unital_channel(d, k, &mut rng);
        let rho = random_mixed_state(d, &mut rng);
        let x = herm(d, &mut rng);
        let lhs = rho.matrix().hs_inner(&phi.heisenberg(&x).unwrap());
        let rhs = phi.schrodinger(rho.matrix()).unwrap().hs_inner(&x);
        prop_assert!((lhs - rhs).norm() < 1e-10);
        prop_assert!(op_norm(&phi.heisenberg(&x).unwrap()) <= op_norm(&x) * (1.0 + 1e-10));
    }

    #[test]
    fn conditional_expectation_lands_in_commutant(seed in any::<u64>()) {
        let mut rng = Rng::seeded(seed);
        let e = ConditionalExpectation::onto_commutant(&ResourceSet::pauli_xy());
        let x = random_matrix(2, &mut rng);
        let ex = e.apply(&x);
        for g in ResourceSet::pauli_xy().elements() {
            prop_assert!(op_norm(&g.commutator(&ex)) <= 1e-9);
        }
        prop_assert!(e.apply(&ex).max_abs_diff(&ex) < 1e-12);
        let rho = random_mixed_state(2, &mut rng);
        let out = e.to_channel().unwrap().schrodinger(rho.matrix()).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn seminorm_axioms(seed in any::<u64>(), c in -5.0f64..5.0, l2 in any::<bool>()) {
        let mut rng = Rng::seeded(seed);
        let r = ResourceSet::gell_mann(3).unwrap();
        let spec = if l2 { SeminormSpec::l2(r) } else { SeminormSpec::linf(r) };
        let (x, y) = (random_matrix(3, &mut rng), random_matrix(3, &mut rng));
        let sx = seminorm(&spec, &x).unwrap();
        prop_assert!(seminorm(&spec, &ComplexMatrix::identity(3)).unwrap() < 1e-12);
        prop_assert!(close(seminorm(&spec, &x.adjoint()).unwrap(), sx, 1e-10));
        prop_assert!(close(seminorm(&spec, &x.scale_real(c)).unwrap(), c.abs() * sx, 1e-10));
        prop_assert!(seminorm(&spec, &(&x + &y)).unwrap() <= sx + seminorm(&spec, &y).unwrap() + 1e-10);
    }

    #[test]
    fn l2_linf_comparison(seed in any::<u64>()) {
        let x = random_matrix(3, &mut Rng::seeded(seed));
        let r = ResourceSet::gell_mann(3).unwrap();
        let m = (r.len() as f64).sqrt();
        let inf = seminorm(&SeminormSpec::linf(r.clone()), &x).unwrap();
        let two = seminorm(&SeminormSpec::l2(r), &x).unwrap();
        prop_assert!(inf <= two * (1.0 + 1e-12) && two <= m * inf * (1.0 + 1e-12));
    }

    #[test]
    fn depolarizing_scales_seminorm(seed in any::<u64>(), p in 0.0f64..1.0) {
        let x = random_matrix(2, &mut Rng::seeded(seed));
        let spec = SeminormSpec::linf(ResourceSet::pauli());
        let phi = QuantumChannel::depolarizing(2, p).unwrap();
        let lhs = seminorm(&spec, &phi.heisenberg(&x).unwrap()).unwrap();
        prop_assert!(close(lhs, (1.0 - p) * seminorm(&spec, &x).unwrap(), 1e-10));
    }

    #[test]
    fn depolarizing_trace_decay(seed in any::<u64>(), p in 0.0f64..1.0, n in 1usize..8) {
        let rho = random_mixed_state(2, &mut Rng::seeded(seed));
        let phi = QuantumChannel::depolarizing(2, p).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        let d0 = trace_norm(&(rho.matrix() - mixed.matrix()));
        let mut r = rho.clone();
        for _ in 0..n {
            r = phi.apply_state(&r).unwrap();
        }
        let dn = trace_norm(&(r.matrix() - mixed.matrix()));
        prop_assert!((dn - (1.0 - p).powi(n as i32) * d0).abs() < 1e-10);
    }

    #[test]
    fn bkm_composite_is_symmetric(seed in any::<u64>(), k in 1usize..4) {
        let mut rng = Rng::seeded(seed);
        let phi = random_unital_channel(2, k, &mut rng);
        let sigma = random_full_rank_state(2, &mut rng);
        let op = BkmOperator::new(&sigma).unwrap();
        let t = op.composite(&phi);
        let (x, y) = (herm(2, &mut rng), herm(2, &mut rng));
        let a = op.inner(&t.apply(&x), &y);
        let b = op.inner(&x, &t.apply(&y));
        prop_assert!((a - b).norm() < 1e-9);
        prop_assert!(op.inner(&x, &t.apply(&x)).re >= -1e-9);
    }

    #[test]
    fn pinsker_sandwich_holds(seed in any::<u64>(), d in 2usize..4) {
        let mut rng = Rng::seeded(seed);
        let rho = random_full_rank_state(d, &mut rng);
        let sigma = random_full_rank_state(d, &mut rng);
        let (lo, mid, hi) = pinsker_sandwich(&rho, &sigma).unwrap();
        prop_assert!(lo <= mid + 1e-12 && mid <= hi + 1e-12, "{lo} {mid} {hi}");
        prop_assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn f_p_even_and_decreasing(p in 0.01f64..0.99, x in 0.001f64..0.499) {
        let (a, b) = (f_p(p, x).unwrap(), f_p(p, -x).unwrap());
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(f_p(p, x + 0.0005).unwrap() <= a + 1e-12);
    }

    #[test]
    fn cc_distance_symmetric_and_subadditive(seed in any::<u64>()) {
        let mut rng = Rng::seeded(seed);
        let (g, h) = (SU2Element::haar(&mut rng), SU2Element::haar(&mut rng));
        prop_assert!((cc_distance_su2(&g) - cc_distance_su2(&g.inverse())).abs() < 1e-10);
        prop_assert!(cc_distance_su2(&g.mul(&h)) <= cc_distance_su2(&g) + cc_distance_su2(&h) + 1e-9);
    }
}

fn small_group() -> impl Strategy<Value = FiniteGroupTable> {
    prop_oneof![
        (2usize..12).prop_map(|n| FiniteGroupTable::cyclic(n).unwrap()),
        (3usize..7).prop_map(|n| FiniteGroupTable::dihedral(n).unwrap()),
        Just(FiniteGroupTable::symmetric(3).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn word_length_is_one_lipschitz(g in small_group()) {
        let prof = word_lengths(&g);
        let f: Vec<f64> = prof.lengths.iter().map(|&l| l as f64).collect();
        prop_assert!(group_seminorm(&g, &f).unwrap() <= 1.0);
        prop_assert_eq!(prof.lengths[g.identity()], 0);
    }

    #[test]
    fn telescoping_bound(g in small_group(), seed in any::<u64>()) {
        let mut rng = Rng::seeded(seed);
        let f: Vec<f64> = (0..g.order()).map(|_| rng.gauss()).collect();
        let sn = group_seminorm(&g, &f).unwrap();
        let lengths = word_lengths(&g).lengths;
        for x in 0..g.order() {
            for h in 0..g.order() {
                let jump = (f[x] - f[g.mul(h, x)]).abs();
                prop_assert!(jump <= lengths[h] as f64 * sn + 1e-12);
            }
        }
    }

    #[test]
    fn embedded_seminorm_matches(g in small_group(), seed in any::<u64>()) {
        let emb = embed_commutative(&g).unwrap();
        let mut rng = Rng::seeded(seed);
        let f: Vec<f64> = (0..g.order()).map(|_| rng.gauss()).collect();
        prop_assert!(close(emb.seminorm(&f), group_seminorm(&g, &f).unwrap(), 1e-10));
    }
}

proptest! {
    // ascent runs are the slow part
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn witness_reproduces_lower(seed in any::<u64>(), p in 0.05f64..0.95) {
        let phi = QuantumChannel::depolarizing(2, p).unwrap().heisenberg_super();
        let spec = SeminormSpec::linf(ResourceSet::pauli());
        let r = cost_ascent(&phi, &spec, &AscentConfig::light(seed)).unwrap();
        let x = r.witness.clone().unwrap();
        prop_assert!((seminorm(&spec, &x).unwrap() - 1.0).abs() < 1e-8);
        prop_assert!(close(op_norm(&(&phi.apply(&x) - &x)), r.lower, 1e-8));
    }

    #[test]
    fn more_resources_lower_cost(seed in any::<u64>(), k in 1usize..3) {
        let phi = random_unital_channel(2, k, &mut Rng::seeded(seed)).heisenberg_super();
        let small = SeminormSpec::linf(ResourceSet::pauli_xy());
        let big = SeminormSpec::linf(ResourceSet::pauli());
        let cfg = AscentConfig::light(seed);
        let (cs, cb) = (cost_ascent(&phi, &small, &cfg).unwrap(), cost_ascent(&phi, &big, &cfg).unwrap());
        if cs.upper.is_finite() {
            prop_assert!(cb.lower <= cs.lower + 1e-6, "{} > {}", cb.lower, cs.lower);
        }
    }

    #[test]
    fn scaling_resources_scales_cost(seed in any::<u64>(), c in 0.2f64..5.0) {
        let phi = random_unital_channel(2, 2, &mut Rng::seeded(seed)).heisenberg_super();
        let cfg = AscentConfig::light(seed);
        let base = cost_ascent(&phi, &SeminormSpec::linf(ResourceSet::pauli()), &cfg).unwrap();
        let scaled = cost_ascent(&phi, &SeminormSpec::linf(ResourceSet::pauli().scaled(c)), &cfg).unwrap();
        prop_assert!(close(scaled.lower, base.lower / c, 1e-8), "{} vs {}", scaled.lower, base.lower / c);
    }
}

#[test]
fn seminorm_vanishes_on_commutant() {
    for r in [ResourceSet::pauli_xy(), ResourceSet::gell_mann(3).unwrap()] {
        let spec = SeminormSpec::linf(r.clone());
        for k in commutant(&r) {
            assert!(seminorm(&spec, &k).unwrap() <= 1e-10);
        }
    }
    let diag = ResourceSet::single(pauli(Pauli::Z)).unwrap();
    let spec = SeminormSpec::linf(diag.clone());
    assert_eq!(commutant(&diag).len(), 2);
    for k in commutant(&diag) {
        assert!(seminorm(&spec, &k).unwrap() <= 1e-10);
    }
    assert!(hermitian_basis(2).iter().any(|b| seminorm(&spec, b).unwrap() > 0.1));
    assert_eq!(commutant(&ResourceSet::pauli()).len(), 1);
    // {X⊗1, Y⊗1, 1⊗Z} commutes with 1⊗Z
    let joint = ResourceSet::pauli_xy().join(&diag);
    assert_eq!(commutant(&joint).len(), 2);
}
