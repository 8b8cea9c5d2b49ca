//! Verification suites. Each numbered check is deterministic under its seed and
//! reports a one-line summary of the worst case it saw.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use qot_core::ascent::AscentConfig;
use qot_core::channel::{index, ConditionalExpectation, INDEX_SAMPLES};
use qot_core::contraction::{
    bkm_lambda2, contraction_via_states, entropy_contraction_sample, entropy_derivative, f_p, lip, lip_super,
    pinsker_sandwich, relative_entropy, second_order_error, DEFAULT_PAIRS,
};
use qot_core::geometry::cc_suite;
use qot_core::groups::{embed_commutative, group_cost_efix, word_lengths, EMBED_MAX_ORDER};
use qot_core::linalg::{eig_hermitian, hermitian_basis, op_norm, pauli, pauli_decompose, real_coords, tensor, Pauli};
use qot_core::mixing::depolarizing_grid;
use qot_core::sampling::{derive_seed, random_full_rank_state, random_hermitian, random_unital_channel, Rng};
use qot_core::seminorm::{pauli_closed_form, seminorm};
use qot_core::transport::{
    cost, cost_ascent, cost_ascent_hinted, cost_via_states, property_harness_cost, superadditivity_lower, DEFAULT_STATES,
};
use qot_core::{ComplexMatrix, DensityMatrix, FiniteGroupTable, HermitianMatrix, QuantumChannel, ResourceSet, SeminormSpec};

type Check = Result<(bool, String), qot_core::Error>;

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub seed: u64,
}

pub const NAMES: [&str; 13] = [
    "word-length exact",
    "pauli seminorm closed form",
    "depolarizing exactness",
    "bkm lambda2",
    "entropy contraction bound",
    "f_p shape",
    "duality consistency",
    "pointwise inequalities",
    "tensor additivity and maximality",
    "cc bound",
    "mixing hierarchy and bridge",
    "entropy calculus",
    "index",
];

pub const SUITES: [&str; 7] = ["all", "cost", "lip", "entropy", "group", "geometry", "mixing"];

/// Check ids making up a suite.
pub fn suite_ids(name: &str) -> Option<Vec<u8>> {
    Some(match name {
        "all" => (1..=13).collect(),
        "cost" => vec![2, 7, 8, 9, 13],
        "lip" => vec![3, 9],
        "entropy" => vec![4, 5, 6, 12],
        "group" => vec![1],
        "geometry" => vec![10],
        "mixing" => vec![11],
        _ => return None,
    })
}

pub fn run_suite(name: &str, seed: u64) -> Option<Vec<Outcome>> {
    Some(suite_ids(name)?.into_iter().map(|id| run(id, seed)).collect())
}

/// Runs check `id` (1..=13).
pub fn run(id: u8, seed: u64) -> Outcome {
    let t = Instant::now();
    let res = match id {
        1 => word_length(),
        2 => pauli_closed(seed),
        3 => depolarizing_exact(seed),
        4 => lambda2(),
        5 => entropy_bound(seed),
        6 => f_p_shape(),
        7 => duality(seed),
        8 => pointwise(seed),
        9 => tensor_checks(seed),
        10 => cc(seed),
        11 => mixing(seed),
        12 => calculus(seed),
        13 => index_check(seed),
        _ => Ok((false, format!("no check with id {id}"))),
    };
    let (passed, detail) = res.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        id,
        name: NAMES.get(id as usize - 1).copied().unwrap_or("unknown"),
        passed,
        detail,
        seconds: t.elapsed().as_secs_f64(),
        seed,
    }
}

fn pauli_spec() -> SeminormSpec {
    SeminormSpec::linf(ResourceSet::pauli())
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn word_length() -> Check {
    let mut groups: Vec<(String, FiniteGroupTable)> = Vec::new();
    for n in 2..=12 {
        groups.push((format!("Z{n}"), FiniteGroupTable::cyclic(n)?));
    }
    groups.push(("D4".into(), FiniteGroupTable::dihedral(4)?));
    groups.push(("S3".into(), FiniteGroupTable::symmetric(3)?));
    groups.push(("S4".into(), FiniteGroupTable::symmetric(4)?));
    let mut ok = true;
    let mut worst_embed: f64 = 0.0;
    for (name, g) in &groups {
        let (mean, report) = group_cost_efix(g);
        if mean != word_lengths(g).mean || !report.witness_ok {
            ok = false;
        }
        if g.order() <= 8 && g.order() <= EMBED_MAX_ORDER {
            let emb = embed_commutative(g)?.cost_efix(&AscentConfig { restarts: 64, iterations: 300, ..Default::default() });
            let r = rel(emb.lower, report.value);
            worst_embed = worst_embed.max(r);
            if r > 0.02 {
                return Ok((false, format!("{name}: embedding {} vs exact {}", emb.lower, report.mean)));
            }
        }
    }
    Ok((ok, format!("{} groups exact; embedding worst relative error {worst_embed:.2e}", groups.len())))
}

fn pauli_closed(seed: u64) -> Check {
    let spec = pauli_spec();
    let mut rng = Rng::seeded(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x = random_hermitian(2, &mut rng);
        let v = pauli_decompose(&x)?;
        worst = worst.max((seminorm(&spec, x.matrix())? - pauli_closed_form(v)).abs());
    }
    Ok((worst <= 1e-10, format!("1000 samples, max deviation {worst:.2e}")))
}

fn depolarizing_exact(seed: u64) -> Check {
    let mut worst: f64 = 0.0;
    let mut worst_lip: f64 = 0.0;
    let mut max_gap: f64 = 0.0;
    let mut rng = Rng::seeded(seed);
    for d in [2usize, 3] {
        let spec = SeminormSpec::linf(if d == 2 { ResourceSet::pauli() } else { ResourceSet::gell_mann(3)? });
        for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let phi = QuantumChannel::depolarizing(d, p)?;
            for _ in 0..50 {
                let x = random_hermitian(d, &mut rng).into_matrix();
                let lhs = seminorm(&spec, &phi.heisenberg(&x)?)?;
                worst = worst.max((lhs - (1.0 - p) * seminorm(&spec, &x)?).abs());
            }
            let r = lip(&phi, &spec, &AscentConfig::light(seed))?;
            worst_lip = worst_lip.max((r.lower - (1.0 - p)).abs());
            max_gap = max_gap.max(r.gap);
        }
    }
    Ok((
        worst <= 1e-10 && worst_lip <= 1e-10 && max_gap == 0.0,
        format!("seminorm deviation {worst:.2e}, lip deviation {worst_lip:.2e}, max gap {max_gap}"),
    ))
}

fn lambda2() -> Check {
    let mut worst: f64 = 0.0;
    for k in 1..=9 {
        let p = k as f64 / 10.0;
        let l2 = bkm_lambda2(&QuantumChannel::depolarizing(2, p)?)?;
        worst = worst.max((l2 - (1.0 - p) * (1.0 - p)).abs());
    }
    Ok((worst <= 1e-8, format!("p = 0.1..0.9, max |lambda2 - (1-p)^2| = {worst:.2e}")))
}

fn entropy_bound(seed: u64) -> Check {
    let half = DensityMatrix::maximally_mixed(2);
    let mut worst = f64::NEG_INFINITY;
    for k in 1..=9 {
        let p = k as f64 / 10.0;
        let s = entropy_contraction_sample(&QuantumChannel::depolarizing(2, p)?, &half, 10_000, derive_seed(seed, k))?;
        worst = worst.max(s.max_ratio - (1.0 - p) * (1.0 - p));
    }
    Ok((worst <= 1e-8, format!("10^4 states per p, max excess over (1-p)^2 = {worst:.2e}")))
}

fn f_p_shape() -> Check {
    let mut even: f64 = 0.0;
    let mut monotone = true;
    let mut limit: f64 = 0.0;
    for k in 0..=10 {
        let p = k as f64 / 10.0;
        let mut prev = f64::INFINITY;
        for i in 1..=1000 {
            let x = 0.5 * i as f64 / 1001.0;
            let v = f_p(p, x)?;
            even = even.max((v - f_p(p, -x)?).abs());
            if v > prev + 1e-15 {
                monotone = false;
            }
            prev = v;
        }
        limit = limit.max((f_p(p, 1e-7)? - (1.0 - p)).abs());
    }
    Ok((
        even < 1e-12 && monotone && limit <= 1e-5,
        format!("evenness {even:.1e}, monotone {monotone}, limit error {limit:.1e}"),
    ))
}

fn duality(seed: u64) -> Check {
    let spec = pauli_spec();
    let mut channels: Vec<QuantumChannel> =
        [0.25, 0.5, 0.75].iter().map(|&p| QuantumChannel::depolarizing(2, p)).collect::<Result<_, _>>()?;
    let mut rng = Rng::seeded(seed);
    for _ in 0..10 {
        channels.push(random_unital_channel(2, 3, &mut rng));
    }
    let rows: Vec<(f64, f64)> = channels
        .par_iter()
        .enumerate()
        .map(|(i, phi)| -> Result<(f64, f64), qot_core::Error> {
            let cfg = AscentConfig::light(derive_seed(seed, i as u64));
            let c = cost_ascent(&phi.heisenberg_super(), &spec, &cfg)?.lower;
            let cs = cost_via_states(phi, &spec, DEFAULT_STATES, &cfg)?.lower;
            let l = lip_super(&phi.heisenberg_super(), &spec, &cfg)?.lower;
            let ls = contraction_via_states(phi, &spec, DEFAULT_PAIRS, &cfg)?.lower;
            Ok((rel(c, cs), rel(l, ls)))
        })
        .collect::<Result<_, _>>()?;
    let wc = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let wl = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok((
        wc <= 0.02 && wl <= 0.02,
        format!("{} channels; worst relative gap cost {wc:.2e}, lip {wl:.2e}", channels.len()),
    ))
}

fn pointwise(seed: u64) -> Check {
    let mut rng = Rng::seeded(derive_seed(seed, 8));
    let mut channels = vec![QuantumChannel::depolarizing(2, 0.3)?, QuantumChannel::pauli(0.1, 0.2, 0.05)?];
    for _ in 0..3 {
        channels.push(random_unital_channel(2, 3, &mut rng));
    }
    let report = property_harness_cost(&channels, &pauli_spec(), 500, seed)?;
    let summary: Vec<String> =
        report.checks.iter().map(|c| format!("{} {:+.1e}", c.name, c.worst_margin)).collect();
    Ok((report.passed(), format!("500 instances; worst margins: {}", summary.join(", "))))
}

fn lifted_pauli() -> Result<ResourceSet, qot_core::Error> {
    let id = ComplexMatrix::identity(2);
    let mut els = Vec::new();
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        els.push(tensor(&pauli(p), &id));
        els.push(tensor(&id, &pauli(p)));
    }
    ResourceSet::new(els, None)
}

/// Subadditivity bounds the joint cost by the lifted local costs, which are cb
/// quantities; amplification 2 is the first level where the lift is visible, so the
/// upper comparison uses the local costs at amplification 2.
fn tensor_checks(seed: u64) -> Check {
    let spec = pauli_spec();
    let spec2 = pauli_spec().with_amplification(2);
    let joint_spec = SeminormSpec::linf(lifted_pauli()?);
    let joint_domain = joint_spec.domain();
    let mut worst_super = f64::NEG_INFINITY;
    let mut worst_sub = f64::NEG_INFINITY;
    let mut worst_amp1 = f64::NEG_INFINITY;
    let mut worst_max: f64 = 0.0;
    for (i, &(p1, p2)) in [(0.3, 0.6), (0.5, 0.5), (0.2, 0.9)].iter().enumerate() {
        let cfg = AscentConfig::light(derive_seed(seed, i as u64));
        let (a, b) = (QuantumChannel::depolarizing(2, p1)?, QuantumChannel::depolarizing(2, p2)?);
        let (ca, cb) = (cost(&a, &spec, &cfg)?, cost(&b, &spec, &cfg)?);
        let local = ca.lower + cb.lower;
        let (f, v) = superadditivity_lower(&a, ca.witness.as_ref().unwrap(), &b, cb.witness.as_ref().unwrap())?;
        if seminorm(&joint_spec, f.matrix())? > 1.0 + 1e-9 {
            return Ok((false, "tensor witness exceeds the unit ball".into()));
        }
        worst_super = worst_super.max(local - v);
        let local_cb = cost_ascent(&a.heisenberg_super(), &spec2, &cfg)?.lower
            + cost_ascent(&b.heisenberg_super(), &spec2, &cfg)?.lower;
        let joint = a.tensor(&b).heisenberg_super();
        let hint = vec![real_coords(f.matrix(), &joint_domain)];
        let cj = cost_ascent_hinted(&joint, &joint_spec, &cfg, &hint)?.lower;
        worst_sub = worst_sub.max(cj / local_cb - 1.02);
        worst_amp1 = worst_amp1.max(cj / local - 1.0);
        let lj = lip_super(&joint, &joint_spec, &cfg)?.lower;
        let lmax = (1.0 - p1).max(1.0 - p2);
        worst_max = worst_max.max(rel(lj, lmax));
    }
    Ok((
        worst_super <= 1e-6 && worst_sub <= 0.0 && worst_max <= 0.02,
        format!(
            "local-sum minus witness {worst_super:.1e}; joint/(cb local-sum) - 1.02 = {worst_sub:.3}; \
             joint/(amp-1 local-sum) - 1 = {worst_amp1:+.3}; lip vs max {worst_max:.1e}"
        ),
    ))
}

fn cc(seed: u64) -> Check {
    let reports = cc_suite(100, seed)?;
    let violations = reports.iter().filter(|r| !r.passed).count();
    let margin = reports.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok((violations == 0, format!("100 Haar samples, {violations} violations, min margin {margin:.3e}")))
}

fn mixing(seed: u64) -> Check {
    let rows = depolarizing_grid(seed)?;
    let failed: Vec<String> = rows.iter().filter(|r| !r.passed).map(|r| format!("(p={}, eps={})", r.p, r.epsilon)).collect();
    let gap = rows.iter().map(|r| r.bridge_gap).fold(0.0, f64::max);
    Ok((
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} grid points, bridge gap {gap:.1e}", rows.len())
        } else {
            format!("failed at {}", failed.join(" "))
        },
    ))
}

fn traceless(d: usize, rng: &mut Rng) -> HermitianMatrix {
    let mut x = random_hermitian(d, rng).into_matrix();
    let tr = x.trace().re / d as f64;
    x.axpy_real(-tr, &ComplexMatrix::identity(d));
    HermitianMatrix::new(x.hermitian_part()).expect("Hermitian by construction")
}

fn calculus(seed: u64) -> Check {
    let mut rng = Rng::seeded(seed);
    let mut worst_deriv: f64 = 0.0;
    let mut worst_ratio = f64::INFINITY;
    for _ in 0..20 {
        let d = 2 + rng.below(2);
        let rho = random_full_rank_state(d, &mut rng);
        let sigma = random_full_rank_state(d, &mut rng);
        let dr = traceless(d, &mut rng).scale(1e-3);
        let an = entropy_derivative(&rho, &dr, &sigma)?;
        let t = 1e-4;
        let shift = |s: f64| -> Result<f64, qot_core::Error> {
            let mut m = rho.matrix().clone();
            m.axpy_real(s, dr.matrix());
            relative_entropy(&DensityMatrix::from_matrix(m)?, &sigma)
        };
        worst_deriv = worst_deriv.max((an - (shift(t)? - shift(-t)?) / (2.0 * t)).abs());

        // keep σ + εx positive for ε ≤ 1e-2
        let x = traceless(d, &mut rng);
        let lmin = eig_hermitian(sigma.hermitian())?.min_eigenvalue();
        let x = x.scale(lmin / op_norm(x.matrix()));
        let errs: Vec<f64> =
            [1e-2, 5e-3, 2.5e-3].iter().map(|&e| second_order_error(&sigma, &x, e)).collect::<Result<_, _>>()?;
        worst_ratio = worst_ratio.min(errs[0] / errs[1]).min(errs[1] / errs[2]);
    }
    let mut pinsker_fail = 0;
    for _ in 0..1000 {
        let d = 2 + rng.below(2);
        let (a, b) = (random_full_rank_state(d, &mut rng), random_full_rank_state(d, &mut rng));
        let (lo, mid, hi) = pinsker_sandwich(&a, &b)?;
        if lo > mid + 1e-12 || mid > hi + 1e-12 {
            pinsker_fail += 1;
        }
    }
    Ok((
        worst_deriv <= 1e-5 && worst_ratio >= 3.5 && pinsker_fail == 0,
        format!("derivative error {worst_deriv:.1e}; min error ratio per halving {worst_ratio:.2}; pinsker failures {pinsker_fail}/1000"),
    ))
}

fn index_check(seed: u64) -> Check {
    let z = ResourceSet::new(vec![pauli(Pauli::Z)], None)?;
    let cases: Vec<(String, ConditionalExpectation, Vec<(usize, usize)>, f64, f64)> = vec![
        ("scalars d=3".into(), ConditionalExpectation::onto_scalars(3), vec![(1, 3)], 3.0, 9.0),
        ("scalars d=4".into(), ConditionalExpectation::onto_scalars(4), vec![(1, 4)], 4.0, 16.0),
        ("diagonal d=2".into(), ConditionalExpectation::onto_commutant(&z), vec![(1, 1), (1, 1)], 2.0, 2.0),
        ("identity d=2".into(), ConditionalExpectation::new(2, hermitian_basis(2))?, vec![(2, 1)], 1.0, 1.0),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (name, e, blocks, f, fcb)) in cases.iter().enumerate() {
        let r = index(e, Some(blocks), INDEX_SAMPLES, derive_seed(seed, i as u64))?;
        let good = r.formula == Some(*f) && r.formula_cb == Some(*fcb) && r.numeric_lower <= f + 1e-8;
        ok &= good;
        parts.push(format!("{name}: {} (sampled {:.6})", f, r.numeric_lower));
    }
    Ok((ok, parts.join("; ")))
}
