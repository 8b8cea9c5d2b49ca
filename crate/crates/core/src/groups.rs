//! Finite groups: Cayley word lengths, the commutative Lipschitz seminorm and
//! the diagonal embedding into 𝕄_{|G|}.
//!
//! Elements are indices `0..order`; `table[a][b]` is the product `ab`. Words are
//! built by left multiplication, so the Cayley distance is `d(x, y) = ℓ(y x⁻¹)`
//! and left translations `h ↦ gh` move every point by exactly `ℓ(g)`.

use std::collections::VecDeque;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::ascent::{maximize, AscentConfig, Family, Objective, RatioProblem};
use crate::channel::SuperOperator;
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};
use crate::report::CostReport;
use crate::sampling::Rng;
use crate::seminorm::{ascent_report, ResourceSet};

/// Largest order accepted by [`embed_commutative`].
pub const EMBED_MAX_ORDER: usize = 12;
/// Orders up to this get a full associativity check; larger tables are spot checked.
pub const FULL_ASSOC_ORDER: usize = 24;

/// Group file format `{"order", "table", "identity", "generators"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupJson {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub generators: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupTable {
    order: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
    generators: Vec<usize>,
    inverse: Vec<usize>,
}

impl FiniteGroupTable {
    /// Validates the Latin-square property, identity, associativity, symmetry of
    /// the generating set and that it generates.
    pub fn new(table: Vec<Vec<usize>>, identity: usize, generators: Vec<usize>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x >= n || seen[x] {
                    return Err(Error::InvalidGroup(format!("row {i} is not a permutation of 0..{n}")));
                }
                seen[x] = true;
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                if seen[row[j]] {
                    return Err(Error::InvalidGroup(format!("column {j} repeats an element")));
                }
                seen[row[j]] = true;
            }
        }
        if identity >= n || (0..n).any(|g| table[identity][g] != g || table[g][identity] != g) {
            return Err(Error::InvalidGroup(format!("element {identity} is not an identity")));
        }
        let assoc = |a: usize, b: usize, c: usize| table[table[a][b]][c] == table[a][table[b][c]];
        if n <= FULL_ASSOC_ORDER {
            for a in 0..n {
                for b in 0..n {
                    for cc in 0..n {
                        if !assoc(a, b, cc) {
                            return Err(Error::InvalidGroup(format!("({a}·{b})·{cc} ≠ {a}·({b}·{cc})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = Rng::seeded(0);
            for _ in 0..1000 {
                let (a, b, cc) = (rng.below(n), rng.below(n), rng.below(n));
                if !assoc(a, b, cc) {
                    return Err(Error::InvalidGroup(format!("({a}·{b})·{cc} ≠ {a}·({b}·{cc})")));
                }
            }
        }
        let inverse: Vec<usize> =
            (0..n).map(|g| (0..n).find(|&h| table[g][h] == identity).expect("Latin square")).collect();
        for &s in &generators {
            if s >= n {
                return Err(Error::InvalidGroup(format!("generator {s} out of range")));
            }
            if !generators.contains(&inverse[s]) {
                return Err(Error::InvalidGroup(format!("generating set is not symmetric: inverse of {s} missing")));
            }
        }
        let g = FiniteGroupTable { order: n, table, identity, generators, inverse };
        let unreachable: Vec<usize> = g.distances_from(identity).iter().enumerate().filter(|(_, d)| d.is_none()).map(|(i, _)| i).collect();
        if !unreachable.is_empty() {
            return Err(Error::InvalidGroup(format!("generators do not reach elements {unreachable:?}")));
        }
        Ok(g)
    }

    pub fn from_json(j: GroupJson) -> Result<Self> {
        if j.table.len() != j.order {
            return Err(Error::InvalidGroup(format!("\"order\" is {} but table has {} rows", j.order, j.table.len())));
        }
        Self::new(j.table, j.identity, j.generators)
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson { order: self.order, table: self.table.clone(), identity: self.identity, generators: self.generators.clone() }
    }

    /// `ℤ_n` with generators `{1, n−1}` (just `{1}` for `n ≤ 2`).
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGroup("order must be positive".into()));
        }
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let gens = match n {
            1 => vec![],
            2 => vec![1],
            _ => vec![1, n - 1],
        };
        Self::new(table, 0, gens)
    }

    /// Dihedral group of order `2n`, generators `{r, r⁻¹, s}`. Element `k + n·f`
    /// is `r^k s^f`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGroup("dihedral group needs n ≥ 2".into()));
        }
        let mul = |a: usize, b: usize| {
            let (ka, fa) = (a % n, a / n);
            let (kb, fb) = (b % n, b / n);
            // r^ka s^fa r^kb s^fb = r^(ka ± kb) s^(fa+fb)
            let k = if fa == 0 { (ka + kb) % n } else { (ka + n - kb) % n };
            k + n * ((fa + fb) % 2)
        };
        let m = 2 * n;
        let table = (0..m).map(|a| (0..m).map(|b| mul(a, b)).collect()).collect();
        let mut gens = vec![1, n - 1, n];
        gens.dedup();
        Self::new(table, 0, gens)
    }

    /// Symmetric group on `k` letters, elements in lexicographic order of one-line
    /// notation, generated by adjacent transpositions; product is composition
    /// `(ab)(i) = a(b(i))`.
    pub fn symmetric(k: usize) -> Result<Self> {
        if k == 0 || k > 6 {
            return Err(Error::InvalidGroup("symmetric group supported for 1 ≤ k ≤ 6".into()));
        }
        let perms = permutations(k);
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).expect("closed under composition");
        let table = perms
            .iter()
            .map(|a| perms.iter().map(|b| index(&b.iter().map(|&i| a[i]).collect())).collect())
            .collect();
        let gens = (0..k.saturating_sub(1))
            .map(|i| {
                let mut t: Vec<usize> = (0..k).collect();
                t.swap(i, i + 1);
                index(&t)
            })
            .collect();
        Self::new(table, 0, gens)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// BFS distances `d(from, y)` along edges `x → s·x`.
    pub fn distances_from(&self, from: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.order];
        dist[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].expect("queued nodes have distances");
            for &s in &self.generators {
                let y = self.table[s][x];
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Word lengths with their exact mean.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordLengthProfile {
    pub lengths: Vec<u32>,
    pub mean: Ratio<i64>,
}

impl WordLengthProfile {
    pub fn mean_f64(&self) -> f64 {
        *self.mean.numer() as f64 / *self.mean.denom() as f64
    }

    /// `"p/q"` rendering of the mean.
    pub fn mean_string(&self) -> String {
        format!("{}/{}", self.mean.numer(), self.mean.denom())
    }
}

pub fn word_lengths(g: &FiniteGroupTable) -> WordLengthProfile {
    let lengths: Vec<u32> = g.distances_from(g.identity).into_iter().map(|d| d.expect("generating set")).collect();
    let total: i64 = lengths.iter().map(|&l| l as i64).sum();
    WordLengthProfile { mean: Ratio::new(total, g.order as i64), lengths }
}

/// `max_{s, g} |f(sg) − f(g)|`.
pub fn group_seminorm(g: &FiniteGroupTable, f: &[f64]) -> Result<f64> {
    if f.len() != g.order {
        return Err(Error::DimensionMismatch { context: "function length vs group order", expected: g.order, got: f.len() });
    }
    let mut best: f64 = 0.0;
    for &s in &g.generators {
        for x in 0..g.order {
            best = best.max((f[g.table[s][x]] - f[x]).abs());
        }
    }
    Ok(best)
}

/// Exact `Cost_S(E_fix)` together with the witness checks behind it.
#[derive(Clone, Debug, Serialize)]
pub struct GroupCostReport {
    pub mean: String,
    pub value: f64,
    /// Seminorm of `f_S = ℓ_S − mean·𝟏`.
    pub witness_seminorm: f64,
    /// `max_g |f_S(g)|`.
    pub witness_sup: f64,
    pub witness_ok: bool,
}

pub fn group_cost_efix(g: &FiniteGroupTable) -> (Ratio<i64>, GroupCostReport) {
    let prof = word_lengths(g);
    let mean = prof.mean_f64();
    let f: Vec<f64> = prof.lengths.iter().map(|&l| l as f64 - mean).collect();
    let sn = group_seminorm(g, &f).expect("matching length");
    let sup = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let report = GroupCostReport {
        mean: prof.mean_string(),
        value: mean,
        witness_seminorm: sn,
        witness_sup: sup,
        witness_ok: sn <= 1.0 + 1e-12 && sup >= mean - 1e-12,
    };
    (prof.mean, report)
}

/// `ℓ_S(g)`, the cost of left translation by `g`.
pub fn translation_cost(g: &FiniteGroupTable, x: usize) -> Result<u32> {
    if x >= g.order {
        return Err(Error::OutOfRange(format!("element {x} out of range for order {}", g.order)));
    }
    Ok(word_lengths(g).lengths[x])
}

/// `max_h d(h, xh)` by explicit BFS from every `h`.
pub fn translation_cost_bruteforce(g: &FiniteGroupTable, x: usize) -> u32 {
    (0..g.order)
        .map(|h| g.distances_from(h)[g.table[x][h]].expect("connected"))
        .max()
        .unwrap_or(0)
}

/// Diagonal embedding of `L_∞(G)` into 𝕄_{|G|}.
#[derive(Clone, Debug)]
pub struct CommutativeEmbedding {
    /// `{λ_s}` with `λ_s e_g = e_{sg}`.
    pub resource: ResourceSet,
    /// `X ↦ tr(X)/n·𝟏`.
    pub efix: SuperOperator,
    /// Orthonormal basis of the traceless diagonal matrices.
    pub domain: Vec<ComplexMatrix>,
}

pub fn embed_commutative(g: &FiniteGroupTable) -> Result<CommutativeEmbedding> {
    let n = g.order;
    if n > EMBED_MAX_ORDER {
        return Err(Error::OutOfRange(format!("embedding supports order ≤ {EMBED_MAX_ORDER}, got {n}")));
    }
    if g.generators.is_empty() {
        return Err(Error::InvalidGroup("trivial generating set has no embedding".into()));
    }
    let elements = g
        .generators
        .iter()
        .map(|&s| ComplexMatrix::from_fn(n, n, |r, col| if g.table[s][col] == r { c(1.0, 0.0) } else { c(0.0, 0.0) }))
        .collect();
    let labels = g.generators.iter().map(|s| format!("lambda_{s}")).collect();
    let resource = ResourceSet::new(elements, Some(labels))?;
    let efix = SuperOperator::from_map(n, |x| ComplexMatrix::identity(n).scale(x.trace() / n as f64));
    // Helmert basis of the traceless diagonal
    let domain = (1..n)
        .map(|k| {
            let norm = ((k * (k + 1)) as f64).sqrt();
            let mut diag = vec![0.0; n];
            for v in diag.iter_mut().take(k) {
                *v = 1.0 / norm;
            }
            diag[k] = -(k as f64) / norm;
            ComplexMatrix::from_real_diag(&diag)
        })
        .collect();
    Ok(CommutativeEmbedding { resource, efix, domain })
}

impl CommutativeEmbedding {
    pub fn diag(f: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(f)
    }

    /// Quantum-side seminorm `max_s ‖[λ_s, diag f]‖`.
    pub fn seminorm(&self, f: &[f64]) -> f64 {
        let x = Self::diag(f);
        self.resource.elements().iter().map(|s| crate::linalg::op_norm(&s.commutator(&x))).fold(0.0, f64::max)
    }

    /// Ascent estimate of `sup ‖E_fix(X) − X‖ / |||X|||` over traceless diagonal `X`.
    pub fn cost_efix(&self, cfg: &AscentConfig) -> CostReport {
        let num = Objective::OpNorm(Family::from_map(&self.domain, |b| &self.efix.apply(b) - b));
        let den = Objective::MaxOpNorm(
            self.resource.elements().iter().map(|s| Family::from_map(&self.domain, |b| s.commutator(b))).collect(),
        );
        let p = RatioProblem { dim: self.domain.len(), num, den };
        let res = maximize(&p, cfg, &[]);
        let mut r = ascent_report(res, &self.domain, cfg, 1);
        r.diagnostics.push("domain: traceless diagonal matrices".into());
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_groups_validate() {
        for n in 1..=12 {
            assert_eq!(FiniteGroupTable::cyclic(n).unwrap().order(), n);
        }
        assert_eq!(FiniteGroupTable::dihedral(4).unwrap().order(), 8);
        assert_eq!(FiniteGroupTable::symmetric(3).unwrap().order(), 6);
        assert_eq!(FiniteGroupTable::symmetric(4).unwrap().order(), 24);
    }

    #[test]
    fn word_length_examples() {
        let triv = FiniteGroupTable::cyclic(1).unwrap();
        assert_eq!(word_lengths(&triv).mean, Ratio::from_integer(0));
        let z4 = FiniteGroupTable::cyclic(4).unwrap();
        let p = word_lengths(&z4);
        assert_eq!(p.lengths, vec![0, 1, 2, 1]);
        assert_eq!(p.mean, Ratio::from_integer(1));
        let s3 = FiniteGroupTable::symmetric(3).unwrap();
        let p = word_lengths(&s3);
        assert_eq!(p.lengths, vec![0, 1, 1, 2, 2, 3]);
        assert_eq!(p.mean, Ratio::new(3, 2));
        let z2 = FiniteGroupTable::cyclic(2).unwrap();
        assert_eq!(word_lengths(&z2).mean, Ratio::new(1, 2));
        assert_eq!(word_lengths(&FiniteGroupTable::symmetric(4).unwrap()).mean, Ratio::from_integer(3));
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let bad_latin = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroupTable::new(bad_latin, 0, vec![1]).is_err());
        let z3: Vec<Vec<usize>> = (0..3).map(|a| (0..3).map(|b| (a + b) % 3).collect()).collect();
        assert!(matches!(FiniteGroupTable::new(z3.clone(), 0, vec![1]), Err(Error::InvalidGroup(m)) if m.contains("symmetric")));
        let z4: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| (a + b) % 4).collect()).collect();
        assert!(matches!(FiniteGroupTable::new(z4, 0, vec![2]), Err(Error::InvalidGroup(m)) if m.contains("reach")));
        assert!(FiniteGroupTable::new(z3, 1, vec![1, 2]).is_err());
    }

    #[test]
    fn seminorm_examples() {
        let z4 = FiniteGroupTable::cyclic(4).unwrap();
        assert_eq!(group_seminorm(&z4, &[2.0; 4]).unwrap(), 0.0);
        assert_eq!(group_seminorm(&z4, &[1.0, 0.0, 0.0, 0.0]).unwrap(), 1.0);
        let lengths: Vec<f64> = word_lengths(&z4).lengths.iter().map(|&l| l as f64).collect();
        assert_eq!(group_seminorm(&z4, &lengths).unwrap(), 1.0);
    }

    #[test]
    fn translation_examples() {
        let z4 = FiniteGroupTable::cyclic(4).unwrap();
        assert_eq!(translation_cost(&z4, 0).unwrap(), 0);
        assert_eq!(translation_cost(&z4, 2).unwrap(), 2);
        for g in [FiniteGroupTable::symmetric(3).unwrap(), FiniteGroupTable::dihedral(5).unwrap()] {
            for x in 0..g.order() {
                let t = translation_cost(&g, x).unwrap();
                assert_eq!(t, translation_cost_bruteforce(&g, x));
                assert_eq!(t, translation_cost(&g, g.inverse(x)).unwrap());
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let z4 = FiniteGroupTable::cyclic(4).unwrap();
        let emb = embed_commutative(&z4).unwrap();
        assert_eq!(emb.seminorm(&[3.0; 4]), 0.0);
        assert!((emb.seminorm(&[1.0, 0.0, 0.0, 0.0]) - 1.0).abs() < 1e-14);
        assert!(embed_commutative(&FiniteGroupTable::symmetric(4).unwrap()).is_err());
    }
}
