//! γ-uniform and (d,ε)-diverse word pairs, the explicit uniform set
//! constructions, the binary alphabet reduction and an exact small-instance
//! oracle for the largest uniform biclique.

mod family;

pub use family::{binary_bit_balance, from_binary, to_binary, FamilyKind, SetFamily};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bounds::binary_entropy;
use crate::bpis::{max_bpis, ConflictGraph};
use crate::channel::{all_words, Word};
use crate::error::{Error, Result};
use crate::math::{binomial, floor_scaled, log2_big, seeded_rng};

/// Default word budget for [`max_uniform_biclique_exact`].
pub const DEFAULT_BICLIQUE_WORDS: usize = 16;

/// Occurrence counts of symbol pairs in a pair of words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeMatrix {
    q_size: usize,
    n: usize,
    counts: Vec<usize>,
}

impl TypeMatrix {
    pub fn q_size(&self) -> usize {
        self.q_size
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, alpha: usize, beta: usize) -> usize {
        self.counts[alpha * self.q_size + beta]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[usize] {
        &self.counts
    }

    /// Smallest γ for which this type is γ-uniform:
    /// `max |count − n/Q²| / (n/Q²)`.
    pub fn uniformity_gamma(&self) -> BigRational {
        let q2 = BigInt::from(self.q_size * self.q_size);
        let target = BigRational::new(BigInt::from(self.n), q2.clone());
        self.counts
            .iter()
            .map(|&c| ((BigRational::from_integer(c.into()) - &target).abs()) / &target)
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

pub fn type_of(x: &Word, y: &Word, q_size: usize) -> Result<TypeMatrix> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "blocklength mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if !x.is_valid_for(q_size) || !y.is_valid_for(q_size) {
        return Err(Error::domain(format!("word outside the alphabet [{q_size}]")));
    }
    let mut counts = vec![0; q_size * q_size];
    for (&a, &b) in x.symbols().iter().zip(y.symbols()) {
        counts[a as usize * q_size + b as usize] += 1;
    }
    Ok(TypeMatrix {
        q_size,
        n: x.len(),
        counts,
    })
}

/// The closed interval `[(1−γ)n/Q², (1+γ)n/Q²]` in exact rationals, with the
/// integer count range it admits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformPairSpec {
    pub q_size: usize,
    pub n: usize,
    pub gamma: BigRational,
    pub lower: BigRational,
    pub upper: BigRational,
    min_count: usize,
    max_count: usize,
}

impl UniformPairSpec {
    /// `gamma` is converted exactly from its binary floating-point value.
    pub fn new(q_size: usize, n: usize, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::domain(format!(
                "gamma must be finite and non-negative, got {gamma}"
            )));
        }
        let gamma = BigRational::from_float(gamma).expect("finite float");
        let one = BigRational::from_integer(1.into());
        let target = BigRational::new(BigInt::from(n), BigInt::from(q_size * q_size));
        let lower = (&one - &gamma) * &target;
        let upper = (&one + &gamma) * &target;
        let min_count = if lower.is_positive() {
            lower.ceil().to_integer().to_usize().unwrap_or(usize::MAX)
        } else {
            0
        };
        let max_count = upper.floor().to_integer().to_usize().unwrap_or(usize::MAX);
        Ok(UniformPairSpec {
            q_size,
            n,
            gamma,
            lower,
            upper,
            min_count,
            max_count,
        })
    }

    pub fn min_count(&self) -> usize {
        self.min_count
    }

    pub fn max_count(&self) -> usize {
        self.max_count
    }

    pub fn admits(&self, count: usize) -> bool {
        (self.min_count..=self.max_count).contains(&count)
    }

    pub fn admits_type(&self, t: &TypeMatrix) -> bool {
        t.n == self.n && t.q_size == self.q_size && t.counts.iter().all(|&c| self.admits(c))
    }
}

/// True iff every type entry of `(x, y)` lies in the closed interval
/// `[(1−γ)n/Q², (1+γ)n/Q²]`. Mismatched or out-of-alphabet words are not
/// uniform.
pub fn is_gamma_uniform_pair(x: &Word, y: &Word, q_size: usize, gamma: f64) -> bool {
    let Ok(t) = type_of(x, y, q_size) else {
        return false;
    };
    UniformPairSpec::new(q_size, x.len(), gamma).is_ok_and(|window| window.admits_type(&t))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every cross pair was checked.
    Proved,
    /// A randomized audit of this many cross pairs found no violation.
    Audited {
        samples: u64,
    },
    Refuted {
        x: Word,
        y: Word,
    },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }
}

/// Checks every cross pair of `A × B` when `|A|·|B| ≤ audit_budget`, and
/// otherwise audits `audit_budget` random cross pairs. Sample `i` draws from
/// stream `i` of `seed`, so the verdict does not depend on thread count.
pub fn is_gamma_uniform_sets(a: &SetFamily, b: &SetFamily, gamma: f64, audit_budget: u64, seed: u64) -> Verdict {
    let q_size = a.q_size().max(b.q_size());
    let Ok(window) = UniformPairSpec::new(q_size, a.n(), gamma) else {
        return refute_first(a, b);
    };
    if a.n() != b.n() {
        return refute_first(a, b);
    }
    let check = |x: &Word, y: &Word| type_of(x, y, q_size).is_ok_and(|t| window.admits_type(&t));
    let product = a.cardinality() * b.cardinality();
    if product <= BigUint::from(audit_budget) {
        let budget = audit_budget as usize;
        let (Some(xs), Some(ys)) = (a.enumerate(budget), b.enumerate(budget)) else {
            unreachable!("families within budget enumerate");
        };
        let witness = xs
            .par_iter()
            .find_map_first(|x| ys.iter().find(|y| !check(x, y)).map(|y| (x.clone(), y.clone())));
        return match witness {
            Some((x, y)) => Verdict::Refuted { x, y },
            None => Verdict::Proved,
        };
    }
    let witness = (0..audit_budget).into_par_iter().find_map_first(|i| {
        let mut rng = seeded_rng(seed, i);
        let x = a.sample(&mut rng);
        let y = b.sample(&mut rng);
        (!check(&x, &y)).then_some((x, y))
    });
    match witness {
        Some((x, y)) => Verdict::Refuted { x, y },
        None => Verdict::Audited { samples: audit_budget },
    }
}

fn refute_first(a: &SetFamily, b: &SetFamily) -> Verdict {
    let mut rng = seeded_rng(0, 0);
    Verdict::Refuted {
        x: a.sample(&mut rng),
        y: b.sample(&mut rng),
    }
}

/// Minimum, over index sets of size `k`, of the number of distinct symbol
/// pairs they hit: the adversary fills `I` from the most frequent pairs.
pub fn min_distinct_pairs(t: &TypeMatrix, k: usize) -> usize {
    let mut counts: Vec<usize> = t.counts.iter().copied().filter(|&c| c > 0).collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let mut covered = 0;
    for (used, c) in counts.iter().enumerate() {
        if covered >= k {
            return used;
        }
        covered += c;
    }
    counts.len()
}

/// `(d, ε)`-diversity: every set of `⌊dn⌋` coordinates hits more than `εQ²`
/// distinct symbol pairs. Vacuously true when `⌊dn⌋ = 0`.
pub fn is_diverse_pair(x: &Word, y: &Word, q_size: usize, d: f64, eps: f64) -> bool {
    let Ok(t) = type_of(x, y, q_size) else {
        return false;
    };
    let k = floor_scaled(d, t.n).min(t.n);
    if k == 0 {
        return true;
    }
    min_distinct_pairs(&t, k) as f64 > eps * (q_size * q_size) as f64
}

/// The implication gate `d > (1+γ)ε`.
pub fn uniform_implies_diverse_check(gamma: f64, d: f64, eps: f64) -> bool {
    d > (1.0 + gamma) * eps
}

/// The same gate with `d` replaced by `⌊dn⌋/n`, which is what the diversity
/// predicate actually tests at blocklength `n`.
pub fn uniform_implies_diverse_check_at(gamma: f64, d: f64, eps: f64, n: usize) -> bool {
    n > 0 && uniform_implies_diverse_check(gamma, floor_scaled(d, n) as f64 / n as f64, eps)
}

/// A γ-uniform pair of families with its provenance.
#[derive(Clone, Debug)]
pub struct UniformConstruction {
    pub a: SetFamily,
    pub b: SetFamily,
    pub gamma: f64,
    pub radius: usize,
    pub warnings: Vec<String>,
}

impl UniformConstruction {
    pub fn product(&self) -> BigUint {
        self.a.cardinality() * self.b.cardinality()
    }

    pub fn log2_product(&self) -> f64 {
        log2_big(&self.product())
    }
}

/// Binary construction: `A` is the union of the radius-`⌊γn/4⌋` balls around
/// `0^{n/2}1^{n/2}` and its complement; `B` holds the words with exactly
/// `n/4` ones in each half.
pub fn construct_binary_uniform(n: usize, gamma: f64) -> Result<UniformConstruction> {
    if n == 0 || !n.is_multiple_of(4) {
        return Err(Error::domain(format!("n = {n} must be a positive multiple of 4")));
    }
    if !(0.0..2.0).contains(&gamma) {
        return Err(Error::domain(format!("gamma = {gamma} must lie in [0, 2)")));
    }
    let radius = floor_scaled(gamma / 4.0, n);
    let center = Word::new((0..n).map(|i| u16::from(i >= n / 2)).collect());
    let complement = Word::new(center.symbols().iter().map(|&s| 1 - s).collect());
    Ok(UniformConstruction {
        a: SetFamily::hamming_ball(2, vec![center, complement], radius)?,
        b: SetFamily::block_balanced(2, n)?,
        gamma,
        radius,
        warnings: Vec::new(),
    })
}

/// General-alphabet construction: `A` is the radius-`⌊γn/Q²⌋` ball around the
/// staircase word `0^{n/Q}1^{n/Q}…(Q−1)^{n/Q}`; `B` holds the words with every
/// symbol exactly `n/Q²` times in each of the Q blocks.
pub fn construct_staircase_uniform(q_size: usize, n: usize, gamma: f64) -> Result<UniformConstruction> {
    if q_size < 3 {
        return Err(Error::domain(format!("alphabet size {q_size} must be at least 3")));
    }
    let q2 = q_size * q_size;
    if n == 0 || !n.is_multiple_of(q2) {
        return Err(Error::domain(format!("Q^2 = {q2} must divide n = {n}")));
    }
    if !(0.0..=q2 as f64).contains(&gamma) {
        return Err(Error::domain(format!("gamma = {gamma} must lie in [0, {q2}]")));
    }
    let mut warnings = Vec::new();
    if n < q_size.pow(3) {
        warnings.push(format!(
            "n = {n} < Q^3 = {}: the size lower bound is not claimed here",
            q_size.pow(3)
        ));
    }
    let radius = floor_scaled(gamma / q2 as f64, n);
    let center = Word::new((0..n).map(|i| (i * q_size / n) as u16).collect());
    Ok(UniformConstruction {
        a: SetFamily::hamming_ball(q_size, vec![center], radius)?,
        b: SetFamily::block_balanced(q_size, n)?,
        gamma,
        radius,
        warnings,
    })
}

/// `log₂` of `(2/(n(n+1)))·2^{(1+H(γ/4))n}`.
pub fn binary_uniform_log2_bound(n: usize, gamma: f64) -> f64 {
    let nf = n as f64;
    (2.0 / (nf * (nf + 1.0))).log2() + (1.0 + binary_entropy(gamma / 4.0)) * nf
}

/// `log₂` of `(1/n)^{Q²/2}·2^{H(γ/Q²)n}·(Q−1)^{γn/Q²}·Qⁿ`.
pub fn staircase_uniform_log2_bound(q_size: usize, n: usize, gamma: f64) -> f64 {
    let (q, nf) = (q_size as f64, n as f64);
    let q2 = q * q;
    -(q2 / 2.0) * nf.log2() + binary_entropy(gamma / q2) * nf + gamma * nf / q2 * (q - 1.0).log2() + nf * q.log2()
}

/// Maps both families through the symbol-wise binary representation of
/// `[2^bits]`. Every bit position is 1 for exactly half the symbols.
pub fn binary_reduction(a: &SetFamily, b: &SetFamily, bits: u32) -> Result<(SetFamily, SetFamily)> {
    let half = (1usize << bits) / 2;
    if binary_bit_balance(bits).iter().any(|&c| c != half) {
        return Err(Error::Construction(
            "binary representation is not coordinate-balanced".into(),
        ));
    }
    Ok((SetFamily::binary(a.clone(), bits)?, SetFamily::binary(b.clone(), bits)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformBiclique {
    pub a: Vec<Word>,
    pub b: Vec<Word>,
    pub size: usize,
}

/// Exact maximum of `|A|·|B|` over set pairs in `[Q]^n` whose cross pairs are
/// all γ-uniform, as a maximum independent rectangle in the graph of
/// non-uniform pairs.
pub fn max_uniform_biclique_exact(q_size: usize, n: usize, gamma: f64, max_words: usize) -> Result<UniformBiclique> {
    let count = (q_size as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > max_words.min(64) as u128 {
        return Err(Error::budget(format!(
            "Q^n = {count} exceeds the biclique budget {}",
            max_words.min(64)
        )));
    }
    let window = UniformPairSpec::new(q_size, n, gamma)?;
    let words = all_words(q_size, n);
    let mut graph = ConflictGraph::new(words.len(), words.len())?;
    for (i, x) in words.iter().enumerate() {
        for (j, y) in words.iter().enumerate() {
            if !window.admits_type(&type_of(x, y, q_size)?) {
                graph.add_edge(i, j);
            }
        }
    }
    let best = max_bpis(&graph, words.len())?;
    Ok(UniformBiclique {
        a: best.a.iter().map(|&i| words[i].clone()).collect(),
        b: best.b.iter().map(|&j| words[j].clone()).collect(),
        size: best.size,
    })
}

/// Both forms of the upper bound on `|A|·|B|` for γ-uniform binary families
/// of length `N = nq`, in `log₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BicliqueBound {
    /// `C(N, ⌊γN/2⌋)·2^{N(1+γ/2)}`.
    pub log2_binomial: f64,
    /// `2^{N(1+γ/2+H(γ/2))}`.
    pub log2_smooth: f64,
}

pub fn uniform_biclique_upper_bound(n: usize, q: u32, gamma: f64) -> BicliqueBound {
    let big_n = n * q as usize;
    let nf = big_n as f64;
    let k = floor_scaled(gamma / 2.0, big_n).min(big_n);
    BicliqueBound {
        log2_binomial: log2_big(&binomial(big_n as u64, k as u64)) + nf * (1.0 + gamma / 2.0),
        log2_smooth: nf * (1.0 + gamma / 2.0 + binary_entropy((gamma / 2.0).min(1.0))),
    }
}

/// Exact `|A|` of the binary construction: `2·Σ_{i≤r} C(n,i)`.
pub fn binary_uniform_a_size(n: usize, radius: usize) -> BigUint {
    (0..=radius.min(n))
        .map(|i| binomial(n as u64, i as u64))
        .sum::<BigUint>()
        * 2u32
}

/// Exact `|B|` of the binary construction: `C(n/2, n/4)²`.
pub fn binary_uniform_b_size(n: usize) -> BigUint {
    binomial(n as u64 / 2, n as u64 / 4).pow(2)
}

/// `n/Q²` when it is an integer.
pub fn balanced_count(q_size: usize, n: usize) -> Option<usize> {
    let (d, r) = n.div_rem(&(q_size * q_size));
    (r == 0).then_some(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use rand::Rng;

    fn w(v: &[u16]) -> Word {
        Word::new(v.to_vec())
    }

    fn brute_diverse(x: &Word, y: &Word, q: usize, d: f64, eps: f64) -> bool {
        let n = x.len();
        let k = floor_scaled(d, n).min(n);
        if k == 0 {
            return true;
        }
        (0..n)
            .combinations(k)
            .map(|idx| idx.iter().map(|&i| (x.symbols()[i], y.symbols()[i])).unique().count())
            .min()
            .unwrap() as f64
            > eps * (q * q) as f64
    }

    #[test]
    fn type_examples() {
        let t = type_of(&w(&[0, 0, 1, 1]), &w(&[0, 1, 0, 1]), 2).unwrap();
        assert_eq!(t.entries(), &[1, 1, 1, 1]);
        let t = type_of(&w(&[0, 1, 0, 1]), &w(&[1, 1, 0, 0]), 2).unwrap();
        assert_eq!((t.get(0, 1), t.get(1, 1), t.get(0, 0), t.get(1, 0)), (1, 1, 1, 1));
        let t = type_of(&w(&[0; 5]), &w(&[0; 5]), 3).unwrap();
        assert_eq!(t.get(0, 0), 5);
        assert_eq!(t.entries().iter().sum::<usize>(), 5);
        assert!(type_of(&w(&[0]), &w(&[0, 1]), 2).is_err());
    }

    #[test]
    fn uniform_pair_examples() {
        let (x, y) = (w(&[0, 0, 1, 1]), w(&[0, 1, 0, 1]));
        for g in [0.0, 0.3, 1.0, 5.0] {
            assert!(is_gamma_uniform_pair(&x, &y, 2, g));
        }
        assert!(!is_gamma_uniform_pair(&w(&[0; 4]), &w(&[0; 4]), 2, 1.0));
        assert!(is_gamma_uniform_pair(&w(&[0; 4]), &w(&[0; 4]), 2, 3.0));
        assert!(is_gamma_uniform_pair(&w(&[0, 1, 1]), &w(&[1, 0, 1]), 2, 2.5));
    }

    #[test]
    fn closed_interval_endpoints() {
        // n = 8, Q = 2: target 2, γ = 0.5 admits counts 1..=3 exactly.
        let window = UniformPairSpec::new(2, 8, 0.5).unwrap();
        assert_eq!((window.min_count(), window.max_count()), (1, 3));
        let window = UniformPairSpec::new(3, 9, 0.0).unwrap();
        assert_eq!((window.min_count(), window.max_count()), (1, 1));
        assert!(UniformPairSpec::new(2, 4, -0.1).is_err());
    }

    #[test]
    fn uniformity_gamma_is_tight() {
        let mut rng = seeded_rng(4, 0);
        for _ in 0..300 {
            let n = rng.gen_range(1..10);
            let x = Word::new((0..n).map(|_| rng.gen_range(0..2)).collect());
            let y = Word::new((0..n).map(|_| rng.gen_range(0..2)).collect());
            let g = type_of(&x, &y, 2).unwrap().uniformity_gamma().to_f64().unwrap();
            assert!(is_gamma_uniform_pair(&x, &y, 2, g + 1e-12));
            if g > 1e-6 {
                assert!(!is_gamma_uniform_pair(&x, &y, 2, g - 1e-6));
            }
        }
    }

    #[test]
    fn diverse_examples() {
        assert!(!is_diverse_pair(&w(&[0; 6]), &w(&[0; 6]), 2, 0.5, 0.25));
        assert!(is_diverse_pair(&w(&[0, 0, 1, 1]), &w(&[0, 1, 0, 1]), 2, 1.0, 0.75));
        assert!(is_diverse_pair(&w(&[0; 6]), &w(&[0; 6]), 2, 0.1, 0.9));
    }

    #[test]
    fn greedy_diversity_matches_brute_force() {
        let mut rng = seeded_rng(11, 0);
        for _ in 0..300 {
            let q = rng.gen_range(2..=3);
            let n = rng.gen_range(1..=12);
            let x = Word::new((0..n).map(|_| rng.gen_range(0..q as u16)).collect());
            let y = Word::new((0..n).map(|_| rng.gen_range(0..q as u16)).collect());
            let d = rng.gen_range(0.0..=1.0);
            let eps = rng.gen_range(0.0..1.0);
            assert_eq!(is_diverse_pair(&x, &y, q, d, eps), brute_diverse(&x, &y, q, d, eps));
        }
    }

    #[test]
    fn gate_examples() {
        assert!(uniform_implies_diverse_check(1.0, 0.25, 0.1));
        assert!(!uniform_implies_diverse_check(1.0, 0.2, 0.1));
        assert!(uniform_implies_diverse_check(0.0, 0.01, 0.0));
        // 0.3·4 floors to 1: the floored gate fails where the real one holds.
        assert!(uniform_implies_diverse_check(0.0, 0.3, 0.29));
        assert!(!uniform_implies_diverse_check_at(0.0, 0.3, 0.29, 4));
    }

    #[test]
    fn uniform_implies_diverse_under_floored_gate() {
        let mut rng = seeded_rng(12, 0);
        let mut checked = 0;
        while checked < 2000 {
            let q = rng.gen_range(2..=3);
            let n = rng.gen_range(1..=16);
            let x = Word::new((0..n).map(|_| rng.gen_range(0..q as u16)).collect());
            let y = Word::new((0..n).map(|_| rng.gen_range(0..q as u16)).collect());
            let gamma = type_of(&x, &y, q).unwrap().uniformity_gamma().to_f64().unwrap();
            let d = rng.gen_range(1..=n) as f64 / n as f64;
            let eps = rng.gen_range(0.0..1.0) * d / (1.0 + gamma);
            if !uniform_implies_diverse_check_at(gamma, d, eps, n) {
                continue;
            }
            assert!(is_diverse_pair(&x, &y, q, d, eps), "{x} {y} d={d} eps={eps}");
            checked += 1;
        }
    }

    #[test]
    fn binary_uniform_sizes() {
        let c = construct_binary_uniform(8, 1.0).unwrap();
        assert_eq!(c.radius, 2);
        assert_eq!(c.a.cardinality(), BigUint::from(74u32));
        assert_eq!(c.b.cardinality(), BigUint::from(36u32));
        assert_eq!(c.a.cardinality(), binary_uniform_a_size(8, 2));
        assert_eq!(c.b.cardinality(), binary_uniform_b_size(8));
        let c = construct_binary_uniform(4, 0.0).unwrap();
        assert_eq!(c.product(), BigUint::from(8u32));
        assert!(construct_binary_uniform(6, 1.0).is_err());
        assert!(construct_binary_uniform(8, 2.0).is_err());
        let bound = binary_uniform_log2_bound(8, 1.0);
        assert!((bound.exp2() - 638.0).abs() < 2.0, "{}", bound.exp2());
        assert!(c.log2_product() > 0.0);
    }

    #[test]
    fn binary_uniform_is_uniform_exhaustively() {
        for gamma in [0.5, 1.0, 1.5] {
            let c = construct_binary_uniform(8, gamma).unwrap();
            assert_eq!(is_gamma_uniform_sets(&c.a, &c.b, gamma, 10_000, 0), Verdict::Proved);
        }
    }

    #[test]
    fn staircase_uniform_sizes_and_membership() {
        let c = construct_staircase_uniform(3, 9, 0.0).unwrap();
        assert_eq!(c.a.cardinality(), BigUint::from(1u32));
        assert_eq!(c.b.cardinality(), BigUint::from(216u32));
        assert_eq!(c.warnings.len(), 1);
        let c = construct_staircase_uniform(3, 27, 1.0).unwrap();
        assert_eq!(c.radius, 3);
        assert_eq!(c.a.cardinality(), BigUint::from(24859u32));
        assert!(c.warnings.is_empty());
        let stair = w(&[
            0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2,
        ]);
        assert!(c.a.contains(&stair));
        assert!(construct_staircase_uniform(3, 12, 1.0).is_err());
        assert!(construct_staircase_uniform(2, 16, 1.0).is_err());
    }

    #[test]
    fn staircase_uniform_small_exhaustive_and_audit() {
        let c = construct_staircase_uniform(3, 9, 1.0).unwrap();
        assert_eq!(is_gamma_uniform_sets(&c.a, &c.b, 1.0, 100_000, 0), Verdict::Proved);
        let c = construct_staircase_uniform(3, 27, 1.0).unwrap();
        assert_eq!(
            is_gamma_uniform_sets(&c.a, &c.b, 1.0, 20_000, 3),
            Verdict::Audited { samples: 20_000 }
        );
    }

    #[test]
    fn refutes_constant_pair() {
        let z = SetFamily::explicit(2, 4, vec![w(&[0; 4])]).unwrap();
        assert_eq!(
            is_gamma_uniform_sets(&z, &z, 1.0, 100, 0),
            Verdict::Refuted {
                x: w(&[0; 4]),
                y: w(&[0; 4])
            }
        );
    }

    #[test]
    fn binary_reduction_preserves_size_and_uniformity() {
        let c = construct_staircase_uniform(4, 16, 1.0).unwrap();
        let (a2, b2) = binary_reduction(&c.a, &c.b, 2).unwrap();
        assert_eq!(a2.cardinality() * b2.cardinality(), c.product());
        assert_eq!((a2.q_size(), a2.n()), (2, 32));
        assert!(!is_gamma_uniform_sets(&a2, &b2, 1.0, 5_000, 8).is_refuted());
        let single = SetFamily::explicit(4, 2, vec![w(&[3, 1])]).unwrap();
        let (s2, _) = binary_reduction(&single, &single, 2).unwrap();
        assert_eq!(s2.cardinality(), BigUint::from(1u32));
        assert!(binary_reduction(&construct_staircase_uniform(3, 9, 1.0).unwrap().a, &single, 2).is_err());
    }

    #[test]
    fn biclique_oracle_against_biclique_bound() {
        for gamma in [0.0, 0.5, 1.0, 2.0] {
            let best = max_uniform_biclique_exact(2, 4, gamma, 16).unwrap();
            assert_eq!(best.size, best.a.len() * best.b.len());
            for x in &best.a {
                for y in &best.b {
                    assert!(is_gamma_uniform_pair(x, y, 2, gamma));
                }
            }
            let bound = uniform_biclique_upper_bound(4, 1, gamma);
            assert!((best.size as f64).log2() <= bound.log2_smooth + 1e-9, "γ={gamma}");
        }
        let full = max_uniform_biclique_exact(2, 3, 3.0, 16).unwrap();
        assert_eq!(full.size, 64);
        assert!(max_uniform_biclique_exact(2, 5, 1.0, 16).is_err());
    }

    #[test]
    fn biclique_bound_examples() {
        assert!((uniform_biclique_upper_bound(8, 1, 0.0).log2_smooth - 8.0).abs() < 1e-12);
        assert!((uniform_biclique_upper_bound(8, 1, 1.0).log2_smooth - 20.0).abs() < 1e-12);
        assert!((uniform_biclique_upper_bound(5, 2, 2.0).log2_smooth - 20.0).abs() < 1e-12);
        for n in [4, 8, 16, 32] {
            for gamma in [0.0, 0.25, 0.5, 1.0] {
                let b = uniform_biclique_upper_bound(n, 1, gamma);
                assert!(b.log2_smooth >= b.log2_binomial - 1e-9, "n={n} γ={gamma}");
            }
        }
    }

    #[test]
    fn binary_uniform_products_respect_biclique_bound() {
        for n in [8, 16, 32, 64] {
            for gamma in [0.5, 1.0] {
                let c = construct_binary_uniform(n, gamma).unwrap();
                assert!(c.log2_product() <= uniform_biclique_upper_bound(n, 1, gamma).log2_smooth);
            }
        }
    }
}
