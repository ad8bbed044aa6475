//! Conflict graphs of erasure/identity channels and exact maximum bipartite
//! independent sets (BPIS).
//!
//! The conflict graph at blocklength 1 has an edge `(x, y)` exactly when the
//! channel erases `(x, y)`. At blocklength n an edge exists when any
//! coordinate is erased, so a largest BPIS at blocklength n has size `sⁿ`
//! where `s` is the largest at blocklength 1. [`max_bpis_direct`] builds the
//! blocklength-n graph explicitly and serves as an independent check of that
//! product law.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::channel::{all_words, sample_erasure_identity, Channel, Word};
use crate::error::{Error, Result};

/// Default cap on the number of left vertices for the exact search.
pub const DEFAULT_MAX_VERTICES: usize = 24;

/// Bipartite graph with at most 64 vertices per side, rows stored as bitsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictGraph {
    left: usize,
    right: usize,
    rows: Vec<u64>,
}

impl ConflictGraph {
    pub fn new(left: usize, right: usize) -> Result<Self> {
        if left > 64 || right > 64 {
            return Err(Error::budget(format!(
                "graph with {left}x{right} vertices exceeds the 64-vertex bitset"
            )));
        }
        Ok(ConflictGraph {
            left,
            right,
            rows: vec![0; left],
        })
    }

    pub fn add_edge(&mut self, x: usize, y: usize) {
        assert!(x < self.left && y < self.right, "edge ({x},{y}) out of range");
        self.rows[x] |= 1 << y;
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.rows[x] >> y & 1 == 1
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    fn right_mask(&self) -> u64 {
        if self.right == 64 {
            u64::MAX
        } else {
            (1u64 << self.right) - 1
        }
    }

    /// True iff no edge joins `a` and `b`.
    pub fn is_independent(&self, a: &[usize], b: &[usize]) -> bool {
        a.iter().all(|&x| b.iter().all(|&y| !self.has_edge(x, y)))
    }
}

/// The blocklength-1 conflict graph of an erasure/identity channel.
pub fn build_conflict_graph(channel: &Channel) -> Result<ConflictGraph> {
    if !channel.is_erasure_identity() {
        return Err(Error::domain(
            "conflict graphs are defined for erasure/identity channels",
        ));
    }
    let q = channel.q_size();
    let mut g = ConflictGraph::new(q, q)?;
    for (x, y) in channel.erased_entries() {
        g.add_edge(x, y);
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bpis {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub size: usize,
}

impl Bpis {
    fn from_masks(a: u64, b: u64) -> Self {
        let expand = |m: u64| (0..64).filter(|i| m >> i & 1 == 1).collect::<Vec<usize>>();
        let (a, b) = (expand(a), expand(b));
        let size = a.len() * b.len();
        Bpis { a, b, size }
    }
}

/// Exact maximum BPIS by branch and bound over left subsets.
///
/// Left vertices are added in increasing order; the right side is always the
/// common non-neighbourhood of the chosen left set. A branch is cut when
/// `(|A| + remaining) · |B|` cannot beat the incumbent. Only strict
/// improvements replace the incumbent, so the witness is the first optimum
/// in lexicographic order of `A`. A graph without an edgeless rectangle with
/// both sides nonempty yields size 0 with empty sides.
pub fn max_bpis(graph: &ConflictGraph, max_vertices: usize) -> Result<Bpis> {
    if graph.left > max_vertices {
        return Err(Error::budget(format!(
            "{} left vertices exceed the exact-search budget {max_vertices}",
            graph.left
        )));
    }
    let full = graph.right_mask();
    let non_nbr: Vec<u64> = graph.rows.iter().map(|r| !r & full).collect();
    let mut best = (0usize, 0u64, 0u64);
    search(&non_nbr, 0, 0, 0, full, &mut best);
    Ok(Bpis::from_masks(best.1, best.2))
}

fn search(non_nbr: &[u64], start: usize, a_mask: u64, a_len: usize, b_mask: u64, best: &mut (usize, u64, u64)) {
    let left = non_nbr.len();
    for v in start..left {
        if (a_len + left - v) * b_mask.count_ones() as usize <= best.0 {
            return;
        }
        let nb = b_mask & non_nbr[v];
        if nb == 0 {
            continue;
        }
        let size = (a_len + 1) * nb.count_ones() as usize;
        let a_next = a_mask | 1 << v;
        if size > best.0 {
            *best = (size, a_next, nb);
        }
        if (a_len + 1 + left - v - 1) * nb.count_ones() as usize > best.0 {
            search(non_nbr, v + 1, a_next, a_len + 1, nb, best);
        }
    }
}

/// Largest BPIS of the blocklength-n conflict graph via the product law:
/// the rectangle `Aⁿ × Bⁿ` built from a blocklength-1 optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockBpis {
    pub base: Bpis,
    pub n: usize,
    pub size: BigUint,
}

impl BlockBpis {
    pub fn contains_left(&self, word: &Word) -> bool {
        word.len() == self.n && word.symbols().iter().all(|&s| self.base.a.contains(&(s as usize)))
    }

    pub fn contains_right(&self, word: &Word) -> bool {
        word.len() == self.n && word.symbols().iter().all(|&s| self.base.b.contains(&(s as usize)))
    }

    pub fn size_u64(&self) -> Option<u64> {
        self.size.to_u64()
    }
}

pub fn max_bpis_blocklength(graph: &ConflictGraph, n: usize, max_vertices: usize) -> Result<BlockBpis> {
    if n == 0 {
        return Err(Error::domain("blocklength must be at least 1"));
    }
    let base = max_bpis(graph, max_vertices)?;
    let size = BigUint::from(base.size).pow(n as u32);
    Ok(BlockBpis { base, n, size })
}

/// Exact maximum BPIS of the explicitly built blocklength-n conflict graph on
/// `[Q]^n × [Q]^n` (vertex indices follow lexicographic word order).
pub fn max_bpis_direct(channel: &Channel, n: usize, max_words: usize) -> Result<Bpis> {
    let graph = block_conflict_graph(channel, n, max_words)?;
    max_bpis(&graph, graph.left())
}

pub fn block_conflict_graph(channel: &Channel, n: usize, max_words: usize) -> Result<ConflictGraph> {
    if n == 0 {
        return Err(Error::domain("blocklength must be at least 1"));
    }
    if !channel.is_erasure_identity() {
        return Err(Error::domain(
            "conflict graphs are defined for erasure/identity channels",
        ));
    }
    let count = (channel.q_size() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > max_words.min(64) as u128 {
        return Err(Error::budget(format!(
            "Q^n = {count} exceeds the explicit-graph budget {}",
            max_words.min(64)
        )));
    }
    let words = all_words(channel.q_size(), n);
    let mut g = ConflictGraph::new(words.len(), words.len())?;
    for (i, x) in words.iter().enumerate() {
        for (j, y) in words.iter().enumerate() {
            let erased = x
                .symbols()
                .iter()
                .zip(y.symbols())
                .any(|(&a, &b)| channel.is_erased(a as usize, b as usize));
            if erased {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// One Monte Carlo draw for the largest-BPIS bound on random channels.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomBpisRecord {
    pub seed: u64,
    pub q: u32,
    pub eps: f64,
    pub erased_count: usize,
    pub bpis_size: usize,
    /// `log₂` of the largest BPIS at blocklength 1; by the product law this
    /// equals the normalised value `(1/n) log₂ |A||B|` at every n.
    pub log_rate: f64,
    /// `q + log₂(3/ε)`.
    pub bound: f64,
    pub satisfied: bool,
}

/// Samples a channel with alphabet `2^q` and compares its largest BPIS with
/// `q + log₂(3/ε)`. An empty BPIS has `log_rate = -∞` and satisfies the bound.
pub fn random_bpis_trial(q: u32, eps: f64, seed: u64) -> Result<RandomBpisRecord> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::domain(format!("erasure probability {eps} must lie in (0, 1]")));
    }
    let q_size = 1usize
        .checked_shl(q)
        .filter(|&s| s <= 64)
        .ok_or_else(|| Error::budget(format!("alphabet 2^{q} too large for exact BPIS search")))?;
    let channel = sample_erasure_identity(q_size, eps, seed)?;
    let graph = build_conflict_graph(&channel)?;
    let best = max_bpis(&graph, 64)?;
    let log_rate = if best.size == 0 {
        f64::NEG_INFINITY
    } else {
        (best.size as f64).log2()
    };
    let bound = q as f64 + (3.0 / eps).log2();
    Ok(RandomBpisRecord {
        seed,
        q,
        eps,
        erased_count: channel.erased_count(),
        bpis_size: best.size,
        log_rate,
        bound,
        satisfied: log_rate <= bound,
    })
}

/// BPIS size above which a random conflict graph has a BPIS that large with
/// probability below 1/4: `(2Q + 2)/ε`.
pub fn random_bpis_threshold(q_size: usize, eps: f64) -> f64 {
    (2.0 * q_size as f64 + 2.0) / eps
}

/// `log₂` of the union bound `2^{2Q − εs}` on the probability that a random
/// conflict graph has a BPIS of size `s`.
pub fn random_bpis_failure_log2(q_size: usize, eps: f64, s: f64) -> f64 {
    2.0 * q_size as f64 - eps * s
}

/// Guaranteed BPIS size `2^{rn} − 2^{rn/2}((1+2^q)^n − 2^{nq})` of the
/// blocklength-n conflict graph when the zero-error sum rate is at least `r`.
/// Negative values mean the guarantee is vacuous.
pub fn rate_bpis_floor(r: f64, n: usize, q: f64) -> f64 {
    let n_f = n as f64;
    let rn = r * n_f;
    let spill = (1.0 + q.exp2()).powi(n as i32) - (n_f * q).exp2();
    rn.exp2() - (rn / 2.0).exp2() * spill
}

/// True when the exhaustive BPIS is at least the guaranteed floor (or the
/// floor is vacuous).
pub fn rate_bpis_consistent(bpis_size: usize, floor: f64) -> bool {
    floor <= 0.0 || bpis_size as f64 >= floor - 1e-9 * floor.abs().max(1.0)
}
