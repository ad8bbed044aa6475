//! Intensionally represented subsets of `[Q]^n`.
//!
//! # Descriptor text format
//!
//! ```text
//! FAMILY hamming_ball <Q> <n> center <w> [center <w> ...] radius <r>
//! FAMILY block_balanced <Q> <n>
//! FAMILY explicit <Q> <n>
//! <symbols of word 1, space separated>
//! ...
//! FAMILY binary <q>
//! <descriptor of the source family>
//! ```
//!
//! Centers are written as comma-separated symbols. A ball with several
//! centers is the (disjoint) union of the balls around each center.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::channel::{Symbol, Word};
use crate::error::{Error, Result};
use crate::math::{binomial, factorial, random_below};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    q_size: usize,
    n: usize,
    kind: FamilyKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// Words within Hamming distance `radius` of one of the centers. The
    /// balls are pairwise disjoint; `shell_sizes[i]` is the number of words at
    /// distance exactly `i` from a single center.
    HammingBall {
        centers: Vec<Word>,
        radius: usize,
        shell_sizes: Vec<BigUint>,
    },
    /// Words split into Q consecutive blocks of length n/Q in which every
    /// symbol occurs exactly n/Q² times.
    BlockBalanced,
    /// A sorted, duplicate-free word list.
    Explicit(Vec<Word>),
    /// Image of a family over `[2^bits]^m` under the symbol-wise binary
    /// representation (most significant bit first).
    Binary { inner: Box<SetFamily>, bits: u32 },
}

impl SetFamily {
    pub fn hamming_ball(q_size: usize, centers: Vec<Word>, radius: usize) -> Result<Self> {
        check_alphabet(q_size)?;
        let n = centers
            .first()
            .map(Word::len)
            .ok_or_else(|| Error::domain("a Hamming ball family needs at least one center"))?;
        if n == 0 || centers.iter().any(|c| c.len() != n || !c.is_valid_for(q_size)) {
            return Err(Error::domain("centers must be valid words of a common positive length"));
        }
        let radius = radius.min(n);
        for (c1, c2) in centers.iter().tuple_combinations() {
            if hamming(c1, c2) <= 2 * radius {
                return Err(Error::domain(format!(
                    "balls of radius {radius} around {c1} and {c2} overlap"
                )));
            }
        }
        let shell_sizes = (0..=radius)
            .map(|i| binomial(n as u64, i as u64) * BigUint::from(q_size - 1).pow(i as u32))
            .collect();
        Ok(SetFamily {
            q_size,
            n,
            kind: FamilyKind::HammingBall {
                centers,
                radius,
                shell_sizes,
            },
        })
    }

    pub fn block_balanced(q_size: usize, n: usize) -> Result<Self> {
        check_alphabet(q_size)?;
        if n == 0 || !n.is_multiple_of(q_size * q_size) {
            return Err(Error::domain(format!(
                "block-balanced words need Q^2 = {} to divide n = {n}",
                q_size * q_size
            )));
        }
        Ok(SetFamily {
            q_size,
            n,
            kind: FamilyKind::BlockBalanced,
        })
    }

    pub fn explicit(q_size: usize, n: usize, mut words: Vec<Word>) -> Result<Self> {
        check_alphabet(q_size)?;
        if words.iter().any(|w| w.len() != n || !w.is_valid_for(q_size)) {
            return Err(Error::domain("explicit words must have length n over the alphabet"));
        }
        words.sort();
        words.dedup();
        Ok(SetFamily {
            q_size,
            n,
            kind: FamilyKind::Explicit(words),
        })
    }

    /// Image under the symbol-wise `bits`-bit binary representation; the
    /// source alphabet must be `2^bits`.
    pub fn binary(inner: SetFamily, bits: u32) -> Result<Self> {
        if bits == 0 || 1usize.checked_shl(bits) != Some(inner.q_size) {
            return Err(Error::domain(format!("alphabet size {} is not 2^{bits}", inner.q_size)));
        }
        Ok(SetFamily {
            q_size: 2,
            n: inner.n * bits as usize,
            kind: FamilyKind::Binary {
                inner: Box::new(inner),
                bits,
            },
        })
    }

    pub fn q_size(&self) -> usize {
        self.q_size
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    /// Exact number of members.
    pub fn cardinality(&self) -> BigUint {
        match &self.kind {
            FamilyKind::HammingBall {
                centers, shell_sizes, ..
            } => shell_sizes.iter().sum::<BigUint>() * BigUint::from(centers.len()),
            FamilyKind::BlockBalanced => {
                let block = (self.n / self.q_size) as u64;
                let per = (self.n / (self.q_size * self.q_size)) as u64;
                let one_block = factorial(block) / factorial(per).pow(self.q_size as u32);
                one_block.pow(self.q_size as u32)
            }
            FamilyKind::Explicit(words) => BigUint::from(words.len()),
            FamilyKind::Binary { inner, .. } => inner.cardinality(),
        }
    }

    pub fn contains(&self, word: &Word) -> bool {
        if word.len() != self.n || !word.is_valid_for(self.q_size) {
            return false;
        }
        match &self.kind {
            FamilyKind::HammingBall { centers, radius, .. } => centers.iter().any(|c| hamming(c, word) <= *radius),
            FamilyKind::BlockBalanced => {
                let block = self.n / self.q_size;
                let per = self.n / (self.q_size * self.q_size);
                word.symbols().chunks(block).all(|chunk| {
                    let mut counts = vec![0usize; self.q_size];
                    for &s in chunk {
                        counts[s as usize] += 1;
                    }
                    counts.iter().all(|&c| c == per)
                })
            }
            FamilyKind::Explicit(words) => words.binary_search(word).is_ok(),
            FamilyKind::Binary { inner, bits } => inner.contains(&from_binary(word, *bits)),
        }
    }

    /// Uniformly random member.
    ///
    /// Balls pick a center uniformly, then a distance `i` with probability
    /// proportional to the exact shell size `C(n,i)(Q−1)^i`, then `i`
    /// positions and a uniformly random different symbol at each. Block
    /// balanced words shuffle each block's balanced multiset independently.
    ///
    /// # Panics
    /// Panics on an empty explicit family.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Word {
        match &self.kind {
            FamilyKind::HammingBall {
                centers, shell_sizes, ..
            } => {
                let center = &centers[rng.gen_range(0..centers.len())];
                let total: BigUint = shell_sizes.iter().sum();
                let mut u = random_below(&total, rng);
                let mut dist = 0;
                for (i, size) in shell_sizes.iter().enumerate() {
                    if &u < size {
                        dist = i;
                        break;
                    }
                    u -= size;
                }
                let mut symbols = center.symbols().to_vec();
                for pos in rand::seq::index::sample(rng, self.n, dist).iter() {
                    let mut s = rng.gen_range(0..self.q_size - 1) as Symbol;
                    if s >= symbols[pos] {
                        s += 1;
                    }
                    symbols[pos] = s;
                }
                Word::new(symbols)
            }
            FamilyKind::BlockBalanced => {
                let block = self.n / self.q_size;
                let base = balanced_block(self.q_size, block);
                let mut symbols = Vec::with_capacity(self.n);
                for _ in 0..self.q_size {
                    let mut b = base.clone();
                    b.shuffle(rng);
                    symbols.extend(b);
                }
                Word::new(symbols)
            }
            FamilyKind::Explicit(words) => words[rng.gen_range(0..words.len())].clone(),
            FamilyKind::Binary { inner, bits } => to_binary(&inner.sample(rng), *bits),
        }
    }

    /// All members, when there are at most `budget` of them. Order: balls by
    /// center, distance, position set (lexicographic) and replacement
    /// symbols; block-balanced words in lexicographic order; explicit lists
    /// as stored.
    pub fn enumerate(&self, budget: usize) -> Option<Vec<Word>> {
        let card = self.cardinality().to_usize()?;
        if card > budget {
            return None;
        }
        let mut out = Vec::with_capacity(card);
        match &self.kind {
            FamilyKind::HammingBall { centers, radius, .. } => {
                for center in centers {
                    for dist in 0..=*radius {
                        for positions in (0..self.n).combinations(dist) {
                            let choices = positions
                                .iter()
                                .map(|&p| (0..self.q_size as Symbol).filter(move |&s| s != center.symbols()[p]))
                                .multi_cartesian_product();
                            if dist == 0 {
                                out.push(center.clone());
                                continue;
                            }
                            for repl in choices {
                                let mut symbols = center.symbols().to_vec();
                                for (&p, s) in positions.iter().zip(repl) {
                                    symbols[p] = s;
                                }
                                out.push(Word::new(symbols));
                            }
                        }
                    }
                }
            }
            FamilyKind::BlockBalanced => {
                let block = self.n / self.q_size;
                let perms = multiset_permutations(balanced_block(self.q_size, block));
                for parts in (0..self.q_size).map(|_| perms.iter()).multi_cartesian_product() {
                    out.push(Word::new(parts.into_iter().flatten().copied().collect()));
                }
            }
            FamilyKind::Explicit(words) => out.extend(words.iter().cloned()),
            FamilyKind::Binary { inner, bits } => {
                out.extend(inner.enumerate(budget)?.iter().map(|w| to_binary(w, *bits)))
            }
        }
        Some(out)
    }

    /// One-line summary: the descriptor header (explicit lists report their
    /// size instead of their words).
    pub fn summary(&self) -> String {
        match &self.kind {
            FamilyKind::Explicit(words) => {
                format!("FAMILY explicit {} {} count {}", self.q_size, self.n, words.len())
            }
            FamilyKind::Binary { inner, bits } => format!("FAMILY binary {bits} of {}", inner.summary()),
            _ => self.to_descriptor().trim_end().to_string(),
        }
    }

    pub fn to_descriptor(&self) -> String {
        match &self.kind {
            FamilyKind::HammingBall { centers, radius, .. } => {
                let mut s = format!("FAMILY hamming_ball {} {}", self.q_size, self.n);
                for c in centers {
                    s.push_str(&format!(" center {}", c.to_compact()));
                }
                s.push_str(&format!(" radius {radius}\n"));
                s
            }
            FamilyKind::BlockBalanced => format!("FAMILY block_balanced {} {}\n", self.q_size, self.n),
            FamilyKind::Explicit(words) => {
                let mut s = format!("FAMILY explicit {} {}\n", self.q_size, self.n);
                for w in words {
                    s.push_str(&w.to_spaced());
                    s.push('\n');
                }
                s
            }
            FamilyKind::Binary { inner, bits } => format!("FAMILY binary {bits}\n{}", inner.to_descriptor()),
        }
    }

    pub fn from_descriptor(text: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let (family, rest) = parse_family(&lines)?;
        if let Some(&(line, _)) = rest.first() {
            return Err(Error::parse(line, "trailing content after family descriptor"));
        }
        Ok(family)
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

fn parse_family<'a>(lines: &'a [(usize, &'a str)]) -> Result<(SetFamily, &'a [(usize, &'a str)])> {
    let Some((&(line_no, header), rest)) = lines.split_first() else {
        return Err(Error::parse(1, "empty family descriptor"));
    };
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.first() != Some(&"FAMILY") || toks.len() < 2 {
        return Err(Error::parse(line_no, "expected `FAMILY <kind> ...`"));
    }
    let int = |i: usize| -> Result<usize> {
        toks.get(i)
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(line_no, format!("expected an integer at token {}", i + 1)))
    };
    let wrap = |e: Error| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line_no, other.to_string()),
    };
    match toks[1] {
        "hamming_ball" => {
            let (q, n) = (int(2)?, int(3)?);
            let mut centers = Vec::new();
            let mut radius = None;
            let mut i = 4;
            while i < toks.len() {
                match toks[i] {
                    "center" => {
                        let w = toks
                            .get(i + 1)
                            .ok_or_else(|| Error::parse(line_no, "center needs a word"))
                            .and_then(|t| Word::parse_compact(t).map_err(|m| Error::parse(line_no, m)))?;
                        centers.push(w);
                    }
                    "radius" => radius = Some(int(i + 1)?),
                    other => return Err(Error::parse(line_no, format!("unexpected token {other:?}"))),
                }
                i += 2;
            }
            if centers.iter().any(|c| c.len() != n) {
                return Err(Error::parse(line_no, "center length differs from n"));
            }
            let radius = radius.ok_or_else(|| Error::parse(line_no, "missing radius"))?;
            Ok((SetFamily::hamming_ball(q, centers, radius).map_err(wrap)?, rest))
        }
        "block_balanced" => Ok((SetFamily::block_balanced(int(2)?, int(3)?).map_err(wrap)?, rest)),
        "explicit" => {
            let (q, n) = (int(2)?, int(3)?);
            let mut words = Vec::new();
            let mut used = 0;
            for &(ln, l) in rest {
                if l.starts_with("FAMILY") {
                    break;
                }
                let symbols = l
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<Symbol>()
                            .map_err(|_| Error::parse(ln, format!("bad symbol {t:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                words.push(Word::new(symbols));
                used += 1;
            }
            Ok((SetFamily::explicit(q, n, words).map_err(wrap)?, &rest[used..]))
        }
        "binary" => {
            let bits = int(2)? as u32;
            let (inner, rest) = parse_family(rest)?;
            Ok((SetFamily::binary(inner, bits).map_err(wrap)?, rest))
        }
        other => Err(Error::parse(line_no, format!("unknown family kind {other:?}"))),
    }
}

fn check_alphabet(q_size: usize) -> Result<()> {
    if !(2..=Symbol::MAX as usize).contains(&q_size) {
        return Err(Error::domain(format!("alphabet size {q_size} out of range")));
    }
    Ok(())
}

fn hamming(a: &Word, b: &Word) -> usize {
    a.symbols().iter().zip(b.symbols()).filter(|(x, y)| x != y).count()
}

/// `[0,…,0, 1,…,1, …]` with each of the Q symbols `block/Q` times.
fn balanced_block(q_size: usize, block: usize) -> Vec<Symbol> {
    let per = block / q_size;
    (0..q_size as Symbol)
        .flat_map(|s| std::iter::repeat_n(s, per))
        .collect()
}

/// All distinct permutations of a sorted multiset, in lexicographic order.
fn multiset_permutations(mut v: Vec<Symbol>) -> Vec<Vec<Symbol>> {
    let mut out = vec![v.clone()];
    loop {
        let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
            return out;
        };
        let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot successor");
        v.swap(i - 1, j);
        v[i..].reverse();
        out.push(v.clone());
    }
}

/// Symbol-wise binary representation, most significant bit first.
pub fn to_binary(word: &Word, bits: u32) -> Word {
    let mut out = Vec::with_capacity(word.len() * bits as usize);
    for &s in word.symbols() {
        for b in (0..bits).rev() {
            out.push((s >> b) & 1);
        }
    }
    Word::new(out)
}

pub fn from_binary(word: &Word, bits: u32) -> Word {
    Word::new(
        word.symbols()
            .chunks(bits as usize)
            .map(|chunk| chunk.iter().fold(0, |acc, &b| acc << 1 | b))
            .collect(),
    )
}

/// For each bit position of the `bits`-bit representation, how many of the
/// `2^bits` symbols have a 1 there.
pub fn binary_bit_balance(bits: u32) -> Vec<usize> {
    let q = 1usize << bits;
    (0..bits)
        .rev()
        .map(|b| (0..q).filter(|s| s >> b & 1 == 1).count())
        .collect()
}
