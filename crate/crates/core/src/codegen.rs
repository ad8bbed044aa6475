//! Hamming packing and the packed zero-error code pipeline.
//!
//! # Packed code text format
//!
//! ```text
//! PACKED <Q> <n>
//! SEED <seed>
//! D <d>
//! THRESHOLD <t>
//! SOURCE A <family summary>
//! SOURCE B <family summary>
//! A <comma-separated word>
//! ...
//! B <comma-separated word>
//! ...
//! ```

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::channel::{Channel, Word};
use crate::coding::{find_collision, CodebookPair, Collision, RatePoint};
use crate::error::{Error, Result};
use crate::math::{binomial, floor_scaled, log2_big, seeded_rng};
use crate::uniform::SetFamily;

pub fn hamming_distance(x: &Word, y: &Word) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "blocklength mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.symbols().iter().zip(y.symbols()).filter(|(a, b)| a != b).count())
}

/// Scans `words` in order and keeps a word iff its distance to every kept
/// word exceeds `⌊dn⌋`.
pub fn greedy_pack(words: &[Word], d: f64) -> Vec<Word> {
    let Some(n) = words.first().map(Word::len) else {
        return Vec::new();
    };
    let threshold = floor_scaled(d, n);
    let mut kept: Vec<Word> = Vec::new();
    for w in words {
        let far = kept
            .iter()
            .all(|k| k.symbols().iter().zip(w.symbols()).filter(|(a, b)| a != b).count() > threshold);
        if far {
            kept.push(w.clone());
        }
    }
    kept
}

/// Number of words within distance `t` of a fixed word of `[Q]^n`.
pub fn ball_volume(q_size: usize, n: usize, t: usize) -> BigUint {
    (0..=t.min(n))
        .map(|i| binomial(n as u64, i as u64) * BigUint::from(q_size - 1).pow(i as u32))
        .sum()
}

/// `log₂(|A| / (2ⁿ Q^{dn}))`, the packing guarantee for a full family.
pub fn packing_log2_guarantee(log2_family: f64, q_size: usize, n: usize, d: f64) -> f64 {
    log2_family - n as f64 - d * n as f64 * (q_size as f64).log2()
}

/// `⌈|S| / V(t)⌉`: the greedy scan of a full set `S` keeps at least this many
/// words, since each kept word excludes at most `V(t)` words of `S`.
pub fn greedy_degree_bound(set_size: usize, q_size: usize, n: usize, threshold: usize) -> usize {
    let vol = ball_volume(q_size, n, threshold);
    let size = BigUint::from(set_size);
    let q = (&size + &vol - 1u32) / &vol;
    usize::try_from(q).unwrap_or(usize::MAX)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PackParams {
    pub gamma: f64,
    pub eps: f64,
    pub slack: f64,
    pub sample_cap: usize,
    pub seed: u64,
    /// Replaces the derived `d`; for experiments only.
    pub raw_d: Option<f64>,
}

impl PackParams {
    /// `d = 2ε(1+γ) + slack` unless overridden.
    pub fn d(&self) -> f64 {
        self.raw_d.unwrap_or(2.0 * self.eps * (1.0 + self.gamma) + self.slack)
    }

    fn validate(&self) -> Result<()> {
        if let Some(d) = self.raw_d {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::domain(format!("raw d = {d} must lie in [0, 1]")));
            }
            return Ok(());
        }
        if self.slack.is_nan() || self.slack <= 0.0 {
            return Err(Error::domain(format!("slack must be positive, got {}", self.slack)));
        }
        if !(0.0..=1.0).contains(&self.eps) || self.gamma.is_nan() || self.gamma < 0.0 {
            return Err(Error::domain("need 0 <= eps <= 1 and gamma >= 0"));
        }
        let d = self.d();
        if d > 1.0 {
            return Err(Error::domain(format!("derived d = {d} exceeds 1")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PackedCode {
    pub q_size: usize,
    pub n: usize,
    pub seed: u64,
    pub d: f64,
    pub threshold: usize,
    pub source_a: String,
    pub source_b: String,
    pub a: Vec<Word>,
    pub b: Vec<Word>,
}

impl PackedCode {
    pub fn rate(&self) -> RatePoint {
        RatePoint::from_sizes(self.a.len(), self.b.len(), self.n)
    }

    pub fn codebook_pair(&self) -> Result<CodebookPair> {
        CodebookPair::new(self.a.clone(), self.b.clone())
    }

    /// Smallest pairwise distance within each side (`None` for singletons).
    pub fn min_distances(&self) -> (Option<usize>, Option<usize>) {
        (min_pairwise(&self.a), min_pairwise(&self.b))
    }

    /// Pairwise distances on both sides strictly exceed the threshold.
    pub fn is_packing_sound(&self) -> bool {
        let (da, db) = self.min_distances();
        da.is_none_or(|d| d > self.threshold) && db.is_none_or(|d| d > self.threshold)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "PACKED {} {}\nSEED {}\nD {}\nTHRESHOLD {}\nSOURCE A {}\nSOURCE B {}\n",
            self.q_size, self.n, self.seed, self.d, self.threshold, self.source_a, self.source_b
        );
        for w in &self.a {
            s.push_str(&format!("A {}\n", w.to_compact()));
        }
        for w in &self.b {
            s.push_str(&format!("B {}\n", w.to_compact()));
        }
        s
    }
}

impl FromStr for PackedCode {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let (mut seed, mut d, mut threshold) = (None, None, None);
        let (mut source_a, mut source_b) = (String::new(), String::new());
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let num = |t: &str| -> Result<usize> {
                t.parse()
                    .map_err(|_| Error::parse(line_no, format!("expected an integer, got {t:?}")))
            };
            match key {
                "PACKED" => {
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    if toks.len() != 2 {
                        return Err(Error::parse(line_no, "expected `PACKED <Q> <n>`"));
                    }
                    header = Some((num(toks[0])?, num(toks[1])?));
                }
                "SEED" => {
                    seed = Some(rest.parse().map_err(|_| Error::parse(line_no, "bad seed"))?);
                }
                "D" => d = Some(rest.parse().map_err(|_| Error::parse(line_no, "bad d"))?),
                "THRESHOLD" => threshold = Some(num(rest)?),
                "SOURCE" => match rest.split_once(' ') {
                    Some(("A", s)) => source_a = s.to_string(),
                    Some(("B", s)) => source_b = s.to_string(),
                    _ => return Err(Error::parse(line_no, "expected `SOURCE A|B <summary>`")),
                },
                "A" | "B" => {
                    let (q, n) = header.ok_or_else(|| Error::parse(line_no, "word before PACKED header"))?;
                    let w = Word::parse_compact(rest).map_err(|m| Error::parse(line_no, m))?;
                    if w.len() != n || !w.is_valid_for(q) {
                        return Err(Error::parse(line_no, format!("word {w} is not in [{q}]^{n}")));
                    }
                    if key == "A" {
                        a.push(w)
                    } else {
                        b.push(w)
                    }
                }
                other => return Err(Error::parse(line_no, format!("unknown keyword {other:?}"))),
            }
        }
        let (q_size, n) = header.ok_or_else(|| Error::parse(1, "missing PACKED header"))?;
        let missing = |what: &str| Error::parse(text.lines().count().max(1), format!("missing {what}"));
        Ok(PackedCode {
            q_size,
            n,
            seed: seed.ok_or_else(|| missing("SEED"))?,
            d: d.ok_or_else(|| missing("D"))?,
            threshold: threshold.ok_or_else(|| missing("THRESHOLD"))?,
            source_a,
            source_b,
            a,
            b,
        })
    }
}

fn min_pairwise(words: &[Word]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, x) in words.iter().enumerate() {
        for y in &words[i + 1..] {
            let d = x.symbols().iter().zip(y.symbols()).filter(|(a, b)| a != b).count();
            best = Some(best.map_or(d, |m| m.min(d)));
        }
    }
    best
}

/// Draws up to `sample_cap` members of the family (all of them, in
/// enumeration order, when it has at most that many) using stream `stream`.
pub fn draw_members(family: &SetFamily, sample_cap: usize, seed: u64, stream: u64) -> Vec<Word> {
    if let Some(all) = family.enumerate(sample_cap) {
        return all;
    }
    let mut rng = seeded_rng(seed, stream);
    (0..sample_cap).map(|_| family.sample(&mut rng)).collect()
}

/// Packs draws from `A` (stream 0) and `B` (stream 1) at the threshold
/// `⌊dn⌋`.
pub fn build_zero_error_code(a: &SetFamily, b: &SetFamily, params: &PackParams) -> Result<PackedCode> {
    params.validate()?;
    if a.n() != b.n() || a.q_size() != b.q_size() {
        return Err(Error::domain("families must share alphabet and blocklength"));
    }
    let n = a.n();
    let d = params.d();
    let draws_a = draw_members(a, params.sample_cap, params.seed, 0);
    let draws_b = draw_members(b, params.sample_cap, params.seed, 1);
    let packed_a = greedy_pack(&draws_a, d);
    let packed_b = greedy_pack(&draws_b, d);
    if packed_a.is_empty() || packed_b.is_empty() {
        return Err(Error::Construction(format!(
            "empty packing: {} draws from A kept {}, {} draws from B kept {} (d = {d}, cap = {})",
            draws_a.len(),
            packed_a.len(),
            draws_b.len(),
            packed_b.len(),
            params.sample_cap
        )));
    }
    Ok(PackedCode {
        q_size: a.q_size(),
        n,
        seed: params.seed,
        d,
        threshold: floor_scaled(d, n),
        source_a: a.summary(),
        source_b: b.summary(),
        a: packed_a,
        b: packed_b,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroErrorVerdict {
    Ok,
    Collision(Collision),
}

impl fmt::Display for ZeroErrorVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZeroErrorVerdict::Ok => f.write_str("ok"),
            ZeroErrorVerdict::Collision(c) => write!(f, "collision: {c}"),
        }
    }
}

pub fn verify_zero_error_against(code: &PackedCode, channel: &Channel) -> Result<ZeroErrorVerdict> {
    if channel.q_size() != code.q_size {
        return Err(Error::domain(format!(
            "code alphabet {} does not match channel alphabet {}",
            code.q_size,
            channel.q_size()
        )));
    }
    let pair = code.codebook_pair()?;
    Ok(match find_collision(channel, &pair) {
        None => ZeroErrorVerdict::Ok,
        Some(c) => ZeroErrorVerdict::Collision(c),
    })
}

/// `log₂` of the family size, for reporting.
pub fn log2_cardinality(family: &SetFamily) -> f64 {
    log2_big(&family.cardinality())
}
