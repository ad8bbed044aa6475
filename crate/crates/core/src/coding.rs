//! Codes over a channel, exact success counting, the zero-error predicate,
//! time sharing and the exhaustive zero-error sum-rate oracle.
//!
//! # Code text format
//!
//! ```text
//! M1 2
//! M2 2
//! N 1
//! E1 0 0
//! E1 1 1
//! E2 0 0
//! E2 1 1
//! ```
//!
//! Decoders are not serialised; [`Code::with_reconstructed_decoders`] rebuilds
//! them from a channel.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::channel::{all_words, Channel, OutputWord, Symbol, Terminal, Word};
use crate::error::{Error, Result};

/// Default cap on `M₁·M₂` for exhaustive success counting.
pub const DEFAULT_PAIR_BUDGET: u64 = 1 << 26;

/// Default cap on `Q^n` for the exhaustive zero-error oracle.
pub const DEFAULT_ORACLE_WORDS: usize = 16;

/// A decoding map from one terminal's output words to messages. Outputs not
/// in the map decode to failure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decoder {
    map: HashMap<OutputWord, usize>,
}

impl Decoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, output: OutputWord, message: usize) {
        self.map.insert(output, message);
    }

    pub fn decode(&self, output: &OutputWord) -> Option<usize> {
        self.map.get(output).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl FromIterator<(OutputWord, usize)> for Decoder {
    fn from_iter<I: IntoIterator<Item = (OutputWord, usize)>>(iter: I) -> Self {
        Decoder {
            map: iter.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    n: usize,
    enc1: Vec<Word>,
    enc2: Vec<Word>,
    pub dec1: Decoder,
    pub dec2: Decoder,
}

impl Code {
    pub fn new(enc1: Vec<Word>, enc2: Vec<Word>, dec1: Decoder, dec2: Decoder) -> Result<Self> {
        if enc1.is_empty() || enc2.is_empty() {
            return Err(Error::domain("message sets must be nonempty"));
        }
        let n = enc1[0].len();
        if n == 0 {
            return Err(Error::domain("blocklength must be at least 1"));
        }
        if enc1.iter().chain(&enc2).any(|w| w.len() != n) {
            return Err(Error::domain("codewords have differing blocklengths"));
        }
        Ok(Code {
            n,
            enc1,
            enc2,
            dec1,
            dec2,
        })
    }

    /// Encoders with per-terminal decoders rebuilt from `channel`: each
    /// output word decodes to the message that produces it for the most
    /// partner messages (ties to the smallest message).
    pub fn with_reconstructed_decoders(channel: &Channel, enc1: Vec<Word>, enc2: Vec<Word>) -> Result<Self> {
        let mut code = Code::new(enc1, enc2, Decoder::new(), Decoder::new())?;
        code.check_channel(channel)?;
        let mut votes1: HashMap<OutputWord, HashMap<usize, usize>> = HashMap::new();
        let mut votes2: HashMap<OutputWord, HashMap<usize, usize>> = HashMap::new();
        for (m1, x) in code.enc1.iter().enumerate() {
            for (m2, y) in code.enc2.iter().enumerate() {
                *votes1
                    .entry(channel.terminal_output(x, y, Terminal::First))
                    .or_default()
                    .entry(m1)
                    .or_default() += 1;
                *votes2
                    .entry(channel.terminal_output(x, y, Terminal::Second))
                    .or_default()
                    .entry(m2)
                    .or_default() += 1;
            }
        }
        let pick = |votes: HashMap<OutputWord, HashMap<usize, usize>>| -> Decoder {
            votes
                .into_iter()
                .map(|(out, tally)| {
                    let best = tally
                        .into_iter()
                        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                        .map(|(m, _)| m)
                        .expect("nonempty tally");
                    (out, best)
                })
                .collect()
        };
        code.dec1 = pick(votes1);
        code.dec2 = pick(votes2);
        Ok(code)
    }

    pub fn m1(&self) -> usize {
        self.enc1.len()
    }

    pub fn m2(&self) -> usize {
        self.enc2.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn enc1(&self) -> &[Word] {
        &self.enc1
    }

    pub fn enc2(&self) -> &[Word] {
        &self.enc2
    }

    pub fn rate(&self) -> RatePoint {
        RatePoint::from_sizes(self.m1(), self.m2(), self.n)
    }

    fn check_channel(&self, channel: &Channel) -> Result<()> {
        let q = channel.q_size();
        if self.enc1.iter().chain(&self.enc2).any(|w| !w.is_valid_for(q)) {
            return Err(Error::domain("codeword uses a symbol outside the channel alphabet"));
        }
        Ok(())
    }

    /// Encoders in the code text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("M1 {}\nM2 {}\nN {}\n", self.m1(), self.m2(), self.n);
        for (m, w) in self.enc1.iter().enumerate() {
            out.push_str(&format!("E1 {m} {}\n", w.to_spaced()));
        }
        for (m, w) in self.enc2.iter().enumerate() {
            out.push_str(&format!("E2 {m} {}\n", w.to_spaced()));
        }
        out
    }
}

/// Encoder tables read from the code text format (decoders are not stored).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncoderTables {
    pub n: usize,
    pub enc1: Vec<Word>,
    pub enc2: Vec<Word>,
}

impl EncoderTables {
    pub fn into_code(self, channel: &Channel) -> Result<Code> {
        Code::with_reconstructed_decoders(channel, self.enc1, self.enc2)
    }

    /// The uncoded codebook pair formed by the encoder images.
    pub fn codebook_pair(&self) -> Result<CodebookPair> {
        CodebookPair::new(self.enc1.clone(), self.enc2.clone())
    }
}

impl FromStr for EncoderTables {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (mut m1, mut m2, mut n) = (None, None, None);
        let mut e1: Vec<Option<Word>> = Vec::new();
        let mut e2: Vec<Option<Word>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let ints: Vec<usize> = parts
                .map(|p| {
                    p.parse::<usize>()
                        .map_err(|_| Error::parse(line_no, format!("bad integer {p:?}")))
                })
                .collect::<Result<_>>()?;
            let single = |v: &[usize]| -> Result<usize> {
                match v {
                    [x] => Ok(*x),
                    _ => Err(Error::parse(line_no, format!("{key} expects one integer"))),
                }
            };
            match key {
                "M1" => {
                    m1 = Some(single(&ints)?);
                    e1 = vec![None; m1.unwrap()];
                }
                "M2" => {
                    m2 = Some(single(&ints)?);
                    e2 = vec![None; m2.unwrap()];
                }
                "N" => n = Some(single(&ints)?),
                "E1" | "E2" => {
                    let n = n.ok_or_else(|| Error::parse(line_no, "N must precede codewords"))?;
                    let table = if key == "E1" { &mut e1 } else { &mut e2 };
                    let Some((&m, symbols)) = ints.split_first() else {
                        return Err(Error::parse(line_no, "missing message index"));
                    };
                    if symbols.len() != n {
                        return Err(Error::parse(
                            line_no,
                            format!("codeword length {} != N {n}", symbols.len()),
                        ));
                    }
                    let slot = table
                        .get_mut(m)
                        .ok_or_else(|| Error::parse(line_no, format!("message {m} out of range")))?;
                    if symbols.iter().any(|&s| s > Symbol::MAX as usize) {
                        return Err(Error::parse(line_no, "symbol too large"));
                    }
                    *slot = Some(Word::new(symbols.iter().map(|&s| s as Symbol).collect()));
                }
                other => return Err(Error::parse(line_no, format!("unknown keyword {other:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::parse(1, "missing N"))?;
        if m1.is_none() || m2.is_none() {
            return Err(Error::parse(1, "missing M1 or M2"));
        }
        let finish = |t: Vec<Option<Word>>, which: &str| -> Result<Vec<Word>> {
            t.into_iter()
                .enumerate()
                .map(|(m, w)| w.ok_or_else(|| Error::parse(1, format!("{which} missing message {m}"))))
                .collect()
        };
        Ok(EncoderTables {
            n,
            enc1: finish(e1, "E1")?,
            enc2: finish(e2, "E2")?,
        })
    }
}

/// Rates in bits per channel use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        RatePoint { r1, r2, sum: r1 + r2 }
    }

    pub fn from_sizes(m1: usize, m2: usize, n: usize) -> Self {
        let n = n as f64;
        RatePoint::new((m1 as f64).log2() / n, (m2 as f64).log2() / n)
    }
}

/// An uncoded code: each side's messages are its codewords.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodebookPair {
    pub a: Vec<Word>,
    pub b: Vec<Word>,
}

impl CodebookPair {
    pub fn new(a: Vec<Word>, b: Vec<Word>) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::domain("codebooks must be nonempty"));
        }
        let n = a[0].len();
        if n == 0 || a.iter().chain(&b).any(|w| w.len() != n) {
            return Err(Error::domain("codebooks need a common positive blocklength"));
        }
        Ok(CodebookPair { a, b })
    }

    pub fn n(&self) -> usize {
        self.a[0].len()
    }

    pub fn size(&self) -> usize {
        self.a.len() * self.b.len()
    }

    pub fn rate(&self) -> RatePoint {
        RatePoint::from_sizes(self.a.len(), self.b.len(), self.n())
    }
}

/// Two input pairs that one terminal cannot tell apart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collision {
    pub terminal: Terminal,
    pub x: Word,
    pub y: Word,
    pub x2: Word,
    pub y2: Word,
}

impl fmt::Display for Collision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.terminal {
            Terminal::First => 1,
            Terminal::Second => 2,
        };
        write!(
            f,
            "terminal {t}: ({}, {}) and ({}, {}) give the same output",
            self.x, self.y, self.x2, self.y2
        )
    }
}

/// Number of message pairs decoded correctly at both terminals, and the
/// total `M₁·M₂`.
pub fn success_count(channel: &Channel, code: &Code, pair_budget: u64) -> Result<(u64, u64)> {
    code.check_channel(channel)?;
    let total = code.m1() as u64 * code.m2() as u64;
    if total > pair_budget {
        return Err(Error::budget(format!(
            "{total} message pairs exceed the enumeration budget {pair_budget}"
        )));
    }
    let mut ok = 0u64;
    for (m1, x) in code.enc1.iter().enumerate() {
        for (m2, y) in code.enc2.iter().enumerate() {
            let d1 = code.dec1.decode(&channel.terminal_output(x, y, Terminal::First));
            let d2 = code.dec2.decode(&channel.terminal_output(x, y, Terminal::Second));
            if d1 == Some(m1) && d2 == Some(m2) {
                ok += 1;
            }
        }
    }
    Ok((ok, total))
}

/// Exact probability of joint success for uniformly random messages.
pub fn success_probability(channel: &Channel, code: &Code) -> Result<f64> {
    let (ok, total) = success_count(channel, code, DEFAULT_PAIR_BUDGET)?;
    Ok(ok as f64 / total as f64)
}

/// First pair of inputs that some terminal cannot distinguish, scanning
/// terminal 1 then terminal 2 and `A×B` in row-major order.
pub fn find_collision(channel: &Channel, pair: &CodebookPair) -> Option<Collision> {
    for terminal in [Terminal::First, Terminal::Second] {
        let mut seen: HashMap<OutputWord, (usize, usize)> = HashMap::with_capacity(pair.size());
        for (i, x) in pair.a.iter().enumerate() {
            for (j, y) in pair.b.iter().enumerate() {
                let out = channel.terminal_output(x, y, terminal);
                match seen.get(&out) {
                    Some(&(i0, j0)) => {
                        let clash = match terminal {
                            Terminal::First => pair.a[i0] != *x,
                            Terminal::Second => pair.b[j0] != *y,
                        };
                        if clash {
                            return Some(Collision {
                                terminal,
                                x: pair.a[i0].clone(),
                                y: pair.b[j0].clone(),
                                x2: x.clone(),
                                y2: y.clone(),
                            });
                        }
                    }
                    None => {
                        seen.insert(out, (i, j));
                    }
                }
            }
        }
    }
    None
}

/// True iff every terminal output over `A×B` determines that terminal's
/// own input.
pub fn is_zero_error(channel: &Channel, pair: &CodebookPair) -> bool {
    find_collision(channel, pair).is_none()
}

/// Decoders that recover both inputs on every pair in `A×B`, if they exist.
pub fn zero_error_decoders(channel: &Channel, pair: &CodebookPair) -> Option<Code> {
    if !is_zero_error(channel, pair) {
        return None;
    }
    let mut dec1 = Decoder::new();
    let mut dec2 = Decoder::new();
    for (i, x) in pair.a.iter().enumerate() {
        for (j, y) in pair.b.iter().enumerate() {
            dec1.insert(channel.terminal_output(x, y, Terminal::First), i);
            dec2.insert(channel.terminal_output(x, y, Terminal::Second), j);
        }
    }
    Code::new(pair.a.clone(), pair.b.clone(), dec1, dec2).ok()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactRate {
    pub rate: RatePoint,
    pub witness: CodebookPair,
}

/// Maximum zero-error sum rate at blocklength `n` by exhaustive search over
/// codebook pairs, with the lexicographically smallest optimal witness.
///
/// Source codebooks are enumerated as index sets in lexicographic order by
/// depth-first search. For a fixed `A`, the admissible `B` are exactly the
/// cliques of a compatibility graph on the words that are individually
/// decodable against `A`; the lexicographically first maximum clique is
/// taken. Both levels prune on `|A|·|B|` against the best product found.
pub fn exact_zero_error_sum_rate(channel: &Channel, n: usize, max_words: usize) -> Result<ExactRate> {
    if n == 0 {
        return Err(Error::domain("blocklength must be at least 1"));
    }
    let q = channel.q_size();
    let count = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if count > max_words as u128 || count > 64 {
        return Err(Error::budget(format!(
            "Q^n = {count} words exceed the oracle budget {}",
            max_words.min(64)
        )));
    }
    let words = all_words(q, n);
    let oracle = PairOracle::new(channel, &words);
    let mut search = ExactSearch {
        oracle: &oracle,
        best_size: 0,
        best: (0, 0),
    };
    let full = mask_all(words.len());
    let compat = vec![full; words.len()];
    let mut chosen = Vec::new();
    search.extend(&mut chosen, 0, full, &compat);

    let (a_mask, b_mask) = search.best;
    let pick = |m: u64| -> Vec<Word> { bits(m).map(|i| words[i].clone()).collect() };
    let witness = CodebookPair::new(pick(a_mask), pick(b_mask))?;
    Ok(ExactRate {
        rate: witness.rate(),
        witness,
    })
}

fn mask_all(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Interned terminal outputs for every input pair.
struct PairOracle {
    len: usize,
    out1: Vec<u32>,
    out2: Vec<u32>,
}

impl PairOracle {
    fn new(channel: &Channel, words: &[Word]) -> Self {
        let len = words.len();
        let mut ids1: HashMap<OutputWord, u32> = HashMap::new();
        let mut ids2: HashMap<OutputWord, u32> = HashMap::new();
        let mut out1 = Vec::with_capacity(len * len);
        let mut out2 = Vec::with_capacity(len * len);
        for x in words {
            for y in words {
                let next = ids1.len() as u32;
                out1.push(
                    *ids1
                        .entry(channel.terminal_output(x, y, Terminal::First))
                        .or_insert(next),
                );
                let next = ids2.len() as u32;
                out2.push(
                    *ids2
                        .entry(channel.terminal_output(x, y, Terminal::Second))
                        .or_insert(next),
                );
            }
        }
        PairOracle { len, out1, out2 }
    }

    #[inline]
    fn o1(&self, x: usize, y: usize) -> u32 {
        self.out1[x * self.len + y]
    }

    #[inline]
    fn o2(&self, x: usize, y: usize) -> u32 {
        self.out2[x * self.len + y]
    }

    /// `(x, y)` and `(x2, y2)` are distinguishable wherever they must be.
    #[inline]
    fn separable(&self, x: usize, y: usize, x2: usize, y2: usize) -> bool {
        (x == x2 || self.o1(x, y) != self.o1(x2, y2)) && (y == y2 || self.o2(x, y) != self.o2(x2, y2))
    }
}

struct ExactSearch<'a> {
    oracle: &'a PairOracle,
    best_size: usize,
    best: (u64, u64),
}

impl ExactSearch<'_> {
    fn extend(&mut self, chosen: &mut Vec<usize>, start: usize, cand: u64, compat: &[u64]) {
        let len = self.oracle.len;
        for x_new in start..len {
            let remaining = len - x_new;
            if (chosen.len() + remaining) * cand.count_ones() as usize <= self.best_size {
                return;
            }
            // Words y that stay individually decodable once x_new joins A.
            let mut next_cand = 0u64;
            for y in bits(cand) {
                if chosen.iter().all(|&x| self.oracle.o1(x_new, y) != self.oracle.o1(x, y)) {
                    next_cand |= 1 << y;
                }
            }
            if next_cand == 0 {
                continue;
            }
            chosen.push(x_new);
            let mut next_compat = compat.to_vec();
            for y in bits(next_cand) {
                let mut row = next_compat[y] & next_cand;
                for y2 in bits(row) {
                    if y2 == y {
                        continue;
                    }
                    let ok = chosen
                        .iter()
                        .all(|&x| self.oracle.separable(x_new, y, x, y2) && self.oracle.separable(x, y, x_new, y2));
                    if !ok {
                        row &= !(1 << y2);
                    }
                }
                next_compat[y] = row;
            }
            let a_size = chosen.len();
            let rest = len - x_new - 1;
            if a_size * next_cand.count_ones() as usize > self.best_size {
                let need = self.best_size / a_size + 1;
                if let Some(clique) = max_clique(next_cand, &next_compat, need) {
                    let size = a_size * clique.count_ones() as usize;
                    if size > self.best_size {
                        self.best_size = size;
                        self.best = (chosen.iter().fold(0, |m, &i| m | 1 << i), clique);
                    }
                }
            }
            if (a_size + rest) * next_cand.count_ones() as usize > self.best_size {
                self.extend(chosen, x_new + 1, next_cand, &next_compat);
            }
            chosen.pop();
        }
    }
}

/// Lexicographically first maximum clique among `vertices`, provided it has
/// at least `need` members. Self-loops in `adj` are ignored.
fn max_clique(vertices: u64, adj: &[u64], need: usize) -> Option<u64> {
    fn grow(adj: &[u64], current: u64, cand: u64, best: &mut (usize, Option<u64>)) {
        let len = current.count_ones() as usize;
        if len > best.0 {
            *best = (len, Some(current));
        }
        for v in bits(cand) {
            let rest = cand & !((2u64 << v).wrapping_sub(1));
            let rest = if v == 63 { 0 } else { rest };
            if len + 1 + rest.count_ones() as usize <= best.0 {
                return;
            }
            grow(adj, current | 1 << v, rest & adj[v], best);
        }
    }
    let mut best = (need.saturating_sub(1), None);
    grow(adj, 0, vertices, &mut best);
    best.1
}

/// Outcome of converting an ε-error code into a zero-error codebook pair by
/// fixing one user's message.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeShare {
    pub pair: CodebookPair,
    /// The fixed message of the lower-rate user.
    pub fixed_message: usize,
    /// Messages of the higher-rate user that decode correctly against it.
    pub kept_messages: Vec<usize>,
    /// Error probability ε of the input code.
    pub epsilon: f64,
    /// True when user 2 had the strictly higher rate and roles were swapped.
    pub swapped: bool,
}

impl TimeShare {
    pub fn sum_rate(&self) -> f64 {
        self.pair.rate().sum
    }
}

/// Time sharing: fixes the lower-rate user's message to the value `m*` that
/// maximises the set `S` of the other user's messages decoded correctly
/// alongside it, scanning `m*` in increasing order.
pub fn time_share(channel: &Channel, code: &Code) -> Result<TimeShare> {
    let (ok, total) = success_count(channel, code, DEFAULT_PAIR_BUDGET)?;
    let epsilon = 1.0 - ok as f64 / total as f64;
    let swapped = code.m2() > code.m1();

    let joint_ok = |m1: usize, m2: usize| -> bool {
        let (x, y) = (&code.enc1[m1], &code.enc2[m2]);
        code.dec1.decode(&channel.terminal_output(x, y, Terminal::First)) == Some(m1)
            && code.dec2.decode(&channel.terminal_output(x, y, Terminal::Second)) == Some(m2)
    };

    let (fixed_range, free_range) = if swapped {
        (code.m1(), code.m2())
    } else {
        (code.m2(), code.m1())
    };
    let mut best: Option<(usize, Vec<usize>)> = None;
    for fixed in 0..fixed_range {
        let kept: Vec<usize> = (0..free_range)
            .filter(|&free| {
                if swapped {
                    joint_ok(fixed, free)
                } else {
                    joint_ok(free, fixed)
                }
            })
            .collect();
        if !kept.is_empty() && best.as_ref().is_none_or(|(_, b)| kept.len() > b.len()) {
            best = Some((fixed, kept));
        }
    }
    let (fixed_message, kept_messages) =
        best.ok_or_else(|| Error::Construction("no message pair decodes correctly (error probability 1)".into()))?;

    let free_words: Vec<Word> = kept_messages
        .iter()
        .map(|&m| {
            if swapped {
                code.enc2[m].clone()
            } else {
                code.enc1[m].clone()
            }
        })
        .collect();
    let pair = if swapped {
        CodebookPair::new(vec![code.enc1[fixed_message].clone()], free_words)?
    } else {
        CodebookPair::new(free_words, vec![code.enc2[fixed_message].clone()])?
    };
    Ok(TimeShare {
        pair,
        fixed_message,
        kept_messages,
        epsilon,
        swapped,
    })
}
