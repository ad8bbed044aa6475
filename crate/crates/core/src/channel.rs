//! Deterministic two-user interference channels.
//!
//! A [`Channel`] is a Q×Q table of [`ChannelOutput`]s. Terminal 1 sees the
//! first component of each output and terminal 2 the second; an
//! [`ChannelOutput::Erasure`] delivers the erasure symbol φ to both
//! terminals. Symbols are 0-based, so the alphabet is `0..Q`.
//!
//! # Channel text format
//!
//! ```text
//! Q 2
//! OUTQ 4          (optional, only when the output alphabet differs)
//! NAME minmax     (optional)
//! ERASE 1 1
//! MAP 0 1 1 0
//! ```
//!
//! Unlisted entries default to the identity `(x, y) ↦ (x, y)`. Blank lines
//! and lines starting with `#` are ignored.
//!
//! # Random ensemble
//!
//! [`sample_erasure_identity`] draws from the ensemble in which each of the
//! Q² entries is erased independently with probability ε. The generator is
//! ChaCha20 seeded with `seed_from_u64(seed)`; entries are visited row-major
//! (`x` outer, `y` inner) and entry `(x, y)` is erased iff the next
//! `gen::<f64>()` draw is `< eps`. The same `(Q, eps, seed)` therefore yields
//! the same table on every platform.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;

use crate::error::{Error, Result};
use crate::math::seeded_rng;

pub type Symbol = u16;

/// A length-n input word over `0..Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    /// Builds a word after checking every symbol is below `q_size`.
    pub fn checked(symbols: Vec<Symbol>, q_size: usize) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| s as usize >= q_size) {
            return Err(Error::domain(format!("symbol {bad} outside alphabet of size {q_size}")));
        }
        Ok(Word(symbols))
    }

    /// The word with index `index` in the lexicographic enumeration of
    /// `[Q]^n` (most significant symbol first).
    pub fn from_index(mut index: usize, q_size: usize, n: usize) -> Self {
        let mut symbols = vec![0; n];
        for slot in symbols.iter_mut().rev() {
            *slot = (index % q_size) as Symbol;
            index /= q_size;
        }
        Word(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }

    pub fn is_valid_for(&self, q_size: usize) -> bool {
        self.0.iter().all(|&s| (s as usize) < q_size)
    }

    /// Space-separated symbols, as used by the code and family file formats.
    pub fn to_spaced(&self) -> String {
        self.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
    }

    /// Comma-separated symbols, used where a word must be a single token.
    pub fn to_compact(&self) -> String {
        self.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_compact(token: &str) -> std::result::Result<Self, String> {
        token
            .split(',')
            .map(|t| t.trim().parse::<Symbol>().map_err(|e| format!("bad symbol {t:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

/// All words of `[Q]^n` in lexicographic order.
pub fn all_words(q_size: usize, n: usize) -> Vec<Word> {
    let count = q_size.pow(n as u32);
    (0..count).map(|i| Word::from_index(i, q_size, n)).collect()
}

/// One terminal's view of a blocklength-n transmission; `None` is φ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutputWord(pub Vec<Option<Symbol>>);

impl OutputWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for OutputWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|s| s.map_or_else(|| "φ".to_string(), |v| v.to_string()))
            .collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelOutput {
    Pair(Symbol, Symbol),
    /// φ delivered to both terminals.
    Erasure,
}

impl ChannelOutput {
    pub fn terminal(self, t: Terminal) -> Option<Symbol> {
        match (self, t) {
            (ChannelOutput::Pair(a, _), Terminal::First) => Some(a),
            (ChannelOutput::Pair(_, b), Terminal::Second) => Some(b),
            (ChannelOutput::Erasure, _) => None,
        }
    }

    pub fn is_erasure(self) -> bool {
        matches!(self, ChannelOutput::Erasure)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Terminal {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Channel {
    q_size: usize,
    out_size: usize,
    table: Vec<ChannelOutput>,
    name: Option<String>,
}

impl Channel {
    pub fn identity(q_size: usize) -> Result<Self> {
        check_q(q_size)?;
        let table = (0..q_size)
            .flat_map(|x| (0..q_size).map(move |y| ChannelOutput::Pair(x as Symbol, y as Symbol)))
            .collect();
        Ok(Channel {
            q_size,
            out_size: q_size,
            table,
            name: None,
        })
    }

    /// Identity channel with the listed entries erased.
    pub fn with_erasures(q_size: usize, erased: &[(usize, usize)]) -> Result<Self> {
        let mut ch = Channel::identity(q_size)?;
        for &(x, y) in erased {
            ch.check_input(x, y)?;
            ch.table[x * q_size + y] = ChannelOutput::Erasure;
        }
        Ok(ch)
    }

    /// General constructor from a row-major table of Q² outputs.
    pub fn from_table(q_size: usize, out_size: usize, table: Vec<ChannelOutput>) -> Result<Self> {
        check_q(q_size)?;
        if out_size < 1 {
            return Err(Error::domain("output alphabet must be nonempty"));
        }
        if table.len() != q_size * q_size {
            return Err(Error::domain(format!(
                "table has {} entries, expected {}",
                table.len(),
                q_size * q_size
            )));
        }
        for out in &table {
            if let ChannelOutput::Pair(a, b) = *out {
                if a as usize >= out_size || b as usize >= out_size {
                    return Err(Error::domain(format!(
                        "output ({a},{b}) outside output alphabet of size {out_size}"
                    )));
                }
            }
        }
        Ok(Channel {
            q_size,
            out_size,
            table,
            name: None,
        })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn q_size(&self) -> usize {
        self.q_size
    }

    pub fn out_size(&self) -> usize {
        self.out_size
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// `log₂ Q`; an integer exactly when Q is a power of two.
    pub fn q_bits(&self) -> f64 {
        (self.q_size as f64).log2()
    }

    pub fn table(&self) -> &[ChannelOutput] {
        &self.table
    }

    fn check_input(&self, x: usize, y: usize) -> Result<()> {
        if x >= self.q_size || y >= self.q_size {
            return Err(Error::domain(format!(
                "input ({x},{y}) outside alphabet of size {}",
                self.q_size
            )));
        }
        Ok(())
    }

    pub fn apply(&self, x: Symbol, y: Symbol) -> Result<ChannelOutput> {
        self.check_input(x as usize, y as usize)?;
        Ok(self.entry(x, y))
    }

    /// Unchecked lookup for callers that validated their words already.
    #[inline]
    pub(crate) fn entry(&self, x: Symbol, y: Symbol) -> ChannelOutput {
        self.table[x as usize * self.q_size + y as usize]
    }

    /// Coordinatewise application of the channel to a pair of words.
    pub fn apply_block(&self, x: &Word, y: &Word) -> Result<(OutputWord, OutputWord)> {
        if x.len() != y.len() {
            return Err(Error::domain(format!(
                "blocklength mismatch: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        if !x.is_valid_for(self.q_size) || !y.is_valid_for(self.q_size) {
            return Err(Error::domain("word contains a symbol outside the alphabet"));
        }
        Ok((
            self.terminal_output(x, y, Terminal::First),
            self.terminal_output(x, y, Terminal::Second),
        ))
    }

    /// One terminal's output word; inputs must be valid and equal-length.
    pub(crate) fn terminal_output(&self, x: &Word, y: &Word, t: Terminal) -> OutputWord {
        OutputWord(
            x.symbols()
                .iter()
                .zip(y.symbols())
                .map(|(&a, &b)| self.entry(a, b).terminal(t))
                .collect(),
        )
    }

    pub fn erased_count(&self) -> usize {
        self.table.iter().filter(|o| o.is_erasure()).count()
    }

    pub fn erased_fraction(&self) -> Ratio<usize> {
        Ratio::new(self.erased_count(), self.q_size * self.q_size)
    }

    pub fn is_erased(&self, x: usize, y: usize) -> bool {
        self.table[x * self.q_size + y].is_erasure()
    }

    /// True when every non-erased entry is the identity pair.
    pub fn is_erasure_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, out)| match *out {
            ChannelOutput::Erasure => true,
            ChannelOutput::Pair(a, b) => a as usize == i / self.q_size && b as usize == i % self.q_size,
        })
    }

    /// Erased entries in row-major order.
    pub fn erased_entries(&self) -> Vec<(usize, usize)> {
        (0..self.table.len())
            .filter(|&i| self.table[i].is_erasure())
            .map(|i| (i / self.q_size, i % self.q_size))
            .collect()
    }

    /// Looks up a built-in channel: `identity(Q)`, `minmax` or `butterfly`.
    ///
    /// `minmax` is the binary channel with W₁ = max, W₂ = min. `butterfly`
    /// has binary inputs and output alphabet `0..4`, where the 2-bit vector
    /// `(u, v)` is encoded as `2u + v`; terminal 1 receives `(x₂, x₁⊕x₂)` and
    /// terminal 2 receives `(x₁, x₁⊕x₂)`.
    pub fn builtin(name: &str) -> Result<Self> {
        let name = name.trim();
        if name == "minmax" {
            let table = (0..2u16)
                .flat_map(|x| (0..2u16).map(move |y| ChannelOutput::Pair(x.max(y), x.min(y))))
                .collect();
            return Ok(Channel::from_table(2, 2, table)?.named("minmax"));
        }
        if name == "butterfly" {
            let table = (0..2u16)
                .flat_map(|x1| {
                    (0..2u16).map(move |x2| {
                        let sum = x1 ^ x2;
                        ChannelOutput::Pair(2 * x2 + sum, 2 * x1 + sum)
                    })
                })
                .collect();
            return Ok(Channel::from_table(2, 4, table)?.named("butterfly"));
        }
        if let Some(arg) = name.strip_prefix("identity(").and_then(|r| r.strip_suffix(')')) {
            let q: usize = arg
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("bad alphabet size in {name:?}")))?;
            return Ok(Channel::identity(q)?.named(format!("identity({q})")));
        }
        Err(Error::domain(format!("unknown built-in channel {name:?}")))
    }

    /// Serialises to the channel text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("Q {}\n", self.q_size);
        if self.out_size != self.q_size {
            out.push_str(&format!("OUTQ {}\n", self.out_size));
        }
        if let Some(name) = &self.name {
            out.push_str(&format!("NAME {name}\n"));
        }
        for (i, entry) in self.table.iter().enumerate() {
            let (x, y) = (i / self.q_size, i % self.q_size);
            match *entry {
                ChannelOutput::Erasure => out.push_str(&format!("ERASE {x} {y}\n")),
                ChannelOutput::Pair(a, b) if a as usize != x || b as usize != y => {
                    out.push_str(&format!("MAP {x} {y} {a} {b}\n"))
                }
                ChannelOutput::Pair(..) => {}
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        text.parse()
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut q_size = None;
        let mut out_size = None;
        let mut name = None;
        let mut overrides: Vec<(usize, usize, usize, ChannelOutput)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap_or_default();
            let nums = |parts: std::str::SplitWhitespace<'_>, want: usize| -> Result<Vec<usize>> {
                let v: Vec<usize> = parts
                    .map(|p| {
                        p.parse::<usize>()
                            .map_err(|_| Error::parse(line_no, format!("bad integer {p:?}")))
                    })
                    .collect::<Result<_>>()?;
                if v.len() != want {
                    return Err(Error::parse(line_no, format!("{key} expects {want} integers")));
                }
                Ok(v)
            };
            match key {
                "Q" => q_size = Some(nums(parts, 1)?[0]),
                "OUTQ" => out_size = Some(nums(parts, 1)?[0]),
                "NAME" => name = Some(parts.collect::<Vec<_>>().join(" ")),
                "ERASE" => {
                    let v = nums(parts, 2)?;
                    overrides.push((line_no, v[0], v[1], ChannelOutput::Erasure));
                }
                "MAP" => {
                    let v = nums(parts, 4)?;
                    if v[2] > Symbol::MAX as usize || v[3] > Symbol::MAX as usize {
                        return Err(Error::parse(line_no, "output symbol too large"));
                    }
                    overrides.push((line_no, v[0], v[1], ChannelOutput::Pair(v[2] as Symbol, v[3] as Symbol)));
                }
                other => return Err(Error::parse(line_no, format!("unknown keyword {other:?}"))),
            }
            if q_size.is_none() {
                return Err(Error::parse(line_no, "first line must be `Q <int>`"));
            }
        }

        let q_size = q_size.ok_or_else(|| Error::parse(1, "missing `Q <int>` line"))?;
        let out_size = out_size.unwrap_or(q_size);
        let mut ch = Channel::identity(q_size).map_err(|e| Error::parse(1, e.to_string()))?;
        ch.out_size = out_size;
        for (line_no, x, y, out) in overrides {
            if x >= q_size || y >= q_size {
                return Err(Error::parse(line_no, format!("input ({x},{y}) outside alphabet")));
            }
            ch.table[x * q_size + y] = out;
        }
        let mut ch = Channel::from_table(q_size, out_size, ch.table).map_err(|e| Error::parse(1, e.to_string()))?;
        ch.name = name;
        Ok(ch)
    }
}

fn check_q(q_size: usize) -> Result<()> {
    if q_size < 2 {
        return Err(Error::domain(format!("alphabet size must be at least 2, got {q_size}")));
    }
    if q_size > Symbol::MAX as usize {
        return Err(Error::domain(format!("alphabet size {q_size} too large")));
    }
    Ok(())
}

/// Draws a channel from the erasure/identity ensemble. See the module docs
/// for the exact generator and traversal order.
pub fn sample_erasure_identity(q_size: usize, eps: f64, seed: u64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::domain(format!("erasure probability {eps} not in [0, 1]")));
    }
    let mut ch = Channel::identity(q_size)?;
    let mut rng = seeded_rng(seed, 0);
    for entry in ch.table.iter_mut() {
        if rng.gen::<f64>() < eps {
            *entry = ChannelOutput::Erasure;
        }
    }
    Ok(ch)
}

/// The erasure/identity channel on `[2]` whose erased set is the bitmask
/// `mask` over row-major entries (bit `2x + y`). Masks `0..16` enumerate all
/// binary erasure/identity channels.
pub fn binary_erasure_channel(mask: u8) -> Channel {
    let erased: Vec<(usize, usize)> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| (i / 2, i % 2)).collect();
    Channel::with_erasures(2, &erased)
        .expect("binary channel")
        .named(format!("erase-mask-{mask}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[Symbol]) -> Word {
        Word::new(v.to_vec())
    }

    #[test]
    fn apply_examples() {
        let id = Channel::identity(2).unwrap();
        assert_eq!(id.apply(0, 1).unwrap(), ChannelOutput::Pair(0, 1));

        let e = Channel::with_erasures(2, &[(1, 1)]).unwrap();
        assert_eq!(e.apply(1, 1).unwrap(), ChannelOutput::Erasure);

        let mm = Channel::builtin("minmax").unwrap();
        assert_eq!(mm.apply(0, 1).unwrap(), ChannelOutput::Pair(1, 0));
        assert_eq!(mm.apply(1, 0).unwrap(), ChannelOutput::Pair(1, 0));
    }

    #[test]
    fn apply_rejects_out_of_range() {
        let id = Channel::identity(3).unwrap();
        assert!(matches!(id.apply(3, 0), Err(Error::Domain(_))));
        assert!(matches!(id.apply(0, 7), Err(Error::Domain(_))));
    }

    #[test]
    fn apply_block_examples() {
        let id = Channel::identity(2).unwrap();
        let (o1, o2) = id.apply_block(&w(&[0, 1]), &w(&[1, 0])).unwrap();
        assert_eq!(o1, OutputWord(vec![Some(0), Some(1)]));
        assert_eq!(o2, OutputWord(vec![Some(1), Some(0)]));

        let e = Channel::with_erasures(2, &[(1, 1)]).unwrap();
        let (o1, o2) = e.apply_block(&w(&[1, 0]), &w(&[1, 0])).unwrap();
        assert_eq!(o1, OutputWord(vec![None, Some(0)]));
        assert_eq!(o2, OutputWord(vec![None, Some(0)]));

        let mm = Channel::builtin("minmax").unwrap();
        let (o1, o2) = mm.apply_block(&w(&[0, 1]), &w(&[1, 1])).unwrap();
        assert_eq!(o1, OutputWord(vec![Some(1), Some(1)]));
        assert_eq!(o2, OutputWord(vec![Some(0), Some(1)]));

        assert!(matches!(id.apply_block(&w(&[0]), &w(&[0, 1])), Err(Error::Domain(_))));
    }

    #[test]
    fn sample_extremes() {
        let zero = sample_erasure_identity(5, 0.0, 11).unwrap();
        assert_eq!(zero.erased_count(), 0);
        assert_eq!(zero, Channel::identity(5).unwrap());
        let one = sample_erasure_identity(5, 1.0, 11).unwrap();
        assert_eq!(one.erased_count(), 25);
        assert!(matches!(sample_erasure_identity(4, 1.5, 0), Err(Error::Domain(_))));
        assert!(matches!(sample_erasure_identity(4, -0.1, 0), Err(Error::Domain(_))));
        assert!(matches!(sample_erasure_identity(1, 0.5, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn sample_is_deterministic_and_erasure_identity() {
        for seed in 0..20 {
            let a = sample_erasure_identity(8, 0.3, seed).unwrap();
            let b = sample_erasure_identity(8, 0.3, seed).unwrap();
            assert_eq!(a, b);
            assert!(a.is_erasure_identity());
        }
    }

    #[test]
    fn sample_mean_and_per_entry_frequency() {
        // Binomial(64, 0.25) has mean 16.
        let trials = 1000;
        let mut total = 0usize;
        let mut per_entry = vec![0usize; 64];
        for seed in 0..trials {
            let ch = sample_erasure_identity(8, 0.25, seed).unwrap();
            total += ch.erased_count();
            for (x, y) in ch.erased_entries() {
                per_entry[x * 8 + y] += 1;
            }
        }
        let mean = total as f64 / trials as f64;
        assert!((mean - 16.0).abs() <= 1.0, "mean erased count {mean}");
        for (i, &c) in per_entry.iter().enumerate() {
            let f = c as f64 / trials as f64;
            assert!((0.20..=0.30).contains(&f), "entry {i} frequency {f}");
        }
    }

    #[test]
    fn erased_fraction_examples() {
        assert_eq!(Channel::identity(3).unwrap().erased_fraction(), Ratio::new(0, 1));
        let all = sample_erasure_identity(3, 1.0, 0).unwrap();
        assert_eq!(all.erased_fraction(), Ratio::new(1, 1));
        let one = Channel::with_erasures(2, &[(1, 1)]).unwrap();
        assert_eq!(one.erased_fraction(), Ratio::new(1, 4));
    }

    #[test]
    fn builtins() {
        let id4 = Channel::builtin("identity(4)").unwrap();
        assert_eq!(id4.apply(2, 3).unwrap(), ChannelOutput::Pair(2, 3));
        let mm = Channel::builtin("minmax").unwrap();
        assert_eq!(mm.apply(1, 0).unwrap(), ChannelOutput::Pair(1, 0));
        assert!(!mm.is_erasure_identity());

        // Terminal 1 gets (x2, x1^x2) = (0,1) -> 1; terminal 2 gets (x1, x1^x2) = (1,1) -> 3.
        let bf = Channel::builtin("butterfly").unwrap();
        assert_eq!(bf.out_size(), 4);
        assert_eq!(bf.apply(1, 0).unwrap(), ChannelOutput::Pair(1, 3));
        // Each terminal can recover its own source from the pair it receives.
        for x1 in 0..2u16 {
            for x2 in 0..2u16 {
                let ChannelOutput::Pair(t1, t2) = bf.apply(x1, x2).unwrap() else {
                    panic!()
                };
                assert_eq!((t1 >> 1) ^ (t1 & 1), x1);
                assert_eq!((t2 >> 1) ^ (t2 & 1), x2);
            }
        }
        assert!(matches!(Channel::builtin("fancy"), Err(Error::Domain(_))));
    }

    #[test]
    fn text_round_trip() {
        let channels = vec![
            Channel::builtin("minmax").unwrap(),
            Channel::builtin("butterfly").unwrap(),
            sample_erasure_identity(8, 0.25, 7).unwrap(),
            Channel::identity(3).unwrap(),
        ];
        for ch in channels {
            let text = ch.to_text();
            let back: Channel = text.parse().unwrap();
            assert_eq!(back, ch, "{text}");
        }
    }

    #[test]
    fn text_parse_errors() {
        assert!(matches!("ERASE 0 0".parse::<Channel>(), Err(Error::Parse { .. })));
        assert!(matches!(
            "Q 2\nERASE 0 2".parse::<Channel>(),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            "Q 2\nFOO 1".parse::<Channel>(),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            "Q 2\nMAP 0 0 5 0".parse::<Channel>(),
            Err(Error::Parse { .. })
        ));
        let ok: Channel = "# comment\nQ 2\n\nERASE 1 1\n".parse().unwrap();
        assert_eq!(ok.erased_entries(), vec![(1, 1)]);
    }

    #[test]
    fn word_index_enumeration() {
        let words = all_words(3, 2);
        assert_eq!(words.len(), 9);
        assert_eq!(words[5], w(&[1, 2]));
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(sorted, words);
    }
}
