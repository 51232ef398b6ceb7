//! Words over the two-letter alphabet {x0, x1}.
//!
//! Words index every series coefficient, so they are packed as bits with an
//! explicit length: letter `i` of a word of length `n` sits at bit `n-1-i`,
//! which makes the derived ordering on `(len, bits)` exactly the graded
//! lexicographic order with x0 < x1.

use std::fmt;
use std::str::FromStr;

/// Hard storage bound on word length (letters are bits of a `u64`).
pub const MAX_WORD_LEN: usize = 32;

/// Default library-wide truncation-degree cap enforced by the CLI.
pub const DEFAULT_DEGREE_CAP: usize = 16;

/// A letter of the alphabet: x0 is drift (time) integration, x1 is input
/// integration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X0,
    X1,
}

impl Letter {
    pub fn index(self) -> u8 {
        match self {
            Letter::X0 => 0,
            Letter::X1 => 1,
        }
    }

    fn from_bit(bit: u64) -> Self {
        if bit == 0 {
            Letter::X0
        } else {
            Letter::X1
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.index())
    }
}

/// A word: a finite sequence of letters. The empty word is the unit of
/// catenation and is written `1` in the text syntax.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    len: u8,
    bits: u64,
}

impl Word {
    pub const fn empty() -> Self {
        Word { len: 0, bits: 0 }
    }

    pub fn letter(l: Letter) -> Self {
        Word {
            len: 1,
            bits: l as u64,
        }
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        assert!(letters.len() <= MAX_WORD_LEN, "word length exceeds cap");
        let mut bits = 0u64;
        for &l in letters {
            bits = (bits << 1) | l as u64;
        }
        Word {
            len: letters.len() as u8,
            bits,
        }
    }

    /// x0^k
    pub fn x0_power(k: usize) -> Self {
        assert!(k <= MAX_WORD_LEN, "word length exceeds cap");
        Word {
            len: k as u8,
            bits: 0,
        }
    }

    /// x1^k
    pub fn x1_power(k: usize) -> Self {
        assert!(k <= MAX_WORD_LEN, "word length exceeds cap");
        Word {
            len: k as u8,
            bits: if k == 0 { 0 } else { (1u64 << k) - 1 },
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// True iff the word is x0^k for some k >= 0 (the empty word included).
    pub fn is_x0_power(&self) -> bool {
        self.bits == 0
    }

    /// True iff some letter is x1.
    pub fn contains_x1(&self) -> bool {
        self.bits != 0
    }

    pub fn first(&self) -> Option<Letter> {
        self.split_first().map(|(l, _)| l)
    }

    /// Split off the leading letter.
    pub fn split_first(&self) -> Option<(Letter, Word)> {
        if self.len == 0 {
            return None;
        }
        let rest_len = self.len - 1;
        let head = (self.bits >> rest_len) & 1;
        let rest_bits = self.bits & ((1u64 << rest_len) - 1);
        Some((
            Letter::from_bit(head),
            Word {
                len: rest_len,
                bits: rest_bits,
            },
        ))
    }

    /// New word with `l` prepended.
    pub fn prepend(&self, l: Letter) -> Word {
        assert!(self.len() < MAX_WORD_LEN, "word length exceeds cap");
        Word {
            len: self.len + 1,
            bits: ((l as u64) << self.len) | self.bits,
        }
    }

    /// Catenation `self · other`; the empty word is a two-sided unit.
    pub fn concat(&self, other: &Word) -> Word {
        let len = self.len() + other.len();
        assert!(len <= MAX_WORD_LEN, "word length exceeds cap");
        Word {
            len: len as u8,
            bits: (self.bits << other.len) | other.bits,
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.len).map(move |i| Letter::from_bit((self.bits >> (self.len - 1 - i)) & 1))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for l in self.letters() {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Error parsing the word syntax (`1`, or a run of `x0`/`x1` tokens).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed word")]
pub struct ParseWordError;

impl FromStr for Word {
    type Err = ParseWordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "1" {
            return Ok(Word::empty());
        }
        if s.is_empty() || !s.len().is_multiple_of(2) || s.len() / 2 > MAX_WORD_LEN {
            return Err(ParseWordError);
        }
        let bytes = s.as_bytes();
        let mut w = Word::empty();
        for chunk in bytes.chunks_exact(2) {
            let l = match chunk {
                b"x0" => Letter::X0,
                b"x1" => Letter::X1,
                _ => return Err(ParseWordError),
            };
            w = Word {
                len: w.len + 1,
                bits: (w.bits << 1) | l as u64,
            };
        }
        Ok(w)
    }
}

/// All words of length <= `max_degree` in graded lexicographic order
/// (by length, then x0 < x1). The count is 2^(max_degree+1) - 1.
pub fn enumerate_words(max_degree: usize) -> Vec<Word> {
    assert!(max_degree <= MAX_WORD_LEN, "degree exceeds cap");
    let mut out = Vec::with_capacity((1usize << (max_degree + 1)) - 1);
    for len in 0..=max_degree {
        for bits in 0..(1u64 << len) {
            out.push(Word {
                len: len as u8,
                bits,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_words(0), vec![Word::empty()]);
        let deg2: Vec<String> = enumerate_words(2).iter().map(|w| w.to_string()).collect();
        assert_eq!(deg2, ["1", "x0", "x1", "x0x0", "x0x1", "x1x0", "x1x1"]);
        assert_eq!(enumerate_words(10).len(), 2047);
    }

    #[test]
    fn enumeration_is_duplicate_free_and_prefix_closed() {
        let words = enumerate_words(6);
        let set: std::collections::BTreeSet<_> = words.iter().copied().collect();
        assert_eq!(set.len(), words.len());
        for word in &words {
            if let Some((_, rest)) = word.split_first() {
                // every suffix is a word; prefixes via iterated re-building
                let prefix: Vec<Letter> = word.letters().take(word.len() - 1).collect();
                assert!(set.contains(&Word::from_letters(&prefix)));
                assert!(set.contains(&rest));
            }
        }
    }

    #[test]
    fn concat_examples() {
        assert_eq!(w("x0").concat(&w("x1")), w("x0x1"));
        assert_eq!(Word::empty().concat(&w("x1x0")), w("x1x0"));
        assert_eq!(w("x1").concat(&w("x1")), w("x1x1"));
        assert_eq!(w("x1x0").concat(&Word::empty()), w("x1x0"));
    }

    #[test]
    fn concat_is_associative_on_enumerated_words() {
        let words = enumerate_words(3);
        for u in &words {
            for v in &words {
                for t in &words {
                    assert_eq!(u.concat(v).concat(t), u.concat(&v.concat(t)));
                }
            }
        }
    }

    #[test]
    fn graded_lex_order() {
        assert!(Word::empty() < w("x0"));
        assert!(w("x0") < w("x1"));
        assert!(w("x1") < w("x0x0"));
        assert!(w("x0x1") < w("x1x0"));
        let words = enumerate_words(4);
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
    }

    #[test]
    fn split_and_prepend() {
        let word = w("x1x0x1");
        let (head, rest) = word.split_first().unwrap();
        assert_eq!(head, Letter::X1);
        assert_eq!(rest, w("x0x1"));
        assert_eq!(rest.prepend(Letter::X1), word);
        assert!(Word::empty().split_first().is_none());
    }

    #[test]
    fn x0_power_predicate() {
        assert!(Word::empty().is_x0_power());
        assert!(w("x0x0x0").is_x0_power());
        assert!(!w("x0x1").is_x0_power());
        assert_eq!(Word::x0_power(3), w("x0x0x0"));
        assert_eq!(Word::x1_power(2), w("x1x1"));
    }

    #[test]
    fn word_parse_rejects_malformed_input() {
        for s in ["", "x", "x2", "1x0", "x01", "X0", "x0 x1", "x0x"] {
            assert!(s.parse::<Word>().is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn display_parse_round_trip() {
        for word in enumerate_words(5) {
            assert_eq!(word.to_string().parse::<Word>().unwrap(), word);
        }
    }
}
