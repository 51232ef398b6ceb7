//! Truncated non-commutative formal power series over exact rationals.
//!
//! A `TruncatedSeries` is a sparse map word -> nonzero rational coefficient
//! together with a truncation degree N: it represents an element of the full
//! power-series algebra modulo words longer than N. All products here are
//! degree-non-decreasing word recursions, so truncation is exact: the result
//! up to degree N depends only on the inputs up to degree N.
//!
//! Invariants:
//! - No stored word exceeds the truncation degree.
//! - No stored coefficient is zero.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::rational::Rational;
use crate::words::{Letter, Word, MAX_WORD_LEN};

pub(crate) type TermMap = BTreeMap<Word, Rational>;

/// Sorted (word, multiplicity) list: the full shuffle of two words.
type WordShuffle = Rc<Vec<(Word, u64)>>;

/// Error returned by [`TruncatedSeries::shuffle_inverse`] when the constant
/// term is zero (the series is not in the unit group of the shuffle algebra).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("series has zero constant term and no shuffle inverse")]
pub struct NotAShuffleUnit;

/// A formal power series truncated at a fixed degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    degree: usize,
    terms: TermMap,
}

pub(crate) fn add_term(map: &mut TermMap, word: Word, coeff: Rational) {
    if coeff.is_zero() {
        return;
    }
    match map.entry(word) {
        Entry::Vacant(slot) => {
            slot.insert(coeff);
        }
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += &coeff;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
    }
}

fn one_map() -> TermMap {
    let mut map = TermMap::new();
    map.insert(Word::empty(), Rational::one());
    map
}

/// Prepend `letter` to every word of `map`, dropping words that would exceed
/// `degree`.
fn prepend_map(map: &TermMap, letter: Letter, degree: usize) -> TermMap {
    map.iter()
        .filter(|(w, _)| w.len() < degree)
        .map(|(w, c)| (w.prepend(letter), c.clone()))
        .collect()
}

impl TruncatedSeries {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= MAX_WORD_LEN, "degree exceeds cap");
        TruncatedSeries {
            degree,
            terms: TermMap::new(),
        }
    }

    /// The series 1 (coefficient 1 at the empty word), the shuffle unit.
    pub fn one(degree: usize) -> Self {
        Self::constant(Rational::one(), degree)
    }

    pub fn constant(value: Rational, degree: usize) -> Self {
        Self::monomial(value, Word::empty(), degree)
    }

    pub fn monomial(coeff: Rational, word: Word, degree: usize) -> Self {
        Self::from_terms([(coeff, word)], degree)
    }

    /// Build a series from term pairs: duplicate words are summed, zero
    /// coefficients and words longer than `degree` are dropped.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (Rational, Word)>,
        degree: usize,
    ) -> Self {
        assert!(degree <= MAX_WORD_LEN, "degree exceeds cap");
        let mut map = TermMap::new();
        for (coeff, word) in terms {
            if word.len() <= degree {
                add_term(&mut map, word, coeff);
            }
        }
        TruncatedSeries { degree, terms: map }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of stored (nonzero) terms.
    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    /// Iterate terms in graded lexicographic word order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub(crate) fn term_map(&self) -> &TermMap {
        &self.terms
    }

    pub fn coefficient(&self, word: &Word) -> Rational {
        self.terms.get(word).cloned().unwrap_or_default()
    }

    /// The coefficient at the empty word.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Word::empty())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// A proper series has zero constant term.
    pub fn is_proper(&self) -> bool {
        !self.terms.contains_key(&Word::empty())
    }

    /// Member of the unit group of the shuffle algebra: nonzero constant term.
    pub fn is_shuffle_unit(&self) -> bool {
        !self.constant_term().is_zero()
    }

    /// Member of the shuffle group M: constant term exactly 1.
    pub fn in_shuffle_group(&self) -> bool {
        self.constant_term().is_one()
    }

    /// Length of the shortest word in the support.
    pub fn min_support_len(&self) -> Option<usize> {
        self.terms.keys().next().map(|w| w.len())
    }

    /// Restrict to words of length <= `degree`. The truncation degree never
    /// increases: coefficients beyond it are unknown, not zero.
    pub fn truncate(&self, degree: usize) -> Self {
        if degree >= self.degree {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .take_while(|(w, _)| w.len() <= degree)
            .map(|(w, c)| (*w, c.clone()))
            .collect();
        TruncatedSeries { degree, terms }
    }

    /// Reinterpret at a possibly higher truncation degree; used only where
    /// the missing coefficients are provably irrelevant.
    pub(crate) fn with_degree(&self, degree: usize) -> Self {
        assert!(degree <= MAX_WORD_LEN, "degree exceeds cap");
        let mut out = self.truncate(degree);
        out.degree = degree;
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let degree = self.degree.min(other.degree);
        let mut terms: TermMap = self
            .terms
            .iter()
            .take_while(|(w, _)| w.len() <= degree)
            .map(|(w, c)| (*w, c.clone()))
            .collect();
        for (w, c) in &other.terms {
            if w.len() > degree {
                break;
            }
            add_term(&mut terms, *w, c.clone());
        }
        TruncatedSeries { degree, terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            degree: self.degree,
            terms: self.terms.iter().map(|(w, c)| (*w, -c)).collect(),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.degree);
        }
        TruncatedSeries {
            degree: self.degree,
            terms: self.terms.iter().map(|(w, c)| (*w, c * factor)).collect(),
        }
    }

    /// The shuffle product, truncated at the smaller of the two degrees.
    pub fn shuffle(&self, other: &Self) -> Self {
        let degree = self.degree.min(other.degree);
        let mut memo = ShuffleMemo::default();
        let terms = shuffle_maps(&self.terms, &other.terms, degree, &mut memo);
        TruncatedSeries { degree, terms }
    }

    /// Iterated shuffle power; the zeroth power is the unit series.
    pub fn shuffle_power(&self, exponent: usize) -> Self {
        let mut memo = ShuffleMemo::default();
        let mut acc = one_map();
        for _ in 0..exponent {
            acc = shuffle_maps(&acc, &self.terms, self.degree, &mut memo);
            if acc.is_empty() {
                break;
            }
        }
        TruncatedSeries {
            degree: self.degree,
            terms: acc,
        }
    }

    /// The shuffle inverse. For c with constant term 1 this is the geometric
    /// series in (1 - c), which terminates at the truncation degree because
    /// (1 - c) is proper; a general nonzero constant term a is handled by
    /// scaling: c^{-1} = a^{-1} (a^{-1} c)^{-1}.
    pub fn shuffle_inverse(&self) -> Result<Self, NotAShuffleUnit> {
        let a = self.constant_term();
        if a.is_zero() {
            return Err(NotAShuffleUnit);
        }
        let inverse = if a.is_one() {
            let mut complement = self.neg(); // 1 - c, a proper series
            add_term(&mut complement.terms, Word::empty(), Rational::one());
            debug_assert!(complement.is_proper());
            let mut memo = ShuffleMemo::default();
            let mut acc = one_map();
            let mut power = one_map();
            for _ in 1..=self.degree {
                power = shuffle_maps(&power, &complement.terms, self.degree, &mut memo);
                if power.is_empty() {
                    break;
                }
                for (w, c) in &power {
                    add_term(&mut acc, *w, c.clone());
                }
            }
            TruncatedSeries {
                degree: self.degree,
                terms: acc,
            }
        } else {
            let a_inv = a.recip();
            self.scale(&a_inv).shuffle_inverse()?.scale(&a_inv)
        };
        debug_assert_eq!(self.shuffle(&inverse), Self::one(self.degree));
        Ok(inverse)
    }

    /// The composition product c o d, truncated at the smaller degree.
    pub fn compose(&self, other: &Self) -> Self {
        let degree = self.degree.min(other.degree);
        Composer::new(other, degree).apply(self)
    }

    /// The mixed composition product against the channel pair (d1, d2);
    /// `d1` is expected to have constant term 1.
    pub(crate) fn mixed_compose_parts(&self, d1: &Self, d2: &Self, degree: usize) -> Self {
        MixedComposer::new(d1, d2, degree).apply(self)
    }

    /// Coset equality in the quotient by R[[x0]]: true iff every word where
    /// the two series differ is a power of x0 (the empty word included).
    /// Compared up to the smaller of the two degrees.
    pub fn quotient_equal(&self, other: &Self) -> bool {
        let degree = self.degree.min(other.degree);
        let mut left = self.terms.iter().take_while(|(w, _)| w.len() <= degree);
        let mut right = other.terms.iter().take_while(|(w, _)| w.len() <= degree);
        let (mut lcur, mut rcur) = (left.next(), right.next());
        loop {
            match (lcur, rcur) {
                (None, None) => return true,
                (Some((w, _)), None) => {
                    if !w.is_x0_power() {
                        return false;
                    }
                    lcur = left.next();
                }
                (None, Some((w, _))) => {
                    if !w.is_x0_power() {
                        return false;
                    }
                    rcur = right.next();
                }
                (Some((lw, lc)), Some((rw, rc))) => {
                    if lw == rw {
                        if lc != rc && !lw.is_x0_power() {
                            return false;
                        }
                        lcur = left.next();
                        rcur = right.next();
                    } else if lw < rw {
                        if !lw.is_x0_power() {
                            return false;
                        }
                        lcur = left.next();
                    } else {
                        if !rw.is_x0_power() {
                            return false;
                        }
                        rcur = right.next();
                    }
                }
            }
        }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if w.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{w}")?;
            }
        }
        Ok(())
    }
}

impl std::ops::Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::add(self, rhs)
    }
}

impl std::ops::Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        TruncatedSeries::sub(self, rhs)
    }
}

impl std::ops::Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries::neg(self)
    }
}

/// Per-call memo of word-level shuffles. `word_shuffle(u, v)` returns the
/// full multiset u shuffled with v as a sorted (word, multiplicity) list;
/// callers gate on |u| + |v| against their truncation degree.
#[derive(Default)]
pub(crate) struct ShuffleMemo {
    memo: HashMap<(Word, Word), WordShuffle>,
}

impl ShuffleMemo {
    fn word_shuffle(&mut self, u: Word, v: Word) -> WordShuffle {
        if u.is_empty() {
            return Rc::new(vec![(v, 1)]);
        }
        if v.is_empty() {
            return Rc::new(vec![(u, 1)]);
        }
        // the shuffle is commutative; normalize the key
        let (a, b) = if u <= v { (u, v) } else { (v, u) };
        if let Some(hit) = self.memo.get(&(a, b)) {
            return Rc::clone(hit);
        }
        let (la, ta) = a.split_first().expect("nonempty");
        let (lb, tb) = b.split_first().expect("nonempty");
        let left = self.word_shuffle(ta, b);
        let right = self.word_shuffle(a, tb);
        // (la ta) sh (lb tb) = la (ta sh b) + lb (a sh tb); prepending a fixed
        // letter preserves the order of equal-length words, so merge sorted.
        let mut out: Vec<(Word, u64)> = Vec::with_capacity(left.len() + right.len());
        let mut li = left.iter().map(|(w, m)| (w.prepend(la), *m)).peekable();
        let mut ri = right.iter().map(|(w, m)| (w.prepend(lb), *m)).peekable();
        loop {
            match (li.peek(), ri.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(li.next().expect("peeked")),
                (None, Some(_)) => out.push(ri.next().expect("peeked")),
                (Some((lw, _)), Some((rw, _))) => {
                    if lw < rw {
                        out.push(li.next().expect("peeked"));
                    } else if rw < lw {
                        out.push(ri.next().expect("peeked"));
                    } else {
                        let (w, lm) = li.next().expect("peeked");
                        let (_, rm) = ri.next().expect("peeked");
                        out.push((w, lm + rm));
                    }
                }
            }
        }
        let rc = Rc::new(out);
        self.memo.insert((a, b), Rc::clone(&rc));
        rc
    }
}

/// Shuffle product of two term maps truncated at `out_degree`.
pub(crate) fn shuffle_maps(
    a: &TermMap,
    b: &TermMap,
    out_degree: usize,
    memo: &mut ShuffleMemo,
) -> TermMap {
    let mut acc = TermMap::new();
    for (u, cu) in a {
        if u.len() > out_degree {
            break;
        }
        let remaining = out_degree - u.len();
        for (v, cv) in b {
            if v.len() > remaining {
                break; // graded order: all later words are at least as long
            }
            let coeff = cu * cv;
            for (w, m) in memo.word_shuffle(*u, *v).iter() {
                let contribution = if *m == 1 {
                    coeff.clone()
                } else {
                    coeff.mul_u64(*m)
                };
                add_term(&mut acc, *w, contribution);
            }
        }
    }
    acc
}

/// Composition-product engine: memoizes the word recursion
/// `1 o d = 1`, `x0 w o d = x0 (w o d)`, `x1 w o d = x0 (d sh (w o d))`
/// across every left operand applied through the same instance.
pub(crate) struct Composer<'a> {
    right: &'a TermMap,
    degree: usize,
    memo: HashMap<Word, Rc<TermMap>>,
    shuffle: ShuffleMemo,
}

impl<'a> Composer<'a> {
    pub(crate) fn new(right: &'a TruncatedSeries, degree: usize) -> Self {
        Composer {
            right: right.term_map(),
            degree,
            memo: HashMap::new(),
            shuffle: ShuffleMemo::default(),
        }
    }

    fn word_compose(&mut self, word: Word) -> Rc<TermMap> {
        if let Some(hit) = self.memo.get(&word) {
            return Rc::clone(hit);
        }
        let result = match word.split_first() {
            None => one_map(),
            Some((Letter::X0, rest)) => {
                let tail = self.word_compose(rest);
                prepend_map(&tail, Letter::X0, self.degree)
            }
            Some((Letter::X1, rest)) => {
                let tail = self.word_compose(rest);
                let shuffled = shuffle_maps(
                    self.right,
                    &tail,
                    self.degree.saturating_sub(1),
                    &mut self.shuffle,
                );
                prepend_map(&shuffled, Letter::X0, self.degree)
            }
        };
        let rc = Rc::new(result);
        self.memo.insert(word, Rc::clone(&rc));
        rc
    }

    pub(crate) fn apply(&mut self, left: &TruncatedSeries) -> TruncatedSeries {
        let degree = self.degree.min(left.degree());
        let mut acc = TermMap::new();
        for (w, c) in left.terms() {
            if w.len() > degree {
                break;
            }
            for (rw, rc) in self.word_compose(*w).iter() {
                if rw.len() <= degree {
                    add_term(&mut acc, *rw, rc * c);
                }
            }
        }
        TruncatedSeries { degree, terms: acc }
    }
}

/// Mixed-composition engine for the recursion
/// `x1 w |> d = x1 (d1 sh (w |> d)) + x0 (d2 sh (w |> d))`.
pub(crate) struct MixedComposer<'a> {
    d1: &'a TermMap,
    d2: &'a TermMap,
    degree: usize,
    memo: HashMap<Word, Rc<TermMap>>,
    shuffle: ShuffleMemo,
}

impl<'a> MixedComposer<'a> {
    pub(crate) fn new(d1: &'a TruncatedSeries, d2: &'a TruncatedSeries, degree: usize) -> Self {
        MixedComposer {
            d1: d1.term_map(),
            d2: d2.term_map(),
            degree,
            memo: HashMap::new(),
            shuffle: ShuffleMemo::default(),
        }
    }

    fn word_mixed(&mut self, word: Word) -> Rc<TermMap> {
        if let Some(hit) = self.memo.get(&word) {
            return Rc::clone(hit);
        }
        let result = match word.split_first() {
            None => one_map(),
            Some((Letter::X0, rest)) => {
                let tail = self.word_mixed(rest);
                prepend_map(&tail, Letter::X0, self.degree)
            }
            Some((Letter::X1, rest)) => {
                let tail = self.word_mixed(rest);
                let inner_degree = self.degree.saturating_sub(1);
                let via_d1 = shuffle_maps(self.d1, &tail, inner_degree, &mut self.shuffle);
                let via_d2 = shuffle_maps(self.d2, &tail, inner_degree, &mut self.shuffle);
                let mut out = prepend_map(&via_d1, Letter::X1, self.degree);
                for (w, c) in prepend_map(&via_d2, Letter::X0, self.degree) {
                    add_term(&mut out, w, c);
                }
                out
            }
        };
        let rc = Rc::new(result);
        self.memo.insert(word, Rc::clone(&rc));
        rc
    }

    pub(crate) fn apply(&mut self, left: &TruncatedSeries) -> TruncatedSeries {
        let degree = self.degree.min(left.degree());
        let mut acc = TermMap::new();
        for (w, c) in left.terms() {
            if w.len() > degree {
                break;
            }
            for (rw, rc) in self.word_mixed(*w).iter() {
                if rw.len() <= degree {
                    add_term(&mut acc, *rw, rc * c);
                }
            }
        }
        TruncatedSeries { degree, terms: acc }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn series(degree: usize, terms: &[(i64, i64, &str)]) -> TruncatedSeries {
        TruncatedSeries::from_terms(
            terms
                .iter()
                .map(|(n, d, word)| (Rational::new(*n, *d), w(word))),
            degree,
        )
    }

    /// Independent oracle: the shuffle of two words by explicit enumeration
    /// of all interleavings (positions of `u` chosen by bitmask).
    fn brute_word_shuffle(u: &Word, v: &Word) -> BTreeMap<Word, u64> {
        let (a, b) = (u.len(), v.len());
        let ul: Vec<Letter> = u.letters().collect();
        let vl: Vec<Letter> = v.letters().collect();
        let mut out = BTreeMap::new();
        for mask in 0u32..(1 << (a + b)) {
            if mask.count_ones() as usize != a {
                continue;
            }
            let (mut iu, mut iv) = (0, 0);
            let mut letters = Vec::with_capacity(a + b);
            for pos in 0..(a + b) {
                if mask & (1 << pos) != 0 {
                    letters.push(ul[iu]);
                    iu += 1;
                } else {
                    letters.push(vl[iv]);
                    iv += 1;
                }
            }
            *out.entry(Word::from_letters(&letters)).or_insert(0) += 1;
        }
        out
    }

    pub(crate) fn brute_shuffle(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
        let degree = a.degree().min(b.degree());
        let mut acc = TermMap::new();
        for (u, cu) in a.terms() {
            for (v, cv) in b.terms() {
                if u.len() + v.len() > degree {
                    continue;
                }
                for (word, mult) in brute_word_shuffle(u, v) {
                    add_term(&mut acc, word, (cu * cv).mul_u64(mult));
                }
            }
        }
        TruncatedSeries::from_terms(acc.into_iter().map(|(w, c)| (c, w)), degree)
    }

    #[test]
    fn from_terms_sums_duplicates_and_drops() {
        let s = TruncatedSeries::from_terms(
            [(r(1), Word::empty()), (r(1), Word::empty())],
            3,
        );
        assert_eq!(s, TruncatedSeries::constant(r(2), 3));

        let dropped = TruncatedSeries::from_terms([(r(1), w("x1x1x1"))], 2);
        assert!(dropped.is_zero());

        let cancelled = TruncatedSeries::from_terms(
            [(Rational::new(1, 2), w("x0")), (Rational::new(-1, 2), w("x0"))],
            4,
        );
        assert!(cancelled.is_zero());
    }

    #[test]
    fn linear_operations() {
        let a = series(3, &[(1, 1, "x0")]);
        let b = series(3, &[(1, 1, "x1")]);
        assert_eq!(a.add(&b), series(3, &[(1, 1, "x0"), (1, 1, "x1")]));
        assert!(a.scale(&Rational::zero()).is_zero());
        assert!(a.add(&a.scale(&r(-1))).is_zero());
        assert_eq!((&a - &a), TruncatedSeries::zero(3));
    }

    #[test]
    fn shuffle_letter_examples() {
        let x1 = series(4, &[(1, 1, "x1")]);
        let x0 = series(4, &[(1, 1, "x0")]);
        assert_eq!(x1.shuffle(&x1), series(4, &[(2, 1, "x1x1")]));
        assert_eq!(
            x0.shuffle(&x1),
            series(4, &[(1, 1, "x0x1"), (1, 1, "x1x0")])
        );
        let c = series(4, &[(3, 2, "x0x1"), (1, 1, "1")]);
        assert_eq!(TruncatedSeries::one(4).shuffle(&c), c);
    }

    #[test]
    fn shuffle_matches_brute_force_oracle() {
        let a = series(5, &[(1, 1, "x0x1"), (-2, 3, "x1"), (1, 1, "1")]);
        let b = series(5, &[(1, 2, "x1x1"), (3, 1, "x0")]);
        assert_eq!(a.shuffle(&b), brute_shuffle(&a, &b));
        assert_eq!(b.shuffle(&a), brute_shuffle(&a, &b));
    }

    #[test]
    fn shuffle_power_factorial_law() {
        let x1 = series(6, &[(1, 1, "x1")]);
        // brute-force oracle gives k! on a single letter
        assert_eq!(x1.shuffle_power(3), series(6, &[(6, 1, "x1x1x1")]));
        let mut factorial = 1i64;
        for k in 1..=6usize {
            factorial *= k as i64;
            let expected =
                TruncatedSeries::monomial(r(factorial), Word::x1_power(k), 6);
            assert_eq!(x1.shuffle_power(k), expected);
        }
        assert_eq!(x1.shuffle_power(0), TruncatedSeries::one(6));
        assert!(TruncatedSeries::zero(6).shuffle_power(2).is_zero());
    }

    #[test]
    fn shuffle_inverse_examples() {
        let one = TruncatedSeries::one(5);
        assert_eq!(one.shuffle_inverse().unwrap(), one);

        // (1 + x1)^{-1} at degree 3: geometric series gives 1 - x1 + 2 x1x1 - 6 x1x1x1
        let c = series(3, &[(1, 1, "1"), (1, 1, "x1")]);
        let inv = c.shuffle_inverse().unwrap();
        assert_eq!(
            inv,
            series(
                3,
                &[(1, 1, "1"), (-1, 1, "x1"), (2, 1, "x1x1"), (-6, 1, "x1x1x1")]
            )
        );
        assert_eq!(c.shuffle(&inv), TruncatedSeries::one(3));

        let two = TruncatedSeries::constant(r(2), 4);
        assert_eq!(
            two.shuffle_inverse().unwrap(),
            TruncatedSeries::constant(Rational::new(1, 2), 4)
        );

        let proper = series(3, &[(1, 1, "x1")]);
        assert_eq!(proper.shuffle_inverse(), Err(NotAShuffleUnit));
    }

    #[test]
    fn shuffle_inverse_on_random_unit() {
        let c = series(5, &[(1, 1, "1"), (1, 2, "x0"), (-3, 1, "x1x0"), (2, 1, "x0x0x1")]);
        let inv = c.shuffle_inverse().unwrap();
        assert_eq!(c.shuffle(&inv), TruncatedSeries::one(5));
        assert_eq!(inv.shuffle(&c), TruncatedSeries::one(5));
    }

    #[test]
    fn compose_examples() {
        let d = series(5, &[(2, 1, "x1"), (1, 3, "x0x0")]);
        let x0x0 = series(5, &[(1, 1, "x0x0")]);
        assert_eq!(x0x0.compose(&d), x0x0);

        let x1 = series(5, &[(1, 1, "x1")]);
        assert_eq!(x1.compose(&x1), series(5, &[(1, 1, "x0x1")]));

        let x1x1 = series(5, &[(1, 1, "x1x1")]);
        assert_eq!(
            x1x1.compose(&TruncatedSeries::one(5)),
            series(5, &[(1, 1, "x0x0")])
        );

        assert!(TruncatedSeries::zero(5).compose(&d).is_zero());
    }

    #[test]
    fn compose_is_linear_in_left_argument() {
        let a = series(5, &[(1, 1, "x1x0"), (1, 2, "x0")]);
        let b = series(5, &[(-1, 1, "x1"), (2, 1, "1")]);
        let e = series(5, &[(1, 1, "x1"), (1, 1, "x0x1")]);
        assert_eq!(
            a.add(&b).compose(&e),
            a.compose(&e).add(&b.compose(&e))
        );
    }

    #[test]
    fn mixed_compose_examples() {
        let d1 = series(5, &[(1, 1, "1"), (1, 1, "x0")]);
        let d2 = series(5, &[(1, 1, "x1")]);
        let x1 = series(5, &[(1, 1, "x1")]);
        assert_eq!(
            x1.mixed_compose_parts(&d1, &d2, 5),
            series(5, &[(1, 1, "x1"), (1, 1, "x1x0"), (1, 1, "x0x1")])
        );

        // drift words are fixed points
        let drift = series(5, &[(1, 1, "x0x0x0")]);
        assert_eq!(drift.mixed_compose_parts(&d1, &d2, 5), drift);

        // identity pair (1, 0) acts trivially
        let c = series(5, &[(1, 2, "x1x0x1"), (-2, 1, "x0"), (1, 1, "1")]);
        let one = TruncatedSeries::one(5);
        let zero = TruncatedSeries::zero(5);
        assert_eq!(c.mixed_compose_parts(&one, &zero, 5), c);
    }

    #[test]
    fn truncation_exactness() {
        let a = series(4, &[(1, 1, "x1"), (1, 2, "x0x1"), (3, 1, "1")]);
        let b = series(4, &[(-1, 1, "x1x1"), (1, 1, "x0"), (1, 1, "1")]);
        let d1 = series(4, &[(1, 1, "1"), (2, 1, "x1")]);
        let d2 = series(4, &[(1, 3, "x0x1")]);

        let full = a.shuffle(&b);
        assert_eq!(full.truncate(3), a.truncate(3).shuffle(&b.truncate(3)));

        let comp = a.compose(&b);
        assert_eq!(comp.truncate(3), a.truncate(3).compose(&b.truncate(3)));

        let mixed = a.mixed_compose_parts(&d1, &d2, 4);
        assert_eq!(
            mixed.truncate(3),
            a.truncate(3)
                .mixed_compose_parts(&d1.truncate(3), &d2.truncate(3), 3)
        );
    }

    #[test]
    fn quotient_equality() {
        let c = series(4, &[(1, 1, "x1"), (1, 1, "x0x0")]);
        assert!(c.quotient_equal(&c));

        let drift = series(4, &[(1, 1, "x0"), (1, 1, "x0x0")]);
        assert!(drift.quotient_equal(&TruncatedSeries::zero(4)));

        let x1 = series(4, &[(1, 1, "x1")]);
        assert!(!x1.quotient_equal(&TruncatedSeries::zero(4)));

        // differ at the empty word only
        let shifted = c.add(&TruncatedSeries::one(4));
        assert!(c.quotient_equal(&shifted));
    }

    #[test]
    fn display_form() {
        assert_eq!(TruncatedSeries::zero(3).to_string(), "0");
        let s = series(3, &[(1, 2, "x0x1"), (-2, 1, "1")]);
        assert_eq!(s.to_string(), "-2 + 1/2*x0x1");
    }

    #[test]
    fn series_values_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<TruncatedSeries>();
        assert_send_sync::<Rational>();
        assert_send_sync::<Word>();
    }
}
