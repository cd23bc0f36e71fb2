//! Ordered alphabets, words, projections, prints, and exact scattered
//! subsequence counting.
//!
//! Letters are 0-based indices internally and render as `'a' + index`. All
//! counting is checked 64-bit arithmetic: an overflow is a hard error, never
//! a wrap.

use crate::error::{Error, Result};
use std::fmt;

/// Longest word any parser or constructor accepts. Exact counting is only
/// guaranteed overflow-free well below this, but the checked arithmetic
/// catches that case on its own; the cap just keeps `a^k` inputs sane.
pub const MAX_WORD_LEN: usize = 100_000;

/// A totally ordered finite alphabet `a < b < c < ...`.
///
/// Only the size is stored; letter `i` is the `i`-th smallest. Size 0 is
/// permitted so projections by the empty letter set have an image alphabet.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OrderedAlphabet {
    size: u8,
}

impl OrderedAlphabet {
    /// Rendering bound: `'a'..='z'`.
    pub const MAX_SIZE: usize = 26;

    pub fn new(size: usize) -> Result<Self> {
        if size > Self::MAX_SIZE {
            return Err(Error::AlphabetSize(size));
        }
        Ok(OrderedAlphabet { size: size as u8 })
    }

    pub fn size(self) -> usize {
        self.size as usize
    }

    /// Letters in increasing order.
    pub fn letters(self) -> impl Iterator<Item = u8> {
        0..self.size
    }

    pub fn letter_char(self, index: u8) -> char {
        debug_assert!(index < self.size);
        (b'a' + index) as char
    }

    pub fn letter_index(self, ch: char) -> Result<u8> {
        match ch {
            'a'..='z' if (ch as u8 - b'a') < self.size => Ok(ch as u8 - b'a'),
            _ => Err(Error::UnknownLetter { letter: ch, size: self.size() }),
        }
    }

    pub fn full_set(self) -> LetterSet {
        LetterSet { alphabet: self, mask: (1u32 << self.size) - 1 }
    }
}

/// A finite word over one [`OrderedAlphabet`]. The empty word is permitted.
///
/// Ordering is lexicographic by letter index (alphabets compare first, so
/// same-alphabet words sort as expected).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    alphabet: OrderedAlphabet,
    letters: Vec<u8>,
}

impl Word {
    pub fn new(alphabet: OrderedAlphabet, letters: Vec<u8>) -> Result<Self> {
        if letters.len() > MAX_WORD_LEN {
            return Err(Error::WordTooLong { len: letters.len(), max: MAX_WORD_LEN });
        }
        for &l in &letters {
            if l as usize >= alphabet.size() {
                return Err(Error::LetterIndex { index: l as usize, size: alphabet.size() });
            }
        }
        Ok(Word { alphabet, letters })
    }

    pub fn empty(alphabet: OrderedAlphabet) -> Self {
        Word { alphabet, letters: Vec::new() }
    }

    /// Parse the `letter` / `letter^k` grammar, e.g. `ab^11cbabcb^5`.
    ///
    /// `^k` repeats exactly the one preceding letter `k` times; `k = 0` is
    /// rejected. Whitespace may separate tokens.
    pub fn parse(text: &str, alphabet: OrderedAlphabet) -> Result<Self> {
        let mut letters = Vec::new();
        let mut chars = text.chars().peekable();
        while let Some(ch) = chars.next() {
            if ch.is_whitespace() {
                continue;
            }
            let letter = alphabet.letter_index(ch)?;
            let mut count = 1usize;
            if chars.peek() == Some(&'^') {
                chars.next();
                let mut digits = String::new();
                while let Some(d) = chars.peek() {
                    if d.is_ascii_digit() {
                        digits.push(*d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if digits.is_empty() {
                    return Err(Error::MalformedExponent { token: format!("{ch}^") });
                }
                count = digits
                    .parse()
                    .map_err(|_| Error::MalformedExponent { token: format!("{ch}^{digits}") })?;
                if count == 0 {
                    return Err(Error::ZeroExponent);
                }
            }
            if letters.len() + count > MAX_WORD_LEN {
                return Err(Error::WordTooLong { len: letters.len() + count, max: MAX_WORD_LEN });
            }
            letters.extend(std::iter::repeat(letter).take(count));
        }
        Ok(Word { alphabet, letters })
    }

    /// Inverse of [`Word::parse`]: runs of 4 or more letters compress to
    /// `letter^k`, shorter runs are written plainly.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut i = 0;
        while i < self.letters.len() {
            let letter = self.letters[i];
            let mut j = i;
            while j < self.letters.len() && self.letters[j] == letter {
                j += 1;
            }
            let run = j - i;
            let ch = self.alphabet.letter_char(letter);
            if run >= 4 {
                out.push(ch);
                out.push('^');
                out.push_str(&run.to_string());
            } else {
                for _ in 0..run {
                    out.push(ch);
                }
            }
            i = j;
        }
        out
    }

    pub fn alphabet(&self) -> OrderedAlphabet {
        self.alphabet
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Occurrences of each letter, indexed by letter.
    pub fn letter_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.alphabet.size()];
        for &l in &self.letters {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Delete every letter outside `set`; the image lives over `set` itself,
    /// renumbered 0.. in the inherited order.
    pub fn projection(&self, set: &LetterSet) -> Result<Word> {
        if set.alphabet != self.alphabet {
            return Err(Error::NotSubset);
        }
        let image_alphabet = OrderedAlphabet::new(set.len())?;
        let mut rank = vec![u8::MAX; self.alphabet.size()];
        for (r, l) in set.letters().enumerate() {
            rank[l as usize] = r as u8;
        }
        let letters = self
            .letters
            .iter()
            .filter(|&&l| set.contains(l))
            .map(|&l| rank[l as usize])
            .collect();
        Ok(Word { alphabet: image_alphabet, letters })
    }

    /// Run-compression: each maximal run of equal letters becomes one letter.
    pub fn print(&self) -> Word {
        let mut letters: Vec<u8> = Vec::new();
        for &l in &self.letters {
            if letters.last() != Some(&l) {
                letters.push(l);
            }
        }
        Word { alphabet: self.alphabet, letters }
    }

    /// Exact number of occurrences of `v` as a scattered subsequence of
    /// `self`; `|w|_λ = 1`. Errors with [`Error::CountOverflow`] instead of
    /// wrapping.
    ///
    /// Standard prefix-table dynamic program, `O(|w|·|v|)`.
    pub fn subword_count(&self, v: &Word) -> Result<u64> {
        for &l in &v.letters {
            if l as usize >= self.alphabet.size() {
                return Err(Error::AlphabetMismatch {
                    left: self.alphabet.size(),
                    right: v.alphabet.size(),
                });
            }
        }
        let m = v.len();
        let mut table = vec![0u64; m + 1];
        table[0] = 1;
        for &c in &self.letters {
            for j in (1..=m).rev() {
                if v.letters[j - 1] == c {
                    table[j] = table[j].checked_add(table[j - 1]).ok_or(Error::CountOverflow)?;
                }
            }
        }
        Ok(table[m])
    }

    pub(crate) fn from_letters_unchecked(alphabet: OrderedAlphabet, letters: Vec<u8>) -> Word {
        debug_assert!(letters.iter().all(|&l| (l as usize) < alphabet.size()));
        Word { alphabet, letters }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self.render())
    }
}

/// A subset of an alphabet's letters with the inherited order.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LetterSet {
    alphabet: OrderedAlphabet,
    mask: u32,
}

impl LetterSet {
    pub fn empty(alphabet: OrderedAlphabet) -> Self {
        LetterSet { alphabet, mask: 0 }
    }

    pub fn from_letters(alphabet: OrderedAlphabet, letters: &[u8]) -> Result<Self> {
        let mut mask = 0u32;
        for &l in letters {
            if l as usize >= alphabet.size() {
                return Err(Error::LetterIndex { index: l as usize, size: alphabet.size() });
            }
            mask |= 1 << l;
        }
        Ok(LetterSet { alphabet, mask })
    }

    /// Parse letters like `"ac"` into a set over `alphabet`.
    pub fn parse(text: &str, alphabet: OrderedAlphabet) -> Result<Self> {
        let mut mask = 0u32;
        for ch in text.chars() {
            if ch.is_whitespace() || ch == ',' || ch == '{' || ch == '}' {
                continue;
            }
            mask |= 1 << alphabet.letter_index(ch)?;
        }
        Ok(LetterSet { alphabet, mask })
    }

    pub fn alphabet(self) -> OrderedAlphabet {
        self.alphabet
    }

    pub fn contains(self, letter: u8) -> bool {
        (letter as usize) < self.alphabet.size() && self.mask & (1 << letter) != 0
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    /// Member letters in increasing order.
    pub fn letters(self) -> impl Iterator<Item = u8> {
        let mask = self.mask;
        (0..32u8).filter(move |l| mask & (1 << l) != 0)
    }

    pub fn render(self) -> String {
        let mut out = String::from("{");
        for (i, l) in self.letters().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push(self.alphabet.letter_char(l));
        }
        out.push('}');
        out
    }
}

impl fmt::Debug for LetterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(s: usize) -> OrderedAlphabet {
        OrderedAlphabet::new(s).unwrap()
    }

    fn word(s: usize, text: &str) -> Word {
        Word::parse(text, alpha(s)).unwrap()
    }

    #[test]
    fn parse_plain() {
        let w = word(3, "abcabbc");
        assert_eq!(w.len(), 7);
        assert_eq!(w.letters(), &[0, 1, 2, 0, 1, 1, 2]);
    }

    #[test]
    fn parse_exponents() {
        let w = word(3, "ab^11cbabcb^5");
        assert_eq!(w.len(), 22);
        assert_eq!(w.render(), "ab^11cbabcb^5");
    }

    #[test]
    fn parse_rejects_zero_exponent() {
        assert!(matches!(Word::parse("b^0a", alpha(2)), Err(Error::ZeroExponent)));
    }

    #[test]
    fn parse_rejects_unknown_letter() {
        assert!(matches!(
            Word::parse("abd", alpha(3)),
            Err(Error::UnknownLetter { letter: 'd', .. })
        ));
        assert!(matches!(
            Word::parse("a$b", alpha(3)),
            Err(Error::UnknownLetter { letter: '$', .. })
        ));
    }

    #[test]
    fn parse_rejects_dangling_caret() {
        assert!(matches!(Word::parse("a^", alpha(2)), Err(Error::MalformedExponent { .. })));
        assert!(matches!(Word::parse("a^x", alpha(2)), Err(Error::MalformedExponent { .. })));
    }

    #[test]
    fn parse_allows_whitespace_between_tokens() {
        assert_eq!(word(3, "a b^2  c"), word(3, "abbc"));
    }

    #[test]
    fn render_short_runs_plainly() {
        assert_eq!(word(2, "aaabba").render(), "aaabba");
        assert_eq!(word(2, "aaaab").render(), "a^4b");
        assert_eq!(Word::empty(alpha(2)).render(), "");
    }

    #[test]
    fn render_parse_round_trip() {
        for text in ["", "a", "abab", "a^7b^4a", "abcabbc", "ab^11cbabcb^5"] {
            let w = word(3, text);
            assert_eq!(Word::parse(&w.render(), alpha(3)).unwrap(), w);
        }
    }

    #[test]
    fn projection_golden() {
        // over {a<b<c<d}: keeping {a,c} from bacdabc leaves acac
        let w = word(4, "bacdabc");
        let s = LetterSet::parse("ac", alpha(4)).unwrap();
        let p = w.projection(&s).unwrap();
        assert_eq!(p.alphabet().size(), 2);
        assert_eq!(p.letters(), &[0, 1, 0, 1]);
    }

    #[test]
    fn projection_full_is_identity() {
        let w = word(3, "abcabbc");
        let p = w.projection(&alpha(3).full_set()).unwrap();
        assert_eq!(p.letters(), w.letters());
    }

    #[test]
    fn projection_empty_set() {
        let w = word(3, "abc");
        let p = w.projection(&LetterSet::empty(alpha(3))).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.alphabet().size(), 0);
    }

    #[test]
    fn projection_composes() {
        let w = word(4, "bacdabcddca");
        let s = LetterSet::parse("abc", alpha(4)).unwrap();
        let t = LetterSet::parse("acd", alpha(4)).unwrap();
        let lhs = w.projection(&t).unwrap();
        // S ∩ T relative to the image of T: {a,c} sits at ranks 0,1 of {a,c,d}
        let inner = LetterSet::parse("ab", lhs.alphabet()).unwrap();
        let lhs = lhs.projection(&inner).unwrap();
        let rhs = w.projection(&LetterSet::parse("ac", alpha(4)).unwrap()).unwrap();
        assert_eq!(lhs.letters(), rhs.letters());
    }

    #[test]
    fn print_golden() {
        assert_eq!(word(2, "aabba").print(), word(2, "aba"));
        assert_eq!(Word::empty(alpha(2)).print(), Word::empty(alpha(2)));
        let w = word(3, "ab^11cbabcb^5");
        let p = w.projection(&LetterSet::parse("ac", alpha(3)).unwrap()).unwrap();
        let printed = p.print();
        assert_eq!(printed.len(), 4);
        assert_eq!(printed.letters(), &[0, 1, 0, 1]);
    }

    #[test]
    fn print_is_idempotent() {
        let w = word(3, "aabbccabcaabb");
        assert_eq!(w.print().print(), w.print());
        let p = w.print();
        assert!(p.letters().windows(2).all(|pair| pair[0] != pair[1]));
    }

    #[test]
    fn subword_count_goldens() {
        assert_eq!(word(2, "aababb").subword_count(&word(2, "ab")).unwrap(), 8);
        assert_eq!(word(3, "bcacabcba").subword_count(&word(3, "abc")).unwrap(), 2);
    }

    #[test]
    fn subword_count_trivial_cases() {
        let w = word(3, "abcabbc");
        assert_eq!(w.subword_count(&w).unwrap(), 1);
        assert_eq!(w.subword_count(&Word::empty(alpha(3))).unwrap(), 1);
        // single letters reduce to occurrence counts
        assert_eq!(w.subword_count(&word(3, "b")).unwrap(), 3);
    }

    #[test]
    fn subword_count_overflow_is_an_error() {
        // C(70,35) > 2^64
        let w = word(1, "a^70");
        let v = word(1, "a^35");
        assert!(matches!(w.subword_count(&v), Err(Error::CountOverflow)));
    }

    #[test]
    fn letter_set_order_and_render() {
        let s = LetterSet::parse("ca", alpha(3)).unwrap();
        assert_eq!(s.letters().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(s.render(), "{a,c}");
    }
}
