//! The Parikh matrix monoid: unit upper-triangular matrices over the
//! nonnegative integers, the word-to-matrix morphism, and the equivalence
//! predicates built on it (M-, strong M-, and P-equivalence).

use crate::error::{Error, Result};
use crate::wordcore::{LetterSet, OrderedAlphabet, Word};
use itertools::Itertools;
use std::fmt;

/// A unit upper-triangular `(s+1) x (s+1)` matrix of nonnegative integers.
///
/// For a word `w` over an alphabet of size `s`, entry `(i, j+1)` (1-based,
/// `i <= j`) is the scattered-subsequence count of the letter band
/// `a_i a_{i+1} ... a_j` in `w`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ParikhMatrix {
    dim: usize,
    entries: Vec<u64>, // row-major
}

impl ParikhMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0u64; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        ParikhMatrix { dim, entries }
    }

    /// The image of a single letter: identity plus a lone 1 at
    /// `(letter, letter+1)`.
    pub fn generator(alphabet: OrderedAlphabet, letter: u8) -> Result<Self> {
        if letter as usize >= alphabet.size() {
            return Err(Error::LetterIndex { index: letter as usize, size: alphabet.size() });
        }
        let dim = alphabet.size() + 1;
        let mut m = ParikhMatrix::identity(dim);
        let q = letter as usize;
        m.entries[q * dim + q + 1] = 1;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> u64 {
        assert!(row < self.dim && col < self.dim);
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        (0..self.dim)
            .map(|r| self.entries[r * self.dim..(r + 1) * self.dim].to_vec())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: row.len() });
            }
            entries.extend_from_slice(row);
        }
        Ok(ParikhMatrix { dim, entries })
    }

    /// Exact monoid product; overflow is an error.
    pub fn multiply(&self, other: &ParikhMatrix) -> Result<ParikhMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        let dim = self.dim;
        let mut entries = vec![0u64; dim * dim];
        for i in 0..dim {
            for k in i..dim {
                let a = self.entries[i * dim + k];
                if a == 0 {
                    continue;
                }
                for j in k..dim {
                    let b = other.entries[k * dim + j];
                    if b == 0 {
                        continue;
                    }
                    let cell = &mut entries[i * dim + j];
                    *cell = a
                        .checked_mul(b)
                        .and_then(|p| cell.checked_add(p))
                        .ok_or(Error::CountOverflow)?;
                }
            }
        }
        Ok(ParikhMatrix { dim, entries })
    }

    pub fn is_unit_upper_triangular(&self) -> bool {
        for i in 0..self.dim {
            if self.entries[i * self.dim + i] != 1 {
                return false;
            }
            for j in 0..i {
                if self.entries[i * self.dim + j] != 0 {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for ParikhMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParikhMatrix{:?}", self.rows())
    }
}

/// The band counts `(i, j)` with `1 <= i <= j <= s`, i.e. the strict upper
/// triangle of a Parikh matrix in count form, plus virtual `c(i, i-1) = 1`
/// cells so the append recurrence needs no special cases.
///
/// Appending letter `q` (1-based) adds column `q-1` into column `q` on rows
/// `1..=q`; this is exactly right-multiplication by the letter's generator
/// matrix, restricted to the cells that can change.
#[derive(Clone, PartialEq, Eq)]
pub(crate) struct CornerCounts {
    s: usize,
    cells: Vec<u64>, // index (i-1)*(s+1) + j for i in 1..=s, j in 0..=s
}

impl CornerCounts {
    pub(crate) fn new(s: usize) -> Self {
        let mut cells = vec![0u64; s * (s + 1)];
        for i in 1..=s {
            cells[(i - 1) * (s + 1) + (i - 1)] = 1;
        }
        CornerCounts { s, cells }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> u64 {
        debug_assert!(i >= 1 && i <= self.s && j + 1 >= i && j <= self.s);
        self.cells[(i - 1) * (self.s + 1) + j]
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        (i - 1) * (self.s + 1) + j
    }

    /// Append letter `q` (1-based) with checked arithmetic.
    pub(crate) fn append_checked(&mut self, q: usize) -> Result<()> {
        for i in 1..=q {
            let add = self.cells[self.idx(i, q - 1)];
            let cell = &mut self.cells[self.idx(i, q)];
            *cell = cell.checked_add(add).ok_or(Error::CountOverflow)?;
        }
        Ok(())
    }

    /// Append letter `q`, saving the overwritten cells of column `q` onto
    /// `undo` (rows `1..=q`, in row order). Saturating: a saturated cell is
    /// strictly larger than any valid target entry, so the caller's bound
    /// checks prune such branches before the corruption could matter, and
    /// [`CornerCounts::unappend`] restores exact values from the undo stack.
    #[inline]
    pub(crate) fn append_saturating(&mut self, q: usize, undo: &mut Vec<u64>) {
        for i in 1..=q {
            let add = self.cells[self.idx(i, q - 1)];
            let idx = self.idx(i, q);
            undo.push(self.cells[idx]);
            self.cells[idx] = self.cells[idx].saturating_add(add);
        }
    }

    #[inline]
    pub(crate) fn unappend(&mut self, q: usize, undo: &mut Vec<u64>) {
        for i in (1..=q).rev() {
            let idx = self.idx(i, q);
            self.cells[idx] = undo.pop().expect("undo stack underflow");
        }
    }

    pub(crate) fn from_word(w: &Word) -> Result<Self> {
        let mut counts = CornerCounts::new(w.alphabet().size());
        for &l in w.letters() {
            counts.append_checked(l as usize + 1)?;
        }
        Ok(counts)
    }

    pub(crate) fn to_matrix(&self) -> ParikhMatrix {
        let dim = self.s + 1;
        let mut m = ParikhMatrix::identity(dim);
        for i in 1..=self.s {
            for j in i..=self.s {
                m.entries[(i - 1) * dim + j] = self.get(i, j);
            }
        }
        m
    }

    pub(crate) fn size(&self) -> usize {
        self.s
    }
}

impl Word {
    /// The Parikh matrix of this word: the monoid product of its letters'
    /// generator matrices.
    ///
    /// Debug builds cross-check the product against the independent
    /// subsequence-count characterization of every band entry.
    pub fn parikh_matrix(&self) -> Result<ParikhMatrix> {
        let counts = CornerCounts::from_word(self)?;
        let m = counts.to_matrix();
        debug_assert_eq!(m, self.parikh_matrix_by_counts()?, "matrix routes disagree");
        Ok(m)
    }

    /// The matrix assembled entry-by-entry from scattered-subsequence counts
    /// of letter bands. Independent of the product route; used to cross-check
    /// it.
    pub fn parikh_matrix_by_counts(&self) -> Result<ParikhMatrix> {
        let s = self.alphabet().size();
        let dim = s + 1;
        let mut m = ParikhMatrix::identity(dim);
        for i in 1..=s {
            for j in i..=s {
                let band: Vec<u8> = (i - 1..j).map(|l| l as u8).collect();
                let band = Word::from_letters_unchecked(self.alphabet(), band);
                m.entries[(i - 1) * dim + j] = self.subword_count(&band)?;
            }
        }
        Ok(m)
    }
}

fn require_same_alphabet(w: &Word, w2: &Word) -> Result<()> {
    if w.alphabet() != w2.alphabet() {
        return Err(Error::AlphabetMismatch {
            left: w.alphabet().size(),
            right: w2.alphabet().size(),
        });
    }
    Ok(())
}

/// Do the two words share one Parikh matrix?
pub fn m_equivalent(w: &Word, w2: &Word) -> Result<bool> {
    require_same_alphabet(w, w2)?;
    if w.len() != w2.len() {
        return Ok(false);
    }
    Ok(CornerCounts::from_word(w)? == CornerCounts::from_word(w2)?)
}

/// M-equivalence under every total ordering of the alphabet: equal counts on
/// every injective letter sequence of each length `1..=s`.
pub fn strong_m_equivalent(w: &Word, w2: &Word) -> Result<bool> {
    require_same_alphabet(w, w2)?;
    let s = w.alphabet().size();
    let letters: Vec<u8> = w.alphabet().letters().collect();
    for len in 1..=s {
        for perm in letters.iter().copied().permutations(len) {
            let v = Word::from_letters_unchecked(w.alphabet(), perm);
            if w.subword_count(&v)? != w2.subword_count(&v)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every strictly increasing letter sequence over the alphabet, in
/// (size, lexicographic) order. These index the P-signature.
fn increasing_sequences(alphabet: OrderedAlphabet) -> impl Iterator<Item = Vec<u8>> {
    let letters: Vec<u8> = alphabet.letters().collect();
    let s = letters.len();
    (1..=s).flat_map(move |len| letters.clone().into_iter().combinations(len))
}

/// Counts of all strictly increasing letter sequences, in a fixed order.
/// Two words are P-equivalent exactly when their signatures agree.
pub(crate) fn p_signature(w: &Word) -> Result<Vec<u64>> {
    increasing_sequences(w.alphabet())
        .map(|seq| w.subword_count(&Word::from_letters_unchecked(w.alphabet(), seq)))
        .collect()
}

/// Equal counts on every strictly increasing letter sequence; equivalently,
/// equal Parikh matrices under every subset projection (see
/// [`p_equivalent_by_projections`]).
pub fn p_equivalent(w: &Word, w2: &Word) -> Result<bool> {
    require_same_alphabet(w, w2)?;
    Ok(p_signature(w)? == p_signature(w2)?)
}

/// The projection formulation of P-equivalence, kept as an independent route
/// for cross-checking the count formulation.
pub fn p_equivalent_by_projections(w: &Word, w2: &Word) -> Result<bool> {
    Ok(p_distinct(w, w2)?.is_none())
}

/// Subsets of the alphabet in (size, lexicographic) order, sizes `1..=s`.
pub fn subsets_in_witness_order(alphabet: OrderedAlphabet) -> impl Iterator<Item = LetterSet> {
    increasing_sequences(alphabet).map(move |letters| {
        LetterSet::from_letters(alphabet, &letters).expect("letters come from the alphabet")
    })
}

/// Search for a subset `S` whose projected Parikh matrices differ, returning
/// the first witness in (size, lexicographic) order, or `None` when the words
/// are P-equivalent.
///
/// Singleton subsets only separate words with different Parikh vectors, so
/// they are skipped when the vectors already agree.
pub fn p_distinct(w: &Word, w2: &Word) -> Result<Option<LetterSet>> {
    require_same_alphabet(w, w2)?;
    let vectors_match = w.letter_counts() == w2.letter_counts();
    for set in subsets_in_witness_order(w.alphabet()) {
        if set.len() == 1 && vectors_match {
            continue;
        }
        let p = w.projection(&set)?;
        let p2 = w2.projection(&set)?;
        // band counts include the per-letter counts, so equality of the
        // CornerCounts tables is exactly equality of the projected matrices
        if CornerCounts::from_word(&p)? != CornerCounts::from_word(&p2)? {
            return Ok(Some(set));
        }
    }
    Ok(None)
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
    fn matrix_of_abcabbc() {
        let m = word(3, "abcabbc").parikh_matrix().unwrap();
        assert_eq!(
            m.rows(),
            vec![
                vec![1, 2, 5, 6],
                vec![0, 1, 3, 4],
                vec![0, 0, 1, 2],
                vec![0, 0, 0, 1],
            ]
        );
    }

    #[test]
    fn matrix_of_empty_word_is_identity() {
        let m = Word::empty(alpha(2)).parikh_matrix().unwrap();
        assert_eq!(m, ParikhMatrix::identity(3));
    }

    #[test]
    fn product_route_matches_explicit_generator_fold() {
        let w = word(3, "abcabbc");
        let mut acc = ParikhMatrix::identity(4);
        for &l in w.letters() {
            acc = acc.multiply(&ParikhMatrix::generator(alpha(3), l).unwrap()).unwrap();
        }
        assert_eq!(acc, w.parikh_matrix().unwrap());
    }

    #[test]
    fn identity_is_neutral() {
        let m = word(3, "abcabbc").parikh_matrix().unwrap();
        let id = ParikhMatrix::identity(4);
        assert_eq!(id.multiply(&m).unwrap(), m);
        assert_eq!(m.multiply(&id).unwrap(), m);
    }

    #[test]
    fn generator_squared_counts_two() {
        let g = ParikhMatrix::generator(alpha(2), 0).unwrap();
        let m = g.multiply(&g).unwrap();
        assert_eq!(m.entry(0, 1), 2);
        assert_eq!(m, word(2, "aa").parikh_matrix().unwrap());
    }

    #[test]
    fn quaternary_matrix_golden() {
        let w = word(4, "bcbabcbcdcbcbbabcbccdccbb");
        let m = w.parikh_matrix().unwrap();
        assert_eq!(
            m.rows(),
            vec![
                vec![1, 2, 13, 51, 36],
                vec![0, 1, 11, 61, 51],
                vec![0, 0, 1, 10, 11],
                vec![0, 0, 0, 1, 2],
                vec![0, 0, 0, 0, 1],
            ]
        );
    }

    #[test]
    fn m_equivalence_examples() {
        // one ascending/descending pair swap with an all-b middle
        assert!(m_equivalent(&word(3, "abbabc"), &word(3, "baabbc")).unwrap());
        // parametric family instance: α=2, k=1, β=γ=1, δ=2
        assert!(m_equivalent(&word(3, "abbcbabcbba"), &word(3, "bacbabbbcba")).unwrap());
        assert!(!m_equivalent(&word(3, "abc"), &word(3, "acb")).unwrap());
        let w = word(3, "abcabbc");
        assert!(m_equivalent(&w, &w).unwrap());
    }

    #[test]
    fn m_equivalence_rejects_mismatched_alphabets() {
        assert!(matches!(
            m_equivalent(&word(2, "ab"), &word(3, "ab")),
            Err(Error::AlphabetMismatch { .. })
        ));
    }

    #[test]
    fn strong_m_equivalence_examples() {
        assert!(strong_m_equivalent(&word(2, "abba"), &word(2, "baab")).unwrap());
        // |acb|_{ca} = 0 but |cab|_{ca} = 1
        assert!(!strong_m_equivalent(&word(3, "acb"), &word(3, "cab")).unwrap());
        let w = word(3, "abcba");
        assert!(strong_m_equivalent(&w, &w).unwrap());
    }

    #[test]
    fn p_equivalence_examples() {
        assert!(p_equivalent(&word(3, "abbabc"), &word(3, "baabbc")).unwrap());
        let w = word(4, "bcbabcbcdcbcbbabcbccdccbb");
        let v = word(4, "cbbabbcbcdccbcbabcbcdcbcb");
        assert!(m_equivalent(&w, &v).unwrap());
        assert!(!p_equivalent(&w, &v).unwrap());
        assert!(p_equivalent(&w, &w).unwrap());
    }

    #[test]
    fn p_distinct_witnesses() {
        let witness = p_distinct(&word(3, "acb"), &word(3, "cab")).unwrap().unwrap();
        assert_eq!(witness.render(), "{a,c}");
        let w = word(4, "bcbabcbcdcbcbbabcbccdccbb");
        let v = word(4, "cbbabbcbcdccbcbabcbcdcbcb");
        assert_eq!(p_distinct(&w, &v).unwrap().unwrap().render(), "{a,c}");
        let w = word(3, "abcabbc");
        assert!(p_distinct(&w, &w).unwrap().is_none());
    }

    #[test]
    fn p_distinct_reports_singleton_witness_for_different_vectors() {
        let witness = p_distinct(&word(3, "ab"), &word(3, "cb")).unwrap().unwrap();
        assert_eq!(witness.render(), "{a}");
    }

    #[test]
    fn witness_order_is_size_then_lex() {
        let sets: Vec<String> =
            subsets_in_witness_order(alpha(3)).map(|s| s.render()).collect();
        assert_eq!(
            sets,
            vec!["{a}", "{b}", "{c}", "{a,b}", "{a,c}", "{b,c}", "{a,b,c}"]
        );
    }

    #[test]
    fn multiply_dimension_mismatch() {
        let a = ParikhMatrix::identity(3);
        let b = ParikhMatrix::identity(4);
        assert!(matches!(a.multiply(&b), Err(Error::DimensionMismatch { .. })));
    }
}
