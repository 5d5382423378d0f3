//! Words over the edge alphabet of an admissible graph.
//!
//! A word w = e_N ... e_1 is stored in display order (index 0 holds the
//! leftmost letter e_N).  Under evaluation the rightmost letter acts first,
//! so the product of two words is plain concatenation and the transpose is
//! the reversal.  Words are ordered by length first, then lexicographically,
//! which lets series code iterate level by level.

use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u16>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(e: usize) -> Self {
        Word(vec![e as u16])
    }

    pub fn from_letters(letters: &[usize]) -> Self {
        Word(letters.iter().map(|&e| e as u16).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Letters in display order (leftmost first).
    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&e| e as usize)
    }

    /// Concatenation: z^v z^w = z^{vw}.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Append a letter on the right (the new first-acting letter).
    pub fn append(&self, e: usize) -> Word {
        let mut v = self.0.clone();
        v.push(e as u16);
        Word(v)
    }

    /// Prepend a letter on the left (the new last-acting letter).
    pub fn prepend(&self, e: usize) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(e as u16);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// Transpose e_N ... e_1 -> e_1 ... e_N.
    pub fn transpose(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    /// w e^{-1}: strip the rightmost letter when it equals e, otherwise
    /// undefined.
    pub fn strip_right(&self, e: usize) -> Option<Word> {
        match self.0.split_last() {
            Some((&last, rest)) if last as usize == e => Some(Word(rest.to_vec())),
            _ => None,
        }
    }

    /// e^{-1} w: strip the leftmost letter when it equals e, otherwise
    /// undefined.
    pub fn strip_left(&self, e: usize) -> Option<Word> {
        match self.0.split_first() {
            Some((&first, rest)) if first as usize == e => Some(Word(rest.to_vec())),
            _ => None,
        }
    }

    pub fn leftmost(&self) -> Option<usize> {
        self.0.first().map(|&e| e as usize)
    }

    pub fn rightmost(&self) -> Option<usize> {
        self.0.last().map(|&e| e as usize)
    }

    /// All factorizations v = p q, leftmost split first.
    pub fn splits(&self) -> impl Iterator<Item = (Word, Word)> + '_ {
        (0..=self.0.len()).map(move |k| (Word(self.0[..k].to_vec()), Word(self.0[k..].to_vec())))
    }

    /// Letter counts (the image under abelianization).
    pub fn abelianize(&self, num_letters: usize) -> Vec<u32> {
        let mut counts = vec![0u32; num_letters];
        for &e in &self.0 {
            counts[e as usize] += 1;
        }
        counts
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}
