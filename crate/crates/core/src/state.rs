//! Fixed-width atom sets.
//!
//! States, sub-goals, preconditions and effects are all subsets of the same
//! universe `X`, so they share one representation: a bit vector whose width is
//! `|X|`. Keeping the width explicit makes complementation well defined, which
//! everything dual-related depends on.

use crate::atom::AtomId;
use std::fmt;

const WORD_BITS: usize = u64::BITS as usize;

/// A subset of a task's atom universe, as a fixed-width bit vector.
///
/// Invariant: bits at positions `>= width` are always zero, so equality and
/// hashing are structural and `complement` stays inside the universe.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    width: usize,
    words: Vec<u64>,
}

fn words_for(width: usize) -> usize {
    width.div_ceil(WORD_BITS)
}

impl StateSet {
    /// The empty subset of a universe with `width` atoms.
    pub fn empty(width: usize) -> Self {
        StateSet {
            width,
            words: vec![0; words_for(width)],
        }
    }

    /// The full universe of `width` atoms.
    pub fn full(width: usize) -> Self {
        let mut s = Self::empty(width);
        for w in &mut s.words {
            *w = !0;
        }
        s.mask_tail();
        s
    }

    pub fn from_ids<I: IntoIterator<Item = AtomId>>(width: usize, ids: I) -> Self {
        let mut s = Self::empty(width);
        for id in ids {
            s.insert(id);
        }
        s
    }

    /// Zeroes the unused bits of the last word.
    fn mask_tail(&mut self) {
        let used = self.width % WORD_BITS;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn insert(&mut self, id: AtomId) {
        assert!(id.index() < self.width, "atom {} out of width {}", id, self.width);
        self.words[id.index() / WORD_BITS] |= 1 << (id.index() % WORD_BITS);
    }

    pub fn remove(&mut self, id: AtomId) {
        assert!(id.index() < self.width, "atom {} out of width {}", id, self.width);
        self.words[id.index() / WORD_BITS] &= !(1 << (id.index() % WORD_BITS));
    }

    pub fn contains(&self, id: AtomId) -> bool {
        id.index() < self.width
            && self.words[id.index() / WORD_BITS] & (1 << (id.index() % WORD_BITS)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn check_width(&self, other: &Self) {
        assert_eq!(
            self.width, other.width,
            "state set width mismatch: {} vs {}",
            self.width, other.width
        );
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &Self) -> bool {
        self.check_width(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// `self ∩ other = ∅`.
    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.check_width(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !self.is_disjoint(other)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.check_width(other);
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.check_width(other);
        self.zip_with(other, |a, b| a & b)
    }

    /// `self \ other`.
    pub fn difference(&self, other: &Self) -> Self {
        self.check_width(other);
        self.zip_with(other, |a, b| a & !b)
    }

    /// `X \ self` for the universe of this set's width.
    pub fn complement(&self) -> Self {
        let mut out = StateSet {
            width: self.width,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.mask_tail();
        out
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        StateSet {
            width: self.width,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Member atoms in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(AtomId((wi * WORD_BITS + b) as u32))
            })
        })
    }

    /// The set's members as a bit mask. Only valid for widths up to 64.
    pub fn as_mask(&self) -> u64 {
        assert!(self.width <= WORD_BITS, "mask form needs width <= 64");
        self.words.first().copied().unwrap_or(0)
    }

    /// Builds a set from a bit mask. Only valid for widths up to 64.
    pub fn from_mask(width: usize, mask: u64) -> Self {
        assert!(width <= WORD_BITS, "mask form needs width <= 64");
        let mut s = Self::empty(width);
        if !s.words.is_empty() {
            s.words[0] = mask;
            s.mask_tail();
        }
        s
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", id.0)?;
        }
        write!(f, "}}/{}", self.width)
    }
}
