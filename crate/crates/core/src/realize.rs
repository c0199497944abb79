//! Explicit invariant tensors in `(ℂ^N)^{⊗k}`.
//!
//! A diagram `π` is realized as `T_π = Σ e_{i₁} ⊗ ⋯ ⊗ e_{i_k}` over the
//! multi-indices constant on every block of `π`. Multi-index values are
//! 1-based (`1..=N`) everywhere.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::diagrams::Diagram;
use crate::limits::{bounded_pow, Limits};
use crate::words::{Color, ColoredWord, Dimension};

pub type MultiIndex = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("word {word} at N = {n} needs more than {bound} tensor entries")]
    TooLarge {
        word: ColoredWord,
        n: Dimension,
        bound: usize,
    },
    #[error("multi-index {index:?} does not fit word {word} at N = {n}")]
    BadIndex {
        index: MultiIndex,
        word: ColoredWord,
        n: Dimension,
    },
    #[error("dimension mismatch: expected N = {expected}, got N = {got}")]
    DimensionMismatch { expected: u32, got: u32 },
    #[error("tensor lives on {got}, but the slot assignment leaves {expected}")]
    WordMismatch {
        expected: ColoredWord,
        got: ColoredWord,
    },
    #[error("slot {slot} is outside a word of length {len}")]
    SlotOutOfRange { slot: usize, len: usize },
}

/// Exact-integer tensor stored by multi-index, without explicit zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseTensor {
    word: ColoredWord,
    n: Dimension,
    entries: BTreeMap<MultiIndex, BigInt>,
}

impl SparseTensor {
    pub fn zero(word: ColoredWord, n: Dimension) -> Self {
        SparseTensor {
            word,
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries(
        word: ColoredWord,
        n: Dimension,
        entries: impl IntoIterator<Item = (MultiIndex, BigInt)>,
    ) -> Result<Self, RealizeError> {
        let mut t = SparseTensor::zero(word, n);
        for (index, coef) in entries {
            t.check_index(&index)?;
            let slot = t.entries.entry(index).or_insert_with(BigInt::zero);
            *slot += coef;
        }
        t.entries.retain(|_, v| !v.is_zero());
        Ok(t)
    }

    pub fn basis_vector(
        word: ColoredWord,
        n: Dimension,
        index: MultiIndex,
    ) -> Result<Self, RealizeError> {
        Self::from_entries(word, n, [(index, BigInt::from(1))])
    }

    fn check_index(&self, index: &MultiIndex) -> Result<(), RealizeError> {
        let ok = index.len() == self.word.len()
            && index.iter().all(|&i| (1..=self.n.get()).contains(&i));
        if ok {
            Ok(())
        } else {
            Err(RealizeError::BadIndex {
                index: index.clone(),
                word: self.word.clone(),
                n: self.n,
            })
        }
    }

    pub fn word(&self) -> &ColoredWord {
        &self.word
    }

    pub fn n(&self) -> Dimension {
        self.n
    }

    pub fn entries(&self) -> &BTreeMap<MultiIndex, BigInt> {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: &[u32]) -> BigInt {
        self.entries
            .get(index)
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Standard (real) inner product; `None` if the ambients differ.
    pub fn inner_product(&self, other: &SparseTensor) -> Option<BigInt> {
        if self.word != other.word || self.n != other.n {
            return None;
        }
        let (small, large) = if self.entries.len() <= other.entries.len() {
            (self, other)
        } else {
            (other, self)
        };
        Some(
            small
                .entries
                .iter()
                .filter_map(|(k, v)| large.entries.get(k).map(|w| v * w))
                .sum(),
        )
    }

    pub fn scaled(&self, c: &BigInt) -> SparseTensor {
        if c.is_zero() {
            return SparseTensor::zero(self.word.clone(), self.n);
        }
        SparseTensor {
            word: self.word.clone(),
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), v * c))
                .collect(),
        }
    }

    /// `self + c · other`. Panics on an ambient mismatch.
    pub fn add_scaled(mut self, other: &SparseTensor, c: &BigInt) -> SparseTensor {
        assert!(
            self.word == other.word && self.n == other.n,
            "ambient mismatch"
        );
        for (k, v) in &other.entries {
            let slot = self.entries.entry(k.clone()).or_insert_with(BigInt::zero);
            *slot += v * c;
        }
        self.entries.retain(|_, v| !v.is_zero());
        self
    }

    /// Relabel coordinates: index value `i` becomes `perm[i − 1]`.
    pub fn permuted(&self, perm: &[u32]) -> SparseTensor {
        assert_eq!(perm.len(), self.n.as_usize());
        SparseTensor {
            word: self.word.clone(),
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (k.iter().map(|&i| perm[i as usize - 1]).collect(), v.clone()))
                .collect(),
        }
    }
}

/// Serialized as `[[multi-index, coefficient], ...]` in lexicographic
/// order; coefficients outside the `i64` range are written as strings.
impl Serialize for SparseTensor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.entries.len()))?;
        for (index, coef) in &self.entries {
            match coef.to_i64() {
                Some(c) => seq.serialize_element(&(index, c))?,
                None => seq.serialize_element(&(index, coef.to_string()))?,
            }
        }
        seq.end()
    }
}

/// Calls `f` on every tuple in `{1..=n}^len`, lexicographically.
fn for_each_tuple(len: usize, n: u32, mut f: impl FnMut(&[u32])) {
    let mut t = vec![1u32; len];
    loop {
        f(&t);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if t[i] < n {
                t[i] += 1;
                break;
            }
            t[i] = 1;
        }
    }
}

/// The tensor of `d`: coefficient 1 on every multi-index constant on each
/// block, so `N^{#blocks}` stored entries.
pub fn realize_diagram(
    d: &Diagram,
    n: Dimension,
    limits: &Limits,
) -> Result<SparseTensor, RealizeError> {
    let too_large = || RealizeError::TooLarge {
        word: d.word().clone(),
        n,
        bound: limits.max_entries,
    };
    bounded_pow(n.as_usize(), d.num_blocks(), limits.max_entries).ok_or_else(too_large)?;
    let labels = d.block_labels();
    let mut entries = BTreeMap::new();
    for_each_tuple(d.num_blocks(), n.get(), |values| {
        let index: MultiIndex = labels.iter().map(|&b| values[b]).collect();
        entries.insert(index, BigInt::from(1));
    });
    Ok(SparseTensor {
        word: d.word().clone(),
        n,
        entries,
    })
}

/// Positions of a word that receive the distinguished vector `e` (or `e*`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotAssignment {
    word: ColoredWord,
    slots: BTreeSet<usize>,
}

impl SlotAssignment {
    /// `slots` are 0-based positions of `word`.
    pub fn new(word: ColoredWord, slots: BTreeSet<usize>) -> Result<Self, RealizeError> {
        if let Some(&slot) = slots.iter().find(|&&s| s >= word.len()) {
            return Err(RealizeError::SlotOutOfRange {
                slot,
                len: word.len(),
            });
        }
        Ok(SlotAssignment { word, slots })
    }

    /// Every slot set of `word`, ordered by bitmask.
    pub fn all(word: &ColoredWord) -> Vec<SlotAssignment> {
        (0..1usize << word.len())
            .map(|mask| SlotAssignment {
                word: word.clone(),
                slots: (0..word.len()).filter(|i| mask >> i & 1 == 1).collect(),
            })
            .collect()
    }

    pub fn word(&self) -> &ColoredWord {
        &self.word
    }

    pub fn slots(&self) -> &BTreeSet<usize> {
        &self.slots
    }

    pub fn remainder_positions(&self) -> Vec<usize> {
        (0..self.word.len())
            .filter(|p| !self.slots.contains(p))
            .collect()
    }

    /// The colored subword left after deleting the slots.
    pub fn remainder(&self) -> ColoredWord {
        self.word.subword(self.remainder_positions())
    }
}

/// Embeds a tensor over `W = span(e₁..e_{N−1})` on the remainder word into
/// the full word, placing `e = e_N` (or `e_N*`) in every slot.
pub fn insertion_psi(
    v: &SparseTensor,
    assignment: &SlotAssignment,
    n: Dimension,
) -> Result<SparseTensor, RealizeError> {
    if v.n.get() + 1 != n.get() {
        return Err(RealizeError::DimensionMismatch {
            expected: n.get().saturating_sub(1),
            got: v.n.get(),
        });
    }
    let remainder = assignment.remainder();
    if v.word != remainder {
        return Err(RealizeError::WordMismatch {
            expected: remainder,
            got: v.word.clone(),
        });
    }
    let len = assignment.word.len();
    let entries = v
        .entries
        .iter()
        .map(|(index, coef)| {
            let mut inner = index.iter();
            let full: MultiIndex = (0..len)
                .map(|p| {
                    if assignment.slots.contains(&p) {
                        n.get()
                    } else {
                        *inner.next().expect("remainder length matches")
                    }
                })
                .collect();
            (full, coef.clone())
        })
        .collect();
    Ok(SparseTensor {
        word: assignment.word.clone(),
        n,
        entries,
    })
}

/// The diagonal quotient whose fixed vectors are coordinate tensors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TorusKind {
    /// Free group `F_N`: plain letters `g_i`, star letters `g_i^{-1}`.
    FreeGroup,
    /// Free product of `N` copies of `ℤ₂`; colors are irrelevant.
    FreeZ2,
    /// `ℤ^N`, the classical maximal torus of `U_N`.
    AbelianZ,
}

/// A generator with an exponent sign.
pub type Letter = (u32, bool);

fn letter(c: Color, i: u32) -> Letter {
    (i, c == Color::Plain)
}

/// Push `l` onto a freely reduced word, cancelling against the top.
pub fn push_free(stack: &mut Vec<Letter>, l: Letter) {
    match stack.last() {
        Some(&(g, s)) if g == l.0 && s != l.1 => {
            stack.pop();
        }
        _ => stack.push(l),
    }
}

/// Push a `ℤ₂` generator, cancelling `g g = e`.
pub fn push_z2(stack: &mut Vec<u32>, g: u32) {
    if stack.last() == Some(&g) {
        stack.pop();
    } else {
        stack.push(g);
    }
}

/// Multi-indices whose group word reduces to the identity, in lexicographic
/// order. These coordinate tensors span the torus-fixed space.
pub fn torus_fixed_basis(kind: TorusKind, w: &ColoredWord, n: Dimension) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut index = Vec::with_capacity(w.len());
    match kind {
        TorusKind::FreeGroup => dfs_free(w, n.get(), &mut index, &[], &mut out),
        TorusKind::FreeZ2 => dfs_z2(w.len(), n.get(), &mut index, &[], &mut out),
        TorusKind::AbelianZ => {
            let mut exps = vec![0i64; n.as_usize()];
            dfs_abelian(w, n.get(), &mut index, &mut exps, &mut out)
        }
    }
    out
}

fn dfs_free(
    w: &ColoredWord,
    n: u32,
    index: &mut MultiIndex,
    stack: &[Letter],
    out: &mut Vec<MultiIndex>,
) {
    let pos = index.len();
    if stack.len() > w.len() - pos {
        return;
    }
    if pos == w.len() {
        out.push(index.clone());
        return;
    }
    let color = w.letters()[pos];
    for i in 1..=n {
        let mut next = stack.to_vec();
        push_free(&mut next, letter(color, i));
        index.push(i);
        dfs_free(w, n, index, &next, out);
        index.pop();
    }
}

fn dfs_z2(
    len: usize,
    n: u32,
    index: &mut MultiIndex,
    stack: &[u32],
    out: &mut Vec<MultiIndex>,
) {
    let pos = index.len();
    if stack.len() > len - pos {
        return;
    }
    if pos == len {
        out.push(index.clone());
        return;
    }
    for i in 1..=n {
        let mut next = stack.to_vec();
        push_z2(&mut next, i);
        index.push(i);
        dfs_z2(len, n, index, &next, out);
        index.pop();
    }
}

fn dfs_abelian(
    w: &ColoredWord,
    n: u32,
    index: &mut MultiIndex,
    exps: &mut Vec<i64>,
    out: &mut Vec<MultiIndex>,
) {
    let pos = index.len();
    let outstanding: u64 = exps.iter().map(|e| e.unsigned_abs()).sum();
    if outstanding > (w.len() - pos) as u64 {
        return;
    }
    if pos == w.len() {
        out.push(index.clone());
        return;
    }
    let step = match w.letters()[pos] {
        Color::Plain => 1,
        Color::Star => -1,
    };
    for i in 1..=n {
        exps[i as usize - 1] += step;
        index.push(i);
        dfs_abelian(w, n, index, exps, out);
        index.pop();
        exps[i as usize - 1] -= step;
    }
}
