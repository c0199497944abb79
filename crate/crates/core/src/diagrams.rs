//! Pairings and set partitions of the positions of a colored word.
//!
//! Positions are 0-based internally and 1-based in every text or JSON form
//! (`[[1,2],[3,4]]`).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Pow;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact_linalg::ExactMatrix;
use crate::limits::Limits;
use crate::words::{ColoredWord, Dimension};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("blocks do not partition the {len} positions of the word: {reason}")]
    NotAPartition { len: usize, reason: String },
    #[error("block {block:?} has size {size}, expected a pairing")]
    NotAPairing { block: Vec<usize>, size: usize },
    #[error("diagrams live on different words ({left} vs {right})")]
    WordMismatch {
        left: ColoredWord,
        right: ColoredWord,
    },
    #[error("word of length {len} exceeds the length cap {cap}")]
    WordTooLong { len: usize, cap: usize },
    #[error("unknown diagram family {0:?}")]
    UnknownFamily(String),
}

/// A set partition of the positions of `word`, stored canonically: elements
/// sorted within blocks and blocks sorted by their minimum.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagram {
    blocks: Vec<Vec<usize>>,
    word: ColoredWord,
}

impl Diagram {
    /// Builds a diagram from 0-based blocks, canonicalizing their order.
    pub fn new(word: ColoredWord, mut blocks: Vec<Vec<usize>>) -> Result<Self, DiagramError> {
        let len = word.len();
        let bad = |reason: String| DiagramError::NotAPartition { len, reason };
        let mut seen = vec![false; len];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(bad("empty block".into()));
            }
            block.sort_unstable();
            for &p in block.iter() {
                if p >= len {
                    return Err(bad(format!("position {} out of range", p + 1)));
                }
                if std::mem::replace(&mut seen[p], true) {
                    return Err(bad(format!("position {} appears twice", p + 1)));
                }
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(bad(format!("position {} is not covered", p + 1)));
        }
        blocks.sort_unstable();
        Ok(Diagram { blocks, word })
    }

    /// Same as [`Diagram::new`] but with 1-based positions.
    pub fn from_one_based(word: ColoredWord, blocks: &[&[usize]]) -> Result<Self, DiagramError> {
        let blocks = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&p| {
                        p.checked_sub(1).ok_or_else(|| DiagramError::NotAPartition {
                            len: word.len(),
                            reason: "position 0 in 1-based input".into(),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Diagram::new(word, blocks)
    }

    fn from_pairs(word: &ColoredWord, pairs: Vec<(usize, usize)>) -> Self {
        let mut blocks: Vec<Vec<usize>> = pairs.into_iter().map(|(a, b)| vec![a, b]).collect();
        blocks.sort_unstable();
        Diagram {
            blocks,
            word: word.clone(),
        }
    }

    pub fn word(&self) -> &ColoredWord {
        &self.word
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// 1-based block lists, the serialized form.
    pub fn one_based_blocks(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|p| p + 1).collect())
            .collect()
    }

    pub fn is_pairing(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 2)
    }

    /// Block index of each position.
    pub fn block_labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.word.len()];
        for (i, block) in self.blocks.iter().enumerate() {
            for &p in block {
                labels[p] = i;
            }
        }
        labels
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, p) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Diagram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.one_based_blocks().serialize(serializer)
    }
}

/// True iff no `a < b < c < d` has `a, c` in one block and `b, d` in another.
pub fn is_noncrossing(d: &Diagram) -> bool {
    let labels = d.block_labels();
    let k = labels.len();
    for a in 0..k {
        for b in a + 1..k {
            if labels[b] == labels[a] {
                continue;
            }
            for c in b + 1..k {
                if labels[c] != labels[a] {
                    continue;
                }
                if (c + 1..k).any(|dd| labels[dd] == labels[b]) {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff every block joins a `V` position to a `V*` position.
pub fn is_matched(d: &Diagram) -> Result<bool, DiagramError> {
    let mut matched = true;
    for block in &d.blocks {
        if block.len() != 2 {
            return Err(DiagramError::NotAPairing {
                block: block.iter().map(|p| p + 1).collect(),
                size: block.len(),
            });
        }
        matched &= d.word.get(block[0]) != d.word.get(block[1]);
    }
    Ok(matched)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagramFamily {
    AllPairings,
    NCPairings,
    MatchedPairings,
    NCMatchedPairings,
    AllPartitions,
    NCPartitions,
}

impl DiagramFamily {
    pub const ALL: [DiagramFamily; 6] = [
        DiagramFamily::AllPairings,
        DiagramFamily::NCPairings,
        DiagramFamily::MatchedPairings,
        DiagramFamily::NCMatchedPairings,
        DiagramFamily::AllPartitions,
        DiagramFamily::NCPartitions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DiagramFamily::AllPairings => "all-pairings",
            DiagramFamily::NCPairings => "nc-pairings",
            DiagramFamily::MatchedPairings => "matched",
            DiagramFamily::NCMatchedPairings => "nc-matched",
            DiagramFamily::AllPartitions => "all-partitions",
            DiagramFamily::NCPartitions => "nc-partitions",
        }
    }

    pub fn is_pairing_family(self) -> bool {
        !matches!(
            self,
            DiagramFamily::AllPartitions | DiagramFamily::NCPartitions
        )
    }

    pub fn respects_colors(self) -> bool {
        matches!(
            self,
            DiagramFamily::MatchedPairings | DiagramFamily::NCMatchedPairings
        )
    }
}

impl fmt::Display for DiagramFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DiagramFamily {
    type Err = DiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "matched-pairings" => Ok(DiagramFamily::MatchedPairings),
            "nc-matched-pairings" => Ok(DiagramFamily::NCMatchedPairings),
            _ => DiagramFamily::ALL
                .into_iter()
                .find(|f| f.name() == s)
                .ok_or_else(|| DiagramError::UnknownFamily(s.to_string())),
        }
    }
}

impl Serialize for DiagramFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Every diagram of `family` on `w`, canonically sorted.
pub fn enumerate(
    family: DiagramFamily,
    w: &ColoredWord,
    limits: &Limits,
) -> Result<Vec<Diagram>, DiagramError> {
    if w.len() > limits.max_word_len {
        return Err(DiagramError::WordTooLong {
            len: w.len(),
            cap: limits.max_word_len,
        });
    }
    let positions: Vec<usize> = (0..w.len()).collect();
    let mut out: Vec<Diagram> = match family {
        DiagramFamily::AllPairings | DiagramFamily::MatchedPairings => {
            if w.len() % 2 == 1 || (family.respects_colors() && w.balance() != 0) {
                return Ok(Vec::new());
            }
            all_pairings(&positions, w, family.respects_colors())
                .into_iter()
                .map(|pairs| Diagram::from_pairs(w, pairs))
                .collect()
        }
        DiagramFamily::NCPairings | DiagramFamily::NCMatchedPairings => {
            if w.len() % 2 == 1 || (family.respects_colors() && w.balance() != 0) {
                return Ok(Vec::new());
            }
            nc_pairings(&positions, w, family.respects_colors())
                .into_iter()
                .map(|pairs| Diagram::from_pairs(w, pairs))
                .collect()
        }
        DiagramFamily::AllPartitions => all_partitions(w.len())
            .into_iter()
            .map(|blocks| Diagram::new(w.clone(), blocks).expect("valid partition"))
            .collect(),
        DiagramFamily::NCPartitions => nc_partitions(&positions)
            .into_iter()
            .map(|blocks| Diagram::new(w.clone(), blocks).expect("valid partition"))
            .collect(),
    };
    out.sort_unstable();
    Ok(out)
}

fn admissible(w: &ColoredWord, a: usize, b: usize, matched: bool) -> bool {
    !matched || w.get(a) != w.get(b)
}

/// Non-crossing pairings: the first point pairs with a point at odd offset,
/// splitting the rest into an inner and an outer arc.
fn nc_pairings(pos: &[usize], w: &ColoredWord, matched: bool) -> Vec<Vec<(usize, usize)>> {
    if pos.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for j in (1..pos.len()).step_by(2) {
        if !admissible(w, pos[0], pos[j], matched) {
            continue;
        }
        let inner = nc_pairings(&pos[1..j], w, matched);
        if inner.is_empty() {
            continue;
        }
        let outer = nc_pairings(&pos[j + 1..], w, matched);
        for a in &inner {
            for b in &outer {
                let mut pairs = Vec::with_capacity(pos.len() / 2);
                pairs.push((pos[0], pos[j]));
                pairs.extend_from_slice(a);
                pairs.extend_from_slice(b);
                out.push(pairs);
            }
        }
    }
    out
}

fn all_pairings(pos: &[usize], w: &ColoredWord, matched: bool) -> Vec<Vec<(usize, usize)>> {
    if pos.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for j in 1..pos.len() {
        if !admissible(w, pos[0], pos[j], matched) {
            continue;
        }
        let rest: Vec<usize> = pos[1..].iter().copied().filter(|&p| p != pos[j]).collect();
        for mut pairs in all_pairings(&rest, w, matched) {
            pairs.push((pos[0], pos[j]));
            out.push(pairs);
        }
    }
    out
}

/// Set partitions of `0..k` by restricted growth.
fn all_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::<Vec<usize>>::new()];
    for p in 0..k {
        let mut next = Vec::new();
        for blocks in &out {
            for i in 0..blocks.len() {
                let mut b = blocks.clone();
                b[i].push(p);
                next.push(b);
            }
            let mut b = blocks.clone();
            b.push(vec![p]);
            next.push(b);
        }
        out = next;
    }
    out
}

/// Non-crossing partitions: choose the block of the first point; the gaps
/// between consecutive elements of that block are partitioned independently.
fn nc_partitions(pos: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if pos.is_empty() {
        return vec![Vec::new()];
    }
    let rest = &pos[1..];
    let mut out = Vec::new();
    for mask in 0..1usize << rest.len() {
        let mut block = vec![pos[0]];
        let mut gaps: Vec<&[usize]> = Vec::new();
        let mut gap_start = 0;
        for (i, &p) in rest.iter().enumerate() {
            if mask >> i & 1 == 1 {
                block.push(p);
                gaps.push(&rest[gap_start..i]);
                gap_start = i + 1;
            }
        }
        gaps.push(&rest[gap_start..]);
        let mut partial: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for gap in gaps {
            let sub = nc_partitions(gap);
            partial = partial
                .iter()
                .flat_map(|acc| {
                    sub.iter().map(move |s| {
                        let mut a = acc.clone();
                        a.extend(s.iter().cloned());
                        a
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

fn ensure_same_word(p: &Diagram, q: &Diagram) -> Result<(), DiagramError> {
    if p.word != q.word {
        return Err(DiagramError::WordMismatch {
            left: p.word.clone(),
            right: q.word.clone(),
        });
    }
    Ok(())
}

/// Connected components of the union of the two block structures.
pub fn loop_count(p: &Diagram, q: &Diagram) -> Result<usize, DiagramError> {
    ensure_same_word(p, q)?;
    let k = p.word.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = k;
    for block in p.blocks.iter().chain(q.blocks.iter()) {
        for pair in block.windows(2) {
            let (a, b) = (find(&mut parent, pair[0]), find(&mut parent, pair[1]));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
    }
    Ok(components)
}

/// Entry `(i, j)` is `N^{loop_count(d_i, d_j)}`.
pub fn gram_matrix(diagrams: &[Diagram], n: Dimension) -> Result<ExactMatrix, DiagramError> {
    if let Some(first) = diagrams.first() {
        for d in diagrams {
            ensure_same_word(first, d)?;
        }
    }
    let base = BigInt::from(n.get());
    let m = diagrams.len();
    let mut rows = vec![vec![BigInt::from(0); m]; m];
    for i in 0..m {
        for j in i..m {
            let loops = loop_count(&diagrams[i], &diagrams[j])?;
            let entry = Pow::pow(&base, loops);
            rows[j][i] = entry.clone();
            rows[i][j] = entry;
        }
    }
    Ok(ExactMatrix::from_integers(rows))
}
