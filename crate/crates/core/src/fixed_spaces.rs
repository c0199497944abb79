//! Fixed-point spaces `Fix_G(V^w)` for classical groups, free quantum
//! groups, their diagonal tori, and `U⁺_{N−1}` embedded in `U⁺_N`.
//!
//! Diagram-spanned families come from the first fundamental theorem
//! (classical) and its non-crossing analogue (free). The classical and
//! abelian-torus families can also be computed from scratch as joint kernels
//! of Lie algebra generators, see [`lie_kernel_oracle`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::diagrams::{enumerate, DiagramError, DiagramFamily};
use crate::exact_linalg::{Echelon, LinalgError, SparseRow, SubspaceBasis};
use crate::limits::{bounded_pow, Limits};
use crate::realize::{
    insertion_psi, realize_diagram, torus_fixed_basis, MultiIndex, RealizeError, SlotAssignment,
    SparseTensor, TorusKind,
};
use crate::words::{Color, ColoredWord, Dimension};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FixedSpaceError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("embedded-free-u-lower needs N >= 3, got N = {0}")]
    LowerRankTooSmall(Dimension),
    #[error("{0} has no Lie algebra oracle (classical-u, classical-o, torus-abelian only)")]
    NoOracle(GroupFamily),
    #[error("word of length {len} exceeds the length cap {cap}")]
    WordTooLong { len: usize, cap: usize },
    #[error("unknown group family {0:?}")]
    UnknownFamily(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupFamily {
    ClassicalU,
    ClassicalO,
    ClassicalS,
    FreeU,
    FreeO,
    FreeS,
    TorusAbelian,
    TorusFreeGroup,
    TorusFreeZ2,
    /// `U⁺_{N−1}` acting on `span(e₁..e_{N−1})`, fixing `e_N`.
    EmbeddedFreeULower,
}

impl GroupFamily {
    pub const ALL: [GroupFamily; 10] = [
        GroupFamily::ClassicalU,
        GroupFamily::ClassicalO,
        GroupFamily::ClassicalS,
        GroupFamily::FreeU,
        GroupFamily::FreeO,
        GroupFamily::FreeS,
        GroupFamily::TorusAbelian,
        GroupFamily::TorusFreeGroup,
        GroupFamily::TorusFreeZ2,
        GroupFamily::EmbeddedFreeULower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GroupFamily::ClassicalU => "classical-u",
            GroupFamily::ClassicalO => "classical-o",
            GroupFamily::ClassicalS => "classical-s",
            GroupFamily::FreeU => "free-u",
            GroupFamily::FreeO => "free-o",
            GroupFamily::FreeS => "free-s",
            GroupFamily::TorusAbelian => "torus-abelian",
            GroupFamily::TorusFreeGroup => "torus-free-group",
            GroupFamily::TorusFreeZ2 => "torus-z2",
            GroupFamily::EmbeddedFreeULower => "embedded-free-u-lower",
        }
    }

    /// Families whose fundamental representation is self-dual, so only
    /// uncolored words are meaningful targets.
    pub fn is_self_dual(self) -> bool {
        matches!(
            self,
            GroupFamily::ClassicalO
                | GroupFamily::ClassicalS
                | GroupFamily::FreeO
                | GroupFamily::FreeS
                | GroupFamily::TorusFreeZ2
        )
    }

    fn diagram_family(self) -> Option<DiagramFamily> {
        match self {
            GroupFamily::ClassicalU => Some(DiagramFamily::MatchedPairings),
            GroupFamily::ClassicalO => Some(DiagramFamily::AllPairings),
            GroupFamily::ClassicalS => Some(DiagramFamily::AllPartitions),
            GroupFamily::FreeU => Some(DiagramFamily::NCMatchedPairings),
            GroupFamily::FreeO => Some(DiagramFamily::NCPairings),
            GroupFamily::FreeS => Some(DiagramFamily::NCPartitions),
            _ => None,
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupFamily {
    type Err = FixedSpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GroupFamily::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| FixedSpaceError::UnknownFamily(s.to_string()))
    }
}

impl Serialize for GroupFamily {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

/// `(group, subgroup)` pairs: the subgroup's fixed space contains the
/// group's on every word.
pub const SUBGROUP_RELATIONS: [(GroupFamily, GroupFamily); 13] = [
    (GroupFamily::FreeU, GroupFamily::ClassicalU),
    (GroupFamily::FreeU, GroupFamily::FreeO),
    (GroupFamily::FreeU, GroupFamily::TorusFreeGroup),
    (GroupFamily::FreeU, GroupFamily::EmbeddedFreeULower),
    (GroupFamily::ClassicalU, GroupFamily::ClassicalO),
    (GroupFamily::ClassicalU, GroupFamily::TorusAbelian),
    (GroupFamily::TorusFreeGroup, GroupFamily::TorusAbelian),
    (GroupFamily::TorusFreeGroup, GroupFamily::TorusFreeZ2),
    (GroupFamily::FreeO, GroupFamily::ClassicalO),
    (GroupFamily::FreeO, GroupFamily::FreeS),
    (GroupFamily::FreeO, GroupFamily::TorusFreeZ2),
    (GroupFamily::FreeS, GroupFamily::ClassicalS),
    (GroupFamily::ClassicalO, GroupFamily::ClassicalS),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GroupSpec {
    pub family: GroupFamily,
    #[serde(rename = "N")]
    pub n: Dimension,
}

impl GroupSpec {
    pub fn new(family: GroupFamily, n: Dimension) -> Result<Self, FixedSpaceError> {
        if family == GroupFamily::EmbeddedFreeULower && n.get() < 3 {
            return Err(FixedSpaceError::LowerRankTooSmall(n));
        }
        Ok(GroupSpec { family, n })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(N={})", self.family, self.n)
    }
}

fn realize_family(
    family: DiagramFamily,
    w: &ColoredWord,
    n: Dimension,
    limits: &Limits,
) -> Result<Vec<SparseTensor>, FixedSpaceError> {
    enumerate(family, w, limits)?
        .iter()
        .map(|d| realize_diagram(d, n, limits).map_err(FixedSpaceError::from))
        .collect()
}

fn check_len(w: &ColoredWord, limits: &Limits) -> Result<(), FixedSpaceError> {
    if w.len() > limits.max_word_len {
        return Err(FixedSpaceError::WordTooLong {
            len: w.len(),
            cap: limits.max_word_len,
        });
    }
    Ok(())
}

/// A spanning set of `Fix_G(V^w)`.
pub fn fixed_space(
    g: &GroupSpec,
    w: &ColoredWord,
    limits: &Limits,
) -> Result<SubspaceBasis, FixedSpaceError> {
    check_len(w, limits)?;
    let n = g.n;
    let vectors = if let Some(family) = g.family.diagram_family() {
        realize_family(family, w, n, limits)?
    } else {
        match g.family {
            GroupFamily::TorusAbelian => torus_vectors(TorusKind::AbelianZ, w, n)?,
            GroupFamily::TorusFreeGroup => torus_vectors(TorusKind::FreeGroup, w, n)?,
            GroupFamily::TorusFreeZ2 => torus_vectors(TorusKind::FreeZ2, w, n)?,
            GroupFamily::EmbeddedFreeULower => embedded_lower(w, n, limits)?,
            _ => unreachable!("diagram families handled above"),
        }
    };
    Ok(SubspaceBasis::new(w.clone(), n, vectors)?)
}

fn torus_vectors(
    kind: TorusKind,
    w: &ColoredWord,
    n: Dimension,
) -> Result<Vec<SparseTensor>, FixedSpaceError> {
    torus_fixed_basis(kind, w, n)
        .into_iter()
        .map(|idx| SparseTensor::basis_vector(w.clone(), n, idx).map_err(FixedSpaceError::from))
        .collect()
}

/// `V = W ⊕ ℂe_N` under `U⁺_{N−1}`: each slot set contributes the inserted
/// non-crossing matched pairings of the remaining subword at rank `N − 1`.
fn embedded_lower(
    w: &ColoredWord,
    n: Dimension,
    limits: &Limits,
) -> Result<Vec<SparseTensor>, FixedSpaceError> {
    let lower = n
        .lower()
        .filter(|l| l.get() >= 2)
        .ok_or(FixedSpaceError::LowerRankTooSmall(n))?;
    let mut out = Vec::new();
    for assignment in SlotAssignment::all(w) {
        for v in realize_family(
            DiagramFamily::NCMatchedPairings,
            &assignment.remainder(),
            lower,
            limits,
        )? {
            out.push(insertion_psi(&v, &assignment, n)?);
        }
    }
    Ok(out)
}

/// Linear coordinate of a 1-based multi-index.
fn linear(index: &[u32], n: u32) -> usize {
    index
        .iter()
        .fold(0usize, |acc, &i| acc * n as usize + (i as usize - 1))
}

fn unlinear(mut col: usize, len: usize, n: u32) -> MultiIndex {
    let mut index = vec![0u32; len];
    for slot in index.iter_mut().rev() {
        *slot = (col % n as usize) as u32 + 1;
        col /= n as usize;
    }
    index
}

/// Sparse `N × N` matrix as `(row, col, coefficient)`, 1-based.
type Generator = Vec<(u32, u32, i64)>;

fn lie_generators(family: GroupFamily, n: u32) -> Result<Vec<Generator>, FixedSpaceError> {
    let mut gens = Vec::new();
    match family {
        GroupFamily::ClassicalU => {
            for a in 1..=n {
                for b in 1..=n {
                    gens.push(vec![(a, b, 1)]);
                }
            }
        }
        GroupFamily::ClassicalO => {
            for a in 1..=n {
                for b in a + 1..=n {
                    gens.push(vec![(a, b, 1), (b, a, -1)]);
                }
            }
        }
        GroupFamily::TorusAbelian => {
            for a in 1..=n {
                gens.push(vec![(a, a, 1)]);
            }
        }
        other => return Err(FixedSpaceError::NoOracle(other)),
    }
    Ok(gens)
}

/// Rows of the operator `Σ_p X_p` on `V^w`, where `X_p` is `X` on a plain
/// factor and `−Xᵀ` on a star factor.
fn operator_rows(gen: &Generator, w: &ColoredWord, n: u32, ambient: usize) -> Vec<SparseRow> {
    let mut rows: std::collections::BTreeMap<usize, std::collections::BTreeMap<usize, i64>> =
        Default::default();
    for col in 0..ambient {
        let index = unlinear(col, w.len(), n);
        for (p, color) in w.letters().iter().enumerate() {
            for &(r, c, x) in gen {
                let (from, to, coef) = match color {
                    Color::Plain => (c, r, x),
                    Color::Star => (r, c, -x),
                };
                if index[p] != from {
                    continue;
                }
                let mut image = index.clone();
                image[p] = to;
                *rows
                    .entry(linear(&image, n))
                    .or_default()
                    .entry(col)
                    .or_default() += coef;
            }
        }
    }
    rows.into_values()
        .map(|row| {
            row.into_iter()
                .filter(|&(_, v)| v != 0)
                .map(|(c, v)| (c, BigInt::from(v)))
                .collect::<SparseRow>()
        })
        .filter(|r| !r.is_empty())
        .collect()
}

fn kernel_space(
    g: &GroupSpec,
    w: &ColoredWord,
    limits: &Limits,
    with_reflection: bool,
) -> Result<SubspaceBasis, FixedSpaceError> {
    check_len(w, limits)?;
    let n = g.n.get();
    let gens = lie_generators(g.family, n)?;
    let ambient = bounded_pow(n as usize, w.len(), limits.max_entries).ok_or_else(|| {
        RealizeError::TooLarge {
            word: w.clone(),
            n: g.n,
            bound: limits.max_entries,
        }
    })?;
    let mut ech = Echelon::new();
    for gen in &gens {
        for row in operator_rows(gen, w, n, ambient) {
            ech.insert(row);
        }
    }
    if with_reflection && g.family == GroupFamily::ClassicalO {
        // diag(−1, 1, …, 1) acts by (−1)^{#factors with index 1}; invariance
        // kills every coordinate where that count is odd.
        for col in 0..ambient {
            let ones = unlinear(col, w.len(), n)
                .iter()
                .filter(|&&i| i == 1)
                .count();
            if ones % 2 == 1 {
                ech.insert(vec![(col, BigInt::from(1))]);
            }
        }
    }
    let vectors = ech
        .kernel(ambient)
        .into_iter()
        .map(|row| {
            SparseTensor::from_entries(
                w.clone(),
                g.n,
                row.into_iter()
                    .map(|(col, x)| (unlinear(col, w.len(), n), x)),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SubspaceBasis::new(w.clone(), g.n, vectors)?)
}

/// `Fix_G(V^w)` computed from scratch as the joint kernel of the Lie
/// algebra of `G` (all `E_ab` for `U_N`, `E_ab − E_ba` for `O_N`, `E_aa`
/// for the torus), plus the reflection `diag(−1, 1, …, 1)` for `O_N`,
/// which is disconnected.
pub fn lie_kernel_oracle(
    g: &GroupSpec,
    w: &ColoredWord,
    limits: &Limits,
) -> Result<SubspaceBasis, FixedSpaceError> {
    kernel_space(g, w, limits, true)
}

/// The Lie kernel alone: invariants of the identity component (`SO_N` for
/// the orthogonal family).
pub fn identity_component_kernel(
    g: &GroupSpec,
    w: &ColoredWord,
    limits: &Limits,
) -> Result<SubspaceBasis, FixedSpaceError> {
    kernel_space(g, w, limits, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::{contains, dim_span, is_subspace};

    fn w(s: &str) -> ColoredWord {
        s.parse().unwrap()
    }

    fn spec(family: GroupFamily, n: u32) -> GroupSpec {
        GroupSpec::new(family, Dimension::new(n).unwrap()).unwrap()
    }

    fn fix(family: GroupFamily, n: u32, word: &str) -> SubspaceBasis {
        fixed_space(&spec(family, n), &w(word), &Limits::default()).unwrap()
    }

    #[test]
    fn fixed_space_examples() {
        let f = fix(GroupFamily::FreeU, 2, "uUuU");
        assert_eq!((f.len(), dim_span(&f)), (2, 2));
        assert_eq!(fix(GroupFamily::FreeU, 2, "uuUU").len(), 1);
        let c = fix(GroupFamily::ClassicalU, 2, "uuUU");
        assert_eq!((c.len(), dim_span(&c)), (2, 2));
        let t = fix(GroupFamily::TorusFreeGroup, 2, "uuUU");
        assert_eq!(t.len(), 4);

        let e = fix(GroupFamily::EmbeddedFreeULower, 3, "uU");
        assert_eq!(dim_span(&e), 2);
        let sum_lower = SparseTensor::from_entries(
            w("uU"),
            Dimension::new(3).unwrap(),
            [(vec![1, 1], 1.into()), (vec![2, 2], 1.into())],
        )
        .unwrap();
        let corner =
            SparseTensor::basis_vector(w("uU"), Dimension::new(3).unwrap(), vec![3, 3]).unwrap();
        assert!(e.vectors().contains(&sum_lower));
        assert!(e.vectors().contains(&corner));
    }

    #[test]
    fn embedded_lower_needs_rank_three() {
        assert_eq!(
            GroupSpec::new(GroupFamily::EmbeddedFreeULower, Dimension::new(2).unwrap()),
            Err(FixedSpaceError::LowerRankTooSmall(
                Dimension::new(2).unwrap()
            ))
        );
    }

    #[test]
    fn oracle_examples() {
        let lim = Limits::default();
        let d =
            |f, n, word: &str| dim_span(&lie_kernel_oracle(&spec(f, n), &w(word), &lim).unwrap());
        assert_eq!(d(GroupFamily::ClassicalU, 2, "uU"), 1);
        assert_eq!(d(GroupFamily::ClassicalO, 3, "uuu"), 0);
        assert_eq!(d(GroupFamily::TorusAbelian, 2, "uu"), 0);
        let so3 =
            identity_component_kernel(&spec(GroupFamily::ClassicalO, 3), &w("uuu"), &lim).unwrap();
        assert_eq!(dim_span(&so3), 1);
        // The surviving SO₃ invariant is the Levi-Civita tensor.
        let eps = &so3.vectors()[0];
        assert_eq!(eps.entries().len(), 6);
        assert_eq!(eps.get(&[1, 2, 3]), -eps.get(&[2, 1, 3]));
    }

    #[test]
    fn oracle_rejects_non_classical_families() {
        for f in [
            GroupFamily::FreeU,
            GroupFamily::ClassicalS,
            GroupFamily::TorusFreeGroup,
        ] {
            assert_eq!(
                lie_kernel_oracle(&spec(f, 2), &w("uU"), &Limits::default()),
                Err(FixedSpaceError::NoOracle(f))
            );
        }
    }

    #[test]
    fn oracle_agrees_with_diagram_spanning_sets() {
        let lim = Limits::default();
        for n in 2..=3 {
            for len in 0..=4 {
                for word in ColoredWord::all_of_length(len) {
                    for f in [
                        GroupFamily::ClassicalU,
                        GroupFamily::ClassicalO,
                        GroupFamily::TorusAbelian,
                    ] {
                        let g = spec(f, n);
                        let fixed = fixed_space(&g, &word, &lim).unwrap();
                        let kernel = lie_kernel_oracle(&g, &word, &lim).unwrap();
                        assert_eq!(dim_span(&fixed), dim_span(&kernel), "{g} on {word}");
                        for v in fixed.vectors() {
                            assert!(contains(&kernel, v).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subgroup_containments_hold() {
        let lim = Limits::default();
        for n in 2..=3 {
            for len in 0..=5 {
                for word in ColoredWord::all_of_length(len) {
                    for (group, sub) in SUBGROUP_RELATIONS {
                        if sub == GroupFamily::EmbeddedFreeULower && n < 3 {
                            continue;
                        }
                        let big = fixed_space(&spec(group, n), &word, &lim).unwrap();
                        let small = fixed_space(&spec(sub, n), &word, &lim).unwrap();
                        assert!(
                            is_subspace(&big, &small).unwrap(),
                            "{group} vs {sub} on {word}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn free_torus_is_not_a_subgroup_of_the_orthogonal_group() {
        // Fix(O_N) ⊄ Fix(T⁺_N): the crossing pairing of four points has the
        // coordinate (1,2,1,2), and g₁g₂g₁g₂ ≠ e in ℤ₂ * ℤ₂.
        let o = fix(GroupFamily::ClassicalO, 2, "uuuu");
        let t = fix(GroupFamily::TorusFreeZ2, 2, "uuuu");
        assert!(!is_subspace(&o, &t).unwrap());
    }

    #[test]
    fn embedded_lower_slot_sets_are_independent() {
        let lim = Limits::default();
        for len in 0..=6 {
            for word in ColoredWord::all_of_length(len) {
                let e = fix(GroupFamily::EmbeddedFreeULower, 3, &word.to_string());
                let expected: usize = SlotAssignment::all(&word)
                    .iter()
                    .map(|a| {
                        enumerate(DiagramFamily::NCMatchedPairings, &a.remainder(), &lim)
                            .unwrap()
                            .len()
                    })
                    .sum();
                assert_eq!(e.len(), expected);
                assert_eq!(dim_span(&e), expected, "{word}");
            }
        }
    }

    #[test]
    fn free_unitary_dimension_counts_nc_matched_pairings() {
        let lim = Limits::default();
        for n in 2..=3 {
            for len in 0..=8 {
                for word in ColoredWord::all_of_length(len) {
                    let f = fixed_space(&spec(GroupFamily::FreeU, n), &word, &lim).unwrap();
                    assert_eq!(dim_span(&f), f.len(), "N={n} {word}");
                }
            }
        }
    }

    #[test]
    fn family_names_roundtrip() {
        for f in GroupFamily::ALL {
            assert_eq!(f.name().parse::<GroupFamily>().unwrap(), f);
        }
        assert!("free-q".parse::<GroupFamily>().is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let limits = Limits {
            max_word_len: 2,
            ..Limits::default()
        };
        assert!(matches!(
            fixed_space(&spec(GroupFamily::TorusAbelian, 2), &w("uuU"), &limits),
            Err(FixedSpaceError::WordTooLong { len: 3, cap: 2 })
        ));
        let limits = Limits {
            max_entries: 8,
            ..Limits::default()
        };
        assert!(matches!(
            lie_kernel_oracle(&spec(GroupFamily::ClassicalU, 3), &w("uU"), &limits),
            Err(FixedSpaceError::Realize(RealizeError::TooLarge { .. }))
        ));
    }
}
