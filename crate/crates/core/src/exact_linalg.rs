//! Exact linear algebra over spanning sets of tensors.
//!
//! Dense matrices ([`ExactMatrix`]) are ranked by Bareiss fraction-free
//! elimination. Spanning sets of [`SparseTensor`]s are compressed onto the
//! union of their supports and reduced into an integer row-echelon form
//! ([`Echelon`]) whose rows are kept primitive (content 1), so nothing
//! ever leaves the integers.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::realize::{MultiIndex, SparseTensor};
use crate::words::{ColoredWord, Dimension};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("ambient mismatch: expected word {expected_word} at N = {expected_n}, got {word} at N = {n}")]
    AmbientMismatch {
        expected_word: ColoredWord,
        expected_n: Dimension,
        word: ColoredWord,
        n: Dimension,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    /// Panics if the rows are ragged.
    pub fn from_rationals(rows: Vec<Vec<BigRational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        ExactMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_integers(rows: Vec<Vec<BigInt>>) -> Self {
        Self::from_rationals(
            rows.into_iter()
                .map(|r| r.into_iter().map(BigRational::from_integer).collect())
                .collect(),
        )
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_integers(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigRational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row `i` scaled by the lcm of its denominators.
    fn integer_row(&self, i: usize) -> Vec<BigInt> {
        let row = self.row(i);
        let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
    }

    pub fn rank(&self) -> usize {
        bareiss_rank((0..self.rows).map(|i| self.integer_row(i)).collect())
    }
}

/// Rank by Bareiss fraction-free elimination. Pivots are taken column by
/// column, first nonzero row first; every division is exact.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, bottom) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        for row in bottom.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..cols {
                let v = (&pivot_row[c] * &row[j] - &factor * &pivot_row[j]) / &prev;
                row[j] = v;
            }
            row[c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Sparse integer row: `(column, coefficient)` with strictly increasing
/// columns and no zero coefficients.
pub type SparseRow = Vec<(usize, BigInt)>;

/// `a * x − b * y`.
fn combine(a: &BigInt, x: &[(usize, BigInt)], b: &BigInt, y: &[(usize, BigInt)]) -> SparseRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j == y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i == x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push((x[i].0, a * &x[i].1));
            i += 1;
        } else if take_y {
            out.push((y[j].0, -(b * &y[j].1)));
            j += 1;
        } else {
            let v = a * &x[i].1 - b * &y[j].1;
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Divide out the content and make the leading coefficient positive.
fn make_primitive(row: &mut SparseRow) {
    let Some(first) = row.first() else { return };
    let mut g = row.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if first.1.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// Integer row-echelon form built one vector at a time.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    rows: Vec<SparseRow>,
    pivot_of: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the current pivots; the result has no entry in
    /// any pivot column.
    pub fn reduce(&self, mut v: SparseRow) -> SparseRow {
        let mut from_col = 0;
        loop {
            let hit = v
                .iter()
                .filter(|(c, _)| *c >= from_col)
                .find_map(|(c, x)| self.pivot_of.get(c).map(|&r| (*c, x.clone(), r)));
            let Some((col, coef, r)) = hit else {
                return v;
            };
            let pivot = &self.rows[r];
            v = combine(&pivot[0].1, &v, &coef, pivot);
            make_primitive(&mut v);
            from_col = col + 1;
        }
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: SparseRow) -> bool {
        let mut v = self.reduce(v);
        if v.is_empty() {
            return false;
        }
        make_primitive(&mut v);
        self.pivot_of.insert(v[0].0, self.rows.len());
        self.rows.push(v);
        true
    }

    pub fn contains(&self, v: SparseRow) -> bool {
        self.reduce(v).is_empty()
    }

    /// Basis of `{x : row · x = 0 for every row}` in `ncols` unknowns.
    pub fn kernel(&self, ncols: usize) -> Vec<SparseRow> {
        // Reduced echelon form: clear each pivot column from the other rows.
        let mut rows = self.rows.clone();
        let order: Vec<(usize, usize)> = self.pivot_of.iter().map(|(&c, &r)| (c, r)).collect();
        for &(col, r) in order.iter().rev() {
            for other in 0..rows.len() {
                if other == r {
                    continue;
                }
                let coef = match rows[other].binary_search_by_key(&col, |e| e.0) {
                    Ok(pos) => rows[other][pos].1.clone(),
                    Err(_) => continue,
                };
                let pivot = rows[r].clone();
                rows[other] = combine(&pivot[0].1, &rows[other], &coef, &pivot);
                make_primitive(&mut rows[other]);
            }
        }
        let mut basis = Vec::new();
        for free in (0..ncols).filter(|c| !self.pivot_of.contains_key(c)) {
            let mut entries: Vec<(usize, BigRational)> = vec![(free, BigRational::one())];
            for &(col, r) in &order {
                let row = &rows[r];
                if let Ok(pos) = row.binary_search_by_key(&free, |e| e.0) {
                    entries.push((col, -BigRational::new(row[pos].1.clone(), row[0].1.clone())));
                }
            }
            entries.sort_by_key(|e| e.0);
            let lcm = entries
                .iter()
                .fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
            let mut v: SparseRow = entries
                .into_iter()
                .map(|(c, x)| (c, (x * BigRational::from_integer(lcm.clone())).to_integer()))
                .collect();
            make_primitive(&mut v);
            basis.push(v);
        }
        basis
    }
}

/// Coordinates for a set of multi-indices, in lexicographic order.
#[derive(Debug, Clone, Default)]
pub struct ColumnMap {
    columns: BTreeMap<MultiIndex, usize>,
    indices: Vec<MultiIndex>,
}

impl ColumnMap {
    pub fn from_indices<'a>(indices: impl IntoIterator<Item = &'a MultiIndex>) -> Self {
        let set: BTreeSet<&MultiIndex> = indices.into_iter().collect();
        let indices: Vec<MultiIndex> = set.into_iter().cloned().collect();
        let columns = indices
            .iter()
            .enumerate()
            .map(|(i, idx)| (idx.clone(), i))
            .collect();
        ColumnMap { columns, indices }
    }

    /// Union of the supports of `tensors`.
    pub fn from_supports<'a>(tensors: impl IntoIterator<Item = &'a SparseTensor>) -> Self {
        Self::from_indices(tensors.into_iter().flat_map(|t| t.entries().keys()))
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn column(&self, idx: &MultiIndex) -> Option<usize> {
        self.columns.get(idx).copied()
    }

    pub fn multi_index(&self, col: usize) -> &MultiIndex {
        &self.indices[col]
    }

    /// `None` when `t` has support outside the map.
    pub fn row(&self, t: &SparseTensor) -> Option<SparseRow> {
        t.entries()
            .iter()
            .map(|(idx, v)| self.column(idx).map(|c| (c, v.clone())))
            .collect()
    }
}

/// A spanning set (not necessarily independent) of a subspace of `V^word`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    word: ColoredWord,
    n: Dimension,
    vectors: Vec<SparseTensor>,
}

impl SubspaceBasis {
    pub fn new(
        word: ColoredWord,
        n: Dimension,
        vectors: Vec<SparseTensor>,
    ) -> Result<Self, LinalgError> {
        for v in &vectors {
            check_ambient(&word, n, v)?;
        }
        Ok(SubspaceBasis { word, n, vectors })
    }

    pub fn empty(word: ColoredWord, n: Dimension) -> Self {
        SubspaceBasis {
            word,
            n,
            vectors: Vec::new(),
        }
    }

    pub fn word(&self) -> &ColoredWord {
        &self.word
    }

    pub fn n(&self) -> Dimension {
        self.n
    }

    pub fn vectors(&self) -> &[SparseTensor] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn check_same_ambient(&self, other: &SubspaceBasis) -> Result<(), LinalgError> {
        if self.word != other.word || self.n != other.n {
            return Err(LinalgError::AmbientMismatch {
                expected_word: self.word.clone(),
                expected_n: self.n,
                word: other.word.clone(),
                n: other.n,
            });
        }
        Ok(())
    }

    /// Positions of a maximal independent subset, greedily from the front.
    pub fn independent_subset(&self) -> Vec<usize> {
        let cols = ColumnMap::from_supports(&self.vectors);
        let mut ech = Echelon::new();
        self.vectors
            .iter()
            .enumerate()
            .filter(|(_, v)| ech.insert(cols.row(v).expect("column map covers supports")))
            .map(|(i, _)| i)
            .collect()
    }

    /// The independent vectors of [`Self::independent_subset`].
    pub fn to_independent(&self) -> SubspaceBasis {
        SubspaceBasis {
            word: self.word.clone(),
            n: self.n,
            vectors: self
                .independent_subset()
                .into_iter()
                .map(|i| self.vectors[i].clone())
                .collect(),
        }
    }
}

fn check_ambient(word: &ColoredWord, n: Dimension, v: &SparseTensor) -> Result<(), LinalgError> {
    if v.word() != word || v.n() != n {
        return Err(LinalgError::AmbientMismatch {
            expected_word: word.clone(),
            expected_n: n,
            word: v.word().clone(),
            n: v.n(),
        });
    }
    Ok(())
}

fn echelon_of(cols: &ColumnMap, vectors: &[SparseTensor]) -> Echelon {
    let mut ech = Echelon::new();
    for v in vectors {
        ech.insert(cols.row(v).expect("column map covers supports"));
    }
    ech
}

pub fn dim_span(b: &SubspaceBasis) -> usize {
    let cols = ColumnMap::from_supports(&b.vectors);
    echelon_of(&cols, &b.vectors).rank()
}

/// `dim span A + dim span B − rank [A; B]`.
pub fn dim_intersection(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<usize, LinalgError> {
    a.check_same_ambient(b)?;
    let cols = ColumnMap::from_supports(a.vectors.iter().chain(&b.vectors));
    let dim_a = echelon_of(&cols, &a.vectors).rank();
    let mut stacked = echelon_of(&cols, &b.vectors);
    let dim_b = stacked.rank();
    for v in &a.vectors {
        stacked.insert(cols.row(v).expect("column map covers supports"));
    }
    Ok(dim_a + dim_b - stacked.rank())
}

/// Whether `v ∈ span A`.
pub fn contains(a: &SubspaceBasis, v: &SparseTensor) -> Result<bool, LinalgError> {
    check_ambient(&a.word, a.n, v)?;
    let cols = ColumnMap::from_supports(&a.vectors);
    let Some(row) = cols.row(v) else {
        // Support outside every vector of A; only 0 could lie in the span.
        return Ok(v.is_zero());
    };
    Ok(echelon_of(&cols, &a.vectors).contains(row))
}

/// Whether `span A ⊆ span B`.
pub fn is_subspace(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<bool, LinalgError> {
    a.check_same_ambient(b)?;
    let cols = ColumnMap::from_supports(a.vectors.iter().chain(&b.vectors));
    let ech = echelon_of(&cols, &b.vectors);
    Ok(a.vectors
        .iter()
        .all(|v| ech.contains(cols.row(v).expect("column map covers supports"))))
}

/// A spanning set of `span A ∩ span B`, from the kernel of the map
/// `(x, y) ↦ Σ xᵢ aᵢ − Σ yⱼ bⱼ` restricted to independent generators.
pub fn intersect(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<SubspaceBasis, LinalgError> {
    a.check_same_ambient(b)?;
    let a_ind = a.to_independent();
    let b_ind = b.to_independent();
    let cols = ColumnMap::from_supports(a_ind.vectors.iter().chain(&b_ind.vectors));
    let generators = a_ind.len() + b_ind.len();

    // Row per ambient coordinate, column per generator.
    let mut coordinate_rows: Vec<SparseRow> = vec![Vec::new(); cols.len()];
    for (g, v) in a_ind.vectors.iter().enumerate() {
        for (c, x) in cols.row(v).expect("covered") {
            coordinate_rows[c].push((g, x));
        }
    }
    for (g, v) in b_ind.vectors.iter().enumerate() {
        for (c, x) in cols.row(v).expect("covered") {
            coordinate_rows[c].push((a_ind.len() + g, -x));
        }
    }
    let mut ech = Echelon::new();
    for row in coordinate_rows {
        ech.insert(row);
    }
    let vectors = ech
        .kernel(generators)
        .into_iter()
        .map(|coeffs| {
            let mut acc = SparseTensor::zero(a.word.clone(), a.n);
            for (g, x) in coeffs.iter().filter(|(g, _)| *g < a_ind.len()) {
                acc = acc.add_scaled(&a_ind.vectors[*g], x);
            }
            acc
        })
        .collect();
    Ok(SubspaceBasis {
        word: a.word.clone(),
        n: a.n,
        vectors,
    })
}
