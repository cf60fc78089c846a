//! Sparse exact linear algebra over the rationals.
//!
//! Vectors are sorted lists of `(index, value)` pairs with no stored zeros.
//! Batch rank uses Markowitz-style pivot selection on sparse columns; the
//! incremental [`Echelon`] reducer answers membership, solve and nullspace
//! queries and can track how each reduced row combines the inputs.

pub mod modular;

use std::collections::BTreeMap;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::rational::Rational;

pub use modular::rank_modular_certified;

/// A sparse vector with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, Rational)>,
}

impl SparseVector {
    pub fn zero(dim: usize) -> Self {
        SparseVector { dim, entries: Vec::new() }
    }

    /// Builds a vector from arbitrary `(index, value)` pairs, summing repeats
    /// and dropping zeros.
    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, v) in entries {
            if i >= dim {
                return Err(Error::DimensionMismatch { expected: dim, found: i + 1 });
            }
            if v.is_zero() {
                continue;
            }
            *map.entry(i).or_insert_with(Rational::zero) += v;
        }
        Ok(Self::from_sorted_unchecked(
            dim,
            map.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        ))
    }

    /// Wraps already sorted, duplicate-free, nonzero entries.
    pub(crate) fn from_sorted_unchecked(dim: usize, entries: Vec<(usize, Rational)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(i, v)| *i < dim && !v.is_zero()));
        SparseVector { dim, entries }
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (i, v.clone()))
            .collect();
        SparseVector { dim: values.len(), entries }
    }

    pub fn from_ints(values: &[i64]) -> Self {
        let v: Vec<Rational> = values.iter().map(|&x| Rational::from_int(x)).collect();
        Self::from_dense(&v)
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        assert!(i < dim, "unit index out of range");
        SparseVector { dim, entries: vec![(i, Rational::one())] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Rational)> {
        self.entries
    }

    pub fn get(&self, i: usize) -> Rational {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        SparseVector {
            dim: self.dim,
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// Returns `self + c * other`.
    pub fn axpy(&self, c: &Rational, other: &SparseVector) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in axpy");
        SparseVector { dim: self.dim, entries: merge_axpy(&self.entries, c, &other.entries) }
    }

    pub fn add(&self, other: &SparseVector) -> Self {
        self.axpy(&Rational::one(), other)
    }

    pub fn sub(&self, other: &SparseVector) -> Self {
        self.axpy(&-Rational::one(), other)
    }

    pub fn dot(&self, other: &SparseVector) -> Rational {
        let (mut a, mut b) = (0, 0);
        let mut acc = Rational::zero();
        while a < self.entries.len() && b < other.entries.len() {
            let (i, x) = &self.entries[a];
            let (j, y) = &other.entries[b];
            match i.cmp(j) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    acc += x * y;
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }
}

/// Sorted merge computing `a + c*b`.
pub(crate) fn merge_axpy(
    a: &[(usize, Rational)],
    c: &Rational,
    b: &[(usize, Rational)],
) -> Vec<(usize, Rational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + &(c * &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// A sparse matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<SparseVector>,
}

impl SparseMatrix {
    pub fn from_columns(rows: usize, columns: Vec<SparseVector>) -> Result<Self> {
        for c in &columns {
            if c.dim() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.dim() });
            }
        }
        Ok(SparseMatrix { rows, cols: columns.len(), columns })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, columns: vec![SparseVector::zero(rows); cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: n,
            columns: (0..n).map(|i| SparseVector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from dense integer rows.
    pub fn from_int_rows(data: &[Vec<i64>]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        let columns = (0..cols)
            .map(|j| {
                let col: Vec<i64> = data.iter().map(|r| r[j]).collect();
                SparseVector::from_ints(&col)
            })
            .collect();
        SparseMatrix { rows, cols, columns }
    }

    pub fn from_dense_rows(data: &[Vec<Rational>]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        let columns = (0..cols)
            .map(|j| {
                let col: Vec<Rational> = data.iter().map(|r| r[j].clone()).collect();
                SparseVector::from_dense(&col)
            })
            .collect();
        SparseMatrix { rows, cols, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn columns(&self) -> &[SparseVector] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &SparseVector {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.columns[j].get(i)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.nnz()).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.rows];
        for (j, c) in self.columns.iter().enumerate() {
            for (i, v) in c.entries() {
                rows[*i].push((j, v.clone()));
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            columns: rows
                .into_iter()
                .map(|e| SparseVector::from_sorted_unchecked(self.cols, e))
                .collect(),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &SparseVector) -> Result<SparseVector> {
        if x.dim() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.dim() });
        }
        let mut acc: Vec<(usize, Rational)> = Vec::new();
        for (j, c) in x.entries() {
            acc = merge_axpy(&acc, c, self.columns[*j].entries());
        }
        Ok(SparseVector::from_sorted_unchecked(self.rows, acc))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if other.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let columns = crate::exec::map_slice(&other.columns, |c| self.apply(c))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix { rows: self.rows, cols: other.cols, columns })
    }

    pub fn hconcat(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if other.rows != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        Ok(SparseMatrix { rows: self.rows, cols: columns.len(), columns })
    }
}

/// Exact rank over the rationals with the default budget.
pub fn rank(m: &SparseMatrix) -> Result<usize> {
    rank_with(m, &Budget::default())
}

/// Exact rank by right-looking sparse elimination with Markowitz pivoting.
pub fn rank_with(m: &SparseMatrix, budget: &Budget) -> Result<usize> {
    rank_of_columns(m.columns.iter().map(|c| c.entries().to_vec()).collect(), budget)
}

pub(crate) fn rank_of_columns(
    mut cols: Vec<Vec<(usize, Rational)>>,
    budget: &Budget,
) -> Result<usize> {
    let mut row_cols: FxHashMap<usize, FxHashSet<usize>> = FxHashMap::default();
    let mut active: Vec<usize> = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        if c.is_empty() {
            continue;
        }
        active.push(j);
        for (i, _) in c {
            row_cols.entry(*i).or_default().insert(j);
        }
    }
    let mut rank = 0;
    let mut work: u64 = 0;
    while !active.is_empty() {
        // Column with the fewest entries; row within it with the fewest entries.
        let (pos, &pc) = active
            .iter()
            .enumerate()
            .min_by_key(|(_, &j)| (cols[j].len(), j))
            .expect("nonempty");
        active.swap_remove(pos);
        if cols[pc].is_empty() {
            continue;
        }
        let (pr, pv) = cols[pc]
            .iter()
            .min_by_key(|(i, _)| (row_cols.get(i).map_or(0, |s| s.len()), *i))
            .cloned()
            .expect("nonempty column");
        rank += 1;
        let pivot_col = std::mem::take(&mut cols[pc]);
        for (i, _) in &pivot_col {
            if let Some(s) = row_cols.get_mut(i) {
                s.remove(&pc);
            }
        }
        let mut targets: Vec<usize> = row_cols
            .remove(&pr)
            .map(|s| s.into_iter().collect())
            .unwrap_or_default();
        targets.sort_unstable();
        let inv = pv.recip();
        for t in targets {
            let factor = -(&cols[t][cols[t].binary_search_by_key(&pr, |(i, _)| *i).expect("row index")].1 * &inv);
            let old = std::mem::take(&mut cols[t]);
            let new = merge_axpy(&old, &factor, &pivot_col);
            work += (old.len() + pivot_col.len()) as u64;
            // Keep the row index in sync with the fill pattern.
            let old_rows: FxHashSet<usize> = old.iter().map(|(i, _)| *i).collect();
            let new_rows: FxHashSet<usize> = new.iter().map(|(i, _)| *i).collect();
            for i in old_rows.difference(&new_rows) {
                if let Some(s) = row_cols.get_mut(i) {
                    s.remove(&t);
                }
            }
            for i in new_rows.difference(&old_rows) {
                row_cols.entry(*i).or_default().insert(t);
            }
            cols[t] = new;
        }
        if rank % 64 == 0 {
            budget.check_work(work, "sparse rank")?;
        }
    }
    budget.check_work(work, "sparse rank")?;
    Ok(rank)
}

/// Outcome of inserting a vector into an [`Echelon`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert {
    /// The vector was independent of everything before it.
    Independent,
    /// The vector is a combination of earlier inserts; when tracking is on,
    /// the coefficients are indexed by insertion tag.
    Dependent(Option<Vec<(usize, Rational)>>),
}

#[derive(Clone, Debug)]
struct Row {
    entries: Vec<(usize, Rational)>,
    combo: Vec<(usize, Rational)>,
}

/// Incremental row-echelon reducer over arbitrary `usize` coordinates.
///
/// Every stored row has leading coefficient 1 at its pivot and all other
/// entries at larger indices.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    pivots: FxHashMap<usize, usize>,
    track: bool,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// An echelon that records, for each row, its combination of inputs.
    pub fn tracking() -> Self {
        Echelon { track: true, ..Self::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduces `v` against the stored rows. Returns the remainder and the
    /// combination of inputs that was subtracted.
    fn reduce(
        &self,
        v: &[(usize, Rational)],
    ) -> (BTreeMap<usize, Rational>, BTreeMap<usize, Rational>) {
        let mut work: BTreeMap<usize, Rational> = v.iter().cloned().collect();
        let mut removed: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut cursor = 0usize;
        loop {
            let next = work.range(cursor..).next().map(|(k, c)| (*k, c.clone()));
            let Some((k, c)) = next else { break };
            if let Some(&r) = self.pivots.get(&k) {
                let row = &self.rows[r];
                for (i, x) in &row.entries {
                    let e = work.entry(*i).or_insert_with(Rational::zero);
                    *e -= &c * x;
                    if e.is_zero() {
                        work.remove(i);
                    }
                }
                if self.track {
                    for (t, x) in &row.combo {
                        let e = removed.entry(*t).or_insert_with(Rational::zero);
                        *e += &c * x;
                        if e.is_zero() {
                            removed.remove(t);
                        }
                    }
                }
            }
            if k == usize::MAX {
                break;
            }
            cursor = k + 1;
        }
        (work, removed)
    }

    /// Inserts `v`, tagged with the running insertion count.
    pub fn insert(&mut self, v: &SparseVector) -> Insert {
        self.insert_entries(v.entries())
    }

    pub fn insert_entries(&mut self, v: &[(usize, Rational)]) -> Insert {
        let tag = self.inserted;
        self.inserted += 1;
        let (rest, removed) = self.reduce(v);
        if rest.is_empty() {
            return Insert::Dependent(self.track.then(|| removed.into_iter().collect()));
        }
        let (&lead, lead_val) = rest.iter().next().expect("nonempty");
        let inv = lead_val.recip();
        let entries: Vec<(usize, Rational)> = rest.iter().map(|(i, x)| (*i, x * &inv)).collect();
        let combo = if self.track {
            let mut c: BTreeMap<usize, Rational> = removed.into_iter().map(|(t, x)| (t, -x)).collect();
            c.insert(tag, Rational::one());
            c.into_iter().map(|(t, x)| (t, x * &inv)).collect()
        } else {
            Vec::new()
        };
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(Row { entries, combo });
        Insert::Independent
    }

    /// Whether `v` lies in the span of the inserted vectors.
    pub fn contains(&self, v: &SparseVector) -> bool {
        self.reduce(v.entries()).0.is_empty()
    }

    pub fn contains_entries(&self, v: &[(usize, Rational)]) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Coordinates of `v` in terms of insertion tags (tracking echelons only).
    pub fn coordinates(&self, v: &[(usize, Rational)]) -> Option<Vec<(usize, Rational)>> {
        assert!(self.track, "coordinates require a tracking echelon");
        let (rest, removed) = self.reduce(v);
        rest.is_empty().then(|| removed.into_iter().collect())
    }

    /// Remainder of `v` after reduction; zero exactly when `v` is in the span.
    pub fn remainder(&self, v: &[(usize, Rational)]) -> Vec<(usize, Rational)> {
        self.reduce(v).0.into_iter().collect()
    }

    /// Pivot coordinates of the stored rows, in insertion order.
    pub fn pivot_indices(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.entries[0].0).collect()
    }
}

/// Coordinates of `v` in the span of `basis`, or `None` when `v` is outside.
pub fn member(v: &SparseVector, basis: &[SparseVector]) -> Result<Option<Vec<Rational>>> {
    for b in basis {
        if b.dim() != v.dim() {
            return Err(Error::DimensionMismatch { expected: v.dim(), found: b.dim() });
        }
    }
    let mut ech = Echelon::tracking();
    for b in basis {
        ech.insert(b);
    }
    Ok(ech.coordinates(v.entries()).map(|c| {
        let mut out = vec![Rational::zero(); basis.len()];
        for (t, x) in c {
            out[t] = x;
        }
        out
    }))
}

/// A basis of `{c : sum_j c_j col_j = 0}`.
pub fn nullspace(m: &SparseMatrix) -> Vec<SparseVector> {
    let mut ech = Echelon::tracking();
    let mut out = Vec::new();
    for (j, c) in m.columns.iter().enumerate() {
        if let Insert::Dependent(Some(combo)) = ech.insert(c) {
            let mut e: Vec<(usize, Rational)> = combo.into_iter().map(|(t, x)| (t, -x)).collect();
            e.push((j, Rational::one()));
            e.sort_by_key(|(t, _)| *t);
            out.push(SparseVector::from_sorted_unchecked(m.cols, e));
        }
    }
    out
}

/// Some `x` with `m x = b`, or `None` when the system is inconsistent.
pub fn solve(m: &SparseMatrix, b: &SparseVector) -> Result<Option<SparseVector>> {
    if b.dim() != m.rows {
        return Err(Error::DimensionMismatch { expected: m.rows, found: b.dim() });
    }
    Ok(member(b, &m.columns)?.map(|c| SparseVector::from_dense(&c)))
}
