//! Exact sparse linear algebra over the rationals.
//!
//! Everything is built on one sparse Gaussian elimination routine
//! ([`Elimination`]) that picks pivots Markowitz-style: the column with the
//! fewest live entries first, then the shortest row inside that column.
//! The cohomology matrices produced elsewhere in the crate are dominated by
//! unit columns, which this strategy clears without any fill-in.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact rational scalar, always kept in lowest terms with positive denominator.
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
}

/// Sparse matrix with exact rational entries. Zero entries are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct SparseRatMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rat>,
}

impl fmt::Debug for SparseRatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseRatMatrix({}x{}, {{", self.rows, self.cols)?;
        for ((r, c), v) in &self.entries {
            write!(f, " ({r},{c})={v}")?;
        }
        write!(f, " }})")
    }
}

impl SparseRatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), Rat::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Rat>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.entries.insert((r, c), v.clone());
                }
            }
        }
        m
    }

    /// Convenience for tests and small literals.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Rat>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| rat(v)).collect())
            .collect();
        Self::from_dense(&dense)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Rat {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn set(&mut self, row: usize, col: usize, value: Rat) -> Result<(), LinalgError> {
        if row >= self.rows || col >= self.cols {
            return Err(LinalgError::OutOfBounds {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
        Ok(())
    }

    /// Adds `value` to the entry at (row, col), dropping it if the sum is zero.
    pub fn add_to(&mut self, row: usize, col: usize, value: &Rat) -> Result<(), LinalgError> {
        let cur = self.get(row, col);
        self.set(row, col, cur + value)
    }

    /// Appends a column given as sparse (row, value) pairs; returns its index.
    pub fn push_col<I: IntoIterator<Item = (usize, Rat)>>(
        &mut self,
        col: I,
    ) -> Result<usize, LinalgError> {
        let c = self.cols;
        self.cols += 1;
        for (r, v) in col {
            if r >= self.rows {
                self.cols -= 1;
                self.entries.retain(|&(_, cc), _| cc != c);
                return Err(LinalgError::OutOfBounds {
                    row: r,
                    col: c,
                    rows: self.rows,
                    cols: self.cols + 1,
                });
            }
            if !v.is_zero() {
                let e = self.entries.entry((r, c)).or_insert_with(Rat::zero);
                *e += v;
                if e.is_zero() {
                    self.entries.remove(&(r, c));
                }
            }
        }
        Ok(c)
    }

    /// Grows the row count; new rows are zero.
    pub fn add_rows(&mut self, extra: usize) {
        self.rows += extra;
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn transpose(&self) -> Self {
        Self {
            rows: self.cols,
            cols: self.rows,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), v)| ((c, r), v.clone()))
                .collect(),
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows,
                got: other.rows,
            });
        }
        let mut m = self.clone();
        m.cols += other.cols;
        for (&(r, c), v) in &other.entries {
            m.entries.insert((r, c + self.cols), v.clone());
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Result<Vec<Rat>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let mut out = vec![Rat::zero(); self.rows];
        for (&(r, c), a) in &self.entries {
            if !v[c].is_zero() {
                out[r] += a * &v[c];
            }
        }
        Ok(out)
    }

    pub fn scale_row(&mut self, row: usize, factor: &Rat) {
        assert!(!factor.is_zero(), "row scaling factor must be nonzero");
        for ((r, _), v) in self.entries.iter_mut() {
            if *r == row {
                *v *= factor;
            }
        }
    }

    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        assert_eq!(row_perm.len(), self.rows);
        assert_eq!(col_perm.len(), self.cols);
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), v)| ((row_perm[r], col_perm[c]), v.clone()))
                .collect(),
        }
    }

    fn to_rows(&self) -> Vec<Vec<(usize, Rat)>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            rows[r].push((c, v.clone()));
        }
        rows
    }
}

/// Result of a full forward elimination, kept around for back-substitution.
pub struct Elimination {
    cols: usize,
    /// Pivot rows in elimination order: (pivot column, row entries sorted by column).
    pivots: Vec<(usize, Vec<(usize, Rat)>)>,
    /// Rows that ended with no pivot; only protected columns can remain in them.
    leftover: Vec<Vec<(usize, Rat)>>,
}

impl Elimination {
    /// Eliminates `m`, never pivoting on columns `>= protect_from`.
    fn run(m: &SparseRatMatrix, protect_from: usize) -> Self {
        let mut rows = m.to_rows();
        let ncols = m.cols;
        let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
        for (r, row) in rows.iter().enumerate() {
            for (c, _) in row {
                col_rows[*c].insert(r);
            }
        }
        let mut row_alive = vec![true; rows.len()];
        let mut live_cols: BTreeSet<usize> = (0..protect_from.min(ncols))
            .filter(|&c| !col_rows[c].is_empty())
            .collect();
        let mut pivots = Vec::new();

        while !live_cols.is_empty() {
            // Markowitz-style choice: sparsest column, then shortest row in it.
            let mut best: Option<(usize, usize)> = None;
            let mut emptied = Vec::new();
            for &c in &live_cols {
                let cnt = col_rows[c].len();
                if cnt == 0 {
                    emptied.push(c);
                    continue;
                }
                if best.is_none_or(|(_, bc)| cnt < bc) {
                    best = Some((c, cnt));
                    if cnt == 1 {
                        break;
                    }
                }
            }
            for c in emptied {
                live_cols.remove(&c);
            }
            let Some((pc, _)) = best else { break };
            let pr = *col_rows[pc]
                .iter()
                .min_by_key(|&&r| (rows[r].len(), r))
                .expect("column has a live row");

            let prow = std::mem::take(&mut rows[pr]);
            row_alive[pr] = false;
            for (c, _) in &prow {
                col_rows[*c].remove(&pr);
            }
            let pval = prow
                .iter()
                .find(|(c, _)| *c == pc)
                .map(|(_, v)| v.clone())
                .expect("pivot entry");

            let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
            for t in targets {
                let tval = rows[t]
                    .iter()
                    .find(|(c, _)| *c == pc)
                    .map(|(_, v)| v.clone())
                    .expect("target entry");
                let factor = tval / &pval;
                let old = std::mem::take(&mut rows[t]);
                let (new, removed, added) = axpy_rows(&old, &prow, &factor);
                for c in removed {
                    col_rows[c].remove(&t);
                }
                for c in added {
                    col_rows[c].insert(t);
                }
                rows[t] = new;
            }
            debug_assert!(col_rows[pc].is_empty());
            for (c, _) in &prow {
                if col_rows[*c].is_empty() {
                    live_cols.remove(c);
                }
            }
            live_cols.remove(&pc);
            pivots.push((pc, prow));
        }

        let leftover = rows
            .into_iter()
            .enumerate()
            .filter(|(r, row)| row_alive[*r] && !row.is_empty())
            .map(|(_, row)| row)
            .collect();
        Self {
            cols: ncols,
            pivots,
            leftover,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn pivot_cols(&self) -> BTreeSet<usize> {
        self.pivots.iter().map(|(c, _)| *c).collect()
    }

    /// Back-substitution with the given values on non-pivot columns (all
    /// others default to zero). `rhs_col` names a protected column holding b.
    fn back_substitute(
        &self,
        free_values: &BTreeMap<usize, Rat>,
        rhs_col: Option<usize>,
    ) -> Vec<Rat> {
        let n = rhs_col.unwrap_or(self.cols);
        let mut x = vec![Rat::zero(); n];
        for (c, v) in free_values {
            x[*c] = v.clone();
        }
        for (pc, row) in self.pivots.iter().rev() {
            let mut acc = Rat::zero();
            let mut pval = Rat::zero();
            for (c, v) in row {
                if *c == *pc {
                    pval = v.clone();
                } else if Some(*c) == rhs_col {
                    acc += v;
                } else if !x[*c].is_zero() {
                    acc -= v * &x[*c];
                }
            }
            x[*pc] = acc / pval;
        }
        x
    }
}

/// Computes `target - factor * pivot` on sorted sparse rows. Returns the new
/// row plus the columns that vanished and the columns that appeared.
fn axpy_rows(
    target: &[(usize, Rat)],
    pivot: &[(usize, Rat)],
    factor: &Rat,
) -> (Vec<(usize, Rat)>, Vec<usize>, Vec<usize>) {
    let mut out = Vec::with_capacity(target.len() + pivot.len());
    let mut removed = Vec::new();
    let mut added = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < pivot.len() {
        let ti = target.get(i).map(|e| e.0);
        let pj = pivot.get(j).map(|e| e.0);
        match (ti, pj) {
            (Some(a), Some(b)) if a == b => {
                let v = &target[i].1 - factor * &pivot[j].1;
                if v.is_zero() {
                    removed.push(a);
                } else {
                    out.push((a, v));
                }
                i += 1;
                j += 1;
            }
            (Some(a), Some(b)) if a < b => {
                out.push(target[i].clone());
                i += 1;
            }
            (Some(_), None) => {
                out.push(target[i].clone());
                i += 1;
            }
            (_, Some(b)) => {
                out.push((b, -(factor * &pivot[j].1)));
                added.push(b);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    (out, removed, added)
}

/// Exact rank over the rationals.
pub fn rank(m: &SparseRatMatrix) -> usize {
    Elimination::run(m, m.cols()).rank()
}

/// Basis of the right null space, of size `cols - rank`.
pub fn kernel_basis(m: &SparseRatMatrix) -> Vec<Vec<Rat>> {
    let elim = Elimination::run(m, m.cols());
    let pivots = elim.pivot_cols();
    (0..m.cols())
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut free = BTreeMap::new();
            free.insert(f, Rat::one());
            elim.back_substitute(&free, None)
        })
        .collect()
}

/// One exact solution of `m x = b`, or `None` when b is outside the column space.
pub fn solve(m: &SparseRatMatrix, b: &[Rat]) -> Result<Option<Vec<Rat>>, LinalgError> {
    if b.len() != m.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: m.rows(),
            got: b.len(),
        });
    }
    let mut aug = m.clone();
    let rhs = aug.push_col(b.iter().cloned().enumerate())?;
    let elim = Elimination::run(&aug, rhs);
    if elim.leftover.iter().any(|row| !row.is_empty()) {
        return Ok(None);
    }
    Ok(Some(elim.back_substitute(&BTreeMap::new(), Some(rhs))))
}

/// Reduced row-echelon basis of the span of `vectors` (each of length `dim`).
///
/// Pivots are taken at the smallest coordinate index, so the output is
/// canonical for a given span and coordinate order.
pub fn echelon_basis(vectors: &[Vec<Rat>], dim: usize) -> Vec<Vec<Rat>> {
    let mut basis: Vec<(usize, Vec<Rat>)> = Vec::new();
    for v in vectors {
        assert_eq!(v.len(), dim);
        let mut w = v.clone();
        for (pc, b) in &basis {
            if !w[*pc].is_zero() {
                let f = w[*pc].clone();
                for (wi, bi) in w.iter_mut().zip(b) {
                    if !bi.is_zero() {
                        *wi -= &f * bi;
                    }
                }
            }
        }
        if let Some(pc) = w.iter().position(|x| !x.is_zero()) {
            let inv = Rat::one() / &w[pc];
            for wi in w.iter_mut() {
                *wi *= &inv;
            }
            for (_, b) in basis.iter_mut() {
                if !b[pc].is_zero() {
                    let f = b[pc].clone();
                    for (bi, wi) in b.iter_mut().zip(&w) {
                        if !wi.is_zero() {
                            *bi -= &f * wi;
                        }
                    }
                }
            }
            basis.push((pc, w));
        }
    }
    basis.sort_by_key(|(pc, _)| *pc);
    basis.into_iter().map(|(_, b)| b).collect()
}

/// Sparse vector keyed by an ordered coordinate type.
pub type SparseVec<K> = BTreeMap<K, Rat>;

/// Incrementally maintained reduced echelon basis of sparse vectors; the
/// pivot of each basis vector is its smallest coordinate.
#[derive(Clone, Debug)]
pub struct SparseEchelon<K: Ord + Clone> {
    rows: BTreeMap<K, SparseVec<K>>,
}

impl<K: Ord + Clone> Default for SparseEchelon<K> {
    fn default() -> Self {
        Self {
            rows: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> SparseEchelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the basis.
    pub fn reduce(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut w = v.clone();
        w.retain(|_, c| !c.is_zero());
        for (pk, row) in &self.rows {
            if let Some(f) = w.get(pk).cloned() {
                sparse_axpy(&mut w, row, &f);
            }
        }
        w
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts `v`; returns `false` when it was already in the span.
    pub fn insert(&mut self, v: &SparseVec<K>) -> bool {
        let mut w = self.reduce(v);
        let Some((pk, pv)) = w.first_key_value().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = Rat::one() / pv;
        for c in w.values_mut() {
            *c *= &inv;
        }
        for row in self.rows.values_mut() {
            if let Some(f) = row.get(&pk).cloned() {
                sparse_axpy(row, &w, &f);
            }
        }
        self.rows.insert(pk, w);
        true
    }

    /// Basis vectors in increasing pivot order.
    pub fn rows(&self) -> impl Iterator<Item = (&K, &SparseVec<K>)> {
        self.rows.iter()
    }
}

/// `w -= f · v`.
fn sparse_axpy<K: Ord + Clone>(w: &mut SparseVec<K>, v: &SparseVec<K>, f: &Rat) {
    for (k, c) in v {
        let delta = f * c;
        match w.get_mut(k) {
            Some(x) => {
                *x -= delta;
                if x.is_zero() {
                    w.remove(k);
                }
            }
            None => {
                w.insert(k.clone(), -delta);
            }
        }
    }
}

/// Rank of a family of sparse vectors given as (coordinate, value) lists.
pub fn rank_of_columns(dim: usize, columns: &[Vec<(usize, Rat)>]) -> usize {
    let mut m = SparseRatMatrix::zeros(dim, 0);
    for c in columns {
        m.push_col(c.iter().cloned())
            .expect("coordinate within dim");
    }
    rank(&m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_zero_vec(v: &[Rat]) -> bool {
        v.iter().all(Zero::is_zero)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&SparseRatMatrix::identity(3)), 3);
        assert_eq!(rank(&SparseRatMatrix::zeros(4, 7)), 0);
        assert_eq!(rank(&SparseRatMatrix::zeros(0, 0)), 0);
        assert_eq!(rank(&SparseRatMatrix::from_i64(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&SparseRatMatrix::identity(3)).is_empty());

        let m = SparseRatMatrix::from_i64(&[&[1, -1]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0], k[0][1]);
        assert!(!k[0][0].is_zero());

        let m = SparseRatMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        // proportional to (2, -1)
        assert_eq!(&k[0][0] * rat(-1), &k[0][1] * rat(2));
        assert!(is_zero_vec(&m.mul_vec(&k[0]).unwrap()));
    }

    #[test]
    fn solve_examples() {
        let b = vec![rat(3), ratio(-1, 2), rat(7)];
        assert_eq!(
            solve(&SparseRatMatrix::identity(3), &b).unwrap(),
            Some(b.clone())
        );

        let m = SparseRatMatrix::from_i64(&[&[1, -1]]);
        let x = solve(&m, &[rat(0)]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![rat(0)]);

        let m = SparseRatMatrix::from_i64(&[&[1], &[0]]);
        assert_eq!(solve(&m, &[rat(0), rat(1)]).unwrap(), None);

        assert!(matches!(
            solve(&m, &[rat(0)]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn solve_needs_back_substitution_through_fill_in() {
        let m = SparseRatMatrix::from_i64(&[&[2, 1, 0, 3], &[1, 1, 1, 0], &[0, 4, 1, 1]]);
        let b = vec![rat(1), rat(2), rat(-3)];
        let x = solve(&m, &b).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), b);
    }

    #[test]
    fn echelon_is_canonical() {
        let a = vec![vec![rat(1), rat(1), rat(0)], vec![rat(0), rat(1), rat(1)]];
        let b = vec![vec![rat(1), rat(2), rat(1)], vec![rat(2), rat(1), rat(-1)]];
        assert_eq!(echelon_basis(&a, 3), echelon_basis(&b, 3));
    }

    #[test]
    fn sparse_echelon_matches_dense() {
        let vs = [
            vec![1, 2, 0, 1],
            vec![0, 1, 1, 0],
            vec![1, 3, 1, 1],
            vec![0, 0, 2, 5],
        ];
        let mut e = SparseEchelon::new();
        let mut dense = Vec::new();
        for v in &vs {
            let sv: SparseVec<usize> = v.iter().enumerate().map(|(k, &c)| (k, rat(c))).collect();
            e.insert(&sv);
            dense.push(v.iter().map(|&c| rat(c)).collect::<Vec<_>>());
        }
        assert_eq!(e.len(), 3);
        let got: Vec<Vec<Rat>> = e
            .rows()
            .map(|(_, r)| {
                (0..4)
                    .map(|k| r.get(&k).cloned().unwrap_or_else(Rat::zero))
                    .collect()
            })
            .collect();
        assert_eq!(got, echelon_basis(&dense, 4));
    }

    #[test]
    fn set_rejects_out_of_bounds() {
        let mut m = SparseRatMatrix::zeros(2, 2);
        assert!(m.set(2, 0, rat(1)).is_err());
        m.set(1, 1, rat(5)).unwrap();
        m.set(1, 1, rat(0)).unwrap();
        assert_eq!(m.nnz(), 0);
    }
}
