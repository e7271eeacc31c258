//! Dense exact matrices and fraction-free elimination.
//!
//! All elimination runs on primitive integer rows: a row is combined with a
//! pivot row by cross-multiplication and then divided by the gcd of its
//! entries, so no intermediate fractions are ever formed. Rational rows are
//! scaled to integers first, which leaves their span unchanged.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{make_primitive, to_primitive_integers, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows; panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Q::from_integer(BigInt::from(v))).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[Q] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Q::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = &self[(i, j)];
                    if i == j { v.is_one() } else { v.is_zero() }
                })
            })
    }

    /// Gauss-Jordan inverse over the rationals; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for c in 0..n {
            let p = (c..n).filter(|&r| !a[(r, c)].is_zero()).min_by(|&x, &y| {
                height(&a[(x, c)]).cmp(&height(&a[(y, c)]))
            })?;
            if p != c {
                a.swap_rows(p, c);
                inv.swap_rows(p, c);
            }
            let piv = a[(c, c)].clone();
            for j in 0..n {
                if !a[(c, j)].is_zero() {
                    a[(c, j)] /= &piv;
                }
                if !inv[(c, j)].is_zero() {
                    inv[(c, j)] /= &piv;
                }
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for j in 0..n {
                    if !a[(c, j)].is_zero() {
                        let d = &f * &a[(c, j)];
                        a[(r, j)] -= d;
                    }
                    if !inv[(c, j)].is_zero() {
                        let d = &f * &inv[(c, j)];
                        inv[(r, j)] -= d;
                    }
                }
            }
        }
        Some(inv)
    }

    /// Determinant by Bareiss elimination on the integer-scaled rows.
    pub fn determinant(&self) -> Q {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Q::one();
        }
        let mut scale = BigInt::one();
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let row = self.row(i);
                let den = crate::rational::common_denominator(row.iter());
                scale *= &den;
                row.iter().map(|v| v.numer() * &den / v.denom()).collect()
            })
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return Q::zero();
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        Q::new(sign * &a[n - 1][n - 1], scale)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

fn height(v: &Q) -> u64 {
    v.numer().bits() + v.denom().bits()
}

/// Reduced row echelon form of integer rows, computed without fractions.
///
/// Surviving rows are primitive with a positive pivot, and every pivot column
/// vanishes outside its own row. Zero rows are dropped.
pub fn integer_rref(rows: Vec<Vec<BigInt>>, cols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut rows: Vec<Vec<BigInt>> = rows
        .into_iter()
        .filter(|r| r.iter().any(|v| !v.is_zero()))
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).filter(|&i| !rows[i][c].is_zero()).min_by_key(|&i| {
            let nnz = rows[i].iter().filter(|v| !v.is_zero()).count();
            (rows[i][c].bits(), nnz)
        }) else {
            continue;
        };
        rows.swap(r, p);
        if rows[r][c].is_negative() {
            for v in rows[r].iter_mut() {
                *v = -&*v;
            }
        }
        make_primitive(&mut rows[r]);
        let pivot_row = std::mem::take(&mut rows[r]);
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let g = row[c].gcd(&pivot_row[c]);
            let keep = &pivot_row[c] / &g;
            let take = &row[c] / &g;
            for k in 0..cols {
                let pk = &pivot_row[k];
                if pk.is_zero() {
                    if !row[k].is_zero() && !keep.is_one() {
                        row[k] *= &keep;
                    }
                } else {
                    let v = &keep * &row[k] - &take * pk;
                    row[k] = v;
                }
            }
            make_primitive(row);
        }
        rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Reduced row echelon form with unit pivots.
pub fn rref(rows: &[Vec<Q>], cols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| to_primitive_integers(r)).collect();
    let (reduced, pivots) = integer_rref(ints, cols);
    let out = reduced
        .into_iter()
        .zip(&pivots)
        .map(|(row, &p)| {
            let piv = row[p].clone();
            row.into_iter().map(|v| Q::new(v, piv.clone())).collect()
        })
        .collect();
    (out, pivots)
}

pub fn rank(rows: &[Vec<Q>], cols: usize) -> usize {
    let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| to_primitive_integers(r)).collect();
    integer_rref(ints, cols).1.len()
}

/// Null space basis of the system `rows * x = 0` in `cols` unknowns.
///
/// Returns `(basis, free_columns)`: basis vector `i` is 1 at `free_columns[i]`
/// and 0 at every other free column.
pub fn nullspace(rows: &[Vec<Q>], cols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let ints: Vec<Vec<BigInt>> = rows.iter().map(|r| to_primitive_integers(r)).collect();
    nullspace_integer(ints, cols)
}

pub(crate) fn nullspace_integer(rows: Vec<Vec<BigInt>>, cols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let (reduced, pivots) = integer_rref(rows, cols);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (row, &p) in reduced.iter().zip(&pivots) {
                if !row[f].is_zero() {
                    v[p] = Q::new(-row[f].clone(), row[p].clone());
                }
            }
            v
        })
        .collect();
    (basis, free)
}

/// Sparse integer row: `(variable, coefficient)` pairs.
pub type SparseRow = Vec<(usize, BigInt)>;

/// Null space of a sparse homogeneous system, solved block by block.
///
/// Variables coupled by no row are split into independent blocks with a
/// union-find pass; each block is eliminated densely. Returns one sparse basis
/// vector per free variable, keyed and sorted by that variable.
pub fn sparse_nullspace(nvars: usize, rows: &[SparseRow]) -> Vec<(usize, Vec<(usize, Q)>)> {
    let mut uf = UnionFind::new(nvars);
    for row in rows {
        if let Some(&(first, _)) = row.first() {
            for &(v, _) in &row[1..] {
                uf.union(first, v);
            }
        }
    }
    let mut block_of_root: std::collections::HashMap<usize, usize> = Default::default();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for v in 0..nvars {
        let root = uf.find(v);
        let b = *block_of_root.entry(root).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[b].push(v);
    }
    let mut block_rows: Vec<Vec<&SparseRow>> = vec![Vec::new(); blocks.len()];
    for row in rows {
        if let Some(&(first, _)) = row.first() {
            block_rows[block_of_root[&uf.find(first)]].push(row);
        }
    }
    let mut out = Vec::new();
    for (vars, brows) in blocks.iter().zip(&block_rows) {
        if brows.is_empty() {
            for &v in vars {
                out.push((v, vec![(v, Q::one())]));
            }
            continue;
        }
        let local: std::collections::HashMap<usize, usize> =
            vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let dense: Vec<Vec<BigInt>> = brows
            .iter()
            .map(|row| {
                let mut d = vec![BigInt::zero(); vars.len()];
                for (v, c) in row.iter() {
                    d[local[v]] += c;
                }
                d
            })
            .collect();
        let (basis, free) = nullspace_integer(dense, vars.len());
        for (vec, f) in basis.into_iter().zip(free) {
            let sparse = vec
                .into_iter()
                .enumerate()
                .filter(|(_, q)| !q.is_zero())
                .map(|(i, q)| (vars[i], q))
                .collect();
            out.push((vars[f], sparse));
        }
    }
    out.sort_by_key(|(f, _)| *f);
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    #[test]
    fn inverse_and_determinant() {
        let a = Matrix::from_i64_rows(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.determinant(), int(18));
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        let singular = Matrix::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
        assert_eq!(singular.determinant(), int(0));
    }

    #[test]
    fn determinant_with_fractions_and_swaps() {
        let a = Matrix::from_rows(vec![
            vec![int(0), frac(1, 2)],
            vec![frac(2, 3), int(5)],
        ]);
        assert_eq!(a.determinant(), frac(-1, 3));
    }

    #[test]
    fn nullspace_small() {
        // x + y + z = 0, x - z = 0
        let rows = vec![vec![int(1), int(1), int(1)], vec![int(1), int(0), int(-1)]];
        let (basis, free) = nullspace(&rows, 3);
        assert_eq!(free, vec![2]);
        assert_eq!(basis, vec![vec![int(1), int(-2), int(1)]]);
    }

    #[test]
    fn sparse_blocks_match_dense() {
        // two independent blocks: {0,1} with x0 = x1 and {2,3,4} with x2+x3+x4 = 0
        let rows: Vec<SparseRow> = vec![
            vec![(0, BigInt::from(1)), (1, BigInt::from(-1))],
            vec![(2, BigInt::from(1)), (3, BigInt::from(1)), (4, BigInt::from(1))],
        ];
        let sparse = sparse_nullspace(6, &rows);
        assert_eq!(sparse.len(), 4);
        let free: Vec<usize> = sparse.iter().map(|(f, _)| *f).collect();
        assert_eq!(free, vec![1, 3, 4, 5]);
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-3i64..=3, c), r)
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in small_matrix()) {
            let cols = rows[0].len();
            let q: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
            let (basis, _) = nullspace(&q, cols);
            prop_assert_eq!(rank(&q, cols) + basis.len(), cols);
            let m = Matrix::from_rows(q.clone());
            for v in &basis {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn rref_is_idempotent(rows in small_matrix()) {
            let cols = rows[0].len();
            let q: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
            let (once, p1) = rref(&q, cols);
            let (twice, p2) = rref(&once, cols);
            prop_assert_eq!(once, twice);
            prop_assert_eq!(p1, p2);
        }
    }
}
