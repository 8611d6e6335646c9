//! Exact linear algebra over any [`Field`]: sparse incremental echelon forms
//! for large subspace computations and small dense matrices for geometry.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::scalars::{Field, ScalarError};

/// A sparse vector: strictly increasing column indices with nonzero entries.
pub type SparseVec<F> = Vec<(usize, F)>;

fn axpy<F: Field>(target: &[(usize, F)], c: &F, row: &[(usize, F)]) -> SparseVec<F> {
    // target - c * row
    let mut out = Vec::with_capacity(target.len() + row.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < row.len() {
        if j == row.len() || (i < target.len() && target[i].0 < row[j].0) {
            out.push(target[i].clone());
            i += 1;
        } else if i == target.len() || row[j].0 < target[i].0 {
            out.push((row[j].0, c.mul(&row[j].1).neg()));
            j += 1;
        } else {
            let v = target[i].1.sub(&c.mul(&row[j].1));
            if !v.is_zero() {
                out.push((target[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row echelon basis of a subspace, built one vector at a time.
///
/// Every stored row has its leading entry equal to one and no two rows
/// share a leading column.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    ncols: usize,
    rows: BTreeMap<usize, SparseVec<F>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: BTreeMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<F>> {
        self.rows.values()
    }

    /// Reduce `v` by leading terms until its lead is not a pivot.
    pub fn reduce(&self, mut v: SparseVec<F>) -> SparseVec<F> {
        let mut start = 0;
        while start < v.len() {
            let (col, c) = &v[start];
            match self.rows.get(col) {
                Some(row) => {
                    let c = c.clone();
                    let head = v[..start].to_vec();
                    let mut tail = axpy(&v[start..], &c, row);
                    let mut merged = head;
                    merged.append(&mut tail);
                    v = merged;
                }
                None => start += 1,
            }
        }
        v
    }

    /// Fully reduce against the basis; returns the residue.
    fn residue(&self, v: SparseVec<F>) -> SparseVec<F> {
        self.reduce(v)
    }

    /// Insert a vector; returns true when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec<F>) -> bool {
        debug_assert!(v.iter().all(|(c, x)| *c < self.ncols && !x.is_zero()));
        let mut v = v;
        loop {
            let Some((col, c)) = v.first() else {
                return false;
            };
            match self.rows.get(col) {
                Some(row) => {
                    let c = c.clone();
                    v = axpy(&v, &c, row);
                }
                None => {
                    let inv = c.inv().expect("nonzero field element must be invertible");
                    let col = *col;
                    let row: SparseVec<F> = v.into_iter().map(|(j, x)| (j, x.mul(&inv))).collect();
                    self.rows.insert(col, row);
                    return true;
                }
            }
        }
    }

    pub fn contains(&self, v: &SparseVec<F>) -> bool {
        let mut v = v.clone();
        loop {
            let Some((col, c)) = v.first() else {
                return true;
            };
            match self.rows.get(col) {
                Some(row) => {
                    let c = c.clone();
                    v = axpy(&v, &c, row);
                }
                None => return false,
            }
        }
    }

    /// Residue of `v` modulo the span with all pivot columns cleared.
    pub fn normal_form(&self, v: &SparseVec<F>) -> SparseVec<F> {
        self.residue(v.clone())
    }

    /// Reduced row echelon basis (pivot columns cleared in all other rows).
    pub fn reduced_rows(&self) -> Vec<SparseVec<F>> {
        let mut done: BTreeMap<usize, SparseVec<F>> = BTreeMap::new();
        for (&p, row) in self.rows.iter().rev() {
            let mut r = row.clone();
            let mut k = 1;
            while k < r.len() {
                let (col, c) = &r[k];
                if let Some(other) = done.get(col) {
                    let c = c.clone();
                    let head = r[..k].to_vec();
                    let mut tail = axpy(&r[k..], &c, other);
                    let mut merged = head;
                    merged.append(&mut tail);
                    r = merged;
                } else {
                    k += 1;
                }
            }
            done.insert(p, r);
        }
        done.into_values().collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

/// Split vectors into groups with disjoint column supports.
fn components<F: Field>(vectors: &[SparseVec<F>], ncols: usize) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(ncols);
    for v in vectors {
        if let Some((first, _)) = v.first() {
            for (c, _) in &v[1..] {
                uf.union(*first, *c);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, v) in vectors.iter().enumerate() {
        if let Some((first, _)) = v.first() {
            let root = uf.find(*first);
            groups.entry(root).or_default().push(i);
        }
    }
    groups.into_values().collect()
}

/// Dimension of the span of `vectors`, split into independent column blocks
/// that are reduced in parallel.
pub fn span_rank<F: Field>(vectors: &[SparseVec<F>], ncols: usize) -> usize {
    let groups = components(vectors, ncols);
    groups
        .par_iter()
        .map(|idx| {
            let mut ech = Echelon::new(ncols);
            let mut sorted: Vec<&SparseVec<F>> = idx.iter().map(|&i| &vectors[i]).collect();
            sorted.sort_by_key(|v| v.len());
            for v in sorted {
                ech.insert(v.clone());
            }
            ech.rank()
        })
        .sum()
}

/// Echelon basis of the span, built block by block.
pub fn span_echelon<F: Field>(vectors: &[SparseVec<F>], ncols: usize) -> Echelon<F> {
    let groups = components(vectors, ncols);
    let parts: Vec<Echelon<F>> = groups
        .par_iter()
        .map(|idx| {
            let mut ech = Echelon::new(ncols);
            for &i in idx {
                ech.insert(vectors[i].clone());
            }
            ech
        })
        .collect();
    let mut all = Echelon::new(ncols);
    for part in parts {
        all.rows.extend(part.rows);
    }
    all
}

/// A dense matrix over a field.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn filled(rows: usize, cols: usize, value: F) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn identity(n: usize, one: &F) -> Self {
        let zero = one.zero_like();
        let mut m = Matrix::filled(n, n, zero);
        for i in 0..n {
            m.data[i * n + i] = one.clone();
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let zero = self.data.first().or(rhs.data.first()).expect("empty product").zero_like();
        let mut out = Matrix::filled(self.rows, rhs.cols, zero.clone());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc.add(&a.mul(x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, c: &F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    pub fn add(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j).sub(&f.mul(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.data.is_empty() {
            return 0;
        }
        self.rref().1.len()
    }

    /// Basis of the right kernel {v : M v = 0}.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let Some(sample) = self.data.first() else {
            return Vec::new();
        };
        let zero = sample.zero_like();
        let one = sample.one_like();
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![zero.clone(); self.cols];
                v[f] = one.clone();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = r.get(i, f).neg();
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> F {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut det = m.data[0].one_like();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return det.zero_like();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = det.neg();
            }
            let piv = m.get(c, c).clone();
            det = det.mul(&piv);
            let inv = piv.inv().expect("pivot is nonzero");
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).mul(&inv);
                for j in c..n {
                    let v = m.get(i, j).sub(&f.mul(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<Matrix<F>, ScalarError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let one = self.data[0].one_like();
        let id = Matrix::identity(n, &one);
        let mut aug = Matrix::filled(n, 2 * n, one.zero_like());
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
                aug.set(i, n + j, id.get(i, j).clone());
            }
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(ScalarError::ZeroDivisor);
        }
        let mut out = Matrix::filled(n, n, one.zero_like());
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Ok(out)
    }
}

/// True when `u` and `v` are nonzero and proportional.
pub fn proportional<F: Field>(u: &[F], v: &[F]) -> bool {
    if u.len() != v.len() {
        return false;
    }
    let Some(k) = u.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    if v[k].is_zero() {
        return false;
    }
    // u_i v_k == v_i u_k for all i
    u.iter()
        .zip(v)
        .all(|(a, b)| a.mul(&v[k]) == b.mul(&u[k]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn sv(entries: &[(usize, i64)]) -> SparseVec<Rat> {
        entries.iter().map(|&(c, x)| (c, r(x))).collect()
    }

    #[test]
    fn echelon_rank_and_membership() {
        let mut e = Echelon::new(4);
        assert!(e.insert(sv(&[(0, 1), (1, 2)])));
        assert!(e.insert(sv(&[(1, 1), (2, 1)])));
        assert!(!e.insert(sv(&[(0, 2), (1, 5), (2, 1)])));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&sv(&[(0, 1), (1, 3), (2, 1)])));
        assert!(!e.contains(&sv(&[(3, 1)])));
        assert!(e.contains(&Vec::new()));
    }

    #[test]
    fn reduced_rows_clear_pivot_columns() {
        let mut e = Echelon::new(3);
        e.insert(sv(&[(0, 1), (1, 1)]));
        e.insert(sv(&[(1, 1), (2, 1)]));
        let rows = e.reduced_rows();
        assert_eq!(rows[0], sv(&[(0, 1), (2, -1)]));
        assert_eq!(rows[1], sv(&[(1, 1), (2, 1)]));
    }

    #[test]
    fn block_rank_matches_plain_rank() {
        let vs = vec![
            sv(&[(0, 1), (1, 1)]),
            sv(&[(2, 1), (3, 1)]),
            sv(&[(0, 2), (1, 2)]),
            sv(&[(3, 1), (4, 1)]),
        ];
        assert_eq!(span_rank(&vs, 5), 3);
        assert_eq!(span_echelon(&vs, 5).rank(), 3);
    }

    #[test]
    fn dense_rank_kernel_det() {
        let m = Matrix::from_rows(vec![vec![r(1), r(2), r(3)], vec![r(2), r(4), r(6)], vec![r(1), r(0), r(1)]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).iter().all(Rat::is_zero));
        assert!(m.det().is_zero());
        let a = Matrix::from_rows(vec![vec![r(2), r(1)], vec![r(7), r(4)]]);
        assert_eq!(a.det(), r(1));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2, &r(1)));
    }

    #[test]
    fn singular_inverse_is_an_error() {
        let a = Matrix::from_rows(vec![vec![r(1), r(2)], vec![r(2), r(4)]]);
        assert!(a.inverse().is_err());
    }

    #[test]
    fn proportional_vectors() {
        assert!(proportional(&[r(1), r(2)], &[r(-2), r(-4)]));
        assert!(!proportional(&[r(1), r(2)], &[r(1), r(3)]));
        assert!(!proportional(&[r(0), r(0)], &[r(0), r(0)]));
    }
}
