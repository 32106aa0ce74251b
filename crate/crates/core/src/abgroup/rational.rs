//! Dense exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero_vec(n: usize) -> Vec<Q> {
    vec![Q::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Q> {
    let mut v = zero_vec(n);
    v[i] = Q::one();
    v
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn axpy(y: &mut [Q], a: &Q, x: &[Q]) {
    if a.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

pub fn scale(v: &[Q], a: &Q) -> Vec<Q> {
    v.iter().map(|x| x * a).collect()
}

pub fn sub_vec(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// Integer vector if every entry is integral.
pub fn to_z(v: &[Q]) -> Option<Vec<BigInt>> {
    v.iter().map(|x| if x.is_integer() { Some(x.to_integer()) } else { None }).collect()
}

/// Least common multiple of denominators.
pub fn common_denominator<'a>(vals: impl IntoIterator<Item = &'a Q>) -> BigInt {
    vals.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Matrix stored as rows, applied to column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<Q>>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![zero_vec(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Q::one();
        }
        m
    }

    /// Build from column vectors, each of length `rows`.
    pub fn from_columns(rows: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                m.data[i][j] = x.clone();
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Q>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| {
                let mut s = Q::zero();
                for (a, b) in row.iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| is_zero_vec(r))
    }
}

/// Row echelon data of a list of vectors: reduced rows with unit pivots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub dim: usize,
    pub rows: Vec<Vec<Q>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn empty(dim: usize) -> Self {
        Rref { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_rows(dim: usize, vecs: impl IntoIterator<Item = Vec<Q>>) -> Self {
        let mut r = Self::empty(dim);
        for v in vecs {
            r.insert(v);
        }
        r
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Residue of `v` after clearing every pivot coordinate.
    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let c = w[p].clone();
                axpy(&mut w, &-c, row);
            }
        }
        w
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Coefficients of `v` in terms of the echelon rows, if `v` lies in the span.
    pub fn coords(&self, v: &[Q]) -> Option<Vec<Q>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Adds a vector; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<Q>) -> bool {
        assert_eq!(v.len(), self.dim);
        let mut w = self.reduce(&v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else { return false };
        let inv = w[p].recip();
        for x in w.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let c = row[p].clone();
                axpy(row, &-c, &w);
            }
        }
        let pos = self.pivots.iter().position(|&q| q > p).unwrap_or(self.pivots.len());
        self.pivots.insert(pos, p);
        self.rows.insert(pos, w);
        true
    }

    /// Coordinates outside the pivot set; a basis of the quotient by this span.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.dim).filter(|c| !self.pivots.contains(c)).collect()
    }
}

/// Basis of `{x : sum_j x_j * cols[j] = 0}` for column vectors of length `m`.
pub fn nullspace(m: usize, cols: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let a = cols.len();
    let mat = QMatrix::from_columns(m, cols);
    let (rref, pivots) = row_reduce(mat.data, a);
    let free: Vec<usize> = (0..a).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = zero_vec(a);
            x[f] = Q::one();
            for (row, &p) in rref.iter().zip(&pivots) {
                x[p] = -row[f].clone();
            }
            x
        })
        .collect()
}

/// Some solution of `sum_j x_j * cols[j] = target`.
pub fn solve(m: usize, cols: &[Vec<Q>], target: &[Q]) -> Option<Vec<Q>> {
    let a = cols.len();
    let mut aug = QMatrix::from_columns(m, cols).data;
    for (row, t) in aug.iter_mut().zip(target) {
        row.push(t.clone());
    }
    let (rref, pivots) = row_reduce(aug, a + 1);
    if pivots.last() == Some(&a) {
        return None;
    }
    let mut x = zero_vec(a);
    for (row, &p) in rref.iter().zip(&pivots) {
        x[p] = row[a].clone();
    }
    Some(x)
}

/// Left inverse of a full-column-rank matrix given by columns: `L * B = I`.
pub fn left_inverse(m: usize, cols: &[Vec<Q>]) -> QMatrix {
    let k = cols.len();
    let mut aug = QMatrix::from_columns(m, cols).data;
    for (i, row) in aug.iter_mut().enumerate() {
        for j in 0..m {
            row.push(if i == j { Q::one() } else { Q::zero() });
        }
    }
    let (rref, pivots) = row_reduce(aug, k + m);
    assert!(
        pivots.len() >= k && pivots[..k].iter().enumerate().all(|(i, &p)| i == p),
        "left_inverse: columns are dependent"
    );
    let data: Vec<Vec<Q>> = rref[..k].iter().map(|r| r[k..].to_vec()).collect();
    QMatrix { rows: k, cols: m, data }
}

/// Gauss-Jordan elimination; returns the nonzero rows and their pivot columns.
pub fn row_reduce(mut a: Vec<Vec<Q>>, cols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let Some(i) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(i, r);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[r].clone();
        for (k, row) in a.iter_mut().enumerate() {
            if k != r && !row[c].is_zero() {
                let f = row[c].clone();
                axpy(row, &-f, &pivot_row);
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(rows: &[Vec<Q>], cols: usize) -> usize {
    row_reduce(rows.to_vec(), cols).1.len()
}
