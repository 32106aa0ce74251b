use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};

/// Sparse integer matrix with arbitrary-precision entries.
///
/// Only nonzero entries are stored; `set` with a zero value removes the entry.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_dense(rows: usize, cols: usize, data: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, row) in data.iter().enumerate() {
            assert_eq!(row.len(), cols, "row {i} has wrong length");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_i64(data: &[&[i64]]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        let dense: Vec<Vec<BigInt>> =
            data.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        Self::from_dense(rows, cols, &dense)
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
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

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of bounds");
        if v.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), v);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn to_qmatrix(&self) -> super::rational::QMatrix {
        let mut m = super::rational::QMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.iter() {
            m.data[i][j] = super::rational::Q::from_integer(v.clone());
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (&(i, j), v) in &self.entries {
            d[i][j] = v.clone();
        }
        d
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (&(i, j), v) in &self.entries {
            t.entries.insert((j, i), v.clone());
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut by_row: BTreeMap<usize, Vec<(usize, &BigInt)>> = BTreeMap::new();
        for (&(k, j), v) in &other.entries {
            by_row.entry(k).or_default().push((j, v));
        }
        let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(j, b) in row {
                    *acc.entry((i, j)).or_insert_with(BigInt::zero) += a * b;
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        IntMatrix { rows: self.rows, cols: other.cols, entries: acc }
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![BigInt::zero(); self.rows];
        for (&(i, j), a) in &self.entries {
            out[i] += a * &v[j];
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination. Square matrices only.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_dense();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let dense = self.to_dense();
        let mut seq = s.serialize_seq(Some(dense.len()))?;
        for row in &dense {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            seq.serialize_element(&cells)?;
        }
        seq.end()
    }
}

/// Result of a Smith normal form computation: `u * m * v == s`.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries of `s` (length `min(rows, cols)`), nonnegative.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i)).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let snf = DenseSmith::compute(m.to_dense(), m.rows(), m.cols(), false);
    let diag = snf.diag.clone();
    SmithDecomposition {
        u: dense_to_sparse(&snf.u),
        s: IntMatrix::diagonal(m.rows(), m.cols(), &diag),
        v: dense_to_sparse(&snf.v),
    }
}

fn dense_to_sparse(d: &[Vec<BigInt>]) -> IntMatrix {
    let rows = d.len();
    let cols = d.first().map_or(0, |r| r.len());
    IntMatrix::from_dense(rows, cols, d)
}

pub(crate) fn identity_dense(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Dense Smith normal form with transforms. `u * a * v = diag`, and when
/// `track_inverses` is set, `u_inv = u^{-1}` and `v_inv = v^{-1}` as well.
pub(crate) struct DenseSmith {
    pub diag: Vec<BigInt>,
    pub rank: usize,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    pub u_inv: Vec<Vec<BigInt>>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub v_inv: Vec<Vec<BigInt>>,
}

impl DenseSmith {
    pub fn compute(mut a: Vec<Vec<BigInt>>, rows: usize, cols: usize, track_inverses: bool) -> Self {
        let mut u = identity_dense(rows);
        let mut v = identity_dense(cols);
        let mut u_inv = if track_inverses { identity_dense(rows) } else { Vec::new() };
        let mut v_inv = if track_inverses { identity_dense(cols) } else { Vec::new() };
        let n = rows.min(cols);
        let mut t = 0;
        while t < n {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            swap_rows(&mut a, &mut u, &mut u_inv, t, pi, track_inverses);
            swap_cols(&mut a, &mut v, &mut v_inv, t, pj, track_inverses);
            loop {
                let mut clean = true;
                for i in t + 1..rows {
                    if a[i][t].is_zero() {
                        continue;
                    }
                    let q = a[i][t].div_floor(&a[t][t]);
                    row_axpy(&mut a, &mut u, &mut u_inv, i, t, &q, track_inverses);
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..cols {
                    if a[t][j].is_zero() {
                        continue;
                    }
                    let q = a[t][j].div_floor(&a[t][t]);
                    col_axpy(&mut a, &mut v, &mut v_inv, j, t, &q, track_inverses);
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    // divisibility of the trailing block by the pivot
                    let mut bad = None;
                    'outer: for i in t + 1..rows {
                        for j in t + 1..cols {
                            if !a[i][j].is_multiple_of(&a[t][t]) {
                                bad = Some(i);
                                break 'outer;
                            }
                        }
                    }
                    match bad {
                        None => break,
                        Some(i) => {
                            let minus_one = -BigInt::one();
                            row_axpy(&mut a, &mut u, &mut u_inv, t, i, &minus_one, track_inverses);
                            continue;
                        }
                    }
                }
                // move the smallest remaining entry of row/column t to the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    swap_rows(&mut a, &mut u, &mut u_inv, t, best.0, track_inverses);
                } else if best.1 != t {
                    swap_cols(&mut a, &mut v, &mut v_inv, t, best.1, track_inverses);
                }
            }
            if a[t][t].is_negative() {
                negate_row(&mut a, &mut u, &mut u_inv, t, track_inverses);
            }
            t += 1;
        }
        let diag: Vec<BigInt> = (0..n).map(|i| a[i][i].clone()).collect();
        let rank = diag.iter().filter(|d| !d.is_zero()).count();
        DenseSmith { diag, rank, u, v, u_inv, v_inv }
    }
}

fn swap_rows(
    a: &mut [Vec<BigInt>],
    u: &mut [Vec<BigInt>],
    u_inv: &mut [Vec<BigInt>],
    i: usize,
    j: usize,
    inv: bool,
) {
    if i == j {
        return;
    }
    a.swap(i, j);
    u.swap(i, j);
    if inv {
        for row in u_inv.iter_mut() {
            row.swap(i, j);
        }
    }
}

fn swap_cols(
    a: &mut [Vec<BigInt>],
    v: &mut [Vec<BigInt>],
    v_inv: &mut [Vec<BigInt>],
    i: usize,
    j: usize,
    inv: bool,
) {
    if i == j {
        return;
    }
    for row in a.iter_mut() {
        row.swap(i, j);
    }
    for row in v.iter_mut() {
        row.swap(i, j);
    }
    if inv {
        v_inv.swap(i, j);
    }
}

fn negate_row(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], u_inv: &mut [Vec<BigInt>], i: usize, inv: bool) {
    for x in a[i].iter_mut() {
        *x = -&*x;
    }
    for x in u[i].iter_mut() {
        *x = -&*x;
    }
    if inv {
        for row in u_inv.iter_mut() {
            row[i] = -&row[i];
        }
    }
}

/// row_i -= q * row_t
fn row_axpy(
    a: &mut [Vec<BigInt>],
    u: &mut [Vec<BigInt>],
    u_inv: &mut [Vec<BigInt>],
    i: usize,
    t: usize,
    q: &BigInt,
    inv: bool,
) {
    if q.is_zero() {
        return;
    }
    let (ri, rt) = pair_mut(a, i, t);
    for (x, y) in ri.iter_mut().zip(rt.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
    let (ui, ut) = pair_mut(u, i, t);
    for (x, y) in ui.iter_mut().zip(ut.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
    if inv {
        for row in u_inv.iter_mut() {
            if !row[i].is_zero() {
                let add = q * &row[i];
                row[t] += add;
            }
        }
    }
}

/// col_j -= q * col_t
fn col_axpy(
    a: &mut [Vec<BigInt>],
    v: &mut [Vec<BigInt>],
    v_inv: &mut [Vec<BigInt>],
    j: usize,
    t: usize,
    q: &BigInt,
    inv: bool,
) {
    if q.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        if !row[t].is_zero() {
            let sub = q * &row[t];
            row[j] -= sub;
        }
    }
    for row in v.iter_mut() {
        if !row[t].is_zero() {
            let sub = q * &row[t];
            row[j] -= sub;
        }
    }
    if inv {
        let (rt, rj) = pair_mut(v_inv, t, j);
        for (x, y) in rt.iter_mut().zip(rj.iter()) {
            if !y.is_zero() {
                *x += q * y;
            }
        }
    }
}

pub(crate) fn pair_mut<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &T) {
    assert_ne!(i, j);
    if i < j {
        let (lo, hi) = v.split_at_mut(j);
        (&mut lo[i], &hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(i);
        (&mut hi[0], &lo[j])
    }
}

/// Row-style Hermite normal form of an integer row lattice.
///
/// Returns the nonzero echelon rows (positive pivots, entries above each pivot
/// reduced into `[0, pivot)`) and, when requested, a unimodular transform `t`
/// with `t * input = [hnf; 0]`; the trailing rows of `t` span the left kernel.
pub(crate) struct Hermite {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
    pub transform: Vec<Vec<BigInt>>,
}

pub(crate) fn hermite(mut a: Vec<Vec<BigInt>>, cols: usize, track: bool) -> Hermite {
    let n = a.len();
    let mut t = if track { identity_dense(n) } else { Vec::new() };
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if r == n {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..n {
                if !a[i][c].is_zero() && best.map_or(true, |b| a[i][c].abs() < a[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            if b != r {
                a.swap(b, r);
                if track {
                    t.swap(b, r);
                }
            }
            let mut done = true;
            for i in r + 1..n {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                sub_row(&mut a, i, r, &q);
                if track {
                    sub_row(&mut t, i, r, &q);
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < n && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -&*x;
                }
                if track {
                    for x in t[r].iter_mut() {
                        *x = -&*x;
                    }
                }
            }
            for i in 0..r {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                sub_row(&mut a, i, r, &q);
                if track {
                    sub_row(&mut t, i, r, &q);
                }
            }
            pivots.push(c);
            r += 1;
        }
    }
    a.truncate(r);
    Hermite { rows: a, pivots, transform: t }
}

fn sub_row(a: &mut [Vec<BigInt>], i: usize, r: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (ri, rr) = pair_mut(a, i, r);
    for (x, y) in ri.iter_mut().zip(rr.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

/// A ZZ-basis of `{c : sum_i c_i * rows[i] = 0}`.
pub(crate) fn integer_left_kernel(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let h = hermite(rows.to_vec(), cols, true);
    let rank = h.rows.len();
    h.transform[rank..].to_vec()
}
