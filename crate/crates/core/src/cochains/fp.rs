//! Echelon forms over F_p with word-size arithmetic.

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

/// Echelon basis over F_p where every row carries a tag vector recording
/// its coordinates in a chosen generating set.
#[derive(Clone, Debug)]
pub(crate) struct FpEchelon {
    pub p: u64,
    pub rows: Vec<Vec<u64>>,
    pub tags: Vec<Vec<u64>>,
    pub pivots: Vec<usize>,
    tag_len: usize,
}

impl FpEchelon {
    pub fn new(p: u64, tag_len: usize) -> Self {
        FpEchelon { p, rows: Vec::new(), tags: Vec::new(), pivots: Vec::new(), tag_len }
    }

    /// Reduces `v` in place, returning the accumulated tag of the subtracted combination.
    pub fn reduce(&self, v: &mut [u64]) -> Vec<u64> {
        let p = self.p;
        let mut acc = vec![0u64; self.tag_len];
        for ((row, tag), &c) in self.rows.iter().zip(&self.tags).zip(&self.pivots) {
            let f = v[c] % p;
            if f == 0 {
                continue;
            }
            for (x, y) in v.iter_mut().zip(row) {
                *x = (*x + p * p - f * y % p) % p;
            }
            for (a, t) in acc.iter_mut().zip(tag) {
                *a = (*a + f * t) % p;
            }
        }
        acc
    }

    /// Inserts `v` with the given tag; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<u64>, tag: Vec<u64>) -> bool {
        let p = self.p;
        let mut w: Vec<u64> = v.iter().map(|x| x % p).collect();
        let acc = self.reduce(&mut w);
        let Some(c) = w.iter().position(|&x| x != 0) else { return false };
        let mut t: Vec<u64> = tag.iter().zip(&acc).map(|(a, b)| (a % p + p - b) % p).collect();
        let inv = inv_mod(w[c], p);
        for x in w.iter_mut() {
            *x = *x * inv % p;
        }
        for x in t.iter_mut() {
            *x = *x * inv % p;
        }
        self.pivots.push(c);
        self.rows.push(w);
        self.tags.push(t);
        true
    }
}

/// Basis of the kernel of the `rows x cols` matrix over F_p.
pub(crate) fn nullspace_mod(p: u64, mut a: Vec<Vec<u64>>, cols: usize) -> Vec<Vec<u64>> {
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let Some(i) = (r..a.len()).find(|&i| a[i][c] % p != 0) else { continue };
        a.swap(i, r);
        let inv = inv_mod(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = *x % p * inv % p;
        }
        let pr = a[r].clone();
        for (k, row) in a.iter_mut().enumerate() {
            if k == r {
                continue;
            }
            let f = row[c] % p;
            if f != 0 {
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x = (*x % p + p - f * y % p) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![0u64; cols];
            x[f] = 1;
            for (row, &pc) in a.iter().zip(&pivots) {
                x[pc] = (p - row[f] % p) % p;
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mod_prime() {
        for p in [2u64, 3, 5, 7] {
            for a in 1..p {
                assert_eq!(a * inv_mod(a, p) % p, 1);
            }
        }
    }

    #[test]
    fn nullspace_over_f2() {
        let a = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let ns = nullspace_mod(2, a, 3);
        assert_eq!(ns, vec![vec![1, 1, 1]]);
    }

    #[test]
    fn tagged_reduction() {
        let mut e = FpEchelon::new(3, 2);
        e.insert(vec![1, 1], vec![1, 0]);
        e.insert(vec![0, 1], vec![0, 1]);
        let mut v = vec![2, 0];
        let t = e.reduce(&mut v);
        assert_eq!(v, vec![0, 0]);
        // (2,0) = 2*(1,1) - 2*(0,1) = 2*(1,1) + 1*(0,1) mod 3
        assert_eq!(t, vec![2, 1]);
    }
}
