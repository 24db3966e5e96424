//! Small dense linear algebra over `Q` and `Z`.

use crate::arith::Q;
use num::{BigInt, One, Signed, Zero};

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(mut rows: Vec<Vec<Q>>) -> (Vec<Vec<Q>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Basis of `{x : M x = 0}` for the matrix with the given rows and `ncols` columns.
pub fn nullspace(rows: Vec<Vec<Q>>, ncols: usize) -> Vec<Vec<Q>> {
    let (red, pivots) = rref(rows);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); ncols];
            v[f] = Q::one();
            for (row, &p) in red.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn rank_int(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            for j in c + 1..ncols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

pub fn to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// `det [[a0, a1], [b0, b1]]`.
pub fn det2(a0: &BigInt, a1: &BigInt, b0: &BigInt, b1: &BigInt) -> BigInt {
    a0 * b1 - a1 * b0
}

/// Finds a coordinate pair on which `u` and `w` are independent.
pub fn independent_pair(u: &[BigInt], w: &[BigInt]) -> Option<(usize, usize)> {
    let n = u.len();
    let mut best: Option<((usize, usize), BigInt)> = None;
    for s in 0..n {
        for t in s + 1..n {
            let d = det2(&u[s], &u[t], &w[s], &w[t]).abs();
            if !d.is_zero() && best.as_ref().is_none_or(|(_, b)| d < *b) {
                best = Some(((s, t), d));
            }
        }
    }
    best.map(|(p, _)| p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qi;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()
    }

    #[test]
    fn rref_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let (red, piv) = rref(a.clone());
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(red.len(), 2);
        let ns = nullspace(a.clone(), 3);
        assert_eq!(ns.len(), 1);
        for row in &a {
            let dot: Q = row.iter().zip(&ns[0]).map(|(x, y)| x * y).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn integer_rank_matches_rational_rank() {
        let rows: Vec<Vec<BigInt>> = [[2, 4, 1, 0], [1, 2, 0, 3], [3, 6, 1, 3], [0, 0, 5, 1]]
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let q: Vec<Vec<Q>> = rows.iter().map(|r| to_q(r)).collect();
        assert_eq!(rank_int(&rows), rref(q).1.len());
        assert_eq!(rank_int(&rows), 3);
    }
}
