//! Exact elimination over the rationals, plus a unit-pivot variant over
//! polynomial rings used when every pivot can be chosen constant.

use super::matrix::{Matrix, PMatrix, QMatrix, Ring};
use super::poly::Polynomial;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Outcome of [`solve_exact`].
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Unique(Vec<Rational>),
    Underdetermined {
        particular: Vec<Rational>,
        kernel: Vec<Vec<Rational>>,
    },
    /// `certificate` is a combination `y` of the rows with `yᵀA = 0` and `yᵀb ≠ 0`.
    Inconsistent {
        certificate: Vec<Rational>,
    },
}

/// Reduced row echelon form. Returns the reduced matrix and its pivot columns.
pub fn rref(a: &QMatrix) -> (QMatrix, Vec<usize>) {
    let (r, _, p) = rref_tracked(a);
    (r, p)
}

/// As [`rref`], also returning the transform `T` with `T·a = rref(a)`.
fn rref_tracked(a: &QMatrix) -> (QMatrix, QMatrix, Vec<usize>) {
    let rows = a.rows();
    let cols = a.cols();
    let mut m: Vec<Vec<Rational>> = (0..rows).map(|i| a.row(i).to_vec()).collect();
    let mut t: Vec<Vec<Rational>> =
        (0..rows).map(|i| (0..rows).map(|j| if i == j { Ring::one() } else { Ring::zero() }).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        t.swap(r, piv);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for v in t[r].iter_mut() {
            *v *= &inv;
        }
        let (prow, trow) = (m[r].clone(), t[r].clone());
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for (v, p) in m[i].iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
            for (v, p) in t[i].iter_mut().zip(&trow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let to_mat = |rows_: Vec<Vec<Rational>>, c: usize| {
        if rows_.is_empty() {
            QMatrix::zeros(0, c)
        } else {
            QMatrix::from_rows(rows_).expect("rectangular")
        }
    };
    (to_mat(m, cols), to_mat(t, rows), pivots)
}

pub fn rank(a: &QMatrix) -> usize {
    rref(a).1.len()
}

/// Basis of `{v : a·v = 0}`, one vector per free column.
pub fn kernel(a: &QMatrix) -> Vec<Vec<Rational>> {
    let (r, pivots) = rref(a);
    kernel_from_rref(&r, &pivots)
}

fn kernel_from_rref(r: &QMatrix, pivots: &[usize]) -> Vec<Vec<Rational>> {
    let cols = r.cols();
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![<Rational as Ring>::zero(); cols];
        v[free] = Ring::one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = -r[(row, free)].clone();
        }
        out.push(v);
    }
    out
}

/// Solves `a·v = b` exactly.
pub fn solve_exact(a: &QMatrix, b: &[Rational]) -> Result<Solution> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!("rhs length {} vs {} rows", b.len(), a.rows())));
    }
    let (r, t, pivots) = rref_tracked(a);
    let tb = t.mul_vec(b);
    for (i, v) in tb.iter().enumerate().skip(pivots.len()) {
        if !v.is_zero() {
            return Ok(Solution::Inconsistent { certificate: t.row(i).to_vec() });
        }
    }
    let mut particular = vec![<Rational as Ring>::zero(); a.cols()];
    for (row, &p) in pivots.iter().enumerate() {
        particular[p] = tb[row].clone();
    }
    let ker = kernel_from_rref(&r, &pivots);
    Ok(if ker.is_empty() {
        Solution::Unique(particular)
    } else {
        Solution::Underdetermined { particular, kernel: ker }
    })
}

/// Solves `a·X = B` for many right-hand sides at once, demanding a unique
/// solution for each. Errors carry the offending column index.
pub fn solve_unique_multi(a: &QMatrix, rhs: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let (_, t, pivots) = rref_tracked(a);
    if pivots.len() != a.cols() {
        return Err(Error::Singular);
    }
    let mut out = Vec::with_capacity(rhs.len());
    for (k, b) in rhs.iter().enumerate() {
        if b.len() != a.rows() {
            return Err(Error::Dimension(format!("rhs {k} has length {}", b.len())));
        }
        let tb = t.mul_vec(b);
        if tb[pivots.len()..].iter().any(|v| !v.is_zero()) {
            return Err(Error::Internal(format!("right-hand side {k} outside column space")));
        }
        out.push(tb[..pivots.len()].to_vec());
    }
    Ok(out)
}

pub fn inverse(a: &QMatrix) -> Result<QMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension("inverse of non-square matrix".into()));
    }
    let (_, t, pivots) = rref_tracked(a);
    if pivots.len() != a.rows() {
        return Err(Error::Singular);
    }
    Ok(t)
}

/// Kernel of a polynomial matrix, provided every elimination step finds a
/// nonzero constant pivot. The returned vectors have polynomial entries.
pub fn unit_pivot_kernel(a: &PMatrix) -> Result<Vec<Vec<Polynomial>>> {
    let rows = a.rows();
    let cols = a.cols();
    let mut m: Vec<Vec<Polynomial>> = (0..rows).map(|i| a.row(i).to_vec()).collect();
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; rows];
    let mut used = vec![false; cols];
    for r in 0..rows {
        if m[r].iter().all(|v| v.is_zero()) {
            continue;
        }
        let Some(c) = (0..cols).find(|&c| !used[c] && !m[r][c].is_zero() && m[r][c].is_constant()) else {
            return Err(Error::Internal(format!("row {r} has no constant pivot")));
        };
        let inv = m[r][c].constant_value().unwrap().recip();
        for v in m[r].iter_mut() {
            *v = v.scale(&inv);
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &(&f * p);
                }
            }
        }
        used[c] = true;
        pivot_of_row[r] = Some(c);
    }
    let mut out = Vec::new();
    for free in (0..cols).filter(|&c| !used[c]) {
        let mut v = vec![Polynomial::zero(); cols];
        v[free] = Polynomial::one();
        for (r, p) in pivot_of_row.iter().enumerate() {
            if let Some(p) = *p {
                v[p] = -&m[r][free];
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// True when `a·v == 0` exactly.
pub fn annihilates<T: Ring>(a: &Matrix<T>, v: &[T]) -> bool {
    a.mul_vec(v).iter().all(|e| e.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational::{int, rat};

    fn q(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn identity_system() {
        let s = solve_exact(&QMatrix::identity(3), &[int(1), int(2), int(3)]).unwrap();
        assert_eq!(s, Solution::Unique(vec![int(1), int(2), int(3)]));
    }

    #[test]
    fn rank_one_system() {
        let a = q(&[&[1, 1], &[2, 2]]);
        match solve_exact(&a, &[int(1), int(2)]).unwrap() {
            Solution::Underdetermined { particular, kernel } => {
                assert_eq!(particular, vec![int(1), int(0)]);
                assert_eq!(kernel, vec![vec![int(-1), int(1)]]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inconsistent_certificate() {
        let a = q(&[&[1, 1], &[2, 2]]);
        let b = [int(1), int(3)];
        let Solution::Inconsistent { certificate } = solve_exact(&a, &b).unwrap() else {
            panic!("expected inconsistency");
        };
        let at = a.transpose();
        assert!(annihilates(&at, &certificate));
        let yb: Rational = certificate.iter().zip(&b).map(|(y, v)| y * v).sum();
        assert!(!yb.is_zero());
    }

    #[test]
    fn gram_inverse_matches_adjugate() {
        let g = q(&[&[2, -1], &[-1, 2]]);
        let inv = inverse(&g).unwrap();
        // adj / det with det = 3
        let expect = QMatrix::from_rows(vec![vec![rat(2, 3), rat(1, 3)], vec![rat(1, 3), rat(2, 3)]]).unwrap();
        assert_eq!(inv, expect);
        assert!(inverse(&q(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn polynomial_kernel() {
        use crate::scalar::poly::Var;
        let x = Polynomial::var(Var::X);
        // u + x v = 0
        let a = PMatrix::from_rows(vec![vec![Polynomial::one(), x.clone()]]).unwrap();
        let k = unit_pivot_kernel(&a).unwrap();
        assert_eq!(k, vec![vec![-&x, Polynomial::one()]]);
        assert!(annihilates(&a, &k[0]));
    }
}
