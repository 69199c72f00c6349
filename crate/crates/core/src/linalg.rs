//! Small dense linear algebra over a [`Field`] and exact integer predicates.

use crate::arith::{reduce_i128, Field};

fn pivot_row<S: Field>(m: &[Vec<S>], col: usize, from: usize) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for (r, row) in m.iter().enumerate().skip(from) {
        let a = row[col].abs();
        if a.is_zero() {
            continue;
        }
        match &best {
            Some((_, b)) if *b >= a => {}
            _ => best = Some((r, a)),
        }
    }
    best.map(|(r, _)| r)
}

/// Determinant by elimination with maximal-magnitude pivoting.
pub fn det<S: Field>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    let mut acc = S::one();
    for c in 0..n {
        let Some(p) = pivot_row(&m, c, c) else {
            return S::zero();
        };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        let piv = m[c][c].clone();
        acc = acc * piv.clone();
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].clone() / piv.clone();
            for k in c..n {
                let t = m[c][k].clone() * f.clone();
                m[r][k] = m[r][k].clone() - t;
            }
        }
    }
    acc
}

/// Solve `a x = b`; `None` when `a` is singular.
pub fn solve<S: Field>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = a.len();
    for c in 0..n {
        let p = pivot_row(&a, c, c)?;
        a.swap(p, c);
        b.swap(p, c);
        let piv = a[c][c].clone();
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone() / piv.clone();
            for k in c..n {
                let t = a[c][k].clone() * f.clone();
                a[r][k] = a[r][k].clone() - t;
            }
            let t = b[c].clone() * f;
            b[r] = b[r].clone() - t;
        }
    }
    Some((0..n).map(|i| b[i].clone() / a[i][i].clone()).collect())
}

/// Rank of a list of row vectors.
pub fn rank<S: Field>(rows: &[Vec<S>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<S>> = rows.to_vec();
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = pivot_row(&m, c, r) else {
            continue;
        };
        m.swap(p, r);
        let piv = m[r][c].clone();
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() / piv.clone();
            for k in c..cols {
                let t = m[r][k].clone() * f.clone();
                m[i][k] = m[i][k].clone() - t;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Exact rank of integer rows.
pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    let m: Vec<Vec<crate::arith::Rational>> =
        rows.iter().map(|r| crate::arith::to_field(r)).collect();
    rank(&m)
}

/// Exact determinant of an integer matrix by fraction-free (Bareiss) elimination.
///
/// Returns `None` on `i128` overflow.
pub fn det_i128(rows: &[Vec<i64>]) -> Option<i128> {
    let n = rows.len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return Some(0);
            };
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k])?;
                let b = m[i][k].checked_mul(m[k][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
        }
        prev = m[k][k];
    }
    Some(sign * m[n - 1][n - 1])
}

/// Integer normal to the hyperplane spanned by `d - 1` vectors in `Z^d`.
///
/// Entries are signed cofactors, reduced by their gcd. Returns `None` when the
/// vectors are dependent or a cofactor overflows.
pub fn integer_normal(vectors: &[&[i64]]) -> Option<Vec<i128>> {
    let d = vectors.len() + 1;
    let mut n = Vec::with_capacity(d);
    for i in 0..d {
        let minor: Vec<Vec<i64>> = vectors
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let c = if minor.is_empty() { 1 } else { det_i128(&minor)? };
        n.push(if (i + d - 1) % 2 == 0 { c } else { -c });
    }
    if n.iter().all(|&x| x == 0) {
        return None;
    }
    reduce_i128(&mut n);
    Some(n)
}

/// Solve a symmetric positive definite system by Cholesky factorization.
pub fn cholesky_solve(h: &[Vec<f64>], g: &[f64]) -> Option<Vec<f64>> {
    let n = h.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let v = h[i][i] - s;
                if v <= 0.0 || !v.is_finite() {
                    return None;
                }
                l[i][j] = v.sqrt();
            } else {
                l[i][j] = (h[i][j] - s) / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let s: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = (g[i] - s) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| l[k][i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i][i];
    }
    Some(x)
}

/// Matrix with the given vectors as columns.
pub fn columns<S: Clone>(cols: &[Vec<S>]) -> Vec<Vec<S>> {
    let d = cols[0].len();
    (0..d)
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, Rational};

    #[test]
    fn det_matches_bareiss() {
        let m = vec![vec![2, -1, 3], vec![0, 4, 1], vec![5, 2, -2]];
        let exact = det_i128(&m).unwrap();
        let f: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        assert!((det(f) - exact as f64).abs() < 1e-9);
        let q: Vec<Vec<Rational>> = m.iter().map(|r| crate::arith::to_field(r)).collect();
        assert_eq!(det(q), rat(exact as i64, 1));
        assert_eq!(exact, -85);
    }

    #[test]
    fn solve_exact() {
        let a = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(0, 1), rat(2, 1)]];
        let x = solve(a, vec![rat(1, 1), rat(1, 1)]).unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 2)]);
        let singular = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]];
        assert!(solve(singular, vec![rat(0, 1), rat(0, 1)]).is_none());
    }

    #[test]
    fn normals_are_orthogonal() {
        let a = [1i64, 2, 3];
        let b = [-2i64, 0, 5];
        let n = integer_normal(&[&a, &b]).unwrap();
        let dot = |v: &[i64]| v.iter().zip(&n).map(|(&x, &y)| x as i128 * y).sum::<i128>();
        assert_eq!(dot(&a), 0);
        assert_eq!(dot(&b), 0);
        assert_eq!(integer_normal(&[&[1, 0]]).unwrap(), vec![0, 1]);
        assert!(integer_normal(&[&[1, 2, 3], &[2, 4, 6]]).is_none());
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_i64(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]]), 2);
    }

    #[test]
    fn cholesky() {
        let h = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let x = cholesky_solve(&h, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        assert!(cholesky_solve(&[vec![-1.0]], &[1.0]).is_none());
    }
}
