//! Small exact linear algebra: rank over ℚ and solvability of `Ax = b` over ℤ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Row-reduces a copy of `rows` over ℚ and returns `(rank, pivot columns)`.
pub fn rank_with_pivots(rows: &[Vec<Rational>]) -> (usize, Vec<usize>) {
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let ncols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[row].clone();
        for (r, other) in a.iter_mut().enumerate() {
            if r != row && !other[col].is_zero() {
                let f = other[col].clone();
                for (x, y) in other.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    (pivots.len(), pivots)
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    rank_with_pivots(rows).0
}

/// Finds an integer solution of `A x = b`, if one exists.
///
/// Column operations by unimodular `U` bring `A` to a column echelon form
/// `H = A U`; then `H y = b` is solved by forward substitution with
/// integrality checks, free coordinates of `y` set to zero, and `x = U y`.
pub fn solve_integer(a: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let m = a.len();
    assert_eq!(m, b.len(), "row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    let mut h: Vec<Vec<BigInt>> = a.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();

    let col_op = |mat: &mut Vec<Vec<BigInt>>, i: usize, j: usize, c: [[BigInt; 2]; 2]| {
        // (col_i, col_j) ← (c00·col_i + c01·col_j, c10·col_i + c11·col_j)
        for row in mat.iter_mut() {
            let (x, y) = (row[i].clone(), row[j].clone());
            row[i] = &c[0][0] * &x + &c[0][1] * &y;
            row[j] = &c[1][0] * &x + &c[1][1] * &y;
        }
    };

    // pivot_of_row[r] = Some(col) if row r carries a pivot.
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; m];
    let mut next_col = 0;
    for r in 0..m {
        if next_col == n {
            break;
        }
        for j in next_col + 1..n {
            if h[r][j].is_zero() {
                continue;
            }
            let (x, y) = (h[r][next_col].clone(), h[r][j].clone());
            let e = x.extended_gcd(&y);
            // [p q; -y/g x/g] has determinant (px + qy)/g = 1.
            let (p, q, g) = (e.x, e.y, e.gcd);
            let c = [[p, q], [-(&y / &g), &x / &g]];
            col_op(&mut h, next_col, j, c.clone());
            col_op(&mut u, next_col, j, c);
        }
        if !h[r][next_col].is_zero() {
            if h[r][next_col].is_negative() {
                for row in h.iter_mut().chain(u.iter_mut()) {
                    row[next_col] = -row[next_col].clone();
                }
            }
            pivot_of_row[r] = Some(next_col);
            next_col += 1;
        }
    }

    let mut y = vec![BigInt::zero(); n];
    for r in 0..m {
        let partial: BigInt = (0..next_col)
            .filter(|&c| pivot_of_row[r] != Some(c))
            .map(|c| &h[r][c] * &y[c])
            .sum();
        let rhs = &b[r] - partial;
        match pivot_of_row[r] {
            Some(c) => {
                let (q, rem) = rhs.div_rem(&h[r][c]);
                if !rem.is_zero() {
                    return None;
                }
                y[c] = q;
            }
            None if !rhs.is_zero() => return None,
            None => {}
        }
    }

    let x: Vec<BigInt> = (0..n)
        .map(|i| (0..n).map(|j| &u[i][j] * &y[j]).sum())
        .collect();
    debug_assert!(a
        .iter()
        .zip(b)
        .all(|(row, bi)| row.iter().zip(&x).map(|(p, q)| p * q).sum::<BigInt>() == *bi));
    Some(x)
}
