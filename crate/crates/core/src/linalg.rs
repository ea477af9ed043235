//! Exact Gauss–Jordan elimination for small dense rational systems.

use num_traits::Zero;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    /// Full column rank, consistent.
    Unique(Vec<Scalar>),
    /// Consistent but rank-deficient; free variables were set to zero.
    Underdetermined { particular: Vec<Scalar>, rank: usize },
    /// Some equation cannot be met; carries its row index.
    Inconsistent { row: usize },
}

impl Solution {
    pub fn unique(self) -> Option<Vec<Scalar>> {
        match self {
            Solution::Unique(v) => Some(v),
            _ => None,
        }
    }
}

/// Solves `a · x = b` for any shape of `a` (rows are equations).
pub fn solve(mut a: Vec<Vec<Scalar>>, mut b: Vec<Scalar>) -> Solution {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        b[r] *= &inv;
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..cols {
                let t = &f * &a[r][j];
                a[i][j] -= t;
            }
            let t = &f * &b[r];
            b[i] -= t;
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if let Some(row) = (r..rows).find(|&i| !b[i].is_zero()) {
        return Solution::Inconsistent { row };
    }
    let mut x = vec![Scalar::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = b[i].clone();
    }
    if pivots.len() == cols {
        Solution::Unique(x)
    } else {
        Solution::Underdetermined { particular: x, rank: pivots.len() }
    }
}
