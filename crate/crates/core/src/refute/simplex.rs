//! Phase-one simplex over exact rationals with Bland's rule.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Sparse column entries `(row, value)`.
pub type Column = Vec<(usize, BigRational)>;

/// Finds `y >= 0` with `Σ_j y_j · column_j = b`, or `None` if none exists.
///
/// Artificial variables start in the basis and are never allowed back in
/// once they leave, so they need no tableau columns.
pub fn feasible_point(columns: &[Column], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = b.len();
    let n = columns.len();
    // rows 0..m: constraints, row m: reduced costs; column n: right-hand side
    let mut t = vec![vec![BigRational::zero(); n + 1]; m + 1];
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col {
            t[*i][j] += v;
        }
    }
    for (i, bi) in b.iter().enumerate() {
        t[i][n] = bi.clone();
        if bi.is_negative() {
            for x in t[i].iter_mut() {
                *x = -&*x;
            }
        }
    }
    for j in 0..=n {
        let s: BigRational = (0..m).map(|i| t[i][j].clone()).sum();
        t[m][j] = -s;
    }
    // basis[i]: Some(j) for a structural column, None for row i's artificial
    let mut basis: Vec<Option<usize>> = vec![None; m];

    loop {
        let Some(enter) = (0..n).find(|&j| t[m][j].is_negative()) else { break };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][n] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis_key(basis[i], i) < basis_key(basis[*li], *li)),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // unbounded direction cannot occur: the phase-one objective is bounded below by zero
        let (r, _) = leave.expect("phase one is bounded");
        pivot(&mut t, r, enter);
        basis[r] = Some(enter);
    }

    if !t[m][n].is_zero() {
        return None;
    }
    let mut y = vec![BigRational::zero(); n];
    for (i, bj) in basis.iter().enumerate() {
        if let Some(j) = bj {
            y[*j] = t[i][n].clone();
        }
    }
    Some(y)
}

/// Bland's ordering on basic variables: structural columns first, then artificials.
fn basis_key(b: Option<usize>, row: usize) -> (u8, usize) {
    match b {
        Some(j) => (0, j),
        None => (1, row),
    }
}

fn pivot(t: &mut [Vec<BigRational>], r: usize, c: usize) {
    let p = t[r][c].clone();
    for x in t[r].iter_mut() {
        if !x.is_zero() {
            *x = &*x / &p;
        }
    }
    let prow = t[r].clone();
    let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for &j in &nz {
            row[j] -= &f * &prow[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn finds_a_point_or_reports_none() {
        // y0 + y1 = 1, y0 - y1 = 1/2
        let cols = vec![vec![(0, q(1, 1)), (1, q(1, 1))], vec![(0, q(1, 1)), (1, q(-1, 1))]];
        let y = feasible_point(&cols, &[q(1, 1), q(1, 2)]).unwrap();
        assert_eq!(y, vec![q(3, 4), q(1, 4)]);
        // y0 = -1 has no nonnegative solution
        assert!(feasible_point(&[vec![(0, q(1, 1))]], &[q(-1, 1)]).is_none());
    }

    #[test]
    fn survives_degenerate_cycling_example() {
        // Beale-style degenerate system with a zero right-hand side row.
        let cols = vec![
            vec![(0, q(1, 4)), (1, q(1, 2)), (2, q(0, 1))],
            vec![(0, q(-8, 1)), (1, q(-12, 1)), (2, q(0, 1))],
            vec![(0, q(-1, 1)), (1, q(-1, 2)), (2, q(1, 1))],
            vec![(0, q(9, 1)), (1, q(3, 1)), (2, q(0, 1))],
        ];
        let y = feasible_point(&cols, &[q(0, 1), q(0, 1), q(1, 1)]).unwrap();
        let mut lhs = vec![q(0, 1); 3];
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col {
                lhs[*i] += v * &y[j];
            }
        }
        assert_eq!(lhs, vec![q(0, 1), q(0, 1), q(1, 1)]);
        assert!(y.iter().all(|v| !v.is_negative()));
    }
}
