//! Exact Gaussian elimination over the rationals.

use num_traits::Zero;

use crate::rational::Rational;

/// Reduced row echelon form of `[a | b]`.
struct Echelon {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    pivots: Vec<usize>,
}

fn eliminate(a: &[Vec<Rational>], b: &[Rational], ncols: usize) -> Echelon {
    let mut rows: Vec<Vec<Rational>> = a.to_vec();
    let mut rhs: Vec<Rational> = b.to_vec();
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
        rhs.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        rhs[r] *= &inv;
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for k in c..ncols {
                let delta = &f * &rows[r][k];
                rows[i][k] -= delta;
            }
            let delta = &f * &rhs[r];
            rhs[i] -= delta;
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { rows, rhs, pivots }
}

pub fn rank(a: &[Vec<Rational>], ncols: usize) -> usize {
    let b = vec![Rational::zero(); a.len()];
    eliminate(a, &b, ncols).pivots.len()
}

/// Some solution of `a x = b` (free columns set to zero), or `None` when the
/// system is inconsistent.
pub fn solve_any(a: &[Vec<Rational>], b: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let e = eliminate(a, b, ncols);
    let r = e.pivots.len();
    if e.rhs[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (i, &c) in e.pivots.iter().enumerate() {
        x[c] = e.rhs[i].clone();
    }
    debug_assert!(e.rows.len() >= r);
    Some(x)
}

/// The unique solution of `a x = b`, if the system is consistent with full
/// column rank.
pub fn solve_unique(a: &[Vec<Rational>], b: &[Rational], ncols: usize) -> Option<Vec<Rational>> {
    let e = eliminate(a, b, ncols);
    if e.pivots.len() != ncols {
        return None;
    }
    if e.rhs[ncols..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    Some(e.rhs[..ncols].to_vec())
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
