//! Fraction-free (Bareiss) row echelon reduction over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rational;

/// Row echelon form produced by one-step fraction-free elimination.
///
/// `rows[..pivots.len()]` are the nonzero echelon rows; `pivots[k]` is the
/// column of the leading entry of row `k`.
pub(crate) struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Clears denominators row by row. Each row is multiplied by the lcm of its
/// denominators, which leaves the row space unchanged.
pub(crate) fn integer_rows(rows: usize, cols: usize, entry: impl Fn(usize, usize) -> Rational) -> Vec<Vec<BigInt>> {
    (0..rows)
        .map(|i| {
            let row: Vec<Rational> = (0..cols).map(|j| entry(i, j)).collect();
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            row.into_iter()
                .map(|v| v.numer() * (&lcm / v.denom()))
                .collect()
        })
        .collect()
}

/// Reduces `a` to row echelon form, only choosing pivots in columns
/// `0..pivot_cols`. Columns past `pivot_cols` are carried along (used for
/// augmented systems).
pub(crate) fn bareiss(mut a: Vec<Vec<BigInt>>, ncols: usize, pivot_cols: usize) -> Echelon {
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..pivot_cols.min(ncols) {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, bottom) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = pivot_row[c].clone();
        for row in bottom.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for j in c + 1..ncols {
                let num = &pivot * &row[j] - &factor * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    Echelon { rows: a, pivots }
}

/// Basis of `{x : A x = 0}` from an echelon form of `A` (with `n` columns).
/// One vector per free column `f`, normalized so that `x_f = 1` and the other
/// free coordinates vanish.
pub(crate) fn kernel_from_echelon(e: &Echelon, n: usize) -> Vec<Vec<Rational>> {
    let mut is_pivot = vec![false; n];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![Rational::zero(); n];
            x[f] = Rational::one();
            back_substitute(e, &mut x, |_| Rational::zero());
            x
        })
        .collect()
}

/// Fills the pivot coordinates of `x` so that each echelon row `k` satisfies
/// `sum_j U[k][j] x_j = rhs(k)`; non-pivot coordinates are taken as given.
pub(crate) fn back_substitute(e: &Echelon, x: &mut [Rational], rhs: impl Fn(usize) -> Rational) {
    let n = x.len();
    for k in (0..e.rank()).rev() {
        let pc = e.pivots[k];
        let row = &e.rows[k];
        let mut acc = rhs(k);
        for j in pc + 1..n {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc -= Rational::from_integer(row[j].clone()) * &x[j];
            }
        }
        x[pc] = acc / Rational::from_integer(row[pc].clone());
    }
}
