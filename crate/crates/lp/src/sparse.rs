//! Exact sparse solves for a fixed basis.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::{Rational, SparseVec};

type Row = BTreeMap<usize, Rational>;

/// Solves Σ_k rows[i][k]·x_k = rhs[i] for a square nonsingular system,
/// pivoting on the sparsest remaining row and, within it, the sparsest
/// remaining column.
pub(crate) fn solve_square(rows: Vec<SparseVec>, rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rows.len();
    let mut live: Vec<Option<(Row, Rational)>> = rows
        .into_iter()
        .zip(rhs)
        .map(|(r, b)| Some((r.into_iter().filter(|(_, v)| !v.is_zero()).collect(), b)))
        .collect();
    let mut count = vec![0usize; n];
    for (r, _) in live.iter().flatten() {
        for k in r.keys() {
            *count.get_mut(*k)? += 1;
        }
    }
    let mut pivots: Vec<(usize, Row, Rational)> = Vec::with_capacity(n);
    for _ in 0..n {
        let (i, _) = live
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().map(|(r, _)| (i, r.len())))
            .min_by_key(|&(_, len)| len)?;
        let (row, b) = live[i].take().expect("live row");
        let (&var, pv) = row.iter().min_by_key(|(k, _)| count[**k])?;
        let inv = pv.recip();
        for k in row.keys() {
            count[*k] -= 1;
        }
        let row: Row = row.into_iter().map(|(k, v)| (k, v * &inv)).collect();
        let b = b * &inv;
        for slot in live.iter_mut().flatten() {
            let Some(f) = slot.0.get(&var).cloned() else {
                continue;
            };
            for (k, v) in &row {
                let e = slot.0.entry(*k).or_insert_with(|| {
                    count[*k] += 1;
                    Rational::zero()
                });
                *e -= &f * v;
                if e.is_zero() {
                    slot.0.remove(k);
                    count[*k] -= 1;
                }
            }
            slot.1 -= &f * &b;
        }
        pivots.push((var, row, b));
    }
    let mut x = vec![Rational::zero(); n];
    for (var, row, b) in pivots.into_iter().rev() {
        let mut v = b;
        for (k, c) in &row {
            if *k != var {
                v -= c * &x[*k];
            }
        }
        x[var] = v;
    }
    Some(x)
}
