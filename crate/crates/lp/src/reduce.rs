//! Drops equality rows implied by the others before the simplex runs.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::{Rational, SparseVec};

type Row = BTreeMap<usize, Rational>;

/// Outcome of [`independent_rows`].
pub(crate) enum Rows {
    /// Rows whose restriction determines the rest.
    Basis(Vec<usize>),
    /// y with y·c = 0 for every column c and y·rhs < 0.
    Inconsistent(Vec<Rational>),
}

fn axpy(target: &mut Row, alpha: &Rational, x: &Row) {
    for (i, v) in x {
        let e = target.entry(*i).or_insert_with(Rational::zero);
        *e += alpha * v;
        if e.is_zero() {
            target.remove(i);
        }
    }
}

/// Reduced row echelon basis of the column span, keyed by pivot row. Every
/// column c then satisfies c = Σ_p c_p E_p.
pub(crate) fn independent_rows(m: usize, cols: &[SparseVec], rhs: &[Rational]) -> Rows {
    let mut basis: BTreeMap<usize, Row> = BTreeMap::new();
    for c in cols {
        if basis.len() == m {
            break;
        }
        let mut w: Row = c.iter().cloned().collect();
        for (p, e) in &basis {
            if let Some(v) = w.get(p).cloned() {
                axpy(&mut w, &-v, e);
            }
        }
        let Some((&q, qv)) = w.iter().next() else {
            continue;
        };
        let inv = Rational::one() / qv;
        for v in w.values_mut() {
            *v *= &inv;
        }
        for e in basis.values_mut() {
            if let Some(v) = e.get(&q).cloned() {
                axpy(e, &-v, &w);
            }
        }
        basis.insert(q, w);
    }
    if basis.len() == m {
        return Rows::Basis((0..m).collect());
    }
    // residual b − Σ_p b_p E_p vanishes exactly when rhs lies in the span
    let mut residual: Row = rhs
        .iter()
        .cloned()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .collect();
    for (p, e) in &basis {
        if !rhs[*p].is_zero() {
            axpy(&mut residual, &-rhs[*p].clone(), e);
        }
    }
    match residual.iter().next() {
        None => Rows::Basis(basis.keys().copied().collect()),
        Some((&i, ri)) => {
            let sign = if ri > &Rational::zero() {
                -Rational::one()
            } else {
                Rational::one()
            };
            let mut y = vec![Rational::zero(); m];
            y[i] = sign.clone();
            for (p, e) in &basis {
                if let Some(v) = e.get(&i) {
                    y[*p] = -&sign * v;
                }
            }
            Rows::Inconsistent(y)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{int, rat};

    #[test]
    fn duplicate_rows_are_dropped() {
        // rows 0 and 2 agree on every column
        let cols: Vec<SparseVec> = vec![
            vec![(0, int(1)), (1, int(2)), (2, int(1))],
            vec![(1, int(1))],
        ];
        let Rows::Basis(b) = independent_rows(3, &cols, &[int(1), int(3), int(1)]) else {
            panic!()
        };
        assert_eq!(b, vec![0, 1]);
        let Rows::Inconsistent(y) = independent_rows(3, &cols, &[int(1), int(3), rat(1, 2)]) else {
            panic!()
        };
        for c in &cols {
            assert!(c
                .iter()
                .fold(Rational::zero(), |a, (r, v)| a + v * &y[*r])
                .is_zero());
        }
        let at_rhs = y[0].clone() + &y[1] * int(3) + &y[2] * rat(1, 2);
        assert!(at_rhs < Rational::zero());
    }
}
