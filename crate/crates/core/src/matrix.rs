//! Dense matrices over [`CycRat`].

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use stabsep_lp::{format_rational, parse_rational};

use crate::cyclotomic::CycRat;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    order: u32,
    data: Vec<CycRat>,
}

impl CMatrix {
    pub fn zeros(order: u32, rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            order,
            data: vec![CycRat::zero(order); rows * cols],
        }
    }

    pub fn identity(order: u32, n: usize) -> Self {
        let mut m = Self::zeros(order, n, n);
        for i in 0..n {
            m.data[i * n + i] = CycRat::one(order);
        }
        m
    }

    pub fn from_fn(
        order: u32,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> CycRat,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix {
            rows,
            cols,
            order,
            data,
        }
    }

    /// |u⟩⟨v|.
    pub fn outer(u: &[CycRat], v: &[CycRat]) -> Self {
        let order = u.first().or(v.first()).map_or(8, CycRat::order);
        let vc: Vec<CycRat> = v.iter().map(CycRat::conj).collect();
        Self::from_fn(order, u.len(), v.len(), |i, j| {
            if u[i].is_zero() || vc[j].is_zero() {
                CycRat::zero(order)
            } else {
                &u[i] * &vc[j]
            }
        })
    }

    /// |i⟩⟨j| of size rows × cols.
    pub fn unit(order: u32, rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(order, rows, cols);
        m.data[i * cols + j] = CycRat::one(order);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &CycRat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycRat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut CycRat {
        &mut self.data[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CycRat::is_zero)
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &CycRat)> {
        let cols = self.cols;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(k, v)| (k / cols, k % cols, v))
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch");
        let mut out = Self::zeros(self.order, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs.data[k * rhs.cols + j];
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[CycRat]) -> Vec<CycRat> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![CycRat::zero(self.order); self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            for (k, x) in v.iter().enumerate() {
                let a = &self.data[i * self.cols + k];
                if !a.is_zero() && !x.is_zero() {
                    *slot += &(a * x);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }

    pub fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            if !b.is_zero() {
                *a -= b;
            }
        }
        out
    }

    pub fn scale(&self, c: &CycRat) -> CMatrix {
        let mut out = self.clone();
        for a in &mut out.data {
            if !a.is_zero() {
                *a = &*a * c;
            }
        }
        out
    }

    pub fn scale_rational(&self, r: &BigRational) -> CMatrix {
        let mut out = self.clone();
        for a in &mut out.data {
            if !a.is_zero() {
                *a = a.scale(r);
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        Self::from_fn(self.order, self.cols, self.rows, |i, j| {
            self.get(j, i).conj()
        })
    }

    pub fn transpose(&self) -> CMatrix {
        Self::from_fn(self.order, self.cols, self.rows, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Self::zeros(self.order, rows, cols);
        for (i, j, a) in self.nonzeros() {
            for (k, l, b) in rhs.nonzeros() {
                out.data[(i * rhs.rows + k) * cols + j * rhs.cols + l] = a * b;
            }
        }
        out
    }

    pub fn trace(&self) -> CycRat {
        let mut t = CycRat::zero(self.order);
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (i..self.cols).all(|j| *self.get(i, j) == self.get(j, i).conj()))
    }

    /// For a matrix on A ⊗ B with dim A = da, dim B = db: trace over A.
    pub fn partial_trace_first(&self, da: usize, db: usize) -> CMatrix {
        assert_eq!(self.rows, da * db);
        Self::from_fn(self.order, db, db, |i, j| {
            let mut t = CycRat::zero(self.order);
            for a in 0..da {
                t += self.get(a * db + i, a * db + j);
            }
            t
        })
    }

    /// Trace over B.
    pub fn partial_trace_second(&self, da: usize, db: usize) -> CMatrix {
        assert_eq!(self.rows, da * db);
        Self::from_fn(self.order, da, da, |i, j| {
            let mut t = CycRat::zero(self.order);
            for b in 0..db {
                t += self.get(i * db + b, j * db + b);
            }
            t
        })
    }

    /// Entrywise product.
    pub fn hadamard(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.order, self.rows, self.cols, |i, j| {
            let (a, b) = (self.get(i, j), rhs.get(i, j));
            if a.is_zero() || b.is_zero() {
                CycRat::zero(self.order)
            } else {
                a * b
            }
        })
    }

    pub fn column(&self, j: usize) -> Vec<CycRat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Scalar c with self = c·other, if one exists (None when other = 0 ≠ self).
    pub fn proportionality(&self, other: &CMatrix) -> Option<CycRat> {
        let (i, j, b) = other.nonzeros().next()?;
        let c = self.get(i, j) * &b.inv().expect("nonzero");
        (other.scale(&c) == *self).then_some(c)
    }

    /// Basis of {v : self·v = 0}, one vector per free column of the reduced
    /// row echelon form.
    pub fn kernel(&self) -> Vec<Vec<CycRat>> {
        let mut a: Vec<Vec<CycRat>> = (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..self.rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let inv = a[r][c].inv().expect("nonzero pivot");
            for v in a[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
            let prow = a[r].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i == r || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (k, v) in prow.iter().enumerate() {
                    if !v.is_zero() {
                        row[k] -= &(&f * v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free = (0..self.cols).filter(|c| !pivots.contains(c));
        free.map(|f| {
            let mut v = vec![CycRat::zero(self.order); self.cols];
            v[f] = CycRat::one(self.order);
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -&a[row][f];
            }
            v
        })
        .collect()
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{}; ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn inner(u: &[CycRat], v: &[CycRat]) -> CycRat {
    let order = u.first().map_or(8, CycRat::order);
    let mut acc = CycRat::zero(order);
    for (a, b) in u.iter().zip(v) {
        if !a.is_zero() && !b.is_zero() {
            acc += &(&a.conj() * b);
        }
    }
    acc
}

pub fn kron_vec(u: &[CycRat], v: &[CycRat]) -> Vec<CycRat> {
    let order = u.first().map_or(8, CycRat::order);
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(if a.is_zero() || b.is_zero() {
                CycRat::zero(order)
            } else {
                a * b
            });
        }
    }
    out
}

/// Row-major entries, each a list of "p/q" power-basis coefficients of ζ_N.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub order: u32,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        MatrixJson {
            order: m.order,
            rows: m.rows,
            cols: m.cols,
            entries: m
                .data
                .iter()
                .map(|v| v.coeffs().iter().map(format_rational).collect())
                .collect(),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Malformed(format!(
                "{} entries for a {}x{} matrix",
                self.entries.len(),
                self.rows,
                self.cols
            )));
        }
        if !(1..=crate::cyclotomic::MAX_ORDER).contains(&self.order) {
            return Err(Error::Malformed(format!("cyclotomic order {}", self.order)));
        }
        let data = self
            .entries
            .iter()
            .map(|cs| {
                let cs = cs
                    .iter()
                    .map(|c| parse_rational(c))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(CycRat::from_coeffs(self.order, cs))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            order: self.order,
            data,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_and_partial_trace() {
        let a = CMatrix::from_fn(8, 2, 2, |i, j| CycRat::from_int(8, (2 * i + j) as i64));
        let b = CMatrix::identity(8, 3);
        let ab = a.kron(&b);
        assert_eq!(
            ab.partial_trace_second(2, 3),
            a.scale(&CycRat::from_int(8, 3))
        );
        assert_eq!(ab.partial_trace_first(2, 3), b.scale(&a.trace()));
    }

    #[test]
    fn adjoint_of_product() {
        let i = CycRat::zeta_pow(8, 2);
        let a = CMatrix::from_fn(8, 2, 2, |r, c| {
            if r == c {
                i.clone()
            } else {
                CycRat::from_int(8, r as i64 + 1)
            }
        });
        let b = a.mul(&a);
        assert_eq!(b.adjoint(), a.adjoint().mul(&a.adjoint()));
    }

    #[test]
    fn json_round_trip() {
        let m = CMatrix::from_fn(12, 2, 3, |i, j| {
            CycRat::omega_pow(3, (i + j) as i64).scale(&BigRational::new(1.into(), 3.into()))
        });
        let text = serde_json::to_string(&MatrixJson::from(&m)).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
        let mut bad = back.clone();
        bad.entries.pop();
        assert!(bad.to_matrix().is_err());
    }
}
