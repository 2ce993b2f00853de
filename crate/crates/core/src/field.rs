//! Arithmetic over the prime field F_d, vectors, the symplectic form and
//! affine subspaces of F_d^n.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u32),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("vector of odd length {0} has no (z|x) split")]
    OddLength(usize),
    #[error("{points} points exceed the cap of {cap}")]
    CapExceeded { points: u64, cap: u64 },
}

/// A validated prime modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Prime(u32);

impl TryFrom<u32> for Prime {
    type Error = FieldError;
    fn try_from(d: u32) -> Result<Self, FieldError> {
        Prime::new(d)
    }
}

impl From<Prime> for u32 {
    fn from(p: Prime) -> u32 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Prime {
    pub fn new(d: u32) -> Result<Self, FieldError> {
        if d < 2
            || (2..d)
                .take_while(|k| k * k <= d)
                .any(|k| d.is_multiple_of(k))
        {
            return Err(FieldError::NotPrime(d));
        }
        Ok(Prime(d))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.0 - b) % self.0
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        (self.0 - a) % self.0
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.0;
        let mut acc = 1 % self.0;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.0), "inverse of zero in F_{}", self.0);
        self.pow(a, (self.0 - 2) as u64)
    }

    /// d^k as an integer.
    pub fn power_count(self, k: usize) -> u64 {
        (self.0 as u64).pow(k as u32)
    }
}

/// A single field element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FElem {
    value: u32,
    modulus: Prime,
}

impl FElem {
    pub fn new(value: i64, modulus: Prime) -> Self {
        FElem {
            value: modulus.reduce(value),
            modulus,
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> Prime {
        self.modulus
    }
}

impl fmt::Display for FElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A vector over F_d. Symplectic vectors are laid out as (z_1..z_n | x_1..x_n).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FVec {
    modulus: Prime,
    entries: Vec<u32>,
}

impl FVec {
    pub fn new(modulus: Prime, entries: impl IntoIterator<Item = i64>) -> Self {
        FVec {
            modulus,
            entries: entries.into_iter().map(|v| modulus.reduce(v)).collect(),
        }
    }

    /// Builds from entries already reduced into [0, d).
    pub fn from_reduced(modulus: Prime, entries: Vec<u32>) -> Self {
        debug_assert!(entries.iter().all(|&v| v < modulus.get()));
        FVec { modulus, entries }
    }

    pub fn zeros(modulus: Prime, len: usize) -> Self {
        FVec {
            modulus,
            entries: vec![0; len],
        }
    }

    pub fn unit(modulus: Prime, len: usize, i: usize) -> Self {
        let mut v = Self::zeros(modulus, len);
        v.entries[i] = 1;
        v
    }

    /// Concatenation (z | x).
    pub fn from_zx(modulus: Prime, z: &[u32], x: &[u32]) -> Self {
        let mut entries = z.to_vec();
        entries.extend_from_slice(x);
        FVec::new(modulus, entries.into_iter().map(|v| v as i64))
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> FElem {
        FElem {
            value: self.entries[i],
            modulus: self.modulus,
        }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u32> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    pub fn z_part(&self) -> &[u32] {
        &self.entries[..self.entries.len() / 2]
    }

    pub fn x_part(&self) -> &[u32] {
        &self.entries[self.entries.len() / 2..]
    }

    pub fn add(&self, other: &FVec) -> FVec {
        let p = self.modulus;
        FVec {
            modulus: p,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| p.add(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &FVec) -> FVec {
        let p = self.modulus;
        FVec {
            modulus: p,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| p.sub(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: u32) -> FVec {
        let p = self.modulus;
        FVec {
            modulus: p,
            entries: self.entries.iter().map(|&a| p.mul(a, c)).collect(),
        }
    }

    pub fn neg(&self) -> FVec {
        self.scale(self.modulus.get() - 1)
    }

    pub fn dot(&self, other: &FVec) -> u32 {
        dot(self.modulus, &self.entries, &other.entries)
    }

    /// Index of the vector in lexicographic order, first entry most significant.
    pub fn index(&self) -> usize {
        point_index(self.modulus, &self.entries)
    }

    pub fn from_index(modulus: Prime, len: usize, index: usize) -> Self {
        FVec {
            modulus,
            entries: point_from_index(modulus, len, index),
        }
    }

    fn check_compatible(&self, other: &FVec) -> Result<(), FieldError> {
        if self.modulus != other.modulus {
            return Err(FieldError::ModulusMismatch(
                self.modulus.get(),
                other.modulus.get(),
            ));
        }
        if self.len() != other.len() {
            return Err(FieldError::LengthMismatch(self.len(), other.len()));
        }
        Ok(())
    }
}

impl fmt::Display for FVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn dot(p: Prime, a: &[u32], b: &[u32]) -> u32 {
    let d = p.get() as u64;
    (a.iter()
        .zip(b)
        .map(|(&x, &y)| x as u64 * y as u64)
        .sum::<u64>()
        % d) as u32
}

pub(crate) fn point_index(p: Prime, entries: &[u32]) -> usize {
    entries
        .iter()
        .fold(0usize, |acc, &v| acc * p.get() as usize + v as usize)
}

pub(crate) fn point_from_index(p: Prime, len: usize, mut index: usize) -> Vec<u32> {
    let d = p.get() as usize;
    let mut out = vec![0u32; len];
    for slot in out.iter_mut().rev() {
        *slot = (index % d) as u32;
        index /= d;
    }
    out
}

/// [a, b] = a_z·b_x − a_x·b_z on raw (z|x) slices.
pub(crate) fn symp(p: Prime, a: &[u32], b: &[u32]) -> u32 {
    let n = a.len() / 2;
    p.sub(dot(p, &a[..n], &b[n..]), dot(p, &a[n..], &b[..n]))
}

pub fn symplectic_product(a: &FVec, b: &FVec) -> Result<FElem, FieldError> {
    a.check_compatible(b)?;
    if !a.len().is_multiple_of(2) {
        return Err(FieldError::OddLength(a.len()));
    }
    Ok(FElem {
        value: symp(a.modulus, &a.entries, &b.entries),
        modulus: a.modulus,
    })
}

pub fn is_isotropic(vs: &[FVec]) -> Result<bool, FieldError> {
    for (i, u) in vs.iter().enumerate() {
        for v in &vs[i + 1..] {
            if symplectic_product(u, v)?.value != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Dense row-major linear algebra on raw rows over F_d.
pub mod linalg {
    use super::{dot, Prime};

    /// Brings `rows` to reduced row-echelon form in place, dropping zero rows.
    /// Returns the pivot columns.
    pub fn rref(p: Prime, rows: &mut Vec<Vec<u32>>) -> Vec<usize> {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            if r == rows.len() {
                break;
            }
            let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
                continue;
            };
            rows.swap(r, k);
            let inv = p.inv(rows[r][c]);
            for v in rows[r].iter_mut() {
                *v = p.mul(*v, inv);
            }
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row[c] != 0 {
                    let f = row[c];
                    for (v, &q) in row.iter_mut().zip(&pivot_row) {
                        if q != 0 {
                            *v = p.sub(*v, p.mul(f, q));
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        rows.truncate(r);
        pivots
    }

    pub fn rank(p: Prime, rows: &[Vec<u32>]) -> usize {
        let mut m = rows.to_vec();
        rref(p, &mut m).len()
    }

    /// Reduces `v` modulo the row span of an RREF matrix with the given pivots.
    pub fn reduce(p: Prime, basis: &[Vec<u32>], pivots: &[usize], v: &mut [u32]) {
        for (row, &c) in basis.iter().zip(pivots) {
            let f = v[c];
            if f != 0 {
                for (x, &q) in v.iter_mut().zip(row) {
                    if q != 0 {
                        *x = p.sub(*x, p.mul(f, q));
                    }
                }
            }
        }
    }

    /// Basis (in RREF) of {x : rows·x = 0} over `ncols` unknowns.
    pub fn nullspace(p: Prime, rows: &[Vec<u32>], ncols: usize) -> Vec<Vec<u32>> {
        let mut m: Vec<Vec<u32>> = rows
            .iter()
            .filter(|r| r.iter().any(|&v| v != 0))
            .cloned()
            .collect();
        let pivots = rref(p, &mut m);
        let mut out = Vec::new();
        for free in (0..ncols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u32; ncols];
            v[free] = 1;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = p.neg(row[free]);
            }
            out.push(v);
        }
        rref(p, &mut out);
        out
    }

    /// The lexicographically least solution of rows·x = rhs, if any.
    pub fn solve(p: Prime, rows: &[Vec<u32>], rhs: &[u32], ncols: usize) -> Option<Vec<u32>> {
        let mut aug: Vec<Vec<u32>> = rows
            .iter()
            .zip(rhs)
            .map(|(r, &b)| {
                let mut r = r.clone();
                r.push(b);
                r
            })
            .collect();
        let pivots = rref(p, &mut aug);
        if pivots.contains(&ncols) {
            return None;
        }
        let mut x = vec![0u32; ncols];
        for (row, &pc) in aug.iter().zip(&pivots) {
            x[pc] = row[ncols];
        }
        let ns = nullspace(p, rows, ncols);
        let ns_piv: Vec<usize> = ns
            .iter()
            .map(|r| r.iter().position(|&v| v != 0).unwrap())
            .collect();
        reduce(p, &ns, &ns_piv, &mut x);
        Some(x)
    }

    /// Coefficients c with Σ c_i basis_i = v, if v lies in the span.
    pub fn coordinates(p: Prime, basis: &[Vec<u32>], v: &[u32]) -> Option<Vec<u32>> {
        let k = basis.len();
        let len = v.len();
        let rows: Vec<Vec<u32>> = (0..len)
            .map(|j| basis.iter().map(|b| b[j]).collect())
            .collect();
        let sol = solve(p, &rows, v, k)?;
        debug_assert_eq!(sol.len(), k);
        Some(sol)
    }

    pub fn mat_vec(p: Prime, m: &[Vec<u32>], v: &[u32]) -> Vec<u32> {
        m.iter().map(|row| dot(p, row, v)).collect()
    }

    pub fn mat_mul(p: Prime, a: &[Vec<u32>], b: &[Vec<u32>]) -> Vec<Vec<u32>> {
        let inner = b.len();
        let cols = b.first().map_or(0, Vec::len);
        a.iter()
            .map(|row| {
                (0..cols)
                    .map(|j| (0..inner).fold(0, |acc, k| p.add(acc, p.mul(row[k], b[k][j]))))
                    .collect()
            })
            .collect()
    }

    pub fn inverse(p: Prime, m: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
        let n = m.len();
        let mut aug: Vec<Vec<u32>> = m
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut r = r.clone();
                r.extend((0..n).map(|j| u32::from(i == j)));
                r
            })
            .collect();
        let pivots = rref(p, &mut aug);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    pub fn transpose(m: &[Vec<u32>], ncols: usize) -> Vec<Vec<u32>> {
        (0..ncols)
            .map(|j| m.iter().map(|r| r[j]).collect())
            .collect()
    }
}

/// An affine subspace K = offset + span(basis) of F_d^n in canonical form:
/// RREF basis and offset reduced modulo the span, which makes the offset the
/// lexicographically least point of K.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineSubspace {
    modulus: Prime,
    ambient_dim: usize,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    offset: Vec<u32>,
}

impl AffineSubspace {
    pub fn new(
        modulus: Prime,
        ambient_dim: usize,
        spanning: &[FVec],
        offset: &FVec,
    ) -> Result<Self, FieldError> {
        for v in spanning.iter().chain(std::iter::once(offset)) {
            if v.modulus() != modulus {
                return Err(FieldError::ModulusMismatch(
                    modulus.get(),
                    v.modulus().get(),
                ));
            }
            if v.len() != ambient_dim {
                return Err(FieldError::LengthMismatch(ambient_dim, v.len()));
            }
        }
        let rows: Vec<Vec<u32>> = spanning.iter().map(|v| v.entries.clone()).collect();
        Ok(Self::from_raw(
            modulus,
            ambient_dim,
            rows,
            offset.entries.clone(),
        ))
    }

    pub(crate) fn from_raw(
        modulus: Prime,
        ambient_dim: usize,
        mut rows: Vec<Vec<u32>>,
        mut offset: Vec<u32>,
    ) -> Self {
        let pivots = linalg::rref(modulus, &mut rows);
        linalg::reduce(modulus, &rows, &pivots, &mut offset);
        AffineSubspace {
            modulus,
            ambient_dim,
            basis: rows,
            pivots,
            offset,
        }
    }

    pub fn point(p: &FVec) -> Self {
        Self::from_raw(p.modulus, p.len(), Vec::new(), p.entries.clone())
    }

    pub fn modulus(&self) -> Prime {
        self.modulus
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn cardinality(&self) -> u64 {
        self.modulus.power_count(self.dim())
    }

    pub fn basis(&self) -> Vec<FVec> {
        self.basis
            .iter()
            .map(|r| FVec::from_reduced(self.modulus, r.clone()))
            .collect()
    }

    pub(crate) fn basis_raw(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn offset(&self) -> FVec {
        FVec::from_reduced(self.modulus, self.offset.clone())
    }

    pub(crate) fn offset_raw(&self) -> &[u32] {
        &self.offset
    }

    /// Parameters t with x = offset + Σ t_i basis_i, or None when x ∉ K.
    pub fn coordinates_of(&self, x: &[u32]) -> Option<Vec<u32>> {
        let p = self.modulus;
        let mut diff: Vec<u32> = x
            .iter()
            .zip(&self.offset)
            .map(|(&a, &b)| p.sub(a, b))
            .collect();
        let t: Vec<u32> = self.pivots.iter().map(|&c| diff[c]).collect();
        linalg::reduce(p, &self.basis, &self.pivots, &mut diff);
        diff.iter().all(|&v| v == 0).then_some(t)
    }

    pub fn contains(&self, x: &FVec) -> bool {
        x.len() == self.ambient_dim && self.coordinates_of(&x.entries).is_some()
    }

    pub fn contains_zero(&self) -> bool {
        self.offset.iter().all(|&v| v == 0)
    }

    /// The point with parameters t.
    pub fn point_at(&self, t: &[u32]) -> Vec<u32> {
        let p = self.modulus;
        let mut x = self.offset.clone();
        for (row, &ti) in self.basis.iter().zip(t) {
            if ti != 0 {
                for (v, &b) in x.iter_mut().zip(row) {
                    *v = p.add(*v, p.mul(ti, b));
                }
            }
        }
        x
    }

    /// All points, ordered by their parameter vectors.
    pub fn points(&self) -> Vec<Vec<u32>> {
        let k = self.dim();
        (0..self.cardinality() as usize)
            .map(|i| self.point_at(&point_from_index(self.modulus, k, i)))
            .collect()
    }

    pub fn point_indices(&self) -> Vec<usize> {
        self.points()
            .iter()
            .map(|x| point_index(self.modulus, x))
            .collect()
    }
}

impl fmt::Display for AffineSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.points().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            for v in x {
                write!(f, "{v}")?;
            }
        }
        write!(f, "}}")
    }
}

/// A partition of F_d^n ∖ {0} into affine subspaces, parts sorted by least point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffinePartition {
    pub parts: Vec<AffineSubspace>,
}

impl AffinePartition {
    pub fn sum_of_squares(&self) -> u64 {
        self.parts.iter().map(|k| k.cardinality().pow(2)).sum()
    }
}

/// Every linear subspace of F_d^n, as RREF bases.
pub fn linear_subspaces(p: Prime, n: usize) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    for k in 0..=n {
        for pivots in combinations(n, k) {
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(r, &pc)| {
                    ((pc + 1)..n)
                        .filter(|c| !pivots.contains(c))
                        .map(move |c| (r, c))
                })
                .collect();
            let count = p.power_count(free.len()) as usize;
            for idx in 0..count {
                let vals = point_from_index(p, free.len(), idx);
                let mut rows = vec![vec![0u32; n]; k];
                for (r, &pc) in pivots.iter().enumerate() {
                    rows[r][pc] = 1;
                }
                for (&(r, c), &v) in free.iter().zip(&vals) {
                    rows[r][c] = v;
                }
                out.push(rows);
            }
        }
    }
    out
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// All affine subspaces of F_d^n not containing 0.
pub fn affine_subspaces_avoiding_zero(p: Prime, n: usize) -> Vec<AffineSubspace> {
    let mut out = Vec::new();
    for rows in linear_subspaces(p, n) {
        let pivots: Vec<usize> = rows
            .iter()
            .map(|r| r.iter().position(|&v| v != 0).unwrap())
            .collect();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        for idx in 1..p.power_count(free.len()) as usize {
            let vals = point_from_index(p, free.len(), idx);
            let mut offset = vec![0u32; n];
            for (&c, &v) in free.iter().zip(&vals) {
                offset[c] = v;
            }
            out.push(AffineSubspace::from_raw(p, n, rows.clone(), offset));
        }
    }
    out
}

/// All affine hyperplanes of F_d^n avoiding 0; there are d^n − 1 of them.
pub fn proper_affine_hyperplanes(n: usize, d: u32) -> Result<Vec<AffineSubspace>, FieldError> {
    let p = Prime::new(d)?;
    let mut out = Vec::new();
    // Functionals normalised to leading coefficient 1, levels c ≠ 0.
    for idx in 1..p.power_count(n) as usize {
        let phi = point_from_index(p, n, idx);
        if phi.iter().find(|&&v| v != 0) != Some(&1) {
            continue;
        }
        let kernel = linalg::nullspace(p, std::slice::from_ref(&phi), n);
        for c in 1..d {
            let offset =
                linalg::solve(p, std::slice::from_ref(&phi), &[c], n).expect("nonzero functional");
            out.push(AffineSubspace::from_raw(p, n, kernel.clone(), offset));
        }
    }
    out.sort_by_cached_key(AffineSubspace::points);
    Ok(out)
}

/// Streams every partition of F_d^n ∖ {0} into affine subspaces avoiding 0.
///
/// Each step covers the least uncovered point with a part whose least point it
/// is, so every partition is produced once with parts in canonical order.
pub struct AffinePartitions {
    full: u128,
    candidates: Vec<AffineSubspace>,
    by_min: Vec<Vec<(u128, usize)>>,
    stack: Vec<Frame>,
    chosen: Vec<usize>,
    started: bool,
}

struct Frame {
    point: usize,
    next: usize,
    covered: u128,
}

pub const PARTITION_POINT_LIMIT: u64 = 128;

pub fn enumerate_affine_partitions(
    n: usize,
    d: u32,
    cap_points: u64,
) -> Result<AffinePartitions, FieldError> {
    let p = Prime::new(d)?;
    let points = p.power_count(n);
    let cap = cap_points.min(PARTITION_POINT_LIMIT);
    if points > cap {
        return Err(FieldError::CapExceeded { points, cap });
    }
    let candidates = affine_subspaces_avoiding_zero(p, n);
    let mut by_min: Vec<Vec<(u128, usize)>> = vec![Vec::new(); points as usize];
    for (i, k) in candidates.iter().enumerate() {
        let idx = k.point_indices();
        let mask = idx.iter().fold(0u128, |m, &j| m | (1u128 << j));
        let least = *idx.iter().min().unwrap();
        by_min[least].push((mask, i));
    }
    for list in &mut by_min {
        // larger parts first, then canonical order of the subspace
        list.sort_by(|a, b| {
            b.0.count_ones()
                .cmp(&a.0.count_ones())
                .then(candidates[a.1].cmp(&candidates[b.1]))
        });
    }
    let full = if points == 128 {
        u128::MAX
    } else {
        (1u128 << points) - 1
    };
    Ok(AffinePartitions {
        full,
        candidates,
        by_min,
        stack: Vec::new(),
        chosen: Vec::new(),
        started: false,
    })
}

impl Iterator for AffinePartitions {
    type Item = AffinePartition;

    fn next(&mut self) -> Option<AffinePartition> {
        if !self.started {
            self.started = true;
            if self.full == 1 {
                return None;
            }
            self.stack.push(Frame {
                point: 1,
                next: 0,
                covered: 1,
            });
        }
        loop {
            let frame = self.stack.last_mut()?;
            let list = &self.by_min[frame.point];
            let mut found = None;
            while frame.next < list.len() {
                let (mask, id) = list[frame.next];
                frame.next += 1;
                if mask & frame.covered == 0 {
                    found = Some((mask, id));
                    break;
                }
            }
            match found {
                None => {
                    self.stack.pop();
                    if !self.stack.is_empty() {
                        self.chosen.pop();
                    }
                }
                Some((mask, id)) => {
                    let covered = frame.covered | mask;
                    self.chosen.push(id);
                    if covered == self.full {
                        let parts = self
                            .chosen
                            .iter()
                            .map(|&i| self.candidates[i].clone())
                            .collect();
                        self.chosen.pop();
                        return Some(AffinePartition { parts });
                    }
                    let point = (!covered).trailing_zeros() as usize;
                    self.stack.push(Frame {
                        point,
                        next: 0,
                        covered,
                    });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(d: u32, v: &[i64]) -> FVec {
        FVec::new(Prime::new(d).unwrap(), v.iter().copied())
    }

    #[test]
    fn composite_modulus_rejected() {
        assert_eq!(Prime::new(4), Err(FieldError::NotPrime(4)));
        assert_eq!(Prime::new(1), Err(FieldError::NotPrime(1)));
        assert!(Prime::new(13).is_ok());
    }

    #[test]
    fn inverses() {
        let p = Prime::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(p.mul(a, p.inv(a)), 1);
        }
    }

    #[test]
    fn symplectic_examples() {
        assert_eq!(
            symplectic_product(&f(2, &[1, 0]), &f(2, &[0, 1]))
                .unwrap()
                .value(),
            1
        );
        assert_eq!(
            symplectic_product(&f(3, &[1, 2, 0, 1]), &f(3, &[0, 1, 1, 0]))
                .unwrap()
                .value(),
            0
        );
        assert!(symplectic_product(&f(2, &[1, 0]), &f(3, &[1, 0])).is_err());
        assert!(symplectic_product(&f(2, &[1, 0]), &f(2, &[1, 0, 0, 0])).is_err());
    }

    #[test]
    fn isotropy_examples() {
        assert!(is_isotropic(&[f(2, &[1, 0])]).unwrap());
        assert!(!is_isotropic(&[f(2, &[1, 0]), f(2, &[0, 1])]).unwrap());
        assert!(is_isotropic(&[f(2, &[1, 0, 0, 0]), f(2, &[0, 1, 0, 0])]).unwrap());
    }

    #[test]
    fn solve_returns_lex_least() {
        let p = Prime::new(3).unwrap();
        // x0 + x1 + x2 = 1
        let sol = linalg::solve(p, &[vec![1, 1, 1]], &[1], 3).unwrap();
        assert_eq!(sol, vec![0, 0, 1]);
        assert!(linalg::solve(p, &[vec![0, 0, 0]], &[1], 3).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let p = Prime::new(5).unwrap();
        let m = vec![vec![1, 2], vec![3, 4]];
        let inv = linalg::inverse(p, &m).unwrap();
        assert_eq!(linalg::mat_mul(p, &m, &inv), vec![vec![1, 0], vec![0, 1]]);
        assert!(linalg::inverse(p, &[vec![1, 2], vec![2, 4]]).is_none());
    }

    #[test]
    fn affine_canonical_form() {
        let p = Prime::new(2).unwrap();
        let a = AffineSubspace::new(p, 2, &[f(2, &[1, 1])], &f(2, &[1, 0])).unwrap();
        let b = AffineSubspace::new(p, 2, &[f(2, &[1, 1])], &f(2, &[0, 1])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.offset().entries(), &[0, 1]);
        assert_eq!(a.cardinality(), 2);
        assert!(a.contains(&f(2, &[1, 0])));
        assert!(!a.contains(&f(2, &[1, 1])));
        assert!(!a.contains_zero());
    }

    #[test]
    fn hyperplane_counts() {
        assert_eq!(proper_affine_hyperplanes(1, 2).unwrap().len(), 1);
        let h22 = proper_affine_hyperplanes(2, 2).unwrap();
        let pts: Vec<String> = h22.iter().map(|k| k.to_string()).collect();
        assert_eq!(pts, ["{01,10}", "{01,11}", "{10,11}"]);
        assert_eq!(proper_affine_hyperplanes(2, 3).unwrap().len(), 8);
        assert_eq!(proper_affine_hyperplanes(3, 2).unwrap().len(), 7);
    }

    #[test]
    fn small_partition_counts() {
        assert_eq!(enumerate_affine_partitions(1, 2, 64).unwrap().count(), 1);
        assert_eq!(enumerate_affine_partitions(2, 2, 64).unwrap().count(), 4);
        assert!(matches!(
            enumerate_affine_partitions(7, 2, 64),
            Err(FieldError::CapExceeded { .. })
        ));
    }
}
