//! Clifford unitaries as tableaux: the images of Z_1..Z_n, X_1..X_n under
//! conjugation, with exact phases.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{order_for, CycRat};
use crate::error::{Caps, Error, Result};
use crate::field::{linalg, point_from_index, symp, Prime};
use crate::matrix::CMatrix;
use crate::pauli::{phase_order, PauliOp};
use crate::stabiliser::StabState;

/// Elementary gates. Qudit indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    /// Fourier gate F|x⟩ = d^{-1/2} Σ_y ω^{xy}|y⟩ (Hadamard for d = 2).
    H(usize),
    /// Phase gate S|x⟩ = τ^{x²}|x⟩.
    S(usize),
    /// CX_{c,t}|a,b⟩ = |a, a+b⟩.
    Cx(usize, usize),
    /// CZ|a,b⟩ = ω^{ab}|a,b⟩.
    Cz(usize, usize),
    /// X(x) on one qudit.
    X(usize, u32),
    /// Z(z) on one qudit.
    Z(usize, u32),
}

impl Gate {
    fn qudits(&self) -> Vec<usize> {
        match *self {
            Gate::H(i) | Gate::S(i) | Gate::X(i, _) | Gate::Z(i, _) => vec![i],
            Gate::Cx(a, b) | Gate::Cz(a, b) => vec![a, b],
        }
    }

    /// The smallest k > 0 with G^k = identity up to phase.
    fn order(&self, d: Prime) -> u32 {
        match self {
            Gate::H(_) if d.get() == 2 => 2,
            Gate::H(_) => 4,
            Gate::S(_) => phase_order(d),
            _ => d.get(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::H(i) => write!(f, "H{i}"),
            Gate::S(i) => write!(f, "S{i}"),
            Gate::Cx(c, t) => write!(f, "CX{c},{t}"),
            Gate::Cz(a, b) => write!(f, "CZ{a},{b}"),
            Gate::X(i, x) => write!(f, "X{i}({x})"),
            Gate::Z(i, z) => write!(f, "Z{i}({z})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordOp {
    n: usize,
    d: Prime,
    /// Images of Z_1..Z_n then X_1..X_n.
    images: Vec<PauliOp>,
}

impl CliffordOp {
    pub fn identity(n: usize, d: Prime) -> Self {
        let images = (0..n)
            .map(|i| PauliOp::z(n, d, i))
            .chain((0..n).map(|i| PauliOp::x(n, d, i)))
            .collect();
        CliffordOp { n, d, images }
    }

    /// Builds from generator images, checking the commutation relations.
    pub fn from_images(n: usize, d: Prime, images: Vec<PauliOp>) -> Result<Self> {
        if images.len() != 2 * n || images.iter().any(|p| p.n() != n || p.modulus() != d) {
            return Err(Error::DimensionMismatch(
                "Clifford images must be 2n Paulis on n qudits".into(),
            ));
        }
        let c = CliffordOp { n, d, images };
        if !c.is_symplectic() {
            return Err(Error::NoSuchClifford(
                "images do not preserve the symplectic form".into(),
            ));
        }
        if d.get() == 2 && c.images.iter().any(|p| p.phase() % 2 == 1) {
            return Err(Error::NoSuchClifford(
                "non-Hermitian image of a Hermitian generator".into(),
            ));
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> Prime {
        self.d
    }

    pub fn images(&self) -> &[PauliOp] {
        &self.images
    }

    pub fn image_z(&self, i: usize) -> &PauliOp {
        &self.images[i]
    }

    pub fn image_x(&self, i: usize) -> &PauliOp {
        &self.images[self.n + i]
    }

    /// Columns of the symplectic matrix: the image vectors of the generators.
    pub fn symplectic(&self) -> Vec<Vec<u32>> {
        let cols: Vec<Vec<u32>> = self
            .images
            .iter()
            .map(|p| p.a().entries().to_vec())
            .collect();
        linalg::transpose(&cols, 2 * self.n)
    }

    fn is_symplectic(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|i| {
            (0..2 * n).all(|j| {
                let expect = match (i < n, j < n) {
                    (true, false) if j - n == i => 1,
                    (false, true) if i - n == j => self.d.get() - 1,
                    _ => 0,
                };
                self.images[i].symplectic(&self.images[j]) == expect
            })
        })
    }

    /// U p U†.
    pub fn conjugate(&self, p: &PauliOp) -> PauliOp {
        let n = self.n;
        let d = self.d;
        let a = p.a().entries();
        let mut acc =
            PauliOp::identity(n, d).with_phase(p.phase() as i64 - crate::pauli::gamma(d, a) as i64);
        for (k, &e) in a.iter().enumerate() {
            if e != 0 {
                acc = acc.mul(&self.images[k].pow(e as u64));
            }
        }
        acc
    }

    /// The Clifford that applies `self` first and then `next`: next·self.
    pub fn then(&self, next: &CliffordOp) -> CliffordOp {
        CliffordOp {
            n: self.n,
            d: self.d,
            images: self.images.iter().map(|p| next.conjugate(p)).collect(),
        }
    }

    /// Operator product self·rhs.
    pub fn compose(&self, rhs: &CliffordOp) -> CliffordOp {
        rhs.then(self)
    }

    pub fn inverse(&self) -> CliffordOp {
        let n = self.n;
        let d = self.d;
        let m = self.symplectic();
        let minv = linalg::inverse(d, &m).expect("symplectic matrices are invertible");
        let images = (0..2 * n)
            .map(|k| {
                let col: Vec<u32> = minv.iter().map(|row| row[k]).collect();
                let q = PauliOp::from_raw(d, 0, col);
                let img = self.conjugate(&q);
                q.shift_phase(-(img.phase() as i64))
            })
            .collect();
        CliffordOp { n, d, images }
    }

    /// self ⊗ other.
    pub fn tensor(&self, other: &CliffordOp) -> CliffordOp {
        let d = self.d;
        let left = PauliOp::identity(self.n, d);
        let right = PauliOp::identity(other.n, d);
        let zs = self.images[..self.n]
            .iter()
            .map(|p| p.tensor(&right))
            .chain(other.images[..other.n].iter().map(|p| left.tensor(p)));
        let xs = self.images[self.n..]
            .iter()
            .map(|p| p.tensor(&right))
            .chain(other.images[other.n..].iter().map(|p| left.tensor(p)));
        CliffordOp {
            n: self.n + other.n,
            d,
            images: zs.chain(xs).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.d)
    }

    /// Dense unitary. Column 0 is the stabiliser state of the Z_i images with
    /// its first nonzero amplitude positive; column x is (U X(x) U†)·column 0.
    pub fn dense(&self, caps: &Caps) -> Result<CMatrix> {
        let d = self.d;
        let dim = d.power_count(self.n);
        caps.check_dense(dim)?;
        let dim = dim as usize;
        let state = StabState::from_generators(self.n, d, &self.images[..self.n])?;
        let col0 = state.amplitudes();
        let order = order_for(d.get());
        let mut m = CMatrix::zeros(order, dim, dim);
        for x in 0..dim {
            let xv = point_from_index(d, self.n, x);
            let mut a = vec![0u32; self.n];
            a.extend_from_slice(&xv);
            let img = self.conjugate(&PauliOp::from_raw(d, 0, a));
            for (y, amp) in col0.iter().enumerate() {
                if amp.is_zero() {
                    continue;
                }
                let (e, t) = img.act_on_basis(&point_from_index(d, self.n, y));
                m.set(crate::field::point_index(d, &t), x, amp.mul_tau(d.get(), e));
            }
        }
        Ok(m)
    }

    /// A gate list whose product equals this Clifford (last gate acts first).
    pub fn to_gates(&self) -> Vec<Gate> {
        synthesize(self)
    }
}

impl fmt::Display for CliffordOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(
                f,
                "Z{i} -> {}; X{i} -> {}",
                self.images[i],
                self.images[self.n + i]
            )?;
            if i + 1 < self.n {
                write!(f, "; ")?;
            }
        }
        Ok(())
    }
}

fn check_gate(n: usize, g: &Gate) -> Result<()> {
    let q = g.qudits();
    if q.iter().any(|&i| i >= n) || (q.len() == 2 && q[0] == q[1]) {
        return Err(Error::DimensionMismatch(format!(
            "gate {g} invalid on {n} qudits"
        )));
    }
    Ok(())
}

/// Tableau of a single gate.
pub fn gate_tableau(n: usize, d: Prime, g: &Gate) -> Result<CliffordOp> {
    check_gate(n, g)?;
    let mut c = CliffordOp::identity(n, d);
    let m1 = d.get() - 1;
    let vec_with = |entries: &[(usize, u32)]| {
        let mut a = vec![0u32; 2 * n];
        for &(k, v) in entries {
            a[k] = v % d.get();
        }
        a
    };
    let big_d = phase_order(d) as i64;
    match *g {
        Gate::H(i) => {
            c.images[i] = PauliOp::from_raw(d, 0, vec_with(&[(n + i, m1)]));
            c.images[n + i] = PauliOp::z(n, d, i);
        }
        Gate::S(i) => {
            c.images[n + i] = PauliOp::from_raw(d, 0, vec_with(&[(i, 1), (n + i, 1)]));
        }
        Gate::Cx(ct, t) => {
            c.images[n + ct] = PauliOp::from_raw(d, 0, vec_with(&[(n + ct, 1), (n + t, 1)]));
            c.images[t] = PauliOp::from_raw(d, 0, vec_with(&[(ct, m1), (t, 1)]));
        }
        Gate::Cz(i, j) => {
            c.images[n + i] = PauliOp::from_raw(d, 0, vec_with(&[(j, 1), (n + i, 1)]));
            c.images[n + j] = PauliOp::from_raw(d, 0, vec_with(&[(i, 1), (n + j, 1)]));
        }
        Gate::X(i, x) => {
            c.images[i] = PauliOp::z(n, d, i).with_phase((-2 * x as i64).rem_euclid(big_d));
        }
        Gate::Z(i, z) => {
            c.images[n + i] = PauliOp::x(n, d, i).with_phase(2 * z as i64);
        }
    }
    Ok(c)
}

/// The Clifford G_1·G_2·…·G_m for the list [G_1, …, G_m].
pub fn clifford_from_gates(n: usize, d: Prime, gates: &[Gate]) -> Result<CliffordOp> {
    let mut c = CliffordOp::identity(n, d);
    for g in gates.iter().rev() {
        c = c.then(&gate_tableau(n, d, g)?);
    }
    Ok(c)
}

/// Dense matrix of a gate on n qudits.
pub fn gate_matrix(n: usize, d: Prime, g: &Gate, caps: &Caps) -> Result<CMatrix> {
    check_gate(n, g)?;
    let dd = d.get();
    let dim = d.power_count(n);
    caps.check_dense(dim)?;
    let dim = dim as usize;
    let order = order_for(dd);
    let mut m = CMatrix::zeros(order, dim, dim);
    for col in 0..dim {
        let x = point_from_index(d, n, col);
        let mut put = |row: &[u32], v: CycRat| {
            let r = crate::field::point_index(d, row);
            *m.entry_mut(r, col) += &v;
        };
        match *g {
            Gate::H(i) => {
                let norm = CycRat::inv_sqrt_d_pow(dd, 1);
                for y in 0..dd {
                    let mut row = x.clone();
                    row[i] = y;
                    put(&row, &norm * &CycRat::omega_pow(dd, (x[i] * y) as i64));
                }
            }
            Gate::S(i) => put(&x, CycRat::tau_pow(dd, (x[i] * x[i]) as i64)),
            Gate::Cx(c, t) => {
                let mut row = x.clone();
                row[t] = d.add(x[t], x[c]);
                put(&row, CycRat::one(order));
            }
            Gate::Cz(a, b) => put(&x, CycRat::omega_pow(dd, (x[a] * x[b]) as i64)),
            Gate::X(i, s) => {
                let mut row = x.clone();
                row[i] = d.add(x[i], s % dd);
                put(&row, CycRat::one(order));
            }
            Gate::Z(i, s) => put(&x, CycRat::omega_pow(dd, (x[i] * s) as i64)),
        }
    }
    Ok(m)
}

/// Dense matrix of the product G_1·…·G_m.
pub fn gates_matrix(n: usize, d: Prime, gates: &[Gate], caps: &Caps) -> Result<CMatrix> {
    let dim = d.power_count(n) as usize;
    let mut m = CMatrix::identity(order_for(d.get()), dim);
    for g in gates {
        m = m.mul(&gate_matrix(n, d, g, caps)?);
    }
    Ok(m)
}

fn scaled(d: Prime, v: &[u32], c: u32) -> Vec<u32> {
    v.iter().map(|&x| d.mul(x, c)).collect()
}

fn axpy(d: Prime, y: &mut [u32], c: u32, x: &[u32]) {
    if c == 0 {
        return;
    }
    for (a, &b) in y.iter_mut().zip(x) {
        *a = d.add(*a, d.mul(c, b));
    }
}

/// Row functional f ↦ [a, f].
fn symp_row(n: usize, a: &[u32], d: Prime) -> Vec<u32> {
    let mut row = vec![0u32; 2 * n];
    for i in 0..n {
        row[i] = d.neg(a[n + i]);
        row[n + i] = a[i];
    }
    row
}

/// Removes the components of u along the hyperbolic pairs (e, f), [e, f] = 1.
fn project(
    d: Prime,
    u: &mut [u32],
    pairs: &[(Vec<u32>, Vec<u32>)],
    coeff_src: &[u32],
    src_pairs: &[(Vec<u32>, Vec<u32>)],
) {
    for ((e, f), (se, sf)) in pairs.iter().zip(src_pairs) {
        let cf = symp(d, coeff_src, sf);
        let ce = symp(d, coeff_src, se);
        axpy(d, u, d.neg(cf), e);
        axpy(d, u, ce, f);
    }
}

/// Symplectic basis of the complement of the given pairs, lex-first choices.
fn complete_pairs(n: usize, d: Prime, pairs: &[(Vec<u32>, Vec<u32>)]) -> Vec<(Vec<u32>, Vec<u32>)> {
    let rows: Vec<Vec<u32>> = pairs
        .iter()
        .flat_map(|(e, f)| [symp_row(n, e, d), symp_row(n, f, d)])
        .collect();
    let mut rest = if rows.is_empty() {
        (0..2 * n)
            .map(|i| (0..2 * n).map(|j| u32::from(i == j)).collect())
            .collect()
    } else {
        linalg::nullspace(d, &rows, 2 * n)
    };
    let mut out = Vec::new();
    while !rest.is_empty() {
        let e = rest.remove(0);
        let k = rest
            .iter()
            .position(|r| symp(d, &e, r) != 0)
            .expect("complement is nondegenerate");
        let w = rest.remove(k);
        let f = scaled(d, &w, d.inv(symp(d, &e, &w)));
        let pair = [(e.clone(), f.clone())];
        for r in rest.iter_mut() {
            let snapshot = r.clone();
            project(d, r, &pair, &snapshot, &pair);
        }
        out.push((e, f));
    }
    out
}

/// A Clifford C with C src_i C† = tgt_i for every pair.
///
/// Runs symplectic Gram–Schmidt on sources and targets in parallel, completes
/// both sides with lexicographically least choices, then fixes phases with a
/// Pauli correction.
pub fn find_clifford_mapping(
    n: usize,
    d: Prime,
    pairs: &[(PauliOp, PauliOp)],
) -> Result<CliffordOp> {
    for (s, t) in pairs {
        if s.n() != n || t.n() != n || s.modulus() != d || t.modulus() != d {
            return Err(Error::DimensionMismatch(
                "mapping pairs must act on n qudits".into(),
            ));
        }
    }
    for (i, (s1, t1)) in pairs.iter().enumerate() {
        for (s2, t2) in &pairs[i + 1..] {
            if s1.symplectic(s2) != t1.symplectic(t2) {
                return Err(Error::NoSuchClifford(format!(
                    "commutation of {s1}, {s2} differs from {t1}, {t2}"
                )));
            }
        }
    }
    // independent subset; dependent pairs must follow from it
    let mut chosen: Vec<usize> = Vec::new();
    for (i, (s, t)) in pairs.iter().enumerate() {
        let src: Vec<Vec<u32>> = chosen
            .iter()
            .map(|&j| pairs[j].0.a().entries().to_vec())
            .collect();
        match linalg::coordinates(d, &src, s.a().entries()) {
            None => {
                let tgt: Vec<Vec<u32>> = chosen
                    .iter()
                    .map(|&j| pairs[j].1.a().entries().to_vec())
                    .collect();
                if linalg::coordinates(d, &tgt, t.a().entries()).is_some() {
                    return Err(Error::NoSuchClifford(format!(
                        "{t} is dependent while {s} is not"
                    )));
                }
                chosen.push(i);
            }
            Some(c) => {
                let mut ps = PauliOp::identity(n, d);
                let mut pt = PauliOp::identity(n, d);
                for (&j, &cj) in chosen.iter().zip(&c) {
                    ps = ps.mul(&pairs[j].0.pow(cj as u64));
                    pt = pt.mul(&pairs[j].1.pow(cj as u64));
                }
                let alpha = s.phase() as i64 - ps.phase() as i64;
                if pt.a() != t.a() || pt.shift_phase(alpha) != *t {
                    return Err(Error::NoSuchClifford(format!(
                        "relation through {s} is not preserved by {t}"
                    )));
                }
            }
        }
    }

    let mut pend: Vec<(Vec<u32>, Vec<u32>)> = chosen
        .iter()
        .map(|&j| {
            (
                pairs[j].0.a().entries().to_vec(),
                pairs[j].1.a().entries().to_vec(),
            )
        })
        .collect();
    let mut hs: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    let mut ht: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    while !pend.is_empty() {
        let (u0, v0) = pend.remove(0);
        let mut u = u0.clone();
        let mut v = v0;
        project(d, &mut u, &hs, &u0, &hs);
        project(d, &mut v, &ht, &u0, &hs);
        let partner = pend.iter().position(|(w, _)| symp(d, &u, w) != 0);
        match partner {
            Some(k) => {
                let (w0, w0t) = pend.remove(k);
                let mut w = w0.clone();
                let mut wt = w0t;
                project(d, &mut w, &hs, &w0, &hs);
                project(d, &mut wt, &ht, &w0, &hs);
                let s = d.inv(symp(d, &u, &w));
                hs.push((u, scaled(d, &w, s)));
                ht.push((v, scaled(d, &wt, s)));
            }
            None => {
                let solve_partner =
                    |own: &[u32], side: &[(Vec<u32>, Vec<u32>)], others: Vec<&Vec<u32>>| {
                        let mut rows = vec![symp_row(n, own, d)];
                        let mut rhs = vec![1u32];
                        for (e, f) in side {
                            rows.push(symp_row(n, e, d));
                            rows.push(symp_row(n, f, d));
                            rhs.extend([0, 0]);
                        }
                        for o in others {
                            rows.push(symp_row(n, o, d));
                            rhs.push(0);
                        }
                        linalg::solve(d, &rows, &rhs, 2 * n)
                    };
                let f = solve_partner(&u, &hs, pend.iter().map(|(w, _)| w).collect())
                    .ok_or_else(|| Error::NoSuchClifford("source vectors are dependent".into()))?;
                let ft = solve_partner(&v, &ht, pend.iter().map(|(_, w)| w).collect())
                    .ok_or_else(|| Error::NoSuchClifford("target vectors are dependent".into()))?;
                hs.push((u, f));
                ht.push((v, ft));
            }
        }
    }
    let cs = complete_pairs(n, d, &hs);
    let ct = complete_pairs(n, d, &ht);
    hs.extend(cs);
    ht.extend(ct);
    let cols_s: Vec<Vec<u32>> = hs
        .iter()
        .flat_map(|(e, f)| [e.clone(), f.clone()])
        .collect();
    let cols_t: Vec<Vec<u32>> = ht
        .iter()
        .flat_map(|(e, f)| [e.clone(), f.clone()])
        .collect();
    let bs = linalg::transpose(&cols_s, 2 * n);
    let bt = linalg::transpose(&cols_t, 2 * n);
    let bs_inv = linalg::inverse(d, &bs)
        .ok_or_else(|| Error::NoSuchClifford("singular source basis".into()))?;
    let m = linalg::mat_mul(d, &bt, &bs_inv);
    let images: Vec<PauliOp> = (0..2 * n)
        .map(|k| PauliOp::from_raw(d, 0, m.iter().map(|r| r[k]).collect()))
        .collect();
    let c0 = CliffordOp { n, d, images };

    // Pauli correction w(c): conjugation multiplies w(v) by τ^{2[c,v]}
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for &j in &chosen {
        let (s, t) = &pairs[j];
        let got = c0.conjugate(s);
        let delta =
            (t.phase() as i64 - got.phase() as i64).rem_euclid(phase_order(d) as i64) as u32;
        let half = if d.get() == 2 {
            if delta % 2 == 1 {
                return Err(Error::NoSuchClifford(format!(
                    "phase of {t} unreachable from {s}"
                )));
            }
            delta / 2
        } else {
            d.mul(delta, d.inv(2))
        };
        rows.push(
            symp_row(n, t.a().entries(), d)
                .iter()
                .map(|&x| d.neg(x))
                .collect::<Vec<u32>>(),
        );
        rhs.push(half);
    }
    let c = if rows.is_empty() {
        vec![0u32; 2 * n]
    } else {
        linalg::solve(d, &rows, &rhs, 2 * n)
            .ok_or_else(|| Error::NoSuchClifford("phase correction unsolvable".into()))?
    };
    let corr = PauliOp::from_raw(d, 0, c);
    let images = c0
        .images
        .iter()
        .map(|p| p.shift_phase(2 * corr.symplectic(p) as i64))
        .collect();
    let out = CliffordOp { n, d, images };
    for (s, t) in pairs {
        if out.conjugate(s) != *t {
            return Err(Error::NoSuchClifford(format!(
                "could not realise {s} -> {t}"
            )));
        }
    }
    Ok(out)
}

type Local = [u32; 4];

fn local_apply(m: &Local, v: (u32, u32), d: Prime) -> (u32, u32) {
    (
        d.add(d.mul(m[0], v.0), d.mul(m[1], v.1)),
        d.add(d.mul(m[2], v.0), d.mul(m[3], v.1)),
    )
}

fn local_mul(a: &Local, b: &Local, d: Prime) -> Local {
    let e = |i: usize, j: usize| d.add(d.mul(a[2 * i], b[j]), d.mul(a[2 * i + 1], b[2 + j]));
    [e(0, 0), e(0, 1), e(1, 0), e(1, 1)]
}

type Words = &'static [(Local, Vec<bool>)];

/// Shortest H/S words for every element of SL(2, F_d), in time order.
fn local_words(d: Prime) -> Words {
    static CACHE: OnceLock<Mutex<HashMap<u32, Words>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("cache poisoned");
    guard.entry(d.get()).or_insert_with(|| {
        let m1 = d.get() - 1;
        // action on (z, x): H: (z, x) -> (x, -z); S: (z, x) -> (z + x, x)
        let h: Local = [0, 1, m1, 0];
        let s: Local = [1, 1, 0, 1];
        let mut seen: HashMap<Local, Vec<bool>> = HashMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert([1, 0, 0, 1], Vec::new());
        queue.push_back([1, 0, 0, 1]);
        while let Some(m) = queue.pop_front() {
            let word = seen[&m].clone();
            order.push((m, word.clone()));
            for (is_h, g) in [(true, h), (false, s)] {
                let next = local_mul(&g, &m, d);
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(next) {
                    let mut w = word.clone();
                    w.push(is_h);
                    e.insert(w);
                    queue.push_back(next);
                }
            }
        }
        Box::leak(order.into_boxed_slice())
    })
}

fn local_word_mapping(d: Prime, from: (u32, u32), to: (u32, u32)) -> Vec<bool> {
    local_words(d)
        .iter()
        .find(|(m, _)| local_apply(m, from, d) == to)
        .map(|(_, w)| w.clone())
        .expect("SL(2) is transitive on nonzero vectors")
}

fn local_word_for(d: Prime, target: Local) -> Vec<bool> {
    local_words(d)
        .iter()
        .find(|(m, _)| *m == target)
        .map(|(_, w)| w.clone())
        .expect("matrix in SL(2)")
}

struct Synth {
    n: usize,
    d: Prime,
    t: CliffordOp,
    applied: Vec<Gate>,
}

impl Synth {
    fn apply(&mut self, g: Gate) {
        self.t = self
            .t
            .then(&gate_tableau(self.n, self.d, &g).expect("valid gate"));
        self.applied.push(g);
    }

    fn apply_word(&mut self, q: usize, word: &[bool]) {
        for &is_h in word {
            self.apply(if is_h { Gate::H(q) } else { Gate::S(q) });
        }
    }

    fn pair(&self, image: usize, q: usize) -> (u32, u32) {
        let a = self.t.images[image].a().entries();
        (a[q], a[self.n + q])
    }
}

fn synthesize(c: &CliffordOp) -> Vec<Gate> {
    let n = c.n;
    let d = c.d;
    let mut s = Synth {
        n,
        d,
        t: c.clone(),
        applied: Vec::new(),
    };
    for i in 0..n {
        let xi = n + i;
        if s.pair(xi, i) == (0, 0) {
            let j = (i + 1..n)
                .find(|&j| s.pair(xi, j) != (0, 0))
                .expect("image of X_i is nonzero");
            let w = local_word_mapping(d, s.pair(xi, j), (0, 1));
            s.apply_word(j, &w);
            s.apply(Gate::Cx(j, i));
        }
        let w = local_word_mapping(d, s.pair(xi, i), (0, 1));
        s.apply_word(i, &w);
        for j in i + 1..n {
            if s.pair(xi, j) != (0, 0) {
                let w = local_word_mapping(d, s.pair(xi, j), (0, 1));
                s.apply_word(j, &w);
                for _ in 0..d.get() - 1 {
                    s.apply(Gate::Cx(i, j));
                }
            }
        }
        for j in i + 1..n {
            if s.pair(i, j) != (0, 0) {
                let w = local_word_mapping(d, s.pair(i, j), (1, 0));
                s.apply_word(j, &w);
                s.apply(Gate::Cx(j, i));
            }
        }
        let (z, x) = s.pair(i, i);
        debug_assert_eq!(z, 1);
        if x != 0 {
            let w = local_word_for(d, [1, 0, d.neg(x), 1]);
            s.apply_word(i, &w);
        }
    }
    // remaining Pauli frame: Z_i -> τ^φ Z_i, X_i -> τ^ψ X_i
    let half = |e: u32| {
        if d.get() == 2 {
            e / 2
        } else {
            d.mul(e, d.inv(2))
        }
    };
    let mut pauli = Vec::new();
    for i in 0..n {
        let cz = half(s.t.images[n + i].phase());
        let cx = d.neg(half(s.t.images[i].phase()));
        if cz != 0 {
            pauli.push(Gate::Z(i, cz));
        }
        if cx != 0 {
            pauli.push(Gate::X(i, cx));
        }
    }
    // G_m…G_1 C = Q  ⇒  C = G_1^{-1}…G_m^{-1} Q
    let mut out = Vec::new();
    for g in &s.applied {
        for _ in 0..g.order(d) - 1 {
            out.push(*g);
        }
    }
    out.extend(pauli);
    debug_assert_eq!(clifford_from_gates(n, d, &out).as_ref().ok(), Some(c));
    out
}

/// JSON form of a tableau.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CliffordJson {
    pub n: usize,
    pub d: u32,
    pub images: Vec<crate::pauli::PauliJson>,
}

impl From<&CliffordOp> for CliffordJson {
    fn from(c: &CliffordOp) -> Self {
        CliffordJson {
            n: c.n,
            d: c.d.get(),
            images: c.images.iter().map(Into::into).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FVec;

    fn p(d: u32) -> Prime {
        Prime::new(d).unwrap()
    }

    fn caps() -> Caps {
        Caps::default()
    }

    fn all_gates(n: usize) -> Vec<Gate> {
        let mut gs = Vec::new();
        for i in 0..n {
            gs.extend([
                Gate::H(i),
                Gate::S(i),
                Gate::X(i, 1),
                Gate::Z(i, 1),
                Gate::X(i, 2),
                Gate::Z(i, 2),
            ]);
            for j in 0..n {
                if i != j {
                    gs.extend([Gate::Cx(i, j), Gate::Cz(i, j)]);
                }
            }
        }
        gs
    }

    /// Conjugation of every generator by the dense gate matches the tableau.
    #[test]
    fn tensor_matches_kron() {
        for d in [2u32, 3] {
            let a = clifford_from_gates(1, p(d), &[Gate::H(0), Gate::S(0)]).unwrap();
            let b = clifford_from_gates(2, p(d), &[Gate::Cx(0, 1), Gate::Z(1, 1)]).unwrap();
            let t = a.tensor(&b);
            let dense = t.dense(&caps()).unwrap();
            let kron = a.dense(&caps()).unwrap().kron(&b.dense(&caps()).unwrap());
            assert!(dense.proportionality(&kron).is_some());
        }
    }

    #[test]
    fn gate_tableaux_match_dense_gates() {
        for d in [2u32, 3] {
            for n in [1usize, 2] {
                for g in all_gates(n) {
                    let u = gate_matrix(n, p(d), &g, &caps()).unwrap();
                    let t = gate_tableau(n, p(d), &g).unwrap();
                    for k in 0..2 * n {
                        let gen = PauliOp::weyl(FVec::unit(p(d), 2 * n, k));
                        let lhs = u.mul(&gen.weyl_matrix(&caps()).unwrap()).mul(&u.adjoint());
                        let rhs = t.conjugate(&gen).weyl_matrix(&caps()).unwrap();
                        assert_eq!(lhs, rhs, "d={d} n={n} gate={g} generator {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn hadamard_swaps_z_and_x() {
        let h = clifford_from_gates(1, p(2), &[Gate::H(0)]).unwrap();
        assert_eq!(h.conjugate(&PauliOp::z(1, p(2), 0)), PauliOp::x(1, p(2), 0));
        assert_eq!(h.conjugate(&PauliOp::x(1, p(2), 0)), PauliOp::z(1, p(2), 0));
        assert!(clifford_from_gates(1, p(2), &[]).unwrap().is_identity());
    }

    #[test]
    fn bad_gate_index() {
        assert!(clifford_from_gates(2, p(2), &[Gate::H(2)]).is_err());
        assert!(clifford_from_gates(2, p(2), &[Gate::Cx(1, 1)]).is_err());
    }

    #[test]
    fn dense_reconstruction_conjugates_like_tableau() {
        for d in [2u32, 3] {
            let gates = [
                Gate::H(0),
                Gate::Cx(0, 1),
                Gate::S(1),
                Gate::Cz(1, 0),
                Gate::X(0, 1),
                Gate::H(1),
                Gate::Z(1, 1),
            ];
            let c = clifford_from_gates(2, p(d), &gates).unwrap();
            let u = c.dense(&caps()).unwrap();
            assert_eq!(
                u.mul(&u.adjoint()),
                CMatrix::identity(order_for(d), (d * d) as usize)
            );
            for k in 0..4 {
                let gen = PauliOp::weyl(FVec::unit(p(d), 4, k));
                let lhs = u.mul(&gen.weyl_matrix(&caps()).unwrap()).mul(&u.adjoint());
                assert_eq!(lhs, c.conjugate(&gen).weyl_matrix(&caps()).unwrap());
            }
            // agrees with the gate product up to a global phase
            let g = gates_matrix(2, p(d), &gates, &caps()).unwrap();
            assert!(u.proportionality(&g).is_some());
        }
    }

    #[test]
    fn inverse_and_composition() {
        let c = clifford_from_gates(
            2,
            p(3),
            &[Gate::H(0), Gate::Cx(0, 1), Gate::S(1), Gate::X(1, 2)],
        )
        .unwrap();
        assert!(c.compose(&c.inverse()).is_identity());
        assert!(c.inverse().compose(&c).is_identity());
    }

    #[test]
    fn mapping_examples() {
        let d = p(2);
        let z = PauliOp::z(1, d, 0);
        let x = PauliOp::x(1, d, 0);
        assert!(find_clifford_mapping(1, d, &[(z.clone(), z.clone())])
            .unwrap()
            .is_identity());
        let h = find_clifford_mapping(1, d, &[(z.clone(), x.clone())]).unwrap();
        assert_eq!(h, clifford_from_gates(1, d, &[Gate::H(0)]).unwrap());
        let zi = PauliOp::z(2, d, 0);
        let xi = PauliOp::x(2, d, 0);
        let xx = PauliOp::from_zx(d, &[0, 0], &[1, 1]);
        let zz = PauliOp::from_zx(d, &[1, 1], &[0, 0]);
        // XX and ZZ commute while ZI and XI do not
        assert!(matches!(
            find_clifford_mapping(2, d, &[(zi.clone(), xx.clone()), (xi.clone(), zz.clone())]),
            Err(Error::NoSuchClifford(_))
        ));
        let c = find_clifford_mapping(2, d, &[(zi.clone(), xx.clone()), (xi.clone(), zi.clone())])
            .unwrap();
        assert_eq!(c.conjugate(&zi), xx);
        assert_eq!(c.conjugate(&xi), zi);
        assert!(matches!(
            find_clifford_mapping(1, d, &[(z.clone(), z.clone()), (x.clone(), z)]),
            Err(Error::NoSuchClifford(_))
        ));
    }

    #[test]
    fn synthesis_round_trip() {
        for d in [2u32, 3, 5] {
            let gates = [
                Gate::H(0),
                Gate::Cx(0, 1),
                Gate::S(1),
                Gate::Cz(1, 2),
                Gate::X(0, 1),
                Gate::H(2),
                Gate::Z(1, 1),
            ];
            let c = clifford_from_gates(3, p(d), &gates).unwrap();
            assert_eq!(clifford_from_gates(3, p(d), &c.to_gates()).unwrap(), c);
        }
    }
}
