//! Phase-tracked generalised Pauli operators τ^k w(a).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::{order_for, CycRat};
use crate::error::{Caps, Error, Result};
use crate::field::{dot, symp, FVec, Prime};
use crate::matrix::CMatrix;

/// D: the order of τ. 4 for qubits, d otherwise.
pub fn phase_order(d: Prime) -> u32 {
    if d.get() == 2 {
        4
    } else {
        d.get()
    }
}

/// γ(a) = a_z · a_x over integer representatives, reduced mod D.
pub fn gamma(d: Prime, a: &[u32]) -> u32 {
    let n = a.len() / 2;
    let s: u64 = a[..n]
        .iter()
        .zip(&a[n..])
        .map(|(&z, &x)| z as u64 * x as u64)
        .sum();
    (s % phase_order(d) as u64) as u32
}

/// τ^phase · w(a) with w(a) = τ^{−γ(a)} Z(a_z) X(a_x).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOp {
    phase: u32,
    a: FVec,
}

impl PauliOp {
    pub fn new(phase: i64, a: FVec) -> Result<Self> {
        if !a.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "symplectic vector of odd length {}",
                a.len()
            )));
        }
        let big_d = phase_order(a.modulus()) as i64;
        Ok(PauliOp {
            phase: phase.rem_euclid(big_d) as u32,
            a,
        })
    }

    pub fn weyl(a: FVec) -> Self {
        Self::new(0, a).expect("even length")
    }

    pub(crate) fn from_raw(d: Prime, phase: i64, a: Vec<u32>) -> Self {
        let big_d = phase_order(d) as i64;
        PauliOp {
            phase: phase.rem_euclid(big_d) as u32,
            a: FVec::from_reduced(d, a),
        }
    }

    pub fn identity(n: usize, d: Prime) -> Self {
        Self::weyl(FVec::zeros(d, 2 * n))
    }

    /// Z on qudit i (0-based).
    pub fn z(n: usize, d: Prime, i: usize) -> Self {
        Self::weyl(FVec::unit(d, 2 * n, i))
    }

    /// X on qudit i (0-based).
    pub fn x(n: usize, d: Prime, i: usize) -> Self {
        Self::weyl(FVec::unit(d, 2 * n, n + i))
    }

    pub fn from_zx(d: Prime, z: &[u32], x: &[u32]) -> Self {
        Self::weyl(FVec::from_zx(d, z, x))
    }

    pub fn n(&self) -> usize {
        self.a.len() / 2
    }

    pub fn modulus(&self) -> Prime {
        self.a.modulus()
    }

    pub fn phase(&self) -> u32 {
        self.phase
    }

    pub fn a(&self) -> &FVec {
        &self.a
    }

    pub fn with_phase(&self, phase: i64) -> Self {
        Self::from_raw(self.modulus(), phase, self.a.entries().to_vec())
    }

    /// Multiplies the phase by τ^e.
    pub fn shift_phase(&self, e: i64) -> Self {
        self.with_phase(self.phase as i64 + e)
    }

    pub fn is_identity(&self) -> bool {
        self.phase == 0 && self.a.is_zero()
    }

    pub fn is_diagonal(&self) -> bool {
        self.a.x_part().iter().all(|&v| v == 0)
    }

    fn check(&self, other: &PauliOp) -> Result<()> {
        if self.modulus() != other.modulus() || self.a.len() != other.a.len() {
            return Err(Error::DimensionMismatch(format!(
                "Pauli on {} qudits (d={}) vs {} qudits (d={})",
                self.n(),
                self.modulus(),
                other.n(),
                other.modulus()
            )));
        }
        Ok(())
    }

    /// Product self·other.
    ///
    /// w(a)w(b) = τ^{−γ(a)−γ(b)} Z(a_z)X(a_x)Z(b_z)X(b_x), and moving X(a_x)
    /// past Z(b_z) costs ω^{−a_x·b_z} = τ^{−2 a_x·b_z}.
    pub fn mul(&self, other: &PauliOp) -> PauliOp {
        let p = self.modulus();
        let n = self.n();
        let (a, b) = (self.a.entries(), other.a.entries());
        let c: Vec<u32> = a.iter().zip(b).map(|(&x, &y)| p.add(x, y)).collect();
        let cross = dot(p, &a[n..], &b[..n]) as i64;
        let e = self.phase as i64 + other.phase as i64
            - gamma(p, a) as i64
            - gamma(p, b) as i64
            - 2 * cross
            + gamma(p, &c) as i64;
        Self::from_raw(p, e, c)
    }

    pub fn pow(&self, k: u64) -> PauliOp {
        let mut acc = PauliOp::identity(self.n(), self.modulus());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        acc
    }

    pub fn inverse(&self) -> PauliOp {
        let p = self.modulus();
        let neg = Self::from_raw(p, 0, self.a.neg().into_entries());
        let prod = self.mul(&neg);
        debug_assert!(prod.a.is_zero());
        neg.shift_phase(-(prod.phase as i64))
    }

    /// Entrywise complex conjugate, again a Pauli: τ^{γ(a)−φ+γ(a')} w(a') with a' = (−a_z | a_x).
    pub fn conj(&self) -> PauliOp {
        let p = self.modulus();
        let n = self.n();
        let a = self.a.entries();
        let mut b = a.to_vec();
        for v in &mut b[..n] {
            *v = p.neg(*v);
        }
        let e = gamma(p, a) as i64 - self.phase as i64 + gamma(p, &b) as i64;
        Self::from_raw(p, e, b)
    }

    /// Restriction to the qudits in `range`, keeping the phase.
    pub fn restrict(&self, range: std::ops::Range<usize>) -> PauliOp {
        let n = self.n();
        let a = self.a.entries();
        let mut b: Vec<u32> = a[range.clone()].to_vec();
        b.extend_from_slice(&a[n + range.start..n + range.end]);
        Self::from_raw(self.modulus(), self.phase as i64, b)
    }

    /// self ⊗ other, phases multiplied.
    pub fn tensor(&self, other: &PauliOp) -> PauliOp {
        let (a, b) = (self.a.entries(), other.a.entries());
        let (n, m) = (self.n(), other.n());
        let mut c = a[..n].to_vec();
        c.extend_from_slice(&b[..m]);
        c.extend_from_slice(&a[n..]);
        c.extend_from_slice(&b[m..]);
        Self::from_raw(self.modulus(), self.phase as i64 + other.phase as i64, c)
    }

    /// The symplectic product [self.a, other.a].
    pub fn symplectic(&self, other: &PauliOp) -> u32 {
        symp(self.modulus(), self.a.entries(), other.a.entries())
    }

    pub fn commutes(&self, other: &PauliOp) -> bool {
        self.symplectic(other) == 0
    }

    /// w(a)|y⟩ = τ^e |y + a_x⟩; returns (e, y + a_x).
    pub fn act_on_basis(&self, y: &[u32]) -> (i64, Vec<u32>) {
        let p = self.modulus();
        let n = self.n();
        let a = self.a.entries();
        let target: Vec<u32> = y.iter().zip(&a[n..]).map(|(&v, &x)| p.add(v, x)).collect();
        let e = self.phase as i64 - gamma(p, a) as i64 + 2 * dot(p, &a[..n], &target) as i64;
        (e, target)
    }

    pub fn weyl_matrix(&self, caps: &Caps) -> Result<CMatrix> {
        let p = self.modulus();
        let dim = p.power_count(self.n());
        caps.check_dense(dim)?;
        let dim = dim as usize;
        let d = p.get();
        let mut m = CMatrix::zeros(order_for(d), dim, dim);
        for col in 0..dim {
            let y = crate::field::point_from_index(p, self.n(), col);
            let (e, t) = self.act_on_basis(&y);
            m.set(crate::field::point_index(p, &t), col, CycRat::tau_pow(d, e));
        }
        Ok(m)
    }
}

pub fn pauli_mul(p: &PauliOp, q: &PauliOp) -> Result<PauliOp> {
    p.check(q)?;
    Ok(p.mul(q))
}

pub fn commutes(p: &PauliOp, q: &PauliOp) -> Result<bool> {
    p.check(q)?;
    Ok(p.commutes(q))
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != 0 {
            write!(f, "t^{} ", self.phase)?;
        }
        write!(f, "w(")?;
        for v in self.a.z_part() {
            write!(f, "{v}")?;
        }
        write!(f, "|")?;
        for v in self.a.x_part() {
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// JSON form: {"phase", "z", "x"}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PauliJson {
    pub phase: u32,
    pub z: Vec<u32>,
    pub x: Vec<u32>,
}

impl From<&PauliOp> for PauliJson {
    fn from(p: &PauliOp) -> Self {
        PauliJson {
            phase: p.phase,
            z: p.a.z_part().to_vec(),
            x: p.a.x_part().to_vec(),
        }
    }
}

impl PauliJson {
    pub fn to_pauli(&self, d: Prime) -> Result<PauliOp> {
        if self.z.len() != self.x.len() {
            return Err(Error::Malformed(
                "Pauli z and x parts differ in length".into(),
            ));
        }
        PauliOp::new(self.phase as i64, FVec::from_zx(d, &self.z, &self.x))
    }
}
