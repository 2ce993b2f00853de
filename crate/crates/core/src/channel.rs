//! Channels over exact scalars, stored either as Kraus operators or as the
//! images E(|x⟩⟨y|) of the basis units.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{order_for, CycRat};
use crate::error::{Caps, Error, Result};
use crate::field::{point_from_index, FVec, Prime};
use crate::matrix::{CMatrix, MatrixJson};
use crate::pauli::PauliOp;
use crate::stabiliser::StabState;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChannelForm {
    Kraus(Vec<CMatrix>),
    /// Images of |x⟩⟨y|, indexed x·d^{n_in} + y.
    Superop(Vec<CMatrix>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Channel {
    d: Prime,
    n_in: usize,
    n_out: usize,
    form: ChannelForm,
}

/// J = (E ⊗ id)(|φ+⟩⟨φ+|), output factor first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiMatrix {
    pub d: Prime,
    pub n_in: usize,
    pub n_out: usize,
    pub matrix: CMatrix,
}

fn dims(d: Prime, n_in: usize, n_out: usize, caps: &Caps) -> Result<(usize, usize)> {
    let din = d.power_count(n_in);
    let dout = d.power_count(n_out);
    caps.check_dense(din.max(dout))?;
    Ok((din as usize, dout as usize))
}

fn rational(n: i64, m: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(m))
}

/// |+⟩ = d^{-n/2} Σ_x |x⟩.
fn plus_vector(n: usize, d: Prime) -> Vec<CycRat> {
    let dim = d.power_count(n) as usize;
    vec![CycRat::inv_sqrt_d_pow(d.get(), n as u32); dim]
}

impl Channel {
    pub fn from_kraus(
        d: Prime,
        n_in: usize,
        n_out: usize,
        ops: Vec<CMatrix>,
        caps: &Caps,
    ) -> Result<Self> {
        let (din, dout) = dims(d, n_in, n_out, caps)?;
        if ops.is_empty() || ops.iter().any(|k| k.rows() != dout || k.cols() != din) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators must be nonempty and {dout}x{din}"
            )));
        }
        Ok(Channel {
            d,
            n_in,
            n_out,
            form: ChannelForm::Kraus(ops),
        })
    }

    pub fn from_superop(
        d: Prime,
        n_in: usize,
        n_out: usize,
        images: Vec<CMatrix>,
        caps: &Caps,
    ) -> Result<Self> {
        let (din, dout) = dims(d, n_in, n_out, caps)?;
        if images.len() != din * din || images.iter().any(|m| m.rows() != dout || m.cols() != dout)
        {
            return Err(Error::DimensionMismatch(format!(
                "need {} images of size {dout}x{dout}",
                din * din
            )));
        }
        Ok(Channel {
            d,
            n_in,
            n_out,
            form: ChannelForm::Superop(images),
        })
    }

    pub fn modulus(&self) -> Prime {
        self.d
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn form(&self) -> &ChannelForm {
        &self.form
    }

    pub fn dim_in(&self) -> usize {
        self.d.power_count(self.n_in) as usize
    }

    pub fn dim_out(&self) -> usize {
        self.d.power_count(self.n_out) as usize
    }

    fn order(&self) -> u32 {
        order_for(self.d.get())
    }

    /// E(|x⟩⟨y|).
    pub fn image(&self, x: usize, y: usize) -> CMatrix {
        match &self.form {
            ChannelForm::Superop(images) => images[x * self.dim_in() + y].clone(),
            ChannelForm::Kraus(ops) => {
                let mut acc = CMatrix::zeros(self.order(), self.dim_out(), self.dim_out());
                for k in ops {
                    acc.add_assign(&CMatrix::outer(&k.column(x), &k.column(y)));
                }
                acc
            }
        }
    }

    pub fn to_superop(&self) -> Channel {
        let din = self.dim_in();
        let images = (0..din * din)
            .into_par_iter()
            .map(|k| self.image(k / din, k % din))
            .collect();
        Channel {
            d: self.d,
            n_in: self.n_in,
            n_out: self.n_out,
            form: ChannelForm::Superop(images),
        }
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        let din = self.dim_in();
        if rho.rows() != din || rho.cols() != din {
            return Err(Error::DimensionMismatch(format!(
                "input must be {din}x{din}"
            )));
        }
        Ok(match &self.form {
            ChannelForm::Kraus(ops) => {
                let mut acc = CMatrix::zeros(self.order(), self.dim_out(), self.dim_out());
                for k in ops {
                    acc.add_assign(&k.mul(rho).mul(&k.adjoint()));
                }
                acc
            }
            ChannelForm::Superop(images) => {
                let mut acc = CMatrix::zeros(self.order(), self.dim_out(), self.dim_out());
                for (x, y, v) in rho.nonzeros() {
                    acc.add_assign(&images[x * din + y].scale(v));
                }
                acc
            }
        })
    }

    /// E†(O), defined by tr(E(ρ)·O) = tr(ρ·E†(O)).
    pub fn adjoint_apply(&self, obs: &CMatrix) -> Result<CMatrix> {
        let dout = self.dim_out();
        if obs.rows() != dout || obs.cols() != dout {
            return Err(Error::DimensionMismatch(format!(
                "observable must be {dout}x{dout}"
            )));
        }
        Ok(match &self.form {
            ChannelForm::Kraus(ops) => {
                let mut acc = CMatrix::zeros(self.order(), self.dim_in(), self.dim_in());
                for k in ops {
                    acc.add_assign(&k.adjoint().mul(obs).mul(k));
                }
                acc
            }
            ChannelForm::Superop(_) => {
                let din = self.dim_in();
                let order = self.order();
                CMatrix::from_fn(order, din, din, |x, y| {
                    trace_product(obs, &self.image(y, x))
                })
            }
        })
    }

    pub fn is_trace_preserving(&self) -> bool {
        let din = self.dim_in();
        match &self.form {
            ChannelForm::Kraus(ops) => {
                let mut acc = CMatrix::zeros(self.order(), din, din);
                for k in ops {
                    acc.add_assign(&k.adjoint().mul(k));
                }
                acc == CMatrix::identity(self.order(), din)
            }
            ChannelForm::Superop(images) => (0..din).all(|x| {
                (0..din).all(|y| {
                    let t = images[x * din + y].trace();
                    if x == y {
                        t.is_one()
                    } else {
                        t.is_zero()
                    }
                })
            }),
        }
    }

    pub fn choi(&self) -> ChoiMatrix {
        let din = self.dim_in();
        let dout = self.dim_out();
        let order = self.order();
        let scale = CycRat::from_rational(order, rational(1, din as i64));
        let blocks: Vec<CMatrix> = (0..din * din)
            .into_par_iter()
            .map(|k| self.image(k / din, k % din))
            .collect();
        let mut m = CMatrix::zeros(order, dout * din, dout * din);
        for (k, block) in blocks.iter().enumerate() {
            let (x, y) = (k / din, k % din);
            for (i, j, v) in block.nonzeros() {
                m.set(i * din + x, j * din + y, v * &scale);
            }
        }
        ChoiMatrix {
            d: self.d,
            n_in: self.n_in,
            n_out: self.n_out,
            matrix: m,
        }
    }
}

/// tr(A·B).
fn trace_product(a: &CMatrix, b: &CMatrix) -> CycRat {
    let mut t = CycRat::zero(a.order());
    for (i, j, v) in a.nonzeros() {
        let w = b.get(j, i);
        if !w.is_zero() {
            t += &(v * w);
        }
    }
    t
}

impl ChoiMatrix {
    fn dims(&self) -> (usize, usize) {
        (
            self.d.power_count(self.n_in) as usize,
            self.d.power_count(self.n_out) as usize,
        )
    }

    /// tr_out J = 1/d^{n_in}.
    pub fn is_trace_preserving(&self) -> bool {
        let (din, dout) = self.dims();
        let order = self.matrix.order();
        let expect = CMatrix::identity(order, din).scale_rational(&rational(1, din as i64));
        self.matrix.partial_trace_first(dout, din) == expect
    }

    /// E(|x⟩⟨y|) = d^{n_in} (1 ⊗ ⟨x|) J (1 ⊗ |y⟩).
    pub fn to_channel(&self, caps: &Caps) -> Result<Channel> {
        let (din, dout) = self.dims();
        if self.matrix.rows() != din * dout || self.matrix.cols() != din * dout {
            return Err(Error::DimensionMismatch("Choi matrix size".into()));
        }
        let order = self.matrix.order();
        let scale = CycRat::from_int(order, din as i64);
        let images = (0..din * din)
            .map(|k| {
                let (x, y) = (k / din, k % din);
                CMatrix::from_fn(order, dout, dout, |i, j| {
                    self.matrix.get(i * din + x, j * din + y) * &scale
                })
            })
            .collect();
        Channel::from_superop(self.d, self.n_in, self.n_out, images, caps)
    }
}

/// The λ matrix: zero on label 0; for nonzero x, y the entry is 1/(d^n−1)
/// when y = x, 0 when y is another multiple of x, and 1/(d(d^n−1)) otherwise.
pub fn lambda_sigma(n: usize, d: Prime) -> CMatrix {
    let dim = d.power_count(n) as usize;
    let m = dim as i64 - 1;
    let order = order_for(d.get());
    CMatrix::from_fn(order, dim, dim, |i, j| {
        if i == 0 || j == 0 {
            return CycRat::zero(order);
        }
        let x = point_from_index(d, n, i);
        let y = point_from_index(d, n, j);
        let r = match proportional_factor(d, &x, &y) {
            Some(1) => rational(1, m),
            Some(_) => rational(0, 1),
            None => rational(1, d.get() as i64 * m),
        };
        CycRat::from_rational(order, r)
    })
}

/// t with y = t·x, for nonzero x.
fn proportional_factor(d: Prime, x: &[u32], y: &[u32]) -> Option<u32> {
    let k = x.iter().position(|&v| v != 0)?;
    let t = d.mul(y[k], d.inv(x[k]));
    x.iter()
        .zip(y)
        .all(|(&a, &b)| d.mul(t, a) == b)
        .then_some(t)
}

/// The Λ channel. For d = 2 it is built from Kraus operators H^{⊗n}|0⟩⟨0|
/// and 2^{-(n-1)/2}(1 − Z(z))/2 for z ≠ 0; otherwise from λ by [`ad_embed`].
pub fn lambda_channel(n: usize, d: Prime, caps: &Caps) -> Result<Channel> {
    if n == 0 {
        return Err(Error::DimensionMismatch(
            "Λ needs at least one qudit".into(),
        ));
    }
    if d.get() != 2 {
        return ad_embed(&lambda_sigma(n, d), n, d, caps);
    }
    let (dim, _) = dims(d, n, n, caps)?;
    let order = order_for(2);
    let mut ops = vec![CMatrix::outer(
        &plus_vector(n, d),
        &unit_vector(order, dim, 0),
    )];
    let scale = CycRat::inv_sqrt_d_pow(2, n as u32 - 1);
    for z in 1..dim {
        let zv = point_from_index(d, n, z);
        let k = CMatrix::from_fn(order, dim, dim, |i, j| {
            let x = point_from_index(d, n, i);
            if i == j && crate::field::dot(d, &zv, &x) == 1 {
                scale.clone()
            } else {
                CycRat::zero(order)
            }
        });
        ops.push(k);
    }
    Channel::from_kraus(d, n, n, ops, caps)
}

fn unit_vector(order: u32, dim: usize, i: usize) -> Vec<CycRat> {
    let mut v = vec![CycRat::zero(order); dim];
    v[i] = CycRat::one(order);
    v
}

/// E(ρ) = (d^n−1)·σ∘ρ + ⟨0|ρ|0⟩·|+⟩⟨+|.
pub fn ad_embed(sigma: &CMatrix, n: usize, d: Prime, caps: &Caps) -> Result<Channel> {
    let (dim, _) = dims(d, n, n, caps)?;
    if sigma.rows() != dim || sigma.cols() != dim {
        return Err(Error::Malformed(format!("σ must be {dim}x{dim}")));
    }
    if !sigma.is_hermitian() {
        return Err(Error::Malformed("σ is not Hermitian".into()));
    }
    if (0..dim).any(|i| !sigma.get(0, i).is_zero()) {
        return Err(Error::Malformed("σ has a nonzero entry in row 0".into()));
    }
    let order = sigma.order();
    let pin = CycRat::from_rational(order, rational(1, dim as i64 - 1));
    if (1..dim).any(|i| *sigma.get(i, i) != pin) {
        return Err(Error::Malformed(
            "σ diagonal is not 1/(d^n−1) off label 0".into(),
        ));
    }
    let factor = CycRat::from_int(order, dim as i64 - 1);
    let plus = CMatrix::outer(&plus_vector(n, d), &plus_vector(n, d));
    let images = (0..dim * dim)
        .map(|k| {
            let (x, y) = (k / dim, k % dim);
            if k == 0 {
                plus.clone()
            } else {
                let mut m = CMatrix::zeros(order, dim, dim);
                m.set(x, y, sigma.get(x, y) * &factor);
                m
            }
        })
        .collect();
    Channel::from_superop(d, n, n, images, caps)
}

/// E(|0⟩⟨0|) = |+⟩⟨+| and E(|x⟩⟨x|) = |x⟩⟨x| for x ≠ 0.
pub fn is_ad(ch: &Channel) -> bool {
    if ch.n_in != ch.n_out {
        return false;
    }
    let dim = ch.dim_in();
    let order = ch.order();
    let plus = plus_vector(ch.n_in, ch.d);
    if ch.image(0, 0) != CMatrix::outer(&plus, &plus) {
        return false;
    }
    (1..dim)
        .into_par_iter()
        .all(|x| ch.image(x, x) == CMatrix::unit(order, dim, dim, x, x))
}

/// Exact equality of the action on every |x⟩⟨y|.
pub fn channels_equal(a: &Channel, b: &Channel) -> bool {
    if (a.d, a.n_in, a.n_out) != (b.d, b.n_in, b.n_out) {
        return false;
    }
    let din = a.dim_in();
    (0..din * din)
        .into_par_iter()
        .all(|k| a.image(k / din, k % din) == b.image(k / din, k % din))
}

/// First non-identity Pauli, in index order of its (z|x) vector, with E(w(a)) = 0.
pub fn kernel_pauli_scan(ch: &Channel, caps: &Caps) -> Result<Option<PauliOp>> {
    let n = ch.n_in;
    let d = ch.d;
    caps.check_dense(d.power_count(n))?;
    let sup = ch.to_superop();
    let din = ch.dim_in();
    let total = d.power_count(2 * n) as usize;
    let order = ch.order();
    let found = (1..total).into_par_iter().find_first(|&idx| {
        let p = PauliOp::weyl(FVec::from_index(d, 2 * n, idx));
        let mut acc = CMatrix::zeros(order, ch.dim_out(), ch.dim_out());
        for y in 0..din {
            let (e, t) = p.act_on_basis(&point_from_index(d, n, y));
            let t = crate::field::point_index(d, &t);
            acc.add_assign(&sup.image(t, y).scale(&CycRat::tau_pow(d.get(), e)));
        }
        acc.is_zero()
    });
    Ok(found.map(|idx| PauliOp::weyl(FVec::from_index(d, 2 * n, idx))))
}

/// (p, c) with m = c·w(p) and c ≠ 0, if m is a nonzero multiple of a Pauli.
pub fn pauli_proportional(
    m: &CMatrix,
    n: usize,
    d: Prime,
    caps: &Caps,
) -> Result<Option<(PauliOp, CycRat)>> {
    let Some((i, j, _)) = m.nonzeros().next() else {
        return Ok(None);
    };
    let xi = point_from_index(d, n, i);
    let xj = point_from_index(d, n, j);
    let x: Vec<u32> = xi.iter().zip(&xj).map(|(&a, &b)| d.sub(a, b)).collect();
    let count = d.power_count(n) as usize;
    for z in 0..count {
        let p = PauliOp::from_zx(d, &point_from_index(d, n, z), &x);
        if let Some(c) = m.proportionality(&p.weyl_matrix(caps)?) {
            return Ok(Some((p, c)));
        }
    }
    Ok(None)
}

/// The first generator g among Z_1…Z_n, X_1…X_n whose image E†(w(g)) is not
/// a nonzero multiple of a Pauli. A Clifford dilation admits none.
pub fn clifford_dilation_witness(ch: &Channel, caps: &Caps) -> Result<Option<PauliOp>> {
    let n = ch.n_out;
    let d = ch.d;
    let gens = (0..n)
        .map(|i| PauliOp::z(n, d, i))
        .chain((0..n).map(|i| PauliOp::x(n, d, i)));
    for g in gens {
        let img = ch.adjoint_apply(&g.weyl_matrix(caps)?)?;
        if pauli_proportional(&img, ch.n_in, d, caps)?.is_none() {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// True when every generator passes [`clifford_dilation_witness`].
pub fn clifford_dilation_obstruction(ch: &Channel, caps: &Caps) -> Result<bool> {
    Ok(clifford_dilation_witness(ch, caps)?.is_none())
}

/// Unitary that maps every Pauli to a multiple of a Pauli under conjugation.
pub fn is_clifford_unitary(u: &CMatrix, n: usize, d: Prime, caps: &Caps) -> Result<bool> {
    let order = u.order();
    if u.rows() != u.cols() || u.adjoint().mul(u) != CMatrix::identity(order, u.rows()) {
        return Ok(false);
    }
    for g in (0..n)
        .map(|i| PauliOp::z(n, d, i))
        .chain((0..n).map(|i| PauliOp::x(n, d, i)))
    {
        let img = u.mul(&g.weyl_matrix(caps)?).mul(&u.adjoint());
        if pauli_proportional(&img, n, d, caps)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Eigenstates of a single-qudit Pauli w(a), one per eigenvalue ω^{-k}.
pub fn pauli_eigenbasis(a: &PauliOp) -> Result<Vec<StabState>> {
    if a.n() != 1 || a.is_identity() {
        return Err(Error::DimensionMismatch(
            "need a non-identity single-qudit Pauli".into(),
        ));
    }
    let d = a.modulus();
    let base = a.with_phase(0);
    (0..d.get() as i64)
        .map(|k| StabState::from_generators(1, d, &[base.shift_phase(2 * k)]))
        .collect()
}

/// C_i = √d·diag(s_i) for the eigenbasis s_i of a single-qudit Pauli.
pub fn diagonal_unitaries(a: &PauliOp) -> Result<Vec<CMatrix>> {
    let d = a.modulus();
    let order = order_for(d.get());
    let root = CycRat::sqrt_d(d.get());
    Ok(pauli_eigenbasis(a)?
        .iter()
        .map(|s| {
            let amps = s.amplitudes();
            CMatrix::from_fn(order, amps.len(), amps.len(), |i, j| {
                if i == j {
                    &amps[i] * &root
                } else {
                    CycRat::zero(order)
                }
            })
        })
        .collect())
}

/// Number of qudits m with d^m = dim.
fn qudits_for(d: Prime, dim: usize) -> Result<usize> {
    let mut m = 0;
    while (d.power_count(m) as usize) < dim {
        m += 1;
    }
    if d.power_count(m) as usize != dim {
        return Err(Error::DimensionMismatch(format!(
            "{dim} is not a power of {}",
            d.get()
        )));
    }
    Ok(m)
}

/// ρ ↦ Σ_x (P̃⊗|x⟩⟨x|) ρ (P̃⊗|x⟩⟨x|), measuring the last qudit.
pub fn pinching_channel(p_tilde: &CMatrix, d: Prime, caps: &Caps) -> Result<Channel> {
    let n = qudits_for(d, p_tilde.rows())? + 1;
    let order = p_tilde.order();
    let ops = (0..d.get() as usize)
        .map(|x| {
            p_tilde.kron(&CMatrix::unit(
                order,
                d.get() as usize,
                d.get() as usize,
                x,
                x,
            ))
        })
        .collect();
    Channel::from_kraus(d, n, n, ops, caps)
}

/// ρ ↦ (1/d) Σ_i (P̃⊗C_i) ρ (P̃⊗C_i)†, with C_i from [`diagonal_unitaries`].
pub fn pinching_as_diagonal_mixture(
    p_tilde: &CMatrix,
    a: &PauliOp,
    caps: &Caps,
) -> Result<Channel> {
    let d = a.modulus();
    let n = qudits_for(d, p_tilde.rows())? + 1;
    let scale = CycRat::inv_sqrt_d_pow(d.get(), 1);
    let ops = diagonal_unitaries(a)?
        .iter()
        .map(|c| p_tilde.kron(c).scale(&scale))
        .collect();
    Channel::from_kraus(d, n, n, ops, caps)
}

pub const BUILTINS: &[&str] = &[
    "lambda",
    "identity",
    "measure00-hadamard",
    "reset-plus",
    "dephase-z",
];

/// Named channels on n qudits.
pub fn builtin(name: &str, n: usize, d: Prime, caps: &Caps) -> Result<Channel> {
    let (dim, _) = dims(d, n, n, caps)?;
    let order = order_for(d.get());
    let plus = plus_vector(n, d);
    let ops = match name {
        "lambda" => return lambda_channel(n, d, caps),
        "identity" => vec![CMatrix::identity(order, dim)],
        "measure00-hadamard" => {
            let p0 = CMatrix::unit(order, dim, dim, 0, 0);
            vec![
                CMatrix::outer(&plus, &unit_vector(order, dim, 0)),
                CMatrix::identity(order, dim).sub(&p0),
            ]
        }
        "reset-plus" => (0..dim)
            .map(|x| CMatrix::outer(&plus, &unit_vector(order, dim, x)))
            .collect(),
        "dephase-z" => (0..dim)
            .map(|x| CMatrix::unit(order, dim, dim, x, x))
            .collect(),
        _ => {
            return Err(Error::Malformed(format!(
                "unknown builtin channel {name:?}; known: {}",
                BUILTINS.join(", ")
            )))
        }
    };
    Channel::from_kraus(d, n, n, ops, caps)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelJson {
    pub schema: String,
    pub d: u32,
    pub n_in: usize,
    pub n_out: usize,
    /// "kraus", "choi" or "superop".
    pub form: String,
    pub data: Vec<MatrixJson>,
}

impl From<&Channel> for ChannelJson {
    fn from(ch: &Channel) -> Self {
        let (form, data) = match &ch.form {
            ChannelForm::Kraus(ops) => ("kraus", ops),
            ChannelForm::Superop(images) => ("superop", images),
        };
        ChannelJson {
            schema: crate::SCHEMA.into(),
            d: ch.d.get(),
            n_in: ch.n_in,
            n_out: ch.n_out,
            form: form.into(),
            data: data.iter().map(Into::into).collect(),
        }
    }
}

impl From<&ChoiMatrix> for ChannelJson {
    fn from(j: &ChoiMatrix) -> Self {
        ChannelJson {
            schema: crate::SCHEMA.into(),
            d: j.d.get(),
            n_in: j.n_in,
            n_out: j.n_out,
            form: "choi".into(),
            data: vec![(&j.matrix).into()],
        }
    }
}

impl ChannelJson {
    pub fn to_channel(&self, caps: &Caps) -> Result<Channel> {
        if self.schema != crate::SCHEMA {
            return Err(Error::Malformed(format!(
                "unsupported schema {:?}",
                self.schema
            )));
        }
        let d = Prime::new(self.d)?;
        let mats = self
            .data
            .iter()
            .map(MatrixJson::to_matrix)
            .collect::<Result<Vec<_>>>()?;
        if mats.iter().any(|m| m.order() != order_for(d.get())) {
            return Err(Error::Malformed(format!(
                "entries must live in Q(ζ_{})",
                order_for(d.get())
            )));
        }
        match self.form.as_str() {
            "kraus" => Channel::from_kraus(d, self.n_in, self.n_out, mats, caps),
            "superop" => Channel::from_superop(d, self.n_in, self.n_out, mats, caps),
            "choi" => {
                let [matrix]: [CMatrix; 1] = mats
                    .try_into()
                    .map_err(|_| Error::Malformed("choi form carries exactly one matrix".into()))?;
                ChoiMatrix {
                    d,
                    n_in: self.n_in,
                    n_out: self.n_out,
                    matrix,
                }
                .to_channel(caps)
            }
            other => Err(Error::Malformed(format!("unknown channel form {other:?}"))),
        }
    }
}
