//! Stabiliser groups, codes, and pure stabiliser states in canonical form.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{order_for, CycRat};
use crate::error::{Caps, Error, Result};
use crate::field::{
    combinations, dot, linalg, point_from_index, point_index, symp, AffineSubspace, FVec, Prime,
};
use crate::matrix::CMatrix;
use crate::pauli::{gamma, phase_order, PauliOp};

/// An abelian subgroup of the Pauli group without nontrivial scalars, kept as
/// a reduced (row-echelon, phase-tracked) generating set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StabGroup {
    n: usize,
    d: Prime,
    generators: Vec<PauliOp>,
}

/// Row-reduces Paulis by group multiplication, visiting columns in `cols`
/// order. Returns the nonzero rows; errors if a product collapses to a
/// nontrivial scalar.
fn reduce_paulis(d: Prime, mut rows: Vec<PauliOp>, cols: &[usize]) -> Result<Vec<PauliOp>> {
    let mut r = 0;
    for &c in cols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k].a().entries()[c] != 0) else {
            continue;
        };
        rows.swap(r, k);
        let lead = rows[r].a().entries()[c];
        rows[r] = rows[r].pow(d.inv(lead) as u64);
        for i in 0..rows.len() {
            let v = rows[i].a().entries()[c];
            if i != r && v != 0 {
                rows[i] = rows[i].mul(&rows[r].pow((d.get() - v) as u64));
            }
        }
        r += 1;
    }
    for extra in &rows[r..] {
        if extra.phase() != 0 {
            return Err(Error::InvalidGroup(format!("generates the scalar {extra}")));
        }
    }
    rows.truncate(r);
    Ok(rows)
}

impl StabGroup {
    pub fn new(n: usize, d: Prime, generators: Vec<PauliOp>) -> Result<Self> {
        for g in &generators {
            if g.n() != n || g.modulus() != d {
                return Err(Error::DimensionMismatch(format!(
                    "generator {g} not on {n} qudits with d={d}"
                )));
            }
        }
        for (i, g) in generators.iter().enumerate() {
            for h in &generators[i + 1..] {
                if !g.commutes(h) {
                    return Err(Error::InvalidGroup(format!("{g} and {h} do not commute")));
                }
            }
        }
        let cols: Vec<usize> = (0..2 * n).collect();
        let generators = reduce_paulis(d, generators, &cols)?;
        for g in &generators {
            if !g.pow(d.get() as u64).is_identity() {
                return Err(Error::InvalidGroup(format!(
                    "{g} has a nontrivial scalar power"
                )));
            }
        }
        Ok(StabGroup { n, d, generators })
    }

    pub fn trivial(n: usize, d: Prime) -> Self {
        StabGroup {
            n,
            d,
            generators: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> Prime {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliOp] {
        &self.generators
    }

    pub fn vectors(&self) -> Vec<Vec<u32>> {
        self.generators
            .iter()
            .map(|g| g.a().entries().to_vec())
            .collect()
    }

    /// All d^k elements, ordered by exponent vector.
    pub fn elements(&self) -> Vec<PauliOp> {
        let k = self.rank();
        let count = self.d.power_count(k) as usize;
        let powers: Vec<Vec<PauliOp>> = self
            .generators
            .iter()
            .map(|g| {
                let mut v = vec![PauliOp::identity(self.n, self.d)];
                for _ in 1..self.d.get() {
                    let next = v.last().unwrap().mul(g);
                    v.push(next);
                }
                v
            })
            .collect();
        (0..count)
            .map(|idx| {
                let t = point_from_index(self.d, k, idx);
                t.iter()
                    .zip(&powers)
                    .fold(PauliOp::identity(self.n, self.d), |acc, (&ti, pw)| {
                        acc.mul(&pw[ti as usize])
                    })
            })
            .collect()
    }

    /// The group element with vector a, if any.
    pub fn element_with_vector(&self, a: &[u32]) -> Option<PauliOp> {
        let c = linalg::coordinates(self.d, &self.vectors(), a)?;
        Some(
            self.generators
                .iter()
                .zip(&c)
                .fold(PauliOp::identity(self.n, self.d), |acc, (g, &ci)| {
                    acc.mul(&g.pow(ci as u64))
                }),
        )
    }

    pub fn contains(&self, p: &PauliOp) -> bool {
        self.element_with_vector(p.a().entries())
            .is_some_and(|e| e == *p)
    }

    /// The group with each generator's eigenvalue shifted: g_j → ω^{c_j} g_j.
    pub fn with_character(&self, c: &[u32]) -> StabGroup {
        let generators = self
            .generators
            .iter()
            .zip(c)
            .map(|(g, &cj)| g.shift_phase(2 * cj as i64))
            .collect();
        StabGroup {
            n: self.n,
            d: self.d,
            generators,
        }
    }

    /// Symplectic complement Ŝ^⊥ as an RREF basis.
    pub fn symplectic_complement(&self) -> Vec<Vec<u32>> {
        let n = self.n;
        let rows: Vec<Vec<u32>> = self
            .vectors()
            .iter()
            .map(|a| {
                let mut r = vec![0u32; 2 * n];
                for i in 0..n {
                    r[i] = self.d.neg(a[n + i]);
                    r[n + i] = a[i];
                }
                r
            })
            .collect();
        if rows.is_empty() {
            return (0..2 * n)
                .map(|i| (0..2 * n).map(|j| u32::from(i == j)).collect())
                .collect();
        }
        linalg::nullspace(self.d, &rows, 2 * n)
    }
}

/// A stabiliser code: the common +1 eigenspace of a group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StabCode {
    pub group: StabGroup,
}

impl StabCode {
    pub fn new(group: StabGroup) -> Self {
        StabCode { group }
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    /// P = |S|^{-1} Σ_{s∈S} s.
    pub fn projector(&self, caps: &Caps) -> Result<CMatrix> {
        let g = &self.group;
        let dim = g.d.power_count(g.n);
        caps.check_dense(dim)?;
        let order = order_for(g.d.get());
        let mut acc = CMatrix::zeros(order, dim as usize, dim as usize);
        for s in g.elements() {
            acc.add_assign(&s.weyl_matrix(caps)?);
        }
        let norm = BigRational::new(BigInt::one(), BigInt::from(g.d.power_count(g.rank())));
        Ok(acc.scale_rational(&norm))
    }
}

pub fn projector(code: &StabCode, caps: &Caps) -> Result<CMatrix> {
    code.projector(caps)
}

/// A pure stabiliser state ψ(x) = |K|^{-1/2} τ^{e(t)} on its affine support K,
/// where t are the coordinates of x in K and
/// e(t) = Σ_i L_i t_i + Σ_{i≤j} Q_ij t_i t_j (mod D).
///
/// e vanishes at the least point of K, so the first nonzero amplitude is
/// positive. For d = 2 the diagonal of Q is zero and off-diagonal entries are
/// even.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StabState {
    n: usize,
    d: Prime,
    support: AffineSubspace,
    linear: Vec<u32>,
    quadratic: Vec<Vec<u32>>,
}

impl StabState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> Prime {
        self.d
    }

    pub fn support(&self) -> &AffineSubspace {
        &self.support
    }

    pub fn linear(&self) -> &[u32] {
        &self.linear
    }

    pub fn quadratic(&self) -> &[Vec<u32>] {
        &self.quadratic
    }

    fn poly_at(&self, t: &[u32]) -> u32 {
        let big = phase_order(self.d) as u64;
        let mut e = 0u64;
        for (i, &ti) in t.iter().enumerate() {
            if ti == 0 {
                continue;
            }
            e += self.linear[i] as u64 * ti as u64;
            for (j, &tj) in t.iter().enumerate().skip(i) {
                e += self.quadratic[i][j] as u64 * ti as u64 * tj as u64;
            }
        }
        (e % big) as u32
    }

    /// τ-exponent of the amplitude at x, or None off the support.
    pub fn exponent_at(&self, x: &[u32]) -> Option<u32> {
        self.support.coordinates_of(x).map(|t| self.poly_at(&t))
    }

    pub fn amplitudes(&self) -> Vec<CycRat> {
        let d = self.d.get();
        let dim = self.d.power_count(self.n) as usize;
        let norm = CycRat::inv_sqrt_d_pow(d, self.support.dim() as u32);
        let mut out = vec![CycRat::zero(order_for(d)); dim];
        for x in self.support.points() {
            let e = self.exponent_at(&x).expect("point of the support");
            out[point_index(self.d, &x)] = norm.mul_tau(d, e as i64);
        }
        out
    }

    pub fn density(&self) -> CMatrix {
        let a = self.amplitudes();
        CMatrix::outer(&a, &a)
    }

    /// Fits the canonical phase polynomial to exponents given on the support;
    /// `f` must vanish at the support's least point. None if no quadratic
    /// polynomial of the required shape matches.
    fn fit(
        n: usize,
        d: Prime,
        support: AffineSubspace,
        f: impl Fn(&[u32]) -> u32,
    ) -> Option<StabState> {
        let k = support.dim();
        let big = phase_order(d);
        let unit = |i: usize, s: u32| {
            let mut t = vec![0u32; k];
            t[i] = s;
            t
        };
        let at = |t: &[u32]| f(&support.point_at(t));
        if at(&vec![0; k]) != 0 {
            return None;
        }
        let e1: Vec<u32> = (0..k).map(|i| at(&unit(i, 1))).collect();
        let mut linear = vec![0u32; k];
        let mut quadratic = vec![vec![0u32; k]; k];
        if d.get() == 2 {
            linear.clone_from(&e1);
        } else {
            for i in 0..k {
                let e2 = at(&unit(i, 2));
                let q = d.mul(d.sub(e2 % d.get(), d.mul(2, e1[i])), d.inv(2));
                quadratic[i][i] = q;
                linear[i] = d.sub(e1[i], q);
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                let mut t = vec![0u32; k];
                t[i] = 1;
                t[j] = 1;
                let v = (at(&t) + 2 * big - e1[i] - e1[j]) % big;
                if d.get() == 2 && v % 2 == 1 {
                    return None;
                }
                quadratic[i][j] = v;
            }
        }
        let state = StabState {
            n,
            d,
            support,
            linear,
            quadratic,
        };
        for x in state.support.points() {
            if state.exponent_at(&x) != Some(f(&x)) {
                return None;
            }
        }
        Some(state)
    }

    /// The state stabilised by n independent commuting generators.
    pub fn from_generators(n: usize, d: Prime, gens: &[PauliOp]) -> Result<StabState> {
        let group = StabGroup::new(n, d, gens.to_vec())?;
        Self::from_group(&group)
    }

    pub fn from_group(group: &StabGroup) -> Result<StabState> {
        let n = group.n;
        let d = group.d;
        if group.rank() != n {
            return Err(Error::InvalidGroup(format!(
                "rank {} is not maximal for {n} qudits",
                group.rank()
            )));
        }
        // x-columns first, so trailing rows are diagonal
        let cols: Vec<usize> = (n..2 * n).chain(0..n).collect();
        let rows = reduce_paulis(d, group.generators.clone(), &cols)?;
        let (xtype, ztype): (Vec<PauliOp>, Vec<PauliOp>) =
            rows.into_iter().partition(|g| !g.is_diagonal());
        // τ^φ Z(z) fixes |x⟩ iff φ + 2 z·x ≡ 0 (mod D)
        let zrows: Vec<Vec<u32>> = ztype.iter().map(|g| g.a().z_part().to_vec()).collect();
        let rhs: Vec<u32> = ztype
            .iter()
            .map(|g| {
                let ph = g.phase();
                if d.get() == 2 {
                    (ph / 2 * (d.get() - 1)) % 2
                } else {
                    d.mul(d.neg(ph % d.get()), d.inv(2))
                }
            })
            .collect();
        let x0 = if zrows.is_empty() {
            vec![0u32; n]
        } else {
            linalg::solve(d, &zrows, &rhs, n)
                .ok_or_else(|| Error::InvalidGroup("empty support".into()))?
        };
        let span: Vec<Vec<u32>> = xtype.iter().map(|g| g.a().x_part().to_vec()).collect();
        let support = AffineSubspace::from_raw(d, n, span, x0.clone());
        let big = phase_order(d) as i64;
        let mut exps: HashMap<Vec<u32>, u32> = HashMap::new();
        exps.insert(x0.clone(), 0);
        let mut queue = vec![x0];
        while let Some(y) = queue.pop() {
            let ey = exps[&y] as i64;
            for g in &xtype {
                let (de, t) = g.act_on_basis(&y);
                let e = (ey + de).rem_euclid(big) as u32;
                match exps.get(&t) {
                    Some(&prev) if prev != e => {
                        return Err(Error::InvalidGroup("inconsistent phases".into()))
                    }
                    Some(_) => {}
                    None => {
                        exps.insert(t.clone(), e);
                        queue.push(t);
                    }
                }
            }
        }
        Self::fit(n, d, support, |x| exps[x])
            .ok_or_else(|| Error::InvalidGroup("phase polynomial fit failed".into()))
    }

    /// The stabiliser group of the state.
    pub fn group(&self) -> StabGroup {
        let n = self.n;
        let d = self.d;
        let big = phase_order(d) as i64;
        let k = self.support.dim();
        let x0 = self.support.offset_raw().to_vec();
        let basis = self.support.basis_raw().to_vec();
        let mut gens = Vec::with_capacity(n);
        let perp = if basis.is_empty() {
            (0..n)
                .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
                .collect()
        } else {
            linalg::nullspace(d, &basis, n)
        };
        for z in perp {
            let phase = -2 * dot(d, &z, &x0) as i64;
            let mut a = z;
            a.extend(std::iter::repeat_n(0, n));
            gens.push(PauliOp::from_raw(d, phase, a));
        }
        let exp = |x: &[u32]| self.exponent_at(x).expect("on support") as i64;
        for (i, b) in basis.iter().enumerate() {
            // Δ(y) = e(y + b) − e(y) is affine in y with slope 2z
            let delta = |t: &[u32]| {
                let y = self.support.point_at(t);
                let yb: Vec<u32> = y.iter().zip(b).map(|(&u, &v)| d.add(u, v)).collect();
                (exp(&yb) - exp(&y)).rem_euclid(big)
            };
            let zero = vec![0u32; k];
            let d0 = delta(&zero);
            let rows = basis.clone();
            let rhs: Vec<u32> = (0..k)
                .map(|j| {
                    let mut t = zero.clone();
                    t[j] = 1;
                    let diff = (delta(&t) - d0).rem_euclid(big) as u32;
                    if d.get() == 2 {
                        diff / 2
                    } else {
                        d.mul(diff % d.get(), d.inv(2))
                    }
                })
                .collect();
            let z = linalg::solve(d, &rows, &rhs, n).expect("stabiliser state phase is quadratic");
            let mut a = z.clone();
            a.extend_from_slice(b);
            let x0b: Vec<u32> = x0.iter().zip(b).map(|(&u, &v)| d.add(u, v)).collect();
            let phase = d0 + gamma(d, &a) as i64 - 2 * dot(d, &z, &x0b) as i64;
            let _ = i;
            gens.push(PauliOp::from_raw(d, phase, a));
        }
        StabGroup::new(n, d, gens).expect("stabiliser of a stabiliser state")
    }

    /// Recognises c·|s⟩ in a dense vector; None if it is not of that form.
    pub fn from_vector(n: usize, d: Prime, v: &[CycRat]) -> Option<(CycRat, StabState)> {
        let dd = d.get();
        let nz: Vec<usize> = v
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, _)| i)
            .collect();
        let first = *nz.first()?;
        let x0 = point_from_index(d, n, first);
        let diffs: Vec<Vec<u32>> = nz[1..]
            .iter()
            .map(|&i| {
                point_from_index(d, n, i)
                    .iter()
                    .zip(&x0)
                    .map(|(&a, &b)| d.sub(a, b))
                    .collect()
            })
            .collect();
        let support = AffineSubspace::from_raw(d, n, diffs, x0.clone());
        if support.cardinality() != nz.len() as u64 {
            return None;
        }
        let inv0 = v[first].inv()?;
        let big = phase_order(d);
        let taus: Vec<CycRat> = (0..big).map(|e| CycRat::tau_pow(dd, e as i64)).collect();
        let mut exps = HashMap::new();
        for &i in &nz {
            let r = &v[i] * &inv0;
            let e = taus.iter().position(|t| *t == r)? as u32;
            exps.insert(point_from_index(d, n, i), e);
        }
        let state = Self::fit(n, d, support, |x| exps[x])?;
        let scalar = &v[first] * &CycRat::sqrt_d_pow(dd, state.support.dim() as u32);
        Some((scalar, state))
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StabState) -> CycRat {
        crate::matrix::inner(&self.amplitudes(), &other.amplitudes())
    }

    /// Pauli coordinates tr(w(a)† ρ): the group phase on Ŝ, zero elsewhere.
    /// Returned sparsely as (index of a, τ-exponent).
    pub fn pauli_support(&self) -> Vec<(usize, u32)> {
        let mut out: Vec<(usize, u32)> = self
            .group()
            .elements()
            .iter()
            .map(|p| (p.a().index(), p.phase()))
            .collect();
        out.sort_unstable();
        out
    }

    /// Computational basis state |x⟩.
    pub fn basis_state(n: usize, d: Prime, x: &[u32]) -> StabState {
        let support = AffineSubspace::from_raw(d, n, Vec::new(), x.to_vec());
        StabState {
            n,
            d,
            support,
            linear: Vec::new(),
            quadratic: Vec::new(),
        }
    }

    /// The flat-phase state |K|^{-1/2} Σ_{x∈K} |x⟩.
    pub fn flat(support: AffineSubspace) -> StabState {
        let n = support.ambient_dim();
        let d = support.modulus();
        let k = support.dim();
        StabState {
            n,
            d,
            support,
            linear: vec![0; k],
            quadratic: vec![vec![0; k]; k],
        }
    }

    /// Tensor product self ⊗ other.
    pub fn tensor(&self, other: &StabState) -> StabState {
        let d = self.d;
        let n = self.n + other.n;
        let pad = |v: &[u32], left: usize, right: usize| {
            let mut out = vec![0u32; left];
            out.extend_from_slice(v);
            out.extend(std::iter::repeat_n(0, right));
            out
        };
        let mut rows: Vec<Vec<u32>> = self
            .support
            .basis_raw()
            .iter()
            .map(|b| pad(b, 0, other.n))
            .collect();
        rows.extend(other.support.basis_raw().iter().map(|b| pad(b, self.n, 0)));
        let mut offset = self.support.offset_raw().to_vec();
        offset.extend_from_slice(other.support.offset_raw());
        let support = AffineSubspace::from_raw(d, n, rows, offset);
        let (a, b) = (self.clone(), other.clone());
        let big = phase_order(d);
        Self::fit(n, d, support, move |x| {
            (a.exponent_at(&x[..a.n]).expect("left factor")
                + b.exponent_at(&x[a.n..]).expect("right factor"))
                % big
        })
        .expect("tensor of stabiliser states")
    }
}

/// A basis of stabiliser states sharing one maximal group: index c ∈ F_d^n
/// (lexicographic) labels the state stabilised by ω^{c_j} g_j.
#[derive(Clone, Debug)]
pub struct StabBasis {
    pub group: StabGroup,
    pub states: Vec<StabState>,
}

impl StabBasis {
    pub fn new(group: StabGroup) -> Result<Self> {
        let n = group.n;
        if group.rank() != n {
            return Err(Error::InvalidGroup(
                "a stabiliser basis needs a maximal group".into(),
            ));
        }
        let states = (0..group.d.power_count(n) as usize)
            .map(|i| StabState::from_group(&group.with_character(&point_from_index(group.d, n, i))))
            .collect::<Result<Vec<_>>>()?;
        Ok(StabBasis { group, states })
    }

    pub fn computational(n: usize, d: Prime) -> Self {
        let group =
            StabGroup::new(n, d, (0..n).map(|i| PauliOp::z(n, d, i)).collect()).expect("Z group");
        Self::new(group).expect("maximal")
    }
}

/// (⟨α_i| ⊗ 1)|ψ⟩ as scalar·|β⟩, with β None when the scalar vanishes.
pub fn contract(
    psi: &StabState,
    n1: usize,
    basis: &StabBasis,
    index: usize,
) -> Result<(CycRat, Option<StabState>)> {
    let d = psi.d;
    if basis.group.n != n1 || n1 > psi.n || index >= basis.states.len() || basis.group.d != d {
        return Err(Error::DimensionMismatch(
            "contraction basis does not match the first factor".into(),
        ));
    }
    let n2 = psi.n - n1;
    let dim1 = d.power_count(n1) as usize;
    let dim2 = d.power_count(n2) as usize;
    let alpha = basis.states[index].amplitudes();
    let amps = psi.amplitudes();
    let order = order_for(d.get());
    let mut beta = vec![CycRat::zero(order); dim2];
    for (x1, a) in alpha.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let ac = a.conj();
        for (x2, slot) in beta.iter_mut().enumerate() {
            let v = &amps[x1 * dim2 + x2];
            if !v.is_zero() {
                *slot += &(&ac * v);
            }
        }
    }
    if beta.iter().all(CycRat::is_zero) {
        return Ok((CycRat::zero(order), None));
    }
    let (c, s) = StabState::from_vector(n2, d, &beta).ok_or_else(|| {
        Error::VerificationFailed("contraction is not a stabiliser vector".into())
    })?;
    let _ = dim1;
    Ok((c, Some(s)))
}

/// d^n Π_{k=1..n} (d^k + 1).
pub fn stab_state_count(n: usize, d: u32) -> u128 {
    let d = d as u128;
    (1..=n as u32).fold(d.pow(n as u32), |acc, k| acc * (d.pow(k) + 1))
}

/// Every maximal isotropic subspace of F_d^{2n}, as RREF generator rows.
pub fn lagrangians(n: usize, d: Prime) -> Vec<Vec<Vec<u32>>> {
    let m = 2 * n;
    let mut out = Vec::new();
    for pivots in combinations(m, n) {
        let mut rows = vec![vec![0u32; m]; n];
        for (r, &pc) in pivots.iter().enumerate() {
            rows[r][pc] = 1;
        }
        let free: Vec<Vec<usize>> = pivots
            .iter()
            .map(|&pc| ((pc + 1)..m).filter(|c| !pivots.contains(c)).collect())
            .collect();
        fill_rows(d, &mut rows, &free, 0, &mut out);
    }
    out
}

fn fill_rows(
    d: Prime,
    rows: &mut Vec<Vec<u32>>,
    free: &[Vec<usize>],
    r: usize,
    out: &mut Vec<Vec<Vec<u32>>>,
) {
    if r == rows.len() {
        out.push(rows.clone());
        return;
    }
    let count = d.power_count(free[r].len()) as usize;
    for idx in 0..count {
        let vals = point_from_index(d, free[r].len(), idx);
        for (&c, &v) in free[r].iter().zip(&vals) {
            rows[r][c] = v;
        }
        if (0..r).all(|q| symp(d, &rows[q], &rows[r]) == 0) {
            fill_rows(d, rows, free, r + 1, out);
        }
    }
    for &c in &free[r] {
        rows[r][c] = 0;
    }
}

/// All pure stabiliser states with their groups, in canonical order.
pub fn enumerate_with_groups(n: usize, d: u32, caps: &Caps) -> Result<Vec<(StabState, StabGroup)>> {
    let p = Prime::new(d)?;
    let count = stab_state_count(n, d);
    if count > caps.enumeration as u128 {
        return Err(Error::CapExceeded {
            what: "stabiliser state count",
            size: count.min(u64::MAX as u128) as u64,
            cap: caps.enumeration,
        });
    }
    let chars = p.power_count(n) as usize;
    let lags = lagrangians(n, p);
    let mut out: Vec<(StabState, StabGroup)> = lags
        .par_iter()
        .flat_map_iter(|rows| {
            let base = StabGroup {
                n,
                d: p,
                generators: rows
                    .iter()
                    .map(|r| PauliOp::from_raw(p, 0, r.clone()))
                    .collect(),
            };
            (0..chars).map(move |c| {
                let g = base.with_character(&point_from_index(p, n, c));
                let s = StabState::from_group(&g)
                    .expect("Lagrangian with a character is a valid group");
                (s, g)
            })
        })
        .collect();
    out.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

pub fn enumerate_stab_states(n: usize, d: u32, caps: &Caps) -> Result<Vec<StabState>> {
    Ok(enumerate_with_groups(n, d, caps)?
        .into_iter()
        .map(|(s, _)| s)
        .collect())
}

pub fn states_orthogonal_to_zero(n: usize, d: u32, caps: &Caps) -> Result<Vec<StabState>> {
    Ok(enumerate_stab_states(n, d, caps)?
        .into_iter()
        .filter(|s| !s.support().contains_zero())
        .collect())
}

/// If the code has a non-diagonal element, labels x ≠ y with P|x⟩ = P|y⟩ ≠ 0.
pub fn diagonal_projector_collision(
    code: &StabCode,
    caps: &Caps,
) -> Result<Option<(Vec<u32>, Vec<u32>)>> {
    let g = &code.group;
    if g.generators.iter().all(PauliOp::is_diagonal) {
        return Ok(None);
    }
    let p = code.projector(caps)?;
    let dim = p.cols();
    let cols: Vec<Vec<CycRat>> = (0..dim).map(|j| p.column(j)).collect();
    for x in 0..dim {
        if cols[x].iter().all(CycRat::is_zero) {
            continue;
        }
        for y in x + 1..dim {
            if cols[x] == cols[y] {
                return Ok(Some((
                    point_from_index(g.d, g.n, x),
                    point_from_index(g.d, g.n, y),
                )));
            }
        }
    }
    Err(Error::VerificationFailed(
        "non-diagonal code without a projector collision".into(),
    ))
}

/// Pure stabiliser states whose density matrix lies in span{w(a) : a ∈ M},
/// for an isotropic M, together with the maximal group completing M.
pub fn states_in_pauli_span(
    n: usize,
    d: u32,
    m: &[FVec],
    caps: &Caps,
) -> Result<(StabGroup, Vec<StabState>)> {
    let p = Prime::new(d)?;
    if !crate::field::is_isotropic(m)? {
        return Err(Error::NotApplicable("M is not isotropic".into()));
    }
    let mut mrows: Vec<Vec<u32>> = m.iter().map(|v| v.entries().to_vec()).collect();
    let mpiv = linalg::rref(p, &mut mrows);
    let in_span = |a: &[u32]| {
        let mut v = a.to_vec();
        linalg::reduce(p, &mrows, &mpiv, &mut v);
        v.iter().all(|&x| x == 0)
    };
    let states: Vec<StabState> = enumerate_with_groups(n, d, caps)?
        .into_iter()
        .filter(|(_, g)| g.elements().iter().all(|e| in_span(e.a().entries())))
        .map(|(s, _)| s)
        .collect();
    // complete M to a Lagrangian with lexicographically least extra vectors
    let mut gens: Vec<PauliOp> = mrows
        .iter()
        .map(|r| PauliOp::from_raw(p, 0, r.clone()))
        .collect();
    while gens.len() < n {
        let g = StabGroup {
            n,
            d: p,
            generators: gens.clone(),
        };
        let perp = g.symplectic_complement();
        let mut cur = g.vectors();
        let piv = linalg::rref(p, &mut cur);
        let next = perp
            .into_iter()
            .find(|v| {
                let mut r = v.clone();
                linalg::reduce(p, &cur, &piv, &mut r);
                r.iter().any(|&x| x != 0)
            })
            .expect("isotropic subspace extends");
        gens.push(PauliOp::from_raw(p, 0, next));
    }
    let group = StabGroup::new(n, p, gens)?;
    Ok((group, states))
}

/// JSON form of a state.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabStateJson {
    pub schema: String,
    pub d: u32,
    pub n: usize,
    pub support_basis: Vec<Vec<u32>>,
    pub support_offset: Vec<u32>,
    pub phase_poly: PhasePolyJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhasePolyJson {
    pub linear: Vec<u32>,
    pub quadratic: Vec<Vec<u32>>,
}

impl From<&StabState> for StabStateJson {
    fn from(s: &StabState) -> Self {
        StabStateJson {
            schema: crate::SCHEMA.into(),
            d: s.d.get(),
            n: s.n,
            support_basis: s.support.basis_raw().to_vec(),
            support_offset: s.support.offset_raw().to_vec(),
            phase_poly: PhasePolyJson {
                linear: s.linear.clone(),
                quadratic: s.quadratic.clone(),
            },
        }
    }
}

impl StabStateJson {
    pub fn to_state(&self) -> Result<StabState> {
        let d = Prime::new(self.d)?;
        let n = self.n;
        let bad = |m: &str| Error::Malformed(m.to_string());
        if self.support_offset.len() != n || self.support_basis.iter().any(|b| b.len() != n) {
            return Err(bad("support vectors must have length n"));
        }
        let basis: Vec<FVec> = self
            .support_basis
            .iter()
            .map(|b| FVec::new(d, b.iter().map(|&v| v as i64)))
            .collect();
        let support = AffineSubspace::new(
            d,
            n,
            &basis,
            &FVec::new(d, self.support_offset.iter().map(|&v| v as i64)),
        )?;
        if support.dim() != self.support_basis.len() {
            return Err(bad("support basis is dependent"));
        }
        let k = support.dim();
        let poly = &self.phase_poly;
        if poly.linear.len() != k
            || poly.quadratic.len() != k
            || poly.quadratic.iter().any(|r| r.len() != k)
        {
            return Err(bad("phase polynomial has the wrong shape"));
        }
        let big = phase_order(d);
        let raw = StabState {
            n,
            d,
            support: support.clone(),
            linear: poly.linear.iter().map(|&v| v % big).collect(),
            quadratic: poly
                .quadratic
                .iter()
                .map(|r| r.iter().map(|&v| v % big).collect())
                .collect(),
        };
        if d.get() == 2
            && (0..k).any(|i| {
                raw.quadratic[i][i] != 0 || (i + 1..k).any(|j| raw.quadratic[i][j] % 2 == 1)
            })
        {
            return Err(bad(
                "qubit phase polynomial needs zero diagonal and even cross terms",
            ));
        }
        if (0..k).any(|i| (0..i).any(|j| raw.quadratic[i][j] != 0)) {
            return Err(bad("phase polynomial must be upper triangular"));
        }
        // the stored basis may differ from the canonical one: refit on points
        let pts = raw.support.points();
        let origin = raw
            .exponent_at(raw.support.offset_raw())
            .expect("offset on support");
        let exps: HashMap<Vec<u32>, u32> = pts
            .iter()
            .map(|x| {
                (
                    x.clone(),
                    (raw.exponent_at(x).unwrap() + big - origin) % big,
                )
            })
            .collect();
        StabState::fit(n, d, support, |x| exps[x])
            .ok_or_else(|| bad("not a stabiliser phase polynomial"))
    }
}
