//! Exact checks of the structural facts behind the separation: Clifford
//! replacements for Pauli measurements, splitting of polar decompositions
//! with repeated projectors, and a randomised single-qudit CSP = SO probe.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use stabsep_lp::{solve, Status, VPolytopeLp};
use std::collections::BTreeSet;

use crate::channel::{channels_equal, pauli_eigenbasis, Channel};
use crate::clifford::{clifford_from_gates, find_clifford_mapping, gates_matrix, CliffordOp, Gate};
use crate::coords::PauliFrame;
use crate::cyclotomic::{order_for, CycRat};
use crate::error::{Caps, Error, Result};
use crate::field::{FVec, Prime};
use crate::matrix::{kron_vec, CMatrix};
use crate::pauli::PauliOp;
use crate::polar::polar_form;
use crate::separation::certify_csp;
use crate::stabiliser::{enumerate_stab_states, StabCode, StabState};

pub type Rational = BigRational;

fn unit_modulus(c: &CycRat) -> bool {
    c.abs_sq().is_one()
}

/// c with lhs = c·rhs and |c|² = r, if any.
fn proportional_with_modulus(lhs: &CMatrix, rhs: &CMatrix, r: &Rational) -> bool {
    lhs.proportionality(rhs)
        .is_some_and(|c| c.abs_sq().as_rational().as_ref() == Some(r))
}

/// Projectors onto the ω^x eigenspaces of w(a), x = 0..d−1:
/// P_x = d^{-1} Σ_y ω^{-xy} w(a)^y.
pub fn eigenprojectors(a: &PauliOp, caps: &Caps) -> Result<Vec<CMatrix>> {
    let d = a.modulus();
    let dd = d.get();
    let powers = (0..dd as u64)
        .map(|y| a.pow(y).weyl_matrix(caps))
        .collect::<Result<Vec<_>>>()?;
    let inv_d = Rational::new(1.into(), (dd as i64).into());
    Ok((0..dd as i64)
        .map(|x| {
            let mut acc = CMatrix::zeros(powers[0].order(), powers[0].rows(), powers[0].cols());
            for (y, p) in powers.iter().enumerate() {
                acc.add_assign(&p.scale(&CycRat::omega_pow(dd, -x * y as i64)));
            }
            acc.scale_rational(&inv_d)
        })
        .collect())
}

/// ρ ↦ Σ_x P_x ρ P_x over the eigenprojectors of w(a).
pub fn pauli_pinching(a: &PauliOp, caps: &Caps) -> Result<Channel> {
    if a.is_identity() {
        return Err(Error::NotApplicable("pinching by the identity".into()));
    }
    let ops = eigenprojectors(a, caps)?;
    Channel::from_kraus(a.modulus(), a.n(), a.n(), ops, caps)
}

fn single_generator(code: &StabCode) -> Result<&PauliOp> {
    match code.group.generators() {
        [g] => Ok(g),
        gens => Err(Error::NotApplicable(format!(
            "expected a rank-1 code, got {} generators",
            gens.len()
        ))),
    }
}

/// For non-commuting [[n, n−1]] codes P1, P2, a Clifford V with
/// P1·P2 = d^{-1/2}·V·P2, checked densely up to a global phase.
pub fn verify_non_commuting_codes(p1: &StabCode, p2: &StabCode, caps: &Caps) -> Result<CliffordOp> {
    let g1 = single_generator(p1)?;
    let g2 = single_generator(p2)?;
    let d = g1.modulus();
    let n = g1.n();
    if g2.n() != n || g2.modulus() != d {
        return Err(Error::DimensionMismatch(
            "codes on different systems".into(),
        ));
    }
    let s = g1.symplectic(g2);
    if s == 0 {
        return Err(Error::NotApplicable("the code generators commute".into()));
    }
    let (x0, z0) = (PauliOp::x(n, d, 0), PauliOp::z(n, d, 0));
    // a power of g2 has the same +1 eigenspace and the standard commutator with g1
    let k = d.mul(x0.symplectic(&z0), d.inv(s));
    let g2k = g2.pow(k as u64);
    let w = find_clifford_mapping(n, d, &[(x0, g1.clone()), (z0, g2k)])?;
    let h = clifford_from_gates(n, d, &[Gate::H(0)])?;
    let v = w.compose(&h).compose(&w.inverse());
    let proj1 = p1.projector(caps)?;
    let proj2 = p2.projector(caps)?;
    let lhs = proj1.mul(&proj2);
    let rhs = v.dense(caps)?.mul(&proj2);
    if !proportional_with_modulus(
        &lhs,
        &rhs,
        &Rational::new(1.into(), (d.get() as i64).into()),
    ) {
        return Err(Error::VerificationFailed(
            "P1·P2 is not d^{-1/2}·V·P2".into(),
        ));
    }
    Ok(v)
}

/// Clifford unitaries U_x, one per eigenvalue ω^x of w(a)⊗w(b), with
/// P_x(|ψ⟩⊗|s⟩) = d^{-1/2}·U_x(|ψ⟩⊗|s⟩) for every |ψ⟩, up to a global phase
/// per x. Checked densely on the full input basis.
///
/// In a frame where w(a) = Z_1 and the ancilla is |0⟩ with w(b) = X on its
/// first qudit, U_x = CZ·H·X(−x) with the ancilla controlling qudit 1.
pub fn verify_measurement_replacement(
    a: &FVec,
    b: &FVec,
    s: &StabState,
    caps: &Caps,
) -> Result<Vec<CliffordOp>> {
    let d = s.modulus();
    let k = s.n();
    if !a.len().is_multiple_of(2) || b.len() != 2 * k || a.modulus() != d || b.modulus() != d {
        return Err(Error::DimensionMismatch(
            "a must be a (z|x) vector and b must match the ancilla".into(),
        ));
    }
    let n = a.len() / 2;
    if n == 0 || a.is_zero() || b.is_zero() {
        return Err(Error::NotApplicable(
            "w(a) and w(b) must be non-trivial".into(),
        ));
    }
    caps.check_dense(d.power_count(n + k))?;
    let wa = PauliOp::weyl(a.clone());
    let wb = PauliOp::weyl(b.clone());
    let gens = s.group().generators().to_vec();
    let Some(pivot) = gens.iter().position(|g| !g.commutes(&wb)) else {
        return Err(Error::NotApplicable("s is an eigenstate of w(b)".into()));
    };
    let (x0, z0) = (PauliOp::x(k, d, 0), PauliOp::z(k, d, 0));
    let target = z0.symplectic(&x0);
    let c = gens[pivot].symplectic(&wb);
    let g1 = gens[pivot].pow(d.mul(target, d.inv(c)) as u64);
    let mut pairs = vec![(wb.clone(), x0), (g1.clone(), z0)];
    let mut slot = 1;
    for (i, g) in gens.iter().enumerate() {
        if i == pivot {
            continue;
        }
        // strip the part that fails to commute with w(b)
        let ci = d.mul(g.symplectic(&wb), d.inv(target));
        let adjusted = g.mul(&g1.pow(d.neg(ci) as u64));
        pairs.push((adjusted, PauliOp::z(k, d, slot)));
        slot += 1;
    }
    let u = find_clifford_mapping(n, d, &[(wa.clone(), PauliOp::z(n, d, 0))])?;
    let v = find_clifford_mapping(k, d, &pairs)?;
    let w = u.tensor(&v);
    let w_inv = w.inverse();

    let dd = d.get();
    let total = n + k;
    let dim_in = d.power_count(n) as usize;
    let order = order_for(dd);
    let projectors = eigenprojectors(&wa.tensor(&wb), caps)?;
    let amps = s.amplitudes();
    let embed = CMatrix::from_fn(order, dim_in * amps.len(), dim_in, |row, col| {
        let (i, j) = (row / amps.len(), row % amps.len());
        if i == col {
            amps[j].clone()
        } else {
            CycRat::zero(order)
        }
    });
    let inv_d = Rational::new(1.into(), (dd as i64).into());
    let mut out = Vec::with_capacity(dd as usize);
    for (x, p) in projectors.iter().enumerate() {
        let local = clifford_from_gates(
            total,
            d,
            &[Gate::Cz(n, 0), Gate::H(n), Gate::X(n, (dd - x as u32) % dd)],
        )?;
        let ux = w_inv.compose(&local).compose(&w);
        let lhs = p.mul(&embed);
        let rhs = ux.dense(caps)?.mul(&embed);
        if !proportional_with_modulus(&lhs, &rhs, &inv_d) {
            return Err(Error::VerificationFailed(format!(
                "P_{x}(ψ⊗s) is not d^(-1/2)·U_x(ψ⊗s)"
            )));
        }
        out.push(ux);
    }
    Ok(out)
}

/// One term λ·(d^n/rank P)·U P·P U† of a polar decomposition.
#[derive(Clone, Debug)]
pub struct PolarTerm {
    pub weight: Rational,
    pub u: CliffordOp,
    pub code: StabCode,
}

/// E = Σ_i λ_i (d^n/rank P_i) U_i P_i · P_i U_i†.
#[derive(Clone, Debug)]
pub struct PolarDecomposition {
    pub n: usize,
    pub d: Prime,
    pub terms: Vec<PolarTerm>,
}

impl PolarDecomposition {
    /// d^n/rank P = d^k for a code with k generators.
    fn scale(&self, t: &PolarTerm) -> Rational {
        &t.weight * Rational::from_integer(self.d.power_count(t.code.rank()).into())
    }

    fn check(&self) -> Result<()> {
        for t in &self.terms {
            if t.u.n() != self.n || t.code.group.n() != self.n || t.weight.is_negative() {
                return Err(Error::Malformed(
                    "polar terms need nonnegative weights on n qudits".into(),
                ));
            }
        }
        Ok(())
    }

    /// Σ_i λ_i (d^n/rank P_i) P_i; the map is trace preserving iff this is 1.
    pub fn povm_sum(&self, caps: &Caps) -> Result<CMatrix> {
        self.check()?;
        let dim = self.d.power_count(self.n) as usize;
        let mut acc = CMatrix::zeros(order_for(self.d.get()), dim, dim);
        for t in &self.terms {
            acc.add_assign(&t.code.projector(caps)?.scale_rational(&self.scale(t)));
        }
        Ok(acc)
    }

    pub fn is_trace_preserving(&self, caps: &Caps) -> Result<bool> {
        let sum = self.povm_sum(caps)?;
        Ok(sum == CMatrix::identity(sum.order(), sum.rows()))
    }

    fn kraus_parts(&self, caps: &Caps) -> Result<Vec<CMatrix>> {
        self.terms
            .iter()
            .map(|t| Ok(t.u.dense(caps)?.mul(&t.code.projector(caps)?)))
            .collect()
    }

    pub fn channel(&self, caps: &Caps) -> Result<Channel> {
        self.check()?;
        let parts = self.kraus_parts(caps)?;
        let scales: Vec<Rational> = self.terms.iter().map(|t| self.scale(t)).collect();
        let dim = self.d.power_count(self.n) as usize;
        let order = order_for(self.d.get());
        let images = (0..dim * dim)
            .into_par_iter()
            .map(|idx| {
                let (x, y) = (idx / dim, idx % dim);
                let mut acc = CMatrix::zeros(order, dim, dim);
                for (k, c) in parts.iter().zip(&scales) {
                    acc.add_assign(&CMatrix::outer(&k.column(x), &k.column(y)).scale_rational(c));
                }
                acc
            })
            .collect();
        Channel::from_superop(self.d, self.n, self.n, images, caps)
    }
}

/// A decomposition E = μ·E_k + (1−μ)·E_ℓ into two distinct CSP maps.
#[derive(Clone, Debug)]
pub struct ProjectorSplit {
    pub pair: (usize, usize),
    pub mu: Rational,
    pub first: PolarDecomposition,
    pub second: PolarDecomposition,
}

/// Finds terms k < ℓ with P_k = P_ℓ but U_k P_k ≠ U_ℓ P_ℓ (up to phase) and
/// moves the combined weight onto either one, re-checking both halves are
/// trace preserving, distinct, and average back to E.
pub fn verify_double_projector_reduction(
    decomp: &PolarDecomposition,
    caps: &Caps,
) -> Result<ProjectorSplit> {
    if !decomp.is_trace_preserving(caps)? {
        return Err(Error::NotApplicable(
            "decomposition is not trace preserving".into(),
        ));
    }
    let projectors = decomp
        .terms
        .iter()
        .map(|t| t.code.projector(caps))
        .collect::<Result<Vec<_>>>()?;
    let parts = decomp.kraus_parts(caps)?;
    let pair = (0..decomp.terms.len())
        .flat_map(|k| (k + 1..decomp.terms.len()).map(move |l| (k, l)))
        .find(|&(k, l)| {
            projectors[k] == projectors[l]
                && !decomp.terms[k].weight.is_zero()
                && !decomp.terms[l].weight.is_zero()
                && !parts[k]
                    .proportionality(&parts[l])
                    .is_some_and(|c| unit_modulus(&c))
        })
        .ok_or_else(|| Error::NotApplicable("no repeated projector with distinct terms".into()))?;
    let (k, l) = pair;
    let total = &decomp.terms[k].weight + &decomp.terms[l].weight;
    let mu = &decomp.terms[k].weight / &total;
    let keep = |winner: usize, loser: usize| {
        let mut terms = decomp.terms.clone();
        terms[winner].weight = total.clone();
        terms.remove(loser);
        PolarDecomposition {
            terms,
            ..decomp.clone()
        }
    };
    let first = keep(k, l);
    let second = keep(l, k);
    for half in [&first, &second] {
        if !half.is_trace_preserving(caps)? {
            return Err(Error::VerificationFailed("split term is not TP".into()));
        }
    }
    let e = decomp.channel(caps)?;
    let e1 = first.channel(caps)?;
    let e2 = second.channel(caps)?;
    if channels_equal(&e1, &e2) {
        return Err(Error::VerificationFailed("split terms coincide".into()));
    }
    let nu = Rational::one() - &mu;
    let dim = e.dim_in();
    let convex = (0..dim * dim).into_par_iter().all(|idx| {
        let (x, y) = (idx / dim, idx % dim);
        e1.image(x, y)
            .scale_rational(&mu)
            .add(&e2.image(x, y).scale_rational(&nu))
            == e.image(x, y)
    });
    if !convex {
        return Err(Error::VerificationFailed(
            "the two halves do not average to the channel".into(),
        ));
    }
    Ok(ProjectorSplit {
        pair,
        mu,
        first,
        second,
    })
}

/// Representatives w(z|x) of the d+1 single-qudit Pauli eigenbases.
pub fn single_qudit_bases(d: Prime) -> Result<Vec<Vec<StabState>>> {
    std::iter::once(PauliOp::from_zx(d, &[1], &[0]))
        .chain((0..d.get()).map(|z| PauliOp::from_zx(d, &[z], &[1])))
        .map(|a| pauli_eigenbasis(&a))
        .collect()
}

/// Dense matrix of a random single-qudit Clifford word.
fn random_clifford(d: Prime, rng: &mut ChaCha8Rng, caps: &Caps) -> Result<CMatrix> {
    let gates: Vec<Gate> = (0..12)
        .map(|_| match rng.gen_range(0..4) {
            0 => Gate::H(0),
            1 => Gate::S(0),
            2 => Gate::X(0, rng.gen_range(0..d.get())),
            _ => Gate::Z(0, rng.gen_range(0..d.get())),
        })
        .collect();
    gates_matrix(1, d, &gates, caps)
}

/// ρ ↦ Σ_i U_i |φ_i⟩⟨φ_i| ρ |φ_i⟩⟨φ_i| U_i†.
pub fn measure_and_correct(
    basis: &[StabState],
    unitaries: &[CMatrix],
    caps: &Caps,
) -> Result<Channel> {
    let d = basis[0].modulus();
    let ops = basis
        .iter()
        .zip(unitaries)
        .map(|(s, u)| {
            let a = s.amplitudes();
            u.mul(&CMatrix::outer(&a, &a))
        })
        .collect();
    Channel::from_kraus(d, 1, 1, ops, caps)
}

/// Outcome of [`csp1_equals_so1`].
#[derive(Clone, Debug)]
pub struct Csp1Report {
    pub d: Prime,
    pub seed: u64,
    /// Measure-and-correct channels and Clifford conjugations certified CSP.
    pub channels_certified: usize,
    pub channel_failures: usize,
    pub objectives: usize,
    pub clifford_vertices: usize,
    pub measurement_vertices: usize,
    /// Objective indices whose optimum has neither form.
    pub mismatches: Vec<usize>,
}

impl Csp1Report {
    pub fn passed(&self) -> bool {
        self.channel_failures == 0 && self.mismatches.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VertexKind {
    Clifford,
    Measurement,
}

/// Classifies a single-qudit Choi matrix (output first) as a Clifford
/// conjugation or a measure-and-correct channel over one Pauli eigenbasis.
fn classify_choi(
    j: &CMatrix,
    d: Prime,
    bases: &[Vec<StabState>],
    singles: &[CMatrix],
    pairs: &[StabState],
) -> Option<VertexKind> {
    if j.mul(j) == *j {
        let s = pairs.iter().find(|s| s.density() == *j)?;
        return polar_form(s)
            .ok()
            .filter(|f| f.k == 0)
            .map(|_| VertexKind::Clifford);
    }
    let dd = d.get() as usize;
    let order = j.order();
    let scale_d = Rational::from_integer((dd as i64).into());
    for basis in bases {
        let mut rebuilt = CMatrix::zeros(order, dd * dd, dd * dd);
        let mut all_pure = true;
        for s in basis {
            let v = s.amplitudes();
            let block = CMatrix::from_fn(order, dd, dd, |o1, o2| {
                let mut acc = CycRat::zero(order);
                for i in 0..dd {
                    for k in 0..dd {
                        let e = j.get(o1 * dd + i, o2 * dd + k);
                        if !e.is_zero() {
                            acc = &acc + &(&(&v[i].conj() * e) * &v[k]);
                        }
                    }
                }
                acc
            });
            if !singles.contains(&block.scale_rational(&scale_d)) {
                all_pure = false;
                break;
            }
            rebuilt.add_assign(&block.kron(&CMatrix::outer(&v, &v)));
        }
        if all_pure && rebuilt == *j {
            return Some(VertexKind::Measurement);
        }
    }
    None
}

/// Randomised two-sided check of CSP_1 = SO_1 at dimension d.
///
/// (a) Measure-and-correct channels over every Pauli eigenbasis, with
/// `samples` random Clifford tuples each, and as many Clifford conjugations,
/// must be certified CSP. (b) For `objectives` random integer objectives the
/// maximiser over SP_2 ∩ TP must be the Choi matrix of one of those forms.
/// A mismatch refutes the equality; passing is evidence, not proof.
pub fn csp1_equals_so1(
    d: Prime,
    objectives: usize,
    samples: usize,
    seed: u64,
    caps: &Caps,
) -> Result<Csp1Report> {
    if !matches!(d.get(), 2 | 3) {
        return Err(Error::Unsupported(format!("d = {} (need 2 or 3)", d.get())));
    }
    let dd = d.get() as usize;
    let bases = single_qudit_bases(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut channels = Vec::new();
    for basis in &bases {
        for _ in 0..samples {
            let us = (0..dd)
                .map(|_| random_clifford(d, &mut rng, caps))
                .collect::<Result<Vec<_>>>()?;
            channels.push(measure_and_correct(basis, &us, caps)?);
        }
    }
    for _ in 0..samples {
        let u = random_clifford(d, &mut rng, caps)?;
        channels.push(Channel::from_kraus(d, 1, 1, vec![u], caps)?);
    }
    let verdicts = channels
        .par_iter()
        .map(|ch| certify_csp(ch, None, caps).map(|v| v.is_feasible()))
        .collect::<Result<Vec<_>>>()?;
    let channels_certified = verdicts.iter().filter(|&&ok| ok).count();

    let pairs = enumerate_stab_states(2, d.get(), caps)?;
    let frame = PauliFrame::new(2, d)?;
    let generators = pairs
        .par_iter()
        .map(|s| frame.of_state(s))
        .collect::<Result<Vec<_>>>()?;
    let mut lp = VPolytopeLp::new(frame.dim(), generators);
    // trace preservation: the input marginal is maximally mixed
    let mut tp_rows = BTreeSet::new();
    for idx in 1..dd * dd {
        let b = FVec::from_index(d, 2, idx);
        let a = FVec::from_zx(d, &[0, b.entries()[0]], &[0, b.entries()[1]]);
        if let Some(r) = frame.row_of(a.index()) {
            tp_rows.insert(r);
            if dd != 2 {
                tp_rows.insert(r + 1);
            }
        }
    }
    lp.pin(tp_rows.into_iter().map(|r| (r, Rational::zero())));
    let singles: Vec<CMatrix> = enumerate_stab_states(1, d.get(), caps)?
        .iter()
        .map(StabState::density)
        .collect();
    let objs: Vec<Vec<(usize, Rational)>> = (0..objectives)
        .map(|_| {
            (0..frame.dim())
                .map(|r| {
                    (
                        r,
                        Rational::from_integer(rng.gen_range(-1000i64..=1000).into()),
                    )
                })
                .collect()
        })
        .collect();
    let kinds = objs
        .into_par_iter()
        .map(|obj| {
            let lp = lp.clone().with_objective(obj);
            let res = solve(&lp)?;
            if res.status != Status::Optimal {
                return Ok(None);
            }
            let j = frame.to_matrix(&lp.point(&res.weights))?;
            Ok(classify_choi(&j, d, &bases, &singles, &pairs))
        })
        .collect::<Result<Vec<_>>>()?;
    let mismatches = kinds
        .iter()
        .enumerate()
        .filter(|(_, k)| k.is_none())
        .map(|(i, _)| i)
        .collect();
    let count = |want| kinds.iter().filter(|k| **k == Some(want)).count();
    Ok(Csp1Report {
        d,
        seed,
        channels_certified,
        channel_failures: channels.len() - channels_certified,
        objectives,
        clifford_vertices: count(VertexKind::Clifford),
        measurement_vertices: count(VertexKind::Measurement),
        mismatches,
    })
}

/// |φ+⟩ rotated by U on the output factor: (U⊗1)|φ+⟩.
pub fn rotated_bell(u: &CMatrix, d: Prime) -> Option<StabState> {
    let dd = d.get() as usize;
    let order = order_for(d.get());
    let mut v = vec![CycRat::zero(order); dd * dd];
    let norm = CycRat::inv_sqrt_d_pow(d.get(), 1);
    for x in 0..dd {
        let e: Vec<CycRat> = (0..dd)
            .map(|i| CycRat::from_int(order, i64::from(i == x)))
            .collect();
        for (i, a) in kron_vec(&u.column(x), &e).iter().enumerate() {
            v[i] = &v[i] + &(a * &norm);
        }
    }
    StabState::from_vector(2, d, &v).map(|(_, s)| s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separation::CspVerdict;
    use crate::stabiliser::StabGroup;

    fn p(d: u32) -> Prime {
        Prime::new(d).unwrap()
    }

    fn code(n: usize, d: Prime, g: PauliOp) -> StabCode {
        StabCode::new(StabGroup::new(n, d, vec![g]).unwrap())
    }

    #[test]
    fn plus_and_zero_give_hadamard() {
        let d = p(2);
        let caps = Caps::default();
        let v = verify_non_commuting_codes(
            &code(1, d, PauliOp::x(1, d, 0)),
            &code(1, d, PauliOp::z(1, d, 0)),
            &caps,
        )
        .unwrap();
        let h = clifford_from_gates(1, d, &[Gate::H(0)]).unwrap();
        assert_eq!(v.symplectic(), h.symplectic());
        let err = verify_non_commuting_codes(
            &code(2, d, PauliOp::z(2, d, 0)),
            &code(2, d, PauliOp::z(2, d, 1)),
            &caps,
        );
        assert!(matches!(err, Err(Error::NotApplicable(_))));
    }

    #[test]
    fn conjugated_codes_at_two_qudits() {
        let caps = Caps::default();
        for d in [p(2), p(3)] {
            let c = clifford_from_gates(2, d, &[Gate::Cx(0, 1), Gate::S(1), Gate::H(0)]).unwrap();
            let g1 = c.conjugate(&PauliOp::x(2, d, 0));
            let g2 = c.conjugate(&PauliOp::z(2, d, 0));
            verify_non_commuting_codes(&code(2, d, g1), &code(2, d, g2), &caps).unwrap();
        }
    }

    #[test]
    fn qubit_replacement_matches_cz_h() {
        let d = p(2);
        let caps = Caps::default();
        let zero = StabState::basis_state(1, d, &[0]);
        let us = verify_measurement_replacement(
            &FVec::from_zx(d, &[1], &[0]),
            &FVec::from_zx(d, &[0], &[1]),
            &zero,
            &caps,
        )
        .unwrap();
        let plus = clifford_from_gates(2, d, &[Gate::Cz(1, 0), Gate::H(1)]).unwrap();
        let minus =
            clifford_from_gates(2, d, &[Gate::Cz(1, 0), Gate::H(1), Gate::X(1, 1)]).unwrap();
        assert_eq!(us[0].symplectic(), plus.symplectic());
        assert_eq!(us[1].symplectic(), minus.symplectic());
        let plus_state = StabState::from_generators(1, d, &[PauliOp::x(1, d, 0)]).unwrap();
        let err = verify_measurement_replacement(
            &FVec::from_zx(d, &[1], &[0]),
            &FVec::from_zx(d, &[0], &[1]),
            &plus_state,
            &caps,
        );
        assert!(matches!(err, Err(Error::NotApplicable(_))));
    }

    #[test]
    fn qutrit_replacement() {
        let d = p(3);
        let caps = Caps::default();
        let zero = StabState::basis_state(1, d, &[0]);
        let us = verify_measurement_replacement(
            &FVec::from_zx(d, &[1], &[0]),
            &FVec::from_zx(d, &[0], &[1]),
            &zero,
            &caps,
        )
        .unwrap();
        assert_eq!(us.len(), 3);
        // a generic case with entangled ancilla
        let anc = enumerate_stab_states(2, 3, &caps).unwrap()[100].clone();
        verify_measurement_replacement(
            &FVec::from_zx(d, &[1, 2], &[1, 0]),
            &FVec::from_zx(d, &[1, 0], &[2, 1]),
            &anc,
            &caps,
        )
        .or_else(|e| match e {
            Error::NotApplicable(_) => Ok(vec![]),
            e => Err(e),
        })
        .unwrap();
    }

    fn term(weight: Rational, gates: &[Gate], g: PauliOp) -> PolarTerm {
        let d = g.modulus();
        PolarTerm {
            weight,
            u: clifford_from_gates(1, d, gates).unwrap(),
            code: code(1, d, g),
        }
    }

    #[test]
    fn repeated_projector_splits() {
        let d = p(2);
        let caps = Caps::default();
        let q = |n: i64, m: i64| Rational::new(n.into(), m.into());
        let z = PauliOp::z(1, d, 0);
        let z_minus = z.shift_phase(2);
        let decomp = PolarDecomposition {
            n: 1,
            d,
            terms: vec![
                term(q(1, 4), &[], z.clone()),
                term(q(1, 4), &[Gate::X(0, 1)], z.clone()),
                term(q(1, 2), &[], z_minus.clone()),
            ],
        };
        let split = verify_double_projector_reduction(&decomp, &caps).unwrap();
        assert_eq!(split.pair, (0, 1));
        assert_eq!(split.mu, q(1, 2));
        assert_eq!(split.first.terms.len(), 2);

        let distinct = PolarDecomposition {
            n: 1,
            d,
            terms: vec![
                term(q(1, 2), &[], z.clone()),
                term(q(1, 2), &[], z_minus.clone()),
            ],
        };
        assert!(matches!(
            verify_double_projector_reduction(&distinct, &caps),
            Err(Error::NotApplicable(_))
        ));
        // Z acts trivially on |0⟩, so the two terms merge
        let merging = PolarDecomposition {
            n: 1,
            d,
            terms: vec![
                term(q(1, 4), &[], z.clone()),
                term(q(1, 4), &[Gate::Z(0, 1)], z),
                term(q(1, 2), &[], z_minus),
            ],
        };
        assert!(matches!(
            verify_double_projector_reduction(&merging, &caps),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn hadamard_conjugation_is_one_bell_state() {
        let d = p(2);
        let caps = Caps::default();
        let h = gates_matrix(1, d, &[Gate::H(0)], &caps).unwrap();
        let ch = Channel::from_kraus(d, 1, 1, vec![h.clone()], &caps).unwrap();
        let CspVerdict::Feasible(cert) = certify_csp(&ch, None, &caps).unwrap() else {
            panic!("H conjugation must be CSP");
        };
        assert_eq!(cert.weights.len(), 1);
        assert_eq!(cert.weights[0].0, rotated_bell(&h, d).unwrap());
    }

    #[test]
    fn z_measurement_with_conditional_x() {
        let d = p(2);
        let caps = Caps::default();
        let basis = pauli_eigenbasis(&PauliOp::z(1, d, 0)).unwrap();
        let us = vec![
            CMatrix::identity(order_for(2), 2),
            gates_matrix(1, d, &[Gate::X(0, 1)], &caps).unwrap(),
        ];
        let ch = measure_and_correct(&basis, &us, &caps).unwrap();
        assert!(ch.is_trace_preserving());
        assert!(certify_csp(&ch, None, &caps).unwrap().is_feasible());
    }

    #[test]
    fn pinching_kills_an_anticommuting_pauli() {
        let caps = Caps::default();
        for d in [p(2), p(3)] {
            let ch = pauli_pinching(&PauliOp::z(1, d, 0), &caps).unwrap();
            let found = crate::channel::kernel_pauli_scan(&ch, &caps)
                .unwrap()
                .unwrap();
            assert!(!found.commutes(&PauliOp::z(1, d, 0)));
        }
    }

    #[test]
    fn small_csp1_probe() {
        let r = csp1_equals_so1(p(2), 8, 1, 7, &Caps::default()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.clifford_vertices + r.measurement_vertices, 8);
    }
}
