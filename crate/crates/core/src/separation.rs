//! CSP certificates over the stabiliser polytope, the P_n subpolytope with
//! its functional L, and the affine-partition bound for stabiliser operations.

use std::cmp::Reverse;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use stabsep_lp::{
    certify_unique_optimum, format_rational, solve, LpResult, SparseVec, Status, VPolytopeLp,
};

use crate::channel::{lambda_sigma, Channel, ChoiMatrix};
use crate::coords::{EntryFrame, PauliFrame};
use crate::cyclotomic::{order_for, CycRat};
use crate::error::{Caps, Error, Result};
use crate::field::{
    enumerate_affine_partitions, proper_affine_hyperplanes, AffinePartition, AffineSubspace, FVec,
    Prime,
};
use crate::matrix::{inner, CMatrix, MatrixJson};
use crate::stabiliser::{
    enumerate_stab_states, states_orthogonal_to_zero, StabState, StabStateJson,
};

pub type Rational = BigRational;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Σ w_j |s_j⟩⟨s_j| as a dense matrix.
pub fn mixture(weights: &[(StabState, Rational)]) -> Result<CMatrix> {
    let (first, _) = weights
        .first()
        .ok_or_else(|| Error::Malformed("empty mixture".into()))?;
    let dim = first.modulus().power_count(first.n()) as usize;
    let mut acc = CMatrix::zeros(order_for(first.modulus().get()), dim, dim);
    for (s, w) in weights {
        acc.add_assign(&s.density().scale_rational(w));
    }
    Ok(acc)
}

/// Convex weights on stabiliser states of n_out + n_in qudits whose mixture
/// is the Choi matrix.
#[derive(Clone, Debug)]
pub struct CspCertificate {
    pub d: Prime,
    pub n_in: usize,
    pub n_out: usize,
    pub weights: Vec<(StabState, Rational)>,
}

impl CspCertificate {
    /// Exact re-check: nonnegative weights summing to one, the mixture equals
    /// the Choi matrix, and the Choi matrix is trace preserving.
    pub fn verify(&self, choi: &ChoiMatrix) -> bool {
        let sum = self
            .weights
            .iter()
            .fold(Rational::zero(), |acc, (_, w)| acc + w);
        sum.is_one()
            && self
                .weights
                .iter()
                .all(|(s, w)| !w.is_negative() && s.n() == self.n_in + self.n_out)
            && choi.is_trace_preserving()
            && mixture(&self.weights).is_ok_and(|m| m == choi.matrix)
    }
}

/// F(ρ) = offset + Σ_r coefficients[r]·c_r(ρ) in the Pauli frame of m qudits,
/// with F ≥ 0 on every generator and F(J) < 0.
#[derive(Clone, Debug)]
pub struct SeparatingFunctional {
    pub d: Prime,
    pub m: usize,
    pub coefficients: Vec<Rational>,
    pub offset: Rational,
    pub value_at_choi: Rational,
    /// False when the generators were a caller-supplied subset, so the
    /// functional separates only from their hull.
    pub exhaustive: bool,
}

impl SeparatingFunctional {
    pub fn evaluate(&self, rho: &CMatrix) -> Result<Rational> {
        let frame = PauliFrame::new(self.m, self.d)?;
        let c = frame.of_matrix(rho)?;
        Ok(c.iter().fold(self.offset.clone(), |acc, (r, v)| {
            acc + &self.coefficients[*r] * v
        }))
    }
}

#[derive(Clone, Debug)]
pub enum CspVerdict {
    Feasible(CspCertificate),
    Infeasible(SeparatingFunctional),
}

impl CspVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, CspVerdict::Feasible(_))
    }
}

/// Decides whether the Choi matrix of `ch` lies in the stabiliser polytope of
/// n_out + n_in qudits. With `candidates` the LP runs over that subset only.
///
/// Only states inside the range of J can carry weight, so the LP runs over
/// those; an infeasible answer is lifted to all generators by adding a
/// multiple of ρ ↦ Σ_k ⟨k|ρ|k⟩ over a kernel basis of J.
pub fn certify_csp(
    ch: &Channel,
    candidates: Option<&[StabState]>,
    caps: &Caps,
) -> Result<CspVerdict> {
    let d = ch.modulus();
    let m = ch.n_in() + ch.n_out();
    if !ch.is_trace_preserving() {
        return Err(Error::NotApplicable(
            "channel is not trace preserving".into(),
        ));
    }
    let choi = ch.choi();
    let owned;
    let states: &[StabState] = match candidates {
        Some(c) => c,
        None => {
            owned = enumerate_stab_states(m, d.get(), caps)?;
            &owned
        }
    };
    if let Some(s) = states.iter().find(|s| s.n() != m || s.modulus() != d) {
        return Err(Error::DimensionMismatch(format!(
            "candidate state on {} qudits, expected {m}",
            s.n()
        )));
    }
    let frame = PauliFrame::new(m, d)?;
    let kernel = choi.matrix.kernel();
    let in_range: Vec<bool> = states
        .par_iter()
        .map(|s| {
            let a = s.amplitudes();
            kernel.iter().all(|k| inner(k, &a).is_zero())
        })
        .collect();
    let kept: Vec<usize> = (0..states.len()).filter(|&j| in_range[j]).collect();
    let target = frame.of_matrix(&choi.matrix)?;
    let mut dense = vec![Rational::zero(); frame.dim()];
    for (r, v) in target {
        dense[r] = v;
    }
    let (coefficients, offset) = if kept.is_empty() {
        (vec![Rational::zero(); frame.dim()], -Rational::one())
    } else {
        let generators = kept
            .par_iter()
            .map(|&j| frame.of_state(&states[j]))
            .collect::<Result<Vec<_>>>()?;
        let mut lp = VPolytopeLp::new(frame.dim(), generators);
        lp.pin(dense.into_iter().enumerate());
        let res = solve(&lp)?;
        match res.status {
            Status::Feasible => {
                let weights = res
                    .weights
                    .iter()
                    .map(|(j, w)| (states[kept[*j]].clone(), w.clone()))
                    .collect();
                let cert = CspCertificate {
                    d,
                    n_in: ch.n_in(),
                    n_out: ch.n_out(),
                    weights,
                };
                if !cert.verify(&choi) {
                    return Err(Error::VerificationFailed(
                        "CSP mixture differs from the Choi matrix".into(),
                    ));
                }
                return Ok(CspVerdict::Feasible(cert));
            }
            Status::Infeasible => {
                let y = res
                    .dual_certificate
                    .expect("infeasible result carries a certificate");
                (y[..frame.dim()].to_vec(), y[frame.dim()].clone())
            }
            other => {
                return Err(Error::VerificationFailed(format!(
                    "unexpected LP status {other:?}"
                )))
            }
        }
    };
    let mut f = SeparatingFunctional {
        d,
        m,
        coefficients,
        offset,
        value_at_choi: Rational::zero(),
        exhaustive: candidates.is_none(),
    };
    let coords = states
        .par_iter()
        .map(|s| frame.of_state(s))
        .collect::<Result<Vec<_>>>()?;
    let at = |f: &SeparatingFunctional, c: &SparseVec| {
        c.iter().fold(f.offset.clone(), |acc, (r, v)| {
            acc + &f.coefficients[*r] * v
        })
    };
    let mut form = CMatrix::zeros(choi.matrix.order(), choi.matrix.rows(), choi.matrix.cols());
    for k in &kernel {
        form.add_assign(&CMatrix::outer(k, k));
    }
    let (q_offset, q_coeffs) = frame.trace_functional(&form)?;
    let q = SeparatingFunctional {
        coefficients: {
            let mut c = vec![Rational::zero(); frame.dim()];
            for (r, v) in q_coeffs {
                c[r] = v;
            }
            c
        },
        offset: q_offset,
        ..f.clone()
    };
    let mut t = Rational::zero();
    for (j, c) in coords.iter().enumerate() {
        let fv = at(&f, c);
        if fv.is_negative() {
            debug_assert!(!in_range[j]);
            let need = -fv / at(&q, c);
            if need > t {
                t = need;
            }
        }
    }
    if !t.is_zero() {
        f.offset += &t * &q.offset;
        for (a, b) in f.coefficients.iter_mut().zip(&q.coefficients) {
            *a += &t * b;
        }
    }
    f.value_at_choi = f.evaluate(&choi.matrix)?;
    if !f.value_at_choi.is_negative() || coords.iter().any(|c| at(&f, c).is_negative()) {
        return Err(Error::VerificationFailed(
            "functional does not separate the Choi matrix".into(),
        ));
    }
    Ok(CspVerdict::Infeasible(f))
}

/// ψ_K = |K|^{-1/2} Σ_{x∈K} |x⟩|x⟩ on 2n qudits.
fn doubled_flat_state(k: &AffineSubspace) -> Result<StabState> {
    let d = k.modulus();
    let double = |v: &FVec| FVec::from_reduced(d, [v.entries(), v.entries()].concat());
    let basis: Vec<FVec> = k.basis().iter().map(double).collect();
    let support = AffineSubspace::new(d, 2 * k.ambient_dim(), &basis, &double(&k.offset()))?;
    Ok(StabState::flat(support))
}

/// Candidate generators for Λ: |+⟩|0⟩ and ψ_K for every proper affine
/// hyperplane K, with the output register first.
pub fn lambda_candidates(n: usize, d: Prime) -> Result<Vec<StabState>> {
    let all = AffineSubspace::new(
        d,
        n,
        &(0..n).map(|i| FVec::unit(d, n, i)).collect::<Vec<_>>(),
        &FVec::zeros(d, n),
    )?;
    let mut out = vec![StabState::flat(all).tensor(&StabState::basis_state(n, d, &vec![0; n]))];
    for k in proper_affine_hyperplanes(n, d.get())? {
        out.push(doubled_flat_state(&k)?);
    }
    Ok(out)
}

/// The decomposition of J(Λ) with weight d^{-n} on each candidate.
pub fn lambda_choi_decomposition(n: usize, d: Prime) -> Result<CspCertificate> {
    let w = rat(1, d.power_count(n) as i64);
    let weights = lambda_candidates(n, d)?
        .into_iter()
        .map(|s| (s, w.clone()))
        .collect();
    Ok(CspCertificate {
        d,
        n_in: n,
        n_out: n,
        weights,
    })
}

/// Outcome of maximising L(σ) = ⟨+|σ|+⟩ over P_n(d).
#[derive(Clone, Debug)]
pub struct PnReport {
    pub n: usize,
    pub d: Prime,
    pub value: Rational,
    pub unique: bool,
    /// The maximiser, when unique.
    pub sigma: Option<CMatrix>,
    /// One optimal convex decomposition.
    pub weights: Vec<(StabState, Rational)>,
}

fn pn_problem(
    n: usize,
    d: Prime,
    caps: &Caps,
) -> Result<(EntryFrame, Vec<StabState>, VPolytopeLp)> {
    let dim = d.power_count(n) as usize;
    caps.check_dense(dim as u64)?;
    if dim < 2 {
        return Err(Error::DimensionMismatch("P_n needs n ≥ 1".into()));
    }
    let frame = EntryFrame::new(dim, d)?;
    let states = states_orthogonal_to_zero(n, d.get(), caps)?;
    let generators = states
        .par_iter()
        .map(|s| frame.of_matrix(&s.density()))
        .collect::<Result<Vec<_>>>()?;
    let mut lp = VPolytopeLp::new(frame.dim(), generators);
    let pin = rat(1, dim as i64 - 1);
    lp.pin((1..dim).map(|x| (frame.row(x, x), pin.clone())));
    Ok((frame, states, lp))
}

/// L(σ) = d^{-n} Σ_{x,y} Re σ_{x,y} in entry coordinates.
fn plus_functional(frame: &EntryFrame, dim: usize) -> Vec<(usize, Rational)> {
    let mut dense = vec![Rational::zero(); frame.dim()];
    for x in 0..dim {
        for y in x..dim {
            let mult = if x == y {
                rat(1, dim as i64)
            } else {
                rat(2, dim as i64)
            };
            for (r, v) in frame.real_part(x, y) {
                dense[r] += &mult * v;
            }
        }
    }
    dense
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

pub fn pn_polytope_lp(n: usize, d: Prime, caps: &Caps) -> Result<PnReport> {
    let (frame, states, lp) = pn_problem(n, d, caps)?;
    let dim = d.power_count(n) as usize;
    let lp = lp.with_objective(plus_functional(&frame, dim));
    let res = solve(&lp)?;
    if res.status != Status::Optimal {
        return Err(Error::VerificationFailed(format!(
            "P_n LP status {:?}",
            res.status
        )));
    }
    let map: Vec<Vec<(usize, Rational)>> = (0..frame.dim())
        .map(|r| vec![(r, Rational::one())])
        .collect();
    let uq = certify_unique_optimum(&lp, &map)?;
    let sigma = uq.point.as_ref().map(|p| frame.to_matrix(p)).transpose()?;
    let weights = res
        .weights
        .iter()
        .map(|(j, w)| (states[*j].clone(), w.clone()))
        .collect();
    Ok(PnReport {
        n,
        d,
        value: uq.value,
        unique: uq.unique,
        sigma,
        weights,
    })
}

/// Exact membership of σ in P_n(d): feasible with a decomposition, or
/// infeasible with a separating certificate.
pub fn pn_membership(sigma: &CMatrix, n: usize, d: Prime, caps: &Caps) -> Result<LpResult> {
    let (frame, _, mut lp) = pn_problem(n, d, caps)?;
    let target = frame.of_matrix(sigma)?;
    let mut dense = vec![Rational::zero(); frame.dim()];
    for (r, v) in target {
        dense[r] = v;
    }
    lp.pin(dense.into_iter().enumerate());
    Ok(solve(&lp)?)
}

/// L(σ) = ⟨+|σ|+⟩.
pub fn plus_expectation(sigma: &CMatrix, n: usize, d: Prime) -> Result<Rational> {
    let dim = d.power_count(n) as usize;
    let mut t = CycRat::zero(sigma.order());
    for (_, _, v) in sigma.nonzeros() {
        t += v;
    }
    let r = t
        .as_rational()
        .ok_or_else(|| Error::Malformed("⟨+|σ|+⟩ is not rational".into()))?;
    Ok(r / Rational::from_integer((dim as i64).into()))
}

/// σ = (d^n−1)^{-1} Σ_K |K|·|s_K⟩⟨s_K|.
pub fn so_ad_sigma(partition: &AffinePartition, states: &[StabState]) -> Result<CMatrix> {
    if partition.parts.len() != states.len() || states.is_empty() {
        return Err(Error::DimensionMismatch("one state per part".into()));
    }
    let d = states[0].modulus();
    let n = states[0].n();
    let dim = d.power_count(n) as i64;
    let mut acc = CMatrix::zeros(order_for(d.get()), dim as usize, dim as usize);
    for (k, s) in partition.parts.iter().zip(states) {
        if s.n() != n || s.support().points() != k.points() {
            return Err(Error::Malformed(format!(
                "state is not supported exactly on {k}"
            )));
        }
        acc.add_assign(
            &s.density()
                .scale_rational(&rat(k.cardinality() as i64, dim - 1)),
        );
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct SoAdBoundReport {
    pub n: usize,
    pub d: Prime,
    pub best_partition: AffinePartition,
    pub bound_value: Rational,
    /// 1/d = L(λ).
    pub strict_bound: Rational,
    pub margin: Rational,
    pub partitions_searched: usize,
    /// Σ_K |K|² of the sequential-measurement partition, (d^{2n}−1)/(d+1),
    /// scaled like the bound.
    pub protocol_value: Rational,
}

/// max over affine partitions of F_d^n ∖ 0 of Σ_K |K|² / (d^n(d^n−1)).
pub fn so_ad_upper_bound(n: usize, d: Prime, caps: &Caps) -> Result<SoAdBoundReport> {
    let parts = enumerate_affine_partitions(n, d.get(), caps.partition_points)?;
    let (sumsq, Reverse(searched_index), best, count) = parts
        .enumerate()
        .par_bridge()
        .map(|(i, p)| (p.sum_of_squares(), Reverse(i), Some(p), 1usize))
        .reduce(
            || (0, Reverse(usize::MAX), None, 0),
            |a, b| {
                let count = a.3 + b.3;
                let best = if (a.0, a.1) >= (b.0, b.1) { a } else { b };
                (best.0, best.1, best.2, count)
            },
        );
    let _ = searched_index;
    let best = best.ok_or_else(|| Error::NotApplicable("no affine partitions".into()))?;
    let dim = d.power_count(n) as i64;
    let scale = dim * (dim - 1);
    let bound_value = rat(sumsq as i64, scale);
    // the flat-phase state on each part attains the bound
    let flats: Vec<StabState> = best.parts.iter().cloned().map(StabState::flat).collect();
    let sigma = so_ad_sigma(&best, &flats)?;
    if plus_expectation(&sigma, n, d)? != bound_value {
        return Err(Error::VerificationFailed(
            "flat states do not attain the partition bound".into(),
        ));
    }
    let strict = rat(1, d.get() as i64);
    let dd = d.get() as i64;
    let protocol_value = rat((dim * dim - 1) / (dd + 1), scale);
    Ok(SoAdBoundReport {
        n,
        d,
        margin: &strict - &bound_value,
        best_partition: best,
        bound_value,
        strict_bound: strict,
        partitions_searched: count,
        protocol_value,
    })
}

#[derive(Clone, Debug)]
pub struct SeparationReport {
    pub n: usize,
    pub d: Prime,
    pub pn: PnReport,
    pub so_ad: SoAdBoundReport,
    /// L_max over P_n minus the SO bound.
    pub margin: Rational,
    pub lambda_matches: bool,
}

pub fn separation_report(n: usize, d: Prime, caps: &Caps) -> Result<SeparationReport> {
    let pn = pn_polytope_lp(n, d, caps)?;
    let so_ad = so_ad_upper_bound(n, d, caps)?;
    let margin = &pn.value - &so_ad.bound_value;
    let lambda_matches = pn.sigma.as_ref() == Some(&lambda_sigma(n, d));
    Ok(SeparationReport {
        n,
        d,
        pn,
        so_ad,
        margin,
        lambda_matches,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightJson {
    pub state: StabStateJson,
    pub weight: String,
}

fn weights_json(w: &[(StabState, Rational)]) -> Vec<WeightJson> {
    w.iter()
        .map(|(s, v)| WeightJson {
            state: s.into(),
            weight: format_rational(v),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionalJson {
    /// Coordinates are tr(w(a)† ρ) over Pauli representatives.
    pub frame: String,
    pub coefficients: Vec<String>,
    pub offset: String,
    pub value_at_choi: String,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CspVerdictJson {
    pub schema: String,
    pub verdict: String,
    pub d: u32,
    pub n_in: usize,
    pub n_out: usize,
    pub weights: Vec<WeightJson>,
    pub functional: Option<FunctionalJson>,
}

impl CspVerdictJson {
    pub fn new(ch: &Channel, v: &CspVerdict) -> Self {
        let (verdict, weights, functional) = match v {
            CspVerdict::Feasible(c) => ("feasible", weights_json(&c.weights), None),
            CspVerdict::Infeasible(f) => (
                "infeasible",
                Vec::new(),
                Some(FunctionalJson {
                    frame: "pauli".into(),
                    coefficients: f.coefficients.iter().map(format_rational).collect(),
                    offset: format_rational(&f.offset),
                    value_at_choi: format_rational(&f.value_at_choi),
                    exhaustive: f.exhaustive,
                }),
            ),
        };
        CspVerdictJson {
            schema: crate::SCHEMA.into(),
            verdict: verdict.into(),
            d: ch.modulus().get(),
            n_in: ch.n_in(),
            n_out: ch.n_out(),
            weights,
            functional,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparationReportJson {
    pub schema: String,
    pub n: usize,
    pub d: u32,
    #[serde(rename = "L_max")]
    pub l_max: String,
    pub unique: bool,
    pub lambda_matrix: Option<MatrixJson>,
    pub lambda_matches_formula: bool,
    pub so_ad_bound: String,
    pub best_partition: Vec<Vec<Vec<u32>>>,
    pub partitions_searched: usize,
    pub protocol_value: String,
    pub margin: String,
}

impl From<&SeparationReport> for SeparationReportJson {
    fn from(r: &SeparationReport) -> Self {
        SeparationReportJson {
            schema: crate::SCHEMA.into(),
            n: r.n,
            d: r.d.get(),
            l_max: format_rational(&r.pn.value),
            unique: r.pn.unique,
            lambda_matrix: r.pn.sigma.as_ref().map(Into::into),
            lambda_matches_formula: r.lambda_matches,
            so_ad_bound: format_rational(&r.so_ad.bound_value),
            best_partition: r
                .so_ad
                .best_partition
                .parts
                .iter()
                .map(AffineSubspace::points)
                .collect(),
            partitions_searched: r.so_ad.partitions_searched,
            protocol_value: format_rational(&r.so_ad.protocol_value),
            margin: format_rational(&r.margin),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{builtin, lambda_channel};

    fn p(d: u32) -> Prime {
        Prime::new(d).unwrap()
    }

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn identity_channel_is_csp() {
        let ch = builtin("identity", 1, p(2), &caps()).unwrap();
        let CspVerdict::Feasible(c) = certify_csp(&ch, None, &caps()).unwrap() else {
            panic!("identity must be CSP");
        };
        assert_eq!(c.weights.len(), 1);
        assert!(c.weights[0].1.is_one());
        assert_eq!(c.weights[0].0.density(), ch.choi().matrix);
    }

    #[test]
    fn lambda_candidate_mode() {
        for (n, d) in [(2, 2), (3, 2), (2, 3)] {
            let ch = lambda_channel(n, p(d), &caps()).unwrap();
            let explicit = lambda_choi_decomposition(n, p(d)).unwrap();
            assert!(explicit.verify(&ch.choi()), "n={n} d={d}");
            let cands = lambda_candidates(n, p(d)).unwrap();
            assert!(certify_csp(&ch, Some(&cands), &caps())
                .unwrap()
                .is_feasible());
        }
    }

    #[test]
    fn candidate_mode_infeasible_is_not_exhaustive() {
        let ch = builtin("measure00-hadamard", 2, p(2), &caps()).unwrap();
        let cands = lambda_candidates(2, p(2)).unwrap();
        let CspVerdict::Infeasible(f) = certify_csp(&ch, Some(&cands), &caps()).unwrap() else {
            panic!("outside the candidate hull");
        };
        assert!(!f.exhaustive);
        for s in &cands {
            assert!(!f.evaluate(&s.density()).unwrap().is_negative());
        }
    }

    #[test]
    fn pn_small_cases() {
        let r = pn_polytope_lp(1, p(2), &caps()).unwrap();
        assert_eq!(r.value, rat(1, 2));
        assert!(r.unique);
        let r = pn_polytope_lp(2, p(2), &caps()).unwrap();
        assert_eq!(r.value, rat(1, 2));
        assert!(r.unique);
        assert_eq!(r.sigma.unwrap(), lambda_sigma(2, p(2)));
    }

    #[test]
    fn so_ad_examples() {
        let d = p(2);
        let single = |x: &[i64]| AffineSubspace::point(&FVec::new(d, x.iter().copied()));
        let part = AffinePartition {
            parts: vec![single(&[0, 1]), single(&[1, 0]), single(&[1, 1])],
        };
        let states: Vec<StabState> = part.parts.iter().cloned().map(StabState::flat).collect();
        let sigma = so_ad_sigma(&part, &states).unwrap();
        let third = CycRat::from_rational(8, rat(1, 3));
        assert_eq!(
            sigma,
            CMatrix::from_fn(8, 4, 4, |i, j| if i == j && i > 0 {
                third.clone()
            } else {
                CycRat::zero(8)
            })
        );
        let pair =
            AffineSubspace::new(d, 2, &[FVec::new(d, [1, 1])], &FVec::new(d, [0, 1])).unwrap();
        let part = AffinePartition {
            parts: vec![pair.clone(), single(&[1, 1])],
        };
        let states = vec![StabState::flat(pair), StabState::flat(single(&[1, 1]))];
        let sigma = so_ad_sigma(&part, &states).unwrap();
        assert_eq!(*sigma.get(1, 2), third);
        assert!(so_ad_sigma(&part, &states[..1]).is_err());
        let r = so_ad_upper_bound(2, d, &caps()).unwrap();
        assert_eq!(r.bound_value, rat(5, 12));
        assert_eq!(r.margin, rat(1, 12));
        assert_eq!(r.partitions_searched, 4);
        assert_eq!(r.protocol_value, rat(5, 12));
        let r = so_ad_upper_bound(1, d, &caps()).unwrap();
        assert_eq!(r.bound_value, rat(1, 2));
        assert!(r.margin.is_zero());
    }

    #[test]
    fn report_json() {
        let r = separation_report(2, p(2), &caps()).unwrap();
        let j = serde_json::to_value(SeparationReportJson::from(&r)).unwrap();
        assert_eq!(j["L_max"], "1/2");
        assert_eq!(j["so_ad_bound"], "5/12");
        assert_eq!(j["margin"], "1/12");
        assert_eq!(j["lambda_matches_formula"], true);
    }
}
