//! Polar form of bipartite stabiliser states: |s⟩ = c·d^{k/2} (U P ⊗ 1)|φ+⟩.

use serde::{Deserialize, Serialize};
use stabsep_lp::format_rational;

use crate::clifford::{find_clifford_mapping, CliffordJson, CliffordOp};
use crate::cyclotomic::{order_for, CycRat};
use crate::error::{Caps, Error, Result};
use crate::field::linalg;
use crate::matrix::CMatrix;
use crate::pauli::{PauliJson, PauliOp};
use crate::stabiliser::{StabCode, StabGroup, StabState};

#[derive(Clone, Debug)]
pub struct PolarForm {
    pub n: usize,
    pub k: usize,
    pub u: CliffordOp,
    pub code: StabCode,
    /// Global phase c.
    pub phase: CycRat,
}

/// Elements of `group` acting trivially on the qudits outside `keep`,
/// restricted to `keep`, as a reduced generating set.
fn local_subgroup(group: &StabGroup, keep: std::ops::Range<usize>) -> Result<Vec<PauliOp>> {
    let d = group.modulus();
    let total = group.n();
    let gens = group.generators();
    let outside: Vec<usize> = (0..total).filter(|q| !keep.contains(q)).collect();
    // columns: the outside coordinates; rows of the transposed system index generators
    let rows: Vec<Vec<u32>> = outside
        .iter()
        .flat_map(|&q| [q, total + q])
        .map(|c| gens.iter().map(|g| g.a().entries()[c]).collect())
        .collect();
    let coeffs = if rows.is_empty() {
        (0..gens.len())
            .map(|i| (0..gens.len()).map(|j| u32::from(i == j)).collect())
            .collect()
    } else {
        linalg::nullspace(d, &rows, gens.len())
    };
    let elems: Vec<PauliOp> = coeffs
        .iter()
        .map(|c| {
            gens.iter()
                .zip(c)
                .fold(PauliOp::identity(total, d), |acc, (g, &ci)| {
                    acc.mul(&g.pow(ci as u64))
                })
                .restrict(keep.clone())
        })
        .collect();
    Ok(StabGroup::new(keep.len(), d, elems)?.generators().to_vec())
}

pub fn polar_form(s: &StabState) -> Result<PolarForm> {
    let total = s.n();
    if !total.is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "polar form needs an even number of qudits, got {total}"
        )));
    }
    let n = total / 2;
    let d = s.modulus();
    let group = s.group();
    let ga = local_subgroup(&group, 0..n)?;
    let gb = local_subgroup(&group, n..total)?;
    let k = gb.len();
    if ga.len() != k {
        return Err(Error::VerificationFailed(
            "local stabiliser ranks differ".into(),
        ));
    }
    let lift = |p: &PauliOp, left: bool| {
        let id = PauliOp::identity(n, d);
        if left {
            p.tensor(&id)
        } else {
            id.tensor(p)
        }
    };
    // complete the local subgroups to a generating set of the whole group
    let mut span: Vec<Vec<u32>> = ga
        .iter()
        .map(|p| lift(p, true))
        .chain(gb.iter().map(|p| lift(p, false)))
        .map(|p| p.a().entries().to_vec())
        .collect();
    let mut logical = Vec::new();
    for g in group.generators() {
        let mut trial = span.clone();
        trial.push(g.a().entries().to_vec());
        if linalg::rank(d, &trial) > span.len() {
            span = trial;
            logical.push(g.clone());
        }
    }
    let code_gens: Vec<PauliOp> = gb.iter().map(PauliOp::conj).collect();
    let code = StabCode::new(StabGroup::new(n, d, code_gens.clone())?);
    let mut pairs: Vec<(PauliOp, PauliOp)> =
        code_gens.into_iter().zip(ga.iter().cloned()).collect();
    for g in &logical {
        let a_part = g.restrict(0..n).with_phase(0);
        let b_part = g.restrict(n..total);
        pairs.push((b_part.conj(), a_part));
    }
    let u = find_clifford_mapping(n, d, &pairs)?;
    let mut form = PolarForm {
        n,
        k,
        u,
        code,
        phase: CycRat::one(order_for(d.get())),
    };
    let rebuilt = form.reconstruct(&Caps::default())?;
    let amps = s.amplitudes();
    let (i, a) = amps
        .iter()
        .enumerate()
        .find(|(_, a)| !a.is_zero())
        .expect("normalised state");
    let c = a * &rebuilt[i]
        .inv()
        .ok_or_else(|| Error::VerificationFailed("reconstruction vanishes".into()))?;
    let scaled: Vec<CycRat> = rebuilt.iter().map(|v| v * &c).collect();
    if scaled != amps {
        return Err(Error::VerificationFailed(
            "polar reconstruction differs from the state".into(),
        ));
    }
    form.phase = c;
    Ok(form)
}

impl PolarForm {
    /// The operator c·d^{(k−n)/2}·U P; its vectorisation is the state.
    pub fn coefficient_matrix(&self, caps: &Caps) -> Result<CMatrix> {
        let d = self.code.group.modulus();
        let up = self.u.dense(caps)?.mul(&self.code.projector(caps)?);
        let norm = &CycRat::inv_sqrt_d_pow(d.get(), (self.n - self.k) as u32) * &self.phase;
        Ok(up.scale(&norm))
    }

    /// c·d^{k/2} (U P ⊗ 1)|φ+⟩ with |φ+⟩ = d^{-n/2} Σ_x |xx⟩.
    pub fn reconstruct(&self, caps: &Caps) -> Result<Vec<CycRat>> {
        let m = self.coefficient_matrix(caps)?;
        Ok((0..m.rows())
            .flat_map(|x| (0..m.cols()).map(move |y| (x, y)))
            .map(|(x, y)| m.get(x, y).clone())
            .collect())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolarFormJson {
    pub schema: String,
    pub d: u32,
    pub n: usize,
    pub k: usize,
    /// Gate list for U; the last gate acts first.
    pub gates: Vec<String>,
    pub u: CliffordJson,
    pub code_generators: Vec<PauliJson>,
    /// Power-basis coefficients of the global phase c.
    pub phase: Vec<String>,
}

impl From<&PolarForm> for PolarFormJson {
    fn from(f: &PolarForm) -> Self {
        PolarFormJson {
            schema: crate::SCHEMA.into(),
            d: f.code.group.modulus().get(),
            n: f.n,
            k: f.k,
            gates: f.u.to_gates().iter().map(ToString::to_string).collect(),
            u: (&f.u).into(),
            code_generators: f.code.group.generators().iter().map(Into::into).collect(),
            phase: f.phase.coeffs().iter().map(format_rational).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;
    use crate::stabiliser::enumerate_stab_states;

    fn p(d: u32) -> Prime {
        Prime::new(d).unwrap()
    }

    #[test]
    fn phi_plus_and_product_state() {
        let d = p(2);
        let bell = StabState::from_generators(
            2,
            d,
            &[
                PauliOp::from_zx(d, &[1, 1], &[0, 0]),
                PauliOp::from_zx(d, &[0, 0], &[1, 1]),
            ],
        )
        .unwrap();
        let f = polar_form(&bell).unwrap();
        assert_eq!(f.k, 0);
        assert!(f.u.is_identity());
        assert!(f.phase.is_one());
        let zero = StabState::basis_state(2, d, &[0, 0]);
        let f = polar_form(&zero).unwrap();
        assert_eq!(f.k, 1);
        assert!(f.u.is_identity());
        assert_eq!(f.code.group.generators(), &[PauliOp::z(1, d, 0)]);
    }

    #[test]
    fn all_two_qudit_states() {
        for d in [2u32, 3] {
            for s in enumerate_stab_states(2, d, &Caps::default()).unwrap() {
                polar_form(&s).unwrap_or_else(|e| panic!("{s:?}: {e}"));
            }
        }
    }
}
