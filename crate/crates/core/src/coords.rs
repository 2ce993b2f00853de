//! Real rational coordinates for Hermitian matrices whose entries lie in Q(τ).
//!
//! [`PauliFrame`] uses c_a = tr(w(a)† ρ), one row per Pauli for d = 2 and two
//! rows (coefficients of 1 and ω) per pair {a, −a} for d = 3. [`EntryFrame`]
//! uses the matrix entries on and above the diagonal.

use num_rational::BigRational;
use num_traits::Zero;
use stabsep_lp::SparseVec;

use crate::cyclotomic::{order_for, CycRat};
use crate::error::{Error, Result};
use crate::field::{point_from_index, point_index, FVec, Prime};
use crate::matrix::CMatrix;
use crate::pauli::PauliOp;
use crate::stabiliser::StabState;

fn check_modulus(d: Prime) -> Result<()> {
    if d.get() > 3 {
        return Err(Error::Unsupported(format!(
            "rational coordinates need d in {{2, 3}}, got {}",
            d.get()
        )));
    }
    Ok(())
}

fn split(d: Prime, v: &CycRat) -> Result<(BigRational, BigRational)> {
    v.qtau_coords(d.get())
        .ok_or_else(|| Error::Unsupported(format!("entry {v} is outside Q(τ)")))
}

fn push_nonzero(out: &mut SparseVec, row: usize, v: BigRational) {
    if !v.is_zero() {
        out.push((row, v));
    }
}

#[derive(Clone, Debug)]
pub struct PauliFrame {
    d: Prime,
    m: usize,
    /// First row of each Pauli index, for representatives only.
    row_of: Vec<Option<usize>>,
    reps: Vec<usize>,
}

impl PauliFrame {
    pub fn new(m: usize, d: Prime) -> Result<Self> {
        check_modulus(d)?;
        let total = d.power_count(2 * m) as usize;
        let mut row_of = vec![None; total];
        let mut reps = Vec::new();
        let width = if d.get() == 2 { 1 } else { 2 };
        for (idx, row) in row_of.iter_mut().enumerate().skip(1) {
            let a = FVec::from_index(d, 2 * m, idx);
            if a.neg().index() >= idx {
                *row = Some(reps.len() * width);
                reps.push(idx);
            }
        }
        Ok(PauliFrame { d, m, row_of, reps })
    }

    pub fn dim(&self) -> usize {
        if self.d.get() == 2 {
            self.reps.len()
        } else {
            2 * self.reps.len()
        }
    }

    pub fn qudits(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> Prime {
        self.d
    }

    /// Pauli indices of the representatives, in row order.
    pub fn representatives(&self) -> &[usize] {
        &self.reps
    }

    /// First row of Pauli index `idx`, when it is a representative.
    pub fn row_of(&self, idx: usize) -> Option<usize> {
        self.row_of[idx]
    }

    fn push(&self, out: &mut SparseVec, idx: usize, v: &CycRat) -> Result<()> {
        let Some(row) = self.row_of[idx] else {
            return Ok(());
        };
        let (re, im) = split(self.d, v)?;
        if self.d.get() == 2 {
            if !im.is_zero() {
                return Err(Error::Malformed(
                    "Pauli coordinate of a non-Hermitian matrix".into(),
                ));
            }
            push_nonzero(out, row, re);
        } else {
            push_nonzero(out, row, re);
            push_nonzero(out, row + 1, im);
        }
        Ok(())
    }

    pub fn of_state(&self, s: &StabState) -> Result<SparseVec> {
        let mut out = Vec::new();
        for (idx, e) in s.pauli_support() {
            self.push(&mut out, idx, &CycRat::tau_pow(self.d.get(), e as i64))?;
        }
        out.sort_by_key(|(r, _)| *r);
        Ok(out)
    }

    pub fn of_matrix(&self, rho: &CMatrix) -> Result<SparseVec> {
        let dim = self.d.power_count(self.m) as usize;
        if rho.rows() != dim || rho.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "expected a {dim}x{dim} matrix"
            )));
        }
        let mut out = Vec::new();
        for &idx in &self.reps {
            let c = self.coefficient(rho, idx);
            self.push(&mut out, idx, &c)?;
        }
        Ok(out)
    }

    /// tr(w(a)† ρ) for the Pauli with index `idx`.
    pub fn coefficient(&self, rho: &CMatrix, idx: usize) -> CycRat {
        let d = self.d;
        let p = PauliOp::weyl(FVec::from_index(d, 2 * self.m, idx));
        let dim = d.power_count(self.m) as usize;
        let mut c = CycRat::zero(rho.order());
        for y in 0..dim {
            let (e, t) = p.act_on_basis(&point_from_index(d, self.m, y));
            let v = rho.get(point_index(d, &t), y);
            if !v.is_zero() {
                c += &v.mul_tau(d.get(), -e);
            }
        }
        c
    }

    /// ρ ↦ tr(Mρ) for Hermitian M, as (offset, coefficients) in this frame.
    pub fn trace_functional(&self, m: &CMatrix) -> Result<(BigRational, SparseVec)> {
        let dd = self.d.get();
        let dim = self.d.power_count(self.m) as i64;
        let norm = BigRational::new(1.into(), dim.into());
        let real = |z: &CycRat| -> Result<BigRational> {
            (z + &z.conj())
                .as_rational()
                .map(|r| r / BigRational::from_integer(2.into()))
                .ok_or_else(|| Error::Malformed("trace functional is not real".into()))
        };
        let offset = real(&m.trace())? * &norm;
        let mut out = Vec::new();
        for &idx in &self.reps {
            let row = self.row_of[idx].expect("representative");
            // tr(M w(a)) = conj(tr(w(a)† M))
            let t = self.coefficient(m, idx).conj();
            if dd == 2 {
                push_nonzero(&mut out, row, real(&t)? * &norm);
            } else {
                let two = &norm * BigRational::from_integer(2.into());
                push_nonzero(&mut out, row, real(&t)? * &two);
                push_nonzero(&mut out, row + 1, real(&t.mul_tau(dd, 2))? * &two);
            }
        }
        Ok((offset, out))
    }

    /// ρ = d^{-m} Σ_a c_a w(a) with c_0 = 1, from frame coordinates.
    pub fn to_matrix(&self, coords: &[BigRational]) -> Result<CMatrix> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates",
                self.dim()
            )));
        }
        let d = self.d;
        let dd = d.get();
        let dim = d.power_count(self.m) as usize;
        let order = order_for(dd);
        let caps = crate::error::Caps {
            dense: dim,
            ..Default::default()
        };
        let mut acc = CMatrix::identity(order, dim);
        for &idx in &self.reps {
            let row = self.row_of[idx].expect("representative");
            let c = if dd == 2 {
                CycRat::from_rational(order, coords[row].clone())
            } else {
                CycRat::from_qtau_coords(dd, &coords[row], &coords[row + 1])
            };
            if c.is_zero() {
                continue;
            }
            let a = FVec::from_index(d, 2 * self.m, idx);
            acc.add_assign(&PauliOp::weyl(a.clone()).weyl_matrix(&caps)?.scale(&c));
            if dd != 2 {
                acc.add_assign(&PauliOp::weyl(a.neg()).weyl_matrix(&caps)?.scale(&c.conj()));
            }
        }
        Ok(acc.scale_rational(&BigRational::new(1.into(), (dim as i64).into())))
    }
}

/// Coordinates from the entries σ_{x,y} with x ≤ y: one rational on the
/// diagonal, two (coefficients of 1 and u, u = i or ω) above it.
#[derive(Clone, Debug)]
pub struct EntryFrame {
    d: Prime,
    size: usize,
    /// Row of σ_{x,y} for x ≤ y, indexed x·size + y.
    rows: Vec<usize>,
    dim: usize,
}

impl EntryFrame {
    pub fn new(size: usize, d: Prime) -> Result<Self> {
        check_modulus(d)?;
        let mut rows = vec![usize::MAX; size * size];
        let mut next = 0;
        for x in 0..size {
            for y in x..size {
                rows[x * size + y] = next;
                next += if x == y { 1 } else { 2 };
            }
        }
        Ok(EntryFrame {
            d,
            size,
            rows,
            dim: next,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row of the (real part of the) entry (x, y), x ≤ y.
    pub fn row(&self, x: usize, y: usize) -> usize {
        self.rows[x * self.size + y]
    }

    pub fn of_matrix(&self, m: &CMatrix) -> Result<SparseVec> {
        if m.rows() != self.size || m.cols() != self.size {
            return Err(Error::DimensionMismatch(format!(
                "expected a {0}x{0} matrix",
                self.size
            )));
        }
        let mut out = Vec::new();
        for x in 0..self.size {
            for y in x..self.size {
                let (re, im) = split(self.d, m.get(x, y))?;
                let r = self.row(x, y);
                push_nonzero(&mut out, r, re);
                if x != y {
                    push_nonzero(&mut out, r + 1, im);
                } else if !im.is_zero() {
                    return Err(Error::Malformed("diagonal entry is not real".into()));
                }
            }
        }
        Ok(out)
    }

    /// The Hermitian matrix with the given coordinates.
    pub fn to_matrix(&self, coords: &[BigRational]) -> Result<CMatrix> {
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates",
                self.dim
            )));
        }
        let dd = self.d.get();
        let order = order_for(dd);
        let mut m = CMatrix::zeros(order, self.size, self.size);
        for x in 0..self.size {
            for y in x..self.size {
                let r = self.row(x, y);
                if x == y {
                    m.set(x, x, CycRat::from_rational(order, coords[r].clone()));
                } else {
                    let v = CycRat::from_qtau_coords(dd, &coords[r], &coords[r + 1]);
                    m.set(y, x, v.conj());
                    m.set(x, y, v);
                }
            }
        }
        Ok(m)
    }

    /// Coefficients of Re σ_{x,y} in this frame.
    pub fn real_part(&self, x: usize, y: usize) -> SparseVec {
        let (x, y) = (x.min(y), x.max(y));
        let r = self.row(x, y);
        let one = BigRational::from_integer(1.into());
        if x == y || self.d.get() == 2 {
            vec![(r, one)]
        } else {
            // Re(a + bω) = a − b/2
            vec![(r, one), (r + 1, BigRational::new((-1).into(), 2.into()))]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Caps;
    use crate::stabiliser::enumerate_stab_states;

    fn p(d: u32) -> Prime {
        Prime::new(d).unwrap()
    }

    #[test]
    fn frame_sizes() {
        assert_eq!(PauliFrame::new(2, p(2)).unwrap().dim(), 15);
        assert_eq!(PauliFrame::new(4, p(2)).unwrap().dim(), 255);
        assert_eq!(PauliFrame::new(2, p(3)).unwrap().dim(), 80);
        assert_eq!(EntryFrame::new(4, p(2)).unwrap().dim(), 16);
        assert!(PauliFrame::new(1, p(5)).is_err());
    }

    #[test]
    fn state_coordinates_match_dense() {
        for (m, d) in [(2, 2u32), (1, 3), (2, 3)] {
            let pf = PauliFrame::new(m, p(d)).unwrap();
            let ef = EntryFrame::new(p(d).power_count(m) as usize, p(d)).unwrap();
            for s in enumerate_stab_states(m, d, &Caps::default()).unwrap() {
                let rho = s.density();
                let c = pf.of_state(&s).unwrap();
                assert_eq!(c, pf.of_matrix(&rho).unwrap());
                let mut dense = vec![BigRational::zero(); pf.dim()];
                for (r, v) in &c {
                    dense[*r] = v.clone();
                }
                assert_eq!(pf.to_matrix(&dense).unwrap(), rho);
                let e = ef.of_matrix(&rho).unwrap();
                let mut dense = vec![BigRational::zero(); ef.dim()];
                for (r, v) in e {
                    dense[r] = v;
                }
                assert_eq!(ef.to_matrix(&dense).unwrap(), rho);
            }
        }
    }

    #[test]
    fn trace_functional_matches_dense() {
        for (m, d) in [(2, 2u32), (1, 3), (2, 3)] {
            let pf = PauliFrame::new(m, p(d)).unwrap();
            let states = enumerate_stab_states(m, d, &Caps::default()).unwrap();
            let mix = states[1].density().add(
                &states[states.len() / 2]
                    .density()
                    .scale_rational(&BigRational::new(2.into(), 1.into())),
            );
            let (offset, coeffs) = pf.trace_functional(&mix).unwrap();
            for s in &states {
                let c = pf.of_state(s).unwrap();
                let mut dense = vec![BigRational::zero(); pf.dim()];
                for (r, v) in c {
                    dense[r] = v;
                }
                let f = coeffs
                    .iter()
                    .fold(offset.clone(), |acc, (r, v)| acc + v * &dense[*r]);
                assert_eq!(Some(f), mix.mul(&s.density()).trace().as_rational());
            }
        }
    }
}
