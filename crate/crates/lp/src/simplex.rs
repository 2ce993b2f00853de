//! Dense-inverse revised simplex, generic over exact and floating scalars.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub(crate) trait Scalar: Clone + std::fmt::Debug {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rat(r: &BigRational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn lt(&self, o: &Self) -> bool;
    fn abs_gt(&self, o: &Self) -> bool;
}

const EPS: f64 = 1e-9;

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rat(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        self.abs() <= EPS
    }
    fn is_pos(&self) -> bool {
        *self > EPS
    }
    fn is_neg(&self) -> bool {
        *self < -EPS
    }
    fn lt(&self, o: &Self) -> bool {
        *self < *o - EPS
    }
    fn abs_gt(&self, o: &Self) -> bool {
        self.abs() > o.abs()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_rat(r: &BigRational) -> Self {
        r.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
    fn abs_gt(&self, o: &Self) -> bool {
        self.abs() > o.abs()
    }
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

/// Columns 0..nstruct are structural, nstruct..nstruct+m are artificial units.
pub(crate) struct Engine<T> {
    pub m: usize,
    pub nstruct: usize,
    cols: Vec<Vec<(usize, T)>>,
    rhs: Vec<T>,
    binv: Vec<Vec<T>>,
    pub basis: Vec<usize>,
    pos: Vec<Option<usize>>,
    pub xb: Vec<T>,
    pivots_since_refactor: usize,
}

impl<T: Scalar> Engine<T> {
    pub fn new(m: usize, mut cols: Vec<Vec<(usize, T)>>, rhs: Vec<T>) -> Self {
        let nstruct = cols.len();
        for i in 0..m {
            cols.push(vec![(i, T::one())]);
        }
        let basis: Vec<usize> = (nstruct..nstruct + m).collect();
        let mut pos = vec![None; nstruct + m];
        for (i, &b) in basis.iter().enumerate() {
            pos[b] = Some(i);
        }
        let binv = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { T::one() } else { T::zero() })
                    .collect()
            })
            .collect();
        Engine {
            m,
            nstruct,
            cols,
            xb: rhs.clone(),
            rhs,
            binv,
            basis,
            pos,
            pivots_since_refactor: 0,
        }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn is_artificial(&self, j: usize) -> bool {
        j >= self.nstruct
    }

    fn invert(&self, basis: &[usize]) -> Option<Vec<Vec<T>>> {
        let m = self.m;
        let mut a: Vec<Vec<T>> = vec![vec![T::zero(); m]; m];
        for (c, &j) in basis.iter().enumerate() {
            for (r, v) in &self.cols[j] {
                a[*r][c] = v.clone();
            }
        }
        let mut inv: Vec<Vec<T>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| if i == j { T::one() } else { T::zero() })
                    .collect()
            })
            .collect();
        for c in 0..m {
            let mut best: Option<usize> = None;
            for r in c..m {
                if a[r][c].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(r),
                    Some(b) if !T::EXACT && a[r][c].abs_gt(&a[b][c]) => best = Some(r),
                    _ => {}
                }
                if T::EXACT {
                    break;
                }
            }
            let p = best?;
            a.swap(c, p);
            inv.swap(c, p);
            let piv = a[c][c].clone();
            for v in a[c].iter_mut().chain(inv[c].iter_mut()) {
                if !v.is_zero() {
                    *v = v.div(&piv);
                }
            }
            let (arow, irow) = (a[c].clone(), inv[c].clone());
            for r in 0..m {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for (k, v) in arow.iter().enumerate() {
                    if !v.is_zero() {
                        a[r][k] = a[r][k].sub(&f.mul(v));
                    }
                }
                for (k, v) in irow.iter().enumerate() {
                    if !v.is_zero() {
                        inv[r][k] = inv[r][k].sub(&f.mul(v));
                    }
                }
            }
        }
        // rows of `inv` follow the column order of `basis`
        Some(inv)
    }

    /// Installs a basis; false if it is singular.
    pub fn set_basis(&mut self, basis: &[usize]) -> bool {
        let Some(binv) = self.invert(basis) else {
            return false;
        };
        self.binv = binv;
        self.basis = basis.to_vec();
        self.pos = vec![None; self.cols.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            self.pos[b] = Some(i);
        }
        self.recompute_xb();
        self.pivots_since_refactor = 0;
        true
    }

    fn recompute_xb(&mut self) {
        self.xb = self
            .binv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.rhs)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect();
    }

    pub fn duals(&self, cost: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.m];
        for (i, &b) in self.basis.iter().enumerate() {
            let c = &cost[b];
            if c.is_zero() {
                continue;
            }
            for (j, v) in self.binv[i].iter().enumerate() {
                if !v.is_zero() {
                    y[j] = y[j].add(&c.mul(v));
                }
            }
        }
        y
    }

    pub fn reduced_cost(&self, j: usize, cost: &[T], y: &[T]) -> T {
        self.cols[j].iter().fold(cost[j].clone(), |acc, (r, v)| {
            if y[*r].is_zero() {
                acc
            } else {
                acc.sub(&y[*r].mul(v))
            }
        })
    }

    fn column(&self, j: usize) -> Vec<T> {
        self.binv
            .iter()
            .map(|row| {
                self.cols[j].iter().fold(T::zero(), |acc, (r, v)| {
                    if row[*r].is_zero() {
                        acc
                    } else {
                        acc.add(&row[*r].mul(v))
                    }
                })
            })
            .collect()
    }

    fn pivot(&mut self, p: usize, q: usize, d: &[T]) {
        let piv = d[p].clone();
        let prow: Vec<T> = self.binv[p]
            .iter()
            .map(|v| if v.is_zero() { T::zero() } else { v.div(&piv) })
            .collect();
        let xp = self.xb[p].div(&piv);
        for (i, f) in d.iter().enumerate().take(self.m) {
            if i == p || f.is_zero() {
                continue;
            }
            for (k, v) in prow.iter().enumerate() {
                if !v.is_zero() {
                    self.binv[i][k] = self.binv[i][k].sub(&f.mul(v));
                }
            }
            self.xb[i] = self.xb[i].sub(&f.mul(&xp));
        }
        self.binv[p] = prow;
        self.xb[p] = xp;
        self.pos[self.basis[p]] = None;
        self.basis[p] = q;
        self.pos[q] = Some(p);
        self.pivots_since_refactor += 1;
        if !T::EXACT && self.pivots_since_refactor >= 64 {
            let basis = self.basis.clone();
            self.set_basis(&basis);
            for v in &mut self.xb {
                if v.is_zero() {
                    *v = T::zero();
                }
            }
        }
    }

    pub fn objective(&self, cost: &[T]) -> T {
        self.basis
            .iter()
            .zip(&self.xb)
            .fold(T::zero(), |acc, (&b, x)| acc.add(&cost[b].mul(x)))
    }

    /// Minimises cost over columns accepted by `allowed`, from the current
    /// primal-feasible basis.
    pub fn minimise(
        &mut self,
        cost: &[T],
        allowed: &dyn Fn(usize) -> bool,
        max_iters: usize,
    ) -> Outcome {
        // exact runs start near the optimum and use Bland's rule once stalled;
        // float runs pick a pseudo-random improving column instead
        let mut stalled = T::EXACT;
        let mut stall = 0usize;
        let mut rng = 0x9e37_79b9_7f4a_7c15u64;
        let mut last = self.objective(cost);
        for _ in 0..max_iters {
            let y = self.duals(cost);
            let mut entering: Option<(usize, T)> = None;
            let mut seen = 0u64;
            for j in 0..self.cols.len() {
                if self.pos[j].is_some() || !allowed(j) {
                    continue;
                }
                let rc = self.reduced_cost(j, cost, &y);
                if !rc.is_neg() {
                    continue;
                }
                if stalled && T::EXACT {
                    entering = Some((j, rc));
                    break;
                }
                if stalled {
                    // reservoir sampling over the improving columns
                    seen += 1;
                    rng ^= rng << 13;
                    rng ^= rng >> 7;
                    rng ^= rng << 17;
                    if rng.is_multiple_of(seen) {
                        entering = Some((j, rc));
                    }
                    continue;
                }
                if entering.as_ref().is_none_or(|(_, best)| rc.lt(best)) {
                    entering = Some((j, rc));
                }
            }
            let Some((q, _)) = entering else {
                return Outcome::Optimal;
            };
            let d = self.column(q);
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                if !d[i].is_pos() {
                    continue;
                }
                let ratio = self.xb[i].div(&d[i]);
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        if ratio.lt(best) {
                            true
                        } else if best.lt(&ratio) {
                            false
                        } else if T::EXACT {
                            self.basis[i] < self.basis[*l]
                        } else {
                            d[i].abs_gt(&d[*l])
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((p, _)) = leave else {
                return Outcome::Unbounded;
            };
            self.pivot(p, q, &d);
            let now = self.objective(cost);
            if now.lt(&last) {
                last = now;
                stall = 0;
                if !T::EXACT {
                    stalled = false;
                }
            } else {
                stall += 1;
                if stall > 50 {
                    stalled = true;
                }
            }
        }
        Outcome::IterationLimit
    }

    /// Pivots basic artificials out where a structural column allows it.
    pub fn drive_out_artificials(&mut self) {
        for i in 0..self.m {
            if !self.is_artificial(self.basis[i]) {
                continue;
            }
            let row = self.binv[i].clone();
            let mut best: Option<(usize, T)> = None;
            for j in 0..self.nstruct {
                if self.pos[j].is_some() {
                    continue;
                }
                let v = self.cols[j].iter().fold(T::zero(), |acc, (r, a)| {
                    if row[*r].is_zero() {
                        acc
                    } else {
                        acc.add(&row[*r].mul(a))
                    }
                });
                if v.is_zero() {
                    continue;
                }
                if best.as_ref().is_none_or(|(_, b)| v.abs_gt(b)) {
                    best = Some((j, v));
                    if T::EXACT {
                        break;
                    }
                }
            }
            if let Some((j, _)) = best {
                let d = self.column(j);
                self.pivot(i, j, &d);
            }
        }
    }

    /// Structural primal values.
    pub fn primal(&self) -> Vec<T> {
        let mut x = vec![T::zero(); self.nstruct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.nstruct {
                x[b] = self.xb[i].clone();
            }
        }
        x
    }
}

pub(crate) fn to_f64_cols(cols: &[Vec<(usize, BigRational)>]) -> Vec<Vec<(usize, f64)>> {
    cols.iter()
        .map(|c| c.iter().map(|(r, v)| (*r, f64::from_rat(v))).collect())
        .collect()
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    f64::from_rat(r)
}
