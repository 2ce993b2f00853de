//! Exact elements of the cyclotomic field Q(ζ_N).
//!
//! Amplitudes of d-dimensional stabiliser states live in Q(τ, √d). For d = 2
//! that is Q(ζ_8); for odd d it sits inside Q(ζ_{4d}) (the Gauss sum gives √d
//! up to a power of i). Elements are stored in the power basis 1, ζ, …,
//! ζ^{φ(N)−1} with trailing zero coefficients trimmed, so zero allocates
//! nothing and equality is structural.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const MAX_ORDER: u32 = 256;

struct Table {
    phi: usize,
    /// ζ^k reduced into the power basis, for k in 0..2N.
    powers: Vec<Vec<i64>>,
}

fn table(order: u32) -> &'static Table {
    static TABLES: OnceLock<Vec<OnceLock<Table>>> = OnceLock::new();
    let all = TABLES.get_or_init(|| (0..=MAX_ORDER).map(|_| OnceLock::new()).collect());
    assert!(
        (1..=MAX_ORDER).contains(&order),
        "cyclotomic order {order} out of range"
    );
    all[order as usize].get_or_init(|| build_table(order))
}

fn poly_divide_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // both monic, coefficients low degree first
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut q = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        q[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&v| v == 0));
    q
}

fn cyclotomic_poly(n: u32) -> Vec<i64> {
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for k in (1..n).filter(|k| n.is_multiple_of(*k)) {
        p = poly_divide_exact(&p, &cyclotomic_poly(k));
    }
    p
}

fn build_table(order: u32) -> Table {
    let phi_poly = cyclotomic_poly(order);
    let phi = phi_poly.len() - 1;
    let mut powers = Vec::with_capacity(2 * order as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    for _ in 0..2 * order {
        powers.push(cur.clone());
        // multiply by ζ
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        next[1..phi].copy_from_slice(&cur[..(phi - 1)]);
        if top != 0 {
            for (j, nj) in next.iter_mut().enumerate() {
                *nj -= top * phi_poly[j];
            }
        }
        cur = next;
    }
    Table { phi, powers }
}

/// The cyclotomic order used for qudit dimension d.
pub fn order_for(d: u32) -> u32 {
    if d == 2 {
        8
    } else {
        4 * d
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycRat {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl CycRat {
    pub fn zero(order: u32) -> Self {
        CycRat {
            order,
            coeffs: Vec::new(),
        }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(order, BigRational::one())
    }

    pub fn from_int(order: u32, v: i64) -> Self {
        Self::from_rational(order, BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(order: u32, v: BigRational) -> Self {
        let mut out = CycRat {
            order,
            coeffs: vec![v],
        };
        out.trim();
        out
    }

    /// Builds from power-basis coefficients, reducing any of degree ≥ φ(N).
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Self {
        let t = table(order);
        if coeffs.len() <= t.phi {
            let mut out = CycRat { order, coeffs };
            out.trim();
            return out;
        }
        let mut acc = vec![BigRational::zero(); t.phi];
        for (k, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                add_scaled_power(&mut acc, &c, &t.powers[k % (2 * order as usize)]);
            }
        }
        let mut out = CycRat { order, coeffs: acc };
        out.trim();
        out
    }

    /// ζ_N^k.
    pub fn zeta_pow(order: u32, k: i64) -> Self {
        let t = table(order);
        let k = k.rem_euclid(order as i64) as usize;
        let coeffs = t.powers[k]
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        Self::from_coeffs(order, coeffs)
    }

    /// ω^k with ω = e^{2πi/d}.
    pub fn omega_pow(d: u32, k: i64) -> Self {
        let order = order_for(d);
        Self::zeta_pow(order, k.rem_euclid(d as i64) * (order / d) as i64)
    }

    /// τ^e with τ = (−1)^d e^{iπ/d}: i for d = 2, ω^{(d+1)/2} for odd d.
    pub fn tau_pow(d: u32, e: i64) -> Self {
        if d == 2 {
            Self::zeta_pow(8, 2 * e)
        } else {
            let half = (d as i64 + 1) / 2;
            Self::omega_pow(d, e.rem_euclid(d as i64) * half)
        }
    }

    /// The positive square root of d.
    pub fn sqrt_d(d: u32) -> Self {
        let order = order_for(d);
        let g = if d == 2 {
            Self::zeta_pow(8, 1) + Self::zeta_pow(8, 7)
        } else {
            let mut g = Self::zero(order);
            for x in 0..d as i64 {
                g += &Self::omega_pow(d, x * x);
            }
            if d % 4 == 3 {
                // g = ±i√d
                g = &g * &Self::zeta_pow(order, 3 * (order / 4) as i64);
            }
            g
        };
        if g.approx_re() < 0.0 {
            -g
        } else {
            g
        }
    }

    /// (√d)^k for k ≥ 0.
    pub fn sqrt_d_pow(d: u32, k: u32) -> Self {
        let order = order_for(d);
        let half = BigRational::from_integer(BigInt::from(d).pow(k / 2));
        let base = Self::from_rational(order, half);
        if k % 2 == 1 {
            &base * &Self::sqrt_d(d)
        } else {
            base
        }
    }

    /// (√d)^{-k}.
    pub fn inv_sqrt_d_pow(d: u32, k: u32) -> Self {
        let order = order_for(d);
        let half = BigRational::new(BigInt::one(), BigInt::from(d).pow(k.div_ceil(2)));
        let base = Self::from_rational(order, half);
        if k % 2 == 1 {
            &base * &Self::sqrt_d(d)
        } else {
            base
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.coeffs.len() {
            0 => Some(BigRational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    fn check_order(&self, other: &CycRat) {
        assert_eq!(self.order, other.order, "mixed cyclotomic orders");
    }

    /// Image under the automorphism ζ ↦ ζ^k (k coprime to N).
    pub fn galois(&self, k: u32) -> Self {
        let t = table(self.order);
        let n = self.order as u64;
        let mut acc = vec![BigRational::zero(); t.phi];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                add_scaled_power(&mut acc, c, &t.powers[((j as u64 * k as u64) % n) as usize]);
            }
        }
        let mut out = CycRat {
            order: self.order,
            coeffs: acc,
        };
        out.trim();
        out
    }

    pub fn conj(&self) -> Self {
        self.galois(self.order - 1)
    }

    /// x·conj(x).
    pub fn abs_sq(&self) -> Self {
        self * &self.conj()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.order;
        let mut others = Self::one(n);
        for k in 2..n {
            if num_integer::gcd(k, n) == 1 {
                others = &others * &self.galois(k);
            }
        }
        let norm = (self * &others)
            .as_rational()
            .expect("field norm is rational");
        Some(others.scale(&norm.recip()))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero(self.order);
        }
        CycRat {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplies by ζ^k.
    pub fn mul_zeta(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let t = table(self.order);
        let n = self.order as i64;
        let k = k.rem_euclid(n) as usize;
        let mut acc = vec![BigRational::zero(); t.phi];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                add_scaled_power(&mut acc, c, &t.powers[j + k]);
            }
        }
        let mut out = CycRat {
            order: self.order,
            coeffs: acc,
        };
        out.trim();
        out
    }

    /// Multiplies by τ^e for dimension d.
    pub fn mul_tau(&self, d: u32, e: i64) -> Self {
        if d == 2 {
            self.mul_zeta(2 * e)
        } else {
            let half = (d as i64 + 1) / 2;
            self.mul_zeta(4 * (e.rem_euclid(d as i64) * half % d as i64))
        }
    }

    /// Coordinates (a, b) with x = a + b·u, where u = i for d = 2 and u = ω for
    /// d = 3. None if x is outside Q(τ) or d is not 2 or 3.
    pub fn qtau_coords(&self, d: u32) -> Option<(BigRational, BigRational)> {
        let c = |i: usize| {
            self.coeffs
                .get(i)
                .cloned()
                .unwrap_or_else(BigRational::zero)
        };
        match (d, self.order) {
            // Q(ζ_8): i = ζ²
            (2, 8) => (c(1).is_zero() && c(3).is_zero()).then(|| (c(0), c(2))),
            // Q(ζ_12): Φ = x⁴ − x² + 1, ω = ζ⁴ = ζ² − 1
            (3, 12) => (c(1).is_zero() && c(3).is_zero()).then(|| (c(0) + c(2), c(2))),
            _ => None,
        }
    }

    pub fn from_qtau_coords(d: u32, a: &BigRational, b: &BigRational) -> Self {
        let order = order_for(d);
        let unit = if d == 2 {
            Self::zeta_pow(8, 2)
        } else {
            Self::omega_pow(3, 1)
        };
        Self::from_rational(order, a.clone()) + unit.scale(b)
    }

    /// Floating-point value, for diagnostics and sign decisions only.
    pub fn approx(&self) -> (f64, f64) {
        let n = self.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let th = 2.0 * std::f64::consts::PI * j as f64 / n;
            re += v * th.cos();
            im += v * th.sin();
        }
        (re, im)
    }

    fn approx_re(&self) -> f64 {
        self.approx().0
    }

    /// True when the value is a positive rational.
    pub fn is_positive_rational(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_positive())
    }
}

fn add_scaled_power(acc: &mut [BigRational], c: &BigRational, power: &[i64]) {
    for (a, &p) in acc.iter_mut().zip(power) {
        match p {
            0 => {}
            1 => *a += c,
            -1 => *a -= c,
            _ => *a += c * BigRational::from_integer(BigInt::from(p)),
        }
    }
}

impl fmt::Debug for CycRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for CycRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{j}")?,
            }
        }
        Ok(())
    }
}

impl Add<&CycRat> for &CycRat {
    type Output = CycRat;
    fn add(self, rhs: &CycRat) -> CycRat {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for CycRat {
    type Output = CycRat;
    fn add(mut self, rhs: CycRat) -> CycRat {
        self += &rhs;
        self
    }
}

impl AddAssign<&CycRat> for CycRat {
    fn add_assign(&mut self, rhs: &CycRat) {
        if rhs.is_zero() {
            return;
        }
        self.check_order(rhs);
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigRational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.trim();
    }
}

impl SubAssign<&CycRat> for CycRat {
    fn sub_assign(&mut self, rhs: &CycRat) {
        if rhs.is_zero() {
            return;
        }
        self.check_order(rhs);
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigRational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self.trim();
    }
}

impl Sub<&CycRat> for &CycRat {
    type Output = CycRat;
    fn sub(self, rhs: &CycRat) -> CycRat {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for CycRat {
    type Output = CycRat;
    fn sub(mut self, rhs: CycRat) -> CycRat {
        self -= &rhs;
        self
    }
}

impl Neg for CycRat {
    type Output = CycRat;
    fn neg(mut self) -> CycRat {
        for c in &mut self.coeffs {
            *c = -c.clone();
        }
        self
    }
}

impl Neg for &CycRat {
    type Output = CycRat;
    fn neg(self) -> CycRat {
        -self.clone()
    }
}

impl Mul<&CycRat> for &CycRat {
    type Output = CycRat;
    fn mul(self, rhs: &CycRat) -> CycRat {
        if self.is_zero() || rhs.is_zero() {
            return CycRat::zero(self.order);
        }
        self.check_order(rhs);
        if self.coeffs.len() == 1 {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.coeffs.len() == 1 {
            return self.scale(&rhs.coeffs[0]);
        }
        let t = table(self.order);
        let mut raw = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        let mut acc: Vec<BigRational> = raw.iter().take(t.phi).cloned().collect();
        acc.resize(t.phi, BigRational::zero());
        for (k, c) in raw.iter().enumerate().skip(t.phi) {
            if !c.is_zero() {
                add_scaled_power(&mut acc, c, &t.powers[k]);
            }
        }
        let mut out = CycRat {
            order: self.order,
            coeffs: acc,
        };
        out.trim();
        out
    }
}

impl Mul for CycRat {
    type Output = CycRat;
    fn mul(self, rhs: CycRat) -> CycRat {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
    }

    #[test]
    fn roots_of_unity_wrap() {
        for n in [8u32, 12, 20, 28] {
            assert!(CycRat::zeta_pow(n, n as i64).is_one());
            assert_eq!(
                CycRat::zeta_pow(n, 3) * CycRat::zeta_pow(n, -3),
                CycRat::one(n)
            );
        }
    }

    #[test]
    fn tau_squares_to_omega() {
        for d in [2u32, 3, 5, 7] {
            let t = CycRat::tau_pow(d, 1);
            assert_eq!(&t * &t, CycRat::omega_pow(d, 1), "d = {d}");
            let big_d = if d == 2 { 4 } else { d as i64 };
            assert!(CycRat::tau_pow(d, big_d).is_one());
        }
        assert_eq!(CycRat::tau_pow(2, 1), CycRat::zeta_pow(8, 2));
    }

    #[test]
    fn square_roots() {
        for d in [2u32, 3, 5, 7, 11] {
            let r = CycRat::sqrt_d(d);
            assert_eq!(&r * &r, CycRat::from_int(order_for(d), d as i64));
            assert!(r.approx().0 > 0.0);
            let inv = CycRat::inv_sqrt_d_pow(d, 3);
            assert!((&inv * &CycRat::sqrt_d_pow(d, 3)).is_one());
        }
    }

    #[test]
    fn inverse_and_conjugate() {
        let x = CycRat::from_int(12, 2) + CycRat::zeta_pow(12, 1).scale(&q(1, 3));
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        let i = CycRat::zeta_pow(8, 2);
        assert_eq!(i.conj(), -&i);
        assert!(CycRat::zero(8).inv().is_none());
    }

    #[test]
    fn qtau_round_trip() {
        let a = q(1, 2);
        let b = q(-3, 4);
        for d in [2u32, 3] {
            let x = CycRat::from_qtau_coords(d, &a, &b);
            assert_eq!(x.qtau_coords(d), Some((a.clone(), b.clone())));
        }
        assert!(CycRat::sqrt_d(2).qtau_coords(2).is_none());
    }
}
