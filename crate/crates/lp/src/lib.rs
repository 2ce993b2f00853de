//! Exact linear programming over convex hulls of generator points.
//!
//! A [`VPolytopeLp`] asks for convex weights λ ≥ 0, Σλ = 1, whose point
//! p = Σ λ_j g_j satisfies linear equalities and optionally maximises a linear
//! objective. Every answer carries a certificate that [`verify`] re-checks in
//! exact arithmetic.

mod json;
mod reduce;
mod simplex;
mod sparse;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use simplex::{Engine, Outcome};

pub use json::{format_rational, parse_rational, LpJson, LpResultJson};

pub type Rational = BigRational;
pub type SparseVec = Vec<(usize, Rational)>;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("the polytope has no generators")]
    EmptyGenerators,
    #[error("malformed LP data: {0}")]
    Malformed(String),
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("certificate verification failed: {0}")]
    VerificationFailed(String),
    #[error("no optimum to certify: {0}")]
    NotOptimal(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equality {
    pub coeffs: SparseVec,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolytopeLp {
    pub dim: usize,
    pub generators: Vec<SparseVec>,
    pub equalities: Vec<Equality>,
    /// Linear functional to maximise.
    pub objective: Option<SparseVec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Feasible,
    Infeasible,
    Optimal,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpResult {
    pub status: Status,
    /// Nonzero convex weights by generator index.
    pub weights: SparseVec,
    pub objective_value: Option<Rational>,
    /// Multipliers on the equality rows followed by the convexity row. For an
    /// infeasible problem they define a functional that is ≥ 0 on every
    /// generator row and < 0 on the right-hand side; at an optimum they are
    /// dual prices.
    pub dual_certificate: Option<Vec<Rational>>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Floating-point warm start before the exact phase.
    pub presolve: bool,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            presolve: true,
            max_iterations: 1_000_000,
        }
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn sparse_dot(a: &[(usize, Rational)], dense: &[Rational]) -> Rational {
    a.iter().fold(Rational::zero(), |acc, (i, v)| {
        if dense[*i].is_zero() {
            acc
        } else {
            acc + v * &dense[*i]
        }
    })
}

impl VPolytopeLp {
    pub fn new(dim: usize, generators: Vec<SparseVec>) -> Self {
        VPolytopeLp {
            dim,
            generators,
            equalities: Vec::new(),
            objective: None,
        }
    }

    /// Pins coordinate i to value v for every (i, v).
    pub fn pin(&mut self, values: impl IntoIterator<Item = (usize, Rational)>) {
        for (i, v) in values {
            self.equalities.push(Equality {
                coeffs: vec![(i, Rational::one())],
                rhs: v,
            });
        }
    }

    pub fn with_objective(mut self, objective: SparseVec) -> Self {
        self.objective = Some(objective);
        self
    }

    fn check(&self) -> Result<(), LpError> {
        if self.generators.is_empty() {
            return Err(LpError::EmptyGenerators);
        }
        let bad = |what: &str, i: usize| {
            LpError::DimensionMismatch(format!("{what} refers to coordinate {i} of {}", self.dim))
        };
        for g in &self.generators {
            if let Some((i, _)) = g.iter().find(|(i, _)| *i >= self.dim) {
                return Err(bad("generator", *i));
            }
        }
        for e in &self.equalities {
            if let Some((i, _)) = e.coeffs.iter().find(|(i, _)| *i >= self.dim) {
                return Err(bad("equality", *i));
            }
        }
        if let Some((i, _)) = self
            .objective
            .iter()
            .flatten()
            .find(|(i, _)| *i >= self.dim)
        {
            return Err(bad("objective", *i));
        }
        Ok(())
    }

    /// Equality rows in weight space: one per equality plus the convexity row.
    fn weight_columns(&self) -> Vec<SparseVec> {
        let mut by_coord: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); self.dim];
        for (r, e) in self.equalities.iter().enumerate() {
            for (i, v) in &e.coeffs {
                by_coord[*i].push((r, v));
            }
        }
        let conv = self.equalities.len();
        self.generators
            .iter()
            .map(|g| {
                let mut acc: std::collections::BTreeMap<usize, Rational> =
                    std::collections::BTreeMap::new();
                for (i, gv) in g {
                    for (r, ev) in &by_coord[*i] {
                        *acc.entry(*r).or_insert_with(Rational::zero) += gv * *ev;
                    }
                }
                let mut col: SparseVec = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                col.push((conv, Rational::one()));
                col
            })
            .collect()
    }

    fn rhs(&self) -> Vec<Rational> {
        self.equalities
            .iter()
            .map(|e| e.rhs.clone())
            .chain(std::iter::once(Rational::one()))
            .collect()
    }

    fn costs(&self) -> Vec<Rational> {
        match &self.objective {
            None => vec![Rational::zero(); self.generators.len()],
            Some(obj) => {
                let mut dense = vec![Rational::zero(); self.dim];
                for (i, v) in obj {
                    dense[*i] += v;
                }
                self.generators
                    .iter()
                    .map(|g| sparse_dot(g, &dense))
                    .collect()
            }
        }
    }

    /// The point Σ λ_j g_j.
    pub fn point(&self, weights: &[(usize, Rational)]) -> Vec<Rational> {
        let mut p = vec![Rational::zero(); self.dim];
        for (j, w) in weights {
            for (i, v) in &self.generators[*j] {
                p[*i] += w * v;
            }
        }
        p
    }
}

pub fn solve(lp: &VPolytopeLp) -> Result<LpResult, LpError> {
    solve_with(lp, &SolveOptions::default())
}

pub fn solve_with(lp: &VPolytopeLp, opts: &SolveOptions) -> Result<LpResult, LpError> {
    lp.check()?;
    let cols = lp.weight_columns();
    let full_rhs = lp.rhs();
    let costs = lp.costs();
    let full_m = full_rhs.len();
    let keep = match reduce::independent_rows(full_m, &cols, &full_rhs) {
        reduce::Rows::Basis(rows) => rows,
        reduce::Rows::Inconsistent(y) => {
            let res = LpResult {
                status: Status::Infeasible,
                weights: Vec::new(),
                objective_value: None,
                dual_certificate: Some(y),
            };
            verify(lp, &res)?;
            return Ok(res);
        }
    };
    let mut new_index = vec![None; full_m];
    for (k, &r) in keep.iter().enumerate() {
        new_index[r] = Some(k);
    }
    let cols: Vec<SparseVec> = cols
        .into_iter()
        .map(|c| {
            c.into_iter()
                .filter_map(|(r, v)| new_index[r].map(|k| (k, v)))
                .collect()
        })
        .collect();
    let mut rhs: Vec<Rational> = keep.iter().map(|&r| full_rhs[r].clone()).collect();
    let m = rhs.len();
    // flip rows so the artificial start is feasible
    let flip: Vec<bool> = rhs.iter().map(|v| v.is_negative()).collect();
    for (v, f) in rhs.iter_mut().zip(&flip) {
        if *f {
            *v = -v.clone();
        }
    }
    let cols: Vec<SparseVec> = cols
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|(r, v)| if flip[r] { (r, -v) } else { (r, v) })
                .collect()
        })
        .collect();
    let n = cols.len();

    let warm = if opts.presolve {
        float_basis(m, &cols, &rhs, &costs, opts.max_iterations)
    } else {
        None
    };
    let unflip = |y: Vec<Rational>| -> Vec<Rational> {
        let mut full = vec![Rational::zero(); full_m];
        for ((v, f), &r) in y.into_iter().zip(&flip).zip(&keep) {
            full[r] = if *f { -v } else { v };
        }
        full
    };
    if let Some(bases) = &warm {
        let reduced = Reduced {
            cols: &cols,
            rhs: &rhs,
            costs: &costs,
            has_objective: lp.objective.is_some(),
        };
        let tries: Vec<(&Vec<usize>, bool)> = bases
            .phase_two
            .iter()
            .map(|b| (b, false))
            .chain([(&bases.phase_one, true), (&bases.phase_one, false)])
            .collect();
        let attempts = [Method::Rounded, Method::Exact]
            .into_iter()
            .flat_map(|method| tries.iter().map(move |&(b, i)| (b, i, method)));
        for (basis, infeasible, method) in attempts {
            if let Some(mut res) = reduced.read_basis(basis, infeasible, method) {
                res.dual_certificate = res.dual_certificate.map(unflip);
                if verify(lp, &res).is_ok() {
                    return Ok(res);
                }
            }
        }
    }
    let mut eng: Engine<Rational> = Engine::new(m, cols, rhs);
    if let Some(b) = warm.map(|w| w.phase_two.unwrap_or(w.phase_one)) {
        let before = eng.basis.clone();
        if !eng.set_basis(&b) || eng.xb.iter().any(|v| v.is_negative()) {
            eng.set_basis(&before);
        }
    }
    let total = eng.ncols();
    let phase1: Vec<Rational> = (0..total)
        .map(|j| {
            if j >= n {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    match eng.minimise(&phase1, &|_| true, opts.max_iterations) {
        Outcome::Optimal => {}
        Outcome::IterationLimit => return Err(LpError::IterationLimit),
        Outcome::Unbounded => {
            return Err(LpError::VerificationFailed(
                "phase one is bounded below".into(),
            ))
        }
    }
    if eng.objective(&phase1).is_positive() {
        let y = eng.duals(&phase1);
        let farkas = unflip(y.into_iter().map(|v| -v).collect());
        let res = LpResult {
            status: Status::Infeasible,
            weights: Vec::new(),
            objective_value: None,
            dual_certificate: Some(farkas),
        };
        verify(lp, &res)?;
        return Ok(res);
    }
    eng.drive_out_artificials();
    let phase2: Vec<Rational> = (0..total)
        .map(|j| {
            if j < n {
                -costs[j].clone()
            } else {
                Rational::zero()
            }
        })
        .collect();
    match eng.minimise(&phase2, &|j| j < n, opts.max_iterations) {
        Outcome::Optimal => {}
        Outcome::IterationLimit => return Err(LpError::IterationLimit),
        Outcome::Unbounded => {
            return Err(LpError::VerificationFailed(
                "a polytope LP cannot be unbounded".into(),
            ))
        }
    }
    let weights: SparseVec = eng
        .primal()
        .into_iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let res = if lp.objective.is_some() {
        let y = unflip(eng.duals(&phase2).into_iter().map(|v| -v).collect());
        let value = weights
            .iter()
            .fold(Rational::zero(), |acc, (j, w)| acc + w * &costs[*j]);
        LpResult {
            status: Status::Optimal,
            weights,
            objective_value: Some(value),
            dual_certificate: Some(y),
        }
    } else {
        LpResult {
            status: Status::Feasible,
            weights,
            objective_value: None,
            dual_certificate: None,
        }
    };
    verify(lp, &res)?;
    Ok(res)
}

/// Bases found by the floating-point simplex.
struct FloatBases {
    phase_one: Vec<usize>,
    phase_two: Option<Vec<usize>>,
}

/// Runs the floating-point simplex on a slightly lifted right-hand side.
fn float_basis(
    m: usize,
    cols: &[SparseVec],
    rhs: &[Rational],
    costs: &[Rational],
    max_iters: usize,
) -> Option<FloatBases> {
    let n = cols.len();
    let mut eng: Engine<f64> = Engine::new(
        m,
        simplex::to_f64_cols(cols),
        // a small distinct lift per row keeps degenerate vertices apart
        rhs.iter()
            .enumerate()
            .map(|(i, v)| simplex::to_f64(v) + 1e-7 * (1.0 + (i as f64 * 0.618_034).fract()))
            .collect(),
    );
    let total = eng.ncols();
    let phase1: Vec<f64> = (0..total).map(|j| if j >= n { 1.0 } else { 0.0 }).collect();
    if eng.minimise(&phase1, &|_| true, max_iters) != Outcome::Optimal {
        return None;
    }
    let phase_one = eng.basis.clone();
    if eng.objective(&phase1) > 1e-3 {
        return Some(FloatBases {
            phase_one,
            phase_two: None,
        });
    }
    eng.drive_out_artificials();
    let phase2: Vec<f64> = (0..total)
        .map(|j| {
            if j < n {
                -simplex::to_f64(&costs[j])
            } else {
                0.0
            }
        })
        .collect();
    let phase_two = (eng.minimise(&phase2, &|j| j < n, max_iters) == Outcome::Optimal)
        .then(|| eng.basis.clone());
    Some(FloatBases {
        phase_one,
        phase_two,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Rounded,
    Exact,
}

/// Nearest fraction with denominator at most 2^24 within 1e-9, by continued
/// fractions.
fn rationalise(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i128;
        (h0, h1) = (h1, ai * h1 + h0);
        (k0, k1) = (k1, ai * k1 + k0);
        if k1 > 1 << 24 {
            return None;
        }
        if (x - h1 as f64 / k1 as f64).abs() < 1e-9 {
            return Some(Rational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// Exact data of the row-reduced, sign-normalised problem.
struct Reduced<'a> {
    cols: &'a [SparseVec],
    rhs: &'a [Rational],
    costs: &'a [Rational],
    has_objective: bool,
}

impl Reduced<'_> {
    fn column(&self, j: usize) -> SparseVec {
        if j < self.cols.len() {
            self.cols[j].clone()
        } else {
            vec![(j - self.cols.len(), Rational::one())]
        }
    }

    fn basis_columns(&self, basis: &[usize]) -> Vec<SparseVec> {
        basis.iter().map(|&j| self.column(j)).collect()
    }

    /// Solves B·x = rhs (or Bᵀ·x = rhs when `transpose`).
    fn basis_solve(
        &self,
        bcols: &[SparseVec],
        rhs: &[Rational],
        transpose: bool,
        method: Method,
    ) -> Option<Vec<Rational>> {
        let m = bcols.len();
        match method {
            Method::Exact => {
                let rows = if transpose {
                    bcols.to_vec()
                } else {
                    let mut rows: Vec<SparseVec> = vec![Vec::new(); m];
                    for (k, c) in bcols.iter().enumerate() {
                        for (i, v) in c {
                            rows[*i].push((k, v.clone()));
                        }
                    }
                    rows
                };
                sparse::solve_square(rows, rhs.to_vec())
            }
            Method::Rounded => {
                let mut eng: Engine<f64> = Engine::new(
                    m,
                    simplex::to_f64_cols(bcols),
                    rhs.iter().map(simplex::to_f64).collect(),
                );
                if !eng.set_basis(&(0..m).collect::<Vec<_>>()) {
                    return None;
                }
                let out = if transpose {
                    let cost: Vec<f64> = rhs
                        .iter()
                        .map(simplex::to_f64)
                        .chain(std::iter::repeat_n(0.0, m))
                        .collect();
                    eng.duals(&cost)
                } else {
                    eng.xb.clone()
                };
                out.into_iter().map(rationalise).collect()
            }
        }
    }

    /// Reads a result off `basis`, if the basis is primal feasible and its
    /// duals certify the answer. Multipliers are in reduced row order. The
    /// rounded method guesses small-denominator values from a float solve;
    /// callers verify whatever comes back.
    fn read_basis(&self, basis: &[usize], infeasible: bool, method: Method) -> Option<LpResult> {
        let m = self.rhs.len();
        let n = self.cols.len();
        if basis.len() != m {
            return None;
        }
        let bcols = self.basis_columns(basis);
        let x = self.basis_solve(&bcols, self.rhs, false, method)?;
        if x.iter().any(|v| v.is_negative()) {
            return None;
        }
        let cost = |j: usize| -> Rational {
            match (infeasible, j < n) {
                (true, is_struct) => {
                    if is_struct {
                        Rational::zero()
                    } else {
                        Rational::one()
                    }
                }
                (false, true) => -self.costs[j].clone(),
                (false, false) => Rational::zero(),
            }
        };
        let objective = basis
            .iter()
            .zip(&x)
            .fold(Rational::zero(), |acc, (&j, v)| acc + cost(j) * v);
        if infeasible && !objective.is_positive() {
            return None;
        }
        let need_duals = infeasible || self.has_objective;
        let y = if need_duals {
            let cb: Vec<Rational> = basis.iter().map(|&j| cost(j)).collect();
            let y = self.basis_solve(&bcols, &cb, true, method)?;
            if (0..n).any(|j| (cost(j) - sparse_dot(&self.cols[j], &y)).is_negative()) {
                return None;
            }
            Some(y.into_iter().map(|v| -v).collect::<Vec<_>>())
        } else {
            None
        };
        if infeasible {
            return Some(LpResult {
                status: Status::Infeasible,
                weights: Vec::new(),
                objective_value: None,
                dual_certificate: y,
            });
        }
        if basis.iter().zip(&x).any(|(&j, v)| j >= n && !v.is_zero()) {
            return None;
        }
        let mut weights: SparseVec = basis
            .iter()
            .zip(x)
            .filter(|(&j, v)| j < n && !v.is_zero())
            .map(|(&j, v)| (j, v))
            .collect();
        weights.sort_by_key(|(j, _)| *j);
        if self.has_objective {
            let value = weights
                .iter()
                .fold(Rational::zero(), |acc, (j, w)| acc + w * &self.costs[*j]);
            Some(LpResult {
                status: Status::Optimal,
                weights,
                objective_value: Some(value),
                dual_certificate: y,
            })
        } else {
            Some(LpResult {
                status: Status::Feasible,
                weights,
                objective_value: None,
                dual_certificate: None,
            })
        }
    }
}

fn fail(msg: impl Into<String>) -> LpError {
    LpError::VerificationFailed(msg.into())
}

/// Exact re-check of a result against the problem data.
pub fn verify(lp: &VPolytopeLp, res: &LpResult) -> Result<(), LpError> {
    lp.check()?;
    let cols = lp.weight_columns();
    let rhs = lp.rhs();
    let costs = lp.costs();
    let row_value = |y: &[Rational], col: &SparseVec| sparse_dot(col, y);
    match res.status {
        Status::Unbounded => Err(fail("a polytope LP cannot be unbounded")),
        Status::Infeasible => {
            let y = res
                .dual_certificate
                .as_ref()
                .ok_or_else(|| fail("infeasible result without a certificate"))?;
            if y.len() != rhs.len() {
                return Err(fail("certificate length"));
            }
            if let Some(j) = cols.iter().position(|c| row_value(y, c).is_negative()) {
                return Err(fail(format!(
                    "separating functional is negative on generator {j}"
                )));
            }
            let at_rhs = y
                .iter()
                .zip(&rhs)
                .fold(Rational::zero(), |acc, (a, b)| acc + a * b);
            if !at_rhs.is_negative() {
                return Err(fail(
                    "separating functional does not separate the constraints",
                ));
            }
            Ok(())
        }
        Status::Feasible | Status::Optimal => {
            let mut lhs = vec![Rational::zero(); rhs.len()];
            for (j, w) in &res.weights {
                if *j >= cols.len() {
                    return Err(fail(format!("weight on unknown generator {j}")));
                }
                if w.is_negative() {
                    return Err(fail(format!("negative weight on generator {j}")));
                }
                for (r, v) in &cols[*j] {
                    lhs[*r] += w * v;
                }
            }
            if lhs != rhs {
                return Err(fail("weights do not satisfy the equalities"));
            }
            if res.status == Status::Optimal {
                let y = res
                    .dual_certificate
                    .as_ref()
                    .ok_or_else(|| fail("optimum without dual prices"))?;
                if y.len() != rhs.len() {
                    return Err(fail("dual length"));
                }
                if let Some(j) =
                    (0..cols.len()).find(|&j| (&costs[j] - row_value(y, &cols[j])).is_positive())
                {
                    return Err(fail(format!("dual infeasible at generator {j}")));
                }
                let primal = res
                    .weights
                    .iter()
                    .fold(Rational::zero(), |acc, (j, w)| acc + w * &costs[*j]);
                let dual = y
                    .iter()
                    .zip(&rhs)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b);
                if primal != dual || res.objective_value.as_ref() != Some(&primal) {
                    return Err(fail("duality gap"));
                }
            }
            Ok(())
        }
    }
}

/// Outcome of [`certify_unique_optimum`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uniqueness {
    pub unique: bool,
    pub value: Rational,
    /// Image of the optimal face when it is a single point.
    pub point: Option<Vec<Rational>>,
    /// Per image coordinate, the (min, max) over the optimal face.
    pub ranges: Vec<(Rational, Rational)>,
}

/// Decides whether the optimal face maps to a single point under `map`
/// (rows are functionals on the coordinate space).
pub fn certify_unique_optimum(lp: &VPolytopeLp, map: &[SparseVec]) -> Result<Uniqueness, LpError> {
    let res = solve(lp)?;
    if res.status != Status::Optimal {
        return Err(LpError::NotOptimal(format!("status {:?}", res.status)));
    }
    let y = res
        .dual_certificate
        .clone()
        .expect("optimal result has duals");
    let value = res
        .objective_value
        .clone()
        .expect("optimal result has a value");
    let cols = lp.weight_columns();
    let costs = lp.costs();
    // columns with zero reduced cost span the optimal face
    let face: Vec<usize> = (0..cols.len())
        .filter(|&j| (&costs[j] - sparse_dot(&cols[j], &y)).is_zero())
        .collect();
    let sub = VPolytopeLp {
        dim: lp.dim,
        generators: face.iter().map(|&j| lp.generators[j].clone()).collect(),
        equalities: lp.equalities.clone(),
        objective: None,
    };
    let mut ranges = Vec::with_capacity(map.len());
    for row in map {
        let mut dense = vec![Rational::zero(); lp.dim];
        for (i, v) in row {
            dense[*i] += v;
        }
        let images: Vec<Rational> = sub
            .generators
            .iter()
            .map(|g| sparse_dot(g, &dense))
            .collect();
        let first = images[0].clone();
        if images.iter().all(|v| *v == first) {
            ranges.push((first.clone(), first));
            continue;
        }
        let hi = solve(&sub.clone().with_objective(row.clone()))?
            .objective_value
            .expect("optimal");
        let neg: SparseVec = row.iter().map(|(i, v)| (*i, -v.clone())).collect();
        let lo = -solve(&sub.clone().with_objective(neg))?
            .objective_value
            .expect("optimal");
        ranges.push((lo, hi));
    }
    let unique = ranges.iter().all(|(a, b)| a == b);
    let point = unique.then(|| ranges.iter().map(|(a, _)| a.clone()).collect());
    Ok(Uniqueness {
        unique,
        value,
        point,
        ranges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens(points: &[&[i64]]) -> Vec<SparseVec> {
        points
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(i, v)| (i, int(*v)))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn midpoint_is_feasible() {
        let mut lp = VPolytopeLp::new(1, gens(&[&[0], &[1]]));
        lp.pin([(0, rat(1, 2))]);
        let res = solve(&lp).unwrap();
        assert_eq!(res.status, Status::Feasible);
        assert_eq!(res.weights, vec![(0, rat(1, 2)), (1, rat(1, 2))]);
    }

    #[test]
    fn outside_segment_is_infeasible() {
        let mut lp = VPolytopeLp::new(1, gens(&[&[0], &[1]]));
        lp.pin([(0, int(2))]);
        let res = solve(&lp).unwrap();
        assert_eq!(res.status, Status::Infeasible);
        assert!(res.dual_certificate.is_some());
        verify(&lp, &res).unwrap();
    }

    #[test]
    fn simplex_maximum() {
        let lp = VPolytopeLp::new(2, gens(&[&[0, 0], &[1, 0], &[0, 1]]))
            .with_objective(vec![(0, int(1))]);
        let res = solve(&lp).unwrap();
        assert_eq!(res.status, Status::Optimal);
        assert_eq!(res.objective_value, Some(int(1)));
        assert_eq!(lp.point(&res.weights), vec![int(1), int(0)]);
    }

    #[test]
    fn uniqueness_examples() {
        let identity: Vec<SparseVec> = vec![vec![(0, int(1))], vec![(1, int(1))]];
        let seg = VPolytopeLp::new(2, gens(&[&[0, 0], &[1, 1]])).with_objective(vec![(0, int(1))]);
        let u = certify_unique_optimum(&seg, &identity).unwrap();
        assert!(u.unique);
        assert_eq!(u.point, Some(vec![int(1), int(1)]));
        let square = VPolytopeLp::new(2, gens(&[&[1, 0], &[1, 1], &[0, 0], &[0, 1]]))
            .with_objective(vec![(0, int(1))]);
        let u = certify_unique_optimum(&square, &identity).unwrap();
        assert!(!u.unique);
        assert_eq!(u.ranges[1], (int(0), int(1)));
    }

    #[test]
    fn tampered_certificates_are_rejected() {
        let mut lp = VPolytopeLp::new(1, gens(&[&[0], &[1]]));
        lp.pin([(0, rat(1, 2))]);
        let mut res = solve(&lp).unwrap();
        res.weights[0].1 = rat(1, 3);
        assert!(verify(&lp, &res).is_err());
        let bad = LpResult {
            status: Status::Infeasible,
            weights: vec![],
            objective_value: None,
            dual_certificate: Some(vec![int(0), int(0)]),
        };
        assert!(verify(&lp, &bad).is_err());
    }

    #[test]
    fn empty_and_mismatched_inputs() {
        assert!(matches!(
            solve(&VPolytopeLp::new(1, vec![])),
            Err(LpError::EmptyGenerators)
        ));
        assert!(matches!(
            solve(&VPolytopeLp::new(1, gens(&[&[0, 1]]))),
            Err(LpError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn degenerate_redundant_rows() {
        // coordinate 1 duplicates coordinate 0, so one pinned row is redundant
        let mut lp = VPolytopeLp::new(2, gens(&[&[0, 0], &[1, 1], &[2, 2]]));
        lp.pin([(0, int(1)), (1, int(1))]);
        let res = solve(&lp).unwrap();
        assert_eq!(res.status, Status::Feasible);
        assert_eq!(lp.point(&res.weights), vec![int(1), int(1)]);
        let lp = lp.with_objective(vec![(0, int(1))]);
        assert_eq!(solve(&lp).unwrap().objective_value, Some(int(1)));
    }
}
