//! JSON wire format with rationals written as "p/q" strings.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::{Equality, LpError, LpResult, Rational, SparseVec, Status, VPolytopeLp};

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational, LpError> {
    let bad = || LpError::Malformed(format!("not a rational: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

fn sparse_out(v: &SparseVec) -> Vec<(usize, String)> {
    v.iter().map(|(i, r)| (*i, format_rational(r))).collect()
}

fn sparse_in(v: &[(usize, String)]) -> Result<SparseVec, LpError> {
    v.iter()
        .map(|(i, s)| Ok((*i, parse_rational(s)?)))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EqualityJson {
    pub coeffs: Vec<(usize, String)>,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpJson {
    pub schema: String,
    pub dim: usize,
    pub generators: Vec<Vec<(usize, String)>>,
    pub equalities: Vec<EqualityJson>,
    pub objective: Option<Vec<(usize, String)>>,
}

impl From<&VPolytopeLp> for LpJson {
    fn from(lp: &VPolytopeLp) -> Self {
        LpJson {
            schema: "v1".into(),
            dim: lp.dim,
            generators: lp.generators.iter().map(sparse_out).collect(),
            equalities: lp
                .equalities
                .iter()
                .map(|e| EqualityJson {
                    coeffs: sparse_out(&e.coeffs),
                    rhs: format_rational(&e.rhs),
                })
                .collect(),
            objective: lp.objective.as_ref().map(sparse_out),
        }
    }
}

impl LpJson {
    pub fn to_lp(&self) -> Result<VPolytopeLp, LpError> {
        Ok(VPolytopeLp {
            dim: self.dim,
            generators: self
                .generators
                .iter()
                .map(|g| sparse_in(g))
                .collect::<Result<_, _>>()?,
            equalities: self
                .equalities
                .iter()
                .map(|e| {
                    Ok(Equality {
                        coeffs: sparse_in(&e.coeffs)?,
                        rhs: parse_rational(&e.rhs)?,
                    })
                })
                .collect::<Result<_, LpError>>()?,
            objective: self.objective.as_ref().map(|o| sparse_in(o)).transpose()?,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpResultJson {
    pub schema: String,
    pub status: Status,
    pub weights: Vec<(usize, String)>,
    pub objective_value: Option<String>,
    pub dual_certificate: Option<Vec<String>>,
}

impl From<&LpResult> for LpResultJson {
    fn from(r: &LpResult) -> Self {
        LpResultJson {
            schema: "v1".into(),
            status: r.status,
            weights: sparse_out(&r.weights),
            objective_value: r.objective_value.as_ref().map(format_rational),
            dual_certificate: r
                .dual_certificate
                .as_ref()
                .map(|y| y.iter().map(format_rational).collect()),
        }
    }
}

impl LpResultJson {
    pub fn to_result(&self) -> Result<LpResult, LpError> {
        Ok(LpResult {
            status: self.status,
            weights: sparse_in(&self.weights)?,
            objective_value: self
                .objective_value
                .as_deref()
                .map(parse_rational)
                .transpose()?,
            dual_certificate: self
                .dual_certificate
                .as_ref()
                .map(|y| {
                    y.iter()
                        .map(|s| parse_rational(s))
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, solve};

    #[test]
    fn rational_strings() {
        assert_eq!(format_rational(&rat(5, 12)), "5/12");
        assert_eq!(format_rational(&rat(0, 3)), "0");
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn problem_and_result_round_trip() {
        let mut lp = VPolytopeLp::new(1, vec![vec![], vec![(0, rat(1, 1))]]);
        lp.pin([(0, rat(1, 3))]);
        let text = serde_json::to_string(&LpJson::from(&lp)).unwrap();
        let back: LpJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_lp().unwrap(), lp);
        let res = solve(&lp).unwrap();
        let text = serde_json::to_string(&LpResultJson::from(&res)).unwrap();
        assert!(text.contains("\"feasible\""));
        let back: LpResultJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_result().unwrap(), res);
    }
}
