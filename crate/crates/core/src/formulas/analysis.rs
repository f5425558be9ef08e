//! Polynomial-in-`q` analysis of multiplicities over families of prime powers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::multiplicity::{closed_multiplicity, ser_rat, torus_part_sum, MultiplicityQuery};
use crate::error::{Error, Result};
use crate::group::{Gln, TorusEntry};
use crate::scalar::{interpolate, rat_string, QPolynomial, Rat};
use crate::torus::TorusChar;
use crate::weyl::Partition;

/// How to choose `theta` on a torus at each `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaPolicy {
    Explicit(TorusChar),
    Trivial,
    /// Generator exponent 1 on a cyclic torus.
    Faithful,
    GeneralPositionSearch,
    /// First `theta` whose set of nodes with nonzero `delta` is exactly the
    /// given set, optionally also in general position.
    Pattern {
        support: PatternSupport,
        general_position: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternSupport {
    /// Only the top node, i.e. trivial on `Z(G)^F` and on no larger centre.
    Center,
    Bits(Vec<bool>),
}

impl FromStr for ThetaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<ThetaPolicy> {
        let s = s.trim();
        Ok(match s {
            "trivial" => ThetaPolicy::Trivial,
            "faithful" => ThetaPolicy::Faithful,
            "general-position-search" | "gp" => ThetaPolicy::GeneralPositionSearch,
            _ => {
                if let Some(spec) = s.strip_prefix("pattern:") {
                    let (body, gp) = match spec.strip_suffix("+gp") {
                        Some(b) => (b, true),
                        None => (spec, false),
                    };
                    let support = if body == "center" {
                        PatternSupport::Center
                    } else if !body.is_empty() && body.chars().all(|c| c == '0' || c == '1') {
                        PatternSupport::Bits(body.chars().map(|c| c == '1').collect())
                    } else {
                        return Err(Error::InvalidArgument(format!("bad pattern '{body}'")));
                    };
                    ThetaPolicy::Pattern { support, general_position: gp }
                } else {
                    ThetaPolicy::Explicit(s.parse()?)
                }
            }
        })
    }
}

impl fmt::Display for ThetaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThetaPolicy::Explicit(t) => write!(f, "{t}"),
            ThetaPolicy::Trivial => f.write_str("trivial"),
            ThetaPolicy::Faithful => f.write_str("faithful"),
            ThetaPolicy::GeneralPositionSearch => f.write_str("general-position-search"),
            ThetaPolicy::Pattern { support, general_position } => {
                f.write_str("pattern:")?;
                match support {
                    PatternSupport::Center => f.write_str("center")?,
                    PatternSupport::Bits(b) => {
                        for &x in b {
                            f.write_str(if x { "1" } else { "0" })?;
                        }
                    }
                }
                if *general_position {
                    f.write_str("+gp")?;
                }
                Ok(())
            }
        }
    }
}

/// Applies a policy; `Ok(None)` when no character qualifies.
pub fn select_theta(entry: &TorusEntry, policy: &ThetaPolicy) -> Result<Option<TorusChar>> {
    let t = &entry.datum;
    match policy {
        ThetaPolicy::Explicit(th) => {
            t.check_char(th)?;
            Ok(Some(th.clone()))
        }
        ThetaPolicy::Trivial => Ok(Some(t.trivial_char())),
        ThetaPolicy::Faithful => {
            if t.rank() != 1 {
                return Ok(None);
            }
            Ok(Some(TorusChar(vec![1])))
        }
        ThetaPolicy::GeneralPositionSearch => {
            for th in t.characters() {
                if t.in_general_position(&th)? {
                    return Ok(Some(th));
                }
            }
            Ok(None)
        }
        ThetaPolicy::Pattern { support, general_position } => {
            let want: Vec<bool> = match support {
                PatternSupport::Center => (0..entry.poset.len()).map(|i| i == entry.poset.top()).collect(),
                PatternSupport::Bits(b) => {
                    if b.len() != entry.poset.len() {
                        return Err(Error::InvalidArgument(format!(
                            "pattern has {} bits but the poset has {} nodes",
                            b.len(),
                            entry.poset.len()
                        )));
                    }
                    b.clone()
                }
            };
            for th in t.characters() {
                if entry.poset.delta_pattern(t, &th) == want && (!general_position || t.in_general_position(&th)?) {
                    return Ok(Some(th));
                }
            }
            Ok(None)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Point {
    pub q: u64,
    #[serde(serialize_with = "ser_rat")]
    pub value: Rat,
    /// Character chosen by the policy, if any.
    pub theta: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpReport {
    pub points: Vec<Point>,
    /// `q` values dropped because no character matched the policy.
    pub dropped: Vec<u64>,
    pub polynomial: String,
    pub coefficients: Vec<String>,
    pub degree: Option<usize>,
    pub leading: String,
    pub holdout: Option<Point>,
    pub holdout_predicted: Option<String>,
    pub holdout_ok: Option<bool>,
    #[serde(skip)]
    pub poly: QPolynomial,
}

/// Interpolates the points and checks the prediction at the held-out point.
pub fn degree_analysis(points: Vec<Point>, dropped: Vec<u64>, holdout: Option<Point>) -> Result<InterpReport> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(format!("{} points are not enough to interpolate", points.len())));
    }
    let data: Vec<(Rat, Rat)> =
        points.iter().map(|p| (Rat::from_integer(BigInt::from(p.q)), p.value.clone())).collect();
    let poly = interpolate(&data)?;
    let (holdout_predicted, holdout_ok) = match &holdout {
        Some(h) => {
            let pred = poly.eval(&Rat::from_integer(BigInt::from(h.q)));
            (Some(rat_string(&pred)), Some(pred == h.value))
        }
        None => (None, None),
    };
    Ok(InterpReport {
        points,
        dropped,
        polynomial: poly.to_string(),
        coefficients: poly.coeffs().iter().map(rat_string).collect(),
        degree: poly.degree(),
        leading: rat_string(&poly.leading()),
        holdout,
        holdout_predicted,
        holdout_ok,
        poly,
    })
}

/// A quantity evaluated at each `q` of a family.
#[derive(Clone, Debug)]
pub enum Family {
    /// `<U_{chi_1} x ... x R_{T_w}(theta), 1>` with `theta` chosen by policy.
    Multiplicity { n: usize, chars: Vec<Partition>, torus: Partition, policy: ThetaPolicy },
    /// `|G| * torus_part_sum`.
    TorusPart { n: usize, chars: Vec<Partition> },
    /// Number of regular semisimple elements of the torus type `w`.
    Fiber { n: usize, torus: Partition },
}

impl Family {
    pub fn n(&self) -> usize {
        match self {
            Family::Multiplicity { n, .. } | Family::TorusPart { n, .. } | Family::Fiber { n, .. } => *n,
        }
    }

    /// Value at `q`, or `None` when the policy finds no character.
    pub fn evaluate(&self, q: u64) -> Result<Option<Point>> {
        let g = Gln::new(self.n(), q)?;
        self.evaluate_in(&g)
    }

    pub fn evaluate_in(&self, g: &Gln) -> Result<Option<Point>> {
        let q = g.q;
        match self {
            Family::Multiplicity { n, chars, torus, policy } => {
                let entry = g.torus(torus)?;
                let Some(theta) = select_theta(&entry, policy)? else { return Ok(None) };
                let query = MultiplicityQuery {
                    n: *n,
                    q,
                    chars: chars.clone(),
                    torus: torus.clone(),
                    thetas: vec![theta.clone()],
                };
                let value = closed_multiplicity(g, &query)?.value;
                Ok(Some(Point { q, value, theta: Some(theta.to_string()) }))
            }
            Family::TorusPart { chars, .. } => {
                let v = torus_part_sum(g, chars)? * Rat::from_integer(BigInt::from(g.order()));
                Ok(Some(Point { q, value: v, theta: None }))
            }
            Family::Fiber { torus, .. } => {
                let mut v = BigInt::zero();
                for r in &g.types {
                    if r.label.torus_class().as_ref() == Some(torus) {
                        v += BigInt::from(r.fiber);
                    }
                }
                Ok(Some(Point { q, value: Rat::from_integer(v), theta: None }))
            }
        }
    }
}

/// Evaluates the family on `qs`, interpolates and checks `holdout`.
pub fn analyze_family(family: &Family, qs: &[u64], holdout: Option<u64>) -> Result<InterpReport> {
    use rayon::prelude::*;
    let evaluated: Vec<(u64, Option<Point>)> =
        qs.par_iter().map(|&q| Ok((q, family.evaluate(q)?))).collect::<Result<_>>()?;
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for (q, p) in evaluated {
        match p {
            Some(p) => points.push(p),
            None => dropped.push(q),
        }
    }
    let h = match holdout {
        Some(q) => family.evaluate(q)?,
        None => None,
    };
    if points.is_empty() {
        return Err(Error::Precondition("the theta policy is unrealizable at every q".into()));
    }
    degree_analysis(points, dropped, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn policies_parse() {
        for s in ["trivial", "faithful", "general-position-search", "pattern:center+gp", "pattern:0101", "1,2"] {
            let p: ThetaPolicy = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("pattern:x".parse::<ThetaPolicy>().is_err());
    }

    #[test]
    fn coxeter_fiber_gl2() {
        let fam = Family::Fiber { n: 2, torus: "2".parse().unwrap() };
        let rep = analyze_family(&fam, &[5, 7, 8, 9, 11], Some(13)).unwrap();
        // q^2 (q-1)^2 / 2
        let expect = QPolynomial::new(vec![rat(0, 1), rat(0, 1), rat(1, 2), rat(-1, 1), rat(1, 2)]);
        assert_eq!(rep.poly, expect);
        assert_eq!(rep.holdout_ok, Some(true));
    }
}
